"""Probability measures, dyadic histograms and L^q spectra.

Three measure types are supported: finite atomic measures, invariant
measures of weighted IFSs, and finite mixtures of either.  Dyadic cells are
half-open, ``[j 2^-k, (j+1) 2^-k)``, so an atom on a cell boundary belongs
to the cell on its right.  All logarithms are base 2.

For a 1D self-similar measure with rational data whose first-level hull
images have disjoint interiors, the distribution function satisfies

    F(x) = P_{<i} + p_i F(h_i^{-1} x)          (h_i increasing)
    F(x) = P_{<i} + p_i (1 - F(h_i^{-1} x))    (h_i decreasing)

on the i-th image, and is constant on the gaps.  Rational points have
eventually periodic orbits when the ratios are unit fractions, so the chain
of these relations closes and ``F`` is computed exactly; histograms built
from it are marked ``Exact``.  Otherwise cylinders are used.
"""

from bisect import bisect_right
from collections import Counter, defaultdict
from dataclasses import dataclass
from fractions import Fraction
import math

import numpy as np

from .config import WEIGHT_TOL, default_budget
from .errors import (BudgetError, ConvergenceError, DimensionError,
                     DomainError, UnsupportedError)
from .geometry import is_exact
from .ifs import IFS, Similarity, WeightedIFS, attractor_hull, chaos_game

EXACT = "Exact"
CYLINDER = "CylinderApprox"
MONTE_CARLO = "MonteCarlo"


def _exact_scalar(x):
    return is_exact(x) and not isinstance(x, bool)


def _sqrt(m):
    r = math.isqrt(m)
    return r if r * r == m else math.sqrt(m)


# ------------------------------------------------------------------ types


@dataclass(frozen=True)
class DiscreteMeasure:
    """Finite atomic probability measure; coincident atoms are merged."""

    positions: tuple
    weights: tuple

    def __post_init__(self):
        pos = [tuple(np.atleast_1d(np.asarray(p, dtype=object)).tolist()) for p in self.positions]
        w = list(self.weights)
        if not pos or len(pos) != len(w):
            raise DomainError("need matching, nonempty positions and weights")
        m = len(pos[0])
        if any(len(p) != m for p in pos):
            raise DimensionError("atoms live in different dimensions")
        if any(not (x > 0) for x in w):
            raise DomainError("weights must be positive")
        exact = all(_exact_scalar(v) for p in pos for v in p) and all(_exact_scalar(x) for x in w)
        if not exact:
            pos = [tuple(float(v) for v in p) for p in pos]
            w = [float(x) for x in w]
        merged = {}
        for p, x in zip(pos, w):
            merged[p] = merged.get(p, 0) + x
        total = sum(merged.values())
        if abs(float(total) - 1.0) > WEIGHT_TOL:
            raise DomainError(f"weights sum to {total}, not 1")
        object.__setattr__(self, "positions", tuple(merged))
        object.__setattr__(self, "weights", tuple(merged.values()))

    @classmethod
    def dirac(cls, x):
        return cls((np.atleast_1d(np.asarray(x, dtype=object)).tolist(),), (1,))

    @property
    def dim(self):
        return len(self.positions[0])

    @property
    def exact(self):
        return all(_exact_scalar(x) for x in self.weights) and all(
            _exact_scalar(v) for p in self.positions for v in p)

    def __len__(self):
        return len(self.weights)

    def array(self):
        return np.array(self.positions, dtype=float)

    def weight_array(self):
        return np.array(self.weights, dtype=float)

    def bounds(self):
        cols = list(zip(*self.positions))
        return tuple(min(c) for c in cols), tuple(max(c) for c in cols)


@dataclass(frozen=True)
class SelfSimilarMeasure:
    """Invariant measure of a weighted IFS, with the attractor's hull."""

    wifs: WeightedIFS
    hull: object = None

    def __post_init__(self):
        if self.hull is None:
            object.__setattr__(self, "hull", attractor_hull(self.wifs.ifs))

    @property
    def dim(self):
        return self.wifs.ifs.dim

    @property
    def exact(self):
        return self.wifs.exact

    def bounds(self):
        box = self.hull.bounds()
        return tuple(lo for lo, _ in box), tuple(hi for _, hi in box)


@dataclass(frozen=True)
class MixtureMeasure:
    components: tuple        # ((measure, weight), ...)

    def __post_init__(self):
        comps = tuple((mu, w) for mu, w in self.components)
        if not comps:
            raise DomainError("empty mixture")
        if any(not (w > 0) for _, w in comps):
            raise DomainError("mixture weights must be positive")
        if abs(float(sum(w for _, w in comps)) - 1.0) > WEIGHT_TOL:
            raise DomainError("mixture weights must sum to 1")
        if len({mu.dim for mu, _ in comps}) != 1:
            raise DimensionError("mixture components live in different dimensions")
        object.__setattr__(self, "components", comps)

    @property
    def dim(self):
        return self.components[0][0].dim

    @property
    def exact(self):
        return all(mu.exact and _exact_scalar(w) for mu, w in self.components)

    def bounds(self):
        lows, highs = zip(*(mu.bounds() for mu, _ in self.components))
        return (tuple(min(c) for c in zip(*lows)), tuple(max(c) for c in zip(*highs)))


# ---------------------------------------------------- scaling and shifting


def _conjugate(mu, scale, shift):
    """Pushforward under ``x -> scale * x + shift`` (scalar ``scale``)."""
    if isinstance(mu, DiscreteMeasure):
        pos = [tuple(scale * v + s for v, s in zip(p, shift)) for p in mu.positions]
        return DiscreteMeasure(pos, mu.weights)
    if isinstance(mu, MixtureMeasure):
        return MixtureMeasure(tuple((_conjugate(c, scale, shift), w) for c, w in mu.components))
    if isinstance(mu, SelfSimilarMeasure):
        maps = []
        for h in mu.wifs.ifs.maps:
            U = h.matrix()
            t = np.array(shift, dtype=U.dtype)
            a = np.array(h.translation, dtype=U.dtype)
            new = scale * a + t - h.ratio * (U @ t)
            maps.append(Similarity(h.ratio, h.orthogonal, new.tolist()))
        V = [tuple(scale * v + s for v, s in zip(p, shift)) for p in mu.hull.vertices]
        hull = type(mu.hull)(tuple(V)) if mu.dim > 1 else type(mu.hull)(tuple(sorted(V)))
        return SelfSimilarMeasure(WeightedIFS(IFS(tuple(maps)), mu.wifs.weights), hull)
    raise TypeError(f"unsupported measure type {type(mu).__name__}")


def _inverse(beta):
    if _exact_scalar(beta):
        return Fraction(1) / Fraction(beta)
    return 1.0 / beta


def scale_measure(mu, beta):
    """Pushforward under ``x -> x / beta``, i.e. ``nu(D) = mu(beta D)``."""
    if beta == 0:
        raise DomainError("scale factor must be nonzero")
    return _conjugate(mu, _inverse(beta), (0,) * mu.dim)


def translate_measure(mu, x):
    """Pushforward under ``y -> y + x``, i.e. ``mu * delta_x``."""
    x = tuple(np.atleast_1d(np.asarray(x, dtype=object)).tolist())
    if len(x) != mu.dim:
        raise DimensionError("shift dimension mismatch")
    return _conjugate(mu, 1, x)


# -------------------------------------------------------------- convolution


def convolve(mu, nu):
    """Convolution of two finite atomic measures (coincident sums merged).

    If one argument is not atomic, :func:`convolve_with_discrete` is used.
    """
    if not isinstance(nu, DiscreteMeasure):
        mu, nu = nu, mu
    if not isinstance(nu, DiscreteMeasure):
        raise UnsupportedError("at least one factor must be atomic")
    if not isinstance(mu, DiscreteMeasure):
        return convolve_with_discrete(mu, nu)
    if mu.dim != nu.dim:
        raise DimensionError("dimension mismatch")
    pos, w = [], []
    for p, a in zip(mu.positions, mu.weights):
        for r, b in zip(nu.positions, nu.weights):
            pos.append(tuple(x + y for x, y in zip(p, r)))
            w.append(a * b)
    return DiscreteMeasure(pos, w)


def convolve_with_discrete(mu, omega):
    """``mu * sum c_j delta_{x_j} = sum c_j (mu * delta_{x_j})`` as a mixture."""
    return MixtureMeasure(tuple((translate_measure(mu, x), c)
                                for x, c in zip(omega.positions, omega.weights)))


# ------------------------------------------------------------ exact CDF


class ExactCDF:
    """Exact distribution function of a 1D self-similar measure."""

    def __init__(self, mu, budget=None):
        budget = budget or default_budget()
        if mu.dim != 1 or not mu.exact:
            raise UnsupportedError("exact CDF needs exact 1D data")
        (a,), (b,) = mu.hull.vertices
        if not a < b:
            raise UnsupportedError("degenerate support")
        pieces = []
        for h, p in zip(mu.wifs.ifs.maps, mu.wifs.weights):
            s = Fraction(h.signed_ratio())
            d = Fraction(h.translation[0])
            lo, hi = sorted((s * a + d, s * b + d))
            pieces.append((lo, hi, s, d, Fraction(p)))
        pieces.sort(key=lambda t: (t[0], t[1]))
        if any(pieces[i][1] > pieces[i + 1][0] for i in range(len(pieces) - 1)):
            raise UnsupportedError("first-level images overlap")
        self.a, self.b = Fraction(a), Fraction(b)
        self.pieces = pieces
        self.lows = [t[0] for t in pieces]
        self.before = [sum((t[4] for t in pieces[:i]), Fraction(0)) for i in range(len(pieces) + 1)]
        self.cache = {}
        self.grid_cache = {}
        self.max_nodes = budget.cdf_nodes

    def _step(self, x):
        i = bisect_right(self.lows, x) - 1
        lo, hi, s, d, p = self.pieces[i]
        if x > hi:
            return self.before[i + 1], 0, None
        y = (x - d) / s
        if s > 0:
            return self.before[i], p, y
        return self.before[i] + p, -p, y

    def _solve(self, x, a, b, step, cache):
        # follow x -> h_i^{-1} x until a known value, the support edge or a cycle
        path, index = [], {}
        while True:
            if x <= a or x >= b:
                value = Fraction(0) if x <= a else Fraction(1)
                break
            if x in cache:
                value = cache[x]
                break
            if x in index:
                j = index[x]
                A, B = path[-1][1], path[-1][2]
                for _, al, be in reversed(path[j:-1]):
                    A, B = al + be * A, be * B
                value = A / (1 - B)
                break
            alpha, beta, y = step(x)
            if y is None:
                value = alpha
                cache[x] = value
                break
            index[x] = len(path)
            path.append((x, alpha, beta))
            x = y
            if len(path) + len(cache) > self.max_nodes:
                raise ConvergenceError("exact CDF orbit exceeds the node budget")
        for node, al, be in reversed(path):
            value = al + be * value
            cache[node] = value
        return value

    def __call__(self, x):
        return self._solve(Fraction(x), self.a, self.b, self._step, self.cache)

    def on_grid(self, D, us):
        """``[F(u / D) for u in us]``.

        When every ratio is a unit fraction the orbit of ``u / D`` stays on
        a fixed integer lattice, so the chain runs on integers.
        """
        if not all(abs(t[2].numerator) == 1 for t in self.pieces):
            return [self(Fraction(u, D)) for u in us]
        den = math.lcm(D, self.a.denominator, self.b.denominator,
                       *(v.denominator for t in self.pieces for v in (t[0], t[1], t[3])))
        g = den // D
        lows = [int(t[0] * den) for t in self.pieces]
        highs = [int(t[1] * den) for t in self.pieces]
        shifts = [int(t[3] * den) for t in self.pieces]
        inv = [t[2].numerator * t[2].denominator for t in self.pieces]
        cache = self.grid_cache.setdefault(den, {})
        before, pieces = self.before, self.pieces

        def step(x):
            i = bisect_right(lows, x) - 1
            if x > highs[i]:
                return before[i + 1], 0, None
            y = (x - shifts[i]) * inv[i]
            p = pieces[i][4]
            return (before[i], p, y) if inv[i] > 0 else (before[i] + p, -p, y)

        a, b = int(self.a * den), int(self.b * den)
        return [self._solve(u * g, a, b, step, cache) for u in us]


def exact_cdf(mu, budget=None):
    """:class:`ExactCDF` for ``mu`` or ``None`` when not applicable."""
    try:
        return ExactCDF(mu, budget)
    except UnsupportedError:
        return None


# ------------------------------------------------------------- histograms


@dataclass
class DyadicHistogram:
    level: int
    cells: dict              # lattice index tuple -> positive mass
    mode: str = EXACT
    error: float = 0.0       # mass that may be misassigned (CylinderApprox)
    count: int = 0           # MonteCarlo samples
    seed: int = 0

    @property
    def dim(self):
        return len(next(iter(self.cells)))

    def total(self):
        return sum(self.cells.values())

    def masses(self):
        return np.array([float(v) for v in self.cells.values()])

    def rows(self):
        for key in sorted(self.cells):
            yield key, self.cells[key]


def _cell(x, k):
    if isinstance(x, Fraction) or isinstance(x, int):
        return math.floor(Fraction(x) * 2 ** k)
    return math.floor(math.ldexp(float(x), k))


def _discrete_histogram(mu, k):
    cells = defaultdict(int)
    for p, w in zip(mu.positions, mu.weights):
        cells[tuple(_cell(v, k) for v in p)] += w
    return DyadicHistogram(k, dict(cells), EXACT)


def _cdf_histogram(mu, F, k):
    lo = math.floor(F.a * 2 ** k)
    hi = math.floor(F.b * 2 ** k)
    values = F.on_grid(2 ** k, range(lo, hi + 2))
    cells = {(j,): values[t + 1] - values[t]
             for t, j in enumerate(range(lo, hi + 1)) if values[t + 1] != values[t]}
    return DyadicHistogram(k, cells, EXACT)


def cylinders(mu, resolution, budget=None):
    """Cylinders of ``mu`` whose hull images have diameter <= ``resolution``.

    Returns float arrays ``(linear (W,m,m), shift (W,m), mass (W,))``.
    """
    budget = budget or default_budget()
    ifs = mu.wifs.ifs
    m = ifs.dim
    diam = float(mu.hull.diameter())
    A = np.array([float(h.ratio) * h.matrix().astype(float) for h in ifs.maps])
    a = np.array([[float(v) for v in h.translation] for h in ifs.maps])
    p = np.array([float(x) for x in mu.wifs.weights])
    c = np.array([float(h.ratio) for h in ifs.maps])
    L, b, w, r = np.eye(m)[None], np.zeros((1, m)), np.ones(1), np.ones(1)
    outL, outb, outw = [], [], []
    while len(w):
        done = r * diam <= resolution
        if done.any():
            outL.append(L[done]), outb.append(b[done]), outw.append(w[done])
        L, b, w, r = L[~done], b[~done], w[~done], r[~done]
        if not len(w):
            break
        if len(w) * ifs.N + sum(len(x) for x in outw) > budget.max_cells:
            raise BudgetError(f"more than {budget.max_cells} cylinders needed")
        L, b, w, r = (np.concatenate([L @ A[i] for i in range(ifs.N)]),
                      np.concatenate([b + L @ a[i] for i in range(ifs.N)]),
                      np.concatenate([w * p[i] for i in range(ifs.N)]),
                      np.concatenate([r * c[i] for i in range(ifs.N)]))
    return np.concatenate(outL), np.concatenate(outb), np.concatenate(outw)


def _cells_from_points(pts, masses, k):
    idx = np.floor(np.ldexp(pts, k)).astype(np.int64)
    keys, inv = np.unique(idx, axis=0, return_inverse=True)
    sums = np.bincount(inv.reshape(-1), weights=masses, minlength=len(keys))
    return {tuple(int(v) for v in key): float(s) for key, s in zip(keys, sums) if s > 0}


def _cylinder_histogram(mu, k, budget):
    L, b, w = cylinders(mu, 2.0 ** -k, budget)
    V = mu.hull.array().astype(float)
    imgs = np.einsum("wij,vj->wvi", L, V) + b[:, None, :]
    centre = imgs.mean(axis=1)
    lo = np.floor(np.ldexp(imgs.min(axis=1), k))
    hi = np.floor(np.ldexp(imgs.max(axis=1), k))
    straddle = np.any(lo != hi, axis=1)
    cells = _cells_from_points(centre, w, k)
    return DyadicHistogram(k, cells, CYLINDER, error=float(w[straddle].sum()))


def _monte_carlo_histogram(mu, k, count, seed):
    pts = chaos_game(mu.wifs, count, seed).points
    cells = _cells_from_points(pts, np.full(len(pts), 1.0 / count), k)
    return DyadicHistogram(k, cells, MONTE_CARLO, count=count, seed=seed)


_CDF_CACHE = {}


def _cached_cdf(mu, budget):
    key = (mu.wifs, mu.hull)
    if key not in _CDF_CACHE:
        if len(_CDF_CACHE) > 32:
            _CDF_CACHE.clear()
        _CDF_CACHE[key] = exact_cdf(mu, budget) if mu.dim == 1 and mu.exact else None
    return _CDF_CACHE[key]


def dyadic_histogram(mu, k, mode="auto", count=10**6, seed=0, budget=None):
    """Masses of the level-k dyadic cells charged by ``mu``.

    ``mode`` is one of ``auto``, ``exact``, ``cylinder``, ``montecarlo``;
    ``auto`` picks the exact CDF route when it applies and cylinders
    otherwise.  Atomic measures are always exact.
    """
    if k < 0:
        raise DomainError("level must be >= 0")
    budget = budget or default_budget()
    if isinstance(mu, DiscreteMeasure):
        return _discrete_histogram(mu, k)
    if isinstance(mu, SelfSimilarMeasure):
        if mode in ("auto", "exact"):
            F = _cached_cdf(mu, budget)
            if F is not None:
                try:
                    return _cdf_histogram(mu, F, k)
                except ConvergenceError:
                    if mode == "exact":
                        raise
            elif mode == "exact":
                raise UnsupportedError("no exact route for this measure")
            return _cylinder_histogram(mu, k, budget)
        if mode == "cylinder":
            return _cylinder_histogram(mu, k, budget)
        if mode == "montecarlo":
            return _monte_carlo_histogram(mu, k, count, seed)
        raise DomainError(f"unknown histogram mode {mode!r}")
    if isinstance(mu, MixtureMeasure):
        cells = defaultdict(int)
        modes, error = set(), 0.0
        for comp, w in mu.components:
            h = dyadic_histogram(comp, k, mode, count, seed, budget)
            modes.add(h.mode)
            error += float(w) * h.error
            for key, v in h.cells.items():
                cells[key] += w * v
        worst = next(m for m in (MONTE_CARLO, CYLINDER, EXACT) if m in modes)
        return DyadicHistogram(k, dict(cells), worst, error,
                               count if worst == MONTE_CARLO else 0, seed if worst == MONTE_CARLO else 0)
    raise TypeError(f"unsupported measure type {type(mu).__name__}")


def aggregate(h, s):
    """Histogram at level ``k - s`` obtained by merging blocks of 2^s cells.

    Levels below zero are allowed and mean cells of side ``2^(s - k)``.
    """
    if s < 0:
        raise DomainError("aggregation depth must be >= 0")
    step = 2 ** s
    cells = defaultdict(int)
    for key, v in h.cells.items():
        cells[tuple(j // step for j in key)] += v
    return DyadicHistogram(h.level - s, dict(cells), h.mode, h.error, h.count, h.seed)


# -------------------------------------------------------------------- L^q


def _log2(x):
    if isinstance(x, Fraction):
        return math.log2(x.numerator) - math.log2(x.denominator)
    return math.log2(x)


def log2_moment(h, q):
    """``log2 sum_I mu(I)^q``, grouping equal masses to avoid rounding."""
    terms = [math.log2(n) + q * _log2(m) for m, n in Counter(h.cells.values()).items()]
    top = max(terms)
    return top + math.log2(sum(2.0 ** (t - top) for t in terms))


def lq_tau_k(h, q):
    """Finite-level L^q exponent ``-log2(sum mu(I)^q) / k``."""
    if not q > 1:
        raise DomainError("q must exceed 1")
    if h.level < 1:
        raise DomainError("level must be >= 1")
    return -log2_moment(h, q) / h.level + 0.0


@dataclass
class LqEstimate:
    q: float
    sequence: list           # (k, tau_k / (q - 1))
    extrapolated: float
    error_note: str
    mode: str = EXACT
    error: float = 0.0
    secant: float = float("nan")   # mean increment over the last ``window`` levels


def lq_dimension_estimate(mu, q, k_max, mode="auto", count=10**6, seed=0, budget=None,
                          window=4):
    """``tau_k / (q - 1)`` for k = 1..k_max and a slope-based extrapolation.

    The top-level histogram is computed once and coarser levels are
    aggregated from it one level at a time.  The extrapolation is the least-squares slope of
    ``-log2 sum mu(I)^q`` against k over the upper half of the levels.
    ``secant`` is the same slope taken between levels ``k_max - window``
    and ``k_max``; an even window cancels period-two oscillations of
    templates with ratio ``1/4``.
    """
    if not q > 1:
        raise DomainError("q must exceed 1")
    if k_max < 4:
        raise DomainError("k_max must be >= 4")
    top = dyadic_histogram(mu, k_max, mode, count, seed, budget)
    seq, ys, h = [], [], top
    for k in range(k_max, 0, -1):
        if k < k_max:
            h = aggregate(h, 1)
        tau = lq_tau_k(h, q)
        seq.insert(0, (k, tau / (q - 1)))
        ys.insert(0, tau * k)
    w = min(window, k_max - 1)
    secant = (ys[-1] - ys[-1 - w]) / (w * (q - 1))
    values = [v for _, v in seq]
    if all(v == values[0] for v in values):
        return LqEstimate(q, seq, values[0], "constant sequence", top.mode, top.error, values[0])
    lo = (k_max + 1) // 2
    ks = np.arange(lo, k_max + 1)
    slope = float(np.polyfit(ks, ys[lo - 1:], 1)[0])
    note = f"least-squares slope over levels {lo}..{k_max}; finite-level estimate"
    return LqEstimate(q, seq, slope / (q - 1), note, top.mode, top.error, secant)


# ----------------------------------------------------------------- metric


def _dl_1d(mu, nu):
    exact = mu.exact and nu.exact
    events = defaultdict(int)
    for (x,), w in zip(mu.positions, mu.weights):
        events[x] += w
    for (x,), w in zip(nu.positions, nu.weights):
        events[x] -= w
    xs = sorted(events)
    total, diff = 0, 0
    for x0, x1 in zip(xs, xs[1:]):
        diff += events[x0]
        total += abs(diff) * (x1 - x0)
    return Fraction(total) if exact else float(total)


def _dl_transport(mu, nu, budget):
    from scipy.optimize import linprog
    from scipy.sparse import coo_matrix
    n, k = len(mu), len(nu)
    if n > budget.max_atoms or k > budget.max_atoms:
        raise BudgetError(f"transport between {n} and {k} atoms exceeds {budget.max_atoms}")
    X, Y = mu.array(), nu.array()
    cost = np.linalg.norm(X[:, None, :] - Y[None, :, :], axis=2).ravel()
    rows = np.concatenate([np.repeat(np.arange(n), k), n + np.tile(np.arange(k), n)])
    cols = np.concatenate([np.arange(n * k), np.arange(n * k)])
    A = coo_matrix((np.ones(2 * n * k), (rows, cols)), shape=(n + k, n * k)).tocsr()
    rhs = np.concatenate([mu.weight_array(), nu.weight_array()])
    rhs[n:] *= rhs[:n].sum() / rhs[n:].sum()
    res = linprog(cost, A_eq=A, b_eq=rhs, bounds=(0, None), method="highs")
    if not res.success:
        raise ConvergenceError(f"transport solver failed: {res.message}")
    return float(res.fun)


def dl_distance(mu, nu, budget=None):
    """Sup over 1-Lipschitz f of ``|int f dmu - int f dnu|`` for atomic measures.

    In R^1 this is the integral of the CDF difference (exact for rational
    data); in higher dimension the equal optimal transport cost is solved
    as a linear program.
    """
    if not (isinstance(mu, DiscreteMeasure) and isinstance(nu, DiscreteMeasure)):
        raise UnsupportedError("dl_distance needs atomic measures; see discretize")
    if mu.dim != nu.dim:
        raise DimensionError("dimension mismatch")
    if mu.dim == 1:
        return _dl_1d(mu, nu)
    return _dl_transport(mu, nu, budget or default_budget())


def discretize(mu, resolution, budget=None):
    """Atomic surrogate of ``mu`` and a bound on the d_L distance moved.

    Cylinders of diameter <= ``resolution`` are collapsed to the image of
    the hull's vertex centroid.
    """
    if isinstance(mu, DiscreteMeasure):
        return mu, 0.0
    if isinstance(mu, SelfSimilarMeasure):
        L, b, w = cylinders(mu, resolution, budget)
        centre = mu.hull.array().astype(float).mean(axis=0)
        pts = L @ centre + b
        bound = resolution / 2 if mu.dim == 1 else resolution
        return DiscreteMeasure([tuple(p) for p in pts.tolist()], (w / w.sum()).tolist()), bound
    if isinstance(mu, MixtureMeasure):
        pos, wts, bound = [], [], 0.0
        for comp, c in mu.components:
            d, e = discretize(comp, resolution, budget)
            pos.extend(d.positions)
            wts.extend(float(c) * float(x) for x in d.weights)
            bound = max(bound, e)
        return DiscreteMeasure(pos, wts), bound
    raise TypeError(f"unsupported measure type {type(mu).__name__}")


# ---------------------------------------------------------------- quantize


def _grid_index(x, lo, h):
    if all(_exact_scalar(v) for v in (x, lo, h)):
        return math.floor((Fraction(x) - Fraction(lo)) / Fraction(h))
    return math.floor((float(x) - float(lo)) / float(h))


def _grid_contrib(mu, lo, h, weight, acc, budget):
    """Add ``weight * mu``'s mass per grid cell to ``acc``; return the extra bound."""
    if isinstance(mu, DiscreteMeasure):
        for p, w in zip(mu.positions, mu.weights):
            key = tuple(_grid_index(v, l, h) for v, l in zip(p, lo))
            acc[key][0] += weight * w
            acc[key][1].append(p)
        return 0.0
    if isinstance(mu, MixtureMeasure):
        return max(_grid_contrib(c, lo, h, weight * w, acc, budget) for c, w in mu.components)
    F = _cached_cdf(mu, budget) if isinstance(mu, SelfSimilarMeasure) else None
    if F is not None and all(_exact_scalar(v) for v in (lo[0], h)):
        try:
            j0 = _grid_index(F.a, lo[0], h)
            j1 = _grid_index(F.b, lo[0], h)
            left = F(lo[0] + j0 * h)
            for j in range(j0, j1 + 1):
                right = F(lo[0] + (j + 1) * h)
                if right != left:
                    acc[(j,)][0] += weight * (right - left)
                    acc[(j,)][1].append(None)
                left = right
            return 0.0
        except ConvergenceError:
            pass
    delta = float(h) / 16
    L, b, w = cylinders(mu, delta, budget)
    centre = mu.hull.array().astype(float).mean(axis=0)
    pts = L @ centre + b
    idx = np.floor((pts - np.array(lo, dtype=float)) / float(h)).astype(np.int64)
    for key, m in zip(map(tuple, idx.tolist()), w):
        acc[key][0] += float(weight) * m
        acc[key][1].append(None)
    return delta


def quantize(mu, eps, budget=None, return_bound=False):
    """Atomic measure with one atom per occupied grid cell of diameter ``eps``.

    The grid has side ``eps / sqrt(m)`` and is anchored at the lower corner
    of the support box.  A cell holding a single atom of ``mu`` keeps that
    atom; other cells put their mass at the cell centre.  Mass therefore
    moves by at most ``eps / 2`` (plus the cylinder resolution for
    non-atomic inputs without an exact distribution function).
    """
    if not eps > 0:
        raise DomainError("eps must be positive")
    budget = budget or default_budget()
    m = mu.dim
    root = _sqrt(m)
    h = Fraction(eps) / root if (_exact_scalar(eps) and isinstance(root, int)) else float(eps) / root
    lo = mu.bounds()[0]
    acc = defaultdict(lambda: [0, []])
    extra = _grid_contrib(mu, lo, h, 1, acc, budget)
    pos, wts = [], []
    half = Fraction(1, 2) if isinstance(h, Fraction) else 0.5
    for key in sorted(acc):
        mass, members = acc[key]
        if not mass > 0:
            continue
        if len(members) == 1 and members[0] is not None:
            pos.append(members[0])
        else:
            pos.append(tuple(l + (j + half) * h for l, j in zip(lo, key)))
        wts.append(mass)
    total = sum(wts)
    if not all(_exact_scalar(x) for x in wts):
        wts = [float(x) / float(total) for x in wts]
    out = DiscreteMeasure(pos, wts)
    if return_bound:
        bound = Fraction(eps) / 2 if _exact_scalar(eps) else float(eps) / 2
        return out, bound + extra if extra else bound
    return out
