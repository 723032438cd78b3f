"""Similarity maps, word composition, the similarity metric and attractors.

A similarity is stored in canonical form ``x -> c U x + a`` with ``0 < c < 1``
and ``U`` orthogonal; a negative signed ratio is absorbed into ``U``.  When
every ratio, matrix entry and translation is an ``int``/``Fraction`` the
system runs in exact arithmetic and all rational quantities (compositions,
1D hulls, translation distances) stay exact.
"""

from dataclasses import dataclass
from fractions import Fraction
import itertools
import math

import numpy as np

from .config import WEIGHT_TOL, default_budget
from .errors import (BudgetError, ConvergenceError, DegenerateMapError,
                     DimensionError, DomainError, NotSimilitudeError,
                     UnsupportedError)
from .geometry import (PointCloud, Polytope, block_diag, check_orthogonal,
                       convex_hull, interval, is_exact, operator_norm,
                       polygon_hausdorff_batch)
from .rng import XorShift64Star


@dataclass(frozen=True)
class Similarity:
    ratio: object
    orthogonal: tuple
    translation: tuple

    def __post_init__(self):
        U = tuple(tuple(row) for row in np.asarray(self.orthogonal, dtype=object).tolist())
        a = tuple(np.asarray(self.translation, dtype=object).reshape(-1).tolist())
        if len(U) != len(a) or any(len(row) != len(a) for row in U):
            raise DimensionError("orthogonal part and translation disagree on dimension")
        if self.ratio == 0:
            raise DegenerateMapError("similarity ratio must be nonzero")
        if not (0 < self.ratio < 1):
            raise DomainError(f"canonical ratio must lie in (0, 1), got {self.ratio}")
        check_orthogonal(np.array(U, dtype=object))
        object.__setattr__(self, "orthogonal", U)
        object.__setattr__(self, "translation", a)

    @property
    def dim(self):
        return len(self.translation)

    @property
    def exact(self):
        return (is_exact(self.ratio) and all(is_exact(v) for v in self.translation)
                and all(is_exact(v) for row in self.orthogonal for v in row))

    def matrix(self):
        """``U`` as an array (object dtype when exact)."""
        return np.array(self.orthogonal, dtype=object if self.exact else float)

    def linear(self):
        return self.ratio * self.matrix()

    def __call__(self, x):
        x = np.asarray(x, dtype=object if self.exact else float).reshape(-1)
        return self.linear() @ x + np.array(self.translation, dtype=x.dtype)

    def to_float(self):
        return Similarity(float(self.ratio),
                          tuple(tuple(float(v) for v in row) for row in self.orthogonal),
                          tuple(float(v) for v in self.translation))

    def signed_ratio(self):
        """Signed scalar ratio for 1D maps."""
        if self.dim != 1:
            raise UnsupportedError("signed ratio only defined in R^1")
        return self.ratio * self.orthogonal[0][0]


def canonicalize(signed_ratio, O, a):
    """Similarity ``x -> signed_ratio * O x + a`` with the sign pushed into ``O``."""
    if signed_ratio == 0:
        raise DegenerateMapError("similarity ratio must be nonzero")
    if not (-1 < signed_ratio < 1):
        raise DomainError(f"ratio must lie in (-1, 1), got {signed_ratio}")
    O = np.asarray(O, dtype=object)
    if O.ndim == 0:
        O = O.reshape(1, 1)
    sign = 1 if signed_ratio > 0 else -1
    return Similarity(abs(signed_ratio), (sign * O).tolist(), np.asarray(a, dtype=object).reshape(-1))


def similarity_1d(signed_ratio, shift):
    return canonicalize(signed_ratio, [[1]], [shift])


def compose_pair(f, g):
    """``f o g`` (apply ``g`` first)."""
    Uf, Ug = f.matrix(), g.matrix()
    exact = f.exact and g.exact
    if not exact:
        Uf, Ug = Uf.astype(float), Ug.astype(float)
    U = Uf @ Ug
    shift = f.ratio * (Uf @ np.array(g.translation, dtype=Uf.dtype)) + np.array(f.translation, dtype=Uf.dtype)
    return Similarity(f.ratio * g.ratio, U.tolist(), shift.tolist())


@dataclass(frozen=True)
class IFS:
    """Finite family of contracting similarities on a common R^m."""

    maps: tuple

    def __post_init__(self):
        maps = tuple(self.maps)
        if len(maps) < 1:
            raise DomainError("an IFS needs at least one map")
        m = maps[0].dim
        if any(h.dim != m for h in maps):
            raise DimensionError("all maps must act on the same R^m")
        if not all(h.exact for h in maps):
            maps = tuple(h.to_float() for h in maps)
        object.__setattr__(self, "maps", maps)

    @property
    def N(self):
        return len(self.maps)

    @property
    def dim(self):
        return self.maps[0].dim

    @property
    def exact(self):
        return all(h.exact for h in self.maps)

    @property
    def arithmetic(self):
        return "exact" if self.exact else "float"

    @property
    def c_max(self):
        return max(h.ratio for h in self.maps)

    def is_homogeneous(self):
        return len({h.ratio for h in self.maps}) == 1

    def to_float(self):
        return IFS(tuple(h.to_float() for h in self.maps))

    def bound_radius(self):
        """Radius of a ball about 0 mapped into itself by every map."""
        c = float(self.c_max)
        return max(float(np.linalg.norm(np.array(h.translation, dtype=float))) for h in self.maps) / (1 - c)


@dataclass(frozen=True)
class WeightedIFS:
    ifs: IFS
    weights: tuple

    def __post_init__(self):
        w = tuple(self.weights)
        if len(w) != self.ifs.N:
            raise DimensionError(f"{len(w)} weights for {self.ifs.N} maps")
        if any(not (x > 0) for x in w):
            raise DomainError("weights must be positive")
        total = sum(w)
        if abs(float(total) - 1.0) > WEIGHT_TOL:
            raise DomainError(f"weights sum to {total}, not 1")
        if not (self.ifs.exact and all(is_exact(x) for x in w)):
            w = tuple(float(x) for x in w)
        object.__setattr__(self, "weights", w)

    @classmethod
    def uniform(cls, ifs):
        N = ifs.N
        w = [Fraction(1, N)] * N if ifs.exact else [1.0 / N] * N
        return cls(ifs, tuple(w))

    @property
    def exact(self):
        return self.ifs.exact and all(is_exact(x) for x in self.weights)


# ------------------------------------------------------------------ words


def validate_word(ifs, w):
    w = tuple(int(s) for s in w)
    if not w:
        raise DomainError("empty word")
    if any(s < 1 or s > ifs.N for s in w):
        raise DomainError(f"word {w} has symbols outside 1..{ifs.N}")
    return w


def compose(ifs, w):
    """``h_{w1} o h_{w2} o ... o h_{wn}`` as a single similarity."""
    w = validate_word(ifs, w)
    out = ifs.maps[w[-1] - 1]
    for s in reversed(w[:-1]):
        out = compose_pair(ifs.maps[s - 1], out)
    return out


def words(N, n):
    """All words of length ``n`` over ``1..N`` in lexicographic order."""
    return list(itertools.product(range(1, N + 1), repeat=n))


@dataclass
class LevelTable:
    """Ratios, orthogonal parts and translations of every level-n composition.

    Row ``k`` corresponds to the ``k``-th word of :func:`words` (lex order).
    Arrays have object dtype in exact mode.
    """

    n: int
    N: int
    ratios: np.ndarray        # (W,)
    orthos: np.ndarray        # (W, m, m)
    shifts: np.ndarray        # (W, m)
    exact: bool

    def __len__(self):
        return self.ratios.shape[0]

    def word(self, k):
        digits = []
        for _ in range(self.n):
            k, r = divmod(k, self.N)
            digits.append(r + 1)
        return tuple(reversed(digits))

    def similarity(self, k):
        return Similarity(self.ratios[k], self.orthos[k].tolist(), self.shifts[k].tolist())


def level_table(ifs, n, budget=None):
    budget = budget or default_budget()
    if n < 1:
        raise DomainError("word length must be >= 1")
    W = ifs.N ** n
    if W * (W - 1) // 2 > budget.max_pairs:
        feasible = 0
        while ifs.N ** (feasible + 1) * (ifs.N ** (feasible + 1) - 1) // 2 <= budget.max_pairs:
            feasible += 1
        raise BudgetError(f"{W} words at level {n} exceed the pair budget "
                          f"{budget.max_pairs}", largest_feasible=feasible)
    dtype = object if ifs.exact else float
    c = np.array([h.ratio for h in ifs.maps], dtype=dtype)
    U = np.array([h.orthogonal for h in ifs.maps], dtype=dtype)
    a = np.array([h.translation for h in ifs.maps], dtype=dtype)
    ratios, orthos, shifts = c.copy(), U.copy(), a.copy()
    for _ in range(n - 1):
        # prepend one symbol: h_i o h_w
        new_r, new_U, new_d = [], [], []
        for i in range(ifs.N):
            new_r.append(c[i] * ratios)
            new_U.append(np.matmul(U[i][None, :, :], orthos))
            new_d.append(c[i] * np.einsum("jk,wk->wj", U[i], shifts) + a[i]
                         if dtype is float else
                         c[i] * np.matmul(U[i][None, :, :], shifts[:, :, None])[:, :, 0] + a[i])
        ratios = np.concatenate(new_r)
        orthos = np.concatenate(new_U)
        shifts = np.concatenate(new_d)
    return LevelTable(n, ifs.N, ratios, orthos, shifts, ifs.exact)


# -------------------------------------------------------------- the metric


def _log(c):
    # exact ratios may have huge numerators/denominators; log them separately
    if isinstance(c, Fraction):
        return math.log(c.numerator) - math.log(c.denominator)
    return math.log(c)


def _log_ratio_gap(c1, c2):
    if c1 == c2:
        return Fraction(0) if (is_exact(c1) and is_exact(c2)) else 0.0
    return abs(_log(c1) - _log(c2))


def _ortho_gap(U1, U2, exact):
    D = np.asarray(U1, dtype=object) - np.asarray(U2, dtype=object)
    if exact:
        if all(v == 0 for v in D.flat):
            return Fraction(0)
        if D.shape == (1, 1):
            return abs(Fraction(D[0, 0]))
        if np.count_nonzero(D - np.diag(np.diag(D))) == 0:
            return max(abs(Fraction(v)) for v in np.diag(D))
    return operator_norm(D.astype(float))


def _exact_sqrt(x):
    x = Fraction(x)
    p, q = x.numerator, x.denominator
    rp, rq = math.isqrt(p), math.isqrt(q)
    if rp * rp == p and rq * rq == q:
        return Fraction(rp, rq)
    return math.sqrt(x)


def _shift_gap(a1, a2, exact):
    diff = [x - y for x, y in zip(a1, a2)]
    if exact:
        if len(diff) == 1:
            return abs(Fraction(diff[0]))
        return _exact_sqrt(sum(Fraction(d) * d for d in diff))
    return math.sqrt(sum(float(d) ** 2 for d in diff))


def similarity_distance(c1, U1, a1, c2, U2, a2, exact):
    return (_log_ratio_gap(c1, c2) + _ortho_gap(U1, U2, exact)
            + _shift_gap(a1, a2, exact))


def map_distance(f, g):
    """``|log c - log c'| + ||U - U'|| + ||a - a'||_2`` on canonical forms."""
    if f.dim != g.dim:
        raise DimensionError(f"maps act on R^{f.dim} and R^{g.dim}")
    exact = f.exact and g.exact
    return similarity_distance(f.ratio, f.orthogonal, f.translation,
                               g.ratio, g.orthogonal, g.translation, exact)


# ------------------------------------------------------------ constructions


def product_ifs(I1, I2, tol=1e-12):
    """Product system ``{(h_i, g_j)}`` on R^(k+m); requires one common ratio."""
    ratios = {h.ratio for h in I1.maps} | {g.ratio for g in I2.maps}
    lo, hi = min(ratios), max(ratios)
    if hi - lo > tol:
        raise NotSimilitudeError(
            f"product maps are similarities only with one common ratio; got {sorted(map(float, ratios))}")
    maps = []
    for h in I1.maps:
        for g in I2.maps:
            U = block_diag(np.array(h.orthogonal, dtype=object), np.array(g.orthogonal, dtype=object))
            maps.append(Similarity(h.ratio, U.tolist(), tuple(h.translation) + tuple(g.translation)))
    return IFS(tuple(maps))


def fixed_point(h):
    """Fixed point of ``h``: solves ``(I - cU) x = a``."""
    m = h.dim
    if h.exact and m == 1:
        return (Fraction(h.translation[0]) / (1 - h.ratio * h.orthogonal[0][0]),)
    if h.exact and m == 2:
        A = np.eye(2, dtype=object) - h.ratio * h.matrix()
        det = A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
        a0, a1 = h.translation
        return (Fraction(A[1, 1] * a0 - A[0, 1] * a1) / det,
                Fraction(A[0, 0] * a1 - A[1, 0] * a0) / det)
    A = np.eye(m) - float(h.ratio) * h.matrix().astype(float)
    return tuple(np.linalg.solve(A, np.array(h.translation, dtype=float)).tolist())


def attractor_points(ifs, depth, budget=None, seeds="first"):
    """Level-``depth`` images of seed points, with Hausdorff resolution.

    ``seeds="first"`` uses the fixed point of ``h_1``; ``seeds="all"`` uses
    the fixed points of every map (so every extreme point of the level-0
    hull is reached exactly).
    """
    budget = budget or default_budget()
    if depth < 1:
        raise DomainError("depth must be >= 1")
    count = ifs.N ** depth * (1 if seeds == "first" else ifs.N)
    if count > budget.max_points:
        raise BudgetError(f"{count} points exceed budget {budget.max_points}",
                          largest_feasible=int(math.log(budget.max_points) // math.log(ifs.N)))
    base = [fixed_point(ifs.maps[0])] if seeds == "first" else [fixed_point(h) for h in ifs.maps]
    pts = np.array(base, dtype=float)
    A = [float(h.ratio) * h.matrix().astype(float) for h in ifs.maps]
    a = [np.array(h.translation, dtype=float) for h in ifs.maps]
    for _ in range(depth):
        pts = np.concatenate([pts @ A[i].T + a[i] for i in range(ifs.N)])
    if ifs.dim <= 2:
        diam = float(attractor_hull(ifs).diameter())
    else:
        diam = 2.0 * ifs.bound_radius()
    return PointCloud(pts, float(ifs.c_max) ** depth * diam)


def chaos_game(wifs, count, seed, burn_in=100):
    """Random-iteration samples of the invariant measure.

    Map choices come from :class:`~ifslab.rng.XorShift64Star` seeded with
    ``seed``; each step draws one uniform and picks the first map whose
    cumulative weight exceeds it.
    """
    if count < 1:
        raise DomainError("count must be >= 1")
    ifs = wifs.ifs
    m = ifs.dim
    A = [(float(h.ratio) * h.matrix().astype(float)).tolist() for h in ifs.maps]
    a = [[float(v) for v in h.translation] for h in ifs.maps]
    cum = list(itertools.accumulate(float(w) for w in wifs.weights))
    cum[-1] = 1.0
    rng = XorShift64Star(seed)
    x = [float(v) for v in fixed_point(ifs.maps[0])]
    out = np.empty((count, m))
    for t in range(burn_in + count):
        u = rng.uniform()
        i = 0
        while cum[i] <= u:
            i += 1
        Ai, ai = A[i], a[i]
        if m == 1:
            x = [Ai[0][0] * x[0] + ai[0]]
        else:
            x = [sum(Ai[r][s] * x[s] for s in range(m)) + ai[r] for r in range(m)]
        if t >= burn_in:
            out[t - burn_in] = x
    return PointCloud(out, 0.0)


# ------------------------------------------------------------------- hulls


def _hull_1d(ifs):
    """Exact convex hull [a, b] of a 1D attractor.

    The endpoints solve ``a = min_i inf h_i([a, b])``, ``b = max_i sup h_i([a, b])``;
    for each choice of extremal maps the system is linear, and the unique
    self-consistent solution is the hull.
    """
    s = [h.signed_ratio() for h in ifs.maps]
    d = [h.translation[0] for h in ifs.maps]
    exact = ifs.exact
    one = Fraction(1) if exact else 1.0
    best = None
    for i in range(ifs.N):
        for j in range(ifs.N):
            si, sj, di, dj = s[i], s[j], d[i], d[j]
            if si > 0 and sj > 0:
                a, b = di / (one - si), dj / (one - sj)
            elif si < 0 and sj < 0:
                a = (si * dj + di) / (one - si * sj)
                b = sj * a + dj
            elif si > 0:
                a = di / (one - si)
                b = sj * a + dj
            else:
                b = dj / (one - sj)
                a = si * b + di
            if b < a:
                continue
            lo = min(min(sk * a, sk * b) + dk for sk, dk in zip(s, d))
            hi = max(max(sk * a, sk * b) + dk for sk, dk in zip(s, d))
            resid = max(abs(lo - a), abs(hi - b))
            if best is None or resid < best[0]:
                best = (resid, a, b)
    resid, a, b = best
    if exact and resid != 0:
        raise ConvergenceError("no self-consistent hull endpoints found")
    return interval(a, b)


def _simplify_polygon(verts, tol):
    """Drop vertices within ``tol`` of the segment joining their neighbours.

    Each round removes a set of pairwise non-adjacent vertices, so every
    removal is measured against surviving neighbours.
    """
    V = np.asarray(verts, dtype=float)
    while len(V) > 3:
        P, Q = np.roll(V, 1, axis=0), np.roll(V, -1, axis=0)
        d = Q - P
        L = np.sum(d * d, axis=1)
        with np.errstate(invalid="ignore", divide="ignore"):
            t = np.where(L > 0, np.sum((V - P) * d, axis=1) / L, 0.0)
        t = np.clip(t, 0.0, 1.0)
        dist = np.hypot(*(V - P - t[:, None] * d).T)
        drop = np.zeros(len(V), dtype=bool)
        for k in np.flatnonzero(dist < tol):
            if not drop[k - 1] and not drop[(k + 1) % len(V)] and len(V) - drop.sum() > 3:
                drop[k] = True
        if not drop.any():
            break
        V = V[~drop]
    return [tuple(v) for v in V.tolist()]


def attractor_hull(ifs, tol=1e-13, max_iter=10_000):
    """Closed convex hull of the attractor (m <= 2).

    In R^1 the hull is solved exactly. In R^2 the map ``K -> hull(U h_i(K))``
    is iterated from the square circumscribing the bound ball until the
    Hausdorff change drops below ``tol``.
    """
    if ifs.dim == 1:
        return _hull_1d(ifs)
    if ifs.dim != 2:
        raise UnsupportedError("attractor_hull supports m <= 2")
    R = ifs.bound_radius()
    K = Polytope(((-R, -R), (R, -R), (R, R), (-R, R)))
    A = [float(h.ratio) * h.matrix().astype(float) for h in ifs.maps]
    a = [np.array(h.translation, dtype=float) for h in ifs.maps]
    # simplification error e leaves an oscillation of size about e / (1 - c);
    # keep it well below tol so the stopping test can be met
    simplify_tol = tol * (1 - float(ifs.c_max)) / 4
    for _ in range(max_iter):
        V = K.array()
        pts = np.concatenate([V @ A[i].T + a[i] for i in range(ifs.N)])
        new = convex_hull(PointCloud(pts))
        new = Polytope(tuple(_simplify_polygon(new.vertices, simplify_tol)))
        change = float(polygon_hausdorff_batch(K.array().astype(float)[None],
                                               new.array().astype(float)[None])[0])
        K = new
        if change < tol:
            # one coarser pass drops leftover near-collinear vertices
            return Polytope(tuple(_simplify_polygon(K.vertices, tol)))
    raise ConvergenceError(f"hull iteration did not converge in {max_iter} steps")


# -------------------------------------------------------------- dimensions


def similarity_dimension(ifs, tol=1e-13):
    """Root ``s`` of ``sum c_i^s = 1`` by bisection."""
    c = [float(h.ratio) for h in ifs.maps]
    if ifs.N == 1:
        return 0.0
    lo, hi = 0.0, math.log(ifs.N) / math.log(1.0 / max(c))
    f = lambda s: sum(x ** s for x in c) - 1.0  # noqa: E731
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def measure_similarity_dimension(wifs):
    """Entropy over Lyapunov exponent: ``sum p log p / sum p log c``."""
    p = [float(x) for x in wifs.weights]
    c = [float(h.ratio) for h in wifs.ifs.maps]
    return sum(x * math.log2(x) for x in p) / sum(x * math.log2(r) for x, r in zip(p, c))
