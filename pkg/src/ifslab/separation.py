"""Separation sequences, strong-separation checks and dimension verdicts.

``delta_n`` is the least similarity-metric distance between two distinct
level-n compositions; ``delta_star_n`` is the least Hausdorff distance
between their images of the attractor's convex hull.  Both searches are
exact: a space-filling-curve pass produces an upper bound ``D`` from
neighbouring words, and a kd-tree range query then returns every pair
whose Chebyshev feature distance is at most ``D``.  The features (log
ratio, matrix entries, translation / support values) are 1-Lipschitz
lower bounds of the true distance, so no closer pair can be missed.
"""

from dataclasses import dataclass, field
import math

import numpy as np
from scipy.spatial import cKDTree

from .config import default_budget
from .errors import BudgetError, DomainError, UnsupportedError
from .geometry import (Polytope, is_exact, opnorm_2x2, polygon_hausdorff_batch,
                       polytopes_disjoint)
from .ifs import (IFS, _log, attractor_hull, compose, level_table, similarity_dimension,
                  similarity_distance)

EXACT_OVERLAP = "ExactOverlap"
EXPONENTIAL = "ExponentialCandidate"
SUPER_EXPONENTIAL = "SuperExponentialCandidate"
INCONCLUSIVE = "Inconclusive"

FLOAT_TIE_RTOL = 1e-12
FLOAT_GAP = 1e-12
CHUNK_ENTRIES = 2_000_000


@dataclass(frozen=True)
class LevelMinimum:
    value: object
    witness: tuple          # (word_i, word_j) with word_i < word_j lexicographically
    error_bound: float = 0.0

    def __iter__(self):
        yield self.value
        yield self.witness


# ------------------------------------------------------------ pair search


def _morton_keys(F, bits):
    lo = F.min(axis=0)
    span = F.max(axis=0) - lo
    span[span == 0] = 1.0
    Q = np.floor((F - lo) / span * ((1 << bits) - 1)).astype(np.uint64)
    keys = np.zeros(F.shape[0], dtype=np.uint64)
    d = F.shape[1]
    for b in range(bits):
        for j in range(d):
            bit = (Q[:, j] >> np.uint64(b)) & np.uint64(1)
            keys |= bit << np.uint64(b * d + j)
    return keys


def _pick(values, I, J, exact):
    best = min(values)
    if exact or is_exact(best):
        ties = [(i, j) for v, i, j in zip(values, I, J) if v == best]
    else:
        tol = FLOAT_TIE_RTOL * max(1.0, abs(float(best)))
        ties = [(i, j) for v, i, j in zip(values, I, J) if abs(float(v) - float(best)) <= tol]
    return best, min(ties)


def _min_pair(features, evaluate, exact, budget, method="auto", window=4, cost=1.0):
    """Exact minimum of ``evaluate`` over all index pairs i < j.

    ``features`` must satisfy ``max_k |F[i,k] - F[j,k]| <= distance(i, j)``.
    ``cost`` is the relative price of one evaluation; the automatic choice
    enumerates every pair only while ``W^2 cost`` stays small.
    """
    W = features.shape[0]
    if W < 2:
        raise DomainError("need at least two words")
    if method == "exhaustive" or (method == "auto" and W * W * cost <= budget.exhaustive_words ** 2):
        I, J = np.triu_indices(W, k=1)
        return _pick(evaluate(I, J), I.tolist(), J.tolist(), exact)
    F = np.asarray(features, dtype=float)
    bits = max(1, min(20, 63 // F.shape[1]))
    order = np.argsort(_morton_keys(F, bits), kind="stable")
    cand = []
    for s in range(1, min(window, W - 1) + 1):
        a, b = order[:-s], order[s:]
        cand.append(np.stack([np.minimum(a, b), np.maximum(a, b)], axis=1))
    cand = np.unique(np.concatenate(cand), axis=0)
    upper, _ = _pick(evaluate(cand[:, 0], cand[:, 1]), cand[:, 0].tolist(), cand[:, 1].tolist(), exact)
    scale = 1.0 + float(np.max(np.abs(F)))
    radius = float(upper) * (1 + 1e-9) + 1e-13 * scale
    pairs = cKDTree(F).query_pairs(radius, p=np.inf, output_type="ndarray")
    if pairs.shape[0] > budget.max_pairs:
        raise BudgetError(f"{pairs.shape[0]} candidate pairs exceed budget")
    pairs = np.sort(pairs, axis=1)
    return _pick(evaluate(pairs[:, 0], pairs[:, 1]), pairs[:, 0].tolist(), pairs[:, 1].tolist(), exact)


# ---------------------------------------------------------------- Delta_n


def _map_features(T):
    W = len(T)
    m = T.shifts.shape[1]
    logc = np.array([_log(c) for c in T.ratios], dtype=float)
    return np.concatenate([logc[:, None], T.orthos.reshape(W, m * m).astype(float),
                           T.shifts.astype(float)], axis=1)


def _batch_opnorm(D):
    if D.shape[1] == 1:
        return np.abs(D[:, 0, 0])
    if D.shape[1] == 2:
        return opnorm_2x2(D)
    return np.linalg.norm(D, ord=2, axis=(1, 2))


def _map_evaluator(T):
    if T.exact:
        def evaluate(I, J):
            return [similarity_distance(T.ratios[i], T.orthos[i], T.shifts[i],
                                        T.ratios[j], T.orthos[j], T.shifts[j], True)
                    for i, j in zip(I, J)]
        return evaluate
    logc = np.log(T.ratios)

    def evaluate(I, J):
        I, J = np.asarray(I), np.asarray(J)
        dU = T.orthos[I] - T.orthos[J]
        same = np.all(dU == 0, axis=(1, 2))
        return (np.abs(logc[I] - logc[J]) + np.where(same, 0.0, _batch_opnorm(dU))
                + np.linalg.norm(T.shifts[I] - T.shifts[J], axis=1)).tolist()
    return evaluate


def delta_n(ifs, n, budget=None, method="auto"):
    """Least similarity-metric distance between distinct level-n compositions."""
    budget = budget or default_budget()
    if ifs.N < 2:
        raise DomainError("delta_n needs at least two maps")
    T = level_table(ifs, n, budget)
    value, (i, j) = _min_pair(_map_features(T), _map_evaluator(T), T.exact, budget, method)
    return LevelMinimum(value, (T.word(i), T.word(j)))


# ---------------------------------------------------------- Delta_n star


def _hull_images(T, hull):
    """Images of the hull under every level-n map.

    Returns ``(lo, hi)`` object/float arrays in R^1, or a float array of
    vertex coordinates (W, k, 2) in R^2.
    """
    if hull.dim == 1:
        (a,), (b,) = hull.vertices
        signed = T.ratios * T.orthos[:, 0, 0]
        sa, sb = signed * a, signed * b
        lo = np.where(signed > 0, sa, sb) + T.shifts[:, 0]
        hi = np.where(signed > 0, sb, sa) + T.shifts[:, 0]
        return lo, hi
    V = hull.array()
    L = T.ratios.astype(float)[:, None, None] * T.orthos.astype(float)
    return np.einsum("wij,kj->wki", L, V) + T.shifts.astype(float)[:, None, :]


def _image_features(images, dim):
    if dim == 1:
        lo, hi = images
        return np.stack([hi.astype(float), -lo.astype(float)], axis=1)
    # support values h(u) = max <v, u> over 8 unit directions
    ang = np.arange(8) * (np.pi / 4)
    U = np.stack([np.cos(ang), np.sin(ang)])
    return (images @ U).max(axis=1)


def _image_evaluator(images, dim, exact):
    if dim == 1:
        lo, hi = images
        if exact:
            return lambda I, J: [max(abs(lo[i] - lo[j]), abs(hi[i] - hi[j])) for i, j in zip(I, J)]
        lo_f, hi_f = lo.astype(float), hi.astype(float)
        return lambda I, J: np.maximum(np.abs(lo_f[I] - lo_f[J]), np.abs(hi_f[I] - hi_f[J])).tolist()

    def evaluate(I, J):
        I, J = np.asarray(I), np.asarray(J)
        out = []
        # temporaries hold chunk * k^2 * 2 floats
        step = max(1, CHUNK_ENTRIES // images.shape[1] ** 2)
        for s in range(0, len(I), step):
            out.append(polygon_hausdorff_batch(images[I[s:s + step]], images[J[s:s + step]]))
        return np.concatenate(out).tolist() if out else []
    return evaluate


def _hull_error(ifs, n, hull_tol):
    if ifs.dim == 1:
        return 0.0
    return 2.0 * float(ifs.c_max) ** n * hull_tol / (1 - float(ifs.c_max))


def delta_star_n(ifs, n, hull=None, budget=None, method="auto", hull_tol=1e-13):
    """Least Hausdorff distance between distinct level-n images of the hull."""
    budget = budget or default_budget()
    if ifs.dim > 2:
        raise UnsupportedError("delta_star_n supports m <= 2")
    if ifs.N < 2:
        raise DomainError("delta_star_n needs at least two maps")
    hull = hull or attractor_hull(ifs, tol=hull_tol)
    T = level_table(ifs, n, budget)
    images = _hull_images(T, hull)
    exact = T.exact and hull.dim == 1 and all(is_exact(v[0]) for v in hull.vertices)
    cost = 1.0 if hull.dim == 1 else max(1.0, images.shape[1] ** 2 / 16)
    value, (i, j) = _min_pair(_image_features(images, hull.dim),
                              _image_evaluator(images, hull.dim, exact), exact, budget, method,
                              cost=cost)
    return LevelMinimum(value, (T.word(i), T.word(j)), _hull_error(ifs, n, hull_tol))


# ----------------------------------------------------------------- reports


def rescaled_base(deltas, delta=None):
    """``min{delta, D_1, D_2^(1/2), ..., D_n0^(1/n0)}`` for ``deltas = [D_1..D_n0]``.

    If ``D_n > delta^n`` for all n beyond the listed range, the returned
    base ``b`` satisfies ``D_n >= b^n`` for every n.
    """
    roots = [float(d) ** (1.0 / n) for n, d in enumerate(deltas, start=1)]
    if delta is not None:
        roots.append(float(delta))
    return min(roots)


@dataclass
class SeparationReport:
    n_values: list
    delta_n: list
    delta_star_n: list
    witnesses: list                 # per n: (delta witness, delta-star witness)
    delta_hat: float
    classification: str
    delta_star_error: list = field(default_factory=list)
    k_star: float = 1.0
    arithmetic: str = "float"
    heuristic: bool = True
    zero_equivalent: bool = True
    note: str = ""

    def rows(self):
        for k, n in enumerate(self.n_values):
            (wi, wj), (si, sj) = self.witnesses[k]
            yield n, self.delta_n[k], self.delta_star_n[k], wi, wj, si, sj


def _is_zero(v, exact, zero_tol):
    return v == 0 if (exact and is_exact(v)) else float(v) <= zero_tol


def classify(deltas, exact=False, zero_tol=1e-12, slope_threshold=1.0, min_levels=3):
    """Heuristic label for a finite prefix of the separation sequence.

    Super-exponential condensation is flagged when the per-level log
    decrement ``log D_{n+1} - log D_n`` over the second half of the range
    falls below its first-half mean by more than ``slope_threshold`` nats;
    the decrement is the finite-window analogue of ``(1/n) log D_n`` with
    the constant prefactor removed.
    """
    if any(_is_zero(d, exact, zero_tol) for d in deltas):
        return EXACT_OVERLAP
    if len(deltas) < min_levels:
        return INCONCLUSIVE
    logs = [math.log(float(d)) for d in deltas]
    steps = [b - a for a, b in zip(logs, logs[1:])]
    half = len(steps) // 2
    first = sum(steps[:max(half, 1)]) / max(half, 1)
    second = sum(steps[half:]) / len(steps[half:])
    if first - second > slope_threshold:
        return SUPER_EXPONENTIAL
    return EXPONENTIAL


def esc_diagnostic(ifs, n_max, hull=None, budget=None, zero_tol=1e-12, slope_threshold=1.0,
                   with_star=True):
    """Compute both separation sequences for n = 1..n_max and classify.

    Raises :class:`BudgetError` with the partial report attached when a
    level exceeds the budget.
    """
    if n_max < 2:
        raise DomainError("n_max must be >= 2")
    budget = budget or default_budget()
    with_star = with_star and ifs.dim <= 2
    if with_star:
        hull = hull or attractor_hull(ifs)
    ns, ds, dss, wit, errs = [], [], [], [], []
    failure = None
    for n in range(1, n_max + 1):
        try:
            d = delta_n(ifs, n, budget)
            s = delta_star_n(ifs, n, hull, budget) if with_star else LevelMinimum(float("nan"), ((), ()))
        except BudgetError as exc:
            failure = exc
            break
        ns.append(n)
        ds.append(d.value)
        dss.append(s.value)
        wit.append((d.witness, s.witness))
        errs.append(s.error_bound)
    exact = ifs.exact
    zero_d = [_is_zero(v, exact, zero_tol) for v in ds]
    zero_s = [_is_zero(v, exact, zero_tol) for v in dss] if with_star else zero_d
    report = SeparationReport(
        n_values=ns, delta_n=ds, delta_star_n=dss, witnesses=wit,
        delta_hat=rescaled_base(ds) if ds and not any(zero_d) else 0.0,
        classification=classify(ds, exact, zero_tol, slope_threshold) if ds else INCONCLUSIVE,
        delta_star_error=errs,
        k_star=max(float(hull.max_norm()), 1.0) if with_star else 1.0,
        arithmetic=ifs.arithmetic,
        zero_equivalent=(all(zero_d) == all(zero_s)),
    )
    if failure is not None:
        report.note = f"stopped at n={len(ns) + 1}: {failure}"
        raise BudgetError(str(failure), largest_feasible=len(ns), partial=report)
    return report


# ------------------------------------------------------- strong separation


def _level_polytopes(ifs, n, hull, budget):
    T = level_table(ifs, n, budget)
    images = _hull_images(T, hull)
    if hull.dim == 1:
        lo, hi = images
        polys = [Polytope(((lo[k],), (hi[k],))) for k in range(len(T))]
    else:
        polys = []
        for V in images:
            V = [tuple(p) for p in V]
            if len(V) >= 3 and ((V[1][0] - V[0][0]) * (V[2][1] - V[0][1])
                                - (V[1][1] - V[0][1]) * (V[2][0] - V[0][0])) < 0:
                V.reverse()
            polys.append(Polytope(tuple(V)))
    return T, polys


def _gap(ifs, hull):
    exact = ifs.exact and hull.dim == 1 and all(is_exact(v[0]) for v in hull.vertices)
    return 0 if exact else FLOAT_GAP


def _overlapping_pairs(polys, gap):
    """Index pairs whose images are not separated (bounding-box sweep + exact test)."""
    boxes = [p.bounds() for p in polys]
    order = sorted(range(len(polys)), key=lambda k: boxes[k][0][0])
    active = []
    for k in order:
        x0 = boxes[k][0][0]
        active = [a for a in active if boxes[a][0][1] + gap >= x0]
        for a in active:
            if not polytopes_disjoint(polys[a], polys[k], gap):
                yield (min(a, k), max(a, k))
        active.append(k)


def check_ssc_level(ifs, n, hull=None, budget=None):
    """True iff the level-n images of the hull are pairwise disjoint."""
    if ifs.dim > 2:
        raise UnsupportedError("check_ssc_level supports m <= 2")
    budget = budget or default_budget()
    hull = hull or attractor_hull(ifs)
    _, polys = _level_polytopes(ifs, n, hull, budget)
    return next(_overlapping_pairs(polys, _gap(ifs, hull)), None) is None


def _pairwise_disjoint(polys, idx, gap):
    sub = [polys[k] for k in idx]
    return next(_overlapping_pairs(sub, gap), None) is None


def suffix_family(ifs, n, hull=None, budget=None):
    """Largest family ``{j i : |j| = n - |i|}`` of level-n words with disjoint images.

    Shorter suffixes (bigger families) are preferred, then lexicographic
    order of the suffix.  Returns ``(suffix, words)`` or ``None``.
    """
    budget = budget or default_budget()
    hull = hull or attractor_hull(ifs)
    T, polys = _level_polytopes(ifs, n, hull, budget)
    gap = _gap(ifs, hull)
    N = ifs.N
    for L in range(0, n):
        block = N ** L
        for s in range(block):
            idx = [p * block + s for p in range(N ** (n - L))]
            if len(idx) >= 2 and _pairwise_disjoint(polys, idx, gap):
                suffix = T.word(s)[n - L:] if L else ()
                return suffix, [T.word(k) for k in idx]
    return None


def find_ssc_subsystem(ifs, n, hull=None, budget=None):
    """Maximal set of level-n words whose hull images are pairwise disjoint.

    Seeds with :func:`suffix_family` when one exists, then adds words
    greedily in lexicographic order.  Returns ``None`` if no two words have
    disjoint images.
    """
    if ifs.dim > 2:
        raise UnsupportedError("find_ssc_subsystem supports m <= 2")
    budget = budget or default_budget()
    hull = hull or attractor_hull(ifs)
    T, polys = _level_polytopes(ifs, n, hull, budget)
    gap = _gap(ifs, hull)
    seed = suffix_family(ifs, n, hull, budget)
    index = {T.word(k): k for k in range(len(T))}
    chosen = [index[w] for w in seed[1]] if seed else []
    for k in range(len(T)):
        if k in chosen:
            continue
        if all(polytopes_disjoint(polys[k], polys[c], gap) for c in chosen):
            chosen.append(k)
    if len(chosen) < 2:
        return None
    return [T.word(k) for k in sorted(chosen)]


# -------------------------------------------------------------- verdicts


@dataclass(frozen=True)
class DimensionVerdict:
    value: float
    basis: str
    similarity_dimension: float
    detail: dict = field(default_factory=dict)


def distinct_level_bound(ifs, n, budget=None):
    """Similarity dimension of the level-n system with duplicate maps removed.

    Since the attractor is also generated by the distinct level-n maps,
    this is an upper bound for its Hausdorff dimension.
    """
    T = level_table(ifs, n, budget)
    seen = {}
    for k in range(len(T)):
        key = (T.ratios[k], tuple(T.orthos[k].ravel().tolist()), tuple(T.shifts[k].tolist()))
        if not T.exact:
            key = tuple(round(float(x), 12) for x in (key[0], *key[1], *key[2]))
        seen.setdefault(key, float(T.ratios[k]))
    c = list(seen.values())
    lo, hi = 0.0, 64.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if sum(x ** mid for x in c) > 1:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def dimension_verdict(ifs, report, hull=None, max_ssc_level=3, budget=None):
    """Hausdorff-dimension verdict on R^1 from the separation evidence.

    Never a proof: the basis tag records which finite evidence was used.
    """
    if ifs.dim != 1:
        raise UnsupportedError("dimension verdicts are only issued on R^1")
    budget = budget or default_budget()
    hull = hull or attractor_hull(ifs)
    dim_s = similarity_dimension(ifs)
    cap = min(1.0, dim_s)
    if report.classification == EXACT_OVERLAP:
        bounds = {n: distinct_level_bound(ifs, n, budget) for n in report.n_values}
        return DimensionVerdict(min([cap] + list(bounds.values())), "OverlapUpperBoundOnly", dim_s,
                                {"distinct_level_bounds": bounds})
    for n in range(1, max_ssc_level + 1):
        try:
            if check_ssc_level(ifs, n, hull, budget):
                return DimensionVerdict(cap, f"SSC-level-{n}", dim_s)
        except BudgetError:
            break
    if report.classification == EXPONENTIAL:
        return DimensionVerdict(cap, "ESC-heuristic", dim_s, {"delta_hat": report.delta_hat})
    sub = find_ssc_subsystem(ifs, 2, hull, budget) if ifs.N ** 2 <= 4096 else None
    if sub is not None:
        # a strongly separated subsystem bounds the dimension from below
        lower = similarity_dimension(IFS(tuple(compose(ifs, w) for w in sub)))
        return DimensionVerdict(cap, "SSC-subsystem", dim_s, {"words": sub, "lower_bound": lower})
    return DimensionVerdict(cap, "UpperBoundOnly", dim_s)
