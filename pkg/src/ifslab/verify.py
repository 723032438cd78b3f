"""Executable acceptance suite.

Each check returns a :class:`CheckResult`; ``run_suite`` runs them in
order.  Random inputs come from ``random.Random`` seeded per check, so the
suite is deterministic.
"""

from dataclasses import dataclass
from fractions import Fraction as Fr
import math
import random
import time

import numpy as np

from . import corpus
from .approximation import approximate_measure, approximate_set
from .geometry import block_diag, hausdorff_distance, operator_norm
from .ifs import (IFS, Similarity, attractor_hull, attractor_points, compose, product_ifs,
                  similarity_1d)
from .measures import (DiscreteMeasure, aggregate, convolve, dyadic_histogram,
                       lq_dimension_estimate, lq_tau_k, scale_measure)
from .fourier import check_convolution_identity, decay_probe, fourier_transform, geometric_grid
from .separation import (check_ssc_level, classify, delta_n, delta_star_n,
                         esc_diagnostic, find_ssc_subsystem, EXACT_OVERLAP,
                         EXPONENTIAL)


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self):
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] {self.number:2d} {self.name}: {self.detail} ({self.seconds:.1f}s)"


# ------------------------------------------------------------ generators


def random_orthogonal(rng, m):
    A = np.array([[rng.gauss(0, 1) for _ in range(m)] for _ in range(m)])
    Q, R = np.linalg.qr(A)
    return Q * np.sign(np.diag(R))


def random_homogeneous_1d(rng):
    N = rng.choice((2, 2, 3))
    r = Fr(1, rng.randint(2, 5)) if rng.random() < 0.5 else Fr(rng.randint(1, 3), rng.randint(4, 9))
    shifts = sorted({Fr(rng.randint(0, 40), rng.randint(1, 12)) for _ in range(N)})
    while len(shifts) < N:
        shifts.append(shifts[-1] + 1)
    return IFS(tuple(similarity_1d(r, s) for s in shifts))


def random_system(rng, m):
    N = rng.choice((2, 3))
    maps = []
    for _ in range(N):
        c = rng.uniform(0.15, 0.6)
        U = random_orthogonal(rng, m) if m > 1 else np.array([[rng.choice((-1.0, 1.0))]])
        a = [rng.uniform(-2, 2) for _ in range(m)]
        maps.append(Similarity(c, U, a))
    return IFS(tuple(maps))


def random_common_ratio_pair(rng):
    c = rng.choice((Fr(1, 2), Fr(1, 3), Fr(1, 4), Fr(2, 5)))
    def make():
        N = rng.choice((2, 3))
        shifts = sorted({Fr(rng.randint(0, 24), rng.randint(1, 6)) for _ in range(N)})
        while len(shifts) < 2:
            shifts.append(shifts[-1] + 1)
        return IFS(tuple(similarity_1d(c * rng.choice((1, -1)), s) for s in shifts))
    return make(), make()


def random_grid_measure(rng, max_atoms=8, den=64):
    """Random atoms on ``(1/den) Z`` in [0, 1) with random rational weights."""
    n = rng.randint(1, max_atoms)
    pos = rng.sample(range(den), n)
    w = [rng.randint(1, 20) for _ in range(n)]
    total = sum(w)
    return DiscreteMeasure([Fr(p, den) for p in pos], [Fr(x, total) for x in w])


def moment(h, q):
    return sum(v ** q for v in h.cells.values())


# ----------------------------------------------------------------- checks


def check_cantor():
    ifs = corpus.cantor()
    hull = attractor_hull(ifs)
    bad = [n for n in range(1, 13)
           if not (delta_n(ifs, n).value == Fr(2, 3 ** n) == delta_star_n(ifs, n, hull).value)]
    return not bad, f"Delta_n = Delta*_n = 2/3^n exactly for n=1..12; mismatches {bad}"


def check_sierpinski():
    ifs = corpus.sierpinski()
    hull = attractor_hull(ifs)
    worst = 0.0
    for n in range(1, 9):
        worst = max(worst, abs(float(delta_n(ifs, n).value) - 0.5 ** n),
                    abs(float(delta_star_n(ifs, n, hull).value) - 0.5 ** n))
    return worst <= 1e-10, f"max |Delta - 2^-n|, |Delta* - 2^-n| = {worst:.2e} over n=1..8"


def check_homogeneous_equality(systems=100, seed=3):
    rng = random.Random(seed)
    bad = 0
    for _ in range(systems):
        ifs = random_homogeneous_1d(rng)
        hull = attractor_hull(ifs)
        for n in range(1, 6):
            if delta_n(ifs, n).value != delta_star_n(ifs, n, hull).value:
                bad += 1
    return bad == 0, f"{systems} random homogeneous systems, n=1..5, exact mismatches: {bad}"


def _kstar_violation(ifs, n_max):
    hull = attractor_hull(ifs)
    k = max(float(hull.max_norm()), 1.0)
    worst = -math.inf
    for n in range(1, n_max + 1):
        d = delta_n(ifs, n).value
        s = delta_star_n(ifs, n, hull).value
        if ifs.exact and ifs.dim == 1 and isinstance(d, Fr) and isinstance(s, Fr) and k == int(k):
            gap = float(s - int(k) * d)
        else:
            gap = float(s) - k * float(d)
        worst = max(worst, gap)
    return worst


def check_hull_comparison(systems=100, seed=4, n_max=5):
    rng = random.Random(seed)
    worst = -math.inf
    for name in corpus.SYSTEMS:
        worst = max(worst, _kstar_violation(corpus.builtin(name), n_max if name != "cantor-product" else 4))
    for t in range(systems):
        worst = max(worst, _kstar_violation(random_system(rng, 1 + t % 2), n_max))
    return worst <= 1e-10, f"max(Delta*_n - k* Delta_n) = {worst:.3e} over corpus + {systems} random systems"


def check_product(pairs=20, seed=5, n_max=4):
    rng = random.Random(seed)
    cases = [(corpus.cantor(), corpus.cantor())] + [random_common_ratio_pair(rng) for _ in range(pairs)]
    failures = []
    for idx, (I1, I2) in enumerate(cases):
        P = product_ifs(I1, I2)
        for n in range(1, n_max + 1):
            dp, d1, d2 = delta_n(P, n).value, delta_n(I1, n).value, delta_n(I2, n).value
            if float(dp) < max(float(d1), float(d2)) - 1e-12:
                failures.append((idx, n))
    return not failures, (f"Delta_n(I1 x I2) >= max(Delta_n(I1), Delta_n(I2)) on {len(cases)} pairs, "
                          f"n<=4; violations {len(failures)} (first: {failures[:3]})")


def check_block_norm(quads=200, seed=6):
    rng = random.Random(seed)
    worst = -math.inf
    for _ in range(quads):
        k, m = rng.randint(1, 3), rng.randint(1, 3)
        A, A2 = random_orthogonal(rng, k), random_orthogonal(rng, k)
        B, B2 = random_orthogonal(rng, m), random_orthogonal(rng, m)
        lhs = operator_norm(block_diag(A, B) - block_diag(A2, B2))
        rhs = max(operator_norm(A - A2), operator_norm(B - B2))
        worst = max(worst, rhs - lhs)
    return worst <= 1e-10, f"max(block norms - full norm) = {worst:.2e} on {quads} quadruples"


def check_lq_values():
    leb = corpus.lebesgue()
    ok_leb = all(v == 1 for q in (1.5, 2, 3) for _, v in lq_dimension_estimate(leb, q, 16).sequence)
    d0 = corpus.dirac()
    ok_dirac = all(lq_tau_k(dyadic_histogram(d0, k), q) == 0 for k in range(1, 17) for q in (1.5, 2, 3))
    atoms = DiscreteMeasure([0, Fr(1, 3), Fr(1, 2), Fr(7, 8)], [Fr(1, 10), Fr(2, 10), Fr(3, 10), Fr(4, 10)])
    worst = 0.0
    for q in (1.5, 2, 3):
        s = sum(float(w) ** q for w in atoms.weights)
        for k in range(3, 17):
            worst = max(worst, abs(lq_tau_k(dyadic_histogram(atoms, k), q) - (-math.log2(s) / k)))
    decreasing = lq_tau_k(dyadic_histogram(atoms, 40), 2) < lq_tau_k(dyadic_histogram(atoms, 4), 2)
    ok = ok_leb and ok_dirac and worst <= 1e-12 and decreasing
    return ok, (f"Lebesgue tau_k/(q-1)==1 exactly: {ok_leb}; Dirac tau_k==0: {ok_dirac}; "
                f"atomic formula max err {worst:.1e}, tends to 0: {decreasing}")


def check_convolution_lq(trials=50, seed=8, q=2, k_max=14):
    rng = random.Random(seed)
    first = second = 0
    dim_gap = 0.0
    for _ in range(trials):
        mu, omega = random_grid_measure(rng), random_grid_measure(rng)
        conv = convolve(mu, omega)
        n = len(omega)
        qp = Fr(q, q - 1)
        M = sum(c ** qp for c in omega.weights) ** Fr(q, qp)   # exact for q = 2
        for k in range(0, k_max + 1):
            a = moment(dyadic_histogram(mu, k), q)
            b = moment(dyadic_histogram(conv, k), q)
            first += not (b <= 2 ** q * M * n * a)
            second += not (a <= 2 ** q * b)
        dim_gap = max(dim_gap, abs(lq_dimension_estimate(conv, q, k_max).extrapolated
                                   - lq_dimension_estimate(mu, q, k_max).extrapolated))
    ok = first == 0 and second == 0 and dim_gap <= 0.05
    return ok, (f"upper bound violations {first}, lower bound violations {second} "
                f"(over {trials} pairs x {k_max + 1} levels); max dim-estimate gap {dim_gap:.3f}")


def check_scaling(k_max=12):
    mu = corpus.cantor_measure()
    bad = []
    for s in (1, 2, 3):
        nu = scale_measure(mu, 2 ** s)
        for k in range(0, k_max + 1):
            if dyadic_histogram(nu, k).cells != aggregate(dyadic_histogram(mu, k + s), 2 * s).cells:
                bad.append((s, k))
    return not bad, f"scaled histograms equal aggregated ones for s=1,2,3, k<=12; mismatches {bad}"


def check_measure_approximation():
    rows, ok = [], True
    for name, mu in (("dirac", corpus.dirac()), ("cantor", corpus.cantor_measure())):
        for eps in (0.1, 0.05):
            for beta in (0.5, 1):
                c = approximate_measure(mu, eps, beta, q=2, k=14).certificate
                good = (c.transport_dl_bound <= eps / 2 + eps / 4 and c.support_radius <= eps / 4
                        and c.support_ok and c.tau_gap <= 0.05)
                ok &= good
                rows.append(f"{name}/{eps}/{beta}:dl={c.transport_dl_bound:.4f},tau_gap={c.tau_gap:.3f}")
    return ok, "; ".join(rows)


def check_eps_net(clouds=50, seed=11):
    rng = np.random.default_rng(seed)
    worst = -math.inf
    sets = [attractor_points(corpus.cantor(), 10).points]
    for t in range(clouds):
        m = 1 + t % 2
        sets.append(rng.uniform(-1, 1, size=(int(rng.integers(1, 400)), m)))
    for E in sets:
        for eps in (0.1, 0.01):
            F = approximate_set(E, eps)
            worst = max(worst, hausdorff_distance(E, F.points) - eps)
    return worst <= 0, f"max(H(E, net) - eps) = {worst:.3e} over {len(sets)} clouds, eps in (0.1, 0.01)"


def _disjoint_exact(intervals):
    for i in range(len(intervals)):
        for j in range(i + 1, len(intervals)):
            (a, b), (c, d) = intervals[i], intervals[j]
            if not (b < c or d < a):
                return False
    return True


def check_ssc_subsystem():
    ifs = corpus.overlap_remark()
    level1 = check_ssc_level(ifs, 1)
    sub = find_ssc_subsystem(ifs, 2)
    (lo, hi), = attractor_hull(ifs).bounds()
    ivs = [] if sub is None else [tuple(sorted((compose(ifs, w)([lo])[0], compose(ifs, w)([hi])[0])))
                                  for w in sub]
    ok = level1 is False and sub is not None and len(sub) >= 2 and _disjoint_exact(ivs)
    return ok, f"SSC at level 1: {level1}; level-2 subsystem {sub} exactly disjoint: {_disjoint_exact(ivs)}"


def check_garsia():
    rep = esc_diagnostic(corpus.garsia(), 10)
    over = esc_diagnostic(corpus.exact_overlap(), 4)
    ok = rep.delta_hat > 0 and rep.classification == EXPONENTIAL and over.classification == EXACT_OVERLAP
    return ok, (f"min Delta_n^(1/n) = {rep.delta_hat:.4f} over n=1..10, {rep.classification}; "
                f"engineered overlap: {over.classification}")


def check_fourier(seed=14):
    rng = random.Random(seed)
    def rand_measure(n):
        w = [rng.random() + 0.01 for _ in range(n)]
        s = sum(w)
        return DiscreteMeasure([rng.uniform(-3, 3) for _ in range(n)], [x / s for x in w])
    conv_err = max(check_convolution_identity(rand_measure(10), rand_measure(10),
                                              [rng.uniform(-50, 50) for _ in range(100)])
                   for _ in range(5))
    can = corpus.cantor_measure()
    mags = [abs(fourier_transform(can, 3 ** k).value) for k in range(9)]
    spread = max(mags) - min(mags)
    rep = decay_probe(corpus.lebesgue(), geometric_grid(1e3, 4))
    expo = rep.fitted_exponent
    ok = conv_err <= 1e-12 and spread <= 1e-12 and mags[0] > 0.1 and expo is not None and abs(expo + 1) <= 0.2
    return ok, (f"convolution identity err {conv_err:.1e}; Cantor |mu^(3^k)| = {mags[0]:.6f} "
                f"spread {spread:.1e}; Lebesgue tail exponent {expo:.3f}")


# runtime limits in seconds, where the criterion states one
TIME_LIMITS = {1: 10.0, 2: 60.0, 13: 120.0}

CHECKS = [
    (1, "Cantor separation", check_cantor),
    (2, "Sierpinski separation", check_sierpinski),
    (3, "homogeneous Delta = Delta*", check_homogeneous_equality),
    (4, "hull distance vs map distance", check_hull_comparison),
    (5, "product system separation", check_product),
    (6, "block-diagonal operator norm", check_block_norm),
    (7, "exact L^q values", check_lq_values),
    (8, "L^q under discrete convolution", check_convolution_lq),
    (9, "dyadic scaling of histograms", check_scaling),
    (10, "dimension-preserving measure approximation", check_measure_approximation),
    (11, "eps-net density", check_eps_net),
    (12, "SSC subsystem of the overlapping x/4 system", check_ssc_subsystem),
    (13, "Garsia separation diagnostic", check_garsia),
    (14, "Fourier identities and decay", check_fourier),
]


def run_check(number):
    for num, name, fn in CHECKS:
        if num == number:
            t = time.perf_counter()
            try:
                passed, detail = fn()
            except Exception as exc:  # a crashing check is a failing check
                passed, detail = False, f"error: {type(exc).__name__}: {exc}"
            seconds = time.perf_counter() - t
            limit = TIME_LIMITS.get(num)
            if limit is not None:
                passed = passed and seconds < limit
                detail += f"; runtime limit {limit:.0f}s"
            return CheckResult(num, name, bool(passed), detail, seconds)
    raise KeyError(number)


def run_suite(numbers=None):
    return [run_check(num) for num, _, _ in CHECKS if numbers is None or num in numbers]
