from fractions import Fraction as Fr
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import wasserstein_distance

from ifslab import corpus
from ifslab.config import Budget
from ifslab.errors import BudgetError, DimensionError, DomainError, UnsupportedError
from ifslab.ifs import IFS, WeightedIFS, similarity_1d
from ifslab.measures import (CYLINDER, EXACT, MONTE_CARLO, DiscreteMeasure, MixtureMeasure,
                             SelfSimilarMeasure, aggregate, convolve, convolve_with_discrete,
                             discretize, dl_distance, dyadic_histogram, exact_cdf,
                             lq_dimension_estimate, lq_tau_k, quantize, scale_measure,
                             translate_measure)


def bernoulli(p):
    """Invariant measure of x/2, x/2 + 1/2 with weights (p, 1 - p)."""
    ifs = IFS((similarity_1d(Fr(1, 2), 0), similarity_1d(Fr(1, 2), Fr(1, 2))))
    return SelfSimilarMeasure(WeightedIFS(ifs, (p, 1 - p)))


def cantor_function(x, depth=60):
    """Ternary-digit evaluation, accurate to 2^-depth."""
    x, value = Fr(x), Fr(0)
    if x >= 1:
        return Fr(1)
    for n in range(1, depth + 1):
        x *= 3
        d = math.floor(x)
        x -= d
        if d == 1:
            return value + Fr(1, 2 ** n)
        if d == 2:
            value += Fr(1, 2 ** n)
    return value


@st.composite
def grid_measures(draw, den=64, max_atoms=8):
    pos = draw(st.lists(st.integers(0, den - 1), min_size=1, max_size=max_atoms, unique=True))
    w = draw(st.lists(st.integers(1, 20), min_size=len(pos), max_size=len(pos)))
    return DiscreteMeasure([Fr(p, den) for p in pos], [Fr(x, sum(w)) for x in w])


def moment(h, q):
    return sum(v ** q for v in h.cells.values())


# ------------------------------------------------------------------ types


def test_discrete_measure_merges_and_validates():
    mu = DiscreteMeasure([0, 0, Fr(1, 2)], [Fr(1, 4), Fr(1, 4), Fr(1, 2)])
    assert mu.positions == ((0,), (Fr(1, 2),)) and mu.weights == (Fr(1, 2), Fr(1, 2))
    assert mu.exact
    with pytest.raises(DomainError):
        DiscreteMeasure([0, 1], [0.5, 0.6])
    with pytest.raises(DomainError):
        DiscreteMeasure([0], [-1])
    with pytest.raises(DimensionError):
        DiscreteMeasure([(0,), (0, 1)], [0.5, 0.5])


def test_mixture_validation():
    with pytest.raises(DomainError):
        MixtureMeasure(((corpus.dirac(), 0.5),))
    with pytest.raises(DimensionError):
        MixtureMeasure(((corpus.dirac(), 0.5), (DiscreteMeasure.dirac((0, 0)), 0.5)))


# ------------------------------------------------------------ histograms


def test_exact_cdf_matches_cantor_function():
    F = exact_cdf(corpus.cantor_measure())
    for x in [Fr(0), Fr(1, 4), Fr(1, 3), Fr(2, 3), Fr(3, 4), Fr(1, 10), Fr(7, 9), Fr(5, 13), Fr(1)]:
        assert abs(F(x) - cantor_function(x)) <= Fr(1, 2 ** 59)
    assert F(Fr(1, 4)) == Fr(1, 3)      # 1/4 = 0.0202... in base 3


@pytest.mark.parametrize("p", [Fr(1, 3), Fr(1, 5), Fr(1, 2)])
def test_bernoulli_cells_are_digit_products(p):
    mu = bernoulli(p)
    for k in (1, 4, 9):
        h = dyadic_histogram(mu, k)
        assert h.mode == EXACT
        for (j,), v in h.cells.items():
            ones = bin(j).count("1")
            assert v == p ** (k - ones) * (1 - p) ** ones
        assert len(h.cells) == 2 ** k


def test_bernoulli_tau_closed_form():
    p, q = Fr(1, 3), 2
    expected = -math.log2(float(p ** q + (1 - p) ** q))
    for k in range(1, 13):
        assert lq_tau_k(dyadic_histogram(bernoulli(p), k), q) == pytest.approx(expected, rel=1e-14)


def test_decreasing_map_representation_of_lebesgue():
    # x -> -x/2 + 1/2 and x -> x/2 + 1/2 also generate Lebesgue measure on [0, 1]
    ifs = IFS((similarity_1d(Fr(-1, 2), Fr(1, 2)), similarity_1d(Fr(1, 2), Fr(1, 2))))
    mu = SelfSimilarMeasure(WeightedIFS.uniform(ifs))
    for k in (1, 5, 10):
        h = dyadic_histogram(mu, k)
        assert h.mode == EXACT and set(h.cells.values()) == {Fr(1, 2 ** k)}


def test_histogram_routes_agree():
    mu = corpus.cantor_measure()
    exact = dyadic_histogram(mu, 8)
    cyl = dyadic_histogram(mu, 8, mode="cylinder")
    assert cyl.mode == CYLINDER
    diff = sum(abs(float(exact.cells.get(key, 0)) - cyl.cells.get(key, 0))
               for key in set(exact.cells) | set(cyl.cells))
    assert diff <= 2 * cyl.error + 1e-12
    mc = dyadic_histogram(mu, 4, mode="montecarlo", count=200_000, seed=1)
    assert mc.mode == MONTE_CARLO
    for key, v in dyadic_histogram(mu, 4).cells.items():
        assert abs(mc.cells.get(key, 0) - float(v)) < 0.01


def test_non_unit_ratio_falls_back_to_cylinders():
    ifs = IFS((similarity_1d(Fr(2, 5), 0), similarity_1d(Fr(2, 5), Fr(3, 5))))
    mu = SelfSimilarMeasure(WeightedIFS.uniform(ifs))
    h = dyadic_histogram(mu, 6)
    assert h.mode in (EXACT, CYLINDER)
    assert float(h.total()) == pytest.approx(1.0, abs=1e-12)


def test_histogram_total_mass_is_one():
    for k in range(0, 12):
        assert dyadic_histogram(corpus.cantor_measure(), k).total() == 1


def test_histogram_budget():
    ifs = IFS((similarity_1d(0.5, 0.0), similarity_1d(0.5, 0.5)))
    mu = SelfSimilarMeasure(WeightedIFS.uniform(ifs))
    with pytest.raises(BudgetError):
        dyadic_histogram(mu, 20, mode="cylinder", budget=Budget(max_cells=1000))


@settings(max_examples=40)
@given(grid_measures(), st.integers(1, 3), st.integers(0, 10))
def test_scaling_by_powers_of_two(mu, s, k):
    nu = scale_measure(mu, 2 ** s)
    lhs = dyadic_histogram(nu, k).cells
    assert lhs == aggregate(dyadic_histogram(mu, k + s), 2 * s).cells
    if k >= s:
        assert lhs == dyadic_histogram(mu, k - s).cells


def test_aggregate_levels():
    h = dyadic_histogram(corpus.cantor_measure(), 6)
    assert aggregate(h, 2).cells == dyadic_histogram(corpus.cantor_measure(), 4).cells
    assert aggregate(h, 8).level == -2
    with pytest.raises(DomainError):
        aggregate(h, -1)


# ---------------------------------------------------------------- L^q


def test_lq_exact_values():
    leb = corpus.lebesgue()
    for q in (1.5, 2, 3):
        est = lq_dimension_estimate(leb, q, 12)
        assert all(v == 1 for _, v in est.sequence) and est.extrapolated == 1
    for k in range(1, 10):
        assert lq_tau_k(dyadic_histogram(corpus.dirac(), k), 2) == 0


@settings(max_examples=40)
@given(grid_measures(), st.sampled_from((1.5, 2.0, 3.0)))
def test_atomic_tau_formula(mu, q):
    # atoms on the 1/64 grid are separated from level 6 on
    s = sum(float(w) ** q for w in mu.weights)
    for k in (6, 10, 20):
        assert lq_tau_k(dyadic_histogram(mu, k), q) == pytest.approx(-math.log2(s) / k, abs=1e-12)


def test_lq_validation():
    h = dyadic_histogram(corpus.cantor_measure(), 3)
    with pytest.raises(DomainError):
        lq_tau_k(h, 1)
    with pytest.raises(DomainError):
        lq_tau_k(dyadic_histogram(corpus.cantor_measure(), 0), 2)
    with pytest.raises(DomainError):
        lq_dimension_estimate(corpus.cantor_measure(), 2, 3)


def test_cantor_dimension_estimate():
    est = lq_dimension_estimate(corpus.cantor_measure(), 2, 16)
    assert est.extrapolated == pytest.approx(math.log(2) / math.log(3), abs=0.01)
    assert est.secant == pytest.approx(math.log(2) / math.log(3), abs=0.02)


# -------------------------------------------------------- convolution bounds


@settings(max_examples=40)
@given(grid_measures(), grid_measures(max_atoms=5), st.integers(0, 12))
def test_convolution_upper_bound(mu, omega, k):
    q = 2
    conv = convolve(mu, omega)
    M = sum(c ** 2 for c in omega.weights)
    assert moment(dyadic_histogram(conv, k), q) <= 2 ** q * M * len(omega) * moment(dyadic_histogram(mu, k), q)


@settings(max_examples=40)
@given(grid_measures(), grid_measures(max_atoms=5), st.integers(0, 12))
def test_convolution_lower_bound_with_heaviest_atom(mu, omega, k):
    # mu * omega >= c_max (mu shifted by the heaviest atom); a shifted cell
    # meets at most two cells, hence the factor 2^q c_max^-q
    q = 2
    conv = convolve(mu, omega)
    c = max(omega.weights)
    assert moment(dyadic_histogram(mu, k), q) <= 2 ** q / c ** q * moment(dyadic_histogram(conv, k), q)


def test_convolution_and_translation():
    mu = DiscreteMeasure([0, 1], [Fr(1, 2), Fr(1, 2)])
    conv = convolve(mu, mu)
    assert dict(zip(conv.positions, conv.weights)) == {(0,): Fr(1, 4), (1,): Fr(1, 2), (2,): Fr(1, 4)}
    mix = convolve_with_discrete(corpus.cantor_measure(), mu)
    assert isinstance(mix, MixtureMeasure) and mix.bounds() == ((0,), (2,))
    t = translate_measure(corpus.cantor_measure(), [Fr(1, 2)])
    assert t.bounds() == ((Fr(1, 2),), (Fr(3, 2),))
    with pytest.raises(UnsupportedError):
        convolve(corpus.cantor_measure(), corpus.lebesgue())


# ------------------------------------------------------------------ d_L


@settings(max_examples=60)
@given(grid_measures(), grid_measures())
def test_dl_matches_scipy_wasserstein(mu, nu):
    got = dl_distance(mu, nu)
    assert isinstance(got, Fr)
    ref = wasserstein_distance(mu.array()[:, 0], nu.array()[:, 0], mu.weight_array(), nu.weight_array())
    assert float(got) == pytest.approx(ref, abs=1e-12)


@settings(max_examples=20, deadline=None)
@given(grid_measures(max_atoms=5), grid_measures(max_atoms=5), st.floats(0, 2 * math.pi))
def test_dl_transport_route_on_a_line(mu, nu, theta):
    # embed both measures on a line in R^2; the distance must not change
    u = (math.cos(theta), math.sin(theta))
    emb = lambda m: DiscreteMeasure([(float(p[0]) * u[0], float(p[0]) * u[1]) for p in m.positions],  # noqa: E731
                                    [float(w) for w in m.weights])
    assert dl_distance(emb(mu), emb(nu)) == pytest.approx(float(dl_distance(mu, nu)), abs=1e-9)


def test_dl_examples_and_budget():
    half = DiscreteMeasure([0, 1], [Fr(1, 2), Fr(1, 2)])
    assert dl_distance(half, DiscreteMeasure.dirac(Fr(1, 2))) == Fr(1, 2)
    a = DiscreteMeasure([(i, 0) for i in range(5)], [0.2] * 5)
    with pytest.raises(BudgetError):
        dl_distance(a, a, Budget(max_atoms=3))
    with pytest.raises(UnsupportedError):
        dl_distance(corpus.cantor_measure(), half)


def test_discretize_bound():
    mu = corpus.cantor_measure()
    d1, b1 = discretize(mu, 1e-2)
    d2, b2 = discretize(mu, 1e-4)
    assert float(dl_distance(d1, d2)) <= b1 + b2


# -------------------------------------------------------------- quantize


def test_quantize_examples():
    assert quantize(corpus.dirac(), Fr(1, 10)).positions == ((0,),)
    q = quantize(corpus.lebesgue(), Fr(1, 4))
    assert q.positions == ((Fr(1, 8),), (Fr(3, 8),), (Fr(5, 8),), (Fr(7, 8),))
    assert q.weights == (Fr(1, 4),) * 4


@settings(max_examples=40)
@given(grid_measures(), st.sampled_from((Fr(1, 10), Fr(1, 7), Fr(1, 3))))
def test_quantize_moves_mass_at_most_half_eps(mu, eps):
    nu, bound = quantize(mu, eps, return_bound=True)
    assert sum(nu.weights) == 1
    assert dl_distance(mu, nu) <= eps / 2 == bound


def test_quantize_2d():
    mu = DiscreteMeasure([(0.0, 0.0), (0.01, 0.0), (1.0, 1.0)], [0.25, 0.25, 0.5])
    nu, bound = quantize(mu, 0.1, return_bound=True)
    assert len(nu) == 2
    assert dl_distance(mu, nu) <= bound
