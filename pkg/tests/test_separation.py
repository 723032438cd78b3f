from fractions import Fraction as Fr
import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ifslab import corpus
from ifslab.config import Budget
from ifslab.errors import BudgetError, DomainError
from ifslab.geometry import rotation
from ifslab.ifs import IFS, Similarity, attractor_hull, compose, map_distance, product_ifs, similarity_1d
from ifslab.separation import (EXACT_OVERLAP, EXPONENTIAL, INCONCLUSIVE, SUPER_EXPONENTIAL,
                               check_ssc_level, classify, delta_n, delta_star_n,
                               dimension_verdict, distinct_level_bound, esc_diagnostic,
                               find_ssc_subsystem, rescaled_base, suffix_family)

ratios = st.fractions(Fr(1, 7), Fr(6, 7), max_denominator=9)
shifts = st.fractions(-4, 4, max_denominator=8)
signs = st.sampled_from((1, -1))
maps_1d = st.builds(lambda r, s, a: similarity_1d(s * r, a), ratios, signs, shifts)
systems_1d = st.lists(maps_1d, min_size=2, max_size=3).map(lambda ms: IFS(tuple(ms)))


@st.composite
def homogeneous_1d(draw):
    # one common signed ratio: the maps share their linear part
    r = draw(ratios) * draw(signs)
    a = draw(st.lists(shifts, min_size=2, max_size=3, unique=True))
    return IFS(tuple(similarity_1d(r, x) for x in a))


@st.composite
def systems_2d(draw):
    N = draw(st.integers(2, 3))
    maps = []
    for _ in range(N):
        U = rotation(draw(st.floats(0, 2 * math.pi)))
        if draw(st.booleans()):
            U = U @ np.diag([1.0, -1.0])
        maps.append(Similarity(draw(st.floats(0.15, 0.7)), U,
                               (draw(st.floats(-2, 2)), draw(st.floats(-2, 2)))))
    return IFS(tuple(maps))


def brute_delta(ifs, n):
    """Minimum over all word pairs straight from ``compose`` and ``map_distance``."""
    best = None
    for u, v in itertools.combinations(itertools.product(range(1, ifs.N + 1), repeat=n), 2):
        d = map_distance(compose(ifs, u), compose(ifs, v))
        if best is None or d < best[0]:
            best = (d, (u, v))
    return best


def brute_delta_star_1d(ifs, n):
    (a,), (b,) = attractor_hull(ifs).vertices
    best = None
    for u, v in itertools.combinations(itertools.product(range(1, ifs.N + 1), repeat=n), 2):
        f, g = compose(ifs, u), compose(ifs, v)
        I = sorted((f([a])[0], f([b])[0]))
        J = sorted((g([a])[0], g([b])[0]))
        d = max(abs(I[0] - J[0]), abs(I[1] - J[1]))
        if best is None or d < best[0]:
            best = (d, (u, v))
    return best


def test_cantor_closed_form():
    hull = attractor_hull(corpus.cantor())
    for n in range(1, 9):
        d = delta_n(corpus.cantor(), n)
        assert d.value == Fr(2, 3 ** n)
        assert d.witness == ((1,) * n, (1,) * (n - 1) + (2,))
        assert delta_star_n(corpus.cantor(), n, hull).value == Fr(2, 3 ** n)


@settings(max_examples=30, deadline=None)
@given(systems_1d, st.integers(1, 4))
def test_delta_matches_brute_force_exact(ifs, n):
    d, w = brute_delta(ifs, n)
    got = delta_n(ifs, n)
    assert got.value == d and got.witness == w
    s, ws = brute_delta_star_1d(ifs, n)
    got = delta_star_n(ifs, n)
    assert got.value == s and got.witness == ws


@settings(max_examples=15, deadline=None)
@given(systems_1d, st.integers(4, 5))
def test_pruned_search_equals_exhaustive_1d(ifs, n):
    for fn in (delta_n, delta_star_n):
        a, b = fn(ifs, n, method="pruned"), fn(ifs, n, method="exhaustive")
        assert a.value == b.value and a.witness == b.witness


@settings(max_examples=10, deadline=None)
@given(systems_2d(), st.integers(1, 5))
def test_pruned_search_equals_exhaustive_2d(ifs, n):
    hull = attractor_hull(ifs)
    a, b = delta_n(ifs, n, method="pruned"), delta_n(ifs, n, method="exhaustive")
    assert a.value == pytest.approx(b.value, rel=1e-12)
    a = delta_star_n(ifs, n, hull, method="pruned")
    b = delta_star_n(ifs, n, hull, method="exhaustive")
    assert a.value == pytest.approx(b.value, rel=1e-12)


@settings(max_examples=10, deadline=None)
@given(systems_2d(), st.integers(1, 3))
def test_delta_2d_matches_brute_force(ifs, n):
    d, _ = brute_delta(ifs, n)
    assert delta_n(ifs, n).value == pytest.approx(d, rel=1e-12, abs=1e-15)


@settings(max_examples=30, deadline=None)
@given(homogeneous_1d(), st.integers(1, 5))
def test_homogeneous_delta_equals_delta_star(ifs, n):
    assert delta_n(ifs, n).value == delta_star_n(ifs, n).value


@settings(max_examples=30, deadline=None)
@given(systems_1d, st.integers(1, 4))
def test_hull_distance_bounded_by_map_distance(ifs, n):
    hull = attractor_hull(ifs)
    k = max(hull.max_norm(), 1)
    assert delta_star_n(ifs, n, hull).value <= k * delta_n(ifs, n).value


@st.composite
def common_ratio_pairs(draw):
    c = draw(st.sampled_from((Fr(1, 2), Fr(1, 3), Fr(2, 5))))
    def system():
        a = draw(st.lists(shifts, min_size=2, max_size=3, unique=True))
        return IFS(tuple(similarity_1d(c * draw(signs), x) for x in a))
    return system(), system()


@settings(max_examples=20, deadline=None)
@given(common_ratio_pairs(), st.integers(1, 3))
def test_product_separation_sandwich(pair, n):
    # a product pair may differ in one coordinate only, so the product
    # sequence is bounded by the smaller factor sequence; it is never
    # below the smaller one either, since a pair differing in both
    # coordinates is at least as far apart as its first factor
    I1, I2 = pair
    P = product_ifs(I1, I2)
    dp, d1, d2 = delta_n(P, n).value, delta_n(I1, n).value, delta_n(I2, n).value
    assert dp <= min(d1, d2) + 1e-12
    assert dp >= min(d1, d2) - 1e-12


def test_witnesses_are_distinct_words():
    d = delta_n(corpus.exact_overlap(), 2)
    assert d.value == 0 and d.witness == ((1, 3), (2, 1))


def test_classify_synthetic_sequences():
    geometric = [0.5 ** n for n in range(1, 11)]
    super_exp = [math.exp(-n * n / 5) for n in range(1, 11)]
    assert classify(geometric) == EXPONENTIAL
    assert classify(super_exp) == SUPER_EXPONENTIAL
    assert classify([0.1, 0.0, 0.0]) == EXACT_OVERLAP
    assert classify([Fr(1, 2), Fr(0)], exact=True) == EXACT_OVERLAP
    assert classify([0.5, 0.25]) == INCONCLUSIVE


def test_rescaled_base():
    assert rescaled_base([Fr(2, 3), Fr(2, 9), Fr(2, 27)]) == pytest.approx((2 / 27) ** (1 / 3))
    assert rescaled_base([0.9], delta=0.5) == 0.5


def test_esc_diagnostic_cantor():
    rep = esc_diagnostic(corpus.cantor(), 8)
    assert rep.classification == EXPONENTIAL
    assert rep.arithmetic == "exact" and rep.zero_equivalent
    assert rep.delta_hat == pytest.approx(min((2 / 3 ** n) ** (1 / n) for n in range(1, 9)))
    assert len(list(rep.rows())) == 8


def test_esc_diagnostic_budget_keeps_partial():
    with pytest.raises(BudgetError) as info:
        esc_diagnostic(corpus.cantor(), 12, budget=Budget(max_pairs=500))
    assert info.value.largest_feasible == 5
    assert info.value.partial.n_values == [1, 2, 3, 4, 5]
    with pytest.raises(DomainError):
        esc_diagnostic(corpus.cantor(), 1)


def test_garsia_stays_separated():
    rep = esc_diagnostic(corpus.garsia(), 10)
    assert rep.classification == EXPONENTIAL
    assert rep.delta_hat > 0.4
    assert all(d > 0 for d in rep.delta_n)


def test_ssc_levels():
    assert check_ssc_level(corpus.cantor(), 1)
    assert check_ssc_level(corpus.cantor(), 3)
    assert not check_ssc_level(corpus.overlap_remark(), 1)
    assert not check_ssc_level(corpus.exact_overlap(), 2)
    assert check_ssc_level(corpus.sierpinski(), 1) is False    # touching corners
    assert check_ssc_level(corpus.cantor_product(), 2)


def _intervals(ifs, words):
    (a,), (b,) = attractor_hull(ifs).vertices
    return [tuple(sorted((compose(ifs, w)([a])[0], compose(ifs, w)([b])[0]))) for w in words]


def test_ssc_subsystem_of_overlapping_system():
    ifs = corpus.overlap_remark()
    sub = find_ssc_subsystem(ifs, 2)
    ivs = _intervals(ifs, sub)
    for (a, b), (c, d) in itertools.combinations(ivs, 2):
        assert b < c or d < a
    # maximality: every other level-2 word meets a chosen interval
    rest = [w for w in itertools.product((1, 2, 3), repeat=2) if w not in sub]
    for (a, b) in _intervals(ifs, rest):
        assert any(not (b < c or d < a) for c, d in ivs)
    suffix, family = suffix_family(ifs, 2)
    assert suffix == (1,) and family == [(1, 1), (2, 1), (3, 1)]


def test_dimension_verdicts():
    rep = esc_diagnostic(corpus.cantor(), 6)
    v = dimension_verdict(corpus.cantor(), rep)
    assert v.basis == "SSC-level-1" and v.value == pytest.approx(math.log(2) / math.log(3))
    rep = esc_diagnostic(corpus.overlap_remark(), 4)
    v = dimension_verdict(corpus.overlap_remark(), rep)
    assert v.basis == "OverlapUpperBoundOnly"
    assert v.value <= v.similarity_dimension
    rep = esc_diagnostic(corpus.garsia(), 8)
    assert dimension_verdict(corpus.garsia(), rep).basis == "ESC-heuristic"


def test_distinct_level_bound_exact_overlap():
    # x/2, x/2 + 1/2, x/2 + 1 generates [0, 2]; level-n distinct maps number 2^(n+1) - 1
    for n in range(1, 6):
        expected = math.log(2 ** (n + 1) - 1) / (n * math.log(2))
        assert distinct_level_bound(corpus.exact_overlap(), n) == pytest.approx(expected, abs=1e-12)
