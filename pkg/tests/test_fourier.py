from fractions import Fraction as Fr
import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from ifslab import corpus
from ifslab.errors import DomainError, UnsupportedError
from ifslab.fourier import (check_convolution_identity, check_scaling_identity, decay_probe,
                            fourier_transform, geometric_grid, resonant_grid, terms_needed)
from ifslab.ifs import IFS, WeightedIFS, similarity_1d
from ifslab.measures import DiscreteMeasure, SelfSimilarMeasure


def cantor_magnitude(xi, terms=80):
    return math.prod(abs(math.cos(2 * math.pi * xi / 3 ** n)) for n in range(1, terms))


@pytest.mark.parametrize("xi", [0.3, 1.0, 2.5, 17.25, 100.1])
def test_lebesgue_against_quadrature(xi):
    re = quad(lambda x: math.cos(2 * math.pi * xi * x), 0, 1, limit=400)[0]
    im = quad(lambda x: -math.sin(2 * math.pi * xi * x), 0, 1, limit=400)[0]
    s = fourier_transform(corpus.lebesgue(), xi)
    assert abs(s.value - complex(re, im)) <= s.truncation_error + 1e-10
    assert abs(s.value) == pytest.approx(abs(math.sin(math.pi * xi) / (math.pi * xi)), abs=1e-13)


@pytest.mark.parametrize("xi", [0.5, 1, 4.75, 81, 1000.3])
def test_cantor_cosine_product(xi):
    s = fourier_transform(corpus.cantor_measure(), xi)
    assert abs(s.value) == pytest.approx(cantor_magnitude(xi), abs=1e-13)


def test_cantor_resonant_frequencies_do_not_decay():
    base = abs(fourier_transform(corpus.cantor_measure(), 1).value)
    grid = resonant_grid(corpus.cantor_measure(), 1e6)
    assert grid[:4] == [1, 3, 9, 27] and all(isinstance(x, int) for x in grid)
    for x in grid:
        assert abs(fourier_transform(corpus.cantor_measure(), x).value) == pytest.approx(base, abs=1e-14)


@settings(max_examples=40)
@given(st.lists(st.fractions(-3, 3, max_denominator=16), min_size=1, max_size=6, unique=True),
       st.floats(-50, 50))
def test_discrete_matches_direct_sum(pos, xi):
    w = [Fr(1, len(pos))] * len(pos)
    mu = DiscreteMeasure(pos, w)
    direct = sum(float(c) * cmath.exp(-2j * math.pi * xi * float(p)) for p, c in zip(pos, w))
    assert fourier_transform(mu, xi).value == pytest.approx(direct, abs=1e-12)


def test_product_measure_factorises():
    mu = SelfSimilarMeasure(WeightedIFS.uniform(corpus.cantor_product()))
    for xi in [(0.5, 1.0), (3.0, -7.25), (10.0, 0.1)]:
        a = fourier_transform(corpus.cantor_measure(), xi[0]).value
        b = fourier_transform(corpus.cantor_measure(), xi[1]).value
        assert fourier_transform(mu, xi).value == pytest.approx(a * b, abs=1e-13)


@pytest.mark.parametrize("xi", [0.7, 13.0, 400.0])
def test_truncation_bound_holds(xi):
    mu = corpus.cantor_measure()
    ref = fourier_transform(mu, xi, n_terms=200).value
    for n in (1, 3, 6, 10):
        s = fourier_transform(mu, xi, n_terms=n)
        assert abs(s.value - ref) <= s.truncation_error + 1e-14


def test_terms_needed():
    n = terms_needed(Fr(1, 3), 100.0, 1.0, 1e-12)
    lead = 2 * math.pi * 100 / (1 - 1 / 3)
    assert lead * 3.0 ** -n <= 1e-12 < lead * 3.0 ** -(n - 1)


def test_identities():
    atoms = DiscreteMeasure([0, Fr(1, 5), Fr(3, 7)], [Fr(1, 2), Fr(1, 4), Fr(1, 4)])
    xis = [0.3, 2.0, 11.5, 123.0]
    worst, bound = check_convolution_identity(corpus.cantor_measure(), atoms, xis, with_bound=True)
    assert worst <= bound + 1e-13
    assert check_convolution_identity(atoms, atoms, xis) <= 1e-13
    assert check_scaling_identity(corpus.cantor_measure(), Fr(5, 2), [Fr(1), Fr(7, 3), 19.0]) <= 1e-13


def test_decay_verdicts():
    assert decay_probe(corpus.lebesgue(), geometric_grid(1e3)).verdict == "DecayObserved"
    rep = decay_probe(corpus.cantor_measure(), resonant_grid(corpus.cantor_measure(), 1e6))
    assert rep.verdict == "NoDecayObserved"
    rep = decay_probe(corpus.cantor_measure())
    assert rep.frequencies == sorted(rep.frequencies)
    with pytest.raises(DomainError):
        decay_probe(corpus.lebesgue(), [])


def test_dirac_has_constant_modulus():
    rep = decay_probe(corpus.dirac(Fr(1, 3)), geometric_grid(1e2))
    assert np.allclose(rep.magnitudes, 1.0) and rep.verdict == "NoDecayObserved"


def test_unequal_linear_parts_unsupported():
    ifs = IFS((similarity_1d(Fr(1, 2), 0), similarity_1d(Fr(1, 3), 1)))
    with pytest.raises(UnsupportedError):
        fourier_transform(SelfSimilarMeasure(WeightedIFS.uniform(ifs)), 1.0)
    with pytest.raises(DomainError):
        fourier_transform(corpus.cantor_measure(), (1.0, 2.0))
