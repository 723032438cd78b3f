"""Fourier transforms of measures and decay probes.

``mu_hat(xi) = int exp(-2 pi i <xi, x>) dmu(x)``.  Atomic measures are
summed directly.  For a self-similar measure whose maps share one linear
part ``A`` the invariance gives

    mu_hat(xi) = prod_{n >= 0} sum_j p_j exp(-2 pi i <xi, A^n d_j>),

truncated after ``n_terms`` factors.  The neglected tail differs from 1
by at most ``2 pi |xi| c^n_terms max|d_j| / (1 - c)``.  With rational
data the phases are reduced modulo 1 exactly before exponentiation.
"""

from dataclasses import dataclass, field
from fractions import Fraction
import math

import numpy as np

from .errors import DomainError, UnsupportedError
from .geometry import is_exact
from .measures import (DiscreteMeasure, MixtureMeasure, SelfSimilarMeasure,
                       convolve, convolve_with_discrete, scale_measure)

DECAY_THRESHOLD = 0.05
NO_DECAY_FRACTION = 0.5
TARGET_TRUNCATION = 1e-15
MAX_TERMS = 4000


@dataclass(frozen=True)
class FourierSample:
    frequency: tuple
    value: complex
    truncation_error: float = 0.0


def _as_freq(xi):
    return tuple(np.atleast_1d(np.asarray(xi, dtype=object)).tolist())


def _phase(xi, x):
    """``<xi, x> mod 1``, exactly when every entry is rational."""
    if all(is_exact(v) for v in xi) and all(is_exact(v) for v in x):
        t = sum((Fraction(a) * Fraction(b) for a, b in zip(xi, x)), Fraction(0))
        return float(t - math.floor(t))
    t = sum(float(a) * float(b) for a, b in zip(xi, x))
    return t - math.floor(t)


def _cis(theta):
    return complex(math.cos(2 * math.pi * theta), -math.sin(2 * math.pi * theta))


def fourier_discrete(mu, xi):
    """Exact finite sum ``sum_j w_j exp(-2 pi i <xi, x_j>)``."""
    xi = _as_freq(xi)
    if len(xi) != mu.dim:
        raise DomainError("frequency dimension mismatch")
    value = sum((complex(float(w)) * _cis(_phase(xi, p)) for p, w in zip(mu.positions, mu.weights)),
                complex(0))
    return FourierSample(xi, value, 0.0)


def _common_linear(ifs):
    first = ifs.maps[0]
    for h in ifs.maps[1:]:
        if h.ratio != first.ratio or h.orthogonal != first.orthogonal:
            return None
    return first.ratio, first.matrix()


def terms_needed(c, xi_norm, radius, target=TARGET_TRUNCATION):
    """Smallest n with ``2 pi |xi| c^n radius / (1 - c) <= target``."""
    c = float(c)
    lead = 2 * math.pi * xi_norm * radius / (1 - c)
    if lead <= target:
        return 1
    return min(MAX_TERMS, max(1, math.ceil(math.log(target / lead) / math.log(c))))


def fourier_selfsimilar(mu, xi, n_terms=None):
    """Truncated infinite product for a self-similar measure with one linear part."""
    ifs = mu.wifs.ifs
    common = _common_linear(ifs)
    if common is None:
        raise UnsupportedError("maps must share ratio and orthogonal part")
    c, U = common
    xi = _as_freq(xi)
    if len(xi) != ifs.dim:
        raise DomainError("frequency dimension mismatch")
    exact = mu.exact and all(is_exact(v) for v in xi)
    radius = max(float(np.linalg.norm(np.array(h.translation, dtype=float))) for h in ifs.maps)
    xi_norm = float(np.linalg.norm(np.array(xi, dtype=float)))
    if n_terms is None:
        n_terms = terms_needed(c, xi_norm, radius)
    if n_terms < 1:
        raise DomainError("n_terms must be >= 1")
    shifts = [h.translation for h in ifs.maps]
    p = [complex(float(w)) for w in mu.wifs.weights]
    # eta_n = (A^T)^n xi so that <xi, A^n d> = <eta_n, d>
    At = (c * U).T if exact else (float(c) * U.astype(float)).T
    eta = np.array(xi, dtype=object if exact else float)
    value = complex(1)
    for _ in range(n_terms):
        e = tuple(eta.tolist())
        value *= sum((pj * _cis(_phase(e, d)) for pj, d in zip(p, shifts)), complex(0))
        eta = At @ eta
    err = 2 * math.pi * xi_norm * float(c) ** n_terms * radius / (1 - float(c))
    return FourierSample(xi, value, err)


def fourier_transform(mu, xi, n_terms=None):
    """Dispatch on the measure type; mixtures are summed componentwise."""
    if isinstance(mu, DiscreteMeasure):
        return fourier_discrete(mu, xi)
    if isinstance(mu, SelfSimilarMeasure):
        return fourier_selfsimilar(mu, xi, n_terms)
    if isinstance(mu, MixtureMeasure):
        value, err = complex(0), 0.0
        for comp, w in mu.components:
            s = fourier_transform(comp, xi, n_terms)
            value += float(w) * s.value
            err += float(w) * s.truncation_error
        return FourierSample(_as_freq(xi), value, err)
    raise TypeError(f"unsupported measure type {type(mu).__name__}")


# ------------------------------------------------------------------ decay


@dataclass
class DecayReport:
    frequencies: list          # |xi|, increasing
    magnitudes: list
    fitted_exponent: object    # float or None
    verdict: str
    details: dict = field(default_factory=dict)

    def rows(self):
        return zip(self.frequencies, self.magnitudes)


def geometric_grid(max_abs=1e3, per_octave=4, start=1.0):
    """``start * 2^(j / per_octave)`` up to ``max_abs``."""
    out, j = [], 0
    while True:
        x = start * 2.0 ** (j / per_octave)
        if x > max_abs:
            return out
        out.append(x)
        j += 1


def resonant_grid(mu, max_abs=1e3):
    """Powers of ``1/c`` for homogeneous self-similar measures, else empty.

    Powers are exact integers when ``1/c`` is an integer.
    """
    if not isinstance(mu, SelfSimilarMeasure) or mu.dim != 1:
        return []
    common = _common_linear(mu.wifs.ifs)
    if common is None:
        return []
    inv = 1 / Fraction(common[0]) if is_exact(common[0]) else 1 / float(common[0])
    if isinstance(inv, Fraction) and inv.denominator == 1:
        inv = int(inv)
    out, x = [], inv ** 0
    while float(x) <= max_abs:
        out.append(x)
        x = x * inv
    return out


def default_grid(mu, max_abs=1e3, per_octave=4):
    grid = sorted(set(geometric_grid(max_abs, per_octave)) | set(resonant_grid(mu, max_abs)), key=float)
    return grid


def _fit_exponent(xs, ys):
    xs, ys = np.asarray(xs, dtype=float), np.asarray(ys, dtype=float)
    keep = ys > 0
    if keep.sum() < 2:
        return None
    return float(np.polyfit(np.log(xs[keep]), np.log(ys[keep]), 1)[0])


def decay_probe(mu, grid=None, threshold=DECAY_THRESHOLD, tail_fraction=1 / 3, n_terms=None):
    """Sample ``|mu_hat|`` along a 1D frequency grid and label the behaviour.

    The tail is the final ``tail_fraction`` of the grid.  ``DecayObserved``
    when its largest magnitude is below ``threshold``; ``NoDecayObserved``
    when at least a third of the tail samples stay above half the largest
    magnitude seen before the tail; otherwise ``Inconclusive``.  ``fitted_exponent`` is the log-log slope
    of the per-octave maxima over the tail, a descriptive number only.
    """
    if grid is None:
        grid = default_grid(mu)
    grid = sorted(grid, key=lambda x: abs(float(x)))
    if not grid:
        raise DomainError("empty frequency grid")
    samples = [fourier_transform(mu, x, n_terms) for x in grid]
    freqs = [abs(float(x)) for x in grid]
    mags = [abs(s.value) for s in samples]
    start = max(1, int(math.ceil(len(grid) * (1 - tail_fraction))))
    start = min(start, len(grid) - 1)
    tail_f, tail_m = freqs[start:], mags[start:]
    tail_max = max(tail_m)
    reference = max(mags[:start]) if start else mags[0]
    if tail_max < threshold:
        verdict = "DecayObserved"
    elif _subsequence_persists(tail_m, reference):
        verdict = "NoDecayObserved"
    else:
        verdict = "Inconclusive"
    # envelope: maximum over each octave of the tail
    octaves = {}
    for f, m in zip(tail_f, tail_m):
        key = math.floor(math.log2(f)) if f > 0 else 0
        octaves[key] = max(octaves.get(key, 0.0), m)
    keys = sorted(octaves)
    exponent = _fit_exponent([2.0 ** (k + 0.5) for k in keys], [octaves[k] for k in keys])
    err = max(s.truncation_error for s in samples)
    return DecayReport(freqs, mags, exponent, verdict,
                       {"tail_start": tail_f[0], "tail_max": tail_max, "threshold": threshold,
                        "reference_magnitude": reference, "max_truncation_error": err})


def _subsequence_persists(tail, reference):
    above = sum(1 for m in tail if m >= NO_DECAY_FRACTION * reference)
    return above * 3 >= len(tail)


# ------------------------------------------------------ product identity


def check_convolution_identity(mu, nu, xis, with_bound=False):
    """``max |(mu * nu)^(xi) - mu_hat(xi) nu_hat(xi)|`` over ``xis``.

    Both atomic: the convolution is formed explicitly.  Otherwise one
    factor must be atomic and the convolution is a mixture of translates;
    the bound returned with ``with_bound`` adds the truncation errors.
    """
    conv = convolve(mu, nu) if isinstance(mu, DiscreteMeasure) and isinstance(nu, DiscreteMeasure) \
        else (convolve_with_discrete(mu, nu) if isinstance(nu, DiscreteMeasure)
              else convolve_with_discrete(nu, mu))
    worst, bound = 0.0, 0.0
    for xi in xis:
        a = fourier_transform(conv, xi)
        b = fourier_transform(mu, xi)
        c = fourier_transform(nu, xi)
        worst = max(worst, abs(a.value - b.value * c.value))
        bound = max(bound, a.truncation_error + b.truncation_error + c.truncation_error)
    return (worst, bound) if with_bound else worst


def check_scaling_identity(mu, beta, xis):
    """``max |nu_hat(xi) - mu_hat(xi / beta)|`` for ``nu = scale_measure(mu, beta)``."""
    nu = scale_measure(mu, beta)
    worst = 0.0
    for xi in xis:
        xi = _as_freq(xi)
        scaled = tuple((Fraction(v) / Fraction(beta)) if is_exact(v) and is_exact(beta)
                       else float(v) / float(beta) for v in xi)
        worst = max(worst, abs(fourier_transform(nu, xi).value - fourier_transform(mu, scaled).value))
    return worst
