"""Dimension-preserving approximation of sets and measures.

``approximate_measure`` quantizes a measure to finitely many atoms and
convolves the result with a shrunken template whose L^q dimension is the
target ``beta``.  Shrinking by ``L = 8 sqrt(m) diam(K) / eps`` keeps the
template inside ``[-eps/(4 sqrt m), eps/(4 sqrt m)]^m``, so the convolution
moves each atom by less than ``eps / 4``.  ``approximate_set`` replaces a
finite cloud by a greedy eps-net, a finite (dimension zero) set.
"""

from dataclasses import asdict, dataclass, field
from fractions import Fraction
import json
import math

import numpy as np

from .errors import DomainError
from .geometry import PointCloud
from .ifs import IFS, WeightedIFS, product_ifs, similarity_1d
from .measures import (DiscreteMeasure, SelfSimilarMeasure, convolve_with_discrete,
                       discretize, dl_distance, lq_dimension_estimate, quantize,
                       scale_measure)

SNAP_TOL = 1e-12


def snap_rational(x, max_den=10**6, tol=1e-15):
    """``x`` as a Fraction when it is a float within ``tol`` of a small rational."""
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    f = Fraction(x).limit_denominator(max_den)
    return f if abs(float(f) - x) <= tol * max(1.0, abs(x)) else x


def template_ratio(beta):
    """``2^(-1/beta)``, snapped to ``1/n`` when within 1e-12 of it."""
    r = 2.0 ** (-1.0 / beta)
    n = round(1.0 / r)
    if abs(r - 1.0 / n) <= SNAP_TOL:
        return Fraction(1, n)
    return r


def template_measure(beta, m=1):
    """Equal-weight two-map template with L^q dimension ``beta``.

    In R^1 the maps are ``r x`` and ``r x + (1 - r)`` with ``r = 2^(-1/beta)``.
    In R^m the template is the m-fold product of the 1D template with
    parameter ``beta / m``.
    """
    if not (0 < beta <= m):
        raise DomainError(f"beta must lie in (0, {m}]")
    r = template_ratio(beta / m)
    one = Fraction(1) if isinstance(r, Fraction) else 1.0
    base = IFS((similarity_1d(r, 0), similarity_1d(r, one - r)))
    ifs, weights = base, [one / 2, one / 2]
    for _ in range(m - 1):
        ifs = product_ifs(ifs, base)
        weights = [w * v for w in weights for v in (one / 2, one / 2)]
    return SelfSimilarMeasure(WeightedIFS(ifs, tuple(weights)))


@dataclass
class Certificate:
    eps: float
    beta: float
    dim: int
    scale: float                    # 8 sqrt(m) diam(K) / eps
    template_diameter: float
    quantization_dl: float          # d_L(mu, nu); exact when mu is atomic
    quantization_exact: bool
    transport_dl: float             # d_L(nu, result) up to discretization
    transport_dl_bound: float       # transport_dl plus discretization error
    support_radius: float           # max |coordinate| over the shrunken template
    support_limit: float            # eps / (4 sqrt m)
    support_ok: bool
    total_dl_bound: float
    q: float
    k: int
    tau_result: float               # secant slope over the last four levels
    tau_template: float
    tau_gap: float
    tau_result_lstsq: float         # least-squares slope over the upper half
    tau_template_lstsq: float
    notes: list = field(default_factory=list)

    def to_json(self):
        return json.dumps(asdict(self), indent=2)


@dataclass
class ApproximateMeasure:
    measure: object
    quantized: object
    template: object
    shrunk_template: object
    certificate: Certificate


def approximate_measure(mu, eps, beta, q=2, k=14, resolution=None, budget=None):
    """Convolve a quantization of ``mu`` with a shrunken template of dimension ``beta``."""
    if not eps > 0:
        raise DomainError("eps must be positive")
    m = mu.dim
    if not (0 < beta <= m):
        raise DomainError(f"beta must lie in (0, {m}]")
    eps = snap_rational(eps)
    nu, q_bound = quantize(mu, eps, budget, return_bound=True)
    exact_q = isinstance(mu, DiscreteMeasure)
    q_dl = dl_distance(mu, nu, budget) if exact_q and m == 1 else q_bound
    lam = template_measure(beta, m)
    diam = lam.hull.diameter()
    root = math.isqrt(m) if math.isqrt(m) ** 2 == m else math.sqrt(m)
    L = 8 * root * diam / eps
    lam1 = scale_measure(lam, L)
    result = convolve_with_discrete(lam1, nu)

    radius = float(lam1.hull.max_norm()) if m == 1 else float(np.max(np.abs(lam1.hull.array())))
    limit = float(eps) / (4 * math.sqrt(m))
    res = resolution if resolution is not None else float(eps) / 256
    notes = []
    if m == 1:
        disc, disc_err = discretize(result, res, budget)
        t_dl = float(dl_distance(nu, disc, budget))
        t_bound = t_dl + disc_err
    else:
        # every atom moves by at most the template's largest norm
        t_dl = float(np.max(np.linalg.norm(lam1.hull.array().astype(float), axis=1)))
        t_bound = t_dl
        notes.append("transport bound from the template support")
    est_r = lq_dimension_estimate(result, q, k, budget=budget)
    est_t = lq_dimension_estimate(lam, q, k, budget=budget)
    cert = Certificate(
        eps=float(eps), beta=float(beta), dim=m, scale=float(L), template_diameter=float(diam),
        quantization_dl=float(q_dl), quantization_exact=exact_q and m == 1,
        transport_dl=t_dl, transport_dl_bound=t_bound,
        support_radius=radius, support_limit=limit, support_ok=radius <= limit,
        total_dl_bound=float(q_dl) + t_bound,
        q=q, k=k, tau_result=est_r.secant, tau_template=est_t.secant,
        tau_gap=abs(est_r.secant - est_t.secant),
        tau_result_lstsq=est_r.extrapolated, tau_template_lstsq=est_t.extrapolated, notes=notes)
    return ApproximateMeasure(result, nu, lam, lam1, cert)


def approximate_set(E, eps):
    """Greedy eps-net of a finite cloud.

    Points are scanned in order; a point becomes a centre unless an
    existing centre lies strictly within ``eps``.  Every input point then
    lies within ``eps`` of the net.
    """
    if not eps > 0:
        raise DomainError("eps must be positive")
    P = E.points if isinstance(E, PointCloud) else np.atleast_2d(np.asarray(E, dtype=float))
    grid = {}
    centres = []
    for x in P:
        cell = tuple(np.floor(x / eps).astype(np.int64))
        covered = False
        for off in np.ndindex(*(3,) * len(cell)):
            for c in grid.get(tuple(ci + o - 1 for ci, o in zip(cell, off)), ()):
                if np.linalg.norm(x - centres[c]) < eps:
                    covered = True
                    break
            if covered:
                break
        if not covered:
            grid.setdefault(cell, []).append(len(centres))
            centres.append(x)
    resolution = getattr(E, "resolution", 0.0) + eps
    return PointCloud(np.array(centres), resolution)
