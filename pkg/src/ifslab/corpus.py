"""Built-in systems and measures.

Rational systems are exact.  The Garsia-type system ``x/g + 1, x/g - 1``
uses the real root ``g`` of ``x^3 - x^2 - 2`` (a Pisot number), recorded
to 50 decimals together with its polynomial.
"""

from decimal import Decimal
from fractions import Fraction as Fr
import math

import numpy as np

from .ifs import IFS, Similarity, WeightedIFS, product_ifs, similarity_1d
from .measures import DiscreteMeasure, SelfSimilarMeasure

GARSIA_POLYNOMIAL = (1, -1, 0, -2)          # x^3 - x^2 - 2, highest degree first
GARSIA_ROOT = "1.69562076955986205741636710011753534261817938820850"


def garsia_root(digits=50):
    return Decimal(GARSIA_ROOT[:digits + 2])


def cantor():
    return IFS((similarity_1d(Fr(1, 3), 0), similarity_1d(Fr(1, 3), Fr(2, 3))))


def sierpinski():
    h = math.sqrt(3) / 2
    I = np.eye(2)
    return IFS((Similarity(0.5, I, (0.0, 0.0)), Similarity(0.5, I, (0.5, 0.0)),
                Similarity(0.5, I, (0.25, h / 2))))


def garsia():
    r = 1.0 / float(garsia_root())
    return IFS((similarity_1d(r, 1.0), similarity_1d(r, -1.0)))


def overlap_remark():
    """``x/4, x/4 + 9/16, x/4 + 3/4``: the last two first-level images overlap."""
    return IFS((similarity_1d(Fr(1, 4), 0), similarity_1d(Fr(1, 4), Fr(9, 16)),
                similarity_1d(Fr(1, 4), Fr(3, 4))))


def exact_overlap():
    """``x/2, x/2 + 1/2, x/2 + 1``: words 13 and 21 give the same map."""
    return IFS((similarity_1d(Fr(1, 2), 0), similarity_1d(Fr(1, 2), Fr(1, 2)),
                similarity_1d(Fr(1, 2), 1)))


def cantor_product():
    return product_ifs(cantor(), cantor())


def lebesgue():
    """Uniform measure on [0, 1] as the invariant measure of ``x/2, x/2 + 1/2``."""
    ifs = IFS((similarity_1d(Fr(1, 2), 0), similarity_1d(Fr(1, 2), Fr(1, 2))))
    return SelfSimilarMeasure(WeightedIFS.uniform(ifs))


def cantor_measure():
    return SelfSimilarMeasure(WeightedIFS.uniform(cantor()))


def dirac(x=0):
    return DiscreteMeasure.dirac(x)


SYSTEMS = {
    "cantor": cantor,
    "sierpinski": sierpinski,
    "garsia": garsia,
    "overlap-remark": overlap_remark,
    "exact-overlap": exact_overlap,
    "cantor-product": cantor_product,
}

MEASURES = {
    "lebesgue": lebesgue,
    "cantor-measure": cantor_measure,
    "dirac": dirac,
}


def builtin_names():
    return sorted(SYSTEMS) + sorted(MEASURES)


def builtin(name):
    """The named system (an :class:`IFS`) or measure."""
    if name in SYSTEMS:
        return SYSTEMS[name]()
    if name in MEASURES:
        return MEASURES[name]()
    raise KeyError(f"unknown builtin {name!r}; available: {', '.join(builtin_names())}")


def builtin_corpus():
    return {name: builtin(name) for name in builtin_names()}
