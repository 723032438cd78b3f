"""Finite-level L^q dimension estimates over a range of q.

Prints tau(q)/(q-1) for the Cantor measure, a biased Bernoulli measure
and Lebesgue measure, next to the closed forms for the first two.

    python3 scripts/lq_spectra.py --k-max 14
"""

import argparse
from fractions import Fraction
import math

from ifslab import corpus
from ifslab.ifs import IFS, WeightedIFS, similarity_1d
from ifslab.measures import SelfSimilarMeasure, lq_dimension_estimate


def bernoulli(p):
    ifs = IFS((similarity_1d(Fraction(1, 2), 0), similarity_1d(Fraction(1, 2), Fraction(1, 2))))
    return SelfSimilarMeasure(WeightedIFS(ifs, (p, 1 - p)))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--k-max", type=int, default=14)
    ap.add_argument("--p", type=Fraction, default=Fraction(1, 3))
    args = ap.parse_args()
    p = float(args.p)
    measures = {"cantor": corpus.cantor_measure(), "bernoulli": bernoulli(args.p),
                "lebesgue": corpus.lebesgue()}
    print(f"{'q':>5} {'cantor':>10} {'(exact)':>10} {'bernoulli':>10} {'(exact)':>10} {'lebesgue':>10}")
    for q in (1.5, 2.0, 3.0, 4.0, 6.0):
        est = {k: lq_dimension_estimate(mu, q, args.k_max).secant for k, mu in measures.items()}
        bern = -math.log2(p ** q + (1 - p) ** q) / (q - 1)
        print(f"{q:5.1f} {est['cantor']:10.5f} {math.log(2) / math.log(3):10.5f} "
              f"{est['bernoulli']:10.5f} {bern:10.5f} {est['lebesgue']:10.5f}")


if __name__ == "__main__":
    main()
