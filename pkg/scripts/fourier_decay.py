"""Fourier magnitudes of Lebesgue, Cantor and atomic measures on geometric and resonant grids.

    python3 scripts/fourier_decay.py --max-abs 1e4 --out results/fourier
"""

import argparse
import csv
from fractions import Fraction
from pathlib import Path

from ifslab import corpus
from ifslab.fourier import decay_probe, geometric_grid, resonant_grid
from ifslab.measures import DiscreteMeasure


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-abs", type=float, default=1e4)
    ap.add_argument("--out", default="results/fourier")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    atoms = DiscreteMeasure([0, Fraction(1, 3), Fraction(1, 2)], [Fraction(1, 3)] * 3)
    cases = {
        "lebesgue-geometric": (corpus.lebesgue(), geometric_grid(args.max_abs)),
        "cantor-geometric": (corpus.cantor_measure(), geometric_grid(args.max_abs)),
        "cantor-resonant": (corpus.cantor_measure(), resonant_grid(corpus.cantor_measure(), args.max_abs)),
        "atoms-integer": (atoms, [6 * j for j in range(1, 200) if 6 * j <= args.max_abs]),
    }
    for name, (mu, grid) in cases.items():
        rep = decay_probe(mu, grid)
        with open(out / f"{name}.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["xi_abs", "magnitude"])
            w.writerows(rep.rows())
        exp = "n/a" if rep.fitted_exponent is None else f"{rep.fitted_exponent:.3f}"
        print(f"{name:20s} {rep.verdict:16s} exponent {exp}")


if __name__ == "__main__":
    main()
