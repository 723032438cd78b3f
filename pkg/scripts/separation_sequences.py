"""Delta_n and Delta*_n for the built-in one- and two-dimensional systems.

Writes one CSV per system and prints the classification and delta_hat.

    python3 scripts/separation_sequences.py --out results/separation
"""

import argparse
import csv
from pathlib import Path

from ifslab import corpus
from ifslab.config import Budget
from ifslab.errors import BudgetError
from ifslab.separation import esc_diagnostic

SYSTEMS = {"cantor": 10, "garsia": 12, "overlap-remark": 6, "exact-overlap": 6,
           "sierpinski": 6, "cantor-product": 5}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results/separation")
    ap.add_argument("--max-pairs", type=int, default=2 * 10**8)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, n_max in SYSTEMS.items():
        try:
            rep = esc_diagnostic(corpus.builtin(name), n_max, budget=Budget(max_pairs=args.max_pairs))
        except BudgetError as exc:
            rep = exc.partial
            print(f"{name}: budget exhausted after n = {rep.n_values[-1]}")
        with open(out / f"{name}.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["n", "delta_n", "delta_star_n"])
            for n, d, s in zip(rep.n_values, rep.delta_n, rep.delta_star_n):
                w.writerow([n, float(d), float(s)])
        print(f"{name:15s} {rep.classification:22s} delta_hat = {rep.delta_hat:.4f}")


if __name__ == "__main__":
    main()
