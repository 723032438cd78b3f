"""Command-line entry point.

Subcommands: ``separation``, ``lq``, ``approx-set``, ``approx-measure``,
``fourier``, ``verify`` and ``corpus``.  Exit codes: 0 success, 2 invalid
input or parameters, 3 budget exhausted (partial results are still
written).
"""

import argparse
import csv
from dataclasses import asdict, dataclass, field
from fractions import Fraction
import io
import json
import math
import sys

import numpy as np

from . import corpus
from .approximation import approximate_measure, approximate_set
from .config import default_budget
from .errors import BudgetError, IFSLabError
from .fourier import decay_probe, default_grid, geometric_grid, resonant_grid
from .geometry import PointCloud, hausdorff_distance
from .ifs import IFS, WeightedIFS, attractor_points
from .measures import SelfSimilarMeasure, lq_dimension_estimate
from .serialization import SchemaError, ifs_from_dict, measure_from_dict, report_to_dict
from .separation import dimension_verdict, esc_diagnostic

EXIT_OK, EXIT_INVALID, EXIT_BUDGET = 0, 2, 3


class InvalidInput(Exception):
    """Bad parameter or unreadable input; mapped to exit code 2."""


@dataclass
class RunConfig:
    command: str
    builtin: str = None
    input: str = None
    format: str = "text"
    output: str = None
    threads: int = 1
    seed: int = 0
    params: dict = field(default_factory=dict)
    budget: dict = field(default_factory=dict)

    def validate(self):
        p = self.params
        if "q" in p and not p["q"] > 1:
            raise InvalidInput("q: must exceed 1")
        if "eps" in p and not p["eps"] > 0:
            raise InvalidInput("eps: must be positive")
        for key in ("n_max", "k_max", "depth", "k"):
            if key in p and p[key] is not None and p[key] < 1:
                raise InvalidInput(f"{key}: must be >= 1")
        if self.threads < 1:
            raise InvalidInput("threads: must be >= 1")
        if self.format not in ("json", "csv", "text"):
            raise InvalidInput(f"format: unknown format {self.format!r}")

    def header(self):
        return "# config: " + json.dumps(asdict(self), sort_keys=True, default=str)


# ------------------------------------------------------------------ input


def _load_document(cfg):
    if cfg.builtin is not None and cfg.input is not None:
        raise InvalidInput("builtin: give either --builtin or --input, not both")
    if cfg.builtin is not None:
        try:
            return corpus.builtin(cfg.builtin)
        except KeyError as exc:
            raise InvalidInput(f"builtin: {exc.args[0]}") from None
    if cfg.input is None:
        raise InvalidInput("input: one of --builtin or --input is required")
    try:
        with open(cfg.input) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise InvalidInput(f"input: cannot read {cfg.input}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"input: invalid JSON ({exc.msg} at line {exc.lineno})") from None
    if isinstance(doc, dict) and "points" in doc:
        try:
            return PointCloud(np.atleast_2d(np.asarray(doc["points"], dtype=float)))
        except (ValueError, TypeError) as exc:
            raise InvalidInput(f"points: {exc}") from None
    if isinstance(doc, dict) and "type" in doc:
        return measure_from_dict(doc)
    ifs, weights = ifs_from_dict(doc)
    return ifs if weights is None else SelfSimilarMeasure(WeightedIFS(ifs, weights))


def _as_ifs(obj):
    if isinstance(obj, IFS):
        return obj
    if isinstance(obj, SelfSimilarMeasure):
        return obj.wifs.ifs
    raise InvalidInput("input: this command needs an IFS")


def _as_measure(obj):
    if isinstance(obj, IFS):
        return SelfSimilarMeasure(WeightedIFS.uniform(obj))
    if isinstance(obj, PointCloud):
        raise InvalidInput("input: this command needs a measure, got a point cloud")
    return obj


# ----------------------------------------------------------------- output


def _num(v):
    if isinstance(v, Fraction):
        return str(v) if v.denominator != 1 else str(v.numerator)
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def _word(w):
    return "".join(str(s) for s in w) if all(s < 10 for s in w) else ".".join(map(str, w))


def _csv_text(cfg, columns, rows):
    buf = io.StringIO()
    buf.write(cfg.header() + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in rows:
        writer.writerow(r)
    return buf.getvalue()


def _emit(cfg, text):
    if cfg.output is None:
        sys.stdout.write(text)
        return
    try:
        with open(cfg.output, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise InvalidInput(f"output: cannot write {cfg.output}: {exc.strerror}") from None


def _json_text(doc):
    return json.dumps(doc, indent=2, default=str) + "\n"


# ----------------------------------------------------------------- commands


def _budget(cfg):
    return default_budget().with_overrides(**cfg.budget)


def _separation_output(cfg, report, verdict=None, budget_note=None):
    if cfg.format == "csv":
        rows = [(n, _num(d), _num(s), _word(wi), _word(wj)) for n, d, s, wi, wj, _, _ in report.rows()]
        return _csv_text(cfg, ["n", "delta_n", "delta_star_n", "witness_i", "witness_j"], rows)
    doc = report_to_dict(report)
    if verdict is not None:
        doc["dimension"] = asdict(verdict)
    if budget_note:
        doc["budget_exhausted"] = budget_note
    if cfg.format == "json":
        return _json_text(doc)
    lines = [f"{'n':>3}  {'delta_n':>24}  {'delta_star_n':>24}  witness"]
    for n, d, s, wi, wj, _, _ in report.rows():
        lines.append(f"{n:>3}  {_num(d):>24}  {_num(s):>24}  {_word(wi)} / {_word(wj)}")
    lines.append(f"classification: {report.classification} (heuristic)")
    lines.append(f"min Delta_n^(1/n): {report.delta_hat:.6g}")
    if verdict is not None:
        lines.append(f"dimension: {verdict.value:.6g} [{verdict.basis}]")
    if budget_note:
        lines.append(f"budget exhausted: {budget_note}")
    return "\n".join(lines) + "\n"


def cmd_separation(cfg):
    ifs = _as_ifs(_load_document(cfg))
    budget = _budget(cfg)
    p = cfg.params
    try:
        report = esc_diagnostic(ifs, p["n_max"], budget=budget, zero_tol=p["zero_tol"],
                                slope_threshold=p["slope_threshold"], with_star=not p["no_star"])
    except BudgetError as exc:
        if exc.partial is not None and exc.partial.n_values:
            _emit(cfg, _separation_output(cfg, exc.partial, budget_note=str(exc)))
        raise
    verdict = None
    if p["verdict"] and ifs.dim == 1:
        verdict = dimension_verdict(ifs, report, budget=budget)
    elif p["verdict"]:
        report.note = (report.note + "; " if report.note else "") + "dimension verdicts need m = 1"
    _emit(cfg, _separation_output(cfg, report, verdict))
    return EXIT_OK


def cmd_lq(cfg):
    mu = _as_measure(_load_document(cfg))
    p = cfg.params
    est = lq_dimension_estimate(mu, p["q"], p["k_max"], mode=p["mode"], count=p["count"],
                                seed=cfg.seed, budget=_budget(cfg))
    if cfg.format == "csv":
        rows = [(k, repr(v * (est.q - 1)), repr(v)) for k, v in est.sequence]
        _emit(cfg, _csv_text(cfg, ["k", "tau_k", "dim_k"], rows))
    elif cfg.format == "json":
        _emit(cfg, _json_text({"q": est.q, "sequence": est.sequence, "dimension": est.extrapolated,
                               "secant": est.secant, "note": est.error_note, "mode": est.mode,
                               "error": est.error}))
    else:
        lines = [f"{'k':>3}  {'tau_k/(q-1)':>20}"] + [f"{k:>3}  {v:>20.12g}" for k, v in est.sequence]
        lines.append(f"dimension estimate: {est.extrapolated:.10g} ({est.error_note})")
        _emit(cfg, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_approx_set(cfg):
    obj = _load_document(cfg)
    p = cfg.params
    if isinstance(obj, PointCloud):
        E = obj
    else:
        E = attractor_points(_as_ifs(obj), p["depth"], budget=_budget(cfg))
    net = approximate_set(E, p["eps"])
    H = hausdorff_distance(E, net)
    if cfg.format == "csv":
        cols = [f"x{j}" for j in range(net.points.shape[1])]
        _emit(cfg, _csv_text(cfg, cols, [[repr(float(v)) for v in row] for row in net.points]))
    elif cfg.format == "json":
        _emit(cfg, _json_text({"eps": p["eps"], "input_points": len(E), "net_points": len(net),
                               "hausdorff": H, "points": net.points.tolist()}))
    else:
        _emit(cfg, f"input points: {len(E)}\nnet points: {len(net)}\n"
                   f"hausdorff distance: {H:.6g} (eps = {p['eps']})\n")
    return EXIT_OK


def cmd_approx_measure(cfg):
    mu = _as_measure(_load_document(cfg))
    p = cfg.params
    if not (0 < p["beta"] <= mu.dim):
        raise InvalidInput(f"beta: must lie in (0, {mu.dim}]")
    res = approximate_measure(mu, p["eps"], p["beta"], q=p["q"], k=p["k"], budget=_budget(cfg))
    cert = asdict(res.certificate)
    if cfg.format == "csv":
        _emit(cfg, _csv_text(cfg, ["field", "value"], [(k, v) for k, v in cert.items()]))
    elif cfg.format == "json":
        _emit(cfg, _json_text({"certificate": cert, "atoms": len(res.quantized)}))
    else:
        _emit(cfg, "\n".join(f"{k}: {v}" for k, v in cert.items()) + "\n")
    return EXIT_OK


def cmd_fourier(cfg):
    mu = _as_measure(_load_document(cfg))
    p = cfg.params
    if mu.dim != 1:
        raise InvalidInput("input: fourier decay probes need a measure on the line")
    grid = {"geometric": lambda: geometric_grid(p["max_abs"], p["per_octave"]),
            "resonant": lambda: resonant_grid(mu, p["max_abs"]),
            "default": lambda: default_grid(mu, p["max_abs"], p["per_octave"])}[p["grid"]]()
    if not grid:
        raise InvalidInput("grid: empty for this measure")
    rep = decay_probe(mu, grid, threshold=p["threshold"])
    if cfg.format == "csv":
        _emit(cfg, _csv_text(cfg, ["xi_abs", "magnitude"], [(repr(f), repr(m)) for f, m in rep.rows()]))
    elif cfg.format == "json":
        _emit(cfg, _json_text({"verdict": rep.verdict, "fitted_exponent": rep.fitted_exponent,
                               "details": rep.details,
                               "samples": [{"xi_abs": f, "magnitude": m} for f, m in rep.rows()]}))
    else:
        exp = "n/a" if rep.fitted_exponent is None else f"{rep.fitted_exponent:.4f}"
        _emit(cfg, f"verdict: {rep.verdict}\nfitted exponent: {exp}\n"
                   f"tail max: {rep.details['tail_max']:.6g}\n")
    return EXIT_OK


def cmd_verify(cfg):
    from .verify import run_suite
    results = run_suite(cfg.params.get("only"))
    if cfg.format == "json":
        _emit(cfg, _json_text([asdict(r) for r in results]))
    elif cfg.format == "csv":
        _emit(cfg, _csv_text(cfg, ["criterion", "name", "passed", "seconds", "detail"],
                             [(r.number, r.name, r.passed, f"{r.seconds:.2f}", r.detail) for r in results]))
    else:
        passed = sum(r.passed for r in results)
        _emit(cfg, "\n".join(r.line() for r in results) + f"\n{passed}/{len(results)} passed\n")
    return EXIT_OK if all(r.passed for r in results) else 1


def cmd_corpus(cfg):
    from .serialization import ifs_to_dict, measure_to_dict
    if cfg.builtin is None:
        _emit(cfg, "\n".join(corpus.builtin_names()) + "\n")
        return EXIT_OK
    obj = _load_document(cfg)
    doc = ifs_to_dict(obj) if isinstance(obj, IFS) else measure_to_dict(obj)
    _emit(cfg, _json_text(doc))
    return EXIT_OK


COMMANDS = {
    "separation": cmd_separation,
    "lq": cmd_lq,
    "approx-set": cmd_approx_set,
    "approx-measure": cmd_approx_measure,
    "fourier": cmd_fourier,
    "verify": cmd_verify,
    "corpus": cmd_corpus,
}


# ------------------------------------------------------------------ parser


def _common(p):
    p.add_argument("--builtin", help="name of a built-in system or measure")
    p.add_argument("--input", help="JSON file with an IFS, measure or point cloud")
    p.add_argument("--format", default="text", choices=("json", "csv", "text"))
    p.add_argument("--output", help="write results here instead of stdout")
    p.add_argument("--threads", type=int, default=1, help="worker cap (results do not depend on it)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-pairs", type=float)
    p.add_argument("--max-points", type=float)
    p.add_argument("--max-cells", type=float)
    p.add_argument("--max-atoms", type=float)


def build_parser():
    parser = argparse.ArgumentParser(prog="ifslab", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("separation", help="Delta_n and Delta*_n sequences")
    _common(p)
    p.add_argument("--n-max", type=int, default=8)
    p.add_argument("--no-star", action="store_true", help="skip the hull-based sequence")
    p.add_argument("--zero-tol", type=float, default=1e-12)
    p.add_argument("--slope-threshold", type=float, default=1.0)
    p.add_argument("--verdict", action="store_true", help="add a dimension verdict")

    p = sub.add_parser("lq", help="finite-level L^q dimension estimates")
    _common(p)
    p.add_argument("--q", type=float, default=2.0)
    p.add_argument("--k-max", type=int, default=14)
    p.add_argument("--mode", default="auto", choices=("auto", "exact", "cylinder", "montecarlo"))
    p.add_argument("--count", type=int, default=10**6, help="Monte Carlo sample count")

    p = sub.add_parser("approx-set", help="eps-net of a point cloud or attractor")
    _common(p)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--depth", type=int, default=8, help="attractor depth for IFS input")

    p = sub.add_parser("approx-measure", help="dimension-preserving measure approximation")
    _common(p)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--q", type=float, default=2.0)
    p.add_argument("--k", type=int, default=14)

    p = sub.add_parser("fourier", help="Fourier magnitude samples and decay verdict")
    _common(p)
    p.add_argument("--max-abs", type=float, default=1e3)
    p.add_argument("--per-octave", type=int, default=4)
    p.add_argument("--grid", default="default", choices=("default", "geometric", "resonant"))
    p.add_argument("--threshold", type=float, default=0.05)

    p = sub.add_parser("verify", help="run the acceptance checks")
    _common(p)
    p.add_argument("--suite", default="paper", choices=("paper",))
    p.add_argument("--only", type=int, nargs="+", help="criterion numbers to run")

    p = sub.add_parser("corpus", help="list built-ins or dump one as JSON")
    _common(p)
    return parser


_SHARED = {"builtin", "input", "format", "output", "threads", "seed", "command",
           "max_pairs", "max_points", "max_cells", "max_atoms"}


def config_from_args(args):
    ns = vars(args)
    budget = {k: int(ns[k]) for k in ("max_pairs", "max_points", "max_cells", "max_atoms")
              if ns.get(k) is not None}
    params = {k: v for k, v in ns.items() if k not in _SHARED}
    for k, v in params.items():
        if isinstance(v, float) and not math.isfinite(v):
            raise InvalidInput(f"{k}: must be finite")
    return RunConfig(command=args.command, builtin=args.builtin, input=args.input,
                     format=args.format, output=args.output, threads=args.threads,
                     seed=args.seed, params=params, budget=budget)


def run(cfg):
    cfg.validate()
    return COMMANDS[cfg.command](cfg)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        return run(cfg)
    except (InvalidInput, SchemaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except BudgetError as exc:
        extra = "" if exc.largest_feasible is None else f" (largest feasible: {exc.largest_feasible})"
        print(f"budget exhausted: {exc}{extra}", file=sys.stderr)
        return EXIT_BUDGET
    except IFSLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
