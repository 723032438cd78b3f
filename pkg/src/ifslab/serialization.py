"""JSON encodings of systems, measures and reports.

IFS documents look like::

    {"dim": 1, "arithmetic": "exact",
     "maps": [{"ratio": "1/3", "orthogonal": [[1]], "translation": ["2/3"]}, ...],
     "weights": ["1/2", "1/2"]}

Rationals are ``"p/q"`` strings in exact mode and plain numbers otherwise.
A negative ``ratio`` is accepted and folded into the orthogonal part.
Measure documents carry ``"type"``: ``discrete``, ``selfsimilar`` or
``mixture``.
"""

from fractions import Fraction
import json

import numpy as np

from .errors import DomainError
from .geometry import is_exact
from .ifs import IFS, WeightedIFS, canonicalize
from .measures import DiscreteMeasure, MixtureMeasure, SelfSimilarMeasure


class SchemaError(DomainError):
    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


def _enc(x, exact):
    if exact:
        return str(Fraction(x))
    return float(x)


def _dec(v, exact, field):
    try:
        if exact:
            if isinstance(v, float):
                raise SchemaError(field, "floats are not allowed in exact mode")
            return Fraction(v)
        return float(Fraction(v)) if isinstance(v, str) else float(v)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise SchemaError(field, f"cannot parse {v!r} ({exc})") from None


def ifs_to_dict(ifs, weights=None):
    exact = ifs.exact and (weights is None or all(is_exact(w) for w in weights))
    doc = {"dim": ifs.dim, "arithmetic": "exact" if exact else "float", "maps": []}
    for h in ifs.maps:
        doc["maps"].append({
            "ratio": _enc(h.ratio, exact),
            "orthogonal": [[_enc(v, exact) for v in row] for row in h.orthogonal],
            "translation": [_enc(v, exact) for v in h.translation],
        })
    if weights is not None:
        doc["weights"] = [_enc(w, exact) for w in weights]
    return doc


def ifs_from_dict(doc):
    """Parse an IFS document; returns ``(ifs, weights or None)``."""
    if not isinstance(doc, dict):
        raise SchemaError("<root>", "expected an object")
    arithmetic = doc.get("arithmetic", "float")
    if arithmetic not in ("exact", "float"):
        raise SchemaError("arithmetic", f"must be 'exact' or 'float', got {arithmetic!r}")
    exact = arithmetic == "exact"
    maps = doc.get("maps")
    if not isinstance(maps, list) or not maps:
        raise SchemaError("maps", "must be a nonempty list")
    dim = doc.get("dim")
    out = []
    for k, spec in enumerate(maps):
        where = f"maps[{k}]"
        if not isinstance(spec, dict):
            raise SchemaError(where, "expected an object")
        for key in ("ratio", "translation"):
            if key not in spec:
                raise SchemaError(f"{where}.{key}", "missing")
        a = [_dec(v, exact, f"{where}.translation") for v in np.atleast_1d(spec["translation"]).tolist()]
        m = len(a)
        if dim is not None and m != dim:
            raise SchemaError(f"{where}.translation", f"has {m} entries, dim is {dim}")
        O = spec.get("orthogonal", np.eye(m, dtype=int).tolist())
        try:
            O = [[_dec(v, exact, f"{where}.orthogonal") for v in row] for row in O]
        except TypeError:
            raise SchemaError(f"{where}.orthogonal", "must be a square matrix") from None
        r = _dec(spec["ratio"], exact, f"{where}.ratio")
        try:
            out.append(canonicalize(r, O, a))
        except (DomainError, ValueError) as exc:
            raise SchemaError(where, str(exc)) from None
    try:
        ifs = IFS(tuple(out))
    except (DomainError, ValueError) as exc:
        raise SchemaError("maps", str(exc)) from None
    weights = None
    if "weights" in doc and doc["weights"] is not None:
        weights = tuple(_dec(v, exact, "weights") for v in doc["weights"])
        if len(weights) != ifs.N:
            raise SchemaError("weights", f"expected {ifs.N} entries")
    return ifs, weights


def measure_to_dict(mu):
    if isinstance(mu, DiscreteMeasure):
        exact = mu.exact
        return {"type": "discrete", "arithmetic": "exact" if exact else "float",
                "atoms": [{"position": [_enc(v, exact) for v in p], "weight": _enc(w, exact)}
                          for p, w in zip(mu.positions, mu.weights)]}
    if isinstance(mu, SelfSimilarMeasure):
        return {"type": "selfsimilar", "ifs": ifs_to_dict(mu.wifs.ifs, mu.wifs.weights)}
    if isinstance(mu, MixtureMeasure):
        exact = all(is_exact(w) for _, w in mu.components)
        return {"type": "mixture",
                "components": [{"weight": _enc(w, exact), "measure": measure_to_dict(c)}
                               for c, w in mu.components]}
    raise TypeError(f"unsupported measure type {type(mu).__name__}")


def measure_from_dict(doc, where="<root>"):
    if not isinstance(doc, dict):
        raise SchemaError(where, "expected an object")
    kind = doc.get("type")
    if kind is None and "maps" in doc:
        kind = "selfsimilar"
        doc = {"type": kind, "ifs": doc}
    if kind == "discrete":
        exact = doc.get("arithmetic", "float") == "exact"
        atoms = doc.get("atoms")
        if not isinstance(atoms, list) or not atoms:
            raise SchemaError(f"{where}.atoms", "must be a nonempty list")
        pos = [[_dec(v, exact, f"{where}.atoms[{k}].position") for v in np.atleast_1d(a["position"]).tolist()]
               for k, a in enumerate(atoms)]
        w = [_dec(a["weight"], exact, f"{where}.atoms[{k}].weight") for k, a in enumerate(atoms)]
        try:
            return DiscreteMeasure(pos, w)
        except (DomainError, ValueError) as exc:
            raise SchemaError(f"{where}.atoms", str(exc)) from None
    if kind == "selfsimilar":
        ifs, weights = ifs_from_dict(doc.get("ifs"))
        try:
            wifs = WeightedIFS(ifs, weights) if weights is not None else WeightedIFS.uniform(ifs)
        except (DomainError, ValueError) as exc:
            raise SchemaError(f"{where}.ifs.weights", str(exc)) from None
        return SelfSimilarMeasure(wifs)
    if kind == "mixture":
        comps = doc.get("components")
        if not isinstance(comps, list) or not comps:
            raise SchemaError(f"{where}.components", "must be a nonempty list")
        parts = []
        for k, c in enumerate(comps):
            w = c.get("weight")
            exact = isinstance(w, (str, int))
            parts.append((measure_from_dict(c.get("measure"), f"{where}.components[{k}].measure"),
                          _dec(w, exact, f"{where}.components[{k}].weight")))
        return MixtureMeasure(tuple(parts))
    raise SchemaError(f"{where}.type", f"unknown measure type {kind!r}")


def dumps(doc):
    return json.dumps(doc, indent=2)


def report_to_dict(report):
    """JSON-ready form of a :class:`~ifslab.separation.SeparationReport`."""
    def num(v):
        return str(v) if isinstance(v, Fraction) else float(v)
    return {
        "n_values": list(report.n_values),
        "delta_n": [num(v) for v in report.delta_n],
        "delta_n_float": [float(v) for v in report.delta_n],
        "delta_star_n": [num(v) for v in report.delta_star_n],
        "delta_star_n_float": [float(v) for v in report.delta_star_n],
        "delta_star_error": list(report.delta_star_error),
        "witnesses": [{"delta": [list(a), list(b)], "delta_star": [list(c), list(d)]}
                      for (a, b), (c, d) in report.witnesses],
        "delta_hat": report.delta_hat,
        "classification": report.classification,
        "heuristic": report.heuristic,
        "k_star": report.k_star,
        "arithmetic": report.arithmetic,
        "zero_equivalent": report.zero_equivalent,
        "note": report.note,
    }
