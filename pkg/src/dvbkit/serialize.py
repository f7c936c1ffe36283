"""JSON instance files: schema, encoding and decoding for every instance kind.

A file looks like {"format": 1, "kind": <kind>, "payload": {...}}. Polynomials
are lists of [exponent-vector, numerator, denominator] terms, sorted by
exponent vector; matrices are {"rows", "cols", "entries"} with entries in
row-major order.
"""

import json
from fractions import Fraction

import jsonschema

from .bundles import LieAlgebroidModel
from .dvb import DVBAtlas, Transition
from .functors import TwoManChart
from .metricdvb import InvolutiveDVB, MetricDVB
from .poisson2 import PoissonStructure2
from .polycore import Poly, PolyMatrix
from .tworep import TwoRep
from .worked import DorfmanConnection

FORMAT_VERSION = 1
KINDS = ("lie-algebroid", "tworep", "metric-dvb", "involutive-dvb", "two-man-atlas", "dorfman", "poisson2")


class InstanceError(Exception):
    """Malformed instance file (parse error or schema violation)."""


# ------------------------------------------------------------ schema

_POLY = {"type": "array", "items": {
    "type": "array", "prefixItems": [
        {"type": "array", "items": {"type": "integer", "minimum": 0}},
        {"type": "integer"},
        {"type": "integer", "minimum": 1}],
    "minItems": 3, "maxItems": 3}}
_MATRIX = {"type": "object", "required": ["rows", "cols", "entries"], "additionalProperties": False,
           "properties": {"rows": {"type": "integer", "minimum": 0},
                          "cols": {"type": "integer", "minimum": 0},
                          "entries": {"type": "array", "items": {"$ref": "#/$defs/poly"}}}}
_MATS = {"type": "array", "items": {"$ref": "#/$defs/matrix"}}
_NAT = {"type": "integer", "minimum": 0}
_REGIONS = {"type": "array", "items": {"type": "array", "items": {
    "type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 2}}}
_ALGEBROID = {"type": "object", "required": ["n", "anchor", "structure"], "additionalProperties": False,
              "properties": {"n": _NAT, "anchor": {"$ref": "#/$defs/matrix"},
                             "structure": {"type": "array", "items": {"type": "array", "items": {
                                 "type": "array", "items": {"$ref": "#/$defs/poly"}}}}}}
_TWOREP = {"type": "object", "additionalProperties": False,
           "required": ["algebroid", "rank0", "rank1", "d", "m0", "m1", "curv", "identification"],
           "properties": {"algebroid": {"$ref": "#/$defs/algebroid"}, "rank0": _NAT, "rank1": _NAT,
                          "d": {"$ref": "#/$defs/matrix"}, "m0": _MATS, "m1": _MATS,
                          "curv": {"type": "array", "items": _MATS},
                          "identification": {"oneOf": [{"type": "null"}, {"$ref": "#/$defs/matrix"}]}}}
_TRANSITION = {"type": "object", "required": ["pair", "a1", "a2", "a0", "core_terms"], "additionalProperties": False,
               "properties": {"pair": {"type": "array", "items": _NAT, "minItems": 2, "maxItems": 2},
                              "a1": {"$ref": "#/$defs/matrix"}, "a2": {"$ref": "#/$defs/matrix"},
                              "a0": {"$ref": "#/$defs/matrix"}, "core_terms": _MATS}}
_COCYCLE = {"type": "object", "required": ["pair", "deg1", "deg2", "mixed"], "additionalProperties": False,
            "properties": {"pair": {"type": "array", "items": _NAT, "minItems": 2, "maxItems": 2},
                           "deg1": {"$ref": "#/$defs/matrix"}, "deg2": {"$ref": "#/$defs/matrix"},
                           "mixed": _MATS}}


def _payload_schema(kind):
    if kind == "lie-algebroid":
        return {"$ref": "#/$defs/algebroid"}
    if kind == "tworep":
        return {"$ref": "#/$defs/tworep"}
    if kind in ("metric-dvb", "involutive-dvb"):
        key = "split_form" if kind == "metric-dvb" else "kappa"
        return {"type": "object", "required": ["n", "rank_q", "rank_b", key], "additionalProperties": False,
                "properties": {"n": _NAT, "rank_q": _NAT, "rank_b": _NAT, key: _MATS}}
    if kind == "two-man-atlas":
        return {"oneOf": [
            {"type": "object", "additionalProperties": False,
             "required": ["form", "n", "rank1", "rank2", "regions", "cocycles"],
             "properties": {"form": {"const": "cocycles"}, "n": _NAT, "rank1": _NAT, "rank2": _NAT,
                            "regions": _REGIONS, "cocycles": {"type": "array", "items": _COCYCLE}}},
            {"type": "object", "additionalProperties": False,
             "required": ["form", "n", "ranks", "regions", "transitions"],
             "properties": {"form": {"enum": ["metric-atlas", "involutive-atlas"]}, "n": _NAT,
                            "ranks": {"type": "array", "items": _NAT, "minItems": 3, "maxItems": 3},
                            "regions": _REGIONS, "transitions": {"type": "array", "items": _TRANSITION}}}]}
    if kind == "dorfman":
        return {"type": "object", "required": ["n", "k", "table"], "additionalProperties": False,
                "properties": {"n": _NAT, "k": _NAT,
                               "table": {"type": "array", "items": {"type": "array", "items": {
                                   "type": "array", "items": {"$ref": "#/$defs/poly"}}}},
                               "algebroid": {"$ref": "#/$defs/algebroid"}}}
    if kind == "poisson2":
        return {"type": "object", "required": ["rep"], "additionalProperties": False,
                "properties": {"rep": {"$ref": "#/$defs/tworep"}}}
    raise InstanceError(f"unknown kind {kind!r}")


def instance_schema(kind):
    return {"$schema": "https://json-schema.org/draft/2020-12/schema",
            "type": "object", "required": ["format", "kind", "payload"], "additionalProperties": False,
            "properties": {"format": {"const": FORMAT_VERSION}, "kind": {"const": kind},
                           "payload": _payload_schema(kind)},
            "$defs": {"poly": _POLY, "matrix": _MATRIX, "algebroid": _ALGEBROID, "tworep": _TWOREP}}


def validate(doc):
    if not isinstance(doc, dict):
        raise InstanceError("schema violation at $: instance must be an object")
    kind = doc.get("kind")
    if kind not in KINDS:
        raise InstanceError(f"schema violation at $.kind: unknown kind {kind!r}")
    validator = jsonschema.Draft202012Validator(instance_schema(kind))
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(map(str, e.absolute_path)))
    if errors:
        err = errors[0]
        # descend into oneOf alternatives for a more specific location
        while err.context:
            err = max(err.context, key=lambda e: len(e.absolute_path))
        path = "$" + "".join(f"[{p}]" if isinstance(p, int) else f".{p}" for p in err.absolute_path)
        raise InstanceError(f"schema violation at {path}: {err.message}")


# ------------------------------------------------------------ encoding

def poly_to_json(p):
    return [[list(e), c.numerator, c.denominator] for e, c in sorted(p.terms.items())]


def poly_from_json(data, n):
    terms = {}
    for exps, num, den in data:
        if len(exps) != n:
            raise InstanceError(f"exponent vector {exps} does not match {n} base variables")
        terms[tuple(exps)] = terms.get(tuple(exps), 0) + Fraction(num, den)
    return Poly(n, terms)


def matrix_to_json(m):
    return {"rows": m.rows, "cols": m.cols, "entries": [poly_to_json(e) for e in m.entries]}


def matrix_from_json(data, n):
    if len(data["entries"]) != data["rows"] * data["cols"]:
        raise InstanceError("matrix entry count does not match its shape")
    return PolyMatrix(data["rows"], data["cols"], n, [poly_from_json(e, n) for e in data["entries"]])


def _mats_to(ms):
    return [matrix_to_json(m) for m in ms]


def _mats_from(data, n):
    return [matrix_from_json(m, n) for m in data]


def algebroid_to_json(alg):
    return {"n": alg.n, "anchor": matrix_to_json(alg.anchor),
            "structure": [[[poly_to_json(c) for c in coeffs] for coeffs in row] for row in alg.structure]}


def algebroid_from_json(data):
    n = data["n"]
    anchor = matrix_from_json(data["anchor"], n)
    structure = [[[poly_from_json(c, n) for c in coeffs] for coeffs in row] for row in data["structure"]]
    r = anchor.rows
    if len(structure) != r or any(len(row) != r or any(len(c) != r for c in row) for row in structure):
        raise InstanceError("structure table must be rank x rank x rank")
    return LieAlgebroidModel(n, anchor, structure)


def tworep_to_json(rep):
    return {"algebroid": algebroid_to_json(rep.algebroid), "rank0": rep.rank0, "rank1": rep.rank1,
            "d": matrix_to_json(rep.d), "m0": _mats_to(rep.m0), "m1": _mats_to(rep.m1),
            "curv": [_mats_to(row) for row in rep.curv],
            "identification": None if rep.identification is None else matrix_to_json(rep.identification)}


def tworep_from_json(data):
    alg = algebroid_from_json(data["algebroid"])
    n = alg.n
    ident = data["identification"]
    return TwoRep(alg, data["rank0"], data["rank1"], matrix_from_json(data["d"], n),
                  _mats_from(data["m0"], n), _mats_from(data["m1"], n),
                  [_mats_from(row, n) for row in data["curv"]],
                  None if ident is None else matrix_from_json(ident, n))


def _atlas_to_json(atlas, form):
    return {"form": form, "n": atlas.n, "ranks": list(atlas.ranks), "regions": _regions(atlas.regions),
            "transitions": [{"pair": list(key), "a1": matrix_to_json(t.a1), "a2": matrix_to_json(t.a2),
                             "a0": matrix_to_json(t.a0), "core_terms": _mats_to(t.core_terms)}
                            for key, t in sorted(atlas.transitions.items())]}


def _regions(regions):
    return [[[int(lo), int(hi)] for lo, hi in box] for box in regions]


def _regions_from(data):
    return [[tuple(iv) for iv in box] for box in data]


class AtlasInstance:
    """A double vector bundle atlas tagged as metric or involutive."""

    def __init__(self, atlas, form):
        self.atlas, self.form = atlas, form

    def __eq__(self, other):
        return (isinstance(other, AtlasInstance) and self.form == other.form
                and self.atlas.ranks == other.atlas.ranks and self.atlas.regions == other.atlas.regions
                and self.atlas.transitions == other.atlas.transitions)


class DorfmanInstance:
    """Dorfman connection, optionally with the Lie algebroid it lives on."""

    def __init__(self, dorfman, algebroid=None):
        self.dorfman, self.algebroid = dorfman, algebroid

    def __eq__(self, other):
        return (isinstance(other, DorfmanInstance) and self.dorfman.table == other.dorfman.table
                and to_json(self) == to_json(other))


def kind_of(obj):
    if isinstance(obj, LieAlgebroidModel):
        return "lie-algebroid"
    if isinstance(obj, TwoRep):
        return "tworep"
    if isinstance(obj, MetricDVB):
        return "metric-dvb"
    if isinstance(obj, InvolutiveDVB):
        return "involutive-dvb"
    if isinstance(obj, (TwoManChart, AtlasInstance)):
        return "two-man-atlas"
    if isinstance(obj, (DorfmanInstance, DorfmanConnection)):
        return "dorfman"
    if isinstance(obj, PoissonStructure2):
        return "poisson2"
    raise TypeError(f"no instance kind for {type(obj).__name__}")


def to_json(obj):
    kind = kind_of(obj)
    if kind == "lie-algebroid":
        payload = algebroid_to_json(obj)
    elif kind == "tworep":
        payload = tworep_to_json(obj)
    elif kind == "metric-dvb":
        payload = {"n": obj.n, "rank_q": obj.rank_q, "rank_b": obj.rank_b, "split_form": _mats_to(obj.split_form)}
    elif kind == "involutive-dvb":
        payload = {"n": obj.n, "rank_q": obj.rank_q, "rank_b": obj.rank_b, "kappa": _mats_to(obj.kappa)}
    elif kind == "two-man-atlas" and isinstance(obj, TwoManChart):
        payload = {"form": "cocycles", "n": obj.n, "rank1": obj.rank1, "rank2": obj.rank2,
                   "regions": _regions(obj.regions),
                   "cocycles": [{"pair": list(key), "deg1": matrix_to_json(obj.deg1[key]),
                                 "deg2": matrix_to_json(obj.deg2[key]), "mixed": _mats_to(obj.mixed[key])}
                                for key in obj.pairs()]}
    elif kind == "two-man-atlas":
        payload = _atlas_to_json(obj.atlas, obj.form)
    elif kind == "dorfman":
        inst = obj if isinstance(obj, DorfmanInstance) else DorfmanInstance(obj)
        d = inst.dorfman
        payload = {"n": d.n, "k": d.k,
                   "table": [[[poly_to_json(c) for c in val] for val in row] for row in d.table]}
        if inst.algebroid is not None:
            payload["algebroid"] = algebroid_to_json(inst.algebroid)
    else:
        payload = {"rep": tworep_to_json(obj.rep)}
    return {"format": FORMAT_VERSION, "kind": kind, "payload": payload}


def from_json(doc, cap=4):
    validate(doc)
    kind, p = doc["kind"], doc["payload"]
    try:
        if kind == "lie-algebroid":
            return algebroid_from_json(p)
        if kind == "tworep":
            return tworep_from_json(p)
        if kind == "metric-dvb":
            return MetricDVB.standard(p["n"], p["rank_q"], p["rank_b"], _mats_from(p["split_form"], p["n"]))
        if kind == "involutive-dvb":
            return InvolutiveDVB.standard(p["n"], p["rank_q"], p["rank_b"], _mats_from(p["kappa"], p["n"]))
        if kind == "two-man-atlas":
            n = p["n"]
            if p["form"] == "cocycles":
                deg1, deg2, mixed = {}, {}, {}
                for c in p["cocycles"]:
                    key = tuple(c["pair"])
                    deg1[key] = matrix_from_json(c["deg1"], n)
                    deg2[key] = matrix_from_json(c["deg2"], n)
                    mixed[key] = _mats_from(c["mixed"], n)
                return TwoManChart(n, p["rank1"], p["rank2"], _regions_from(p["regions"]), deg1, deg2, mixed)
            trs = {tuple(t["pair"]): Transition(matrix_from_json(t["a1"], n), matrix_from_json(t["a2"], n),
                                                matrix_from_json(t["a0"], n), _mats_from(t["core_terms"], n))
                   for t in p["transitions"]}
            return AtlasInstance(DVBAtlas(n, tuple(p["ranks"]), _regions_from(p["regions"]), trs), p["form"])
        if kind == "dorfman":
            n = p["n"]
            table = [[[poly_from_json(c, n) for c in val] for val in row] for row in p["table"]]
            alg = algebroid_from_json(p["algebroid"]) if "algebroid" in p else None
            return DorfmanInstance(DorfmanConnection(n, p["k"], table), alg)
        return PoissonStructure2(tworep_from_json(p["rep"]), mutation=True, cap=cap)
    except InstanceError:
        raise
    except (ValueError, KeyError, IndexError, TypeError) as exc:
        raise InstanceError(f"invalid {kind} payload: {exc}") from None


def dumps(obj):
    """Canonical text of an instance (sorted keys, fixed separators)."""
    return json.dumps(to_json(obj), sort_keys=True, separators=(",", ":"))


def loads(text, cap=4):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"parse error at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return from_json(doc, cap)


def load(path, cap=4):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InstanceError(f"cannot read {path}: {exc.strerror}") from None
    return loads(text, cap)


def structurally_equal(a, b):
    return dumps(a) == dumps(b)

