"""Command line front end: verify, build and roundtrip instance files.

Exit codes: 0 all checks pass, 1 a check failed, 2 input error.
"""

import argparse
import json
import os
import random
import sys

from . import serialize
from .bundles import Connection, VBundle, Chart, LieAlgebroidModel, check_lie_algebroid
from .functors import TwoManChart, algebraize, check_cocycles, geometrize, roundtrip_check
from .metricdvb import (InvolutiveDVB, MetricDVB, change_metric, check_metric, involutive_to_metric,
                        metric_to_involutive, symmetrize_splitting)
from .mutations import MUTATIONS, mutate
from .poisson2 import (CapExceeded, PoissonStructure2, anti_poisson_report, check_graded_axioms, displayed_table_report,
                       geometrize_poisson, is_symplectic, poisson_roundtrip)
from .polycore import random_matrix
from .randomgen import (random_dorfman, random_lie_algebroid, random_metric_dvb, random_selfdual_tworep,
                        random_tworep, random_twist, random_two_man_chart)
from .report import Report
from .dvb import check_atlas
from .serialize import AtlasInstance, DorfmanInstance, InstanceError
from .tworep import (TwoRep, adjoint_rep, check_tworep, dualize_rep, negate_twist, realize_vb_algebroid,
                     selfdual_report, twist)
from .worked import (basic_flags, basic_tworep, dorfman_axiom_report, dorfman_to_dull, duality_report,
                     pontryagin_pairing_check)

DEFAULT_SEED = 42
REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["tool", "command", "kind", "suite", "seed", "samples", "degree_cap", "mutate",
                 "verdict", "summary", "checks"],
    "properties": {
        "tool": {"const": "dvbkit"},
        "command": {"enum": ["verify", "roundtrip"]},
        "kind": {"type": "string"},
        "suite": {"type": "string"},
        "seed": {"type": "integer"},
        "samples": {"type": "integer"},
        "degree_cap": {"type": "integer"},
        "mutate": {"type": ["string", "null"]},
        "verdict": {"enum": ["pass", "fail"]},
        "summary": {"type": "object", "required": ["checks", "failures"],
                    "properties": {"checks": {"type": "integer"}, "failures": {"type": "integer"}}},
        "checks": {"type": "array", "items": {
            "type": "object", "required": ["name", "status", "residual"],
            "properties": {"name": {"type": "string"}, "status": {"enum": ["pass", "fail"]},
                           "residual": {"type": "string"},
                           "witness": {"type": "array", "items": {"type": "string"}}}}},
    },
}


class UsageError(Exception):
    """Suite or constructor not applicable to the given input."""


# ------------------------------------------------------------ suites

def _suite_twist(rep, rng, samples):
    report = Report("twist")
    for i in range(samples):
        shift = random_twist(rng, rep)
        back = twist(twist(rep, shift), negate_twist(shift))
        report.add(f"twist-inverse[{i}]", back.same_data(rep))
    return report


def _suite_metric_duality(obj):
    report = Report("duality")
    if isinstance(obj, MetricDVB):
        inv = metric_to_involutive(obj)
        report.add_residual("involutive-symmetric", inv.square_residual())
        back = involutive_to_metric(inv)
        report.add_residual("metric-roundtrip", [a - b for a, b in zip(back.split_form, obj.split_form)])
    else:
        # a non-symmetric kappa has no metric counterpart; report it instead of raising
        report.add_residual("kappa-symmetric", [k - k.T() for k in obj.kappa])
        if not report.ok:
            return report
        met = involutive_to_metric(obj)
        back = metric_to_involutive(met)
        report.add_residual("involutive-roundtrip", [a - b for a, b in zip(back.kappa, obj.kappa)])
    return report


def _suite_symmetrize(metric):
    report = Report("symmetrize")
    report.extend(check_metric(metric))
    new = change_metric(metric, symmetrize_splitting(metric))
    report.add_residual("lagrangian-after-change", new.split_form)
    return report


def _suite_atlas(obj):
    if isinstance(obj, TwoManChart):
        return check_cocycles(obj)
    return check_atlas(obj.atlas)


def _atlas_precheck(obj):
    """Atlas checks for the atlas form; None if it is safe to algebraize."""
    if isinstance(obj, TwoManChart):
        return None
    report = check_atlas(obj.atlas)
    return None if report.ok else report


def _suite_geometrize(obj):
    broken = _atlas_precheck(obj)
    if broken is not None:
        return broken
    if not isinstance(obj, TwoManChart):
        obj = algebraize(obj.atlas, involutive=obj.form == "involutive-atlas")
    try:
        return geometrize(obj).report
    except ValueError as exc:
        report = check_cocycles(obj)
        report.suite = "geometrize"
        report.add("geometrize", False, str(exc))
        return report


def _suite_roundtrip_atlas(obj):
    if isinstance(obj, TwoManChart):
        cocycles = check_cocycles(obj)
        if not cocycles.ok:
            return cocycles
        return roundtrip_check(obj)
    broken = _atlas_precheck(obj)
    if broken is not None:
        return broken
    return roundtrip_check(obj.atlas, involutive=obj.form == "involutive-atlas")


def _suite_basic(inst):
    if inst.algebroid is None:
        raise UsageError("suite 'basic' needs a dorfman instance with an algebroid")
    rep = basic_tworep(inst.algebroid, inst.dorfman)
    report = Report("basic")
    report.extend(check_tworep(rep), "tworep:")
    report.extend(selfdual_report(rep), "selfdual:")
    flags = basic_flags(inst.algebroid, inst.dorfman)
    report.add("skew-bracket", flags["skew-bracket"])
    report.add("lagrangian", flags["lagrangian"])
    return report


def _suite_dorfman_axioms(inst):
    report = dorfman_axiom_report(inst.dorfman)
    report.extend(duality_report(inst.dorfman, dorfman_to_dull(inst.dorfman)))
    return report


def _suite_linear(p):
    lp = geometrize_poisson(p)
    report = anti_poisson_report(lp)
    report.extend(displayed_table_report(p, lp), "table:")
    return report


def _suite_symplectic(p):
    report = Report("symplectic")
    report.add("anchor-and-d-invertible", is_symplectic(p))
    return report


SUITES = {
    "lie-algebroid": {"axioms": lambda o, rng, s: check_lie_algebroid(o)},
    "tworep": {
        "axioms": lambda o, rng, s: check_tworep(o),
        "selfdual": lambda o, rng, s: selfdual_report(o),
        "realization": lambda o, rng, s: realize_vb_algebroid(o).jacobi_report(),
        "twist": _suite_twist,
    },
    "metric-dvb": {
        "metric": lambda o, rng, s: check_metric(o),
        "duality": lambda o, rng, s: _suite_metric_duality(o),
        "symmetrize": lambda o, rng, s: _suite_symmetrize(o),
    },
    "involutive-dvb": {
        "involution": lambda o, rng, s: o.check(),
        "duality": lambda o, rng, s: _suite_metric_duality(o),
    },
    "two-man-atlas": {
        "cocycle": lambda o, rng, s: _suite_atlas(o),
        "geometrize": lambda o, rng, s: _suite_geometrize(o),
        "roundtrip": lambda o, rng, s: _suite_roundtrip_atlas(o),
    },
    "dorfman": {
        "axioms": lambda o, rng, s: _suite_dorfman_axioms(o),
        "pairing": lambda o, rng, s: pontryagin_pairing_check(o.dorfman),
        "basic": lambda o, rng, s: _suite_basic(o),
    },
    "poisson2": {
        "axioms": lambda o, rng, s: check_graded_axioms(o),
        "roundtrip": lambda o, rng, s: poisson_roundtrip(o),
        "linear": lambda o, rng, s: _suite_linear(o),
        "symplectic": lambda o, rng, s: _suite_symplectic(o),
    },
}


# mutations that the first suite of their kind cannot see, with the suite that can
MUTATION_SUITES = {("dorfman", "skew"): "basic"}


def run_suite(obj, suite, seed, samples):
    kind = serialize.kind_of(obj)
    table = SUITES[kind]
    if suite is None:
        suite = next(iter(table))
    if suite not in table:
        raise UsageError(f"suite {suite!r} does not apply to kind {kind!r} (available: {', '.join(table)})")
    return suite, table[suite](obj, random.Random(seed), samples)


# ------------------------------------------------------------ reports

def report_document(command, kind, suite, report, args):
    checks = [c.to_dict() for c in report.checks]
    return {"tool": "dvbkit", "command": command, "kind": kind, "suite": suite, "seed": args.seed,
            "samples": args.samples, "degree_cap": args.degree_cap, "mutate": getattr(args, "mutate", None),
            "verdict": "pass" if report.ok else "fail",
            "summary": {"checks": len(checks), "failures": sum(c["status"] == "fail" for c in checks)},
            "checks": checks}


def dump_report(doc):
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _emit(doc, report, args, out):
    out.write(report.text() + "\n")
    out.write(f"verdict: {doc['verdict'].upper()}\n")
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(dump_report(doc))
    return 0 if report.ok else 1


# ------------------------------------------------------------ build

def _random_instance(kind, rng):
    if kind == "lie-algebroid":
        return random_lie_algebroid(rng)
    if kind == "tworep":
        return random_tworep(rng)
    if kind == "metric-dvb":
        return random_metric_dvb(rng)
    if kind == "involutive-dvb":
        return metric_to_involutive(random_metric_dvb(rng))
    if kind == "two-man-atlas":
        return random_two_man_chart(rng, n=1, rank1=2, rank2=rng.randint(1, 2))
    if kind == "dorfman":
        alg = random_lie_algebroid(rng)
        return DorfmanInstance(random_dorfman(rng, alg.n, alg.rank), alg)
    return PoissonStructure2(random_selfdual_tworep(rng))


def _expect(obj, types, constructor):
    if not isinstance(obj, types):
        raise UsageError(f"constructor {constructor!r} does not take a {serialize.kind_of(obj)} instance")


def build(constructor, obj, rng, cap):
    if constructor.startswith("random-"):
        kind = constructor[len("random-"):]
        if kind not in serialize.KINDS:
            raise UsageError(f"unknown instance kind {kind!r}")
        return _random_instance(kind, rng)
    if obj is None:
        raise UsageError(f"constructor {constructor!r} needs an input instance")
    if constructor in ("geometrize", "geometrize-involutive"):
        _expect(obj, TwoManChart, constructor)
        geo = geometrize(obj)
        if constructor == "geometrize":
            return AtlasInstance(geo.metric_atlas, "metric-atlas")
        return AtlasInstance(geo.involutive_atlas, "involutive-atlas")
    if constructor == "algebraize":
        _expect(obj, AtlasInstance, constructor)
        return algebraize(obj.atlas, involutive=obj.form == "involutive-atlas")
    if constructor == "adjoint-rep":
        _expect(obj, LieAlgebroidModel, constructor)
        bundle = VBundle(Chart(obj.n), obj.rank)
        mats = [random_matrix(rng, obj.rank, obj.rank, obj.n, 1, 2, 2) for _ in range(obj.n)]
        return adjoint_rep(obj, Connection.from_mats(bundle, mats))
    if constructor == "basic-tworep":
        _expect(obj, DorfmanInstance, constructor)
        if obj.algebroid is None:
            raise UsageError("basic-tworep needs a dorfman instance with an algebroid")
        return basic_tworep(obj.algebroid, obj.dorfman)
    if constructor == "dual-rep":
        _expect(obj, TwoRep, constructor)
        return dualize_rep(obj)
    if constructor == "poisson":
        _expect(obj, TwoRep, constructor)
        return PoissonStructure2(obj, cap=cap)
    if constructor == "symmetrize":
        _expect(obj, MetricDVB, constructor)
        return change_metric(obj, symmetrize_splitting(obj))
    if constructor == "to-involutive":
        _expect(obj, MetricDVB, constructor)
        return metric_to_involutive(obj)
    if constructor == "to-metric":
        _expect(obj, InvolutiveDVB, constructor)
        return involutive_to_metric(obj)
    raise UsageError(f"unknown constructor {constructor!r}")


CONSTRUCTORS = ["random-" + k for k in serialize.KINDS] + [
    "geometrize", "geometrize-involutive", "algebraize", "adjoint-rep", "basic-tworep", "dual-rep",
    "poisson", "symmetrize", "to-involutive", "to-metric"]


# ------------------------------------------------------------ roundtrip

def roundtrip_report(obj, cap):
    kind = serialize.kind_of(obj)
    report = Report("roundtrip")
    text = serialize.dumps(obj)
    again = serialize.loads(text, cap)
    report.add("serializer", serialize.kind_of(again) == kind and serialize.structurally_equal(again, obj))
    if kind == "two-man-atlas":
        report.extend(_suite_roundtrip_atlas(obj), "functor:")
    elif kind == "poisson2":
        report.extend(poisson_roundtrip(obj), "functor:")
    elif kind in ("metric-dvb", "involutive-dvb"):
        report.extend(_suite_metric_duality(obj), "functor:")
    elif kind == "tworep":
        report.add("double-dual", dualize_rep(dualize_rep(obj)).same_data(obj))
    elif kind == "dorfman":
        from .worked import dull_to_dorfman
        report.add("dorfman-dull", dull_to_dorfman(dorfman_to_dull(obj.dorfman)).table == obj.dorfman.table)
    return report


# ------------------------------------------------------------ entry point

def _default_seed():
    env = os.environ.get("DVBKIT_SEED")
    if env is None:
        return DEFAULT_SEED
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"DVBKIT_SEED must be an integer, got {env!r}") from None


def _parser():
    p = argparse.ArgumentParser(prog="dvbkit", description="Exact checks for double vector bundle data.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--seed", type=int, default=None, help="random seed (default 42, or DVBKIT_SEED)")
        sp.add_argument("--samples", type=int, default=25, help="random samples for sampling suites")
        sp.add_argument("--degree-cap", type=int, default=4, help="maximal degree in graded brackets")
        sp.add_argument("--report", default=None, help="write the structured JSON report here")

    v = sub.add_parser("verify", help="run a verification suite on an instance file")
    v.add_argument("instance")
    v.add_argument("--suite", default=None)
    v.add_argument("--mutate", default=None, help="break one axiom before checking")
    common(v)
    b = sub.add_parser("build", help="run a constructor and print the resulting instance")
    b.add_argument("constructor", choices=CONSTRUCTORS)
    b.add_argument("instance", nargs="?", default=None)
    b.add_argument("--out", default=None, help="write the instance here instead of standard output")
    common(b)
    r = sub.add_parser("roundtrip", help="serializer and functor round trips of an instance")
    r.add_argument("instance")
    common(r)
    return p


def main(argv=None, out=None):
    out = out or sys.stdout
    args = _parser().parse_args(argv)
    try:
        if args.seed is None:
            args.seed = _default_seed()
        if args.samples < 0 or args.degree_cap < 1:
            raise UsageError("--samples must be >= 0 and --degree-cap >= 1")
        obj = serialize.load(args.instance, args.degree_cap) if args.instance else None
        if args.command == "build":
            result = build(args.constructor, obj, random.Random(args.seed), args.degree_cap)
            text = json.dumps(serialize.to_json(result), sort_keys=True, indent=1) + "\n"
            if args.out:
                with open(args.out, "w", encoding="utf-8") as fh:
                    fh.write(text)
            else:
                out.write(text)
            return 0
        kind = serialize.kind_of(obj)
        if args.command == "roundtrip":
            report = roundtrip_report(obj, args.degree_cap)
            return _emit(report_document("roundtrip", kind, "roundtrip", report, args), report, args, out)
        if args.mutate is not None:
            if args.mutate not in MUTATIONS[kind]:
                raise UsageError(f"mutation {args.mutate!r} not available for {kind} "
                                 f"(available: {', '.join(MUTATIONS[kind]) or 'none'})")
            obj = mutate(obj, args.mutate)
            if args.suite is None:
                args.suite = MUTATION_SUITES.get((kind, args.mutate))
        suite, report = run_suite(obj, args.suite, args.seed, args.samples)
        return _emit(report_document("verify", kind, suite, report, args), report, args, out)
    except (InstanceError, UsageError) as exc:
        sys.stderr.write(f"dvbkit: input error: {exc}\n")
        return 2
    except CapExceeded as exc:
        sys.stderr.write(f"dvbkit: degree cap exceeded: {exc}\n")
        return 2
    except ValueError as exc:
        # constructor preconditions (e.g. a mutation that does not apply)
        sys.stderr.write(f"dvbkit: input error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
