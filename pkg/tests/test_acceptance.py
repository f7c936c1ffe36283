"""Acceptance criteria 1-10; each test records one summary line."""

import io
import json
import time

from dvbkit import serialize
from dvbkit.bundles import Chart, VBundle, metric_compatibility
from dvbkit.cli import main
from dvbkit.dvb import check_atlas
from dvbkit.functors import check_cocycles, geometrize, roundtrip_check
from dvbkit.metricdvb import (InvolutiveDVB, change_metric, involutive_to_metric, metric_to_involutive,
                              symmetrize_splitting)
from dvbkit.mutations import mutate
from dvbkit.poisson2 import (PoissonStructure2, check_graded_axioms, geometrize_poisson, is_symplectic,
                             poisson_roundtrip, symplectic_from_metric_bundle)
from dvbkit.randomgen import (base_algebroid, random_compatible_connection, random_connection, random_dorfman,
                              random_fiber_metric, random_lie_algebroid, random_metric_dvb,
                              random_selfdual_tworep, random_symmetric, random_tworep, random_twist,
                              random_two_man_chart)
from dvbkit.serialize import DorfmanInstance
from dvbkit.tworep import (adjoint_rep, check_tworep, connection_difference, is_selfdual, negate_twist,
                           realize_vb_algebroid, selfdual_report, twist)
from dvbkit.worked import (basic_flags, basic_tworep, cotangent_involution_check, pontryagin_pairing_check,
                           symmetrized_connection)


def _algebroid_rank2(rng):
    return random_lie_algebroid(rng, rank=rng.choice([2, 3]))


def test_criterion_01_duality_roundtrip(rng, record):
    start = time.perf_counter()
    ok = True
    for _ in range(25):
        n, rq, rb, deg = rng.randint(1, 2), rng.randint(1, 3), rng.randint(1, 3), rng.randint(0, 2)
        metric = random_metric_dvb(rng, n, rq, rb, deg)
        ok &= involutive_to_metric(metric_to_involutive(metric)).split_form == metric.split_form
    for _ in range(25):
        n, rq, rb, deg = rng.randint(1, 2), rng.randint(1, 3), rng.randint(1, 3), rng.randint(0, 2)
        inv = InvolutiveDVB.standard(n, rq, rb, [random_symmetric(rng, rq, n, deg) for _ in range(rb)])
        ok &= metric_to_involutive(involutive_to_metric(inv)).kappa == inv.kappa
    elapsed = time.perf_counter() - start
    record(1, ok and elapsed < 30, f"50 instances exact, {elapsed:.2f}s (limit 30s)")
    assert ok
    assert elapsed < 30


def test_criterion_02_vb_realization(rng, record):
    start = time.perf_counter()
    clean = detected = 0
    for _ in range(25):
        rep = random_tworep(rng, _algebroid_rank2(rng))
        assert check_tworep(rep).ok
        clean += realize_vb_algebroid(rep).jacobi_report().ok
        for axiom in ("chain", "curvature", "connection"):
            report = realize_vb_algebroid(mutate(rep, axiom)).jacobi_report()
            failed = [c for c in report.checks if not c.ok]
            detected += bool(failed) and all(c.residual for c in failed)
    elapsed = time.perf_counter() - start
    ok = clean == 25 and detected == 75 and elapsed < 60
    record(2, ok, f"clean {clean}/25, mutations detected {detected}/75, {elapsed:.2f}s (limit 60s)")
    assert ok


def test_criterion_03_twist_group_law(rng, record):
    inverse = related = 0
    for _ in range(25):
        rep = random_tworep(rng)
        shift = random_twist(rng, rep)
        inverse += twist(twist(rep, shift), negate_twist(shift)).same_data(rep)
    for _ in range(5):
        alg = random_lie_algebroid(rng)
        bundle = VBundle(Chart(alg.n), alg.rank)
        c1, c2 = random_connection(rng, bundle), random_connection(rng, bundle)
        ad1, ad2 = adjoint_rep(alg, c1), adjoint_rep(alg, c2)
        related += twist(ad1, connection_difference(c2, c1)).same_data(ad2)
    ok = inverse == 25 and related == 5
    record(3, ok, f"twist inverse {inverse}/25, adjoint twist-related {related}/5")
    assert ok


def test_criterion_04_poisson_selfdual(rng, record):
    clean = named = 0
    for _ in range(25):
        rep = random_selfdual_tworep(rng, _algebroid_rank2(rng), base_ranks=(1, rng.randint(1, 2)))
        p = PoissonStructure2(rep)
        clean += check_graded_axioms(p).ok
        for axiom in ("d-symmetry", "duality", "r-skew"):
            broken = check_graded_axioms(mutate(p, axiom)).failed_names()
            named += bool(broken) and all(name.startswith(("jacobi{", "skew{")) for name in broken)
    ok = clean == 25 and named == 75
    record(4, ok, f"clean {clean}/25, mutations failing Jacobi/skew with named case {named}/75")
    assert ok


def test_criterion_05_cocycles_and_metric(rng, record):
    passed = detected = 0
    for _ in range(10):
        t = random_two_man_chart(rng, n=1, rank1=2, rank2=rng.randint(1, 2), charts=3)
        geo = geometrize(t)
        passed += check_cocycles(t).ok and geo.report.ok and check_atlas(geo.metric_atlas).ok
        detected += not check_cocycles(mutate(t, "mixed")).ok
    ok = passed == 10 and detected == 10
    record(5, ok, f"atlas and metric agreement {passed}/10, mixed-term perturbation detected {detected}/10")
    assert ok


def test_criterion_06_functor_roundtrips(rng, record):
    counts = [0, 0, 0, 0]
    for _ in range(25):
        t = random_two_man_chart(rng, n=1, rank1=2, rank2=rng.randint(1, 2), charts=2)
        counts[0] += roundtrip_check(t).ok
        counts[1] += roundtrip_check(geometrize(t).metric_atlas).ok
    for _ in range(25):
        p = PoissonStructure2(random_selfdual_tworep(rng))
        counts[2] += poisson_roundtrip(p).ok
        counts[3] += poisson_roundtrip(geometrize_poisson(p)).ok
    ok = counts == [25, 25, 25, 25]
    record(6, ok, "geom.alg {}/25, alg.geom {}/25, poisson geom.alg {}/25, poisson alg.geom {}/25".format(*counts))
    assert ok


def test_criterion_07_symplectic(rng, record):
    sym = singular = table = 0
    for _ in range(5):
        metric = random_fiber_metric(rng, rng.randint(1, 2), rng.randint(1, 2))
        conn = random_compatible_connection(rng, metric)
        sym += is_symplectic(symplectic_from_metric_bundle(metric, conn))
        table += cotangent_involution_check(metric, conn).ok
    # singular d: a zero-differential block; singular anchor: rank differs from base dimension
    for _ in range(5):
        p = PoissonStructure2(random_selfdual_tworep(rng, base_algebroid("tangent", 1), base_ranks=(1, 2)))
        assert p.rep.d.det().is_zero()
        singular += not is_symplectic(p)
        q = PoissonStructure2(random_selfdual_tworep(rng, base_algebroid("abelian", 1, 2)))
        singular += not is_symplectic(q)
    ok = sym == 5 and singular == 10 and table == 5
    record(7, ok, f"symplectic {sym}/5, singular rejected {singular}/10, cotangent table {table}/5")
    assert ok


def test_criterion_08_basic_tworep(rng, record):
    good = dual_fail = pairing = 0
    kinds = [("tangent", 1), ("tangent", 2), ("affine-line", 1), ("sl2-action", 2), ("tangent-plus", 1)]
    for kind, n in kinds:
        alg = base_algebroid(kind, n)
        dorfman = random_dorfman(rng, alg.n, alg.rank)
        rep = basic_tworep(alg, dorfman)
        good += check_tworep(rep).ok and is_selfdual(rep)
        pairing += pontryagin_pairing_check(dorfman).ok
        broken = mutate(DorfmanInstance(dorfman, alg), "skew").dorfman
        failed = selfdual_report(basic_tworep(alg, broken)).failed_names()
        flags = basic_flags(alg, broken)
        dual_fail += (not flags["skew-bracket"] and not flags["selfdual"]
                      and any(name.startswith("dual-connections") for name in failed))
    ok = good == 5 and dual_fail == 5 and pairing == 5
    record(8, ok, f"tworep+selfdual {good}/5, non-skew fails nabla-duality {dual_fail}/5, "
                  f"pairing identities {pairing}/5")
    assert ok


def test_criterion_09_symmetrization(rng, record):
    zero = 0
    for _ in range(25):
        metric = random_metric_dvb(rng, rng.randint(1, 2), rng.randint(1, 3), rng.randint(1, 3),
                                   rng.randint(0, 2))
        zero += change_metric(metric, symmetrize_splitting(metric)).is_lagrangian()
    compatible = 0
    for _ in range(3):
        metric = random_fiber_metric(rng, rng.randint(1, 2), 2)
        conn = random_connection(rng, metric.bundle)
        new_conn, new_double = symmetrized_connection(metric, conn)
        compatible += metric_compatibility(new_conn, metric) and new_double.is_lagrangian()
    ok = zero == 25 and compatible == 3
    record(9, ok, f"split form zero on {zero}/25, tangent double symmetrized connection metric {compatible}/3")
    assert ok


def _run(argv):
    out = io.StringIO()
    return main(argv, out=out), out.getvalue()


def test_criterion_10_cli_contract(tmp_path, record):
    results = {}
    for kind in serialize.KINDS:
        path = tmp_path / f"{kind}.json"
        code, _ = _run(["build", f"random-{kind}", "--out", str(path)])
        obj = serialize.load(str(path))
        again = serialize.loads(serialize.dumps(obj))
        rt, _ = _run(["roundtrip", str(path)])
        results[f"serializer:{kind}"] = code == 0 and serialize.structurally_equal(obj, again) and rt == 0
    rep_path = tmp_path / "tworep.json"
    reports = []
    for name in ("a", "b"):
        target = tmp_path / f"report-{name}.json"
        code, _ = _run(["verify", str(rep_path), "--suite", "twist", "--samples", "3", "--report", str(target)])
        reports.append((code, target.read_bytes()))
    results["deterministic"] = reports[0] == reports[1]
    results["exit0"] = reports[0][0] == 0 and json.loads(reports[0][1])["verdict"] == "pass"
    code, _ = _run(["verify", str(rep_path), "--mutate", "chain", "--report", str(tmp_path / "m.json")])
    failing = [c["name"] for c in json.loads((tmp_path / "m.json").read_text())["checks"] if c["status"] == "fail"]
    results["exit1"] = code == 1 and bool(failing)
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    results["exit2-parse"] = _run(["verify", str(bad)])[0] == 2
    results["exit2-suite"] = _run(["verify", str(rep_path), "--suite", "nope"])[0] == 2
    ok = all(results.values())
    record(10, ok, f"{sum(results.values())}/{len(results)} CLI checks"
                   + ("" if ok else f", failing: {[k for k, v in results.items() if not v]}"))
    assert ok
