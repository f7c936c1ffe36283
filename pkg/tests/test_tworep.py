import pytest

from dvbkit.bundles import Chart, Connection, LieAlgebroidModel, VBundle
from dvbkit.metricdvb import MetricDVB
from dvbkit.mutations import mutate
from dvbkit.poisson2 import symplectic_from_metric_bundle
from dvbkit.polycore import PolyMatrix
from dvbkit.randomgen import (random_aconnection, random_compatible_connection, random_connection,
                              random_fiber_metric, random_lie_algebroid, random_metric_connection,
                              random_selfdual_tworep, random_tworep, random_twist)
from dvbkit.tworep import (TwoRep, adjoint_rep, check_tworep, connection_difference, direct_sum_double,
                           dualize_rep, is_selfdual, metric_vb_check, negate_twist, realize_vb_algebroid,
                           selfdual_report, tangent_rep, twist, zero_rep)


def _solvable_algebra():
    """Rank 3 over a point: [a1, a2] = a1, a0 central."""
    return LieAlgebroidModel.lie_algebra({(0, 1): [0, 0, 0], (0, 2): [0, 0, 0], (1, 2): [0, 1, 0]})


# ---------------------------------------------------------------- check_tworep

def test_zero_rep_passes():
    assert check_tworep(zero_rep(LieAlgebroidModel.tangent(2), 2, 1)).ok


def test_tangent_rep_passes(rng):
    for _ in range(5):
        alg = random_lie_algebroid(rng)
        assert check_tworep(tangent_rep(random_aconnection(rng, alg, 2))).ok


def test_non_closed_curvature_fails_on_dR():
    alg = _solvable_algebra()
    rep = zero_rep(alg, 1, 1)
    e = PolyMatrix.from_rows([[1]], 0)
    curv = [list(row) for row in rep.curv]
    curv[0][1], curv[1][0] = e, -e
    failed = check_tworep(rep.replace(curv=curv)).failed_names()
    assert failed == ["dR[a0,a1,a2]"]


def test_random_reps_are_valid(rng):
    for _ in range(10):
        assert check_tworep(random_tworep(rng)).ok


# ---------------------------------------------------------------- twist

def test_zero_twist_is_identity(rng):
    rep = random_tworep(rng)
    zero = [PolyMatrix.zero(rep.rank0, rep.rank1, rep.n) for _ in range(rep.algebroid.rank)]
    assert twist(rep, zero) == rep


def test_twist_inverse_and_validity(rng):
    for _ in range(10):
        rep = random_tworep(rng)
        shift = random_twist(rng, rep)
        twisted = twist(rep, shift)
        assert check_tworep(twisted).ok
        assert twist(twisted, negate_twist(shift)) == rep


def test_adjoint_reps_are_twist_related(rng):
    for _ in range(3):
        alg = random_lie_algebroid(rng)
        bundle = VBundle(Chart(alg.n), alg.rank)
        c1, c2 = random_connection(rng, bundle), random_connection(rng, bundle)
        assert twist(adjoint_rep(alg, c1), connection_difference(c2, c1)) == adjoint_rep(alg, c2)


# ---------------------------------------------------------------- duals

def test_dual_of_zero_rep():
    alg = LieAlgebroidModel.tangent(1)
    assert dualize_rep(zero_rep(alg, 2, 1)) == zero_rep(alg, 1, 2)


def test_double_dual_is_identity(rng):
    for _ in range(5):
        rep = random_tworep(rng)
        assert dualize_rep(dualize_rep(rep)) == rep


def test_tangent_rep_dual(rng):
    alg = random_lie_algebroid(rng)
    conn = random_aconnection(rng, alg, 2)
    dual = dualize_rep(tangent_rep(conn))
    assert check_tworep(dual).ok
    assert dual.d == PolyMatrix.identity(2, alg.n)
    assert dual.m0 == [-m.T() for m in conn.mats] == dual.m1
    curv = conn.curvature()
    for i in range(alg.rank):
        for j in range(alg.rank):
            assert dual.curv[i][j] == -curv[i][j].T()


# ---------------------------------------------------------------- self-duality

def _metric_tangent_rep(metric, conn):
    """Tangent rep of a TM-connection, E0 = E* read through g."""
    rep = tangent_rep(conn.as_algebroid_connection())
    return rep.replace(identification=metric.g)


def test_metric_connection_is_selfdual(rng):
    metric = random_fiber_metric(rng, 2, 2)
    conn = random_compatible_connection(rng, metric)
    assert is_selfdual(_metric_tangent_rep(metric, conn))
    assert is_selfdual(symplectic_from_metric_bundle(metric, conn).rep)


def test_non_metric_connection_is_not_selfdual(rng):
    metric = random_fiber_metric(rng, 1, 2)
    failed = selfdual_report(_metric_tangent_rep(metric, random_connection(rng, metric.bundle))).failed_names()
    assert failed and all(name.startswith(("dual-connections", "skew-curvature")) for name in failed)
    assert "dual-connections[a0]" in failed


def test_flat_dual_pair_is_selfdual(rng):
    alg = LieAlgebroidModel.abelian(1, 2)
    conn = random_metric_connection(rng, alg, 2)
    rep = TwoRep(alg, 2, 2, PolyMatrix.zero(2, 2, 1), [-m.T() for m in conn.mats], list(conn.mats),
                 [[PolyMatrix.zero(2, 2, 1)] * 2 for _ in range(2)], PolyMatrix.identity(2, 1))
    assert is_selfdual(rep)


def test_direct_sum_double(rng):
    alg = LieAlgebroidModel.tangent(1)
    assert is_selfdual(direct_sum_double(zero_rep(alg, 1, 1)))
    assert is_selfdual(direct_sum_double(tangent_rep(random_aconnection(rng, alg, 2))))
    for _ in range(5):
        double = direct_sum_double(random_tworep(rng))
        assert is_selfdual(double) and check_tworep(double).ok


# ---------------------------------------------------------------- adjoint rep

def test_adjoint_over_a_point_is_adjoint_action():
    alg = _solvable_algebra()
    rep = adjoint_rep(alg, Connection(VBundle(Chart(0), alg.rank)))
    assert check_tworep(rep).ok
    # m0[i] column j is [a_i, a_j]
    for i in range(3):
        for j in range(3):
            assert [rep.m0[i][k, j] for k in range(3)] == alg.structure[i][j]


def test_flat_adjoint_on_plane():
    alg = LieAlgebroidModel.tangent(2)
    rep = adjoint_rep(alg, Connection(VBundle(Chart(2), 2)))
    # coordinate fields commute and are parallel: both basic connections vanish on frames
    assert all(m.is_zero() for m in rep.m0 + rep.m1)
    assert check_tworep(rep).ok


def test_adjoint_of_random_algebroid_passes(rng):
    for _ in range(5):
        alg = random_lie_algebroid(rng)
        assert check_tworep(adjoint_rep(alg, random_connection(rng, VBundle(Chart(alg.n), alg.rank)))).ok


# ---------------------------------------------------------------- realization

def test_realization_of_zero_rep_is_clean():
    rep = zero_rep(LieAlgebroidModel.abelian(1, 2), 1, 1)
    assert realize_vb_algebroid(rep).jacobi_report().ok


def test_realization_detects_mutated_curvature(rng):
    alg = random_lie_algebroid(rng, rank=2)
    rep = random_tworep(rng, alg)
    assert realize_vb_algebroid(rep).jacobi_report().ok
    report = realize_vb_algebroid(mutate(rep, "curvature")).jacobi_report()
    failed = [c for c in report.checks if not c.ok]
    assert failed and all(c.name and c.residual for c in failed)


# ---------------------------------------------------------------- metric VB-algebroids

def test_metric_vb_check_selfdual(rng):
    rep = random_selfdual_tworep(rng, random_lie_algebroid(rng, rank=2))
    metric = MetricDVB.standard(rep.n, rep.rank1, rep.algebroid.rank)
    ok, report = metric_vb_check(metric, rep)
    assert ok and report.ok


def test_metric_vb_check_symmetric_curvature(rng):
    rep = random_selfdual_tworep(rng, random_lie_algebroid(rng, rank=2), base_ranks=(1, 1))
    broken = mutate(rep, "r-skew")
    ok, report = metric_vb_check(MetricDVB.standard(rep.n, rep.rank1, 2), broken)
    assert not ok
    closure = [name for name in report.failed_names() if name.startswith("closure")]
    assert closure and all("sigma,sigma" in name for name in closure)


def test_metric_vb_check_tangent_double(rng):
    metric = random_fiber_metric(rng, 2, 2)
    rep = symplectic_from_metric_bundle(metric, random_compatible_connection(rng, metric)).rep
    ok, report = metric_vb_check(MetricDVB.standard(2, 2, 2), rep)
    assert ok and report.ok


def test_metric_vb_check_needs_lagrangian():
    split_form = [PolyMatrix.identity(1, 1)]
    rep = zero_rep(LieAlgebroidModel.tangent(1), 1, 1)
    with pytest.raises(ValueError):
        metric_vb_check(MetricDVB.standard(1, 1, 1, split_form), rep)
