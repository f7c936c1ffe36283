"""Seeded generators of valid instances, used by tests, the CLI and demos.

Validity comes from construction: algebroids are frame changes of known
ones, 2-representations are gauge transforms, twists and sums of the
tangent representation (Id, nabla, nabla, R_nabla), which satisfies the
axioms for any connection.
"""

from fractions import Fraction

from .bundles import AConnection, LieAlgebroidModel, skew_table
from .polycore import Poly, PolyMatrix, random_matrix, random_poly, random_unimodular


def _sl2_action():
    n = 2
    x0, x1 = Poly.var(n, 0), Poly.var(n, 1)
    # linear vector fields of H, E, F acting on R^2
    anchor = PolyMatrix.from_rows([[x0, -x1], [x1, Poly.zero(n)], [Poly.zero(n), x0]], n)
    c = lambda *v: [Poly.const(n, a) for a in v]
    # linear vector fields reverse the matrix commutator, hence the signs
    table = skew_table(3, n, {(0, 1): c(0, -2, 0), (0, 2): c(0, 0, 2), (1, 2): c(-1, 0, 0)})
    return LieAlgebroidModel(n, anchor, table)


def _affine_line():
    n = 1
    x = Poly.var(n, 0)
    anchor = PolyMatrix.from_rows([[x], [Poly.const(n, 1)]], n)
    table = skew_table(2, n, {(0, 1): [Poly.zero(n), Poly.const(n, -1)]})
    return LieAlgebroidModel(n, anchor, table)


def _tangent_plus_abelian(n, extra):
    rank = n + extra
    anchor = PolyMatrix.zero(rank, n, n)
    for i in range(n):
        anchor = anchor.replace(i, i, 1)
    return LieAlgebroidModel(n, anchor, skew_table(rank, n, {}))


def _so3_over(n):
    c = lambda *v: [Poly.const(n, a) for a in v]
    table = skew_table(3, n, {(0, 1): c(0, 0, 1), (1, 2): c(1, 0, 0), (0, 2): c(0, -1, 0)})
    return LieAlgebroidModel(n, PolyMatrix.zero(3, n, n), table)


def _heisenberg_over(n):
    c = lambda *v: [Poly.const(n, a) for a in v]
    table = skew_table(3, n, {(0, 1): c(0, 0, 1)})
    return LieAlgebroidModel(n, PolyMatrix.zero(3, n, n), table)


def base_algebroid(kind, n=2, extra=1):
    if kind == "tangent":
        return LieAlgebroidModel.tangent(n)
    if kind == "abelian":
        return LieAlgebroidModel.abelian(n, extra)
    if kind == "sl2-action":
        return _sl2_action()
    if kind == "affine-line":
        return _affine_line()
    if kind == "tangent-plus":
        return _tangent_plus_abelian(n, extra)
    if kind == "so3":
        return _so3_over(n)
    if kind == "heisenberg":
        return _heisenberg_over(n)
    raise ValueError(f"unknown algebroid kind {kind}")


def random_lie_algebroid(rng, n=None, rank=None, reframe=True):
    """Random Lie algebroid of rank <= 3 over R^n with n <= 2."""
    options = ["tangent", "sl2-action", "affine-line", "tangent-plus", "so3", "heisenberg", "abelian"]
    while True:
        kind = rng.choice(options)
        nn = n if n is not None else rng.randint(1, 2)
        if kind == "tangent":
            model = base_algebroid(kind, nn)
        elif kind == "sl2-action":
            if nn != 2:
                continue
            model = base_algebroid(kind)
        elif kind == "affine-line":
            if nn != 1:
                continue
            model = base_algebroid(kind)
        elif kind == "tangent-plus":
            model = base_algebroid(kind, nn, 1)
        elif kind == "abelian":
            model = base_algebroid(kind, nn, rank or rng.randint(1, 3))
        else:
            model = base_algebroid(kind, nn)
        if rank is not None and model.rank != rank:
            continue
        if model.rank > 3:
            continue
        break
    if reframe and model.n > 0 and model.rank > 1:
        g = random_unimodular(rng, model.rank, model.n, degree=1, steps=1)
        model = model.reframe(g)
    return model


def random_aconnection(rng, algebroid, rank, degree=1):
    mats = [random_matrix(rng, rank, rank, algebroid.n, degree, n_terms=2, coeff_range=2)
            for _ in range(algebroid.rank)]
    return AConnection(algebroid, rank, mats)


def random_symmetric(rng, size, n_vars, degree=1):
    m = PolyMatrix.zero(size, size, n_vars)
    for i in range(size):
        for j in range(i, size):
            p = random_poly(rng, n_vars, degree, 2, 2)
            m = m.replace(i, j, p).replace(j, i, p)
    return m


def random_skew(rng, size, n_vars, degree=1):
    m = PolyMatrix.zero(size, size, n_vars)
    for i in range(size):
        for j in range(i + 1, size):
            p = random_poly(rng, n_vars, degree, 2, 2)
            m = m.replace(i, j, p).replace(j, i, -p)
    return m


def random_fraction(rng, spread=5):
    return Fraction(rng.randint(-spread, spread), rng.randint(1, 3))


def random_gauge_transition(rng, n, ranks, degree=1):
    """Random chart change with unimodular blocks and a random omega tensor."""
    from .dvb import Transition
    m1, m2, m0 = ranks
    return Transition(random_unimodular(rng, m1, n, degree, steps=1),
                      random_unimodular(rng, m2, n, degree, steps=1),
                      random_unimodular(rng, m0, n, degree, steps=1),
                      [random_matrix(rng, m1, m2, n, degree, n_terms=2, coeff_range=2) for _ in range(m0)])


def random_dvb_atlas(rng, n, ranks, charts=3):
    """Consistent atlas built from a common refinement.

    Each chart alpha gets a change g_alpha to a global trivialization and the
    transitions are g_alpha^{-1} o g_beta, so the cocycle law holds exactly.
    """
    from .dvb import DVBAtlas, compose_transitions, invert_transition
    gauges = [random_gauge_transition(rng, n, ranks) for _ in range(charts)]
    transitions = {}
    for a in range(charts):
        for b in range(charts):
            if a != b:
                transitions[(a, b)] = compose_transitions(invert_transition(gauges[a]), gauges[b])
    regions = [[(c - 1, c + 1)] * n for c in range(charts)]
    return DVBAtlas(n, tuple(ranks), regions, transitions)


def random_twist(rng, rep, degree=1):
    return [random_matrix(rng, rep.rank0, rep.rank1, rep.n, degree, n_terms=2, coeff_range=2)
            for _ in range(rep.algebroid.rank)]


def random_tworep(rng, algebroid=None, rank=None, extra=(1, 0)):
    """Valid 2-representation: gauge transform of a twisted sum of known ones.

    The core is (Id, nabla, nabla, R_nabla) on a bundle of rank `rank`,
    summed with a flat zero-differential block of ranks `extra`.
    """
    from .tworep import direct_sum, reframe, tangent_rep, twist, zero_rep
    alg = algebroid or random_lie_algebroid(rng)
    e = rank if rank is not None else rng.randint(1, 2)
    rep = tangent_rep(random_aconnection(rng, alg, e))
    if any(extra):
        rep = direct_sum(rep, zero_rep(alg, *extra))
    rep = twist(rep, random_twist(rng, rep))
    if alg.n > 0:
        p0 = random_unimodular(rng, rep.rank0, alg.n, degree=1, steps=1)
        p1 = random_unimodular(rng, rep.rank1, alg.n, degree=1, steps=1)
        rep = reframe(rep, p0, p1)
    return rep


def random_selfdual_tworep(rng, algebroid=None, base_ranks=None):
    """Self-dual 2-representation with identity identification E0 = E1*.

    Built as rep + dual(rep), moved to canonical form, then changed by a
    skew (Lagrangian) twist and a simultaneous frame change of E1 and E1*.
    """
    from .tworep import canonical_form, direct_sum_double, reframe, twist
    alg = algebroid or random_lie_algebroid(rng)
    rank = base_ranks[0] if base_ranks else 1
    extra = (0, base_ranks[1] - rank) if base_ranks else (0, rng.randint(0, 1))
    base = random_tworep(rng, alg, rank=rank, extra=extra)
    rep = canonical_form(direct_sum_double(base))
    q = rep.rank1
    rep = twist(rep, [random_skew(rng, q, alg.n) for _ in range(alg.rank)])
    if alg.n > 0:
        u = random_unimodular(rng, q, alg.n, degree=1, steps=1)
        rep = reframe(rep, u.inverse().T(), u)
    return rep


def random_metric_connection(rng, algebroid, rank, degree=1):
    """A-connection preserving the standard fibre metric (skew matrices)."""
    return AConnection(algebroid, rank, [random_skew(rng, rank, algebroid.n, degree)
                                         for _ in range(algebroid.rank)])


def random_metric_dvb(rng, n=None, rank_q=None, rank_b=None, degree=1):
    """Decomposed metric double vector bundle with a random symmetric form."""
    from .metricdvb import MetricDVB
    n = n if n is not None else rng.randint(1, 2)
    rank_q = rank_q or rng.randint(1, 2)
    rank_b = rank_b or rng.randint(1, 2)
    split_form = [random_symmetric(rng, rank_q, n, degree) for _ in range(rank_b)]
    return MetricDVB.standard(n, rank_q, rank_b, split_form)


def random_two_man_chart(rng, n=1, rank1=2, rank2=1, charts=3, degree=1):
    """Consistent chart data from a common refinement.

    Chart alpha carries frames W_a, P_a and a 2-form part S_a relative to a
    global chart, so omega_ab = W_a^-1 W_b, psi_ab = P_a^-1 P_b and
    rho_ab(v) = W_a^-1 (S_b(v) - S_a(psi_ab v)) W_a^-T satisfy the cocycle laws.
    """
    from .functors import TwoManChart, mixed_apply
    ws = [random_unimodular(rng, rank1, n, degree, steps=1) for _ in range(charts)]
    ps = [random_unimodular(rng, rank2, n, degree, steps=1) for _ in range(charts)]
    ss = [[random_skew(rng, rank1, n, degree) for _ in range(rank2)] for _ in range(charts)]
    deg1, deg2, mixed = {}, {}, {}
    for a in range(charts):
        wa_inv = ws[a].inverse()
        for b in range(charts):
            if a == b:
                continue
            deg1[(a, b)] = wa_inv @ ws[b]
            p = ps[a].inverse() @ ps[b]
            deg2[(a, b)] = p
            mats = []
            for i in range(rank2):
                col = p.col(i)
                mats.append(wa_inv @ (ss[b][i] - mixed_apply(ss[a], col)) @ wa_inv.T())
            mixed[(a, b)] = mats
    regions = [[(c - 1, c + 1)] * n for c in range(charts)]
    return TwoManChart(n, rank1, rank2, regions, deg1, deg2, mixed)


def random_dull_table(rng, n, k, skew=True, degree=1):
    """Frame values of a dull bracket on TM + E* (E* parts only; skew if asked)."""
    size = n + k
    zero = lambda: [Poly.zero(n) for _ in range(size)]
    table = [[zero() for _ in range(size)] for _ in range(size)]
    for s in range(size):
        for u in range(s if not skew else s + 1, size):
            for a in range(k):
                p = random_poly(rng, n, degree, 2, 2)
                table[s][u][n + a] = p
                if u != s:
                    table[u][s][n + a] = -p if skew else random_poly(rng, n, degree, 2, 2)
    return table


def random_dorfman(rng, n, k, skew=True, degree=1):
    """Dorfman connection dual to a random dull bracket on TM + E*."""
    from .worked import DullBracket, dull_to_dorfman
    return dull_to_dorfman(DullBracket(n, k, random_dull_table(rng, n, k, skew, degree)))


def random_fiber_metric(rng, n, rank, degree=1):
    """g = P^T P for a unimodular P, so g is symmetric with determinant 1."""
    from .bundles import Chart, FiberMetric, VBundle
    p = random_unimodular(rng, rank, n, degree, steps=1)
    return FiberMetric(VBundle(Chart(n), rank), p.T() @ p)


def random_connection(rng, bundle, degree=1):
    from .bundles import Connection
    r, n = bundle.rank, bundle.chart.dim
    return Connection.from_mats(bundle, [random_matrix(rng, r, r, n, degree, 2, 2) for _ in range(n)])


def random_compatible_connection(rng, metric, degree=1):
    """M_l = g^-1 (d_l g / 2 + A_l) with A_l skew, so d_l g = M_l^T g + g M_l."""
    from .bundles import Connection
    g = metric.g
    n, r = metric.bundle.chart.dim, metric.bundle.rank
    ginv = g.inverse()
    mats = [ginv @ (g.diff(l).scale(Fraction(1, 2)) + random_skew(rng, r, n, degree)) for l in range(n)]
    return Connection.from_mats(metric.bundle, mats)
