"""Concrete instance families built in decomposed coordinates.

* tangent doubles of metric vector bundles with a linear connection,
* Dorfman connections and dull brackets on TM + E* (and E + T*M),
  with the pairing of TE + T*E in the induced splitting,
* the basic 2-representation of a Lie algebroid defined by such a
  Dorfman connection,
* the cotangent double of a metric bundle with its involution and the
  resulting Poisson brackets.

Section conventions: a section q of TM + E* is a list (X_0..X_{n-1},
eps_0..eps_{k-1}); a section tau of E + T*M is (c_0..c_{k-1},
theta_0..theta_{n-1}). Both are lists of Polys on the base chart.
"""

from .bundles import (Connection, apply_vector_field, metric_compatibility,
                      metric_residuals, vector_field_bracket)
from .metricdvb import MetricDVB, change_metric, metric_to_involutive, symmetrize_splitting
from .poisson2 import GradedFunction, dual_linear_poisson, is_symplectic, symplectic_from_metric_bundle, two_form_of
from .polycore import Poly, PolyMatrix, vec_zero
from .report import Report
from .tworep import TwoRep, check_tworep, selfdual_report, skew_pairs


def _add(u, v):
    return [a + b for a, b in zip(u, v)]


def _scale(f, v):
    return [f * a if a.terms else a for a in v]


def _unit(i, size, n):
    return [Poly.const(n, 1) if j == i else Poly.zero(n) for j in range(size)]


def _columns(cols, rows, n):
    return PolyMatrix(rows, len(cols), n, [cols[j][i] for i in range(rows) for j in range(len(cols))])


# ------------------------------------------------------------ tangent double

def tangent_double(metric, conn):
    """Metric double vector bundle TE in the splitting of conn.

    Sides E (the side Q) and TM (the side B), core E read as E* through g.
    Lam_l = d_l g - M_l^T g - g M_l measures the failure of conn to be metric.
    """
    n, k = conn.bundle.chart.dim, conn.bundle.rank
    return MetricDVB.standard(n, k, n, metric_residuals(conn, metric))


def symmetrized_connection(metric, conn):
    """Connection of the Lagrangian splitting produced by symmetrize_splitting.

    A splitting change phi moves the connection matrices by g^-1 Phi_l with
    Phi_l[k, j] = phi[k][j, l].
    """
    td = tangent_double(metric, conn)
    change = symmetrize_splitting(td)
    ginv = metric.g.inverse()
    k = conn.bundle.rank
    n = conn.bundle.chart.dim
    mats = []
    for l, m in enumerate(conn.mats()):
        big_phi = PolyMatrix(k, k, n, [change.components[a][j, l] for a in range(k) for j in range(k)])
        mats.append(m + ginv @ big_phi)
    return Connection.from_mats(conn.bundle, mats), change_metric(td, change)


# ------------------------------------------------------------ Dorfman connections

class DorfmanConnection:
    """Dorfman TM + E*-connection on E + T*M, fixed by its values on frames.

    table[s][a] is Delta_{q_s}(e_a, 0) as a section of E + T*M, where q_s runs
    over (d/dx_0, .., d/dx_{n-1}, eps^0, .., eps^{k-1}). On the exact forms
    dx_mu the value is forced to vanish, and the axioms extend Delta to all
    sections. The extension is checked against the axioms at construction.
    """

    def __init__(self, n, k, table, verify=True):
        self.n, self.k = n, k
        if len(table) != n + k or any(len(row) != k for row in table):
            raise ValueError("Dorfman table needs one entry per (q frame, e frame) pair")
        for row in table:
            for val in row:
                if len(val) != k + n:
                    raise ValueError("Dorfman values are sections of E + T*M")
        self.table = [[list(v) for v in row] for row in table]
        if verify:
            bad = dorfman_axiom_report(self).failed_names()
            if bad:
                raise ValueError(f"Dorfman axiom fails: {bad[0]}")

    @classmethod
    def flat(cls, n, k):
        return cls(n, k, [[vec_zero(k + n, n) for _ in range(k)] for _ in range(n + k)])

    def pair(self, q, tau):
        n, k = self.n, self.k
        acc = Poly.zero(n)
        for a in range(k):
            acc = acc + q[n + a] * tau[a]
        for mu in range(n):
            acc = acc + q[mu] * tau[k + mu]
        return acc

    def anchor(self, q):
        return q[:self.n]

    def frame_tm(self, s):
        return _unit(s, self.n + self.k, self.n)

    def frame_dual(self, t):
        return _unit(t, self.k + self.n, self.n)

    def _on_frame(self, s, tau):
        """Delta_{q_s} tau through the first axiom."""
        n, k = self.n, self.k
        out = vec_zero(k + n, n)
        for t, g in enumerate(tau):
            if not g.terms:
                continue
            if t < k:
                out = _add(out, _scale(g, self.table[s][t]))
            if s < n:
                out[t] = out[t] + g.diff(s)
        return out

    def apply(self, q, tau):
        n, k = self.n, self.k
        out = vec_zero(k + n, n)
        for s, f in enumerate(q):
            if not f.terms:
                continue
            out = _add(out, _scale(f, self._on_frame(s, tau)))
            p = tau[k + s] if s < n else tau[s - n]
            if p.terms:
                for mu in range(n):
                    out[k + mu] = out[k + mu] + p * f.diff(mu)
        return out


def _test_functions(n):
    if n == 0:
        return [Poly.const(0, 3)]
    x = [Poly.var(n, i) for i in range(n)]
    out = [x[0] * x[0] + 1]
    if n > 1:
        out.append(x[0] * x[1] - x[1])
    return out


def dorfman_axiom_report(dorfman):
    """The three Dorfman axioms on frame sections and a few test functions."""
    n, k = dorfman.n, dorfman.k
    report = Report("dorfman")
    zero_tau = vec_zero(k + n, n)
    for fi, f in enumerate(_test_functions(n)):
        df = zero_tau[:k] + [f.diff(mu) for mu in range(n)]
        for s in range(n + k):
            q = dorfman.frame_tm(s)
            xf = apply_vector_field(dorfman.anchor(q), f)
            for t in range(k + n):
                tau = dorfman.frame_dual(t)
                lhs = dorfman.apply(q, _scale(f, tau))
                rhs = _add(_scale(f, dorfman.apply(q, tau)), _scale(xf, tau))
                report.add_residual(f"leibniz[q{s},tau{t},f{fi}]", [a - b for a, b in zip(lhs, rhs)])
                lhs = dorfman.apply(_scale(f, q), tau)
                rhs = _add(_scale(f, dorfman.apply(q, tau)), _scale(dorfman.pair(q, tau), df))
                report.add_residual(f"anchor-leibniz[q{s},tau{t},f{fi}]", [a - b for a, b in zip(lhs, rhs)])
            exact = zero_tau[:k] + [xf.diff(mu) for mu in range(n)]
            report.add_residual(f"exact[q{s},f{fi}]", [a - b for a, b in zip(dorfman.apply(q, df), exact)])
    return report


class DullBracket:
    """Anchored bracket on TM + E*, given by its values on frames.

    table[s][u] is [[q_s, q_u]] as a section of TM + E*. Frame vector fields
    commute, so the anchor condition forces the TM part of every entry to
    vanish; this is checked at construction.
    """

    def __init__(self, n, k, table):
        self.n, self.k = n, k
        for s, row in enumerate(table):
            for u, val in enumerate(row):
                if any(c.terms for c in val[:n]):
                    raise ValueError(f"anchor condition fails on frame pair ({s}, {u})")
        self.table = [[list(v) for v in row] for row in table]

    def bracket(self, q1, q2):
        n, k = self.n, self.k
        out = vec_zero(n + k, n)
        for s, f in enumerate(q1):
            if not f.terms:
                continue
            for u, g in enumerate(q2):
                if not g.terms:
                    continue
                out = _add(out, _scale(f * g, self.table[s][u]))
                if s < n:
                    out[u] = out[u] + f * g.diff(s)
                if u < n:
                    out[s] = out[s] - g * f.diff(u)
        return out

    def symmetric_part(self):
        size = self.n + self.k
        return [[_add(self.table[s][u], self.table[u][s]) for u in range(size)] for s in range(size)]

    def is_skew(self):
        return all(c.is_zero() for row in self.symmetric_part() for v in row for c in v)

    def __eq__(self, other):
        return isinstance(other, DullBracket) and self.table == other.table


def dorfman_to_dull(dorfman):
    """<[[q_s, q_u]], tau> = pr(q_s)<q_u, tau> - <q_u, Delta_{q_s} tau> on frames."""
    n, k = dorfman.n, dorfman.k
    size = n + k
    table = []
    for s in range(size):
        row = []
        for u in range(size):
            qu = dorfman.frame_tm(u)
            val = vec_zero(size, n)
            for a in range(k):
                val[n + a] = -dorfman.pair(qu, dorfman.table[s][a])
            row.append(val)
        table.append(row)
    return DullBracket(n, k, table)


def dull_to_dorfman(bracket):
    n, k = bracket.n, bracket.k
    table = []
    for s in range(n + k):
        row = []
        for a in range(k):
            # E part paired with eps^b, T*M part paired with d/dx_mu
            val = [-bracket.table[s][n + b][n + a] for b in range(k)]
            val += [-bracket.table[s][mu][n + a] for mu in range(n)]
            row.append(val)
        table.append(row)
    return DorfmanConnection(n, k, table)


def dorfman_dull_duality(x):
    if isinstance(x, DorfmanConnection):
        return dorfman_to_dull(x)
    if isinstance(x, DullBracket):
        return dull_to_dorfman(x)
    raise TypeError("expected a DorfmanConnection or a DullBracket")


def duality_report(dorfman, bracket, sections=()):
    """The defining pairing identity on frames and on extra (q1, q2, tau) triples."""
    report = Report("dorfman-dull")
    n, k = dorfman.n, dorfman.k
    triples = [(f"q{s},q{u},tau{t}", dorfman.frame_tm(s), dorfman.frame_tm(u), dorfman.frame_dual(t))
               for s in range(n + k) for u in range(n + k) for t in range(k + n)]
    triples += [(f"sample{i}", *tr) for i, tr in enumerate(sections)]
    for name, q1, q2, tau in triples:
        lhs = dorfman.pair(bracket.bracket(q1, q2), tau)
        rhs = apply_vector_field(dorfman.anchor(q1), dorfman.pair(q2, tau)) - dorfman.pair(q2, dorfman.apply(q1, tau))
        report.add_residual(f"duality[{name}]", lhs - rhs)
    return report


# ------------------------------------------------------------ pairing on TE + T*E

class PontryaginModel:
    """TE + T*E over E in fibre coordinates (x, y) with the splitting of delta.

    Elements over the point y are 4-tuples (vx, vy, px, py): tangent vector
    (vx, vy) and covector px dx + py dy.
    """

    def __init__(self, dorfman):
        self.dorfman = dorfman
        self.n, self.k = dorfman.n, dorfman.k
        self.nv = self.n + self.k

    def lift(self, f):
        return f.embed(self.nv, 0)

    def y(self, a):
        return Poly.var(self.nv, self.n + a)

    def split_lift(self, q):
        n, k, nv = self.n, self.k, self.nv
        up = self.lift
        eps = [up(e) for e in q[n:]]
        vx = [up(x) for x in q[:n]]
        vy = [Poly.zero(nv)] * k
        px = [sum((self.y(a) * eps[a].diff(mu) for a in range(k)), Poly.zero(nv)) for mu in range(n)]
        py = list(eps)
        for a in range(k):
            val = [up(c) for c in self.dorfman.apply(q, self.dorfman.frame_dual(a))]
            vy = [v - self.y(a) * c for v, c in zip(vy, val[:k])]
            px = [p - self.y(a) * c for p, c in zip(px, val[k:])]
        return vx, vy, px, py

    def core_lift(self, tau):
        n, k, nv = self.n, self.k, self.nv
        return ([Poly.zero(nv)] * n, [self.lift(c) for c in tau[:k]],
                [self.lift(t) for t in tau[k:]], [Poly.zero(nv)] * k)

    def pair(self, u, v):
        dot = lambda a, b: sum((x * y for x, y in zip(a, b)), Poly.zero(self.nv))
        return dot(u[2], v[0]) + dot(u[3], v[1]) + dot(v[2], u[0]) + dot(v[3], u[1])

    def linear(self, eps):
        """Linear function on E of a section of E*."""
        return sum((self.y(a) * self.lift(e) for a, e in enumerate(eps)), Poly.zero(self.nv))


def pontryagin_pairing_check(dorfman, bracket=None, sections=()):
    """The three pairing identities of TE + T*E in the splitting of delta.

    bracket defaults to the dull bracket dual to delta; passing another one
    tests whether the first identity notices the difference.
    """
    model = PontryaginModel(dorfman)
    bracket = bracket or dorfman_to_dull(dorfman)
    n, k = dorfman.n, dorfman.k
    report = Report("pontryagin")
    qs = [(f"q{s}", dorfman.frame_tm(s)) for s in range(n + k)]
    qs += [(f"sample{i}", q) for i, q in enumerate(sections)]
    taus = [(f"tau{t}", dorfman.frame_dual(t)) for t in range(k + n)]
    for i, (na, qa) in enumerate(qs):
        for nb, qb in qs[i:]:
            sym = _add(bracket.bracket(qa, qb), bracket.bracket(qb, qa))
            lhs = model.pair(model.split_lift(qa), model.split_lift(qb))
            report.add_residual(f"sigma-sigma[{na},{nb}].anchor", sym[:n])
            report.add_residual(f"sigma-sigma[{na},{nb}]", lhs - model.linear(sym[n:]))
        for nt, tau in taus:
            lhs = model.pair(model.split_lift(qa), model.core_lift(tau))
            report.add_residual(f"sigma-core[{na},{nt}]", lhs - model.lift(dorfman.pair(qa, tau)))
    for i, (na, ta) in enumerate(taus):
        for nb, tb in taus[i:]:
            report.add_residual(f"core-core[{na},{nb}]", model.pair(model.core_lift(ta), model.core_lift(tb)))
    return report


def is_lagrangian_splitting(dorfman):
    model = PontryaginModel(dorfman)
    size = dorfman.n + dorfman.k
    sig = [model.split_lift(dorfman.frame_tm(s)) for s in range(size)]
    return all(model.pair(sig[s], sig[u]).is_zero() for s in range(size) for u in range(s, size))


# ------------------------------------------------------------ basic 2-representation

class _BasicData:
    def __init__(self, alg, dorfman):
        if dorfman.n != alg.n or dorfman.k != alg.rank:
            raise ValueError("Dorfman connection must live on A + T*M over the algebroid base")
        self.alg, self.dorfman = alg, dorfman
        self.n, self.r = alg.n, alg.rank

    def anchor(self, a):
        return self.alg.engine.anchor_of(a)

    def d(self, tau):
        """(rho, rho*) : A + T*M -> TM + A*."""
        b, theta = tau[:self.r], tau[self.r:]
        rstar = [sum((self.alg.anchor[i, mu] * theta[mu] for mu in range(self.n)), Poly.zero(self.n))
                 for i in range(self.r)]
        return self.anchor(b) + rstar

    def form(self, q, a):
        """Delta_q(a, 0) - (0, d<alpha, a>)."""
        r, n = self.r, self.n
        val = self.dorfman.apply(q, list(a) + vec_zero(n, n))
        pa = sum((x * y for x, y in zip(q[n:], a)), Poly.zero(n))
        return val[:r] + [t - pa.diff(mu) for mu, t in enumerate(val[r:])]

    def lie_core(self, a, tau):
        """([a, b], Lie derivative of theta along rho(a))."""
        r, n = self.r, self.n
        v = self.anchor(a)
        b, theta = tau[:r], tau[r:]
        form = [sum((v[nu] * theta[mu].diff(nu) + theta[nu] * v[nu].diff(mu) for nu in range(n)),
                    Poly.zero(n)) for mu in range(n)]
        return self.alg.bracket(a, b) + form

    def lie_side(self, a, q):
        """([rho(a), X], Lie derivative of alpha along a)."""
        r, n = self.r, self.n
        x, alpha = q[:n], q[n:]
        v = self.anchor(a)
        out = vector_field_bracket(v, x)
        for j in range(r):
            br = self.alg.bracket(a, self.alg.frame(j))
            val = apply_vector_field(v, alpha[j])
            val = val - sum((alpha[c] * br[c] for c in range(r)), Poly.zero(n))
            out.append(val)
        return out

    def conn_side(self, a, q):
        return _add(self.d(self.form(q, a)), self.lie_side(a, q))

    def conn_core(self, a, tau):
        return _add(self.form(self.d(tau), a), self.lie_core(a, tau))

    def curvature(self, a, b, q):
        out = [-c for c in self.form(q, self.alg.bracket(a, b))]
        out = _add(out, self.lie_core(a, self.form(q, b)))
        out = [x - y for x, y in zip(out, self.lie_core(b, self.form(q, a)))]
        out = _add(out, self.form(self.conn_side(b, q), a))
        return [x - y for x, y in zip(out, self.form(self.conn_side(a, q), b))]


def pairing_identification(n, r):
    """E0 = A + T*M -> (TM + A*)*, written in the frame dual to (d/dx, eps)."""
    g = PolyMatrix.zero(n + r, r + n, n)
    for mu in range(n):
        g = g.replace(mu, r + mu, 1)
    for i in range(r):
        g = g.replace(n + i, i, 1)
    return g


def basic_tworep(alg, dorfman):
    """Basic 2-representation of alg on (rho, rho*): A + T*M -> TM + A*."""
    data = _BasicData(alg, dorfman)
    n, r = alg.n, alg.rank
    size = n + r
    frame = lambda i: _unit(i, size, n)
    a_frame = [alg.frame(i) for i in range(r)]
    d = _columns([data.d(frame(t)) for t in range(size)], size, n)
    m0 = [_columns([data.conn_core(a, frame(t)) for t in range(size)], size, n) for a in a_frame]
    m1 = [_columns([data.conn_side(a, frame(s)) for s in range(size)], size, n) for a in a_frame]
    curv = [[PolyMatrix.zero(size, size, n) for _ in range(r)] for _ in range(r)]
    for i, j in skew_pairs(r):
        val = _columns([data.curvature(a_frame[i], a_frame[j], frame(s)) for s in range(size)], size, n)
        curv[i][j] = val
        curv[j][i] = -val
    return TwoRep(alg, size, size, d, m0, m1, curv, pairing_identification(n, r))


def basic_flags(alg, dorfman):
    """Skew dull bracket, Lagrangian splitting and dual basic connections, side by side."""
    rep = basic_tworep(alg, dorfman)
    sd = selfdual_report(rep)
    dual_conn = all(c.ok for c in sd.checks if c.name.startswith("dual-connections"))
    return {"skew-bracket": dorfman_to_dull(dorfman).is_skew(),
            "lagrangian": is_lagrangian_splitting(dorfman),
            "dual-connections": dual_conn,
            "selfdual": sd.ok,
            "tworep": check_tworep(rep).ok}


# ------------------------------------------------------------ cotangent double

def _metric_derivation_ops(metric, conn):
    """Generators of the metric derivations: covariant derivatives and skew endomorphisms."""
    n, k = conn.bundle.chart.dim, conn.bundle.rank
    g = metric.g
    ginv = g.inverse()
    ops = []
    for b in range(n):
        ops.append((f"nabla{b}", _unit(b, n, n), PolyMatrix.zero(k, k, n)))
    for a in range(k):
        for c in range(a + 1, k):
            h = PolyMatrix.zero(k, k, n).replace(c, a, 1).replace(a, c, -1)
            ops.append((f"skew{a}{c}", vec_zero(n, n), (ginv @ h).scale(-1)))
    return ops


def _derivation_apply(mats, x, endo, e):
    n = len(x)
    out = endo.apply(e)
    for mu in range(n):
        if x[mu].terms:
            cov = [de + v for de, v in zip([c.diff(mu) for c in e], mats[mu].apply(e))]
            out = _add(out, _scale(x[mu], cov))
    return out


def _derivation_commutator(mats, d1, d2):
    """[delta1, delta2] = (vector field, endomorphism relative to the connection)."""
    _, x1, p1 = d1
    _, x2, p2 = d2
    n = len(x1)
    k = p1.rows
    xc = vector_field_bracket(x1, x2)
    zero = PolyMatrix.zero(k, k, n)
    cols = []
    for j in range(k):
        e = _unit(j, k, n)
        c = [u - v for u, v in zip(_derivation_apply(mats, x1, p1, _derivation_apply(mats, x2, p2, e)),
                                   _derivation_apply(mats, x2, p2, _derivation_apply(mats, x1, p1, e)))]
        cols.append([u - v for u, v in zip(c, _derivation_apply(mats, xc, zero, e))])
    return xc, _columns(cols, k, n)


def cotangent_involution_check(metric, conn):
    """Involution of T*E and the Poisson brackets of the cotangent double of a metric bundle."""
    if not metric_compatibility(conn, metric):
        raise ValueError("connection is not compatible with the fibre metric")
    n, k = conn.bundle.chart.dim, conn.bundle.rank
    g = metric.g
    mats = conn.mats()
    report = Report("cotangent-double")
    inv = metric_to_involutive(tangent_double(metric, conn))
    report.extend(inv.check())
    report.add("involution-is-swap", inv.is_involutive_decomposition())

    # d_{e1} l_{e2} + theta  ->  d_{e2} l_{e1} - (theta + d<e1, e2>), for constant e1, e2
    nv = n + 2 * k + n
    var = lambda i: Poly.var(nv, i)
    e1 = [var(n + a) for a in range(k)]
    e2 = [var(n + k + a) for a in range(k)]
    theta = [var(n + 2 * k + mu) for mu in range(n)]
    gg = g.embed(nv)
    ms = [m.embed(nv) for m in mats]
    bil = lambda u, mat, v: sum((u[i] * mat[i, j] * v[j] for i in range(k) for j in range(k)), Poly.zero(nv))

    def to_decomposed(point, r, p):
        # r = g q2 and p_l = beta_l + q2^T g M_l q1 in the splitting of conn
        q2 = gg.inverse().apply(r)
        return point, q2, [p[l] - bil(q2, gg @ ms[l], point) for l in range(n)]

    p_src = [bil(e1, gg.diff(mu), e2) + theta[mu] for mu in range(n)]
    src = to_decomposed(e1, gg.apply(e2), p_src)
    p_img = [bil(e2, gg.diff(mu), e1) - theta[mu] - (bil(e1, gg, e2)).diff(mu) for mu in range(n)]
    img = to_decomposed(e2, gg.apply(e1), p_img)
    inv_big = type(inv)(inv.host, [m.embed(nv) for m in inv.kappa])
    ours = inv_big.involution(src)
    res = [a - b for pa, pb in zip(ours, img) for a, b in zip(pa, pb)]
    report.add_residual("reversal-formula", res)

    p = symplectic_from_metric_bundle(metric, conn)
    report.add("symplectic", is_symplectic(p))
    m, rb = k, n
    br = p.bracket

    def fn_e(e):
        ge = g.apply(e)
        out = GradedFunction.zero(n, m, rb)
        for a, c in enumerate(ge):
            if c.terms:
                out = out + GradedFunction.odd(n, m, rb, a).scale(c)
        return out

    def fn_delta(x, endo):
        out = two_form_of((g @ endo).scale(-1), n, m, rb)
        for b, c in enumerate(x):
            if c.terms:
                out = out + GradedFunction.even(n, m, rb, b).scale(c)
        return out

    ops = _metric_derivation_ops(metric, conn)
    es = [(f"e{a}", _unit(a, k, n)) for a in range(k)]
    fs = [(f"x{mu}", Poly.var(n, mu)) for mu in range(n)]
    scalar = lambda f: GradedFunction.scalar(n, m, rb, f)
    for i, d1 in enumerate(ops):
        for d2 in ops[i:]:
            xc, pc = _derivation_commutator(mats, d1, d2)
            report.add_residual(f"{{{d1[0]},{d2[0]}}}",
                                br(fn_delta(d1[1], d1[2]), fn_delta(d2[1], d2[2])) - fn_delta(xc, pc))
        for ne, e in es:
            report.add_residual(f"{{{d1[0]},{ne}}}",
                                br(fn_delta(d1[1], d1[2]), fn_e(e)) - fn_e(_derivation_apply(mats, d1[1], d1[2], e)))
        for nf, f in fs:
            report.add_residual(f"{{{d1[0]},{nf}}}",
                                br(fn_delta(d1[1], d1[2]), scalar(f)) - scalar(apply_vector_field(d1[1], f)))
    for i, (na, ea) in enumerate(es):
        for nb, eb in es[i:]:
            report.add_residual(f"{{{na},{nb}}}", br(fn_e(ea), fn_e(eb)) - scalar(metric.pair(ea, eb)))
        for nf, f in fs:
            report.add_residual(f"{{{na},{nf}}}", br(fn_e(ea), scalar(f)))
    for i, (na, fa) in enumerate(fs):
        for nb, fb in fs[i:]:
            report.add_residual(f"{{{na},{nb}}}", br(scalar(fa), scalar(fb)))

    _, anti = dual_linear_poisson(inv, p.rep)
    report.extend(anti, "linear:")
    return report
