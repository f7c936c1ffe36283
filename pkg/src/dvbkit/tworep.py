"""2-term representations up to homotopy of a Lie algebroid.

A TwoRep of the algebroid A on the complex d: E0 -> E1 stores

* d as a rank(E1) x rank(E0) PolyMatrix,
* the two A-connections through their matrices m0[i], m1[i], so that the
  derivative along a_i is rho(a_i) componentwise plus the matrix,
* the curvature term curv[i][j]: E1 -> E0, antisymmetric in (i, j).

An optional identification E0 -> E1* (a unimodular matrix) marks the
representation as a candidate for self-duality.
"""

from dataclasses import dataclass

from .bundles import (AConnection, FreeAlgebroid, algebroid_curvature, apply_vector_field,
                      apply_vf_to_matrix, hom_derivative)
from .polycore import Poly, PolyMatrix, block_diag, vec_zero
from .report import Report


@dataclass
class TwoRep:
    algebroid: object
    rank0: int
    rank1: int
    d: PolyMatrix
    m0: list
    m1: list
    curv: list
    identification: PolyMatrix = None

    def __post_init__(self):
        r = self.algebroid.rank
        n = self.algebroid.n
        if (self.d.rows, self.d.cols) != (self.rank1, self.rank0):
            raise ValueError("d must be rank1 x rank0")
        if len(self.m0) != r or len(self.m1) != r:
            raise ValueError("one connection matrix per algebroid frame element")
        for m in self.m0:
            if (m.rows, m.cols) != (self.rank0, self.rank0):
                raise ValueError("E0 connection matrix has the wrong shape")
        for m in self.m1:
            if (m.rows, m.cols) != (self.rank1, self.rank1):
                raise ValueError("E1 connection matrix has the wrong shape")
        if len(self.curv) != r or any(len(row) != r for row in self.curv):
            raise ValueError("curvature must be indexed by pairs of frame elements")
        for row in self.curv:
            for m in row:
                if (m.rows, m.cols) != (self.rank0, self.rank1) or m.n_vars != n:
                    raise ValueError("curvature entries map E1 to E0")

    @property
    def n(self):
        return self.algebroid.n

    def connection0(self):
        return AConnection(self.algebroid, self.rank0, self.m0)

    def connection1(self):
        return AConnection(self.algebroid, self.rank1, self.m1)

    def hom_derivative(self, i, shift):
        """Induced derivative on Hom(E1, E0)."""
        return hom_derivative(self.algebroid, i, shift, self.m1, self.m0)

    def replace(self, **kw):
        data = dict(algebroid=self.algebroid, rank0=self.rank0, rank1=self.rank1, d=self.d,
                    m0=self.m0, m1=self.m1, curv=self.curv, identification=self.identification)
        data.update(kw)
        return TwoRep(**data)

    def same_data(self, other):
        return (self.d == other.d and self.m0 == other.m0 and self.m1 == other.m1
                and self.curv == other.curv)

    def __eq__(self, other):
        return isinstance(other, TwoRep) and self.same_data(other)


def zero_curvature(r, rank0, rank1, n):
    return [[PolyMatrix.zero(rank0, rank1, n) for _ in range(r)] for _ in range(r)]


def zero_rep(algebroid, rank0, rank1):
    r, n = algebroid.rank, algebroid.n
    return TwoRep(algebroid, rank0, rank1, PolyMatrix.zero(rank1, rank0, n),
                  [PolyMatrix.zero(rank0, rank0, n) for _ in range(r)],
                  [PolyMatrix.zero(rank1, rank1, n) for _ in range(r)],
                  zero_curvature(r, rank0, rank1, n))


def tangent_rep(conn):
    """(Id, nabla, nabla, R_nabla) for an A-connection on E."""
    alg = conn.algebroid
    e = conn.rank
    return TwoRep(alg, e, e, PolyMatrix.identity(e, alg.n), list(conn.mats), list(conn.mats),
                  conn.curvature())


def skew_pairs(r):
    return [(i, j) for i in range(r) for j in range(i + 1, r)]


def d_hom(rep, form):
    """Exterior covariant derivative of a Hom(E1, E0)-valued 2-form on frame triples."""
    alg = rep.algebroid
    r = alg.rank
    out = {}
    for i in range(r):
        for j in range(i + 1, r):
            for k in range(j + 1, r):
                acc = PolyMatrix.zero(rep.rank0, rep.rank1, alg.n)
                for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
                    acc = acc + rep.hom_derivative(a, form[b][c])
                    for l in range(r):
                        coeff = alg.structure[a][b][l]
                        if coeff.terms:
                            acc = acc - form[l][c].map(lambda e: e * coeff)
                out[(i, j, k)] = acc
    return out


def check_tworep(rep):
    """Symbolic residuals of the 2-representation axioms."""
    report = Report("tworep")
    alg = rep.algebroid
    r = alg.rank
    for i in range(r):
        for j in range(i, r):
            report.add_residual(f"skew[a{i},a{j}]", rep.curv[i][j] + rep.curv[j][i])
    for i in range(r):
        anchor = alg.anchor_field(i)
        res = rep.d @ rep.m0[i] - apply_vf_to_matrix(anchor, rep.d) - rep.m1[i] @ rep.d
        report.add_residual(f"chain[a{i}]", res)
    c0 = algebroid_curvature(alg, rep.m0)
    c1 = algebroid_curvature(alg, rep.m1)
    for i, j in skew_pairs(r):
        report.add_residual(f"curv0[a{i},a{j}]", c0[i][j] - rep.curv[i][j] @ rep.d)
        report.add_residual(f"curv1[a{i},a{j}]", c1[i][j] - rep.d @ rep.curv[i][j])
    for (i, j, k), res in d_hom(rep, rep.curv).items():
        report.add_residual(f"dR[a{i},a{j},a{k}]", res)
    return report


def twist(rep, shift):
    """Change of splitting by phi[i]: E1 -> E0 (one matrix per frame element)."""
    alg = rep.algebroid
    r = alg.rank
    m1 = [m + rep.d @ p for m, p in zip(rep.m1, shift)]
    m0 = [m + p @ rep.d for m, p in zip(rep.m0, shift)]
    curv = [[None] * r for _ in range(r)]
    for i in range(r):
        curv[i][i] = rep.curv[i][i]
        for j in range(i + 1, r):
            val = (rep.curv[i][j] + rep.hom_derivative(i, shift[j]) - rep.hom_derivative(j, shift[i])
                   + shift[i] @ rep.d @ shift[j] - shift[j] @ rep.d @ shift[i])
            for l in range(r):
                coeff = alg.structure[i][j][l]
                if coeff.terms:
                    val = val - shift[l].map(lambda e: e * coeff)
            curv[i][j] = val
            curv[j][i] = -val
    return rep.replace(m0=m0, m1=m1, curv=curv)


def negate_twist(shift):
    return [-p for p in shift]


def dualize_rep(rep):
    """(d^T, -(m1)^T, -(m0)^T, -R^T) on the complex E1* -> E0*."""
    r = rep.algebroid.rank
    curv = [[-rep.curv[i][j].T() for j in range(r)] for i in range(r)]
    ident = None
    if rep.identification is not None:
        ident = rep.identification.inverse()
    return TwoRep(rep.algebroid, rep.rank1, rep.rank0, rep.d.T(),
                  [-m.T() for m in rep.m1], [-m.T() for m in rep.m0], curv, ident)


def reframe(rep, p0, p1):
    """Same representation in new frames: new E0 coordinates p0 u, new E1 coordinates p1 v."""
    alg = rep.algebroid
    q0, q1 = p0.inverse(), p1.inverse()

    def gauge(p, q, m, i):
        return p @ m @ q + p @ apply_vf_to_matrix(alg.anchor_field(i), q)

    r = alg.rank
    ident = rep.identification @ q0 if rep.identification is not None else None
    if ident is not None:
        ident = q1.T() @ ident
    return TwoRep(alg, rep.rank0, rep.rank1, p1 @ rep.d @ q0,
                  [gauge(p0, q0, m, i) for i, m in enumerate(rep.m0)],
                  [gauge(p1, q1, m, i) for i, m in enumerate(rep.m1)],
                  [[p0 @ rep.curv[i][j] @ q1 for j in range(r)] for i in range(r)], ident)


def direct_sum(r1, r2):
    alg = r1.algebroid
    r = alg.rank
    return TwoRep(alg, r1.rank0 + r2.rank0, r1.rank1 + r2.rank1, block_diag(r1.d, r2.d),
                  [block_diag(a, b) for a, b in zip(r1.m0, r2.m0)],
                  [block_diag(a, b) for a, b in zip(r1.m1, r2.m1)],
                  [[block_diag(r1.curv[i][j], r2.curv[i][j]) for j in range(r)] for i in range(r)])


def swap_identification(p, q, n):
    """Identification (E0 + E1*) -> (E1 + E0*)* = (E1* + E0) swapping the blocks."""
    m = PolyMatrix.zero(q + p, p + q, n)
    for i in range(q):
        m = m.replace(i, p + i, 1)
    for j in range(p):
        m = m.replace(q + j, j, 1)
    return m


def direct_sum_double(rep):
    """rep + dual(rep) on E0 + E1* -> E1 + E0*, self-dual under the block swap."""
    dual = dualize_rep(rep)
    out = direct_sum(rep, dual)
    return out.replace(identification=swap_identification(rep.rank0, rep.rank1, rep.n))


def canonical_form(rep):
    """Move E0 onto E1* through the identification, so that it becomes the identity."""
    if rep.identification is None:
        raise ValueError("identification E0 -> E1* missing")
    g = rep.identification
    out = reframe(rep, g, PolyMatrix.identity(rep.rank1, rep.n))
    return out.replace(identification=PolyMatrix.identity(rep.rank1, rep.n))


def selfdual_residuals(rep):
    if rep.identification is None:
        raise ValueError("identification E0 -> E1* missing")
    if rep.rank0 != rep.rank1:
        raise ValueError("self-duality needs rank E0 = rank E1")
    g = rep.identification
    alg = rep.algebroid
    out = {"symmetric-d": g.T() @ rep.d - rep.d.T() @ g}
    for i in range(alg.rank):
        out[f"dual-connections[a{i}]"] = (apply_vf_to_matrix(alg.anchor_field(i), g) - g @ rep.m0[i]
                                          - rep.m1[i].T() @ g)
    for i, j in skew_pairs(alg.rank):
        gr = g @ rep.curv[i][j]
        out[f"skew-curvature[a{i},a{j}]"] = gr + gr.T()
    return out


def selfdual_report(rep):
    report = Report("selfdual")
    for name, res in selfdual_residuals(rep).items():
        report.add_residual(name, res)
    return report


def is_selfdual(rep):
    return selfdual_report(rep).ok


# --------------------------------------------------------------- adjoint

def _tm_derivative(mats, x_field, a):
    """nabla_X a for a TM-connection on A given by its matrices."""
    n = len(x_field)
    out = vec_zero(len(a), n)
    for mu, x in enumerate(x_field):
        if not x.terms:
            continue
        da = [c.diff(mu) for c in a]
        da = [u + v for u, v in zip(da, mats[mu].apply(a))]
        out = [o + x * v for o, v in zip(out, da)]
    return out


def adjoint_rep(algebroid, conn):
    """Adjoint representation on rho: A -> TM from a TM-connection on A."""
    n, r = algebroid.n, algebroid.rank
    if conn.bundle.rank != r or conn.bundle.chart.dim != n:
        raise ValueError("connection must live on A over the same chart")
    mats = conn.mats()
    one = Poly.const(n, 1)
    a_frame = [algebroid.frame(i) for i in range(r)]
    x_frame = [[one if k == mu else Poly.zero(n) for k in range(n)] for mu in range(n)]
    anchor_of = algebroid.engine.anchor_of

    def covariant(x, a):
        return _tm_derivative(mats, x, a)

    def bas_tm(a, x):
        ra = anchor_of(a)
        br = [apply_vector_field(ra, xv) - apply_vector_field(x, rv) for rv, xv in zip(ra, x)]
        return [u + v for u, v in zip(br, anchor_of(covariant(x, a)))]

    def bas_a(a1, a2):
        return [u + v for u, v in zip(algebroid.bracket(a1, a2), covariant(anchor_of(a2), a1))]

    def bas_curv(a1, a2, x):
        out = [-v for v in covariant(x, algebroid.bracket(a1, a2))]
        out = [o + v for o, v in zip(out, algebroid.bracket(covariant(x, a1), a2))]
        out = [o + v for o, v in zip(out, algebroid.bracket(a1, covariant(x, a2)))]
        out = [o + v for o, v in zip(out, covariant(bas_tm(a2, x), a1))]
        out = [o - v for o, v in zip(out, covariant(bas_tm(a1, x), a2))]
        return out

    def columns(cols, rows):
        return PolyMatrix(rows, len(cols), n, [cols[j][i] for i in range(rows) for j in range(len(cols))])

    m1 = [columns([bas_tm(a_frame[i], x_frame[mu]) for mu in range(n)], n) for i in range(r)]
    m0 = [columns([bas_a(a_frame[i], a_frame[j]) for j in range(r)], r) for i in range(r)]
    curv = zero_curvature(r, r, n, n)
    for i, j in skew_pairs(r):
        val = columns([bas_curv(a_frame[i], a_frame[j], x_frame[mu]) for mu in range(n)], r)
        curv[i][j] = val
        curv[j][i] = -val
    return TwoRep(algebroid, r, n, algebroid.anchor.T(), m0, m1, curv)


def connection_difference(conn_new, conn_old):
    """phi[i]: TM -> A with phi(a_i)(X) = (nabla' - nabla)_X a_i."""
    new, old = conn_new.mats(), conn_old.mats()
    n = conn_new.bundle.chart.dim
    r = conn_new.bundle.rank
    out = []
    for i in range(r):
        ent = [[(new[mu] - old[mu])[k, i] for mu in range(n)] for k in range(r)]
        out.append(PolyMatrix.from_rows(ent, n) if r else PolyMatrix.zero(0, n, n))
    return out


# --------------------------------------------------------------- realization

class VBAlgebroidRealization:
    """Linear Lie algebroid D -> B built from a 2-representation.

    Coefficients are polynomials in the base coordinates x and the fibre
    coordinates y of B = E1. The generators are the lifts s_i of the frame of
    A followed by the core sections c_j (frame of E0).
    """

    def __init__(self, rep):
        self.rep = rep
        alg = rep.algebroid
        n, p, q, r = alg.n, rep.rank0, rep.rank1, alg.rank
        self.n_vars = nv = n + q
        self.rank_a, self.rank_c = r, p
        ys = [Poly.var(nv, n + k) for k in range(q)]
        self.ys = ys
        emb = lambda f: f.embed(nv, 0)
        anchors = []
        for i in range(r):
            base = [emb(c) for c in alg.anchor_field(i)]
            fib = [-sum((emb(rep.m1[i][k, l]) * ys[l] for l in range(q)), Poly.zero(nv)) for k in range(q)]
            anchors.append(base + fib)
        for j in range(p):
            anchors.append([Poly.zero(nv)] * n + [emb(rep.d[k, j]) for k in range(q)])
        size = r + p
        table = [[vec_zero(size, nv) for _ in range(size)] for _ in range(size)]
        for i in range(r):
            for j in range(r):
                if i == j:
                    continue
                coeffs = [emb(c) for c in alg.structure[i][j]]
                core = [-sum((emb(rep.curv[i][j][l, k]) * ys[k] for k in range(q)), Poly.zero(nv))
                        for l in range(p)]
                table[i][j] = coeffs + core
            for j in range(p):
                val = vec_zero(size, nv)
                for l in range(p):
                    val[r + l] = emb(rep.m0[i][l, j])
                table[i][r + j] = val
                table[r + j][i] = [-v for v in val]
        labels = [f"s{i}" for i in range(r)] + [f"c{j}" for j in range(p)]
        self.engine = FreeAlgebroid(nv, anchors, table, labels)

    def bracket(self, s, t):
        return self.engine.bracket(s, t)

    def core_linear(self, core_map):
        """Section of D -> B given by the core-linear map psi: E1 -> E0."""
        nv, r = self.n_vars, self.rank_a
        out = vec_zero(r + self.rank_c, nv)
        for l in range(self.rank_c):
            out[r + l] = sum((core_map[l, k].embed(nv, 0) * self.ys[k] for k in range(core_map.cols)),
                             Poly.zero(nv))
        return out

    def lift(self, i):
        return self.engine.frame(i)

    def jacobi_report(self):
        return self.engine.check("vb-algebroid")


def realize_vb_algebroid(rep):
    return VBAlgebroidRealization(rep)


def _skew_basis(q, n):
    """Maps E1 -> E1* for xi_k xi_l (k < l): entry (l, k) = 1, entry (k, l) = -1."""
    out = []
    for k in range(q):
        for l in range(k + 1, q):
            m = PolyMatrix.zero(q, q, n).replace(l, k, 1).replace(k, l, -1)
            out.append(((k, l), m))
    return out


def _decompose_linear(real, section, ident_inv_t):
    """Split a bracket result into (base part, core-linear matrix, residual terms)."""
    nv, n, r = real.n_vars, real.rep.n, real.rank_a
    q = real.rep.rank1
    y_idx = list(range(n, nv))
    bad = []
    for i in range(r):
        if section[i].degree_in(y_idx) > 0:
            bad.append(section[i])
    rows = []
    for l in range(real.rank_c):
        parts = section[r + l].split_by(y_idx)
        row = []
        for k in range(q):
            key = tuple(1 if t == k else 0 for t in range(q))
            row.append(parts.pop(key, Poly.zero(nv)).restrict(0, n) if q else None)
        bad.extend(parts.values())
        rows.append(row)
    core_map = PolyMatrix.from_rows(rows, n) if rows else PolyMatrix.zero(0, q, n)
    return core_map, bad


def metric_vb_check(metric, rep):
    """Self-duality of rep plus closure of brackets of isotropic linear sections.

    metric must be Lagrangian (zero Lambda) for the splitting that produced rep;
    rep acts on E0 = Q* -> E1 = Q with its identification (identity if absent).
    """
    if not metric.is_lagrangian():
        raise ValueError("metric_vb_check needs a Lagrangian splitting (Lambda = 0)")
    if rep.identification is None:
        rep = rep.replace(identification=PolyMatrix.identity(rep.rank1, rep.n))
    report = Report("metric-vb")
    selfdual = selfdual_report(rep)
    report.extend(selfdual, "selfdual:")
    real = realize_vb_algebroid(rep)
    g = rep.identification
    ginv = g.inverse()
    n, r, q = rep.n, rep.algebroid.rank, rep.rank1
    lifts = [(f"a{i}", real.lift(i)) for i in range(r)]
    # isotropic core-linear sections: forms on Q pulled back to E0 through g^{-1}
    forms = [(f"w{k}{l}", real.core_linear(ginv @ m)) for (k, l), m in _skew_basis(q, n)]

    def closure(tag, s, t):
        core_map, bad = _decompose_linear(real, real.bracket(s, t), None)
        form = g @ core_map
        iso = form + form.T()
        ok = not bad and iso.is_zero()
        report.add(f"closure[{tag}]", ok, "" if ok else f"non-isotropic part {iso!r}")

    for a, (na, sa) in enumerate(lifts):
        for nb, sb in lifts[a + 1:]:
            closure(f"sigma,sigma:{na},{nb}", sa, sb)
    for na, sa in lifts:
        for nw, sw in forms:
            closure(f"sigma,omega:{na},{nw}", sa, sw)
    for a, (na, sa) in enumerate(forms):
        for nb, sb in forms[a:]:
            closure(f"omega,omega:{na},{nb}", sa, sb)
    return selfdual.ok, report
