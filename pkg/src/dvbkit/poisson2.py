"""Degree -2 Poisson brackets on split [2]-manifolds and linear Poisson structures.

Functions on the split [2]-manifold Q[-1] + B*[-2] over R^n are polynomials
in odd generators xi_a (a frame of Q*, degree 1) and even generators eta_b
(a frame of B, degree 2) with coefficients in the base ring. A self-dual
2-representation of B on d: Q* -> Q, with the identity identification,
gives the bracket on generators

    {xi_a, xi_b}   = d[b, a]
    {eta_b, x}     = rho(b_b)(x)
    {eta_b, xi_a}  = sum_c M0_b[c, a] xi_c
    {eta_b, eta_c} = sum_d c^d_bc eta_d - 2form(R_bc)

where 2form(H) = sum_{k<l} H[l, k] xi_k xi_l, the reading of a map
Q -> Q* as a 2-form in the determinant convention.
"""

from dataclasses import dataclass
from fractions import Fraction

from .bundles import LieAlgebroidModel, connection_curvature, metric_compatibility
from .metricdvb import FunctionEmbedding, InvolutiveDVB
from .polycore import Poly, PolyMatrix
from .report import Report
from .tworep import (TwoRep, canonical_form, check_tworep, realize_vb_algebroid, selfdual_report)


class CapExceeded(ValueError):
    pass


def _merge_sign(a, b):
    """Sign of sorting the concatenation of two sorted odd index tuples."""
    inv = 0
    for i in a:
        for j in b:
            if i > j:
                inv += 1
    return -1 if inv % 2 else 1


class GradedFunction:
    """Element of the graded algebra as {(odd indices, eta exponents): Poly}."""

    __slots__ = ("n", "m", "rb", "terms")

    def __init__(self, n, m, rb, terms=None):
        self.n, self.m, self.rb = n, m, rb
        self.terms = {k: v for k, v in (terms or {}).items() if v.terms}

    # constructors
    @classmethod
    def zero(cls, n, m, rb):
        return cls(n, m, rb)

    @classmethod
    def scalar(cls, n, m, rb, f):
        if not isinstance(f, Poly):
            f = Poly.const(n, f)
        return cls(n, m, rb, {((), (0,) * rb): f})

    @classmethod
    def base(cls, n, m, rb, mu):
        return cls.scalar(n, m, rb, Poly.var(n, mu))

    @classmethod
    def odd(cls, n, m, rb, a):
        """Degree 1 generator."""
        return cls(n, m, rb, {((a,), (0,) * rb): Poly.const(n, 1)})

    @classmethod
    def even(cls, n, m, rb, b):
        """Degree 2 generator."""
        return cls(n, m, rb, {((), tuple(1 if i == b else 0 for i in range(rb))): Poly.const(n, 1)})

    def _like(self, terms):
        return GradedFunction(self.n, self.m, self.rb, terms)

    # algebra
    def __add__(self, other):
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out[k] + v if k in out else v
        return self._like(out)

    def __neg__(self):
        return self._like({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, f):
        if not isinstance(f, Poly):
            f = Poly.const(self.n, f)
        return self._like({k: v * f for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (Poly, int, Fraction)):
            return self.scale(other)
        out = {}
        for (o1, e1), c1 in self.terms.items():
            for (o2, e2), c2 in other.terms.items():
                if set(o1) & set(o2):
                    continue
                key = (tuple(sorted(o1 + o2)), tuple(x + y for x, y in zip(e1, e2)))
                val = c1 * c2
                if _merge_sign(o1, o2) < 0:
                    val = -val
                out[key] = out[key] + val if key in out else val
        return self._like(out)

    def __eq__(self, other):
        return isinstance(other, GradedFunction) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self):
        return not self.terms

    def degree(self):
        if not self.terms:
            return -1
        return max(len(o) + 2 * sum(e) for o, e in self.terms)

    def degrees(self):
        return {len(o) + 2 * sum(e) for o, e in self.terms}

    def parity(self):
        ps = {d % 2 for d in self.degrees()}
        if len(ps) > 1:
            raise ValueError("function is not of pure parity")
        return ps.pop() if ps else 0

    def coefficient(self, odd=(), even=None):
        even = tuple(even) if even is not None else (0,) * self.rb
        return self.terms.get((tuple(odd), even), Poly.zero(self.n))

    # derivatives
    def d_base(self, mu):
        return self._like({k: v.diff(mu) for k, v in self.terms.items()})

    def d_even(self, b):
        out = {}
        for (o, e), c in self.terms.items():
            if e[b]:
                ne = list(e)
                ne[b] -= 1
                out[(o, tuple(ne))] = c * e[b]
        return self._like(out)

    def _d_odd(self, a, right):
        out = {}
        for (o, e), c in self.terms.items():
            if a in o:
                p = o.index(a)
                k = len(o)
                sign = (k - 1 - p) if right else p
                out[(o[:p] + o[p + 1:], e)] = -c if sign % 2 else c
        return self._like(out)

    def d_odd_left(self, a):
        return self._d_odd(a, False)

    def d_odd_right(self, a):
        return self._d_odd(a, True)

    def to_str(self):
        if not self.terms:
            return "0"
        parts = []
        for (o, e), c in sorted(self.terms.items()):
            mono = "".join(f"*xi{a}" for a in o)
            mono += "".join(f"*eta{b}^{k}" if k > 1 else f"*eta{b}" for b, k in enumerate(e) if k)
            parts.append(f"({c.to_str()}){mono}")
        return " + ".join(parts)

    def __repr__(self):
        return self.to_str()


def two_form_of(h, n, m, rb):
    """Function sum_{k<l} h[l, k] xi_k xi_l for a map Q -> Q*."""
    out = {}
    zero_e = (0,) * rb
    for k in range(m):
        for l in range(k + 1, m):
            if h[l, k].terms:
                out[((k, l), zero_e)] = h[l, k]
    return GradedFunction(n, m, rb, out)


# ------------------------------------------------------------ generators

class Generators:
    """Index scheme of the coordinate generators: base, degree 1, degree 2."""

    def __init__(self, n, m, rb):
        self.n, self.m, self.rb = n, m, rb
        self.count = n + m + rb

    def kind(self, u):
        if u < self.n:
            return "base", u
        if u < self.n + self.m:
            return "odd", u - self.n
        return "even", u - self.n - self.m

    def degree(self, u):
        return {"base": 0, "odd": 1, "even": 2}[self.kind(u)[0]]

    def label(self, u):
        kind, i = self.kind(u)
        return {"base": "x", "odd": "tau", "even": "b"}[kind] + str(i)

    def function(self, u):
        kind, i = self.kind(u)
        n, m, rb = self.n, self.m, self.rb
        if kind == "base":
            return GradedFunction.base(n, m, rb, i)
        if kind == "odd":
            return GradedFunction.odd(n, m, rb, i)
        return GradedFunction.even(n, m, rb, i)

    def right_derivative(self, f, u):
        kind, i = self.kind(u)
        if kind == "base":
            return f.d_base(i)
        if kind == "odd":
            return f.d_odd_right(i)
        return f.d_even(i)

    def left_derivative(self, f, u):
        kind, i = self.kind(u)
        if kind == "base":
            return f.d_base(i)
        if kind == "odd":
            return f.d_odd_left(i)
        return f.d_even(i)


@dataclass
class GeneratorTable:
    """Brackets of coordinate generators: entries[(u, v)] (missing means zero)."""

    n: int
    m: int
    rb: int
    entries: dict

    def get(self, u, v):
        return self.entries.get((u, v)) or GradedFunction.zero(self.n, self.m, self.rb)

    def __eq__(self, other):
        if not isinstance(other, GeneratorTable) or (self.n, self.m, self.rb) != (other.n, other.m, other.rb):
            return False
        keys = set(self.entries) | set(other.entries)
        return all(self.get(*k) == other.get(*k) for k in keys)


def bracket_from_table(table, f, g, cap=None):
    gens = Generators(table.n, table.m, table.rb)
    if cap is not None:
        df, dg = f.degree(), g.degree()
        if df > cap or dg > cap or df + dg - 2 > cap:
            raise CapExceeded(f"bracket degree exceeds the cap {cap}")
    out = GradedFunction.zero(table.n, table.m, table.rb)
    rights = {u: gens.right_derivative(f, u) for u in range(gens.count)}
    lefts = {v: gens.left_derivative(g, v) for v in range(gens.count)}
    for u, fu in rights.items():
        if fu.is_zero():
            continue
        for v, gv in lefts.items():
            if gv.is_zero():
                continue
            t = table.entries.get((u, v))
            if t is None or t.is_zero():
                continue
            out = out + fu * t * gv
    return out


# ------------------------------------------------------------ Poisson [2]-manifold

class PoissonStructure2:
    """Poisson bracket of degree -2 defined by a self-dual 2-representation.

    The representation acts on d: Q* -> Q; it is brought to canonical form
    (identity identification) first. With mutation=True the validity checks
    are skipped so that broken data can be inspected.
    """

    def __init__(self, rep, mutation=False, cap=4):
        if rep.rank0 != rep.rank1:
            raise ValueError("a Poisson [2]-manifold needs rank E0 = rank E1")
        if rep.identification is None:
            rep = rep.replace(identification=PolyMatrix.identity(rep.rank1, rep.n))
        elif rep.identification != PolyMatrix.identity(rep.rank1, rep.n):
            rep = canonical_form(rep)
        if not mutation:
            bad = check_tworep(rep).failed_names() + selfdual_report(rep).failed_names()
            if bad:
                raise ValueError(f"representation is not a valid self-dual one: {bad[:3]}")
        self.rep = rep
        self.cap = cap
        self.n, self.m, self.rb = rep.n, rep.rank1, rep.algebroid.rank
        self.generators = Generators(self.n, self.m, self.rb)
        self.table = generator_table(rep)

    def bracket(self, f, g):
        return bracket_from_table(self.table, f, g, self.cap)

    def fn(self, u):
        return self.generators.function(u)


def generator_table(rep):
    """Brackets of coordinate generators for a rep in canonical form."""
    alg = rep.algebroid
    n, m, rb = rep.n, rep.rank1, alg.rank
    gens = Generators(n, m, rb)
    base = lambda mu: mu
    odd = lambda a: n + a
    even = lambda b: n + m + b
    entries = {}

    def put(u, v, val):
        if not val.is_zero():
            entries[(u, v)] = val
            # graded skew-symmetry fixes the reverse order
            sign = -1 if (gens.degree(u) * gens.degree(v)) % 2 == 0 else 1
            entries.setdefault((v, u), val if sign > 0 else -val)

    zero = GradedFunction.zero(n, m, rb)
    for a in range(m):
        for b in range(m):
            entries_val = GradedFunction.scalar(n, m, rb, rep.d[b, a])
            if not entries_val.is_zero():
                entries[(odd(a), odd(b))] = entries_val
    for b in range(rb):
        anchor = alg.anchor_field(b)
        for mu in range(n):
            put(even(b), base(mu), GradedFunction.scalar(n, m, rb, anchor[mu]))
        for a in range(m):
            val = zero
            for c in range(m):
                coeff = rep.m0[b][c, a]
                if coeff.terms:
                    val = val + GradedFunction.odd(n, m, rb, c).scale(coeff)
            put(even(b), odd(a), val)
    for b in range(rb):
        for c in range(rb):
            if b == c:
                continue
            val = zero
            for d in range(rb):
                coeff = alg.structure[b][c][d]
                if coeff.terms:
                    val = val + GradedFunction.even(n, m, rb, d).scale(coeff)
            val = val - two_form_of(rep.curv[b][c], n, m, rb)
            if not val.is_zero():
                entries[(even(b), even(c))] = val
    return GeneratorTable(n, m, rb, entries)


def _jacobiator(bracket, f, g, h, pf, pg):
    """{f,{g,h}} - {{f,g},h} - (-1)^{|f||g|} {g,{f,h}}."""
    out = bracket(f, bracket(g, h)) - bracket(bracket(f, g), h)
    third = bracket(g, bracket(f, h))
    return out - third if (pf * pg) % 2 == 0 else out + third


def check_graded_axioms(p):
    """Skew-symmetry, Leibniz on generator x product, Jacobi on generator triples."""
    report = Report("poisson2")
    gens = p.generators
    cnt = gens.count
    br = lambda f, g: bracket_from_table(p.table, f, g)
    fns = [gens.function(u) for u in range(cnt)]
    degs = [gens.degree(u) for u in range(cnt)]
    lab = [gens.label(u) for u in range(cnt)]
    for u in range(cnt):
        for v in range(u, cnt):
            sign = 1 if (degs[u] * degs[v]) % 2 == 0 else -1
            res = br(fns[u], fns[v]) + br(fns[v], fns[u]).scale(sign)
            report.add_residual(f"skew{{{lab[u]},{lab[v]}}}", res)
    for z in range(cnt):
        for u in range(cnt):
            for v in range(u, cnt):
                prod = fns[u] * fns[v]
                if prod.is_zero():
                    continue
                lhs = br(fns[z], prod)
                rhs = br(fns[z], fns[u]) * fns[v]
                second = fns[u] * br(fns[z], fns[v])
                rhs = rhs + (second if (degs[z] * degs[u]) % 2 == 0 else -second)
                report.add_residual(f"leibniz{{{lab[z]},{lab[u]}*{lab[v]}}}", lhs - rhs)
    for u in range(cnt):
        for v in range(u, cnt):
            for w in range(v, cnt):
                res = _jacobiator(br, fns[u], fns[v], fns[w], degs[u], degs[v])
                report.add_residual(f"jacobi{{{lab[u]},{{{lab[v]},{lab[w]}}}}}", res)
    return report


def _scalar_part(f, what):
    extra = [k for k in f.terms if k != ((), (0,) * f.rb)]
    if extra:
        raise ValueError(f"table does not close on generators: {what} has higher terms")
    return f.coefficient()


def rep_from_bracket(table):
    """Recover the self-dual 2-representation (canonical form) from a generator table."""
    n, m, rb = table.n, table.m, table.rb
    odd = lambda a: n + a
    even = lambda b: n + m + b
    for u in range(n):
        for v in range(n + m):
            if not table.get(u, v).is_zero() or not table.get(v, u).is_zero():
                raise ValueError("table does not close on generators: degree 0 brackets must vanish "
                                 "against degree <= 1")
    d = PolyMatrix.from_rows([[_scalar_part(table.get(odd(a), odd(b)), "{tau,tau}") for a in range(m)]
                              for b in range(m)], n) if m else PolyMatrix.zero(0, 0, n)
    anchor_rows = []
    for b in range(rb):
        anchor_rows.append([_scalar_part(table.get(even(b), mu), "{b,x}") for mu in range(n)])
    anchor = PolyMatrix.from_rows(anchor_rows, n) if rb else PolyMatrix.zero(0, n, n)
    m0 = []
    for b in range(rb):
        rows = [[Poly.zero(n)] * m for _ in range(m)]
        for a in range(m):
            val = table.get(even(b), odd(a))
            for (o, e), c in val.terms.items():
                if len(o) != 1 or any(e):
                    raise ValueError("table does not close on generators: {b,tau} must be linear in tau")
                rows[o[0]][a] = c
        m0.append(PolyMatrix.from_rows(rows, n) if m else PolyMatrix.zero(0, 0, n))
    structure = [[[Poly.zero(n) for _ in range(rb)] for _ in range(rb)] for _ in range(rb)]
    curv = [[PolyMatrix.zero(m, m, n) for _ in range(rb)] for _ in range(rb)]
    for b in range(rb):
        for c in range(rb):
            val = table.get(even(b), even(c))
            h = PolyMatrix.zero(m, m, n)
            for (o, e), coeff in val.terms.items():
                if not o and sum(e) == 1:
                    structure[b][c][e.index(1)] = coeff
                elif len(o) == 2 and not any(e):
                    k, l = o
                    # coefficient of xi_k xi_l is -R[l, k]; R is skew
                    h = h.replace(l, k, -coeff).replace(k, l, coeff)
                else:
                    raise ValueError("table does not close on generators: {b,b} must have degree 2")
            curv[b][c] = h
    alg = LieAlgebroidModel(n, anchor, structure)
    m1 = [-mat.T() for mat in m0]
    return TwoRep(alg, m, m, d, m0, m1, curv, PolyMatrix.identity(m, n))


def is_symplectic(p):
    rep = p.rep if isinstance(p, PoissonStructure2) else p
    anchor = rep.algebroid.anchor
    if anchor.rows != anchor.cols or rep.d.rows != rep.d.cols:
        return False
    return anchor.has_unit_det() and rep.d.has_unit_det()


def symplectic_from_metric_bundle(metric, conn):
    """Poisson [2]-manifold E[-1] + T*M[-2] of a metric connection.

    The rep of TM acts on d = g^{-1}: E* -> E with the dual connection on E*,
    the connection on E and curvature term g R.
    """
    if not metric_compatibility(conn, metric):
        raise ValueError("connection is not compatible with the fibre metric")
    n = conn.bundle.chart.dim
    e = conn.bundle.rank
    alg = LieAlgebroidModel.tangent(n)
    mats = conn.mats()
    g = metric.g
    rcurv = connection_curvature(conn)
    curv = [[g @ rcurv[i][j] for j in range(n)] for i in range(n)]
    rep = TwoRep(alg, e, e, g.inverse(), [-mt.T() for mt in mats], list(mats), curv,
                 PolyMatrix.identity(e, n))
    return PoissonStructure2(rep)


# ------------------------------------------------------------ linear Poisson on D

class LinearPoissonOnD:
    """Linear Poisson bivector on D with coordinates (x, q1, q2, beta).

    pi[(u, v)] is the bracket of coordinates u and v; q2 and beta are the
    linear functions of core sections and of lifts of the frame of B.
    """

    def __init__(self, inv, pi):
        self.inv = inv
        self.emb = FunctionEmbedding(inv)
        self.n_vars = self.emb.n_vars
        self.pi = {k: v for k, v in pi.items() if v.terms}

    @property
    def n(self):
        return self.inv.n

    @property
    def m(self):
        return self.inv.rank_q

    @property
    def rb(self):
        return self.inv.rank_b

    def bracket(self, f, g):
        out = Poly.zero(self.n_vars)
        dfs = {}
        for (u, v), p in self.pi.items():
            if u not in dfs:
                dfs[u] = f.diff(u)
            if not dfs[u].terms:
                continue
            dg = g.diff(v)
            if dg.terms:
                out = out + dfs[u] * p * dg
        return out

    def coord(self, u):
        return Poly.var(self.n_vars, u)

    def __eq__(self, other):
        return isinstance(other, LinearPoissonOnD) and self.pi == other.pi

    def jacobi_report(self):
        report = Report("linear-poisson")
        nv = self.n_vars
        for u in range(nv):
            for v in range(u, nv):
                res = self.bracket(self.coord(u), self.coord(v)) + self.bracket(self.coord(v), self.coord(u))
                report.add_residual(f"skew[{u},{v}]", res)
        for u in range(nv):
            for v in range(u + 1, nv):
                for w in range(v + 1, nv):
                    a, b, c = self.coord(u), self.coord(v), self.coord(w)
                    res = (self.bracket(a, self.bracket(b, c)) + self.bracket(b, self.bracket(c, a))
                           + self.bracket(c, self.bracket(a, b)))
                    report.add_residual(f"jacobi[{u},{v},{w}]", res)
        return report


def linear_poisson_from_rep(inv, rep):
    """Dual of the VB-algebroid E -> Q defined by a rep of B on Q* -> Q."""
    emb = FunctionEmbedding(inv)
    n, m, rb = inv.n, inv.rank_q, inv.rank_b
    if (rep.rank0, rep.rank1, rep.algebroid.rank, rep.n) != (m, m, rb, n):
        raise ValueError("representation does not match the involutive double vector bundle")
    real = realize_vb_algebroid(rep)
    nv = emb.n_vars
    up = lambda f: f.embed(nv, 0)
    frame_coord = [n + 2 * m + i for i in range(rb)] + [n + m + j for j in range(m)]
    pi = {}
    size = rb + m
    for a in range(size):
        anchor = real.engine.anchors[a]
        for u, comp in enumerate(anchor):
            val = up(comp)
            if val.terms:
                pi[(frame_coord[a], u)] = val
                pi[(u, frame_coord[a])] = -val
        for b in range(size):
            coeffs = real.engine.table[a][b]
            val = Poly.zero(nv)
            for c, coeff in enumerate(coeffs):
                if coeff.terms:
                    val = val + up(coeff) * Poly.var(nv, frame_coord[c])
            if val.terms:
                pi[(frame_coord[a], frame_coord[b])] = val
    return LinearPoissonOnD(inv, pi)


def _generator_functions(lp):
    """Named generator functions on D by category."""
    emb = lp.emb
    n, m, rb = lp.n, lp.m, lp.rb
    out = []
    for i in range(rb):
        out.append(("l_chi", f"b{i}", emb.core_coord(i)))
    for k in range(m):
        for l in range(k + 1, m):
            out.append(("l_chi", f"w{k}{l}", emb.q1(k) * emb.q2(l) - emb.q1(l) * emb.q2(k)))
    for k in range(m):
        out.append(("l_tau_dagger", f"{k}", emb.q2(k)))
    for k in range(m):
        out.append(("pi1_l_tau", f"{k}", emb.q1(k)))
    for mu in range(n):
        out.append(("pi1_q_f", f"x{mu}", Poly.var(emb.n_vars, mu)))
    return out


def anti_poisson_report(lp):
    """I*{F, G} + {I*F, I*G} on all pairs of generator functions."""
    report = Report("anti-poisson")
    emb = lp.emb
    gens = _generator_functions(lp)
    for a, (ca, na, fa) in enumerate(gens):
        for cb, nb, fb in gens[a:]:
            res = emb.involution_pullback(lp.bracket(fa, fb)) + lp.bracket(
                emb.involution_pullback(fa), emb.involution_pullback(fb))
            report.add_residual(f"{{{ca}:{na}, {cb}:{nb}}}", res)
    return report


def dual_linear_poisson(inv, rep):
    lp = linear_poisson_from_rep(inv, rep)
    return lp, anti_poisson_report(lp)


# ------------------------------------------------------------ functors

def geometrize_poisson(p):
    """Linear Poisson structure on the involutive double of a Poisson [2]-manifold."""
    inv = InvolutiveDVB.standard(p.n, p.m, p.rb)
    return linear_poisson_from_rep(inv, p.rep)


def _graded_of_linear(lp, f):
    """Translate a function of (x, q1, q2, beta) that is a degree <= 2 image back."""
    n, m, rb = lp.n, lp.m, lp.rb
    out = {}
    zero_e = (0,) * rb
    for exps, coeff in f.terms.items():
        base = Poly._raw(n, {exps[:n]: coeff})
        e1, e2, eb = exps[n:n + m], exps[n + m:n + 2 * m], exps[n + 2 * m:]
        s1, s2, sb = sum(e1), sum(e2), sum(eb)
        if (s1, s2, sb) == (0, 0, 0):
            key = ((), zero_e)
        elif (s1, s2, sb) == (0, 1, 0):
            key = ((e2.index(1),), zero_e)
        elif (s1, s2, sb) == (0, 0, 1):
            key = ((), tuple(eb))
        elif (s1, s2, sb) == (1, 1, 0):
            k, l = e1.index(1), e2.index(1)
            if k >= l:
                # antisymmetric partner, checked below
                continue
            key = ((k, l), zero_e)
        else:
            raise ValueError("bracket leaves the span of the generator images")
        out[key] = out[key] + base if key in out else base
    g = GradedFunction(n, m, rb, out)
    if not (_linear_image(lp, g) - f).is_zero():
        raise ValueError("bracket leaves the span of the generator images")
    return g


def _linear_image(lp, g):
    """Function on D of a graded function of degree <= 2: tau -> q2-part, xi_k xi_l -> wedge."""
    emb = lp.emb
    out = Poly.zero(emb.n_vars)
    for (o, e), c in g.terms.items():
        term = emb.lift(c)
        if len(o) == 1:
            term = term * emb.q2(o[0])
        elif len(o) == 2:
            k, l = o
            term = term * (emb.q1(k) * emb.q2(l) - emb.q1(l) * emb.q2(k))
        elif len(o) > 2:
            raise ValueError("degree above 2 has no linear image")
        for b, k in enumerate(e):
            if k > 1 or (k and o):
                raise ValueError("degree above 2 has no linear image")
            if k:
                term = term * emb.core_coord(b)
        out = out + term
    return out


def algebraize_poisson(lp):
    """Generator table of the Poisson [2]-manifold read off a linear Poisson structure."""
    n, m, rb = lp.n, lp.m, lp.rb
    gens = Generators(n, m, rb)

    def coordinate(u):
        kind, i = gens.kind(u)
        if kind == "base":
            return Poly.var(lp.n_vars, i)
        if kind == "odd":
            return lp.emb.q2(i)
        return lp.emb.core_coord(i)

    entries = {}
    for u in range(gens.count):
        for v in range(gens.count):
            ku, kv = gens.kind(u)[0], gens.kind(v)[0]
            fu, fv = coordinate(u), coordinate(v)
            if ku == "odd" and kv == "odd":
                # {tau1, tau2} is read from {l_tau1_dagger, pi1 l_tau2}
                val = lp.bracket(fu, lp.emb.q1(gens.kind(v)[1]))
            else:
                val = lp.bracket(fu, fv)
            g = _graded_of_linear(lp, val)
            if not g.is_zero():
                entries[(u, v)] = g
    return GeneratorTable(n, m, rb, entries)


def poisson_roundtrip(instance):
    """Both composites of the Poisson functors reproduce the generator tables."""
    report = Report("poisson-roundtrip")
    if isinstance(instance, PoissonStructure2):
        lp = geometrize_poisson(instance)
        table = algebraize_poisson(lp)
        report.add("algebraize(geometrize) table", table == instance.table)
        rep = rep_from_bracket(table)
        report.add("recovered rep", rep.same_data(instance.rep)
                   and rep.algebroid.anchor == instance.rep.algebroid.anchor
                   and rep.algebroid.structure == instance.rep.algebroid.structure)
    elif isinstance(instance, LinearPoissonOnD):
        table = algebraize_poisson(instance)
        p = PoissonStructure2(rep_from_bracket(table), mutation=True)
        lp = geometrize_poisson(p)
        report.add("geometrize(algebraize) bivector", lp.pi == instance.pi)
    else:
        raise TypeError("poisson_roundtrip takes a PoissonStructure2 or a LinearPoissonOnD")
    return report


def displayed_table_report(p, lp=None):
    """Check the linear bracket on images of generators against the graded bracket."""
    lp = lp or geometrize_poisson(p)
    emb = lp.emb
    n, m, rb = p.n, p.m, p.rb
    report = Report("linear-table")
    chis = [(f"b{i}", GradedFunction.even(n, m, rb, i)) for i in range(rb)]
    for k in range(m):
        for l in range(k + 1, m):
            chis.append((f"w{k}{l}", GradedFunction.odd(n, m, rb, k) * GradedFunction.odd(n, m, rb, l)))
    taus = [(f"tau{a}", a) for a in range(m)]
    fs = [(f"x{mu}", mu) for mu in range(n)]
    xi = lambda a: GradedFunction.odd(n, m, rb, a)
    lin = lambda g: _linear_image(lp, g)

    def pi1_tau_image(g):
        """pi1 l of a degree 1 function: replace q2 by q1."""
        out = Poly.zero(emb.n_vars)
        for (o, e), c in g.terms.items():
            out = out + emb.lift(c) * emb.q1(o[0])
        return out

    def scalar_image(g):
        return emb.lift(g.coefficient())

    for na, ca in chis:
        for nb, cb in chis:
            report.add_residual(f"{{l_chi:{na}, l_chi:{nb}}}",
                                lp.bracket(lin(ca), lin(cb)) - lin(p.bracket(ca, cb)))
        for nf, mu in fs:
            f = GradedFunction.base(n, m, rb, mu)
            report.add_residual(f"{{l_chi:{na}, pi1_q_f:{nf}}}",
                                lp.bracket(lin(ca), Poly.var(emb.n_vars, mu)) - scalar_image(p.bracket(ca, f)))
        for nt, a in taus:
            report.add_residual(f"{{l_chi:{na}, pi1_l_tau:{nt}}}",
                                lp.bracket(lin(ca), emb.q1(a)) - pi1_tau_image(p.bracket(ca, xi(a))))
            report.add_residual(f"{{l_chi:{na}, l_tau_dagger:{nt}}}",
                                lp.bracket(lin(ca), emb.q2(a)) - lin(p.bracket(ca, xi(a))))
    for nt, a in taus:
        for ns, b in taus:
            report.add_residual(f"{{l_tau_dagger:{nt}, l_tau_dagger:{ns}}}", lp.bracket(emb.q2(a), emb.q2(b)))
            report.add_residual(f"{{l_tau_dagger:{nt}, pi1_l_tau:{ns}}}",
                                lp.bracket(emb.q2(a), emb.q1(b)) - scalar_image(p.bracket(xi(a), xi(b))))
            report.add_residual(f"{{pi1_l_tau:{nt}, pi1_l_tau:{ns}}}", lp.bracket(emb.q1(a), emb.q1(b)))
        for nf, mu in fs:
            x = Poly.var(emb.n_vars, mu)
            report.add_residual(f"{{l_tau_dagger:{nt}, pi1_q_f:{nf}}}", lp.bracket(emb.q2(a), x))
            report.add_residual(f"{{pi1_l_tau:{nt}, pi1_q_f:{nf}}}", lp.bracket(emb.q1(a), x))
    for nf, mu in fs:
        for ng, nu in fs:
            report.add_residual(f"{{pi1_q_f:{nf}, pi1_q_f:{ng}}}",
                                lp.bracket(Poly.var(emb.n_vars, mu), Poly.var(emb.n_vars, nu)))
    return report
