"""Linear metrics and involutions on decomposed double vector bundles.

A MetricDVB has sides Q (rank m) and B, core Q*, and a metric on the fibres
over B. In the reference decomposition it is described by the symmetric
tensor split_form: split_form[l] is an m x m matrix and, for points over the same b,

    <(q1, b, t1), (q2, b, t2)> = sum_l b_l q1^T split_form[l] q2 + <q1, t2> + <q2, t1>.

An InvolutiveDVB has sides Q, Q and core B*; its involution is

    (q1, q2, beta) -> (q2, q1, -beta + kappa(q1, q2))

with kappa[l] symmetric m x m matrices. Splitting changes follow the
convention of the dvb module (point cores shift by +phi).

Derived relation (confirmed in the tests by solving the defining relation at
sample points): dualizing exchanges the two descriptions with kappa = split_form.
"""

from dataclasses import dataclass
from fractions import Fraction

from .dvb import (DecomposedDVB, SplittingChange, dot, dualize_decomposed, pair_over_a,
                  tensor_eval, tensor_zero)
from .polycore import Poly, PolyMatrix
from .report import Report


def _sym_defect(mats):
    return [m - m.T() for m in mats]


def _evaluate_tensor(t, x):
    """Numeric tensor from a polynomial one at the base point x."""
    return [[[m[i, j].evaluate(x) for j in range(m.cols)] for i in range(m.rows)] for m in t]


def _numeric_bilinear(nt, v1, v2):
    return [sum(Fraction(mat[i][j]) * v1[i] * v2[j] for i in range(len(v1)) for j in range(len(v2)))
            for mat in nt]


@dataclass
class MetricDVB:
    host: DecomposedDVB
    split_form: list

    def __post_init__(self):
        h = self.host
        if h.rank_c != h.rank_a:
            raise ValueError("core of a metric double vector bundle must be dual to the side Q")
        if len(self.split_form) != h.rank_b:
            raise ValueError("split_form needs one matrix per coordinate of B")
        for m in self.split_form:
            if (m.rows, m.cols) != (h.rank_a, h.rank_a):
                raise ValueError("split_form matrices must be m x m")
        if any(not d.is_zero() for d in _sym_defect(self.split_form)):
            raise ValueError("split_form must be symmetric in its Q arguments")

    @classmethod
    def standard(cls, n, rank_q, rank_b, split_form=None):
        host = DecomposedDVB(n, rank_q, rank_b, rank_q, ("Q", "B", "Q*"))
        if split_form is None:
            split_form = tensor_zero(rank_b, rank_q, rank_q, n)
        return cls(host, split_form)

    @property
    def rank_q(self):
        return self.host.rank_a

    @property
    def rank_b(self):
        return self.host.rank_b

    @property
    def n(self):
        return self.host.n

    def is_lagrangian(self):
        return all(m.is_zero() for m in self.split_form)

    def pair(self, e1, e2):
        """Symbolic pairing of points with polynomial coordinates."""
        q1, b1, t1 = e1
        q2, b2, t2 = e2
        if list(b1) != list(b2):
            raise ValueError("projection mismatch: points lie over different points of B")
        total = Poly.zero(q1[0].n_vars if q1 else self.n)
        for i, x in enumerate(q1):
            for j, y in enumerate(q2):
                c = _split_form_entry(self.split_form, b1, i, j)
                if c is not None:
                    total = total + c * x * y
        return total + dot(q1, t2) + dot(q2, t1)


def _split_form_entry(split_form, b, i, j):
    acc = None
    for bl, m in zip(b, split_form):
        c = m[i, j]
        if c.terms:
            t = c * bl
            acc = t if acc is None else acc + t
    return acc


def pairing_eval(metric, e1, e2, x):
    """Metric of two points (numeric coordinates) over the base point x."""
    q1, b1, t1 = e1
    q2, b2, t2 = e2
    if list(b1) != list(b2):
        raise ValueError("projection mismatch: points lie over different points of B")
    split_form = _evaluate_tensor(metric.split_form, x)
    value = sum(Fraction(b) * v for b, v in zip(b1, _numeric_bilinear(split_form, q1, q2)))
    return value + sum(Fraction(a) * c for a, c in zip(q1, t2)) + sum(Fraction(a) * c for a, c in zip(q2, t1))


def zero_fibre_gram(metric, x):
    """Matrix of the induced map from the fibre over b = 0 to its dual.

    Over b = 0 the fibre is Q + Q* with pairing <(q1,t1),(q2,t2)> = <q1,t2> + <q2,t1>,
    which is the identity block swap; nondegeneracy means unit determinant up to sign.
    """
    m = metric.rank_q
    size = 2 * m
    zero_b = [0] * metric.rank_b
    rows = []
    for i in range(size):
        e1 = _unit_point(i, m, zero_b)
        rows.append([pairing_eval(metric, e1, _unit_point(j, m, zero_b), x) for j in range(size)])
    return rows


def _unit_point(k, m, b):
    q = [1 if k == i else 0 for i in range(m)]
    t = [1 if k == m + i else 0 for i in range(m)]
    return (q, list(b), t)


def split_form_after_change(metric, change):
    """Lam measured after the splitting change: split_form - <phi(q1), q2> - <phi(q2), q1>."""
    m, rb, n = metric.rank_q, metric.rank_b, metric.n
    out = []
    for l in range(rb):
        ent = []
        for i in range(m):
            for j in range(m):
                ent.append(metric.split_form[l][i, j] - change.components[i][j, l] - change.components[j][i, l])
        out.append(PolyMatrix(m, m, n, ent))
    return out


def change_metric(metric, change):
    return MetricDVB(metric.host, split_form_after_change(metric, change))


def symmetrize_splitting(metric):
    """Change to a Lagrangian splitting: phi(q, b) = half of split_form(q, ., b)."""
    m, rb, n = metric.rank_q, metric.rank_b, metric.n
    half = Fraction(1, 2)
    shift = [PolyMatrix(m, rb, n, [metric.split_form[l][k, j] * half for j in range(m) for l in range(rb)])
           for k in range(m)]
    return SplittingChange(shift)


def symmetric_change(form, n):
    """SplittingChange phi(q, b)_k = sum_l b_l form[l][k, j] q_j from B-indexed matrices."""
    rb = len(form)
    m = form[0].rows if form else 0
    return SplittingChange([PolyMatrix(m, rb, n, [form[l][k, j] for j in range(m) for l in range(rb)])
                            for k in range(m)])


@dataclass
class IsotropicLinearSection:
    """Lift of b plus the core-linear section of a 2-form on Q (Lagrangian splitting)."""

    base: list
    form: PolyMatrix

    def __post_init__(self):
        if not (self.form + self.form.T()).is_zero():
            raise ValueError("form must be antisymmetric")


def isotropic_residual(metric, base, core_map):
    """split_form(., ., b) + psi + psi^T for the linear section over Q with base b and part psi."""
    n, m = metric.n, metric.rank_q
    acc = PolyMatrix.zero(m, m, n)
    for bl, mat in zip(base, metric.split_form):
        if bl.terms:
            acc = acc + mat.map(lambda c: c * bl)
    return acc + core_map + core_map.T()


def isotropic_test(metric, section):
    """Whether a linear section over Q (LinearSection with over='A') has isotropic image."""
    if section.over != "A":
        raise ValueError("isotropic_test takes sections over the side Q")
    return isotropic_residual(metric, section.base, section.core_map).is_zero()


# ---------------------------------------------------------------- involutive

@dataclass
class InvolutiveDVB:
    host: DecomposedDVB
    kappa: list

    def __post_init__(self):
        h = self.host
        if h.rank_a != h.rank_b:
            raise ValueError("an involutive double vector bundle has equal sides")
        if len(self.kappa) != h.rank_c:
            raise ValueError("kappa needs one matrix per core coordinate")
        for mat in self.kappa:
            if (mat.rows, mat.cols) != (h.rank_a, h.rank_a):
                raise ValueError("kappa matrices must be m x m")

    @classmethod
    def standard(cls, n, rank_q, rank_b, kappa=None):
        host = DecomposedDVB(n, rank_q, rank_q, rank_b, ("Q", "Q", "B*"))
        if kappa is None:
            kappa = tensor_zero(rank_b, rank_q, rank_q, n)
        return cls(host, kappa)

    @property
    def rank_q(self):
        return self.host.rank_a

    @property
    def rank_b(self):
        return self.host.rank_c

    @property
    def n(self):
        return self.host.n

    def involution(self, d):
        q1, q2, beta = d
        k = tensor_eval(self.kappa, q1, q2)
        return (list(q2), list(q1), [-b + c for b, c in zip(beta, k)])

    def square_residual(self):
        """I o I - Id on coordinates: the antisymmetric part of kappa."""
        return _sym_defect(self.kappa)

    def check(self):
        report = Report("involutive-dvb")
        for l, res in enumerate(self.square_residual()):
            report.add_residual(f"involution-squared[beta{l}]", res)
        return report

    def is_involutive_decomposition(self):
        return all(m.is_zero() for m in self.kappa)


def check_metric(metric):
    report = Report("metric-dvb")
    for l, res in enumerate(_sym_defect(metric.split_form)):
        report.add_residual(f"split_form-symmetric[b{l}]", res)
    return report


def _frame_vec(k, size, n):
    return [Poly.const(n, 1) if i == k else Poly.zero(n) for i in range(size)]


def metric_to_involutive(metric):
    """Dual over Q with the involution determined by <I(d), e>_Q = <<e, d>>.

    <<e, d>> = <e, e'> - <d, e'>_Q for e over pi2(d) and e' over pi1(d), both
    over the same b; the core of I(d) is read off on frame elements.
    """
    m, rb, n = metric.rank_q, metric.rank_b, metric.n
    dual_host = dualize_decomposed(metric.host, "A")
    zero_q = [Poly.zero(n)] * m
    zero_b = [Poly.zero(n)] * rb
    kappa = []
    for l in range(rb):
        b = _frame_vec(l, rb, n)
        ent = []
        for i in range(m):
            for j in range(m):
                q1, q2 = _frame_vec(i, m, n), _frame_vec(j, m, n)
                d = (q1, q2, zero_b)
                e = (q2, b, zero_q)
                e_prime = (q1, b, zero_q)
                double = metric.pair(e, e_prime) - pair_over_a(d, e_prime)
                # <I(d), e>_Q = <beta', b> + <q1, 0>, so double is beta'_l
                ent.append(double)
        kappa.append(PolyMatrix(m, m, n, ent))
    return InvolutiveDVB(DecomposedDVB(n, m, m, rb, ("Q", "Q", dual_host.names[2])), kappa)


def involutive_to_metric(inv):
    """Dual over the first side with <e1, e2> = <e1, d>_Q + <e2, I(d)>_Q."""
    m, rb, n = inv.rank_q, inv.rank_b, inv.n
    zero_q = [Poly.zero(n)] * m
    zero_beta = [Poly.zero(n)] * rb
    split_form = []
    for l in range(rb):
        b = _frame_vec(l, rb, n)
        ent = []
        for i in range(m):
            for j in range(m):
                q1, q2 = _frame_vec(i, m, n), _frame_vec(j, m, n)
                d = (q1, q2, zero_beta)
                e1 = (q1, b, zero_q)
                e2 = (q2, b, zero_q)
                ent.append(pair_over_a(e1, d) + pair_over_a(e2, inv.involution(d)))
        split_form.append(PolyMatrix(m, m, n, ent))
    host = DecomposedDVB(n, m, rb, m, ("Q", "B", "Q*"))
    return MetricDVB(host, split_form)


def metric_pair_via_involution(inv, e1, e2, d):
    """<e1, d>_Q + <e2, I(d)>_Q for a chosen admissible d (used to test independence of d)."""
    return pair_over_a(e1, d) + pair_over_a(e2, inv.involution(d))


def kappa_after_change(inv, change):
    """kappa + phi + phi^T for a change phi: Q x Q -> B* (list over B* of m x m)."""
    return [k + p + p.T() for k, p in zip(inv.kappa, change.components)]


def change_involutive(inv, change):
    return InvolutiveDVB(inv.host, kappa_after_change(inv, change))


def involutive_splitting(inv, change=None):
    """Change from the reference decomposition to the averaged (involutive) one.

    The input change selects a starting splitting; averaging it with its image
    under the involution gives phi_out = (phi - phi^T - kappa) / 2.
    """
    m, rb, n = inv.rank_q, inv.rank_b, inv.n
    if change is None:
        change = SplittingChange(tensor_zero(rb, m, m, n))
    half = Fraction(1, 2)
    return SplittingChange([(p - p.T() - k).scale(half) for p, k in zip(change.components, inv.kappa)])


# --------------------------------------------------------------- functions on D

class FunctionEmbedding:
    """Polynomial functions on D in the variables (x, q1, q2, beta)."""

    def __init__(self, inv):
        if not inv.is_involutive_decomposition():
            raise ValueError("function embedding needs an involutive decomposition (kappa = 0)")
        self.inv = inv
        self.n, self.m, self.rb = inv.n, inv.rank_q, inv.rank_b
        self.n_vars = self.n + 2 * self.m + self.rb

    def q1(self, k):
        return Poly.var(self.n_vars, self.n + k)

    def q2(self, k):
        return Poly.var(self.n_vars, self.n + self.m + k)

    def core_coord(self, l):
        return Poly.var(self.n_vars, self.n + 2 * self.m + l)

    def lift(self, f):
        return f.embed(self.n_vars, 0)

    def pi1_linear(self, tau):
        return sum((self.lift(t) * self.q1(k) for k, t in enumerate(tau)), Poly.zero(self.n_vars))

    def pi2_linear(self, tau):
        return sum((self.lift(t) * self.q2(k) for k, t in enumerate(tau)), Poly.zero(self.n_vars))

    def core_section(self, tau):
        """Image of the core section tau: half of <tau, q2 - q1>."""
        return (self.pi2_linear(tau) - self.pi1_linear(tau)) * Fraction(1, 2)

    def isotropic_section(self, chi):
        """Image of lift(b) + omega-tilde: <b, beta> + omega(q1, q2)."""
        out = sum((self.lift(b) * self.core_coord(l) for l, b in enumerate(chi.base)), Poly.zero(self.n_vars))
        for i in range(self.m):
            for j in range(self.m):
                w = chi.form[i, j]
                if w.terms:
                    out = out + self.lift(w) * self.q1(i) * self.q2(j)
        return out

    def involution_pullback(self, f):
        """f o I for kappa = 0: swap q1 and q2, negate beta."""
        images = [Poly.var(self.n_vars, i) for i in range(self.n)]
        images += [self.q2(k) for k in range(self.m)]
        images += [self.q1(k) for k in range(self.m)]
        images += [-self.core_coord(l) for l in range(self.rb)]
        return f.substitute(images)


def section_function(inv, x):
    """Function on D attached to a core section (list) or an IsotropicLinearSection."""
    emb = FunctionEmbedding(inv)
    if isinstance(x, IsotropicLinearSection):
        return emb.isotropic_section(x)
    return emb.core_section(list(x))


def section_values_at(metric, x, q):
    """Fibre values over q in Q of lifts, 2-form sections and core sections.

    A point of the fibre of E -> Q over q has coordinates (b, t). Rows are
    the values of lift(b_i), of the core-linear sections of the elementary
    2-forms and of the core sections t_k.
    """
    m, rb = metric.rank_q, metric.rank_b
    rows = []
    for i in range(rb):
        rows.append([1 if i == k else 0 for k in range(rb)] + [0] * m)
    for k in range(m):
        for l in range(k + 1, m):
            form = [0] * m
            form[l] += Fraction(q[k])
            form[k] -= Fraction(q[l])
            rows.append([0] * rb + form)
    for k in range(m):
        rows.append([0] * rb + [1 if i == k else 0 for i in range(m)])
    return rows


def rank_of(rows):
    """Rank over the rationals by Gaussian elimination."""
    mat = [[Fraction(v) for v in row] for row in rows]
    rank, col = 0, 0
    ncols = len(mat[0]) if mat else 0
    while rank < len(mat) and col < ncols:
        pivot = next((r for r in range(rank, len(mat)) if mat[r][col] != 0), None)
        if pivot is None:
            col += 1
            continue
        mat[rank], mat[pivot] = mat[pivot], mat[rank]
        for r in range(len(mat)):
            if r != rank and mat[r][col] != 0:
                f = mat[r][col] / mat[rank][col]
                mat[r] = [a - f * c for a, c in zip(mat[r], mat[rank])]
        rank += 1
        col += 1
    return rank
