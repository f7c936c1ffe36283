"""Vector bundles over a polynomial chart, connections, metrics and Lie algebroids.

Everything lives over a single coordinate chart R^n. A section of a rank r
bundle is a list of r Polys in the implicit standard frame. A connection is
stored through its connection matrices: M_i[k][j] is the coefficient of e_k
in the derivative of e_j along the i-th direction.
"""

from dataclasses import dataclass, field

from .polycore import Poly, PolyMatrix, commutator, vec_zero
from .report import Report


@dataclass(frozen=True)
class Chart:
    dim: int
    names: tuple = None

    def __post_init__(self):
        if self.dim < 0:
            raise ValueError("chart dimension must be non-negative")
        if self.names is None:
            object.__setattr__(self, "names", tuple(f"x{i}" for i in range(self.dim)))
        if len(self.names) != self.dim:
            raise ValueError("one name per coordinate")

    def coordinate(self, i):
        return Poly.var(self.dim, i)


@dataclass(frozen=True)
class VBundle:
    chart: Chart
    rank: int

    def zero_section(self):
        return vec_zero(self.rank, self.chart.dim)


def apply_vector_field(field_, f):
    """X(f) for a vector field given by its component list."""
    acc = Poly.zero(f.n_vars)
    for mu, x in enumerate(field_):
        if x.terms:
            d = f.diff(mu)
            if d.terms:
                acc = acc + x * d
    return acc


def vector_field_bracket(x, y):
    return [apply_vector_field(x, b) - apply_vector_field(y, a) for a, b in zip(x, y)]


def apply_vf_to_matrix(field_, m):
    return m.map(lambda a: apply_vector_field(field_, a))


class FreeAlgebroid:
    """Anchored bracket on a free module with a finite frame.

    The coefficient ring is the polynomial ring in n_vars variables. Each frame
    element e_i has an anchor (a vector field) and brackets [e_i, e_j] given as
    coefficient lists; the bracket of arbitrary sections is the Leibniz
    extension.
    """

    def __init__(self, n_vars, anchors, table, labels=None):
        self.n_vars = n_vars
        self.rank = len(anchors)
        self.anchors = [list(a) for a in anchors]
        for a in self.anchors:
            if len(a) != n_vars:
                raise ValueError("anchor vector field has the wrong length")
        self.table = table
        self.labels = labels or [f"e{i}" for i in range(self.rank)]

    def frame(self, i):
        v = vec_zero(self.rank, self.n_vars)
        v[i] = Poly.const(self.n_vars, 1)
        return v

    def anchor_of(self, s):
        out = vec_zero(self.n_vars, self.n_vars)
        for si, a in zip(s, self.anchors):
            if si.terms:
                out = [o + si * c for o, c in zip(out, a)]
        return out

    def bracket(self, s, t):
        out = vec_zero(self.rank, self.n_vars)
        for i, si in enumerate(s):
            if not si.terms:
                continue
            for j, tj in enumerate(t):
                if not tj.terms:
                    continue
                coeff = si * tj
                out = [o + coeff * c for o, c in zip(out, self.table[i][j])]
        xs = self.anchor_of(s)
        xt = self.anchor_of(t)
        out = [o + apply_vector_field(xs, b) - apply_vector_field(xt, a)
               for o, a, b in zip(out, s, t)]
        return out

    def jacobiator(self, s, t, u):
        b = self.bracket
        return [p + q + r for p, q, r in zip(b(b(s, t), u), b(b(t, u), s), b(b(u, s), t))]

    def anchor_defect(self, s, t):
        lhs = self.anchor_of(self.bracket(s, t))
        rhs = vector_field_bracket(self.anchor_of(s), self.anchor_of(t))
        return [a - b for a, b in zip(lhs, rhs)]

    def check(self, suite="algebroid"):
        """Skew-symmetry, anchor compatibility and Jacobi on the frame."""
        rep = Report(suite)
        r = self.rank
        lab = self.labels
        for i in range(r):
            for j in range(i, r):
                skew = [a + b for a, b in zip(self.table[i][j], self.table[j][i])]
                rep.add_residual(f"skew[{lab[i]},{lab[j]}]", skew)
        for i in range(r):
            for j in range(i + 1, r):
                rep.add_residual(f"anchor[{lab[i]},{lab[j]}]",
                                 self.anchor_defect(self.frame(i), self.frame(j)))
        for i in range(r):
            for j in range(i + 1, r):
                for k in range(j + 1, r):
                    rep.add_residual(f"jacobi[{lab[i]},{lab[j]},{lab[k]}]",
                                     self.jacobiator(self.frame(i), self.frame(j), self.frame(k)))
        return rep


def skew_table(rank, n_vars, entries):
    """Fill a bracket table from entries {(i, j): coefficient list} with i < j."""
    table = [[vec_zero(rank, n_vars) for _ in range(rank)] for _ in range(rank)]
    for (i, j), coeffs in entries.items():
        table[i][j] = list(coeffs)
        table[j][i] = [-c for c in coeffs]
    return table


class LieAlgebroidModel:
    """Lie algebroid structure on the trivial rank r bundle over R^n.

    anchor is an r x n PolyMatrix (row i is the vector field of a_i) and
    structure[i][j] lists the coefficients of [a_i, a_j] in the frame.
    """

    def __init__(self, n, anchor, structure):
        self.n = n
        self.rank = anchor.rows
        if anchor.cols != n:
            raise ValueError("anchor must be rank x base dimension")
        self.anchor = anchor
        self.structure = structure
        self.engine = FreeAlgebroid(n, anchor.to_rows(), structure,
                                    [f"a{i}" for i in range(self.rank)])

    @property
    def bundle(self):
        return VBundle(Chart(self.n), self.rank)

    def anchor_field(self, i):
        return self.anchor.row(i)

    def apply_anchor(self, i, f):
        return apply_vector_field(self.anchor.row(i), f)

    def bracket(self, s, t):
        return self.engine.bracket(s, t)

    def frame(self, i):
        return self.engine.frame(i)

    def structure_coeff(self, k, i, j):
        return self.structure[i][j][k]

    @classmethod
    def tangent(cls, n):
        return cls(n, PolyMatrix.identity(n, n), skew_table(n, n, {}))

    @classmethod
    def abelian(cls, n, rank):
        return cls(n, PolyMatrix.zero(rank, n, n), skew_table(rank, n, {}))

    @classmethod
    def lie_algebra(cls, constants, n=0):
        """Lie algebra (constant structure) with zero anchor over R^n.

        constants[(i, j)] = list of structure constants for i < j.
        """
        rank = len(next(iter(constants.values()))) if constants else 0
        entries = {k: [Poly.const(n, c) for c in v] for k, v in constants.items()}
        return cls(n, PolyMatrix.zero(rank, n, n), skew_table(rank, n, entries))

    def reframe(self, g):
        """Same algebroid in the frame a'_i = sum_j g[j][i] a_j (g unimodular)."""
        ginv = g.inverse()
        new_frame = [g.col(i) for i in range(self.rank)]
        anchor_rows = [self.engine.anchor_of(s) for s in new_frame]
        entries = {}
        for i in range(self.rank):
            for j in range(i + 1, self.rank):
                br = self.bracket(new_frame[i], new_frame[j])
                entries[(i, j)] = ginv.apply(br)
        return LieAlgebroidModel(self.n, PolyMatrix.from_rows(anchor_rows, self.n),
                                 skew_table(self.rank, self.n, entries))

    def with_structure(self, k, i, j, increment):
        """Copy with c^k_{ij} shifted by delta (and c^k_{ji} by -delta)."""
        table = [[list(v) for v in row] for row in self.structure]
        table[i][j][k] = table[i][j][k] + increment
        table[j][i][k] = table[j][i][k] - increment
        return LieAlgebroidModel(self.n, self.anchor, table)


def check_lie_algebroid(model):
    """Report of Jacobi and anchor residuals on frame sections."""
    return model.engine.check("lie-algebroid")


def so3():
    return LieAlgebroidModel.lie_algebra({(0, 1): [0, 0, 1], (1, 2): [1, 0, 0], (0, 2): [0, -1, 0]})


class AConnection:
    """Connection on a trivial rank `rank` bundle along a Lie algebroid.

    The derivative along a_i is rho(a_i) acting componentwise plus mats[i].
    """

    def __init__(self, algebroid, rank, mats):
        self.algebroid = algebroid
        self.rank = rank
        if len(mats) != algebroid.rank:
            raise ValueError("one connection matrix per algebroid frame element")
        for m in mats:
            if (m.rows, m.cols) != (rank, rank):
                raise ValueError("connection matrix has the wrong shape")
        self.mats = list(mats)

    def derivative(self, i, s):
        anchor = self.algebroid.anchor_field(i)
        return [apply_vector_field(anchor, c) + d for c, d in zip(s, self.mats[i].apply(s))]

    def derivative_along(self, a, s):
        out = vec_zero(self.rank, self.algebroid.n)
        for i, ai in enumerate(a):
            if ai.terms:
                out = [o + ai * d for o, d in zip(out, self.derivative(i, s))]
        return out

    def curvature(self):
        return algebroid_curvature(self.algebroid, self.mats)

    def dual(self):
        return AConnection(self.algebroid, self.rank, [-m.T() for m in self.mats])

    def __eq__(self, other):
        return isinstance(other, AConnection) and self.mats == other.mats


def algebroid_curvature(algebroid, mats):
    """R[i][j] = rho_i(M_j) - rho_j(M_i) + [M_i, M_j] - sum_k c^k_ij M_k."""
    r = algebroid.rank
    n = algebroid.n
    size = mats[0].rows if mats else 0
    out = [[None] * r for _ in range(r)]
    for i in range(r):
        for j in range(r):
            if i == j:
                out[i][j] = PolyMatrix.zero(size, size, n)
                continue
            if j < i:
                out[i][j] = -out[j][i]
                continue
            val = (apply_vf_to_matrix(algebroid.anchor_field(i), mats[j])
                   - apply_vf_to_matrix(algebroid.anchor_field(j), mats[i])
                   + commutator(mats[i], mats[j]))
            for k in range(r):
                c = algebroid.structure[i][j][k]
                if c.terms:
                    val = val - mats[k].map(lambda a: a * c)
            out[i][j] = val
    return out


def hom_derivative(algebroid, i, shift, mats_source, mats_target):
    """Induced derivative of a Hom(E, F) matrix phi (rows indexed by F)."""
    anchor = algebroid.anchor_field(i)
    return apply_vf_to_matrix(anchor, shift) + mats_target[i] @ shift - shift @ mats_source[i]


@dataclass
class Connection:
    """Linear connection on a vector bundle over the chart.

    christoffel[i][j][k] is the coefficient of e_k in the derivative of e_j
    along the i-th coordinate direction.
    """

    bundle: VBundle
    christoffel: list = field(default=None)

    def __post_init__(self):
        n, r = self.bundle.chart.dim, self.bundle.rank
        if self.christoffel is None:
            self.christoffel = [[[Poly.zero(n) for _ in range(r)] for _ in range(r)] for _ in range(n)]
        if len(self.christoffel) != n or any(len(g) != r or any(len(h) != r for h in g)
                                             for g in self.christoffel):
            raise ValueError("Christoffel array must be dim x rank x rank")

    @classmethod
    def from_mats(cls, bundle, mats):
        n, r = bundle.chart.dim, bundle.rank
        chris = [[[mats[i][k, j] for k in range(r)] for j in range(r)] for i in range(n)]
        return cls(bundle, chris)

    def mats(self):
        n, r = self.bundle.chart.dim, self.bundle.rank
        return [PolyMatrix(r, r, n, [self.christoffel[i][j][k] for k in range(r) for j in range(r)])
                for i in range(n)]

    def as_algebroid_connection(self):
        n = self.bundle.chart.dim
        return AConnection(LieAlgebroidModel.tangent(n), self.bundle.rank, self.mats())

    def dual(self):
        return Connection.from_mats(self.bundle, [-m.T() for m in self.mats()])

    def covariant(self, i, s):
        return self.as_algebroid_connection().derivative(i, s)


def connection_curvature(conn):
    """R[i][j] is the matrix of R(d_i, d_j) acting on frame coordinates."""
    return conn.as_algebroid_connection().curvature()


@dataclass
class FiberMetric:
    bundle: VBundle
    g: PolyMatrix

    def __post_init__(self):
        if self.g != self.g.T():
            raise ValueError("fiber metric must be symmetric")
        if not self.g.has_unit_det():
            raise ValueError("fiber metric determinant must be a nonzero constant")

    def pair(self, s, t):
        return sum((a * b for a, b in zip(s, self.g.apply(t))), Poly.zero(self.bundle.chart.dim))


def metric_residuals(conn, metric):
    """d_i g - M_i^T g - g M_i for each coordinate direction."""
    g = metric.g
    return [g.diff(i) - m.T() @ g - g @ m for i, m in enumerate(conn.mats())]


def metric_compatibility(conn, metric):
    if conn.bundle.rank != metric.bundle.rank:
        raise ValueError("connection and metric live on different bundles")
    return all(r.is_zero() for r in metric_residuals(conn, metric))


class ModuleMorphism:
    """Morphism of section modules Gamma(B*) -> Gamma(A*) over a polynomial base map.

    Acting on a section beta of B* (Polys in the target chart) it returns
    matrix . (beta composed with base_map), a section of A* over the source.
    """

    def __init__(self, base_map, matrix, source_dim, target_dim):
        self.base_map = list(base_map)
        self.matrix = matrix
        self.source_dim = source_dim
        self.target_dim = target_dim

    def pull(self, f):
        if self.target_dim == 0:
            return Poly.const(self.source_dim, f.constant_value())
        return f.substitute(self.base_map)

    def __call__(self, beta):
        return self.matrix.apply([self.pull(b) for b in beta])


def _check_base_map(base_map, source_dim, target_dim):
    if len(base_map) != target_dim:
        raise ValueError("base map needs one component per target coordinate")
    for f in base_map:
        if not isinstance(f, Poly) or f.n_vars != source_dim:
            raise TypeError("base map components must be polynomials on the source chart")


def star_correspondence(bundle_map, base_map, source_dim, target_dim):
    """Bundle map omega: A -> B over base_map gives the dual pullback on sections.

    omega is rank B x rank A over the source chart. The result sends beta to
    omega^T (beta o base_map).
    """
    _check_base_map(base_map, source_dim, target_dim)
    if bundle_map.n_vars != source_dim:
        raise ValueError("bundle map must have entries on the source chart")
    return ModuleMorphism(base_map, bundle_map.T(), source_dim, target_dim)


def star_inverse(morphism, rank_b):
    """Recover the bundle map from the module morphism by evaluating on dual frames."""
    tgt = morphism.target_dim
    cols = []
    for j in range(rank_b):
        eps = vec_zero(rank_b, tgt)
        eps[j] = Poly.const(tgt, 1)
        cols.append(morphism(eps))
    rank_a = len(cols[0]) if cols else morphism.matrix.rows
    rows = [[cols[j][i] for i in range(rank_a)] for j in range(rank_b)]
    return PolyMatrix(rank_b, rank_a, morphism.source_dim, [a for r in rows for a in r])


def linear_function(section, n, fiber_offset, total):
    """The fiberwise-linear function of a dual section on a bundle total space.

    Base variables occupy 0..n-1, fiber coordinates start at fiber_offset.
    """
    acc = Poly.zero(total)
    for k, c in enumerate(section):
        acc = acc + c.embed(total, 0) * Poly.var(total, fiber_offset + k)
    return acc
