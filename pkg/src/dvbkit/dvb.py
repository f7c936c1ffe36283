"""Decomposed double vector bundles, splittings, duals and atlases.

A decomposed double vector bundle with sides A, B and core C has points
(a, b, c) over a base point. Elements of the dual over A are written
(a, gamma, beta') with gamma in C* and beta' in the core B*; elements of the
dual over B are (gamma, b, alpha') with core A*.

Bilinear tensors V1 x V2 -> V0 are stored as a list of PolyMatrix, one per
output coordinate: T(v1, v2)_k = v1^T T[k] v2.

A splitting change phi moves from splitting 1 to splitting 2 with
sigma_1(a) - sigma_2(a) equal to the core-linear section of phi(a).
"""

from dataclasses import dataclass, field

from .polycore import Poly, PolyMatrix
from .report import Report


def dual_name(name):
    return name[:-1] if name.endswith("*") else name + "*"


@dataclass(frozen=True)
class DecomposedDVB:
    n: int
    rank_a: int
    rank_b: int
    rank_c: int
    names: tuple = ("A", "B", "C")

    def side_ranks(self):
        return (self.rank_a, self.rank_b)

    def core_point(self, c):
        """Core element c embedded as (0, 0, c)."""
        zero = _zero_like(c)
        return ([zero] * self.rank_a, [zero] * self.rank_b, list(c))


def _zero_like(vec):
    if vec and isinstance(vec[0], Poly):
        return Poly.zero(vec[0].n_vars)
    return 0


def dot(u, v):
    total = None
    for a, b in zip(u, v):
        t = a * b
        total = t if total is None else total + t
    return 0 if total is None else total


def dualize_decomposed(dvb, over):
    """Dual over side A gives (A, C*; B*); over side B gives (C*, B; A*)."""
    a, b, c = dvb.names
    if over == "A":
        return DecomposedDVB(dvb.n, dvb.rank_a, dvb.rank_c, dvb.rank_b, (a, dual_name(c), dual_name(b)))
    if over == "B":
        return DecomposedDVB(dvb.n, dvb.rank_c, dvb.rank_b, dvb.rank_a, (dual_name(c), b, dual_name(a)))
    raise ValueError("dualize over 'A' or 'B'")


def pair_over_a(elem_a, d):
    """<Phi, d>_A for Phi = (a, gamma, beta') and d = (a, b, c)."""
    a1, gamma, beta = elem_a
    a2, b, c = d
    if list(a1) != list(a2):
        raise ValueError("projection mismatch: elements lie over different points of A")
    return dot(beta, b) + dot(gamma, c)


def pair_over_b(elem_b, d):
    """<Psi, d>_B for Psi = (gamma, b, alpha') and d = (a, b, c)."""
    gamma, b1, alpha = elem_b
    a, b2, c = d
    if list(b1) != list(b2):
        raise ValueError("projection mismatch: elements lie over different points of B")
    return dot(alpha, a) + dot(gamma, c)


def dual_splitting_over_a(a, gamma, rank_b):
    zero = _zero_like(list(a) + list(gamma))
    return (list(a), list(gamma), [zero] * rank_b)


def canonical_pair(elem_a, elem_b, d):
    """<Phi, d>_A - <Psi, d>_B for Phi in D*_A, Psi in D*_B sharing gamma."""
    if list(elem_a[1]) != list(elem_b[0]):
        raise ValueError("projection mismatch: Phi and Psi have different C* components")
    return pair_over_a(elem_a, d) - pair_over_b(elem_b, d)


def double_dual_pairing_matrix(dvb):
    """Pairing of D with its double dual over A, as a block matrix on (b, c).

    Dualizing over A twice returns sides (A, B) and core C; the natural
    pairing <Phi, d>_A = <beta', b> + <gamma, c> seen from either side is the
    identity block matrix under the literal identification B** = B, C** = C.
    """
    dual = dualize_decomposed(dvb, "A")
    back = dualize_decomposed(dual, "A")
    size = back.rank_b + back.rank_c
    rows = []
    for i in range(size):
        row = []
        for j in range(size):
            # element of D** over A: (a, c'', b''), paired with Phi = (a, gamma, beta')
            ebb = [1 if i == k else 0 for k in range(size)]
            phi_fiber = [1 if j == k else 0 for k in range(size)]
            c2, b2 = ebb[:back.rank_c], ebb[back.rank_c:]
            gamma, beta = phi_fiber[:dual.rank_b], phi_fiber[dual.rank_b:]
            row.append(dot(gamma, c2) + dot(beta, b2))
        rows.append(row)
    return back, rows


def add_over_a(d1, d2):
    """Addition in the fibres of D -> A (same a)."""
    if list(d1[0]) != list(d2[0]):
        raise ValueError("points do not share the A-projection")
    return (list(d1[0]), [x + y for x, y in zip(d1[1], d2[1])], [x + y for x, y in zip(d1[2], d2[2])])


def add_over_b(d1, d2):
    if list(d1[1]) != list(d2[1]):
        raise ValueError("points do not share the B-projection")
    return ([x + y for x, y in zip(d1[0], d2[0])], list(d1[1]), [x + y for x, y in zip(d1[2], d2[2])])


def tensor_eval(t, v1, v2):
    """T(v1, v2) for a bilinear tensor stored as a list of matrices."""
    out = []
    for m in t:
        acc = None
        for i, x in enumerate(v1):
            for j, y in enumerate(v2):
                c = m[i, j]
                if c.terms:
                    if isinstance(x, Poly) or isinstance(y, Poly):
                        term = c * x * y
                    elif c.is_constant():
                        term = c.constant_value() * x * y
                    else:
                        raise ValueError("numeric points need a tensor with constant entries")
                    acc = term if acc is None else acc + term
        out.append(acc if acc is not None else _zero_like(list(v1) + list(v2)))
    return out


def tensor_zero(k, rows, cols, n):
    return [PolyMatrix.zero(rows, cols, n) for _ in range(k)]


def tensor_partial(t, v1):
    """Hom(V2, V0) matrix of T(v1, .)."""
    k = len(t)
    cols = t[0].cols if t else 0
    n = t[0].n_vars if t else (v1[0].n_vars if v1 else 0)
    ent = []
    for m in t:
        for j in range(cols):
            acc = Poly.zero(n)
            for i, x in enumerate(v1):
                if m[i, j].terms and x.terms:
                    acc = acc + m[i, j] * x
            ent.append(acc)
    return PolyMatrix(k, cols, n, ent)


def tensor_partial_second(t, v2):
    """Hom(V1, V0) matrix of T(., v2)."""
    return tensor_partial(tensor_swap(t), v2)


def tensor_swap(t):
    return [m.T() for m in t]


def tensor_add(s, t):
    return [a + b for a, b in zip(s, t)]


def tensor_neg(t):
    return [-a for a in t]


def tensor_is_zero(t):
    return all(m.is_zero() for m in t)


@dataclass
class LinearSection:
    """Linear section of a decomposed DVB relative to its reference splitting.

    over = "B": a section B -> D over the A-section `base`, core-linear part
    core_map in Hom(B, C) (rank_c x rank_b). over = "A": base is a B-section and
    core_map is in Hom(A, C).
    """

    host: DecomposedDVB
    over: str
    base: list
    core_map: PolyMatrix

    def __post_init__(self):
        h = self.host
        if self.over == "B":
            shape = (h.rank_c, h.rank_b)
            base_rank = h.rank_a
        elif self.over == "A":
            shape = (h.rank_c, h.rank_a)
            base_rank = h.rank_b
        else:
            raise ValueError("over must be 'A' or 'B'")
        if (self.core_map.rows, self.core_map.cols) != shape or len(self.base) != base_rank:
            raise ValueError("linear section shapes do not match the host")

    def evaluate(self, fiber_point):
        """Point of D (decomposed coordinates) over the given side element."""
        c = self.core_map.apply(fiber_point)
        if self.over == "B":
            return (list(self.base), list(fiber_point), c)
        return (list(fiber_point), list(self.base), c)

    def __eq__(self, other):
        return (isinstance(other, LinearSection) and self.over == other.over
                and self.base == other.base and self.core_map == other.core_map)


@dataclass
class SplittingChange:
    """phi(a, b) in C, stored as rank_c matrices of shape rank_a x rank_b."""

    components: list = field(default_factory=list)

    def negate(self):
        return SplittingChange(tensor_neg(self.components))

    def at_a(self, a):
        """Hom(B, C) matrix of phi(a, .)."""
        return tensor_partial(self.components, a)

    def at_b(self, b):
        """Hom(A, C) matrix of phi(., b)."""
        return tensor_partial_second(self.components, b)


def apply_change_of_splitting(section, change):
    """Re-express a linear section in the splitting reached by `change`."""
    if section.over == "B":
        shift = change.at_a(section.base)
    else:
        shift = change.at_b(section.base)
    return LinearSection(section.host, section.over, list(section.base), section.core_map + shift)


def lift(host, over, base):
    """Linear section given by the reference splitting (zero core-linear part)."""
    n = base[0].n_vars if base else host.n
    if over == "B":
        core_map = PolyMatrix.zero(host.rank_c, host.rank_b, n)
    else:
        core_map = PolyMatrix.zero(host.rank_c, host.rank_a, n)
    return LinearSection(host, over, list(base), core_map)


def change_point(d, change):
    """Coordinates of a point after a splitting change: c -> c + phi(a, b)."""
    a, b, c = d
    shift = tensor_eval(change.components, a, b)
    return (list(a), list(b), [x + y for x, y in zip(c, shift)])


# ----------------------------------------------------------------- atlases

@dataclass
class Transition:
    """Chart change (v1, v2, v0) -> (A1 v1, A2 v2, A0 v0 + core_terms(v1, v2))."""

    a1: PolyMatrix
    a2: PolyMatrix
    a0: PolyMatrix
    core_terms: list

    def apply(self, v1, v2, v0):
        w1 = self.a1.apply(v1)
        w2 = self.a2.apply(v2)
        w0 = [x + y for x, y in zip(self.a0.apply(v0), tensor_eval(self.core_terms, v1, v2))]
        return w1, w2, w0

    def embed(self, n_new):
        return Transition(self.a1.embed(n_new), self.a2.embed(n_new), self.a0.embed(n_new),
                          [m.embed(n_new) for m in self.core_terms])

    def __eq__(self, other):
        return (isinstance(other, Transition) and self.a1 == other.a1 and self.a2 == other.a2
                and self.a0 == other.a0 and self.core_terms == other.core_terms)


def identity_transition(m1, m2, m0, n):
    return Transition(PolyMatrix.identity(m1, n), PolyMatrix.identity(m2, n),
                      PolyMatrix.identity(m0, n), tensor_zero(m0, m1, m2, n))


def compose_transitions(later, earlier):
    """later o earlier, as a single transition."""
    a1 = later.a1 @ earlier.a1
    a2 = later.a2 @ earlier.a2
    a0 = later.a0 @ earlier.a0
    core_terms = []
    for k in range(a0.rows):
        acc = earlier.a1.T() @ later.core_terms[k] @ earlier.a2
        for l in range(later.a0.cols):
            c = later.a0[k, l]
            if c.terms:
                acc = acc + earlier.core_terms[l].map(lambda e: e * c)
        core_terms.append(acc)
    return Transition(a1, a2, a0, core_terms)


def invert_transition(t):
    """Inverse chart change (requires unit-determinant blocks)."""
    b1, b2, b0 = t.a1.inverse(), t.a2.inverse(), t.a0.inverse()
    # v0 = b0 (w0 - omega(b1 w1, b2 w2))
    core_terms = []
    for k in range(b0.rows):
        acc = PolyMatrix.zero(t.a1.rows, t.a2.rows, t.a1.n_vars)
        for l in range(b0.cols):
            c = b0[k, l]
            if c.terms:
                acc = acc - (b1.T() @ t.core_terms[l] @ b2).map(lambda e: e * c)
        core_terms.append(acc)
    return Transition(b1, b2, b0, core_terms)


def dual_transition_over_first(t):
    """Transition of the dual over side 1: sides (V1, V0*), core V2*."""
    b0 = t.a0.inverse().T()
    b2 = t.a2.inverse().T()
    m0, m2 = t.a0.rows, t.a2.rows
    m1 = t.a1.rows
    n = t.a1.n_vars
    core_terms = []
    for jp in range(m2):
        acc = PolyMatrix.zero(m1, m0, n)
        for j in range(m2):
            c2 = b2[jp, j]
            if not c2.terms:
                continue
            for k in range(m0):
                # column k of T(., .)_k restricted to v2 = e_j, then pushed through b0
                col = PolyMatrix(m1, 1, n, t.core_terms[k].col(j))
                row = PolyMatrix(1, m0, n, b0.row(k))
                acc = acc - (col @ row).map(lambda e: e * c2)
        core_terms.append(acc)
    return Transition(t.a1, b0, b2, core_terms)


@dataclass
class DVBAtlas:
    """Finite atlas of a double vector bundle over the chart R^n.

    regions: list of boxes [(lo, hi), ...] per chart. transitions maps an
    ordered pair (alpha, beta) of overlapping charts to the change from
    chart beta coordinates to chart alpha coordinates.
    """

    n: int
    ranks: tuple
    regions: list
    transitions: dict
    overlaps: list = None

    def __post_init__(self):
        if self.overlaps is None:
            pairs = set()
            for a, b in self.transitions:
                if a != b:
                    pairs.add((min(a, b), max(a, b)))
            self.overlaps = sorted(pairs)

    def charts(self):
        return list(range(len(self.regions)))

    def transition(self, alpha, beta):
        if alpha == beta:
            m1, m2, m0 = self.ranks
            return identity_transition(m1, m2, m0, self.n)
        try:
            return self.transitions[(alpha, beta)]
        except KeyError:
            raise ValueError(f"missing transition for declared overlap ({alpha}, {beta})") from None

    def overlapping(self, a, b):
        return a == b or (min(a, b), max(a, b)) in self.overlaps


def check_atlas(atlas):
    """Unit determinants and the cocycle law on every declared triple overlap."""
    rep = Report("atlas")
    charts = atlas.charts()
    for a, b in atlas.overlaps:
        for x, y in ((a, b), (b, a)):
            t = atlas.transition(x, y)
            for name, m in (("A1", t.a1), ("A2", t.a2), ("A0", t.a0)):
                rep.add(f"unit-det[{x},{y}].{name}", m.has_unit_det(), summarize_det(m))
    for g in charts:
        for a in charts:
            if a == g or not atlas.overlapping(g, a):
                continue
            for b in charts:
                if b == a or not (atlas.overlapping(a, b) and atlas.overlapping(g, b)):
                    continue
                lhs = compose_transitions(atlas.transition(g, a), atlas.transition(a, b))
                rhs = atlas.transition(g, b)
                tag = f"cocycle[{g},{a},{b}]"
                rep.add_residual(tag + ".A1", lhs.a1 - rhs.a1)
                rep.add_residual(tag + ".A2", lhs.a2 - rhs.a2)
                rep.add_residual(tag + ".A0", lhs.a0 - rhs.a0)
                rep.add_residual(tag + ".core_terms", [x - y for x, y in zip(lhs.core_terms, rhs.core_terms)])
    return rep


def summarize_det(m):
    if m.rows != m.cols:
        return "non-square"
    return "" if m.has_unit_det() else f"det = {m.det().to_str()}"
