"""Passing between [2]-manifold chart data and metric / involutive atlases.

A TwoManChart holds, for each ordered overlap (alpha, beta), the change of
local generators of a [2]-manifold with m degree-1 and r degree-2
generators:

    xi^beta_i  = sum_j omega[j, i] xi^alpha_j
    eta^beta_i = sum_j psi[j, i] eta^alpha_j + 2-form rho[i]

where rho[i] is a skew m x m matrix whose entry [l, k] (k < l) is the
coefficient of xi^alpha_k xi^alpha_l. Degree-2 coordinates (v, G) then
change as (psi v, rho(v) + omega G omega^T).

geometrize turns this into the double vector bundle atlas with charts
(w, v, u) in Q x B x Q* and transitions

    (w, v, u) -> (omega_ba^T w, psi_ab v, omega_ab u + rho_ab(v) omega_ba^T w),

which preserve the chart metric <u, w'> + <u', w>. algebraize reads the
chart data back off such an atlas.
"""

from dataclasses import dataclass

from .dvb import (DVBAtlas, Transition, check_atlas, dual_transition_over_first)
from .poisson2 import GradedFunction, two_form_of
from .polycore import Poly, PolyMatrix
from .report import Report


@dataclass
class TwoManChart:
    n: int
    rank1: int
    rank2: int
    regions: list
    deg1: dict
    deg2: dict
    mixed: dict

    def __post_init__(self):
        keys = set(self.deg1)
        if keys != set(self.deg2) or keys != set(self.mixed):
            raise ValueError("omega, psi and rho must be given on the same overlaps")
        for key in keys:
            w, p, r = self.deg1[key], self.deg2[key], self.mixed[key]
            if (w.rows, w.cols) != (self.rank1, self.rank1) or (p.rows, p.cols) != (self.rank2, self.rank2):
                raise ValueError(f"cocycle shapes wrong on overlap {key}")
            if len(r) != self.rank2:
                raise ValueError(f"rho needs one 2-form per degree-2 generator on {key}")
            for mat in r:
                if (mat.rows, mat.cols) != (self.rank1, self.rank1):
                    raise ValueError(f"rho entries must be m x m on {key}")

    def charts(self):
        return list(range(len(self.regions)))

    def pairs(self):
        return sorted(self.deg1)

    def get(self, a, b):
        if a == b:
            n, m, r = self.n, self.rank1, self.rank2
            return (PolyMatrix.identity(m, n), PolyMatrix.identity(r, n),
                    [PolyMatrix.zero(m, m, n) for _ in range(r)])
        if (a, b) not in self.deg1:
            raise ValueError(f"missing cocycle for overlap ({a}, {b})")
        return self.deg1[(a, b)], self.deg2[(a, b)], self.mixed[(a, b)]

    def overlapping(self, a, b):
        return a == b or (a, b) in self.deg1

    def __eq__(self, other):
        return (isinstance(other, TwoManChart) and self.regions == other.regions
                and self.deg1 == other.deg1 and self.deg2 == other.deg2 and self.mixed == other.mixed)


def mixed_apply(mixed, v):
    """rho(v) = sum_i v_i rho[i] as a skew matrix."""
    out = PolyMatrix.zero(mixed[0].rows, mixed[0].cols, mixed[0].n_vars) if mixed else None
    for vi, mat in zip(v, mixed):
        if vi.terms:
            out = out + mat.map(lambda c: c * vi)
    return out


def check_invariants(t):
    report = Report("two-man-chart")
    for key in t.pairs():
        w, p, r = t.get(*key)
        report.add(f"unit-det[{key[0]},{key[1]}].deg1", w.has_unit_det())
        report.add(f"unit-det[{key[0]},{key[1]}].deg2", p.has_unit_det())
        for i, mat in enumerate(r):
            report.add_residual(f"skew[{key[0]},{key[1]}].mixed{i}", mat + mat.T())
    return report


def check_cocycles(t):
    """Invariants plus the composition laws on every triple of overlapping charts."""
    report = check_invariants(t)
    report.suite = "two-man-cocycle"
    charts = t.charts()
    for g in charts:
        for a in charts:
            if a == g or not t.overlapping(g, a):
                continue
            for b in charts:
                if b == a or not (t.overlapping(a, b) and t.overlapping(g, b)):
                    continue
                w_ga, p_ga, r_ga = t.get(g, a)
                w_ab, p_ab, r_ab = t.get(a, b)
                w_gb, p_gb, r_gb = t.get(g, b)
                tag = f"cocycle[{g},{a},{b}]"
                report.add_residual(tag + ".deg1", w_ga @ w_ab - w_gb)
                report.add_residual(tag + ".deg2", p_ga @ p_ab - p_gb)
                res = []
                for i in range(t.rank2):
                    val = w_ga @ r_ab[i] @ w_ga.T() - r_gb[i]
                    for j in range(t.rank2):
                        c = p_ab[j, i]
                        if c.terms:
                            val = val + r_ga[j].map(lambda e: e * c)
                    res.append(val)
                report.add_residual(tag + ".mixed", res)
    return report


def chart_transition(t, a, b):
    """Double vector bundle chart change from chart b to chart a."""
    w_ab, p_ab, r_ab = t.get(a, b)
    w_ba = t.get(b, a)[0]
    a1 = w_ba.T()
    m, r, n = t.rank1, t.rank2, t.n
    tensor = []
    for k in range(m):
        ent = []
        for col in range(m):
            for i in range(r):
                ent.append((r_ab[i] @ a1)[k, col])
        tensor.append(PolyMatrix(m, r, n, ent))
    return Transition(a1, p_ab, w_ab, tensor)


@dataclass
class Geometrized:
    metric_atlas: DVBAtlas
    involutive_atlas: DVBAtlas
    report: Report


def chart_metric_residual(tr, n, m, r):
    """<A0 u + T(w, v), A1 w'> + <A0 u' + T(w', v), A1 w> - (<u, w'> + <u', w>) symbolically."""
    nv = n + 4 * m + r
    var = lambda i: Poly.var(nv, i)
    w = [var(n + i) for i in range(m)]
    w2 = [var(n + m + i) for i in range(m)]
    v = [var(n + 2 * m + i) for i in range(r)]
    u = [var(n + 2 * m + r + i) for i in range(m)]
    u2 = [var(n + 3 * m + r + i) for i in range(m)]
    te = tr.embed(nv)
    nw, nv_, nu = te.apply(w, v, u)
    nw2, _, nu2 = te.apply(w2, v, u2)
    dot = lambda p, q: sum((x * y for x, y in zip(p, q)), Poly.zero(nv))
    return dot(nu, nw2) + dot(nu2, nw) - dot(u, w2) - dot(u2, w)


def involution_residual(tr, n, m, r):
    """T o I - I o T on the dual chart (kappa = 0 in every chart)."""
    nv = n + 2 * m + r
    var = lambda i: Poly.var(nv, i)
    q1 = [var(n + i) for i in range(m)]
    q2 = [var(n + m + i) for i in range(m)]
    beta = [var(n + 2 * m + i) for i in range(r)]
    te = tr.embed(nv)
    inv = lambda a, b, c: (list(b), list(a), [-x for x in c])
    lhs = te.apply(*inv(q1, q2, beta))
    rhs = inv(*te.apply(q1, q2, beta))
    return [x - y for part_l, part_r in zip(lhs, rhs) for x, y in zip(part_l, part_r)]


def geometrize(t):
    cocycles = check_cocycles(t)
    if not cocycles.ok:
        raise ValueError(f"cocycle law violated: {cocycles.failed_names()[0]}")
    n, m, r = t.n, t.rank1, t.rank2
    transitions = {key: chart_transition(t, *key) for key in t.pairs()}
    metric_atlas = DVBAtlas(n, (m, r, m), list(t.regions), transitions)
    dual = {key: dual_transition_over_first(tr) for key, tr in transitions.items()}
    inv_atlas = DVBAtlas(n, (m, m, r), list(t.regions), dual)
    report = Report("geometrize")
    report.extend(check_atlas(metric_atlas), "metric-atlas:")
    report.extend(check_atlas(inv_atlas), "involutive-atlas:")
    for key, tr in transitions.items():
        report.add_residual(f"metric-agreement[{key[0]},{key[1]}]", chart_metric_residual(tr, n, m, r))
    for key, tr in dual.items():
        report.add_residual(f"involution[{key[0]},{key[1]}]", involution_residual(tr, n, m, r))
    return Geometrized(metric_atlas, inv_atlas, report)


def _metric_from_involutive(atlas):
    m, m2, r = atlas.ranks
    trs = {key: dual_transition_over_first(tr) for key, tr in atlas.transitions.items()}
    return DVBAtlas(atlas.n, (m, r, m), list(atlas.regions), trs)


def algebraize(atlas, involutive=False):
    """Chart data of the [2]-manifold of a metric (or involutive) atlas."""
    if involutive:
        atlas = _metric_from_involutive(atlas)
    m, r, m0 = atlas.ranks
    if m0 != m:
        raise ValueError("metric atlas needs core rank equal to the rank of Q")
    n = atlas.n
    deg1, deg2, mixed = {}, {}, {}
    for key, tr in atlas.transitions.items():
        deg1[key] = tr.a0
        deg2[key] = tr.a2
        a1inv = tr.a1.inverse()
        mats = []
        for i in range(r):
            ent = []
            for k in range(m):
                row = [tr.core_terms[k][a, i] for a in range(m)]
                for j in range(m):
                    acc = Poly.zero(n)
                    for a in range(m):
                        if row[a].terms and a1inv[a, j].terms:
                            acc = acc + row[a] * a1inv[a, j]
                    ent.append(acc)
            mats.append(PolyMatrix(m, m, n, ent))
        mixed[key] = mats
    return TwoManChart(n, m, r, list(atlas.regions), deg1, deg2, mixed)


def chart_algebra(t):
    """Generator functions of one chart of the [2]-manifold: (base, degree 1, degree 2)."""
    n, m, r = t.n, t.rank1, t.rank2
    return ([GradedFunction.base(n, m, r, mu) for mu in range(n)],
            [GradedFunction.odd(n, m, r, a) for a in range(m)],
            [GradedFunction.even(n, m, r, b) for b in range(r)])


def roundtrip_check(instance, involutive=False):
    report = Report("roundtrip")
    if isinstance(instance, TwoManChart):
        geo = geometrize(instance)
        report.extend(geo.report, "geometrize:")
        back = algebraize(geo.metric_atlas)
        report.add("algebraize(geometrize).metric", back == instance)
        back2 = algebraize(geo.involutive_atlas, involutive=True)
        report.add("algebraize(geometrize).involutive", back2 == instance)
    elif isinstance(instance, DVBAtlas):
        chart = algebraize(instance, involutive=involutive)
        geo = geometrize(chart)
        target = geo.involutive_atlas if involutive else geo.metric_atlas
        same = all(target.transitions.get(k) == tr for k, tr in instance.transitions.items())
        report.add("geometrize(algebraize).transitions", same and set(target.transitions) == set(instance.transitions))
    else:
        raise TypeError("roundtrip_check takes a TwoManChart or a DVBAtlas")
    return report


# ------------------------------------------------------------ morphisms

@dataclass
class IDVBMorphism:
    """Decomposed morphism (q, q', beta) -> (wq q, wq q', wb beta + w12(q, q')).

    base_map lists the images of the target coordinates as polynomials on
    the source base; w12[l] is an m1 x m1 matrix with w12(q, q')_l = q^T w12[l] q'.
    """

    base_map: list
    wq: PolyMatrix
    wb: PolyMatrix
    w12: list

    @property
    def source_n(self):
        return self.wq.n_vars

    def __eq__(self, other):
        return (isinstance(other, IDVBMorphism) and self.base_map == other.base_map
                and self.wq == other.wq and self.wb == other.wb and self.w12 == other.w12)


def _pull(f, base_map, n_source):
    if not base_map:
        return Poly.const(n_source, f.constant_value()) if f.terms else Poly.zero(n_source)
    return f.substitute(base_map)


def _pull_matrix(mat, base_map, n_source):
    return PolyMatrix(mat.rows, mat.cols, n_source, [_pull(e, base_map, n_source) for e in mat.entries])


def equivariance_report(mor):
    """Omega o I1 = I2 o Omega in decomposed form: each w12[l] skew."""
    report = Report("idvb-morphism")
    for l, mat in enumerate(mor.w12):
        report.add_residual(f"equivariance[beta{l}]", mat + mat.T())
    return report


def compose_morphisms(later, earlier):
    n1 = earlier.source_n
    bm = [_pull(f, earlier.base_map, n1) for f in later.base_map]
    wq2 = _pull_matrix(later.wq, earlier.base_map, n1)
    wb2 = _pull_matrix(later.wb, earlier.base_map, n1)
    w12 = []
    for l in range(wb2.rows):
        acc = earlier.wq.T() @ _pull_matrix(later.w12[l], earlier.base_map, n1) @ earlier.wq
        for j in range(wb2.cols):
            c = wb2[l, j]
            if c.terms:
                acc = acc + earlier.w12[j].map(lambda e: e * c)
        w12.append(acc)
    return IDVBMorphism(bm, wq2 @ earlier.wq, wb2 @ earlier.wb, w12)


def skew_unit(m, k, l, n):
    """Map Q -> Q* of the elementary 2-form: entry [l, k] = 1, entry [k, l] = -1."""
    return PolyMatrix.zero(m, m, n).replace(l, k, 1).replace(k, l, -1)


@dataclass
class ModulePair:
    """Pullbacks on isotropic sections and on sections of Q*, over a base map.

    lift_images[i] and wedge_images[(k, l)] are (b, H) pairs describing
    isotropic linear sections of the source; q_star is the matrix of the
    pullback on sections of Q* (columns are images of the frame).
    """

    base_map: list
    n_source: int
    q_star: PolyMatrix
    lift_images: list
    wedge_images: dict

    def pull_q(self, tau):
        pulled = [_pull(t, self.base_map, self.n_source) for t in tau]
        return self.q_star.apply(pulled)

    def pull_isotropic(self, b, h):
        m1 = self.q_star.rows
        rb1 = len(self.lift_images[0][0]) if self.lift_images else 0
        out_b = [Poly.zero(self.n_source)] * rb1
        out_h = PolyMatrix.zero(m1, m1, self.n_source)

        def add(coeff, image):
            nonlocal out_b, out_h
            ib, ih = image
            out_b = [x + coeff * y for x, y in zip(out_b, ib)]
            out_h = out_h + ih.map(lambda e: e * coeff)

        for i, bi in enumerate(b):
            c = _pull(bi, self.base_map, self.n_source)
            if c.terms:
                add(c, self.lift_images[i])
        m2 = h.rows
        for k in range(m2):
            for l in range(k + 1, m2):
                c = _pull(h[l, k], self.base_map, self.n_source)
                if c.terms:
                    add(c, self.wedge_images[(k, l)])
        return out_b, out_h

    def __eq__(self, other):
        return (isinstance(other, ModulePair) and self.base_map == other.base_map
                and self.q_star == other.q_star and self.lift_images == other.lift_images
                and self.wedge_images == other.wedge_images)


def morphism_to_pair(mor):
    """Module maps of a decomposed morphism; rejects non-equivariant data."""
    eq = equivariance_report(mor)
    if not eq.ok:
        raise ValueError(f"morphism does not commute with the involutions: {eq.failed_names()[0]}")
    n1 = mor.source_n
    m2 = mor.wq.rows
    rb1, rb2 = mor.wb.cols, mor.wb.rows
    wqt = mor.wq.T()
    lifts = []
    for i in range(rb2):
        b = [mor.wb[i, j] for j in range(rb1)]
        lifts.append((b, -mor.w12[i]))
    wedges = {}
    for k in range(m2):
        for l in range(k + 1, m2):
            e = skew_unit(m2, k, l, n1)
            wedges[(k, l)] = ([Poly.zero(n1)] * rb1, wqt @ e @ mor.wq)
    return ModulePair(list(mor.base_map), n1, wqt, lifts, wedges)


def pair_to_morphism(pair):
    """Inverse of morphism_to_pair; checks the wedge compatibility."""
    n1 = pair.n_source
    wq = pair.q_star.T()
    m2 = wq.rows
    rb2 = len(pair.lift_images)
    rb1 = len(pair.lift_images[0][0]) if rb2 else 0
    wb = PolyMatrix.from_rows([list(b) for b, _ in pair.lift_images], n1) if rb2 else PolyMatrix.zero(0, rb1, n1)
    w12 = [-h for _, h in pair.lift_images]
    for k in range(m2):
        for l in range(k + 1, m2):
            b, h = pair.wedge_images[(k, l)]
            want = pair.q_star @ skew_unit(m2, k, l, n1) @ wq
            if any(x.terms for x in b) or h != want:
                raise ValueError(f"pullback of the wedge ({k}, {l}) is not the wedge of pullbacks")
    return IDVBMorphism(list(pair.base_map), wq, wb, w12)


def compose_pairs(later, earlier):
    """Pair of the composite later o earlier (pullbacks compose in reverse)."""
    n1 = earlier.n_source
    bm = [_pull(f, earlier.base_map, n1) for f in later.base_map]
    q_cols = [earlier.pull_q(later.q_star.col(j)) for j in range(later.q_star.cols)]
    m1 = earlier.q_star.rows
    q_star = PolyMatrix(m1, len(q_cols), n1, [q_cols[j][i] for i in range(m1) for j in range(len(q_cols))])
    lifts = [earlier.pull_isotropic(b, h) for b, h in later.lift_images]
    wedges = {key: earlier.pull_isotropic(b, h) for key, (b, h) in later.wedge_images.items()}
    return ModulePair(bm, n1, q_star, lifts, wedges)


def morphism_bridge(x):
    """Decomposed morphism -> module pair, or module pair -> decomposed morphism."""
    if isinstance(x, IDVBMorphism):
        return morphism_to_pair(x)
    if isinstance(x, ModulePair):
        return pair_to_morphism(x)
    raise TypeError("morphism_bridge takes an IDVBMorphism or a ModulePair")


# ------------------------------------------------------------ split morphisms

@dataclass
class TwoManMorphism:
    """Split morphism of [2]-manifolds as pullback data on generators.

    xi^target_a -> sum_b deg1[b, a] xi^source_b,
    eta^target_i -> sum_j deg2[j, i] eta^source_j + 2-form mixed[i].
    """

    base_map: list
    n_source: int
    deg1: PolyMatrix
    deg2: PolyMatrix
    mixed: list

    def pull(self, f):
        n, m, r = self.n_source, self.deg1.rows, self.deg2.rows
        xi_img = [sum_odd(self.deg1.col(a), n, m, r) for a in range(self.deg1.cols)]
        eta_img = []
        for i in range(self.deg2.cols):
            img = two_form_of(self.mixed[i], n, m, r)
            for j in range(r):
                c = self.deg2[j, i]
                if c.terms:
                    img = img + GradedFunction.even(n, m, r, j).scale(c)
            eta_img.append(img)
        out = GradedFunction.zero(n, m, r)
        for (odd, even), c in f.terms.items():
            term = GradedFunction.scalar(n, m, r, _pull(c, self.base_map, n))
            for a in odd:
                term = term * xi_img[a]
            for i, k in enumerate(even):
                for _ in range(k):
                    term = term * eta_img[i]
            out = out + term
        return out

    def __eq__(self, other):
        return (isinstance(other, TwoManMorphism) and self.base_map == other.base_map
                and self.deg1 == other.deg1 and self.deg2 == other.deg2 and self.mixed == other.mixed)


def sum_odd(coeffs, n, m, r):
    out = GradedFunction.zero(n, m, r)
    for b, c in enumerate(coeffs):
        if c.terms:
            out = out + GradedFunction.odd(n, m, r, b).scale(c)
    return out


def identity_morphism(n, m, r):
    return TwoManMorphism([Poly.var(n, i) for i in range(n)], n, PolyMatrix.identity(m, n),
                          PolyMatrix.identity(r, n), [PolyMatrix.zero(m, m, n) for _ in range(r)])


def split_change_morphism(shift, n, m):
    """Change of splitting: eta_i -> eta_i + 2-form phi[i], identity on degree 1."""
    r = len(shift)
    return TwoManMorphism([Poly.var(n, i) for i in range(n)], n, PolyMatrix.identity(m, n),
                          PolyMatrix.identity(r, n), list(shift))


def compose_two_man(later, earlier):
    """Pullback data of later o earlier: first pull by later, then by earlier."""
    n = earlier.n_source
    m, r = earlier.deg1.rows, earlier.deg2.rows
    bm = [_pull(f, earlier.base_map, n) for f in later.base_map]
    deg1_cols = []
    for a in range(later.deg1.cols):
        img = earlier.pull(sum_odd(later.deg1.col(a), later.n_source,
                                  later.deg1.rows, later.deg2.rows))
        deg1_cols.append([img.coefficient((b,)) for b in range(m)])
    deg1 = PolyMatrix(m, len(deg1_cols), n, [deg1_cols[a][b] for b in range(m) for a in range(len(deg1_cols))])
    deg2_cols, mixed = [], []
    for i in range(later.deg2.cols):
        src = two_form_of(later.mixed[i], later.n_source, later.deg1.rows, later.deg2.rows)
        for j in range(later.deg2.rows):
            c = later.deg2[j, i]
            if c.terms:
                src = src + GradedFunction.even(later.n_source, later.deg1.rows, later.deg2.rows, j).scale(c)
        img = earlier.pull(src)
        zero_e = (0,) * r
        deg2_cols.append([img.coefficient((), tuple(1 if t == j else 0 for t in range(r))) for j in range(r)])
        h = PolyMatrix.zero(m, m, n)
        for k in range(m):
            for l in range(k + 1, m):
                c = img.coefficient((k, l), zero_e)
                if c.terms:
                    h = h.replace(l, k, c).replace(k, l, -c)
        mixed.append(h)
    deg2 = PolyMatrix(r, len(deg2_cols), n, [deg2_cols[i][j] for j in range(r) for i in range(len(deg2_cols))])
    return TwoManMorphism(bm, n, deg1, deg2, mixed)


# ------------------------------------------------------------ degree 1

@dataclass
class VectorBundleAtlas:
    n: int
    rank: int
    regions: list
    transitions: dict

    def get(self, a, b):
        if a == b:
            return PolyMatrix.identity(self.rank, self.n)
        return self.transitions[(a, b)]


def degree1_geometrize(cocycles, n, rank, regions):
    """Vector bundle atlas from degree-1 cocycles, with checks and round trip."""
    report = Report("degree1")
    atlas = VectorBundleAtlas(n, rank, list(regions), dict(cocycles))
    charts = list(range(len(regions)))
    present = lambda a, b: a == b or (a, b) in cocycles
    for key, mat in sorted(cocycles.items()):
        report.add(f"unit-det[{key[0]},{key[1]}]", mat.has_unit_det())
    for g in charts:
        for a in charts:
            for b in charts:
                if len({g, a, b}) < 2 or not (present(g, a) and present(a, b) and present(g, b)):
                    continue
                report.add_residual(f"cocycle[{g},{a},{b}]", atlas.get(g, a) @ atlas.get(a, b) - atlas.get(g, b))
    # round trip: express the frame of chart b in chart a coordinates
    for (a, b), mat in sorted(cocycles.items()):
        cols = [mat.apply([Poly.const(n, 1 if i == j else 0) for i in range(rank)]) for j in range(rank)]
        back = PolyMatrix(rank, rank, n, [cols[j][i] for i in range(rank) for j in range(rank)])
        report.add(f"roundtrip[{a},{b}]", back == mat)
    if not report.ok:
        raise ValueError(f"degree-1 cocycle data invalid: {report.failed_names()[0]}")
    return atlas, report
