"""Single-axiom perturbations of instances, used for mutation testing.

Each mutation changes one entry of the data so that one defining identity
is violated; the verification suites are expected to name the failure.
"""

from .bundles import LieAlgebroidModel
from .functors import TwoManChart
from .metricdvb import InvolutiveDVB, MetricDVB
from .poisson2 import PoissonStructure2
from .polycore import Poly, PolyMatrix
from .tworep import TwoRep


def _unit_matrix(rows, cols, n, i, j, value=1):
    return PolyMatrix.zero(rows, cols, n).replace(i, j, value)


def _need(cond, axiom, why):
    if not cond:
        raise ValueError(f"mutation {axiom!r} not applicable: {why}")


def _rep_candidates(rep, axiom):
    n, r = rep.n, rep.algebroid.rank
    r0, r1 = rep.rank0, rep.rank1
    if axiom == "chain":
        _need(r0 and r1, axiom, "empty complex")
        for i in range(r1):
            for j in range(r0):
                yield rep.replace(d=rep.d + _unit_matrix(r1, r0, n, i, j))
    elif axiom == "curvature":
        _need(r >= 2 and r0 and r1, axiom, "needs algebroid rank >= 2")
        for i in range(r0):
            for j in range(r1):
                e = _unit_matrix(r0, r1, n, i, j)
                curv = [list(row) for row in rep.curv]
                curv[0][1] = curv[0][1] + e
                curv[1][0] = curv[1][0] - e
                yield rep.replace(curv=curv)
    elif axiom in ("connection", "duality"):
        _need(r >= 1 and r0, axiom, "needs a nonzero E0")
        for a in range(r):
            for i in range(r0):
                for j in range(r0):
                    m0 = list(rep.m0)
                    m0[a] = m0[a] + _unit_matrix(r0, r0, n, i, j)
                    yield rep.replace(m0=m0)
    elif axiom == "d-symmetry":
        _need(r0 >= 2 and r1 >= 2, axiom, "needs rank >= 2")
        for i in range(r1):
            for j in range(r0):
                if i != j:
                    yield rep.replace(d=rep.d + _unit_matrix(r1, r0, n, i, j))
    elif axiom == "r-skew":
        _need(r >= 2 and r0 >= 1, axiom, "needs algebroid rank >= 2")
        # off-diagonal first: the bracket only reads the strict lower triangle
        spots = [(i, j) for i in range(r0) for j in range(i + 1, r1)] + [(i, i) for i in range(min(r0, r1))]
        for i, j in spots:
            s = _unit_matrix(r0, r1, n, i, j)
            if i != j:
                s = s + _unit_matrix(r0, r1, n, j, i)
            if rep.identification is not None:
                s = rep.identification.inverse() @ s
            curv = [list(row) for row in rep.curv]
            curv[0][1] = curv[0][1] + s
            curv[1][0] = curv[1][0] - s
            yield rep.replace(curv=curv)
    else:
        raise ValueError(f"unknown mutation {axiom!r} for tworep")


def _mutate_rep(rep, axiom):
    """First single-entry perturbation that violates the targeted identity.

    chain/curvature/connection target the 2-representation axioms; the three
    self-duality mutations target the self-duality clauses.
    """
    from .tworep import check_tworep, selfdual_report
    selfdual = axiom in ("d-symmetry", "duality", "r-skew")
    if selfdual:
        _need(rep.identification is not None and rep.rank0 == rep.rank1, axiom,
              "needs an identification E0 -> E1*")
    for cand in _rep_candidates(rep, axiom):
        if selfdual and not selfdual_report(cand).ok:
            return cand
        if not selfdual and not check_tworep(cand).ok:
            return cand
    _need(False, axiom, "no single-entry perturbation breaks the identity")


TWOREP_MUTATIONS = ("chain", "curvature", "connection", "d-symmetry", "duality", "r-skew")
MUTATIONS = {
    "lie-algebroid": ("jacobi",),
    "tworep": TWOREP_MUTATIONS,
    "metric-dvb": (),
    "involutive-dvb": ("symmetry",),
    "two-man-atlas": ("mixed", "deg1", "core-terms"),
    "dorfman": ("skew",),
    "poisson2": ("d-symmetry", "duality", "r-skew"),
}


def _asym(mats, axiom):
    _need(mats and mats[0].rows >= 2, axiom, "needs rank >= 2")
    out = list(mats)
    out[0] = out[0] + _unit_matrix(out[0].rows, out[0].cols, out[0].n_vars, 0, 1)
    return out


def _mutate_atlas(inst, axiom):
    from .dvb import Transition
    from .serialize import AtlasInstance
    atlas = inst.atlas
    _need(atlas.transitions, axiom, "no transitions")
    key = sorted(atlas.transitions)[0]
    t = atlas.transitions[key]
    trs = dict(atlas.transitions)
    if axiom == "core-terms":
        _need(t.core_terms and t.core_terms[0].rows and t.core_terms[0].cols, axiom, "empty tensor")
        om = list(t.core_terms)
        om[0] = om[0] + _unit_matrix(om[0].rows, om[0].cols, om[0].n_vars, 0, 0)
        trs[key] = Transition(t.a1, t.a2, t.a0, om)
    else:
        raise ValueError(f"mutation {axiom!r} not applicable: needs the cocycle form")
    return AtlasInstance(type(atlas)(atlas.n, atlas.ranks, atlas.regions, trs), inst.form)


def _mutate_chart(t, axiom):
    _need(t.pairs(), axiom, "no overlaps")
    key = t.pairs()[0]
    m, n = t.rank1, t.n
    if axiom == "mixed":
        _need(m >= 2 and t.rank2 >= 1, axiom, "needs rank1 >= 2 and rank2 >= 1")
        mixed = dict(t.mixed)
        e = _unit_matrix(m, m, n, 1, 0) - _unit_matrix(m, m, n, 0, 1)
        mixed[key] = [mixed[key][0] + e] + list(mixed[key][1:])
        return TwoManChart(n, m, t.rank2, t.regions, t.deg1, t.deg2, mixed)
    if axiom == "deg1":
        _need(m >= 2, axiom, "needs rank1 >= 2")
        deg1 = dict(t.deg1)
        deg1[key] = deg1[key] @ (PolyMatrix.identity(m, n) + _unit_matrix(m, m, n, 0, 1))
        return TwoManChart(n, m, t.rank2, t.regions, deg1, t.deg2, t.mixed)
    if axiom == "core-terms":
        raise ValueError(f"mutation {axiom!r} not applicable: needs the atlas form")
    raise ValueError(f"unknown mutation {axiom!r} for two-man-atlas")


def _mutate_dorfman(inst, axiom):
    from .serialize import DorfmanInstance
    from .worked import DullBracket, _BasicData, dorfman_to_dull, dull_to_dorfman
    _need(axiom == "skew", axiom, "unknown mutation for dorfman")
    dorfman = inst.dorfman
    n, k = dorfman.n, dorfman.k
    _need(k >= 1, axiom, "needs rank >= 1")
    # put the symmetric part on a frame direction hit by (rho, rho*) when an algebroid is given
    row = 0
    if inst.algebroid is not None:
        data = _BasicData(inst.algebroid, dorfman)
        for t in range(k + n):
            img = data.d([Poly.const(n, 1) if i == t else Poly.zero(n) for i in range(k + n)])
            hits = [u for u, c in enumerate(img) if c.terms]
            if hits:
                row = hits[0]
                break
    br = dorfman_to_dull(dorfman)
    table = [[list(v) for v in r] for r in br.table]
    table[row][row][n] = table[row][row][n] + 1
    return DorfmanInstance(dull_to_dorfman(DullBracket(n, k, table)), inst.algebroid)


def _algebroid_candidates(obj):
    n, r = obj.n, obj.rank
    one = Poly.const(n, 1)
    for i in range(r):
        for j in range(i + 1, r):
            for k in range(r):
                structure = [[list(c) for c in row] for row in obj.structure]
                structure[i][j][k] = structure[i][j][k] + one
                structure[j][i][k] = structure[j][i][k] - one
                yield LieAlgebroidModel(n, obj.anchor, structure)
    # anchors that stop being bracket preserving
    if n >= 1 and r >= 2:
        x = Poly.var(n, 0)
        anchor = obj.anchor + _unit_matrix(r, n, n, 0, 0) + _unit_matrix(r, n, n, 1, 0).scale(x)
        yield LieAlgebroidModel(n, anchor, obj.structure)


def _mutate_algebroid(obj, axiom):
    from .bundles import check_lie_algebroid
    _need(obj.rank >= 2, axiom, "needs rank >= 2")
    for cand in _algebroid_candidates(obj):
        if not check_lie_algebroid(cand).ok:
            return cand
    _need(False, axiom, "no single-entry perturbation breaks the axioms")


def mutate(obj, axiom):
    """Return a copy of obj with the named identity broken."""
    from .serialize import AtlasInstance, DorfmanInstance
    if isinstance(obj, LieAlgebroidModel):
        _need(axiom == "jacobi", axiom, "unknown mutation for lie-algebroid")
        return _mutate_algebroid(obj, axiom)
    if isinstance(obj, TwoRep):
        return _mutate_rep(obj, axiom)
    if isinstance(obj, MetricDVB):
        _need(False, axiom, "metric-dvb data is validated on construction; mutate the involutive form")
    if isinstance(obj, InvolutiveDVB):
        _need(axiom == "symmetry", axiom, "unknown mutation for involutive-dvb")
        return InvolutiveDVB(obj.host, _asym(obj.kappa, axiom))
    if isinstance(obj, TwoManChart):
        return _mutate_chart(obj, axiom)
    if isinstance(obj, AtlasInstance):
        return _mutate_atlas(obj, axiom)
    if isinstance(obj, DorfmanInstance):
        return _mutate_dorfman(obj, axiom)
    if isinstance(obj, PoissonStructure2):
        _need(axiom in MUTATIONS["poisson2"], axiom, "unknown mutation for poisson2")
        return PoissonStructure2(_mutate_rep(obj.rep, axiom), mutation=True, cap=obj.cap)
    raise TypeError(f"cannot mutate {type(obj).__name__}")
