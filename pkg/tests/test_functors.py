import pytest

from dvbkit.dvb import check_atlas, identity_transition
from dvbkit.functors import (IDVBMorphism, ModulePair, TwoManChart, VectorBundleAtlas, algebraize,
                             check_cocycles, compose_morphisms, compose_pairs, compose_two_man,
                             degree1_geometrize, equivariance_report, geometrize, identity_morphism,
                             morphism_bridge, roundtrip_check, skew_unit, split_change_morphism)
from dvbkit.mutations import mutate
from dvbkit.poisson2 import GradedFunction, two_form_of
from dvbkit.polycore import Poly, PolyMatrix, random_matrix, random_unimodular
from dvbkit.randomgen import random_fraction, random_skew, random_two_man_chart


def _identity_chart(charts, n=1, m=2, r=1):
    keys = [(a, b) for a in range(charts) for b in range(charts) if a != b]
    return TwoManChart(n, m, r, [[(-1, 1)] * n for _ in range(charts)],
                       {k: PolyMatrix.identity(m, n) for k in keys},
                       {k: PolyMatrix.identity(r, n) for k in keys},
                       {k: [PolyMatrix.zero(m, m, n) for _ in range(r)] for k in keys})


# ---------------------------------------------------------------- geometrize

def test_single_chart_is_trivial():
    t = _identity_chart(1, m=1, r=1)
    geo = geometrize(t)
    assert geo.report.ok and geo.metric_atlas.transitions == {}
    assert check_atlas(geo.metric_atlas).ok


def test_identity_cocycles_give_product_atlas():
    t = _identity_chart(2)
    geo = geometrize(t)
    assert geo.report.ok
    assert all(tr == identity_transition(2, 1, 2, 1) for tr in geo.metric_atlas.transitions.values())


def _const_vec(n, values):
    return [Poly.const(n, v) for v in values]


def test_refined_atlas_metric_is_chart_independent(rng):
    """Pointwise: <u, w'> + <u', w> agrees in both charts of every overlap."""
    t = random_two_man_chart(rng, n=1, rank1=2, rank2=2, charts=3)
    geo = geometrize(t)
    assert geo.report.ok and check_atlas(geo.metric_atlas).ok
    m, r = 2, 2
    metric = lambda e1, e2, x: sum(a.evaluate(x) * b.evaluate(x) for a, b in zip(e1[2], e2[0])) + \
        sum(a.evaluate(x) * b.evaluate(x) for a, b in zip(e2[2], e1[0]))
    for key, tr in geo.metric_atlas.transitions.items():
        for _ in range(25):
            x = [random_fraction(rng)]
            v = _const_vec(1, [random_fraction(rng) for _ in range(r)])
            e1 = (_const_vec(1, [random_fraction(rng) for _ in range(m)]), v,
                  _const_vec(1, [random_fraction(rng) for _ in range(m)]))
            e2 = (_const_vec(1, [random_fraction(rng) for _ in range(m)]), v,
                  _const_vec(1, [random_fraction(rng) for _ in range(m)]))
            assert metric(tr.apply(*e1), tr.apply(*e2), x) == metric(e1, e2, x)


def test_perturbed_mixed_part_names_the_triple(rng):
    t = random_two_man_chart(rng, n=1, rank1=2, rank2=1, charts=3)
    failed = check_cocycles(mutate(t, "mixed")).failed_names()
    assert failed and all(name.startswith("cocycle[") for name in failed)
    with pytest.raises(ValueError, match="cocycle law violated"):
        geometrize(mutate(t, "mixed"))


def test_constant_rescaling_only_breaks_the_cocycle():
    t = _identity_chart(2, m=1)
    deg1 = dict(t.deg1)
    deg1[(0, 1)] = PolyMatrix.from_rows([[2]], 1)
    failed = check_cocycles(TwoManChart(1, 1, 1, t.regions, deg1, t.deg2, t.mixed)).failed_names()
    assert failed == ["cocycle[0,1,0].deg1", "cocycle[1,0,1].deg1"]


def test_non_unit_determinant_rejected():
    t = _identity_chart(2, m=1)
    deg1 = dict(t.deg1)
    deg1[(0, 1)] = PolyMatrix.from_rows([[Poly.var(1, 0)]], 1)
    failed = check_cocycles(TwoManChart(1, 1, 1, t.regions, deg1, t.deg2, t.mixed)).failed_names()
    assert "unit-det[0,1].deg1" in failed


# ---------------------------------------------------------------- graded products

def test_rank_one_products():
    xi, eta = GradedFunction.odd(1, 1, 1, 0), GradedFunction.even(1, 1, 1, 0)
    assert (xi * xi).is_zero()
    assert not (eta * eta).is_zero() and (eta * eta).degree() == 4


def test_skew_product_of_degree_three():
    n, m, r = 1, 2, 1
    xi = lambda a: GradedFunction.odd(n, m, r, a)
    chi = GradedFunction.even(n, m, r, 0)
    a, b = xi(0) * chi, xi(1) * chi
    assert a * b == -(b * a)
    assert a * b == xi(0) * xi(1) * chi * chi


def _random_graded(rng, n, m, r, degree):
    """Random homogeneous element of the given degree."""
    out = GradedFunction.zero(n, m, r)
    for _ in range(3):
        odd = [a for a in range(m) if rng.random() < 0.5]
        if len(odd) > degree or (degree - len(odd)) % 2:
            continue
        term = GradedFunction.scalar(n, m, r, Poly.const(n, random_fraction(rng)) + Poly.var(n, 0))
        for a in rng.sample(odd, len(odd)):
            term = term * GradedFunction.odd(n, m, r, a)
        for _ in range((degree - len(odd)) // 2):
            term = term * GradedFunction.even(n, m, r, rng.randrange(r))
        out = out + term
    return out


def test_graded_commutativity(rng):
    n, m, r = 1, 3, 2
    for _ in range(25):
        da, db = rng.randint(0, 4), rng.randint(0, 4)
        a, b = _random_graded(rng, n, m, r, da), _random_graded(rng, n, m, r, db)
        sign = -1 if da * db % 2 else 1
        assert a * b == (b * a).scale(Poly.const(n, sign))


# ---------------------------------------------------------------- round trips

def test_identity_roundtrip_is_fixed_point():
    t = _identity_chart(2)
    assert roundtrip_check(t).ok
    assert algebraize(geometrize(t).metric_atlas) == t


def test_random_roundtrips(rng):
    for _ in range(3):
        t = random_two_man_chart(rng, n=1, rank1=2, rank2=rng.randint(1, 2), charts=3)
        geo = geometrize(t)
        assert algebraize(geo.metric_atlas) == t
        assert algebraize(geo.involutive_atlas, involutive=True) == t
        assert roundtrip_check(geo.metric_atlas).ok
        assert roundtrip_check(geo.involutive_atlas, involutive=True).ok


# ---------------------------------------------------------------- morphisms

def _random_morphism(rng, n=1, m=2, rb=2, skew=True):
    wq = random_unimodular(rng, m, n, 1, steps=1)
    wb = random_matrix(rng, rb, rb, n, 1, 2, 2)
    w12 = [random_skew(rng, m, n) if skew else random_matrix(rng, m, m, n, 1, 2, 2) for _ in range(rb)]
    return IDVBMorphism([Poly.var(n, 0) + Poly.const(n, 1)], wq, wb, w12)


def test_identity_morphism_gives_identity_pair():
    n, m, rb = 1, 2, 1
    mor = IDVBMorphism([Poly.var(n, 0)], PolyMatrix.identity(m, n), PolyMatrix.identity(rb, n),
                       [PolyMatrix.zero(m, m, n)])
    pair = morphism_bridge(mor)
    assert pair.q_star == PolyMatrix.identity(m, n)
    assert pair.lift_images == [([Poly.const(n, 1)], PolyMatrix.zero(m, m, n))]
    assert pair.wedge_images == {(0, 1): ([Poly.zero(n)], skew_unit(m, 0, 1, n))}


def test_lift_is_sent_to_lift_plus_form(rng):
    mor = _random_morphism(rng)
    pair = morphism_bridge(mor)
    for i in range(2):
        b, h = pair.lift_images[i]
        assert b == [mor.wb[i, j] for j in range(2)]
        assert h == -mor.w12[i]


def test_morphism_pair_roundtrip_and_composition(rng):
    later, earlier = _random_morphism(rng), _random_morphism(rng)
    assert morphism_bridge(morphism_bridge(later)) == later
    composite = morphism_bridge(compose_morphisms(later, earlier))
    assert composite == compose_pairs(morphism_bridge(later), morphism_bridge(earlier))
    assert isinstance(composite, ModulePair)


def test_non_equivariant_morphism_rejected(rng):
    mor = _random_morphism(rng, skew=False)
    assert not equivariance_report(mor).ok
    with pytest.raises(ValueError):
        morphism_bridge(mor)


def test_split_change_morphisms(rng):
    n, m, r = 1, 3, 2
    ident = identity_morphism(n, m, r)
    zero = [PolyMatrix.zero(m, m, n) for _ in range(r)]
    assert split_change_morphism(zero, n, m) == ident
    shift = [random_skew(rng, m, n) for _ in range(r)]
    back = compose_two_man(split_change_morphism(shift, n, m), split_change_morphism([-p for p in shift], n, m))
    assert back == ident
    mor = split_change_morphism(shift, n, m)
    xi, eta = GradedFunction.odd(n, m, r, 0), GradedFunction.even(n, m, r, 1)
    assert mor.pull(xi * eta) == mor.pull(xi) * mor.pull(eta)
    assert mor.pull(eta) == eta + two_form_of(shift[1], n, m, r)


# ---------------------------------------------------------------- degree 1

def test_degree1_single_chart():
    atlas, report = degree1_geometrize({}, 1, 2, [[(0, 1)]])
    assert report.ok and atlas.get(0, 0) == PolyMatrix.identity(2, 1)


def test_degree1_sign_cocycle():
    minus = PolyMatrix.from_rows([[-1]], 1)
    atlas, report = degree1_geometrize({(0, 1): minus, (1, 0): minus}, 1, 1, [[(0, 2)], [(1, 3)]])
    assert report.ok and isinstance(atlas, VectorBundleAtlas)


def test_degree1_refinement_and_failure(rng):
    frames = [random_unimodular(rng, 2, 1, 1, steps=1) for _ in range(3)]
    cocycles = {(a, b): frames[a].inverse() @ frames[b] for a in range(3) for b in range(3) if a != b}
    assert degree1_geometrize(cocycles, 1, 2, [[(0, 1)]] * 3)[1].ok
    cocycles[(0, 2)] = cocycles[(0, 2)] @ PolyMatrix.from_rows([[1, 1], [0, 1]], 1)
    with pytest.raises(ValueError):
        degree1_geometrize(cocycles, 1, 2, [[(0, 1)]] * 3)
