import random
from fractions import Fraction

import pytest

from dvbkit.dvb import (DVBAtlas, DecomposedDVB, SplittingChange, Transition, add_over_a, add_over_b,
                        apply_change_of_splitting, canonical_pair, change_point, check_atlas,
                        compose_transitions, double_dual_pairing_matrix, dual_splitting_over_a,
                        dualize_decomposed, identity_transition, invert_transition, lift, pair_over_a,
                        tensor_eval)
from dvbkit.polycore import Poly, PolyMatrix, SamplePlan, random_matrix, random_poly
from dvbkit.randomgen import random_dvb_atlas, random_fraction


def fr(rng, k):
    return [random_fraction(rng) for _ in range(k)]


def test_dual_ranks():
    d = DecomposedDVB(0, 1, 1, 1)
    da = dualize_decomposed(d, "A")
    assert (da.rank_a, da.rank_b, da.rank_c) == (1, 1, 1)
    assert da.names == ("A", "C*", "B*")
    d2 = DecomposedDVB(0, 1, 2, 3)
    assert dualize_decomposed(d2, "B").side_ranks() == (3, 2)
    assert dualize_decomposed(d2, "B").rank_c == 1


def test_double_dual_is_identity():
    d = DecomposedDVB(1, 2, 3, 2)
    back, rows = double_dual_pairing_matrix(d)
    assert back == d
    size = len(rows)
    assert rows == [[1 if i == j else 0 for j in range(size)] for i in range(size)]


def test_tangent_double_dual_shape():
    te = DecomposedDVB(2, 2, 3, 3, ("TM", "E", "E"))
    dual = dualize_decomposed(te, "B")
    assert set(dual.names[:2]) == {"E", "E*"}
    assert dual.names[2] == "TM*"


def test_dual_splitting_pairing():
    rng = random.Random(1)
    a, b, gamma, c = fr(rng, 2), fr(rng, 3), fr(rng, 1), fr(rng, 1)
    sigma_star = dual_splitting_over_a(a, gamma, 3)
    zero_c = [0]
    assert pair_over_a(sigma_star, (a, b, zero_c)) == 0
    assert pair_over_a(sigma_star, (a, [0, 0, 0], c)) == gamma[0] * c[0]


def test_canonical_pair_zero():
    z1 = [Fraction(0)]
    assert canonical_pair((z1, z1, z1), (z1, z1, z1), (z1, z1, z1)) == 0


def test_canonical_pair_independent_of_d():
    rng = random.Random(2)
    for _ in range(20):
        a, b, gamma = fr(rng, 1), fr(rng, 1), fr(rng, 1)
        shift = (a, gamma, fr(rng, 1))
        core_map = (gamma, b, fr(rng, 1))
        c1, c2 = fr(rng, 1), fr(rng, 1)
        assert canonical_pair(shift, core_map, (a, b, c1)) == canonical_pair(shift, core_map, (a, b, c2))


def test_canonical_pair_core_element():
    rng = random.Random(3)
    beta = fr(rng, 2)
    b = fr(rng, 2)
    core_map = ([0], b, fr(rng, 1))
    d = ([0], b, fr(rng, 1))
    shift = ([0], [0], beta)
    expected = sum(x * y for x, y in zip(beta, b)) - (core_map[2][0] * d[0][0] + core_map[0][0] * d[2][0])
    assert canonical_pair(shift, core_map, d) == expected


def test_canonical_pair_projection_mismatch():
    with pytest.raises(ValueError):
        canonical_pair(([1], [1], [1]), ([2], [1], [1]), ([1], [1], [1]))


def test_canonical_pair_bilinear():
    rng = random.Random(4)
    for _ in range(10):
        gamma = fr(rng, 2)
        a1, a2, b = fr(rng, 1), fr(rng, 1), fr(rng, 2)
        phi1, phi2 = (a1, gamma, fr(rng, 2)), (a2, gamma, fr(rng, 2))
        core_map = (gamma, b, fr(rng, 1))
        c = fr(rng, 2)
        total = ([x + y for x, y in zip(a1, a2)], gamma, [x + y for x, y in zip(phi1[2], phi2[2])])
        lhs = canonical_pair(total, core_map, (total[0], b, c))
        rhs = canonical_pair(phi1, core_map, (a1, b, c)) + canonical_pair(phi2, core_map, (a2, b, c))
        assert lhs == rhs


def test_interchange_law():
    rng = random.Random(5)
    for _ in range(20):
        a, a2, b, b2 = fr(rng, 2), fr(rng, 2), fr(rng, 1), fr(rng, 1)
        d1, d2 = (a, b, fr(rng, 2)), (a, b2, fr(rng, 2))
        d3, d4 = (a2, b, fr(rng, 2)), (a2, b2, fr(rng, 2))
        lhs = add_over_b(add_over_a(d1, d2), add_over_a(d3, d4))
        rhs = add_over_a(add_over_b(d1, d3), add_over_b(d2, d4))
        assert lhs == rhs


def _random_change(rng, host, n):
    return SplittingChange([random_matrix(rng, host.rank_a, host.rank_b, n, 1) for _ in range(host.rank_c)])


def test_change_of_splitting_group_action():
    rng = random.Random(6)
    host = DecomposedDVB(1, 2, 2, 1)
    s = lift(host, "B", [random_poly(rng, 1, 1) for _ in range(2)])
    zero = SplittingChange([PolyMatrix.zero(2, 2, 1)])
    assert apply_change_of_splitting(s, zero) == s
    shift = _random_change(rng, host, 1)
    assert apply_change_of_splitting(apply_change_of_splitting(s, shift), shift.negate()) == s


def test_change_of_splitting_cross_side_consistency():
    rng = random.Random(7)
    n = 1
    host = DecomposedDVB(n, 2, 2, 2)
    shift = _random_change(rng, host, n)
    back = shift.negate()
    plan = SamplePlan(42, 25, n)
    for _ in range(3):
        a = [random_poly(rng, n, 1) for _ in range(2)]
        b = [random_poly(rng, n, 1) for _ in range(2)]
        # lifts of the new splitting, written in the old one
        sa = apply_change_of_splitting(lift(host, "B", a), back)
        sb = apply_change_of_splitting(lift(host, "A", b), back)
        for pt in plan.points:
            at = lambda v: [Poly.const(n, p.evaluate(pt)) for p in v]
            p1 = sa.evaluate(b)
            p2 = sb.evaluate(a)
            assert [at(x) for x in p1] == [at(x) for x in p2]
        # and the point is the image of (a, b, 0) under the point change law
        new_coords = change_point(sa.evaluate(b), shift)
        assert new_coords[2] == [Poly.zero(n)] * 2


def test_single_chart_atlas():
    atlas = DVBAtlas(1, (1, 1, 1), [[(0, 1)]], {})
    assert check_atlas(atlas).ok


def test_identity_atlas():
    t = identity_transition(1, 2, 1, 1)
    atlas = DVBAtlas(1, (1, 2, 1), [[(0, 2)], [(1, 3)]], {(0, 1): t, (1, 0): t})
    assert check_atlas(atlas).ok


def test_refinement_atlas_and_perturbation():
    rng = random.Random(8)
    atlas = random_dvb_atlas(rng, 1, (2, 1, 2))
    assert check_atlas(atlas).ok
    t = atlas.transitions[(0, 2)]
    bumped = list(t.core_terms)
    bumped[0] = bumped[0].replace(0, 0, bumped[0][0, 0] + 1)
    atlas.transitions[(0, 2)] = Transition(t.a1, t.a2, t.a0, bumped)
    rep = check_atlas(atlas)
    assert not rep.ok
    assert "cocycle[0,1,2].core_terms" in rep.failed_names()


def test_missing_transition():
    atlas = DVBAtlas(1, (1, 1, 1), [[(0, 1)], [(0, 1)]], {}, overlaps=[(0, 1)])
    with pytest.raises(ValueError, match="missing transition"):
        check_atlas(atlas)


def test_transition_inverse_and_points():
    rng = random.Random(9)
    from dvbkit.randomgen import random_gauge_transition
    t = random_gauge_transition(rng, 1, (2, 1, 2))
    ident = compose_transitions(invert_transition(t), t)
    assert ident == identity_transition(2, 1, 2, 1)
    v1 = [random_poly(rng, 1, 1) for _ in range(2)]
    v2 = [random_poly(rng, 1, 1)]
    v0 = [random_poly(rng, 1, 1) for _ in range(2)]
    w = t.apply(v1, v2, v0)
    assert invert_transition(t).apply(*w) == (v1, v2, v0)
    assert tensor_eval(t.core_terms, v1, v2) == [x - y for x, y in zip(w[2], t.a0.apply(v0))]
