import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spreadkit.complex import complete, layer
from spreadkit.decomposition import (EXHAUSTED, OVERSIZE, maximal_dense_set,
                                     nontrivial_cover_check, parameter_plan, remainder_bound,
                                     spread_approximation, stability_bound,
                                     stability_bound_at, stability_deficit,
                                     stability_exponent, verify_decomposition)
from spreadkit.faces import InvalidArgument, SetFamily, complete_layer, face, subsets


def dense(members, s, r):
    c = sum(1 for f in members if f & s == s)
    return c > 0 and c * r ** s.bit_count() >= len(members)


def star_family():
    lay = complete_layer(12, 3)
    return lay, lay.with_members(f for f in lay if f & face(1))


class TestSpreadApproximation:
    def test_star_anchor(self):
        lay, F = star_family()
        assert len(F) == 55
        d = spread_approximation(F, lay, 2, 1)
        assert d.cover == (face(1),)
        assert d.pieces == (F,)
        assert not d.remainder and d.stop_reason == EXHAUSTED

    def test_empty_family(self):
        lay = complete_layer(5, 2)
        d = spread_approximation(lay.with_members([]), lay, 2, 1)
        assert d.cover == () and not d.remainder and d.stop_reason == EXHAUSTED

    def test_single_set_oversize(self):
        F = SetFamily.from_sets(3, [(1, 2, 3)])
        d = spread_approximation(F, F, 2, 1)
        assert d.stop_reason == OVERSIZE and d.last_set == face(1, 2, 3)
        assert d.remainder == F and d.cover == ()

    def test_adversarial_cover_not_intersecting(self):
        F = SetFamily.from_sets(4, [(1, 2), (3, 4)])
        d = spread_approximation(F, F, 1, 2)
        v = verify_decomposition(d, F, F, 1)
        assert v.ok
        check = v.get("cover_t_intersecting")
        assert not check.holds and not check.binding
        assert check.details["witness"] == [[], []]

    def test_errors(self):
        lay = complete_layer(5, 2)
        outside = SetFamily.from_sets(5, [(1, 2, 3)])
        with pytest.raises(InvalidArgument):
            spread_approximation(outside, lay, 2, 1)
        with pytest.raises(InvalidArgument):
            spread_approximation(lay, lay, Fraction(1, 2), 1)
        with pytest.raises(InvalidArgument):
            maximal_dense_set(lay, 2, mode="random")

    def test_greedy_needs_repair(self):
        # {1} and {2} fail the density test but {1,2} passes.
        F = SetFamily.from_sets(6, [(1, 2), (1, 3), (2, 4), (5, 6)])
        r = Fraction(5, 4)
        s = maximal_dense_set(F, r)
        assert dense(F.members, s, r)
        assert not any(dense(F.members, y, r) for f in F for y in subsets(f)
                       if y != s and y & s == s)


def brute_maximal(members, r):
    cands = {y for f in members for y in subsets(f) if dense(members, y, r)}
    return {s for s in cands if not any(y != s and y & s == s for y in cands)}


members_st = st.sets(st.integers(1, (1 << 7) - 1).map(lambda m: m << 1), min_size=1, max_size=14)
rate_st = st.sampled_from([Fraction(1), Fraction(6, 5), Fraction(3, 2), Fraction(2), Fraction(3)])


@settings(max_examples=150, deadline=None)
@given(members_st, rate_st, st.sampled_from(["greedy", "exhaustive"]))
def test_dense_set_is_inclusion_maximal(members, r, mode):
    fam = SetFamily.of(7, members)
    s = maximal_dense_set(fam, r, mode)
    assert s in brute_maximal(list(members), r)


@settings(max_examples=120, deadline=None)
@given(members_st, rate_st, st.integers(0, 4), st.integers(1, 2))
def test_decomposition_invariants(members, r, q, t):
    fam = SetFamily.of(7, members)
    d = spread_approximation(fam, fam, r, q)
    v = verify_decomposition(d, fam, fam, t)
    assert v.ok, v.violations
    sizes = [st_.family_size for st_ in d.trace]
    assert all(a > b for a, b in zip(sizes, sizes[1:]))


def test_verify_catches_broken_partition():
    lay, F = star_family()
    d = spread_approximation(F, lay, 2, 1)
    from dataclasses import replace
    broken = replace(d, pieces=(F.with_members(F.members[1:]),))
    v = verify_decomposition(broken, F, lay, 1)
    assert [c.name for c in v.violations] == ["partition"]


def test_remainder_bound_binding_only_with_spread_ambient():
    lay = layer(complete(8), 3)
    F = lay.with_members(f for f in lay if f & face(1, 2) or f & face(3, 4) == face(3, 4))
    d = spread_approximation(F, lay, Fraction(3, 2), 1)
    v = verify_decomposition(d, F, lay, 1, r0=Fraction(8, 3), star=21)
    chk = v.get("remainder_bound")
    assert chk.binding == chk.details["ambient_rq_spread"] is True
    # Not binding when the ambient family is not spread enough.
    v = verify_decomposition(d, F, lay, 1, r0=Fraction(8, 3) * 2, star=21)
    assert v.get("remainder_bound").binding is False


def test_remainder_bound_not_binding_below_t():
    lay = layer(complete(8), 3)
    F = lay.with_members(f for f in lay if f & face(1, 2) == face(1, 2))
    d = spread_approximation(F, lay, Fraction(3, 2), 0)
    v = verify_decomposition(d, F, lay, 1, r0=Fraction(8, 3), star=21)
    chk = v.get("remainder_bound")
    assert chk.details["ambient_rq_spread"] is True
    assert chk.binding is False


class TestParameterPlan:
    def test_large_example(self):
        p = parameter_plan(2 ** 32, 2, 1)
        assert p.r0 == 2 ** 31 and p.r == 2 ** 30 and p.q == 264
        assert p.hyp_n_vs_klogk and p.hyp_n_vs_tklog2
        assert p.cond_r_ge_2q and p.cond_r_gt_spreadgate and p.cond_q_ge_t
        assert p.exact_logs and p.hypotheses_met
        assert p.remainder_exponent == pytest.approx(2 ** 32 / 2 ** 19 / 62)

    def test_second_hypothesis_fails(self):
        p = parameter_plan(2 ** 26, 2, 1)
        assert p.hyp_n_vs_klogk and not p.hyp_n_vs_tklog2

    def test_small_n(self):
        p = parameter_plan(16, 8, 1)
        assert not p.hyp_n_vs_klogk and not p.hyp_n_vs_tklog2 and p.q == 0

    def test_q_formula_matches_floats_away_from_powers_of_two(self):
        for n, k in [(10 ** 9, 3), (3 * 10 ** 8, 5), (123456789, 7)]:
            p = parameter_plan(n, k, 1)
            assert p.q == math.floor(n / (2 ** 18 * k * math.log2(n / k)))

    def test_errors(self):
        with pytest.raises(InvalidArgument):
            parameter_plan(4, 4, 1)
        with pytest.raises(InvalidArgument):
            parameter_plan(10, 2, 3)


class TestBounds:
    def test_remainder_bound(self):
        assert remainder_bound(4, 8, 2, 1, 100) == 100
        assert remainder_bound(2, 2, 0, 1, 10) == 20
        assert remainder_bound(3, 5, 1, 1, 0) == 0
        with pytest.raises(InvalidArgument):
            remainder_bound(5, 4, 1, 1, 10)

    def test_stability_bound(self):
        assert stability_bound(100, 0, 1000, 10) == 100
        assert stability_bound(100, 10 ** 9, 2 ** 40, 2) == 60.0
        assert stability_bound_at(100, 1, 4) == 84
        assert stability_bound_at(100, 5, 10_000) == 60.0

    def test_stability_exponent(self):
        assert stability_exponent(2 ** 32, 2) == pytest.approx(2 ** 32 / 2 ** 20 / 62)

    def test_stability_deficit(self):
        lay = complete_layer(6, 3)
        F = lay.with_members([f for f in lay if f & face(1)] + [face(2, 3, 4)])
        assert stability_deficit(F, 1) == (1, face(1))


class TestNontrivialCover:
    def test_triangle_cover(self):
        lay = complete_layer(12, 3)
        cover = [face(1, 2), face(1, 3), face(2, 3)]
        res = nontrivial_cover_check(lay, cover, 1)
        brute = sum(1 for f in lay if any(f & c == c for c in cover))
        assert res.lhs == brute == 28
        assert res.rhs == Fraction(55, 2) and not res.holds and res.T == face(1)

    def test_preconditions(self):
        lay = complete_layer(6, 3)
        with pytest.raises(InvalidArgument):
            nontrivial_cover_check(lay, [face(1), face(2)], 1)
        with pytest.raises(InvalidArgument):
            nontrivial_cover_check(lay, [face(1, 2), face(1, 3)], 1)

    def test_t_equals_two(self):
        lay = complete_layer(8, 4)
        cover = [face(1, 2, 3), face(1, 2, 4), face(1, 3, 4), face(2, 3, 4)]
        res = nontrivial_cover_check(lay, cover, 2, Fraction(1))
        brute = sum(1 for f in lay if any(f & c == c for c in cover))
        assert res.lhs == brute and res.rhs == 15 and res.holds is (brute <= 15)
