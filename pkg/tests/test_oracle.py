from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import brute_max_t_intersecting, exhaustive_nontrivial
from spreadkit.complex import best_star_in, complete, from_facets, layer
from spreadkit.faces import (InvalidArgument, SetFamily, common_core, complete_layer, face,
                             is_t_intersecting)
from spreadkit.ingest import independence_complex, parse_graph
from spreadkit.oracle import (BudgetExceeded, borg_threshold, ekr_verdict,
                              max_nontrivial_t_intersecting, max_t_intersecting, twin_classes)


class TestMaxIntersecting:
    def test_examples(self):
        assert max_t_intersecting(complete_layer(6, 3), 1).size == 10
        assert max_t_intersecting(complete_layer(4, 2), 1).size == 3
        lay = complete_layer(5, 3)
        assert max_t_intersecting(lay, 2).size == brute_max_t_intersecting(lay.members, 2) == 4

    def test_witness_is_valid(self):
        for n, k, t in [(6, 3, 1), (7, 3, 2), (8, 4, 2), (5, 3, 2)]:
            lay = complete_layer(n, k)
            res = max_t_intersecting(lay, t)
            assert len(res.witness) == res.size
            assert is_t_intersecting(res.witness, t).holds
            assert all(f in lay for f in res.witness)

    def test_star_witness_when_star_optimal(self):
        res = max_t_intersecting(complete_layer(8, 3), 1)
        assert common_core(res.witness) == face(1)

    def test_empty_and_errors(self):
        assert max_t_intersecting(SetFamily.of(4, []), 1).size == 0
        with pytest.raises(InvalidArgument):
            max_t_intersecting(SetFamily.from_sets(4, [(1,), (1, 2)]), 1)
        with pytest.raises(InvalidArgument):
            max_t_intersecting(complete_layer(4, 2), 3)

    def test_budget(self):
        with pytest.raises(BudgetExceeded) as info:
            max_nontrivial_t_intersecting(complete_layer(9, 4), 1, budget=5)
        assert info.value.budget == 5

    @pytest.mark.parametrize("n,k,t", [(7, 3, 1), (8, 3, 2), (8, 4, 2), (9, 4, 3)])
    def test_plain_search_agrees(self, n, k, t):
        lay = complete_layer(n, k)
        full = max_t_intersecting(lay, t).size
        plain = max_t_intersecting(lay, t, symmetry=False, spectral=False).size
        assert full == plain


class TestNontrivial:
    def test_examples(self):
        res = max_nontrivial_t_intersecting(complete_layer(7, 3), 1)
        assert res.size == 13
        assert is_t_intersecting(res.witness, 1).holds
        assert common_core(res.witness) == 0
        assert max_nontrivial_t_intersecting(complete_layer(4, 2), 1).size == 3
        assert max_nontrivial_t_intersecting(complete_layer(5, 3), 1).size == 10

    def test_hilton_milner_value_recomputed_exhaustively(self):
        lay = complete_layer(7, 3)
        assert exhaustive_nontrivial(list(lay.members), 1) == 13
        assert comb(6, 2) - comb(3, 2) + 1 == 13

    @pytest.mark.parametrize("n,k,t", [(6, 3, 1), (7, 3, 2), (6, 2, 1), (8, 3, 2)])
    def test_matches_maximal_clique_enumeration(self, n, k, t):
        lay = complete_layer(n, k)
        assert (max_nontrivial_t_intersecting(lay, t).size
                == exhaustive_nontrivial(list(lay.members), t))

    def test_none_exists(self):
        # Three pairwise-disjoint sets: every intersecting family is one set.
        fam = SetFamily.from_sets(6, [(1, 2), (3, 4), (5, 6)])
        assert max_nontrivial_t_intersecting(fam, 1).size == 0


class TestVerdict:
    def test_examples(self):
        res = ekr_verdict(complete(6), 3, 1)
        assert res.star_optimal and res.max_size == 10 and res.borg_threshold_met
        res = ekr_verdict(complete(5), 3, 1)
        assert not res.star_optimal and res.max_size == 10 and res.best_star_size == 6
        assert not res.borg_threshold_met and not res.counterexample_candidate
        path = independence_complex(parse_graph("1 2\n2 3\n3 4\n"))
        res = ekr_verdict(path, 2, 1)
        assert res.layer_size == 3 and res.max_size == 2 == res.best_star_size
        assert res.star_optimal and res.trivial

    def test_preconditions(self):
        with pytest.raises(InvalidArgument):
            ekr_verdict(complete(5), 6, 1)
        with pytest.raises(InvalidArgument):
            ekr_verdict(complete(5), 2, 3)

    def test_threshold(self):
        assert borg_threshold(3, 1) == 6
        assert borg_threshold(3, 2) == 6
        assert borg_threshold(4, 2) == 9


def test_twin_classes():
    lay = complete_layer(5, 2)
    assert twin_classes(list(lay.members), sum(1 << e for e in range(1, 6))) == [0b111110]
    star = SetFamily.from_sets(4, [(1, 2), (1, 3), (1, 4)])
    assert twin_classes(list(star.members), 0b11110) == [face(1), face(2, 3, 4)]
    rigid = SetFamily.from_sets(4, [(1, 2), (3, 4), (1, 3)])
    assert twin_classes(list(rigid.members), 0b11110) == [face(1), face(2), face(3), face(4)]


facets_st = st.lists(st.sets(st.integers(1, 7), min_size=2, max_size=5), min_size=1, max_size=4)


@settings(max_examples=60, deadline=None)
@given(facets_st, st.integers(1, 3), st.integers(1, 3))
def test_matches_naive_enumeration(sets, k, t):
    c = from_facets(SetFamily.from_sets(7, sets))
    if t > k:
        return
    lay = layer(c, k)
    if len(lay) > 14:
        lay = lay.with_members(lay.members[:14])
    res = max_t_intersecting(lay, t)
    assert res.size == brute_max_t_intersecting(lay.members, t)
    assert res.size >= best_star_in(lay, t).size
    nontrivial = max_nontrivial_t_intersecting(lay, t)
    assert nontrivial.size == brute_max_t_intersecting(lay.members, t, forbid_core=True)
    assert nontrivial.size <= res.size <= len(lay)
