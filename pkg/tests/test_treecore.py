"""Tree codes, balls, the ultrametric, and grafting.

Checks here are exact and enumeration-backed:
  - codes decode iff they are child-count sequences of a planted tree;
  - enumeration at size n produces the (n-1)-st Catalan number of trees;
  - truncation at depth r commutes and caps height at r;
  - the coupling distance is a separated ultrametric with values 1/r;
  - extract/graft is a bijection between trees and (ball, branch) pairs.
"""

from fractions import Fraction

import pytest

from arborlab.errors import (
    ArityMismatchError,
    CapExceededError,
    EmptyCodeError,
    MalformedCodeError,
)
from arborlab.treecore import (
    ball,
    ball_spec,
    branch_iter,
    decode,
    dist,
    enumerate_trees,
    extract_branches,
    graft,
)

CATALAN = [1, 1, 2, 5, 14, 42, 132, 429, 1430, 4862]


class TestDecode:
    @pytest.mark.parametrize("code,size,height", [
        ([0], 1, 1),
        ([1, 0], 2, 2),
        ([2, 0, 0], 3, 2),
        ([1, 1, 0], 3, 3),
        ([2, 1, 0, 0], 4, 3),
        ([3, 0, 1, 0, 0], 5, 3),
        ([1, 2, 0, 1, 0], 5, 4),
    ])
    def test_valid(self, code, size, height):
        t = decode(code)
        assert t.size == size
        assert t.height == height
        assert t.code == tuple(code)

    def test_empty(self):
        with pytest.raises(EmptyCodeError):
            decode([])

    @pytest.mark.parametrize("code", [
        [1],            # a slot is still open at the end
        [2, 0],
        [0, 0],         # walk dies before the code ends
        [1, 0, 0],
        [0, 1, 0],
    ])
    def test_malformed(self, code):
        with pytest.raises(MalformedCodeError):
            decode(code)

    def test_negative_entry(self):
        with pytest.raises(MalformedCodeError):
            decode([2, -1, 0, 0])


class TestEnumeration:
    @pytest.mark.parametrize("n", range(1, 10))
    def test_counts_are_catalan(self, n):
        assert len(enumerate_trees(n)) == CATALAN[n - 1]

    def test_trees_are_distinct_and_valid(self):
        seen = set()
        for t in enumerate_trees(7):
            assert t.size == 7
            assert decode(t.code).height == t.height
            seen.add(t.code)
        assert len(seen) == CATALAN[6]

    def test_cap(self):
        with pytest.raises(CapExceededError):
            enumerate_trees(13)
        assert len(enumerate_trees(13, cap=13)) == 208012

    def test_height_multiset_at_four(self):
        heights = sorted(t.height for t in enumerate_trees(4))
        assert heights == [2, 3, 3, 3, 4]


class TestBall:
    def test_truncation_examples(self):
        assert ball(decode([1, 1, 0]), 1).code == (0,)
        assert ball(decode([1, 1, 0]), 2).code == (1, 0)
        assert ball(decode([2, 1, 0, 0]), 2).code == (2, 0, 0)

    @pytest.mark.parametrize("n", [3, 5, 7])
    def test_height_clips_at_radius(self, n):
        for t in enumerate_trees(n):
            for r in range(1, t.height + 2):
                b = ball(t, r)
                assert b.height == min(r, t.height)
                assert b.size <= t.size

    def test_nested_truncation(self):
        for t in enumerate_trees(6):
            for r1 in (1, 2, 3):
                for r2 in (1, 2, 3):
                    lhs = ball(ball(t, r1), r2)
                    assert lhs.code == ball(t, min(r1, r2)).code

    def test_deep_ball_is_identity(self):
        t = decode([2, 1, 0, 0])
        assert ball(t, 9).code == t.code


class TestDist:
    def test_anchor_value(self):
        assert dist(decode([1, 1, 0]), decode([1, 1, 1, 0])) == Fraction(1, 3)

    def test_separation_and_symmetry(self):
        trees = enumerate_trees(5)
        for a in trees:
            for b in trees:
                d = dist(a, b)
                assert d == dist(b, a)
                assert (d == 0) == (a.code == b.code)

    def test_ultrametric_inequality(self):
        trees = enumerate_trees(5)
        for a in trees:
            for b in trees:
                dab = dist(a, b)
                for c in trees:
                    assert dab <= max(dist(a, c), dist(c, b))

    def test_values_are_reciprocal_depths(self):
        a, b = decode([2, 0, 0]), decode([2, 1, 0, 0])
        d = dist(a, b)
        assert d.numerator == 1
        r = d.denominator
        assert ball(a, r).code == ball(b, r).code
        assert ball(a, r + 1).code != ball(b, r + 1).code


class TestGraft:
    def test_single_slot_extends_downward(self):
        spec = ball_spec(decode([1, 0]), 2)
        assert spec.n_slots == 1
        grafted = graft(spec, [decode([1, 0])])
        assert grafted.code == (1, 1, 0)
        assert grafted.height == 3

    def test_two_slots(self):
        spec = ball_spec(decode([2, 0, 0]), 2)
        grafted = graft(spec, [decode([1, 0]), decode([0])])
        assert grafted.size == 3 - 2 + 2 + 1
        assert grafted.height == 2 - 1 + 2

    def test_size_and_height_formulas(self):
        for t in enumerate_trees(7):
            for r in range(1, t.height + 1):
                spec, branches = extract_branches(t, r)
                assert t.size == spec.base.size - spec.n_slots + sum(
                    b.size for b in branches)
                if spec.base.height == r:
                    assert t.height == r - 1 + max(b.height for b in branches)

    @pytest.mark.parametrize("n", [4, 6, 7])
    def test_roundtrip(self, n):
        for t in enumerate_trees(n):
            for r in range(1, t.height + 1):
                spec, branches = extract_branches(t, r)
                back = graft(spec, branches)
                assert back.code == t.code
                assert ball(back, r).code == spec.base.code

    def test_arity_mismatch(self):
        spec = ball_spec(decode([2, 0, 0]), 2)
        with pytest.raises(ArityMismatchError):
            graft(spec, [decode([0])])

    def test_branch_iter_covers_children(self):
        t = decode([3, 1, 0, 0, 0])
        subs = [b.code for b in branch_iter(t)]
        assert subs == [(1, 0), (0,), (0,)]
