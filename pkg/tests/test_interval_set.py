"""Tests pour la structure de donnees IntervalSet."""

import pytest

from equations_mots.data_structures import IntervalSet


class TestConstruction:
    def test_singleton(self):
        s = IntervalSet.singleton(4)
        assert s.intervals == ((4, 4),)
        assert len(s) == 1

    def test_from_values_merges_adjacent(self):
        s = IntervalSet.from_values([5, 3, 4, 9, 3])
        assert s.intervals == ((3, 5), (9, 9))

    def test_empty(self):
        s = IntervalSet()
        assert s.is_empty()
        assert len(s) == 0
        with pytest.raises(ValueError):
            _ = s.lo


class TestUnion:
    def test_adjacent_becomes_contiguous(self):
        s = IntervalSet.singleton(1).union(IntervalSet.singleton(2))
        assert s.is_contiguous()
        assert (s.lo, s.hi) == (1, 2)

    def test_gap_kept(self):
        s = IntervalSet.singleton(1).union(IntervalSet.singleton(3))
        assert not s.is_contiguous()
        assert list(s) == [1, 3]

    def test_canonical_equality(self):
        a = IntervalSet.from_values([1, 2]).union(IntervalSet.from_values([3, 4]))
        assert a == IntervalSet.from_values(range(1, 5))

    def test_union_with_self(self):
        s = IntervalSet.from_values([1, 2, 7])
        assert s.union(s) is s


class TestQueries:
    def test_contains(self):
        s = IntervalSet.from_values([1, 2, 3, 10, 11])
        assert 2 in s
        assert 10 in s
        assert 5 not in s
        assert 0 not in s
        assert 12 not in s
        assert "a" not in s

    def test_difference(self):
        s = IntervalSet.from_values([1, 2, 3, 4])
        assert s.difference(IntervalSet.from_values([2, 3])) == [1, 4]

    def test_str(self):
        assert str(IntervalSet.from_values([1, 2, 3, 7])) == "{1..3,7}"
