"""Data words, convolution, intervals, and scope splitting."""

import pytest
from hypothesis import given, settings, strategies as st

from datawords.atoms import EQUALITY, NIL
from datawords.words import (
    DataWord, EMPTY_INTERVAL, EPSILON, Interval, MultiTrackWord,
    check_alphabet, convolve, parse_data_word, print_data_word, project, subs,
)


class TestDataWord:
    def test_parse_print_round_trip(self):
        text = "a:10 b:42 a:5 a:97 b:42"
        w = parse_data_word(text, EQUALITY)
        assert len(w) == 5
        assert w.labels == ("a", "b", "a", "a", "b")
        assert w.data == (10, 42, 5, 97, 42)
        assert print_data_word(w) == text

    def test_empty_word(self):
        assert parse_data_word("", EQUALITY) == EPSILON
        assert print_data_word(EPSILON) == ""

    def test_no_nil_data(self):
        with pytest.raises(ValueError):
            DataWord(("a",), (NIL,))

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            DataWord(("a", "b"), (1,))

    def test_alphabet_check(self):
        w = parse_data_word("a:1 c:2", EQUALITY)
        with pytest.raises(ValueError):
            check_alphabet(w, ("a", "b"))

    def test_slice_and_reverse(self):
        w = parse_data_word("a:1 b:2 a:3", EQUALITY)
        assert w.slice(2, 3) == parse_data_word("b:2 a:3", EQUALITY)
        assert w.reverse() == parse_data_word("a:3 b:2 a:1", EQUALITY)
        assert w.letter(2) == ("b", 2)


class TestConvolve:
    def test_example_word(self):
        w = convolve(["abaab", [10, 42, 5, 97, 42]])
        assert project(w, 1) == tuple("abaab")
        assert project(w, 2) == (10, 42, 5, 97, 42)
        assert w.column(2) == ("b", 42)
        dw = DataWord(project(w, 1), project(w, 2))
        assert print_data_word(dw) == "a:10 b:42 a:5 a:97 b:42"

    def test_unequal_lengths_rejected(self):
        with pytest.raises(ValueError):
            convolve(["ab", [1]])


class TestInterval:
    def test_basic(self):
        iv = Interval(3, 7)
        assert len(iv) == 5
        assert 3 in iv and 7 in iv and 8 not in iv
        assert iv.positions() == [3, 4, 5, 6, 7]

    def test_empty_is_distinguished(self):
        assert EMPTY_INTERVAL.is_empty()
        assert len(EMPTY_INTERVAL) == 0
        assert 1 not in EMPTY_INTERVAL
        assert EMPTY_INTERVAL == EMPTY_INTERVAL
        assert EMPTY_INTERVAL != Interval(1, 1)
        assert Interval.full(0) is EMPTY_INTERVAL
        assert Interval.full(3) == Interval(1, 3)

    def test_bad_bounds(self):
        with pytest.raises(ValueError):
            Interval(0, 2)
        with pytest.raises(ValueError):
            Interval(4, 2)

    def test_intersects(self):
        assert Interval(1, 3).intersects(Interval(3, 5))
        assert not Interval(1, 2).intersects(Interval(3, 5))
        assert not EMPTY_INTERVAL.intersects(Interval(1, 1))


class TestSubs:
    def test_golden(self):
        got = subs(Interval(10, 20), {5, 7, 11, 13, 17, 23})
        assert got == [Interval(10, 10), Interval(11, 12),
                       Interval(13, 16), Interval(17, 20)]

    def test_no_cuts_inside(self):
        assert subs(Interval(2, 5), {10}) == [Interval(2, 5)]

    def test_cut_at_lo(self):
        assert subs(Interval(3, 5), {3}) == [Interval(3, 5)]

    def test_empty_interval(self):
        assert subs(EMPTY_INTERVAL, {1, 2}) == []

    @given(st.integers(1, 10), st.integers(0, 10),
           st.sets(st.integers(0, 12), max_size=8))
    @settings(max_examples=200, deadline=None)
    def test_partition_property(self, lo, extra, cuts):
        hi = lo + extra
        parts = subs(Interval(lo, hi), cuts)
        # the parts tile [lo, hi] left to right
        covered = []
        for p in parts:
            covered.extend(p.positions())
        assert covered == list(range(lo, hi + 1))
        # every part except possibly the first starts at a cut point
        for p in parts[1:]:
            assert p.lo in cuts
