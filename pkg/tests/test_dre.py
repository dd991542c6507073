"""Expression semantics pinned against hand-derived languages, and the
compiler checked against the memoized denotational oracle."""

import random
from fractions import Fraction

import pytest

from datawords.atoms import DENSE_ORDER, EQUALITY, TOP, parse_qf
from datawords.dre import (
    Concat, Iter, Lit, Union, Zero, compile_dre_eps, dre_depth, dre_labels,
    dre_maxk, dre_oracle, dre_to_nra, lit_of_word, nra_to_dre,
    oracle_membership, parse_dre, print_dre,
)
from datawords.nra import default_pool, membership
from datawords.words import DataWord

from helpers import enum_words, random_dre


def sweep(expr, aut, words, dom, alphabet=("a", "b")):
    oracle = dre_oracle(expr, dom, sorted(alphabet))
    for w in words:
        got = membership(aut, w, default_pool(aut, w))
        want = oracle(w)
        assert got == want, (print_dre(expr), w, got, want)


class TestParsePrint:
    ROUND_TRIPS = [
        "0",
        "[a:1]",
        "[]",
        "[a:1 b:2]*{1}",
        "([a:1] + 0) .{2} [b:1 b:1]",
        "any(a b, x1 = x2)",
        "(([a:1] + [b:2])*{1})*{0}",
        "[a:1] .{0} ([b:2] + any(a, ~nil(x1)))",
    ]

    @pytest.mark.parametrize("text", ROUND_TRIPS)
    def test_round_trip(self, text):
        expr = parse_dre(text, EQUALITY)
        again = parse_dre(print_dre(expr), EQUALITY)
        assert expr == again

    def test_precedence(self):
        expr = parse_dre("[a:1] + [b:1] .{1} [a:2]", EQUALITY)
        assert isinstance(expr, Union)
        assert isinstance(expr.right, Concat)
        expr = parse_dre("[a:1] .{1} [b:1]*{0}", EQUALITY)
        assert isinstance(expr, Concat)
        assert isinstance(expr.right, Iter)

    def test_dense_values(self):
        expr = parse_dre("[a:1/2 a:3]", DENSE_ORDER)
        assert expr.source.data == (Fraction(1, 2), Fraction(3))
        assert parse_dre(print_dre(expr), DENSE_ORDER) == expr

    @pytest.mark.parametrize("text", [
        "[a:1", "*{1}", "[a:1]*{}", "[a:1]*{x}", "[a:1] .{1}", "[a:1] extra",
        "any(a)", "()",
    ])
    def test_rejects(self, text):
        with pytest.raises(ValueError):
            parse_dre(text, EQUALITY)

    def test_literal_position_check(self):
        with pytest.raises(ValueError):
            Lit(("a",), parse_qf("x2 = x1"))

    def test_negative_interface(self):
        with pytest.raises(ValueError):
            Iter(-1, Zero())
        with pytest.raises(ValueError):
            Concat(-2, Zero(), Zero())

    def test_measures(self):
        expr = parse_dre("([a:1] + [b:2 b:2]*{2}) .{1} 0", EQUALITY)
        assert dre_labels(expr) == {"a", "b"}
        assert dre_maxk(expr) == 2
        assert dre_depth(expr) >= 2


class TestOracleGoldens:
    def test_zero_iter_is_even_palindromes(self):
        expr = Iter(1, Zero())
        for w in enum_words(["a", "b"], [1, 2], 3):
            want = (len(w) == 2 and w.labels[0] == w.labels[1]
                    and w.data[0] == w.data[1])
            assert oracle_membership(expr, w, EQUALITY) == want, w

    def test_zero_iter_width_zero_is_epsilon(self):
        expr = Iter(0, Zero())
        for w in enum_words(["a"], [1, 2], 2):
            assert oracle_membership(expr, w, EQUALITY) == (len(w) == 0), w

    def test_iter_width_zero_is_kleene_star(self):
        expr = parse_dre("[a:1]*{0}", EQUALITY)
        for w in enum_words(["a", "b"], [1, 2], 3):
            want = all(l == "a" for l in w.labels)
            assert oracle_membership(expr, w, EQUALITY) == want, w

    def test_single_letter_iter(self):
        expr = parse_dre("[a:1]*{1}", EQUALITY)
        assert oracle_membership(expr, DataWord((), ()), EQUALITY)
        assert oracle_membership(expr, DataWord(("a",), (7,)), EQUALITY)
        # interface width one swallows any even palindrome, labels included
        assert oracle_membership(expr, DataWord(("b", "b"), (4, 4)), EQUALITY)
        assert not oracle_membership(expr, DataWord(("b", "b"), (4, 5)),
                                     EQUALITY)

    def test_two_letter_iter_is_all_length_two(self):
        # the zero-fold term contributes every even palindrome, label b ones
        # included; from one fold up only the label matters
        expr = parse_dre("[a:1 a:2]*{1}", EQUALITY)
        for w in enum_words(["a", "b"], [1, 2, 3], 3):
            want = len(w) == 2 and (
                w.labels == ("a", "a")
                or (w.labels[0] == w.labels[1] and w.data[0] == w.data[1]))
            assert oracle_membership(expr, w, EQUALITY) == want, w

    def test_palindrome_tail_is_neutral(self):
        base = parse_dre("[a:1 a:2]", EQUALITY)
        padded = Concat(1, base, Iter(1, Zero()))
        for w in enum_words(["a"], [1, 2, 3], 3):
            assert (oracle_membership(padded, w, EQUALITY)
                    == oracle_membership(base, w, EQUALITY)), w

    def test_dense_literal_orders_data(self):
        expr = parse_dre("[a:1 a:2]", DENSE_ORDER)
        f = Fraction
        yes = DataWord(("a", "a"), (f(3), f(5)))
        no_eq = DataWord(("a", "a"), (f(3), f(3)))
        no_rev = DataWord(("a", "a"), (f(5), f(3)))
        assert oracle_membership(expr, yes, DENSE_ORDER)
        assert not oracle_membership(expr, no_eq, DENSE_ORDER)
        assert not oracle_membership(expr, no_rev, DENSE_ORDER)

    def test_zero_matches_nothing(self):
        for w in enum_words(["a"], [1], 2):
            assert not oracle_membership(Zero(), w, EQUALITY)


HAND_EQ = [
    ("0", ["a", "b"]),
    ("[]", ["a"]),
    ("[a:1]", ["a", "b"]),
    ("[a:1 b:1]", ["a", "b"]),
    ("[a:1 a:2]", ["a"]),
    ("[a:1] + [b:2 b:2]", ["a", "b"]),
    ("[a:1] .{0} [b:2]", ["a", "b"]),
    ("[a:1 a:2] .{1} [a:2 a:3]", ["a"]),
    ("0*{1}", ["a", "b"]),
    ("[a:1]*{0}", ["a"]),
    ("[a:1]*{1}", ["a", "b"]),
    ("[a:1 a:2]*{1}", ["a"]),
    ("([a:1] + [b:2])*{1}", ["a", "b"]),
    ("([a:1] + [a:1 a:1])*{2}", ["a"]),
    ("([a:1]*{1})*{0}", ["a"]),
    ("any(a, nil(x1))", ["a"]),
]


class TestCompiledAgainstOracle:
    @pytest.mark.parametrize("text,alphabet",
                             HAND_EQ, ids=[t for t, _ in HAND_EQ])
    def test_hand_equality(self, text, alphabet):
        expr = parse_dre(text, EQUALITY)
        raw, _ = compile_dre_eps(expr, alphabet, EQUALITY)
        flat = dre_to_nra(expr, alphabet, EQUALITY)
        oracle = dre_oracle(expr, EQUALITY, sorted(alphabet))
        for w in enum_words(alphabet, [1, 2], 3):
            want = oracle(w)
            assert membership(raw, w, default_pool(raw, w)) == want, (text, w)
            assert membership(flat, w, default_pool(flat, w)) == want, (text, w)

    @pytest.mark.parametrize("text", [
        "[a:1 a:2]", "[a:2 a:1]*{1}", "[a:1 a:2] .{1} [a:2 a:3]", "0*{1}",
        "([a:1] + [b:2])*{1}",
    ])
    def test_hand_dense(self, text):
        expr = parse_dre(text, DENSE_ORDER)
        flat = dre_to_nra(expr, ["a", "b"], DENSE_ORDER)
        words = enum_words(["a", "b"], [Fraction(1), Fraction(2)], 3)
        sweep(expr, flat, words, DENSE_ORDER)

    @pytest.mark.parametrize("dom", [EQUALITY, DENSE_ORDER],
                             ids=["equality", "dense-order"])
    def test_random_expressions(self, dom):
        rng = random.Random(11 if dom is EQUALITY else 12)
        values = [1, 2] if dom is EQUALITY else [Fraction(1), Fraction(2)]
        words = enum_words(["a", "b"], values, 3)
        for _ in range(10):
            expr = random_dre(rng, dom)
            flat = dre_to_nra(expr, ["a", "b"], dom)
            sweep(expr, flat, words, dom)


class TestExpressionFromAutomaton:
    @pytest.mark.parametrize("text", ["[a:1]", "[a:1 b:2]", "[a:1] + [b:2]"])
    def test_round_trip_through_automaton(self, text):
        expr = parse_dre(text, EQUALITY)
        aut = dre_to_nra(expr, ["a", "b"], EQUALITY)
        back = nra_to_dre(aut)
        fwd = dre_oracle(expr, EQUALITY, sorted(aut.alphabet))
        bwd = dre_oracle(back, EQUALITY, sorted(aut.alphabet))
        for w in enum_words(["a", "b"], [1, 2], 3):
            assert fwd(w) == bwd(w), (text, w)

    def test_rejects_epsilon_rules(self):
        expr = parse_dre("[a:1]*{1}", EQUALITY)
        raw, _ = compile_dre_eps(expr, ["a"], EQUALITY)
        with pytest.raises(ValueError):
            nra_to_dre(raw)
