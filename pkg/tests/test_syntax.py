from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import formulas, valuations
from mvpavelka.algebra import evaluate
from mvpavelka.syntax import (
    BASE, FULL, Bullet, Const, Div, FixK, FormulaSyntaxError, Impl, LogicProfile,
    Neg, Odot, One, Oplus, ProfileError, Theory, Var, Zero, expand_multiple,
    format_theory, parse, parse_theory, required_profile, substitute, to_core,
    to_text, variables,
)

p, q, r = Var("p"), Var("q"), Var("r")


class TestParse:
    def test_implication_nests_to_the_right(self):
        assert parse("p -> (q -> p)") == Impl(p, Impl(q, p))
        assert parse("p -> q -> p") == Impl(p, Impl(q, p))

    def test_truth_constant(self):
        assert parse("[1/2]", LogicProfile(constants_enabled=True)) == Const(Fraction(1, 2))

    def test_division_needs_profile(self):
        with pytest.raises(ProfileError):
            parse("d3(p)", BASE)
        assert parse("d3(p)", LogicProfile(division_enabled=True)) == Div(3, p)

    @pytest.mark.parametrize("text, flag", [
        ("p * q", "product"), ("K", "fixpoint"), ("[1/3]", "constants"),
    ])
    def test_profile_gates(self, text, flag):
        with pytest.raises(ProfileError):
            parse(text, BASE)
        parse(text, LogicProfile.parse(f"base,{flag}"))

    def test_precedence(self):
        assert parse("p & q -> r") == Impl(Odot(p, q), r)
        assert parse("!p + q") == Oplus(Neg(p), q)
        assert parse("p + q & r") == Oplus(p, Odot(q, r))

    def test_unicode_aliases(self):
        assert parse("p → ¬q ⊙ r") == parse("p -> !q & r")

    @pytest.mark.parametrize("bad", ["", "p &", "(p", "[3/2]", "[1/0]", "d0(p)", "p q", "->"])
    def test_malformed(self, bad):
        with pytest.raises(FormulaSyntaxError):
            parse(bad)

    def test_error_position(self):
        with pytest.raises(FormulaSyntaxError) as info:
            parse("p & )")
        assert info.value.position == 4

    def test_zero_and_one(self):
        assert parse("0 -> 1") == Impl(Zero(), One())


class TestPrint:
    def test_examples(self):
        assert to_text(Impl(p, Zero())) == "p -> 0"
        assert to_text(Const(Fraction(2, 3))) == "[2/3]"
        assert to_text(Bullet(p, q)) == "p * q"

    @given(formulas)
    def test_round_trip(self, f):
        assert parse(to_text(f)) == f


class TestCore:
    def test_examples(self):
        assert to_core(Neg(p)) == Impl(p, Zero())
        assert to_core(One()) == Impl(Zero(), Zero())

    @given(formulas)
    def test_core_uses_core_connectives_only(self, f):
        from mvpavelka.syntax import CORE_KINDS, subformulas
        assert all(isinstance(g, CORE_KINDS) for g in subformulas(to_core(f)))

    @given(formulas, valuations)
    def test_core_preserves_value(self, f, v):
        assert evaluate(to_core(f), v) == evaluate(f, v)

    def test_expand_multiple(self):
        assert expand_multiple(1, p) == p
        assert expand_multiple(2, p) == Impl(Neg(p), p)
        assert expand_multiple(3, p) == Impl(Neg(p), Impl(Neg(p), p))

    @given(st.integers(1, 12), valuations)
    def test_multiple_is_truncated_sum(self, n, v):
        assert evaluate(expand_multiple(n, p), v) == min(Fraction(1), n * v["p"])


class TestSubstitution:
    def test_examples(self):
        half = Const(Fraction(1, 2))
        assert substitute(Impl(p, q), {"p": half}) == Impl(half, q)
        assert substitute(Impl(p, p), {"p": Odot(q, q)}) == Impl(Odot(q, q), Odot(q, q))
        assert substitute(p, {}) == p

    def test_simultaneous(self):
        assert substitute(Impl(p, q), {"p": q, "q": p}) == Impl(q, p)

    @given(formulas, valuations)
    def test_semantic_substitution_lemma(self, f, v):
        g = substitute(f, {"p": Odot(q, r)})
        w = dict(v, p=evaluate(Odot(q, r), v))
        assert evaluate(g, v) == evaluate(f, w)


def test_variables():
    assert variables(parse("p -> (q -> p)")) == {"p", "q"}
    assert variables(parse("[1/2]")) == set()
    assert variables(parse("d3(p * p)")) == {"p"}


class TestProfiles:
    def test_parse_and_print(self):
        prof = LogicProfile.parse("base,product,constants")
        assert prof.product_enabled and prof.constants_enabled and not prof.division_enabled
        assert str(prof) == "base,product,constants"
        assert LogicProfile.parse("all") == FULL

    def test_unknown_component(self):
        with pytest.raises(ValueError):
            LogicProfile.parse("base,modal")

    def test_required_profile(self):
        assert required_profile(parse("d2(K) * [1/3]")) == FULL


class TestTheory:
    def test_parse_and_format(self):
        text = "profile: base,constants\n# comment\np\n[1/2] -> q\n"
        th = parse_theory(text)
        assert th.generators == (p, Impl(Const(Fraction(1, 2)), q))
        assert parse_theory(format_theory(th)) == th

    def test_generator_outside_profile(self):
        with pytest.raises(ProfileError):
            Theory((Bullet(p, q),), BASE)

    def test_subset(self):
        th = Theory((p, q, r), BASE)
        assert th.subset([0, 2]).generators == (p, r)
