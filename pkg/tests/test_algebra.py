from __future__ import annotations

import itertools
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import formulas, pl_formulas, rationals, valuations
from mvpavelka.algebra import (
    FIXPOINT_EQUATION, HALF, MV_EQUATIONS, PMV_EQUATION, CongruenceBoundError,
    FiniteAlgebra, FiniteChain, MissingVariableError, RationalSampler,
    check_compatible_expansion, check_identity, dmv_equations,
    enumerate_congruences, eval_chain, evaluate, evaluate_grid, format_algebra,
    imp, mv_chain_algebra, negation, odot, oplus, parse_algebra,
)
from mvpavelka.syntax import BASE, ProfileError, parse, variables

F = Fraction


# --- brute-force oracle: every set partition, checked against the tables ---

def set_partitions(n):
    def rec(i, blocks):
        if i == n:
            yield blocks
            return
        for b in range(len(blocks)):
            yield from rec(i + 1, blocks[:b] + [blocks[b] + [i]] + blocks[b + 1:])
        yield from rec(i + 1, blocks + [[i]])
    yield from rec(0, [])


def respects(a: FiniteAlgebra, blocks, names):
    label = {x: min(b) for b in blocks for x in b}
    for name in names:
        arity, table = a.ops[name]
        if arity == 1:
            for x, y in itertools.product(range(a.size), repeat=2):
                if label[x] == label[y] and label[table[x]] != label[table[y]]:
                    return False
        elif arity == 2:
            for x1, y1, x2, y2 in itertools.product(range(a.size), repeat=4):
                if (label[x1] == label[y1] and label[x2] == label[y2]
                        and label[table[x1][x2]] != label[table[y1][y2]]):
                    return False
    return True


def oracle_congruences(a, names):
    out = set()
    for blocks in set_partitions(a.size):
        if respects(a, blocks, names):
            label = {x: min(b) for b in blocks for x in b}
            out.add(tuple(label[x] for x in range(a.size)))
    return out


class TestStandardOperations:
    def test_examples(self):
        assert evaluate(parse("p & q"), {"p": F(7, 10), "q": F(6, 10)}) == F(3, 10)
        assert evaluate(parse("d3(p)"), {"p": HALF}) == F(1, 6)
        assert evaluate(parse("[1/2] * [1/3]"), {}) == F(1, 6)
        assert evaluate(parse("K"), {}) == HALF

    @given(rationals)
    def test_identity_is_one(self, x):
        assert evaluate(parse("p -> p"), {"p": x}) == 1

    @given(rationals, rationals)
    def test_residuation(self, x, y):
        # x & z <= y  iff  z <= x -> y, tested at z = x -> y and just above it
        z = imp(x, y)
        assert odot(x, z) <= y
        assert oplus(negation(x), y) == z

    def test_missing_variable(self):
        with pytest.raises(MissingVariableError):
            evaluate(parse("p & q"), {"p": F(1)})

    def test_profile_checked_when_given(self):
        with pytest.raises(ProfileError):
            evaluate(parse("p * q"), {"p": F(1), "q": F(1)}, BASE)

    @given(formulas, valuations)
    def test_values_stay_in_unit_interval(self, f, v):
        assert 0 <= evaluate(f, v) <= 1


class TestChains:
    def test_examples(self):
        assert eval_chain(parse("p & q"), {"p": F(3, 4), "q": F(2, 4)}, FiniteChain(4)) == F(1, 4)
        assert eval_chain(parse("p -> q"), {"p": F(1), "q": F(0)}, FiniteChain(1)) == 0
        assert eval_chain(parse("!p"), {"p": HALF}, FiniteChain(2)) == HALF

    def test_off_chain_value(self):
        with pytest.raises(ValueError):
            eval_chain(parse("p"), {"p": F(1, 3)}, FiniteChain(2))

    def test_expansions_rejected(self):
        with pytest.raises(ProfileError):
            eval_chain(parse("d2(p)"), {"p": F(1)}, FiniteChain(2))

    def test_element_count(self):
        assert len(FiniteChain.with_elements(5)) == 5
        assert FiniteChain.with_elements(5).elements[1] == F(1, 4)


class TestIdentities:
    def test_examples(self):
        assert check_identity(parse("x & (x -> y)"), parse("x /\\ y"), FiniteChain.with_elements(4)).passed
        assert check_identity(parse("(x -> 0) -> 0"), parse("x"), FiniteChain.with_elements(6)).passed
        rep = check_identity(parse("x -> y"), parse("y -> x"), FiniteChain.with_elements(3))
        assert ({"x": F(1), "y": F(0)}, F(0), F(1)) in rep.counterexamples
        assert rep.lines()[0].startswith("FAIL")

    @pytest.mark.parametrize("key", sorted(MV_EQUATIONS))
    def test_mv_equations_on_chains(self, key):
        for lhs, rhs in MV_EQUATIONS[key]:
            for m in range(2, 7):
                assert check_identity(lhs, rhs, FiniteChain.with_elements(m)).passed

    def test_expansion_equations(self):
        assert check_identity(*PMV_EQUATION, RationalSampler(500, 1)).passed
        for n in (1, 2, 5, 12):
            for lhs, rhs in dmv_equations(n):
                assert check_identity(lhs, rhs, RationalSampler(200, n)).passed
        assert check_identity(*FIXPOINT_EQUATION, RationalSampler(1)).passed

    def test_sampler_is_seeded(self):
        a = list(RationalSampler(20, 7).valuations(["x"]))
        assert a == list(RationalSampler(20, 7).valuations(["x"]))
        assert a != list(RationalSampler(20, 8).valuations(["x"]))
        assert all(x["x"].denominator <= 1000 for x in a)


class TestGridEvaluation:
    @given(formulas, st.integers(1, 12), st.randoms(use_true_random=False))
    def test_matches_exact_evaluation(self, f, den, rnd):
        names = sorted(variables(f))
        axes = {n: np.array([rnd.randint(0, den) for _ in range(5)], dtype=np.int64) for n in names}
        num, d = evaluate_grid(f, axes, den)
        num = np.broadcast_to(np.asarray(num), (5,))
        for i in range(5):
            v = {n: F(int(axes[n][i]), den) for n in names}
            assert F(int(num[i]), int(d)) == evaluate(f, v)


class TestCongruences:
    def test_one_element_algebra(self):
        assert len(enumerate_congruences(FiniteAlgebra.chain(1))) == 1

    @pytest.mark.parametrize("m", range(2, 9))
    def test_chains_are_simple(self, m):
        cons = enumerate_congruences(FiniteAlgebra.chain(m))
        assert set(cons.partitions) == {cons.identity, cons.total}

    def test_l2_times_l3(self):
        a = FiniteAlgebra.chain(2).product(FiniteAlgebra.chain(3))
        cons = enumerate_congruences(a)
        assert len(cons) == 4
        assert set(cons.partitions) == oracle_congruences(a, ["->", "0"])

    @pytest.mark.parametrize("factors", [(2, 2), (2, 4), (3, 3), (2, 2, 2)])
    def test_products_against_oracle(self, factors):
        a = FiniteAlgebra.chain(factors[0])
        for m in factors[1:]:
            a = a.product(FiniteAlgebra.chain(m))
        assert set(enumerate_congruences(a).partitions) == oracle_congruences(a, ["->", "0"])

    def test_random_unary_expansions_against_oracle(self):
        rng = random.Random(3)
        base = FiniteAlgebra.chain(2).product(FiniteAlgebra.chain(3))
        for _ in range(10):
            a = base.expand("f", 1, [rng.randrange(6) for _ in range(6)])
            got = set(enumerate_congruences(a).partitions)
            assert got == oracle_congruences(a, ["->", "0", "f"])

    def test_derived_operations_do_not_change_congruences(self):
        a = mv_chain_algebra(2).product(mv_chain_algebra(3))
        assert check_compatible_expansion(a)

    def test_size_bound(self):
        with pytest.raises(CongruenceBoundError):
            enumerate_congruences(FiniteAlgebra.chain(5), max_size=4)


class TestCompatibleExpansion:
    def test_fixpoint_constant(self):
        with_k = {"K": (0, lambda: HALF)}
        k3 = mv_chain_algebra(3, with_k)
        assert check_compatible_expansion(k3.product(k3))
        assert check_compatible_expansion(mv_chain_algebra(3, with_k).product(mv_chain_algebra(5, with_k)))

    def test_constant_on_l2_times_l3(self):
        # L2 has no negation fixpoint; a constant that is one on the L3 side
        a = FiniteAlgebra.chain(2).product(FiniteAlgebra.chain(3))
        labels = [(x, y) for x in range(2) for y in range(3)]
        assert check_compatible_expansion(a.expand("c", 0, labels.index((0, 1))))

    def test_simple_algebras_accept_every_expansion(self):
        rng = random.Random(0)
        l4 = FiniteAlgebra.chain(4)
        for _ in range(20):
            table = [rng.randrange(4) for _ in range(4)]
            assert check_compatible_expansion(l4.expand("f", 1, table))

    def test_incompatible_unary_operation(self):
        a = FiniteAlgebra.chain(2).product(FiniteAlgebra.chain(3))
        labels = [(x, y) for x in range(2) for y in range(3)]
        # swaps the L2 coordinate only when the L3 coordinate is 1
        table = [labels.index((1 - x, y) if y == 2 else (x, y)) for x, y in labels]
        assert not check_compatible_expansion(a.expand("f", 1, table))


class TestAlgebraFiles:
    def test_round_trip(self):
        a = mv_chain_algebra(3)
        b = parse_algebra(format_algebra(a))
        assert b.ops == a.ops and b.size == a.size

    @pytest.mark.parametrize("text", [
        "op -> 2\n0 1\n1 1",
        "carrier: 2\nop -> 2\n0 1",
        "carrier: 2\nop -> 2\n0 5\n1 1",
        "carrier: 2\nop 0 0\n0 1",
    ])
    def test_malformed(self, text):
        with pytest.raises(ValueError):
            parse_algebra(text)

    def test_zero_equals_one_rejected(self):
        with pytest.raises(ValueError):
            FiniteAlgebra(2, {"->": (2, [[1, 1], [1, 1]]), "0": (0, 1)})
