from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from conftest import formulas, pl_formulas, rationals, valuations
from mvpavelka.algebra import FiniteChain, evaluate
from mvpavelka.calculus import SearchBudget, check_proof
from mvpavelka.corpus import pl_corpus
from mvpavelka.degrees import (
    PreconditionError, ProductNodeError, RegionCapError, compactness_probe,
    compile_pl, lipschitz_bound, pavelka_gap, proof_degree_lower, truncation_count,
    truth_degree, truth_degree_exact, truth_degree_grid,
)
from mvpavelka.syntax import (
    BASE, Const, Impl, LogicProfile, Theory, Var, parse, to_core, variables,
)

F = Fraction
HALF = F(1, 2)
P = parse


def texts(system):
    return sorted((r.objective.text(system.variables),
                   tuple(sorted(a.text(system.variables) for a, _ in r.constraints)))
                  for r in system.regions)


class TestRegions:
    def test_lukasiewicz_conjunction(self):
        s = compile_pl(P("p & q"))
        assert texts(s) == [("0", ("-p - q + 1",)), ("p + q - 1", ("p + q - 1",))]

    def test_constant(self):
        s = compile_pl(P("[1/2]"))
        assert len(s) == 1 and s.regions[0].objective.const == HALF

    def test_square_root_example(self):
        s = compile_pl(P("p -> (p & p)"))
        assert sorted(r.objective.text(("p",)) for r in s.regions) == ["-p + 1", "p"]

    def test_equal_branches_keep_the_region(self):
        s = compile_pl(P("(p \\/ q) /\\ q"), ("p", "q"))
        for v in ({"p": F(0), "q": F(1)}, {"p": F(1), "q": F(0)}):
            assert s.value_at(v) == evaluate(P("(p \\/ q) /\\ q"), v)

    def test_product_rejected(self):
        with pytest.raises(ProductNodeError):
            compile_pl(P("p * q"))

    def test_region_cap(self):
        f = P("p & p & p & p & p & p")
        with pytest.raises(RegionCapError):
            compile_pl(f, region_cap=truncation_count(f) - 1)

    @given(pl_formulas, st.randoms(use_true_random=False))
    @settings(max_examples=60)
    def test_objectives_match_evaluation_inside_regions(self, f, rnd):
        s = compile_pl(f)
        for region in s.regions:
            for x in region.sample_points(len(s.variables), rnd, 10):
                assert region.contains(x)
                assert region.objective.at(x) == evaluate(f, dict(zip(s.variables, x)))

    @given(pl_formulas, valuations)
    @settings(max_examples=60)
    def test_regions_cover_the_cube(self, f, v):
        s = compile_pl(f)
        assert s.value_at(v) == evaluate(f, v)


class TestExactDegree:
    def test_examples(self):
        assert truth_degree_exact(P("p"), [P("p")]).lo == 1
        d = truth_degree_exact(P("p -> (p & p)"))
        assert d.exact and d.lo == d.hi == HALF and d.witness == {"p": HALF}
        assert truth_degree_exact(P("[3/4]")).lo == F(3, 4)
        assert truth_degree_exact(P("q"), [P("p -> q"), P("p")]).lo == 1

    def test_summary(self):
        assert truth_degree_exact(P("p -> (p & p)")).summary() == "exact lo 1/2 hi 1/2 witness p=1/2"

    def test_vacuous(self):
        d = truth_degree_exact(P("p"), [P("p & !p")])
        assert d.lo == 1 and d.vacuous and d.witness is None
        assert d.lines()[-1] == "vacuous: yes"

    def test_forced_equalities(self):
        # p + p = 1 forces p >= 1/2
        assert truth_degree_exact(P("p"), [P("p + p")]).lo == HALF
        assert truth_degree_exact(P("q"), [P("[2/5] -> p"), P("p -> q")]).lo == F(2, 5)

    @given(pl_formulas, st.lists(pl_formulas, max_size=2), valuations)
    @settings(max_examples=60)
    def test_witness_and_lower_bound(self, phi, theory, v):
        d = truth_degree_exact(phi, theory)
        if d.vacuous:
            assert theory and not all(evaluate(t, v) == 1 for t in theory)
            return
        assert all(evaluate(t, d.witness) == 1 for t in theory)
        assert evaluate(phi, d.witness) == d.lo
        if all(evaluate(t, v) == 1 for t in theory):
            assert d.lo <= evaluate(phi, v)

    @pytest.mark.parametrize("n", [2, 3, 4, 6])
    def test_below_every_chain_minimum(self, n):
        chain = FiniteChain(n)
        for inst in pl_corpus(17, count=15):
            d = truth_degree_exact(inst.phi, inst.theory)
            names = sorted(variables(inst.phi).union(*(variables(t) for t in inst.theory)))
            vals = [evaluate(inst.phi, v) for v in chain.valuations(names)
                    if all(evaluate(t, v) == 1 for t in inst.theory)]
            if vals:
                assert d.lo <= min(vals)

    def test_chain_minimum_on_the_chain(self):
        # these minimisers all lie on the three-element chain
        for text in ("p -> (p & p)", "(p + q) -> (p & q)", "p /\\ !p"):
            f = P(text)
            names = sorted(variables(f))
            brute = min(evaluate(f, v) for v in FiniteChain(2).valuations(names))
            assert truth_degree_exact(f).lo == brute


class TestLipschitz:
    def test_examples(self):
        assert lipschitz_bound(P("p & q")) == {"p": 1, "q": 1}
        assert lipschitz_bound(P("p + p")) == {"p": 2}
        assert lipschitz_bound(P("d4(p)")) == {"p": F(1, 4)}

    @given(formulas, valuations, valuations)
    def test_certificate(self, f, v, w):
        bound = sum(L * abs(v[x] - w[x]) for x, L in lipschitz_bound(f).items())
        assert abs(evaluate(f, v) - evaluate(f, w)) <= bound


class TestGridDegree:
    def test_product_square(self):
        d = truth_degree_grid(P("p * p"), [], eps=F(1, 100))
        assert -F(1, 100) <= d.lo <= 0 and d.hi == 0 and not d.exact

    def test_forced_variable(self):
        eps, delta = F(1, 100), F(1, 100)
        d = truth_degree_grid(P("p"), [P("p")], eps, delta)
        assert d.hi == 1 and d.lo >= 1 - delta - eps
        assert "relaxation" in d.note

    def test_relaxed_infeasibility_is_vacuous(self):
        d = truth_degree_grid(P("p"), [P("p & !p")])
        assert d.vacuous and d.lo == d.hi == 1

    @given(pl_formulas, st.lists(pl_formulas, max_size=2))
    @settings(max_examples=40)
    def test_brackets_the_exact_degree(self, phi, theory):
        if len(variables(phi).union(*(variables(t) for t in theory))) > 2:
            return
        ex = truth_degree_exact(phi, theory)
        grid = truth_degree_grid(phi, theory, eps=F(1, 10))
        assert grid.lo <= ex.lo <= grid.hi

    def test_dispatch(self):
        assert truth_degree(P("p * q")).method == "grid"
        assert truth_degree(P("p & q")).method == "exact"


CONSTS = LogicProfile(constants_enabled=True)


class TestProofDegree:
    def test_ground(self):
        d = proof_degree_lower(P("[1/2] + [1/3]"), [], SearchBudget(max_steps=100))
        assert d.lo == F(5, 6) and d.hi == 1 and check_proof(d.proof).accepted
        assert to_core(d.proof.conclusion) == to_core(Impl(Const(F(5, 6)), P("[1/2] + [1/3]")))

    def test_search(self):
        d = proof_degree_lower(P("q"), [P("p"), P("p -> q")])
        assert d.lo == 1 and d.proof.conclusion == P("[1] -> q")
        assert check_proof(d.proof).accepted

    def test_graded_hypothesis(self):
        d = proof_degree_lower(P("q"), [P("[1/2] -> p"), P("p -> q")], SearchBudget(max_steps=2000))
        assert d.lo == HALF and check_proof(d.proof).accepted

    def test_zero_is_always_available(self):
        d = proof_degree_lower(P("0"), [], SearchBudget(max_steps=50))
        assert d.lo == 0 and check_proof(d.proof).accepted
        d = proof_degree_lower(P("p -> (p & p)"), [], SearchBudget(max_steps=50))
        assert d.lo == 0 and d.proof.conclusion == P("[0] -> (p -> (p & p))")

    def test_needs_constants(self):
        from mvpavelka.syntax import ProfileError
        with pytest.raises(ProfileError):
            proof_degree_lower(P("p"), Theory((P("p"),), BASE))


class TestGap:
    def test_equality(self):
        g = pavelka_gap(P("p"), [P("p")])
        assert g.sound and g.equal and g.gap == 0
        assert g.lines()[:3] == ["proof_lower 1 (proof file emitted)", "truth 1", "gap 0"]

    def test_reported_gap(self):
        g = pavelka_gap(P("p -> (p & p)"), [], SearchBudget(max_steps=50))
        assert g.sound and not g.equal and g.gap == HALF

    def test_ground_equality(self):
        for text in ("[1/3] -> d2([1/2])", "!K & [4/5]", "([1/2] + [1/3]) -> 0"):
            g = pavelka_gap(P(text), [], SearchBudget(max_steps=30))
            assert g.equal


class TestCompactness:
    def test_examples(self):
        assert compactness_probe(P("p"), [P("p"), P("q")], 1).subset == (P("p"),)
        res = compactness_probe(P("q"), [P("p"), P("p -> q"), P("q -> p")], 1)
        assert res.subset == (P("p"), P("p -> q"))
        assert compactness_probe(P("[1/2]"), [P("p"), P("q")], HALF).subset == ()

    def test_precondition(self):
        with pytest.raises(PreconditionError):
            compactness_probe(P("q"), [P("p")], HALF)
        with pytest.raises(PreconditionError):
            compactness_probe(P("p"), [P("p")] * 13, 1)

    def test_minimal_and_monotone(self):
        rng = random.Random(4)
        for inst in pl_corpus(23, count=12, max_theory=4):
            full = truth_degree_exact(inst.phi, inst.theory).lo
            res = compactness_probe(inst.phi, inst.theory, full)
            assert res.degree >= full
            for k in range(len(res.subset)):
                for sub in itertools.combinations(res.subset, k):
                    assert truth_degree_exact(inst.phi, sub).lo < full
            # monotonicity on random sub-theories
            idx = [i for i in range(len(inst.theory)) if rng.random() < 0.5]
            sub = [inst.theory[i] for i in idx]
            assert truth_degree_exact(inst.phi, sub).lo <= full
