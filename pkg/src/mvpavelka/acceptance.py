"""The acceptance suite: ten seeded, exact checks over the whole package.

Each check returns a :class:`CriterionResult`.  Reports in ``lines`` form
contain no timings, so equal seeds give byte-identical output; runtime
limits are still enforced and only show up as a failure.
"""

from __future__ import annotations

import itertools
import random
import subprocess
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .algebra import (
    FIXPOINT_EQUATION, HALF, MV_EQUATIONS, PMV_EQUATION, FiniteChain,
    RationalSampler, check_identity, dmv_equations, enumerate_congruences,
    evaluate, mv_chain_algebra, random_rational,
)
from .calculus import (
    IMP_TO_NEGCONJ, NEGCONJ_TO_IMP, SearchBudget, check_proof, register_lemma,
    replay_prop33,
)
from .corpus import (
    compactness_corpus, ground_corpus, mutate_proof, pl_corpus, soundness_corpus,
)
from .degrees import (
    compactness_probe, proof_degree_lower, truth_degree_exact, truth_degree_grid,
)
from .syntax import Const, Impl, format_rational, parse, to_core, to_text, variables


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    details: list[str] = field(default_factory=list)
    seconds: float = 0.0

    def line(self) -> str:
        return f"criterion {self.number} {self.name}: {'PASS' if self.passed else 'FAIL'}"


def _timed(limit: float | None):
    def wrap(fn: Callable[[int], tuple[bool, list[str]]]):
        def run(seed: int) -> tuple[bool, list[str], float]:
            start = time.perf_counter()
            ok, details = fn(seed)
            elapsed = time.perf_counter() - start
            if limit is not None and elapsed > limit:
                ok = False
                details.append(f"runtime limit of {limit:g}s exceeded")
            return ok, details, elapsed
        return run
    return wrap


@_timed(30)
def mv_identities(seed: int):
    failures = 0
    checked = 0
    for key, eqs in MV_EQUATIONS.items():
        for lhs, rhs in eqs:
            models = [FiniteChain.with_elements(m) for m in range(2, 7)]
            models.append(RationalSampler(10_000, seed))
            for model in models:
                rep = check_identity(lhs, rhs, model, max_counterexamples=1)
                checked += rep.checked
                failures += len(rep.counterexamples)
    return failures == 0, [f"valuations {checked}", f"counterexamples {failures}"]


@_timed(None)
def expansion_identities(seed: int):
    failures = len(check_identity(*PMV_EQUATION, RationalSampler(10_000, seed)).counterexamples)
    for n in range(1, 13):
        for lhs, rhs in dmv_equations(n):
            failures += len(check_identity(lhs, rhs, RationalSampler(1_000, seed + n)).counterexamples)
    lhs, rhs = FIXPOINT_EQUATION
    fix_ok = evaluate(lhs, {}) == evaluate(rhs, {}) == HALF
    return failures == 0 and fix_ok, [f"counterexamples {failures}", f"fixpoint {'ok' if fix_ok else 'wrong'}"]


@_timed(None)
def exact_spot_values(seed: int):
    rng = random.Random(seed)
    d = truth_degree_exact(parse("p -> (p & p)"))
    ok = d.lo == HALF and d.witness == {"p": HALF}
    for _ in range(20):
        r = random_rational(rng)
        ok &= truth_degree_exact(Const(r)).lo == r
    ok &= truth_degree_exact(parse("q"), [parse("p"), parse("p -> q")]).lo == 1
    return ok, [d.summary()]


@_timed(300)
def solver_cross_validation(seed: int):
    bad = []
    chain = FiniteChain(10)
    for k, inst in enumerate(pl_corpus(seed)):
        ex = truth_degree_exact(inst.phi, inst.theory)
        grid = truth_degree_grid(inst.phi, inst.theory, eps=Fraction(1, 10))
        names = sorted(variables(inst.phi).union(*(variables(t) for t in inst.theory)))
        vals = [evaluate(inst.phi, v) for v in chain.valuations(names)
                if all(evaluate(t, v) == 1 for t in inst.theory)]
        brute = min(vals) if vals else None
        if not grid.lo <= ex.lo <= grid.hi:
            bad.append(f"instance {k}: grid does not bracket the exact value")
        if brute is None:
            if not ex.vacuous:
                bad.append(f"instance {k}: no chain point satisfies the theory")
        elif not ex.lo <= brute <= ex.lo + Fraction(1, 10):
            bad.append(f"instance {k}: exact {format_rational(ex.lo)} vs chain {format_rational(brute)}")
    return not bad, [f"instances 50", *bad]


@_timed(None)
def proof_checker(seed: int):
    proof = replay_prop33(parse("p"), parse("q"), parse("r"))
    ok = check_proof(proof).accepted
    rng = random.Random(seed)
    survivors = []
    for i in range(100):
        kind, mutant = mutate_proof(proof, rng)
        if check_proof(mutant).accepted:
            survivors.append(f"mutation {i} ({kind}) accepted")
    lemma_checks = 0
    for name, pattern in (("IMP_NEGCONJ", IMP_TO_NEGCONJ), ("NEGCONJ_IMP", NEGCONJ_TO_IMP)):
        try:
            lemma_checks += register_lemma(name, pattern, range(2, 7), trials=0).chain_checks
        except ValueError as exc:
            survivors.append(str(exc))
    return ok and not survivors, [f"replay {'accepted' if ok else 'rejected'}",
                                  f"lemma chain checks {lemma_checks}", *survivors]


def _concludes(proof, r, phi) -> bool:
    return to_core(proof.conclusion) == to_core(Impl(Const(r), phi))


@_timed(None)
def soundness(seed: int):
    bad = []
    positive = 0
    for k, inst in enumerate(soundness_corpus(seed)):
        low = proof_degree_lower(inst.phi, inst.theory, SearchBudget(max_steps=1500))
        if not (check_proof(low.proof).accepted and _concludes(low.proof, low.lo, inst.phi)):
            bad.append(f"instance {k}: stored proof does not check")
        truth = truth_degree_exact(inst.phi, inst.theory)
        if low.lo > truth.lo:
            bad.append(f"instance {k}: {format_rational(low.lo)} > {format_rational(truth.lo)}")
        positive += low.lo > 0
    return not bad, [f"triples 200", f"positive lower bounds {positive}", *bad]


@_timed(None)
def ground_equality(seed: int):
    bad = []
    for k, phi in enumerate(ground_corpus(seed)):
        low = proof_degree_lower(phi, (), SearchBudget(max_steps=50))
        truth = truth_degree_exact(phi)
        if low.lo != truth.lo or not check_proof(low.proof).accepted or not _concludes(low.proof, low.lo, phi):
            bad.append(f"instance {k}: {to_text(phi)}")
    return not bad, ["formulas 50", *bad]


@_timed(None)
def compactness(seed: int):
    bad = []
    for k, inst in enumerate(compactness_corpus(seed)):
        r = truth_degree_exact(inst.phi, inst.theory).lo
        res = compactness_probe(inst.phi, inst.theory, r)
        if res.degree < r:
            bad.append(f"instance {k}: subset degree too low")
        for size in range(len(res.subset)):
            for sub in itertools.combinations(res.subset, size):
                if truth_degree_exact(inst.phi, sub).lo >= r:
                    bad.append(f"instance {k}: subset is not minimal")
    return not bad, ["instances 25", *bad]


@_timed(None)
def congruences(seed: int):
    details = []
    reduct = ("->", "0")
    l2, l3 = mv_chain_algebra(2), mv_chain_algebra(3)
    count = len(enumerate_congruences(l2.product(l3), reduct))
    ok = count == 4
    details.append(f"L2xL3 congruences {count}")
    # the negation fixpoint exists only when every factor has one
    with_k = {"K": (0, lambda: HALF)}
    k3, k5 = mv_chain_algebra(3, with_k), mv_chain_algebra(5, with_k)
    for label, alg in (("L3", k3), ("L3xL3", k3.product(k3)), ("L3xL5", k3.product(k5))):
        same = (enumerate_congruences(alg, reduct).partitions
                == enumerate_congruences(alg, reduct + ("K",)).partitions)
        ok &= same
        details.append(f"{label} fixpoint expansion {'agrees' if same else 'differs'}")
    for m in range(2, 9):
        n = len(enumerate_congruences(mv_chain_algebra(m), reduct))
        ok &= n == 2
        details.append(f"L{m} congruences {n}")
    return ok, details


CRITERIA = [
    (1, "mv-identities", mv_identities),
    (2, "expansion-identities", expansion_identities),
    (3, "exact-spot-values", exact_spot_values),
    (4, "solver-cross-validation", solver_cross_validation),
    (5, "proof-checker", proof_checker),
    (6, "soundness", soundness),
    (7, "ground-equality", ground_equality),
    (8, "compactness", compactness),
    (9, "congruences", congruences),
]


def run_criterion(number: int, seed: int = 0) -> CriterionResult:
    if number == 10:
        return determinism(seed)
    for num, name, fn in CRITERIA:
        if num == number:
            ok, details, elapsed = fn(seed)
            return CriterionResult(num, name, ok, details, elapsed)
    raise ValueError(f"no acceptance criterion {number}")


def suite_command(seed: int) -> list[str]:
    return [sys.executable, "-m", "mvpavelka", "suite", "--format", "lines",
            "--seed", str(seed), "--only", ",".join(str(n) for n, _, _ in CRITERIA)]


def determinism(seed: int = 0) -> CriterionResult:
    """Run criteria 1-9 twice in separate processes and compare the reports."""
    start = time.perf_counter()
    cmd = suite_command(seed)
    procs = [subprocess.Popen(cmd, stdout=subprocess.PIPE, stderr=subprocess.PIPE) for _ in range(2)]
    outs = [p.communicate()[0] for p in procs]
    same = outs[0] == outs[1] and bool(outs[0])
    details = [f"report bytes {len(outs[0])}", "identical" if same else "reports differ"]
    return CriterionResult(10, "determinism", same, details, time.perf_counter() - start)
