"""Seeded random corpora for the property and acceptance suites.

Every generator takes an explicit seed and draws from its own
:class:`random.Random`, so a corpus depends on nothing but its arguments.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Sequence

from .calculus import (
    SCHEMES, Axiom, Hypothesis, LemmaUse, ModusPonens, Proof, ProofStep,
)
from .degrees import truncation_count
from .syntax import (
    Bullet, Const, Div, FixK, Formula, Impl, Join, Meet, Neg, Odot, Oplus, Var,
    ZERO, size,
)

PL_BINARY = (Impl, Odot, Oplus, Meet, Join)
# constants on the 10-element grid keep chain-restricted checks meaningful
GRID_CONSTANTS = tuple(Fraction(k, 10) for k in range(11))


def random_formula(rng: random.Random, names: Sequence[str], depth: int,
                   binary=PL_BINARY, const_p: float = 0.15, neg_p: float = 0.15,
                   constants: Sequence[Fraction] = GRID_CONSTANTS) -> Formula:
    if depth <= 0 or rng.random() < 0.25:
        if constants and rng.random() < const_p:
            return Const(rng.choice(constants))
        return Var(rng.choice(names))
    if rng.random() < neg_p:
        return Neg(random_formula(rng, names, depth - 1, binary, const_p, neg_p, constants))
    op = rng.choice(binary)
    return op(random_formula(rng, names, depth - 1, binary, const_p, neg_p, constants),
              random_formula(rng, names, depth - 1, binary, const_p, neg_p, constants))


def _bounded(rng, names, depth, max_trunc, **kw) -> Formula:
    while True:
        f = random_formula(rng, names, depth, **kw)
        if truncation_count(f) <= max_trunc:
            return f


def _generator(rng: random.Random, names: Sequence[str]) -> Formula:
    """Theory generators with a fair chance of being satisfiable."""
    shape = rng.randrange(4)
    x, y = Var(rng.choice(names)), Var(rng.choice(names))
    if shape == 0:
        return Impl(x, y)
    if shape == 1:
        return Impl(Const(rng.choice(GRID_CONSTANTS)), x)
    if shape == 2:
        return Oplus(x, y)
    return _bounded(rng, names, 2, 3)


@dataclass(frozen=True)
class Instance:
    phi: Formula
    theory: tuple[Formula, ...]


def pl_corpus(seed: int, count: int = 50, max_vars: int = 3, max_trunc: int = 8,
              max_theory: int = 3) -> list[Instance]:
    """Piecewise-linear formulas with small random theories."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        names = ["p", "q", "r"][: rng.randint(1, max_vars)]
        phi = _bounded(rng, names, 4, max_trunc)
        theory = tuple(_generator(rng, names) for _ in range(rng.randint(0, max_theory)))
        out.append(Instance(phi, theory))
    return out


def ground_formula(rng: random.Random, depth: int, max_div: int = 4) -> Formula:
    """Variable-free formula over constants, 0, K and division."""
    if depth <= 0 or rng.random() < 0.2:
        roll = rng.random()
        if roll < 0.15:
            return ZERO
        if roll < 0.3:
            return FixK()
        if rng.random() < 0.5:
            q = rng.randint(1, 6)
            return Const(Fraction(rng.randint(0, q), q))
        return Const(rng.choice(GRID_CONSTANTS))
    roll = rng.random()
    if roll < 0.15:
        return Neg(ground_formula(rng, depth - 1, max_div))
    if roll < 0.3:
        return Div(rng.randint(1, max_div), ground_formula(rng, depth - 1, max_div))
    op = rng.choice(PL_BINARY)
    return op(ground_formula(rng, depth - 1, max_div), ground_formula(rng, depth - 1, max_div))


def ground_corpus(seed: int, count: int = 50, depth: int = 3) -> list[Formula]:
    rng = random.Random(seed)
    return [ground_formula(rng, depth) for _ in range(count)]


def soundness_corpus(seed: int, count: int = 200) -> list[Instance]:
    """(phi, S) pairs for which the proof search has a realistic chance."""
    rng = random.Random(seed)
    out = []
    names = ["p", "q", "r"]
    for i in range(count):
        shape = i % 5
        x, y, z = (Var(n) for n in rng.sample(names, 3))
        c = Const(rng.choice(GRID_CONSTANTS[1:]))
        if shape == 0:      # detachment
            out.append(Instance(y, (x, Impl(x, y))))
        elif shape == 1:    # graded chaining
            out.append(Instance(z, (Impl(c, x), Impl(x, z))))
        elif shape == 2:    # graded hypothesis, graded target
            out.append(Instance(Impl(c, y), (Impl(c, x), Impl(x, y))))
        elif shape == 3:    # axiom instances and identities
            a = random_formula(rng, names, 1)
            b = random_formula(rng, names, 1)
            out.append(Instance(rng.choice([Impl(a, Impl(b, a)), Impl(a, a)]), ()))
        else:               # ground formulas
            out.append(Instance(ground_formula(rng, 2), ()))
    return out


def compactness_corpus(seed: int, count: int = 25, max_theory: int = 6) -> list[Instance]:
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        names = ["p", "q", "r"][: rng.randint(1, 3)]
        phi = _bounded(rng, names, 2, 3)
        theory = tuple(_generator(rng, names) for _ in range(rng.randint(1, max_theory)))
        out.append(Instance(phi, theory))
    return out


# ---------------------------------------------------------------------------
# Proof mutations


def _edit_formula(rng: random.Random, f: Formula) -> Formula:
    choice = rng.randrange(3)
    if choice == 0:
        return Neg(f)
    if choice == 1:
        return Impl(f, Var("p"))
    return Odot(f, f)


def mutate_proof(proof: Proof, rng: random.Random) -> tuple[str, Proof]:
    """One single-step mutation: premise swap, formula edit or scheme rename."""
    steps = list(proof.steps)
    kinds = ["edit", "rename", "swap"]
    while True:
        kind = rng.choice(kinds)
        i = rng.randrange(len(steps))
        s = steps[i]
        j = s.justification
        if kind == "swap":
            if not isinstance(j, ModusPonens) or j.minor == j.major:
                continue
            steps[i] = replace(s, justification=ModusPonens(j.major, j.minor))
        elif kind == "rename":
            if not isinstance(j, Axiom):
                continue
            others = sorted(n for n in SCHEMES if n != j.scheme)
            steps[i] = replace(s, justification=Axiom(rng.choice(others), ()))
        else:
            steps[i] = replace(s, formula=_edit_formula(rng, s.formula))
        return kind, Proof(proof.theory, tuple(steps))
