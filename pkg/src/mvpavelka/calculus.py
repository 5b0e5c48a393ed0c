"""Hilbert calculus for Łukasiewicz logic and its expansions.

Axiom schemes are stored over the metavariables ``A``, ``B``, ``C``.
Biconditional schemes are split into their two implications, suffixed
``.lr`` (left to right) and ``.rl``.  Matching, modus ponens and lemma
checks all compare formulas after :func:`~mvpavelka.syntax.to_core`, so
derived connectives can be written either way in a proof.
"""

from __future__ import annotations

import itertools
import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Mapping, Sequence

from .algebra import FiniteChain, RationalSampler, evaluate, imp, random_rational
from .syntax import (
    BASE, Bullet, Const, Div, FixK, Formula, Impl, LogicProfile, Neg, Odot,
    ONE, ProfileError, Theory, Var, ZERO, Zero, check_profile, expand_multiple,
    format_rational, formula_key, is_ground, parse, parse_rational,
    required_profile, size, subformulas, substitute, to_core, to_text,
    variables,
)

A, B, C = Var("A"), Var("B"), Var("C")
METAVARS = ("A", "B", "C")


class ProofFormatError(ValueError):
    """Malformed proof file."""


class BudgetExhausted(RuntimeError):
    """Proof search ran out of budget; this is not a refutation."""


class LemmaValidationError(ValueError):
    def __init__(self, name: str, valuation: dict, value: Fraction):
        shown = ", ".join(f"{k}={format_rational(v)}" for k, v in sorted(valuation.items()))
        super().__init__(f"lemma {name} takes value {format_rational(value)} at {shown}")
        self.valuation = valuation
        self.value = value


# ---------------------------------------------------------------------------
# Axiom schemes


@dataclass(frozen=True)
class AxiomScheme:
    name: str
    pattern: Formula | None  # None for the parametric schemes
    requires: tuple[str, ...] = ()
    kind: str = "pattern"
    direction: str = ""

    def allowed(self, profile: LogicProfile) -> bool:
        return all(getattr(profile, flag) for flag in self.requires)


def _pair(name, lhs, rhs, requires=()):
    return [
        AxiomScheme(f"{name}.lr", Impl(lhs, rhs), requires, direction="lr"),
        AxiomScheme(f"{name}.rl", Impl(rhs, lhs), requires, direction="rl"),
    ]


def _build_schemes() -> dict[str, AxiomScheme]:
    prod = ("product_enabled",)
    out = [
        AxiomScheme("L1", Impl(A, Impl(B, A))),
        AxiomScheme("L2", Impl(Impl(A, B), Impl(Impl(B, C), Impl(A, C)))),
        AxiomScheme("L3", Impl(Impl(Neg(A), Neg(B)), Impl(B, A))),
        AxiomScheme("L4", Impl(Impl(Impl(A, B), B), Impl(Impl(B, A), A))),
        AxiomScheme("PL1", Impl(Bullet(A, B), Bullet(B, A)), prod),
        *_pair("PL2", Bullet(ONE, A), A, prod),
        AxiomScheme("PL3", Impl(Bullet(A, B), B), prod),
        *_pair("PL4", Bullet(Bullet(A, B), C), Bullet(A, Bullet(B, C)), prod),
        *_pair("PL5", Bullet(A, Odot(B, Neg(C))), Odot(Bullet(A, B), Neg(Bullet(A, C))), prod),
        AxiomScheme("DL1.lr", None, ("division_enabled",), "dl1", "lr"),
        AxiomScheme("DL1.rl", None, ("division_enabled",), "dl1", "rl"),
        AxiomScheme("DL2", None, ("division_enabled",), "dl2"),
        *_pair("FIX", Neg(FixK()), FixK(), ("fixpoint_enabled",)),
        AxiomScheme("BK1.lr", Impl(Const(0), ZERO), ("constants_enabled",), "pattern", "lr"),
        AxiomScheme("BK1.rl", Impl(ZERO, Const(0)), ("constants_enabled",), "pattern", "rl"),
        AxiomScheme("BK2.lr", None, ("constants_enabled",), "bk2", "lr"),
        AxiomScheme("BK2.rl", None, ("constants_enabled",), "bk2", "rl"),
        AxiomScheme("BK3.lr", None, ("constants_enabled",), "bk3", "lr"),
        AxiomScheme("BK3.rl", None, ("constants_enabled",), "bk3", "rl"),
    ]
    return {s.name: s for s in out}


SCHEMES: dict[str, AxiomScheme] = _build_schemes()


def scheme(name: str) -> AxiomScheme:
    key = name.replace("Ł", "L")
    if key not in SCHEMES:
        raise KeyError(f"unknown axiom scheme {name!r}")
    return SCHEMES[key]


def _match(pattern: Formula, target: Formula, bindings: dict, metavars=METAVARS) -> bool:
    if isinstance(pattern, Var) and pattern.name in metavars:
        bound = bindings.get(pattern.name)
        if bound is None:
            bindings[pattern.name] = target
            return True
        return bound == target
    if type(pattern) is not type(target):
        return False
    if isinstance(pattern, Div):
        return pattern.n == target.n and _match(pattern.arg, target.arg, bindings, metavars)
    if isinstance(pattern, Neg):
        return _match(pattern.arg, target.arg, bindings, metavars)
    if hasattr(pattern, "lhs"):
        return (_match(pattern.lhs, target.lhs, bindings, metavars)
                and _match(pattern.rhs, target.rhs, bindings, metavars))
    return pattern == target


def _multiple_index(f: Formula) -> int | None:
    """k such that core ``f`` has the shape of k(dk(X)), read off its spine."""
    while isinstance(f, Impl):
        f = f.rhs
    return f.n if isinstance(f, Div) else None


def _bk3_value(f: Formula) -> tuple[Fraction, dict] | None:
    if isinstance(f, Bullet) and isinstance(f.lhs, Const) and isinstance(f.rhs, Const):
        return f.lhs.value * f.rhs.value, {"op": "*", "r": f.lhs.value, "s": f.rhs.value}
    if isinstance(f, Div) and isinstance(f.arg, Const):
        return f.arg.value / f.n, {"op": f"d{f.n}", "r": f.arg.value}
    if isinstance(f, FixK):
        return Fraction(1, 2), {"op": "K"}
    return None


_BK3_FLAGS = {"*": "product_enabled", "K": "fixpoint_enabled"}


def match_scheme(s: AxiomScheme | str, f: Formula) -> dict | None:
    """Bindings making ``f`` an instance of ``s`` (compared in core form)."""
    if isinstance(s, str):
        s = scheme(s)
    t = to_core(f)
    if s.kind == "pattern":
        b: dict = {}
        return b if _match(to_core(s.pattern), t, b) else None
    if not isinstance(t, Impl):
        return None
    if s.kind == "dl1":
        x, m = (t.lhs, t.rhs) if s.direction == "lr" else (t.rhs, t.lhs)
        k = _multiple_index(m)
        if k is None or to_core(expand_multiple(k, Div(k, x))) != m:
            return None
        return {"A": x, "k": k}
    if s.kind == "dl2":
        if not isinstance(t.rhs, Impl) or not isinstance(t.rhs.lhs, Div):
            return None
        k, x, y = t.rhs.lhs.n, t.rhs.lhs.arg, t.rhs.rhs
        b = {"A": x, "B": y, "k": k}
        return b if to_core(instantiate(s, b)) == t else None
    if s.kind == "bk2":
        inner, const = (t.lhs, t.rhs) if s.direction == "lr" else (t.rhs, t.lhs)
        if (isinstance(const, Const) and isinstance(inner, Impl)
                and isinstance(inner.lhs, Const) and isinstance(inner.rhs, Const)
                and const.value == imp(inner.lhs.value, inner.rhs.value)):
            return {"r": inner.lhs.value, "s": inner.rhs.value}
        return None
    if s.kind == "bk3":
        app, const = (t.lhs, t.rhs) if s.direction == "lr" else (t.rhs, t.lhs)
        got = _bk3_value(app)
        if got is not None and isinstance(const, Const) and const.value == got[0]:
            return got[1]
        return None
    raise ValueError(f"unknown scheme kind {s.kind!r}")


def instantiate(s: AxiomScheme | str, bindings: Mapping) -> Formula:
    """The instance of ``s`` under ``bindings`` (metavariables and parameters)."""
    if isinstance(s, str):
        s = scheme(s)
    if s.kind == "pattern":
        missing = [v for v in variables(s.pattern) if v not in bindings]
        if missing:
            raise KeyError(f"missing bindings {missing} for {s.name}")
        return substitute(s.pattern, {k: v for k, v in bindings.items() if k in METAVARS})
    if s.kind == "dl1":
        k, x = int(bindings["k"]), bindings["A"]
        m = expand_multiple(k, Div(k, x))
        return Impl(x, m) if s.direction == "lr" else Impl(m, x)
    if s.kind == "dl2":
        k, x, y = int(bindings["k"]), bindings["A"], bindings["B"]
        return Impl(Impl(x, expand_multiple(k, y)), Impl(Div(k, x), y))
    if s.kind == "bk2":
        r, t = Fraction(bindings["r"]), Fraction(bindings["s"])
        pair = (Impl(Const(r), Const(t)), Const(imp(r, t)))
        return Impl(*pair) if s.direction == "lr" else Impl(*reversed(pair))
    if s.kind == "bk3":
        op = str(bindings["op"])
        if op == "*":
            r, t = Fraction(bindings["r"]), Fraction(bindings["s"])
            pair = (Bullet(Const(r), Const(t)), Const(r * t))
        elif op == "K":
            pair = (FixK(), Const(Fraction(1, 2)))
        elif re.fullmatch(r"d\d+", op):
            n, r = int(op[1:]), Fraction(bindings["r"])
            pair = (Div(n, Const(r)), Const(r / n))
        else:
            raise ValueError(f"BK3 has no instance for connective {op!r}")
        return Impl(*pair) if s.direction == "lr" else Impl(*reversed(pair))
    raise ValueError(f"unknown scheme kind {s.kind!r}")


def _scheme_allowed(s: AxiomScheme, bindings: Mapping, profile: LogicProfile) -> bool:
    if not s.allowed(profile):
        return False
    if s.kind == "bk3":
        op = bindings.get("op", "")
        if op in _BK3_FLAGS:
            return getattr(profile, _BK3_FLAGS[op])
        return profile.division_enabled
    return True


# ---------------------------------------------------------------------------
# Lemmas


@dataclass(frozen=True)
class Lemma:
    name: str
    pattern: Formula
    status: str = "semantically admitted"
    chain_checks: int = 0
    sample_checks: int = 0


@dataclass
class LemmaRegistry:
    lemmas: dict[str, Lemma] = field(default_factory=dict)

    def __contains__(self, name):
        return name in self.lemmas

    def __getitem__(self, name) -> Lemma:
        return self.lemmas[name]

    def register(self, name: str, pattern: Formula | str, chains: Iterable[int] = range(2, 7),
                 trials: int = 10_000, seed: int = 0) -> Lemma:
        lemma = register_lemma(name, pattern, chains, trials, seed)
        self.lemmas[name] = lemma
        return lemma


def register_lemma(name: str, pattern: Formula | str, chains: Iterable[int] = range(2, 7),
                   trials: int = 10_000, seed: int = 0) -> Lemma:
    """Admit ``pattern`` as a lemma after semantic validation.

    Metavariables are evaluated as ordinary variables, exhaustively on the
    m-element chains listed in ``chains`` and on ``trials`` random
    rational valuations.  Raises :class:`LemmaValidationError` on the first
    valuation where the pattern is not 1.
    """
    if isinstance(pattern, str):
        pattern = parse(pattern)
    names = sorted(variables(pattern))
    n_chain = 0
    for m in chains:
        for v in FiniteChain.with_elements(m).valuations(names):
            n_chain += 1
            val = evaluate(pattern, v)
            if val != 1:
                raise LemmaValidationError(name, v, val)
    n_sample = 0
    for v in RationalSampler(trials, seed).valuations(names):
        n_sample += 1
        val = evaluate(pattern, v)
        if val != 1:
            raise LemmaValidationError(name, v, val)
    return Lemma(name, pattern, chain_checks=n_chain, sample_checks=n_sample)


# the two halves of the MV identity  a -> b  =  !(a & !b)
IMP_TO_NEGCONJ = Impl(Impl(A, B), Neg(Odot(A, Neg(B))))
NEGCONJ_TO_IMP = Impl(Neg(Odot(A, Neg(B))), Impl(A, B))


@lru_cache(maxsize=None)
def default_lemmas() -> LemmaRegistry:
    reg = LemmaRegistry()
    reg.register("IMP_NEGCONJ", IMP_TO_NEGCONJ)
    reg.register("NEGCONJ_IMP", NEGCONJ_TO_IMP)
    return reg


# ---------------------------------------------------------------------------
# Proofs


@dataclass(frozen=True)
class Axiom:
    scheme: str
    bindings: tuple = ()

    def __init__(self, scheme: str, bindings: Mapping | tuple = ()):
        object.__setattr__(self, "scheme", scheme)
        items = bindings.items() if isinstance(bindings, Mapping) else bindings
        object.__setattr__(self, "bindings", tuple(sorted(items, key=lambda kv: kv[0])))


@dataclass(frozen=True)
class Hypothesis:
    generator: int  # 1-based


@dataclass(frozen=True)
class ModusPonens:
    minor: int  # step proving X
    major: int  # step proving X -> Y


@dataclass(frozen=True)
class LemmaUse:
    name: str
    bindings: tuple = ()

    def __init__(self, name: str, bindings: Mapping | tuple = ()):
        object.__setattr__(self, "name", name)
        items = bindings.items() if isinstance(bindings, Mapping) else bindings
        object.__setattr__(self, "bindings", tuple(sorted(items, key=lambda kv: kv[0])))


Justification = Axiom | Hypothesis | ModusPonens | LemmaUse


@dataclass(frozen=True)
class ProofStep:
    index: int  # 1-based
    formula: Formula
    justification: Justification


@dataclass(frozen=True)
class Proof:
    theory: Theory
    steps: tuple[ProofStep, ...]

    @property
    def conclusion(self) -> Formula | None:
        return self.steps[-1].formula if self.steps else None

    def lemmas_used(self) -> set[str]:
        return {s.justification.name for s in self.steps if isinstance(s.justification, LemmaUse)}

    def __len__(self):
        return len(self.steps)


@dataclass
class StepDiagnostic:
    index: int
    ok: bool
    message: str = ""


@dataclass
class Verdict:
    accepted: bool
    diagnostics: list[StepDiagnostic]
    lemmas_used: set[str] = field(default_factory=set)

    def failures(self) -> list[StepDiagnostic]:
        return [d for d in self.diagnostics if not d.ok]

    def lines(self) -> list[str]:
        out = ["accepted" if self.accepted else "rejected"]
        for d in self.failures():
            out.append(f"step {d.index}: {d.message}")
        if self.lemmas_used:
            out.append("lemmas " + ",".join(sorted(self.lemmas_used)) + " (semantically admitted)")
        return out


def _bindings_agree(given: Iterable, found: Mapping) -> str | None:
    for key, val in given:
        if key not in found:
            return f"binding {key} is not used by the scheme"
        other = found[key]
        if isinstance(val, Formula) or isinstance(other, Formula):
            if not isinstance(val, Formula) or not isinstance(other, Formula) or to_core(val) != to_core(other):
                return f"binding {key} does not match the formula"
        elif key == "op" or key == "k":
            if str(val) != str(other):
                return f"binding {key} does not match the formula"
        elif Fraction(val) != Fraction(other):
            return f"binding {key} does not match the formula"
    return None


def check_proof(proof: Proof, lemmas: LemmaRegistry | None = None) -> Verdict:
    """Validate every step of ``proof``; the verdict lists each failure."""
    profile = proof.theory.profile
    diags: list[StepDiagnostic] = []
    cores: list[Formula] = []
    used: set[str] = set()
    for pos, step in enumerate(proof.steps, start=1):
        msg = _check_step(step, pos, proof, cores, profile, lemmas, used)
        cores.append(to_core(step.formula))
        diags.append(StepDiagnostic(step.index, msg is None, msg or ""))
    accepted = bool(proof.steps) and all(d.ok for d in diags)
    return Verdict(accepted, diags, used)


def _check_step(step, pos, proof, cores, profile, lemmas, used) -> str | None:
    if step.index != pos:
        return f"step numbered {step.index}, expected {pos}"
    try:
        check_profile(step.formula, profile)
    except ProfileError as exc:
        return f"profile violation: {exc}"
    core = to_core(step.formula)
    j = step.justification
    if isinstance(j, Hypothesis):
        if not 1 <= j.generator <= len(proof.theory.generators):
            return f"hypothesis {j.generator} does not exist"
        if to_core(proof.theory.generators[j.generator - 1]) != core:
            return f"formula is not hypothesis {j.generator}"
        return None
    if isinstance(j, ModusPonens):
        for ref in (j.minor, j.major):
            if not 1 <= ref < pos:
                return f"modus ponens cites step {ref}, which is not earlier"
        if cores[j.major - 1] != Impl(cores[j.minor - 1], core):
            return f"step {j.major} is not step {j.minor} -> this formula"
        return None
    if isinstance(j, Axiom):
        try:
            s = scheme(j.scheme)
        except KeyError as exc:
            return str(exc.args[0])
        found = match_scheme(s, step.formula)
        if found is None:
            return f"not an instance of {s.name}"
        if not _scheme_allowed(s, found, profile):
            return f"profile violation: {s.name} is not available in profile {profile}"
        bad = _bindings_agree(j.bindings, found)
        return bad
    if isinstance(j, LemmaUse):
        reg = lemmas if lemmas is not None else default_lemmas()
        if j.name not in reg:
            return f"lemma {j.name} is not registered"
        b: dict = {}
        if not _match(to_core(reg[j.name].pattern), core, b):
            return f"not an instance of lemma {j.name}"
        bad = _bindings_agree(j.bindings, b)
        if bad is None:
            used.add(j.name)
        return bad
    return f"unknown justification {j!r}"


# ---------------------------------------------------------------------------
# Building proofs


class ProofBuilder:
    """Accumulates proof steps, reusing any formula already derived.

    Besides primitive steps it provides a few derived rules, each of which
    expands to plain axiom instances and modus ponens.
    """

    def __init__(self, theory: Theory):
        self.theory = theory
        self.steps: list[ProofStep] = []
        self._known: dict[Formula, int] = {}

    def _add(self, formula: Formula, just) -> int:
        core = to_core(formula)
        if core in self._known:
            return self._known[core]
        idx = len(self.steps) + 1
        self.steps.append(ProofStep(idx, formula, just))
        self._known[core] = idx
        return idx

    @classmethod
    def from_proof(cls, proof: Proof) -> "ProofBuilder":
        b = cls(proof.theory)
        for step in proof.steps:
            b.steps.append(step)
            b._known.setdefault(to_core(step.formula), step.index)
        return b

    def formula(self, i: int) -> Formula:
        return self.steps[i - 1].formula

    def find(self, f: Formula) -> int | None:
        return self._known.get(to_core(f))

    def hyp(self, k: int) -> int:
        return self._add(self.theory.generators[k - 1], Hypothesis(k))

    def axiom(self, name: str, **bindings) -> int:
        s = scheme(name)
        return self._add(instantiate(s, bindings), Axiom(name, bindings))

    def lemma(self, name: str, pattern: Formula, **bindings) -> int:
        return self._add(substitute(pattern, bindings), LemmaUse(name, bindings))

    def mp(self, minor: int, major: int) -> int:
        imp_f = self.formula(major)
        if not isinstance(imp_f, Impl):
            imp_f = to_core(imp_f)
        if not isinstance(imp_f, Impl) or to_core(imp_f.lhs) != to_core(self.formula(minor)):
            raise ValueError(f"cannot apply modus ponens to steps {minor} and {major}")
        return self._add(imp_f.rhs, ModusPonens(minor, major))

    @staticmethod
    def _parts(f: Formula) -> tuple[Formula, Formula]:
        if not isinstance(f, Impl):
            f = to_core(f)
        if not isinstance(f, Impl):
            raise ValueError(f"{to_text(f)} is not an implication")
        return f.lhs, f.rhs

    def hs(self, xy: int, yz: int) -> int:
        """From X -> Y and Y -> Z derive X -> Z."""
        x, y = self._parts(self.formula(xy))
        _, z = self._parts(self.formula(yz))
        ax = self.axiom("L2", A=x, B=y, C=z)
        return self.mp(yz, self.mp(xy, ax))

    def chain(self, *steps: int | None) -> int | None:
        """Compose a sequence of implications; ``None`` entries are identities."""
        out = None
        for s in steps:
            if s is None:
                continue
            out = s if out is None else self.hs(out, s)
        return out

    def identity(self, x: Formula) -> int:
        """X -> X from L1, L2 and L3."""
        nx, n0 = Neg(x), Neg(ZERO)
        s1 = self.axiom("L1", A=nx, B=n0)
        s2 = self.axiom("L2", A=nx, B=Impl(n0, nx), C=Impl(x, ZERO))
        s3 = self.mp(s1, s2)
        s4 = self.axiom("L3", A=ZERO, B=x)
        s5 = self.mp(s4, s3)
        s6 = self.axiom("L3", A=x, B=x)
        return self.mp(s5, s6)

    def weaken(self, y: int, x: Formula) -> int:
        """From Y derive X -> Y."""
        return self.mp(y, self.axiom("L1", A=self.formula(y), B=x))

    def suffix(self, xx: int, b: Formula) -> int:
        """From X' -> X derive (X -> B) -> (X' -> B)."""
        x1, x = self._parts(self.formula(xx))
        return self.mp(xx, self.axiom("L2", A=x1, B=x, C=b))

    def prefix(self, yy: int, a: Formula) -> int:
        """From Y -> Y' derive (A -> Y) -> (A -> Y')."""
        y, y1 = self._parts(self.formula(yy))
        contra = self.axiom("L2", A=a, B=y, C=ZERO)            # (A->Y) -> (!Y -> !A)
        neg_yy = self.suffix(yy, ZERO)                          # !Y' -> !Y
        swap = self.suffix(neg_yy, Neg(a))                      # (!Y -> !A) -> (!Y' -> !A)
        back = self.axiom("L3", A=y1, B=a)                      # (!Y' -> !A) -> (A -> Y')
        return self.chain(contra, swap, back)

    def ex_falso(self, x: Formula) -> int:
        """0 -> X."""
        top = self.identity(ZERO)
        w = self.weaken(top, Neg(x))                            # !X -> (0 -> 0)
        return self.mp(w, self.axiom("L3", A=x, B=ZERO))

    def restate(self, i: int, formula: Formula) -> int:
        """Re-display step ``i`` as the core-equal ``formula``."""
        old = self.steps[i - 1]
        if to_core(old.formula) != to_core(formula):
            raise ValueError("restated formula differs in core form")
        self.steps[i - 1] = ProofStep(old.index, formula, old.justification)
        return i

    def build(self, upto: int | None = None) -> Proof:
        if upto is None or upto == len(self.steps):
            return Proof(self.theory, tuple(self.steps))
        return extract(Proof(self.theory, tuple(self.steps)), upto)


def extract(proof: Proof, target: int) -> Proof:
    """Sub-proof containing only the steps ``target`` depends on, renumbered."""
    needed = set()
    stack = [target]
    while stack:
        i = stack.pop()
        if i in needed:
            continue
        needed.add(i)
        j = proof.steps[i - 1].justification
        if isinstance(j, ModusPonens):
            stack.extend((j.minor, j.major))
    order = sorted(needed)
    renum = {old: new for new, old in enumerate(order, start=1)}
    steps = []
    for old in order:
        s = proof.steps[old - 1]
        j = s.justification
        if isinstance(j, ModusPonens):
            j = ModusPonens(renum[j.minor], renum[j.major])
        steps.append(ProofStep(renum[old], s.formula, j))
    return Proof(proof.theory, tuple(steps))


def lift_to_one(proof: Proof) -> Proof:
    """Turn a proof of X into a proof of [1] -> X (L1 and modus ponens)."""
    prof = proof.theory.profile.union(LogicProfile(constants_enabled=True))
    b = ProofBuilder.from_proof(Proof(Theory(proof.theory.generators, prof), proof.steps))
    final = b.weaken(len(proof.steps), Const(1))
    return b.build(final)


@lru_cache(maxsize=256)
def zero_lower_proof(phi: Formula, theory: Theory) -> Proof:
    """[0] -> phi from BK1 and ex falso; valid for every formula."""
    prof = theory.profile.union(LogicProfile(constants_enabled=True)).union(required_profile(phi))
    b = ProofBuilder(Theory(theory.generators, prof))
    final = b.hs(b.axiom("BK1.lr"), b.ex_falso(phi))
    b.restate(final, Impl(Const(0), phi))
    return b.build(final)


# ---------------------------------------------------------------------------
# Monotonicity of the product


def _mono_steps(b: ProofBuilder, alpha: Formula, beta: Formula, gamma: Formula) -> int:
    """Derive (a -> b) -> ((g * a) -> (g * b)); returns the final step."""
    y = Odot(alpha, Neg(beta))
    x = Odot(Bullet(gamma, alpha), Neg(Bullet(gamma, beta)))
    s1 = b.axiom("PL3", A=gamma, B=y)                         # g*(a&!b) -> a&!b
    s2 = b.axiom("PL5.rl", A=gamma, B=alpha, C=beta)          # X -> g*(a&!b)
    s3 = b.hs(s2, s1)                                         # X -> Y
    s4 = b.axiom("L2", A=x, B=y, C=ZERO)                      # (X->Y) -> (!Y -> !X)
    s5 = b.mp(s3, s4)                                         # !Y -> !X
    s6 = b.lemma("IMP_NEGCONJ", IMP_TO_NEGCONJ, A=alpha, B=beta)
    s7 = b.hs(s6, s5)                                         # (a->b) -> !X
    s8 = b.lemma("NEGCONJ_IMP", NEGCONJ_TO_IMP, A=Bullet(gamma, alpha), B=Bullet(gamma, beta))
    s9 = b.hs(s7, s8)
    return b.restate(s9, Impl(Impl(alpha, beta), Impl(Bullet(gamma, alpha), Bullet(gamma, beta))))


def replay_prop33(alpha: Formula, beta: Formula, gamma: Formula,
                  profile: LogicProfile | None = None) -> Proof:
    """Checkable derivation of (a -> b) -> ((g * a) -> (g * b)).

    Follows the nine-step argument for monotonicity of the product: PL3 and
    PL5 give X -> Y for X = (g*a) & !(g*b) and Y = a & !b, contraposition
    turns it into !Y -> !X, and the two registered halves of
    a -> b = !(a & !b) close the chain.  Transitivity steps are spelled
    out through L2 and modus ponens.
    """
    prof = (profile or BASE).union(LogicProfile(product_enabled=True))
    for f in (alpha, beta, gamma):
        prof = prof.union(required_profile(f))
    b = ProofBuilder(Theory((), prof))
    final = _mono_steps(b, alpha, beta, gamma)
    return b.build(final)


# ---------------------------------------------------------------------------
# Ground proofs from the book-keeping axioms


def synthesize_ground_proof(phi: Formula, r: Fraction | int | str | None = None,
                            profile: LogicProfile | None = None) -> Proof:
    """Proof of ``[r] -> phi`` from no hypotheses for variable-free ``phi``.

    The book-keeping axioms fold each connective applied to constants into
    the constant of its value; congruence steps lift that through the
    formula.  ``r`` defaults to the value of ``phi`` and may not exceed it.
    """
    if not is_ground(phi):
        raise ValueError("synthesize_ground_proof needs a variable-free formula")
    value = evaluate(phi, {})
    r = value if r is None else Fraction(r)
    if r > value or r < 0:
        raise ValueError(f"cannot prove [{format_rational(r)}] -> phi when phi has value {format_rational(value)}")
    prof = LogicProfile(constants_enabled=True).union(required_profile(phi))
    if profile is not None:
        if not profile.constants_enabled:
            raise ProfileError("ground proofs need the constants profile")
        prof = prof.union(profile)
    b = ProofBuilder(Theory((), prof))
    _, _, down = _fold(b, to_core(phi))
    top = Const(value)
    if r < value:
        lower = _const_le(b, r, value)                        # [r] -> [value]
        final = b.chain(lower, down)
    elif down is None:
        final = b.identity(top)
    else:
        final = down
    final = b.restate(final, Impl(Const(r), phi))
    return b.build(final)


def _const_le(b: ProofBuilder, r: Fraction, s: Fraction) -> int:
    """[r] -> [s] for r <= s, via BK2 and the provable constant [1]."""
    c0 = Const(0)
    one = b.mp(b.identity(c0), b.axiom("BK2.lr", r=0, s=0))   # [1]
    return b.mp(one, b.axiom("BK2.rl", r=r, s=s))


def _fold(b: ProofBuilder, g: Formula) -> tuple[Fraction, int | None, int | None]:
    """Value of core ground ``g`` with steps g -> [v] and [v] -> g.

    ``None`` stands for an identity (``g`` is already the constant).
    """
    if isinstance(g, Const):
        return g.value, None, None
    if isinstance(g, Zero):
        return Fraction(0), b.axiom("BK1.rl"), b.axiom("BK1.lr")
    if isinstance(g, FixK):
        return Fraction(1, 2), b.axiom("BK3.lr", op="K"), b.axiom("BK3.rl", op="K")
    if isinstance(g, Impl):
        x, ux, dx = _fold(b, g.lhs)
        y, uy, dy = _fold(b, g.rhs)
        cx, cy = Const(x), Const(y)
        v = imp(x, y)
        up = b.chain(
            b.suffix(dx, g.rhs) if dx is not None else None,      # (X->Y) -> ([x]->Y)
            b.prefix(uy, cx) if uy is not None else None,         # ([x]->Y) -> ([x]->[y])
            b.axiom("BK2.lr", r=x, s=y),
        )
        down = b.chain(
            b.axiom("BK2.rl", r=x, s=y),
            b.suffix(ux, cy) if ux is not None else None,         # ([x]->[y]) -> (X->[y])
            b.prefix(dy, g.lhs) if dy is not None else None,      # (X->[y]) -> (X->Y)
        )
        return v, up, down
    if isinstance(g, Bullet):
        x, ux, dx = _fold(b, g.lhs)
        y, uy, dy = _fold(b, g.rhs)
        cx, cy = Const(x), Const(y)
        up = b.chain(
            _mono_left(b, ux, g.rhs) if ux is not None else None,   # X*Y -> [x]*Y
            _mono_right(b, uy, cx) if uy is not None else None,     # [x]*Y -> [x]*[y]
            b.axiom("BK3.lr", op="*", r=x, s=y),
        )
        down = b.chain(
            b.axiom("BK3.rl", op="*", r=x, s=y),
            _mono_left(b, dx, cy) if dx is not None else None,      # [x]*[y] -> X*[y]
            _mono_right(b, dy, g.lhs) if dy is not None else None,  # X*[y] -> X*Y
        )
        return x * y, up, down
    if isinstance(g, Div):
        n = g.n
        x, ux, dx = _fold(b, g.arg)
        cx = Const(x)
        if ux is None:
            up = b.axiom("BK3.lr", op=f"d{n}", r=x)
            down = b.axiom("BK3.rl", op=f"d{n}", r=x)
            return x / n, up, down
        # dn X -> dn [x]:  X -> [x] -> n(dn [x]), then DL2
        to_mult = b.chain(ux, b.axiom("DL1.lr", A=cx, k=n))
        up1 = b.mp(to_mult, b.axiom("DL2", A=g.arg, B=Div(n, cx), k=n))
        up = b.chain(up1, b.axiom("BK3.lr", op=f"d{n}", r=x))
        # dn [x] -> dn X:  [x] -> X -> n(dn X), then DL2
        to_mult2 = b.chain(dx, b.axiom("DL1.lr", A=g.arg, k=n))
        down1 = b.mp(to_mult2, b.axiom("DL2", A=cx, B=Div(n, g.arg), k=n))
        down = b.chain(b.axiom("BK3.rl", op=f"d{n}", r=x), down1)
        return x / n, up, down
    raise TypeError(f"{type(g).__name__} is not a core ground formula")


def _mono_right(b: ProofBuilder, yy: int, gamma: Formula) -> int:
    """From Y -> Y' derive (G * Y) -> (G * Y')."""
    y, y1 = b._parts(b.formula(yy))
    return b.mp(yy, _mono_steps(b, y, y1, gamma))


def _mono_left(b: ProofBuilder, xx: int, other: Formula) -> int:
    """From X -> X' derive (X * G) -> (X' * G) using commutativity."""
    x, x1 = b._parts(b.formula(xx))
    swap1 = b.axiom("PL1", A=x, B=other)                       # X*G -> G*X
    mid = _mono_right(b, xx, other)                            # G*X -> G*X'
    swap2 = b.axiom("PL1", A=other, B=x1)                      # G*X' -> X'*G
    return b.chain(swap1, mid, swap2)


# ---------------------------------------------------------------------------
# Forward proof search


@dataclass(frozen=True)
class SearchBudget:
    max_steps: int = 4000
    max_size: int = 24
    max_level: int = 3


def _binding_pool(seeds: Iterable[Formula], level: int, max_size: int) -> list[Formula]:
    pool = {ZERO}
    for f in seeds:
        pool.update(subformulas(to_core(f)))
    for _ in range(level - 1):
        pool |= {Impl(a, b) for a in pool for b in pool if size(a) + size(b) + 1 <= max_size // 2}
    return sorted(pool, key=formula_key)


def _pattern_instances(pool: Sequence[Formula], profile: LogicProfile, max_size: int):
    """(scheme name, bindings, formula) for pattern schemes over ``pool``."""
    for s in SCHEMES.values():
        if s.kind != "pattern" or not s.allowed(profile):
            continue
        mv = sorted(variables(s.pattern))
        for combo in itertools.product(pool, repeat=len(mv)):
            bindings = dict(zip(mv, combo))
            f = to_core(instantiate(s, bindings))
            if size(f) <= max_size:
                yield s.name, bindings, f
    if profile.constants_enabled:
        consts = sorted({g.value for f in pool for g in subformulas(f) if isinstance(g, Const)} | {Fraction(0), Fraction(1)})
        for r, t in itertools.product(consts, repeat=2):
            for name in ("BK2.lr", "BK2.rl"):
                yield name, {"r": r, "s": t}, to_core(instantiate(name, {"r": r, "s": t}))


def search_proof(target: Formula, theory: Theory, budget: SearchBudget = SearchBudget()) -> Proof | None:
    """Forward-chaining proof search with iterative deepening.

    Axiom instances draw their metavariable bindings from the subformulas
    of the target and the theory (plus implications between them at
    deeper levels).  Closure uses modus ponens, transitivity, weakening
    by L1 and the derived identity.  Returns ``None`` when the restricted
    search space is saturated without reaching the target and raises
    :class:`BudgetExhausted` when the step budget runs out; neither is a
    refutation.
    """
    profile = theory.profile.union(required_profile(target))
    goal = to_core(target)
    seeds = list(theory.generators) + [target]
    grew = True
    for level in range(1, budget.max_level + 1):
        pool = _binding_pool(seeds, level, budget.max_size)
        found, saturated = _saturate(goal, theory, profile, pool, budget)
        if found is not None:
            return _materialise(found, goal, target, theory, profile)
    return None


def _saturate(goal, theory, profile, pool, budget):
    # known: core formula -> derivation record
    known: dict[Formula, tuple] = {}
    order: list[Formula] = []

    def add(f, rec) -> bool:
        if f in known or size(f) > budget.max_size:
            return False
        if len(known) >= budget.max_steps:
            raise BudgetExhausted(f"search budget of {budget.max_steps} formulas exhausted")
        known[f] = rec
        order.append(f)
        return True

    for i, g in enumerate(theory.generators, start=1):
        add(to_core(g), ("hyp", i))
    if goal in known:
        return known, False
    for x in pool:
        if size(x) * 2 + 1 <= budget.max_size:
            add(Impl(x, x), ("id", x))
    for name, bindings, f in _pattern_instances(pool, profile, budget.max_size):
        add(f, ("axiom", name, bindings))
        if goal in known:
            return known, False
    changed = True
    while changed:
        changed = False
        snapshot = list(order)
        imps = [f for f in snapshot if isinstance(f, Impl)]
        by_lhs: dict[Formula, list[Formula]] = {}
        for f in imps:
            by_lhs.setdefault(f.lhs, []).append(f)
        for f in imps:
            if f.lhs in known and add(f.rhs, ("mp", f.lhs, f)):
                changed = True
        for f in imps:
            for g in by_lhs.get(f.rhs, ()):
                if add(Impl(f.lhs, g.rhs), ("hs", f, g)):
                    changed = True
        if goal in known:
            return known, False
        # weakening towards the goal keeps the closure finite
        if isinstance(goal, Impl) and goal.rhs in known and add(goal, ("weak", goal.rhs, goal.lhs)):
            return known, False
    return (known if goal in known else None), True


def _materialise(known, goal, target, theory, profile) -> Proof:
    b = ProofBuilder(Theory(theory.generators, profile))
    memo: dict[Formula, int] = {}

    def emit(f) -> int:
        if f in memo:
            return memo[f]
        rec = known[f]
        kind = rec[0]
        if kind == "hyp":
            i = b.hyp(rec[1])
        elif kind == "id":
            i = b.identity(rec[1])
        elif kind == "axiom":
            i = b.axiom(rec[1], **rec[2])
        elif kind == "mp":
            i = b.mp(emit(rec[1]), emit(rec[2]))
        elif kind == "hs":
            i = b.hs(emit(rec[1]), emit(rec[2]))
        elif kind == "weak":
            i = b.weaken(emit(rec[1]), rec[2])
        else:
            raise AssertionError(kind)
        memo[f] = i
        return i

    final = emit(goal)
    b.restate(final, target)
    return b.build(final)


# ---------------------------------------------------------------------------
# Proof files


def _format_binding_value(v) -> str:
    if isinstance(v, Formula):
        return to_text(v)
    if isinstance(v, Fraction):
        return format_rational(v)
    return str(v)


def format_justification(j: Justification) -> str:
    if isinstance(j, Hypothesis):
        return f"hyp:{j.generator}"
    if isinstance(j, ModusPonens):
        return f"mp:{j.minor},{j.major}"
    kind, name = ("axiom", j.scheme) if isinstance(j, Axiom) else ("lemma", j.name)
    text = f"{kind}:{name}"
    if j.bindings:
        text += " {" + ", ".join(f"{k}: {_format_binding_value(v)}" for k, v in j.bindings) + "}"
    return text


def format_proof(proof: Proof) -> str:
    lines = [f"profile: {proof.theory.profile}"]
    lines += [f"theory: {to_text(g)}" for g in proof.theory.generators]
    for s in proof.steps:
        lines.append(f"{s.index} | {to_text(s.formula)} | {format_justification(s.justification)}")
    lemmas = proof.lemmas_used()
    if lemmas:
        lines.insert(0, "# uses semantically admitted lemmas: " + ", ".join(sorted(lemmas)))
    return "\n".join(lines) + "\n"


_JUST = re.compile(r"^(axiom|lemma):([A-Za-z0-9_.Ł]+)\s*(\{.*\})?$|^hyp:(\d+)$|^mp:(\d+)\s*,\s*(\d+)$")


def _parse_bindings(text: str | None, profile: LogicProfile) -> dict:
    if not text:
        return {}
    body = text.strip()[1:-1].strip()
    out = {}
    if not body:
        return out
    for part in body.split(","):
        if ":" not in part:
            raise ProofFormatError(f"bad binding {part.strip()!r}")
        key, val = (t.strip() for t in part.split(":", 1))
        if key == "k":
            out[key] = int(val)
        elif key in ("r", "s"):
            out[key] = parse_rational(val)
        elif key == "op":
            out[key] = val
        else:
            out[key] = parse(val, profile)
    return out


def parse_proof(text: str, profile: LogicProfile | None = None) -> Proof:
    """Read the proof file format written by :func:`format_proof`."""
    declared = None
    theory_lines: list[str] = []
    raw_steps: list[tuple[int, str, str, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        low = line.lower()
        if low.startswith("profile:"):
            declared = LogicProfile.parse(line.split(":", 1)[1])
            continue
        if low.startswith("theory:"):
            theory_lines.append(line.split(":", 1)[1].strip())
            continue
        parts = [p.strip() for p in line.split("|")]
        if len(parts) != 3:
            raise ProofFormatError(f"line {lineno}: expected 'index | formula | justification'")
        try:
            idx = int(parts[0])
        except ValueError:
            raise ProofFormatError(f"line {lineno}: bad step index {parts[0]!r}") from None
        raw_steps.append((idx, parts[1], parts[2], lineno))
    prof = declared or profile or BASE
    if declared is not None and profile is not None:
        prof = declared.union(profile)
    try:
        theory = Theory(tuple(parse(t, prof) for t in theory_lines), prof)
    except ValueError as exc:
        raise ProofFormatError(f"theory: {exc}") from None
    steps = []
    for idx, ftext, jtext, lineno in raw_steps:
        try:
            formula = parse(ftext, prof)
        except ValueError as exc:
            raise ProofFormatError(f"line {lineno}: {exc}") from None
        m = _JUST.match(jtext)
        if m is None:
            raise ProofFormatError(f"line {lineno}: bad justification {jtext!r}")
        try:
            if m.group(4):
                just = Hypothesis(int(m.group(4)))
            elif m.group(5):
                just = ModusPonens(int(m.group(5)), int(m.group(6)))
            elif m.group(1) == "axiom":
                just = Axiom(m.group(2).replace("Ł", "L"), _parse_bindings(m.group(3), prof))
            else:
                just = LemmaUse(m.group(2), _parse_bindings(m.group(3), prof))
        except ValueError as exc:
            raise ProofFormatError(f"line {lineno}: {exc}") from None
        steps.append(ProofStep(idx, formula, just))
    return Proof(theory, tuple(steps))
