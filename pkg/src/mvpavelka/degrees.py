"""Truth degrees, proof degrees and the completeness/compactness harnesses.

The value of a formula without product nodes is a continuous piecewise
linear function on the unit cube.  :func:`compile_pl` splits the cube at
every truncation (each ``min``/``max`` of the standard operations) into
closed rational polyhedra on which the formula is affine; constrained
minimisation then reduces to exact linear programs over those pieces.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import lp
from .algebra import evaluate, evaluate_grid
from .calculus import (
    BudgetExhausted, SearchBudget, lift_to_one, search_proof,
    synthesize_ground_proof, zero_lower_proof,
)
from .syntax import (
    Bullet, Const, Div, FixK, Formula, Impl, Join, LogicProfile, Meet, Neg,
    Odot, One, Oplus, ProfileError, Theory, Var, Zero, format_rational,
    is_ground, required_profile, subformulas, to_text, variables,
)

__all__ = [
    "Affine", "Region", "RegionSystem", "DegreeBounds", "ProductNodeError",
    "RegionCapError", "compile_pl", "truth_degree_exact", "lipschitz_bound",
    "truth_degree_grid", "truncation_count", "truth_degree", "proof_degree_lower",
    "GapReport", "pavelka_gap", "CompactnessResult", "PreconditionError",
    "compactness_probe",
]


class ProductNodeError(ValueError):
    """The formula leaves the piecewise-linear fragment."""


class RegionCapError(ValueError):
    """Too many truncation nodes for exhaustive region enumeration."""


# ---------------------------------------------------------------------------
# Affine pieces


@dataclass(frozen=True)
class Affine:
    """``coeffs . x + const`` over a fixed variable order."""

    coeffs: tuple[Fraction, ...]
    const: Fraction

    @classmethod
    def constant(cls, n: int, c) -> "Affine":
        return cls((Fraction(0),) * n, Fraction(c))

    @classmethod
    def variable(cls, n: int, i: int) -> "Affine":
        return cls(tuple(Fraction(int(j == i)) for j in range(n)), Fraction(0))

    def __add__(self, other: "Affine") -> "Affine":
        return Affine(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)), self.const + other.const)

    def __sub__(self, other: "Affine") -> "Affine":
        return Affine(tuple(a - b for a, b in zip(self.coeffs, other.coeffs)), self.const - other.const)

    def scale(self, k) -> "Affine":
        k = Fraction(k)
        return Affine(tuple(a * k for a in self.coeffs), self.const * k)

    def shift(self, c) -> "Affine":
        return Affine(self.coeffs, self.const + Fraction(c))

    def at(self, x: Sequence[Fraction]) -> Fraction:
        return sum((a * b for a, b in zip(self.coeffs, x)), self.const)

    def is_constant(self) -> bool:
        return not any(self.coeffs)

    def text(self, names: Sequence[str]) -> str:
        terms = []
        for a, name in zip(self.coeffs, names):
            if a == 0:
                continue
            mag = abs(a)
            body = name if mag == 1 else f"{format_rational(mag)}{name}"
            terms.append(("- " if a < 0 else "+ ") + body)
        if self.const != 0 or not terms:
            terms.append(("- " if self.const < 0 else "+ ") + format_rational(abs(self.const)))
        out = " ".join(terms)
        return out[2:] if out.startswith("+ ") else "-" + out[2:]


# a constraint is (affine, sense) with sense ">=" (affine >= 0) or "==" (affine == 0)
Constraint = tuple[Affine, str]


def _cube(n: int) -> list[Constraint]:
    out = []
    for i in range(n):
        x = Affine.variable(n, i)
        out.append((x, lp.GE))
        out.append((Affine.constant(n, 1) - x, lp.GE))
    return out


def _lp_rows(constraints: Iterable[Constraint]):
    return [(aff.coeffs, sense, -aff.const) for aff, sense in constraints]


def _feasible(constraints: Sequence[Constraint], n: int) -> tuple[Fraction, ...] | None:
    return lp.feasible_point(_lp_rows(constraints), n)


def _full_dimensional(constraints: Sequence[Constraint], n: int) -> bool:
    """Whether the inequality system has an interior point in the cube.

    Maximises a common slack t in ``aff >= t``; only meaningful for
    pure inequality systems.
    """
    if n == 0:
        return all(aff.const >= 0 for aff, _ in constraints)
    rows = []
    for aff, sense in list(constraints) + _cube(n):
        rows.append((aff.coeffs + (Fraction(-1),), lp.GE, -aff.const))
    rows.append(((Fraction(0),) * n + (Fraction(1),), lp.LE, 1))
    res = lp.solve_lp([0] * n + [1], rows, maximize=True)
    return res.status == "optimal" and res.value > 0


@dataclass(frozen=True)
class Region:
    """A closed polyhedron in the cube with the formula's affine value on it."""

    constraints: tuple[Constraint, ...]
    objective: Affine
    labels: tuple[str, ...] = ()

    def contains(self, x: Sequence[Fraction]) -> bool:
        for aff, sense in self.constraints:
            val = aff.at(x)
            if val < 0 or (sense == lp.EQ and val != 0):
                return False
        return all(0 <= xi <= 1 for xi in x)

    def vertices_sample(self, n: int, rng: random.Random, count: int = 8) -> list[tuple[Fraction, ...]]:
        """Extreme points of the region found by random objectives."""
        rows = _lp_rows(list(self.constraints) + _cube(n))
        pts = []
        for _ in range(count):
            c = [Fraction(rng.randint(-5, 5)) for _ in range(n)]
            res = lp.solve_lp(c, rows)
            if res.status == "optimal" and res.x not in pts:
                pts.append(res.x)
        return pts

    def sample_points(self, n: int, rng: random.Random, k: int) -> list[tuple[Fraction, ...]]:
        """Random rational convex combinations of region vertices."""
        verts = self.vertices_sample(n, rng)
        if not verts:
            return []
        out = []
        for _ in range(k):
            w = [Fraction(rng.randint(0, 20)) for _ in verts]
            total = sum(w)
            if total == 0:
                w[0], total = Fraction(1), Fraction(1)
            out.append(tuple(sum(wi * v[j] for wi, v in zip(w, verts)) / total for j in range(n)))
        return out


@dataclass(frozen=True)
class RegionSystem:
    variables: tuple[str, ...]
    regions: tuple[Region, ...]
    formula: Formula | None = None

    def __len__(self):
        return len(self.regions)

    def point(self, v: Mapping[str, Fraction]) -> tuple[Fraction, ...]:
        return tuple(Fraction(v[name]) for name in self.variables)

    def value_at(self, v: Mapping[str, Fraction]) -> Fraction:
        """Objective of the first region containing ``v``."""
        x = self.point(v)
        for r in self.regions:
            if r.contains(x):
                return r.objective.at(x)
        raise ValueError("valuation is not covered by any region")


_TRUNCATING = (Impl, Odot, Oplus, Meet, Join)


def truncation_count(f: Formula) -> int:
    return sum(isinstance(g, _TRUNCATING) for g in subformulas(f))


def compile_pl(f: Formula, names: Sequence[str] | None = None, region_cap: int = 24) -> RegionSystem:
    """Split the unit cube into regions where ``f`` is affine.

    Each truncation node contributes a branch pair; combinations that are
    empty or have empty interior are pruned by exact LP, which still
    leaves the closures covering the cube.
    """
    for g in subformulas(f):
        if isinstance(g, Bullet):
            raise ProductNodeError("product nodes are outside the piecewise-linear fragment")
    count = truncation_count(f)
    if count > region_cap:
        raise RegionCapError(f"{count} truncation nodes exceed the cap of {region_cap}")
    names = tuple(sorted(variables(f))) if names is None else tuple(names)
    n = len(names)
    index = {name: i for i, name in enumerate(names)}

    def ok(cons):
        return _full_dimensional(cons, n)

    def rec(g, path: str) -> list[tuple[tuple[Constraint, ...], Affine, tuple[str, ...]]]:
        if isinstance(g, Var):
            return [((), Affine.variable(n, index[g.name]), ())]
        if isinstance(g, Zero):
            return [((), Affine.constant(n, 0), ())]
        if isinstance(g, One):
            return [((), Affine.constant(n, 1), ())]
        if isinstance(g, Const):
            return [((), Affine.constant(n, g.value), ())]
        if isinstance(g, FixK):
            return [((), Affine.constant(n, Fraction(1, 2)), ())]
        if isinstance(g, Neg):
            return [(c, Affine.constant(n, 1) - a, lab) for c, a, lab in rec(g.arg, path + "0")]
        if isinstance(g, Div):
            return [(c, a.scale(Fraction(1, g.n)), lab) for c, a, lab in rec(g.arg, path + "0")]
        left = rec(g.lhs, path + "0")
        right = rec(g.rhs, path + "1")
        out = []
        for (c1, a, l1), (c2, b, l2) in itertools.product(left, right):
            base = c1 + c2
            if c1 and c2 and not ok(base):
                continue
            branches = _branches(g, a, b, n)
            # a constant side condition either holds everywhere or nowhere
            trivial = [br for br in branches if br[1].is_constant() and br[1].const >= 0]
            if trivial:
                label, _, value = trivial[0]
                out.append((base, value, l1 + l2 + (f"{path or 'root'}:{label}",)))
                continue
            for label, extra, value in branches:
                if extra.is_constant():
                    continue
                cons = base + ((extra, lp.GE),)
                if ok(cons):
                    out.append((cons, value, l1 + l2 + (f"{path or 'root'}:{label}",)))
        return out

    pieces = rec(f, "")
    regions = tuple(Region(c, a, lab) for c, a, lab in pieces)
    return RegionSystem(names, regions, f)


def _branches(g, a: Affine, b: Affine, n: int):
    """(label, constraint >= 0, value) for each side of a truncation."""
    one = Affine.constant(n, 1)
    zero = Affine.constant(n, 0)
    if isinstance(g, Impl):
        lin = one - a + b
        return [("saturated-high", b - a, one), ("linear", a - b, lin)]
    if isinstance(g, Odot):
        lin = a + b - one
        return [("saturated-low", one - a - b, zero), ("linear", lin, lin)]
    if isinstance(g, Oplus):
        lin = a + b
        return [("saturated-high", lin - one, one), ("linear", one - lin, lin)]
    if isinstance(g, Meet):
        return [("left", b - a, a), ("right", a - b, b)]
    if isinstance(g, Join):
        return [("left", a - b, a), ("right", b - a, b)]
    raise TypeError(type(g).__name__)


# ---------------------------------------------------------------------------
# Exact truth degree


@dataclass
class DegreeBounds:
    """Certified interval for a truth or proof degree."""

    lo: Fraction
    hi: Fraction
    exact: bool = False
    witness: dict[str, Fraction] | None = None
    vacuous: bool = False
    method: str = "exact"
    note: str = ""
    proof: object | None = None

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"lower bound {self.lo} exceeds upper bound {self.hi}")
        if self.exact and self.lo != self.hi:
            raise ValueError("exact bounds must coincide")

    @property
    def value(self) -> Fraction:
        if not self.exact:
            raise ValueError("bounds are not exact")
        return self.lo

    def lines(self) -> list[str]:
        wit = "none"
        if self.witness is not None:
            wit = ",".join(f"{k}={format_rational(v)}" for k, v in sorted(self.witness.items())) or "{}"
        return [
            self.method,
            f"lo {format_rational(self.lo)}",
            f"hi {format_rational(self.hi)}",
            f"witness {wit}",
            f"vacuous: {'yes' if self.vacuous else 'no'}",
        ]

    def summary(self) -> str:
        text = f"{self.method} lo {format_rational(self.lo)} hi {format_rational(self.hi)}"
        if self.witness is not None:
            text += " witness " + (",".join(f"{k}={format_rational(v)}"
                                            for k, v in sorted(self.witness.items())) or "{}")
        if self.vacuous:
            text += " vacuous"
        return text


def _generators(S) -> tuple[Formula, ...]:
    if S is None:
        return ()
    if isinstance(S, Theory):
        return S.generators
    return tuple(S)


def truth_degree_exact(phi: Formula, S: Theory | Sequence[Formula] | None = None,
                       region_cap: int = 24) -> DegreeBounds:
    """Exact infimum of ``phi`` over valuations making every generator 1.

    Returns 1 with ``vacuous`` set when no such valuation exists.
    """
    gens = _generators(S)
    names = tuple(sorted(variables(phi).union(*(variables(t) for t in gens))))
    n = len(names)
    phi_sys = compile_pl(phi, names, region_cap)
    forced: list[list[tuple[Constraint, ...]]] = []
    for tau in gens:
        sys_t = compile_pl(tau, names, region_cap)
        choices = []
        for r in sys_t.regions:
            cons = r.constraints + ((r.objective - Affine.constant(n, 1), lp.EQ),)
            if _feasible(list(cons) + _cube(n), n) is not None:
                choices.append(cons)
        if not choices:
            return _vacuous(names)
        forced.append(choices)

    best: tuple[Fraction, tuple[Fraction, ...]] | None = None

    def descend(depth: int, acc: tuple[Constraint, ...]):
        nonlocal best
        if depth < len(forced):
            for cons in forced[depth]:
                merged = acc + cons
                if _feasible(list(merged) + _cube(n), n) is not None:
                    descend(depth + 1, merged)
            return
        for region in phi_sys.regions:
            rows = _lp_rows(list(acc + region.constraints) + _cube(n))
            res = lp.solve_lp(region.objective.coeffs, rows)
            if res.status != "optimal":
                continue
            val = res.value + region.objective.const
            if best is None or val < best[0]:
                best = (val, res.x)

    descend(0, ())
    if best is None:
        return _vacuous(names)
    val, x = best
    return DegreeBounds(val, val, exact=True, witness=dict(zip(names, x)), method="exact")


def _vacuous(names) -> DegreeBounds:
    return DegreeBounds(Fraction(1), Fraction(1), exact=True, witness=None, vacuous=True,
                        method="exact", note="no valuation satisfies the theory")


# ---------------------------------------------------------------------------
# Lipschitz certificates and grid bounds


def lipschitz_bound(f: Formula) -> dict[str, Fraction]:
    """Per-variable constants L with |f(v) - f(w)| <= sum L_x |v_x - w_x|."""

    def rec(g) -> dict[str, Fraction]:
        if isinstance(g, Var):
            return {g.name: Fraction(1)}
        if isinstance(g, (Zero, One, Const, FixK)):
            return {}
        if isinstance(g, Neg):
            return rec(g.arg)
        if isinstance(g, Div):
            return {k: v / g.n for k, v in rec(g.arg).items()}
        out = dict(rec(g.lhs))
        for k, v in rec(g.rhs).items():
            out[k] = out.get(k, Fraction(0)) + v
        return out

    consts = rec(f)
    return {name: consts.get(name, Fraction(0)) for name in sorted(variables(f))}


def truth_degree_grid(phi: Formula, S: Theory | Sequence[Formula] | None = None,
                      eps=Fraction(1, 100), delta=Fraction(1, 100),
                      max_points: int = 4_000_000) -> DegreeBounds:
    """Certified bounds on the truth degree by exhaustive grid evaluation.

    ``lo`` bounds the infimum of ``phi`` over the relaxed set
    {v : every generator >= 1 - delta} from below, with slack at most
    ``eps``.  ``hi`` is the least value of ``phi`` at a grid point where
    every generator is exactly 1 (or 1 if there is none).
    """
    eps, delta = Fraction(eps), Fraction(delta)
    if eps <= 0 or delta < 0:
        raise ValueError("eps must be positive and delta non-negative")
    gens = _generators(S)
    names = tuple(sorted(variables(phi).union(*(variables(t) for t in gens))))
    lip_phi = sum(lipschitz_bound(phi).values(), Fraction(0))
    lip_gen = max((sum(lipschitz_bound(t).values(), Fraction(0)) for t in gens), default=Fraction(0))
    # the nearest grid point is within h/2 of any valuation in each coordinate;
    # both the objective and the widened constraints pay for that distance
    pitch = max(math.ceil((lip_phi + lip_gen) / (2 * eps)), 1)
    if (pitch + 1) ** len(names) > max_points:
        raise ValueError(f"grid of pitch 1/{pitch} over {len(names)} variables is too large")
    half = Fraction(1, 2 * pitch)
    grids = np.meshgrid(*[np.arange(pitch + 1, dtype=np.int64)] * len(names), indexing="ij") if names else []
    axes = dict(zip(names, grids))

    def values(f):
        num, d = evaluate_grid(f, axes, pitch)
        return np.asarray(num), d

    phi_num, phi_d = values(phi)
    relaxed = np.ones(phi_num.shape, dtype=bool)
    exact_ok = np.ones(phi_num.shape, dtype=bool)
    for tau in gens:
        num, d = values(tau)
        lip_tau = sum(lipschitz_bound(tau).values(), Fraction(0))
        thr = 1 - delta - lip_tau * half
        if d * thr.denominator >= 2 ** 62:
            num = num.astype(object)
        exact_ok &= num == d
        relaxed &= num * thr.denominator >= thr.numerator * d
    note = (f"lo certifies the relaxation generators >= 1-{format_rational(delta)}; "
            f"grid pitch 1/{pitch}")
    if not relaxed.any():
        return DegreeBounds(Fraction(1), Fraction(1), exact=False, vacuous=True, method="grid", note=note)
    lo_num = phi_num[relaxed].min()
    lo = max(Fraction(int(lo_num), phi_d) - lip_phi * half, Fraction(0))
    hi, witness = Fraction(1), None
    if exact_ok.any():
        masked = np.where(exact_ok, phi_num, phi_d + 1)
        flat = int(np.argmin(masked))
        hi = Fraction(int(masked.flat[flat]), phi_d)
        idx = np.unravel_index(flat, phi_num.shape) if names else ()
        witness = {name: Fraction(int(i), pitch) for name, i in zip(names, idx)}
    return DegreeBounds(lo, hi, exact=False, witness=witness, method="grid", note=note)


def truth_degree(phi: Formula, S: Theory | Sequence[Formula] | None = None, region_cap: int = 24,
                 eps=Fraction(1, 100), delta=Fraction(1, 100)) -> DegreeBounds:
    """Exact degree on the piecewise-linear fragment, grid bounds otherwise."""
    gens = _generators(S)
    if any(isinstance(g, Bullet) for f in (phi, *gens) for g in subformulas(f)):
        return truth_degree_grid(phi, gens, eps, delta)
    return truth_degree_exact(phi, gens, region_cap)


# ---------------------------------------------------------------------------
# Proof degrees and the completeness harness


def _as_theory(S, phi: Formula) -> Theory:
    if isinstance(S, Theory):
        if not S.profile.constants_enabled:
            raise ProfileError("proof degrees need truth constants; enable the constants profile")
        return S
    gens = _generators(S)
    prof = LogicProfile(constants_enabled=True)
    for f in (phi, *gens):
        prof = prof.union(required_profile(f))
    return Theory(gens, prof)


def _constants(fs: Iterable[Formula]) -> set[Fraction]:
    return {g.value for f in fs for g in subformulas(f) if isinstance(g, Const)}


def proof_degree_lower(phi: Formula, S: Theory | Sequence[Formula] | None = None,
                       budget: SearchBudget = SearchBudget()) -> DegreeBounds:
    """Largest r with a found, checkable proof of [r] -> phi from S.

    Variable-free formulas get the synthesized proof at their own value.
    Otherwise candidates are tried from the top: 1 (a proof of phi
    itself), then the constants occurring in phi and S.  The proof of [0] -> phi always exists, so the result
    is total.  ``hi`` is always 1: only the lower bound is certified.
    """
    theory = _as_theory(S, phi)
    best_r, best_proof = Fraction(0), zero_lower_proof(phi, theory)
    notes = []
    if is_ground(phi):
        # no proof can certify more than the value itself, so this is optimal
        best_r = evaluate(phi, {})
        proof = synthesize_ground_proof(phi, best_r, theory.profile)
        return DegreeBounds(best_r, Fraction(1), exact=False, method="proof",
                            note="ground synthesis", proof=proof)
    candidates = sorted((_constants((phi, *theory.generators)) | {Fraction(1)}) - {Fraction(0)}, reverse=True)
    for r in candidates:
        if r <= best_r:
            break
        target = phi if r == 1 else Impl(Const(r), phi)
        try:
            found = search_proof(target, theory, budget)
        except BudgetExhausted:
            notes.append(f"budget exhausted at {format_rational(r)}")
            continue
        if found is not None:
            best_r, best_proof = r, (lift_to_one(found) if r == 1 else found)
            notes.append("search")
            break
    return DegreeBounds(best_r, Fraction(1), exact=False, method="proof",
                        note="; ".join(notes), proof=best_proof)


@dataclass
class GapReport:
    proof_lower: DegreeBounds
    truth: DegreeBounds

    @property
    def sound(self) -> bool:
        return self.proof_lower.lo <= self.truth.hi

    @property
    def equal(self) -> bool:
        return self.truth.exact and self.proof_lower.lo == self.truth.lo

    @property
    def gap(self) -> Fraction:
        return self.truth.lo - self.proof_lower.lo if self.truth.exact else self.truth.hi - self.proof_lower.lo

    def lines(self) -> list[str]:
        truth = format_rational(self.truth.lo)
        if not self.truth.exact:
            truth = f"[{format_rational(self.truth.lo)}, {format_rational(self.truth.hi)}]"
        return [
            f"proof_lower {format_rational(self.proof_lower.lo)} (proof file emitted)",
            f"truth {truth}",
            f"gap {format_rational(max(self.gap, Fraction(0)))}",
            f"sound: {'yes' if self.sound else 'no'}",
            f"equal: {'yes' if self.equal else 'no'}",
        ]


def pavelka_gap(phi: Formula, S: Theory | Sequence[Formula] | None = None,
                budget: SearchBudget = SearchBudget(), region_cap: int = 24,
                eps=Fraction(1, 100), delta=Fraction(1, 100)) -> GapReport:
    """Compare the proof-degree lower bound with the truth degree."""
    lower = proof_degree_lower(phi, S, budget)
    truth = truth_degree(phi, _generators(S), region_cap, eps, delta)
    return GapReport(lower, truth)


# ---------------------------------------------------------------------------
# Compactness


class PreconditionError(ValueError):
    pass


@dataclass
class CompactnessResult:
    indices: tuple[int, ...]  # 0-based positions in the theory
    subset: tuple[Formula, ...]
    degree: Fraction
    checked: int

    def lines(self) -> list[str]:
        gens = ", ".join(to_text(f) for f in self.subset)
        return [f"subset {{{gens}}}", f"degree {format_rational(self.degree)}", f"checked {self.checked}"]


def compactness_probe(phi: Formula, S: Theory | Sequence[Formula], r, max_generators: int = 12,
                      region_cap: int = 24) -> CompactnessResult:
    """Smallest-first search for an inclusion-minimal S0 with r <= degree(phi, S0).

    Subsets are tried by size and then lexicographically, so the first hit
    has no proper subset that works.
    """
    gens = _generators(S)
    r = Fraction(r)
    if len(gens) > max_generators:
        raise PreconditionError(f"{len(gens)} generators exceed the bound of {max_generators}")
    full = truth_degree_exact(phi, gens, region_cap).lo
    if r > full:
        raise PreconditionError(f"r = {format_rational(r)} exceeds the truth degree {format_rational(full)}")
    checked = 0
    for k in range(len(gens) + 1):
        for idx in itertools.combinations(range(len(gens)), k):
            checked += 1
            sub = tuple(gens[i] for i in idx)
            d = truth_degree_exact(phi, sub, region_cap).lo
            if d >= r:
                return CompactnessResult(idx, sub, d, checked)
    raise AssertionError("the full theory always qualifies")
