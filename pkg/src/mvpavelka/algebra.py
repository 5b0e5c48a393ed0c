"""Exact semantics on [0, 1], finite MV-chains and finite algebras.

All truth values are :class:`fractions.Fraction`; nothing here touches
floating point.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .syntax import (
    Bullet, Const, Div, FixK, Formula, Impl, Join, LogicProfile, Meet, Neg,
    Odot, One, Oplus, ProfileError, Var, Zero, check_profile, expand_multiple,
    format_rational, parse, subformulas, variables,
)

HALF = Fraction(1, 2)
_ONE = Fraction(1)
_ZERO = Fraction(0)


class MissingVariableError(KeyError):
    pass


# ---------------------------------------------------------------------------
# Standard operations on [0, 1]


def imp(x, y):
    return min(_ONE, 1 - x + y)


def odot(x, y):
    return max(_ZERO, x + y - 1)


def oplus(x, y):
    return min(_ONE, x + y)


def negation(x):
    return 1 - x


def evaluate(f: Formula, v: Mapping[str, Fraction], profile: LogicProfile | None = None) -> Fraction:
    """Value of ``f`` in the standard algebra under valuation ``v``.

    Product is ordinary multiplication, ``dN`` divides by N and ``K`` is 1/2.
    When ``profile`` is given the formula is first checked against it.
    """
    if profile is not None:
        check_profile(f, profile)
    return _eval(f, v)


def _eval(f: Formula, v) -> Fraction:
    if isinstance(f, Var):
        try:
            return Fraction(v[f.name])
        except KeyError:
            raise MissingVariableError(f"valuation does not cover variable {f.name!r}") from None
    if isinstance(f, Impl):
        return imp(_eval(f.lhs, v), _eval(f.rhs, v))
    if isinstance(f, Zero):
        return _ZERO
    if isinstance(f, Const):
        return f.value
    if isinstance(f, Neg):
        return 1 - _eval(f.arg, v)
    if isinstance(f, Odot):
        return odot(_eval(f.lhs, v), _eval(f.rhs, v))
    if isinstance(f, Oplus):
        return oplus(_eval(f.lhs, v), _eval(f.rhs, v))
    if isinstance(f, Meet):
        return min(_eval(f.lhs, v), _eval(f.rhs, v))
    if isinstance(f, Join):
        return max(_eval(f.lhs, v), _eval(f.rhs, v))
    if isinstance(f, Bullet):
        return _eval(f.lhs, v) * _eval(f.rhs, v)
    if isinstance(f, Div):
        return _eval(f.arg, v) / f.n
    if isinstance(f, One):
        return _ONE
    if isinstance(f, FixK):
        return HALF
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# Vectorised exact evaluation on product grids


def evaluate_grid(f: Formula, axes: Mapping[str, np.ndarray], denominator: int) -> tuple[np.ndarray, int]:
    """Evaluate ``f`` at every point of a grid with pitch ``1/denominator``.

    ``axes`` maps each variable to an integer array of numerators (already
    broadcast to the grid shape).  Returns ``(numerators, D)`` with the
    exact values ``numerators / D``.  Arrays switch to Python integers
    when the common denominators get too large for int64.
    """

    def lift(arr, d, new_d):
        k = new_d // d
        return arr * k if k != 1 else arr

    def rec(g):
        if isinstance(g, Var):
            if g.name not in axes:
                raise MissingVariableError(f"grid does not cover variable {g.name!r}")
            return axes[g.name], denominator
        if isinstance(g, (Zero, One, Const, FixK)):
            val = {Zero: _ZERO, One: _ONE, FixK: HALF}.get(type(g))
            if val is None:
                val = g.value
            return np.asarray(val.numerator), val.denominator
        if isinstance(g, Neg):
            a, d = rec(g.arg)
            return d - a, d
        if isinstance(g, Div):
            a, d = rec(g.arg)
            return _widen(a, d * g.n), d * g.n
        a, da = rec(g.lhs)
        b, db = rec(g.rhs)
        if isinstance(g, Bullet):
            d = da * db
            a, b = _widen(a, d), _widen(b, d)
            return a * b, d
        d = lcm(da, db)
        a, b = _widen(lift(a, da, d), 2 * d), _widen(lift(b, db, d), 2 * d)
        if isinstance(g, Impl):
            return np.minimum(d, d - a + b), d
        if isinstance(g, Odot):
            return np.maximum(0, a + b - d), d
        if isinstance(g, Oplus):
            return np.minimum(d, a + b), d
        if isinstance(g, Meet):
            return np.minimum(a, b), d
        if isinstance(g, Join):
            return np.maximum(a, b), d
        raise TypeError(f"not a formula: {g!r}")

    num, d = rec(f)
    shape = np.broadcast_shapes(*(np.shape(a) for a in axes.values())) if axes else ()
    return np.broadcast_to(num, shape), d


_INT64_SAFE = 2 ** 61


def _widen(arr, bound: int):
    arr = np.asarray(arr)
    if bound * bound >= _INT64_SAFE and arr.dtype != object:
        return arr.astype(object)
    return arr


# ---------------------------------------------------------------------------
# Finite chains and samplers


@dataclass(frozen=True)
class FiniteChain:
    """The MV-chain {0, 1/n, ..., 1} with n + 1 elements."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("chain denominator must be positive")

    @classmethod
    def with_elements(cls, m: int) -> "FiniteChain":
        """The m-element chain, written Ł_m."""
        return cls(m - 1)

    @property
    def elements(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(i, self.n) for i in range(self.n + 1))

    def __contains__(self, x) -> bool:
        x = Fraction(x)
        return 0 <= x <= 1 and (x * self.n).denominator == 1

    def __len__(self):
        return self.n + 1

    def valuations(self, names: Sequence[str]):
        for combo in itertools.product(self.elements, repeat=len(names)):
            yield dict(zip(names, combo))


def eval_chain(f: Formula, v: Mapping[str, Fraction], chain: FiniteChain) -> Fraction:
    """Evaluate a base-profile formula on a finite chain.

    Product, division and the fixpoint constant are rejected: they do not
    close on chains in general.  Truth constants must lie on the grid.
    """
    for g in subformulas(f):
        if isinstance(g, (Bullet, Div, FixK)):
            raise ProfileError(f"{type(g).__name__} is not interpreted on finite chains")
        if isinstance(g, Const) and g.value not in chain:
            raise ProfileError(f"constant {format_rational(g.value)} is not on the chain")
    for name in variables(f):
        if name not in v:
            raise MissingVariableError(f"valuation does not cover variable {name!r}")
        if Fraction(v[name]) not in chain:
            raise ValueError(f"value {v[name]} of {name!r} is not on the chain")
    return _eval(f, v)


@dataclass
class RationalSampler:
    """Random rationals in [0, 1]: denominator uniform in 1..max_den,
    numerator uniform in 0..denominator."""

    trials: int = 10_000
    seed: int = 0
    max_den: int = 1000

    def rng(self) -> random.Random:
        return random.Random(self.seed)

    def valuations(self, names: Sequence[str]):
        rng = self.rng()
        for _ in range(self.trials):
            yield {name: random_rational(rng, self.max_den) for name in names}


def random_rational(rng: random.Random, max_den: int = 1000) -> Fraction:
    d = rng.randint(1, max_den)
    return Fraction(rng.randint(0, d), d)


# ---------------------------------------------------------------------------
# Identity checking


@dataclass
class IdentityReport:
    lhs: Formula
    rhs: Formula
    checked: int = 0
    counterexamples: list[tuple[dict, Fraction, Fraction]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.counterexamples

    def lines(self) -> list[str]:
        if self.passed:
            return ["PASS"]
        out = []
        for v, a, b in self.counterexamples:
            assignment = ",".join(f"{k}={format_rational(x)}" for k, x in sorted(v.items()))
            out.append(f"FAIL {assignment} {format_rational(a)} {format_rational(b)}")
        return out


def check_identity(lhs: Formula, rhs: Formula, model: FiniteChain | RationalSampler,
                   max_counterexamples: int | None = None) -> IdentityReport:
    """Search for valuations where ``lhs`` and ``rhs`` differ.

    Exhaustive on a :class:`FiniteChain`, sampled with a
    :class:`RationalSampler`.
    """
    names = sorted(variables(lhs) | variables(rhs))
    report = IdentityReport(lhs, rhs)
    on_chain = isinstance(model, FiniteChain)
    for v in model.valuations(names):
        if on_chain:
            a, b = eval_chain(lhs, v, model), eval_chain(rhs, v, model)
        else:
            a, b = _eval(lhs, v), _eval(rhs, v)
        report.checked += 1
        if a != b:
            report.counterexamples.append((v, a, b))
            if max_counterexamples is not None and len(report.counterexamples) >= max_counterexamples:
                break
    return report


def _eqs(*pairs: tuple[str, str]) -> list[tuple[Formula, Formula]]:
    return [(parse(a), parse(b)) for a, b in pairs]


# The eight MV-algebra axioms; 1 and 2 are spelled out as their component
# monoid and bounded-lattice identities.
MV_EQUATIONS: dict[str, list[tuple[Formula, Formula]]] = {
    "1": _eqs(("x & y", "y & x"), ("(x & y) & z", "x & (y & z)"), ("x & 1", "x")),
    "2": _eqs(
        ("x /\\ y", "y /\\ x"), ("x \\/ y", "y \\/ x"),
        ("(x /\\ y) /\\ z", "x /\\ (y /\\ z)"), ("(x \\/ y) \\/ z", "x \\/ (y \\/ z)"),
        ("x /\\ (x \\/ y)", "x"), ("x \\/ (x /\\ y)", "x"),
        ("x /\\ 0", "0"), ("x \\/ 1", "1"),
    ),
    "3": _eqs(("(x & y) -> z", "x -> (y -> z)")),
    "4": _eqs(("((x -> y) & x) /\\ y", "(x -> y) & x")),
    "5": _eqs(("(x /\\ y) -> y", "1")),
    "6": _eqs(("x & (x -> y)", "x /\\ y")),
    "7": _eqs(("(x -> y) \\/ (y -> x)", "1")),
    "8": _eqs(("(x -> 0) -> 0", "x")),
}

PMV_EQUATION = (parse("x * (y & !z)"), parse("(x * y) & !(x * z)"))
PMV_MONOID = _eqs(("x * y", "y * x"), ("(x * y) * z", "x * (y * z)"), ("x * 1", "x"))
FIXPOINT_EQUATION = (parse("!K"), parse("K"))


def dmv_equations(n: int) -> list[tuple[Formula, Formula]]:
    """``n dN(x) = x`` and ``dN(x) & (n-1) dN(x) = 0``."""
    d = Div(n, Var("x"))
    return [
        (expand_multiple(n, d), Var("x")),
        (Odot(d, expand_multiple(n - 1, d)), Zero()),
    ]


# ---------------------------------------------------------------------------
# Finite algebras and congruences


Partition = tuple[int, ...]  # block label of each element = smallest member


@dataclass
class FiniteAlgebra:
    """Operation tables over the carrier {0, ..., m-1}.

    ``ops`` maps a connective symbol to ``(arity, table)``: an element for
    arity 0, a list for arity 1 and a nested list for arity 2.
    """

    size: int
    ops: dict[str, tuple[int, object]]
    labels: list[str] | None = None

    def __post_init__(self):
        m = self.size
        for name, (arity, table) in self.ops.items():
            if arity == 0:
                cells = [table]
            elif arity == 1:
                cells = list(table)
                if len(cells) != m:
                    raise ValueError(f"table for {name!r} has {len(cells)} entries, expected {m}")
            elif arity == 2:
                if len(table) != m or any(len(row) != m for row in table):
                    raise ValueError(f"table for {name!r} is not {m}x{m}")
                cells = [c for row in table for c in row]
            else:
                raise ValueError(f"unsupported arity {arity} for {name!r}")
            if any(not 0 <= c < m for c in cells):
                raise ValueError(f"table for {name!r} leaves the carrier")
        if "0" in self.ops and "->" in self.ops and m >= 2:
            z = self.ops["0"][1]
            one = self.ops["->"][1][z][z]
            if z == one:
                raise ValueError("0 and 1 coincide in a non-trivial algebra")

    @classmethod
    def from_values(cls, values: Sequence, ops: Mapping[str, tuple[int, Callable]]) -> "FiniteAlgebra":
        """Tabulate operations given as Python callables on ``values``."""
        index = {v: i for i, v in enumerate(values)}
        tables = {}
        for name, (arity, fn) in ops.items():
            if arity == 0:
                tables[name] = (0, index[fn()])
            elif arity == 1:
                tables[name] = (1, [index[fn(a)] for a in values])
            else:
                tables[name] = (2, [[index[fn(a, b)] for b in values] for a in values])
        return cls(len(values), tables, [str(v) for v in values])

    @classmethod
    def chain(cls, m: int) -> "FiniteAlgebra":
        """The m-element MV-chain Ł_m in signature {->, 0}."""
        values = FiniteChain.with_elements(m).elements if m > 1 else (Fraction(0),)
        if m == 1:
            return cls(1, {"->": (2, [[0]]), "0": (0, 0)}, ["0"])
        return cls.from_values(values, {"->": (2, imp), "0": (0, lambda: _ZERO)})

    def product(self, other: "FiniteAlgebra") -> "FiniteAlgebra":
        """Direct product over the operations both factors share."""
        pairs = list(itertools.product(range(self.size), range(other.size)))
        index = {p: i for i, p in enumerate(pairs)}
        ops = {}
        for name in self.ops.keys() & other.ops.keys():
            ar, ta = self.ops[name]
            ar2, tb = other.ops[name]
            if ar != ar2:
                raise ValueError(f"arity mismatch for {name!r}")
            if ar == 0:
                ops[name] = (0, index[(ta, tb)])
            elif ar == 1:
                ops[name] = (1, [index[(ta[a], tb[b])] for a, b in pairs])
            else:
                ops[name] = (2, [[index[(ta[a1][a2], tb[b1][b2])] for a2, b2 in pairs] for a1, b1 in pairs])
        labels = None
        if self.labels and other.labels:
            labels = [f"({self.labels[a]},{other.labels[b]})" for a, b in pairs]
        return FiniteAlgebra(len(pairs), dict(sorted(ops.items())), labels)

    def expand(self, name: str, arity: int, table) -> "FiniteAlgebra":
        ops = dict(self.ops)
        ops[name] = (arity, table)
        return FiniteAlgebra(self.size, ops, self.labels)

    def signature(self) -> list[str]:
        return sorted(self.ops)


def parse_algebra(text: str) -> FiniteAlgebra:
    """Read the algebra file format.

    ::

        carrier: 3
        op -> 2
        0 1 2
        ...
        op 0 0
        0
    """
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or not lines[0].startswith("carrier:"):
        raise ValueError("algebra file must start with 'carrier: m'")
    m = int(lines[0].split(":", 1)[1])
    ops: dict[str, tuple[int, object]] = {}
    i = 1
    while i < len(lines):
        head = lines[i].split()
        if len(head) != 3 or head[0] != "op":
            raise ValueError(f"expected 'op <name> <arity>', got {lines[i]!r}")
        name, arity = head[1], int(head[2])
        rows_needed = m if arity == 2 else 1
        rows = [[int(tok) for tok in ln.split()] for ln in lines[i + 1:i + 1 + rows_needed]]
        if len(rows) != rows_needed:
            raise ValueError(f"table for {name!r} is truncated")
        if arity == 0:
            if len(rows[0]) != 1:
                raise ValueError(f"constant {name!r} needs exactly one element")
            ops[name] = (0, rows[0][0])
        elif arity == 1:
            ops[name] = (1, rows[0])
        else:
            ops[name] = (2, rows)
        i += 1 + rows_needed
    return FiniteAlgebra(m, ops)


def format_algebra(a: FiniteAlgebra) -> str:
    out = [f"carrier: {a.size}"]
    for name in a.signature():
        arity, table = a.ops[name]
        out.append(f"op {name} {arity}")
        if arity == 0:
            out.append(str(table))
        elif arity == 1:
            out.append(" ".join(map(str, table)))
        else:
            out.extend(" ".join(map(str, row)) for row in table)
    return "\n".join(out) + "\n"


class CongruenceBoundError(ValueError):
    pass


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if ra < rb:
            ra, rb = rb, ra
        self.parent[ra] = rb
        return True

    def labels(self) -> Partition:
        return tuple(self.find(x) for x in range(len(self.parent)))


def _unary_translations(a: FiniteAlgebra, names: Iterable[str]) -> list[list[int]]:
    """Basic translations x -> f(c1, .., x, .., ck) of the listed operations."""
    maps = []
    for name in names:
        arity, table = a.ops[name]
        if arity == 1:
            maps.append(list(table))
        elif arity == 2:
            for c in range(a.size):
                maps.append([table[x][c] for x in range(a.size)])
                maps.append([table[c][x] for x in range(a.size)])
    unique = sorted({tuple(m) for m in maps})
    return [list(m) for m in unique]


def congruence_closure(a: FiniteAlgebra, pairs: Iterable[tuple[int, int]],
                       names: Sequence[str], translations=None) -> Partition:
    """Smallest congruence (for the operations ``names``) containing ``pairs``."""
    if translations is None:
        translations = _unary_translations(a, names)
    uf = _UnionFind(a.size)
    queue = [p for p in pairs if uf.union(*p)]
    while queue:
        x, y = queue.pop()
        for t in translations:
            if uf.union(t[x], t[y]):
                queue.append((t[x], t[y]))
    return _canonical(uf.labels())


def _canonical(labels: Sequence[int]) -> Partition:
    first: dict[int, int] = {}
    return tuple(first.setdefault(lab, i) for i, lab in enumerate(labels))


def join_partitions(p: Partition, q: Partition) -> Partition:
    uf = _UnionFind(len(p))
    for i in range(len(p)):
        uf.union(i, p[i])
        uf.union(i, q[i])
    return _canonical(uf.labels())


def meet_partitions(p: Partition, q: Partition) -> Partition:
    first: dict[tuple[int, int], int] = {}
    return tuple(first.setdefault(pair, i) for i, pair in enumerate(zip(p, q)))


def partition_blocks(p: Partition) -> list[list[int]]:
    blocks: dict[int, list[int]] = {}
    for i, lab in enumerate(p):
        blocks.setdefault(lab, []).append(i)
    return [blocks[k] for k in sorted(blocks)]


def is_compatible(a: FiniteAlgebra, p: Partition, names: Sequence[str]) -> bool:
    """Whether partition ``p`` is respected by every operation in ``names``."""
    m = a.size
    for name in names:
        arity, table = a.ops[name]
        if arity == 1:
            if any(p[x] == p[y] and p[table[x]] != p[table[y]] for x in range(m) for y in range(m)):
                return False
        elif arity == 2:
            for x1, y1 in itertools.product(range(m), repeat=2):
                if p[x1] != p[y1]:
                    continue
                for x2, y2 in itertools.product(range(m), repeat=2):
                    if p[x2] == p[y2] and p[table[x1][x2]] != p[table[y1][y2]]:
                        return False
    return True


@dataclass
class CongruenceSet:
    carrier_size: int
    signature: tuple[str, ...]
    partitions: list[Partition]

    def __len__(self):
        return len(self.partitions)

    def __contains__(self, p) -> bool:
        return tuple(p) in set(self.partitions)

    @property
    def identity(self) -> Partition:
        return tuple(range(self.carrier_size))

    @property
    def total(self) -> Partition:
        return (0,) * self.carrier_size

    def lines(self) -> list[str]:
        out = [f"carrier {self.carrier_size}", f"signature {' '.join(self.signature)}",
               f"congruences {len(self.partitions)}"]
        for p in self.partitions:
            blocks = partition_blocks(p)
            out.append("partition " + " | ".join(" ".join(map(str, b)) for b in blocks))
        return out


def enumerate_congruences(a: FiniteAlgebra, signature: Sequence[str] | None = None,
                          max_size: int = 40) -> CongruenceSet:
    """All congruences of ``a`` for the operations in ``signature``.

    Principal congruences Cg(x, y) are generated by closing under the basic
    translations of each operation; every congruence is a join of
    principal ones, so closing that family under joins is exhaustive.
    """
    if a.size > max_size:
        raise CongruenceBoundError(f"carrier size {a.size} exceeds bound {max_size}")
    names = tuple(sorted(signature if signature is not None else a.ops))
    missing = [n for n in names if n not in a.ops]
    if missing:
        raise ValueError(f"operations {missing} are not defined on the algebra")
    identity = tuple(range(a.size))
    if a.size <= 1:
        return CongruenceSet(a.size, names, [identity])
    translations = _unary_translations(a, names)
    principal = {congruence_closure(a, [(x, y)], names, translations)
                 for x, y in itertools.combinations(range(a.size), 2)}
    found = {identity} | principal
    frontier = list(principal)
    while frontier:
        new = []
        for p in frontier:
            for q in principal:
                r = join_partitions(p, q)
                if r not in found:
                    found.add(r)
                    new.append(r)
        frontier = new
    return CongruenceSet(a.size, names, sorted(found, key=lambda p: (-len(set(p)), p)))


def check_compatible_expansion(a: FiniteAlgebra, reduct: Sequence[str] = ("->", "0"),
                               expanded: Sequence[str] | None = None, max_size: int = 40) -> bool:
    """True iff the congruences of the reduct and of the expansion coincide."""
    base = enumerate_congruences(a, reduct, max_size)
    full = enumerate_congruences(a, expanded if expanded is not None else a.signature(), max_size)
    return base.partitions == full.partitions


def mv_chain_algebra(m: int, extra: Mapping[str, tuple[int, Callable]] | None = None) -> FiniteAlgebra:
    """Ł_m with the full derived MV signature plus optional extra operations."""
    values = FiniteChain.with_elements(m).elements
    ops = {
        "->": (2, imp), "0": (0, lambda: _ZERO), "1": (0, lambda: _ONE),
        "!": (1, negation), "&": (2, odot), "+": (2, oplus),
        "/\\": (2, min), "\\/": (2, max),
    }
    if extra:
        ops.update(extra)
    return FiniteAlgebra.from_values(values, ops)
