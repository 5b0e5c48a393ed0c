"""Formula language for Łukasiewicz logic and its expansions.

Formulas are immutable trees built from the node classes below.  The
concrete ASCII syntax is::

    ->   implication (right associative, weakest)
    +    strong disjunction
    &    strong conjunction
    *    product
    /\\   lattice meet
    \\/   lattice join
    !x   negation            dN(x)  division by N
    0 1  bottom / top        K      negation fixpoint
    [p/q]  rational truth constant

Binary operators other than ``->`` associate to the left.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Union

__all__ = [
    "Formula", "Var", "Zero", "One", "Impl", "Neg", "Odot", "Oplus", "Meet",
    "Join", "Bullet", "Div", "FixK", "Const", "LogicProfile", "Theory",
    "FormulaSyntaxError", "ProfileError", "rational01", "parse", "to_text",
    "to_core", "expand_multiple", "substitute", "variables", "size",
    "subformulas", "check_profile", "parse_theory", "format_theory",
    "format_rational", "parse_rational", "ZERO", "ONE", "K",
]


class FormulaSyntaxError(ValueError):
    """Malformed formula text; ``position`` is the 0-based offset."""

    def __init__(self, message: str, position: int | None = None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class ProfileError(ValueError):
    """A connective was used that the active profile does not enable."""


def rational01(value) -> Fraction:
    """Coerce ``value`` to a Fraction and check it lies in [0, 1]."""
    r = Fraction(value)
    if not 0 <= r <= 1:
        raise ValueError(f"truth value {r} outside [0, 1]")
    return r


def format_rational(r: Fraction) -> str:
    r = Fraction(r)
    return str(r.numerator) if r.denominator == 1 else f"{r.numerator}/{r.denominator}"


def parse_rational(text: str) -> Fraction:
    text = text.strip()
    if not re.fullmatch(r"-?\d+(/\d+)?", text):
        raise ValueError(f"not a rational literal: {text!r}")
    try:
        return Fraction(text)
    except ZeroDivisionError:
        raise ValueError(f"zero denominator in {text!r}") from None


# ---------------------------------------------------------------------------
# AST


class Formula:
    __slots__ = ()

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True, slots=True)
class Var(Formula):
    name: str

    def __repr__(self):
        return f"Var({self.name!r})"


@dataclass(frozen=True, slots=True)
class Zero(Formula):
    def __repr__(self):
        return "Zero()"


@dataclass(frozen=True, slots=True)
class One(Formula):
    def __repr__(self):
        return "One()"


@dataclass(frozen=True, slots=True)
class FixK(Formula):
    def __repr__(self):
        return "FixK()"


@dataclass(frozen=True, slots=True)
class Const(Formula):
    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "value", rational01(self.value))

    def __repr__(self):
        return f"Const({format_rational(self.value)})"


@dataclass(frozen=True, slots=True)
class Neg(Formula):
    arg: Formula


@dataclass(frozen=True, slots=True)
class Div(Formula):
    n: int
    arg: Formula

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise ValueError(f"division index must be a positive integer, got {self.n!r}")


@dataclass(frozen=True, slots=True)
class Impl(Formula):
    lhs: Formula
    rhs: Formula


@dataclass(frozen=True, slots=True)
class Odot(Formula):
    lhs: Formula
    rhs: Formula


@dataclass(frozen=True, slots=True)
class Oplus(Formula):
    lhs: Formula
    rhs: Formula


@dataclass(frozen=True, slots=True)
class Meet(Formula):
    lhs: Formula
    rhs: Formula


@dataclass(frozen=True, slots=True)
class Join(Formula):
    lhs: Formula
    rhs: Formula


@dataclass(frozen=True, slots=True)
class Bullet(Formula):
    lhs: Formula
    rhs: Formula


ZERO = Zero()
ONE = One()
K = FixK()

BINARY = (Impl, Odot, Oplus, Meet, Join, Bullet)
UNARY = (Neg, Div)
CORE_KINDS = (Var, Zero, Impl, Bullet, Div, FixK, Const)


def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, BINARY):
        return (f.lhs, f.rhs)
    if isinstance(f, UNARY):
        return (f.arg,)
    return ()


def rebuild(f: Formula, kids: tuple[Formula, ...]) -> Formula:
    if isinstance(f, BINARY):
        return type(f)(*kids)
    if isinstance(f, Neg):
        return Neg(kids[0])
    if isinstance(f, Div):
        return Div(f.n, kids[0])
    return f


# ---------------------------------------------------------------------------
# Profiles and theories


@dataclass(frozen=True)
class LogicProfile:
    """Which expansion of base Łukasiewicz logic is active.

    The base connectives (and everything definable from ``->`` and ``0``)
    are always available.
    """

    product_enabled: bool = False
    division_enabled: bool = False
    fixpoint_enabled: bool = False
    constants_enabled: bool = False

    _FLAGS = {
        "product": "product_enabled",
        "division": "division_enabled",
        "fixpoint": "fixpoint_enabled",
        "constants": "constants_enabled",
    }

    @classmethod
    def parse(cls, text: str) -> "LogicProfile":
        """Read ``base[,product][,division][,fixpoint][,constants]``."""
        kwargs = {}
        for part in text.replace(" ", "").split(","):
            if part in ("", "base"):
                continue
            if part == "all":
                return cls.full()
            if part not in cls._FLAGS:
                raise ValueError(f"unknown profile component {part!r}")
            kwargs[cls._FLAGS[part]] = True
        return cls(**kwargs)

    @classmethod
    def full(cls) -> "LogicProfile":
        return cls(True, True, True, True)

    def union(self, other: "LogicProfile") -> "LogicProfile":
        return LogicProfile(*(a or b for a, b in zip(self.flags(), other.flags())))

    def flags(self) -> tuple[bool, bool, bool, bool]:
        return (self.product_enabled, self.division_enabled,
                self.fixpoint_enabled, self.constants_enabled)

    def __str__(self) -> str:
        parts = ["base"] + [name for name, attr in self._FLAGS.items() if getattr(self, attr)]
        return ",".join(parts)


BASE = LogicProfile()
FULL = LogicProfile.full()


def check_profile(f: Formula, profile: LogicProfile) -> None:
    """Raise ProfileError if ``f`` uses a connective ``profile`` lacks."""
    for g in subformulas(f):
        if isinstance(g, Bullet) and not profile.product_enabled:
            raise ProfileError("connective '*' requires the product profile")
        if isinstance(g, Div) and not profile.division_enabled:
            raise ProfileError(f"connective 'd{g.n}' requires the division profile")
        if isinstance(g, FixK) and not profile.fixpoint_enabled:
            raise ProfileError("constant 'K' requires the fixpoint profile")
        if isinstance(g, Const) and not profile.constants_enabled:
            raise ProfileError("truth constants require the constants profile")


def required_profile(f: Formula) -> LogicProfile:
    """Smallest profile under which ``f`` is well formed."""
    kinds = {type(g) for g in subformulas(f)}
    return LogicProfile(Bullet in kinds, Div in kinds, FixK in kinds, Const in kinds)


@dataclass(frozen=True)
class Theory:
    """A finite generating set S for the theory T(S)."""

    generators: tuple[Formula, ...] = ()
    profile: LogicProfile = BASE

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        for g in self.generators:
            check_profile(g, self.profile)

    def __len__(self):
        return len(self.generators)

    def __iter__(self) -> Iterator[Formula]:
        return iter(self.generators)

    def subset(self, indices: Iterable[int]) -> "Theory":
        return Theory(tuple(self.generators[i] for i in indices), self.profile)


def parse_theory(text: str, profile: LogicProfile | None = None) -> Theory:
    """Parse a theory file: optional ``profile:`` header, one formula per line."""
    generators: list[str] = []
    declared = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.lower().startswith("profile:"):
            declared = LogicProfile.parse(line.split(":", 1)[1])
            continue
        generators.append(line)
    prof = profile if profile is not None else (declared or BASE)
    if profile is not None and declared is not None:
        prof = declared.union(profile)
    return Theory(tuple(parse(g, prof) for g in generators), prof)


def format_theory(theory: Theory) -> str:
    lines = [f"profile: {theory.profile}"]
    lines += [to_text(g) for g in theory.generators]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Parsing

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<const>\[[^\]]*\])
  | (?P<div>d(?P<divn>\d+)(?![A-Za-z0-9_']))
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<num>\d+)
  | (?P<op>->|/\\|\\/|[!&+*()]|→|¬|⊙|⊕|∧|∨|•)
""", re.VERBOSE)

_UNICODE = {"→": "->", "¬": "!", "⊙": "&", "⊕": "+", "∧": "/\\", "∨": "\\/", "•": "*"}

# binding strength, weakest first
_BINARY_OPS = {
    "->": (0, Impl),
    "+": (1, Oplus),
    "&": (2, Odot),
    "*": (3, Bullet),
    "/\\": (4, Meet),
    "\\/": (5, Join),
}
_SYMBOL = {cls: sym for sym, (_, cls) in _BINARY_OPS.items()}
_PREC = {cls: prec for _, (prec, cls) in _BINARY_OPS.items()}


def _tokenize(text: str) -> list[tuple[str, object, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind == "divn":
            kind = "div"
        if kind == "const":
            body = m.group("const")[1:-1].strip()
            try:
                value = parse_rational(body)
            except ValueError:
                raise FormulaSyntaxError(f"bad truth constant [{body}]", pos) from None
            if not 0 <= value <= 1:
                raise FormulaSyntaxError(f"truth constant {body} outside [0, 1]", pos)
            tokens.append(("const", value, pos))
        elif kind == "div":
            tokens.append(("div", int(m.group("divn")), pos))
        elif kind == "ident":
            tokens.append(("ident", m.group("ident"), pos))
        elif kind == "num":
            tokens.append(("num", m.group("num"), pos))
        elif kind == "op":
            op = m.group("op")
            tokens.append(("op", _UNICODE.get(op, op), pos))
        pos = m.end()
    tokens.append(("end", None, len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, profile: LogicProfile):
        self.tokens = _tokenize(text)
        self.i = 0
        self.profile = profile

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, val, pos = self.advance()
        if val != value:
            shown = "end of input" if kind == "end" else repr(val)
            raise FormulaSyntaxError(f"expected {value!r}, found {shown}", pos)

    def parse(self) -> Formula:
        f = self.binary(0)
        kind, val, pos = self.peek()
        if kind != "end":
            raise FormulaSyntaxError(f"unexpected {val!r}", pos)
        return f

    def binary(self, level: int) -> Formula:
        if level > 5:
            return self.unary()
        if level == 0:
            lhs = self.binary(1)
            kind, val, _ = self.peek()
            if kind == "op" and val == "->":
                self.advance()
                return Impl(lhs, self.binary(0))
            return lhs
        lhs = self.binary(level + 1)
        while True:
            kind, val, pos = self.peek()
            if kind == "op" and val in _BINARY_OPS and _BINARY_OPS[val][0] == level:
                self.advance()
                cls = _BINARY_OPS[val][1]
                if cls is Bullet and not self.profile.product_enabled:
                    raise ProfileError(f"connective '*' at position {pos} requires the product profile")
                lhs = cls(lhs, self.binary(level + 1))
            else:
                return lhs

    def unary(self) -> Formula:
        kind, val, pos = self.advance()
        if kind == "op" and val == "!":
            return Neg(self.unary())
        if kind == "div":
            if not self.profile.division_enabled:
                raise ProfileError(f"connective 'd{val}' at position {pos} requires the division profile")
            if val < 1:
                raise FormulaSyntaxError("division index must be >= 1", pos)
            return Div(val, self.unary())
        if kind == "op" and val == "(":
            f = self.binary(0)
            self.expect(")")
            return f
        if kind == "const":
            if not self.profile.constants_enabled:
                raise ProfileError(f"truth constant at position {pos} requires the constants profile")
            return Const(val)
        if kind == "num":
            if val == "0":
                return ZERO
            if val == "1":
                return ONE
            raise FormulaSyntaxError(f"numeric literal {val} (use [p/q] for constants)", pos)
        if kind == "ident":
            if val == "K":
                if not self.profile.fixpoint_enabled:
                    raise ProfileError(f"constant 'K' at position {pos} requires the fixpoint profile")
                return K
            return Var(val)
        shown = "end of input" if kind == "end" else repr(val)
        raise FormulaSyntaxError(f"expected a formula, found {shown}", pos)


def parse(text: str, profile: LogicProfile = FULL) -> Formula:
    """Parse formula text under ``profile``.

    >>> parse("p -> (q -> p)")
    Impl(lhs=Var('p'), rhs=Impl(lhs=Var('q'), rhs=Var('p')))
    """
    return _Parser(text, profile).parse()


# ---------------------------------------------------------------------------
# Printing


def _atom_text(f: Formula) -> str | None:
    if isinstance(f, Var):
        return f.name
    if isinstance(f, Zero):
        return "0"
    if isinstance(f, One):
        return "1"
    if isinstance(f, FixK):
        return "K"
    if isinstance(f, Const):
        return f"[{format_rational(f.value)}]"
    return None


def to_text(f: Formula) -> str:
    """Deterministic concrete syntax for ``f``; ``parse`` inverts it."""
    atom = _atom_text(f)
    if atom is not None:
        return atom
    if isinstance(f, Neg):
        inner = to_text(f.arg)
        if isinstance(f.arg, BINARY):
            inner = f"({inner})"
        return "!" + inner
    if isinstance(f, Div):
        return f"d{f.n}({to_text(f.arg)})"
    sym = _SYMBOL[type(f)]
    left, right = to_text(f.lhs), to_text(f.rhs)
    if isinstance(f.lhs, BINARY) and not (type(f.lhs) is type(f) and not isinstance(f, Impl)):
        left = f"({left})"
    if isinstance(f.rhs, BINARY):
        right = f"({right})"
    return f"{left} {sym} {right}"


# ---------------------------------------------------------------------------
# Structural operations


def subformulas(f: Formula) -> Iterator[Formula]:
    """Pre-order traversal, duplicates included."""
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        stack.extend(reversed(children(g)))


def variables(f: Formula) -> frozenset[str]:
    return frozenset(g.name for g in subformulas(f) if isinstance(g, Var))


def size(f: Formula) -> int:
    return sum(1 for _ in subformulas(f))


def substitute(f: Formula, bindings: Mapping[str, Formula]) -> Formula:
    """Simultaneous substitution of formulas for variables."""
    if not bindings:
        return f
    if isinstance(f, Var):
        return bindings.get(f.name, f)
    kids = children(f)
    if not kids:
        return f
    return rebuild(f, tuple(substitute(k, bindings) for k in kids))


def neg(f: Formula) -> Formula:
    return Impl(f, ZERO)


@lru_cache(maxsize=65536)
def to_core(f: Formula) -> Formula:
    """Rewrite derived connectives into ``->``, ``0`` and the expansion nodes.

    ``!a = a -> 0``, ``1 = !0``, ``a & b = !(a -> !b)``,
    ``a + b = !(!a & !b)``, ``a /\\ b = a & (a -> b)``,
    ``a \\/ b = (a -> b) -> b``.
    """
    if isinstance(f, (Var, Zero, FixK, Const)):
        return f
    if isinstance(f, One):
        return Impl(ZERO, ZERO)
    if isinstance(f, Neg):
        return neg(to_core(f.arg))
    if isinstance(f, Div):
        return Div(f.n, to_core(f.arg))
    a, b = to_core(f.lhs), to_core(f.rhs)
    if isinstance(f, Impl):
        return Impl(a, b)
    if isinstance(f, Bullet):
        return Bullet(a, b)
    if isinstance(f, Odot):
        return _core_odot(a, b)
    if isinstance(f, Oplus):
        return neg(_core_odot(neg(a), neg(b)))
    if isinstance(f, Meet):
        return _core_odot(a, Impl(a, b))
    if isinstance(f, Join):
        return Impl(Impl(a, b), b)
    raise TypeError(f"not a formula: {f!r}")


def _core_odot(a: Formula, b: Formula) -> Formula:
    return neg(Impl(a, neg(b)))


def expand_multiple(n: int, f: Formula) -> Formula:
    """The n-fold strong disjunction of ``f`` in calculus form.

    ``1f = f`` and ``(k+1)f = !f -> kf``; ``0f`` is ``0``.
    """
    if n < 0:
        raise ValueError("multiple index must be non-negative")
    if n == 0:
        return ZERO
    out = f
    for _ in range(n - 1):
        out = Impl(Neg(f), out)
    return out


def is_ground(f: Formula) -> bool:
    return not variables(f)


def formula_key(f: Formula) -> tuple[int, str]:
    """Canonical ordering key used for deterministic tie-breaking."""
    return (size(f), to_text(f))


FormulaLike = Union[Formula, str]


def as_formula(f: FormulaLike, profile: LogicProfile = FULL) -> Formula:
    return parse(f, profile) if isinstance(f, str) else f
