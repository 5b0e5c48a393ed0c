"""Exact rational linear programming.

Two-phase tableau simplex over :class:`fractions.Fraction` with Bland's
smallest-index rule, so there are no tolerances and no cycling.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

LE, GE, EQ = "<=", ">=", "=="


@dataclass
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    value: Fraction | None = None
    x: tuple[Fraction, ...] | None = None

    @property
    def feasible(self) -> bool:
        return self.status != "infeasible"


def solve_lp(c: Sequence, constraints: Sequence[tuple[Sequence, str, object]],
             maximize: bool = False) -> LPResult:
    """Minimise (or maximise) ``c . x`` subject to ``constraints`` and ``x >= 0``.

    Each constraint is ``(coefficients, sense, rhs)`` with sense one of
    ``"<="``, ``">="``, ``"=="``.
    """
    n = len(c)
    cost = [Fraction(v) for v in c]
    if maximize:
        cost = [-v for v in cost]

    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    senses: list[str] = []
    for coeffs, sense, b in constraints:
        if len(coeffs) != n:
            raise ValueError("constraint width does not match the objective")
        row = [Fraction(v) for v in coeffs]
        b = Fraction(b)
        if b < 0:
            row = [-v for v in row]
            b = -b
            sense = {LE: GE, GE: LE, EQ: EQ}[sense]
        rows.append(row)
        rhs.append(b)
        senses.append(sense)

    m = len(rows)
    n_slack = sum(1 for s in senses if s != EQ)
    n_art = sum(1 for s in senses if s != LE)
    width = n + n_slack + n_art
    tableau: list[list[Fraction]] = []
    basis: list[int] = []
    s_col, a_col = n, n + n_slack
    artificial = set()
    for row, b, sense in zip(rows, rhs, senses):
        full = row + [Fraction(0)] * (n_slack + n_art) + [b]
        if sense == LE:
            full[s_col] = Fraction(1)
            basis.append(s_col)
            s_col += 1
        else:
            if sense == GE:
                full[s_col] = Fraction(-1)
                s_col += 1
            full[a_col] = Fraction(1)
            basis.append(a_col)
            artificial.add(a_col)
            a_col += 1
        tableau.append(full)

    if artificial:
        phase1 = [Fraction(0)] * width + [Fraction(0)]
        for j in artificial:
            phase1[j] = Fraction(1)
        obj = _reduced(phase1, tableau, basis)
        status = _iterate(tableau, basis, obj, range(width))
        if obj[-1] != 0:  # -(sum of artificials) at optimum
            return LPResult("infeasible")
        _drive_out(tableau, basis, artificial, n + n_slack)
    allowed = range(n + n_slack)
    obj = _reduced(cost + [Fraction(0)] * (width - n) + [Fraction(0)], tableau, basis)
    status = _iterate(tableau, basis, obj, allowed)
    if status == "unbounded":
        return LPResult("unbounded")
    x = [Fraction(0)] * width
    for i, j in enumerate(basis):
        x[j] = tableau[i][-1]
    value = sum((cost[j] * x[j] for j in range(n)), Fraction(0))
    if maximize:
        value = -value
    return LPResult("optimal", value, tuple(x[:n]))


def _reduced(cost_row, tableau, basis):
    """Objective row expressed in terms of the non-basic variables."""
    obj = list(cost_row)
    for i, j in enumerate(basis):
        cj = obj[j]
        if cj:
            row = tableau[i]
            obj = [o - cj * r for o, r in zip(obj, row)]
    return obj


def _pivot(tableau, basis, obj, r, col):
    prow = tableau[r]
    p = prow[col]
    if p != 1:
        prow = [v / p for v in prow]
        tableau[r] = prow
    for i, row in enumerate(tableau):
        if i != r and row[col]:
            f = row[col]
            tableau[i] = [a - f * b for a, b in zip(row, prow)]
    f = obj[col]
    if f:
        obj[:] = [a - f * b for a, b in zip(obj, prow)]
    basis[r] = col


def _iterate(tableau, basis, obj, allowed) -> str:
    while True:
        col = next((j for j in allowed if obj[j] < 0), None)
        if col is None:
            return "optimal"
        best = None
        for i, row in enumerate(tableau):
            a = row[col]
            if a > 0:
                ratio = row[-1] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            return "unbounded"
        _pivot(tableau, basis, obj, best[1], col)


def _drive_out(tableau, basis, artificial, n_real):
    """Pivot zero-level artificials out of the basis, dropping redundant rows."""
    i = 0
    dummy = [Fraction(0)] * len(tableau[0]) if tableau else []
    while i < len(tableau):
        if basis[i] in artificial:
            col = next((j for j in range(n_real) if tableau[i][j] != 0), None)
            if col is None:
                del tableau[i]
                del basis[i]
                continue
            _pivot(tableau, basis, dummy, i, col)
        i += 1


def feasible_point(constraints, n: int) -> tuple[Fraction, ...] | None:
    res = solve_lp([0] * n, constraints)
    return res.x if res.status == "optimal" else None
