from __future__ import annotations

import itertools
from fractions import Fraction

from hypothesis import given, strategies as st

from mvpavelka.lp import EQ, GE, LE, feasible_point, solve_lp

F = Fraction


def solve_square(rows, rhs):
    """Gaussian elimination over Fractions; None if singular."""
    n = len(rows)
    m = [list(r) + [b] for r, b in zip(rows, rhs)]
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c] != 0), None)
        if piv is None:
            return None
        m[c], m[piv] = m[piv], m[c]
        for i in range(n):
            if i != c and m[i][c]:
                f = m[i][c] / m[c][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[c])]
    return [m[i][-1] / m[i][i] for i in range(n)]


def oracle_min(c, constraints, box):
    """Minimum over the vertices of a bounded polytope (x in [0, box]^n)."""
    n = len(c)
    rows = [(list(a), s, F(b)) for a, s, b in constraints]
    for i in range(n):
        e = [F(int(i == j)) for j in range(n)]
        rows.append((e, GE, F(0)))
        rows.append((e, LE, F(box)))

    def ok(x):
        for a, s, b in rows:
            v = sum(ai * xi for ai, xi in zip(a, x))
            if (s == LE and v > b) or (s == GE and v < b) or (s == EQ and v != b):
                return False
        return True

    best = None
    for combo in itertools.combinations(range(len(rows)), n):
        x = solve_square([rows[i][0] for i in combo], [rows[i][2] for i in combo])
        if x is not None and ok(x):
            val = sum(ci * xi for ci, xi in zip(c, x))
            best = val if best is None else min(best, val)
    return best


coef = st.integers(-4, 4).map(F)
constraint = st.tuples(st.lists(coef, min_size=2, max_size=2), st.sampled_from([LE, GE, EQ]),
                       st.integers(-6, 6).map(F))


@given(st.lists(coef, min_size=2, max_size=2), st.lists(constraint, max_size=4))
def test_matches_vertex_enumeration(c, constraints):
    box = 3
    full = list(constraints) + [([F(1), F(0)], LE, F(box)), ([F(0), F(1)], LE, F(box))]
    res = solve_lp(c, full)
    expected = oracle_min(c, constraints, box)
    if expected is None:
        assert res.status == "infeasible"
    else:
        assert res.status == "optimal"
        assert res.value == expected
        assert sum(ci * xi for ci, xi in zip(c, res.x)) == res.value


def test_unbounded():
    assert solve_lp([-1], [([1], GE, 0)]).status == "unbounded"


def test_infeasible():
    assert solve_lp([1, 1], [([1, 1], LE, 1), ([1, 1], GE, 2)]).status == "infeasible"


def test_maximize_and_equality():
    res = solve_lp([1, 2], [([1, 1], EQ, 1)], maximize=True)
    assert res.value == 2 and res.x == (0, 1)


def test_degenerate_cycling_example():
    # Beale's example cycles under the textbook rule; Bland's rule terminates
    c = [F(-3, 4), F(150), F(-1, 50), F(6)]
    cons = [
        ([F(1, 4), F(-60), F(-1, 25), F(9)], LE, 0),
        ([F(1, 2), F(-90), F(-1, 50), F(3)], LE, 0),
        ([0, 0, 1, 0], LE, 1),
    ]
    res = solve_lp(c, cons)
    assert res.status == "optimal" and res.value == F(-1, 20)


def test_redundant_equalities():
    res = solve_lp([1, 1], [([1, 1], EQ, 1), ([2, 2], EQ, 2), ([1, 0], GE, F(1, 3))])
    assert res.value == 1 and res.x[0] >= F(1, 3)


def test_feasible_point():
    x = feasible_point([([1, -1], EQ, 0), ([1, 1], GE, 1)], 2)
    assert x is not None and x[0] == x[1] and x[0] + x[1] >= 1
    assert feasible_point([([1], LE, -1)], 1) is None
