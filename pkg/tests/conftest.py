from __future__ import annotations

from fractions import Fraction

from hypothesis import HealthCheck, settings, strategies as st

from mvpavelka.syntax import (
    Bullet, Const, Div, FixK, Impl, Join, Meet, Neg, Odot, One, Oplus, Var, Zero,
)

settings.register_profile("default", max_examples=150, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

NAMES = ("p", "q", "r")

rationals = st.builds(
    lambda d, n: Fraction(n % (d + 1), d),
    st.integers(min_value=1, max_value=1000),
    st.integers(min_value=0, max_value=10**6),
)


def _formulas(leaves, binary, unary_div=True):
    def extend(children):
        branches = [st.builds(Neg, children)]
        if unary_div:
            branches.append(st.builds(Div, st.integers(1, 5), children))
        branches += [st.builds(op, children, children) for op in binary]
        return st.one_of(branches)
    return st.recursive(leaves, extend, max_leaves=8)


_pl_leaves = st.one_of(
    st.sampled_from([Var(n) for n in NAMES]),
    st.just(Zero()), st.just(One()),
    st.builds(Const, rationals),
)

# piecewise-linear fragment without division
pl_formulas = _formulas(_pl_leaves, (Impl, Odot, Oplus, Meet, Join), unary_div=False)

# every connective
formulas = _formulas(st.one_of(_pl_leaves, st.just(FixK())),
                     (Impl, Odot, Oplus, Meet, Join, Bullet))

valuations = st.fixed_dictionaries({n: rationals for n in NAMES})


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        res = RESULTS[n]
        terminalreporter.write_line(f"{res.line()}  ({res.seconds:.1f}s)")
