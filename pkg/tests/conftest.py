from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from moyal_kahler.ratpoly import PolyField

settings.register_profile(
    "default", max_examples=40, deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("ci", max_examples=15, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE: dict[int, tuple[bool, str, str]] = {}


def exps(max_degree: int):
    return (st.tuples(*[st.integers(0, max_degree)] * 4)
            .filter(lambda e: sum(e) <= max_degree))


coeffs = st.fractions(min_value=-5, max_value=5, max_denominator=4)


def polys(max_degree: int = 3, max_terms: int = 4):
    return st.dictionaries(exps(max_degree), coeffs, max_size=max_terms).map(PolyField)


rationals = st.fractions(min_value=-6, max_value=6, max_denominator=5)
nonzero_rationals = rationals.filter(lambda x: x != 0)


@pytest.fixture
def frac():
    return Fraction


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, title, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {n:2d}: {title} -- {detail}")
