from fractions import Fraction

from hypothesis import settings
from hypothesis import strategies as st

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


def fractions(lo=-6, hi=6, max_den=4):
    return st.builds(Fraction, st.integers(lo, hi), st.integers(1, max_den))


def matrices(max_rows=6, max_cols=6, elements=None):
    elements = fractions() if elements is None else elements
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(elements, min_size=c, max_size=c), min_size=r, max_size=r)
        )
    )


def square_matrices(max_n=6, elements=None):
    elements = fractions() if elements is None else elements
    return st.integers(1, max_n).flatmap(
        lambda n: st.lists(st.lists(elements, min_size=n, max_size=n), min_size=n, max_size=n)
    )


# Acceptance outcomes, filled in by test_acceptance and printed after the run.
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[number])
