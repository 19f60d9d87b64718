import os

import pytest
from hypothesis import HealthCheck, settings

from gradedk1 import INTEGERS, TRIVIAL, GroupRing, LaurentRing, PairRing, ShiftFamily, TrivialRing, cyclic

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow], derandomize=True
)
settings.register_profile("thorough", max_examples=500, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# criterion number -> (passed, detail), filled in by test_acceptance
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def acceptance():
    def record(number: int, passed: bool, detail: str = ""):
        ACCEPTANCE[number] = (passed, detail)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"ACCEPTANCE {number}: {'PASS' if passed else 'FAIL'}  {detail}")


# ---------------------------------------------------------------------------
# small rings shared across modules


def trivial_family(size: int) -> ShiftFamily:
    return ShiftFamily.of(TRIVIAL, [()] * size)


@pytest.fixture
def z4():
    return TrivialRing(4)


@pytest.fixture
def f3_z2():
    return GroupRing(3, cyclic(2))


@pytest.fixture
def pair_z4():
    return PairRing(4, 2)


@pytest.fixture
def laurent2():
    return LaurentRing(2)


FINITE_RINGS = {
    "trivial": lambda: TrivialRing(4),
    "trivial-coefficients": lambda: TrivialRing(2, (2,)),
    "group-ring": lambda: GroupRing(3, cyclic(2)),
    "pair": lambda: PairRing(4, 2),
}


def laurent_family(values) -> ShiftFamily:
    return ShiftFamily.of(INTEGERS, values)
