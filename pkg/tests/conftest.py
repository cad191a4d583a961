import random

import pytest

from chemgraph.chemistry import builtin, load_chemistry

TOY_CONFIG = """
[chemistry]
name toy
oriented false

[types]
A 0 0 0
B 0 0 0
C 0 0
Arrow 0 1
FREE 0

[rewrites]
name A-A
left A
right A
contact 2 0
action TOY
kind BETA
rhs C 1 2 ^ C 4 5
"""

FOUR_NODE_MOL = "A a b c\nA b d e\nB c a d\nA e f f"


@pytest.fixture(scope="session")
def toy():
    return load_chemistry(TOY_CONFIG)


@pytest.fixture(scope="session")
def chemlambda():
    return builtin("chemlambda-v2")


@pytest.fixture(scope="session")
def ic():
    return builtin("ic")


@pytest.fixture(scope="session")
def both():
    return builtin("chemlambda+ic")


@pytest.fixture()
def rng():
    return random.Random(0xC0FFEE)


def pytest_runtest_logreport(report):
    """One pass/fail line per acceptance criterion."""
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        criterion = name.split("_")[1]
        status = "PASS" if report.passed else "FAIL"
        print(f"\nACCEPTANCE {criterion} {status} ({name}, {report.duration:.2f}s)")
