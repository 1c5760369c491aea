import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from chcpair import corpus


@pytest.fixture(scope="session")
def ackermann():
    return corpus.load("ackermann")


@pytest.fixture(scope="session")
def ackermann_golden():
    return corpus.load("ackermann_transf")


@pytest.fixture(scope="session")
def sum_square():
    return corpus.load("sum_square")


@pytest.fixture(scope="session")
def sum_upto():
    return corpus.load("sum_upto")


@pytest.fixture(scope="session")
def hl():
    return corpus.load("hl")
