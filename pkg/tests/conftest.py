import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from gaussmap import Euclidean, Hyperbolic2, MetricTree, Product
from gaussmap.testkit import Generator

settings.register_profile(
    "repo", deadline=None, derandomize=True, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")

seeds = st.integers(min_value=0, max_value=2**31 - 1)
SPACE_KINDS = ["euclidean", "hyperbolic", "tree", "tree_product", "h2_line"]


def tripod(a=1.0, b=2.0, c=1.0):
    """Branch vertex o with legs to x, y, z; one end beyond each leaf."""
    return MetricTree(["o", "x", "y", "z"], [("o", "x", a), ("o", "y", b), ("o", "z", c)],
                      [("ex", "x"), ("ey", "y"), ("ez", "z")], basepoint=("v", "o"))


def make_space(kind, seed):
    return Generator(seed).space(kind)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def E2():
    return Euclidean(2)


@pytest.fixture
def H2():
    return Hyperbolic2()


@pytest.fixture
def T3():
    return tripod()


@pytest.fixture
def TxT():
    return Product(tripod(), tripod(1.5, 0.5, 1.0))


THIRD = 2.0 * math.pi / 3.0


ACCEPTANCE = {}


def record(n, ok, detail):
    ACCEPTANCE[n] = (ok, detail)
    print(f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}")
