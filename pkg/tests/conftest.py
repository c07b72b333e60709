import numpy as np
import pytest

from torus_olp import gaussborel, longilex, measure, moments
from torus_olp.acceptance import worked_example_weight
from torus_olp.laurent import parse_poly

_ACCEPTANCE_LINES: list = []


def record_acceptance_line(line: str):
    _ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def worked_weight():
    return worked_example_weight(2)


@pytest.fixture(scope="session")
def worked_oracle(worked_weight):
    return measure.polynomial_weight_oracle(measure.haar_oracle(2), worked_weight, claims_positive=True)


@pytest.fixture(scope="session")
def skew_oracle():
    """Non-Hermitian Laurent weight: exercises the distinction between S and S_hat."""
    L = parse_poly("0.3*z1 + 0.2i*z1^-1 + 0.4*z2^-1 + 0.1*z1*z2 + 3")
    return measure.polynomial_weight_oracle(measure.haar_oracle(2), L)


def factor(oracle, level):
    G = moments.moment_matrix(oracle, level)
    return G, gaussborel.factorize(G)


@pytest.fixture(scope="session")
def worked_fact(worked_oracle):
    return factor(worked_oracle, 4)


@pytest.fixture(scope="session")
def skew_fact(skew_oracle):
    return factor(skew_oracle, 4)


@pytest.fixture(scope="session")
def haar_fact_d2():
    return factor(measure.haar_oracle(2), 4)


def torus_points(rng, D, n, off=True):
    r = rng.uniform(0.8, 1.25, size=(n, D)) if off else np.ones((n, D))
    return r * np.exp(2j * np.pi * rng.uniform(size=(n, D)))


@pytest.fixture(scope="session")
def basis_d2():
    return longilex.LongilexBasis(2, 3)
