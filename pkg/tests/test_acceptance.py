"""Acceptance criteria 1-12, each at its stated tolerance.

Every test prints one PASS/FAIL line; the lines are also collected into an
"acceptance criteria" section of the pytest terminal summary.
"""

import pytest

from conftest import record_acceptance_line
from torus_olp import acceptance


@pytest.mark.parametrize("number", range(1, 13))
def test_criterion(number):
    result = acceptance.run_criterion(number)
    line = result.line()
    print(line)
    record_acceptance_line(line + ("" if result.passed else f"  <- {result.detail}"))
    assert result.passed, f"{line}\n{result.detail}\n{result.residuals}"
    assert result.seconds < 30
