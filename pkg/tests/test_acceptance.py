"""Acceptance criteria, one test each; every run prints a PASS/FAIL line."""
import pytest

from mincouple import verification


@pytest.mark.parametrize("number", [n for n, *_ in verification.CRITERIA])
def test_criterion(number, capsys):
    result = verification.run_criterion(number)
    with capsys.disabled():
        print("\n" + result.line())
    assert result.passed, result.detail
