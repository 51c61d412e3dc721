"""Acceptance suite: one case per criterion, each printing a pass/fail line.

The criteria run the same property suites as ``voaforge verify``.  A
criterion passes when every exact check and every stated form it tests
holds with nothing left inconclusive, inside its time budget.  Checks
labeled ``corrected`` are reported alongside but do not rescue a failing
stated form.
"""

import pytest

from voaforge.suites import CRITERIA, default_seed

SUMMARY: list = []


@pytest.mark.parametrize("run", CRITERIA, ids=[f"criterion_{r.number:02}" for r in CRITERIA])
def test_criterion(run):
    result = run(seed=default_seed())
    SUMMARY.append(result)
    print(result.report())
    assert result.accepted, result.report()
