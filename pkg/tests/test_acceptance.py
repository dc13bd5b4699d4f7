"""Acceptance suite: one test per numbered criterion, run via the public runner.

Each test prints the per-check rows (criterion, expected, observed) so a
verbose run shows exactly which claim was exercised, and fails if any row
does not pass.
"""

import pytest

from sugeo import acceptance


@pytest.mark.parametrize("name", list(acceptance.SUITES))
def test_criterion(name):
    rows = acceptance.run_all([name])
    assert rows, f"suite {name} produced no checks"
    failures = []
    for row in rows:
        status = "PASS" if row.passed else "FAIL"
        print(f"[{status}] {row.criterion}: expected {row.expected}, observed {row.observed}")
        if not row.passed:
            failures.append(row.criterion)
    assert not failures, f"failed checks: {failures}"
