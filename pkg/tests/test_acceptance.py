"""Acceptance gate: one test per criterion, each printing a PASS/FAIL
line with its runtime.  Criteria with a stated budget assert it."""

import pytest

from freeconv.checks import ACCEPTANCE, CHECKS


@pytest.mark.parametrize("number", sorted(ACCEPTANCE))
def test_criterion(number):
    suite, budget = ACCEPTANCE[number]
    report = CHECKS[suite](0)
    status = "PASS" if report.ok else "FAIL"
    print(f"{status}: criterion {number} [{suite}] in {report.elapsed:.2f}s"
          + (f" (budget {budget:.0f}s)" if budget else ""))
    for item in report.items:
        print(f"    {'ok  ' if item.ok else 'FAIL'} {item.label}"
              + (f" -- {item.detail}" if item.detail and not item.ok else ""))
    assert report.ok, f"criterion {number} [{suite}] failed: " + "; ".join(
        f"{i.label}: {i.detail}" for i in report.items if not i.ok)
    if budget is not None:
        assert report.elapsed < budget, (
            f"criterion {number} took {report.elapsed:.2f}s, budget {budget}s")
