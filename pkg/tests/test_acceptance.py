"""Acceptance suite: every criterion at full scale with pinned tolerances.

Each test delegates to the corresponding criterion in fdsched.validate (the
same code behind ``fdsched validate``) and prints one PASS/FAIL line, so a
plain ``pytest -s tests/test_acceptance.py`` doubles as the acceptance
report.  Budgeted runtimes (criterion: budget): special functions 5 s, each
closed-form triangle 120 s, binary allocation 60 s, dominance 60 s, CDF
laws 60 s, trend reproductions 180 s, asymptotic trend 10 s, determinism
30 s.
"""

import time

import pytest

from fdsched import validate

BUDGET_SECONDS = {
    "special-functions": 5.0,
    "theorem2-triangle": 120.0,
    "theorem3-triangle": 120.0,
    "binary-opa": 60.0,
    "dominance-chain": 60.0,
    "cdf-laws": 60.0,
    "trend-reproductions": 180.0,
    "asymptotic-trend": 10.0,
    "determinism": 30.0,
}


@pytest.mark.parametrize("name,fn", validate.CRITERIA, ids=[n for n, _ in validate.CRITERIA])
def test_acceptance_criterion(name, fn):
    start = time.perf_counter()
    passed, detail = fn(quick=False)
    elapsed = time.perf_counter() - start
    print(f"\nACCEPTANCE {'PASS' if passed else 'FAIL'}  {name}  [{elapsed:.2f}s]  {detail}")
    assert passed, f"{name}: {detail}"
    assert elapsed <= BUDGET_SECONDS[name], (
        f"{name} exceeded its runtime budget: {elapsed:.1f}s > {BUDGET_SECONDS[name]}s"
    )
