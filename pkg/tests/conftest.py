"""Shared fixtures and acceptance-suite reporting."""

import pytest


def pytest_runtest_logreport(report):
    # One visible pass/fail line per acceptance criterion, regardless of
    # capture settings.
    if report.when != "call" or "test_acceptance" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    outcome = "PASS" if report.passed else "FAIL"
    print(f"\nACCEPTANCE {name}: {outcome}", flush=True)
