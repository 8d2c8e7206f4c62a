"""Shared test fixtures and the acceptance-criteria summary hook.

test_acceptance.py records one verdict per criterion through
record_criterion; after the run, pytest prints one PASS/FAIL line per
criterion so the battery can be audited at a glance.
"""

from __future__ import annotations

_CRITERIA = [
    "1 hand-oracle eigenpairs",
    "2 monotone truncation",
    "3 bound envelopes on q-grid",
    "4 structural identities N=64",
    "5 kernel intertwining",
    "6 end-to-end eigenfunction residual",
    "7 norm-growth diagnostics",
    "8 quadrature exactness",
    "9 eigenvalue approach to 1 near q=1",
]

_results: dict[str, tuple[bool, str]] = {}


def record_criterion(name: str, passed: bool, detail: str = "") -> None:
    _results[name] = (passed, detail)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for name in _CRITERIA:
        if name in _results:
            passed, detail = _results[name]
            verdict = "PASS" if passed else "FAIL"
            suffix = f"  ({detail})" if detail else ""
        else:
            verdict, suffix = "NO VERDICT", ""
        terminalreporter.write_line(f"{verdict:10s} {name}{suffix}")
