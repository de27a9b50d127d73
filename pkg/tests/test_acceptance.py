"""Acceptance battery: one PASS/FAIL line per criterion with its wall time.

Run with ``pytest tests/test_acceptance.py`` or directly with
``python tests/test_acceptance.py``.  Sizes, seeds, tolerances and time
limits live in :mod:`wfx.suite`.
"""
from __future__ import annotations

import sys

import pytest

from wfx.suite import CHECKS, _timed


@pytest.mark.parametrize("name,budget,fn", CHECKS, ids=[c[0].split()[0] for c in CHECKS])
def test_criterion(name, budget, fn, capsys):
    res = _timed(name, budget, fn)
    with capsys.disabled():
        print(f"\n{res.line()}")
    assert res.ok, res.detail
    assert res.passed, f"{name} took {res.seconds:.1f}s, limit {budget}s"


if __name__ == "__main__":
    failed = 0
    for name, budget, fn in CHECKS:
        res = _timed(name, budget, fn)
        print(res.line(), flush=True)
        failed += not res.passed
    sys.exit(1 if failed else 0)
