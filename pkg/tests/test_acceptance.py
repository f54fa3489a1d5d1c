"""One test per acceptance criterion; each prints a single PASS/FAIL line.

The checks live in ``blrefine.claims`` so ``blrefine verify-paper`` runs
exactly the same code.
"""

import time

import pytest

from blrefine.claims import CLAIMS

BY_INDEX = {c.index: c for c in CLAIMS}


def _run(index, capsys):
    claim = BY_INDEX[index]
    t0 = time.perf_counter()
    ok, details = claim.run()
    elapsed = time.perf_counter() - t0
    with capsys.disabled():
        print(f"\n[criterion {index:>2}] {'PASS' if ok else 'FAIL'}  {claim.name}  ({elapsed:.2f}s)  {claim.anchor}")
    return ok, details


@pytest.mark.parametrize("index", sorted(BY_INDEX))
def test_criterion(index, capsys):
    ok, details = _run(index, capsys)
    assert ok, details
