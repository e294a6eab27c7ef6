"""The eight acceptance criteria at full size, one PASS/FAIL line each.

Run directly (``python3 tests/test_acceptance.py``) or through pytest; in
the latter case the lines are repeated in the terminal summary.
"""

import json

import pytest

from weldlab.experiments import CRITERIA

RESULTS: list[str] = []

LIMITS = {1: 300, 2: 600, 3: 300, 4: 300, 5: 1800, 6: 600, 7: 300, 8: 120}      # seconds


@pytest.mark.slow
@pytest.mark.parametrize("cid", sorted(CRITERIA))
def test_criterion(cid):
    res = CRITERIA[cid]()
    line = res.line()
    RESULTS.append(line)
    print(line)
    assert res.passed, json.dumps(res.detail, default=str)[:2000]
    if cid in LIMITS:
        assert res.seconds < LIMITS[cid]


if __name__ == "__main__":
    ok = True
    for cid in sorted(CRITERIA):
        res = CRITERIA[cid]()
        print(res.line(), flush=True)
        ok &= res.passed
    raise SystemExit(0 if ok else 1)
