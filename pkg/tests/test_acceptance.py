"""Acceptance criteria at full size.

Each test runs one property suite at the required case count, checks every
property against its tolerance and the wall-clock limit, and records a
one-line verdict that is also printed in the terminal summary.
"""
import time

import pytest

import conftest
from svbsde.checks import CheckConfig, run_suite

pytestmark = pytest.mark.slow

CRITERIA = [
    # id, title, suites, cases, limit (s)
    (1, "Hukuhara algebra, cancellation, norm link", ["hukuhara"], 1000, 10),
    (2, "Hukuhara existence verdict vs grid erosion", ["existence"], 1000, 10),
    (3, "conditional Jensen on depth-4 trees", ["jensen"], 500, 30),
    (4, "discrete Hoelder on adapted processes", ["holder"], 500, 60),
    (5, "set Ito integral vs selection enumeration", ["ito-oracle"], 100, 60),
    (6, "integral algebra and inclusions", ["integral-algebra"], 200, 60),
    (7, "martingale representation and time consistency", ["repr"], 500, 120),
    (8, "interval BSDE vs scalar endpoint recursion", ["solver-oracle"], None, 30),
    (9, "factorial contraction bound and ratio test", ["contraction"], None, 60),
    (10, "three-form consistency and uniqueness", ["three-form"], None, 120),
]


def _verdict(num, title, results, seconds, limit):
    failed = [r for r in results if not r.passed]
    ok = not failed and seconds < limit
    worst = ", ".join(f"{r.name}={r.worst:.1e}" for r in results)
    line = f"[{'PASS' if ok else 'FAIL'}] {num:02d} {title}: {len(results)} properties, {seconds:.1f}s (limit {limit}s); {worst}"
    conftest.ACCEPTANCE_LINES.append(line)
    print(line)
    return ok, failed


@pytest.mark.parametrize("num, title, suites, cases, limit", CRITERIA, ids=[f"c{c[0]:02d}" for c in CRITERIA])
def test_criterion(num, title, suites, cases, limit):
    cfg = CheckConfig(seed=0)
    t0 = time.perf_counter()
    results = [r for s in suites for r in run_suite(s, cfg, cases)]
    seconds = time.perf_counter() - t0
    ok, failed = _verdict(num, title, results, seconds, limit)
    assert not failed, [r.line() for r in failed]
    assert ok, f"runtime {seconds:.1f}s exceeds {limit}s"
