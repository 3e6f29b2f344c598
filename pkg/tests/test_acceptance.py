"""Acceptance gate: twelve criteria, each printing one PASS/FAIL line."""
import pytest

from boolcomp import verify

CRITERIA = [
    (1, "bublitz"),
    (2, "bublitz-limit"),
    (3, "bs-lift"),
    (4, "nand"),
    (5, "duality"),
    (6, "sandwich"),
    (7, "grouped"),
    (8, "star"),
    (9, "or-compose"),
    (10, "matrix-lemmas"),
    (11, "structural"),
    (12, "rc"),
]


@pytest.mark.parametrize("num,suite", CRITERIA, ids=[f"{n:02d}-{s}" for n, s in CRITERIA])
def test_criterion(num, suite, capsys):
    r = verify.run_suite(suite)
    with capsys.disabled():
        print("\n" + r.line())
    assert r.criterion == num
    assert r.passed, r.summary
