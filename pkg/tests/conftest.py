import itertools
from fractions import Fraction

import pytest

from boolcomp.core import named_fn


@pytest.fixture(scope="session")
def bublitz():
    return named_fn("BUBLITZ")


def brute_minblocks(f, x):
    """Min-blocks straight from the definition: flip sets, then keep minimal ones."""
    fx = f(x)
    blocks = [B for B in range(1, f.size) if f(x ^ B) != fx]
    return {B for B in blocks if not any(C != B and C & B == C for C in blocks)}


def brute_nu(edges, n):
    edges = sorted(edges)
    best = 0
    for r in range(1, len(edges) + 1):
        for combo in itertools.combinations(edges, r):
            used = 0
            ok = True
            for e in combo:
                if e & used:
                    ok = False
                    break
                used |= e
            if ok:
                best = r
                break
    return best


def brute_tau(edges, n):
    if not edges:
        return 0
    for r in range(n + 1):
        for S in itertools.combinations(range(n), r):
            m = sum(1 << i for i in S)
            if all(e & m for e in edges):
                return r
    raise AssertionError("no hitting set")


def frac(x):
    return Fraction(x)
