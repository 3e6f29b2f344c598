"""Exact rational simplex in dictionary form.

Solves ``max c.x  s.t.  A x <= b, x >= 0`` over gmpy2 rationals with Bland's
rule on both the primal and the dual side, so it never cycles. Results come
back as ``fractions.Fraction``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence

from gmpy2 import mpq

from .errors import BudgetExceeded

MAX_CELLS = 4_000_000


@dataclass(frozen=True)
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    value: Optional[Fraction]
    x: Optional[List[Fraction]]
    y: Optional[List[Fraction]]  # duals of the <= rows


def _frac(q) -> Fraction:
    return Fraction(int(q.numerator), int(q.denominator))


class _Dictionary:
    # basic[i] = b[i] - sum_j A[i][j] * nonbasic[j];  z = z0 + sum_j c[j] * nonbasic[j]

    def __init__(self, A, b, c):
        m, n = len(A), len(c)
        self.m, self.n = m, n
        self.A = [[mpq(v) for v in row] for row in A]
        self.b = [mpq(v) for v in b]
        self.c = [mpq(v) for v in c]
        self.z0 = mpq(0)
        self.nonbasic = list(range(n))
        self.basic = list(range(n, n + m))

    def pivot(self, i, j):
        A, b, c = self.A, self.b, self.c
        row = A[i]
        p = row[j]
        inv = 1 / p
        for l in range(self.n):
            row[l] = row[l] * inv
        row[j] = inv
        b[i] = b[i] * inv
        bi = b[i]
        nz = [l for l in range(self.n) if row[l] != 0]
        for k in range(self.m):
            if k == i:
                continue
            rk = A[k]
            f = rk[j]
            if f == 0:
                continue
            for l in nz:
                if l != j:
                    rk[l] -= f * row[l]
            rk[j] = -f * inv
            b[k] -= f * bi
        f = c[j]
        if f != 0:
            for l in nz:
                if l != j:
                    c[l] -= f * row[l]
            c[j] = -f * inv
            self.z0 += f * bi
        self.nonbasic[j], self.basic[i] = self.basic[i], self.nonbasic[j]

    def primal(self):
        while True:
            cand = [(self.nonbasic[j], j) for j in range(self.n) if self.c[j] > 0]
            if not cand:
                return "optimal"
            _, j = min(cand)
            best = None
            for i in range(self.m):
                a = self.A[i][j]
                if a > 0:
                    key = (self.b[i] / a, self.basic[i], i)
                    if best is None or key < best:
                        best = key
            if best is None:
                return "unbounded"
            self.pivot(best[2], j)

    def dual(self):
        # requires all reduced costs <= 0
        while True:
            cand = [(self.basic[i], i) for i in range(self.m) if self.b[i] < 0]
            if not cand:
                return "optimal"
            _, i = min(cand)
            best = None
            row = self.A[i]
            for j in range(self.n):
                a = row[j]
                if a < 0:
                    key = (self.c[j] / a, self.nonbasic[j], j)
                    if best is None or key < best:
                        best = key
            if best is None:
                return "infeasible"
            self.pivot(i, best[2])

    def solution(self, nvars):
        x = [mpq(0)] * nvars
        for i, v in enumerate(self.basic):
            if v < nvars:
                x[v] = self.b[i]
        y = [mpq(0)] * self.m
        for j, v in enumerate(self.nonbasic):
            if v >= nvars:
                y[v - nvars] = -self.c[j]
        return x, y


def maximize(c: Sequence, A: Sequence[Sequence], b: Sequence) -> LPResult:
    """Exact optimum of ``max c.x, A x <= b, x >= 0``."""
    m, n = len(A), len(c)
    if m * max(n, 1) > MAX_CELLS:
        raise BudgetExceeded(f"LP with {m}x{n} tableau over the size budget")
    if n == 0:
        if any(v < 0 for v in b):
            return LPResult("infeasible", None, None, None)
        return LPResult("optimal", Fraction(0), [], [Fraction(0)] * m)
    d = _Dictionary(A, b, c)
    if any(v < 0 for v in d.b):
        if all(v <= 0 for v in d.c):
            st = d.dual()
            if st != "optimal":
                return LPResult(st, None, None, None)
        else:
            # phase one: a zero objective is dual feasible, so the dual simplex
            # finds a primal feasible basis; then reprice the real objective
            d.c = [mpq(0)] * n
            st = d.dual()
            if st != "optimal":
                return LPResult(st, None, None, None)
            orig = [mpq(v) for v in c]
            newc = [mpq(0)] * n
            z0 = mpq(0)
            for j, v in enumerate(d.nonbasic):
                if v < n:
                    newc[j] += orig[v]
            for i, v in enumerate(d.basic):
                if v < n and orig[v] != 0:
                    z0 += orig[v] * d.b[i]
                    row = d.A[i]
                    for j in range(n):
                        newc[j] -= orig[v] * row[j]
            d.c, d.z0 = newc, z0
    st = d.primal()
    if st != "optimal":
        return LPResult(st, None, None, None)
    x, y = d.solution(n)
    return LPResult("optimal", _frac(d.z0), [_frac(v) for v in x], [_frac(v) for v in y])


def minimize(c: Sequence, A: Sequence[Sequence], b: Sequence) -> LPResult:
    """Exact optimum of ``min c.x, A x >= b, x >= 0``.

    Duals are returned for the ``>=`` rows and are nonnegative.
    """
    neg = maximize([-v for v in c], [[-v for v in row] for row in A], [-v for v in b])
    if neg.status != "optimal":
        return neg
    return LPResult("optimal", -neg.value, neg.x, neg.y)
