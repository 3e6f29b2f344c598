import math
from fractions import Fraction

import numpy as np
import pytest

from boolcomp import lp, zoo
from boolcomp.assemblage import minblock_masks
from boolcomp.complimit import (
    _feasible,
    bs_lift_packing,
    bs_singleton_lift,
    charval,
    charval_selector,
    limit_convergence,
    matrix_facts_check,
    matprod,
    norm_inf,
    orbit_representatives,
    profile_family,
    rho2,
    rho_float,
    rho_le,
    rho_lt,
    sandwich_check,
    submult_property,
    supermult_property,
    symmetric_classes,
)
from boolcomp.core import Assignment, BoolFn, Selector, make_selector, named_fn
from boolcomp.errors import BudgetExceeded, ConstantFunctionError, IncompatibleSelector, PreconditionError
from boolcomp.measures import global_measure
from boolcomp.surd import Surd

F = Fraction


def test_rho2_examples():
    for n in range(1, 7):
        assert rho2([[0, n], [1, 0]]) == Surd.sqrt(n)
    assert rho2([[1, 0], [0, 1]]) == 1
    assert rho2([[2, 1], [1, 2]]) == 3
    with pytest.raises(PreconditionError):
        rho2([[-1, 0], [0, 1]])


def test_rho_thresholds_against_float():
    rng = zoo.rng_for(1)
    for _ in range(10_000):
        M = [[F(int(v), 3) for v in rng.integers(0, 10, size=2)] for _ in range(2)]
        lam = F(int(rng.integers(0, 40)), 4)
        r = float(np.max(np.abs(np.linalg.eigvals(np.array(M, dtype=float)))))
        if abs(r - float(lam)) > 1e-12:
            assert rho_le(M, lam) == (r <= float(lam))
            assert rho_lt(M, lam) == (r < float(lam))
        assert abs(rho_float(M) - r) <= 1e-12 * max(1, r)


def test_matrix_facts():
    z = matrix_facts_check([[0, 0], [0, 0]])
    assert z["norm_bound_holds"] and z["power_estimate_holds"]
    r = matrix_facts_check([[0, 4], [1, 0]])
    assert r["rho"] == 2 and r["norm"] == 4 and r["norm_bound_holds"]
    rng = zoo.rng_for(2)
    for _ in range(3):
        M = [[F(int(v), 2) for v in rng.integers(0, 7, size=2)] for _ in range(2)]
        r = matrix_facts_check(M)
        assert r["norm_bound_holds"] and r["power_estimate_holds"]


def test_profile_family_examples():
    for n in range(2, 6):
        f = named_fn("NAND", n)
        ones = (1 << n) - 1
        assert profile_family(f, ones, "C").points == ((0, n),)
        assert (1, 0) in profile_family(f, ones ^ 1, "C").points
    assert profile_family(named_fn("OR", 2), 0, "CStar").points == ((2, 0),)
    assert profile_family(named_fn("PARITY", 3), 0b101, "s").points == ((1, 2),)


def _witness_lp_min(f, x, c0, c1):
    n = f.arity
    edges = sorted(minblock_masks(f, x))
    A = [[(e >> i) & 1 for i in range(n)] for e in edges]
    cost = [c1 if (x >> i) & 1 else c0 for i in range(n)]
    return lp.minimize(cost, A, [1] * len(A)).value


def test_cstar_frontier_support_values():
    # the frontier must reproduce the witness LP's support value in every
    # nonnegative direction, and be convex, strictly monotone
    dirs = [(1, 0), (0, 1), (1, 1), (2, 1), (1, 3), (5, 2), (1, 7)]
    for seed in range(10):
        f = zoo.random_function(2 + seed % 4, seed)
        for x in range(0, f.size, max(1, f.size // 6)):
            pts = profile_family(f, x, "CStar").points
            for a, b in zip(pts, pts[1:]):
                assert a[0] > b[0] and a[1] < b[1]
            for c0, c1 in dirs:
                if c0 == 0 or c1 == 0:
                    continue
                assert min(c0 * p + c1 * q for p, q in pts) == _witness_lp_min(f, x, c0, c1)


def test_c_family_is_pareto_of_hitting_sets():
    from itertools import combinations

    for seed in range(6):
        f = zoo.random_function(4, seed)
        for x in range(16):
            edges = minblock_masks(f, x)
            pts = set()
            for S in range(16):
                if all(e & S for e in edges):
                    pts.add((bin(S & ~x & 15).count("1"), bin(S & x).count("1")))
            pareto = {p for p in pts if not any(q != p and q[0] <= p[0] and q[1] <= p[1] for q in pts)}
            assert set(profile_family(f, x, "C").points) == pareto


def test_charval_examples(bublitz):
    assert charval(named_fn("NAND", 2), "C").value == Surd.sqrt(2)
    assert charval(bublitz, "C").value == 5
    cs = charval(bublitz, "CStar")
    assert F(9, 2) - F(1, 10**9) <= cs.lo <= F(9, 2) <= cs.hi <= F(9, 2) + F(1, 10**9)
    with pytest.raises(ConstantFunctionError):
        charval(named_fn("CONST1", 2), "C")
    with pytest.raises(PreconditionError):
        charval(bublitz, "bs")


def test_charval_selector_examples():
    for n in range(2, 6):
        f = named_fn("NAND", n)
        ones = (1 << n) - 1
        cv = charval_selector(f, make_selector(ones, ones ^ 1, n), "C")
        assert cv.value == Surd.sqrt(n)
    g = zoo.build_grouped(16).fn
    cv = charval_selector(g, make_selector(0, 0b1111, 16), "C")
    assert cv.value == 10 == rho2([[10, 0], [8, 4]])
    with pytest.raises(IncompatibleSelector):
        charval_selector(named_fn("OR", 2), make_selector(1, 0, 2), "C")
    cv = charval_selector(named_fn("PARITY", 3), make_selector(0, 1, 3), "s")
    assert cv.value == 3


def test_charval_matches_unreduced_search():
    # orbit reduction and family deduplication must not change the answer
    for seed in range(8):
        f = zoo.random_function(3 + seed % 2, seed)
        for m in ("s", "C"):
            best = None
            for a0 in range(f.size):
                for a1 in range(f.size):
                    if f(a0) == 0 and f(a1) == 1:
                        v = charval_selector(f, make_selector(a0, a1, f.arity), m).value
                        best = v if best is None or v > best else best
            assert charval(f, m).value == best
        lo = max(charval_selector(f, make_selector(a0, a1, f.arity), "CStar").lo
                 for a0 in range(f.size) for a1 in range(f.size) if f(a0) == 0 and f(a1) == 1)
        cs = charval(f, "CStar")
        assert abs(cs.lo - lo) <= F(1, 10**9)


def test_charval_bounds_and_containment():
    fns = [zoo.random_function(n, s) for n in range(2, 6) for s in range(3)] + [named_fn("MAJ", 3)]
    for f in fns:
        c = charval(f, "C")
        cs = charval(f, "CStar")
        s = charval(f, "s")
        assert cs.lo <= c.hi + F(1, 10**9)
        for m, cv in (("s", s), ("C", c), ("CStar", cs)):
            g = global_measure(f, m)
            assert min(g.m0, g.m1) <= cv.hi + F(1, 10**9)
            assert cv.lo <= g.m


def test_symmetry_reduction():
    g = zoo.build_grouped(16).fn
    classes = symmetric_classes(g)
    assert sorted(len(c) for c in classes) == [8, 8]
    reps = orbit_representatives(g, 0) + orbit_representatives(g, 1)
    assert len(reps) == 81
    assert symmetric_classes(named_fn("PARITY", 4)) == [[0, 1, 2, 3]]


def test_feasibility_oracle_basics():
    F0 = ((F(9, 2), F(0)),)
    F1 = ((F(0), F(9, 2)),)
    assert _feasible(F0, F1, F(9, 2))
    assert not _feasible(F0, F1, F(4))


def test_sandwich_examples():
    nand = named_fn("NAND", 2)
    for k in (1, 2, 3, 4):
        r = sandwich_check(nand, "C", k)
        assert r["holds"]
    f = zoo.random_nonmonotone(3, 0)
    assert sandwich_check(f, "C", 2)["holds"]
    with pytest.raises(BudgetExceeded):
        sandwich_check(nand, "C", 5)


def test_supermult_examples():
    M = ((F(2), F(1)), (F(1), F(2)))
    assert supermult_property([M], 3)["conclusion"]
    r = supermult_property([M] * 4, 3)
    assert r["hypothesis"] and r["conclusion"]
    assert rho2(matprod([M] * 4)) == 81
    assert not supermult_property([M], 4)["hypothesis"]


def test_submult_examples(bublitz):
    r = submult_property([([(1, 1)], [(1, 1)])], 2)
    assert r["hypothesis"] and r["holds"]
    cs = charval(bublitz, "CStar")
    fr = cs.frontiers
    for k in range(1, 7):
        r = submult_property([fr] * k, F(9, 2), bound_n=6)
        assert r["hypothesis"] and r["holds"]
        assert r["norm"] <= 6 * k * F(9, 2) ** (k - 1) + F(9, 2) ** k


def test_literal_norm_bound_counterexample():
    # one matrix already breaks ||M||_inf <= n
    r = submult_property([([(1, 6)], [(0, 1)])], 1, bound_n=6)
    assert r["hypothesis"] and r["rho_holds"]
    assert not r["literal_norm_holds"] and r["holds"]


def test_bs_lift_examples(bublitz):
    r = bs_lift_packing(bublitz, bublitz, 0)
    assert r.verified and r.size == 18 and r.X.arity == 36 and r.M == 4
    r = bs_lift_packing(named_fn("OR", 2), named_fn("OR", 2), 0)
    assert r.verified and r.size == 2
    s = bs_singleton_lift(bublitz, bublitz, 0)
    assert s.verified and s.size >= 4
    with pytest.raises(ConstantFunctionError):
        bs_lift_packing(bublitz, named_fn("CONST0", 2), 0)


def test_limit_convergence_examples(bublitz):
    t = limit_convergence(named_fn("NAND", 2), "C", 4)
    assert t["holds"] and len(t["rows"]) == 4
    t = limit_convergence(named_fn("PARITY", 2), "s", 4)
    assert [r["value"] for r in t["rows"]] == [2, 4, 8, 16]
    t = limit_convergence(bublitz, "bs", 3)
    vals = [r["value"] for r in t["rows"]]
    assert vals[0] == 4 and vals[1] >= 18 and vals[2] >= 81
    assert math.isclose(t["target"], 4.5, abs_tol=1e-9)
