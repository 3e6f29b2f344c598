from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from boolcomp import lp
from boolcomp import hypergraph as hg
from boolcomp.assemblage import minblocks
from boolcomp.core import set_limits, LIMITS
from boolcomp.errors import BudgetExceeded
from boolcomp.zoo import star_points
from conftest import brute_nu, brute_tau

F = Fraction


def k5_stars():
    return hg.Hypergraph(10, star_points(5))


def test_lp_small():
    # max x + y, x + 2y <= 4, 3x + y <= 6
    r = lp.maximize([1, 1], [[1, 2], [3, 1]], [4, 6])
    assert r.status == "optimal" and r.value == F(14, 5)
    assert r.x == [F(8, 5), F(6, 5)]
    # the dual certifies the optimum
    assert sum(y * b for y, b in zip(r.y, [4, 6])) == r.value


def test_lp_unbounded_and_infeasible():
    assert lp.maximize([1, 0], [[0, 1]], [1]).status == "unbounded"
    assert lp.maximize([1], [[1], [-1]], [1, -2]).status == "infeasible"


def test_lp_minimize_cover():
    r = lp.minimize([1, 1, 1], [[1, 1, 0], [0, 1, 1], [1, 0, 1]], [1, 1, 1])
    assert r.value == F(3, 2)


def test_star_parameters():
    H = k5_stars()
    assert hg.nu(H)[0] == 1 == brute_nu(H.edges, 10)
    assert hg.nu_star(H)[0] == F(5, 2)
    assert hg.tau_star(H)[0] == F(5, 2)
    v, cert = hg.tau(H)
    assert v == brute_tau(H.edges, 10) == 3
    assert cert.validate(H)


def test_star_tau_star_uniform_weights():
    H = k5_stars()
    w = [F(1, 4)] * 10
    assert hg.CoverCert(tuple(w), "fractional").validate(H)
    assert sum(w) == F(5, 2)


def test_trivial_hypergraphs():
    assert hg.nu(hg.Hypergraph(3, [{0}, {1}, {2}]))[0] == 3
    assert hg.nu_star(hg.Hypergraph(2, [{0}, {1}]))[0] == 2
    assert hg.tau(hg.Hypergraph(2, [{0, 1}]))[0] == 1
    assert hg.tau_star(hg.Hypergraph(2, [{0}, {0, 1}]))[0] == 1


def test_empty_hypergraph():
    H = hg.Hypergraph(3, [])
    for fn in (hg.nu, hg.nu_star, hg.tau, hg.tau_star):
        assert fn(H)[0] == 0
    assert hg.nu_M(H, 3)[0] == 0


def test_bublitz_parameters(bublitz):
    for x in (0, 17, 63):
        H = minblocks(bublitz, x).hypergraph
        assert hg.nu(H)[0] == 4
        assert hg.nu_star(H)[0] == F(9, 2)
        assert hg.tau(H)[0] == 5
        assert hg.nu_M(H, 1)[0] == 4
        assert hg.nu_M(H, 2)[0] == 9
        assert hg.nu_M(H, 4)[0] == 18


def _random_hypergraph(data, ground):
    edges = data.draw(st.lists(st.integers(1, (1 << ground) - 1), min_size=0, max_size=7))
    return hg.Hypergraph(ground, edges)


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_chain_and_certificates(data):
    ground = data.draw(st.integers(1, 6))
    H = _random_hypergraph(data, ground)
    n, pc = hg.nu(H)
    ns, psc = hg.nu_star(H)
    ts, tsc = hg.tau_star(H)
    t, tc = hg.tau(H)
    assert n <= ns == ts <= t
    assert n == brute_nu(H.minimal().edges, ground)
    assert t == brute_tau(H.edges, ground)
    for cert in (pc, psc):
        assert cert.validate(H)
    for cert in (tsc, tc):
        assert cert.validate(H)
    assert pc.value == n and tc.value == t


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_minimal_reduction_invariance(data):
    ground = data.draw(st.integers(1, 6))
    H = _random_hypergraph(data, ground)
    D = H.minimal()
    assert hg.nu(H)[0] == hg.nu(D)[0]
    assert hg.nu_star(H)[0] == hg.nu_star(D)[0]
    assert hg.tau(H)[0] == hg.tau(D)[0]
    assert hg.tau_star(H)[0] == hg.tau_star(D)[0]
    assert hg.nu_M(H, 2)[0] == hg.nu_M(D, 2)[0]


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_fold_packing_monotone(data):
    ground = data.draw(st.integers(1, 5))
    H = _random_hypergraph(data, ground)
    ns = hg.nu_star(H)[0]
    prev = None
    for M in (1, 2, 4, 8):
        v = hg.nu_M(H, M)[0]
        assert F(v, M) <= ns
        if prev is not None:
            assert v >= 2 * prev  # superadditivity along doubling
        prev = v
    if H.edges:
        # an optimal fractional packing scaled by the lcm of its denominators is integral
        _, cert = hg.nu_star(H)
        from math import lcm

        L = lcm(*(F(m).denominator for _, m in cert.multiplicities)) if cert.multiplicities else 1
        assert hg.nu_M(H, L)[0] == ns * L


def test_edge_budget():
    saved = LIMITS.max_edges
    try:
        set_limits(max_edges=2)
        with pytest.raises(BudgetExceeded):
            hg.Hypergraph(3, [1, 2, 4])
    finally:
        set_limits(max_edges=saved)


def test_certificate_json():
    H = hg.Hypergraph(2, [{0}, {1}])
    _, c = hg.nu_star(H)
    js = c.to_json()
    assert js["kind"] == "fractional" and len(js["blocks"]) == 2
