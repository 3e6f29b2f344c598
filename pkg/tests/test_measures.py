from fractions import Fraction

import numpy as np
import pytest

from boolcomp import zoo
from boolcomp.core import BoolFn, named_fn
from boolcomp.errors import BudgetExceeded, PreconditionError
from boolcomp.measures import (
    INV_E,
    certificate_all,
    chain_at,
    global_measure,
    local,
    measure_id,
    or_compose_check,
    rc_verifier_check,
)
from conftest import brute_minblocks, brute_nu, brute_tau

F = Fraction


def test_measure_ids():
    assert measure_id("cstar") == "CStar" and measure_id("bs*") == "bsStar"
    with pytest.raises(ValueError):
        measure_id("D")


def test_local_examples(bublitz):
    assert local(bublitz, 9, "bs").value == 4
    assert local(bublitz, 9, "CStar").value == F(9, 2)
    assert local(bublitz, 9, "C").value == 5
    for n in range(1, 6):
        assert local(named_fn("OR", n), 0, "C").value == n
        assert local(named_fn("PARITY", n), 3 % (1 << n), "s").value == n
    with pytest.raises(PreconditionError):
        local(bublitz, 0, "bsM")


def test_global_examples(bublitz):
    r = global_measure(named_fn("OR", 2), "C")
    assert (r.m0, r.m1, r.m, r.argmax0, r.argmax1) == (2, 1, 2, 0, 1)
    for m, v in (("bs", 4), ("bsStar", F(9, 2)), ("CStar", F(9, 2)), ("C", 5)):
        r = global_measure(bublitz, m)
        assert r.m0 == r.m1 == v


def test_global_table_and_argmax():
    f = zoo.random_function(5, 4)
    r = global_measure(f, "C", with_table=True)
    for b, (mv, arg) in enumerate(((r.m0, r.argmax0), (r.m1, r.argmax1))):
        vals = [r.table[x] for x in range(f.size) if f(x) == b]
        assert mv == max(vals)
        assert arg == min(x for x in range(f.size) if f(x) == b and r.table[x] == mv)


def test_grouped_certificate_at_zero():
    f = zoo.build_grouped(16).fn
    assert local(f, 0, "C").value == 10
    assert certificate_all(f)[0] == 10


def test_constant_function_measures():
    r = global_measure(named_fn("CONST1", 3), "bs")
    assert r.m == 0
    assert local(named_fn("CONST0", 2), 1, "C").value == 0


def test_certificate_all_vs_tau():
    for seed in range(12):
        f = zoo.random_function(1 + seed % 6, seed)
        ca = certificate_all(f)
        for x in range(f.size):
            assert ca[x] == brute_tau(brute_minblocks(f, x), f.arity)


def test_pruned_global_matches_plain():
    f = zoo.random_function(7, 1)
    for m in ("bs", "bsStar", "CStar"):
        plain = global_measure(f, m, with_table=True)
        fast = global_measure(f, m)
        assert (plain.m0, plain.m1, plain.argmax0, plain.argmax1) == (fast.m0, fast.m1, fast.argmax0, fast.argmax1)


def test_sampled_global_is_lower_bound():
    f = zoo.random_function(8, 2)
    full = global_measure(f, "C")
    part = global_measure(f, "C", sample=(20, 1))
    assert not part.exact and part.m <= full.m
    assert global_measure(f, "C", sample=(20, 1)).to_json() == part.to_json()


def test_chain_exhaustive_small_arity():
    fns = [f for f in zoo.small_zoo() if f.arity <= 5]
    fns += [zoo.random_function(n, s) for n in range(2, 7) for s in range(3)]
    for f in fns:
        for x in range(f.size):
            chain_at(f, x)


def test_chain_sampled_arity_12():
    rng = zoo.rng_for(3)
    f = zoo.random_function(12, 5)
    for x in rng.integers(0, f.size, size=8):
        chain_at(f, int(x))


def test_fold_superadditivity(bublitz):
    f = zoo.random_function(5, 8)
    for x in (0, 7, 19):
        for M in (1, 2, 3):
            base = local(f, x, "bsM", M).value
            for k in (1, 2, 3):
                assert local(f, x, "bsM", k * M).value >= k * base


def test_monotone_bs_equals_c():
    rng = zoo.rng_for(4)
    checked = 0
    while checked < 6:
        n = 4
        # random monotone function: upward closure of random minterms
        seeds = [int(v) for v in rng.integers(0, 1 << n, size=3)]
        f = BoolFn.from_predicate(n, lambda x: any(x & s == s for s in seeds))
        if f.is_constant:
            continue
        assert zoo.is_monotone(f)
        assert global_measure(f, "bs").m == global_measure(f, "C").m
        checked += 1


def test_or_compose_examples(bublitz):
    r = or_compose_check(named_fn("AND", 2), 2)
    assert r["holds"]
    # AND_2 at 11: both single flips are blocks, so bs_1 = 2; bs_0 = 1
    and2 = named_fn("AND", 2)
    assert brute_nu(brute_minblocks(and2, 0b11), 2) == 2
    assert max(brute_nu(brute_minblocks(and2, x), 2) for x in (0, 1, 2)) == 1
    assert r["measures"]["bs"]["m0_f"] == 2 and r["measures"]["bs"]["m1_f"] == 2
    r = or_compose_check(named_fn("PARITY", 2), 3)
    assert r["holds"] and r["measures"]["C"]["m0_f"] == 6 and r["measures"]["C"]["m1_f"] == 2


def test_rc_verifier(bublitz):
    r = rc_verifier_check(named_fn("OR", 2), 0)
    assert r["sigma"] == [1, 1] and all(p == 0 for _, p in r["acceptance"])
    for z in (0, 42):
        r = rc_verifier_check(bublitz, z)
        assert r["expected_queries"] == F(9, 2)
        assert r["max_acceptance"] <= INV_E
        assert r["sound"]
    r = rc_verifier_check(named_fn("CONST0", 2), 0)
    assert r["sound"] and r["acceptance"] == []


def test_rc_verifier_doubled_weights():
    # doubling an optimal witness makes every block weigh at least 2, so the
    # acceptance on a block flip is at most 1/2 whenever the block has a
    # weight-1 index, and at most (1/2)^... otherwise
    f = zoo.random_function(5, 2)
    for z in range(0, 32, 5):
        r = rc_verifier_check(f, z, scale=2)
        assert r["rejects_half"]
        for B, p in r["acceptance"]:
            idx = [i for i in range(5) if (B >> i) & 1]
            want = F(1)
            for i in idx:
                want *= 1 - r["sigma"][i]
            assert p == want <= F(1, 2)


def test_arity_budget():
    f = zoo.random_function(6, 0)
    from boolcomp.core import LIMITS, set_limits

    saved = LIMITS.max_arity
    try:
        set_limits(max_arity=5)
        with pytest.raises(BudgetExceeded):
            global_measure(f, "C")
    finally:
        set_limits(max_arity=saved)
