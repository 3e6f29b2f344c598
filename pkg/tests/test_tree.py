from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from boolcomp import zoo
from boolcomp.complimit import matprod, profile_matrix
from boolcomp.core import Assignment, BoolFn, Selector, is_f_compatible, make_selector, named_fn
from boolcomp.errors import ParseError, PreconditionError
from boolcomp.hypergraph import Hypergraph
from boolcomp.tree import (
    Ensemble,
    IndexedTree,
    bottom_up,
    compose,
    compose_aw,
    compose_boolfn,
    compose_hypergraph,
    compose_selector,
    compose_subset,
    compose_weight,
    iterate,
    parse_itree,
    to_itree,
    top_down,
)

F = Fraction


def test_uniform_tree_layout():
    t = IndexedTree.uniform([2, 3])
    assert t.n_leaves == 6 and t.depth == 2
    assert t.leaf_index[(1, 2)] == 5
    assert t.leaf_span((1,)) == (3, 6)


def test_tree_requires_uniform_depth():
    with pytest.raises(PreconditionError):
        IndexedTree({(): 2, (0,): 2})


def test_itree_roundtrip():
    t = parse_itree("(2 (2) (2))")
    assert t == IndexedTree.uniform([2, 2])
    assert to_itree(t) == "(2 (2) (2))"
    assert parse_itree("()").n_leaves == 1
    assert parse_itree("(3)").n_leaves == 3
    het = parse_itree("(2 (1) (3))")
    assert het.n_leaves == 4 and parse_itree(to_itree(het)) == het


@pytest.mark.parametrize("text", ["(2 (2)", "(2 (2) (2) (2))", "(x)", "2", "(2 (2) ((2)))"])
def test_itree_rejects(text):
    with pytest.raises(ParseError):
        parse_itree(text)


def test_compose_weight_examples():
    one = Ensemble.uniform([(F(1, 2), F(2))])
    assert compose_weight(one) == (F(1, 2), F(2))
    t = IndexedTree.uniform([2, 2])
    ens = Ensemble(t, {(): (2, 0), (0,): (3, 5), (1,): (7, 11)})
    assert compose_weight(ens) == (6, 10, 0, 0)
    d = 3
    ens = Ensemble.uniform([(1, 1), tuple([F(1, d)] * d)])
    assert compose_weight(ens) == tuple([F(1, d)] * 6)


def test_compose_subset():
    t = IndexedTree.uniform([2, 2])
    ens = Ensemble(t, {(): 0b10, (0,): 0b11, (1,): 0b01})
    assert compose_subset(ens) == 0b0100


def test_compose_hypergraph_examples():
    H = Hypergraph(2, [{0}, {1}])
    assert compose_hypergraph(Ensemble.uniform([H])).edges == H.edges
    # root {{a},{b}}, single-child subtrees {{x}}
    t = IndexedTree.uniform([2, 1])
    ens = Ensemble(t, {(): H, (0,): Hypergraph(1, [{0}]), (1,): Hypergraph(1, [{0}])})
    assert compose_hypergraph(ens).edges == {0b01, 0b10}
    # root {{a,b}}, subtrees {{x},{y}}
    t = IndexedTree.uniform([2, 2])
    sub = Hypergraph(2, [{0}, {1}])
    ens = Ensemble(t, {(): Hypergraph(2, [{0, 1}]), (0,): sub, (1,): sub})
    assert compose_hypergraph(ens).edges == {0b0101, 0b1001, 0b0110, 0b1010}


def test_compose_boolfn_examples():
    or2 = named_fn("OR", 2)
    assert compose(or2, or2).table == named_fn("OR", 4).table
    nand = named_fn("NAND", 2)
    direct = BoolFn.from_predicate(
        4, lambda k: 1 - ((1 - ((k & 1) & (k >> 1) & 1)) & (1 - ((k >> 2) & (k >> 3) & 1)))
    )
    assert iterate(nand, 2).table == direct.table
    assert iterate(nand, 1) == nand


def test_associativity():
    for seed in range(5):
        f, g, h = (zoo.random_function(2, seed * 3 + i) for i in range(3))
        assert compose(compose(f, g), h).table == compose(f, compose(g, h)).table


def test_bottom_up_examples(bublitz):
    assert bottom_up(Ensemble.uniform([named_fn("OR", 2)]), 0b10).root == 1
    ens = Ensemble.uniform([bublitz, bublitz])
    assert bottom_up(ens, 0).root == 0


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_bottom_up_matches_table(seed):
    rng = zoo.rng_for(seed)
    ens = zoo.random_ensemble(rng, max_leaves=10)
    F_ = compose_boolfn(ens)
    x = int(rng.integers(0, F_.size))
    assert bottom_up(ens, x).root == F_(x)


def test_top_down_depth_one():
    sel = make_selector(0b11, 0b01, 2)
    ens = Ensemble.uniform([sel], arity_of=lambda s: s.arity)
    assert top_down(ens, 1).leaves() == sel.alpha1
    assert compose_selector(ens) == sel


def test_top_down_equal_selectors():
    a = Assignment(2, 0b10)
    ens = Ensemble.uniform([Selector(a, a), Selector(a, a)], arity_of=lambda s: s.arity)
    lab = top_down(ens, 0)
    assert lab.leaves() == Assignment(4, 0b1010)


def test_or_selector_composition():
    sel = make_selector(0b00, 0b01, 2)
    ens = Ensemble.uniform([sel, sel], arity_of=lambda s: s.arity)
    s = compose_selector(ens)
    assert s.alpha0 == Assignment(4, 0)
    assert s.alpha1 == Assignment(4, 0b0001)


def _random_compatible(rng, fn_ens):
    out = {}
    for v in fn_ens.tree.internal:
        f = fn_ens.payload[v]
        zeros = np.flatnonzero(~f.values)
        ones = np.flatnonzero(f.values)
        out[v] = make_selector(int(rng.choice(zeros)), int(rng.choice(ones)), f.arity)
    return Ensemble(fn_ens.tree, out)


def test_t_labeling_proposition():
    rng = zoo.rng_for(11)
    for _ in range(100):
        fn_ens = zoo.random_ensemble(rng, max_leaves=16)
        sel_ens = _random_compatible(rng, fn_ens)
        F_ = compose_boolfn(fn_ens)
        for c in (0, 1):
            lab = top_down(sel_ens, c)
            assert bottom_up(fn_ens, lab.leaves()).label == lab.label
        assert is_f_compatible(F_, compose_selector(sel_ens))


def test_compose_aw_nand_example():
    sel = make_selector(0b11, 0b10, 2)  # alpha1 has x_0 = 0
    w0, w1 = (1, 1), (1, 0)
    assert profile_matrix(sel, w0, w1) == ((0, 2), (1, 0))
    s, (W0, W1) = compose_aw([(sel, (w0, w1))] * 2)
    assert (sum(W0), sum(W1)) == (2, 2)
    s1, ws = compose_aw([(sel, (w0, w1))])
    assert s1 == sel and ws == (w0, w1)


def test_profile_matrix_product_law():
    rng = zoo.rng_for(5)
    for _ in range(100):
        k = int(rng.integers(1, 5))
        n = int(rng.integers(1, 3))
        pairs = []
        for _ in range(k):
            a0, a1 = (int(v) for v in rng.integers(0, 1 << n, size=2))
            sel = make_selector(a0, a1, n)
            ws = tuple(tuple(F(int(v), 2) for v in rng.integers(0, 4, size=n)) for _ in range(2))
            pairs.append((sel, ws))
        s, (W0, W1) = compose_aw(pairs)
        got = profile_matrix(s, W0, W1)
        want = matprod([profile_matrix(sel, *ws) for sel, ws in pairs])
        assert got == want
