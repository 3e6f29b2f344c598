"""Indexed trees of uniform depth and the composition operators on them.

A node is addressed by the tuple of edge labels on its root path. Labels out
of a node with ``a`` children are ``0..a-1`` and leaves are ordered
lexicographically, so for a uniform tree with level arities ``(a0, a1, ...)``
the leaf ``(i, j, ...)`` sits at the mixed-radix position with the root label
most significant.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Generic, List, Sequence, Tuple, TypeVar

import numpy as np

from .core import (
    LIMITS,
    Assignment,
    BoolFn,
    Selector,
    as_assignment,
    check_arity,
)
from .errors import ArityMismatch, BudgetExceeded, ParseError, PreconditionError

Node = Tuple[int, ...]
P = TypeVar("P")


class IndexedTree:
    """Rooted edge-labelled tree whose leaves all sit at one depth."""

    def __init__(self, arities: Dict[Node, int]):
        # arities maps every internal node to its child count; {} is the
        # depth-0 tree whose root is its only leaf
        self.arities = dict(arities)
        self.internal: List[Node] = []
        self.leaves: List[Node] = []
        self._first_leaf: Dict[Node, int] = {}
        self._walk(())
        depths = {len(l) for l in self.leaves}
        if len(depths) != 1:
            raise PreconditionError("indexed trees must have uniform depth")
        self.depth = depths.pop()
        self.leaf_index = {l: k for k, l in enumerate(self.leaves)}
        extra = set(self.arities) - set(self.internal)
        if extra:
            raise PreconditionError(f"nodes not reachable from the root: {sorted(extra)[:3]}")

    def _walk(self, v):
        self._first_leaf[v] = len(self.leaves)
        a = self.arities.get(v)
        if a is None:
            self.leaves.append(v)
            return
        if a < 1:
            raise PreconditionError(f"node {v} has arity {a}")
        self.internal.append(v)
        for i in range(a):
            self._walk(v + (i,))

    @classmethod
    def uniform(cls, level_arities: Sequence[int]):
        ar = {}
        frontier = [()]
        for a in level_arities:
            nxt = []
            for v in frontier:
                ar[v] = a
                nxt.extend(v + (i,) for i in range(a))
            frontier = nxt
        return cls(ar)

    @property
    def n_leaves(self):
        return len(self.leaves)

    def is_leaf(self, v):
        return v not in self.arities

    def children(self, v):
        return [v + (i,) for i in range(self.arities[v])]

    def leaf_span(self, v) -> Tuple[int, int]:
        """Half-open range of leaf positions below ``v``."""
        # leaves below v are contiguous; the last one is down the last child
        u = v
        while u in self.arities:
            u = u + (self.arities[u] - 1,)
        return self._first_leaf[v], self.leaf_index[u] + 1

    def level_nodes(self, m):
        return [v for v in self.internal if len(v) == m]

    def __eq__(self, other):
        return isinstance(other, IndexedTree) and self.arities == other.arities

    def __hash__(self):
        return hash(frozenset(self.arities.items()))

    def __repr__(self):
        return f"IndexedTree({to_itree(self)})"


def _node_to_text(tree, v):
    if tree.is_leaf(v):
        return None
    kids = [_node_to_text(tree, c) for c in tree.children(v)]
    if all(k is None for k in kids):
        return f"({tree.arities[v]})"
    return f"({tree.arities[v]} " + " ".join(kids) + ")"


def to_itree(tree: IndexedTree) -> str:
    if not tree.arities:
        return "()"
    return _node_to_text(tree, ())


def parse_itree(text: str) -> IndexedTree:
    """Parse the nested arity format, e.g. ``(2 (2) (2))``.

    A node written as ``(a)`` has ``a`` leaf children; otherwise it lists one
    sub-node per child. ``()`` is the single-leaf tree.
    """
    toks = re.findall(r"\(|\)|\d+|\S", text)
    pos = 0

    def expect(t):
        nonlocal pos
        if pos >= len(toks) or toks[pos] != t:
            got = toks[pos] if pos < len(toks) else "end of input"
            raise ParseError(f"expected {t!r}, got {got!r}")
        pos += 1

    ar: Dict[Node, int] = {}

    def node(v):
        nonlocal pos
        expect("(")
        if pos < len(toks) and toks[pos] == ")" and v == ():
            pos += 1
            return
        if pos >= len(toks) or not toks[pos].isdigit():
            raise ParseError("node must start with its arity")
        a = int(toks[pos])
        pos += 1
        if a < 1:
            raise ParseError("arity must be positive")
        ar[v] = a
        if toks[pos] == ")":
            pos += 1
            return
        for i in range(a):
            node(v + (i,))
        expect(")")

    node(())
    if pos != len(toks):
        raise ParseError(f"trailing tokens after tree: {toks[pos:]}")
    try:
        return IndexedTree(ar)
    except PreconditionError as e:
        raise ParseError(str(e)) from None


@dataclass(frozen=True)
class Ensemble(Generic[P]):
    """One payload per internal node of ``tree``."""

    tree: IndexedTree
    payload: Dict[Node, Any] = field(hash=False)

    def __post_init__(self):
        missing = [v for v in self.tree.internal if v not in self.payload]
        if missing:
            raise PreconditionError(f"ensemble lacks payload at node {missing[0]}")

    def __getitem__(self, v):
        return self.payload[v]

    @classmethod
    def uniform(cls, per_level: Sequence[Any], arity_of=None):
        """Payload ``per_level[m]`` at every level-m node.

        ``arity_of`` maps a payload to its index-set size; by default the
        payload's ``arity`` attribute or its ``len``.
        """
        def size(p):
            if arity_of is not None:
                return arity_of(p)
            if hasattr(p, "arity"):
                return p.arity
            if hasattr(p, "ground"):
                return p.ground
            return len(p)

        tree = IndexedTree.uniform([size(p) for p in per_level])
        return cls(tree, {v: per_level[len(v)] for v in tree.internal})

    def map(self, fn):
        return Ensemble(self.tree, {v: fn(v, p) for v, p in self.payload.items()})


def _check_sizes(ens, size_of):
    for v in ens.tree.internal:
        if size_of(ens.payload[v]) != ens.tree.arities[v]:
            raise ArityMismatch(
                f"payload at node {v} has size {size_of(ens.payload[v])}, node arity {ens.tree.arities[v]}"
            )


# weight functions are sequences of exact nonnegative numbers


def compose_weight(ens: Ensemble) -> Tuple[Fraction, ...]:
    """Leaf weight = product of the edge weights on its root path."""
    tree = ens.tree
    _check_sizes(ens, len)
    out: List[Fraction] = []

    def go(v, acc):
        if tree.is_leaf(v):
            out.append(acc)
            return
        w = ens.payload[v]
        for i, c in enumerate(tree.children(v)):
            go(c, acc * w[i])

    go((), Fraction(1))
    if all(x.denominator == 1 for x in out):
        return tuple(int(x) for x in out)
    return tuple(out)


def compose_subset(ens: Ensemble) -> int:
    """Composition of boolean weight functions given as bitmasks."""
    tree = ens.tree
    mask = 0

    def go(v):
        nonlocal mask
        if tree.is_leaf(v):
            mask |= 1 << tree.leaf_index[v]
            return
        m = ens.payload[v]
        for i, c in enumerate(tree.children(v)):
            if (m >> i) & 1:
                go(c)

    go(())
    return mask


def compose_hypergraph(ens: Ensemble, max_edges: int | None = None):
    """All compositions that pick one edge of each node's hypergraph."""
    from .hypergraph import Hypergraph

    tree = ens.tree
    limit = LIMITS.max_edges if max_edges is None else max_edges
    _check_sizes(ens, lambda h: h.ground)

    def go(v):
        if tree.is_leaf(v):
            return {1 << tree.leaf_index[v]}
        kids = tree.children(v)
        sub = {}
        result = set()
        for E in ens.payload[v].edges:
            acc = {0}
            for i, c in enumerate(kids):
                if (E >> i) & 1:
                    if c not in sub:
                        sub[c] = go(c)
                    acc = {a | b for a in acc for b in sub[c]}
                    if len(acc) > limit:
                        raise BudgetExceeded(f"composed hypergraph exceeds {limit} edges")
            result |= acc
            if len(result) > limit:
                raise BudgetExceeded(f"composed hypergraph exceeds {limit} edges")
        return result

    return Hypergraph(tree.n_leaves, go(()))


def _node_values(ens: Ensemble, leaf_vals):
    """Bottom-up evaluation; ``leaf_vals(k)`` gives the array for leaf k."""
    tree = ens.tree
    _check_sizes(ens, lambda f: f.arity)

    def go(v):
        if tree.is_leaf(v):
            return leaf_vals(tree.leaf_index[v])
        f = ens.payload[v]
        idx = None
        for i, c in enumerate(tree.children(v)):
            cv = go(c).astype(np.int64) << i
            idx = cv if idx is None else idx | cv
        return f.values[idx]

    return go(())


def compose_boolfn(ens: Ensemble, name: str = "") -> BoolFn:
    """Truth table of the circuit given by the ensemble."""
    L = ens.tree.n_leaves
    check_arity(L, "composed truth table")
    x = np.arange(1 << L, dtype=np.int64)
    vals = _node_values(ens, lambda k: ((x >> k) & 1).astype(bool))
    return BoolFn.from_values(vals, name)


def compose(f: BoolFn, g: BoolFn, name: str = "") -> BoolFn:
    """Uniform composition f∘g: g applied to each of n disjoint blocks."""
    ens = Ensemble.uniform([f, g])
    return compose_boolfn(ens, name or (f"{f.name}∘{g.name}" if f.name and g.name else ""))


def iterate(f: BoolFn, k: int) -> BoolFn:
    if k < 1:
        raise ValueError("k must be at least 1")
    ens = Ensemble.uniform([f] * k)
    return compose_boolfn(ens, f"{f.name}^({k})" if f.name else "")


def uniform_ensemble(fns: Sequence[BoolFn]) -> Ensemble:
    return Ensemble.uniform(list(fns))


@dataclass(frozen=True)
class TLabeling:
    tree: IndexedTree
    label: Dict[Node, int] = field(hash=False)

    def __getitem__(self, v):
        return self.label[v]

    @property
    def root(self):
        return self.label[()]

    def leaves(self) -> Assignment:
        bits = 0
        for k, l in enumerate(self.tree.leaves):
            bits |= self.label[l] << k
        return Assignment(self.tree.n_leaves, bits)

    def local(self, v) -> Assignment:
        """Assignment seen by node v: the labels of its children."""
        bits = 0
        for i, c in enumerate(self.tree.children(v)):
            bits |= self.label[c] << i
        return Assignment(self.tree.arities[v], bits)


def bottom_up(ens: Ensemble, x) -> TLabeling:
    tree = ens.tree
    x = as_assignment(x, tree.n_leaves)
    lab: Dict[Node, int] = {}

    def go(v):
        if tree.is_leaf(v):
            b = (x.bits >> tree.leaf_index[v]) & 1
        else:
            f = ens.payload[v]
            k = 0
            for i, c in enumerate(tree.children(v)):
                k |= go(c) << i
            if f.arity != tree.arities[v]:
                raise ArityMismatch(f"function at node {v} has the wrong arity")
            b = (f.table >> k) & 1
        lab[v] = b
        return b

    go(())
    return TLabeling(tree, lab)


def top_down(ens: Ensemble, c: int) -> TLabeling:
    tree = ens.tree
    _check_sizes(ens, lambda s: s.arity)
    lab: Dict[Node, int] = {(): int(c)}
    for v in tree.internal:  # preorder: parents come first
        a = ens.payload[v][lab[v]]
        for i, ch in enumerate(tree.children(v)):
            lab[ch] = (a.bits >> i) & 1
    return TLabeling(tree, lab)


def compose_selector(ens: Ensemble) -> Selector:
    return Selector(top_down(ens, 0).leaves(), top_down(ens, 1).leaves())


def compose_aw(pairs: Sequence[Tuple[Selector, Tuple[Sequence, Sequence]]]):
    """Compose AW selector-pairs level by level.

    ``pairs[m] = (sel_m, (w_m^0, w_m^1))``. Node v at level m of the uniform
    tree carries ``w_m^{b^c(v)}`` in the composition of ``w^c``, where b^c is
    the top-down labelling with root label c.
    """
    if not pairs:
        raise ValueError("need at least one level")
    for sel, (w0, w1) in pairs:
        if len(w0) != sel.arity or len(w1) != sel.arity:
            raise ArityMismatch("weight selector does not match selector arity")
    sel_ens = Ensemble.uniform([p[0] for p in pairs])
    tree = sel_ens.tree
    weights = []
    for c in (0, 1):
        lab = top_down(sel_ens, c)
        w_ens = Ensemble(tree, {v: pairs[len(v)][1][lab[v]] for v in tree.internal})
        weights.append(compose_weight(w_ens))
    return compose_selector(sel_ens), (weights[0], weights[1])
