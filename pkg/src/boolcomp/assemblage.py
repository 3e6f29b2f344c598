"""Min-blocks, witnesses and sensitivity of a function at an input, plus the
composition and decomposition of hitting sets over indexed trees."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, List, Sequence

import numpy as np

from .core import (
    Assignment,
    BoolFn,
    as_assignment,
    check_arity,
    mask_indices,
    popcount,
)
from .errors import PreconditionError
from .hypergraph import Hypergraph
from .tree import Ensemble, bottom_up, compose_hypergraph, compose_weight

SPARSE_LIMIT = 4096


@dataclass(frozen=True)
class BlockSet:
    f: BoolFn
    x: Assignment
    minblocks: FrozenSet[int]

    @property
    def hypergraph(self) -> Hypergraph:
        return Hypergraph(self.x.arity, self.minblocks)

    def __len__(self):
        return len(self.minblocks)


@dataclass(frozen=True)
class SensSet:
    f: BoolFn
    x: Assignment
    mask: int

    @property
    def indices(self):
        return mask_indices(self.mask)

    def __len__(self):
        return popcount(self.mask)


def _subset_or(a: np.ndarray, n: int) -> np.ndarray:
    """g[S] = OR of a[B] over B subset of S (zeta transform over OR)."""
    g = a.copy()
    for i in range(n):
        v = g.reshape(-1, 2, 1 << i)
        v[:, 1, :] |= v[:, 0, :]
    return g


def _shadow(g: np.ndarray, n: int) -> np.ndarray:
    """h[B] = OR of g[B minus i] over i in B."""
    h = np.zeros_like(g)
    for i in range(n):
        gv = g.reshape(-1, 2, 1 << i)
        hv = h.reshape(-1, 2, 1 << i)
        hv[:, 1, :] |= gv[:, 0, :]
    return h


def minimal_masks(masks) -> List[int]:
    keep: List[int] = []
    for m in sorted(set(masks), key=lambda e: (popcount(e), e)):
        if not any((k & m) == k for k in keep):
            keep.append(m)
    return keep


def minblock_masks(f: BoolFn, x: int) -> FrozenSet[int]:
    n = f.arity
    fx = (f.table >> x) & 1
    vals = f.values
    opp_count = f.ones_count if fx == 0 else f.size - f.ones_count
    if opp_count == 0:
        return frozenset()
    if opp_count <= SPARSE_LIMIT:
        ys = np.flatnonzero(vals != bool(fx))
        return frozenset(minimal_masks(int(y) ^ x for y in ys))
    check_arity(n, "min-block enumeration")
    idx = np.arange(f.size, dtype=np.int64) ^ x
    blk = vals[idx] != bool(fx)
    g = _subset_or(blk, n)
    minimal = blk & ~_shadow(g, n)
    return frozenset(int(b) for b in np.flatnonzero(minimal))


def minblocks(f: BoolFn, x) -> BlockSet:
    """All inclusion-minimal blocks of f at x."""
    a = as_assignment(x, f.arity)
    return BlockSet(f, a, minblock_masks(f, a.bits))


def sensitive_mask(f: BoolFn, x: int) -> int:
    fx = (f.table >> x) & 1
    m = 0
    for i in range(f.arity):
        if ((f.table >> (x ^ (1 << i))) & 1) != fx:
            m |= 1 << i
    return m


def sensitive_set(f: BoolFn, x) -> SensSet:
    a = as_assignment(x, f.arity)
    return SensSet(f, a, sensitive_mask(f, a.bits))


def sensitivity_all(f: BoolFn) -> np.ndarray:
    """s_x(f) for every input x at once."""
    v = f.values
    x = np.arange(f.size, dtype=np.int64)
    s = np.zeros(f.size, dtype=np.int64)
    for i in range(f.arity):
        s += v != v[x ^ (1 << i)]
    return s


def is_hitting(H: Hypergraph, w: Sequence, fractional: bool = True) -> bool:
    if len(w) != H.ground:
        return False
    w = [Fraction(v) for v in w]
    if any(v < 0 for v in w):
        return False
    if not fractional and any(v not in (0, 1) for v in w):
        return False
    return all(sum((w[i] for i in mask_indices(e)), Fraction(0)) >= 1 for e in H.edges)


def witness_check(f: BoolFn, x, w: Sequence, fractional: bool = True) -> bool:
    """Is w a (fractional) witness for f at x?

    Fractional witnesses take values in [0, 1]; boolean ones in {0, 1}.
    """
    if len(w) != f.arity:
        return False
    if any(Fraction(v) > 1 for v in w):
        return False
    return is_hitting(minblocks(f, x).hypergraph, w, fractional)


def minblocks_composed(ens: Ensemble, x, max_edges=None) -> BlockSet:
    """Min-blocks of the composed function without building its table.

    Each node contributes its own min-blocks at the assignment its children
    receive in the bottom-up labelling; the result is their tree composition.
    """
    lab = bottom_up(ens, x)
    tree = ens.tree
    local = {}
    for v in tree.internal:
        fv = ens.payload[v]
        local[v] = Hypergraph(fv.arity, minblock_masks(fv, lab.local(v).bits))
    H = compose_hypergraph(Ensemble(tree, local), max_edges)
    return BlockSet(None, lab.leaves(), H.edges)


def local_hypergraphs(ens: Ensemble, x) -> Ensemble:
    lab = bottom_up(ens, x)
    return Ensemble(
        ens.tree,
        {v: Hypergraph(ens.payload[v].arity, minblock_masks(ens.payload[v], lab.local(v).bits))
         for v in ens.tree.internal},
    )


def compose_hitting(ens: Ensemble, targets: Ensemble):
    """Compose per-node fractional hitting sets into one for the composed hypergraph."""
    if ens.tree != targets.tree:
        raise PreconditionError("hitting sets and targets live on different trees")
    for v in ens.tree.internal:
        if not is_hitting(targets.payload[v], ens.payload[v]):
            raise PreconditionError(f"payload at node {v} does not hit its hypergraph")
    return compose_weight(ens)


def decompose_hitting(h: Sequence, targets: Ensemble) -> Ensemble:
    """Split a hitting set of the composed hypergraph into per-node hitting sets.

    Top down: a child's weight is min(1, lightest composed edge below it under
    the current leaf weights); leaf weights below that child are then divided
    by it, or reset to 1 when it is zero.
    """
    tree = targets.tree
    h = [Fraction(v) for v in h]
    if len(h) != tree.n_leaves:
        raise PreconditionError("h must have one weight per leaf")
    whole = compose_hypergraph(targets)
    if not is_hitting(whole, h):
        raise PreconditionError("h is not a fractional hitting set of the composed hypergraph")

    out: Dict = {}

    def lightest(u, hv):
        # minimum weight of a composed edge of the subtree at u; None = no edge
        if tree.is_leaf(u):
            return hv[tree.leaf_index[u]]
        best = None
        kids = tree.children(u)
        sub = {}
        for E in targets.payload[u].edges:
            tot = Fraction(0)
            for i in mask_indices(E):
                if i not in sub:
                    sub[i] = lightest(kids[i], hv)
                if sub[i] is None:
                    tot = None
                    break
                tot += sub[i]
            if tot is not None and (best is None or tot < best):
                best = tot
        return best

    def go(u, hv):
        kids = tree.children(u)
        wu = []
        for c in kids:
            m = lightest(c, hv)
            r = Fraction(1) if m is None else min(Fraction(1), m)
            wu.append(r)
            if not tree.is_leaf(c):
                lo, hi = tree.leaf_span(c)
                scaled = list(hv)
                for k in range(lo, hi):
                    scaled[k] = hv[k] / r if r != 0 else Fraction(1)
                go(c, scaled)
        out[u] = tuple(int(v) if v.denominator == 1 else v for v in wu)

    go((), h)
    return Ensemble(tree, out)
