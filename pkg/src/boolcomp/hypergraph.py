"""Packing and covering numbers of hypergraphs, exact and certified.

Edges are bitmasks over ``ground`` indices. Fractional values come from the
exact simplex in ``lp``; integral values from branch and bound whose root is
capped by the LP optimum.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, Optional, Sequence, Tuple

from . import lp
from .core import LIMITS, as_mask, mask_indices, popcount
from .errors import BudgetExceeded, PreconditionError

SEARCH_BUDGET = 5_000_000


@dataclass(frozen=True)
class Hypergraph:
    ground: int
    edges: FrozenSet[int]

    def __init__(self, ground: int, edges: Iterable = ()):
        masks = frozenset(as_mask(e, ground) for e in edges)
        if len(masks) > LIMITS.max_edges:
            raise BudgetExceeded(f"{len(masks)} edges exceed max_edges {LIMITS.max_edges}")
        object.__setattr__(self, "ground", ground)
        object.__setattr__(self, "edges", masks)

    @property
    def ordered(self) -> Tuple[int, ...]:
        """Edges sorted by size, then by mask value."""
        return tuple(sorted(self.edges, key=lambda e: (popcount(e), e)))

    def __len__(self):
        return len(self.edges)

    def minimal(self) -> "Hypergraph":
        """Edges not properly containing another edge."""
        keep = []
        for e in self.ordered:
            if not any((k & e) == k for k in keep):
                keep.append(e)
        return Hypergraph(self.ground, keep)

    def is_hit_by(self, mask: int) -> bool:
        return all(e & mask for e in self.edges)

    def __repr__(self):
        shown = [mask_indices(e) for e in self.ordered[:6]]
        more = "..." if len(self.edges) > 6 else ""
        return f"Hypergraph(ground={self.ground}, edges={shown}{more})"


@dataclass(frozen=True)
class PackingCert:
    multiplicities: Tuple[Tuple[int, Fraction], ...]  # (edge, multiplicity), nonzero only
    kind: str  # integral | M-fold | fractional | w-packing
    bound: Tuple[Fraction, ...]  # per-index capacity

    @property
    def value(self):
        return sum((m for _, m in self.multiplicities), Fraction(0))

    def validate(self, H: Hypergraph) -> bool:
        load = [Fraction(0)] * H.ground
        for e, m in self.multiplicities:
            if e not in H.edges or m < 0:
                return False
            if self.kind != "fractional" and Fraction(m).denominator != 1:
                return False
            for i in mask_indices(e):
                load[i] += m
        return all(load[i] <= self.bound[i] for i in range(H.ground))

    def to_json(self):
        return {
            "kind": self.kind,
            "blocks": [{"indices": mask_indices(e), "mult": str(m)} for e, m in self.multiplicities],
        }


@dataclass(frozen=True)
class CoverCert:
    weights: Tuple[Fraction, ...]
    kind: str  # integral | fractional

    @property
    def value(self):
        return sum(self.weights, Fraction(0))

    def validate(self, H: Hypergraph) -> bool:
        if any(w < 0 for w in self.weights) or len(self.weights) != H.ground:
            return False
        if self.kind == "integral" and any(w not in (0, 1) for w in self.weights):
            return False
        return all(sum((self.weights[i] for i in mask_indices(e)), Fraction(0)) >= 1 for e in H.edges)

    def to_json(self):
        return {"kind": self.kind, "weights": [str(w) for w in self.weights]}


def _int_value(v: Fraction):
    return int(v) if v.denominator == 1 else v


# fractional parameters


def nu_star(H: Hypergraph, capacities: Optional[Sequence] = None):
    """Maximum fractional packing; optional per-index capacities (default 1)."""
    edges = H.ordered
    cap = [Fraction(1)] * H.ground if capacities is None else [Fraction(c) for c in capacities]
    if not edges:
        return 0, PackingCert((), "fractional", tuple(cap))
    A = [[1 if (e >> i) & 1 else 0 for e in edges] for i in range(H.ground)]
    res = lp.maximize([1] * len(edges), A, cap)
    if res.status != "optimal":
        raise PreconditionError(f"packing LP ended {res.status}")
    mult = tuple((e, m) for e, m in zip(edges, res.x) if m)
    cert = PackingCert(mult, "fractional", tuple(cap))
    assert cert.validate(H) and cert.value == res.value
    return _int_value(res.value), cert


def tau_star(H: Hypergraph):
    """Minimum fractional hitting set, solved as its own covering LP."""
    edges = H.ordered
    if not edges:
        return 0, CoverCert(tuple([Fraction(0)] * H.ground), "fractional")
    A = [[1 if (e >> i) & 1 else 0 for i in range(H.ground)] for e in edges]
    res = lp.minimize([1] * H.ground, A, [1] * len(edges))
    if res.status != "optimal":
        raise PreconditionError(f"covering LP ended {res.status}")
    cert = CoverCert(tuple(res.x), "fractional")
    assert cert.validate(H) and cert.value == res.value
    return _int_value(res.value), cert


# integral packings


def _pack_search(edges: Sequence[int], cap: Sequence[int], upper: int):
    """Max multiset of edges with per-index load <= cap.

    Depth first over edges in order, larger multiplicities first, so the first
    optimum met is deterministic. ``upper`` is a proven bound used to stop early.
    """
    n = len(cap)
    idx = [mask_indices(e) for e in edges]
    sizes = [len(i) for i in idx]
    # suffix minimum of edge size for the counting bound
    suf_min = [math.inf] * (len(edges) + 1)
    for k in range(len(edges) - 1, -1, -1):
        suf_min[k] = min(suf_min[k + 1], sizes[k])
    suf_union = [0] * (len(edges) + 1)
    for k in range(len(edges) - 1, -1, -1):
        suf_union[k] = suf_union[k + 1] | edges[k]

    best_val = -1
    best_sol: Tuple[int, ...] = ()
    seen: Dict[Tuple, int] = {}
    steps = 0
    done = False

    def bound(k, caps):
        if k >= len(edges):
            return 0
        total = sum(caps[i] for i in mask_indices(suf_union[k]))
        return total // suf_min[k]

    chosen = [0] * len(edges)

    def go(k, caps, val):
        nonlocal best_val, best_sol, steps, done
        steps += 1
        if steps > SEARCH_BUDGET:
            raise BudgetExceeded("packing search exceeded its step budget")
        if val > best_val:
            best_val = val
            best_sol = tuple(chosen)
            if best_val >= upper:
                done = True
                return
        if k >= len(edges) or val + bound(k, caps) <= best_val:
            return
        key = (k, caps)
        prev = seen.get(key)
        if prev is not None and prev >= val:
            return
        seen[key] = val
        t_max = min(caps[i] for i in idx[k])
        for t in range(t_max, -1, -1):
            if t:
                nc = list(caps)
                for i in idx[k]:
                    nc[i] -= t
                nc = tuple(nc)
            else:
                nc = caps
            chosen[k] = t
            go(k + 1, nc, val + t)
            chosen[k] = 0
            if done:
                return

    go(0, tuple(cap), 0)
    return best_val, best_sol


def nu_w(H: Hypergraph, w: Sequence):
    """Maximum integral w-packing: integer multiplicities, load(i) <= w(i)."""
    cap = [int(math.floor(Fraction(x))) for x in w]
    if len(cap) != H.ground or any(c < 0 for c in cap):
        raise PreconditionError("capacities must be nonnegative and cover the ground set")
    base = H.minimal()
    edges = base.ordered
    if not edges:
        return 0, PackingCert((), "w-packing", tuple(Fraction(c) for c in cap))
    frac, _ = nu_star(base, cap)
    upper = int(math.floor(Fraction(frac)))
    val, sol = _pack_search(edges, cap, upper)
    mult = tuple((e, Fraction(t)) for e, t in zip(edges, sol) if t)
    return val, PackingCert(mult, "w-packing", tuple(Fraction(c) for c in cap))


def nu_M(H: Hypergraph, M: int):
    if M < 1:
        raise PreconditionError("M must be at least 1")
    val, cert = nu_w(H, [M] * H.ground)
    return val, PackingCert(cert.multiplicities, "M-fold", cert.bound)


def nu(H: Hypergraph):
    val, cert = nu_w(H, [1] * H.ground)
    return val, PackingCert(cert.multiplicities, "integral", cert.bound)


# integral covering


def tau(H: Hypergraph):
    """Minimum hitting set by branching on the elements of a smallest unhit edge."""
    base = H.minimal()
    edges = base.ordered
    if not edges:
        return 0, CoverCert(tuple([Fraction(0)] * H.ground), "integral")
    low, _ = tau_star(base)
    lower = int(math.ceil(Fraction(low)))

    # greedy start
    chosen = 0
    while True:
        unhit = [e for e in edges if not e & chosen]
        if not unhit:
            break
        deg = [0] * H.ground
        for e in unhit:
            for i in mask_indices(e):
                deg[i] += 1
        chosen |= 1 << max(range(H.ground), key=lambda i: (deg[i], -i))
    best = [popcount(chosen), chosen]
    steps = 0

    def disjoint_lb(unhit):
        used = 0
        cnt = 0
        for e in unhit:
            if not e & used:
                used |= e
                cnt += 1
        return cnt

    def go(sel, forbidden, size):
        nonlocal steps
        steps += 1
        if steps > SEARCH_BUDGET:
            raise BudgetExceeded("hitting-set search exceeded its step budget")
        if best[0] <= lower:
            return
        unhit = [e for e in edges if not e & sel]
        if not unhit:
            if size < best[0] or (size == best[0] and sel < best[1]):
                best[0], best[1] = size, sel
            return
        if size + disjoint_lb(unhit) >= best[0]:
            return
        pick = min(unhit, key=lambda e: (popcount(e & ~forbidden), e))
        opts = mask_indices(pick & ~forbidden)
        if not opts:
            return
        forb = forbidden
        for i in opts:
            go(sel | (1 << i), forb, size + 1)
            forb |= 1 << i

    go(0, 0, 0)
    weights = tuple(Fraction((best[1] >> i) & 1) for i in range(H.ground))
    cert = CoverCert(weights, "integral")
    assert cert.validate(H)
    return best[0], cert
