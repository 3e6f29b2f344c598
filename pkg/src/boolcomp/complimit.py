"""Profile matrices, characteristic values and composition limits.

For a selector (a0, a1) and weight functions (w0, w1), row s of the profile
matrix is the profile of w^s at a^s: (weight on positions where a^s is 0,
weight on positions where a^s is 1). The characteristic value of a measure is
the max over compatible selectors of the min spectral radius over the
measure's profile family, and equals the limit of m(f^(k))^(1/k).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import hypergraph as hg
from . import lp
from .assemblage import _subset_or, minblock_masks, sensitive_mask
from .core import (
    Assignment,
    BoolFn,
    Selector,
    as_assignment,
    check_arity,
    input_weights,
    is_f_compatible,
    mask_indices,
    popcount,
)
from .errors import BudgetExceeded, ConstantFunctionError, IncompatibleSelector, PreconditionError
from .measures import global_measure, measure_id
from .surd import Surd
from .tree import Ensemble, IndexedTree, bottom_up, iterate

Matrix = Tuple[Tuple[Fraction, Fraction], Tuple[Fraction, Fraction]]
Point = Tuple[Fraction, Fraction]

DEFAULT_TOL = Fraction(1, 10**9)


# 2x2 nonnegative matrices


def as_matrix(M) -> Matrix:
    (a, b), (c, d) = M
    out = ((Fraction(a), Fraction(b)), (Fraction(c), Fraction(d)))
    if any(v < 0 for row in out for v in row):
        raise PreconditionError("matrix entries must be nonnegative")
    return out


def rho2(M) -> Surd:
    """Spectral radius ((a+d) + sqrt((a-d)^2 + 4bc)) / 2, exactly."""
    (a, b), (c, d) = as_matrix(M)
    return Surd((a + d) / 2, Fraction(1, 2), (a - d) ** 2 + 4 * b * c)


def rho_le(M, lam) -> bool:
    (a, b), (c, d) = M
    return a <= lam and d <= lam and (lam - a) * (lam - d) >= b * c


def rho_lt(M, lam) -> bool:
    (a, b), (c, d) = M
    return a < lam and d < lam and (lam - a) * (lam - d) > b * c


def rho_float(M) -> float:
    (a, b), (c, d) = M
    a, b, c, d = float(a), float(b), float(c), float(d)
    return ((a + d) + math.sqrt((a - d) ** 2 + 4 * b * c)) / 2


def matmul(A, B) -> Matrix:
    return (
        (A[0][0] * B[0][0] + A[0][1] * B[1][0], A[0][0] * B[0][1] + A[0][1] * B[1][1]),
        (A[1][0] * B[0][0] + A[1][1] * B[1][0], A[1][0] * B[0][1] + A[1][1] * B[1][1]),
    )


def matprod(Ms) -> Matrix:
    out = ((Fraction(1), Fraction(0)), (Fraction(0), Fraction(1)))
    for M in Ms:
        out = matmul(out, M)
    return out


def norm_inf(M):
    return max(M[0][0] + M[0][1], M[1][0] + M[1][1])


def matrix_facts_check(M, k: int = 256) -> Dict[str, Any]:
    """||A||_inf >= rho(A)/2 exactly, and ||A^k||^(1/k) close to rho(A)."""
    M = as_matrix(M)
    r = rho2(M)
    norm_ok = 2 * norm_inf(M) >= r
    P = matprod([M] * k)
    nk = norm_inf(P)
    est = 0.0 if nk == 0 else math.exp((math.log(nk.numerator) - math.log(nk.denominator)) / k)
    rf = float(r)
    return {
        "rho": r,
        "norm": norm_inf(M),
        "norm_bound_holds": bool(norm_ok),
        "power_estimate": est,
        "power_estimate_holds": abs(est - rf) <= 0.05 * max(1.0, rf),
    }


# profiles


def profile(w: Sequence, x: Assignment) -> Point:
    p0 = Fraction(0)
    p1 = Fraction(0)
    for i, v in enumerate(w):
        if (x.bits >> i) & 1:
            p1 += v
        else:
            p0 += v
    return p0, p1


def profile_matrix(sel: Selector, w0: Sequence, w1: Sequence) -> Matrix:
    return (profile(w0, sel.alpha0), profile(w1, sel.alpha1))


@dataclass(frozen=True)
class ProfileFamily:
    """Pareto frontier of a profile family, sorted by p1 ascending (p0 descending).

    For C* the points are the vertices of the lower-left boundary of the
    projected witness polytope; the family is everything dominating their hull.
    """

    measure: str
    points: Tuple[Point, ...]

    @property
    def key(self):
        return (self.measure, self.points)


def _pareto(points) -> Tuple[Point, ...]:
    best: Dict[Fraction, Fraction] = {}
    for p0, p1 in points:
        if p1 not in best or p0 < best[p1]:
            best[p1] = p0
    out = []
    for p1 in sorted(best):
        p0 = best[p1]
        if not out or p0 < out[-1][0]:
            out.append((p0, p1))
    return tuple(out)


def _c_family(f: BoolFn, x: int):
    n = f.arity
    check_arity(n, "certificate profile family")
    fx = bool((f.table >> x) & 1)
    idx = np.arange(f.size, dtype=np.int64)
    blk = f.values[idx ^ x] != fx
    g = _subset_or(blk, n)
    hitting = ~g[(f.size - 1) ^ idx]  # S hits every block iff no block avoids S
    S = idx[hitting]
    w = input_weights(n)
    p1 = w[S & x]
    p0 = w[S & ~x & (f.size - 1)]
    # min p0 for each p1, then keep strictly improving points
    best = np.full(n + 1, n + 1, dtype=np.int64)
    np.minimum.at(best, p1, p0)
    pts = [(Fraction(int(best[v])), Fraction(v)) for v in range(n + 1) if best[v] <= n]
    return _pareto(pts)


def _cstar_lp(A, n, x, c0, c1, extra=None):
    """Minimize c0*p0 + c1*p1 over fractional witnesses; returns (p0, p1)."""
    cost = [c1 if (x >> i) & 1 else c0 for i in range(n)]
    rows = list(A)
    rhs = [1] * len(A)
    if extra is not None:
        # p0 <= bound, written as -p0 >= -bound
        rows.append([0 if (x >> i) & 1 else -1 for i in range(n)])
        rhs.append(-extra)
    res = lp.minimize(cost, rows, rhs)
    if res.status != "optimal":
        raise PreconditionError(f"witness LP ended {res.status}")
    p0 = sum((v for i, v in enumerate(res.x) if not (x >> i) & 1), Fraction(0))
    p1 = sum((v for i, v in enumerate(res.x) if (x >> i) & 1), Fraction(0))
    return p0, p1


def _cstar_family(f: BoolFn, x: int):
    n = f.arity
    edges = sorted(minblock_masks(f, x), key=lambda e: (popcount(e), e))
    if not edges:
        return ((Fraction(0), Fraction(0)),)
    A = [[(e >> i) & 1 for i in range(n)] for e in edges]
    # lexicographic endpoints: min p0 then p1, and min p1 then p0
    a0, _ = _cstar_lp(A, n, x, 1, 0)
    left = (a0, _cstar_lp(A, n, x, 0, 1, extra=a0)[1])
    b1 = _cstar_lp(A, n, x, 0, 1)[1]
    right = _lex_min_p1(A, n, x, b1)
    if left == right:
        return (left,)
    pts = [left, right]

    def refine(P, Q):
        # P has smaller p0; minimize along the outward normal of segment PQ
        l0 = P[1] - Q[1]
        l1 = Q[0] - P[0]
        R = _cstar_lp(A, n, x, l0, l1)
        if l0 * R[0] + l1 * R[1] < l0 * P[0] + l1 * P[1]:
            pts.append(R)
            refine(P, R)
            refine(R, Q)

    refine(left, right)
    return _hull_frontier(pts)


def _lex_min_p1(A, n, x, b1):
    # min p0 subject to p1 <= b1
    cost = [0 if (x >> i) & 1 else 1 for i in range(n)]
    rows = list(A) + [[-1 if (x >> i) & 1 else 0 for i in range(n)]]
    res = lp.minimize(cost, rows, [1] * len(A) + [-b1])
    p0 = sum((v for i, v in enumerate(res.x) if not (x >> i) & 1), Fraction(0))
    return (p0, Fraction(b1))


def _hull_frontier(pts) -> Tuple[Point, ...]:
    """Vertices of the lower-left convex boundary, p1 ascending."""
    pts = sorted(set(pts), key=lambda p: (p[1], p[0]))
    pts = list(_pareto(pts))
    hull: List[Point] = []
    for p in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop the middle point unless the chain turns convexly
            cross = (x2 - x1) * (p[1] - y1) - (y2 - y1) * (p[0] - x1)
            if cross <= 0:
                hull.pop()
            else:
                break
        hull.append(p)
    return tuple(hull)


def profile_family(f: BoolFn, x, measure: str) -> ProfileFamily:
    m = measure_id(measure)
    a = as_assignment(x, f.arity)
    if m == "s":
        sm = sensitive_mask(f, a.bits)
        pts = ((Fraction(popcount(sm & ~a.bits)), Fraction(popcount(sm & a.bits))),)
    elif m == "C":
        pts = _c_family(f, a.bits)
    elif m == "CStar":
        pts = _cstar_family(f, a.bits)
    else:
        raise PreconditionError(f"no profile family for measure {m}")
    return ProfileFamily(m, pts)


# symmetry reduction


def symmetric_classes(f: BoolFn) -> List[List[int]]:
    """Classes of indices that f treats symmetrically (transpositions fixing f)."""
    n = f.arity
    v = f.values
    x = np.arange(f.size, dtype=np.int64)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if find(i) == find(j):
                continue
            bi, bj = (x >> i) & 1, (x >> j) & 1
            swapped = x ^ ((bi ^ bj) * ((1 << i) | (1 << j)))
            if np.array_equal(v, v[swapped]):
                parent[find(j)] = find(i)
    classes: Dict[int, List[int]] = {}
    for i in range(n):
        classes.setdefault(find(i), []).append(i)
    return sorted(classes.values())


def orbit_representatives(f: BoolFn, value: int) -> List[int]:
    """Smallest member of each symmetry orbit inside f^{-1}(value), ascending."""
    classes = symmetric_classes(f)
    reps = [0]
    for cls in classes:
        nxt = []
        for r in reps:
            acc = 0
            nxt.append(r)
            for i in cls:
                acc |= 1 << i
                nxt.append(r | acc)
        reps = nxt
    return sorted(r for r in reps if (f.table >> r) & 1 == value)


# characteristic values


@dataclass
class CharVal:
    measure: str
    lo: Fraction
    hi: Fraction
    selector: Optional[Selector]
    value: Optional[Surd] = None  # exact, for finite families
    matrix: Optional[Matrix] = None
    frontiers: Optional[Tuple[Tuple[Point, ...], Tuple[Point, ...]]] = None
    stats: Dict[str, Any] = field(default_factory=dict)

    def to_json(self):
        out = {
            "measure": self.measure,
            "interval": [f"{float(self.lo):.12f}", f"{float(self.hi):.12f}"],
            "interval_exact": [str(self.lo), str(self.hi)],
            "selector": None if self.selector is None else [str(self.selector.alpha0), str(self.selector.alpha1)],
        }
        if self.value is not None:
            out["exact"] = str(self.value)
        if self.matrix is not None:
            out["matrix"] = [[str(v) for v in row] for row in self.matrix]
        if self.frontiers is not None:
            out["frontiers"] = [[[str(a), str(b)] for a, b in fr] for fr in self.frontiers]
        out.update({k: v for k, v in self.stats.items()})
        return out


def _finite_min_rho(F0, F1):
    """Exact min over row pairs of rho; returns (Surd, matrix)."""
    # float screen, then exact comparison among near-minimal candidates
    cand = []
    for u in F0:
        for v in F1:
            cand.append((rho_float((u, v)), (u, v)))
    lo = min(c[0] for c in cand)
    best = None
    for r, M in cand:
        if r <= lo + 1e-7 * max(1.0, lo):
            val = rho2(M)
            if best is None or val < best[0]:
                best = (val, M)
    return best


def _feasible(F0, F1, lam) -> bool:
    """Is there t > 0 and rows u in hull(F0), v in hull(F1) with M(1,t) <= lam*(1,t)?"""
    # rows from F0: a + b t <= lam
    t_hi = None  # None: empty; math.inf: unbounded
    for a, b in F0:
        if b == 0:
            if a <= lam:
                t_hi = math.inf
        elif a < lam:
            cap = (lam - a) / b
            if t_hi is None or (t_hi is not math.inf and cap > t_hi):
                t_hi = cap
    if t_hi is None:
        return False
    # rows from F1: c + d t <= lam t
    t_lo = None  # None: empty; 0 means any t > 0
    for c, d in F1:
        if d < lam:
            low = c / (lam - d)
        elif d == lam and c == 0:
            low = Fraction(0)
        else:
            continue
        if t_lo is None or low < t_lo:
            t_lo = low
    if t_lo is None:
        return False
    if t_lo == 0 or t_hi is math.inf:
        return True
    return t_lo <= t_hi


def _bisect(F0, F1, lo, hi, tol):
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if _feasible(F0, F1, mid):
            hi = mid
        else:
            lo = mid
    return lo, hi


def _start_hi(F0, F1):
    return max(a + b for a, b in F0) + max(c + d for c, d in F1) + 1


def charval_selector(f: BoolFn, sel: Selector, measure: str, tol: Fraction = DEFAULT_TOL) -> CharVal:
    m = measure_id(measure)
    if f.is_constant:
        raise ConstantFunctionError("characteristic values need a non-constant function")
    if not is_f_compatible(f, sel):
        raise IncompatibleSelector(f"selector ({sel.alpha0}, {sel.alpha1}) is not compatible")
    F0 = profile_family(f, sel.alpha0, m).points
    F1 = profile_family(f, sel.alpha1, m).points
    if m in ("s", "C"):
        val, M = _finite_min_rho(F0, F1)
        lo, hi = val.bracket(15)
        return CharVal(m, lo, hi, sel, val, M, (F0, F1))
    lo, hi = _bisect(F0, F1, Fraction(0), _start_hi(F0, F1), tol)
    return CharVal(m, lo, hi, sel, None, None, (F0, F1))


def _families(f, measure, value):
    seen: Dict[Tuple, int] = {}
    for x in orbit_representatives(f, value):
        fam = profile_family(f, x, measure).points
        if fam not in seen:
            seen[fam] = x
    return seen


def charval(f: BoolFn, measure: str, tol: Fraction = DEFAULT_TOL) -> CharVal:
    """Max over compatible selectors of the min spectral radius of the family.

    Inputs are reduced to symmetry-orbit representatives and then to distinct
    frontiers, so the selector loop runs over distinct family pairs only.
    Ties keep the lexicographically least selector.
    """
    m = measure_id(measure)
    if m not in ("s", "C", "CStar"):
        raise PreconditionError(f"no characteristic value for measure {m}")
    if f.is_constant:
        raise ConstantFunctionError("characteristic values need a non-constant function")
    check_arity(f.arity, "characteristic value")
    fam0 = sorted(_families(f, m, 0).items(), key=lambda kv: kv[1])
    fam1 = sorted(_families(f, m, 1).items(), key=lambda kv: kv[1])
    stats = {"families0": len(fam0), "families1": len(fam1)}
    n = f.arity

    if m in ("s", "C"):
        # float screen over all pairs, exact decision among the near-maximal ones
        best = None
        screened = []
        for F0, x0 in fam0:
            for F1, x1 in fam1:
                r = min(rho_float((u, v)) for u in F0 for v in F1)
                screened.append((r, x0, x1, F0, F1))
        top = max(s[0] for s in screened)
        for r, x0, x1, F0, F1 in screened:
            if r >= top - 1e-7 * max(1.0, top):
                val, M = _finite_min_rho(F0, F1)
                if best is None or val > best[0]:
                    best = (val, M, x0, x1, F0, F1)
        val, M, x0, x1, F0, F1 = best
        lo, hi = val.bracket(15)
        sel = Selector(Assignment(n, x0), Assignment(n, x1))
        return CharVal(m, lo, hi, sel, val, M, (F0, F1), stats)

    best_lo = Fraction(-1)
    best_hi = Fraction(0)
    arg = None
    for F0, x0 in fam0:
        for F1, x1 in fam1:
            if best_lo >= 0 and _feasible(F0, F1, best_lo):
                continue  # this pair's min rho is at most the current best
            start = max(best_lo, Fraction(0))
            lo, hi = _bisect(F0, F1, start, _start_hi(F0, F1), tol)
            if lo > best_lo:
                best_lo, arg = lo, (x0, x1, F0, F1)
            best_hi = max(best_hi, hi)
    x0, x1, F0, F1 = arg
    sel = Selector(Assignment(n, x0), Assignment(n, x1))
    return CharVal(m, best_lo, max(best_hi, best_lo), sel, None, None, (F0, F1), stats)


# sandwich bounds and convergence


SANDWICH_LIMIT = 16


def sandwich_check(f: BoolFn, measure: str, k: int, cv: Optional[CharVal] = None) -> Dict[str, Any]:
    """Check cv^k / 2 <= m(f^(k)) <= 2 n k cv^(k-1) with m(f^(k)) computed exhaustively."""
    m = measure_id(measure)
    n = f.arity
    if n ** k > SANDWICH_LIMIT:
        raise BudgetExceeded(f"n^k = {n ** k} exceeds the exhaustive limit {SANDWICH_LIMIT}")
    if cv is None:
        cv = charval(f, m)
    F = iterate(f, k)
    mk = global_measure(F, m).m
    if cv.value is not None:
        lower_ok = cv.value ** k <= 2 * Fraction(mk)
        upper_ok = Fraction(mk) <= 2 * n * k * cv.value ** (k - 1)
    else:
        # interval value: take each bound at its weakest end
        lower_ok = cv.lo ** k <= 2 * Fraction(mk)
        upper_ok = Fraction(mk) <= 2 * n * k * cv.hi ** (k - 1)
    v = float(cv.value) if cv.value is not None else float(cv.lo)
    return {
        "k": k,
        "m_fk": mk,
        "charval": str(cv.value) if cv.value is not None else [str(cv.lo), str(cv.hi)],
        "lower": v ** k / 2,
        "upper": 2 * n * k * v ** (k - 1),
        "lower_holds": bool(lower_ok),
        "upper_holds": bool(upper_ok),
        "holds": bool(lower_ok and upper_ok),
    }


# matrix lemmas


def row_mix(Ms, i, j) -> Matrix:
    return (Ms[i][0], Ms[j][1])


def supermult_property(Ms: Sequence, lam) -> Dict[str, Any]:
    """If rho(M_{i,j}) >= lam for all i, j then rho(M_1...M_k) >= lam^k."""
    Ms = [as_matrix(M) for M in Ms]
    lam = Fraction(lam)
    k = len(Ms)
    hyp = all(not rho_lt(row_mix(Ms, i, j), lam) for i in range(k) for j in range(k))
    P = matprod(Ms)
    concl = not rho_lt(P, lam ** k)
    return {"k": k, "hypothesis": hyp, "conclusion": concl, "holds": (not hyp) or concl}


def _weakest_u(U, lam):
    # row constraint u0 + u1 t <= lam: the weakest allows the largest t
    def T(u):
        if u[1] == 0:
            return math.inf if u[0] <= lam else -math.inf
        return (lam - u[0]) / u[1] if u[0] <= lam else -math.inf
    return max(U, key=lambda u: (T(u), [-v for v in u])), T


def _weakest_v(V, lam):
    # row constraint v0 + v1 t <= lam t: the weakest asks for the smallest t
    def L(v):
        if v[1] < lam:
            return v[0] / (lam - v[1])
        return math.inf
    return min(V, key=lambda v: (L(v), list(v))), L


def submult_property(frontiers: Sequence[Tuple[Sequence, Sequence]], lam, bound_n=None,
                     slack: Fraction = Fraction(1, 10**12), tol: Fraction = DEFAULT_TOL) -> Dict[str, Any]:
    """Choose rows by the weakest/strongest constraint rule and check both conclusions.

    ``frontiers[i] = (U_i, V_i)``; the hypothesis is that every pair (U_i, V_j)
    has rows with rho <= lam. Conclusions: rho(M_i...M_j) <= lam^(j-i+1), the
    entrywise prefix bound, and ||M_1...M_k||_inf <= lam^k + n k lam^(k-1),
    each up to a relative ``tol``. The sharper ``n k lam^(k-1)`` without the
    lam^k term is reported separately; it fails already for k = 1.
    """
    lam = Fraction(lam)
    k = len(frontiers)
    U = [[(Fraction(a), Fraction(b)) for a, b in fr[0]] for fr in frontiers]
    V = [[(Fraction(a), Fraction(b)) for a, b in fr[1]] for fr in frontiers]
    hyp = all(any(rho_le((u, v), lam) for u in U[i] for v in V[j]) for i in range(k) for j in range(k))
    if not hyp:
        return {"k": k, "hypothesis": False, "holds": True, "rows": None}
    lam_e = lam * (1 + slack)
    rows = []
    for i in range(k):
        u, _ = _weakest_u(U[i], lam_e)
        v, _ = _weakest_v(V[i], lam_e)
        rows.append((u, v))
    Ms = [(u, v) for u, v in rows]
    ok_rho = True
    for i in range(k):
        P = None
        for j in range(i, k):
            P = Ms[j] if P is None else matmul(P, Ms[j])
            if not rho_le(P, lam ** (j - i + 1) * (1 + tol)):
                ok_rho = False
    if bound_n is None:
        bound_n = max(max(max(u) for u in U[i]) for i in range(k))
        bound_n = max(bound_n, max(max(max(v) for v in V[i]) for i in range(k)))
    # the induction bounds each prefix product entrywise by
    # [[lam^i, n i lam^(i-1)], [n i lam^(i-1), lam^i]]
    ok_entry = True
    P = None
    for i, M in enumerate(Ms, start=1):
        P = M if P is None else matmul(P, M)
        diag = lam ** i * (1 + tol)
        off = Fraction(bound_n) * i * lam ** (i - 1) * (1 + tol)
        if P[0][0] > diag or P[1][1] > diag or P[0][1] > off or P[1][0] > off:
            ok_entry = False
    limit = lam ** k + Fraction(bound_n) * k * lam ** (k - 1)
    literal = Fraction(bound_n) * k * lam ** (k - 1)
    ok_norm = norm_inf(P) <= limit * (1 + tol)
    return {
        "k": k,
        "hypothesis": True,
        "rows": rows,
        "rho_holds": ok_rho,
        "entry_holds": ok_entry,
        "norm": norm_inf(P),
        "norm_limit": limit,
        "norm_holds": ok_norm,
        "literal_norm_limit": literal,
        "literal_norm_holds": norm_inf(P) <= literal * (1 + tol),
        "holds": ok_rho and ok_entry and ok_norm,
    }


def random_supermult_instance(rng: np.random.Generator, k: int, maxval: int = 6):
    Ms = [((Fraction(int(rng.integers(0, maxval + 1))), Fraction(int(rng.integers(0, maxval + 1)))),
           (Fraction(int(rng.integers(0, maxval + 1))), Fraction(int(rng.integers(0, maxval + 1)))))
          for _ in range(k)]
    r = min(rho2(row_mix(Ms, i, j)) for i in range(k) for j in range(k))
    lam = r.bracket(12)[0]
    return Ms, max(lam, Fraction(0))


def random_submult_instance(rng: np.random.Generator, k: int, maxval: int = 6, size: int = 3):
    def pts():
        return [(Fraction(int(rng.integers(0, maxval + 1))), Fraction(int(rng.integers(0, maxval + 1))))
                for _ in range(int(rng.integers(1, size + 1)))]

    frontiers = [(pts(), pts()) for _ in range(k)]
    need = max(
        min(rho2((u, v)) for u in frontiers[i][0] for v in frontiers[j][1])
        for i in range(k)
        for j in range(k)
    )
    lam = need.bracket(12)[1]
    return frontiers, lam


# packing lifts through compositions


def _stack(g1: BoolFn, inner: Ensemble) -> Ensemble:
    """Ensemble for g1 with a copy of ``inner`` under each child."""
    ar = {(): g1.arity}
    payload = {(): g1}
    for i in range(g1.arity):
        for v in inner.tree.internal:
            ar[(i,) + v] = inner.tree.arities[v]
            payload[(i,) + v] = inner.payload[v]
    return Ensemble(IndexedTree(ar), payload)


def _expand(cert) -> List[int]:
    out = []
    for e, m in cert.multiplicities:
        out.extend([e] * int(m))
    return out


@dataclass
class LiftResult:
    X: Assignment
    blocks: List[int]
    outer_input: int
    M: int
    b: int
    verified: bool

    @property
    def size(self):
        return len(self.blocks)


def verify_packing(ens: Ensemble, X: Assignment, blocks: Sequence[int]) -> bool:
    """Blocks pairwise disjoint and each flips the composed function at X."""
    used = 0
    base = bottom_up(ens, X).root
    for B in blocks:
        if B == 0 or B & used:
            return False
        used |= B
        if bottom_up(ens, Assignment(X.arity, X.bits ^ B)).root == base:
            return False
    return True


def lift_packing(g1: BoolFn, inner: Ensemble, alpha: Sequence[Assignment],
                 packs: Sequence[Sequence[int]], b: int) -> LiftResult:
    """Lift packings of the inner function to one of g1 o inner at b.

    ``alpha[c]`` is an inner input with value c and ``packs[c]`` a disjoint
    block packing there. With M = min |packs[c]|, a maximum M-fold packing of
    g1 at a b-input x becomes a disjoint packing of the composition at
    X = x o alpha: each outer block takes one unused inner block per member.
    """
    if g1.is_constant:
        raise ConstantFunctionError("outer function must be non-constant")
    M = min(len(packs[0]), len(packs[1]))
    if M < 1:
        raise PreconditionError("inner packings must be nonempty")
    L = inner.tree.n_leaves
    best = None
    for x in range(g1.size):
        if (g1.table >> x) & 1 != b:
            continue
        H = hg.Hypergraph(g1.arity, minblock_masks(g1, x))
        val, cert = hg.nu_M(H, M)
        if best is None or val > best[0]:
            best = (val, cert, x)
    _, cert, x = best
    bits = 0
    for i in range(g1.arity):
        bits |= alpha[(x >> i) & 1].bits << (i * L)
    X = Assignment(g1.arity * L, bits)
    pools = [list(packs[(x >> i) & 1]) for i in range(g1.arity)]
    blocks = []
    for B in _expand(cert):
        lifted = 0
        for i in mask_indices(B):
            lifted |= pools[i].pop(0) << (i * L)
        blocks.append(lifted)
    ens = _stack(g1, inner)
    return LiftResult(X, blocks, x, M, b, verify_packing(ens, X, blocks))


def _single(g: BoolFn) -> Ensemble:
    return Ensemble.uniform([g])


def bs_lift_packing(g1: BoolFn, g2: BoolFn, b: int) -> LiftResult:
    """Packing of g1 o g2 at an explicit input of size bs^M_b(g1), M = min(bs_0, bs_1)(g2)."""
    if g2.is_constant:
        raise ConstantFunctionError("inner function must be non-constant")
    rep = global_measure(g2, "bs")
    alpha, packs = [], []
    for c, x in ((0, rep.argmax0), (1, rep.argmax1)):
        H = hg.Hypergraph(g2.arity, minblock_masks(g2, x))
        _, cert = hg.nu(H)
        alpha.append(Assignment(g2.arity, x))
        packs.append(_expand(cert))
    return lift_packing(g1, _single(g2), alpha, packs, b)


def bs_singleton_lift(f: BoolFn, g: BoolFn, b: int) -> LiftResult:
    """Packing of f o g at a b-input of size bs(g), placed under one sensitive child.

    Needs x in f^{-1}(b) and an index i with x_i = c sensitive, where
    bs(g) = bs_c(g); every maximum packing of g at its c-side argmax then
    lifts into child i.
    """
    rep = global_measure(g, "bs")
    c = 0 if rep.m0 >= rep.m1 else 1
    ac = rep.argmax0 if c == 0 else rep.argmax1
    other = int(np.flatnonzero(g.values == bool(1 - c))[0])
    alpha = [None, None]
    alpha[c] = Assignment(g.arity, ac)
    alpha[1 - c] = Assignment(g.arity, other)
    choice = None
    for x in range(f.size):
        if (f.table >> x) & 1 != b:
            continue
        sm = sensitive_mask(f, x)
        for i in mask_indices(sm):
            if (x >> i) & 1 == c:
                choice = (x, i)
                break
        if choice:
            break
    if choice is None:
        raise PreconditionError("no b-input with a sensitive index of the needed value (monotone f?)")
    x, i = choice
    L = g.arity
    bits = 0
    for j in range(f.arity):
        bits |= alpha[(x >> j) & 1].bits << (j * L)
    X = Assignment(f.arity * L, bits)
    _, cert = hg.nu(hg.Hypergraph(g.arity, minblock_masks(g, ac)))
    blocks = [B << (i * L) for B in _expand(cert)]
    ens = _stack(f, _single(g))
    return LiftResult(X, blocks, x, 1, b, verify_packing(ens, X, blocks))


def _iterated_bs_lifts(f: BoolFn, kmax: int):
    """Certified lower bounds on bs(f^(k)) for k = 1..kmax by repeated lifting."""
    rows = {1: (global_measure(f, "bs").m, None)}
    if kmax < 2:
        return rows
    inner = _single(f)
    lifts = [bs_lift_packing(f, f, c) for c in (0, 1)]
    rows[2] = (max(l.size for l in lifts) if all(l.verified for l in lifts) else None, lifts)
    for k in range(3, kmax + 1):
        inner = _stack(f, inner)
        alpha = [l.X for l in lifts]
        packs = [l.blocks for l in lifts]
        lifts = [lift_packing(f, inner, alpha, packs, c) for c in (0, 1)]
        rows[k] = (max(l.size for l in lifts) if all(l.verified for l in lifts) else None, lifts)
    return rows


def limit_convergence(f: BoolFn, measure: str, kmax: int) -> Dict[str, Any]:
    """Table of m(f^(k)) and m(f^(k))^(1/k) against the sandwich envelope.

    For bs the column holds certified lower bounds from lifted packings, and
    the target is the C* characteristic value.
    """
    m = measure_id(measure)
    n = f.arity
    rows = []
    if m == "bs":
        cv = charval(f, "CStar")
        target = float(cv.lo)
        lifts = _iterated_bs_lifts(f, kmax)
        for k in range(1, kmax + 1):
            val, _ = lifts[k]
            rows.append({
                "k": k,
                "value": val,
                "kind": "exact" if k == 1 else "lower_bound",
                "root": None if val is None else val ** (1 / k),
            })
        return {"measure": "bs", "target": target, "target_source": "CStar", "rows": rows,
                "holds": all(r["value"] is not None for r in rows)}
    cv = charval(f, m)
    target = float(cv.value) if cv.value is not None else float(cv.lo)
    ok = True
    for k in range(1, kmax + 1):
        if n ** k > SANDWICH_LIMIT:
            rows.append({"k": k, "value": None, "kind": "budget"})
            continue
        res = sandwich_check(f, m, k, cv)
        val = res["m_fk"]
        ok &= res["holds"]
        rows.append({
            "k": k,
            "value": val,
            "kind": "exact",
            "root": float(val) ** (1 / k),
            "envelope": [target / 2 ** (1 / k), (2 * n * k) ** (1 / k) * target ** ((k - 1) / k)],
            "holds": res["holds"],
        })
    return {"measure": m, "target": target, "rows": rows, "holds": ok}
