"""Local and global complexity measures.

Every local measure is a parameter of the min-block hypergraph at x:
s counts singleton blocks, bs = nu, bs^M = nu_M, bs* = nu*, C = tau, C* = tau*.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from typing import Any, Dict, List, Optional

import numpy as np

from . import hypergraph as hg
from .assemblage import minblocks, sensitive_set, sensitivity_all
from .core import (
    LIMITS,
    BoolFn,
    as_assignment,
    check_arity,
    mask_indices,
    named_fn,
)
from .errors import BudgetExceeded, ConstantFunctionError, PreconditionError
from .tree import compose

MEASURES = ("s", "bs", "bsM", "bsStar", "C", "CStar")
_ALIASES = {
    "s": "s",
    "bs": "bs",
    "bsm": "bsM",
    "bsstar": "bsStar",
    "bs*": "bsStar",
    "c": "C",
    "cstar": "CStar",
    "c*": "CStar",
}

# e^{-1} to 30 digits; the only transcendental constant used anywhere
INV_E = Fraction(Decimal("0.367879441171442321595523770161"))
RC_TOL = Fraction(1, 10**12)

DP_MAX_ARITY = 16


def measure_id(name: str) -> str:
    key = name.strip().lower()
    if key not in _ALIASES:
        raise ValueError(f"unknown measure {name!r}; choose from {', '.join(MEASURES)}")
    return _ALIASES[key]


@dataclass(frozen=True)
class LocalMeasureValue:
    measure: str
    x: Any
    value: Any  # int or Fraction
    certificate: Any  # PackingCert | CoverCert | SensSet

    def to_json(self):
        cert = self.certificate
        if hasattr(cert, "to_json"):
            c = cert.to_json()
        elif cert is None:
            c = None
        else:
            c = {"kind": "sensitive", "indices": cert.indices}
        return {"input": str(self.x), "value": str(self.value), "certificate": c}


def local(f: BoolFn, x, measure: str, M: Optional[int] = None) -> LocalMeasureValue:
    m = measure_id(measure)
    a = as_assignment(x, f.arity)
    if m == "s":
        ss = sensitive_set(f, a)
        return LocalMeasureValue(m, a, len(ss), ss)
    H = minblocks(f, a).hypergraph
    if m == "bs":
        v, cert = hg.nu(H)
    elif m == "bsM":
        if M is None or M < 1:
            raise PreconditionError("bsM needs M >= 1")
        v, cert = hg.nu_M(H, M)
    elif m == "bsStar":
        v, cert = hg.nu_star(H)
    elif m == "C":
        v, cert = hg.tau(H)
    else:
        v, cert = hg.tau_star(H)
    if not cert.validate(H) or cert.value != v:
        raise AssertionError(f"certificate for {m} at {a} failed revalidation")
    return LocalMeasureValue(m, a, v, cert)


def certificate_all(f: BoolFn) -> np.ndarray:
    """C_x(f) for every x, from the largest monochromatic subcube through x.

    Works on the ternary cube (digit 2 = free coordinate): first mark each
    subcube as constant-0, constant-1 or mixed, then push the largest free
    count of a constant subcube down onto every point it contains.
    """
    n = f.arity
    check_arity(n)
    if n > DP_MAX_ARITY:
        raise BudgetExceeded(f"subcube table needs 3^{n} cells")
    cube = f.values.astype(np.int8).reshape((2,) * n) if n else f.values.astype(np.int8)
    for ax in range(n):
        a0 = np.take(cube, 0, axis=ax)
        a1 = np.take(cube, 1, axis=ax)
        mixed = np.where(a0 == a1, a0, np.int8(2))
        cube = np.stack([a0, a1, mixed], axis=ax)
    stars = np.zeros(cube.shape, dtype=np.int8)
    for ax in range(n):
        shape = [1] * n
        shape[ax] = 3
        stars += np.array([0, 0, 1], dtype=np.int8).reshape(shape)
    best = np.where(cube == 2, np.int8(-1), stars)
    for ax in range(n):
        b0 = np.take(best, 0, axis=ax)
        b1 = np.take(best, 1, axis=ax)
        b2 = np.take(best, 2, axis=ax)
        best = np.stack([np.maximum(b0, b2), np.maximum(b1, b2)], axis=ax)
    return n - best.astype(np.int64).ravel()


@dataclass
class GlobalMeasureReport:
    function: str
    measure: str
    m0: Any
    m1: Any
    argmax0: Optional[int]
    argmax1: Optional[int]
    exact: bool = True
    table: Optional[List[Any]] = field(default=None, repr=False)
    arity: int = 0

    @property
    def m(self):
        return max(self.m0, self.m1)

    def to_json(self, with_certs=None):
        def fmt(x):
            return None if x is None else format(x, f"0{self.arity}b")

        out = {
            "function": self.function,
            "measure": self.measure,
            "m0": str(self.m0),
            "m1": str(self.m1),
            "m": str(self.m),
            "exact": self.exact,
            "witnesses": [],
        }
        for x, v in ((self.argmax0, self.m0), (self.argmax1, self.m1)):
            if x is None:
                continue
            w = {"input": fmt(x), "value": str(v)}
            if with_certs is not None:
                w["certificate"] = with_certs(x)
            out["witnesses"].append(w)
        return out


def _upper_bound_fn(f: BoolFn, m: str, M):
    # cheap per-input upper bounds for pruning: every packing-type measure is
    # at most C_x (times M for M-fold packings)
    if f.arity > DP_MAX_ARITY or m in ("s", "C"):
        return None
    cx = certificate_all(f)
    if m == "bsM":
        return lambda x: int(cx[x]) * M
    return lambda x: int(cx[x])


def global_measure(
    f: BoolFn,
    measure: str,
    M: Optional[int] = None,
    with_table: bool = False,
    sample: Optional[tuple] = None,
) -> GlobalMeasureReport:
    """m_0, m_1 and the smallest inputs attaining them.

    ``sample=(count, seed)`` evaluates only a seeded sample of inputs and
    marks the report as a lower bound; it is required above the arity budget.
    """
    m = measure_id(measure)
    name = f.name or "f"
    if f.is_constant:
        return GlobalMeasureReport(name, m, 0, 0, None, None, True,
                                   [0] * f.size if with_table else None, f.arity)
    if sample is None:
        check_arity(f.arity, "global measure (pass a sample plan)")
        inputs = range(f.size)
        exact = True
    else:
        count, seed = sample
        rng = np.random.Generator(np.random.Philox(seed))
        inputs = sorted(set(int(v) for v in rng.integers(0, f.size, size=count)))
        exact = False

    vals = f.values
    table = [None] * f.size if with_table else None
    if exact and m in ("s", "C") and (m == "s" or f.arity <= DP_MAX_ARITY):
        arr = sensitivity_all(f) if m == "s" else certificate_all(f)
        res = []
        for b in (0, 1):
            idx = np.flatnonzero(vals == bool(b))
            k = idx[np.argmax(arr[idx])]  # argmax returns the first maximum
            res.append((int(arr[k]), int(k)))
        if with_table:
            table = [int(v) for v in arr]
        return GlobalMeasureReport(name, m, res[0][0], res[1][0], res[0][1], res[1][1], True, table, f.arity)

    ub = None if with_table else _upper_bound_fn(f, m, M)
    best = [None, None]
    arg = [None, None]
    for x in inputs:
        b = int(vals[x])
        if ub is not None and best[b] is not None and ub(x) <= best[b]:
            continue
        v = local(f, x, m, M).value
        if with_table:
            table[x] = v
        if best[b] is None or v > best[b]:
            best[b], arg[b] = v, x
    m0 = best[0] if best[0] is not None else 0
    m1 = best[1] if best[1] is not None else 0
    return GlobalMeasureReport(name, m, m0, m1, arg[0], arg[1], exact, table, f.arity)


def chain_at(f: BoolFn, x) -> Dict[str, Any]:
    """All local measures at x, asserting s <= bs <= bs* = C* <= C."""
    vals = {m: local(f, x, m).value for m in ("s", "bs", "bsStar", "CStar", "C")}
    s, bs, bss, cs, c = (vals[k] for k in ("s", "bs", "bsStar", "CStar", "C"))
    if not (s <= bs <= bss and bss == cs and cs <= c):
        raise AssertionError(f"measure chain broken at {x}: {vals}")
    return vals


def or_compose_check(g: BoolFn, n: int) -> Dict[str, Any]:
    """Compare m_b(OR_n o g) with (n * m_0(g), m_1(g)) for C, bs and bs*."""
    if g.is_constant:
        raise ConstantFunctionError("g must be non-constant")
    check_arity(n * g.arity, "OR composition")
    f = compose(named_fn("OR", n), g)
    rows = {}
    ok = True
    for m in ("C", "bs", "bsStar"):
        rf = global_measure(f, m)
        rg = global_measure(g, m)
        row = {
            "m0_f": rf.m0,
            "n_m0_g": n * rg.m0,
            "m1_f": rf.m1,
            "m1_g": rg.m1,
        }
        row["holds"] = rf.m0 == n * rg.m0 and rf.m1 == rg.m1
        ok &= row["holds"]
        rows[m] = row
    return {"g": g.name, "n": n, "measures": rows, "holds": ok}


def rc_verifier_check(f: BoolFn, z, scale: Fraction = Fraction(1)) -> Dict[str, Any]:
    """Exact acceptance probabilities of the verifier built from an optimal C* witness.

    The verifier queries index i with probability sigma(i) = min(1, scale * w(i))
    and accepts iff it sees no disagreement with z. On the flip of a min-block B
    it therefore accepts with probability prod_{i in B} (1 - sigma(i)).
    """
    a = as_assignment(z, f.arity)
    H = minblocks(f, a).hypergraph
    cstar, cert = hg.tau_star(H)
    sigma = [min(Fraction(1), Fraction(scale) * w) for w in cert.weights]
    accept = []
    for B in H.ordered:
        p = Fraction(1)
        for i in mask_indices(B):
            p *= 1 - sigma[i]
        accept.append((B, p))
    worst = max((p for _, p in accept), default=Fraction(0))
    return {
        "input": str(a),
        "cstar": cstar,
        "sigma": sigma,
        "expected_queries": sum(sigma, Fraction(0)),
        "acceptance": accept,
        "max_acceptance": worst,
        "sound": worst <= INV_E + RC_TOL,
        "rejects_half": worst <= Fraction(1, 2),
    }
