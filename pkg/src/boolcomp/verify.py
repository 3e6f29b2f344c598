"""Acceptance suites: each reproduces one headline property at desk scale.

A suite returns a SuiteResult whose ``passed`` is the conjunction of its
checks; ``line()`` is the one-line summary printed by the CLI and the tests.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, List

from . import hypergraph as hg
from .assemblage import (
    compose_hitting,
    decompose_hitting,
    is_hitting,
    local_hypergraphs,
    minblocks,
    minblocks_composed,
)
from .complimit import (
    charval,
    random_submult_instance,
    random_supermult_instance,
    sandwich_check,
    submult_property,
    supermult_property,
    bs_lift_packing,
)
from .core import named_fn
from .measures import INV_E, RC_TOL, or_compose_check, rc_verifier_check
from .surd import Surd
from .tree import compose_boolfn, compose_hypergraph, compose_weight
from . import zoo

TOL = Fraction(1, 10**9)


@dataclass
class SuiteResult:
    name: str
    criterion: int
    passed: bool
    summary: str
    seconds: float = 0.0
    limit: float | None = None  # runtime budget in seconds, if any
    details: Dict[str, Any] = field(default_factory=dict)

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        budget = f" (limit {self.limit:g}s)" if self.limit else ""
        return f"[{mark}] {self.criterion:>2} {self.name}: {self.summary}; {self.seconds:.2f}s{budget}"

    def to_json(self):
        return {
            "suite": self.name,
            "criterion": self.criterion,
            "passed": self.passed,
            "summary": self.summary,
            "seconds": round(self.seconds, 3),
            "details": self.details,
        }


def _timed(fn: Callable[[], SuiteResult]) -> SuiteResult:
    t = time.perf_counter()
    res = fn()
    res.seconds = time.perf_counter() - t
    if res.limit is not None and res.seconds >= res.limit:
        res.passed = False
        res.summary += " [over time]"
    return res


def bublitz() -> SuiteResult:
    f = named_fn("BUBLITZ")
    want = {"bs": 4, "bsStar": Fraction(9, 2), "CStar": Fraction(9, 2), "C": 5}
    bad = []
    for x in range(64):
        H = minblocks(f, x).hypergraph
        got = {
            "bs": hg.nu(H)[0],
            "bsStar": hg.nu_star(H)[0],
            "CStar": hg.tau_star(H)[0],
            "C": hg.tau(H)[0],
        }
        if got != want:
            bad.append((x, got))
    ok = not bad
    summ = "bs=4, bs*=C*=9/2, C=5 at all 64 inputs" if ok else f"{len(bad)} inputs differ, first {bad[0]}"
    return SuiteResult("bublitz", 1, ok, summ, limit=1.0, details={"mismatches": [str(b) for b in bad[:5]]})


def bublitz_limit() -> SuiteResult:
    f = named_fn("BUBLITZ")
    cs = charval(f, "CStar")
    c = charval(f, "C")
    half = Fraction(9, 2)
    ok_cs = half - TOL <= cs.lo and cs.hi <= half + TOL
    ok_c = c.value == 5
    summ = f"C* limit in [{float(cs.lo):.12f}, {float(cs.hi):.12f}], C limit = {c.value}"
    return SuiteResult("bublitz-limit", 2, ok_cs and ok_c, summ, limit=60.0,
                       details={"CStar": cs.to_json(), "C": c.to_json()})


def bs_lift() -> SuiteResult:
    f = named_fn("BUBLITZ")
    r = bs_lift_packing(f, f, 0)
    ok = r.verified and r.size >= 18 and r.X.arity == 36
    summ = f"verified disjoint packing of size {r.size} (> 16) at a {r.X.arity}-bit input, M={r.M}"
    return SuiteResult("bs-lift", 3, ok, summ, limit=30.0,
                       details={"input": str(r.X), "size": r.size, "M": r.M, "verified": r.verified})


def nand() -> SuiteResult:
    rows = {}
    ok = True
    for n in range(2, 7):
        cv = charval(named_fn("NAND", n), "C")
        root = Surd.sqrt(n)
        good = root - TOL <= cv.lo and cv.hi <= root + TOL
        ok &= good
        rows[n] = {"value": str(cv.value), "holds": good}
    summ = "C limit of NAND_n equals sqrt(n) within 1e-9 for n=2..6" if ok else f"mismatch {rows}"
    return SuiteResult("nand", 4, ok, summ, details={str(k): v for k, v in rows.items()})


def duality(n_random: int = 100, n_inputs: int = 64, seed: int = 0) -> SuiteResult:
    checked = 0
    bad = []

    def check(f, x):
        nonlocal checked
        H = minblocks(f, x).hypergraph
        a, _ = hg.nu_star(H)
        b, _ = hg.tau_star(H)
        checked += 1
        if a != b:
            bad.append((f.name, x, a, b))

    for f in zoo.small_zoo():
        for x in range(f.size):
            check(f, x)
    rng = zoo.rng_for(seed)
    for i in range(n_random):
        n = int(rng.integers(2, 11))
        f = zoo.random_function(n, int(rng.integers(0, 2**32)))
        xs = rng.integers(0, f.size, size=n_inputs)
        for x in xs:
            check(f, int(x))
    ok = not bad
    summ = f"bs* = C* exactly at {checked} (function, input) pairs" if ok else f"{len(bad)} mismatches"
    return SuiteResult("duality", 5, ok, summ, details={"checked": checked, "mismatches": [str(b) for b in bad[:5]]})


def sandwich(n_random: int = 20, kmax: int = 4, seed: int = 0) -> SuiteResult:
    fns = [named_fn("NAND", 2)] + [zoo.random_nonmonotone(2, seed + i) for i in range(n_random)]
    rows = []
    ok = True
    cache = {}
    for f in fns:
        if f.table not in cache:
            cv = charval(f, "C")
            cache[f.table] = (cv, [sandwich_check(f, "C", k, cv) for k in range(1, kmax + 1)])
        cv, res = cache[f.table]
        good = all(r["holds"] for r in res)
        ok &= good
        rows.append({"function": f.name, "table": f.table, "charval": str(cv.value),
                     "m_fk": [r["m_fk"] for r in res], "holds": good})
    summ = (f"cv^k/2 <= C(f^(k)) <= 2nk cv^(k-1) for {len(fns)} functions, k=1..{kmax}"
            if ok else "sandwich bound violated")
    return SuiteResult("sandwich", 6, ok, summ, details={"rows": rows})


def grouped() -> SuiteResult:
    rep = zoo.verify_construction(zoo.build_grouped(16))
    byname = {r["claim"]: r for r in rep["claims"]}
    c = byname["Chat(f) >= n/2"]["value"]
    cs = byname["Chat*(f) <= 4 sqrt(n)"]["value"]
    summ = f"n=16: C limit = {c} >= 8, C* limit in [{cs[0]}, {cs[1]}] <= 16"
    return SuiteResult("grouped", 7, rep["all_pass"], summ, limit=600.0, details=rep)


def star() -> SuiteResult:
    rep = zoo.verify_construction(zoo.build_star(5))
    summ = "s=5: bs_a <= 3 on every 0-input, bs* at 0^10 = 5/2" if rep["all_pass"] else "star claim failed"
    return SuiteResult("star", 8, rep["all_pass"], summ, details=rep)


def or_compose() -> SuiteResult:
    rows = {}
    ok = True
    for name, n in (("AND", 2), ("PARITY", 2), ("BUBLITZ", None)):
        g = named_fn(name, n)
        r = or_compose_check(g, 2)
        ok &= r["holds"]
        rows[g.name] = {m: {k: str(v) for k, v in row.items()} for m, row in r["measures"].items()}
    summ = "m0(OR_2 o g) = 2 m0(g), m1 unchanged, for C, bs, bs* and g in AND_2, PARITY_2, Bublitz"
    return SuiteResult("or-compose", 9, ok, summ if ok else "identity violated", details=rows)


def matrix_lemmas(count: int = 500, kmax: int = 6, seed: int = 0) -> SuiteResult:
    rng = zoo.rng_for(seed)
    sup = sub = literal_fail = 0
    bad = []
    while sup < count:
        k = int(rng.integers(1, kmax + 1))
        Ms, lam = random_supermult_instance(rng, k)
        r = supermult_property(Ms, lam)
        if not r["hypothesis"]:
            continue
        sup += 1
        if not r["holds"]:
            bad.append(("supermult", Ms, lam))
    while sub < count:
        k = int(rng.integers(1, kmax + 1))
        frontiers, lam = random_submult_instance(rng, k)
        r = submult_property(frontiers, lam)
        if not r["hypothesis"]:
            continue
        sub += 1
        literal_fail += not r["literal_norm_holds"]
        if not r["holds"]:
            bad.append(("submult", frontiers, lam))
    ok = not bad
    summ = (f"{sup} supermultiplicative and {sub} submultiplicative instances, k<={kmax}; "
            f"norm bound without the lam^k term fails on {literal_fail}")
    return SuiteResult("matrix-lemmas", 10, ok, summ if ok else f"{len(bad)} violations",
                       details={"violations": [str(b) for b in bad[:3]], "literal_norm_failures": literal_fail})


def _random_hitting(rng, H, ground):
    steps = [Fraction(0), Fraction(1, 3), Fraction(1, 2), Fraction(2, 3), Fraction(1)]
    w = [steps[int(rng.integers(0, len(steps)))] for _ in range(ground)]
    for e in H.ordered:
        idx = [i for i in range(ground) if (e >> i) & 1]
        if sum((w[i] for i in idx), Fraction(0)) < 1:
            w[idx[int(rng.integers(0, len(idx)))]] = Fraction(1)
    return w


def structural(count: int = 200, seed: int = 0) -> SuiteResult:
    rng = zoo.rng_for(seed)
    fails = {"claimB": 0, "compose": 0, "decompose": 0}
    for _ in range(count):
        ens = zoo.random_ensemble(rng)
        F = compose_boolfn(ens)
        x = int(rng.integers(0, F.size))
        if minblocks_composed(ens, x).minblocks != minblocks(F, x).minblocks:
            fails["claimB"] += 1
    for _ in range(count):
        ens = zoo.random_ensemble(rng)
        x = int(rng.integers(0, 1 << ens.tree.n_leaves))
        targets = local_hypergraphs(ens, x)
        hs = targets.map(lambda v, H: tuple(_random_hitting(rng, H, H.ground)))
        h = compose_hitting(hs, targets)
        if not is_hitting(compose_hypergraph(targets), h):
            fails["compose"] += 1
    for i in range(count):
        ens = zoo.random_ensemble(rng)
        x = int(rng.integers(0, 1 << ens.tree.n_leaves))
        targets = local_hypergraphs(ens, x)
        whole = compose_hypergraph(targets)
        if i % 2:
            h = _random_hitting(rng, whole, whole.ground)
        else:
            h = [Fraction(v) for v in hg.tau(whole)[1].weights]
        parts = decompose_hitting(h, targets)
        good = all(is_hitting(targets.payload[v], parts.payload[v]) for v in targets.tree.internal)
        back = compose_weight(parts)
        good &= all(Fraction(b) <= a for a, b in zip(h, back))
        if all(v in (0, 1) for v in h):
            good &= all(w in (0, 1) for v in parts.tree.internal for w in parts.payload[v])
        if not good:
            fails["decompose"] += 1
    ok = not any(fails.values())
    summ = (f"min-block composition, hitting-set composition and decomposition on {count} "
            f"seeded depth<=3 ensembles each")
    return SuiteResult("structural", 11, ok, summ if ok else f"failures {fails}", details=fails)


def rc() -> SuiteResult:
    f = named_fn("BUBLITZ")
    worst = Fraction(0)
    ok = True
    for z in range(64):
        r = rc_verifier_check(f, z)
        worst = max(worst, r["max_acceptance"])
        ok &= r["sound"] and r["expected_queries"] == Fraction(9, 2) and r["max_acceptance"] <= INV_E + RC_TOL
    summ = f"max acceptance {worst} <= 1/e at every input, expected queries 9/2"
    return SuiteResult("rc", 12, ok, summ, details={"max_acceptance": str(worst)})


SUITES: Dict[str, Callable[[], SuiteResult]] = {
    "bublitz": bublitz,
    "bublitz-limit": bublitz_limit,
    "bs-lift": bs_lift,
    "nand": nand,
    "duality": duality,
    "sandwich": sandwich,
    "grouped": grouped,
    "star": star,
    "or-compose": or_compose,
    "matrix-lemmas": matrix_lemmas,
    "structural": structural,
    "rc": rc,
}


def run_suite(name: str) -> SuiteResult:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    return _timed(SUITES[name])


def run_all(names: List[str] | None = None) -> List[SuiteResult]:
    return [run_suite(n) for n in (names or list(SUITES))]
