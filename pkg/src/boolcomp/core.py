"""Truth-table boolean functions, assignments and selectors.

Bit ``k`` of a table holds f at the assignment whose index ``i`` equals bit
``i`` of ``k`` (index 0 is the least significant bit).
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, NamedTuple, Sequence, Union

import numpy as np

from .errors import ArityMismatch, BudgetExceeded, ParseError, PreconditionError

MAX_ARITY = 28


def _env_int(name, default):
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise ParseError(f"{name}={raw!r} is not an integer") from None


@dataclass
class Limits:
    """Caller budgets for enumeration-heavy operations.

    ``max_arity`` bounds exhaustive input enumeration and composed truth
    tables, ``max_edges`` bounds materialized hypergraphs.
    """

    max_arity: int = 20
    max_edges: int = 200_000

    @classmethod
    def from_env(cls):
        return cls(
            max_arity=min(MAX_ARITY, _env_int("BOOLCOMP_MAX_ARITY", 20)),
            max_edges=_env_int("BOOLCOMP_MAX_EDGES", 200_000),
        )


LIMITS = Limits.from_env()


def set_limits(max_arity=None, max_edges=None):
    if max_arity is not None:
        if max_arity > MAX_ARITY:
            raise BudgetExceeded(f"max_arity {max_arity} exceeds the hard cap {MAX_ARITY}")
        LIMITS.max_arity = max_arity
    if max_edges is not None:
        LIMITS.max_edges = max_edges


def check_arity(n, what="input enumeration"):
    if n > LIMITS.max_arity:
        raise BudgetExceeded(f"{what} needs arity {n} > max_arity {LIMITS.max_arity}")


class Assignment(NamedTuple):
    arity: int
    bits: int

    def __str__(self):
        # index 0 is printed rightmost
        return format(self.bits, f"0{self.arity}b") if self.arity else ""

    def bit(self, i):
        return (self.bits >> i) & 1

    def ones(self):
        return [i for i in range(self.arity) if (self.bits >> i) & 1]

    @classmethod
    def from_seq(cls, seq: Sequence[int]):
        """Build from a sequence listing the value of index 0 first."""
        bits = 0
        for i, b in enumerate(seq):
            if b not in (0, 1, True, False):
                raise ValueError(f"assignment entries must be bits, got {b!r}")
            bits |= int(b) << i
        return cls(len(seq), bits)

    @classmethod
    def parse(cls, text: str):
        """Parse a binary string in the same layout ``str`` produces."""
        text = text.strip()
        if text and set(text) - {"0", "1"}:
            raise ParseError(f"not a binary assignment: {text!r}")
        return cls(len(text), int(text, 2) if text else 0)


AssignmentLike = Union[Assignment, int, Sequence[int]]


def as_assignment(x: AssignmentLike, arity: int) -> Assignment:
    if isinstance(x, Assignment):
        if x.arity != arity:
            raise ArityMismatch(f"assignment has arity {x.arity}, expected {arity}")
        a = x
    elif isinstance(x, (int, np.integer)):
        a = Assignment(arity, int(x))
    else:
        a = Assignment.from_seq(list(x))
        if a.arity != arity:
            raise ArityMismatch(f"assignment has arity {a.arity}, expected {arity}")
    if a.bits < 0 or a.bits >> arity:
        raise ArityMismatch(f"bits {a.bits:#x} do not fit in {arity} positions")
    return a


def as_mask(B, arity=None) -> int:
    """Index subset given as a bitmask or an iterable of indices."""
    if isinstance(B, (int, np.integer)):
        m = int(B)
    else:
        m = 0
        for i in B:
            m |= 1 << int(i)
    if arity is not None and (m < 0 or m >> arity):
        raise PreconditionError(f"subset {m:#x} not within {arity} indices")
    return m


def mask_indices(m: int):
    out = []
    i = 0
    while m:
        if m & 1:
            out.append(i)
        m >>= 1
        i += 1
    return out


def popcount(m: int) -> int:
    return bin(m).count("1")


class Selector(NamedTuple):
    alpha0: Assignment
    alpha1: Assignment

    @property
    def arity(self):
        return self.alpha0.arity


def make_selector(a0: AssignmentLike, a1: AssignmentLike, arity: int) -> Selector:
    return Selector(as_assignment(a0, arity), as_assignment(a1, arity))


@dataclass(frozen=True)
class BoolFn:
    """A total boolean function stored as a truth-table bitset."""

    arity: int
    table: int
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if self.arity < 0 or self.arity > MAX_ARITY:
            raise BudgetExceeded(f"arity {self.arity} outside 0..{MAX_ARITY}")
        if self.table < 0 or self.table >> (1 << self.arity):
            raise ValueError("table does not fit in 2^arity bits")

    @property
    def size(self):
        return 1 << self.arity

    @cached_property
    def values(self) -> np.ndarray:
        """Truth table as a read-only numpy bool array indexed by input."""
        nbytes = max(1, (self.size + 7) // 8)
        raw = np.frombuffer(self.table.to_bytes(nbytes, "little"), dtype=np.uint8)
        v = np.unpackbits(raw, bitorder="little")[: self.size].astype(bool)
        v.flags.writeable = False
        return v

    @cached_property
    def ones_count(self):
        return popcount(self.table)

    @property
    def is_constant(self):
        return self.table == 0 or self.ones_count == self.size

    def __call__(self, x: AssignmentLike) -> int:
        return evaluate(self, x)

    def __repr__(self):
        label = self.name or "BoolFn"
        return f"<{label} n={self.arity} table={self.table:#x}>"

    @classmethod
    def from_values(cls, values, name=""):
        v = np.asarray(values, dtype=bool).ravel()
        n = int(v.size).bit_length() - 1
        if v.size != 1 << n:
            raise ValueError(f"table length {v.size} is not a power of two")
        packed = np.packbits(v, bitorder="little")
        return cls(n, int.from_bytes(packed.tobytes(), "little"), name)

    @classmethod
    def from_predicate(cls, arity: int, pred: Callable[[int], int], name=""):
        table = 0
        for k in range(1 << arity):
            if pred(k):
                table |= 1 << k
        return cls(arity, table, name)

    def renamed(self, name):
        return BoolFn(self.arity, self.table, name)


def evaluate(f: BoolFn, x: AssignmentLike) -> int:
    a = as_assignment(x, f.arity)
    return (f.table >> a.bits) & 1


def flip(x: Assignment, B) -> Assignment:
    m = as_mask(B, x.arity)
    return Assignment(x.arity, x.bits ^ m)


def is_f_compatible(f: BoolFn, sel: Selector) -> bool:
    if sel.alpha0.arity != f.arity or sel.alpha1.arity != f.arity:
        raise ArityMismatch("selector arity differs from the function arity")
    return evaluate(f, sel.alpha0) == 0 and evaluate(f, sel.alpha1) == 1


def restrict(f: BoolFn, i: int, b: int) -> BoolFn:
    """Fix index ``i`` to ``b``; remaining indices keep their order."""
    if not 0 <= i < f.arity:
        raise ArityMismatch(f"index {i} out of range for arity {f.arity}")
    v = f.values.reshape((2,) * f.arity)  # axis 0 is the highest index
    sub = np.take(v, b, axis=f.arity - 1 - i)
    return BoolFn.from_values(sub.ravel(), f"{f.name}|x{i}={b}" if f.name else "")


def input_weights(n: int) -> np.ndarray:
    """Hamming weight of every input of arity n."""
    w = np.zeros(1 << n, dtype=np.int64)
    for i in range(n):
        w[1 << i : 1 << (i + 1)] = w[: 1 << i] + 1
    return w


def _bublitz(k):
    x = [(k >> i) & 1 for i in range(6)]
    if x[0] ^ x[1] ^ x[2] ^ x[3] == 0:
        return x[0] ^ x[1] ^ x[4]
    return x[0] ^ x[2] ^ x[5]


_FAMILIES = ("OR", "NOR", "AND", "NAND", "PARITY", "XOR", "MAJ")


def named_fn(name: str, n: int | None = None) -> BoolFn:
    """Build a named function.

    OR, AND, NOR, NAND, PARITY (alias XOR) and MAJ take ``n``; ID is the
    one-variable identity, CONST0/CONST1 take an optional ``n`` (default 1);
    BUBLITZ has arity 6 and takes no parameter.
    """
    key = name.strip().upper()
    if key == "BUBLITZ":
        if n not in (None, 6):
            raise ValueError("BUBLITZ takes no parameter")
        return BoolFn.from_predicate(6, _bublitz, "BUBLITZ")
    if key == "ID":
        return BoolFn(1, 0b10, "ID")
    if key in ("CONST0", "CONST1"):
        n = 1 if n is None else n
        if n < 0:
            raise ValueError("n must be nonnegative")
        return BoolFn(n, 0 if key == "CONST0" else (1 << (1 << n)) - 1, f"{key}_{n}")
    if key not in _FAMILIES:
        raise ValueError(f"unknown function name {name!r}")
    if n is None or n < 1:
        raise ValueError(f"{key} needs a parameter n >= 1")
    if n > MAX_ARITY:
        raise BudgetExceeded(f"arity {n} above {MAX_ARITY}")
    full = (1 << (1 << n)) - 1
    if key == "OR":
        return BoolFn(n, full & ~1, f"OR_{n}")
    if key == "NOR":
        return BoolFn(n, 1, f"NOR_{n}")
    if key == "AND":
        return BoolFn(n, 1 << ((1 << n) - 1), f"AND_{n}")
    if key == "NAND":
        return BoolFn(n, full & ~(1 << ((1 << n) - 1)), f"NAND_{n}")
    w = input_weights(n)
    if key in ("PARITY", "XOR"):
        return BoolFn.from_values(w & 1, f"PARITY_{n}")
    if key == "MAJ":
        return BoolFn.from_values(2 * w > n, f"MAJ_{n}")
    raise ValueError(f"unknown function name {name!r}")


# .btt text format


def to_btt(f: BoolFn) -> str:
    digits = max(1, -(-(1 << f.arity) // 4))
    return f"n={f.arity}\n{f.table:0{digits}x}\n"


def from_btt(text: str, name="") -> BoolFn:
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if len(lines) != 2 or not lines[0].startswith("n="):
        raise ParseError("expected two lines: 'n=<arity>' and a hex table")
    try:
        n = int(lines[0][2:])
    except ValueError:
        raise ParseError(f"bad arity line {lines[0]!r}") from None
    if n < 0 or n > MAX_ARITY:
        raise ParseError(f"arity {n} outside 0..{MAX_ARITY}")
    hexs = lines[1]
    digits = max(1, -(-(1 << n) // 4))
    if len(hexs) != digits:
        raise ParseError(f"arity {n} needs {digits} hex digits, got {len(hexs)}")
    if set(hexs) - set("0123456789abcdef"):
        raise ParseError("table must be lowercase hex")
    table = int(hexs, 16)
    if table >> (1 << n):
        raise ParseError("table has bits beyond 2^n")
    return BoolFn(n, table, name)


def read_btt(path) -> BoolFn:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return from_btt(text, os.path.splitext(os.path.basename(str(path)))[0])


def write_btt(path, f: BoolFn):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(to_btt(f))


def iter_inputs(f_or_n: BoolFn | int, value: int | None = None) -> Iterable[int]:
    n = f_or_n.arity if isinstance(f_or_n, BoolFn) else f_or_n
    if value is None:
        return range(1 << n)
    idx = np.flatnonzero(f_or_n.values == bool(value))
    return (int(i) for i in idx)
