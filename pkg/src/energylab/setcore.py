"""Finite sets of scalars, pointwise set operations, and representation counts.

The central object downstream is not the combined set A*B itself but the
multiplicity function r(x) = #{(a,b) in A x B : a*b = x}. Both live here,
with exact integer counts regardless of the scalar backend.
"""

from __future__ import annotations

from collections import Counter
from fractions import Fraction

from .numeric import (
    DEFAULT_TOLERANCE,
    EXACT,
    TOLERANT,
    BackendMismatch,
    Tolerance,
    backend_of,
    canon,
    format_value,
    tolerant_groups,
)

SUM = "sum"
DIFF = "diff"
PROD = "prod"
RATIO = "ratio"

OPS = (SUM, DIFF, PROD, RATIO)

_OP_ALIASES = {
    "sum": SUM, "+": SUM, "plus": SUM,
    "diff": DIFF, "-": DIFF, "minus": DIFF,
    "prod": PROD, "*": PROD, "times": PROD,
    "ratio": RATIO, "/": RATIO, "div": RATIO,
}

_OP_SYMBOL = {SUM: "+", DIFF: "-", PROD: "*", RATIO: "/"}


def parse_op(text: str) -> str:
    op = _OP_ALIASES.get(text.strip().lower())
    if op is None:
        raise ValueError(f"unknown set operation {text!r}; use one of {OPS}")
    return op


def apply_op(op: str, a, b):
    if op == SUM:
        return a + b
    if op == DIFF:
        return a - b
    if op == PROD:
        return a * b
    if op == RATIO:
        if isinstance(a, float) or isinstance(b, float):
            return a / b
        return canon(Fraction(a) / Fraction(b))
    raise ValueError(f"unknown set operation {op!r}")


class FiniteSet:
    """Immutable sorted finite set of same-backend scalars."""

    __slots__ = ("values", "backend", "tau", "_members")

    def __init__(self, values, tol: Tolerance | None = None):
        vals = [canon(v) for v in values]
        if not vals:
            raise ValueError("empty set rejected")
        backends = {backend_of(v) for v in vals}
        if len(backends) > 1:
            raise BackendMismatch("set mixes exact and tolerant values")
        backend = backends.pop()
        if backend == TOLERANT:
            tol = tol or DEFAULT_TOLERANCE
            vals = [g[0] for g in tolerant_groups(vals, tol)]
            object.__setattr__(self, "tau", tol.tau)
        else:
            vals = sorted(set(vals))
            object.__setattr__(self, "tau", None)
        object.__setattr__(self, "values", tuple(vals))
        object.__setattr__(self, "backend", backend)
        object.__setattr__(self, "_members", None)

    def __setattr__(self, name, value):
        raise AttributeError("FiniteSet is immutable")

    def members(self) -> frozenset:
        m = self._members
        if m is None:
            m = frozenset(self.values)
            object.__setattr__(self, "_members", m)
        return m

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __contains__(self, v) -> bool:
        return canon(v) in self.members()

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FiniteSet)
            and self.backend == other.backend
            and self.values == other.values
        )

    def __hash__(self) -> int:
        return hash((self.backend, self.values))

    def __repr__(self) -> str:
        body = " ".join(format_value(v) for v in self.values[:8])
        more = "" if len(self) <= 8 else f" ... ({len(self)} elements)"
        return f"FiniteSet[{self.backend}]{{{body}{more}}}"

    def issubset(self, other: "FiniteSet") -> bool:
        return self.members() <= other.members()

    def min(self):
        return self.values[0]

    def max(self):
        return self.values[-1]


def _check_zero_free(op: str, A: FiniteSet, B: FiniteSet) -> None:
    if op in (PROD, RATIO):
        if 0 in A:
            raise ValueError(f"zero element in left operand is not allowed for {op}")
        if 0 in B:
            raise ValueError(f"zero element in right operand is not allowed for {op}")


def _tol_of(A: FiniteSet, B: FiniteSet) -> Tolerance:
    taus = [t for t in (A.tau, B.tau) if t is not None]
    return Tolerance(max(taus)) if taus else DEFAULT_TOLERANCE


class RepFunction:
    """Multiplicity histogram of an operation over A x B, with exact counts."""

    __slots__ = ("op", "counts", "left_size", "right_size")

    def __init__(self, op: str, counts: dict, left_size: int, right_size: int):
        self.op = op
        self.counts = counts
        self.left_size = left_size
        self.right_size = right_size
        total = sum(counts.values())
        # mass identity: every ordered pair lands somewhere
        if total != left_size * right_size:
            raise AssertionError(
                f"mass identity violated: {total} != {left_size}*{right_size}"
            )

    def get(self, x) -> int:
        return self.counts.get(canon(x), 0)

    def support(self) -> tuple:
        return tuple(sorted(self.counts))

    def support_size(self) -> int:
        return len(self.counts)

    def total(self) -> int:
        return self.left_size * self.right_size

    def max_count(self) -> int:
        return max(self.counts.values())

    def count_histogram(self) -> dict[int, int]:
        """Map r -> #{x : r(x) = r}; the basis for every moment sum."""
        h = Counter(self.counts.values())
        return dict(sorted(h.items()))

    def __repr__(self) -> str:
        return (
            f"RepFunction(op={self.op}, support={len(self.counts)}, "
            f"pairs={self.total()})"
        )


def rep_function(A: FiniteSet, op: str, B: FiniteSet) -> RepFunction:
    """Exact multiplicity function of {a op b : a in A, b in B}."""
    op = parse_op(op)
    _check_zero_free(op, A, B)
    counts: Counter = Counter()
    if A.backend == EXACT and B.backend == EXACT:
        for a in A.values:
            for b in B.values:
                counts[apply_op(op, a, b)] += 1
    else:
        if A.backend != B.backend:
            raise BackendMismatch("operands live on different backends")
        tol = _tol_of(A, B)
        raw = [apply_op(op, a, b) for a in A.values for b in B.values]
        for group in tolerant_groups(raw, tol):
            counts[group[0]] += len(group)
    return RepFunction(op, dict(counts), len(A), len(B))


def combine(A: FiniteSet, op: str, B: FiniteSet) -> FiniteSet:
    """The set {a op b}; support of the multiplicity function."""
    rep = rep_function(A, op, B)
    tol = Tolerance(A.tau) if A.tau is not None else None
    return FiniteSet(rep.support(), tol)


def affine(A: FiniteSet, lam, mu) -> FiniteSet:
    """lam*A + mu elementwise; lam = 0 collapses and is rejected."""
    lam = canon(lam)
    mu = canon(mu)
    if lam == 0:
        raise ValueError("affine scale must be nonzero")
    tol = Tolerance(A.tau) if A.tau is not None else None
    return FiniteSet([apply_op(SUM, apply_op(PROD, lam, a), mu) for a in A], tol)


def image(A: FiniteSet, f, tol: Tolerance | None = None) -> FiniteSet:
    """Pointwise image f(A). Strictly monotone f must preserve cardinality."""
    vals = [f.eval(a) for a in A.values]
    if any(isinstance(v, float) for v in vals):
        # one float forces the whole image onto the tolerant backend
        vals = [float(v) for v in vals]
    out = FiniteSet(vals, tol)
    if getattr(f, "increasing", None) is not None and len(out) != len(A):
        raise AssertionError(
            f"monotone image lost elements: |f(A)|={len(out)} < |A|={len(A)}"
        )
    return out


def op_symbol(op: str) -> str:
    return _OP_SYMBOL[parse_op(op)]
