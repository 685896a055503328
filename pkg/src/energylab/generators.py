"""Deterministic input families: progressions, convex images, seeded draws.

Randomness comes from splitmix64 only, so every generated set is reproducible
across platforms from (family string, size, seed). The generator constants are
the standard ones; seed 0 must produce the outputs 0xe220a8397b1dcdaf,
0x6e789e6aa1b965f4, 0x06c45d188009454f.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .convexfn import parse_fn
from .numeric import Tolerance, canon
from .setcore import FiniteSet

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


class SplitMix64:
    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + _GAMMA) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def next_below(self, n: int) -> int:
        """Uniform draw from [0, n), unbiased by rejection."""
        if n < 1:
            raise ValueError("draw range must be >= 1")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            u = self.next_u64()
            if u < limit:
                return u % n


@dataclass(frozen=True)
class FamilySpec:
    tag: str
    params: tuple
    seed: int = 0

    def __str__(self) -> str:
        bits = [self.tag, *map(str, self.params)]
        if self.tag in ("rand", "pap"):
            bits.append(hex(self.seed))
        return ":".join(bits)


def _parse_seed(tok: str) -> int:
    return int(tok, 16) if tok.lower().startswith("0x") else int(tok)


def parse_family(text: str) -> FamilySpec:
    """Family strings: ap:start:step | gp:base:ratio | convex:<fn spec>
    | rand:range[:seed] | pap:start:step:jitter[:seed]."""
    parts = text.strip().split(":")
    tag = parts[0]
    if tag == "ap":
        if len(parts) != 3:
            raise ValueError(f"ap family needs start:step, got {text!r}")
        start, step = Fraction(parts[1]), Fraction(parts[2])
        if step == 0:
            raise ValueError("ap step must be nonzero")
        return FamilySpec("ap", (start, step))
    if tag == "gp":
        if len(parts) != 3:
            raise ValueError(f"gp family needs base:ratio, got {text!r}")
        base, ratio = Fraction(parts[1]), Fraction(parts[2])
        if base == 0:
            raise ValueError("gp base must be nonzero")
        if ratio in (0, 1, -1):
            raise ValueError("gp ratio must avoid 0, 1, -1")
        return FamilySpec("gp", (base, ratio))
    if tag == "convex":
        if len(parts) < 2:
            raise ValueError(f"convex family needs a function spec, got {text!r}")
        return FamilySpec("convex", (":".join(parts[1:]),))
    if tag == "rand":
        if len(parts) not in (2, 3):
            raise ValueError(f"rand family needs range[:seed], got {text!r}")
        rng_max = int(parts[1])
        if rng_max < 1:
            raise ValueError("rand range must be >= 1")
        seed = _parse_seed(parts[2]) if len(parts) == 3 else 0
        return FamilySpec("rand", (rng_max,), seed)
    if tag == "pap":
        if len(parts) not in (4, 5):
            raise ValueError(f"pap family needs start:step:jitter[:seed], got {text!r}")
        start, step = Fraction(parts[1]), Fraction(parts[2])
        jitter = int(parts[3])
        if step == 0:
            raise ValueError("pap step must be nonzero")
        if jitter < 0:
            raise ValueError("pap jitter must be >= 0")
        seed = _parse_seed(parts[4]) if len(parts) == 5 else 0
        return FamilySpec("pap", (start, step, jitter), seed)
    raise ValueError(f"unknown family tag {tag!r}")


def _unify(vals):
    vals = [canon(v) for v in vals]
    if any(isinstance(v, float) for v in vals):
        return [float(v) for v in vals]
    return vals


def generate(spec, n: int, tol: Tolerance | None = None) -> FiniteSet:
    """Produce the n-element member of a family; always exactly n elements."""
    if isinstance(spec, str):
        spec = parse_family(spec)
    if n < 1:
        raise ValueError("set size must be >= 1")
    if spec.tag == "ap":
        start, step = spec.params
        return FiniteSet([start + i * step for i in range(n)])
    if spec.tag == "gp":
        base, ratio = spec.params
        return FiniteSet([base * ratio**i for i in range(n)])
    if spec.tag == "convex":
        f = parse_fn(spec.params[0])
        vals = _unify([f.eval(i) for i in range(1, n + 1)])
        out = FiniteSet(vals, tol)
        if len(out) != n:
            raise ValueError(f"convex image collapsed {n} points to {len(out)}")
        return out
    if spec.tag == "rand":
        (rng_max,) = spec.params
        if n > rng_max:
            raise ValueError(f"cannot draw {n} distinct values from [1, {rng_max}]")
        rng = SplitMix64(spec.seed)
        seen: set[int] = set()
        while len(seen) < n:
            seen.add(1 + rng.next_below(rng_max))
        return FiniteSet(sorted(seen))
    if spec.tag == "pap":
        start, step, jitter = spec.params
        rng = SplitMix64(spec.seed)
        seen = set()
        i = 0
        while len(seen) < n:
            seen.add(start + i * step + rng.next_below(jitter + 1))
            i += 1
        return FiniteSet(sorted(seen))
    raise ValueError(f"unknown family tag {spec.tag!r}")


def verify_convexity(S: FiniteSet) -> bool:
    """True when consecutive gaps strictly increase; needs at least 3 points."""
    if len(S) < 3:
        raise ValueError("convexity check needs at least 3 points")
    vals = list(S)
    gaps = [b - a for a, b in zip(vals, vals[1:])]
    return all(g2 > g1 for g1, g2 in zip(gaps, gaps[1:]))
