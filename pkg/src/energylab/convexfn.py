"""Registry of monotone convex and concave functions with domain tracking.

Each function carries its curvature kind, monotonicity direction, and an
inverse rule. Evaluation stays exact on rationals whenever the result is
rational (integer powers, reciprocals, perfect roots) and falls back to the
tolerant float backend otherwise; the fallback is visible to callers because
the resulting sets carry the tolerant backend tag.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .exactmath import iroot
from .numeric import canon, format_value

CONVEX = "convex"
CONCAVE = "concave"


class DomainError(ValueError):
    """Input outside the declared domain of a registered function."""


class NonInvertibleError(ValueError):
    """Inverse requested for a function with no monotone inverse."""


def _flip_kind(kind: str) -> str:
    return CONCAVE if kind == CONVEX else CONVEX


def _inverse_kind(kind: str, increasing: bool) -> str:
    # increasing bijections swap curvature under inversion, decreasing keep it
    return _flip_kind(kind) if increasing else kind


class ConvexFn:
    __slots__ = ("tag", "kind", "increasing", "domain_desc",
                 "_domain", "_eval", "_inverse")

    def __init__(self, tag, kind, increasing, domain_desc, domain, evaluate, inverse):
        self.tag = tag
        self.kind = kind
        self.increasing = increasing
        self.domain_desc = domain_desc
        self._domain = domain
        self._eval = evaluate
        self._inverse = inverse

    def eval(self, x):
        x = canon(x)
        if not self._domain(x):
            raise DomainError(
                f"{self.tag} undefined at {format_value(x)}: requires {self.domain_desc}"
            )
        return canon(self._eval(x))

    def inverse(self) -> "ConvexFn":
        if self.increasing is None:
            raise NonInvertibleError(f"{self.tag} is not monotone on its domain")
        return self._inverse()

    def __repr__(self):
        direction = "increasing" if self.increasing else "decreasing"
        return f"ConvexFn({self.tag}: {self.kind}, {direction}, {self.domain_desc})"


def _positive(x) -> bool:
    return x > 0


def _any_real(x) -> bool:
    return True


def _exact_rational_power(x, p: Fraction):
    """x**p for x > 0; Fraction when the result is rational, else None."""
    if isinstance(x, float):
        return None
    y = Fraction(x) ** p.numerator
    q = p.denominator
    if q == 1:
        return y
    rn = iroot(y.numerator, q)
    rd = iroot(y.denominator, q)
    if rn**q == y.numerator and rd**q == y.denominator:
        return Fraction(rn, rd)
    return None


def _pow_eval(p: Fraction):
    fp = float(p)

    def ev(x):
        exact = _exact_rational_power(x, p)
        if exact is not None:
            return exact
        return math.pow(float(x), fp)

    return ev


def _fmt_frac(p: Fraction) -> str:
    return str(p.numerator) if p.denominator == 1 else f"{p.numerator}/{p.denominator}"


def _make_pow(p: Fraction) -> ConvexFn:
    if p <= 0 or p == 1:
        raise ValueError(f"power exponent must be positive and != 1, got {p}")
    kind = CONVEX if p > 1 else CONCAVE
    tag = f"pow:{_fmt_frac(p)}"
    return ConvexFn(
        tag, kind, True, "x > 0", _positive, _pow_eval(p),
        lambda: _make_pow_or_alias(1 / p),
    )


def _make_pow_or_alias(p: Fraction) -> ConvexFn:
    if p == 2:
        return parse_fn("square")
    if p == Fraction(1, 2):
        return parse_fn("sqrt")
    if p == 3:
        return parse_fn("cube+")
    return _make_pow(p)


def _square() -> ConvexFn:
    return ConvexFn(
        "square", CONVEX, True, "x > 0", _positive,
        lambda x: x * x, lambda: parse_fn("sqrt"),
    )


def _sqrt() -> ConvexFn:
    return ConvexFn(
        "sqrt", CONCAVE, True, "x > 0", _positive,
        _pow_eval(Fraction(1, 2)), lambda: parse_fn("square"),
    )


def _cube_pos() -> ConvexFn:
    return ConvexFn(
        "cube+", CONVEX, True, "x > 0", _positive,
        lambda x: x * x * x, lambda: _make_pow(Fraction(1, 3)),
    )


def _exp() -> ConvexFn:
    return ConvexFn(
        "exp", CONVEX, True, "any real x", _any_real,
        lambda x: math.exp(float(x)), lambda: parse_fn("log"),
    )


def _log() -> ConvexFn:
    return ConvexFn(
        "log", CONCAVE, True, "x > 0", _positive,
        lambda x: math.log(float(x)), lambda: parse_fn("exp"),
    )


def _recip_pos() -> ConvexFn:
    def ev(x):
        if isinstance(x, float):
            return 1.0 / x
        return Fraction(1) / Fraction(x)

    return ConvexFn("recip+", CONVEX, False, "x > 0", _positive, ev,
                    lambda: parse_fn("recip+"))


def _negate(inner: ConvexFn) -> ConvexFn:
    tag = f"neg:{inner.tag}"

    def make_inverse():
        inner_inv = inner.inverse()

        def ev(y):
            return inner_inv.eval(-y)

        return ConvexFn(
            f"inv:{tag}",
            _inverse_kind(_flip_kind(inner.kind), not inner.increasing),
            not inner.increasing,
            f"-y satisfying: {inner_inv.domain_desc.replace('x', 'y')}"
            if "x" in inner_inv.domain_desc else inner_inv.domain_desc,
            lambda y: inner_inv._domain(-y),
            ev,
            lambda: _negate(inner),
        )

    return ConvexFn(
        tag,
        _flip_kind(inner.kind),
        not inner.increasing,
        inner.domain_desc,
        inner._domain,
        lambda x: -inner._eval(x),
        make_inverse,
    )


_BASE = {
    "square": _square,
    "sqrt": _sqrt,
    "cube+": _cube_pos,
    "exp": _exp,
    "log": _log,
    "recip+": _recip_pos,
}


def parse_fn(spec: str) -> ConvexFn:
    """Build a registered function from its spec string.

    Grammar: square | sqrt | cube+ | pow:<p> | exp | log | recip+
             | neg:<spec> | inv:<spec>
    """
    s = spec.strip()
    base = _BASE.get(s)
    if base is not None:
        return base()
    if s.startswith("pow:"):
        return _make_pow_or_alias(Fraction(s[4:]))
    if s.startswith("neg:"):
        return _negate(parse_fn(s[4:]))
    if s.startswith("inv:"):
        return parse_fn(s[4:]).inverse()
    raise ValueError(f"unknown function spec {spec!r}")


def validate_strict(f: ConvexFn, X) -> str:
    """Classify f on a sorted sample by strict divided-difference monotonicity.

    Returns "convex", "concave", or "neither". Needs at least three points.
    """
    xs = list(X)
    if len(xs) < 3:
        raise ValueError("strict validation needs at least 3 sample points")
    xs.sort()
    ys = [f.eval(x) for x in xs]
    exact = all(not isinstance(v, float) for v in xs + ys)
    if exact:
        xs = [Fraction(x) for x in xs]
        ys = [Fraction(y) for y in ys]
    else:
        xs = [float(x) for x in xs]
        ys = [float(y) for y in ys]
    slopes = [
        (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]) for i in range(len(xs) - 1)
    ]
    if all(s2 > s1 for s1, s2 in zip(slopes, slopes[1:])):
        return CONVEX
    if all(s2 < s1 for s1, s2 in zip(slopes, slopes[1:])):
        return CONCAVE
    return "neither"
