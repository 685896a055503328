"""Exact arithmetic over sums of rational multiples of q-th roots of integers.

Every quantity the workbench needs to compare is a finite sum

    sum_m  c_m * m**(1/q)

with rational coefficients c_m and positive q-th-power-free radicands m.
Distinct q-th-power-free radicands have q-th roots that are linearly
independent over the rationals (real positive roots; this is the classical
Besicovitch/Mordell theorem), so the canonical dict of radicand -> coefficient
decides equality exactly and a nonzero element is genuinely nonzero as a real
number.  Signs of nonzero elements are decided by interval refinement with a
growing precision ladder, which terminates precisely because the value cannot
be zero.

Comparisons against thresholds carrying a factor L(n)**e, where
L(n) = max(1, log2 n), are decided the same way.  For n <= 2 or n a power of
two the logarithm is rational and folds into the radical sum; otherwise
log2(n) is transcendental (Gelfond-Schneider), so equality with an algebraic
number is impossible and interval refinement again terminates.  Mixed
expressions that also carry a factor ln(2) are handled identically; for those
a secret exact coincidence cannot be ruled out by elementary means, so the
ladder is capped and a failure to decide raises ExactComparisonError rather
than looping.  The cap has never been reached in practice.

Logarithm bounds are computed from the atanh series with directed rounding,
so every returned interval is a true enclosure regardless of precision.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt

_PREC_LADDER = (64, 128, 256, 512, 1024, 2048, 4096, 8192, 16384)


class ExactComparisonError(Exception):
    """Interval refinement hit the precision cap without deciding a sign."""


def iroot(n: int, q: int) -> int:
    """Largest integer r with r**q <= n.  Newton iteration, bit-length seed."""
    if n < 0 or q < 1:
        raise ValueError("iroot needs n >= 0, q >= 1")
    if n in (0, 1) or q == 1:
        return n
    # seed from above: 2**ceil(bits/q) >= n**(1/q)
    x = 1 << ((n.bit_length() + q - 1) // q)
    while True:
        y = ((q - 1) * x + n // x ** (q - 1)) // q
        if y >= x:
            break
        x = y
    while x ** q > n:
        x -= 1
    return x


_FACTOR_CACHE: dict[int, dict[int, int]] = {1: {}}


def _factorize(n: int) -> dict[int, int]:
    """Prime factorization as {prime: exponent}.  Cached; trial division."""
    if n < 1:
        raise ValueError("factorization needs n >= 1")
    hit = _FACTOR_CACHE.get(n)
    if hit is not None:
        return hit
    m = n
    out: dict[int, int] = {}
    for p in (2, 3, 5):
        while m % p == 0:
            out[p] = out.get(p, 0) + 1
            m //= p
    d = 7
    # wheel over 30 would be nicer; bases here are small counts, keep it plain
    while d * d <= m:
        while m % d == 0:
            out[d] = out.get(d, 0) + 1
            m //= d
        d += 2
    if m > 1:
        out[m] = out.get(m, 0) + 1
    _FACTOR_CACHE[n] = out
    return out


def qfree_pow(base: int, num: int, q: int) -> tuple[int, int]:
    """Write base**(num/q) = u * m**(1/q) with m q-th-power-free.

    Returns (u, m).  base >= 1, num >= 0, q >= 1.  Only `base` is factored,
    never base**num, so large exponents stay cheap.
    """
    if base == 1 or num == 0:
        return 1, 1
    fac = _factorize(base)
    u = 1
    m = 1
    m_fac: dict[int, int] = {}
    for p, e in fac.items():
        tot = e * num
        u *= p ** (tot // q)
        r = tot % q
        if r:
            m *= p ** r
            m_fac[p] = r
    _FACTOR_CACHE.setdefault(m, m_fac)
    return u, m


def root_bounds(m: int, q: int, prec: int) -> tuple[Fraction, Fraction]:
    """Enclosure of m**(1/q) with width 2**-prec."""
    if m == 1:
        return Fraction(1), Fraction(1)
    r = iroot(m << (prec * q), q)
    return Fraction(r, 1 << prec), Fraction(r + 1, 1 << prec)


def _fr_floor(x: Fraction, wbits: int) -> Fraction:
    return Fraction((x.numerator << wbits) // x.denominator, 1 << wbits)


def _fr_ceil(x: Fraction, wbits: int) -> Fraction:
    return Fraction(-((-x.numerator << wbits) // x.denominator), 1 << wbits)


def _atanh_bounds(z: Fraction, prec: int) -> tuple[Fraction, Fraction]:
    """Enclosure of atanh(z) for 0 <= z <= 1/3 via the odd power series.

    Terms are rounded outward at prec+16 bits each, tail bounded by the
    geometric comparison sum_{i>j} z^(2i+1)/(2i+1) <= (9/8) * next term.
    """
    if z == 0:
        return Fraction(0), Fraction(0)
    if not 0 < z <= Fraction(1, 3):
        raise ValueError("series argument out of range")
    w = prec + 16
    cut = Fraction(1, 1 << (prec + 8))
    lo = Fraction(0)
    hi = Fraction(0)
    zz = z * z
    power = z
    j = 0
    while True:
        term = power / (2 * j + 1)
        lo += _fr_floor(term, w)
        hi += _fr_ceil(term, w)
        power *= zz
        j += 1
        nxt = power / (2 * j + 1)
        if nxt * 9 < cut * 8:
            hi += _fr_ceil(nxt * Fraction(9, 8), w)
            return lo, hi


_LN2_CACHE: dict[int, tuple[Fraction, Fraction]] = {}


def ln2_bounds(prec: int) -> tuple[Fraction, Fraction]:
    """Enclosure of ln 2 = 2 * atanh(1/3)."""
    hit = _LN2_CACHE.get(prec)
    if hit is None:
        lo, hi = _atanh_bounds(Fraction(1, 3), prec + 2)
        hit = (2 * lo, 2 * hi)
        _LN2_CACHE[prec] = hit
    return hit


def _floor_log2_fraction(x: Fraction) -> int:
    """Largest e with 2**e <= x, for x > 0."""
    e = x.numerator.bit_length() - x.denominator.bit_length()
    # the bit-length estimate can be off by one either way
    while _pow2(e + 1) <= x:
        e += 1
    while _pow2(e) > x:
        e -= 1
    return e


def _pow2(e: int) -> Fraction:
    return Fraction(1 << e) if e >= 0 else Fraction(1, 1 << -e)


def ln_bounds(x: Fraction, prec: int) -> tuple[Fraction, Fraction]:
    """Enclosure of ln x for rational x > 0."""
    if x <= 0:
        raise ValueError("log of nonpositive value")
    if x == 1:
        return Fraction(0), Fraction(0)
    e = _floor_log2_fraction(x)
    m = x / _pow2(e)  # in [1, 2)
    z = (m - 1) / (m + 1)  # in [0, 1/3)
    alo, ahi = _atanh_bounds(z, prec + 2)
    mlo, mhi = 2 * alo, 2 * ahi
    l2lo, l2hi = ln2_bounds(prec + 2)
    if e >= 0:
        return e * l2lo + mlo, e * l2hi + mhi
    return e * l2hi + mlo, e * l2lo + mhi


def is_power_of_two(n: int) -> bool:
    return n >= 1 and n & (n - 1) == 0


def floor_log2(n: int) -> int:
    if n < 1:
        raise ValueError("floor_log2 needs n >= 1")
    return n.bit_length() - 1


def log2_bounds(x: Fraction, prec: int) -> tuple[Fraction, Fraction]:
    """Enclosure of log2 x; exact (degenerate) when x is a power of two."""
    if x <= 0:
        raise ValueError("log of nonpositive value")
    if x.denominator == 1 and is_power_of_two(x.numerator):
        v = Fraction(floor_log2(x.numerator))
        return v, v
    if x.numerator == 1 and is_power_of_two(x.denominator):
        v = Fraction(-floor_log2(x.denominator))
        return v, v
    nlo, nhi = ln_bounds(x, prec + 4)
    dlo, dhi = ln2_bounds(prec + 4)
    return _idiv((nlo, nhi), (dlo, dhi))


def guarded_log2_exact(n: int) -> Fraction | None:
    """L(n) = max(1, log2 n) when it is rational, else None."""
    if n < 1:
        raise ValueError("guarded log needs n >= 1")
    if n <= 2:
        return Fraction(1)
    if is_power_of_two(n):
        return Fraction(floor_log2(n))
    return None


def guarded_log2_bounds(n: int, prec: int) -> tuple[Fraction, Fraction]:
    exact = guarded_log2_exact(n)
    if exact is not None:
        return exact, exact
    # n >= 3 here, so log2 n > 1 and the max() guard is inactive
    return log2_bounds(Fraction(n), prec)


def _imul(a: tuple[Fraction, Fraction], b: tuple[Fraction, Fraction]) -> tuple[Fraction, Fraction]:
    cands = (a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1])
    return min(cands), max(cands)


def _idiv(a: tuple[Fraction, Fraction], b: tuple[Fraction, Fraction]) -> tuple[Fraction, Fraction]:
    if b[0] <= 0 <= b[1]:
        raise ZeroDivisionError("divisor interval contains zero")
    cands = (a[0] / b[0], a[0] / b[1], a[1] / b[0], a[1] / b[1])
    return min(cands), max(cands)


def _ipow(a: tuple[Fraction, Fraction], e: int) -> tuple[Fraction, Fraction]:
    if e < 0:
        raise ValueError("negative interval power unsupported")
    if e == 0:
        return Fraction(1), Fraction(1)
    cands = [a[0] ** e, a[1] ** e]
    if a[0] < 0 < a[1]:
        cands.append(Fraction(0))
    return min(cands), max(cands)


class PowerSum:
    """Canonical sum of rational multiples of q-th roots of integers.

    terms maps a q-th-power-free radicand to its (nonzero) rational
    coefficient; radicand 1 carries the rational part.  q is 1 whenever every
    radicand is 1, which makes purely rational values directly comparable no
    matter how they were built.
    """

    __slots__ = ("q", "terms")

    def __init__(self, q: int, terms: dict[int, Fraction]):
        if q < 1:
            raise ValueError("root index must be >= 1")
        clean = {m: c for m, c in terms.items() if c}
        if all(m == 1 for m in clean):
            q = 1
        self.q = q
        self.terms = clean

    # --- constructors -------------------------------------------------

    @classmethod
    def from_rational(cls, v) -> "PowerSum":
        return cls(1, {1: Fraction(v)})

    @classmethod
    def integer_power(cls, base: int, exponent, coeff=1) -> "PowerSum":
        """coeff * base**exponent for integer base >= 0, rational exponent >= 0."""
        exponent = Fraction(exponent)
        coeff = Fraction(coeff)
        if base < 0 or exponent < 0:
            raise ValueError("integer_power needs base >= 0 and exponent >= 0")
        if base == 0:
            if exponent == 0:
                return cls.from_rational(coeff)
            return cls(1, {})
        u, m = qfree_pow(base, exponent.numerator, exponent.denominator)
        return cls(exponent.denominator, {m: coeff * u})

    @classmethod
    def zero(cls) -> "PowerSum":
        return cls(1, {})

    # --- structure ----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_rational(self) -> bool:
        return all(m == 1 for m in self.terms)

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("not a rational value")
        return self.terms.get(1, Fraction(0))

    def _lifted(self, q_new: int) -> "PowerSum":
        """Rewrite with root index q_new (a multiple of q)."""
        if q_new == self.q:
            return self
        if q_new % self.q:
            raise ValueError("can only lift to a multiple of the root index")
        k = q_new // self.q
        out: dict[int, Fraction] = {}
        for m, c in self.terms.items():
            u, m2 = qfree_pow(m, k, q_new)
            out[m2] = out.get(m2, Fraction(0)) + c * u
        return PowerSum(q_new, out)

    @staticmethod
    def _common(a: "PowerSum", b: "PowerSum") -> tuple["PowerSum", "PowerSum"]:
        q = a.q * b.q // gcd(a.q, b.q)
        return a._lifted(q), b._lifted(q)

    # --- arithmetic ---------------------------------------------------

    def __add__(self, other: "PowerSum") -> "PowerSum":
        a, b = PowerSum._common(self, other)
        out = dict(a.terms)
        for m, c in b.terms.items():
            out[m] = out.get(m, Fraction(0)) + c
        return PowerSum(a.q, out)

    def __sub__(self, other: "PowerSum") -> "PowerSum":
        return self + other.scale(-1)

    def scale(self, v) -> "PowerSum":
        v = Fraction(v)
        return PowerSum(self.q, {m: c * v for m, c in self.terms.items()})

    def __mul__(self, other: "PowerSum") -> "PowerSum":
        a, b = PowerSum._common(self, other)
        q = a.q
        out: dict[int, Fraction] = {}
        for m1, c1 in a.terms.items():
            f1 = _factorize(m1)
            for m2, c2 in b.terms.items():
                f2 = _factorize(m2)
                u = 1
                m = 1
                mf: dict[int, int] = {}
                for p in set(f1) | set(f2):
                    tot = f1.get(p, 0) + f2.get(p, 0)
                    u *= p ** (tot // q)
                    r = tot % q
                    if r:
                        m *= p ** r
                        mf[p] = r
                _FACTOR_CACHE.setdefault(m, mf)
                out[m] = out.get(m, Fraction(0)) + c1 * c2 * u
        return PowerSum(q, out)

    def __pow__(self, e: int) -> "PowerSum":
        if e < 0:
            raise ValueError("negative power unsupported")
        acc = PowerSum.from_rational(1)
        for _ in range(e):
            acc = acc * self
        return acc

    def __eq__(self, other) -> bool:
        if not isinstance(other, PowerSum):
            return NotImplemented
        a, b = PowerSum._common(self, other)
        return a.terms == b.terms

    __hash__ = None  # mutable-ish container semantics; equality is structural

    def __repr__(self) -> str:
        if not self.terms:
            return "PowerSum(0)"
        bits = " + ".join(
            f"{c}" if m == 1 else f"{c}*{m}^(1/{self.q})"
            for m, c in sorted(self.terms.items())
        )
        return f"PowerSum({bits})"

    # --- analysis -----------------------------------------------------

    def bounds(self, prec: int) -> tuple[Fraction, Fraction]:
        """True enclosure of the real value."""
        lo = Fraction(0)
        hi = Fraction(0)
        for m, c in self.terms.items():
            if m == 1:
                lo += c
                hi += c
                continue
            rlo, rhi = root_bounds(m, self.q, prec)
            if c >= 0:
                lo += c * rlo
                hi += c * rhi
            else:
                lo += c * rhi
                hi += c * rlo
        return lo, hi

    def sign(self) -> int:
        """Exact sign.  Fast paths are exact; the ladder ends by nonvanishing."""
        if not self.terms:
            return 0
        signs = {1 if c > 0 else -1 for c in self.terms.values()}
        if len(signs) == 1:
            return signs.pop()
        for prec in _PREC_LADDER:
            lo, hi = self.bounds(prec)
            if lo > 0:
                return 1
            if hi < 0:
                return -1
        raise ExactComparisonError("sign undecided at precision cap")

    def float_value(self) -> float:
        lo, hi = self.bounds(64)
        return float((lo + hi) / 2)


def cmp_ps(a: PowerSum, b: PowerSum) -> int:
    """sign(a - b), exactly."""
    return (a - b).sign()


def cmp_ps_vs_ps_logpow(a: PowerSum, b: PowerSum, n: int, log_exp: int) -> int:
    """sign(a - b * L(n)**log_exp) with L(n) = max(1, log2 n), exactly.

    When L(n) is rational the factor folds into the radical sum.  Otherwise
    b = 0 or a = 0 short-circuit, and for nonzero a, b the difference cannot
    vanish (log2 n is transcendental while a/b is algebraic), so interval
    refinement terminates.
    """
    if log_exp < 0:
        raise ValueError("log exponent must be >= 0")
    exact = guarded_log2_exact(n)
    if exact is not None or log_exp == 0:
        factor = (exact if exact is not None else Fraction(1)) ** log_exp
        return cmp_ps(a, b.scale(factor))
    if b.is_zero():
        return a.sign()
    if a.is_zero():
        return -b.sign()  # L(n) > 1 here
    for prec in _PREC_LADDER:
        alo, ahi = a.bounds(prec)
        blo, bhi = b.bounds(prec)
        liv = _ipow(guarded_log2_bounds(n, prec), log_exp)
        rlo, rhi = _imul((blo, bhi), liv)
        if alo > rhi:
            return 1
        if ahi < rlo:
            return -1
    raise ExactComparisonError("log comparison undecided at precision cap")


def cmp_ps_ln2_logpow(a: PowerSum, b: PowerSum, n: int, log_exp: int) -> int:
    """sign(a * ln(2) * L(n)**log_exp - b), by capped interval refinement.

    Unlike the plain log comparator, an exact coincidence here cannot be
    excluded by classical transcendence results, so hitting the cap raises.
    In every workbench use the two sides differ by a healthy margin.
    """
    if log_exp < 0:
        raise ValueError("log exponent must be >= 0")
    if a.is_zero():
        return -b.sign()
    for prec in _PREC_LADDER:
        alo, ahi = a.bounds(prec)
        blo, bhi = b.bounds(prec)
        liv = _ipow(guarded_log2_bounds(n, prec), log_exp)
        lhs = _imul(_imul((alo, ahi), ln2_bounds(prec)), liv)
        if lhs[0] > bhi:
            return 1
        if lhs[1] < blo:
            return -1
    raise ExactComparisonError("ln2 comparison undecided at precision cap")


def ceil_div_guarded_log2(p: int, q: int, n: int) -> int:
    """ceil(p / (q * L(n))) for integers p >= 0, q >= 1.

    Exact when L(n) is rational; otherwise the quotient is irrational (p > 0),
    so the two interval endpoints share a ceiling at some finite precision.
    """
    if p < 0 or q < 1:
        raise ValueError("need p >= 0 and q >= 1")
    if p == 0:
        return 0
    exact = guarded_log2_exact(n)
    if exact is not None:
        v = Fraction(p) / (q * exact)
        return -((-v.numerator) // v.denominator)
    for prec in _PREC_LADDER:
        llo, lhi = guarded_log2_bounds(n, prec)
        xlo = Fraction(p) / (q * lhi)
        xhi = Fraction(p) / (q * llo)
        clo = -((-xlo.numerator) // xlo.denominator)
        chi = -((-xhi.numerator) // xhi.denominator)
        if clo == chi:
            return clo
    raise ExactComparisonError("threshold ceiling undecided at precision cap")
