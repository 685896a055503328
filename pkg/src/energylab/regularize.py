"""Iterated dyadic refinement with explicit constants and checkable certificates.

Starting from a pair (A, V) and a moment exponent k > 1, each round takes the
dominant dyadic class (t, D) of the multiplicity function of A against V,
collects the pair set P of all (a, v) landing in D, and discards the few
elements of A whose row count against D exceeds |P| / (eps |A|). The round
either stops, when the surviving pairs G keep at least a 2**-k fraction of P,
or recurses on the surviving elements. The cutoff eps is derived from (k, c1)
and |A| alone; every constant in the produced certificate is explicit and
every certificate inequality is decided by exact arithmetic.

The eps denominator is assembled from certified upper bounds of 2**k, ln 2,
and L(|A|), so the rational eps used never exceeds its ideal value; that
direction preserves both the cardinality guarantee of each round and the
termination count.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .exactmath import (
    PowerSum,
    cmp_ps,
    cmp_ps_ln2_logpow,
    cmp_ps_vs_ps_logpow,
    guarded_log2_bounds,
    ln_bounds,
)
from .energy import dominant_class, energy_of_rep, restricted_mass
from .numeric import Tolerance, format_value, parse_value
from .setcore import DIFF, FiniteSet, apply_op, parse_op, rep_function

_EPS_PREC = 128


def refinement_cutoff(k, c1, n: int) -> Fraction:
    """Rational eps <= c1 / (2**k ln2 (k-1) L(n)**2 + 2**k L(n) ln(1/(1-c1)))."""
    k = Fraction(k)
    c1 = Fraction(c1)
    if not 0 < c1 < 1:
        raise ValueError("c1 must lie strictly between 0 and 1")
    if k <= 1:
        raise ValueError("moment exponent must exceed 1")
    pow2k_hi = PowerSum.integer_power(2, k).bounds(_EPS_PREC)[1]
    l_hi = guarded_log2_bounds(n, _EPS_PREC)[1]
    ln2_hi = ln_bounds(Fraction(2), _EPS_PREC)[1]
    lnc_hi = ln_bounds(1 / (1 - c1), _EPS_PREC)[1]
    denom = pow2k_hi * ln2_hi * (k - 1) * l_hi**2 + pow2k_hi * l_hi * lnc_hi
    return c1 / denom


@dataclass(frozen=True)
class StepRecord:
    index: int
    size: int
    t: int
    class_size: int
    pair_mass: int
    kept_mass: int
    stopped: bool


@dataclass(frozen=True)
class DecompositionCertificate:
    op: str
    k: Fraction
    c1: Fraction
    epsilon: Fraction
    A: FiniteSet
    V: FiniteSet
    B: FiniteSet
    C: FiniteSet
    D: FiniteSet
    t: int
    iterations: int
    trace: tuple
    tau: float | None = None


def _rows_against(A_vals, V: FiniteSet, op: str, members: frozenset) -> dict:
    """row(a) = #{v in V : a op v lands in the chosen class}."""
    vv = V.values
    out = {}
    for a in A_vals:
        out[a] = sum(1 for v in vv if apply_op(op, a, v) in members)
    return out


def _row_meets_output_cut(row: int, pair_mass: int, b_size: int, k: Fraction) -> bool:
    """row >= pair_mass / (2**(k+1) |B|), decided exactly."""
    if k.denominator == 1:
        return row * (1 << (k.numerator + 1)) * b_size >= pair_mass
    lhs = PowerSum.integer_power(2, k + 1, row * b_size)
    return cmp_ps(lhs, PowerSum.from_rational(pair_mass)) >= 0


def decompose(A: FiniteSet, V: FiniteSet, op: str, k, c1) -> DecompositionCertificate:
    """Run the refinement until the dominant class keeps most of its pairs."""
    op = parse_op(op)
    k = Fraction(k)
    c1 = Fraction(c1)
    if len(A) < 4:
        raise ValueError("refinement needs |A| >= 4")
    if k <= 1:
        raise ValueError("moment exponent must exceed 1")
    if not 0 < c1 < 1:
        raise ValueError("c1 must lie strictly between 0 and 1")

    eps = refinement_cutoff(k, c1, len(A))
    # stop is proved to arrive strictly before c1/eps rounds
    cap = int(c1 / eps)

    pow2k = PowerSum.integer_power(2, k)
    current = A
    trace: list[StepRecord] = []
    energies: list[PowerSum] = []
    final = None
    for i in range(cap + 1):
        rep = rep_function(current, op, V)
        energies.append(energy_of_rep(rep, k).exact)
        dom = dominant_class(rep, k)
        members = frozenset(dom.members)
        pair_mass = restricted_mass(rep, dom.members)
        rows = _rows_against(current.values, V, op, members)
        n_i = len(current)
        # Markov cut: row(a) <= pair_mass / (eps n_i)
        keep = [
            a
            for a in current.values
            if rows[a] * eps.numerator * n_i <= pair_mass * eps.denominator
        ]
        kept_mass = sum(rows[a] for a in keep)
        if len(keep) * eps.denominator < (eps.denominator - eps.numerator) * n_i:
            raise AssertionError("Markov cut dropped more than an eps fraction")
        stop = (
            kept_mass * (1 << k.numerator) >= pair_mass
            if k.denominator == 1
            else cmp_ps(pow2k.scale(kept_mass), PowerSum.from_rational(pair_mass)) >= 0
        )
        trace.append(
            StepRecord(i, n_i, dom.t, dom.size, pair_mass, kept_mass, stop)
        )
        if stop:
            final = (current, rep, dom, pair_mass, rows, keep)
            break
        nxt = FiniteSet(keep)
        # sharp one-round energy drop, all radical arithmetic:
        #   E_next + t**(k-1) pair_mass <= E + (2t)**(k-1) kept_mass
        e_next = energy_of_rep(rep_function(nxt, op, V), k).exact
        lhs = e_next + PowerSum.integer_power(dom.t, k - 1, pair_mass)
        rhs = energies[-1] + PowerSum.integer_power(2 * dom.t, k - 1, kept_mass)
        if cmp_ps(lhs, rhs) > 0:
            raise AssertionError("per-round energy accounting failed")
        current = nxt

    if final is None:
        raise RuntimeError(
            f"no stop within the guaranteed {cap} rounds; the cutoff logic is broken"
        )

    B, rep, dom, pair_mass, rows, keep = final
    out = [c for c in keep if _row_meets_output_cut(rows[c], pair_mass, len(B), k)]
    if not out:
        raise AssertionError("averaging guarantees a nonempty output set")
    if len(B) * (1 - c1).denominator < (1 - c1).numerator * len(A):
        raise AssertionError("survivor set fell under the (1 - c1) floor")

    cert = DecompositionCertificate(
        op=op,
        k=k,
        c1=c1,
        epsilon=eps,
        A=A,
        V=V,
        B=B,
        C=FiniteSet(out),
        D=FiniteSet(dom.members),
        t=dom.t,
        iterations=len(trace) - 1,
        trace=tuple(trace),
        tau=A.tau,
    )
    # step energies ride along for diagnostics; not part of the certificate text
    object.__setattr__(cert, "_step_energies", energies)
    return cert


@dataclass(frozen=True)
class CheckEntry:
    name: str
    ok: bool
    lhs: str
    rhs: str


@dataclass(frozen=True)
class CertificateReport:
    entries: tuple
    ok: bool

    def entry(self, name: str) -> CheckEntry:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)


def _fmt_ps(ps: PowerSum) -> str:
    if ps.is_rational():
        return format_value(ps.rational_value())
    return f"~{ps.float_value():.6g}"


def verify_certificate(cert: DecompositionCertificate) -> CertificateReport:
    """Recompute every certificate inequality from scratch, exactly.

    The log factors L(n) = max(1, log2 n) are handled by exact comparators,
    never by floating point.
    """
    k = Fraction(cert.k)
    c1 = Fraction(cert.c1)
    entries: list[CheckEntry] = []

    def add(name, ok, lhs, rhs):
        entries.append(CheckEntry(name, bool(ok), str(lhs), str(rhs)))

    add(
        "subset-chain",
        cert.C.issubset(cert.B) and cert.B.issubset(cert.A),
        f"|C|={len(cert.C)} |B|={len(cert.B)}",
        f"|A|={len(cert.A)}",
    )
    one_minus = 1 - c1
    add(
        "B-cardinality",
        len(cert.B) * one_minus.denominator >= one_minus.numerator * len(cert.A),
        f"|B|={len(cert.B)}",
        f"(1-c1)|A|={format_value(one_minus * len(cert.A))}",
    )

    rep = rep_function(cert.B, cert.op, cert.V)
    fresh = frozenset(
        x for x, r in rep.counts.items() if cert.t <= r < 2 * cert.t
    )
    add(
        "class-membership",
        fresh == cert.D.members(),
        f"recomputed class of scale {cert.t}: {len(fresh)} values",
        f"stated: {len(cert.D)} values",
    )

    e_exact = energy_of_rep(rep, k).exact
    d_size = len(cert.D)
    lower = PowerSum.integer_power(cert.t, k, d_size)
    add(
        "energy-lower",
        cmp_ps(lower, e_exact) <= 0,
        f"|D| t^k = {_fmt_ps(lower)}",
        f"E_k(B,V) = {_fmt_ps(e_exact)}",
    )
    upper_core = PowerSum.integer_power(2 * cert.t, k, d_size)
    add(
        "energy-upper",
        cmp_ps_vs_ps_logpow(e_exact, upper_core, len(cert.B), 1) <= 0,
        f"E_k(B,V) = {_fmt_ps(e_exact)}",
        f"2^k |D| t^k L(|B|) = {_fmt_ps(upper_core)} * L({len(cert.B)})",
    )

    members = cert.D.members()
    rows = _rows_against(cert.C.values, cert.V, cert.op, members)
    row_min = min(rows.values())
    row_max = max(rows.values())
    # row lower: min row >= |D| t / (2**(k+1) |B|)
    low_lhs = PowerSum.integer_power(2, k + 1, row_min * len(cert.B))
    add(
        "row-lower",
        cmp_ps(low_lhs, PowerSum.from_rational(d_size * cert.t)) >= 0,
        f"(min row) 2^(k+1) |B| = {_fmt_ps(low_lhs)}",
        f"|D| t = {d_size * cert.t}",
    )
    # row upper: max row <= (2 |D| t / |B|) k 2^k L(|A|)^2 / c1
    up_lhs = PowerSum.from_rational(row_max * len(cert.B) * c1)
    up_rhs = PowerSum.integer_power(2, k, 2 * d_size * cert.t * k)
    add(
        "row-upper",
        cmp_ps_vs_ps_logpow(up_lhs, up_rhs, len(cert.A), 2) <= 0,
        f"(max row) |B| c1 = {_fmt_ps(up_lhs)}",
        f"2 |D| t k 2^k L(|A|)^2 = {_fmt_ps(up_rhs)} * L({len(cert.A)})^2",
    )

    # output size: |C| 2^(2k+1) (k-1) ln2 L(|A|)^2 >= c1 (1-c1) |A|
    c_lhs = PowerSum.integer_power(2, 2 * k + 1, len(cert.C) * (k - 1))
    c_rhs = PowerSum.from_rational(c1 * (1 - c1) * len(cert.A))
    add(
        "C-cardinality",
        cmp_ps_ln2_logpow(c_lhs, c_rhs, len(cert.A), 2) >= 0,
        f"|C| 2^(2k+1) (k-1) ln2 L^2 with |C|={len(cert.C)}",
        f"c1 (1-c1) |A| = {_fmt_ps(c_rhs)}",
    )

    bound = cert.c1 / cert.epsilon
    ceil_bound = -((-bound.numerator) // bound.denominator)
    add(
        "iteration-bound",
        cert.iterations <= ceil_bound,
        f"rounds = {cert.iterations}",
        f"ceil(c1/eps) = {ceil_bound}",
    )

    return CertificateReport(tuple(entries), all(e.ok for e in entries))


# --- certificate text form ---------------------------------------------

_FORMAT_LINE = "decomposition-certificate v1"


def _fmt_set(S: FiniteSet) -> str:
    return " ".join(format_value(v) for v in S.values)


def serialize_certificate(cert: DecompositionCertificate) -> str:
    lines = [
        f"format: {_FORMAT_LINE}",
        f"op: {cert.op}",
        f"k: {format_value(Fraction(cert.k))}",
        f"c1: {format_value(Fraction(cert.c1))}",
        f"epsilon: {format_value(cert.epsilon)}",
        f"t: {cert.t}",
        f"iterations: {cert.iterations}",
    ]
    if cert.tau is not None:
        lines.append(f"tau: {cert.tau!r}")
    for name, S in (("A", cert.A), ("V", cert.V), ("B", cert.B),
                    ("C", cert.C), ("D", cert.D)):
        lines.append(f"{name}: {_fmt_set(S)}")
    for s in cert.trace:
        lines.append(
            f"step: {s.index} {s.size} {s.t} {s.class_size} "
            f"{s.pair_mass} {s.kept_mass} {int(s.stopped)}"
        )
    return "\n".join(lines) + "\n"


def parse_certificate(text: str) -> DecompositionCertificate:
    fields: dict[str, str] = {}
    steps: list[StepRecord] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, _, val = line.partition(":")
        key = key.strip()
        val = val.strip()
        if key == "step":
            i, size, t, dsize, pm, gm, stopped = val.split()
            steps.append(
                StepRecord(int(i), int(size), int(t), int(dsize),
                           int(pm), int(gm), bool(int(stopped)))
            )
        else:
            fields[key] = val
    if fields.get("format") != _FORMAT_LINE:
        raise ValueError("unrecognized certificate format line")
    tau = fields.get("tau")
    tol = Tolerance(float(tau)) if tau is not None else None

    def read_set(name: str) -> FiniteSet:
        return FiniteSet([parse_value(tok) for tok in fields[name].split()], tol)

    return DecompositionCertificate(
        op=parse_op(fields["op"]),
        k=Fraction(fields["k"]),
        c1=Fraction(fields["c1"]),
        epsilon=Fraction(fields["epsilon"]),
        A=read_set("A"),
        V=read_set("V"),
        B=read_set("B"),
        C=read_set("C"),
        D=read_set("D"),
        t=int(fields["t"]),
        iterations=int(fields["iterations"]),
        trace=tuple(steps),
        tau=float(tau) if tau is not None else None,
    )


# --- abstract refinement rules ------------------------------------------


@dataclass(frozen=True)
class RefinementRule:
    """A named map X -> subset of X promising to keep a (1 - eps) fraction."""

    name: str
    apply: object  # callable (FiniteSet, Fraction) -> FiniteSet


def identity_rule() -> RefinementRule:
    return RefinementRule("identity", lambda X, eps: X)


def drop_largest_rule() -> RefinementRule:
    def run(X: FiniteSet, eps: Fraction) -> FiniteSet:
        if len(X) < 2:
            return X
        return FiniteSet(X.values[:-1])

    return RefinementRule("drop-largest", run)


def popular_sum_rule(C: FiniteSet) -> RefinementRule:
    from .popularity import popular_set, refined_set

    def run(X: FiniteSet, eps: Fraction) -> FiniteSet:
        P, _ = popular_set(X, C)
        return refined_set(X, C, P)

    return RefinementRule("popular-sum", run)


@dataclass(frozen=True)
class RefinementRun:
    refined: FiniteSet
    epsilon: Fraction
    c2: float
    sizes: tuple
    energies: tuple
    rounds: int


def _stable_energy_reached(e_next: PowerSum, e_prev: PowerSum, m: Fraction, c1: Fraction) -> bool:
    """E(next) >= (1-c1)**2 4**(1-m) E(prev), via E(next) 4**(m-1) >= (1-c1)**2 E(prev)."""
    lhs = e_next * PowerSum.integer_power(4, m - 1)
    rhs = e_prev.scale((1 - c1) ** 2)
    return cmp_ps(lhs, rhs) >= 0


def refine_until_stable(A: FiniteSet, rule: RefinementRule, m, c1) -> RefinementRun:
    """Apply the rule until one application keeps most of the m-th energy.

    Stops at the first B with E_m(rule(B)) >= (1-c1)**2 4**(1-m) E_m(B); the
    returned record holds that B together with the size and energy history.
    Termination is forced because each continuing round shrinks an energy that
    is bounded below by 1, and a hard error flags any rule that breaks its
    declared (1 - eps) cardinality guarantee or drains A below (1 - c1)|A|.
    """
    m = Fraction(m)
    c1 = Fraction(c1)
    if m < 1:
        raise ValueError("energy exponent must be >= 1")
    if not 0 < c1 < 1:
        raise ValueError("c1 must lie strictly between 0 and 1")
    l_hi = guarded_log2_bounds(len(A), 64)[1]
    eps = c1 / l_hi  # rational stand-in never exceeding c1 / L(|A|)

    B = A
    e_prev = energy_of_rep(rep_function(B, DIFF, B), m)
    sizes = [len(B)]
    energies = [e_prev.value]
    floor = (1 - c1) * len(A)
    for i in range(10_000):
        R = rule.apply(B, eps)
        if not R.issubset(B):
            raise ValueError(f"rule {rule.name} escaped its input at round {i}")
        if len(R) * eps.denominator < (eps.denominator - eps.numerator) * len(B):
            raise ValueError(
                f"rule {rule.name} violated its (1-eps) cardinality guarantee "
                f"at round {i}: kept {len(R)} of {len(B)}"
            )
        e_next = energy_of_rep(rep_function(R, DIFF, R), m)
        if _stable_energy_reached(e_next.exact, e_prev.exact, m, c1):
            return RefinementRun(
                refined=B,
                epsilon=eps,
                c2=float((1 - c1) ** 2) * 4.0 ** float(1 - m),
                sizes=tuple(sizes),
                energies=tuple(energies),
                rounds=i,
            )
        B = R
        e_prev = e_next
        sizes.append(len(B))
        energies.append(e_next.value)
        if len(B) * floor.denominator < floor.numerator:
            raise RuntimeError(
                f"refinement exhausted the cardinality budget at round {i}"
            )
    raise RuntimeError("refinement failed to stabilize; the rule is inconsistent")


def regu_refine(A: FiniteSet, rule: RefinementRule, m, c1) -> FiniteSet:
    """The stabilized subset itself; see refine_until_stable for the record."""
    return refine_until_stable(A, rule, m, c1).refined
