"""Inequality claims: exact verdicts where constants are explicit, trends otherwise.

Every claim is normalized to the shape lhs >= rhs with lhs the side proved
large, so a log-log slope of lhs/rhs against n that stays nonnegative is the
constant-free health signal. Claims whose constants are pinned down get exact
verdicts instead. Side conditions written as hard inequalities reject the
input with an error naming the failed inequality; soft (constant-free) side
conditions are recorded in the report details with constant 1.
"""

from __future__ import annotations

import math
import os
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from .convexfn import parse_fn
from .energy import dominant_class, energy, mixed_sum
from .generators import generate, parse_family, verify_convexity
from .incidence import line_energy_experiment, ratio_quadruple_count
from .numeric import format_value
from .popularity import energy_general_pipeline
from .regularize import decompose
from .setcore import DIFF, PROD, SUM, FiniteSet, combine, image, rep_function

CLAIM_IDS = (
    "lem_count",
    "lem_e3",
    "lem_e3_convex",
    "cor_e3_product",
    "prop_energy_general",
    "thm_main_38",
    "thm_main_diff",
    "cor_convex_49_38",
    "cor_convex_diff",
    "cor_sumprod_asym",
    "cor_A_Aplus1",
    "thm_incidence",
    "thm_ABplusA",
    "cs_sandwich",
    "holder_mixed",
    "e32_convex",
    "ratio_count",
)

EXACT_MODE = "exact"
TREND_MODE = "trend"


class HypothesisError(ValueError):
    """A hard side condition of a claim failed on the given input."""


@dataclass(frozen=True)
class ClaimReport:
    claim: str
    n: int
    lhs: object
    rhs: object
    ratio: float
    pass_mode: str
    verdict: str
    family: str = ""
    details: dict = field(default_factory=dict)

    def with_family(self, family: str) -> "ClaimReport":
        return ClaimReport(
            self.claim, self.n, self.lhs, self.rhs, self.ratio,
            self.pass_mode, self.verdict, family, self.details,
        )


def _log2x(v) -> float:
    if isinstance(v, Fraction):
        return math.log2(v.numerator) - math.log2(v.denominator)
    return math.log2(v)


def _ratio(lhs, rhs) -> float:
    gap = _log2x(lhs) - _log2x(rhs)
    try:
        return 2.0**gap
    except OverflowError:
        return math.inf


def _guarded_log_float(n: int) -> float:
    return max(1.0, math.log2(n))


def _require_min_multiplicity(rep, A: FiniteSet, T: int, label: str) -> None:
    worst = min((rep.get(a) for a in A), default=0)
    if worst < T:
        raise HypothesisError(
            f"hypothesis {label} >= T fails: minimum over the base set is "
            f"{worst} < T = {T}"
        )


def _trend(claim, n, lhs, rhs, details) -> ClaimReport:
    return ClaimReport(claim, n, lhs, rhs, _ratio(lhs, rhs),
                       TREND_MODE, "reported", details=details)


def _exact(claim, n, lhs, rhs, ok, details) -> ClaimReport:
    return ClaimReport(claim, n, lhs, rhs, _ratio(lhs, rhs),
                       EXACT_MODE, "pass" if ok else "fail", details=details)


# --- individual claims ---------------------------------------------------


def _lem_count(A, B, C, Q, R, T):
    T = int(T)
    _require_min_multiplicity(rep_function(Q, PROD, R), A, T, "r_{QR}(a)")
    count = sum(rep_function(A, DIFF, B).get(c) for c in C)
    if count == 0:
        raise ValueError("no differences land in C; nothing to compare")
    base = len(Q) * len(R) * len(B) * len(C)
    lhs = float(base) ** (2 / 3) / T
    details = {
        "RC_vs_QB2": (len(R) * len(C), (len(Q) * len(B)) ** 2),
        "QC_vs_RB2": (len(Q) * len(C), (len(R) * len(B)) ** 2),
    }
    return _trend("lem_count", len(A), lhs, count, details)


def _e3_bound_lhs(Q, R, B, nA, T):
    return (
        float(len(Q)) ** 2 * len(R) ** 2 * len(B) ** 2 / T**3
        * _guarded_log_float(nA)
    )


def _lem_e3(A, B, Q, R, T):
    T = int(T)
    _require_min_multiplicity(rep_function(Q, PROD, R), A, T, "r_{QR}(a)")
    if len(R) * len(A) > len(Q) ** 2 * len(B):
        raise HypothesisError(
            f"hypothesis |R||A| <= |Q|^2|B| fails: "
            f"{len(R) * len(A)} > {len(Q) ** 2 * len(B)}"
        )
    rhs = energy(A, B, 3, DIFF).value
    lhs = _e3_bound_lhs(Q, R, B, len(A), T)
    return _trend("lem_e3", len(A), lhs, rhs, {})


def _lem_e3_convex(A, B, Q, R, T, f):
    T = int(T)
    _require_min_multiplicity(rep_function(Q, DIFF, R), A, T, "r_{Q-R}(a)")
    if len(Q) < len(R):
        raise HypothesisError(
            f"hypothesis |Q| >= |R| fails: {len(Q)} < {len(R)}"
        )
    fA = image(A, f)
    rhs = energy(fA, B, 3, DIFF).value
    lhs = _e3_bound_lhs(Q, R, B, len(A), T)
    details = {"RA_vs_Q2B": (len(R) * len(A), len(Q) ** 2 * len(B))}
    return _trend("lem_e3_convex", len(A), lhs, rhs, details)


def _cor_e3_product(A, V, U, f, c1=Fraction(1, 2)):
    cert = decompose(A, V, DIFF, 3, c1)
    e_bv = energy(cert.B, V, 3, DIFF).value
    e_fcu = energy(image(cert.C, f), U, 3, DIFF).value
    rhs = e_bv * e_fcu
    lhs = (
        float(len(U)) ** 2 * len(V) ** 2 * len(A) ** 3
        * _guarded_log_float(len(A)) ** 2
    )
    details = {"B_size": len(cert.B), "C_size": len(cert.C)}
    return _trend("cor_e3_product", len(A), lhs, rhs, details)


def _prop_energy_general(A, C):
    dom = dominant_class(rep_function(A, DIFF, A), 3)
    D = FiniteSet(dom.members)
    delta = dom.t
    AC = combine(A, SUM, C)
    lhs = Fraction(
        len(AC) ** 6
        * energy(A, None, 3, DIFF).value ** 4
        * energy(C, None, 3, DIFF).value ** 2
        * energy(A, D, 3, DIFF).value
        * energy(C, AC, 3, DIFF).value ** 2,
        len(C) ** 18 * len(A) ** 3,
    )
    rhs = len(D) ** 9 * delta**12
    details = {"delta": delta, "D_size": len(D)}
    return _trend("prop_energy_general", len(A), lhs, rhs, details)


def _thm_main_38(A, B, f, g):
    fA = image(A, f)
    gB = image(B, g)
    lhs = len(combine(A, SUM, B)) ** 38 * len(combine(fA, SUM, gB)) ** 38
    rhs = (len(A) * len(B)) ** 49
    return _trend("thm_main_38", len(A), lhs, rhs, {})


def _thm_main_diff(A, B, f, g):
    fA = image(A, f)
    gB = image(B, g)
    s1 = len(combine(A, SUM, B))
    s2 = len(combine(fA, SUM, gB))
    diffs = [len(combine(S, DIFF, S)) for S in (A, B, fA, gB)]
    lhs = s1**20 * s2**20
    for d in diffs:
        lhs *= d**5
    rhs = (len(A) * len(B)) ** 39
    aux_small = 1
    k_aux = Fraction(12, 7)
    for S in (A, B, fA, gB):
        dom = dominant_class(rep_function(S, DIFF, S), k_aux)
        aux_small *= dom.size**7 * dom.t**12
    aux_big = s1**20 * s2**20 * len(A) ** 9 * len(B) ** 9
    details = {
        "sumset": s1,
        "image_sumset": s2,
        "class_product_vs_sums": (aux_small, aux_big),
        "class_trend_ratio": _ratio(aux_big, aux_small),
    }
    return _trend("thm_main_diff", len(A), lhs, rhs, details)


def _cor_convex_49_38(A, f):
    fA = image(A, f)
    lhs = len(combine(A, SUM, fA))
    rhs = float(len(A)) ** (49 / 38)
    return _trend("cor_convex_49_38", len(A), lhs, rhs, {})


def _cor_convex_diff(A, f):
    fA = image(A, f)
    lhs = len(combine(A, DIFF, A)) ** 5 * len(combine(fA, DIFF, fA)) ** 5
    rhs = len(A) ** 13
    return _trend("cor_convex_diff", len(A), lhs, rhs, {})


def _cor_sumprod_asym(A, B):
    lhs = len(combine(A, PROD, B)) ** 38 * len(combine(A, SUM, B)) ** 38
    rhs = (len(A) * len(B)) ** 49
    return _trend("cor_sumprod_asym", len(A), lhs, rhs, {})


def _cor_A_Aplus1(A, B):
    A1 = combine(A, SUM, FiniteSet([1]))
    B1 = combine(B, SUM, FiniteSet([1]))
    lhs = len(combine(A, PROD, B)) + len(combine(A1, PROD, B1))
    rhs = float(len(A) * len(B)) ** (49 / 76)
    return _trend("cor_A_Aplus1", len(A), lhs, rhs, {})


def _thm_ABplusA(A, B):
    lhs = len(combine(combine(A, PROD, B), SUM, A))
    rhs = float(len(A)) ** (3 / 2 + 3 / 170)
    details = {"size_ratio": format_value(Fraction(len(A), len(B)))}
    return _trend("thm_ABplusA", len(A), lhs, rhs, details)


def _thm_incidence(A, B):
    rep = line_energy_experiment(A, B)
    details = {
        "lower_bound": rep.lower_bound,
        "n_lines": rep.n_lines,
        "n_points": rep.n_points,
        "fourth_ratio_energy": rep.fourth_ratio_energy,
    }
    return _trend("thm_incidence", len(A), rep.upper_trend, rep.incidences, details)


def _cs_sandwich(X, Y):
    e2xy = energy(X, Y, 2, DIFF).value
    e2xy_sum = energy(X, Y, 2, SUM).value
    if e2xy != e2xy_sum:
        raise AssertionError(
            f"difference and sum second moments disagree: {e2xy} != {e2xy_sum}"
        )
    sumset = combine(X, SUM, Y)
    lhs = e2xy * len(sumset)
    rhs = len(X) ** 2 * len(Y) ** 2
    lower_ok = lhs >= rhs
    e2x = energy(X, None, 2, DIFF).value
    e2y = energy(Y, None, 2, DIFF).value
    upper_ok = e2xy**2 <= e2x * e2y
    details = {
        "E2_cross": e2xy,
        "E2_split_bound": (e2xy**2, e2x * e2y),
    }
    return _exact("cs_sandwich", len(X), lhs, rhs, lower_ok and upper_ok, details)


def _holder_mixed(A, C):
    mixed = mixed_sum(rep_function(A, DIFF, A), rep_function(C, DIFF, C))
    lhs = energy(A, None, 3, DIFF).value ** 2 * energy(C, None, 3, DIFF).value
    rhs = mixed**3
    return _exact("holder_mixed", len(A), lhs, rhs, rhs <= lhs,
                  {"mixed_sum": mixed})


def _e32_convex(A, B):
    if not verify_convexity(A):
        raise HypothesisError("the base set must have strictly increasing gaps")
    lhs = float(len(combine(A, SUM, B))) ** 1.5
    rhs = energy(A, B, Fraction(3, 2), DIFF).value
    return _trend("e32_convex", len(A), lhs, rhs, {})


def _ratio_count(A, allow_large=False):
    rhs = ratio_quadruple_count(A, allow_large=allow_large)
    lhs = float(len(A)) ** 6 * _guarded_log_float(len(A))
    return _trend("ratio_count", len(A), lhs, rhs, {})


_DEFAULT_FN = "square"

_CLAIM_TABLE = {
    "lem_count": (_lem_count, ("A", "B", "C", "Q", "R", "T")),
    "lem_e3": (_lem_e3, ("A", "B", "Q", "R", "T")),
    "lem_e3_convex": (_lem_e3_convex, ("A", "B", "Q", "R", "T", "f")),
    "cor_e3_product": (_cor_e3_product, ("A", "V", "U", "f")),
    "prop_energy_general": (_prop_energy_general, ("A", "C")),
    "thm_main_38": (_thm_main_38, ("A", "B", "f", "g")),
    "thm_main_diff": (_thm_main_diff, ("A", "B", "f", "g")),
    "cor_convex_49_38": (_cor_convex_49_38, ("A", "f")),
    "cor_convex_diff": (_cor_convex_diff, ("A", "f")),
    "cor_sumprod_asym": (_cor_sumprod_asym, ("A", "B")),
    "cor_A_Aplus1": (_cor_A_Aplus1, ("A", "B")),
    "thm_incidence": (_thm_incidence, ("A", "B")),
    "thm_ABplusA": (_thm_ABplusA, ("A", "B")),
    "cs_sandwich": (_cs_sandwich, ("X", "Y")),
    "holder_mixed": (_holder_mixed, ("A", "C")),
    "e32_convex": (_e32_convex, ("A", "B")),
    "ratio_count": (_ratio_count, ("A",)),
}


def check(claim: str, **inputs) -> ClaimReport:
    """Evaluate one claim on explicit inputs; see CLAIM_IDS for names."""
    if claim not in _CLAIM_TABLE:
        raise ValueError(f"unknown claim {claim!r}; known: {', '.join(CLAIM_IDS)}")
    fn, required = _CLAIM_TABLE[claim]
    kwargs = {}
    for name in required:
        if name in inputs and inputs[name] is not None:
            kwargs[name] = inputs[name]
        elif name == "B" and "A" in inputs:
            kwargs[name] = inputs["A"]
        elif name == "Y" and "X" in inputs:
            kwargs[name] = inputs["X"]
        elif name == "C" and "A" in inputs:
            kwargs[name] = inputs["A"]
        elif name in ("f", "g"):
            kwargs[name] = parse_fn(_DEFAULT_FN)
        else:
            raise ValueError(f"claim {claim} needs input {name}")
    extra = {
        k: v for k, v in inputs.items()
        if k not in required and v is not None and k in ("allow_large", "c1")
    }
    return fn(**kwargs, **extra)


# --- exponent balancing ---------------------------------------------------


@dataclass(frozen=True)
class BalanceResult:
    crossing: Fraction
    value: Fraction


def balance_exponents(b1, b2) -> BalanceResult:
    """Solve e1 + x*f1 = e2 + x*f2 for two (constant, energy) exponent pairs.

    Returns the crossing x and the common exponent value there. Pairs with
    equal energy exponents never cross and are rejected.
    """
    e1, f1 = (Fraction(v) for v in b1)
    e2, f2 = (Fraction(v) for v in b2)
    if f1 == f2:
        raise ValueError("parallel exponent pairs have no crossing")
    x = (e2 - e1) / (f1 - f2)
    return BalanceResult(x, e1 + x * f1)


# --- trend scans ----------------------------------------------------------


def _scan_inputs(claim: str, A: FiniteSet, f, g) -> dict:
    base = {"A": A, "B": A, "X": A, "Y": A, "C": A, "V": A, "U": A,
            "f": f, "g": g}
    if claim in ("lem_count", "lem_e3"):
        base["Q"] = combine(A, PROD, A)
        base["R"] = image(A, parse_fn("recip+"))
        base["T"] = len(A)
        if claim == "lem_count":
            base["C"] = combine(A, DIFF, A)
    elif claim == "lem_e3_convex":
        base["Q"] = combine(A, SUM, A)
        base["R"] = A
        base["T"] = len(A)
    return base


@dataclass(frozen=True)
class ScanResult:
    claim: str
    family: str
    rows: tuple
    slope: float
    verdict: str


def scan(claim: str, family: str, sizes, f: str = _DEFAULT_FN,
         g: str = _DEFAULT_FN, threads: int | None = None) -> ScanResult:
    """Run one claim across sizes of one family and fit the log-log gap slope."""
    sizes = [int(n) for n in sizes]
    if len(sizes) < 2 or any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError("need at least two strictly increasing sizes")
    spec = parse_family(family)
    fn_f = parse_fn(f)
    fn_g = parse_fn(g)

    def cell(n: int) -> ClaimReport:
        A = generate(spec, n)
        report = check(claim, **_scan_inputs(claim, A, fn_f, fn_g))
        return report.with_family(family)

    if threads is None:
        threads = max(1, int(os.environ.get("ENERGYLAB_THREADS", "1")))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = tuple(pool.map(cell, sizes))
    else:
        rows = tuple(cell(n) for n in sizes)

    xs = [math.log2(n) for n in sizes]
    ys = [_log2x(r.lhs) - _log2x(r.rhs) for r in rows]
    slope = statistics.linear_regression(xs, ys).slope
    if rows[0].pass_mode == EXACT_MODE:
        verdict = "pass" if all(r.verdict == "pass" for r in rows) else "fail"
    else:
        verdict = "pass" if slope >= 0 else "fail"
    return ScanResult(claim, family, rows, slope, verdict)
