"""Command line workbench: gen, energy, decomp, verify, check, scan, incidence.

Exit codes: 0 all requested checks passed (or pure reporting succeeded),
1 a mathematical check failed or a claim hypothesis was rejected,
2 usage problems (bad flags, malformed specs, unknown config keys).

All output is deterministic: identical invocations produce identical bytes,
regardless of the ENERGYLAB_THREADS parallelism cap.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from .claims import (
    CLAIM_IDS,
    ClaimReport,
    HypothesisError,
    balance_exponents,
    check as check_claim,
    scan as scan_claim,
)
from .energy import energy
from .exactmath import ExactComparisonError
from .generators import generate, parse_family
from .incidence import line_energy_experiment, ratio_quadruple_count
from .numeric import Tolerance, format_value, parse_value
from .regularize import (
    decompose,
    parse_certificate,
    serialize_certificate,
    verify_certificate,
)
from .setcore import FiniteSet

CSV_HEADER = "claim,family,n,lhs,rhs,ratio,pass_mode,verdict"


def _cell(v) -> str:
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, str):
        return v
    return format_value(v)


def _report_row(r: ClaimReport) -> str:
    return ",".join(
        [r.claim, r.family, str(r.n), _cell(r.lhs), _cell(r.rhs),
         repr(r.ratio), r.pass_mode, r.verdict]
    )


def _report_json(r: ClaimReport) -> dict:
    return {
        "claim": r.claim,
        "family": r.family,
        "n": r.n,
        "lhs": _cell(r.lhs),
        "rhs": _cell(r.rhs),
        "ratio": r.ratio,
        "pass_mode": r.pass_mode,
        "verdict": r.verdict,
        "details": {k: _cell_detail(v) for k, v in sorted(r.details.items())},
    }


def _cell_detail(v):
    if isinstance(v, tuple):
        return [_cell_detail(x) for x in v]
    if isinstance(v, (int, float, str)):
        return v
    return _cell(v)


def read_set_file(path: str, tau: float | None = None) -> FiniteSet:
    vals = []
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            vals.append(parse_value(line))
    tol = Tolerance(tau) if tau is not None else None
    return FiniteSet(vals, tol)


def write_set_file(S: FiniteSet, path: str) -> None:
    text = "\n".join(format_value(v) for v in S.values) + "\n"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def load_set(arg: str, tau: float | None = None) -> FiniteSet:
    """A set argument is a file path or a family spec with a trailing size."""
    if os.path.exists(arg):
        return read_set_file(arg, tau)
    family, _, size = arg.rpartition(":")
    if not family:
        raise ValueError(f"set spec {arg!r} is neither a file nor family:...:n")
    return generate(parse_family(family), int(size))


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="energylab",
        description="exact workbench for set energies, refinement certificates, "
        "claim checks, and incidence counts",
    )
    p.add_argument("--config", help="JSON file of option values for the subcommand")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write one generated set as a set file")
    g.add_argument("--spec", required=True, help="family spec, e.g. ap:0:1")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--out")

    e = sub.add_parser("energy", help="one moment energy of a pair of sets")
    e.add_argument("--set", dest="set1", required=True)
    e.add_argument("--set2")
    e.add_argument("--k", required=True)
    e.add_argument("--op", required=True)
    e.add_argument("--tau", type=float)

    d = sub.add_parser("decomp", help="run the refinement and emit a certificate")
    d.add_argument("--A", required=True)
    d.add_argument("--V")
    d.add_argument("--op", required=True)
    d.add_argument("--k", required=True)
    d.add_argument("--c1", required=True)
    d.add_argument("--out")
    d.add_argument("--tau", type=float)

    v = sub.add_parser("verify", help="recheck every inequality of a certificate")
    v.add_argument("certificate")

    c = sub.add_parser("check", help="evaluate one claim on explicit inputs")
    c.add_argument("--claim", required=True)
    for name in ("A", "B", "C", "Q", "R", "U", "V", "X", "Y"):
        c.add_argument(f"--{name}")
    c.add_argument("--f")
    c.add_argument("--g")
    c.add_argument("--T", type=int)
    c.add_argument("--c1")
    c.add_argument("--b1", help="balance only: pair e:f of exponents")
    c.add_argument("--b2", help="balance only: pair e:f of exponents")
    c.add_argument("--tau", type=float)
    c.add_argument("--allow-large", action="store_true")
    c.add_argument("--format", choices=("csv", "json"), default="csv")
    c.add_argument("--out")

    s = sub.add_parser("scan", help="one claim across sizes of one family")
    s.add_argument("--claim", required=True)
    s.add_argument("--family", required=True)
    s.add_argument("--sizes", required=True, help="comma list, e.g. 16,32,64")
    s.add_argument("--f", default="square")
    s.add_argument("--g", default="square")
    s.add_argument("--format", choices=("csv", "json"), default="csv")
    s.add_argument("--out")

    i = sub.add_parser("incidence", help="line-energy incidence experiment")
    i.add_argument("--A", required=True)
    i.add_argument("--B")
    i.add_argument("--quadruples", action="store_true",
                   help="report the ratio quadruple count of A instead")
    i.add_argument("--allow-large", action="store_true")
    i.add_argument("--tau", type=float)

    return p


def _apply_config(ns: argparse.Namespace, parser_defaults: dict) -> None:
    if not ns.config:
        return
    with open(ns.config, encoding="utf-8") as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise ValueError("config must be a JSON object")
    for key, val in cfg.items():
        dest = key.replace("-", "_")
        if dest not in parser_defaults:
            raise ValueError(f"unknown config key {key!r} for this subcommand")
        # explicit command line flags win over config values
        if getattr(ns, dest) == parser_defaults[dest]:
            setattr(ns, dest, val)


def _defaults_for(ns: argparse.Namespace, parser: argparse.ArgumentParser) -> dict:
    for action in parser._subparsers._group_actions:
        sub = action.choices.get(ns.command)
        if sub is not None:
            return {a.dest: a.default for a in sub._actions if a.dest != "help"}
    return {}


def _cmd_gen(ns) -> int:
    S = generate(parse_family(ns.spec), ns.n)
    text = "\n".join(format_value(v) for v in S.values) + "\n"
    _emit(text, ns.out)
    return 0


def _cmd_energy(ns) -> int:
    A = load_set(ns.set1, ns.tau)
    B = load_set(ns.set2, ns.tau) if ns.set2 else None
    val = energy(A, B, Fraction(ns.k), ns.op)
    sys.stdout.write(f"E_{ns.k}[{ns.op}] = {_cell(val.value)}\n")
    return 0


def _cmd_decomp(ns) -> int:
    A = load_set(ns.A, ns.tau)
    V = load_set(ns.V, ns.tau) if ns.V else A
    cert = decompose(A, V, ns.op, Fraction(ns.k), Fraction(ns.c1))
    text = serialize_certificate(cert)
    if ns.out:
        _emit(text, ns.out)
        sys.stdout.write(
            f"certificate: |B|={len(cert.B)} |C|={len(cert.C)} t={cert.t} "
            f"rounds={cert.iterations} -> {ns.out}\n"
        )
    else:
        sys.stdout.write(text)
    return 0


def _cmd_verify(ns) -> int:
    with open(ns.certificate, encoding="utf-8") as fh:
        cert = parse_certificate(fh.read())
    report = verify_certificate(cert)
    for entry in report.entries:
        mark = "ok  " if entry.ok else "FAIL"
        sys.stdout.write(f"{mark} {entry.name}: {entry.lhs} | {entry.rhs}\n")
    sys.stdout.write(
        "certificate ok\n" if report.ok else "certificate INVALID\n"
    )
    return 0 if report.ok else 1


def _parse_balance_pair(text: str) -> tuple:
    parts = text.split(":")
    if len(parts) != 2:
        raise ValueError(f"balance pair must be e:f, got {text!r}")
    return Fraction(parts[0]), Fraction(parts[1])


def _cmd_check(ns) -> int:
    if ns.claim == "balance":
        if not ns.b1 or not ns.b2:
            raise ValueError("balance needs --b1 and --b2")
        res = balance_exponents(_parse_balance_pair(ns.b1),
                                _parse_balance_pair(ns.b2))
        sys.stdout.write(f"x = {format_value(res.crossing)}\n")
        sys.stdout.write(f"value = {format_value(res.value)}\n")
        return 0
    inputs = {}
    for name in ("A", "B", "C", "Q", "R", "U", "V", "X", "Y"):
        arg = getattr(ns, name)
        if arg:
            inputs[name] = load_set(arg, ns.tau)
    from .convexfn import parse_fn

    if ns.f:
        inputs["f"] = parse_fn(ns.f)
    if ns.g:
        inputs["g"] = parse_fn(ns.g)
    if ns.T is not None:
        inputs["T"] = ns.T
    if ns.c1 is not None:
        inputs["c1"] = Fraction(ns.c1)
    if ns.allow_large:
        inputs["allow_large"] = True
    report = check_claim(ns.claim, **inputs)
    if ns.format == "json":
        text = json.dumps(_report_json(report), sort_keys=True) + "\n"
    else:
        text = CSV_HEADER + "\n" + _report_row(report) + "\n"
    _emit(text, ns.out)
    return 1 if report.verdict == "fail" else 0


def _cmd_scan(ns) -> int:
    sizes = [int(tok) for tok in ns.sizes.split(",") if tok]
    result = scan_claim(ns.claim, ns.family, sizes, f=ns.f, g=ns.g)
    if ns.format == "json":
        payload = {
            "claim": result.claim,
            "family": result.family,
            "rows": [_report_json(r) for r in result.rows],
            "slope": result.slope,
            "verdict": result.verdict,
        }
        text = json.dumps(payload, sort_keys=True) + "\n"
    else:
        lines = [CSV_HEADER]
        lines.extend(_report_row(r) for r in result.rows)
        lines.append(
            ",".join(
                [result.claim, result.family, "slope", repr(result.slope),
                 "", "", result.rows[0].pass_mode, result.verdict]
            )
        )
        text = "\n".join(lines) + "\n"
    _emit(text, ns.out)
    return 0 if result.verdict == "pass" else 1


def _cmd_incidence(ns) -> int:
    A = load_set(ns.A, ns.tau)
    if ns.quadruples:
        count = ratio_quadruple_count(A, allow_large=ns.allow_large)
        sys.stdout.write(f"ratio_quadruples = {count}\n")
        return 0
    B = load_set(ns.B, ns.tau) if ns.B else A
    rep = line_energy_experiment(A, B)
    sys.stdout.write(f"incidences = {rep.incidences}\n")
    sys.stdout.write(f"lower_bound = {rep.lower_bound}\n")
    sys.stdout.write(f"lines = {rep.n_lines}\n")
    sys.stdout.write(f"points = {rep.n_points}\n")
    sys.stdout.write(f"fourth_ratio_energy = {rep.fourth_ratio_energy}\n")
    sys.stdout.write(f"upper_trend = {rep.upper_trend!r}\n")
    return 0


_COMMANDS = {
    "gen": _cmd_gen,
    "energy": _cmd_energy,
    "decomp": _cmd_decomp,
    "verify": _cmd_verify,
    "check": _cmd_check,
    "scan": _cmd_scan,
    "incidence": _cmd_incidence,
}


def main(argv=None) -> int:
    parser = _build_parser()
    ns = parser.parse_args(argv)
    try:
        _apply_config(ns, _defaults_for(ns, parser))
        return _COMMANDS[ns.command](ns)
    except HypothesisError as exc:
        sys.stderr.write(f"hypothesis rejected: {exc}\n")
        return 1
    except (AssertionError, ExactComparisonError) as exc:
        sys.stderr.write(f"check failed: {exc}\n")
        return 1
    except (ValueError, OSError, ZeroDivisionError, KeyError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
