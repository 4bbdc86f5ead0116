"""Batch front-end: JSON problem specifications in, CSV/JSON artifacts out.

Every command reads one problem file, writes its artifacts into the
output directory, and exits 0 on success, 1 on a schema or parse error,
2 on an exhausted enumeration budget, and 3 when a verification command
finds its identity violated.  Outputs are deterministic for a fixed
problem file: enumeration order is fixed, floats are printed with a
fixed format, CSV uses LF line endings, and JSON is pretty-printed with
sorted keys.
"""

from __future__ import annotations

import argparse
import csv
import json
import random
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from . import __version__
from .characters import enumerate_characters, trivial_character
from .errors import BudgetExceeded, PadicZetaError, PoleSetMismatch, SchemaError
from .expsum import (
    build_stationary_phase_context,
    decay_report,
    exponential_sum,
    stationary_phase_check,
)
from .mpoly import PolySystem, system_from_strings
from .poincare import check_series_zeta_identity, poincare_series, solution_growth_bound
from .ratfn import pole_analysis, pole_data_from_resolution, reconstruct_rational
from .regularize import delta_limit_check
from .smoothing import certificates_to_json, global_decompose, measure_charts, verify_certificate
from .support import Support
from .variety import DEFAULT_BUDGET, critical_locus_probe, image_oracle
from .zeta import build_shell_table, candidate_pole_verdict, coefficient_table

EXIT_OK = 0
EXIT_SCHEMA = 1
EXIT_BUDGET = 2
EXIT_VERIFY = 3

SCHEMA_FIELDS = {
    "schema",
    "p",
    "n",
    "constraints",
    "target",
    "support",
    "max_level",
    "character_conductor_cap",
    "resolution_data",
    "budget",
}


@dataclass
class Problem:
    system: PolySystem
    support: Support
    max_level: int
    conductor_cap: int
    budget: int


def load_problem(path: Path) -> Problem:
    """Parse and validate a problem file against the versioned schema.

    Unknown fields are rejected rather than ignored, so a misspelled
    mathematical hypothesis cannot silently configure nothing.
    """
    try:
        raw = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"cannot read problem file: {exc}") from exc
    if not isinstance(raw, dict):
        raise SchemaError("problem file must contain a JSON object")
    if raw.get("schema") != 1:
        raise SchemaError("missing or unsupported schema version (expected \"schema\": 1)")
    unknown = set(raw) - SCHEMA_FIELDS
    if unknown:
        raise SchemaError(f"unknown fields rejected: {sorted(unknown)}")
    for field in ("p", "n", "constraints", "target"):
        if field not in raw:
            raise SchemaError(f"missing required field {field!r}")
    try:
        system = system_from_strings(
            raw["p"],
            raw["n"],
            raw["constraints"],
            raw["target"],
            resolution_data=raw.get("resolution_data"),
        )
    except PadicZetaError as exc:
        raise SchemaError(f"invalid polynomial system: {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"invalid polynomial system: {exc}") from exc
    support_raw = raw.get("support", {"type": "unit_polydisc"})
    if not isinstance(support_raw, dict):
        raise SchemaError("support must be an object with a 'type' field")
    if support_raw.get("type") == "unit_polydisc":
        support = Support.unit_polydisc(raw["n"])
    elif support_raw.get("type") == "cosets":
        try:
            support = Support.cosets(
                raw["n"], support_raw["level"], support_raw["centers"], raw["p"]
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"invalid coset support: {exc}") from exc
    else:
        raise SchemaError("support.type must be 'unit_polydisc' or 'cosets'")
    try:
        return Problem(
            system=system,
            support=support,
            max_level=int(raw.get("max_level", 6)),
            conductor_cap=int(raw.get("character_conductor_cap", 2)),
            budget=int(raw.get("budget", DEFAULT_BUDGET)),
        )
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"invalid numeric field: {exc}") from exc


def _fmt(x: float) -> str:
    return format(x, ".12e")


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _write_json(path: Path, payload) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _summary(out: Path, command: str, args, payload: dict) -> None:
    payload = dict(payload)
    payload.update(
        {
            "command": command,
            "seed": args.seed,
            "version": __version__,
            "workers": args.workers,
        }
    )
    _write_json(out / "summary.json", payload)


def _effective_support(problem: Problem) -> Support | None:
    return None if problem.support.is_full() else problem.support


# -- commands -----------------------------------------------------------------


def cmd_count(problem: Problem, out: Path, args) -> int:
    from .poincare import congruence_count
    from .smoothing import measure_charts

    decomposition = measure_charts(problem.system, problem.budget)
    q_dim = problem.system.p**problem.system.dim
    rows = []
    for m in range(problem.max_level + 1):
        count = congruence_count(problem.system, m, decomposition, problem.budget)
        scaled = Fraction(count, q_dim**m)
        rows.append([m, count, scaled.numerator, scaled.denominator])
    _write_csv(out / "counts.csv", ["m", "N_m", "scaled_num", "scaled_den"], rows)
    _summary(out, "count", args, {"max_level": problem.max_level})
    return EXIT_OK


def cmd_poincare(problem: Problem, out: Path, args) -> int:
    series = poincare_series(problem.system, problem.max_level, budget=problem.budget)
    rows = [
        [m, series.Nm[m], series.scaled[m].numerator, series.scaled[m].denominator]
        for m in range(len(series.Nm))
    ]
    _write_csv(out / "counts.csv", ["m", "N_m", "scaled_num", "scaled_den"], rows)
    _write_json(out / "poincare.json", series.reconstructed.to_json())
    payload = {"max_level": problem.max_level, "identity_checked": False}
    code = EXIT_OK
    from .variety import good_reduction_test

    if good_reduction_test(problem.system, problem.budget):
        table = build_shell_table(
            problem.system,
            problem.max_level,
            support=_effective_support(problem),
            budget=problem.budget,
        )
        zeta_fn = reconstruct_rational(table.trivial_series())
        verdict = check_series_zeta_identity(series.reconstructed, zeta_fn)
        payload["identity_checked"] = True
        payload["identity_passed"] = verdict.passed
        if not verdict.passed:
            code = EXIT_VERIFY
    _summary(out, "poincare", args, payload)
    return code


def cmd_zeta(problem: Problem, out: Path, args) -> int:
    support = _effective_support(problem)
    cap = problem.conductor_cap if problem.system.p != 2 else 1
    table = build_shell_table(
        problem.system,
        problem.max_level,
        c_level=max(cap, 1),
        support=support,
        budget=problem.budget,
    )
    characters = [trivial_character(problem.system.p)]
    if problem.system.p != 2:
        characters = enumerate_characters(problem.system.p, max(cap, 1))
    for chi in characters:
        ct = coefficient_table(table, chi)
        rows = []
        for m, coeff in enumerate(ct.coeffs):
            if isinstance(coeff, Fraction):
                rows.append(
                    [m, _fmt(float(coeff)), _fmt(0.0),
                     coeff.numerator, coeff.denominator, int(ct.stabilized[m])]
                )
            else:
                rows.append(
                    [m, _fmt(coeff.real), _fmt(coeff.imag), "", "", int(ct.stabilized[m])]
                )
        name = "trivial" if chi.is_trivial() else f"chi{chi.index}_c{chi.conductor}"
        _write_csv(
            out / f"zeta_{name}.csv",
            ["m", "re", "im", "exact_num", "exact_den", "stabilized"],
            rows,
        )
    zeta_fn = reconstruct_rational(table.trivial_series())
    _write_json(out / "zeta_trivial.json", zeta_fn.to_json())
    pole = pole_analysis(zeta_fn, problem.system.p)
    pole_payload = {
        "rho": pole.rho,
        "m_rho": pole.m_rho,
        "rho_exact": [pole.rho_exact.numerator, pole.rho_exact.denominator]
        if pole.rho_exact is not None
        else None,
        "factors": list(pole.factors) if pole.factors is not None else None,
    }
    payload = {"max_level": problem.max_level, "conductor_cap": cap}
    code = EXIT_OK
    if problem.system.resolution_data is not None:
        try:
            match = candidate_pole_verdict(problem.system, zeta_fn)
            pole_payload["candidate_match"] = list(match.multiplicities)
        except PoleSetMismatch as exc:
            pole_payload["candidate_match"] = None
            payload["candidate_error"] = str(exc)
            code = EXIT_VERIFY
    _write_json(out / "poles.json", pole_payload)
    _summary(out, "zeta", args, payload)
    return code


def cmd_expsum(problem: Problem, out: Path, args) -> int:
    decomposition = measure_charts(problem.system, problem.budget)
    if problem.system.resolution_data is not None:
        pole = pole_data_from_resolution(problem.system.resolution_data, problem.system.p)
    else:
        pole = None
    rows = []
    for m in range(1, problem.max_level + 1):
        u_mod = problem.system.p ** min(m, problem.conductor_cap)
        for u in range(1, u_mod):
            if u % problem.system.p == 0:
                continue
            value = exponential_sum(
                problem.system, m, u, decomposition=decomposition, budget=problem.budget
            )
            normalized = (
                _fmt(abs(value) * problem.system.p ** (pole.rho * m) / m ** (pole.m_rho - 1))
                if pole is not None
                else ""
            )
            rows.append(
                [m, u, _fmt(value.real), _fmt(value.imag), "", "", _fmt(abs(value)), normalized]
            )
    _write_csv(
        out / "expsum.csv",
        ["m", "u", "re_direct", "im_direct", "re_form1", "im_form1", "abs", "normalized"],
        rows,
    )
    _summary(out, "expsum", args, {"max_level": problem.max_level})
    return EXIT_OK


def cmd_sps_verify(problem: Problem, out: Path, args) -> int:
    report = stationary_phase_check(
        problem.system,
        list(range(1, problem.max_level + 1)),
        c_cap=problem.conductor_cap,
        depth=problem.max_level + 1,
        support=_effective_support(problem),
        budget=problem.budget,
    )
    rows = []
    for record in report.records:
        rows.append(
            [
                record.m,
                record.u,
                _fmt(record.direct.real),
                _fmt(record.direct.imag),
                _fmt(record.via_formula.real),
                _fmt(record.via_formula.imag),
                _fmt(record.abs_direct),
                "",
            ]
        )
    _write_csv(
        out / "expsum.csv",
        ["m", "u", "re_direct", "im_direct", "re_form1", "im_form1", "abs", "normalized"],
        rows,
    )
    passed = report.passed()
    _summary(
        out,
        "sps-verify",
        args,
        {"max_discrepancy": _fmt(report.max_discrepancy), "passed": passed},
    )
    return EXIT_OK if passed else EXIT_VERIFY


def cmd_smooth(problem: Problem, out: Path, args) -> int:
    decomposition = global_decompose(problem.system, problem.budget)
    (out / "certificates.json").write_text(certificates_to_json(decomposition))
    rng = random.Random(args.seed)
    identity_ok = all(
        verify_certificate(chart.certificate, rng, samples=50, depth=4)
        for chart in decomposition.charts
        if chart.certificate is not None
    )
    counts_ok = True
    for m in range(1, min(4, problem.max_level) + 1):
        chart_count = decomposition.image_count(m, problem.budget)
        oracle = len(
            image_oracle(problem.system, m, decomposition.L + 1, problem.budget)
        )
        if chart_count != oracle:
            counts_ok = False
    passed = identity_ok and counts_ok
    _summary(
        out,
        "smooth",
        args,
        {
            "level": decomposition.L,
            "charts": len(decomposition.charts),
            "identity_ok": identity_ok,
            "image_counts_ok": counts_ok,
        },
    )
    return EXIT_OK if passed else EXIT_VERIFY


def cmd_delta_check(problem: Problem, out: Path, args) -> int:
    report = delta_limit_check(
        problem.system,
        args.s,
        None,
        list(range(0, args.r_max + 1)),
        depth=max(problem.max_level, args.r_max + 2),
        support=_effective_support(problem),
        budget=problem.budget,
    )
    rows = []
    for row in report.rows:
        value = complex(row.value)
        surface = complex(row.surface_value)
        rows.append(
            [
                row.r,
                _fmt(value.real),
                _fmt(value.imag),
                _fmt(float(row.tail_bound)),
                _fmt(surface.real),
                _fmt(row.gap),
            ]
        )
    _write_csv(
        out / "delta.csv",
        ["r", "value_re", "value_im", "tail_bound", "surface_value", "abs_diff"],
        rows,
    )
    _summary(out, "delta-check", args, {"passed": report.passed, "r0": report.r0})
    return EXIT_OK if report.passed else EXIT_VERIFY


def cmd_decay(problem: Problem, out: Path, args) -> int:
    if problem.system.resolution_data is not None:
        pole = pole_data_from_resolution(problem.system.resolution_data, problem.system.p)
    else:
        table = build_shell_table(
            problem.system,
            problem.max_level + 3,
            support=_effective_support(problem),
            budget=problem.budget,
        )
        pole = pole_analysis(reconstruct_rational(table.trivial_series()), problem.system.p)
    report = decay_report(
        problem.system,
        list(range(1, problem.max_level + 1)),
        pole,
        budget=problem.budget,
    )
    rows = [[row.m, _fmt(row.abs_value), _fmt(row.normalized)] for row in report.rows]
    _write_csv(out / "decay.csv", ["m", "abs", "normalized"], rows)
    series = poincare_series(problem.system, problem.max_level, budget=problem.budget)
    constant, verdict = solution_growth_bound(
        series, pole, problem.system.p, problem.system.dim
    )
    _summary(
        out,
        "decay",
        args,
        {
            "expsum_verdict": report.verdict,
            "count_bound_constant": _fmt(constant),
            "count_bound_verdict": verdict,
            "rho": _fmt(pole.rho),
            "m_rho": pole.m_rho,
        },
    )
    return EXIT_OK


def cmd_probe(problem: Problem, out: Path, args) -> int:
    level = min(problem.max_level, args.probe_level)
    report = critical_locus_probe(problem.system, level, problem.budget)
    _write_json(
        out / "probe.json",
        {
            "level": report.level,
            "clean": report.clean,
            "suspects": [list(x) for x in report.suspects],
        },
    )
    _summary(out, "probe", args, {"clean": report.clean, "suspect_count": len(report.suspects)})
    return EXIT_OK


COMMANDS = {
    "count": cmd_count,
    "poincare": cmd_poincare,
    "zeta": cmd_zeta,
    "expsum": cmd_expsum,
    "sps-verify": cmd_sps_verify,
    "smooth": cmd_smooth,
    "delta-check": cmd_delta_check,
    "decay": cmd_decay,
    "probe": cmd_probe,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="padiczeta",
        description="Exact zeta, counting, and exponential-sum computations "
        "along p-adic submanifolds.",
    )
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--spec", required=True, help="problem JSON file")
    parser.add_argument("--out", default="out", help="output directory")
    parser.add_argument("--max-level", type=int, default=None, help="override max_level")
    parser.add_argument("--budget", type=int, default=None, help="override enumeration budget")
    parser.add_argument("--workers", type=int, default=1, help="worker pool size (1 = sequential)")
    parser.add_argument("--seed", type=int, default=0, help="seed for randomized spot checks")
    parser.add_argument("--s", type=int, default=1, help="integer exponent for delta-check")
    parser.add_argument("--r-max", type=int, default=4, help="largest r for delta-check")
    parser.add_argument("--probe-level", type=int, default=2, help="level for the probe command")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.workers < 1:
        parser.error("--workers must be >= 1")
    try:
        problem = load_problem(Path(args.spec))
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    if args.max_level is not None:
        problem.max_level = args.max_level
    if args.budget is not None:
        problem.budget = args.budget
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    try:
        return COMMANDS[args.command](problem, out, args)
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except PadicZetaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
