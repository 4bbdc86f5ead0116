#!/usr/bin/env python3
"""Run the whole verification battery over the bundled corpus.

Writes one summary line per (instance, check) and exits nonzero if any
check fails, so the corpus doubles as a regression suite.  Artifacts
(CSV tables per instance) land in the output directory.

Usage: python scripts/run_corpus.py [outdir]
"""

from __future__ import annotations

import csv
import sys
import time
from pathlib import Path

from padiczeta.bundled import (
    BAD_LINE,
    GOOD_REDUCTION,
    LINE_X2,
    LINE_X3,
    PARABOLA,
    PLANE_LINE,
    THREEVAR,
)
from padiczeta.expsum import decomposed_expsum_check, stationary_phase_check
from padiczeta.poincare import (
    check_series_zeta_identity,
    decomposed_count_check,
    poincare_series,
)
from padiczeta.ratfn import reconstruct_rational
from padiczeta.regularize import delta_limit_check
from padiczeta.smoothing import global_decompose
from padiczeta.variety import brute_force_points, hensel_enumerate, image_oracle
from padiczeta.zeta import build_shell_table, candidate_pole_verdict


def main() -> int:
    outdir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("corpus_out")
    outdir.mkdir(parents=True, exist_ok=True)
    failures = 0
    rows = []

    def record(instance, check, ok, note=""):
        nonlocal failures
        status = "ok" if ok else "FAIL"
        if not ok:
            failures += 1
        print(f"{status:4} {instance:12} {check:28} {note}")
        rows.append([instance, check, status, note])

    t0 = time.time()
    for instance in GOOD_REDUCTION:
        system = instance.system
        top = 3 if system.n == 3 else 4
        ok = all(
            hensel_enumerate(system, m).count == brute_force_points(system, m).count
            for m in range(1, top)
        )
        record(instance.name, "hensel vs brute", ok)

    for instance in (LINE_X2, LINE_X3, PARABOLA, PLANE_LINE):
        series = poincare_series(instance.system, 12)
        table = build_shell_table(instance.system, 12)
        zeta_fn = reconstruct_rational(table.trivial_series())
        record(
            instance.name,
            "series-zeta identity",
            bool(check_series_zeta_identity(series.reconstructed, zeta_fn)),
        )
        if instance.system.resolution_data:
            try:
                candidate_pole_verdict(instance.system, zeta_fn)
                record(instance.name, "candidate poles", True)
            except Exception as exc:  # noqa: BLE001 - report and count
                record(instance.name, "candidate poles", False, str(exc)[:50])

    for instance in (LINE_X2, LINE_X3, THREEVAR, PLANE_LINE):
        report = stationary_phase_check(instance.system, [1, 2, 3, 4, 5])
        record(
            instance.name,
            "stationary phase",
            report.max_discrepancy < 1e-9,
            f"max gap {report.max_discrepancy:.2e}",
        )

    for instance in (LINE_X2, PARABOLA):
        report = delta_limit_check(instance.system, 1, None, [0, 1, 2, 3, 4], depth=9)
        record(instance.name, "delta limit", report.passed, f"r0={report.r0}")

    decomposition = global_decompose(BAD_LINE.system)
    ok = all(
        decomposition.image_count(m) == len(image_oracle(BAD_LINE.system, m, 3))
        for m in range(1, 5)
    )
    record(BAD_LINE.name, "image counts vs oracle", ok)
    ms = [decomposition.L + 1, decomposition.L + 2, decomposition.L + 3]
    ok = all(r.gap < 1e-9 for r in decomposed_expsum_check(BAD_LINE.system, ms))
    record(BAD_LINE.name, "expsum decomposition", ok)
    record(BAD_LINE.name, "count decomposition", decomposed_count_check(BAD_LINE.system, ms).exact())

    with open(outdir / "corpus_results.csv", "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["instance", "check", "status", "note"])
        writer.writerows(rows)
    print(f"\n{len(rows)} checks, {failures} failures, {time.time() - t0:.1f}s")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
