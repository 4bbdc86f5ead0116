#!/usr/bin/env python3
"""Tabulate exponential-sum decay against the predicted rate per instance.

For each monomial-line instance the normalized column |E| p^(rho m) /
m^(m_rho - 1) should stay bounded (and equals 1.0 identically for the
square).  Output is one plot-ready CSV per instance.

Usage: python scripts/decay_study.py [outdir] [max_m]
"""

from __future__ import annotations

import csv
import sys
from pathlib import Path

from padiczeta.bundled import LINE_X1, LINE_X2, LINE_X3, LINE_X4, PARABOLA
from padiczeta.expsum import decay_report
from padiczeta.ratfn import pole_data_from_resolution


def main() -> int:
    outdir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("decay_out")
    max_m = int(sys.argv[2]) if len(sys.argv) > 2 else 8
    outdir.mkdir(parents=True, exist_ok=True)
    for instance in (LINE_X1, LINE_X2, LINE_X3, LINE_X4, PARABOLA):
        pole = pole_data_from_resolution(instance.system.resolution_data, instance.system.p)
        report = decay_report(instance.system, list(range(1, max_m + 1)), pole)
        path = outdir / f"decay_{instance.name}.csv"
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["m", "abs", "normalized"])
            for row in report.rows:
                writer.writerow([row.m, f"{row.abs_value:.12e}", f"{row.normalized:.12e}"])
        print(f"{instance.name:10} rho={pole.rho:.4f} verdict={report.verdict}  -> {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
