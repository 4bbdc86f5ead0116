"""Row-echelon reduction over Z_p and rescaling to good-reduction charts.

A variety with bad reduction mod p is covered by finitely many cosets
x0 + (p^L Z_p)^n on which the substitution x = x0 + p^L y turns the
(recombined) constraints into a system with good reduction.  The
echelon form over the valuation ring picks the recombination: pivots
are minimum-valuation entries, eliminations use multipliers that are
units of Z_p (implemented as integer row operations with a p-free row
scale, so everything stays exact).

The chart decomposition carries, per chart, the measure transport
weight p^(sum e_i - L*n), which is what makes surface-measure integrals
computable through point counts on the rescaled charts.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .errors import (
    BudgetExceeded,
    CenterNotOnVariety,
    GoodReductionFailed,
    NotStabilized,
    RankDeficient,
)
from .mpoly import MPoly, PolySystem, shift_rescale
from .padic import int_valuation
from .variety import (
    DEFAULT_BUDGET,
    GoodReductionVerdict,
    HenselLifter,
    good_reduction_test,
    iter_congruence_points,
)

RowOp = tuple  # ("rswap", i, k) | ("cswap", j, k) | ("rcomb", k, d, c, i)


@dataclass(frozen=True)
class EchelonResult:
    """Echelon form of an integer matrix under row operations unimodular in Z_p.

    pivot_vals lists the p-adic valuations down the diagonal; they are
    nondecreasing and each pivot has minimal valuation in its row tail.
    row_ops records the exact operations so the same recombination can
    be replayed on the constraint polynomials; column swaps are recorded
    but touch only the matrix layout, never the polynomials.
    """

    b: tuple[tuple[int, ...], ...]
    row_ops: tuple[RowOp, ...]
    pivot_vals: tuple[int, ...]
    col_perm: tuple[int, ...]


def dvr_echelon(matrix: Sequence[Sequence[int]], p: int) -> EchelonResult:
    """Echelon form over Z_p with minimum-valuation pivoting.

    Pivot selection: the entry of minimal valuation in the remaining
    submatrix, ties broken by smallest row then smallest column.
    Eliminations replace row_k by d*row_k - c*row_i with d a unit
    (p-free), which keeps entries integral and the transform invertible
    over Z_p.  Raises RankDeficient when the rank over Q is below the
    row count.
    """
    rows = [list(map(int, row)) for row in matrix]
    if not rows:
        raise RankDeficient("empty matrix")
    nrows, ncols = len(rows), len(rows[0])
    col_perm = list(range(ncols))
    ops: list[RowOp] = []

    for step in range(nrows):
        best = None
        for i in range(step, nrows):
            for j in range(step, ncols):
                v = int_valuation(rows[i][j], p)
                if v is None:
                    continue
                if best is None or v < best[0]:
                    best = (v, i, j)
        if best is None:
            raise RankDeficient(f"rank < {nrows} over Q")
        _, i0, j0 = best
        if i0 != step:
            rows[step], rows[i0] = rows[i0], rows[step]
            ops.append(("rswap", step, i0))
        if j0 != step:
            for row in rows:
                row[step], row[j0] = row[j0], row[step]
            col_perm[step], col_perm[j0] = col_perm[j0], col_perm[step]
            ops.append(("cswap", step, j0))
        pivot = rows[step][step]
        for k in range(step + 1, nrows):
            entry = rows[k][step]
            if entry == 0:
                continue
            frac = Fraction(entry, pivot)
            c, d = frac.numerator, frac.denominator
            assert d % p != 0, "multiplier denominator must be a unit"
            rows[k] = [d * a - c * b for a, b in zip(rows[k], rows[step])]
            ops.append(("rcomb", k, d, c, step))
            assert rows[k][step] == 0

    pivot_vals = []
    for i in range(nrows):
        v = int_valuation(rows[i][i], p)
        assert v is not None
        pivot_vals.append(v)
    return EchelonResult(
        b=tuple(tuple(row) for row in rows),
        row_ops=tuple(ops),
        pivot_vals=tuple(pivot_vals),
        col_perm=tuple(col_perm),
    )


def apply_row_ops(polys: Sequence[MPoly], ops: Sequence[RowOp]) -> list[MPoly]:
    """Replay recorded row operations on a list of polynomials."""
    out = list(polys)
    for op in ops:
        if op[0] == "rswap":
            _, i, k = op
            out[i], out[k] = out[k], out[i]
        elif op[0] == "rcomb":
            _, k, d, c, i = op
            out[k] = out[k].scale(d) - out[i].scale(c)
        # cswap: column bookkeeping only, polynomials untouched
    return out


@dataclass(frozen=True)
class SmoothingCertificate:
    """Witness that the rescaled system at a center has good reduction.

    The defining identity, exact over the integers, is
    combined_constraints[i](center + p^L y) = p^exponents[i] * rescaled[i](y),
    with each rescaled polynomial having at least one unit coefficient.
    """

    p: int
    center: tuple[int, ...]
    L: int
    combined_constraints: tuple[MPoly, ...]
    rescaled_constraints: tuple[MPoly, ...]
    exponents: tuple[int, ...]
    pivot_vals: tuple[int, ...]
    verdict: GoodReductionVerdict

    def to_json(self) -> dict:
        return {
            "center": list(self.center),
            "level": self.L,
            "exponents": list(self.exponents),
            "pivot_valuations": list(self.pivot_vals),
            "rescaled_constraints": [str(f) for f in self.rescaled_constraints],
            "combined_constraints": [str(f) for f in self.combined_constraints],
            "verdict": "Good" if self.verdict.good else "Bad",
        }


def neron_rescale(
    system: PolySystem,
    x0: Sequence[int],
    L_forced: int | None = None,
    budget: int = DEFAULT_BUDGET,
) -> SmoothingCertificate:
    """Rescale the system at a center until it has good reduction.

    Translates to x0, echelon-reduces the linear part over Z_p, replays
    the row operations on the full constraints, sets L to one more than
    the last pivot valuation (or a caller-forced larger value), applies
    the p^L rescale, and verifies good reduction of the result.  The
    center must satisfy the constraints modulo p^(2L + 2); inaccurate
    centers raise CenterNotOnVariety.
    """
    x0 = tuple(int(c) for c in x0)
    if len(x0) != system.n:
        raise ValueError("center has wrong dimension")
    translated = [f.substitute_affine(x0, 1) for f in system.constraints]
    linear = [
        [t.terms.get(tuple(1 if i == j else 0 for i in range(system.n)), 0) for j in range(system.n)]
        for t in translated
    ]
    ech = dvr_echelon(linear, system.p)
    L = ech.pivot_vals[-1] + 1
    if L_forced is not None:
        if L_forced < L:
            raise ValueError(f"forced L={L_forced} below required {L}")
        L = L_forced
    combined_translated = apply_row_ops(translated, ech.row_ops)
    required = 2 * L + 2
    modulus = system.p**required
    for g in combined_translated:
        if g.constant_term() % modulus:
            raise CenterNotOnVariety(
                f"constraints do not vanish mod p^{required} at {x0}"
            )
    exponents, rescaled = [], []
    for i, g in enumerate(combined_translated):
        e, gL = shift_rescale(g, (0,) * system.n, L, system.p)
        assert e == L + ech.pivot_vals[i], "content must match pivot valuation"
        exponents.append(e)
        rescaled.append(gL)
    chart_system = PolySystem(
        p=system.p,
        n=system.n,
        constraints=tuple(rescaled),
        target=system.target.substitute_affine(x0, system.p**L),
    )
    verdict = good_reduction_test(chart_system, budget)
    if not verdict.good:
        raise GoodReductionFailed(
            f"rescaled system at {x0} failed good reduction (witness {verdict.witness}); "
            "the center is not on a submanifold to the required depth",
            state={"center": x0, "L": L, "rescaled": [str(f) for f in rescaled]},
        )
    combined_originals = apply_row_ops(list(system.constraints), ech.row_ops)
    return SmoothingCertificate(
        p=system.p,
        center=x0,
        L=L,
        combined_constraints=tuple(combined_originals),
        rescaled_constraints=tuple(rescaled),
        exponents=tuple(exponents),
        pivot_vals=ech.pivot_vals,
        verdict=verdict,
    )


@dataclass(frozen=True)
class Chart:
    """One good-reduction piece of the variety, with its measure weight.

    Points of the piece are x = center + p^L y for y on the rescaled
    chart variety; `target` is the target polynomial transported to
    chart coordinates, target(y) = f_l(center + p^L y), kept exact.
    The surface measure of a chart subset is weight * (chart-level
    count) * p^(-k * dim) for any resolving level k.
    """

    center: tuple[int, ...]
    L: int
    constraints: tuple[MPoly, ...]
    target: MPoly
    weight: Fraction
    exponents: tuple[int, ...]
    certificate: SmoothingCertificate | None = None

    def as_system(self, p: int, resolution_data=None) -> PolySystem:
        return PolySystem(
            p=p,
            n=self.target.n,
            constraints=self.constraints,
            target=self.target,
            resolution_data=resolution_data,
        )


@dataclass(frozen=True)
class Decomposition:
    """A covering of the variety by disjoint good-reduction charts.

    For systems that already have good reduction this is the single
    identity chart (L = 0); otherwise charts sit over the distinct
    classes mod p^L meeting the variety, so their cosets are pairwise
    disjoint and counts simply add.
    """

    system: PolySystem
    L: int
    charts: tuple[Chart, ...]
    dropped_centers: tuple[tuple[int, ...], ...] = ()

    def lifter(self, chart: Chart, budget: int = DEFAULT_BUDGET) -> HenselLifter:
        return HenselLifter(self.system.p, self.system.n, chart.constraints, budget)

    def image_count(self, m: int, budget: int = DEFAULT_BUDGET) -> int:
        """Number of classes mod p^m hit by Z_p points of the variety."""
        p = self.system.p
        if m == 0:
            return 1
        if m <= self.L:
            modulus = p**m
            return len({tuple(c % modulus for c in chart.center) for chart in self.charts})
        total = 0
        for chart in self.charts:
            total += _chart_count(self, chart, m - self.L, budget)
        return total

    def total_measure(self, budget: int = DEFAULT_BUDGET) -> Fraction:
        """Surface measure of the whole variety inside the unit polydisc."""
        p = self.system.p
        total = Fraction(0)
        for chart in self.charts:
            lifter = self.lifter(chart, budget)
            dim = lifter.dim
            count = len(lifter.roots())  # level-1 count, law gives the measure
            total += chart.weight * Fraction(count, p**dim)
        return total


def _chart_count(dec: Decomposition, chart: Chart, k: int, budget: int) -> int:
    lifter = dec.lifter(chart, budget)
    if k == 0:
        return 1 if lifter.roots() else 0
    total = 0
    stack = [(root, 1) for root in lifter.roots()]
    while stack:
        x, j = stack.pop()
        if j == k:
            total += 1
            continue
        for child in lifter.children(x, j):
            stack.append((child, j + 1))
    return total


def _identity_chart(system: PolySystem) -> Chart:
    return Chart(
        center=(0,) * system.n,
        L=0,
        constraints=system.constraints,
        target=system.target,
        weight=Fraction(1),
        exponents=(0,) * len(system.constraints),
    )


def global_decompose(
    system: PolySystem,
    budget: int = DEFAULT_BUDGET,
    max_rounds: int = 12,
) -> Decomposition:
    """Cover the variety with rescaled good-reduction charts at a uniform L.

    Candidate centers at level L are congruence solutions at accuracy
    level 2L + 3, projected; the candidate set must agree with the one
    computed at accuracy 2L + 4 (else NotStabilized).  Whenever some
    center needs a larger L than the current round assumed, the round is
    restarted with the maximum.  Charts whose rescaled variety has no
    F_p point contain no Z_p points of the variety at all (Hensel) and
    are dropped.
    """
    p, n = system.p, system.n
    L = 1
    for _ in range(max_rounds):
        accuracy = 2 * L + 3

        def candidate_reps(level: int) -> dict[tuple[int, ...], tuple[int, ...]]:
            modulus = p**L
            reps: dict[tuple[int, ...], tuple[int, ...]] = {}
            for x in iter_congruence_points(p, n, system.constraints, level, budget):
                key = tuple(c % modulus for c in x)
                if key not in reps or x < reps[key]:
                    reps[key] = x
            return reps

        reps = candidate_reps(accuracy)
        recheck = candidate_reps(accuracy + 1)
        if set(reps) != set(recheck):
            raise NotStabilized(
                f"candidate centers at level {L} unstable between accuracies "
                f"{accuracy} and {accuracy + 1}"
            )

        needed = L
        for key in sorted(reps):
            x0 = reps[key]
            translated = [f.substitute_affine(x0, 1) for f in system.constraints]
            linear = [
                [t.terms.get(tuple(1 if a == j else 0 for a in range(n)), 0) for j in range(n)]
                for t in translated
            ]
            ech = dvr_echelon(linear, p)
            needed = max(needed, ech.pivot_vals[-1] + 1)
        if needed > L:
            L = needed
            continue

        charts, dropped = [], []
        for key in sorted(reps):
            x0 = reps[key]
            cert = neron_rescale(system, x0, L_forced=L, budget=budget)
            chart = Chart(
                center=x0,
                L=L,
                constraints=cert.rescaled_constraints,
                target=system.target.substitute_affine(x0, p**L),
                weight=Fraction(p ** sum(cert.exponents), p ** (L * n)),
                exponents=cert.exponents,
                certificate=cert,
            )
            if HenselLifter(p, n, chart.constraints, budget).roots():
                charts.append(chart)
            else:
                dropped.append(key)
        return Decomposition(
            system=system, L=L, charts=tuple(charts), dropped_centers=tuple(dropped)
        )
    raise BudgetExceeded(f"rescale level did not settle within {max_rounds} rounds")


@lru_cache(maxsize=64)
def measure_charts(system: PolySystem, budget: int = DEFAULT_BUDGET) -> Decomposition:
    """Decomposition used by the measure and counting machinery.

    Systems with good reduction get the single identity chart; only bad
    reduction pays for the full covering procedure.  Decompositions are
    pure functions of the (immutable) system, so they are cached.
    """
    if good_reduction_test(system, budget):
        return Decomposition(system=system, L=0, charts=(_identity_chart(system),))
    return global_decompose(system, budget)


def verify_certificate(
    cert: SmoothingCertificate,
    rng,
    samples: int = 50,
    depth: int = 4,
) -> bool:
    """Spot-check the defining identity of a certificate at random points.

    For y sampled modulo p^depth, the combined constraint evaluated at
    center + p^L y must equal p^e times the rescaled constraint at y,
    modulo p^(depth + e), exactly.
    """
    p = cert.p
    for _ in range(samples):
        y = tuple(rng.randrange(p**depth) for _ in range(cert.combined_constraints[0].n))
        x = tuple(c + p**cert.L * yi for c, yi in zip(cert.center, y))
        for g, gL, e in zip(cert.combined_constraints, cert.rescaled_constraints, cert.exponents):
            modulus = p ** (depth + e)
            if g.evaluate(x, modulus) != p**e * gL.evaluate(y, modulus) % modulus:
                return False
    return True


def certificates_to_json(decomposition: Decomposition) -> str:
    payload = {
        "level": decomposition.L,
        "charts": [
            {
                "center": list(chart.center),
                "weight": [chart.weight.numerator, chart.weight.denominator],
                "certificate": chart.certificate.to_json() if chart.certificate else None,
            }
            for chart in decomposition.charts
        ],
        "dropped_centers": [list(c) for c in decomposition.dropped_centers],
    }
    return json.dumps(payload, indent=2, sort_keys=True)
