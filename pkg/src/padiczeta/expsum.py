"""Exponential sums along the variety and the stationary phase formula.

The direct route sums the additive character over the reduction image of
the variety modulo p^m (Hensel enumeration on good-reduction charts).
The formula route rebuilds the same value out of twisted local zeta
data: the value of the trivial-character zeta at t = 1, one coefficient
of an explicit rational function of it, and a finite character sum of
Gaussian sums against twisted zeta coefficients.  The two routes share
no code beyond polynomial evaluation, which is what makes their
agreement at 1e-9 a meaningful verification.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .characters import MultChar, chi_value, gauss_sum, trivial_character
from .errors import EvenPrimeUnsupported, MissingTable
from .mpoly import MPoly, PolySystem, shift_rescale
from .padic import ScaledUnit, psi_ratio
from .ratfn import PoleData
from .smoothing import Decomposition, measure_charts
from .support import Support
from .variety import DEFAULT_BUDGET, HenselLifter, hensel_lift_point, iter_hensel_points
from .zeta import ShellTable, _chart_support, build_shell_table, conductor_vanishing_scan


@dataclass(frozen=True)
class ExpSumRecord:
    m: int
    u: int
    direct: complex
    via_formula: complex | None
    abs_direct: float


def exponential_sum(
    system: PolySystem,
    m: int,
    u: int,
    decomposition: Decomposition | None = None,
    budget: int = DEFAULT_BUDGET,
) -> complex:
    """E(u p^-m): the normalized character sum over the reduction image.

    E = p^(-m dim) * sum over image classes x mod p^m of
    Psi(u f_l(x) / p^m); the summand only depends on the class, and the
    image is enumerated chart by chart (each image class belongs to
    exactly one chart coset).
    """
    p = system.p
    if u % p == 0:
        raise ValueError("u must be a unit")
    if m < 1:
        raise ValueError("m must be >= 1")
    if decomposition is None:
        decomposition = measure_charts(system, budget)
    total = 0.0 + 0.0j
    if m <= decomposition.L:
        modulus = p**m
        seen = set()
        for chart in decomposition.charts:
            key = tuple(c % modulus for c in chart.center)
            if key in seen:
                continue
            seen.add(key)
            total += psi_ratio(u * system.target.evaluate(key, modulus), p, m)
    else:
        for chart in decomposition.charts:
            level = m - chart.L
            target_mod = p**m
            chart_system = chart.as_system(p)
            for y in iter_hensel_points(chart_system, level, budget):
                total += psi_ratio(u * chart.target.evaluate(y, target_mod), p, m)
    return total / p ** (m * system.dim)


def oscillatory_integral(
    system: PolySystem,
    z: ScaledUnit,
    support: Support | None = None,
    decomposition: Decomposition | None = None,
    budget: int = DEFAULT_BUDGET,
) -> complex:
    """The oscillatory surface integral of Psi(z f_l) over the support.

    Computed as a weighted character sum over the good-reduction charts;
    for the full polydisc on a good-reduction system this coincides with
    the exponential sum E(z).
    """
    p, m, u = z.p, z.m, z.u
    if p != system.p:
        raise ValueError("mismatched primes")
    if decomposition is None:
        decomposition = measure_charts(system, budget)
    dim = system.dim
    total = 0.0 + 0.0j
    for chart in decomposition.charts:
        sup = _chart_support(support, chart, p)
        if sup is None:
            continue
        sup = None if sup == "full" else sup
        k = max(m - chart.L, sup.level if sup else 0, 1)
        chart_system = chart.as_system(p)
        target_mod = p**m
        partial = 0.0 + 0.0j
        for y in iter_hensel_points(chart_system, k, budget, support=sup):
            partial += psi_ratio(u * chart.target.evaluate(y, target_mod), p, m)
        total += float(chart.weight) * partial / p ** (k * dim)
    return total


# -- stationary phase ------------------------------------------------------------


@dataclass
class StationaryPhaseContext:
    """Precomputed zeta data needed to evaluate exponential sums by formula.

    Holds the exact shell-measure table, the total surface mass (the
    value of the trivial-character zeta at t = 1: the target vanishes on
    a measure-zero subset of the variety, so the shell masses sum to the
    whole measure), the twisted characters up to the verified conductor
    cutoff, and the Gaussian sums of their inverses.
    """

    system: PolySystem
    support: Support | None
    table: ShellTable
    total_mass: Fraction
    twisted: tuple[tuple[MultChar, complex], ...]  # (chi, gauss_sum(chi^-1))
    cutoff: int

    @property
    def q(self) -> int:
        return self.system.p


def build_stationary_phase_context(
    system: PolySystem,
    depth: int = 6,
    c_max: int = 2,
    c_limit: int = 4,
    support: Support | None = None,
    decomposition: Decomposition | None = None,
    budget: int = DEFAULT_BUDGET,
    probe_level: int = 2,
) -> StationaryPhaseContext:
    """Scan characters, build shell tables, reconstruct the trivial zeta.

    The character sum in the formula is truncated at the empirical
    conductor cutoff, and the scan must have verified at least one
    conductor level beyond the cutoff to be identically zero (guard
    margin >= 1); the scan level escalates up to c_limit until that
    margin exists, so the truncation is checked rather than assumed.
    """
    if system.p == 2:
        raise EvenPrimeUnsupported(
            "the formula route needs twisted characters, which are not "
            "supported for p = 2; direct exponential sums remain available"
        )
    if decomposition is None:
        decomposition = measure_charts(system, budget)
    for level in range(c_max, c_limit + 1):
        scan = conductor_vanishing_scan(
            system,
            level,
            depth,
            support=support,
            decomposition=decomposition,
            budget=budget,
            probe_level=probe_level,
        )
        if scan.guard_margin >= 1:
            break
    else:
        raise MissingTable(
            f"nonzero twisted tables persist through conductor {c_limit}; "
            "no verified truncation margin"
        )
    cutoff = scan.cutoff
    twisted = [(chi, gauss_sum(chi.inverse())) for chi in scan.nonzero]
    c_table = max(cutoff, 1)
    table = build_shell_table(
        system, depth, c_level=c_table, support=support, decomposition=decomposition, budget=budget
    )
    if support is None or support.is_full():
        total_mass = decomposition.total_measure(budget)
    else:
        from .zeta import tail_measure

        total_mass = tail_measure(
            system, 0, support=support, decomposition=decomposition, budget=budget
        )
    return StationaryPhaseContext(
        system=system,
        support=support,
        table=table,
        total_mass=total_mass,
        twisted=tuple(twisted),
        cutoff=cutoff,
    )


def stationary_phase_eval(ctx: StationaryPhaseContext, m: int, u: int) -> complex:
    """Evaluate the exponential sum through zeta coefficients and Gauss sums.

    value = Z(0, triv)
          + Coeff_{t^(m-1)} (t - q) Z(s, triv) / ((q - 1)(1 - t))
          + sum over nontrivial chi of g_{chi^-1} chi(u)
            Coeff_{t^(m - c(chi))} Z(s, chi).

    Z(0, triv) is the total surface mass; the kernel (t - q)/((q-1)(1-t))
    has series coefficients h_0 = -q/(q-1) and h_j = -1 for j >= 1, so
    the middle term is an explicit finite sum of trivial coefficients.
    """
    q = ctx.q
    value = complex(float(ctx.total_mass))
    trivial = trivial_character(q)
    coeffs = [ctx.table.coefficient_extrapolated(trivial, k) for k in range(m)]
    middle = Fraction(-q, q - 1) * coeffs[m - 1] - sum(coeffs[: m - 1], Fraction(0))
    value += float(middle)
    for chi, g_inv in ctx.twisted:
        k = m - chi.conductor
        if k < 0:
            continue
        coeff = ctx.table.coefficient_extrapolated(chi, k)
        if isinstance(coeff, Fraction):
            coeff = complex(float(coeff))
        value += g_inv * chi_value(chi, u) * coeff
    return value


@dataclass(frozen=True)
class StationaryPhaseReport:
    records: tuple[ExpSumRecord, ...]
    max_discrepancy: float

    def passed(self, tol: float = 1e-9) -> bool:
        return self.max_discrepancy < tol


def stationary_phase_check(
    system: PolySystem,
    m_values: Sequence[int],
    c_cap: int = 2,
    depth: int | None = None,
    support: Support | None = None,
    budget: int = DEFAULT_BUDGET,
    context: StationaryPhaseContext | None = None,
) -> StationaryPhaseReport:
    """Cross-validate direct exponential sums against the formula route.

    For every m the unit classes u run modulo p^min(m, c_cap); the
    report carries the worst absolute discrepancy over all (m, u).  With
    the full polydisc support the direct side is the plain exponential
    sum; for a restricted support the formula computes the restricted
    surface integral, so that is what the direct side evaluates.  The
    formula consumes coefficients only up to max(m) - 1, so the default
    table depth is max(m).
    """
    if context is None:
        context = build_stationary_phase_context(
            system,
            depth=max(m_values) if depth is None else depth,
            c_max=c_cap,
            support=support,
            budget=budget,
        )
    decomposition = context.table.decomposition
    p = system.p
    restricted = support is not None and not support.is_full()
    records = []
    worst = 0.0
    for m in m_values:
        u_mod = p ** min(m, c_cap)
        for u in range(1, u_mod):
            if u % p == 0:
                continue
            if restricted:
                direct = oscillatory_integral(
                    system,
                    ScaledUnit(p, m, u),
                    support=support,
                    decomposition=decomposition,
                    budget=budget,
                )
            else:
                direct = exponential_sum(system, m, u, decomposition=decomposition, budget=budget)
            formula = stationary_phase_eval(context, m, u)
            gap = abs(direct - formula)
            worst = max(worst, gap)
            records.append(
                ExpSumRecord(m=m, u=u, direct=direct, via_formula=formula, abs_direct=abs(direct))
            )
    return StationaryPhaseReport(records=tuple(records), max_discrepancy=worst)


# -- decay reporting ---------------------------------------------------------------


@dataclass(frozen=True)
class DecayRow:
    m: int
    abs_value: float
    normalized: float


@dataclass(frozen=True)
class DecayReport:
    rows: tuple[DecayRow, ...]
    verdict: str  # "Bounded" or "Inconclusive"


def decay_report(
    system: PolySystem,
    m_values: Sequence[int],
    pole: PoleData,
    u: int = 1,
    decomposition: Decomposition | None = None,
    budget: int = DEFAULT_BUDGET,
    slack: float = 1.5,
) -> DecayReport:
    """Normalize |E(u p^-m)| by the predicted decay p^(-rho m) m^(m_rho - 1).

    The verdict is Bounded when the running maximum over the upper half
    of the m range does not exceed the lower-half maximum by more than
    the slack factor.
    """
    if decomposition is None:
        decomposition = measure_charts(system, budget)
    rows = []
    for m in m_values:
        value = abs(exponential_sum(system, m, u, decomposition=decomposition, budget=budget))
        scale = system.p ** (pole.rho * m) / m ** (pole.m_rho - 1)
        rows.append(DecayRow(m=m, abs_value=value, normalized=value * scale))
    floor = 1e-12  # normalized values below this are floating zeros
    half = len(rows) // 2
    lower = max((r.normalized for r in rows[:half] if r.normalized > floor), default=0.0)
    upper = max((r.normalized for r in rows[half:] if r.normalized > floor), default=0.0)
    if upper == 0.0:
        verdict = "Bounded"
    elif lower == 0.0:
        verdict = "Inconclusive"
    else:
        verdict = "Bounded" if upper <= slack * lower else "Inconclusive"
    return DecayReport(rows=tuple(rows), verdict=verdict)


# -- decomposition identity (two-route check under bad reduction) -------------------


@dataclass(frozen=True)
class DecompositionIdentityRow:
    m: int
    u: int
    lhs: complex
    rhs: complex

    @property
    def gap(self) -> float:
        return abs(self.lhs - self.rhs)


def decomposed_expsum_check(
    system: PolySystem,
    m_values: Sequence[int],
    u: int = 1,
    budget: int = DEFAULT_BUDGET,
) -> list[DecompositionIdentityRow]:
    """Check p^(m dim) E(u p^-m) against its chart-by-chart splitting.

    The right side lifts each chart center to an accurate variety point,
    splits the target into its value at the center plus the rescaled
    remainder, and multiplies the two additive-character factors; the
    left side is the plain image sum.  Requires m > L.
    """
    decomposition = measure_charts(system, budget)
    p, n, dim = system.p, system.n, system.dim
    L = decomposition.L
    rows = []
    for m in m_values:
        if m <= L:
            raise ValueError(f"identity needs m > L = {L}")
        lhs = exponential_sum(system, m, u, decomposition=decomposition, budget=budget) * p ** (
            m * dim
        )
        rhs = 0.0 + 0.0j
        for chart in decomposition.charts:
            chart_system = chart.as_system(p)
            lifter = HenselLifter(p, n, chart.constraints, budget)
            root = lifter.roots()[0]
            y_lift = hensel_lift_point(chart_system, root, m, budget)
            x_rep = tuple(c + p**chart.L * y for c, y in zip(chart.center, y_lift))
            shifted = system.target.substitute_affine(x_rep, p**chart.L)
            const = shifted.constant_term()
            nonconst = shifted - MPoly.constant(n, const)
            e_l = nonconst.content_valuation(p)
            assert e_l is not None and e_l >= chart.L, "target remainder must carry p^L"
            remainder = MPoly(n, {expo: c // p**e_l for expo, c in nonconst.terms.items()})
            # chart variety relative to the accurate representative
            constraints_rep = []
            for g in chart.certificate.combined_constraints if chart.certificate else system.constraints:
                _, resc = shift_rescale(g.substitute_affine(x_rep, 1), (0,) * n, chart.L, p)
                constraints_rep.append(resc)
            rep_system = PolySystem(p=p, n=n, constraints=tuple(constraints_rep), target=remainder)
            inner = 0.0 + 0.0j
            scale = p ** (e_l - chart.L)
            for y in iter_hensel_points(rep_system, m - chart.L, budget):
                inner += psi_ratio(u * scale * remainder.evaluate(y, p ** (m - chart.L)), p, m - chart.L)
            rhs += psi_ratio(u * const, p, m) * inner
        rows.append(DecompositionIdentityRow(m=m, u=u, lhs=lhs, rhs=rhs))
    return rows


def crude_bound(system: PolySystem) -> float:
    """|E(u p^-m)| <= p^(m (l-1)) is trivially true; exposed for property tests."""
    return float(system.p ** (system.l - 1))
