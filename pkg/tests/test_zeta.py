"""Tests for shell measures, coefficient tables, and the conductor scan."""

from fractions import Fraction

import pytest

from padiczeta.bundled import BAD_LINE, LINE_X1, LINE_X2, LINE_X3, PARABOLA
from padiczeta.characters import enumerate_characters, trivial_character
from padiczeta.errors import HypothesisNotVerified
from padiczeta.mpoly import system_from_strings
from padiczeta.ratfn import pole_analysis, reconstruct_rational
from padiczeta.smoothing import measure_charts
from padiczeta.support import Support
from padiczeta.zeta import (
    build_shell_table,
    candidate_pole_verdict,
    coefficient_table,
    conductor_vanishing_scan,
    shell_count,
    tail_measure,
    zeta_coefficient,
)

F = Fraction


def brute_shell_counts(system, m, c):
    """Oracle: scan the full grid at level m + c and classify image-free."""
    from padiczeta.variety import brute_force_points

    fiber = brute_force_points(system, m + c, angular_level=c)
    return {u: k for (v, u), k in fiber.by_shell.items() if v == m}


def test_shell_counts_against_brute_oracle():
    system = LINE_X2.system
    assert shell_count(system, 0, 1) == {1: 2} == brute_shell_counts(system, 0, 1)
    assert shell_count(system, 1, 1) == {} == brute_shell_counts(system, 1, 1)
    # six points x2 in {3,6,12,15,21,24} mod 27 sit in the ord-2 shell
    assert shell_count(system, 2, 1) == {1: 6} == brute_shell_counts(system, 2, 1)


def test_shell_counts_parabola_against_oracle():
    system = PARABOLA.system
    for m in range(0, 3):
        assert shell_count(system, m, 1) == brute_shell_counts(system, m, 1)


def test_trivial_coefficients_x2_line():
    system = LINE_X2.system
    triv = trivial_character(3)
    assert zeta_coefficient(system, 0, triv) == F(2, 3)
    assert zeta_coefficient(system, 1, triv) == 0
    assert zeta_coefficient(system, 2, triv) == F(2, 9)


def test_quadratic_twist_x2_line():
    # chi(ac x^2) = chi(v)^2 = 1, so the twisted table equals the trivial one
    system = LINE_X2.system
    quad = next(c for c in enumerate_characters(3, 1) if c.index == 1)
    coeff = zeta_coefficient(system, 0, quad)
    assert abs(coeff - 2 / 3) < 1e-12


def test_table_reconstruction_and_poles():
    table = build_shell_table(LINE_X2.system, 8)
    fn = reconstruct_rational(table.trivial_series())
    assert fn.series(5) == [F(2, 3), F(0), F(2, 9), F(0), F(2, 27)]
    pole = pole_analysis(fn, 3)
    assert pole.rho_exact == F(1, 2) and pole.m_rho == 1


def _is_p_power(value: int, p: int) -> bool:
    while value % p == 0:
        value //= p
    return value == 1


def test_positivity_and_mass_bound():
    for instance in (LINE_X1, LINE_X2, PARABOLA, BAD_LINE):
        table = build_shell_table(instance.system, 6)
        series = table.trivial_series()
        assert all(c >= 0 for c in series)
        assert all(_is_p_power(c.denominator, instance.system.p) for c in series)
        total_mass = measure_charts(instance.system).total_measure()
        assert sum(series, F(0)) <= total_mass


def test_shell_partition_sums_to_total():
    for instance in (LINE_X2, PARABOLA, BAD_LINE):
        system = instance.system
        decomposition = measure_charts(system)
        total = decomposition.total_measure()
        m = 5
        table = build_shell_table(system, m - 1, decomposition=decomposition)
        partial = sum(table.trivial_series(), F(0))
        assert partial + tail_measure(system, m, decomposition=decomposition) == total


def test_stabilization_flags_set():
    table = build_shell_table(LINE_X2.system, 4)
    assert all(table.stabilized)


def test_support_restriction():
    # restricting to the coset x2 = 1 mod 3 keeps only the unit shell mass
    system = LINE_X2.system
    support = Support.cosets(2, 1, [[0, 1]], 3)
    table = build_shell_table(system, 4, support=support)
    series = table.trivial_series()
    assert series[0] == F(1, 3)
    assert all(c == 0 for c in series[1:])


def test_support_restriction_on_bad_reduction_charts():
    # {3x1 = 9x2} meets {x2 = 1 mod 3} in the charts with unit center, each
    # carrying weight 1/3, so the restricted mass is 3 * 1/3 = 1, all of it
    # in the valuation-0 shell of x2^2
    support = Support.cosets(2, 1, [[0, 1]], 3)
    table = build_shell_table(BAD_LINE.system, 4, support=support)
    series = table.trivial_series()
    assert series[0] == F(1)
    assert all(c == 0 for c in series[1:])


def test_bad_reduction_zeta_weighted_by_charts():
    # V = {3x1 = 9x2} carries gamma measure 3, so Z = 2 / (1 - t^2/3)
    table = build_shell_table(BAD_LINE.system, 8)
    fn = reconstruct_rational(table.trivial_series())
    assert fn.series(3) == [F(2), F(0), F(2, 3)]
    pole = pole_analysis(fn, 3)
    assert pole.rho_exact == F(1, 2)


def test_piece_relation_for_rho():
    # rho(whole) equals the minimum of rho over decomposition pieces
    system = BAD_LINE.system
    decomposition = measure_charts(system)
    whole = pole_analysis(
        reconstruct_rational(build_shell_table(system, 8, decomposition=decomposition).trivial_series()),
        3,
    )
    piece_rhos = []
    for chart in decomposition.charts:
        piece = chart.as_system(3)
        fn = reconstruct_rational(build_shell_table(piece, 8).trivial_series())
        if len(fn.den) > 1:
            piece_rhos.append(pole_analysis(fn, 3).rho_exact)
    assert piece_rhos, "some piece must carry a pole"
    assert whole.rho_exact == min(piece_rhos)


def test_conductor_scan_x2_line():
    scan = conductor_vanishing_scan(LINE_X2.system, 2, 6)
    assert scan.cutoff == 1
    assert scan.guard_margin == 1
    assert all(chi.conductor <= 1 for chi in scan.nonzero)


def test_conductor_scan_x1_line_all_twists_vanish():
    # every angular class in a shell has equal mass, so orthogonality kills
    # all twisted tables; the empirical cutoff is 0
    scan = conductor_vanishing_scan(LINE_X1.system, 2, 6)
    assert scan.cutoff == 0
    assert not scan.nonzero


def test_conductor_scan_x3_line_needs_level_two():
    # cubing collapses the units mod 9 onto {1, 8}, so the two order-3
    # characters mod 9 survive with nonzero tables
    scan = conductor_vanishing_scan(LINE_X3.system, 3, 6)
    assert scan.cutoff == 2
    assert {chi.conductor for chi in scan.nonzero} == {2}


def test_x3_line_order_three_twist_values():
    # hand derivation: shells of x^3 have ac classes {1, 8} mod 9 with equal
    # mass 3^(-k-1) each, and the order-3 characters send both to 1, so the
    # twisted table equals the trivial one: (2/3) / (1 - t^3/3)
    table = build_shell_table(LINE_X3.system, 6, c_level=2)
    order3 = [chi for chi in enumerate_characters(3, 2) if chi.order == 3]
    assert len(order3) == 2
    for chi in order3:
        coeffs = [table.coefficient(chi, m) for m in range(5)]
        expected = [F(2, 3), 0, 0, F(2, 9), 0]
        assert all(abs(c - e) < 1e-12 for c, e in zip(coeffs, expected))


def test_conductor_scan_requires_clean_probe():
    system = system_from_strings(3, 2, ["x1"], "x2^2 - 1")
    with pytest.raises(HypothesisNotVerified):
        conductor_vanishing_scan(system, 1, 4)


def test_candidate_pole_verdicts():
    for instance, factors in [(LINE_X2, ((2, 1, 1),)), (LINE_X3, ((3, 1, 1),))]:
        table = build_shell_table(instance.system, 10)
        fn = reconstruct_rational(table.trivial_series())
        match = candidate_pole_verdict(instance.system, fn)
        assert match.multiplicities == factors


def test_coefficient_table_dataclass():
    table = build_shell_table(LINE_X2.system, 4, c_level=1)
    ct = coefficient_table(table, trivial_character(3))
    assert ct.coeffs[0] == F(2, 3)
    assert not ct.is_zero()
