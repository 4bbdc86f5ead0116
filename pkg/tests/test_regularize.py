"""Tests for the delta_r regularization and its limit identity."""

from fractions import Fraction

import pytest

import padiczeta.regularize as regularize
from padiczeta.bundled import LINE_X2, PARABOLA, PLANE_LINE
from padiczeta.characters import enumerate_characters
from padiczeta.expsum import oscillatory_integral
from padiczeta.padic import ScaledUnit
from padiczeta.regularize import (
    delta_integral,
    delta_limit_check,
    delta_normalization,
    delta_oscillatory,
)

F = Fraction


@pytest.mark.parametrize("l", [2, 3])
@pytest.mark.parametrize("r", [0, 1, 2])
def test_delta_normalization_is_one(l, r):
    assert delta_normalization(3, l, r, r + 2) == 1


def test_delta_integral_x2_line():
    # exact limit value: sum over shells (2/3) 3^(-3k) = 9/13
    approx = delta_integral(LINE_X2.system, 1, None, r=2, depth=5)
    assert isinstance(approx.value, Fraction)
    assert abs(float(approx.value) - F(9, 13)) <= float(approx.tail_bound)


def test_delta_integral_parabola():
    # surface integral of |x2| over the parabola: (2/3)/(1 - 1/9) = 3/4
    approx = delta_integral(PARABOLA.system, 1, None, r=3, depth=6)
    assert abs(float(approx.value) - F(3, 4)) <= float(approx.tail_bound)


def test_delta_integral_r0_is_plain_integral():
    # delta_0 = 1: the plain polydisc integral of |x2^2|, via shells of x2^2
    approx = delta_integral(LINE_X2.system, 1, None, r=0, depth=6)
    plain = sum(F(2, 3) * F(1, 27) ** k for k in range(20))  # partial shell sum
    assert abs(float(approx.value) - float(plain)) <= float(approx.tail_bound) + 1e-9


def test_delta_tail_decreases_with_depth():
    shallow = delta_integral(LINE_X2.system, 1, None, r=2, depth=4)
    deep = delta_integral(LINE_X2.system, 1, None, r=2, depth=7)
    assert deep.tail_bound < shallow.tail_bound


def test_delta_limit_check_x2_line():
    report = delta_limit_check(LINE_X2.system, 1, None, [0, 1, 2, 3, 4], depth=9)
    assert report.passed
    assert report.r0 is not None and report.r0 <= 4
    assert report.rows[0].surface_value == F(9, 13)
    assert all(row.tail_bound <= F(1, 10**6) for row in report.rows)


def test_delta_limit_check_parabola():
    report = delta_limit_check(PARABOLA.system, 1, None, [0, 1, 2, 3, 4], depth=9)
    assert report.passed
    assert report.r0 is not None and report.r0 <= 4
    assert report.rows[0].surface_value == F(3, 4)
    assert all(row.tail_bound <= F(1, 10**6) for row in report.rows)


def test_delta_limit_check_two_constraints():
    report = delta_limit_check(PLANE_LINE.system, 1, None, [0, 1, 2, 3], depth=7)
    assert report.passed


def test_delta_value_constant_past_chart_level():
    # local constancy: I_r stops depending on r once r clears the chart level
    values = [
        delta_integral(PARABOLA.system, 1, None, r=r, depth=8).value for r in (3, 4, 5)
    ]
    assert values[0] == values[1] == values[2]


def test_delta_limit_twisted_character():
    # chi(ac x2^2) = 1 for the quadratic character, so the twisted value
    # matches the trivial one
    quad = next(c for c in enumerate_characters(3, 1) if c.index == 1)
    report = delta_limit_check(LINE_X2.system, 1, quad, [2, 3, 4], depth=8)
    assert report.passed
    assert abs(complex(report.rows[0].surface_value) - 9 / 13) < 1e-9


def test_mutated_delta_scale_fails(monkeypatch):
    # falsification path: wrong normalization p^(r l) must break the limit
    monkeypatch.setattr(regularize, "_delta_scale", lambda p, r, l: p ** (r * l))
    report = delta_limit_check(LINE_X2.system, 1, None, [2, 3, 4], depth=7)
    assert not report.passed


def test_delta_oscillatory_matches_surface_integral():
    # closing identity: the delta_r-regularized character sum converges to
    # the oscillatory surface integral
    for instance in (LINE_X2, PARABOLA):
        system = instance.system
        for m in (1, 2):
            z = ScaledUnit(3, m, 1)
            surface = oscillatory_integral(system, z)
            for r in (3, 4):
                value = delta_oscillatory(system, z, r)
                assert abs(value - surface) < 1e-9, (instance.name, m, r)
