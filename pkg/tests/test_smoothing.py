"""Tests for DVR echelon reduction and the good-reduction chart covering."""

import random
from fractions import Fraction

import pytest

from padiczeta.bundled import BAD_LINE, BAD_LINE_P5, LINE_X2, PARABOLA, PLANE_LINE
from padiczeta.errors import CenterNotOnVariety, RankDeficient
from padiczeta.mpoly import system_from_strings
from padiczeta.smoothing import (
    dvr_echelon,
    global_decompose,
    measure_charts,
    neron_rescale,
    verify_certificate,
)
from padiczeta.variety import good_reduction_test, image_oracle


def test_echelon_single_row():
    result = dvr_echelon([[3, -9]], 3)
    assert result.b == ((3, -9),)
    assert result.pivot_vals == (1,)


def test_echelon_column_swap():
    result = dvr_echelon([[9, 1]], 3)
    assert result.pivot_vals == (0,)
    assert result.b[0][0] == 1
    assert ("cswap", 0, 1) in result.row_ops


def test_echelon_already_reduced():
    result = dvr_echelon([[1, 0, 0], [0, 3, 0]], 3)
    assert result.pivot_vals == (0, 1)


def test_echelon_elimination_stays_integral():
    result = dvr_echelon([[2, 1], [1, 5]], 3)
    # pivot is the (1,2) entry of valuation 0 after tie-breaking by row
    assert result.pivot_vals[0] == 0
    assert all(isinstance(x, int) for row in result.b for x in row)
    assert result.b[1][0] == 0


def test_echelon_pivot_monotonicity():
    rng = random.Random(7)
    for _ in range(40):
        rows = [[rng.randrange(-40, 41) for _ in range(3)] for _ in range(2)]
        try:
            result = dvr_echelon(rows, 3)
        except RankDeficient:
            continue
        assert list(result.pivot_vals) == sorted(result.pivot_vals)
        for i, row in enumerate(result.b):
            vals = [v for v in row[i:] if v]
            if vals:
                assert min(_val3(v) for v in vals) == result.pivot_vals[i]


def _val3(x):
    v = 0
    x = abs(x)
    while x % 3 == 0:
        v += 1
        x //= 3
    return v


def test_echelon_rank_deficient():
    with pytest.raises(RankDeficient):
        dvr_echelon([[3, 6], [1, 2]], 3)


def test_neron_rescale_bad_line():
    cert = neron_rescale(BAD_LINE.system, (0, 0))
    assert cert.L == 2
    assert cert.exponents == (3,)
    assert cert.rescaled_constraints[0].terms == {(1, 0): 1, (0, 1): -3}
    assert cert.verdict.good


def test_neron_rescale_good_line():
    cert = neron_rescale(system_from_strings(3, 2, ["x1"], "x2"), (0, 0))
    assert cert.L == 1 and cert.exponents == (1,)
    assert cert.rescaled_constraints[0].terms == {(1, 0): 1}


def test_neron_rescale_rejects_off_variety_center():
    with pytest.raises(CenterNotOnVariety):
        neron_rescale(PARABOLA.system, (1, 0))


def test_certificate_identity_random_points():
    rng = random.Random(12345)
    for instance in (BAD_LINE, PARABOLA, PLANE_LINE):
        decomposition = global_decompose(instance.system)
        for chart in decomposition.charts:
            assert verify_certificate(chart.certificate, rng, samples=50, depth=4)


def test_global_decompose_good_system_single_step():
    decomposition = global_decompose(system_from_strings(3, 2, ["x1"], "x2"))
    assert decomposition.L == 1
    assert len(decomposition.charts) == 3
    assert all(chart.certificate.L == 1 for chart in decomposition.charts)


def test_global_decompose_bad_line():
    decomposition = global_decompose(BAD_LINE.system)
    assert decomposition.L == 2
    assert len(decomposition.charts) == 9
    for chart in decomposition.charts:
        assert chart.weight == Fraction(1, 3)
        assert good_reduction_test(chart.as_system(3))


def test_decomposition_counts_match_oracle():
    decomposition = global_decompose(BAD_LINE.system)
    for m in range(1, 5):
        assert decomposition.image_count(m) == len(image_oracle(BAD_LINE.system, m, 3))


def test_decomposition_counts_match_oracle_p5():
    decomposition = measure_charts(BAD_LINE_P5.system)
    assert decomposition.L == 2 and len(decomposition.charts) == 25
    for m in (1, 2, 3):
        assert decomposition.image_count(m) == len(image_oracle(BAD_LINE_P5.system, m, 3))


def test_decomposition_total_measure():
    # gamma measure of {3 x1 = 9 x2} is 3: the defining form scales by |3|
    assert global_decompose(BAD_LINE.system).total_measure() == 3
    assert measure_charts(LINE_X2.system).total_measure() == 1
    assert measure_charts(PARABOLA.system).total_measure() == 1


def test_measure_charts_identity_for_good_systems():
    decomposition = measure_charts(LINE_X2.system)
    assert decomposition.L == 0
    assert len(decomposition.charts) == 1
    assert decomposition.charts[0].weight == 1


def test_rescale_idempotence_on_good_points():
    # a good-reduction system rescaled at any of its residues needs only L = 1
    system = PARABOLA.system
    for x0 in [(0, 0), (1, 1), (4, 2)]:
        if system.constraints[0].evaluate(x0) % 3**8:
            continue
        cert = neron_rescale(system, x0)
        assert cert.L == 1


def test_chart_consistency_resummation():
    # per-chart image counts re-sum to the deduped oracle image count exactly
    system = BAD_LINE.system
    decomposition = global_decompose(system)
    for m in (3, 4):
        per_chart = sum(
            1
            for chart in decomposition.charts
            for _ in _chart_points(decomposition, chart, m - decomposition.L)
        )
        assert per_chart == len(image_oracle(system, m, 3))


def _chart_points(decomposition, chart, level):
    from padiczeta.variety import iter_hensel_points

    yield from iter_hensel_points(chart.as_system(decomposition.system.p), level)
