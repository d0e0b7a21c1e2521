import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fermatq.lines import (
    LineSpec,
    integral_I,
    integral_I_exact,
    line_value,
    mean_line_distance,
    monte_carlo_I,
)


def brute_mean(t, C, D):
    p = int(t.p)
    return math.fsum(abs(q / p - ((C * b / p + D) % 1.0)) for b, q in enumerate(t.base_row, start=1)) / p


class TestLineValue:
    @pytest.mark.parametrize("C,D,x,want", [(1, 0, 0.5, 0.5), (2.5, 0.3, 0.8, 0.3), (1, 0, 1.0, 0.0)])
    def test_values(self, C, D, x, want):
        assert line_value(LineSpec(C, D), x) == pytest.approx(want, abs=1e-12)

    def test_zero_slope_rejected(self):
        with pytest.raises(ValueError):
            LineSpec(0, 0.5)

    @given(st.floats(0.1, 50), st.floats(-5, 5), st.floats(0, 1))
    def test_period(self, C, D, x):
        line = LineSpec(C, D)
        y0, y1 = line_value(line, x), line_value(line, x + 1 / C)
        assert 0 <= y0 < 1
        assert min(abs(y0 - y1), 1 - abs(y0 - y1)) < 1e-9


class TestMeanDistance:
    def test_p11_exact(self, t11):
        r = mean_line_distance(t11, LineSpec(1, 0))
        assert r.exact == Fraction(43, 121)
        assert r.mean == 43 / 121

    @pytest.mark.parametrize("C,D", [(1, 0), (3, 2), (-2, 0), (1.5, 0.25), (-0.7, 0.9)])
    def test_matches_brute_force(self, tables, C, D):
        t = tables(101)
        assert mean_line_distance(t, LineSpec(C, D)).mean == pytest.approx(brute_mean(t, C, D), abs=1e-13)

    def test_integer_shift_of_D(self, tables):
        t = tables(101)
        for C in (1, 2, 7):
            base = mean_line_distance(t, LineSpec(C, 0)).exact
            assert mean_line_distance(t, LineSpec(C, 3)).exact == base
            assert mean_line_distance(t, LineSpec(C, -1)).exact == base
        x = mean_line_distance(t, LineSpec(1.5, 0.25)).mean
        assert mean_line_distance(t, LineSpec(1.5, 1.25)).mean == pytest.approx(x, abs=1e-14)

    def test_bounded(self, tables):
        for C, D in [(1, 0), (2.3, 0.9), (-5, 0.1)]:
            assert 0 <= mean_line_distance(tables(97), LineSpec(C, D)).mean < 1

    def test_p10007(self, tables):
        assert abs(mean_line_distance(tables(10007), LineSpec(1, 0)).mean - 1 / 3) <= 0.02

    def test_deviation_trend(self, tables):
        devs = [mean_line_distance(tables(p), LineSpec(1, 0)).deviation for p in (1009, 10007, 100003)]
        assert all(later <= 2 * earlier for earlier, later in zip(devs, devs[1:]))

    def test_error_scale_positive(self, t11):
        assert mean_line_distance(t11, LineSpec(2, 0)).error_scale > 0


class TestIntegral:
    def test_identity_line_exact(self):
        assert integral_I_exact(LineSpec(1, 0)) == Fraction(1, 3)

    @pytest.mark.parametrize("C", [1, 2, 3, 7])
    @pytest.mark.parametrize("D", [0.0, 0.3, 0.75])
    def test_integer_slopes_give_one_third(self, C, D):
        assert float(integral_I_exact(LineSpec(C, D))) == pytest.approx(1 / 3, abs=1e-15)
        assert integral_I(LineSpec(C, D), steps=10**4) == pytest.approx(1 / 3, abs=1e-6)

    def test_fractional_slope_closed_form(self):
        # Two and a half periods of g: (1/2.5) * (int_.3^1 + int_0^1 + int_0^.8) of g^2 - g + 1/2.
        want = Fraction(2, 5) * (Fraction(329, 1500) + Fraction(1, 3) + Fraction(94, 375))
        assert integral_I_exact(LineSpec(2.5, 0.3)) == pytest.approx(float(want), abs=1e-15)
        assert integral_I(LineSpec(2.5, 0.3), steps=10**5) == pytest.approx(float(want), abs=1e-9)

    @pytest.mark.parametrize("C,D", [(1, 0), (2.5, 0.3), (4, 0.1)])
    def test_monte_carlo(self, C, D):
        est, se = monte_carlo_I(LineSpec(C, D), samples=10**6, seed=12345)
        assert abs(integral_I(LineSpec(C, D), steps=10**5) - est) <= 3 * se

    def test_quadrature_converges(self):
        line = LineSpec(2.5, 0.3)
        exact = float(integral_I_exact(line))
        errs = [abs(integral_I(line, steps=n) - exact) for n in (10, 100, 1000)]
        assert errs[2] < errs[0]
        assert errs[2] < 1e-6

    def test_steps_guard(self):
        with pytest.raises(ValueError):
            integral_I(LineSpec(1, 0), steps=5)

    def test_negative_slope_outside_hypotheses(self):
        line = LineSpec(-2, 0.3)
        assert not line.positive_slope
        with pytest.raises(ValueError):
            integral_I(line, steps=100, compare=True)
        assert integral_I(line, steps=100) == pytest.approx(1 / 3, abs=1e-3)
