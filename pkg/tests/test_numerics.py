import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from priorlab.errors import Inconclusive, NonConvergence, NonFinite, NotBracketed
from priorlab.numerics import (
    Finite,
    Infinite,
    Interval,
    QuadratureResult,
    Zero,
    find_quantile,
    improper_mass,
    integrate,
    sum_series,
)

# mpmath at 30 digits
GAMMA_0_3 = 2.9915689876875907
E_CUBED = 20.085536923187668


def normal_pdf(x):
    return np.exp(-0.5 * x**2) / math.sqrt(2 * math.pi)


class TestInterval:
    def test_infinite_endpoint_is_open(self):
        iv = Interval(0.0, math.inf)
        assert iv.upper_open

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            Interval(1.0, 1.0)

    @pytest.mark.parametrize(
        "iv, x, inside",
        [
            (Interval.closed(0, 1), 0.0, True),
            (Interval.open(0, 1), 0.0, False),
            (Interval.open(0, 1), 0.5, True),
            (Interval.real_line(), -1e300, True),
            (Interval.positive(), 0.0, False),
        ],
    )
    def test_contains(self, iv, x, inside):
        assert iv.contains(x) is inside

    def test_intersect(self):
        got = Interval.closed(0, 2).intersect(Interval.open(1, 3))
        assert got == Interval(1.0, 2.0, True, False)
        assert Interval.closed(0, 1).intersect(Interval.closed(2, 3)) is None


class TestIntegrate:
    def test_unit_constant(self):
        res = integrate(lambda x: np.ones_like(x), Interval.closed(0, 1))
        assert isinstance(res, QuadratureResult)
        assert res.value == pytest.approx(1.0, abs=1e-12)
        assert res.converged

    def test_normal_pdf_on_the_line(self):
        res = integrate(normal_pdf, Interval.real_line())
        assert abs(res.value - 1.0) <= 1e-10

    def test_inverse_sqrt_singularity(self):
        res = integrate(lambda x: x**-0.5, Interval(0.0, 1.0, True, False))
        assert abs(res.value - 2.0) <= 1e-8

    def test_gamma_kernel_half_line(self):
        res = integrate(lambda x: x**-0.7 * np.exp(-x), Interval.positive())
        assert res.value == pytest.approx(GAMMA_0_3, rel=1e-8)

    def test_converged_error_within_tolerance(self):
        res = integrate(np.cos, Interval.closed(0, 10), abs_tol=1e-10, rel_tol=1e-8)
        assert res.converged
        assert res.error_estimate <= max(1e-10, 1e-8 * abs(res.value))
        assert res.value == pytest.approx(math.sin(10), abs=1e-10)

    def test_nan_is_an_error(self):
        def f(x):
            return np.where(x > 0.3, np.nan, 1.0)

        with pytest.raises(NonFinite):
            integrate(f, Interval.closed(0, 1))

    def test_non_integrable_endpoint_reported(self):
        with pytest.raises(NonConvergence):
            integrate(lambda x: 1.0 / x, Interval(0.0, 1.0, True, False))

    def test_budget_exhaustion_reported(self):
        f = lambda x: np.sin(50 * x) ** 2  # noqa: E731
        res = integrate(f, Interval.closed(0, 100), budget=2, raise_on_failure=False)
        assert not res.converged
        with pytest.raises(NonConvergence):
            integrate(f, Interval.closed(0, 100), budget=2)

    def test_deterministic(self):
        f = lambda x: np.exp(-x) * np.sin(3 * x) ** 2  # noqa: E731
        a = integrate(f, Interval.positive())
        b = integrate(f, Interval.positive())
        assert a == b

    @settings(max_examples=40, deadline=None)
    @given(
        st.lists(st.floats(-3, 3), min_size=1, max_size=4),
        st.lists(st.floats(-3, 3), min_size=1, max_size=4),
        st.floats(-2, 2),
        st.floats(-2, 2),
        st.floats(-5, 5),
        st.floats(0.1, 5),
    )
    def test_linearity(self, p, q, alpha, beta, lo, width):
        iv = Interval.closed(lo, lo + width)
        f = np.polynomial.Polynomial(p)
        g = np.polynomial.Polynomial(q)
        rf = integrate(f, iv)
        rg = integrate(g, iv)
        rh = integrate(lambda x: alpha * f(x) + beta * g(x), iv)
        slack = abs(alpha) * rf.error_estimate + abs(beta) * rg.error_estimate + rh.error_estimate
        assert abs(rh.value - (alpha * rf.value + beta * rg.value)) <= slack + 1e-9

    @settings(max_examples=30, deadline=None)
    @given(st.floats(-20, 20))
    def test_translation_invariance(self, c):
        base = integrate(normal_pdf, Interval.closed(-1, 2))
        shifted = integrate(lambda x: normal_pdf(x - c), Interval.closed(-1 + c, 2 + c))
        assert shifted.value == pytest.approx(base.value, abs=1e-9)


class TestSumSeries:
    def test_poisson_normalizer(self):
        res = sum_series(lambda k: np.exp(k * math.log(3.0) - special.gammaln(k + 1)))
        assert res.value == pytest.approx(E_CUBED, rel=1e-9)

    def test_finite_support(self):
        res = sum_series(lambda k: k, support=[1, 2, 3, 4])
        assert res.value == 10.0


class TestImproperMass:
    def test_unit_exponential(self):
        m = improper_mass(lambda x: np.exp(-x), Interval.positive())
        assert isinstance(m, Finite)
        assert abs(m.value - 1.0) <= 1e-8

    def test_haar(self):
        assert improper_mass(lambda x: 1.0 / x, Interval.positive()) == Infinite()

    def test_haldane(self):
        assert improper_mass(lambda x: 1.0 / (x * (1 - x)), Interval.open(0, 1)) == Infinite()

    def test_lebesgue(self):
        assert improper_mass(lambda x: np.ones_like(x), Interval.real_line()) == Infinite()

    def test_zero(self):
        assert improper_mass(lambda x: np.zeros_like(x), Interval.closed(0, 1)) == Zero()

    @settings(max_examples=25, deadline=None)
    @given(st.floats(-5, 5), st.floats(0.01, 3), st.floats(1e-3, 1e3))
    def test_positive_bump_never_zero(self, center, width, height):
        def f(x):
            return height * np.maximum(0.0, 1.0 - np.abs(x - center) / width)

        try:
            m = improper_mass(f, Interval.real_line())
        except Inconclusive:
            return
        assert not isinstance(m, Zero)

    def test_finite_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            Finite(0.0)


class TestFindQuantile:
    def test_normal_median(self):
        cdf = lambda t: 0.5 * math.erfc(-t / math.sqrt(2))  # noqa: E731
        assert abs(find_quantile(cdf, 0.5, Interval.real_line())) <= 1e-10

    def test_arcsine_median(self):
        cdf = lambda t: special.betainc(0.5, 0.5, t)  # noqa: E731
        assert find_quantile(cdf, 0.5, Interval.open(0, 1), tol=1e-12) == pytest.approx(0.5, abs=1e-8)

    def test_exponential_median(self):
        cdf = lambda t: 1 - math.exp(-t)  # noqa: E731
        assert find_quantile(cdf, 0.5, Interval.positive()) == pytest.approx(math.log(2), abs=1e-10)

    def test_not_bracketed(self):
        with pytest.raises(NotBracketed):
            find_quantile(lambda t: 0.25 * t, 0.5, Interval.closed(0, 1))

    @settings(max_examples=40, deadline=None)
    @given(st.floats(0.01, 0.99))
    def test_meets_tolerance(self, p):
        cdf = lambda t: 1 - math.exp(-2 * t)  # noqa: E731
        t = find_quantile(cdf, p, Interval.positive(), tol=1e-11)
        assert abs(cdf(t) - p) <= 1e-11
