import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from priorlab import standard
from priorlab.convergence import ConvergesTo, check_q_vague
from priorlab.errors import FamilyError, NonFiniteDensity, ZeroAtOne, ZeroAtOrigin
from priorlab.families import (
    ExpFamilySpec,
    MeasureFamily,
    constant_family,
    exponential_natural,
    ig_jcp_is_proper,
    jcp_family,
    jeffreys_measure,
    location_family,
    poisson_natural,
    scale_family,
    scaled_family,
)
from priorlab.measures import Continuous, RadonMeasure, TestFunction, equivalent_up_to_scalar, summary, total_mass
from priorlab.numerics import Finite, Interval


def confirmed(report) -> bool:
    return isinstance(report.verdict, ConvergesTo) and bool(report.verdict.candidate_confirmed)


class TestLocationFamily:
    def test_normal_members(self):
        fam = location_family(standard.normal())
        x = np.linspace(-300, 300, 13)
        np.testing.assert_allclose(
            fam.member(100).eval_density(x), standard.normal(0.0, 100.0).eval_density(x), rtol=1e-12
        )
        assert fam.scaling_hint(7) == 7.0

    def test_uniform_members(self):
        fam = location_family(standard.uniform(-1.0, 1.0))
        m = fam.member(10)
        assert float(m.eval_density(np.array([9.9]))[0]) == pytest.approx(0.05)
        assert float(m.eval_density(np.array([10.1]))[0]) == 0.0

    @pytest.mark.parametrize("base", [standard.normal(), standard.uniform(-1.0, 1.0), standard.cauchy()])
    def test_limit_is_lebesgue(self, base):
        assert confirmed(check_q_vague(location_family(base), standard.lebesgue()))

    @pytest.mark.parametrize("n", [1, 10, 100])
    def test_members_are_probabilities(self, n):
        mass = total_mass(location_family(standard.normal()).member(n))
        assert isinstance(mass, Finite) and mass.value == pytest.approx(1.0, abs=1e-7)

    def test_zero_at_origin(self):
        with pytest.raises(ZeroAtOrigin):
            location_family(standard.uniform(1.0, 2.0))

    def test_needs_real_line(self):
        with pytest.raises(FamilyError):
            location_family(standard.exponential())


class TestScaleFamily:
    def test_exponential_limit_is_haar(self):
        assert confirmed(check_q_vague(scale_family(standard.exponential(1.0)), standard.haar_scale()))

    @pytest.mark.parametrize("n", [1, 10, 100])
    def test_lognormal_members(self, n):
        fam = scale_family(standard.lognormal())
        x = np.geomspace(1e-3, 1e3, 13)
        np.testing.assert_allclose(
            fam.member(n).eval_density(x), standard.lognormal(0.0, float(n)).eval_density(x), rtol=1e-10
        )

    @pytest.mark.parametrize("n", [1, 10, 100])
    def test_lognormal_median_constant(self, n):
        assert summary(scale_family(standard.lognormal()).member(n)).median == pytest.approx(1.0, abs=1e-6)

    @pytest.mark.parametrize("n", [1, 10, 100])
    def test_members_are_probabilities(self, n):
        mass = total_mass(scale_family(standard.exponential(1.0)).member(n))
        assert mass.value == pytest.approx(1.0, abs=1e-7)

    def test_zero_at_one(self):
        base = RadonMeasure(
            Continuous(Interval.positive()),
            density=lambda x: np.where(x < 1.0, 2.0 * (1.0 - x), 0.0),
            mass_hint=Finite(1.0),
        )
        with pytest.raises(ZeroAtOne):
            scale_family(base)


class TestJCP:
    def test_poisson_members(self):
        fam = jcp_family(poisson_natural(), lambda n: 1 / n, lambda n: 1 / n)
        t = np.linspace(-3, 3, 7)
        expected = np.exp(t / 5 - np.exp(t) / 5 + t / 2)
        np.testing.assert_allclose(fam.member(5).eval_density(t), expected, rtol=1e-12)
        assert fam.scaling_hint(5) == 1.0

    def test_zero_hyperparameters_give_jeffreys(self):
        spec = poisson_natural()
        fam = jcp_family(spec, lambda n: 0.0, lambda n: 0.0)
        probes = [TestFunction.hat(c, 1.0) for c in (-2.0, 0.0, 2.0, 4.0)]
        for n in (1, 10, 100):
            assert equivalent_up_to_scalar(fam.member(n), jeffreys_measure(spec), probes)

    def test_exponential_gamma_conjugate(self):
        # eta = -lambda; JCP with alpha = beta = 1/n is the Gamma(1/n, 1/n) kernel in lambda
        fam = jcp_family(exponential_natural(), lambda n: 1 / n, lambda n: 1 / n)
        t = -np.array([0.5, 1.0, 2.0])
        lam = -t
        expected = np.exp(-lam / 7) * lam ** (1 / 7) / lam
        np.testing.assert_allclose(fam.member(7).eval_density(t), expected, rtol=1e-12)

    def test_overflow(self):
        spec = ExpFamilySpec(np.exp, lambda t: np.exp(0.5 * t), Continuous(Interval.real_line()), "Poisson")
        with pytest.raises(NonFiniteDensity):
            jcp_family(spec, lambda n: 50.0, lambda n: 0.0).member(1)

    def test_bad_spec(self):
        with pytest.raises(NonFiniteDensity):
            ExpFamilySpec(lambda t: np.exp(t * t), lambda t: np.ones_like(t), Continuous(Interval.real_line()))


class TestIGRegion:
    @pytest.mark.parametrize(
        "a1, a2, b, expected",
        [(1, 1, 0.5, True), (1, 1, 1.0, False), (1, 1, -0.5, True), (1, 1, -0.51, False), (0, 1, 0, False)],
    )
    def test_points(self, a1, a2, b, expected):
        assert ig_jcp_is_proper(a1, a2, b) is expected

    @pytest.mark.parametrize("n", [1, 2, 10, 1000, 10**6])
    def test_vanishing_sequence(self, n):
        assert ig_jcp_is_proper(1 / n, 1 / n, 1 / (2 * n))

    @settings(max_examples=1000, deadline=None)
    @given(st.floats(1e-3, 1e3), st.floats(1e-3, 1e3), st.floats(1e-6, 1e-2))
    def test_boundary_flip(self, a1, a2, gap):
        edge = math.sqrt(a1 * a2)
        assert ig_jcp_is_proper(a1, a2, edge * (1 - gap))
        assert not ig_jcp_is_proper(a1, a2, edge * (1 + gap))


class TestFamilyHelpers:
    def test_member_is_cached(self):
        calls = []

        def member(n):
            calls.append(n)
            return standard.normal(0.0, float(n))

        fam = MeasureFamily(member)
        fam.member(3)
        fam.member(3)
        assert calls == [3]

    def test_constant_family(self):
        m = standard.normal()
        assert constant_family(m).member(17) is m

    def test_scaled_family_hint(self):
        fam = scaled_family(location_family(standard.normal()), lambda n: 2.0 * n)
        assert fam.scaling_hint(10) == pytest.approx(0.5)
