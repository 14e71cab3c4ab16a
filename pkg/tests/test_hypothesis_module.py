import math

import numpy as np
import pytest

from priorlab import standard
from priorlab.catalog import bump_likelihood, heavy_tail_likelihood, lindley_mixture, normal_scale_family
from priorlab.convergence import ConvergesTo, NGrid
from priorlab.errors import PreconditionFailure, ZeroEvidence
from priorlab.families import MeasureFamily, constant_family
from priorlab.hypothesis import (
    PointNullMixture,
    dauxois_prior,
    improper_null_prob,
    likelihood_tail,
    limit_regime,
    normal_improper_null_prob,
    normal_mixture_null_prob,
    null_posterior_prob,
    prior_vague_limit,
)
from priorlab.measures import Continuous, scale, total_mass
from priorlab.numerics import Interval
from priorlab.posterior import Likelihood, normal_likelihood, posterior

# mpmath at 30 digits
LINDLEY_N10_X2 = 0.581117430793907123722949371567
IMPROPER_X2 = 0.0512252649487129076786439034277
IMPROPER_SUP = 0.285174224834318700543711662983

LIK = normal_likelihood()


class TestMixture:
    def test_rho_range(self):
        with pytest.raises(ValueError):
            PointNullMixture(1.0, 0.0, normal_scale_family())

    def test_theta0_in_space(self):
        fam = MeasureFamily(lambda n: standard.exponential(1.0 / n))
        with pytest.raises(ValueError):
            PointNullMixture(0.5, -1.0, fam)

    def test_member_is_probability(self):
        m = lindley_mixture(0.3).member(10)
        assert total_mass(m).value == pytest.approx(1.0, abs=1e-7)
        assert [a.weight for a in m.atoms if a.location == 0.0] == [0.3]

    def test_atom_at_theta0_rejected(self):
        fam = constant_family(standard.dirac(0.0))
        mix = PointNullMixture(0.5, 0.0, fam)
        with pytest.raises(ValueError):
            mix.member(1)


class TestNullPosteriorProb:
    def test_lindley_value(self):
        assert null_posterior_prob(lindley_mixture(), LIK, 2.0, 10) == pytest.approx(LINDLEY_N10_X2, abs=1e-9)

    @pytest.mark.parametrize("n", [1, 3, 10, 100, 1000])
    @pytest.mark.parametrize("x", [0.0, 1.0, 2.5])
    def test_closed_form(self, n, x):
        got = null_posterior_prob(lindley_mixture(), LIK, x, n)
        assert got == pytest.approx(normal_mixture_null_prob(x, n), abs=1e-9)

    def test_increasing_in_n(self):
        values = [null_posterior_prob(lindley_mixture(), LIK, 2.0, n) for n in NGrid().values]
        assert all(b > a for a, b in zip(values[2:], values[3:]))
        assert values[-1] > 0.99

    def test_decreasing_in_rho(self):
        values = [null_posterior_prob(lindley_mixture(rho), LIK, 2.0, 100) for rho in (0.5, 0.1, 0.01)]
        assert values[0] > values[1] > values[2]

    @pytest.mark.parametrize("n", [1, 10, 100])
    def test_matches_posterior_atom(self, n):
        mix = lindley_mixture()
        post = posterior(mix.member(n), LIK, 1.5)
        atom = sum(a.weight for a in post.measure.atoms if a.location == 0.0)
        assert atom / total_mass(post.measure).value == pytest.approx(null_posterior_prob(mix, LIK, 1.5, n), abs=1e-9)

    @pytest.mark.parametrize("c", [0.01, 1.0, 250.0])
    def test_alternative_representation_scale(self, c):
        fam = MeasureFamily(lambda n: scale(standard.normal(0.0, float(n)), c))
        got = null_posterior_prob(PointNullMixture(0.5, 0.0, fam), LIK, 2.0, 10)
        assert got == pytest.approx(LINDLEY_N10_X2, abs=1e-9)

    def test_zero_evidence(self):
        lik = Likelihood(lambda x, t: np.where(np.abs(t - x) < 0.5, 1.0, 0.0), continuous_in_theta=False)
        fam = MeasureFamily(lambda n: standard.uniform(-1.0, 1.0))
        with pytest.raises(ZeroEvidence):
            null_posterior_prob(PointNullMixture(0.5, 0.0, fam), lik, 5.0, 1)


class TestImproper:
    def test_value(self):
        assert improper_null_prob(0.5, 0.0, standard.lebesgue(), LIK, 2.0) == pytest.approx(IMPROPER_X2, abs=1e-9)

    @pytest.mark.parametrize("x", [-3.0, 0.0, 0.7, 2.0])
    def test_closed_form(self, x):
        got = improper_null_prob(0.5, 0.0, standard.lebesgue(), LIK, x)
        assert got == pytest.approx(normal_improper_null_prob(x), abs=1e-9)

    def test_supremum(self):
        xs = np.linspace(-6, 6, 241)
        top = max(normal_improper_null_prob(float(x)) for x in xs)
        assert top == pytest.approx(IMPROPER_SUP, abs=1e-12)

    def test_depends_on_representation(self):
        a = improper_null_prob(0.5, 0.0, standard.lebesgue(), LIK, 1.0)
        b = improper_null_prob(0.5, 0.0, scale(standard.lebesgue(), 10.0), LIK, 1.0)
        assert b < a

    def test_infinite_evidence(self):
        flat = Likelihood(lambda x, t: np.ones_like(t))
        with pytest.raises(ValueError):
            improper_null_prob(0.5, 0.0, standard.lebesgue(), flat, 0.0)


class TestPriorVagueLimit:
    @pytest.mark.parametrize("rho", [0.5, 0.9])
    def test_converges_to_atom(self, rho):
        rep = prior_vague_limit(lindley_mixture(rho))
        assert isinstance(rep.verdict, ConvergesTo)
        assert rep.verdict.candidate_confirmed
        assert rep.verdict.scaling[-1][1] == pytest.approx(1.0, abs=1e-2)

    def test_fixed_alternative_fails(self):
        mix = PointNullMixture(0.5, 0.0, constant_family(standard.normal(0.0, 1.0)))
        with pytest.raises(PreconditionFailure):
            prior_vague_limit(mix)


class TestLimitRegime:
    def test_vanishing_tail(self):
        reg = limit_regime(lindley_mixture(), LIK, 2.0)
        assert reg.kind == "NullProbToOne"
        assert reg.trajectory_consistent
        assert reg.grid_limited

    def test_stable_tail(self):
        reg = limit_regime(lindley_mixture(), bump_likelihood(), 2.0)
        assert reg.kind == "NullProbToRho" and reg.rho == 0.5
        assert reg.trajectory[-1][1] == pytest.approx(0.5, abs=5e-3)

    def test_slow_tail(self):
        assert limit_regime(lindley_mixture(), heavy_tail_likelihood(), 2.0).kind == "Unclassified"

    def test_bounded_space(self):
        fam = MeasureFamily(lambda n: standard.beta(1 / n, 1 / n))
        lik = Likelihood(lambda x, t: t**x * (1 - t) ** (10 - x))
        reg = limit_regime(PointNullMixture(0.5, 0.5, fam), lik, 3, NGrid((1, 10, 100, 1000)))
        assert reg.kind == "Unclassified"

    def test_tail_shells(self):
        tail = likelihood_tail(LIK, 0.0, Continuous(Interval.real_line()), 0.0, 64.0)
        assert tail["f_theta0"] == pytest.approx(1 / math.sqrt(2 * math.pi))
        assert len(tail["shell_sup"]) == 6
        assert tail["shell_sup"][-1] < 1e-100

    def test_to_dict(self):
        d = limit_regime(lindley_mixture(), LIK, 2.0, NGrid((1, 10, 100, 1000))).to_dict()
        assert d["kind"] == "NullProbToOne" and len(d["trajectory"]) == 4


class TestDauxois:
    @pytest.mark.parametrize("K, n0", [(1, 1), (5, 3), (20, 50)])
    def test_masses(self, K, n0):
        m = dauxois_prior(K, n0)
        assert len(m.atoms) == 2 * K + 1
        assert sum(a.weight for a in m.atoms) == pytest.approx(1.0, abs=1e-12)
        pos = [a for a in m.atoms if a.location > 0]
        neg = [a for a in m.atoms if a.location < 0]
        assert sum(a.weight for a in pos) == pytest.approx(1 / 3)
        assert sum(a.weight for a in neg) == pytest.approx(1 / 3)
        assert min(a.location for a in neg) == pytest.approx(-1 / n0)

    @pytest.mark.parametrize("K, n0", [(0, 1), (1, 0)])
    def test_invalid(self, K, n0):
        with pytest.raises(ValueError):
            dauxois_prior(K, n0)
