"""Worked examples with machine-checkable expectations, run by ``priorlab run``."""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy import special, stats

from . import standard as S
from .convergence import (
    CompactSup,
    ConvergenceReport,
    ConvergesTo,
    Diverges,
    Dominated,
    Monotone,
    NGrid,
    check_density_criterion,
    check_q_vague,
    mass_escape,
    median_split,
    moment_trends,
    scaled_density_table,
)
from .errors import UnknownExample, ZeroAtOne, ZeroAtOrigin
from .families import (
    MeasureFamily,
    ig_jcp_is_proper,
    jcp_family,
    jeffreys_measure,
    location_family,
    poisson_natural,
    scale_family,
)
from .hypothesis import (
    PointNullMixture,
    improper_null_prob,
    limit_regime,
    normal_improper_null_prob,
    normal_mixture_null_prob,
    null_posterior_prob,
    prior_vague_limit,
)
from .measures import (
    Continuous,
    RadonMeasure,
    TestFunction,
    cdf,
    integrate_probe,
    pushforward,
    reciprocal_map,
    restrict,
    summary,
    total_mass,
)
from .numerics import Finite, Interval
from .posterior import (
    Likelihood,
    binomial_likelihood,
    check_narrow_convergence,
    estimator_limit,
    normal_likelihood,
    posterior,
    posterior_family,
)

SQRT_2PI = math.sqrt(2.0 * math.pi)
EXTENDED_GRID = NGrid((1, 3, 10, 31, 100, 316, 1000, 3162, 10000, 31623, 100000, 316228, 1000000))


# --- result types --------------------------------------------------------------------------


@dataclass(frozen=True)
class Check:
    """One expectation. ``basis`` says where the expected value comes from."""

    name: str
    passed: bool
    observed: Any
    expected: Any
    tolerance: float | None = None
    basis: str = "closed form"

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "passed": self.passed,
            "observed": self.observed,
            "expected": self.expected,
            "tolerance": self.tolerance,
            "basis": self.basis,
        }


@dataclass(frozen=True)
class Series:
    label: str
    xs: tuple[float, ...]
    ys: tuple[float, ...]


@dataclass(frozen=True)
class Plot:
    title: str
    x_label: str
    y_label: str
    log_x: bool
    series: tuple[Series, ...]
    log_y: bool = False


@dataclass
class ExampleResult:
    id: str
    description: str
    checks: list[Check] = field(default_factory=list)
    sections: dict[str, Any] = field(default_factory=dict)
    plots: list[Plot] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "description": self.description,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
            "sections": self.sections,
        }


@dataclass(frozen=True)
class ExampleSpec:
    id: str
    description: str
    topic: str
    run: Callable[[], ExampleResult] = field(repr=False, compare=False)

    def header(self) -> dict[str, str]:
        return {"id": self.id, "description": self.description, "topic": self.topic}


# --- helpers ---------------------------------------------------------------------------------


def close(name: str, observed: float, expected: float, tol: float, basis: str = "closed form", rel: bool = False) -> Check:
    scale = max(abs(expected), 1e-300) if rel else 1.0
    ok = math.isfinite(observed) and abs(observed - expected) <= tol * scale
    return Check(name, bool(ok), observed, expected, tol, basis)


def equals(name: str, observed: Any, expected: Any, basis: str = "limit theory") -> Check:
    return Check(name, observed == expected, observed, expected, None, basis)


def at_most(name: str, observed: float, bound: float, basis: str = "limit theory") -> Check:
    return Check(name, bool(observed <= bound), observed, f"<= {bound:g}", None, basis)


def ratio_plot(report: ConvergenceReport, title: str) -> Plot:
    ns = tuple(float(n) for n in report.grid.values)
    series = tuple(Series(t.probe.label, ns, t.ratios) for t in report.per_probe)
    return Plot(title, "n", "Pi_n(h) / Pi_n(h0)", True, series, log_y=True)


def scaled_density_plot(fam: MeasureFamily, theta: np.ndarray, ns: Sequence[int], title: str) -> Plot:
    table = scaled_density_table(fam, NGrid(tuple(ns)), theta)
    series = tuple(Series(f"n={n}", tuple(theta.tolist()), tuple(row.tolist())) for n, row in zip(ns, table))
    return Plot(title, "theta", "a_n pi_n(theta)", False, series)


def _verdict_name(report: ConvergenceReport) -> str:
    return report.verdict.name


def _confirmed(report: ConvergenceReport) -> bool:
    return isinstance(report.verdict, ConvergesTo) and bool(report.verdict.candidate_confirmed)


def _scaling_at(report: ConvergenceReport, n: int) -> float:
    assert isinstance(report.verdict, ConvergesTo)
    return dict(report.verdict.scaling)[n]


def _max_tail_drift(report: ConvergenceReport) -> float:
    return max(t.drift for t in report.per_probe)


def hats(centers: Sequence[float], width: float | Callable[[float], float]) -> list[TestFunction]:
    return [TestFunction.hat(c, width(c) if callable(width) else width) for c in centers]


# --- families shared by several examples ----------------------------------------------------


def normal_scale_family() -> MeasureFamily:
    return MeasureFamily(lambda n: S.normal(0.0, float(n)), lambda n: SQRT_2PI * n, "N(0,n^2)")


def gamma_family(shape: Callable[[int], float], rate: Callable[[int], float], label: str) -> MeasureFamily:
    def hint(n: int) -> float:
        a, b = shape(n), rate(n)
        return math.exp(special.gammaln(a) - a * math.log(b))

    return MeasureFamily(lambda n: S.gamma(shape(n), rate(n)), hint, label)


def beta_family(closed: bool = False) -> MeasureFamily:
    def hint(n: int) -> float:
        return math.exp(special.betaln(1.0 / n, 1.0 / n))

    label = "Beta(1/n,1/n)" + ("[0,1]" if closed else "")
    return MeasureFamily(lambda n: S.beta(1.0 / n, 1.0 / n, closed), hint, label)


GAMMA_ROWS: tuple[tuple[str, Callable[[float], float], Callable[[float], float], Callable[[float], float]], ...] = (
    ("Gamma(1/n,1/n)", lambda n: 1.0 / n, lambda n: 1.0, lambda n: n),
    ("Gamma(1/n,n^-1/2)", lambda n: n**-0.5, lambda n: n**-0.5, lambda n: 1.0),
    ("Gamma(1/n,n^-1/3)", lambda n: n ** (-1.0 / 3.0), lambda n: n ** (-2.0 / 3.0), lambda n: n ** (-1.0 / 3.0)),
    ("Gamma(1/n,n^-2)", lambda n: n**-2.0, lambda n: n, lambda n: n**3),
    ("Gamma(1/n,n^-2/3)", lambda n: n ** (-2.0 / 3.0), lambda n: n ** (-1.0 / 3.0), lambda n: n ** (1.0 / 3.0)),
)
"""Rows (label, rate(n), mean(n), variance(n)) for shape 1/n; mean = shape/rate, variance = shape/rate^2."""


GAMMA_PROBES = hats((0.25, 0.5, 1.0, 1.5, 2.0), lambda c: min(c, 1.0) / 2.0)


# --- examples ---------------------------------------------------------------------------------


def ex_normal_lebesgue() -> ExampleResult:
    res = ExampleResult("normal-lebesgue", "N(0, n^2) converges q-vaguely to Lebesgue measure with a_n = sqrt(2 pi) n")
    fam = normal_scale_family()
    rep = check_q_vague(fam, S.lebesgue())
    res.checks.append(equals("verdict", _verdict_name(rep), "ConvergesTo"))
    res.checks.append(equals("candidate confirmed", _confirmed(rep), True))
    for n in (1000, 10000):
        a = _scaling_at(rep, n) if isinstance(rep.verdict, ConvergesTo) else math.nan
        res.checks.append(close(f"a_n / (sqrt(2 pi) n) at n={n}", a / (SQRT_2PI * n), 1.0, 1e-2, rel=True))
    crit = check_density_criterion(fam, S.lebesgue(), Monotone(), theta_grid=np.linspace(-20.0, 20.0, 81))
    res.checks.append(equals("a_n pi_n nondecreasing with limit 1", crit.holds, True))
    esc = mass_escape(fam, Interval.closed(-10.0, 10.0))
    exact = 2.0 * stats.norm.cdf(1e-3) - 1.0
    res.checks.append(close("Pi_n([-10,10]) at n=10^4", esc.values[-1], exact, 1e-6, "normal cdf"))
    res.checks.append(equals("mass escapes every compact", esc.verdict, "EscapesToZero"))
    res.sections = {"q_vague": rep.to_dict(), "criterion": crit.to_dict(), "mass_escape": esc.to_dict()}
    res.plots = [
        ratio_plot(rep, "probe ratios for N(0,n^2)"),
        scaled_density_plot(fam, np.linspace(-20.0, 20.0, 161), (1, 3, 10, 100), "a_n pi_n for N(0,n^2)"),
    ]
    return res


def ex_uniform_lebesgue() -> ExampleResult:
    res = ExampleResult("uniform-lebesgue", "U([-n, n]) converges q-vaguely to Lebesgue measure with a_n = 2n")
    fam = MeasureFamily(lambda n: S.uniform(-float(n), float(n)), lambda n: 2.0 * n, "U([-n,n])")
    rep = check_q_vague(fam, S.lebesgue())
    res.checks.append(equals("verdict", _verdict_name(rep), "ConvergesTo"))
    res.checks.append(equals("candidate confirmed", _confirmed(rep), True))
    if isinstance(rep.verdict, ConvergesTo):
        res.checks.append(close("a_n / 2n at n=10^4", _scaling_at(rep, 10000) / 20000.0, 1.0, 1e-2, rel=True))
    crit = check_density_criterion(fam, S.lebesgue(), Monotone(), theta_grid=np.linspace(-20.5, 20.5, 83))
    res.checks.append(equals("a_n pi_n nondecreasing with limit 1", crit.holds, True))
    res.sections = {"q_vague": rep.to_dict(), "criterion": crit.to_dict()}
    res.plots = [ratio_plot(rep, "probe ratios for U([-n,n])")]
    return res


def gamma_table(ns: Sequence[int] = (10, 100)) -> list[dict[str, Any]]:
    """Closed-form and quadrature mean and variance of each Gamma row."""
    rows = []
    for label, rate, mean, var in GAMMA_ROWS:
        for n in ns:
            shape = 1.0 / n
            s = summary(S.gamma(shape, rate(n)))
            rows.append(
                {
                    "family": label,
                    "n": n,
                    "mean_closed": shape / rate(n),
                    "var_closed": shape / rate(n) ** 2,
                    "mean_table": mean(n),
                    "var_table": var(n),
                    "mean_quadrature": s.mean,
                    "var_quadrature": s.variance,
                }
            )
    return rows


def ex_gamma_haar() -> ExampleResult:
    res = ExampleResult("gamma-haar", "Gamma(1/n, b_n) families converge q-vaguely to d theta / theta with different moment behavior")
    fam = gamma_family(lambda n: 1.0 / n, lambda n: 1.0 / n, "Gamma(1/n,1/n)")
    rep = check_q_vague(fam, S.haar_scale(), GAMMA_PROBES, reference=GAMMA_PROBES[2])
    res.checks.append(equals("verdict", _verdict_name(rep), "ConvergesTo"))
    res.checks.append(equals("candidate confirmed", _confirmed(rep), True))
    rows = gamma_table()
    for r in rows:
        tag = f"{r['family']} n={r['n']}"
        res.checks.append(close(f"{tag} mean closed form", r["mean_closed"], r["mean_table"], 1e-12, rel=True))
        res.checks.append(close(f"{tag} variance closed form", r["var_closed"], r["var_table"], 1e-12, rel=True))
        res.checks.append(close(f"{tag} mean by quadrature", r["mean_quadrature"], r["mean_closed"], 1e-6, "quadrature", rel=True))
        res.checks.append(close(f"{tag} variance by quadrature", r["var_quadrature"], r["var_closed"], 1e-6, "quadrature", rel=True))
    mt = moment_trends(fam)
    res.checks.append(equals("Gamma(1/n,1/n) mean trend", (mt.mean_trend.kind, round(mt.mean_trend.value or 0.0, 6)), ("ToValue", 1.0)))
    res.checks.append(equals("Gamma(1/n,1/n) variance trend", mt.var_trend.kind, "ToPlusInf"))
    res.sections = {"q_vague": rep.to_dict(), "moment_table": rows, "moments": mt.to_dict()}
    res.plots = [ratio_plot(rep, "probe ratios for Gamma(1/n,1/n)")]
    return res


def ex_gamma_exp_limit() -> ExampleResult:
    res = ExampleResult("gamma-exp-limit", "Gamma(1/n, 1) converges q-vaguely to exp(-theta)/theta, dominated by a continuous bound")
    fam = gamma_family(lambda n: 1.0 / n, lambda n: 1.0, "Gamma(1/n,1)")
    limit = S.gamma_kernel(0.0, 1.0)
    rep = check_q_vague(fam, limit, GAMMA_PROBES, reference=GAMMA_PROBES[2])
    res.checks.append(equals("verdict", _verdict_name(rep), "ConvergesTo"))
    res.checks.append(equals("candidate confirmed", _confirmed(rep), True))
    if isinstance(rep.verdict, ConvergesTo):
        res.checks.append(close("a_n / n at n=10^4", _scaling_at(rep, 10000) / 1e4, 1.0, 1e-2, rel=True))
    theta = np.geomspace(1e-3, 50.0, 61)
    crit = check_density_criterion(
        fam, limit, Dominated(lambda t: np.where(t <= 1.0, 1.0 / t, 1.0)), theta_grid=theta
    )
    res.checks.append(equals("dominated by 1/theta on (0,1] and 1 beyond", crit.holds, True))
    mt = moment_trends(fam)
    res.checks.append(equals("mean trend", mt.mean_trend.kind, "ToValue"))
    res.checks.append(close("mean limit", mt.mean_trend.value if mt.mean_trend.value is not None else math.nan, 0.0, 1e-3))
    res.checks.append(equals("variance trend", mt.var_trend.kind, "ToValue"))
    res.checks.append(close("variance limit", mt.var_trend.value if mt.var_trend.value is not None else math.nan, 0.0, 1e-3))
    res.sections = {"q_vague": rep.to_dict(), "criterion": crit.to_dict(), "moments": mt.to_dict()}
    res.plots = [
        ratio_plot(rep, "probe ratios for Gamma(1/n,1)"),
        scaled_density_plot(fam, np.linspace(0.05, 5.0, 100), (1, 3, 10, 100), "a_n pi_n for Gamma(1/n,1)"),
    ]
    return res


def ex_gamma_reparam_ig() -> ExampleResult:
    res = ExampleResult("gamma-reparam-ig", "Gamma(1/n,1/n) and its reciprocal image both converge to the scale-invariant measure")
    fam = gamma_family(lambda n: 1.0 / n, lambda n: 1.0 / n, "Gamma(1/n,1/n)")
    inv = MeasureFamily(lambda n: pushforward(fam.member(n), reciprocal_map()), None, "1/theta under Gamma(1/n,1/n)")
    limit = S.haar_scale()
    direct = check_q_vague(fam, limit, GAMMA_PROBES, reference=GAMMA_PROBES[2])
    image = check_q_vague(inv, pushforward(limit, reciprocal_map()), GAMMA_PROBES, reference=GAMMA_PROBES[2])
    res.checks.append(equals("direct confirmed", _confirmed(direct), True))
    res.checks.append(equals("reciprocal image confirmed against 1/eta", _confirmed(image), True))
    res.checks.append(equals("same verdicts", _verdict_name(direct) == _verdict_name(image), True))
    res.checks.append(at_most("max probe drift (direct)", _max_tail_drift(direct), 1e-2))
    res.checks.append(at_most("max probe drift (image)", _max_tail_drift(image), 1e-2))
    res.sections = {"direct": direct.to_dict(), "reciprocal": image.to_dict()}
    res.plots = [ratio_plot(direct, "Gamma(1/n,1/n)"), ratio_plot(image, "reciprocal image")]
    return res


def ex_poisson_diverges() -> ExampleResult:
    res = ExampleResult("poisson-diverges", "Poisson(n) has no q-vague limit: probe ratios grow like n^(theta - theta0)")
    fam = MeasureFamily(lambda n: S.poisson(float(n)), None, "Poisson(n)")
    rep = check_q_vague(fam)
    res.checks.append(equals("verdict", _verdict_name(rep), "Diverges"))
    ns = list(rep.grid.values)
    ratio = rep.trace("hat@3").ratios[ns.index(100)]
    expected = math.factorial(1) / math.factorial(3) * 100.0**2
    res.checks.append(close("Pi_n(3) / Pi_n(1) at n=100", ratio, expected, 1e-6, rel=True))
    if isinstance(rep.verdict, Diverges):
        res.sections["witness"] = {"probe": rep.verdict.probe, "reference": rep.verdict.reference}
    res.sections["q_vague"] = rep.to_dict()
    res.plots = [ratio_plot(rep, "probe ratios for Poisson(n)")]
    return res


DRIFT_PROBES = hats((-1.0, -0.5, 0.0, 0.5, 1.0), 1.0)


def drift_family(var: Callable[[int], float], label: str) -> MeasureFamily:
    return MeasureFamily(lambda n: S.normal(float(n), math.sqrt(var(n))), None, label)


def ex_normal_drift() -> ExampleResult:
    res = ExampleResult("normal-drift-trichotomy", "N(n, s_n^2) diverges, tends to exp(c theta) or to Lebesgue as n / s_n^2 tends to infinity, c or 0")
    cases = (
        ("s_n^2 = sqrt(n)", lambda n: math.sqrt(n), None, "Diverges"),
        ("s_n^2 = n", lambda n: float(n), S.exp_tilt(1.0), "ConvergesTo"),
        ("s_n^2 = n^2", lambda n: float(n) ** 2, S.lebesgue(), "ConvergesTo"),
    )
    for label, var, cand, verdict in cases:
        rep = check_q_vague(drift_family(var, f"N(n,{label})"), cand, DRIFT_PROBES, reference=DRIFT_PROBES[2])
        res.checks.append(equals(f"{label} verdict", _verdict_name(rep), verdict))
        if cand is not None:
            res.checks.append(equals(f"{label} candidate confirmed", _confirmed(rep), True))
        if label == "s_n^2 = n":
            ratio = rep.trace("hat@1").ratios[-1]
            res.checks.append(close("density ratio between probes at 0 and 1", ratio, math.e, 2e-2, rel=True))
        res.sections[label] = rep.to_dict()
        res.plots.append(ratio_plot(rep, f"N(n, {label})"))
    return res


def ex_beta_haldane_open() -> ExampleResult:
    res = ExampleResult("beta-haldane-open", "Beta(1/n,1/n) on (0,1) converges q-vaguely to the Haldane measure; median 1/2 splits the mass")
    fam = beta_family()
    rep = check_q_vague(fam, S.haldane())
    res.checks.append(equals("verdict", _verdict_name(rep), "ConvergesTo"))
    res.checks.append(equals("candidate confirmed", _confirmed(rep), True))
    crit = check_density_criterion(fam, S.haldane(), Monotone(), theta_grid=np.linspace(0.01, 0.99, 99))
    res.checks.append(equals("a_n pi_n increases to the Haldane density", crit.holds, True))
    split = median_split(fam, 0.9)
    res.checks.append(close("Pi_n((0, 0.9)) at n=10^4", split.values[-1], 0.5, 2e-2))
    res.checks.append(equals("median split verdict", split.verdict, "HalfSplit"))
    mt = moment_trends(fam)
    res.checks.append(equals("mean trend", mt.mean_trend.kind, "ToValue"))
    res.checks.append(close("mean limit", mt.mean_trend.value if mt.mean_trend.value is not None else math.nan, 0.5, 1e-3))
    res.checks.append(equals("variance trend", mt.var_trend.kind, "ToValue"))
    res.checks.append(close("variance limit alpha(1-alpha)(b-a)^2", mt.var_trend.value if mt.var_trend.value is not None else math.nan, 0.25, 1e-3))
    for n, v in zip(mt.grid, mt.variances):
        if n in (10, 100, 1000):
            res.checks.append(close(f"variance at n={n} vs 1/(4(2/n+1))", v if v is not None else math.nan, 1.0 / (4.0 * (2.0 / n + 1.0)), 1e-6, "quadrature", rel=True))
    res.sections = {"q_vague": rep.to_dict(), "criterion": crit.to_dict(), "median_split": split.to_dict(), "moments": mt.to_dict()}
    res.plots = [
        ratio_plot(rep, "probe ratios for Beta(1/n,1/n)"),
        scaled_density_plot(fam, np.linspace(0.02, 0.98, 97), (1, 3, 10, 100), "a_n pi_n for Beta(1/n,1/n)"),
    ]
    return res


def two_point_limit() -> RadonMeasure:
    return RadonMeasure(Continuous(Interval.closed(0.0, 1.0)), atoms=((0.0, 0.5), (1.0, 0.5)), mass_hint=Finite(1.0), label="(delta0+delta1)/2")


def ex_beta_closed_atoms() -> ExampleResult:
    res = ExampleResult("beta-closed-atoms", "Beta(1/n,1/n) on [0,1] converges narrowly to (delta0 + delta1)/2")
    fam = beta_family(closed=True)
    rep = check_narrow_convergence(fam, two_point_limit(), t_grid=(0.1, 0.5, 0.9))
    res.checks.append(equals("verdict", rep.verdict, "Narrow"))
    last = fam.member(rep.grid[-1])
    for t in (0.1, 0.5, 0.9):
        res.checks.append(close(f"F_n({t}) at n=10^4", cdf(last, t), 0.5, 2e-2))
    zero = posterior_family(fam, binomial_likelihood(10), 0)
    dirac0 = S.dirac(0.0, iv=Interval.closed(0.0, 1.0))
    post_rep = check_narrow_convergence(zero, dirac0, t_grid=(0.05, 0.5))
    res.checks.append(equals("posterior given x=0 narrows to delta0", post_rep.verdict, "Narrow"))
    res.sections = {"prior": rep.to_dict(), "posterior_x0": post_rep.to_dict()}
    res.plots = [ratio_plot(rep.q_vague, "probe ratios for Beta(1/n,1/n) on [0,1]")]
    return res


def ex_beta_posterior_estimators() -> ExampleResult:
    res = ExampleResult("beta-posterior-estimators", "Posterior means (1 + n x)/(2 + n N) under Beta(1/n,1/n) priors with N = 10 trials")
    trials = 10
    fam = beta_family()
    lik = binomial_likelihood(trials)
    table = []
    xs_plot = []
    for x, limit in ((0, 0.0), (3, 0.3), (trials, 1.0)):
        ref = 1.0 / trials if x == 0 else None
        est = estimator_limit(posterior_family(fam, lik, x), reference_mean=ref)
        exact = [(1.0 + n * x) / (2.0 + n * trials) for n in est.grid]
        for n, m, e in zip(est.grid, est.means, exact):
            table.append({"x": x, "n": n, "mean_quadrature": m, "mean_closed": e})
        worst = max(abs((m if m is not None else math.nan) - e) / e for m, e in zip(est.means, exact))
        res.checks.append(at_most(f"x={x} max relative error of posterior means", worst, 1e-6, "closed form"))
        res.checks.append(equals(f"x={x} trend", est.trend.kind, "ToValue"))
        res.checks.append(close(f"x={x} limit", est.trend.value if est.trend.value is not None else math.nan, limit, 1e-3))
        if x == 0:
            raw = summary(posterior(S.haldane(), lik, 0).measure).mean
            res.checks.append(close("raw mean of the improper limit posterior", raw if raw is not None else math.nan, 0.1, 1e-6))
            res.checks.append(close("gap between the estimator limit and that raw mean", est.reference_gap if est.reference_gap is not None else math.nan, 0.1, 1e-6))
        res.sections[f"x={x}"] = est.to_dict()
        xs_plot.append(Series(f"x={x}", tuple(float(n) for n in est.grid), tuple(float(m) for m in est.means if m is not None)))
    narrow = check_narrow_convergence(posterior_family(fam, lik, 3), S.beta(3.0, 7.0))
    res.checks.append(equals("x=3 posteriors narrow to Beta(3,7)", narrow.verdict, "Narrow"))
    res.sections["table"] = table
    res.sections["narrow_x3"] = narrow.to_dict()
    res.plots = [Plot("posterior means", "n", "E_n(theta | x)", True, tuple(xs_plot))]
    return res


JCP_PROBES = hats((-3.0, -1.5, 0.0, 1.5, 3.0), 1.0)


def poisson_jcp_family() -> MeasureFamily:
    return jcp_family(poisson_natural(), lambda n: 1.0 / n, lambda n: 1.0 / n, alpha_source="1/n", beta_source="1/n")


def ex_jcp_poisson() -> ExampleResult:
    res = ExampleResult("jcp-poisson", "Jeffreys conjugate priors for the Poisson natural parameter converge to exp(theta/2) d theta")
    fam = poisson_jcp_family()
    jeff = jeffreys_measure(poisson_natural())
    crit = check_density_criterion(
        fam, jeff, CompactSup(((-5.0, 5.0), (-10.0, 10.0))), EXTENDED_GRID, theta_grid=np.linspace(-10.0, 10.0, 201)
    )
    res.checks.append(equals("sup of a_n pi_n bounded on compacts", crit.holds, True))
    rep = check_q_vague(fam, jeff, JCP_PROBES, EXTENDED_GRID, reference=JCP_PROBES[2])
    res.checks.append(equals("verdict", _verdict_name(rep), "ConvergesTo"))
    res.checks.append(equals("candidate confirmed", _confirmed(rep), True))
    res.sections = {"criterion": crit.to_dict(), "q_vague": rep.to_dict()}
    res.plots = [ratio_plot(rep, "probe ratios for the Poisson JCP")]
    return res


def ig_boundary_sweep(count: int = 10_000, seed: int = 20240101) -> tuple[int, int]:
    """Points placed just inside or just outside one face of the properness region.

    The label of each point comes from the side it was placed on, not from
    the region formula. Returns (points checked, misclassifications).
    """
    rng = np.random.default_rng(seed)
    bad = 0
    for i in range(count):
        a1, a2 = rng.uniform(0.01, 10.0, size=2)
        eps = 10.0 ** rng.uniform(-9.0, -3.0)
        inside = bool(rng.random() < 0.5)
        face = i % 4
        if face == 0:
            b = math.sqrt(a1 * a2) + (-eps if inside else eps)
        elif face == 1:
            b = -0.5 if inside else -0.5 - eps
        else:
            b = rng.uniform(-0.5, 0.0)
            edge = eps if inside else -eps
            a1, a2 = (edge, a2) if face == 2 else (a1, edge)
        if ig_jcp_is_proper(float(a1), float(a2), float(b)) != inside:
            bad += 1
    return count, bad


def ex_ig_jcp_region() -> ExampleResult:
    res = ExampleResult("ig-jcp-region", "Properness region of the inverse-Gaussian JCP: a1 > 0, a2 > 0, -1/2 <= b < sqrt(a1 a2)")
    count, bad = ig_boundary_sweep()
    res.checks.append(equals("misclassified boundary points", bad, 0, "closed form"))
    spots = [((1.0, 1.0, 0.0), True), ((1.0, 1.0, 1.0), False), ((1.0, 4.0, -0.5), True), ((1.0, 1.0, -0.51), False), ((0.0, 1.0, 0.0), False)]
    for (a1, a2, b), truth in spots:
        res.checks.append(equals(f"proper({a1:g},{a2:g},{b:g})", ig_jcp_is_proper(a1, a2, b), truth, "closed form"))
    res.sections = {"sweep": {"points": count, "misclassified": bad}}
    return res


def lindley_mixture(rho: float = 0.5) -> PointNullMixture:
    return PointNullMixture(rho, 0.0, normal_scale_family())


def ex_lindley_normal() -> ExampleResult:
    res = ExampleResult("lindley-normal", "Null posterior probability under N(0,n^2) alternatives tends to 1, unlike the improper-prior answer")
    lik = normal_likelihood(1.0)
    for x in (0.0, 1.0, 2.0):
        p = improper_null_prob(0.5, 0.0, S.lebesgue(), lik, x)
        res.checks.append(close(f"improper-prior null probability at x={x:g}", p, normal_improper_null_prob(x), 1e-9))
    xs = np.linspace(-6.0, 6.0, 241)
    top = max(normal_improper_null_prob(float(x)) for x in xs)
    res.checks.append(close("largest improper-prior null probability over x", top, 1.0 / (1.0 + SQRT_2PI), 1e-12))
    mix = lindley_mixture()
    grid = NGrid()
    traj = [null_posterior_prob(mix, lik, 2.0, n) for n in grid.values]
    res.checks.append(close("null probability at n=10, x=2", null_posterior_prob(mix, lik, 2.0, 10), 0.5811, 1e-3))
    for n, p in zip(grid.values, traj):
        res.checks.append(close(f"null probability at n={n} vs closed form", p, normal_mixture_null_prob(2.0, n), 1e-9))
    res.checks.append(Check("exceeds 0.99 by n=1000", traj[grid.values.index(1000)] > 0.99, traj[grid.values.index(1000)], "> 0.99", None, "limit theory"))
    res.checks.append(equals("increasing in n", all(b > a for a, b in zip(traj, traj[1:])), True))
    atom = posterior(mix.member(10), lik, 2.0).measure.atoms
    atom_mass = next(a.weight for a in atom if a.location == 0.0)
    res.checks.append(close("matches the posterior atom at theta0", atom_mass, traj[grid.values.index(10)], 1e-9, "invariant"))
    rep = prior_vague_limit(mix)
    res.checks.append(equals("mixture converges vaguely", _verdict_name(rep), "ConvergesTo"))
    res.checks.append(equals("limit rho delta0 confirmed", _confirmed(rep), True))
    h0 = rep.reference
    for rho in (0.5, 0.9):
        m = lindley_mixture(rho)
        mass = integrate_probe(m.member(10000), h0)
        res.checks.append(close(f"probe mass at theta0 for rho={rho}", mass, rho * h0(0.0), 1e-3))
    regime = limit_regime(mix, lik, 2.0)
    res.checks.append(equals("regime", regime.kind, "NullProbToOne"))
    res.sections = {"trajectory": [[n, p] for n, p in zip(grid.values, traj)], "prior_limit": rep.to_dict(), "regime": regime.to_dict()}
    res.plots = [
        Plot("null posterior probability at x=2", "n", "Pi_n(theta=0 | x)", True, (Series("x=2", tuple(float(n) for n in grid.values), tuple(traj)),)),
        ratio_plot(rep, "probe ratios for the point-null mixture"),
    ]
    return res


def bump_likelihood(level: float = 0.2, height: float = 0.3) -> Likelihood:
    """f(x|theta) = level + height * hat(theta - x): constant away from a compact set."""

    def f(x: float, t: np.ndarray) -> np.ndarray:
        return level + height * np.maximum(0.0, 1.0 - np.abs(t - x))

    return Likelihood(f, continuous_in_theta=True, vanishes_at_infinity=False, landmarks=lambda x: (x - 1.0, x, x + 1.0), name="flat+bump")


def heavy_tail_likelihood() -> Likelihood:
    def f(x: float, t: np.ndarray) -> np.ndarray:
        return 1.0 / (1.0 + np.abs(t - x) ** 0.1)

    return Likelihood(f, continuous_in_theta=True, vanishes_at_infinity=False, name="slow decay")


def ex_lindley_stable_tail() -> ExampleResult:
    res = ExampleResult("lindley-stable-tail", "When f(x|theta) tends to f(x|theta0) away from compacts, the null probability tends to rho")
    mix = lindley_mixture()
    regime = limit_regime(mix, bump_likelihood(), 2.0)
    res.checks.append(equals("regime", regime.kind, "NullProbToRho"))
    res.checks.append(close("null probability at the largest n", regime.trajectory[-1][1], 0.5, 5e-3))
    heavy = limit_regime(mix, heavy_tail_likelihood(), 2.0)
    res.checks.append(equals("slowly decaying likelihood", heavy.kind, "Unclassified"))
    res.sections = {"stable_tail": regime.to_dict(), "slow_decay": heavy.to_dict()}
    res.plots = [
        Plot(
            "null posterior probability",
            "n",
            "Pi_n(theta=0 | x)",
            True,
            (Series("flat+bump", tuple(float(n) for n, _ in regime.trajectory), tuple(p for _, p in regime.trajectory)),),
        )
    ]
    return res


def ex_location_construction() -> ExampleResult:
    res = ExampleResult("location-construction", "Location families (1/n) pi(theta/n) converge q-vaguely to Lebesgue measure")
    for base in (S.normal(), S.cauchy(), S.uniform(-1.0, 1.0)):
        rep = check_q_vague(location_family(base), S.lebesgue())
        res.checks.append(equals(f"{base.label} confirmed", _confirmed(rep), True))
        res.sections[base.label] = rep.to_dict()
        if base.label.startswith("N"):
            res.plots.append(ratio_plot(rep, f"location family of {base.label}"))
    try:
        location_family(S.uniform(1.0, 2.0))
        raised = "none"
    except ZeroAtOrigin:
        raised = "ZeroAtOrigin"
    res.checks.append(equals("base vanishing at 0 rejected", raised, "ZeroAtOrigin", "precondition"))
    return res


def ex_scale_construction() -> ExampleResult:
    res = ExampleResult("scale-construction", "Scale families built from LN(0,1) converge q-vaguely to d theta / theta")
    fam = scale_family(S.lognormal())
    rep = check_q_vague(fam, S.haar_scale())
    res.checks.append(equals("verdict", _verdict_name(rep), "ConvergesTo"))
    res.checks.append(equals("candidate confirmed", _confirmed(rep), True))
    split = median_split(fam, 10.0, NGrid((1, 3, 10, 31, 100)))
    res.checks.append(close("Pi_n((0, 10)) at n=100", split.values[-1], 0.5, 2e-2))
    shifted = RadonMeasure(
        Continuous(Interval.positive()),
        log_density=lambda t: np.where(t > 2.0, -(t - 2.0), -np.inf),
        label="Exp(1)+2",
    )
    try:
        scale_family(shifted)
        raised = "none"
    except ZeroAtOne:
        raised = "ZeroAtOne"
    res.checks.append(equals("base vanishing at 1 rejected", raised, "ZeroAtOne", "precondition"))
    res.sections = {"q_vague": rep.to_dict(), "median_split": split.to_dict()}
    res.plots = [ratio_plot(rep, "scale family of LN(0,1)")]
    return res


def ex_restriction() -> ExampleResult:
    res = ExampleResult("restriction-approximation", "Restrictions of an improper measure to growing compacts approximate it q-vaguely")
    leb = S.lebesgue()
    for n in (1, 10, 1000):
        mass = total_mass(restrict(leb, Interval.closed(-float(n), float(n))))
        res.checks.append(close(f"Lebesgue mass of [-{n},{n}]", mass.value if isinstance(mass, Finite) else math.nan, 2.0 * n, 1e-9, rel=True))
    fam = MeasureFamily(lambda n: restrict(leb, Interval.closed(-float(n), float(n))), lambda n: 1.0, "Lebesgue on [-n,n]")
    rep = check_q_vague(fam, leb)
    res.checks.append(equals("Lebesgue restrictions confirmed", _confirmed(rep), True))
    haar = S.haar_scale()
    hfam = MeasureFamily(lambda n: restrict(haar, Interval.closed(1.0 / (n + 1), n + 1.0)), lambda n: 1.0, "1/theta on [1/(n+1), n+1]")
    hrep = check_q_vague(hfam, haar)
    res.checks.append(equals("scale-invariant restrictions confirmed", _confirmed(hrep), True))
    res.sections = {"lebesgue": rep.to_dict(), "haar": hrep.to_dict()}
    res.plots = [ratio_plot(rep, "Lebesgue restricted to [-n,n]"), ratio_plot(hrep, "1/theta restricted")]
    return res


CATALOG: tuple[ExampleSpec, ...] = (
    ExampleSpec("normal-lebesgue", "N(0,n^2) -> Lebesgue with a_n = sqrt(2 pi) n", "normal scale family", ex_normal_lebesgue),
    ExampleSpec("uniform-lebesgue", "U([-n,n]) -> Lebesgue with a_n = 2n", "uniform family", ex_uniform_lebesgue),
    ExampleSpec("gamma-haar", "Gamma(1/n,b_n) -> d theta/theta, five moment regimes", "gamma families", ex_gamma_haar),
    ExampleSpec("gamma-exp-limit", "Gamma(1/n,1) -> exp(-theta)/theta via a dominating bound", "gamma families", ex_gamma_exp_limit),
    ExampleSpec("gamma-reparam-ig", "Gamma(1/n,1/n) and its reciprocal image share the scale-invariant limit", "reparameterization", ex_gamma_reparam_ig),
    ExampleSpec("poisson-diverges", "Poisson(n) has no q-vague limit", "Poisson family", ex_poisson_diverges),
    ExampleSpec("normal-drift-trichotomy", "N(n,s_n^2): diverges, exp(c theta) or Lebesgue", "normal drift", ex_normal_drift),
    ExampleSpec("beta-haldane-open", "Beta(1/n,1/n) on (0,1) -> Haldane, median split and moments", "beta on the open interval", ex_beta_haldane_open),
    ExampleSpec("beta-closed-atoms", "Beta(1/n,1/n) on [0,1] -> (delta0+delta1)/2 narrowly", "beta on the closed interval", ex_beta_closed_atoms),
    ExampleSpec("beta-posterior-estimators", "Posterior means (1+nx)/(2+nN) and their limits 0, x/N, 1", "beta-binomial estimators", ex_beta_posterior_estimators),
    ExampleSpec("jcp-poisson", "Poisson JCP -> Jeffreys measure exp(theta/2) d theta", "Jeffreys conjugate priors", ex_jcp_poisson),
    ExampleSpec("ig-jcp-region", "Inverse-Gaussian JCP properness region on a boundary sweep", "Jeffreys conjugate priors", ex_ig_jcp_region),
    ExampleSpec("lindley-normal", "Point-null mixture with N(0,n^2) alternatives: null probability -> 1", "point-null testing", ex_lindley_normal),
    ExampleSpec("lindley-stable-tail", "Likelihood tending to f(x|theta0): null probability -> rho", "point-null testing", ex_lindley_stable_tail),
    ExampleSpec("location-construction", "Location families -> Lebesgue", "constructions", ex_location_construction),
    ExampleSpec("scale-construction", "Scale families -> d theta/theta", "constructions", ex_scale_construction),
    ExampleSpec("restriction-approximation", "Restrictions to growing compacts approximate an improper measure", "constructions", ex_restriction),
)


def list_examples(filter_text: str | None = None) -> list[ExampleSpec]:
    """Catalog entries in fixed order, optionally those whose id contains ``filter_text``."""
    if not filter_text:
        return list(CATALOG)
    return [e for e in CATALOG if filter_text in e.id]


def get_example(example_id: str) -> ExampleSpec:
    for e in CATALOG:
        if e.id == example_id:
            return e
    raise UnknownExample(f"no example named {example_id!r}")


def run_example(example_id: str) -> ExampleResult:
    """Run one example.

    Raises:
        UnknownExample: The id is not in the catalog.
    """
    spec = get_example(example_id)
    result = spec.run()
    result.id = spec.id
    return result
