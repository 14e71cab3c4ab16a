"""Bayes updating with proper or improper priors, and limits of posterior sequences."""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy import special

from .convergence import (
    ConvergenceReport,
    ConvergesTo,
    NGrid,
    Trend,
    check_q_vague,
    classify_trend,
    default_probes,
)
from .errors import MeasureError, NotTight, ZeroEvidence, ZeroResult
from .families import MeasureFamily
from .measures import (
    Continuous,
    Discrete,
    ParameterSpace,
    RadonMeasure,
    TestFunction,
    log_integrate_probe,
    mass_on,
    normalizing_constant,
    replace_hint,
    sample_grid,
    scale,
    summary,
    total_mass,
    weight_by,
)
from .numerics import Finite, Interval, MassClass, Zero

LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
JUMP_TOL = 1e-6
VANISH_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class Likelihood:
    """f(x | theta) as a function of theta for an opaque observation x.

    The two flags are caller assertions; ``check_flags`` spot-checks them.
    """

    eval: Callable[[Any, np.ndarray], np.ndarray]
    continuous_in_theta: bool = True
    vanishes_at_infinity: bool = False
    log_eval: Callable[[Any, np.ndarray], np.ndarray] | None = None
    landmarks: Callable[[Any], Sequence[float]] | None = None
    name: str = ""
    source: dict[str, Any] | None = field(default=None, repr=False)

    def at(self, x: Any) -> Callable[[np.ndarray], np.ndarray]:
        def f(theta: np.ndarray) -> np.ndarray:
            return np.asarray(self.eval(x, np.asarray(theta, dtype=float)), dtype=float)

        return f

    def log_at(self, x: Any) -> Callable[[np.ndarray], np.ndarray] | None:
        if self.log_eval is None:
            return None
        log_eval = self.log_eval

        def g(theta: np.ndarray) -> np.ndarray:
            return np.asarray(log_eval(x, np.asarray(theta, dtype=float)), dtype=float)

        return g

    def check_flags(self, x: Any, space: ParameterSpace) -> dict[str, bool]:
        """Spot-check both flags on a grid of the space.

        Continuity: no jump above 1e-6 between points 1e-9 apart around each
        grid node. Vanishing: values at the outer grid nodes are at most 1e-8.
        """
        f = self.at(x)
        grid = sample_grid(space, 257)
        out = {}
        if isinstance(space, Continuous):
            eps = 1e-9 * np.maximum(1.0, np.abs(grid))
            with np.errstate(all="ignore"):
                jumps = np.abs(f(grid + eps) - f(grid - eps))
            out["continuous_in_theta"] = bool(np.all(jumps[np.isfinite(jumps)] <= JUMP_TOL))
        else:
            out["continuous_in_theta"] = True
        with np.errstate(all="ignore"):
            vals = f(grid)
        edge = np.concatenate([vals[:16], vals[-16:]])
        out["vanishes_at_infinity"] = bool(np.all(edge <= VANISH_TOL))
        return out


def normal_likelihood(sigma: float = 1.0) -> Likelihood:
    """X | theta ~ N(theta, sigma^2)."""
    log_norm = -LOG_SQRT_2PI - math.log(sigma)

    def log_eval(x: float, t: np.ndarray) -> np.ndarray:
        z = (x - t) / sigma
        return -0.5 * z * z + log_norm

    return Likelihood(
        lambda x, t: np.exp(log_eval(x, t)),
        continuous_in_theta=True,
        vanishes_at_infinity=True,
        log_eval=log_eval,
        landmarks=lambda x: tuple(x + sigma * k for k in (-8, -2, 0, 2, 8)),
        name=f"Normal(theta, {sigma:g}^2)",
        source={"density": "exp(-(x-theta)^2/(2*s^2))/(sqrt(2*pi)*s)", "params": {"s": sigma}},
    )


def binomial_likelihood(trials: int) -> Likelihood:
    """X | theta ~ Binomial(trials, theta) on [0, 1]."""

    def log_eval(x: int, t: np.ndarray) -> np.ndarray:
        coef = special.gammaln(trials + 1) - special.gammaln(x + 1) - special.gammaln(trials - x + 1)
        with np.errstate(divide="ignore"):
            a = x * np.log(t) if x > 0 else np.zeros_like(t)
            b = (trials - x) * np.log1p(-t) if trials - x > 0 else np.zeros_like(t)
        return coef + a + b

    def f(x: int, t: np.ndarray) -> np.ndarray:
        return np.exp(log_eval(x, t))

    return Likelihood(
        f,
        continuous_in_theta=True,
        vanishes_at_infinity=False,
        log_eval=log_eval,
        name=f"Binomial({trials}, theta)",
        source={
            "density": "factorial(N)/(factorial(x)*factorial(N-x))*theta^x*(1-theta)^(N-x)",
            "params": {"N": float(trials)},
        },
    )


def exponential_likelihood() -> Likelihood:
    """X | theta ~ Exponential with rate theta."""

    def log_eval(x: float, t: np.ndarray) -> np.ndarray:
        return np.log(t) - t * x

    return Likelihood(
        lambda x, t: t * np.exp(-t * x),
        continuous_in_theta=True,
        vanishes_at_infinity=True,
        log_eval=log_eval,
        landmarks=lambda x: tuple(k / x for k in (0.1, 1.0, 10.0)) if x > 0 else (),
        name="Exponential(theta)",
        source={"density": "theta*exp(-theta*x)", "params": {}},
    )


@dataclass(frozen=True, eq=False)
class PosteriorResult:
    measure: RadonMeasure
    evidence: MassClass
    proper: bool

    def to_dict(self) -> dict[str, Any]:
        ev = self.evidence
        return {
            "evidence": {"kind": type(ev).__name__, "value": ev.value if isinstance(ev, Finite) else None},
            "proper": self.proper,
            "label": self.measure.label,
        }


def posterior(prior: RadonMeasure, lik: Likelihood, x: Any) -> PosteriorResult:
    """f(x|.) times the prior, normalized when the evidence is finite.

    An improper posterior is returned unnormalized with ``proper=False``.

    Raises:
        ZeroEvidence: The product of likelihood and prior vanishes.
    """
    marks = tuple(lik.landmarks(x)) if lik.landmarks is not None else ()
    try:
        weighted = weight_by(prior, lik.at(x), log_g=lik.log_at(x), landmarks=marks)
    except ZeroResult as exc:
        raise ZeroEvidence(f"likelihood at x={x!r} vanishes on the support of {prior.label}") from exc
    evidence = total_mass(weighted)
    label = f"post({prior.label}|x={x})" if prior.label else ""
    if isinstance(evidence, Finite):
        z = normalizing_constant(weighted)
        if not (z > 0 and math.isfinite(z)):
            raise ZeroEvidence(f"evidence {z!r} at x={x!r}")
        normalized = replace_hint(scale(weighted, 1.0 / z), Finite(1.0))
        return PosteriorResult(normalized.with_label(label), Finite(z), True)
    if isinstance(evidence, Zero):
        raise ZeroEvidence(f"evidence vanishes at x={x!r}")
    return PosteriorResult(weighted.with_label(label), evidence, False)


def posterior_family(priors: MeasureFamily, lik: Likelihood, x: Any) -> MeasureFamily:
    """n -> posterior of priors.member(n) given x."""
    if not lik.continuous_in_theta:
        raise ValueError("posterior families need a likelihood continuous in theta")

    def member(n: int) -> RadonMeasure:
        return posterior(priors.member(n), lik, x).measure

    return MeasureFamily(member, None, f"post({priors.label}|x={x})")


# --- narrow convergence -----------------------------------------------------------------


@dataclass(frozen=True)
class NarrowReport:
    verdict: str
    q_vague: ConvergenceReport
    tight_window: Interval | None
    window_masses: tuple[float, ...]
    cdf_gaps: tuple[float, ...]
    t_grid: tuple[float, ...]
    grid: tuple[int, ...]

    def to_dict(self) -> dict[str, Any]:
        return {
            "verdict": self.verdict,
            "q_vague": self.q_vague.to_dict(),
            "tight_window": str(self.tight_window) if self.tight_window else None,
            "window_masses": list(self.window_masses),
            "cdf_gaps": list(self.cdf_gaps),
            "t_grid": list(self.t_grid),
            "grid": list(self.grid),
        }


TIGHT_MASS = 0.99
CDF_GAP = 0.02


def _compact_windows(space: ParameterSpace, center: float, budget: int) -> list[Interval]:
    """Increasing compact windows exhausting the space."""
    if isinstance(space, Discrete):
        return [Interval.closed(-0.5, 2.0**k) for k in range(budget)]
    iv = space.interval
    out = []
    for k in range(budget):
        if iv.is_bounded:
            d = 0.25 * iv.length * 2.0 ** (-k) if (iv.lower_open or iv.upper_open) else 0.0
            lo = iv.lower + d if iv.lower_open else iv.lower
            hi = iv.upper - d if iv.upper_open else iv.upper
        else:
            r = 2.0**k
            if math.isfinite(iv.lower):
                lo = iv.lower + (0.5 * 2.0 ** (-k) if iv.lower_open else 0.0)
                hi = max(center, iv.lower) + r
            elif math.isfinite(iv.upper):
                hi = iv.upper - (0.5 * 2.0 ** (-k) if iv.upper_open else 0.0)
                lo = min(center, iv.upper) - r
            else:
                lo, hi = center - r, center + r
        out.append(Interval.closed(lo, hi))
    return out


def _cdf(m: RadonMeasure, z: float, t: float) -> float:
    return min(1.0, max(0.0, mass_on(m, Interval(-math.inf, t, True, False)) / z))


def _narrow_probes(space: ParameterSpace, candidate: RadonMeasure) -> tuple[list[TestFunction], TestFunction]:
    probes, _ = default_probes(space)
    if isinstance(space, Continuous) and candidate.atoms:
        iv = space.interval
        width = 0.1 * iv.length if iv.is_bounded else 1.0
        probes += [TestFunction.hat(a.location, width) for a in candidate.atoms]
    masses = [log_integrate_probe(candidate, h) for h in probes]
    return probes, probes[int(np.argmax(masses))]


def check_narrow_convergence(
    posts: MeasureFamily,
    candidate: RadonMeasure,
    grid: NGrid | None = None,
    t_grid: Sequence[float] = (),
    *,
    probes: Sequence[TestFunction] | None = None,
    reference: TestFunction | None = None,
    tail_tol: float = 1e-2,
    window_budget: int = 48,
) -> NarrowReport:
    """Narrow convergence as q-vague convergence plus tightness plus cdf agreement.

    Raises:
        NotTight: No window in the search holds 99% of every member.
    """
    grid = grid or NGrid()
    space = posts.space
    if not isinstance(total_mass(candidate), Finite):
        raise MeasureError("narrow convergence needs a proper candidate")
    if probes is None:
        probes, auto_ref = _narrow_probes(space, candidate)
        reference = reference or auto_ref
    qv = check_q_vague(posts, candidate, probes, grid, tail_tol, reference=reference)

    members = [posts.member(n) for n in grid.values]
    norms = []
    for n, m in zip(grid.values, members):
        mass = total_mass(m)
        if not isinstance(mass, Finite):
            raise MeasureError(f"member n={n} is not a probability measure")
        norms.append(normalizing_constant(m))

    cand_summary = summary(candidate)
    center = cand_summary.median if cand_summary.median is not None else 0.0
    tight_window = None
    window_masses: tuple[float, ...] = ()
    for w in _compact_windows(space, center, window_budget):
        masses = tuple(mass_on(m, w) / z for m, z in zip(members, norms))
        if min(masses) >= TIGHT_MASS:
            tight_window, window_masses = w, masses
            break
    if tight_window is None:
        raise NotTight(f"no window among {window_budget} holds {TIGHT_MASS:g} of every member", qv)

    ts = [float(t) for t in t_grid] or _default_t_grid(candidate)
    cz = normalizing_constant(candidate)
    cand_cdf = [_cdf(candidate, cz, t) for t in ts]
    gaps = tuple(
        max(abs(_cdf(m, z, t) - c) for t, c in zip(ts, cand_cdf)) for m, z in zip(members, norms)
    )
    tail = gaps[-3:]
    cdf_ok = gaps[-1] <= CDF_GAP and all(b <= a + 1e-12 for a, b in zip(tail, tail[1:]))
    q_ok = isinstance(qv.verdict, ConvergesTo) and bool(qv.verdict.candidate_confirmed)
    verdict = "Narrow" if q_ok and cdf_ok else ("QVagueOnly" if q_ok else "NotNarrow")
    return NarrowReport(verdict, qv, tight_window, window_masses, gaps, tuple(ts), grid.values)


def _default_t_grid(candidate: RadonMeasure) -> list[float]:
    s = summary(candidate)
    if s.median is None:
        return [0.0]
    spread = math.sqrt(s.variance) if s.variance and math.isfinite(s.variance) and s.variance > 0 else 1.0
    pts = [s.median + k * spread for k in (-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0)]
    space = candidate.space
    if isinstance(space, Continuous):
        pts = [p for p in pts if space.interval.contains(p)] or [s.median]
    return pts


# --- Bayes estimators ----------------------------------------------------------------------


@dataclass(frozen=True)
class EstimatorLimit:
    trend: Trend
    grid: tuple[int, ...]
    means: tuple[float | None, ...]
    variances: tuple[float | None, ...]
    max_variance: float | None
    variance_bound: float | None
    variance_bounded: bool | None
    reference_mean: float | None = None
    reference_gap: float | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "trend": self.trend.to_dict(),
            "grid": list(self.grid),
            "means": list(self.means),
            "variances": list(self.variances),
            "max_variance": self.max_variance,
            "variance_bound": self.variance_bound,
            "variance_bounded": self.variance_bounded,
            "reference_mean": self.reference_mean,
            "reference_gap": self.reference_gap,
        }


def estimator_limit(
    posts: MeasureFamily,
    grid: NGrid | None = None,
    *,
    variance_bound: float | None = None,
    reference_mean: float | None = None,
    tail_tol: float = 1e-2,
) -> EstimatorLimit:
    """Trend of posterior means, with the bounded-variance check that licenses the limit.

    ``reference_mean`` (for example the raw mean of an improper limit
    posterior) is compared against the limit of the trend.
    """
    grid = grid or NGrid()
    means: list[float | None] = []
    variances: list[float | None] = []
    for n in grid.values:
        s = summary(posts.member(n))
        means.append(s.mean)
        variances.append(s.variance)
    trend = classify_trend(grid.values, means, tail_tol)
    finite_vars = [v for v in variances if v is not None and math.isfinite(v)]
    max_var = max(finite_vars) if len(finite_vars) == len(variances) else None
    if variance_bound is not None:
        bounded = max_var is not None and max_var <= variance_bound
    else:
        var_trend = classify_trend(grid.values, variances, tail_tol)
        bounded = var_trend.kind == "ToValue" if var_trend.kind != "Undetermined" else None
    gap = None
    if reference_mean is not None and trend.kind == "ToValue" and trend.value is not None:
        gap = abs(trend.value - reference_mean)
    return EstimatorLimit(
        trend, grid.values, tuple(means), tuple(variances), max_var, variance_bound, bounded, reference_mean, gap
    )
