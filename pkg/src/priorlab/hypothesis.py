"""Point-null tests with vague alternatives and the two limits of the null posterior probability."""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np

from .convergence import ConvergenceReport, NGrid, check_q_vague, default_probes, mass_escape
from .errors import ImproperMember, PreconditionFailure, ZeroEvidence, ZeroResult
from .families import MeasureFamily
from .measures import (
    Atom,
    Continuous,
    RadonMeasure,
    TestFunction,
    density_integral,
    describe_space,
    normalizing_constant,
    space_contains,
    total_mass,
    weight_by,
)
from .numerics import Finite, Infinite, Interval
from .posterior import Likelihood

ESCAPE_WINDOW = 1.0
VANISH_REL = 1e-8
STABLE_REL = 1e-3


@dataclass(frozen=True, eq=False)
class PointNullMixture:
    """Priors rho * delta(theta0) + (1 - rho) * alternative(n).

    Alternative members may be unnormalized; they are rescaled to
    probabilities before mixing.
    """

    rho: float
    theta0: float
    alternative: MeasureFamily

    def __post_init__(self) -> None:
        if not 0.0 < self.rho < 1.0:
            raise ValueError(f"rho must lie in (0, 1), got {self.rho}")
        if not space_contains(self.alternative.space, self.theta0):
            raise ValueError(f"theta0={self.theta0} lies outside {describe_space(self.alternative.space)}")

    def alternative_probability(self, n: int) -> tuple[RadonMeasure, float]:
        """Alternative member n and its normalizing constant; it must put no mass on theta0."""
        m = self.alternative.member(n)
        if any(a.location == self.theta0 for a in m.atoms):
            raise ValueError(f"alternative member n={n} has an atom at theta0={self.theta0}")
        mass = total_mass(m)
        if not isinstance(mass, Finite):
            raise ImproperMember(f"alternative member n={n} has mass {mass}")
        z = normalizing_constant(m)
        return m, z

    def member(self, n: int) -> RadonMeasure:
        m, z = self.alternative_probability(n)
        w = (1.0 - self.rho) / z
        density = log_density = None
        if m.density is not None:
            base = m.density

            def density(x: np.ndarray) -> np.ndarray:
                return w * base(x)

        if m.log_density is not None:
            base_log, shift = m.log_density, math.log(w)

            def log_density(x: np.ndarray) -> np.ndarray:
                return base_log(x) + shift

        atoms = tuple(Atom(a.location, w * a.weight) for a in m.atoms) + (Atom(self.theta0, self.rho),)
        return replace(
            m,
            density=density,
            log_density=log_density,
            atoms=atoms,
            mass_hint=Finite(1.0),
            landmarks=tuple(m.landmarks) + (self.theta0,),
            label=f"{self.rho:g}*delta({self.theta0:g})+{1 - self.rho:g}*{m.label}",
            source=None,
        )

    def family(self) -> MeasureFamily:
        return MeasureFamily(self.member, lambda n: 1.0, f"mixture({self.alternative.label})")


def _alternative_evidence(alt: RadonMeasure, z: float, lik: Likelihood, x: Any) -> float:
    marks = tuple(lik.landmarks(x)) if lik.landmarks is not None else ()
    try:
        weighted = weight_by(alt, lik.at(x), log_g=lik.log_at(x), landmarks=marks)
    except ZeroResult:
        return 0.0
    atoms = sum(a.weight for a in weighted.atoms)
    dens = density_integral(weighted) if weighted.has_density else 0.0
    return (dens + atoms) / z


def null_posterior_prob(mix: PointNullMixture, lik: Likelihood, x: Any, n: int) -> float:
    """Posterior probability of theta = theta0 under mixture member n.

    Raises:
        ZeroEvidence: Both the null likelihood and the alternative evidence vanish.
    """
    f0 = float(lik.at(x)(np.array([mix.theta0]))[0])
    alt, z = mix.alternative_probability(n)
    ev = _alternative_evidence(alt, z, lik, x)
    null = mix.rho * f0
    total = null + (1.0 - mix.rho) * ev
    if not total > 0:
        raise ZeroEvidence(f"null likelihood and alternative evidence both vanish at x={x!r}")
    return null / total


def improper_null_prob(
    rho: float, theta0: float, alternative: RadonMeasure, lik: Likelihood, x: Any
) -> float:
    """Null posterior probability for rho*delta(theta0) + (1-rho)*alternative with an improper alternative.

    The alternative is used unnormalized, so the answer depends on its
    density representation.

    Raises:
        ZeroEvidence: Both terms vanish.
        ValueError: The alternative evidence is infinite.
    """
    if not 0.0 < rho < 1.0:
        raise ValueError(f"rho must lie in (0, 1), got {rho}")
    f0 = float(lik.at(x)(np.array([theta0]))[0])
    marks = tuple(lik.landmarks(x)) if lik.landmarks is not None else ()
    weighted = weight_by(alternative, lik.at(x), log_g=lik.log_at(x), landmarks=marks)
    ev = total_mass(weighted)
    if isinstance(ev, Infinite):
        raise ValueError(f"alternative evidence is infinite at x={x!r}")
    ev_value = normalizing_constant(weighted) if isinstance(ev, Finite) else 0.0
    total = rho * f0 + (1.0 - rho) * ev_value
    if not total > 0:
        raise ZeroEvidence(f"null likelihood and alternative evidence both vanish at x={x!r}")
    return rho * f0 / total


def normal_improper_null_prob(x: float) -> float:
    """1 / (1 + sqrt(2 pi) exp(x^2/2)): N(theta, 1) data, half mass on 0, Lebesgue on the rest."""
    return 1.0 / (1.0 + math.sqrt(2.0 * math.pi) * math.exp(0.5 * x * x))


def normal_mixture_null_prob(x: float, n: float) -> float:
    """Closed form for the N(theta, 1) model with alternative N(0, n^2) and rho = 1/2."""
    s = 1.0 + n * n
    return 1.0 / (1.0 + math.sqrt(1.0 / s) * math.exp(n * n * x * x / (2.0 * s)))


def prior_vague_limit(
    mix: PointNullMixture,
    probes: Sequence[TestFunction] | None = None,
    grid: NGrid | None = None,
    tail_tol: float = 1e-2,
) -> ConvergenceReport:
    """q-vague check of the mixture family against the atom rho * delta(theta0).

    The reference probe is a unit hat centered at theta0, so the reported
    scaling should tend to 1.

    Raises:
        PreconditionFailure: Alternative members keep mass near theta0, so
            they cannot approach an improper limit.
    """
    grid = grid or NGrid()
    window = _escape_window(mix)
    escape = mass_escape(mix.alternative, window, grid)
    if escape.verdict != "EscapesToZero":
        raise PreconditionFailure(
            f"alternative keeps mass {escape.values[-1]:.3g} on {window}; it does not converge to an improper measure"
        )
    space = mix.alternative.space
    candidate = RadonMeasure(space, atoms=(Atom(mix.theta0, mix.rho),), label=f"{mix.rho:g}*delta({mix.theta0:g})")
    reference = TestFunction.hat(mix.theta0, _hat_width(mix), name=f"hat@{mix.theta0:g}")
    if probes is None:
        defaults, _ = default_probes(space)
        probes = [h for h in defaults if not _same_support(h, reference)]
    probes = list(probes)
    if reference not in probes:
        probes.append(reference)
    return check_q_vague(mix.family(), candidate, probes, grid, tail_tol, reference=reference)


def _hat_width(mix: PointNullMixture) -> float:
    space = mix.alternative.space
    if isinstance(space, Continuous):
        iv = space.interval
        gap = min(mix.theta0 - iv.lower, iv.upper - mix.theta0)
        return min(ESCAPE_WINDOW, 0.5 * gap) if gap > 0 else ESCAPE_WINDOW
    return ESCAPE_WINDOW


def _escape_window(mix: PointNullMixture) -> Interval:
    w = _hat_width(mix)
    return Interval.closed(mix.theta0 - w, mix.theta0 + w)


def _same_support(a: TestFunction, b: TestFunction) -> bool:
    return a.support == b.support


# --- limit regimes ---------------------------------------------------------------------


@dataclass(frozen=True)
class Regime:
    """Classified limit of the null posterior probability.

    ``kind`` is NullProbToOne, NullProbToRho or Unclassified. The tail
    evidence only covers the probed windows, so ``grid_limited`` is always set.
    """

    kind: str
    rho: float | None
    trajectory: tuple[tuple[int, float], ...]
    tail: dict[str, Any] = field(default_factory=dict)
    trajectory_consistent: bool = False
    grid_limited: bool = True

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "rho": self.rho,
            "trajectory": [list(p) for p in self.trajectory],
            "tail": self.tail,
            "trajectory_consistent": self.trajectory_consistent,
            "grid_limited": self.grid_limited,
        }


def _tail_rings(space: Continuous, theta0: float, reach: float) -> list[np.ndarray]:
    """Sample points in nested shells |theta - theta0| in [R, 2R] out to ``reach``."""
    iv = space.interval
    rings = []
    r = max(1.0, abs(theta0))
    while r < reach:
        shell = np.geomspace(r, 2.0 * r, 33)
        pts = []
        if math.isinf(iv.upper):
            pts.append(theta0 + shell)
        if math.isinf(iv.lower):
            pts.append(theta0 - shell)
        if not pts:
            break
        rings.append(np.concatenate(pts))
        r *= 2.0
    return rings


def likelihood_tail(lik: Likelihood, x: Any, space: Continuous, theta0: float, reach: float) -> dict[str, Any]:
    """Sup of f(x|.) and of |f(x|.) - f(x|theta0)| on each expanding shell."""
    f = lik.at(x)
    f0 = float(f(np.array([theta0]))[0])
    body = f(np.linspace(theta0 - 8.0, theta0 + 8.0, 401)) if isinstance(space, Continuous) else np.array([f0])
    scale = max(float(np.nanmax(body)), f0)
    sups, devs = [], []
    with np.errstate(all="ignore"):
        for ring in _tail_rings(space, theta0, reach):
            inside = ring[[space.interval.contains(float(t)) for t in ring]]
            vals = f(inside)
            sups.append(float(np.max(vals)))
            devs.append(float(np.max(np.abs(vals - f0))))
    return {"f_theta0": f0, "scale": scale, "shell_sup": sups, "shell_deviation": devs}


def _settles_below(values: Sequence[float], level: float, points: int = 3) -> bool:
    tail = values[-points:]
    if len(tail) < points:
        return False
    return all(v <= level for v in tail) and all(b <= a * (1 + 1e-12) for a, b in zip(tail, tail[1:]))


def limit_regime(mix: PointNullMixture, lik: Likelihood, x: Any, grid: NGrid | None = None) -> Regime:
    """Classify the likelihood tail, then record the null-probability trajectory.

    Vanishing tails give NullProbToOne; tails converging to f(x|theta0) give
    NullProbToRho(rho). Anything else is Unclassified.
    """
    grid = grid or NGrid()
    space = mix.alternative.space
    traj: list[tuple[int, float]] = []
    for n in grid.values:
        try:
            traj.append((n, null_posterior_prob(mix, lik, x, n)))
        except ZeroEvidence:
            traj.append((n, math.nan))
    if not isinstance(space, Continuous) or space.interval.is_bounded:
        return Regime("Unclassified", None, tuple(traj), {"reason": "no unbounded direction to inspect"})
    reach = 100.0 * max(grid.values) * (1.0 + abs(mix.theta0))
    tail = likelihood_tail(lik, x, space, mix.theta0, reach)
    scale = tail["scale"]
    values = [v for _, v in traj]
    if scale > 0 and _settles_below(tail["shell_sup"], VANISH_REL * scale):
        increasing = all(b >= a - 1e-12 for a, b in zip(values, values[1:]))
        return Regime("NullProbToOne", None, tuple(traj), tail, bool(increasing))
    f0 = tail["f_theta0"]
    if f0 > 0 and _settles_below(tail["shell_deviation"], STABLE_REL * f0):
        consistent = math.isfinite(values[-1]) and abs(values[-1] - mix.rho) <= 5e-3
        return Regime("NullProbToRho", mix.rho, tuple(traj), tail, bool(consistent))
    return Regime("Unclassified", None, tuple(traj), tail)


# --- discrete model-choice prior ----------------------------------------------------------


def dauxois_prior(K: int, n0: int) -> RadonMeasure:
    """Prior on the variance-function coefficient a with V(m) = a m^2 + m.

    Mass 1/3 at a = 0, 1/(3K) at a = 1/k for k = 1..K, and 1/(3K) at
    a = -1/k for k = n0..n0+K-1.
    """
    if K < 1 or n0 < 1:
        raise ValueError("K and n0 must be positive integers")
    atoms = [Atom(0.0, 1.0 / 3.0)]
    atoms += [Atom(1.0 / k, 1.0 / (3.0 * K)) for k in range(1, K + 1)]
    atoms += [Atom(-1.0 / k, 1.0 / (3.0 * K)) for k in range(n0, n0 + K)]
    return RadonMeasure(
        Continuous(Interval.real_line()),
        atoms=tuple(atoms),
        mass_hint=Finite(1.0),
        label=f"Pi_K(K={K}, n0={n0})",
    )
