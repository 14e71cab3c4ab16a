"""Indexed sequences of measures and the constructions that produce vague priors."""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any

import numpy as np

from . import dsl
from .errors import FamilyError, NonFiniteDensity, ZeroAtOne, ZeroAtOrigin
from .measures import (
    Atom,
    Continuous,
    Discrete,
    ParameterSpace,
    RadonMeasure,
    total_mass,
)
from .numerics import Finite, Interval


@dataclass(frozen=True, eq=False)
class MeasureFamily:
    """A sequence n -> member(n) of measures on one parameter space.

    ``scaling_hint`` is an optional closed form for a_n. ``template`` is the
    JSON form (density in ``theta`` and ``n``) when one is known.
    """

    member: Callable[[int], RadonMeasure]
    scaling_hint: Callable[[int], float] | None = None
    label: str = ""
    template: dict[str, Any] | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "member", lru_cache(maxsize=64)(self.member))

    def __call__(self, n: int) -> RadonMeasure:
        return self.member(n)

    @property
    def space(self) -> ParameterSpace:
        return self.member(1).space


def constant_family(m: RadonMeasure, label: str = "") -> MeasureFamily:
    return MeasureFamily(lambda n: m, lambda n: 1.0, label or f"constant {m.label}")


def scaled_family(fam: MeasureFamily, factor: Callable[[int], float]) -> MeasureFamily:
    """The family n -> factor(n) * member(n)."""
    from .measures import scale

    hint = fam.scaling_hint
    return MeasureFamily(
        lambda n: scale(fam.member(n), factor(n)),
        (lambda n: hint(n) / factor(n)) if hint is not None else None,
        f"c_n*{fam.label}",
    )


def evaluation_grid(space: ParameterSpace) -> np.ndarray:
    """Moderate grid used to spot-check densities for finiteness and bounds."""
    if isinstance(space, Discrete):
        return np.arange(0.0, 200.0) if space.support is None else np.array(space.support)
    iv = space.interval
    if iv.is_bounded:
        return np.linspace(iv.lower, iv.upper, 403)[1:-1]
    offsets = np.geomspace(1e-8, 1e8, 401)
    if math.isfinite(iv.lower):
        return iv.lower + offsets
    if math.isfinite(iv.upper):
        return iv.upper - offsets[::-1]
    return np.linspace(-30.0, 30.0, 601)


def _is_real_line(space: ParameterSpace) -> bool:
    return isinstance(space, Continuous) and space.interval == Interval.real_line()


def _require_proper_bounded(base: RadonMeasure, what: str) -> None:
    mass = total_mass(base)
    if not isinstance(mass, Finite):
        raise FamilyError(f"{what} needs a probability base measure, got mass {mass}")
    values = base.eval_density(evaluation_grid(base.space))
    if not np.all(np.isfinite(values)):
        raise FamilyError(f"{what} needs a bounded base density")


def _template_from(base: RadonMeasure, rewrite: Callable[[dsl.Expr], dsl.Expr]) -> dict[str, Any] | None:
    src = base.source
    if not src or not src.get("density") or base.atoms:
        return None
    expr = rewrite(dsl.parse(src["density"]))
    return {"density": dsl.pretty(expr), "params": dict(src.get("params", {}))}


def location_family(base: RadonMeasure) -> MeasureFamily:
    """Members with density (1/n) pi(theta/n); the q-vague limit is Lebesgue measure.

    Raises:
        ZeroAtOrigin: The base density vanishes at 0.
    """
    if not _is_real_line(base.space):
        raise FamilyError("location_family needs a base measure on the real line")
    _require_proper_bounded(base, "location_family")
    at_zero = float(base.eval_density(np.array([0.0]))[0])
    if not at_zero > 0:
        raise ZeroAtOrigin(f"base density at 0 is {at_zero}")

    def member(n: int) -> RadonMeasure:
        log_n = math.log(n)

        def log_density(x: np.ndarray) -> np.ndarray:
            return base.eval_log_density(x / n) - log_n

        return RadonMeasure(
            base.space,
            log_density=log_density,
            atoms=tuple(Atom(a.location * n, a.weight) for a in base.atoms),
            mass_hint=base.mass_hint,
            landmarks=tuple(p * n for p in base.landmarks),
            label=f"(1/{n})*{base.label}(theta/{n})",
        )

    theta, n_var = dsl.Var("theta"), dsl.Var("n")
    template = _template_from(
        base,
        lambda e: dsl.BinOp("/", dsl.substitute(e, {"theta": dsl.BinOp("/", theta, n_var)}), n_var),
    )
    if template is not None:
        template["scaling_hint"] = "n"
    return MeasureFamily(member, lambda n: float(n), f"location({base.label})", template)


def scale_family(base: RadonMeasure) -> MeasureFamily:
    """Members with density theta^(1/n - 1) pi(theta^(1/n)) / n; the limit is d theta / theta.

    Raises:
        ZeroAtOne: The base density vanishes at 1.
    """
    space = base.space
    if not (isinstance(space, Continuous) and space.interval == Interval.positive()):
        raise FamilyError("scale_family needs a base measure on (0, inf)")
    _require_proper_bounded(base, "scale_family")
    at_one = float(base.eval_density(np.array([1.0]))[0])
    if not at_one > 0:
        raise ZeroAtOne(f"base density at 1 is {at_one}")

    def member(n: int) -> RadonMeasure:
        log_n = math.log(n)
        inv = 1.0 / n

        def log_density(x: np.ndarray) -> np.ndarray:
            lx = np.log(x)
            return base.eval_log_density(np.exp(inv * lx)) + (inv - 1.0) * lx - log_n

        with np.errstate(over="ignore"):
            marks = tuple(math.exp(min(n * math.log(p), 700.0)) for p in base.landmarks if p > 0)
        return RadonMeasure(
            space,
            log_density=log_density,
            atoms=tuple(Atom(a.location**n, a.weight) for a in base.atoms),
            mass_hint=base.mass_hint,
            landmarks=marks,
            label=f"scale{n}({base.label})",
        )

    theta, n_var = dsl.Var("theta"), dsl.Var("n")
    root = dsl.BinOp("^", theta, dsl.BinOp("/", dsl.Num(1.0), n_var))

    def rewrite(e: dsl.Expr) -> dsl.Expr:
        jac = dsl.BinOp("/", root, dsl.BinOp("*", theta, n_var))
        return dsl.BinOp("*", jac, dsl.substitute(e, {"theta": root}))

    template = _template_from(base, rewrite)
    if template is not None:
        template["scaling_hint"] = "n"
    return MeasureFamily(member, lambda n: float(n), f"scale({base.label})", template)


@dataclass(frozen=True, eq=False)
class ExpFamilySpec:
    """One-parameter natural exponential family.

    ``phi`` is the log-partition function and ``fisher_det_sqrt`` the square
    root of the Fisher information, both on the natural-parameter space.
    """

    phi: Callable[[np.ndarray], np.ndarray]
    fisher_det_sqrt: Callable[[np.ndarray], np.ndarray]
    space: ParameterSpace
    name: str = ""
    phi_source: str | None = None
    fisher_source: str | None = None

    def __post_init__(self) -> None:
        grid = evaluation_grid(self.space)
        with np.errstate(all="ignore"):
            phi = np.asarray(self.phi(grid), dtype=float)
            fisher = np.asarray(self.fisher_det_sqrt(grid), dtype=float)
        if not (np.all(np.isfinite(phi)) and np.all(np.isfinite(fisher))):
            raise NonFiniteDensity(f"exponential family {self.name}: phi or Fisher term is not finite on the grid")
        if np.any(fisher < 0):
            raise FamilyError("square root of the Fisher information must be nonnegative")


def poisson_natural() -> ExpFamilySpec:
    """Poisson model in its natural parameter theta = log(mean)."""
    return ExpFamilySpec(
        phi=np.exp,
        fisher_det_sqrt=lambda t: np.exp(0.5 * t),
        space=Continuous(Interval.real_line()),
        name="Poisson",
        phi_source="exp(theta)",
        fisher_source="exp(theta/2)",
    )


def exponential_natural() -> ExpFamilySpec:
    """Exponential model f(x|lambda) = lambda e^(-lambda x) with natural parameter theta = -lambda."""
    return ExpFamilySpec(
        phi=lambda t: -np.log(-t),
        fisher_det_sqrt=lambda t: 1.0 / np.abs(t),
        space=Continuous(Interval(-math.inf, 0.0, True, True)),
        name="Exponential",
        phi_source="-log(-theta)",
        fisher_source="1/abs(theta)",
    )


def jeffreys_measure(spec: ExpFamilySpec) -> RadonMeasure:
    return RadonMeasure(
        spec.space,
        density=spec.fisher_det_sqrt,
        label=f"Jeffreys({spec.name})",
        source={"density": spec.fisher_source, "params": {}} if spec.fisher_source else None,
    )


def jcp_family(
    spec: ExpFamilySpec,
    alpha: Callable[[int], float],
    beta: Callable[[int], float],
    *,
    alpha_source: str | None = None,
    beta_source: str | None = None,
) -> MeasureFamily:
    """Unnormalized members exp(alpha_n theta - beta_n phi(theta)) |I(theta)|^(1/2), with a_n = 1.

    Raises:
        NonFiniteDensity: A member density overflows on the evaluation grid.
    """
    grid = evaluation_grid(spec.space)

    def member(n: int) -> RadonMeasure:
        a, b = float(alpha(n)), float(beta(n))

        def log_density(t: np.ndarray) -> np.ndarray:
            with np.errstate(all="ignore"):
                out = a * t + np.log(spec.fisher_det_sqrt(t))
                if b != 0.0:
                    out = out - b * spec.phi(t)
            return out

        with np.errstate(all="ignore"):
            values = np.exp(log_density(grid))
        if not np.all(np.isfinite(values)):
            raise NonFiniteDensity(f"JCP member n={n} overflows on the evaluation grid")
        return RadonMeasure(spec.space, log_density=log_density, label=f"JCP({spec.name}; {a:g}, {b:g})")

    template = None
    if spec.phi_source and spec.fisher_source and alpha_source and beta_source:
        template = {
            "density": f"exp(({alpha_source})*theta - ({beta_source})*({spec.phi_source}))*({spec.fisher_source})",
            "params": {},
            "scaling_hint": "1",
        }
    return MeasureFamily(member, lambda n: 1.0, f"JCP({spec.name})", template)


def ig_jcp_is_proper(alpha1: float, alpha2: float, beta: float) -> bool:
    """Properness region of the inverse-Gaussian Jeffreys conjugate prior."""
    return alpha1 > 0 and alpha2 > 0 and -0.5 <= beta < math.sqrt(alpha1 * alpha2)
