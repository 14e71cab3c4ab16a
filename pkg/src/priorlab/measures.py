"""Positive Radon measures on a one-dimensional parameter space.

A measure is a density (with respect to Lebesgue measure on an interval, or
counting measure on a discrete support) plus finitely many atoms. Densities are
vectorized callables; an optional log-density lets probe integrals be formed in
log space when the density itself would underflow.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np
from scipy.special import logsumexp

from . import numerics
from .errors import (
    AllProbesNull,
    DomainMismatch,
    EmptyRestriction,
    Inconclusive,
    MeasureError,
    NonConvergence,
    NonFinite,
    NonPositiveScalar,
    ZeroResult,
)
from .numerics import Finite, Infinite, Interval, MassClass, Zero

log = logging.getLogger(__name__)

Density = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Continuous:
    interval: Interval


@dataclass(frozen=True)
class Discrete:
    """Counting-measure space; ``support=None`` means 0, 1, 2, ..."""

    support: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if self.support is not None:
            pts = tuple(float(s) for s in self.support)
            if not pts:
                raise MeasureError("discrete support must be nonempty")
            if any(b <= a for a, b in zip(pts, pts[1:])):
                raise MeasureError("discrete support must be strictly increasing")
            object.__setattr__(self, "support", pts)

    def points_in(self, lo: float, hi: float) -> np.ndarray:
        if self.support is None:
            start = max(0.0, math.ceil(lo)) if math.isfinite(lo) else 0.0
            stop = math.floor(hi) if math.isfinite(hi) else math.inf
            if stop < start:
                return np.zeros(0)
            if not math.isfinite(stop):
                raise MeasureError("cannot enumerate an unbounded window of the naturals")
            return np.arange(start, stop + 1.0)
        pts = np.array(self.support)
        return pts[(pts >= lo) & (pts <= hi)]

    def contains(self, x: float) -> bool:
        if self.support is None:
            return x >= 0 and float(x).is_integer()
        return float(x) in self.support


ParameterSpace = Continuous | Discrete


@dataclass(frozen=True)
class Atom:
    location: float
    weight: float


@dataclass(frozen=True)
class TestFunction:
    """Continuous piecewise-linear probe with compact support."""

    __test__ = False  # not a pytest class

    nodes: tuple[float, ...]
    values: tuple[float, ...]
    name: str = ""

    def __post_init__(self) -> None:
        nodes = tuple(float(v) for v in self.nodes)
        values = tuple(float(v) for v in self.values)
        if len(nodes) < 2 or len(nodes) != len(values):
            raise ValueError("a probe needs at least two nodes and one value per node")
        if any(b <= a for a, b in zip(nodes, nodes[1:])):
            raise ValueError("probe nodes must be strictly increasing")
        if any(v < 0 for v in values) or values[0] != 0 or values[-1] != 0:
            raise ValueError("probe values must be nonnegative and vanish at both end nodes")
        if not any(v > 0 for v in values):
            raise ValueError("probe must not be identically zero")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "values", values)

    @classmethod
    def hat(cls, center: float, half_width: float, height: float = 1.0, name: str = "") -> TestFunction:
        return cls((center - half_width, center, center + half_width), (0.0, height, 0.0), name)

    @property
    def support(self) -> tuple[float, float]:
        return self.nodes[0], self.nodes[-1]

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        if len(self.nodes) == 3:
            return f"hat@{self.nodes[1]:g}"
        return f"probe[{self.nodes[0]:g},{self.nodes[-1]:g}]"

    def __call__(self, x: np.ndarray | float) -> np.ndarray | float:
        out = np.interp(x, self.nodes, self.values, left=0.0, right=0.0)
        return float(out) if np.ndim(out) == 0 else out

    def to_dict(self) -> dict[str, Any]:
        return {"name": self.label, "nodes": list(self.nodes), "values": list(self.values)}


@dataclass(frozen=True, eq=False)
class RadonMeasure:
    """Density plus atoms on a parameter space.

    Either ``density`` or ``log_density`` may be given; the other is derived.
    ``landmarks`` are optional locations of features (modes, scales) that
    quadrature uses as panel boundaries. ``source`` carries the DSL form used
    for JSON export.
    """

    space: ParameterSpace
    density: Density | None = None
    atoms: tuple[Atom, ...] = ()
    mass_hint: MassClass | None = None
    log_density: Density | None = None
    landmarks: tuple[float, ...] = ()
    label: str = ""
    source: dict[str, Any] | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        atoms = tuple(a if isinstance(a, Atom) else Atom(*a) for a in self.atoms)
        atoms = tuple(sorted(atoms, key=lambda a: a.location))
        object.__setattr__(self, "atoms", atoms)
        locs = [a.location for a in atoms]
        if len(set(locs)) != len(locs):
            raise MeasureError("atom locations must be distinct")
        for a in atoms:
            if not (a.weight > 0 and math.isfinite(a.weight)):
                raise MeasureError(f"atom weight must be positive, got {a.weight}")
            if not space_contains(self.space, a.location):
                raise MeasureError(f"atom at {a.location} lies outside {describe_space(self.space)}")
        if self.density is None and self.log_density is None and not atoms:
            raise MeasureError("the zero measure is not a valid measure")
        if isinstance(self.mass_hint, Zero):
            raise MeasureError("mass_hint Zero describes the excluded zero measure")
        if self.has_density:
            grid = sample_grid(self.space)
            values = self.eval_density(grid)
            if np.any(values < 0):
                raise MeasureError("density takes negative values")
            alive = np.any(values > 0)
            if not alive and self.log_density is not None:
                alive = np.any(np.isfinite(self.eval_log_density(grid)))
            if not atoms and not alive:
                raise MeasureError("density vanishes on the sample grid and there are no atoms")
        object.__setattr__(self, "landmarks", tuple(sorted({float(p) for p in self.landmarks if math.isfinite(p)})))

    @property
    def has_density(self) -> bool:
        return self.density is not None or self.log_density is not None

    def eval_density(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        with np.errstate(all="ignore"):
            if self.density is not None:
                return np.asarray(self.density(x), dtype=float) * np.ones_like(x)
            if self.log_density is not None:
                return np.exp(np.asarray(self.log_density(x), dtype=float)) * np.ones_like(x)
        return np.zeros_like(x)

    def eval_log_density(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        with np.errstate(all="ignore"):
            if self.log_density is not None:
                return np.asarray(self.log_density(x), dtype=float) * np.ones_like(x)
            if self.density is not None:
                return np.log(np.asarray(self.density(x), dtype=float)) * np.ones_like(x)
        return np.full_like(x, -np.inf)

    def with_label(self, label: str) -> RadonMeasure:
        return replace(self, label=label)


def space_contains(space: ParameterSpace, x: float) -> bool:
    if isinstance(space, Continuous):
        return space.interval.contains(x)
    return space.contains(x)


def describe_space(space: ParameterSpace) -> str:
    if isinstance(space, Continuous):
        return str(space.interval)
    if space.support is None:
        return "{0, 1, 2, ...}"
    return "{" + ", ".join(f"{s:g}" for s in space.support) + "}"


def sample_grid(space: ParameterSpace, count: int = 513) -> np.ndarray:
    """Interior points used for spot checks of densities and likelihoods."""
    if isinstance(space, Discrete):
        if space.support is None:
            return np.arange(0.0, 200.0)
        return np.array(space.support)
    iv = space.interval
    if iv.is_bounded:
        return np.linspace(iv.lower, iv.upper, count + 2)[1:-1]
    t = np.sinh(np.linspace(-12.0, 12.0, count))
    if math.isfinite(iv.lower):
        return iv.lower + np.exp(np.linspace(-20.0, 20.0, count))
    if math.isfinite(iv.upper):
        return iv.upper - np.exp(np.linspace(-20.0, 20.0, count))
    return t


# --- integration helpers -------------------------------------------------------


def _piece(space: Continuous, lo: float, hi: float, lo_open: bool = False, hi_open: bool = False) -> Interval | None:
    """Part of [lo, hi] inside the space, with space endpoints flagged open."""
    iv = space.interval
    window = Interval(lo, hi, lo_open or math.isinf(lo), hi_open or math.isinf(hi))
    inter = iv.intersect(window)
    if inter is None:
        return None
    # Density may be singular at a space endpoint even when the space is closed there.
    return Interval(
        inter.lower,
        inter.upper,
        inter.lower_open or inter.lower == iv.lower,
        inter.upper_open or inter.upper == iv.upper,
    )


def _quad(f: Density, piece: Interval, points: Sequence[float] = ()) -> float:
    return numerics.integrate(f, piece, points=points).value


def density_integral(
    m: RadonMeasure,
    window: Interval | None = None,
    weight: Density | None = None,
) -> float:
    """Integral of ``weight * density`` over ``window`` (default: whole space), atoms excluded."""
    if not m.has_density:
        return 0.0
    space = m.space
    if isinstance(space, Discrete):
        lo = window.lower if window else -math.inf
        hi = window.upper if window else math.inf
        dens = m.eval_density
        term = dens if weight is None else (lambda k: weight(k) * dens(k))
        if space.support is None and math.isinf(hi):
            start = max(lo, 0.0)
            offset = math.ceil(start) if math.isfinite(start) else 0.0

            def shifted(k: np.ndarray) -> np.ndarray:
                return term(k + offset)

            return numerics.sum_series(shifted).value
        pts = space.points_in(lo, hi)
        if window is not None:
            pts = np.array([p for p in pts if window.contains(p)])
        return float(np.sum(term(pts))) if pts.size else 0.0
    if window is None:
        piece = space.interval.with_open_ends()
    else:
        piece = _piece(space, window.lower, window.upper, window.lower_open, window.upper_open)
        if piece is None:
            return 0.0
    dens = m.eval_density
    f = dens if weight is None else (lambda x: weight(x) * dens(x))
    return _quad(f, piece, m.landmarks)


def atoms_in(m: RadonMeasure, window: Interval | None) -> list[Atom]:
    if window is None:
        return list(m.atoms)
    return [a for a in m.atoms if window.contains(a.location)]


def mass_on(m: RadonMeasure, window: Interval) -> float:
    """Measure of ``window`` (density part plus atoms inside it)."""
    return density_integral(m, window) + sum(a.weight for a in atoms_in(m, window))


def integrate_probe(m: RadonMeasure, h: TestFunction) -> float:
    """Integral of the probe against the measure."""
    value = math.exp(log_integrate_probe(m, h))
    return value


def log_integrate_probe(m: RadonMeasure, h: TestFunction) -> float:
    """Logarithm of the probe integral, computed without underflow.

    Returns -inf when the probe receives no mass.
    """
    lo, hi = h.support
    parts: list[float] = []
    for a in m.atoms:
        hv = h(a.location)
        if hv > 0:
            parts.append(math.log(a.weight) + math.log(hv))
    if m.has_density:
        if isinstance(m.space, Discrete):
            pts = m.space.points_in(lo, hi)
            if pts.size:
                hv = np.asarray(h(pts))
                keep = hv > 0
                if keep.any():
                    logs = m.eval_log_density(pts[keep]) + np.log(hv[keep])
                    if np.any(np.isnan(logs)):
                        raise NonFinite("log-density is NaN on the probe support")
                    parts.append(float(logsumexp(logs)))
        else:
            piece = _piece(m.space, lo, hi)
            if piece is not None:
                parts.append(_log_quad(m, h, piece))
    parts = [p for p in parts if p > -math.inf]
    if not parts:
        return -math.inf
    return float(logsumexp(parts))


def _log_quad(m: RadonMeasure, h: TestFunction, piece: Interval) -> float:
    probe_lo, probe_hi = piece.lower, piece.upper
    sample = np.linspace(probe_lo, probe_hi, 515)[1:-1]
    inner = [v for v in h.nodes if probe_lo < v < probe_hi]
    logs = m.eval_log_density(np.concatenate([sample, np.array(inner)]))
    if np.any(np.isnan(logs)):
        raise NonFinite("log-density is NaN on the probe support")
    finite = logs[np.isfinite(logs)]
    shift = float(finite.max()) if finite.size else 0.0
    if math.isinf(shift):
        shift = 0.0

    def integrand(x: np.ndarray) -> np.ndarray:
        with np.errstate(all="ignore"):
            return np.asarray(h(x)) * np.exp(m.eval_log_density(x) - shift)

    points = list(h.nodes) + [p for p in m.landmarks if probe_lo < p < probe_hi]
    value = numerics.integrate(integrand, piece, points=points).value
    if value <= 0:
        return -math.inf
    return math.log(value) + shift


# --- mass -----------------------------------------------------------------------


def _atom_mass(m: RadonMeasure) -> float:
    return sum(a.weight for a in m.atoms)


def _verify_hint(m: RadonMeasure) -> bool:
    hint = m.mass_hint
    if isinstance(hint, Finite):
        window = _compact_window(m.space)
        if window is None:
            return True
        observed = mass_on(m, window)
        return observed <= hint.value * (1.0 + 1e-6) + 1e-12
    if isinstance(hint, Infinite):
        try:
            found = _density_mass(m, max_windows=12)
        except Inconclusive:
            return True
        return not isinstance(found, Finite)
    return False


def _compact_window(space: ParameterSpace) -> Interval | None:
    if isinstance(space, Discrete):
        if space.support is None:
            return Interval.closed(0.0, 64.0)
        return None
    iv = space.interval
    if iv.is_bounded:
        pad = 0.05 * iv.length
        return Interval.closed(iv.lower + pad, iv.upper - pad)
    if math.isfinite(iv.lower):
        return Interval.closed(iv.lower + 0.05, iv.lower + 20.0)
    if math.isfinite(iv.upper):
        return Interval.closed(iv.upper - 20.0, iv.upper - 0.05)
    return Interval.closed(-20.0, 20.0)


def _density_mass(m: RadonMeasure, max_windows: int = 64) -> MassClass:
    if not m.has_density:
        return Zero()
    if isinstance(m.space, Discrete):
        if m.space.support is not None:
            total = float(np.sum(m.eval_density(np.array(m.space.support))))
            return Finite(total) if total > 0 else Zero()
        result = numerics.sum_series(m.eval_density, raise_on_failure=False)
        if result.converged:
            return Finite(result.value) if result.value > 0 else Zero()
        tail = m.eval_density(np.arange(1e6, 1e6 + 64))
        if np.all(tail > 0) and tail[-1] >= 0.5 * tail[0]:
            return Infinite()
        raise Inconclusive("series mass neither converged nor diverged")
    return numerics.improper_mass(m.eval_density, m.space.interval, max_windows=max_windows)


def total_mass(m: RadonMeasure) -> MassClass:
    """Classify the total mass, trusting ``mass_hint`` only after a spot check."""
    if m.mass_hint is not None:
        if _verify_hint(m):
            if isinstance(m.mass_hint, Finite):
                return m.mass_hint
            return Infinite()
        log.warning("mass hint %s for %s failed verification; recomputing", m.mass_hint, m.label or "measure")
    dens = _density_mass(m)
    atoms = _atom_mass(m)
    if isinstance(dens, Infinite):
        return Infinite()
    total = atoms + (dens.value if isinstance(dens, Finite) else 0.0)
    return Finite(total) if total > 0 else Zero()


def normalizing_constant(m: RadonMeasure) -> float:
    """Total mass as a number, computed by quadrature when possible.

    Prefers the quadrature value over a Finite hint so that moments and cdfs
    share the same discretization error.
    """
    mass = total_mass(m)
    if not isinstance(mass, Finite):
        raise MeasureError(f"measure {m.label or ''} has no finite total mass ({mass})")
    try:
        return density_integral(m) + _atom_mass(m)
    except (NonConvergence, NonFinite):
        return mass.value


# --- algebra ---------------------------------------------------------------------


def scale(m: RadonMeasure, alpha: float) -> RadonMeasure:
    if not (alpha > 0 and math.isfinite(alpha)):
        raise NonPositiveScalar(f"scale factor must be positive, got {alpha}")
    density = log_density = None
    if m.density is not None:
        base = m.density

        def density(x: np.ndarray) -> np.ndarray:
            return alpha * base(x)

    if m.log_density is not None:
        base_log = m.log_density
        shift = math.log(alpha)

        def log_density(x: np.ndarray) -> np.ndarray:
            return base_log(x) + shift

    hint = m.mass_hint
    if isinstance(hint, Finite):
        hint = Finite(hint.value * alpha)
    source = None
    if m.source is not None:
        source = dict(m.source)
        source["scale"] = source.get("scale", 1.0) * alpha
    return replace(
        m,
        density=density,
        log_density=log_density,
        atoms=tuple(Atom(a.location, a.weight * alpha) for a in m.atoms),
        mass_hint=hint,
        source=source,
    )


def equivalent_up_to_scalar(
    m1: RadonMeasure, m2: RadonMeasure, probes: Sequence[TestFunction], tol: float = 1e-6
) -> bool:
    """True when the two measures agree up to one positive factor on every probe.

    Raises:
        AllProbesNull: No probe gives positive mass to either measure.
    """
    if len(probes) < 3:
        raise ValueError("at least three probes are required")
    ratios: list[float] = []
    for h in probes:
        a, b = log_integrate_probe(m1, h), log_integrate_probe(m2, h)
        if a == -math.inf and b == -math.inf:
            continue
        if a == -math.inf or b == -math.inf:
            return False
        ratios.append(a - b)
    if not ratios:
        raise AllProbesNull("no probe separates the measures")
    return max(ratios) - min(ratios) <= math.log1p(tol)


def restrict(m: RadonMeasure, window: Interval) -> RadonMeasure:
    """Measure times the indicator of ``window``.

    Raises:
        EmptyRestriction: The window carries no mass.
    """
    space = m.space
    if isinstance(space, Continuous):
        inter = space.interval.intersect(window)
        if inter is None:
            raise EmptyRestriction(f"{window} does not meet {space.interval}")
        new_space: ParameterSpace = Continuous(inter)
    else:
        if space.support is None and not math.isfinite(window.upper):
            pts = None
        else:
            pts = [p for p in space.points_in(window.lower, window.upper) if window.contains(p)]
            if not pts:
                raise EmptyRestriction(f"{window} contains no support points")
        if pts is None:
            new_space = space
        else:
            new_space = Discrete(tuple(pts))
    atoms = tuple(a for a in m.atoms if window.contains(a.location) and space_contains(new_space, a.location))
    has_density = m.has_density
    if has_density:
        grid = sample_grid(new_space)
        if not np.any(m.eval_density(grid) > 0):
            try:
                alive = mass_on(m, window) > 0
            except (NonConvergence, NonFinite):
                alive = True
            if not alive:
                has_density = False
    if not has_density and not atoms:
        raise EmptyRestriction(f"restriction to {window} is the zero measure")
    hint = m.mass_hint if window.contains_interval(_space_interval(m.space)) else None
    source = dict(m.source) if m.source is not None else None
    return replace(
        m,
        space=new_space,
        density=m.density if has_density else None,
        log_density=m.log_density if has_density else None,
        atoms=atoms,
        mass_hint=hint,
        label=f"{m.label}|{window}" if m.label else "",
        source=source,
    )


def _space_interval(space: ParameterSpace) -> Interval:
    if isinstance(space, Continuous):
        return space.interval
    return Interval(-math.inf, math.inf)


def weight_by(
    m: RadonMeasure,
    g: Density,
    *,
    log_g: Density | None = None,
    landmarks: Sequence[float] = (),
) -> RadonMeasure:
    """The measure g·m: density times g, atom weights times g at the atom.

    Raises:
        ZeroResult: The product vanishes on the sample grid and at every atom.
    """
    density = log_density = None
    if m.has_density:
        base_density = m.eval_density

        def density(x: np.ndarray) -> np.ndarray:
            return np.asarray(g(x), dtype=float) * base_density(x)

        if m.log_density is not None or log_g is not None:
            base_log = m.eval_log_density

            def log_density(x: np.ndarray) -> np.ndarray:
                with np.errstate(divide="ignore"):
                    lg = log_g(x) if log_g is not None else np.log(np.asarray(g(x), dtype=float))
                return lg + base_log(x)

    atoms = []
    for a in m.atoms:
        w = float(np.asarray(g(np.array([a.location])))[0]) * a.weight
        if w < 0:
            raise MeasureError("weight function is negative at an atom")
        if w > 0:
            atoms.append(Atom(a.location, w))
    has_density = density is not None
    if has_density:
        grid = sample_grid(m.space, 4097)
        with np.errstate(all="ignore"):
            vals = density(grid)
        if np.any(vals < 0):
            raise MeasureError("weight function is negative on the space")
        if not np.any(vals > 0):
            has_density = False
    if not has_density and not atoms:
        raise ZeroResult("weighted measure vanishes")
    marks = tuple(m.landmarks) + tuple(landmarks)
    return RadonMeasure(
        space=m.space,
        density=density if has_density else None,
        log_density=log_density if has_density else None,
        atoms=tuple(atoms),
        mass_hint=None,
        landmarks=marks,
        label=f"g*{m.label}" if m.label else "",
    )


@dataclass(frozen=True, eq=False)
class Homeomorphism:
    """A monotone bijection between intervals with its inverse Jacobian.

    The inverse is checked against the forward map on a grid of the codomain.
    """

    forward: Density
    inverse: Density
    inverse_derivative_abs: Density
    domain: Interval
    codomain: Interval
    name: str = ""

    def __post_init__(self) -> None:
        grid = sample_grid(Continuous(self.codomain), 257)
        with np.errstate(all="ignore"):
            pre = np.asarray(self.inverse(grid), dtype=float)
            keep = np.isfinite(pre) & (pre != 0)
            grid, pre = grid[keep], pre[keep]
            back = np.asarray(self.forward(pre), dtype=float)
            jac = np.asarray(self.inverse_derivative_abs(grid), dtype=float)
        ok = np.isfinite(back) & (np.abs(back - grid) <= 1e-9 * np.maximum(1.0, np.abs(grid)))
        if grid.size < 16 or not ok.all():
            raise MeasureError(f"homeomorphism {self.name} fails forward(inverse(eta)) = eta")
        if not np.all(jac[np.isfinite(jac)] > 0):
            raise MeasureError(f"homeomorphism {self.name} has a non-positive inverse Jacobian")


def identity_map(iv: Interval) -> Homeomorphism:
    return Homeomorphism(lambda x: x, lambda y: y, lambda y: np.ones_like(y), iv, iv, "identity")


def reciprocal_map() -> Homeomorphism:
    pos = Interval.positive()
    return Homeomorphism(
        lambda x: 1.0 / x, lambda y: 1.0 / y, lambda y: 1.0 / (y * y), pos, pos, "reciprocal"
    )


def log_map() -> Homeomorphism:
    return Homeomorphism(
        np.log, np.exp, np.exp, Interval.positive(), Interval.real_line(), "log"
    )


def exp_map() -> Homeomorphism:
    return Homeomorphism(
        np.exp, np.log, lambda y: 1.0 / y, Interval.real_line(), Interval.positive(), "exp"
    )


def affine_map(slope: float, intercept: float, domain: Interval) -> Homeomorphism:
    if slope == 0:
        raise ValueError("affine map needs a nonzero slope")
    lo = slope * domain.lower + intercept
    hi = slope * domain.upper + intercept
    if slope > 0:
        codomain = Interval(lo, hi, domain.lower_open, domain.upper_open)
    else:
        codomain = Interval(hi, lo, domain.upper_open, domain.lower_open)
    return Homeomorphism(
        lambda x: slope * x + intercept,
        lambda y: (y - intercept) / slope,
        lambda y: np.full_like(np.asarray(y, dtype=float), 1.0 / abs(slope)),
        domain,
        codomain,
        f"affine({slope:g},{intercept:g})",
    )


def _image_interval(h: Homeomorphism, iv: Interval) -> Interval:
    if iv == h.domain:
        return h.codomain
    probe = np.array([_inner_point(iv), _inner_point(iv) + 1e-6 * max(1.0, abs(_inner_point(iv)))])
    increasing = float(np.diff(h.forward(probe))[0]) > 0
    low_end = h.codomain.lower if increasing else h.codomain.upper
    high_end = h.codomain.upper if increasing else h.codomain.lower
    a = float(h.forward(np.array([iv.lower]))[0]) if math.isfinite(iv.lower) else low_end
    b = float(h.forward(np.array([iv.upper]))[0]) if math.isfinite(iv.upper) else high_end
    if increasing:
        return Interval(a, b, iv.lower_open, iv.upper_open)
    return Interval(b, a, iv.upper_open, iv.lower_open)


def _inner_point(iv: Interval) -> float:
    if iv.is_bounded:
        return 0.5 * (iv.lower + iv.upper)
    if math.isfinite(iv.lower):
        return iv.lower + 1.0
    if math.isfinite(iv.upper):
        return iv.upper - 1.0
    return 0.0


def pushforward(m: RadonMeasure, h: Homeomorphism) -> RadonMeasure:
    """Image measure under ``h``: density(h^-1(eta)) * |d h^-1 / d eta|.

    Raises:
        DomainMismatch: ``h`` is not defined on the whole space of ``m``.
    """
    if not isinstance(m.space, Continuous):
        raise DomainMismatch("pushforward is implemented for continuous spaces only")
    if not h.domain.contains_interval(m.space.interval):
        raise DomainMismatch(f"map {h.name} with domain {h.domain} does not cover {m.space.interval}")
    iv = m.space.interval
    codomain = _image_interval(h, iv)
    density = log_density = None
    if m.density is not None:
        base = m.density

        def density(y: np.ndarray) -> np.ndarray:
            return base(h.inverse(y)) * h.inverse_derivative_abs(y)

    if m.log_density is not None:
        base_log = m.log_density

        def log_density(y: np.ndarray) -> np.ndarray:
            return base_log(h.inverse(y)) + np.log(h.inverse_derivative_abs(y))

    with np.errstate(all="ignore"):
        marks = [float(h.forward(np.array([p]))[0]) for p in m.landmarks if iv.contains(p)]
    atoms = tuple(Atom(float(h.forward(np.array([a.location]))[0]), a.weight) for a in m.atoms)
    return RadonMeasure(
        space=Continuous(codomain),
        density=density,
        log_density=log_density,
        atoms=atoms,
        mass_hint=m.mass_hint,
        landmarks=tuple(marks),
        label=f"{h.name}#{m.label}" if m.label else "",
    )


# --- summaries --------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Summary:
    """Mass, moments and median of a measure.

    For a finite measure the moments are those of the normalized measure. For
    an infinite one only the raw first moment is reported, when it exists.
    ``mean`` is +-inf when the defining integral diverges on one side and None
    when it is undefined or could not be decided.
    """

    mass: MassClass
    mean: float | None
    variance: float | None
    median: float | None
    cdf_at: Callable[[float], float] | None


def _split_moment(m: RadonMeasure, weight: Density, center: float = 0.0) -> float | None:
    """Integral of weight * density, returning +-inf for one-sided divergence."""
    if isinstance(m.space, Discrete):
        try:
            return density_integral(m, None, weight)
        except NonConvergence:
            return None
    iv = m.space.interval
    sides = []
    if iv.lower < center:
        sides.append(_piece(m.space, iv.lower, min(center, iv.upper), iv.lower_open, False))
    if iv.upper > center:
        sides.append(_piece(m.space, max(center, iv.lower), iv.upper, False, iv.upper_open))
    total = 0.0
    infinities = set()
    dens = m.eval_density

    def integrand(x: np.ndarray) -> np.ndarray:
        return weight(x) * dens(x)

    for piece in sides:
        if piece is None:
            continue
        try:
            total += numerics.integrate(integrand, piece, points=m.landmarks).value
        except (NonConvergence, NonFinite):
            abs_f = lambda x: np.abs(integrand(x))  # noqa: E731
            try:
                cls = numerics.improper_mass(abs_f, piece)
            except Inconclusive:
                return None
            if not isinstance(cls, Infinite):
                return None
            sign = float(weight(np.array([_inner_point(piece)]))[0])
            infinities.add(1.0 if sign >= 0 else -1.0)
    if len(infinities) > 1:
        return None
    if infinities:
        return math.inf * infinities.pop()
    return total


def summary(m: RadonMeasure, *, median_tol: float = 1e-12) -> Summary:
    mass = total_mass(m)
    atom_pos = [(a.location, a.weight) for a in m.atoms]
    if isinstance(mass, Finite):
        z = normalizing_constant(m)
        raw1 = _split_moment(m, lambda x: x) if m.has_density else 0.0
        if raw1 is None or math.isinf(raw1):
            mean = raw1
            variance = math.inf if raw1 is not None else None
        else:
            mean = (raw1 + sum(loc * w for loc, w in atom_pos)) / z
            centered = (
                _split_moment(m, lambda x: (x - mean) ** 2, mean) if m.has_density else 0.0
            )
            if centered is None:
                variance = None
            else:
                variance = (centered + sum((loc - mean) ** 2 * w for loc, w in atom_pos)) / z

        def cdf_at(t: float) -> float:
            return min(1.0, max(0.0, mass_on(m, Interval(-math.inf, t, True, False)) / z))

        median = _median(m, cdf_at, median_tol)
        return Summary(mass, mean, variance, median, cdf_at)
    raw1 = _split_moment(m, lambda x: x) if m.has_density else 0.0
    if raw1 is not None and math.isfinite(raw1):
        raw1 += sum(loc * w for loc, w in atom_pos)
    return Summary(mass, raw1, None, None, None)


def _median(m: RadonMeasure, cdf_at: Callable[[float], float], tol: float) -> float | None:
    if isinstance(m.space, Discrete):
        pts = m.space.points_in(0.0, 1e6) if m.space.support is None else np.array(m.space.support)
        for p in pts:
            if cdf_at(float(p)) >= 0.5:
                return float(p)
        return None
    iv = m.space.interval
    try:
        return numerics.find_quantile(cdf_at, 0.5, iv, tol)
    except Exception:  # noqa: BLE001 - a median is optional in a summary
        return None


def cdf(m: RadonMeasure, t: float) -> float:
    """Normalized cdf Pi((-inf, t]) / Pi(space) of a finite measure."""
    return mass_on(m, Interval(-math.inf, t, True, False)) / normalizing_constant(m)


def replace_hint(m: RadonMeasure, hint: MassClass | None) -> RadonMeasure:
    return replace(m, mass_hint=hint)
