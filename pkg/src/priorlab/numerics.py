"""Deterministic one-dimensional quadrature, series summation and quantiles.

Integrands are called with a 1-D ``numpy`` array of nodes and must return an
array of the same shape. Scalar-only callables are detected and evaluated node
by node, which is correct but slow.

The bounded kernel is a globally adaptive Gauss-Kronrod (7, 15) scheme. Open
finite endpoints are treated as potentially singular: panels are laid out
geometrically (ratio 1/2) toward the endpoint, and the sliver between the
endpoint and the innermost panel is closed analytically from a local fit of
``log|f|`` to ``c0 + (p - 1) log s + c1 s + c2 s^2``. This is what makes
integrands such as ``theta**(1e-4 - 1)`` tractable in double precision, where
most of the mass sits below the smallest representable offset from the
endpoint.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np

from .errors import Inconclusive, NonConvergence, NonFinite, NonIntegrable, NotBracketed

Integrand = Callable[[np.ndarray], np.ndarray]

DEFAULT_ABS_TOL = 1e-10
DEFAULT_REL_TOL = 1e-8
PANEL_BUDGET = 100_000
DIVERGENCE_CEILING = 1e12

# Kronrod 15-point abscissae on [-1, 1]; odd positions carry the Gauss 7-point rule.
_XK_HALF = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
])
_WK_HALF = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG_HALF = np.array([
    0.0,
    0.129484966168869693270611432679082,
    0.0,
    0.279705391489276667901467771423780,
    0.0,
    0.381830050505118944950369775488975,
    0.0,
    0.417959183673469387755102040816327,
])

XK = np.concatenate([-_XK_HALF[:-1], _XK_HALF[::-1]])
WK = np.concatenate([_WK_HALF[:-1], _WK_HALF[::-1]])
WG = np.concatenate([_WG_HALF[:-1], _WG_HALF[::-1]])

# Offsets below 2**30 ulps of the endpoint would put nodes on a visibly coarse lattice.
_ULP_FACTOR = 2.0**30
_DEEPEST_OFFSET = 1e-280
_MAPPED_FLOOR = 1e-150
_LADDER_STEP = 2.0**-20


@dataclass(frozen=True)
class Interval:
    """A real interval whose endpoints may be infinite.

    Infinite endpoints are always open; passing ``lower_open=False`` with an
    infinite lower bound is silently normalized.
    """

    lower: float
    upper: float
    lower_open: bool = False
    upper_open: bool = False

    def __post_init__(self) -> None:
        lo, hi = float(self.lower), float(self.upper)
        if math.isnan(lo) or math.isnan(hi):
            raise ValueError("interval endpoints must not be NaN")
        if not lo < hi:
            raise ValueError(f"interval needs lower < upper, got [{lo}, {hi}]")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)
        if math.isinf(lo):
            object.__setattr__(self, "lower_open", True)
        if math.isinf(hi):
            object.__setattr__(self, "upper_open", True)

    @classmethod
    def closed(cls, lower: float, upper: float) -> Interval:
        return cls(lower, upper, False, False)

    @classmethod
    def open(cls, lower: float, upper: float) -> Interval:
        return cls(lower, upper, True, True)

    @classmethod
    def real_line(cls) -> Interval:
        return cls(-math.inf, math.inf, True, True)

    @classmethod
    def positive(cls) -> Interval:
        return cls(0.0, math.inf, True, True)

    @property
    def is_bounded(self) -> bool:
        return math.isfinite(self.lower) and math.isfinite(self.upper)

    @property
    def length(self) -> float:
        return self.upper - self.lower

    def contains(self, x: float) -> bool:
        if x < self.lower or x > self.upper:
            return False
        if x == self.lower and self.lower_open:
            return False
        if x == self.upper and self.upper_open:
            return False
        return True

    def contains_interval(self, other: Interval) -> bool:
        """True when ``other`` is a subset of this interval."""
        if other.lower < self.lower or other.upper > self.upper:
            return False
        if other.lower == self.lower and self.lower_open and not other.lower_open:
            return False
        if other.upper == self.upper and self.upper_open and not other.upper_open:
            return False
        return True

    def intersect(self, other: Interval) -> Interval | None:
        """Return the intersection, or None when it has empty interior."""
        if other.lower > self.lower or (other.lower == self.lower and other.lower_open):
            lo, lo_open = other.lower, other.lower_open
        else:
            lo, lo_open = self.lower, self.lower_open
        if other.upper < self.upper or (other.upper == self.upper and other.upper_open):
            hi, hi_open = other.upper, other.upper_open
        else:
            hi, hi_open = self.upper, self.upper_open
        if not lo < hi:
            return None
        return Interval(lo, hi, lo_open, hi_open)

    def with_open_ends(self) -> Interval:
        """Same endpoints, both open; used when a density may be singular there."""
        return Interval(self.lower, self.upper, True, True)

    def __str__(self) -> str:
        left = "(" if self.lower_open else "["
        right = ")" if self.upper_open else "]"
        return f"{left}{self.lower:g}, {self.upper:g}{right}"


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error_estimate: float
    subdivisions: int
    converged: bool


@dataclass(frozen=True)
class Finite:
    """Finite, strictly positive total mass."""

    value: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.value) and self.value > 0):
            raise ValueError(f"Finite mass must be positive and finite, got {self.value}")


@dataclass(frozen=True)
class Infinite:
    """Infinite total mass."""


@dataclass(frozen=True)
class Zero:
    """The zero measure (rejected by measure constructors, reported by diagnostics)."""


MassClass = Finite | Infinite | Zero


def evaluate_nodes(f: Integrand, x: np.ndarray) -> np.ndarray:
    """Evaluate ``f`` on an array of nodes, falling back to a scalar loop."""
    try:
        y = f(x)
        y = np.asarray(y, dtype=float)
    except TypeError:
        y = None
    if y is None or y.shape != x.shape:
        y = np.array([float(f(float(v))) for v in x.ravel()], dtype=float).reshape(x.shape)
    return y


def _checked(f: Integrand, x: np.ndarray) -> np.ndarray:
    with np.errstate(all="ignore"):
        y = evaluate_nodes(f, x)
    bad = ~np.isfinite(y)
    if bad.any():
        node = float(x.ravel()[np.argmax(bad.ravel())])
        raise NonFinite(f"integrand is not finite at node {node!r}", node)
    return y


def _gk_panels(f: Integrand, lo: np.ndarray, hi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    half = 0.5 * (hi - lo)
    center = lo + half
    nodes = center[:, None] + half[:, None] * XK[None, :]
    y = _checked(f, nodes.ravel()).reshape(nodes.shape)
    kronrod = half * (y @ WK)
    gauss = half * (y @ WG)
    return kronrod, np.abs(kronrod - gauss)


def _splittable(lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    scale = np.maximum(np.abs(lo), np.abs(hi))
    return (hi - lo) > 64.0 * np.spacing(scale) + 1e-300


def _adaptive(
    f: Integrand,
    breaks: np.ndarray,
    abs_tol: float,
    rel_tol: float,
    extra_value: float,
    extra_error: float,
    budget: int,
) -> tuple[float, float, int, bool]:
    lo, hi = breaks[:-1].copy(), breaks[1:].copy()
    val, err = _gk_panels(f, lo, hi)
    used = lo.size
    while True:
        total = float(val.sum()) + extra_value
        total_err = float(err.sum()) + extra_error
        tol = max(abs_tol, rel_tol * abs(total))
        if total_err <= tol:
            return total, total_err, used, True
        share = max(tol - extra_error, 0.0) / lo.size
        pick = (err > share) & _splittable(lo, hi)
        if not pick.any():
            return total, total_err, used, False
        count = int(pick.sum())
        if used + 2 * count > budget:
            order = np.argsort(-np.where(pick, err, -1.0), kind="stable")
            room = (budget - used) // 2
            if room <= 0:
                return total, total_err, used, False
            keep = np.zeros_like(pick)
            keep[order[:room]] = True
            pick &= keep
        mid = 0.5 * (lo[pick] + hi[pick])
        new_lo = np.concatenate([lo[pick], mid])
        new_hi = np.concatenate([mid, hi[pick]])
        new_val, new_err = _gk_panels(f, new_lo, new_hi)
        keep = ~pick
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        val = np.concatenate([val[keep], new_val])
        err = np.concatenate([err[keep], new_err])
        order = np.argsort(lo, kind="stable")
        lo, hi, val, err = lo[order], hi[order], val[order], err[order]
        used += new_lo.size


@dataclass(frozen=True)
class _Tail:
    offset: float
    value: float
    error: float
    exponent: float


def _power_fit(f: Integrand, edge: float, direction: float, delta: float) -> tuple[float, float] | None:
    """Integral of f over the sliver of width ``delta`` at ``edge``.

    Returns (value, exponent) or None when the local model does not apply.
    """
    nominal = delta * np.array([1.0, 0.5, 0.25, 0.125])
    theta = edge + direction * nominal
    offsets = (theta - edge) * direction
    if np.any(offsets <= 0) or np.any(np.diff(offsets) >= 0):
        return None
    with np.errstate(all="ignore"):
        y = evaluate_nodes(f, theta)
    if not np.all(np.isfinite(y)):
        return None
    if np.all(y == 0):
        return 0.0, math.inf
    if np.any(y == 0) or not (np.all(y > 0) or np.all(y < 0)):
        return None
    sign = 1.0 if y[0] > 0 else -1.0
    scaled = offsets / offsets[0]
    design = np.column_stack([np.ones(4), np.log(scaled), scaled, scaled**2])
    try:
        c0, q, k1, k2 = np.linalg.solve(design, np.log(np.abs(y)))
    except np.linalg.LinAlgError:
        return None
    p = q + 1.0
    if not math.isfinite(p) or p <= 1e-12:
        return math.inf * sign, p
    with np.errstate(all="ignore"):
        series = 1.0 / p + k1 / (p + 1.0) + (0.5 * k1 * k1 + k2) / (p + 2.0)
        value = sign * offsets[0] * math.exp(c0) * series if c0 < 700 else math.inf * sign
    if p > 50.0:
        # Faster than any moderate power: the sliver is bounded by its outer edge value.
        value = sign * min(abs(value), abs(y[0]) * offsets[0])
    return float(value), float(p)


def _endpoint_tail(
    f: Integrand,
    edge: float,
    direction: float,
    width: float,
    abs_tol: float,
    rel_tol: float,
    floor: float,
) -> _Tail:
    start = width * _LADDER_STEP
    deepest = max(floor, _ULP_FACTOR * float(np.spacing(abs(edge))) if edge != 0 else 0.0)
    deepest = min(deepest, start)
    best: _Tail | None = None
    last_exponent = math.nan
    delta = start
    while True:
        here = _power_fit(f, edge, direction, delta)
        deeper = _power_fit(f, edge, direction, 0.5 * delta)
        if here is not None and deeper is not None and math.isfinite(here[0]) and math.isfinite(deeper[0]):
            a, b = sorted((edge + direction * 0.5 * delta, edge + direction * delta))
            try:
                piece, piece_err = _gk_panels(f, np.array([a]), np.array([b]))
            except NonFinite:
                piece = None
            if piece is not None:
                alt = deeper[0] + float(piece[0])
                error = abs(here[0] - alt) + float(piece_err[0])
                candidate = _Tail(delta, here[0], error, here[1])
                if best is None or candidate.error < best.error:
                    best = candidate
                if error <= 0.1 * max(abs_tol, rel_tol * abs(here[0])):
                    return candidate
        if here is not None:
            last_exponent = here[1]
        next_delta = delta * _LADDER_STEP
        if next_delta < deepest:
            if delta > deepest:
                next_delta = deepest
            else:
                break
        delta = next_delta
    if math.isfinite(last_exponent) and last_exponent <= 1e-12:
        raise NonIntegrable(
            f"integrand is not integrable at endpoint {edge!r} (local exponent {last_exponent:.3g})"
        )
    if best is None:
        raise NonConvergence(
            f"integrand is not integrable at endpoint {edge!r} (local exponent {last_exponent:.3g})"
        )
    return best


def _integrate_bounded(
    f: Integrand,
    a: float,
    b: float,
    singular_a: bool,
    singular_b: bool,
    abs_tol: float,
    rel_tol: float,
    budget: int,
    floor: tuple[float, float] = (_DEEPEST_OFFSET, _DEEPEST_OFFSET),
) -> tuple[float, float, int, bool]:
    width = b - a
    tail_value = tail_error = 0.0
    start, stop = a, b
    left: list[float] = []
    right: list[float] = []
    if singular_a:
        tail = _endpoint_tail(f, a, 1.0, width, abs_tol, rel_tol, floor[0] * max(width, 1.0))
        tail_value += tail.value
        tail_error += tail.error
        start = a + tail.offset
        step = tail.offset
        while a + 2 * step < a + 0.5 * width:
            step *= 2.0
            left.append(a + step)
    if singular_b:
        tail = _endpoint_tail(f, b, -1.0, width, abs_tol, rel_tol, floor[1] * max(width, 1.0))
        tail_value += tail.value
        tail_error += tail.error
        stop = b - tail.offset
        step = tail.offset
        while b - 2 * step > b - 0.5 * width:
            step *= 2.0
            right.append(b - step)
    if singular_a or singular_b:
        inner = [a + 0.5 * width]
    else:
        inner = list(a + width * np.array([0.25, 0.5, 0.75]))
    breaks = np.unique(np.array([start, *left, *inner, *right, stop]))
    breaks = breaks[(breaks >= start) & (breaks <= stop)]
    return _adaptive(f, breaks, abs_tol, rel_tol, tail_value, tail_error, budget)


def _integrate_right_ray(
    f: Integrand,
    c: float,
    singular_c: bool,
    abs_tol: float,
    rel_tol: float,
    budget: int,
) -> tuple[float, float, int, bool]:
    """Integral over [c, inf), or (c, inf) with a possibly singular c."""
    value = error = 0.0
    used = 0
    ok = True
    if singular_c:
        v, e, u, ok = _integrate_bounded(f, c, c + 1.0, True, False, 0.5 * abs_tol, rel_tol, budget)
        value, error, used = v, e, u
        c = c + 1.0

    def mapped(u: np.ndarray) -> np.ndarray:
        theta = c + (1.0 - u) / u
        return evaluate_nodes(f, theta) / (u * u)

    v, e, u, ok2 = _integrate_bounded(
        mapped, 0.0, 1.0, True, False, 0.5 * abs_tol, rel_tol, budget - used, (_MAPPED_FLOOR, 0.0)
    )
    return value + v, error + e, used + u, ok and ok2


def _spread_edges(edges: list[float]) -> list[float]:
    """Insert geometric breakpoints between finite same-sign edges far apart in ratio."""
    out = [edges[0]]
    for a, b in zip(edges[:-1], edges[1:]):
        if math.isfinite(a) and math.isfinite(b) and a * b > 0:
            lo, hi = sorted((abs(a), abs(b)))
            octaves = math.log2(hi) - math.log2(lo)
            if octaves > 4.0:
                count = min(int(octaves / 2.0), 400)
                mids = np.geomspace(lo, hi, count + 2)[1:-1]
                if a < 0:
                    mids = -mids[::-1]
                out.extend(float(v) for v in mids)
        out.append(b)
    return out


def integrate(
    f: Integrand,
    iv: Interval,
    abs_tol: float = DEFAULT_ABS_TOL,
    rel_tol: float = DEFAULT_REL_TOL,
    *,
    points: Sequence[float] = (),
    budget: int = PANEL_BUDGET,
    raise_on_failure: bool = True,
) -> QuadratureResult:
    """Integrate ``f`` over ``iv``.

    Open finite endpoints are handled as potentially singular. Half-lines are
    mapped onto (0, 1] by ``u = 1/(1 + theta - c)``; the whole line is split at
    zero. Extra ``points`` become panel boundaries, which helps when the
    integrand has features far from the origin.

    Args:
        f: Vectorized integrand.
        iv: Integration interval.
        abs_tol: Absolute error target.
        rel_tol: Relative error target.
        points: Optional interior breakpoints.
        budget: Maximum number of Gauss-Kronrod panels.
        raise_on_failure: Raise NonConvergence instead of returning an
            unconverged result.

    Returns:
        The integral with its error estimate.

    Raises:
        NonConvergence: Budget exhausted or a non-integrable endpoint.
        NonFinite: ``f`` produced NaN or an infinity at a node.
    """
    if abs_tol <= 0 or rel_tol <= 0:
        raise ValueError("tolerances must be positive")
    cuts = {float(p) for p in points if math.isfinite(p) and iv.lower < p < iv.upper}
    if math.isinf(iv.lower) and math.isinf(iv.upper):
        cuts.add(0.0)
    edges = _spread_edges([iv.lower, *sorted(cuts), iv.upper])
    pieces = len(edges) - 1
    piece_tol = abs_tol / pieces
    total = total_err = 0.0
    used = 0
    converged = True
    for left, right in zip(edges[:-1], edges[1:]):
        sing_left = left == iv.lower and iv.lower_open
        sing_right = right == iv.upper and iv.upper_open
        remaining = max(budget - used, 1)
        if math.isfinite(left) and math.isfinite(right):
            v, e, u, ok = _integrate_bounded(f, left, right, sing_left, sing_right, piece_tol, rel_tol, remaining)
        elif math.isfinite(left):
            v, e, u, ok = _integrate_right_ray(f, left, sing_left, piece_tol, rel_tol, remaining)
        elif math.isfinite(right):
            def reflected(t: np.ndarray, _f: Integrand = f) -> np.ndarray:
                return evaluate_nodes(_f, -t)

            v, e, u, ok = _integrate_right_ray(reflected, -right, sing_right, piece_tol, rel_tol, remaining)
        else:
            raise AssertionError("unreachable: the whole line is always split")
        total += v
        total_err += e
        used += u
        converged = converged and ok
    converged = converged and total_err <= max(abs_tol, rel_tol * abs(total))
    result = QuadratureResult(total, total_err, used, converged)
    if not converged and raise_on_failure:
        raise NonConvergence(
            f"quadrature on {iv} did not converge: value {total!r}, error {total_err:.3g}", result
        )
    return result


def sum_series(
    term: Integrand,
    support: Sequence[float] | np.ndarray | None = None,
    abs_tol: float = DEFAULT_ABS_TOL,
    rel_tol: float = DEFAULT_REL_TOL,
    *,
    max_terms: int = 10_000_000,
    raise_on_failure: bool = True,
) -> QuadratureResult:
    """Sum ``term`` over a finite support, or over 0, 1, 2, ... when support is None.

    The infinite sum stops once terms decrease geometrically and the
    extrapolated remainder is within tolerance.
    """
    if support is not None:
        pts = np.asarray(support, dtype=float)
        y = _checked(term, pts) if pts.size else np.zeros(0)
        return QuadratureResult(float(y.sum()), 0.0, pts.size, True)
    total = 0.0
    start = 0
    chunk = 4096
    chunks = 0
    while start < max_terms:
        k = np.arange(start, start + chunk, dtype=float)
        y = _checked(term, k)
        total += float(y.sum())
        chunks += 1
        start += chunk
        a, b = abs(y[-2]), abs(y[-1])
        if b == 0.0 and np.all(y[-64:] == 0.0) and total != 0.0:
            return QuadratureResult(total, 0.0, chunks, True)
        if a > 0 and b < a:
            ratio = b / a
            remainder = b * ratio / (1.0 - ratio)
            if remainder <= max(abs_tol, rel_tol * abs(total)) and np.all(np.diff(np.abs(y[-64:])) <= 0):
                return QuadratureResult(total, remainder, chunks, True)
        chunk *= 2
    result = QuadratureResult(total, math.inf, chunks, False)
    if raise_on_failure:
        raise NonConvergence("series did not converge within the term budget", result)
    return result


def _window_edges(iv: Interval, growth: float, j: int) -> tuple[float, float]:
    a, b = iv.lower, iv.upper
    if math.isfinite(a) and math.isfinite(b):
        d = 0.25 * (b - a) * growth ** (-j)
        return a + d, b - d
    if math.isfinite(a):
        return a + 0.5 * growth ** (-j), a + 2.0 * growth**j
    if math.isfinite(b):
        return b - 2.0 * growth**j, b - 0.5 * growth ** (-j)
    return -(growth**j), growth**j


def _edge_floor(x: float, width: float) -> float:
    return max(_ULP_FACTOR * float(np.spacing(abs(x))) if x != 0 else 0.0, _DEEPEST_OFFSET * width)


def improper_mass(
    f: Integrand,
    iv: Interval,
    window_growth: float = 2.0,
    stall_tol: float = 1e-9,
    *,
    ceiling: float = DIVERGENCE_CEILING,
    max_windows: int = 64,
) -> MassClass:
    """Classify the total mass of a nonnegative density on ``iv``.

    A direct quadrature over the whole interval is tried first: it settles
    Finite, or Infinite when an endpoint power-law fit is non-integrable.
    Otherwise integrates over an exhausting sequence of compact windows. Windows grow
    geometrically toward infinite endpoints and shrink their distance to
    finite endpoints geometrically.

    Returns:
        Finite(v) once window integrals stall or their increments decay
        geometrically; Infinite when they pass ``ceiling`` or keep growing by at
        least ``stall_tol`` without decaying increments over five windows;
        Zero when every window integral is zero and a sampling grid finds no
        positive value.

    Raises:
        Inconclusive: Neither pattern emerged within ``max_windows``.
    """
    if window_growth <= 1.0:
        raise ValueError("window_growth must exceed 1")
    try:
        direct = integrate(f, iv.with_open_ends(), 1e-14, 1e-11, raise_on_failure=False)
    except NonIntegrable:
        return Infinite()
    except (NonConvergence, NonFinite):
        direct = None
    if (
        direct is not None
        and 0.0 < direct.value <= ceiling
        and (direct.converged or direct.error_estimate <= 1e-8 * direct.value)
    ):
        return Finite(direct.value)
    scale = iv.length if iv.is_bounded else 1.0
    lo, hi = _window_edges(iv, window_growth, 0)
    try:
        mass = integrate(f, Interval.closed(lo, hi), 1e-14, 1e-11, raise_on_failure=False).value
    except NonFinite:
        return Infinite()
    increments: list[float] = []
    totals = [mass]
    lo_floor = _edge_floor(iv.lower, scale) if math.isfinite(iv.lower) else 0.0
    hi_floor = _edge_floor(iv.upper, scale) if math.isfinite(iv.upper) else 0.0
    stalls = 0
    for j in range(1, max_windows + 1):
        new_lo, new_hi = _window_edges(iv, window_growth, j)
        if math.isfinite(iv.lower) and new_lo - iv.lower < lo_floor:
            new_lo = lo
        if math.isfinite(iv.upper) and iv.upper - new_hi < hi_floor:
            new_hi = hi
        if new_lo == lo and new_hi == hi:
            break
        step = 0.0
        try:
            if new_lo < lo:
                step += integrate(f, Interval.closed(new_lo, lo), 1e-300, 1e-11, raise_on_failure=False).value
            if new_hi > hi:
                step += integrate(f, Interval.closed(hi, new_hi), 1e-300, 1e-11, raise_on_failure=False).value
        except NonFinite:
            return Infinite()
        lo, hi = new_lo, new_hi
        mass += step
        increments.append(step)
        totals.append(mass)
        if mass > ceiling:
            return Infinite()
        if mass <= 0.0:
            continue
        rel = step / mass
        stalls = stalls + 1 if rel <= stall_tol else 0
        if stalls >= 2:
            return _finite(f, iv, mass, 0.0)
        if len(increments) >= 6 and all(x > 0 for x in increments[-6:]):
            ratios = [increments[i] / increments[i - 1] for i in range(-5, 0)]
            spread = max(ratios) - min(ratios)
            if max(ratios) <= 0.999 and spread <= 1e-2 * max(ratios):
                r = ratios[-1]
                return _finite(f, iv, mass, increments[-1] * r / (1.0 - r))
            growth = [increments[i] / totals[i] for i in range(-5, 0)]
            if min(growth) >= stall_tol and min(ratios) >= 0.999 and spread <= 1e-2 * max(ratios):
                return Infinite()
    if all(t == 0.0 for t in totals):
        grid = _sample_grid(iv)
        with np.errstate(all="ignore"):
            values = evaluate_nodes(f, grid)
        if not np.any(values > 0):
            return Zero()
    raise Inconclusive(f"window integrals on {iv} neither stabilized nor diverged (last {mass!r})")


def _finite(f: Integrand, iv: Interval, window_mass: float, remainder: float) -> Finite:
    estimate = window_mass + remainder
    try:
        full = integrate(f, iv.with_open_ends(), 1e-14, 1e-11, raise_on_failure=False)
    except (NonConvergence, NonFinite):
        return Finite(estimate)
    if full.converged and abs(full.value - estimate) <= 1e-3 * estimate + 1e-12:
        return Finite(full.value)
    return Finite(estimate)


def _sample_grid(iv: Interval, count: int = 4097) -> np.ndarray:
    if iv.is_bounded:
        return np.linspace(iv.lower, iv.upper, count)[1:-1]
    t = np.linspace(-1.0, 1.0, count)[1:-1]
    mapped = np.sinh(t * 40.0)
    if math.isfinite(iv.lower):
        return iv.lower + np.abs(mapped) + 1e-300
    if math.isfinite(iv.upper):
        return iv.upper - np.abs(mapped) - 1e-300
    return mapped


def find_quantile(
    cdf: Callable[[float], float],
    p: float,
    iv: Interval,
    tol: float = 1e-10,
    *,
    max_iter: int = 2000,
) -> float:
    """Return t in ``iv`` with |cdf(t) - p| <= tol by bisection.

    Infinite endpoints are bracketed by doubling outward from the origin (or
    from the finite endpoint). When the cdf jumps across ``p`` the location of
    the jump is returned.

    Raises:
        NotBracketed: ``p`` is not between the cdf values at the bracket ends.
    """
    if not 0.0 < p < 1.0:
        raise NotBracketed(f"probability {p} is outside (0, 1)")
    lo, hi = _bracket(cdf, p, iv)
    f_lo, f_hi = cdf(lo), cdf(hi)
    if not f_lo <= p <= f_hi:
        raise NotBracketed(f"p={p} not in [{f_lo}, {f_hi}] on {iv}")
    if abs(f_lo - p) <= tol and iv.contains(lo):
        return lo
    if abs(f_hi - p) <= tol and iv.contains(hi):
        return hi
    mid = 0.5 * (lo + hi)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        value = cdf(mid)
        if abs(value - p) <= tol:
            return mid
        if value < p:
            lo = mid
        else:
            hi = mid
    return mid


def _bracket(cdf: Callable[[float], float], p: float, iv: Interval) -> tuple[float, float]:
    lo, hi = iv.lower, iv.upper
    if math.isinf(lo) or math.isinf(hi):
        anchor = lo if math.isfinite(lo) else (hi if math.isfinite(hi) else 0.0)
        step = 1.0
        if math.isinf(lo):
            lo = anchor - step if math.isfinite(hi) else -step
            while cdf(lo) > p:
                step *= 2.0
                lo = (anchor if math.isfinite(hi) else 0.0) - step
                if step > 1e300:
                    raise NotBracketed(f"p={p} below the cdf range on {iv}")
        step = 1.0
        if math.isinf(hi):
            hi = anchor + step if math.isfinite(iv.lower) else step
            while cdf(hi) < p:
                step *= 2.0
                hi = (anchor if math.isfinite(iv.lower) else 0.0) + step
                if step > 1e300:
                    raise NotBracketed(f"p={p} above the cdf range on {iv}")
    return lo, hi
