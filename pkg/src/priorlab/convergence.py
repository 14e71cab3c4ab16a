"""Finite-grid evidence for q-vague convergence of measure sequences.

Every check evaluates a family on an increasing grid of indices n and
classifies the tail of the resulting trajectories. Verdicts are evidence, not
proofs; reports always carry the raw trajectories and the thresholds used.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import ImproperMember, MedianDrift, MissingScalingHint, NullProbe
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
    summary,
    total_mass,
)
from .numerics import Finite, Interval

DEFAULT_GRID = (1, 3, 10, 31, 100, 316, 1000, 3162, 10000)
NULL_THRESHOLD = 1e-13


@dataclass(frozen=True)
class NGrid:
    values: tuple[int, ...] = DEFAULT_GRID

    def __post_init__(self) -> None:
        vals = tuple(int(v) for v in self.values)
        if len(vals) < 4:
            raise ValueError("an index grid needs at least 4 values")
        if vals[0] < 1 or any(b <= a for a, b in zip(vals, vals[1:])):
            raise ValueError("grid values must be strictly increasing positive integers")
        if vals[-1] < 100 * vals[0]:
            raise ValueError("grid must span at least two decades")
        object.__setattr__(self, "values", vals)

    def __iter__(self):
        return iter(self.values)

    def __len__(self) -> int:
        return len(self.values)

    def tail_indices(self) -> list[int]:
        """Indices of grid points within the last decade (n >= n_max / 10)."""
        top = self.values[-1]
        idx = [i for i, n in enumerate(self.values) if n * 10 >= top]
        return idx if len(idx) >= 2 else [len(self.values) - 2, len(self.values) - 1]


@dataclass(frozen=True)
class Thresholds:
    tail_tol: float = 1e-2
    match_factor: float = 3.0
    divergence_factor: float = 10.0
    divergence_points: int = 3

    def to_dict(self) -> dict[str, float]:
        return {
            "tail_tol": self.tail_tol,
            "match_factor": self.match_factor,
            "divergence_factor_per_decade": self.divergence_factor,
            "divergence_points": self.divergence_points,
        }


# --- verdicts -------------------------------------------------------------------------


@dataclass(frozen=True)
class ConvergesTo:
    candidate_confirmed: bool | None
    scaling: tuple[tuple[int, float], ...]
    log_scaling: tuple[tuple[int, float], ...] = ()

    name = "ConvergesTo"

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.name,
            "candidate_confirmed": self.candidate_confirmed,
            "scaling": [[n, a] for n, a in self.scaling],
            "log_scaling": [[n, a] for n, a in self.log_scaling],
        }


@dataclass(frozen=True)
class Diverges:
    probe: str
    reference: str
    trajectory: tuple[tuple[int, float], ...]

    name = "Diverges"

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.name,
            "witness": {"probe": self.probe, "reference": self.reference},
            "trajectory": [[n, r] for n, r in self.trajectory],
        }


@dataclass(frozen=True)
class NoVerdict:
    reason: str

    name = "Inconclusive"

    def to_dict(self) -> dict[str, Any]:
        return {"kind": self.name, "reason": self.reason}


Verdict = ConvergesTo | Diverges | NoVerdict


@dataclass(frozen=True)
class ProbeTrace:
    probe: TestFunction
    ratios: tuple[float, ...]
    drift: float
    candidate_ratio: float | None = None
    matches_candidate: bool | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "probe": self.probe.label,
            "ratios": list(self.ratios),
            "tail_drift": self.drift,
            "candidate_ratio": self.candidate_ratio,
            "matches_candidate": self.matches_candidate,
        }


@dataclass(frozen=True)
class ConvergenceReport:
    family: str
    candidate: str | None
    grid: NGrid
    probes: tuple[TestFunction, ...]
    reference: TestFunction
    per_probe: tuple[ProbeTrace, ...]
    verdict: Verdict
    thresholds: Thresholds

    def trace(self, label: str) -> ProbeTrace:
        for t in self.per_probe:
            if t.probe.label == label:
                return t
        raise KeyError(label)

    def to_dict(self) -> dict[str, Any]:
        return {
            "family": self.family,
            "candidate": self.candidate,
            "grid": list(self.grid.values),
            "reference_probe": self.reference.label,
            "probes": [p.to_dict() for p in self.probes],
            "per_probe": [t.to_dict() for t in self.per_probe],
            "verdict": self.verdict.to_dict(),
            "thresholds": self.thresholds.to_dict(),
        }


# --- probes ---------------------------------------------------------------------------


def default_probes(space: ParameterSpace) -> tuple[list[TestFunction], TestFunction]:
    """Seven hats adapted to the space, and the reference probe among them."""
    if isinstance(space, Discrete):
        if space.support is None:
            probes = [TestFunction.hat(c, 1.0) for c in (0, 1, 2, 3, 5, 8, 13)]
            return probes, probes[1]
        pts = np.array(space.support)[:7]
        gap = float(np.min(np.diff(space.support))) if len(space.support) > 1 else 1.0
        probes = [TestFunction.hat(float(c), gap) for c in pts]
        return probes, probes[len(probes) // 2]
    iv = space.interval
    if iv == Interval.real_line():
        probes = [TestFunction.hat(c, 1.0) for c in (-8, -4, -1, 0, 1, 4, 8)]
        return probes, probes[3]
    if iv.is_bounded:
        lo, width = iv.lower, iv.length
        rel = (0.05, 0.2, 0.35, 0.5, 0.65, 0.8, 0.95)
        probes = [TestFunction.hat(lo + r * width, 0.5 * min(r, 1 - r) * width) for r in rel]
        return probes, probes[3]
    offsets = np.logspace(-2, 2, 7)
    if math.isfinite(iv.lower):
        probes = [TestFunction.hat(iv.lower + c, 0.5 * c) for c in offsets]
    else:
        probes = [TestFunction.hat(iv.upper - c, 0.5 * c) for c in offsets[::-1]]
    return probes, probes[3]


# --- scaling and q-vague -------------------------------------------------------------


def estimate_scaling(fam: MeasureFamily, candidate: RadonMeasure, h0: TestFunction, n: int) -> float:
    """a_n = Pi(h0) / Pi_n(h0).

    Raises:
        NullProbe: Either integral is below 1e-13.
    """
    top = math.exp(log_integrate_probe(candidate, h0))
    bottom = math.exp(log_integrate_probe(fam.member(n), h0))
    if top < NULL_THRESHOLD or bottom < NULL_THRESHOLD:
        raise NullProbe(f"probe {h0.label} is null: candidate {top:.3g}, member(n={n}) {bottom:.3g}")
    return top / bottom


def _safe_exp(x: float) -> float:
    return math.exp(x) if x < 709.0 else math.inf


def _tail_drift(values: Sequence[float], tail: Sequence[int]) -> float:
    last = values[tail[-1]]
    if not all(math.isfinite(values[i]) for i in tail):
        return math.inf
    spread = max(abs(values[i] - last) for i in tail)
    return spread / max(abs(last), 1.0)


def _growth_witness(
    log_ratios: Sequence[float], grid: Sequence[int], points: int, factor: float
) -> bool:
    """Monotone growth by at least ``factor`` per decade over the last ``points`` grid points."""
    logs = log_ratios[-points:]
    ns = grid[-points:]
    if any(not math.isfinite(v) for v in logs):
        return False
    need = math.log(factor)
    for (a, b), (na, nb) in zip(zip(logs, logs[1:]), zip(ns, ns[1:])):
        decades = math.log10(nb / na)
        if b - a < need * decades:
            return False
    return True


def check_q_vague(
    fam: MeasureFamily,
    candidate: RadonMeasure | None = None,
    probes: Sequence[TestFunction] | None = None,
    grid: NGrid | None = None,
    tail_tol: float = 1e-2,
    *,
    reference: TestFunction | None = None,
    thresholds: Thresholds | None = None,
) -> ConvergenceReport:
    """Classify the probe ratios Pi_n(h) / Pi_n(h0) along the grid.

    Raises:
        NullProbe: The reference probe receives no mass from some member or
            from the candidate.
    """
    grid = grid or NGrid()
    th = thresholds or Thresholds(tail_tol=tail_tol)
    if probes is None:
        probes, default_ref = default_probes(fam.space)
        reference = reference or default_ref
    probes = list(probes)
    if reference is None:
        reference = probes[len(probes) // 2]
    if reference not in probes:
        probes.append(reference)
    if len(probes) < 5:
        raise ValueError("q-vague checks need at least 5 probes")

    ns = list(grid.values)
    tail = grid.tail_indices()
    log_ref = []
    log_table: list[list[float]] = []
    for n in ns:
        member = fam.member(n)
        lr = log_integrate_probe(member, reference)
        if lr == -math.inf:
            raise NullProbe(f"reference probe {reference.label} is null for member n={n}")
        log_ref.append(lr)
        log_table.append([log_integrate_probe(member, h) - lr for h in probes])

    cand_logs: list[float | None] = [None] * len(probes)
    cand_ref = None
    if candidate is not None:
        cand_ref = log_integrate_probe(candidate, reference)
        if cand_ref == -math.inf:
            raise NullProbe(f"reference probe {reference.label} is null for the candidate")
        cand_logs = [log_integrate_probe(candidate, h) - cand_ref for h in probes]

    traces = []
    witness: Diverges | None = None
    all_settled = True
    all_match = True
    for j, h in enumerate(probes):
        logs = [row[j] for row in log_table]
        ratios = [_safe_exp(v) for v in logs]
        drift = _tail_drift(ratios, tail)
        settled = drift <= th.tail_tol
        all_settled = all_settled and settled
        cratio = None
        match = False
        if cand_logs[j] is not None:
            cratio = _safe_exp(cand_logs[j])
            match = abs(ratios[-1] - cratio) <= th.match_factor * th.tail_tol * max(abs(cratio), 1.0)
            all_match = all_match and match
        if witness is None and _growth_witness(logs, ns, th.divergence_points, th.divergence_factor):
            witness = Diverges(h.label, reference.label, tuple(zip(ns, ratios)))
        traces.append(ProbeTrace(h, tuple(ratios), drift, cratio, match if cratio is not None else None))

    if witness is not None:
        verdict: Verdict = witness
    elif all_settled:
        if cand_ref is not None:
            log_a = [cand_ref - lr for lr in log_ref]
        else:
            log_a = [-lr for lr in log_ref]
        verdict = ConvergesTo(
            all_match if candidate is not None else None,
            tuple((n, _safe_exp(v)) for n, v in zip(ns, log_a)),
            tuple(zip(ns, log_a)),
        )
    else:
        worst = max(traces, key=lambda t: t.drift)
        verdict = NoVerdict(
            f"probe {worst.probe.label} drifts by {worst.drift:.3g} over the last decade "
            f"(tolerance {th.tail_tol:g}) without a monotone divergence witness"
        )
    return ConvergenceReport(
        fam.label,
        candidate.label if candidate is not None else None,
        grid,
        tuple(probes),
        reference,
        tuple(traces),
        verdict,
        th,
    )


# --- density criteria ------------------------------------------------------------------


@dataclass(frozen=True)
class Monotone:
    name = "Monotone"


@dataclass(frozen=True)
class Dominated:
    bound: Callable[[np.ndarray], np.ndarray]
    name = "Dominated"


@dataclass(frozen=True)
class CompactSup:
    windows: tuple[tuple[float, float], ...]
    name = "CompactSup"


Criterion = Monotone | Dominated | CompactSup


@dataclass(frozen=True)
class CriterionResult:
    criterion: str
    holds: bool
    diagnostics: dict[str, Any]

    def __bool__(self) -> bool:
        return self.holds

    def to_dict(self) -> dict[str, Any]:
        return {"criterion": self.criterion, "holds": self.holds, "diagnostics": self.diagnostics}


def scaled_density_table(fam: MeasureFamily, grid: NGrid, theta: np.ndarray) -> np.ndarray:
    """Rows a_n * pi_n(theta) over the grid, formed in log space."""
    if fam.scaling_hint is None:
        raise MissingScalingHint(f"family {fam.label} has no scaling hint")
    rows = []
    for n in grid.values:
        a = fam.scaling_hint(n)
        with np.errstate(all="ignore"):
            rows.append(np.exp(math.log(a) + fam.member(n).eval_log_density(theta)))
    return np.array(rows)


SUP_DECAY_LIMIT = 0.8


def check_density_criterion(
    fam: MeasureFamily,
    candidate: RadonMeasure,
    criterion: Criterion,
    grid: NGrid | None = None,
    theta_grid: Sequence[float] = (),
    tol: float = 1e-2,
) -> CriterionResult:
    """Check one of the pointwise sufficient conditions on a_n pi_n.

    Raises:
        MissingScalingHint: The family has no closed-form a_n.
    """
    grid = grid or NGrid()
    theta = np.asarray(theta_grid, dtype=float)
    if theta.size == 0:
        raise ValueError("theta_grid must be nonempty")
    table = scaled_density_table(fam, grid, theta)
    ns = list(grid.values)
    target = candidate.eval_density(theta)
    diag: dict[str, Any] = {"grid": ns, "theta": theta.tolist()}

    if isinstance(criterion, Monotone):
        steps = np.diff(table, axis=0)
        slack = 1e-12 * np.maximum(np.abs(table[1:]), 1e-300)
        nondecreasing = bool(np.all(steps >= -slack))
        positive = target > 0
        ratio = table[-1][positive] / target[positive]
        spread = float(ratio.max() / ratio.min() - 1.0) if ratio.size else math.inf
        diag.update(
            nondecreasing=nondecreasing,
            limit_ratio_spread=spread,
            limit_constant=float(np.median(ratio)) if ratio.size else None,
        )
        return CriterionResult("Monotone", nondecreasing and spread <= tol, diag)

    if isinstance(criterion, Dominated):
        bound = np.asarray(criterion.bound(theta), dtype=float)
        ok = [bool(np.all(row < bound)) for row in table]
        start = None
        for i in range(len(ok)):
            if all(ok[i:]):
                start = i
                break
        holds = start is not None and len(ok) - start >= 3
        diag.update(dominated=ok, threshold_n=ns[start] if start is not None else None)
        return CriterionResult("Dominated", holds, diag)

    if isinstance(criterion, CompactSup):
        windows = []
        holds = True
        for lo, hi in criterion.windows:
            inside = (theta >= lo) & (theta <= hi)
            if not inside.any():
                raise ValueError(f"window [{lo}, {hi}] holds no theta_grid point")
            sups = table[:, inside].max(axis=1)
            bounded, bound_est = _bounded_sequence(sups)
            windows.append(
                {"window": [lo, hi], "sup": sups.tolist(), "bounded": bounded, "extrapolated_bound": bound_est}
            )
            holds = holds and bounded
        diag["windows"] = windows
        return CriterionResult("CompactSup", holds, diag)
    raise TypeError(f"unknown criterion {criterion!r}")


def _bounded_sequence(values: np.ndarray, points: int = 4) -> tuple[bool, float]:
    """Whether a positive sequence levels off: its log increments shrink geometrically."""
    logs = np.log(values[-points:])
    if not np.all(np.isfinite(logs)):
        return False, math.inf
    inc = np.diff(logs)
    if np.all(inc <= 0):
        return True, float(values[-points:].max())
    pos = np.maximum(inc, 0.0)
    ratios = [b / a for a, b in zip(pos, pos[1:]) if a > 0]
    if len(ratios) < len(pos) - 1 or not ratios:
        shrinking = bool(pos[-1] <= 1e-12)
        q = 0.0
    else:
        q = max(ratios)
        shrinking = q <= SUP_DECAY_LIMIT
    if not shrinking:
        return False, math.inf
    extra = pos[-1] * q / (1.0 - q) if q < 1 else math.inf
    return True, float(values[-1] * math.exp(extra))


# --- measure-level limit laws -----------------------------------------------------------


@dataclass(frozen=True)
class TrajectoryResult:
    verdict: str
    grid: tuple[int, ...]
    values: tuple[float, ...]
    details: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "verdict": self.verdict,
            "grid": list(self.grid),
            "values": list(self.values),
            "details": self.details,
        }


def _normalizer(m: RadonMeasure, n: int) -> float:
    mass = total_mass(m)
    if not isinstance(mass, Finite):
        raise ImproperMember(f"member n={n} has mass {mass}")
    return normalizing_constant(m)


def mass_escape(
    fam: MeasureFamily, window: Interval, grid: NGrid | None = None, threshold: float = 0.05
) -> TrajectoryResult:
    """Trajectory of Pi_n(window) for probability members.

    Raises:
        ImproperMember: Some member has infinite mass.
    """
    grid = grid or NGrid()
    values = []
    for n in grid.values:
        m = fam.member(n)
        values.append(mass_on(m, window) / _normalizer(m, n))
    last3 = values[-3:]
    monotone = all(b <= a for a, b in zip(last3, last3[1:]))
    verdict = "EscapesToZero" if values[-1] <= threshold and monotone else "NoEscape"
    return TrajectoryResult(verdict, grid.values, tuple(values), {"window": str(window), "threshold": threshold})


MEDIAN_TOL = 1e-6


def median_split(fam: MeasureFamily, c: float, grid: NGrid | None = None, band: float = 0.02) -> TrajectoryResult:
    """Trajectory of Pi_n((a, c)) for a family with constant median.

    Raises:
        MedianDrift: Member medians differ by more than 1e-6.
    """
    grid = grid or NGrid()
    medians = []
    values = []
    for n in grid.values:
        m = fam.member(n)
        s = summary(m)
        if s.median is None:
            raise MedianDrift(f"median of member n={n} could not be computed")
        medians.append(s.median)
        space = m.space
        lower = space.interval.lower if isinstance(space, Continuous) else -math.inf
        values.append(mass_on(m, Interval(lower, c, True, True)) / _normalizer(m, n))
    if max(medians) - min(medians) > MEDIAN_TOL:
        raise MedianDrift(f"member medians range over [{min(medians)!r}, {max(medians)!r}]")
    gaps = [abs(v - 0.5) for v in values[-3:]]
    flattening = all(b <= a + 1e-12 for a, b in zip(gaps, gaps[1:]))
    verdict = "HalfSplit" if gaps[-1] <= band and flattening else "NoSplit"
    return TrajectoryResult(verdict, grid.values, tuple(values), {"c": c, "median": medians[0]})


# --- moment trends ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Trend:
    """ToValue(value), ToPlusInf, ToMinusInf, NoTrend or Undetermined(reason)."""

    kind: str
    value: float | None = None
    reason: str = ""

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"kind": self.kind}
        if self.value is not None:
            out["value"] = self.value
        if self.reason:
            out["reason"] = self.reason
        return out


SLOPE_THRESHOLD = 0.1


def classify_trend(grid: Sequence[int], values: Sequence[float | None], tail_tol: float = 1e-2) -> Trend:
    """Classify the tail of a trajectory indexed by n."""
    if any(v is None or math.isnan(v) for v in values):
        return Trend("Undetermined", reason="some members have no such moment")
    vals = [float(v) for v in values]  # type: ignore[arg-type]
    if math.isinf(vals[-1]):
        return Trend("ToPlusInf" if vals[-1] > 0 else "ToMinusInf")
    last = vals[-3:]
    logn = np.log(np.asarray(grid[-3:], dtype=float))
    one_sign = all(v != 0 for v in last) and len({math.copysign(1.0, v) for v in last}) == 1
    slope = float(np.polyfit(logn, np.log(np.abs(last)), 1)[0]) if one_sign else 0.0
    if one_sign and slope <= -SLOPE_THRESHOLD and all(abs(b) < abs(a) for a, b in zip(last, last[1:])):
        return Trend("ToValue", 0.0)
    if _tail_drift(vals, NGrid(tuple(grid)).tail_indices()) <= tail_tol:
        return Trend("ToValue", vals[-1])
    if one_sign and slope >= SLOPE_THRESHOLD and all(abs(b) > abs(a) for a, b in zip(last, last[1:])):
        return Trend("ToPlusInf" if last[-1] > 0 else "ToMinusInf")
    return Trend("NoTrend")


@dataclass(frozen=True)
class MomentTrends:
    mean_trend: Trend
    var_trend: Trend
    grid: tuple[int, ...]
    means: tuple[float | None, ...]
    variances: tuple[float | None, ...]

    def to_dict(self) -> dict[str, Any]:
        return {
            "mean_trend": self.mean_trend.to_dict(),
            "var_trend": self.var_trend.to_dict(),
            "grid": list(self.grid),
            "means": list(self.means),
            "variances": list(self.variances),
        }


def moment_trends(fam: MeasureFamily, grid: NGrid | None = None, tail_tol: float = 1e-2) -> MomentTrends:
    grid = grid or NGrid()
    means: list[float | None] = []
    variances: list[float | None] = []
    for n in grid.values:
        s = summary(fam.member(n))
        if not isinstance(s.mass, Finite):
            means.append(None)
            variances.append(None)
            continue
        means.append(s.mean)
        variances.append(s.variance)
    return MomentTrends(
        classify_trend(grid.values, means, tail_tol),
        classify_trend(grid.values, variances, tail_tol),
        grid.values,
        tuple(means),
        tuple(variances),
    )
