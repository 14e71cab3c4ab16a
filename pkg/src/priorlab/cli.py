"""Command-line front end: example catalog, config-driven analysis and report emission.

Exit codes: 0 success, 1 a catalog assertion failed, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import math
import sys
from collections.abc import Callable, Sequence
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any

import numpy as np

from .catalog import ExampleResult, list_examples, run_example
from .convergence import CompactSup, Diverges, Monotone, NGrid, check_density_criterion, check_q_vague
from .errors import ConfigError, DSLError, PriorlabError, UnknownExample
from .families import MeasureFamily
from .hypothesis import limit_regime, null_posterior_prob
from .measures import Discrete, ParameterSpace, RadonMeasure
from .posterior import Likelihood, check_narrow_convergence, estimator_limit, posterior, posterior_family
from .report import RENDERERS
from .serialize import dumps, load_family, load_measure, load_model, load_scenario

EXIT_OK = 0
EXIT_ASSERTION = 1
EXIT_USAGE = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(message)


def _parse_grid(text: str) -> NGrid:
    try:
        return NGrid(tuple(int(v) for v in text.split(",") if v.strip()))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad --ngrid {text!r}: {exc}") from exc


def _parse_tol(text: str) -> float:
    try:
        tol = float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad --tail-tol {text!r}") from exc
    if not (tol > 0 and math.isfinite(tol)):
        raise argparse.ArgumentTypeError("--tail-tol must be positive and finite")
    return tol


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="priorlab", description="Limits of prior and posterior sequences.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    ls = sub.add_parser("list-examples", help="list the example catalog")
    ls.add_argument("--format", choices=("text", "json"), default="text")
    ls.add_argument("--filter", default=None, help="keep ids containing this text")

    run = sub.add_parser("run", help="run one catalog example")
    run.add_argument("id")
    run.add_argument("--format", choices=tuple(RENDERERS), default="json")
    run.add_argument("--out", type=Path, default=None)

    run_all = sub.add_parser("run-all", help="run every catalog example")
    run_all.add_argument("--jobs", type=int, default=1)
    run_all.add_argument("--format", choices=tuple(RENDERERS), default="json")
    run_all.add_argument("--out-dir", type=Path, default=None, help="write one report file per example")
    run_all.add_argument("--filter", default=None)

    an = sub.add_parser("analyze", help="analyze a family given as JSON")
    an.add_argument("--family", type=Path, required=True)
    an.add_argument("--candidate", type=Path, default=None)
    an.add_argument("--model", type=Path, default=None)
    an.add_argument("--scenario", type=Path, default=None, help="point-null scenario file")
    an.add_argument("--ngrid", type=_parse_grid, default=None)
    an.add_argument("--tail-tol", type=_parse_tol, default=1e-2)
    an.add_argument("--out", type=Path, default=None)
    return parser


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        out.write_text(text, encoding="utf-8")


# --- catalog commands ------------------------------------------------------------------------


def _cmd_list(args: argparse.Namespace) -> int:
    entries = list_examples(args.filter)
    if args.format == "json":
        _emit(dumps([e.header() for e in entries]), None)
    else:
        width = max((len(e.id) for e in entries), default=0)
        _emit("".join(f"{e.id:<{width}}  [{e.topic}] {e.description}\n" for e in entries), None)
    return EXIT_OK


def _cmd_run(args: argparse.Namespace) -> int:
    result = run_example(args.id)
    _emit(RENDERERS[args.format](result), args.out)
    if not result.passed:
        failed = ", ".join(c.name for c in result.checks if not c.passed)
        print(f"priorlab: {result.id}: failed checks: {failed}", file=sys.stderr)
        return EXIT_ASSERTION
    return EXIT_OK


def _run_buffered(example_id: str, fmt: str) -> tuple[str, bool, str]:
    result: ExampleResult = run_example(example_id)
    return example_id, result.passed, RENDERERS[fmt](result)


def _cmd_run_all(args: argparse.Namespace) -> int:
    if args.jobs < 1:
        raise UsageError("--jobs must be at least 1")
    ids = [e.id for e in list_examples(args.filter)]
    if args.jobs == 1:
        outcomes = [_run_buffered(i, args.format) for i in ids]
    else:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            outcomes = list(pool.map(_run_buffered, ids, [args.format] * len(ids)))
    if args.out_dir is not None:
        args.out_dir.mkdir(parents=True, exist_ok=True)
    suffix = {"json": "json", "csv": "csv", "svg": "svg"}[args.format]
    for example_id, passed, text in outcomes:
        if args.out_dir is not None:
            (args.out_dir / f"{example_id}.{suffix}").write_text(text, encoding="utf-8")
        print(f"{'PASS' if passed else 'FAIL'} {example_id}")
    return EXIT_OK if all(p for _, p, _ in outcomes) else EXIT_ASSERTION


# --- analyze ----------------------------------------------------------------------------------


def _section(body: Callable[[], dict[str, Any]]) -> dict[str, Any]:
    """Run one report section; numeric failures are recorded in place."""
    try:
        return body()
    except (PriorlabError, ValueError, ArithmeticError) as exc:
        return {"error": {"kind": type(exc).__name__, "message": str(exc)}}


def criterion_windows(space: ParameterSpace) -> list[tuple[float, float]]:
    """Compact windows inside the space on which a_n pi_n is checked."""
    if isinstance(space, Discrete):
        support = sorted(space.support) if space.support is not None else list(range(21))
        return [(support[0], support[min(5, len(support) - 1)]), (support[0], support[-1])]
    iv = space.interval
    lo, hi = iv.lower, iv.upper
    if math.isfinite(lo) and math.isfinite(hi):
        w = hi - lo
        return [(lo + 0.25 * w, hi - 0.25 * w), (lo + 0.05 * w, hi - 0.05 * w)]
    if math.isfinite(lo):
        return [(lo + 0.5, lo + 2.0), (lo + 0.1, lo + 10.0)]
    if math.isfinite(hi):
        return [(hi - 2.0, hi - 0.5), (hi - 10.0, hi - 0.1)]
    return [(-1.0, 1.0), (-5.0, 5.0)]


def _window_points(space: ParameterSpace, windows: Sequence[tuple[float, float]]) -> np.ndarray:
    if isinstance(space, Discrete):
        lo = min(a for a, _ in windows)
        hi = max(b for _, b in windows)
        pts = np.array(sorted(space.support) if space.support is not None else range(21), dtype=float)
        return pts[(pts >= lo) & (pts <= hi)]
    return np.unique(np.concatenate([np.linspace(a, b, 81) for a, b in windows]))


def _q_vague_section(fam: MeasureFamily, candidate: RadonMeasure | None, grid: NGrid, tol: float) -> dict[str, Any]:
    report = check_q_vague(fam, candidate, grid=grid, tail_tol=tol)
    out = report.to_dict()
    out["diverges"] = isinstance(report.verdict, Diverges)
    out["limit_shape"] = {t.probe.label: t.ratios[-1] for t in report.per_probe}
    return out


def _criteria_section(fam: MeasureFamily, candidate: RadonMeasure | None, grid: NGrid, tol: float) -> dict[str, Any]:
    windows = criterion_windows(fam.space)
    theta = _window_points(fam.space, windows)
    out: dict[str, Any] = {}
    target = candidate if candidate is not None else fam.member(grid.values[-1])
    out["CompactSup"] = _section(
        lambda: check_density_criterion(fam, target, CompactSup(tuple(windows)), grid, theta, tol).to_dict()
    )
    if candidate is not None:
        out["Monotone"] = _section(
            lambda: check_density_criterion(fam, candidate, Monotone(), grid, theta, tol).to_dict()
        )
    return out


def _model_sections(
    fam: MeasureFamily, candidate: RadonMeasure | None, lik: Likelihood, x: float, grid: NGrid, tol: float
) -> dict[str, Any]:
    posts = posterior_family(fam, lik, x)
    out: dict[str, Any] = {"observation": x}
    out["estimator"] = _section(lambda: estimator_limit(posts, grid, tail_tol=tol).to_dict())
    if candidate is None:
        return out

    def narrow() -> dict[str, Any]:
        limit = posterior(candidate, lik, x)
        body: dict[str, Any] = {"candidate_posterior": limit.to_dict()}
        if not limit.proper:
            body["skipped"] = "posterior under the candidate is improper"
            return body
        body.update(check_narrow_convergence(posts, limit.measure, grid, tail_tol=tol).to_dict())
        return body

    out["narrow"] = _section(narrow)
    return out


def _scenario_section(path: Path) -> dict[str, Any]:
    sc = load_scenario(path)
    mix, lik, x, grid = sc["mixture"], sc["likelihood"], sc["x"], sc["grid"]

    def trajectory() -> dict[str, Any]:
        return {"grid": list(grid.values), "null_prob": [null_posterior_prob(mix, lik, x, n) for n in grid.values]}

    return {
        "trajectory": _section(trajectory),
        "regime": _section(lambda: limit_regime(mix, lik, x, grid).to_dict()),
    }


def analyze(
    family_file: Path,
    candidate_file: Path | None = None,
    model_file: Path | None = None,
    *,
    scenario_file: Path | None = None,
    grid: NGrid | None = None,
    tail_tol: float = 1e-2,
) -> dict[str, Any]:
    """Assemble the analysis report; configuration errors propagate, numeric ones stay in their section."""
    grid = grid or NGrid()
    fam = load_family(family_file)
    candidate = load_measure(candidate_file) if candidate_file is not None else None
    model = load_model(model_file) if model_file is not None else None

    report: dict[str, Any] = {
        "family": fam.label,
        "candidate": candidate.label if candidate is not None else None,
        "grid": list(grid.values),
        "tail_tol": tail_tol,
    }
    report["q_vague"] = _section(lambda: _q_vague_section(fam, candidate, grid, tail_tol))
    if fam.scaling_hint is not None:
        report["criteria"] = _section(lambda: _criteria_section(fam, candidate, grid, tail_tol))
    if model is not None:
        lik, x = model
        report["posterior"] = _section(lambda: _model_sections(fam, candidate, lik, x, grid, tail_tol))
    if scenario_file is not None:
        report["point_null"] = _scenario_section(scenario_file)
    return report


def _cmd_analyze(args: argparse.Namespace) -> int:
    report = analyze(
        args.family,
        args.candidate,
        args.model,
        scenario_file=args.scenario,
        grid=args.ngrid,
        tail_tol=args.tail_tol,
    )
    _emit(dumps(report), args.out)
    return EXIT_OK


COMMANDS = {"list-examples": _cmd_list, "run": _cmd_run, "run-all": _cmd_run_all, "analyze": _cmd_analyze}


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"priorlab: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except UnknownExample as exc:
        print(f"priorlab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DSLError as exc:
        print(f"priorlab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as exc:
        print(f"priorlab: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
