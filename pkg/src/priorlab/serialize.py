"""JSON schemas, loaders and deterministic dumps for measures, families, models and scenarios."""

from __future__ import annotations

import json
import math
from collections.abc import Mapping
from pathlib import Path
from typing import Any

import jsonschema
import numpy as np

from . import dsl
from .errors import ConfigError, DSLError, DSLSyntaxError
from .families import MeasureFamily
from .measures import Atom, Continuous, Discrete, ParameterSpace, RadonMeasure
from .numerics import Finite, Infinite, Interval, MassClass, Zero
from .posterior import Likelihood

SCHEMA_VERSION = 1

_NUMBER_OR_INF = {"oneOf": [{"type": "number"}, {"enum": ["inf", "-inf"]}]}

SPACE_SCHEMA: dict[str, Any] = {
    "oneOf": [
        {"enum": ["real", "positive", "unit-open", "unit-closed", "naturals"]},
        {
            "type": "object",
            "required": ["kind", "lower", "upper"],
            "additionalProperties": False,
            "properties": {
                "kind": {"const": "interval"},
                "lower": _NUMBER_OR_INF,
                "upper": _NUMBER_OR_INF,
                "lower_open": {"type": "boolean"},
                "upper_open": {"type": "boolean"},
            },
        },
        {
            "type": "object",
            "required": ["kind"],
            "additionalProperties": False,
            "properties": {
                "kind": {"const": "discrete"},
                "support": {"type": "array", "items": {"type": "number"}, "minItems": 1},
            },
        },
    ]
}

_PARAMS = {"type": "object", "additionalProperties": {"type": "number"}}
_MASS_HINT = {
    "oneOf": [
        {"enum": ["infinite", None]},
        {"type": "object", "required": ["finite"], "additionalProperties": False, "properties": {"finite": {"type": "number"}}},
    ]
}
_VERSION = {"const": SCHEMA_VERSION}

MEASURE_SCHEMA: dict[str, Any] = {
    "type": "object",
    "required": ["space"],
    "additionalProperties": False,
    "properties": {
        "schema_version": _VERSION,
        "label": {"type": "string"},
        "space": SPACE_SCHEMA,
        "density": {"type": ["string", "null"]},
        "log_density": {"type": "string"},
        "params": _PARAMS,
        "scale": {"type": "number", "exclusiveMinimum": 0},
        "atoms": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["at", "weight"],
                "additionalProperties": False,
                "properties": {"at": {"type": "number"}, "weight": {"type": "number", "exclusiveMinimum": 0}},
            },
        },
        "mass_hint": _MASS_HINT,
    },
}

FAMILY_SCHEMA: dict[str, Any] = {
    "type": "object",
    "required": ["space"],
    "additionalProperties": False,
    "properties": {
        "schema_version": _VERSION,
        "label": {"type": "string"},
        "space": SPACE_SCHEMA,
        "density": {"type": "string"},
        "log_density": {"type": "string"},
        "params": _PARAMS,
        "scaling_hint": {"type": ["string", "null"]},
        "atoms": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["at", "weight"],
                "additionalProperties": False,
                "properties": {"at": {"type": "string"}, "weight": {"type": "string"}},
            },
        },
        "mass_hint": _MASS_HINT,
    },
    "anyOf": [{"required": ["density"]}, {"required": ["log_density"]}, {"required": ["atoms"]}],
}

MODEL_SCHEMA: dict[str, Any] = {
    "type": "object",
    "required": ["x"],
    "additionalProperties": False,
    "properties": {
        "schema_version": _VERSION,
        "label": {"type": "string"},
        "likelihood": {"type": "string"},
        "log_likelihood": {"type": "string"},
        "params": _PARAMS,
        "flags": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "continuous_in_theta": {"type": "boolean"},
                "vanishes_at_infinity": {"type": "boolean"},
            },
        },
        "x": {"type": "number"},
    },
    "anyOf": [{"required": ["likelihood"]}, {"required": ["log_likelihood"]}],
}

SCENARIO_SCHEMA: dict[str, Any] = {
    "type": "object",
    "required": ["rho", "theta0", "alternative", "likelihood", "x"],
    "additionalProperties": False,
    "properties": {
        "schema_version": _VERSION,
        "rho": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "theta0": {"type": "number"},
        "alternative": FAMILY_SCHEMA,
        "likelihood": MODEL_SCHEMA,
        "x": {"type": "number"},
        "grid": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 4},
    },
}


# --- generic helpers --------------------------------------------------------------------


def _pointer(path: Any) -> str:
    return "/" + "/".join(str(p) for p in path) if path else "/"


def validate(data: Any, schema: Mapping[str, Any], path: str | None = None) -> None:
    """Raise ConfigError naming the JSON pointer of the first schema violation."""
    validator = jsonschema.Draft202012Validator(schema)
    errors = sorted(validator.iter_errors(data), key=lambda e: (len(e.absolute_path), list(map(str, e.absolute_path))))
    if errors:
        err = errors[0]
        raise ConfigError(f"schema violation at {_pointer(err.absolute_path)}: {err.message}", path)


def load_json(path: str | Path) -> Any:
    """Read a JSON file; decode errors keep their character offset."""
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read file: {exc.strerror}", str(p)) from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg}", str(p), exc.pos) from exc


def _plain(value: Any) -> Any:
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    if isinstance(value, (np.floating, np.integer, np.bool_)):
        return _plain(value.item())
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, Mapping):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def dumps(obj: Any) -> str:
    """Deterministic JSON text; non-finite floats become the strings inf, -inf, nan."""
    return json.dumps(_plain(obj), indent=2, sort_keys=True, allow_nan=False, ensure_ascii=False) + "\n"


def _num(value: Any) -> float:
    if value == "inf":
        return math.inf
    if value == "-inf":
        return -math.inf
    return float(value)


# --- spaces -------------------------------------------------------------------------------


def space_from_json(data: Any) -> ParameterSpace:
    if data == "real":
        return Continuous(Interval.real_line())
    if data == "positive":
        return Continuous(Interval.positive())
    if data == "unit-open":
        return Continuous(Interval.open(0.0, 1.0))
    if data == "unit-closed":
        return Continuous(Interval.closed(0.0, 1.0))
    if data == "naturals":
        return Discrete(None)
    if data["kind"] == "discrete":
        support = data.get("support")
        return Discrete(tuple(support) if support is not None else None)
    lower, upper = _num(data["lower"]), _num(data["upper"])
    return Continuous(
        Interval(
            lower,
            upper,
            bool(data.get("lower_open", True)),
            bool(data.get("upper_open", True)),
        )
    )


def space_to_json(space: ParameterSpace) -> Any:
    if isinstance(space, Discrete):
        return "naturals" if space.support is None else {"kind": "discrete", "support": list(space.support)}
    iv = space.interval
    return {
        "kind": "interval",
        "lower": _plain(iv.lower),
        "upper": _plain(iv.upper),
        "lower_open": iv.lower_open,
        "upper_open": iv.upper_open,
    }


def _mass_hint_from_json(data: Any) -> MassClass | None:
    if data is None:
        return None
    if data == "infinite":
        return Infinite()
    return Finite(float(data["finite"]))


def _mass_hint_to_json(hint: MassClass | None) -> Any:
    if hint is None or isinstance(hint, Zero):
        return None
    if isinstance(hint, Infinite):
        return "infinite"
    return {"finite": hint.value}


# --- expressions --------------------------------------------------------------------------


def _expression(
    source: str, allowed: set[str], where: str, path: str | None
) -> dsl.Expr:
    try:
        expr = dsl.parse(source)
    except DSLSyntaxError as exc:
        raise ConfigError(f"{where}: {exc}", path, exc.offset) from exc
    except DSLError as exc:
        raise ConfigError(f"{where}: {exc}", path, getattr(exc, "offset", None)) from exc
    unknown = dsl.free_variables(expr) - allowed
    if unknown:
        raise ConfigError(f"{where}: unbound variable {sorted(unknown)[0]!r}", path)
    return expr


def _vectorized(expr: dsl.Expr, fixed: Mapping[str, float], variable: str) -> Any:
    def f(x: np.ndarray) -> np.ndarray:
        binding = dict(fixed)
        binding[variable] = x
        out = dsl.evaluate(expr, binding)
        return np.broadcast_to(np.asarray(out, dtype=float), np.shape(x)).copy() if np.ndim(x) else out

    return f


# --- measures -------------------------------------------------------------------------------


def measure_from_json(data: Any, path: str | None = None) -> RadonMeasure:
    validate(data, MEASURE_SCHEMA, path)
    space = space_from_json(data["space"])
    params = {k: float(v) for k, v in data.get("params", {}).items()}
    allowed = {"theta", *params}
    factor = float(data.get("scale", 1.0))
    density = log_density = None
    if data.get("log_density"):
        expr = _expression(data["log_density"], allowed, "/log_density", path)
        base = _vectorized(expr, params, "theta")
        shift = math.log(factor)

        def log_density(x: np.ndarray) -> np.ndarray:
            return base(x) + shift

    elif data.get("density"):
        expr = _expression(data["density"], allowed, "/density", path)
        base = _vectorized(expr, params, "theta")

        def density(x: np.ndarray) -> np.ndarray:
            return factor * base(x)

    atoms = tuple(Atom(float(a["at"]), factor * float(a["weight"])) for a in data.get("atoms", []))
    hint = _mass_hint_from_json(data.get("mass_hint"))
    if isinstance(hint, Finite):
        hint = Finite(hint.value * factor)
    source = {"density": data.get("density"), "params": params}
    if data.get("log_density"):
        source["log_density"] = data["log_density"]
    if factor != 1.0:
        source["scale"] = factor
    try:
        return RadonMeasure(
            space,
            density=density,
            log_density=log_density,
            atoms=atoms,
            mass_hint=hint,
            label=data.get("label", ""),
            source=source,
        )
    except DSLError as exc:
        raise ConfigError(f"density cannot be evaluated: {exc}", path) from exc
    except Exception as exc:
        if exc.__class__.__module__.startswith("priorlab"):
            raise ConfigError(f"invalid measure: {exc}", path) from exc
        raise


def measure_to_json(m: RadonMeasure) -> dict[str, Any]:
    """JSON form of a measure built from a DSL source.

    Raises:
        ValueError: The measure has a density but no DSL source.
    """
    out: dict[str, Any] = {"schema_version": SCHEMA_VERSION, "space": space_to_json(m.space)}
    if m.label:
        out["label"] = m.label
    src = m.source or {}
    if m.has_density:
        if not (src.get("density") or src.get("log_density")):
            raise ValueError(f"measure {m.label or ''} has no DSL source to serialize")
        if src.get("log_density"):
            out["log_density"] = src["log_density"]
        else:
            out["density"] = src["density"]
        out["params"] = dict(src.get("params", {}))
        factor = float(src.get("scale", 1.0))
        if factor != 1.0:
            out["scale"] = factor
    else:
        factor = 1.0
    if m.atoms:
        out["atoms"] = [{"at": a.location, "weight": a.weight / factor} for a in m.atoms]
    hint = _mass_hint_to_json(m.mass_hint)
    if isinstance(hint, dict):
        hint = {"finite": hint["finite"] / factor}
    if hint is not None:
        out["mass_hint"] = hint
    return out


# --- families -----------------------------------------------------------------------------


def family_from_json(data: Any, path: str | None = None) -> MeasureFamily:
    """Family with member(n) given by DSL expressions in theta and n."""
    validate(data, FAMILY_SCHEMA, path)
    space = space_from_json(data["space"])
    params = {k: float(v) for k, v in data.get("params", {}).items()}
    allowed = {"theta", "n", *params}
    log_expr = _expression(data["log_density"], allowed, "/log_density", path) if data.get("log_density") else None
    dens_expr = (
        _expression(data["density"], allowed, "/density", path)
        if data.get("density") and log_expr is None
        else None
    )
    atom_exprs = [
        (
            _expression(a["at"], {"n", *params}, f"/atoms/{i}/at", path),
            _expression(a["weight"], {"n", *params}, f"/atoms/{i}/weight", path),
        )
        for i, a in enumerate(data.get("atoms", []))
    ]
    scaling = data.get("scaling_hint")
    scaling_expr = _expression(scaling, {"n", *params}, "/scaling_hint", path) if scaling else None
    hint = _mass_hint_from_json(data.get("mass_hint"))
    label = data.get("label", "")

    def member(n: int) -> RadonMeasure:
        fixed = dict(params, n=float(n))
        density = log_density = None
        if log_expr is not None:
            log_density = _vectorized(log_expr, fixed, "theta")
        elif dens_expr is not None:
            density = _vectorized(dens_expr, fixed, "theta")
        atoms = tuple(
            Atom(float(dsl.evaluate(at, fixed)), float(dsl.evaluate(w, fixed))) for at, w in atom_exprs
        )
        return RadonMeasure(
            space,
            density=density,
            log_density=log_density,
            atoms=atoms,
            mass_hint=hint,
            label=f"{label}[n={n}]" if label else f"member n={n}",
        )

    scaling_hint = None
    if scaling_expr is not None:

        def scaling_hint(n: int) -> float:
            return float(dsl.evaluate(scaling_expr, dict(params, n=float(n))))

    template = {k: v for k, v in data.items() if k not in ("schema_version", "label", "space", "mass_hint")}
    fam = MeasureFamily(member, scaling_hint, label, template)
    try:
        fam.member(1)
    except DSLError as exc:
        raise ConfigError(f"member n=1 cannot be evaluated: {exc}", path) from exc
    except Exception as exc:
        if exc.__class__.__module__.startswith("priorlab"):
            raise ConfigError(f"invalid family member n=1: {exc}", path) from exc
        raise
    return fam


def family_to_json(fam: MeasureFamily) -> dict[str, Any]:
    """JSON form of a family that carries a DSL template.

    Raises:
        ValueError: The family was built from code without a template.
    """
    if fam.template is None:
        raise ValueError(f"family {fam.label} has no DSL template to serialize")
    out = {"schema_version": SCHEMA_VERSION, "label": fam.label, "space": space_to_json(fam.space)}
    out.update(fam.template)
    return out


# --- models and scenarios -----------------------------------------------------------------


def likelihood_from_json(data: Any, path: str | None = None) -> tuple[Likelihood, float]:
    """Likelihood in x and theta, plus the observation stored with it."""
    validate(data, MODEL_SCHEMA, path)
    params = {k: float(v) for k, v in data.get("params", {}).items()}
    allowed = {"x", "theta", *params}
    flags = data.get("flags", {})
    log_eval = None
    if data.get("log_likelihood"):
        log_expr = _expression(data["log_likelihood"], allowed, "/log_likelihood", path)

        def log_eval(x: Any, t: np.ndarray) -> np.ndarray:
            return np.asarray(dsl.evaluate(log_expr, dict(params, x=float(x), theta=t)), dtype=float) * np.ones_like(t)

        def evaluate(x: Any, t: np.ndarray) -> np.ndarray:
            return np.exp(log_eval(x, t))

    else:
        expr = _expression(data["likelihood"], allowed, "/likelihood", path)

        def evaluate(x: Any, t: np.ndarray) -> np.ndarray:
            return np.asarray(dsl.evaluate(expr, dict(params, x=float(x), theta=t)), dtype=float) * np.ones_like(t)

    lik = Likelihood(
        evaluate,
        continuous_in_theta=bool(flags.get("continuous_in_theta", True)),
        vanishes_at_infinity=bool(flags.get("vanishes_at_infinity", False)),
        log_eval=log_eval,
        name=data.get("label", ""),
        source={k: data[k] for k in ("likelihood", "log_likelihood", "params") if k in data},
    )
    return lik, float(data["x"])


def scenario_from_json(data: Any, path: str | None = None) -> dict[str, Any]:
    """Point-null scenario: mixture pieces, likelihood, observation and grid."""
    from .convergence import NGrid
    from .hypothesis import PointNullMixture

    validate(data, SCENARIO_SCHEMA, path)
    alternative = family_from_json(data["alternative"], path)
    lik, _ = likelihood_from_json(data["likelihood"], path)
    try:
        grid = NGrid(tuple(data["grid"])) if "grid" in data else NGrid()
    except ValueError as exc:
        raise ConfigError(f"/grid: {exc}", path) from exc
    try:
        mix = PointNullMixture(float(data["rho"]), float(data["theta0"]), alternative)
    except ValueError as exc:
        raise ConfigError(str(exc), path) from exc
    return {"mixture": mix, "likelihood": lik, "x": float(data["x"]), "grid": grid}


def load_measure(path: str | Path) -> RadonMeasure:
    return measure_from_json(load_json(path), str(path))


def load_family(path: str | Path) -> MeasureFamily:
    return family_from_json(load_json(path), str(path))


def load_model(path: str | Path) -> tuple[Likelihood, float]:
    return likelihood_from_json(load_json(path), str(path))


def load_scenario(path: str | Path) -> dict[str, Any]:
    return scenario_from_json(load_json(path), str(path))
