"""Scenario files: parsing, validation and serialization.

A scenario is a JSON document (YAML is accepted as well) such as::

    {
      "schema_version": 1,
      "name": "trichotomy_case2",
      "params": {"d": 1.0, "r": 1.21, "a": 0.5, "b": 1.1},
      "seeds": {"u": {"kind": "heaviside_like", "edge": 0.0},
                "v": {"kind": "bump", "center": 0.0, "halfwidth": 5.0}},
      "solver": {"x_min": -100, "x_max": 440, "dx": 0.1, "t_end": 150},
      "analyses": [{"kind": "speed", "component": "v", "rel_tol": 0.03}]
    }

``params`` may also name one of the bundled parameter sets
(``"p_star"``, ``"p_llw"``, ``"p_extinction"``). Validation errors name the
offending field path, e.g. ``solver.dt``.
"""

from __future__ import annotations

import json
import logging
import math
from collections.abc import Mapping
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

import yaml

from .config import DEFAULT_DX, DEFAULT_T_END, PARAM_SETS, SCENARIO_SCHEMA_VERSION
from .errors import ConfigError, TerraceLabError
from .model import Grid, ModelParams, validate_params
from .seeds import SeedSpec
from .solver import NEUMANN, BoundaryCondition, SolverConfig, dirichlet

logger = logging.getLogger(__name__)

ANALYSIS_KINDS = ("speed", "plateau", "wedge", "sup_v", "invariant")

_ANALYSIS_FIELDS: dict[str, dict[str, type | tuple[type, ...]]] = {
    "speed": {
        "component": str,
        "predicted": (int, float),
        "rel_tol": (int, float),
        "min_speed": (int, float),
        "window_fraction": (int, float),
        "level": (int, float),
    },
    "plateau": {"target": list, "eps": (int, float), "min_extent": (int, float)},
    "wedge": {
        "c_lo": (int, float),
        "c_hi": (int, float),
        "eps_geom": (int, float),
        "eps_val": (int, float),
    },
    "sup_v": {"max": (int, float)},
    "invariant": {"tol": (int, float)},
}
_REQUIRED_ANALYSIS_FIELDS = {
    "speed": ("component",),
    "plateau": ("target", "eps"),
    "wedge": ("c_lo", "c_hi", "eps_geom", "eps_val"),
    "sup_v": ("max",),
    "invariant": (),
}


@dataclass(frozen=True)
class SolverSpec:
    """Solver section of a scenario; dt left out means 0.9 of the CFL limit."""

    x_min: float
    x_max: float
    dx: float | None = DEFAULT_DX
    n: int | None = None
    dt: float | None = None
    t_end: float = DEFAULT_T_END
    left_bc: BoundaryCondition = NEUMANN
    right_bc: BoundaryCondition = NEUMANN
    snapshot_every: float = 1.0
    delta: float = 0.0

    def grid(self) -> Grid:
        if self.n is not None:
            return Grid(self.x_min, self.x_max, self.n)
        return Grid.from_spacing(self.x_min, self.x_max, self.dx or DEFAULT_DX)

    def build(self, p: ModelParams) -> SolverConfig:
        return SolverConfig.build(
            self.grid(),
            p,
            self.t_end,
            dt=self.dt,
            snapshot_every=self.snapshot_every,
            left_bc=self.left_bc,
            right_bc=self.right_bc,
            delta=self.delta,
        )

    def as_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"x_min": self.x_min, "x_max": self.x_max}
        if self.n is not None:
            out["n"] = self.n
        else:
            out["dx"] = self.dx
        if self.dt is not None:
            out["dt"] = self.dt
        out.update(
            t_end=self.t_end,
            left_bc=self.left_bc.as_dict(),
            right_bc=self.right_bc.as_dict(),
            snapshot_every=self.snapshot_every,
            delta=self.delta,
        )
        return out


@dataclass(frozen=True)
class Analysis:
    kind: str
    options: Mapping[str, Any] = field(default_factory=dict)

    def get(self, key: str, default: Any = None) -> Any:
        return self.options.get(key, default)

    def as_dict(self) -> dict[str, Any]:
        return {"kind": self.kind, **dict(self.options)}


@dataclass(frozen=True)
class Scenario:
    name: str
    params: ModelParams
    seeds: Mapping[str, SeedSpec]
    solver: SolverSpec
    analyses: tuple[Analysis, ...] = ()
    expected: Mapping[str, Any] | None = None
    schema_version: int = SCENARIO_SCHEMA_VERSION

    def as_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "schema_version": self.schema_version,
            "name": self.name,
            "params": self.params.as_dict(),
            "seeds": {k: s.as_dict() for k, s in self.seeds.items()},
            "solver": self.solver.as_dict(),
            "analyses": [a.as_dict() for a in self.analyses],
        }
        if self.expected is not None:
            out["expected"] = dict(self.expected)
        return out


# =============================================================================
# Field helpers
# =============================================================================


def _section(data: Mapping[str, Any], key: str, path: str) -> Mapping[str, Any]:
    value = data.get(key)
    if not isinstance(value, Mapping):
        raise ConfigError(f"{path}{key}", "expected an object", value)
    return value


def _number(
    data: Mapping[str, Any],
    key: str,
    path: str,
    default: float | None = None,
    positive: bool = False,
) -> float:
    if key not in data or data[key] is None:
        if default is None:
            raise ConfigError(f"{path}{key}", "required field is missing")
        return default
    value = data[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}{key}", f"expected a number, got {value!r}", value)
    if not math.isfinite(value):
        raise ConfigError(f"{path}{key}", "must be finite", value)
    if positive and not value > 0:
        raise ConfigError(f"{path}{key}", f"must be positive, got {value}", value)
    return float(value)


def _check_keys(data: Mapping[str, Any], allowed: set[str], path: str) -> None:
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise ConfigError(f"{path}{unknown[0]}", "unknown field")


def _parse_params(value: Any) -> ModelParams:
    if isinstance(value, str):
        if value not in PARAM_SETS:
            raise ConfigError("params", f"unknown parameter set {value!r}", value)
        value = PARAM_SETS[value]
    if not isinstance(value, Mapping):
        raise ConfigError("params", "expected an object or a parameter-set name", value)
    _check_keys(value, {"d", "r", "a", "b"}, "params.")
    p = ModelParams(*(_number(value, k, "params.") for k in ("d", "r", "a", "b")))
    try:
        return validate_params(p)
    except TerraceLabError as e:
        where = f"params.{getattr(e, 'field', '')}".rstrip(".")
        raise ConfigError(where, str(e)) from e


def _parse_bc(value: Any, path: str) -> BoundaryCondition:
    if value is None:
        return NEUMANN
    if isinstance(value, str):
        value = {"kind": value}
    if not isinstance(value, Mapping):
        raise ConfigError(path, "expected a boundary condition object", value)
    kind = value.get("kind", "neumann_zero")
    if kind not in ("neumann_zero", "dirichlet"):
        raise ConfigError(f"{path}.kind", f"unknown boundary condition {kind!r}", kind)
    _check_keys(value, {"kind", "u", "v"}, f"{path}.")
    if kind == "neumann_zero":
        return NEUMANN
    return dirichlet(
        _number(value, "u", f"{path}.", 0.0), _number(value, "v", f"{path}.", 0.0)
    )


def _parse_solver(data: Mapping[str, Any]) -> SolverSpec:
    s = _section(data, "solver", "")
    _check_keys(
        s,
        {
            "x_min",
            "x_max",
            "dx",
            "n",
            "dt",
            "t_end",
            "left_bc",
            "right_bc",
            "snapshot_every",
            "delta",
        },
        "solver.",
    )
    x_min, x_max = _number(s, "x_min", "solver."), _number(s, "x_max", "solver.")
    if not x_max > x_min:
        raise ConfigError("solver.x_max", f"must exceed x_min={x_min}", x_max)
    n = s.get("n")
    if n is not None and (isinstance(n, bool) or not isinstance(n, int) or n < 3):
        raise ConfigError("solver.n", f"expected an integer ≥ 3, got {n!r}", n)
    dt = s.get("dt")
    return SolverSpec(
        x_min=x_min,
        x_max=x_max,
        dx=(
            None
            if n is not None
            else _number(s, "dx", "solver.", DEFAULT_DX, positive=True)
        ),
        n=n,
        dt=None if dt is None else _number(s, "dt", "solver.", positive=True),
        t_end=_number(s, "t_end", "solver.", DEFAULT_T_END),
        left_bc=_parse_bc(s.get("left_bc"), "solver.left_bc"),
        right_bc=_parse_bc(s.get("right_bc"), "solver.right_bc"),
        snapshot_every=_number(s, "snapshot_every", "solver.", 1.0, positive=True),
        delta=_number(s, "delta", "solver.", 0.0),
    )


def _parse_seeds(data: Mapping[str, Any]) -> dict[str, SeedSpec]:
    s = _section(data, "seeds", "")
    _check_keys(s, {"u", "v", "pair"}, "seeds.")
    if "pair" in s and ({"u", "v"} & set(s)):
        raise ConfigError("seeds", "give either a pair seed or separate u and v seeds")
    wanted = ("pair",) if "pair" in s else ("u", "v")
    out: dict[str, SeedSpec] = {}
    for key in wanted:
        entry = _section(s, key, "seeds.")
        try:
            spec = SeedSpec.from_dict(entry)
        except ConfigError as e:
            detail = str(e).split(": ", 1)[-1]
            raise ConfigError(f"seeds.{key}.{e.field}", detail) from e
        if spec.is_pair != (key == "pair"):
            raise ConfigError(
                f"seeds.{key}.kind", f"seed kind {spec.kind!r} not allowed here"
            )
        x_v = spec.options.get("x_v", 0.0)
        numeric = isinstance(x_v, (int, float))
        if spec.kind == "terrace_pair" and x_v != "auto" and not numeric:
            raise ConfigError(f"seeds.{key}.x_v", "expected a number or 'auto'", x_v)
        out[key] = spec
    return out


def _parse_analyses(data: Mapping[str, Any]) -> tuple[Analysis, ...]:
    items = data.get("analyses", [])
    if not isinstance(items, list):
        raise ConfigError("analyses", "expected a list", items)
    out = []
    for i, item in enumerate(items):
        path = f"analyses[{i}]."
        if not isinstance(item, Mapping):
            raise ConfigError(f"analyses[{i}]", "expected an object", item)
        kind = item.get("kind")
        if kind not in ANALYSIS_KINDS:
            raise ConfigError(
                f"{path}kind", f"expected one of {ANALYSIS_KINDS}, got {kind!r}"
            )
        options = {k: v for k, v in item.items() if k != "kind"}
        fields = _ANALYSIS_FIELDS[kind]
        _check_keys(options, set(fields), path)
        for key in _REQUIRED_ANALYSIS_FIELDS[kind]:
            if key not in options:
                raise ConfigError(f"{path}{key}", "required field is missing")
        for key, value in options.items():
            if isinstance(value, bool) or not isinstance(value, fields[key]):
                raise ConfigError(
                    f"{path}{key}", f"wrong type {type(value).__name__}", value
                )
        if kind == "speed" and options["component"] not in ("u", "v"):
            raise ConfigError(
                f"{path}component", "expected 'u' or 'v'", options["component"]
            )
        if kind == "plateau" and len(options["target"]) != 2:
            raise ConfigError(f"{path}target", "expected [u*, v*]", options["target"])
        out.append(Analysis(kind, options))
    return tuple(out)


def parse(data: Any) -> Scenario:
    """Validate a decoded scenario document.

    Raises:
        ConfigError: Naming the first offending field path.
    """
    if not isinstance(data, Mapping):
        raise ConfigError("<root>", "scenario must be an object")
    _check_keys(
        data,
        {"schema_version", "name", "params", "seeds", "solver", "analyses", "expected"},
        "",
    )
    version = data.get("schema_version", SCENARIO_SCHEMA_VERSION)
    if version != SCENARIO_SCHEMA_VERSION:
        raise ConfigError(
            "schema_version",
            f"unsupported version {version!r}, expected {SCENARIO_SCHEMA_VERSION}",
        )
    name = data.get("name")
    if not isinstance(name, str) or not name:
        raise ConfigError("name", "expected a non-empty string", name)
    if "params" not in data:
        raise ConfigError("params", "required field is missing")
    expected = data.get("expected")
    if expected is not None and not isinstance(expected, Mapping):
        raise ConfigError("expected", "expected an object", expected)

    params = _parse_params(data["params"])
    solver = _parse_solver(data)
    try:
        solver.build(params)
    except TerraceLabError as e:
        raise ConfigError("solver", str(e)) from e
    return Scenario(
        name=name,
        params=params,
        seeds=_parse_seeds(data),
        solver=solver,
        analyses=_parse_analyses(data),
        expected=None if expected is None else dict(expected),
        schema_version=version,
    )


def load(path: Path | str) -> Scenario:
    """Read and validate a scenario file.

    Raises:
        ConfigError: If the file cannot be read, decoded or validated.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError("<file>", f"cannot read {path}: {e}") from e
    try:
        if path.suffix.lower() == ".json":
            data = json.loads(text)
        else:
            data = yaml.safe_load(text)
    except json.JSONDecodeError as e:
        raise ConfigError(
            "<file>", f"{path}: line {e.lineno}, column {e.colno}: {e.msg}"
        ) from e
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        where = (
            f"line {mark.line + 1}, column {mark.column + 1}"
            if mark
            else "unknown position"
        )
        raise ConfigError("<file>", f"{path}: {where}: {e}") from e
    scenario = parse(data)
    logger.debug(f"loaded scenario {scenario.name!r} from {path}")
    return scenario


def dumps(scenario: Scenario) -> str:
    return json.dumps(scenario.as_dict(), indent=2) + "\n"


def dump(scenario: Scenario, path: Path | str) -> Path:
    path = Path(path)
    path.write_text(dumps(scenario), encoding="utf-8", newline="\n")
    return path


def bundled(name: str) -> Path:
    """Path of a scenario shipped with the package, by file stem."""
    root = resources.files("terrace_lab") / "scenarios"
    candidate = Path(str(root / f"{name}.json"))
    if not candidate.exists():
        available = sorted(p.stem for p in Path(str(root)).glob("*.json"))
        raise ConfigError(
            "<file>", f"no bundled scenario {name!r}; available: {available}"
        )
    return candidate


def bundled_names() -> list[str]:
    root = Path(str(resources.files("terrace_lab") / "scenarios"))
    return sorted(p.stem for p in root.glob("*.json"))
