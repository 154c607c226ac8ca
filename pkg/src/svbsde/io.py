"""JSON configs, problem construction and artifact writers.

A scenario config looks like::

    {
      "seed": 0,
      "problem": {
        "tree": {"steps": 8, "horizon": 1.0},
        "terminal": {"kind": "bt_interval", "lower": [-1, 1], "upper": [1, 1, 1]},
        "driver": {"kind": "affine", "beta": 0.5, "G": {"dim": 1, "vertices": [[0], [1]]}}
      },
      "solver": {"tol": 1e-10, "max_iter": 50},
      "representation": {"cap": 1000000, "samples": null},
      "checks": ["picard"],
      "output": "out/affine-interval",
      "formats": ["json", "csv", "svg"]
    }

Terminal kinds:

* ``bt_interval``: ``[p(B_T), q(B_T)]`` for polynomials given by coefficient
  lists, constant term first;
* ``bt_polygon``: hull of vertices whose coordinates are such polynomials;
* ``constant``: one body everywhere;
* ``atoms``: explicit ``{"UD..": body}`` map over the terminal level.

Driver kinds: ``zero``, ``constant`` (``G``) and ``affine`` (``beta``, ``G``),
where ``G`` is a body or a path-keyed map of bodies.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .bsde import AffineDriver, BSDEProblem, BSDESolution, ConstantDriver, Driver
from .convex import ConvexBody
from .setrv import SetRV
from .tree import FiltrationTree

FORMATS = ("json", "csv", "svg")


class ConfigError(ValueError):
    """Invalid or incomplete configuration."""


def _require(data: Any, key: str, where: str):
    if not isinstance(data, dict):
        raise ConfigError(f"{where} must be a JSON object")
    if key not in data:
        raise ConfigError(f"{where} is missing field '{key}'")
    return data[key]


def _body(data: Any, where: str) -> ConvexBody:
    _require(data, "vertices", where)
    try:
        return ConvexBody.from_dict(data)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from None


def _poly(coeffs: Any, where: str) -> np.ndarray:
    arr = np.asarray(coeffs, dtype=float)
    if arr.ndim != 1 or arr.size == 0 or not np.all(np.isfinite(arr)):
        raise ConfigError(f"{where} must be a non-empty list of finite coefficients")
    return arr


def eval_poly(coeffs: np.ndarray, x: np.ndarray) -> np.ndarray:
    """``sum_i c_i x^i`` with the constant term first."""
    return np.polynomial.polynomial.polyval(x, coeffs)


# ----------------------------------------------------------------------
# problem specs


def terminal_from_spec(spec: dict, tree: FiltrationTree) -> SetRV:
    kind = _require(spec, "kind", "problem.terminal")
    N = tree.steps
    if kind == "bt_interval":
        lo = eval_poly(_poly(_require(spec, "lower", "problem.terminal"), "problem.terminal.lower"), tree.walk(N))
        hi = eval_poly(_poly(_require(spec, "upper", "problem.terminal"), "problem.terminal.upper"), tree.walk(N))
        bad = np.flatnonzero(hi < lo)
        if bad.size:
            raise ConfigError(f"problem.terminal: lower exceeds upper at atom {tree.path(N, int(bad[0]))!r}")
        return SetRV(N, tuple(ConvexBody.interval(a, b) for a, b in zip(lo, hi)))
    if kind == "bt_polygon":
        verts = _require(spec, "vertices", "problem.terminal")
        if not isinstance(verts, list) or not verts:
            raise ConfigError("problem.terminal.vertices must be a non-empty list")
        bt = tree.walk(N)
        cols = []
        for j, v in enumerate(verts):
            if not isinstance(v, list) or len(v) != 2:
                raise ConfigError(f"problem.terminal.vertices[{j}] must hold two coefficient lists")
            cols.append(np.stack([eval_poly(_poly(c, f"problem.terminal.vertices[{j}]"), bt) for c in v], axis=1))
        pts = np.stack(cols, axis=1)  # (atoms, vertices, 2)
        return SetRV(N, tuple(ConvexBody(p) for p in pts))
    if kind == "constant":
        body = _body(_require(spec, "body", "problem.terminal"), "problem.terminal.body")
        return SetRV(N, (body,) * (1 << N))
    if kind == "atoms":
        values = _require(spec, "values", "problem.terminal")
        try:
            xi = SetRV.from_dict(values)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"problem.terminal.values: {exc}") from None
        if xi.level != N:
            raise ConfigError(f"problem.terminal.values must use paths of length {N}")
        return xi
    raise ConfigError(f"problem.terminal.kind {kind!r} is not one of bt_interval, bt_polygon, constant, atoms")


def _g_from_spec(g: Any, dim: int):
    if isinstance(g, dict) and "vertices" in g:
        body = _body(g, "problem.driver.G")
        if body.dim != dim:
            raise ConfigError(f"problem.driver.G has dimension {body.dim}, terminal has {dim}")
        return body
    if isinstance(g, dict):
        out = {p: _body(b, f"problem.driver.G[{p!r}]") for p, b in g.items()}
        if any(b.dim != dim for b in out.values()):
            raise ConfigError("problem.driver.G: dimension differs from the terminal value")
        return out
    raise ConfigError("problem.driver.G must be a body or a path-keyed map of bodies")


def driver_from_spec(spec: dict, tree: FiltrationTree, dim: int) -> Driver:
    kind = _require(spec, "kind", "problem.driver")
    if kind == "zero":
        return ConstantDriver(ConvexBody.zero(dim))
    if kind == "constant":
        g = _g_from_spec(_require(spec, "G", "problem.driver"), dim)
        return ConstantDriver(g) if isinstance(g, ConvexBody) else AffineDriver(0.0, g)
    if kind == "affine":
        beta = _require(spec, "beta", "problem.driver")
        if not isinstance(beta, (int, float)) or not math.isfinite(beta):
            raise ConfigError("problem.driver.beta must be a finite number")
        g = _g_from_spec(_require(spec, "G", "problem.driver"), dim)
        if isinstance(g, dict):
            need = {tree.path(k, i) for k in range(tree.steps) for i in range(1 << k)}
            missing = sorted(need - set(g), key=lambda p: (len(p), p))
            if missing:
                raise ConfigError(f"problem.driver.G is missing node {missing[0]!r}")
        return AffineDriver(float(beta), g)
    raise ConfigError(f"problem.driver.kind {kind!r} is not one of zero, constant, affine")


def tree_from_spec(spec: dict) -> FiltrationTree:
    steps = _require(spec, "steps", "problem.tree")
    horizon = spec.get("horizon", 1.0)
    if not isinstance(steps, int) or steps < 0:
        raise ConfigError("problem.tree.steps must be a non-negative integer")
    if not isinstance(horizon, (int, float)) or not horizon > 0:
        raise ConfigError("problem.tree.horizon must be a positive number")
    if "up_probability" in spec and spec["up_probability"] != 0.5:
        raise ConfigError("problem.tree.up_probability: only the symmetric walk (0.5) is supported")
    return FiltrationTree(steps, float(horizon))


def problem_from_spec(spec: dict) -> BSDEProblem:
    tree = tree_from_spec(_require(spec, "tree", "problem"))
    xi = terminal_from_spec(_require(spec, "terminal", "problem"), tree)
    driver = driver_from_spec(_require(spec, "driver", "problem"), tree, xi.dim)
    return BSDEProblem(tree, xi, driver)


# ----------------------------------------------------------------------
# scenario configs


@dataclass
class SolverConfig:
    tol: float = 1e-10
    max_iter: int = 50


@dataclass
class ReprConfig:
    cap: int = 10**6
    samples: int | None = None


@dataclass
class ScenarioConfig:
    seed: int
    problem: dict
    output: str
    solver: SolverConfig = field(default_factory=SolverConfig)
    representation: ReprConfig = field(default_factory=ReprConfig)
    checks: list = field(default_factory=list)
    formats: tuple = FORMATS
    name: str = "scenario"

    def build_problem(self) -> BSDEProblem:
        return problem_from_spec(self.problem)

    @classmethod
    def from_dict(cls, data: dict, base: Path | None = None) -> "ScenarioConfig":
        from .checks import SUITES

        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        extra = sorted(set(data) - set(cls.__dataclass_fields__))
        if extra:
            raise ConfigError(f"config has unknown field '{extra[0]}'")
        seed = _require(data, "seed", "config")
        if not isinstance(seed, int):
            raise ConfigError("config.seed must be an integer")
        problem = _require(data, "problem", "config")
        output = _require(data, "output", "config")
        solver = SolverConfig(**_known(data.get("solver", {}), SolverConfig, "config.solver"))
        rep = ReprConfig(**_known(data.get("representation", {}), ReprConfig, "config.representation"))
        checks = list(data.get("checks", []))
        unknown = [c for c in checks if c not in SUITES]
        if unknown:
            raise ConfigError(f"config.checks: unknown suite {unknown[0]!r}")
        formats = tuple(data.get("formats", FORMATS))
        bad = [f for f in formats if f not in FORMATS]
        if bad:
            raise ConfigError(f"config.formats: unknown format {bad[0]!r}")
        out = Path(output)
        if base is not None and not out.is_absolute():
            out = base / out
        cfg = cls(seed, problem, str(out), solver, rep, checks, formats, str(data.get("name", "scenario")))
        cfg.build_problem()  # validate eagerly
        return cfg


def _known(data: Any, cls, where: str) -> dict:
    if not isinstance(data, dict):
        raise ConfigError(f"{where} must be a JSON object")
    names = set(cls.__dataclass_fields__)
    extra = sorted(set(data) - names)
    if extra:
        raise ConfigError(f"{where} has unknown field '{extra[0]}'")
    return data


def load_json(path: str | Path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc})") from None


def load_config(path: str | Path, output: str | None = None) -> ScenarioConfig:
    data = load_json(path)
    if output is not None and isinstance(data, dict):
        data = dict(data, output=output)
    return ScenarioConfig.from_dict(data, base=Path.cwd())


# ----------------------------------------------------------------------
# writers (deterministic: sorted keys, no timestamps)


def dumps(obj: Any) -> str:
    return json.dumps(_plain(obj), indent=2, sort_keys=True, allow_nan=True) + "\n"


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_text(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)
    return path


def csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return "nan" if math.isnan(v) else repr(float(v))
    return v


def diagnostics_csv(solution: BSDESolution) -> str:
    rows = [[r["iteration"], r["d_H"], r["bound_a_n"], r["ratio"]] for r in solution.diagnostics.table()]
    return csv_text(["iteration", "d_H", "bound_a_n", "ratio"], rows)


def endpoints_rows(tree: FiltrationTree, lower: list, upper: list) -> list[list]:
    return [
        [k, tree.path(k, i), float(lower[k][i]), float(upper[k][i])] for k in range(tree.steps + 1) for i in range(1 << k)
    ]


def endpoints_csv(tree: FiltrationTree, lower: list, upper: list) -> str:
    return csv_text(["level", "path", "lower", "upper"], endpoints_rows(tree, lower, upper))


def solution_endpoints(solution: BSDESolution) -> tuple[list, list]:
    lo, hi = [], []
    for s in solution.Y.slices:
        b = np.array([body.interval_bounds() for body in s.bodies])
        lo.append(b[:, 0])
        hi.append(b[:, 1])
    return lo, hi


def read_endpoints_csv(path: str | Path) -> dict[str, tuple[float, float]]:
    with open(path, newline="") as fh:
        return {r["path"]: (float(r["lower"]), float(r["upper"])) for r in csv.DictReader(fh)}


def solution_to_dict(cfg: ScenarioConfig, prob: BSDEProblem, solution: BSDESolution) -> dict:
    d = solution.diagnostics
    return {
        "name": cfg.name,
        "seed": cfg.seed,
        "problem": cfg.problem,
        "dim": prob.dim,
        "converged": solution.converged,
        "iterations": d.iterations,
        "final_d_H": d.d_h[-1] if d.d_h else 0.0,
        "Y": solution.Y.to_dict(),
    }
