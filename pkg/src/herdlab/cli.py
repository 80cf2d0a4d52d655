"""Scenario files, command dispatch and file output.

Usage::

    herdlab <simulate|equilibria|stability|roa|sweep|pi-roa> --config PATH
            [--out-dir DIR] [--threads N]

Exit codes: 0 success, 1 usage or configuration error, 2 model error.  A
JSON report is written to the output directory in every case where the
directory can be created, including failures.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import re
import sys
import time
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from ._parallel import pmap, resolve_threads
from .dynamics import pursuer_radius
from .equilibria import solve_circular, solve_spiral, stable_equilibrium
from .errors import HerdlabError, ModelError, ParseError, ValidationError
from .integrate import IntegratorSettings, Termination, detect_convergence, simulate
from .model import FixedCartesian, Frame, Mode, PursuitParams, convert_states
from .roa import (
    Outcome,
    brute_force_region,
    default_t_end,
    equilibrium_region,
    pi_roa,
    stable_region_spiral,
)
from .stability import classify, eigenvalues_circular

__all__ = ["ScenarioConfig", "RunReport", "load_scenario", "parse_scenario", "run", "main"]

COMMANDS = ("simulate", "equilibria", "stability", "roa", "sweep", "pi-roa")

EXIT_OK, EXIT_USAGE, EXIT_MODEL = 0, 1, 2

_TOP_KEYS = ("name", "mode", "k", "k1", "R", "omega", "kappa", "evaders", "integrator",
             "convergence", "outputs", "roa", "sweep", "pi_roa")
_INTEGRATOR_KEYS = ("t_end", "method", "step", "record_every", "rel_tol", "abs_tol", "max_step")
_CONVERGENCE_KEYS = ("tol", "window")
_OUTPUT_KEYS = ("csv", "polyline", "boundary_points")
_ROA_KEYS = ("samples", "kappa_grid", "psi_range", "brute_force")
_GRID_KEYS = ("start", "stop", "points", "log")
_BRUTE_KEYS = ("r", "psi", "anchor", "t_end", "tol")
_SWEEP_KEYS = ("parameter", "values", "simulate")
_PI_ROA_KEYS = ("theta_samples", "radius_grid", "samples", "verify_angles", "verify_phases",
                "t_end", "tol")
_SWEEPABLE = ("k", "k1", "R", "omega", "kappa")

_FLOW_PAIR = re.compile(r"^([A-Za-z_]\w*):(\S.*)$")


# --------------------------------------------------------------------------
# configuration


@dataclass
class ScenarioConfig:
    """A validated scenario with every default made explicit."""

    params: PursuitParams
    evaders: tuple
    integrator: IntegratorSettings
    convergence: dict
    outputs: dict
    roa: dict
    sweep: dict
    pi_roa: dict
    name: str = ""
    notices: list = field(default_factory=list)

    @property
    def n(self) -> int:
        return len(self.evaders)

    def initial_state(self) -> np.ndarray:
        return np.asarray(self.evaders, dtype=float).reshape(-1)

    def as_dict(self) -> dict:
        p = self.params
        it = self.integrator
        return {
            "name": self.name,
            "mode": p.mode.value,
            "k": p.k,
            "k1": p.k1,
            "R": p.R,
            "omega": p.omega,
            "kappa": p.kappa,
            "evaders": [list(e) for e in self.evaders],
            "integrator": {
                "t_end": it.t_end,
                "method": it.method,
                "step": it.step,
                "record_every": it.record_every,
                "rel_tol": it.rel_tol,
                "abs_tol": it.abs_tol,
                "max_step": None if math.isinf(it.max_step) else it.max_step,
            },
            "convergence": dict(self.convergence),
            "outputs": dict(self.outputs),
            "roa": _jsonable(self.roa),
            "sweep": _jsonable(self.sweep),
            "pi_roa": dict(self.pi_roa),
        }

    def hash(self) -> str:
        return hashlib.sha256(_dumps(self.as_dict()).encode()).hexdigest()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def _dumps(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2, allow_nan=False)


def _split_flow_pairs(node):
    """Accept ``{k:1}`` written without a space: YAML reads it as key ``"k:1"``."""
    if isinstance(node, dict):
        out = {}
        for key, value in node.items():
            m = _FLOW_PAIR.match(key) if isinstance(key, str) and value is None else None
            if m and m.group(1) in _TOP_KEYS + _INTEGRATOR_KEYS + _CONVERGENCE_KEYS:
                key, value = m.group(1), yaml.load(m.group(2), Loader=_Loader)
            out[key] = _split_flow_pairs(value)
        return out
    if isinstance(node, list):
        return [_split_flow_pairs(v) for v in node]
    return node


def _check_keys(block: dict, allowed, where: str) -> None:
    if not isinstance(block, dict):
        raise ValidationError(where or "config", "must be a mapping")
    for key in block:
        if key not in allowed:
            path = f"{where}.{key}" if where else str(key)
            raise ValidationError(path, "unknown key")


def _number(block: dict, key: str, where: str, default=None, *, positive=False,
            nonneg=False, required=False, integer=False):
    path = f"{where}.{key}" if where else key
    if key not in block or block[key] is None:
        if required:
            raise ValidationError(path, "required")
        return default
    value = block[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(path, "must be a number")
    if integer:
        if int(value) != value:
            raise ValidationError(path, "must be an integer")
        value = int(value)
    else:
        value = float(value)
    if not math.isfinite(value):
        raise ValidationError(path, "must be finite")
    if positive and not value > 0:
        raise ValidationError(path, "must be > 0")
    if nonneg and value < 0:
        raise ValidationError(path, "must be >= 0")
    return value


def _grid(spec, where: str) -> list[float]:
    """A list of numbers or ``{start, stop, points, log}``."""
    if isinstance(spec, (list, tuple)):
        return [_number({"v": v}, "v", where, required=True) for v in spec]
    _check_keys(spec, _GRID_KEYS, where)
    start = _number(spec, "start", where, required=True)
    stop = _number(spec, "stop", where, required=True)
    points = _number(spec, "points", where, required=True, integer=True, positive=True)
    if spec.get("log", False):
        if start <= 0 or stop <= 0:
            raise ValidationError(where, "log grids need positive bounds")
        return np.geomspace(start, stop, points).tolist()
    return np.linspace(start, stop, points).tolist()


def parse_scenario(data) -> ScenarioConfig:
    """Validate a parsed mapping and apply defaults.

    A run report (a mapping with ``command``, ``config`` and
    ``config_hash``) is accepted too; its embedded config is used.
    """
    if isinstance(data, dict) and {"command", "config", "config_hash"} <= set(data):
        data = data["config"]
    if not isinstance(data, dict):
        raise ValidationError("config", "top level must be a mapping")
    data = _split_flow_pairs(data)
    _check_keys(data, _TOP_KEYS, "")
    notices: list[str] = []

    raw = data.get("evaders")
    if not isinstance(raw, list) or not raw:
        raise ValidationError("evaders", "at least one evader is required")
    evaders = []
    for i, e in enumerate(raw):
        if (not isinstance(e, (list, tuple)) or len(e) != 2
                or any(isinstance(c, bool) or not isinstance(c, (int, float)) for c in e)):
            raise ValidationError(f"evaders[{i}]", "must be an [x, y] pair of numbers")
        if not all(math.isfinite(c) for c in e):
            raise ValidationError(f"evaders[{i}]", "must be finite")
        evaders.append(FixedCartesian(float(e[0]), float(e[1])))
    norms = [math.hypot(*e) for e in evaders]
    far = int(np.argmax(norms))
    if norms[far] > norms[0]:
        evaders.insert(0, evaders.pop(far))
        notices.append(f"re-indexed evaders: input evader {far} is farthest from the target "
                       f"and is now evader 0")
    kappa = math.hypot(*evaders[0])
    if "kappa" in data and data["kappa"] is not None:
        given = _number(data, "kappa", "", positive=True)
        if abs(given - kappa) > 1e-12 * max(1.0, kappa):
            raise ValidationError("kappa", f"must equal the farthest evader's radius {kappa!r}")
    if not kappa > 0:
        raise ValidationError("evaders", "at least one evader must be away from the target")

    mode = data.get("mode")
    if mode is not None and mode not in ("spiral", "circular"):
        raise ValidationError("mode", "must be 'spiral' or 'circular'")
    k1_default = 0.0 if mode == "circular" else None
    k1 = _number(data, "k1", "", k1_default, nonneg=True)
    if k1 is None:
        raise ValidationError("k1", "required for spiral pursuit")
    params = PursuitParams(
        k=_number(data, "k", "", required=True),
        k1=k1,
        R=_number(data, "R", "", required=True),
        omega=_number(data, "omega", "", required=True),
        kappa=kappa,
        mode=None if mode is None else Mode(mode),
    )
    if kappa >= params.R:
        notices.append(f"farthest evader radius {kappa:.6g} is not inside the pursuer circle "
                       f"R={params.R:.6g}; herding guarantees do not apply")

    it = data.get("integrator") or {}
    _check_keys(it, _INTEGRATOR_KEYS, "integrator")
    t_end = _number(it, "t_end", "integrator", positive=True)
    if t_end is None:
        try:
            t_end = default_t_end(params)
        except HerdlabError:
            t_end = 50.0 * params.period
    method = it.get("method", "rk4")
    if method not in ("rk4", "rk45"):
        raise ValidationError("integrator.method", "must be 'rk4' or 'rk45'")
    record_every = _number(it, "record_every", "integrator", positive=True)
    if record_every is None:
        record_every = params.period / 50.0
    integrator = IntegratorSettings(
        t_end=t_end,
        method=method,
        step=_number(it, "step", "integrator", positive=True),
        record_every=record_every,
        rel_tol=_number(it, "rel_tol", "integrator", 1e-9, positive=True),
        abs_tol=_number(it, "abs_tol", "integrator", 1e-12, positive=True),
        max_step=_number(it, "max_step", "integrator", math.inf, positive=True),
    )

    conv = data.get("convergence") or {}
    _check_keys(conv, _CONVERGENCE_KEYS, "convergence")
    convergence = {
        "tol": _number(conv, "tol", "convergence", 1e-3, positive=True),
        "window": _number(conv, "window", "convergence", 2.0 * params.period, positive=True),
    }

    out = data.get("outputs") or {}
    _check_keys(out, _OUTPUT_KEYS, "outputs")
    outputs = {
        "csv": bool(out.get("csv", True)),
        "polyline": bool(out.get("polyline", True)),
        "boundary_points": _number(out, "boundary_points", "outputs", 256, positive=True,
                                   integer=True),
    }

    roa_raw = data.get("roa") or {}
    _check_keys(roa_raw, _ROA_KEYS, "roa")
    roa = {"samples": _number(roa_raw, "samples", "roa", 256, positive=True, integer=True)}
    roa["kappa_grid"] = (None if roa_raw.get("kappa_grid") is None
                         else _grid(roa_raw["kappa_grid"], "roa.kappa_grid"))
    pr = roa_raw.get("psi_range")
    if pr is not None:
        if not isinstance(pr, list) or len(pr) != 2:
            raise ValidationError("roa.psi_range", "must be [lo, hi]")
        pr = [_number({"v": v}, "v", "roa.psi_range", required=True) for v in pr]
    roa["psi_range"] = pr
    bf = roa_raw.get("brute_force")
    if bf is not None:
        _check_keys(bf, _BRUTE_KEYS, "roa.brute_force")
        anchor = bf.get("anchor")
        if anchor is not None and (not isinstance(anchor, list) or len(anchor) != 2):
            raise ValidationError("roa.brute_force.anchor", "must be [kappa, psi0]")
        bf = {
            "r": _grid(bf.get("r", {"start": 0.05, "stop": params.R * 0.95, "points": 128}),
                       "roa.brute_force.r"),
            "psi": _grid(bf.get("psi", {"start": -math.pi, "stop": math.pi, "points": 128}),
                         "roa.brute_force.psi"),
            "anchor": None if anchor is None else [
                _number({"v": v}, "v", "roa.brute_force.anchor", required=True) for v in anchor],
            "t_end": _number(bf, "t_end", "roa.brute_force", positive=True),
            "tol": _number(bf, "tol", "roa.brute_force", 1e-4, positive=True),
        }
    roa["brute_force"] = bf

    sw = data.get("sweep") or {}
    _check_keys(sw, _SWEEP_KEYS, "sweep")
    parameter = sw.get("parameter", "omega")
    if parameter not in _SWEEPABLE:
        raise ValidationError("sweep.parameter", f"must be one of {list(_SWEEPABLE)}")
    values = sw.get("values")
    sweep = {
        "parameter": parameter,
        "values": ([params.omega * f for f in (1, 10, 100, 1000)] if values is None
                   else _grid(values, "sweep.values")),
        "simulate": bool(sw.get("simulate", False)),
    }

    pi = data.get("pi_roa") or {}
    _check_keys(pi, _PI_ROA_KEYS, "pi_roa")
    pi_roa_cfg = {
        "theta_samples": _number(pi, "theta_samples", "pi_roa", 64, positive=True, integer=True),
        "radius_grid": _number(pi, "radius_grid", "pi_roa", 256, positive=True, integer=True),
        "samples": _number(pi, "samples", "pi_roa", 256, positive=True, integer=True),
        "verify_angles": _number(pi, "verify_angles", "pi_roa", 0, nonneg=True, integer=True),
        "verify_phases": _number(pi, "verify_phases", "pi_roa", 0, nonneg=True, integer=True),
        "t_end": _number(pi, "t_end", "pi_roa", positive=True),
        "tol": _number(pi, "tol", "pi_roa", 1e-3, positive=True),
    }

    name = data.get("name", "")
    if not isinstance(name, str):
        raise ValidationError("name", "must be a string")
    return ScenarioConfig(params, tuple(evaders), integrator, convergence, outputs, roa,
                          sweep, pi_roa_cfg, name, notices)


class _Loader(yaml.SafeLoader):
    """Safe loader that also reads ``1e-9`` (no dot) as a float, as YAML 1.2 does."""


_Loader.add_implicit_resolver(
    "tag:yaml.org,2002:float",
    re.compile(r"""^(?:[-+]?(?:[0-9][0-9_]*)\.[0-9_]*(?:[eE][-+]?[0-9]+)?
                 |[-+]?(?:[0-9][0-9_]*)(?:[eE][-+]?[0-9]+)
                 |\.[0-9_]+(?:[eE][-+]?[0-9]+)?
                 |[-+]?\.(?:inf|Inf|INF)
                 |\.(?:nan|NaN|NAN))$""", re.X),
    list("-+0123456789."),
)


def load_scenario(path) -> ScenarioConfig:
    """Read and validate a YAML (or JSON) scenario file.

    Raises
    ------
    ParseError
        Malformed file, with line and column when known.
    ValidationError
        Schema violation, naming the offending field.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    if path.suffix.lower() == ".json":
        try:
            return parse_scenario(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: {exc.msg}", exc.lineno, exc.colno) from None
    try:
        data = yaml.load(text, Loader=_Loader)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark
        raise ParseError(f"{path}: {exc.problem}", None if mark is None else mark.line + 1,
                         None if mark is None else mark.column + 1) from None
    except yaml.YAMLError as exc:
        raise ParseError(f"{path}: {exc}") from None
    return parse_scenario(data)


# --------------------------------------------------------------------------
# reports and files


@dataclass
class RunReport:
    command: str
    config: dict | None
    config_hash: str | None
    results: dict = field(default_factory=dict)
    notices: list = field(default_factory=list)
    artifacts: list = field(default_factory=list)
    status: str = "ok"
    error: str | None = None
    exit_code: int = EXIT_OK
    wall_time: float = 0.0
    version: str = __version__

    def as_dict(self) -> dict:
        return {
            "command": self.command,
            "version": self.version,
            "status": self.status,
            "exit_code": self.exit_code,
            "error": self.error,
            "notices": list(self.notices),
            "params": None if self.config is None else {
                k: self.config[k] for k in ("mode", "k", "k1", "R", "omega", "kappa")},
            "config": self.config,
            "config_hash": self.config_hash,
            "results": self.results,
            "artifacts": list(self.artifacts),
            "wall_time": self.wall_time,
        }

    def write(self, out_dir: Path) -> Path:
        path = out_dir / f"{self.command.replace('-', '_')}_report.json"
        path.write_text(_dumps(self.as_dict()) + "\n")
        return path


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def trajectory_rows(cfg: ScenarioConfig, t: np.ndarray, uv: np.ndarray) -> list[list[float]]:
    """Rows ``t, x_p, y_p, then x_ei, y_ei, r_ei, psi_ei`` for each evader."""
    p = cfg.params
    xy = convert_states(uv, t, p.omega, Frame.ROTATING_CARTESIAN, Frame.FIXED_CARTESIAN)
    rpsi = convert_states(uv, t, p.omega, Frame.ROTATING_CARTESIAN, Frame.ROTATING_POLAR)
    r0 = np.hypot(uv[:, 0], uv[:, 1])
    rp = np.broadcast_to(pursuer_radius(r0, p), r0.shape)
    xp, yp = rp * np.cos(p.omega * t), rp * np.sin(p.omega * t)
    n = uv.shape[1] // 2
    cols = [t, xp, yp]
    for i in range(n):
        cols += [xy[:, 2 * i], xy[:, 2 * i + 1], rpsi[:, 2 * i], rpsi[:, 2 * i + 1]]
    return np.column_stack(cols)


def write_trajectory_csv(path: Path, cfg: ScenarioConfig, t, uv) -> None:
    n = uv.shape[1] // 2
    header = ["t", "x_p", "y_p"]
    for i in range(n):
        header += [f"x_e{i}", f"y_e{i}", f"r_e{i}", f"psi_e{i}"]
    rows = trajectory_rows(cfg, np.asarray(t, float), np.asarray(uv, float))
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(x) for x in row) + "\n")


def write_polylines(path: Path, polylines: list[tuple[str, np.ndarray]],
                    columns=("u", "v")) -> None:
    """Closed vertex lists, one ``id`` per polyline, vertices in order."""
    with open(path, "w") as fh:
        fh.write(",".join(("id",) + tuple(columns)) + "\n")
        for ident, pts in polylines:
            pts = np.asarray(pts, dtype=float)
            for a, b in np.vstack([pts, pts[:1]]):
                fh.write(f"{ident},{_fmt(a)},{_fmt(b)}\n")


# --------------------------------------------------------------------------
# commands


def _stable_target(params: PursuitParams, notices: list):
    try:
        if params.mode is Mode.CIRCULAR:
            return solve_circular(params)[2]
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            eqs = solve_spiral(params)
        notices.extend(str(w.message) for w in caught)
        return eqs[0] if len(eqs) == 1 else None
    except ModelError as exc:
        notices.append(f"no stable equilibrium: {exc}")
        return None


def _cmd_simulate(cfg: ScenarioConfig, out_dir: Path, report: RunReport, threads) -> None:
    p = cfg.params
    traj = simulate(p, cfg.initial_state(), cfg.integrator)
    res = {
        "termination": traj.termination.value,
        "t_stop": traj.t_stop,
        "bad_index": traj.bad_index,
        "message": traj.message,
        "samples": int(len(traj.t)),
        "final_state": {
            "uv": traj.states[-1].tolist(),
            "r_psi": convert_states(traj.states[-1], traj.t[-1], p.omega,
                                    Frame.ROTATING_CARTESIAN, Frame.ROTATING_POLAR).tolist(),
        },
    }
    report.results.update(res)
    if cfg.outputs["csv"]:
        path = out_dir / "trajectory.csv"
        write_trajectory_csv(path, cfg, traj.t, traj.states)
        report.artifacts.append(path.name)
    eq = _stable_target(p, report.notices)
    if eq is not None:
        report.results["equilibrium"] = eq.as_dict()
        window = cfg.convergence["window"]
        if traj.span >= window:
            rep = detect_convergence(traj, eq, cfg.convergence["tol"], window)
            report.results["convergence"] = {
                "converged": rep.converged,
                "t_converged": rep.t_converged,
                "final_error": rep.final_error,
                "per_evader_error": list(rep.per_evader_error),
                "tol": cfg.convergence["tol"],
            }
    if traj.termination in (Termination.SINGULAR, Termination.DOMAIN_ERROR):
        traj.raise_for_termination()


def _cmd_equilibria(cfg: ScenarioConfig, out_dir: Path, report: RunReport, threads) -> None:
    p = cfg.params
    if p.mode is Mode.CIRCULAR:
        roots, eq1, eq2 = solve_circular(p)
        report.results.update({
            "roots": {"r_s1": roots.r_s1, "r_s2": roots.r_s2, "r_s3": roots.r_s3},
            "r_s1": eq1.as_dict(),
            "r_s2": eq2.as_dict(),
            "stable": "r_s2",
        })
    else:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            eqs = solve_spiral(p)
        report.notices.extend(str(w.message) for w in caught)
        report.results["equilibria"] = [e.as_dict() for e in eqs]


def _verdicts(p: PursuitParams, n: int) -> dict:
    if p.mode is Mode.CIRCULAR:
        roots, eq1, eq2 = solve_circular(p)
        out = {}
        for label, eq in (("r_s1", eq1), ("r_s2", eq2)):
            v = classify(p, eq, n)
            d = v.as_dict()
            d["closed_form"] = [[z.real, z.imag] for z in eigenvalues_circular(p, eq.r_star)]
            d["equilibrium"] = eq.as_dict()
            out[label] = d
        return out
    eqs = solve_spiral(p)
    return {f"eq{i}": dict(classify(p, e, n).as_dict(), equilibrium=e.as_dict())
            for i, e in enumerate(eqs)}


def _cmd_stability(cfg: ScenarioConfig, out_dir: Path, report: RunReport, threads) -> None:
    report.results.update({"n": cfg.n, "verdicts": _verdicts(cfg.params, cfg.n)})


def _cmd_roa(cfg: ScenarioConfig, out_dir: Path, report: RunReport, threads) -> None:
    p = cfg.params
    nb = cfg.outputs["boundary_points"]
    roa = cfg.roa
    polylines = []
    if p.mode is Mode.SPIRAL and roa["kappa_grid"] is not None:
        summary = stable_region_spiral(p, roa["kappa_grid"], samples=roa["samples"],
                                       psi_range=roa["psi_range"], threads=threads)
        report.results["stable_region"] = summary.as_dict()
        polylines = [(f"kappa={e.kappa!r}", e.region.boundary(nb))
                     for e in summary.entries if e.region is not None]
    else:
        region = equilibrium_region(p, samples=roa["samples"])
        res = {"region": region.as_dict()}
        if p.mode is Mode.SPIRAL:
            res["initial_circle_contained"] = region.contains_circle(
                p.kappa, angle_range=None if roa["psi_range"] is None else tuple(roa["psi_range"]))
        report.results.update(res)
        polylines = [("region", region.boundary(nb))]
    if cfg.outputs["polyline"] and polylines:
        path = out_dir / "roa_boundaries.csv"
        write_polylines(path, polylines)
        report.artifacts.append(path.name)
    bf = roa["brute_force"]
    if bf is not None:
        rmap = brute_force_region(p, bf["r"], bf["psi"], anchor=bf["anchor"], t_end=bf["t_end"],
                                  tol=bf["tol"], threads=threads)
        report.results["brute_force"] = {
            "t_end": rmap.t_end,
            "anchor": rmap.anchor,
            "counts": {o.name.title(): rmap.count(o) for o in Outcome},
        }
        path = out_dir / "region_map.csv"
        with open(path, "w") as fh:
            fh.write("r,psi,outcome,t_converged\n")
            for i, r in enumerate(rmap.r_values):
                for j, psi in enumerate(rmap.psi_values):
                    tc = rmap.t_converged[i, j]
                    fh.write(f"{_fmt(r)},{_fmt(psi)},{Outcome(rmap.outcomes[i, j]).name.title()},"
                             f"{'' if math.isnan(tc) else _fmt(tc)}\n")
        report.artifacts.append(path.name)


def _sweep_point(cfg: ScenarioConfig, value: float) -> dict:
    name = cfg.sweep["parameter"]
    row = {"value": value}
    try:
        p = cfg.params.replace(**{name: value})
        if p.mode is Mode.CIRCULAR:
            roots, eq1, eq2 = solve_circular(p)
            row.update(r_s1=roots.r_s1, r_s2=roots.r_s2, psi_s2=eq2.psi_star, R_star=p.R)
            eq = eq2
        else:
            eq = stable_equilibrium(p)
            row.update(r_star=eq.r_star, psi_star=eq.psi_star, R_star=eq.R_star)
        v = classify(p, eq, cfg.n)
        row.update(stability=v.cls.value, margin=v.margin)
        if cfg.sweep["simulate"]:
            settings = IntegratorSettings(t_end=default_t_end(p, eq),
                                          record_every=p.period / 50.0)
            s0 = cfg.initial_state()
            if name == "kappa":
                s0 = s0 * (value / cfg.params.kappa)
            traj = simulate(p, s0, settings)
            rep = detect_convergence(traj, eq, cfg.convergence["tol"], 2.0 * p.period) \
                if traj.span >= 2.0 * p.period else None
            row.update(termination=traj.termination.value,
                       converged=bool(rep and rep.converged),
                       final_error=None if rep is None else rep.final_error)
    except HerdlabError as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def _cmd_sweep(cfg: ScenarioConfig, out_dir: Path, report: RunReport, threads) -> None:
    rows = pmap(lambda v: _sweep_point(cfg, v), cfg.sweep["values"], threads)
    report.results.update({"parameter": cfg.sweep["parameter"], "points": rows})
    if cfg.outputs["csv"]:
        keys = []
        for row in rows:
            keys += [k for k in row if k not in keys]
        path = out_dir / "sweep.csv"
        with open(path, "w") as fh:
            fh.write(",".join(keys) + "\n")
            for row in rows:
                cells = []
                for k in keys:
                    v = row.get(k)
                    if isinstance(v, float):
                        cells.append(_fmt(v))
                    elif v is None:
                        cells.append("")
                    else:
                        cells.append(str(v).replace(",", ";"))
                fh.write(",".join(cells) + "\n")
        report.artifacts.append(path.name)
    if any("error" in r for r in rows):
        report.notices.append("some sweep points failed; see their 'error' fields")


def verify_pi_roa(params: PursuitParams, r_max: float, angles: int, phases: int, *,
                  t_end: float | None = None, tol: float = 1e-3, threads=None,
                  backend: str | None = None) -> dict:
    """Integrate points of the ``r_max`` circle from many initial pursuer phases.

    A pursuer starting at phase ``theta`` sees an evader at fixed-frame angle
    ``alpha`` at rotating-frame angle ``alpha - theta``.
    """
    eq = stable_equilibrium(params)
    t_end = default_t_end(params, eq) if t_end is None else t_end
    settings = IntegratorSettings(t_end=t_end)
    alphas = np.linspace(0.0, 2.0 * math.pi, angles, endpoint=False)
    thetas = np.linspace(0.0, 2.0 * math.pi, phases, endpoint=False)
    cases = [(a, th) for a in alphas for th in thetas]

    def one(case):
        a, th = case
        s0 = [r_max * math.cos(a - th), r_max * math.sin(a - th)]
        traj = simulate(params, s0, settings, target=eq, tol=tol, backend=backend)
        if traj.termination is not Termination.CONVERGED:
            return False, float("inf")
        return True, detect_convergence(traj, eq, tol, 2.0 * params.period).final_error

    results = pmap(one, cases, threads)
    ok = [r[0] for r in results]
    return {
        "angles": angles,
        "phases": phases,
        "t_end": t_end,
        "tol": tol,
        "converged": int(sum(ok)),
        "total": len(ok),
        "all_converged": all(ok),
        "worst_final_error": max(r[1] for r in results),
    }


def _cmd_pi_roa(cfg: ScenarioConfig, out_dir: Path, report: RunReport, threads) -> None:
    p = cfg.params
    if p.mode is not Mode.CIRCULAR:
        raise ValidationError("mode", "pi-roa requires circular pursuit (k1 = 0)")
    pc = cfg.pi_roa
    res = pi_roa(p, theta_samples=pc["theta_samples"], radius_grid=pc["radius_grid"],
                 samples=pc["samples"])
    report.results.update(res.as_dict())
    if pc["verify_angles"] and pc["verify_phases"]:
        report.results["verification"] = verify_pi_roa(
            p, res.r_max, pc["verify_angles"], pc["verify_phases"], t_end=pc["t_end"],
            tol=pc["tol"], threads=threads)
    if cfg.outputs["polyline"]:
        nb = cfg.outputs["boundary_points"]
        th = np.linspace(0.0, 2.0 * math.pi, nb, endpoint=False)
        disk = res.r_max * np.stack([np.cos(th), np.sin(th)], axis=1)
        path = out_dir / "pi_roa.csv"
        write_polylines(path, [("pi_roa_disk", disk), ("ellipse_theta0", res.region.boundary(nb))],
                        columns=("x", "y"))
        report.artifacts.append(path.name)


_DISPATCH = {
    "simulate": _cmd_simulate,
    "equilibria": _cmd_equilibria,
    "stability": _cmd_stability,
    "roa": _cmd_roa,
    "sweep": _cmd_sweep,
    "pi-roa": _cmd_pi_roa,
}


def run(command: str, cfg: ScenarioConfig, out_dir, threads: int | None = None) -> RunReport:
    """Execute ``command`` and write its artifacts plus a JSON report.

    Model errors are caught and recorded (exit code 2); the report and any
    artifacts produced before the failure are still written.
    """
    if command not in _DISPATCH:
        raise ValidationError("command", f"must be one of {list(COMMANDS)}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    report = RunReport(command, cfg.as_dict(), cfg.hash(), notices=list(cfg.notices))
    t0 = time.perf_counter()
    try:
        _DISPATCH[command](cfg, out_dir, report, threads)
    except ModelError as exc:
        report.status, report.exit_code = "model_error", EXIT_MODEL
        report.error = f"{type(exc).__name__}: {exc}"
    except ValidationError as exc:
        report.status, report.exit_code = "usage_error", EXIT_USAGE
        report.error = f"{type(exc).__name__}: {exc}"
    report.wall_time = time.perf_counter() - t0
    report.artifacts.append(report.write(out_dir).name)
    return report


# --------------------------------------------------------------------------
# entry point


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit with 1, not argparse's 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="herdlab", description=__doc__.split("\n\n")[0])
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="scenario file (YAML or JSON)")
    parser.add_argument("--out-dir", default="herdlab_out", help="directory for outputs")
    parser.add_argument("--threads", type=int, default=None,
                        help="worker threads for sweeps (HERDLAB_THREADS overrides)")
    parser.add_argument("--version", action="version", version=f"herdlab {__version__}")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out_dir = Path(args.out_dir)
    try:
        threads = resolve_threads(args.threads)
        cfg = load_scenario(args.config)
    except (ParseError, ValidationError) as exc:
        print(f"herdlab: {type(exc).__name__}: {exc}", file=sys.stderr)
        try:
            out_dir.mkdir(parents=True, exist_ok=True)
            RunReport(args.command, None, None, status="usage_error", exit_code=EXIT_USAGE,
                      error=f"{type(exc).__name__}: {exc}").write(out_dir)
        except OSError:
            pass
        return EXIT_USAGE
    for note in cfg.notices:
        print(f"herdlab: notice: {note}", file=sys.stderr)
    report = run(args.command, cfg, out_dir, threads)
    if report.error:
        print(f"herdlab: {report.error}", file=sys.stderr)
    print(json.dumps({"command": report.command, "status": report.status,
                      "report": str(out_dir / f"{args.command.replace('-', '_')}_report.json")}))
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
