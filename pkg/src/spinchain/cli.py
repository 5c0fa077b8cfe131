"""Command-line entry point: single runs, parameter sweeps, config validation.

Verbs::

    spinchain run <config.json>      [--backend B] [--out-dir D] [--tol T]
    spinchain sweep <config.json> --axis <path> --values v1,v2,...
                                     [--jobs N] [--backend B] [--out-dir D] [--tol T]
    spinchain validate <config.json>

A run writes ``<stem>.csv`` (time, complex amplitudes, populations,
fidelity; 17 significant digits so doubles round-trip exactly) and a
``<stem>.meta.json`` sidecar holding the fully resolved configuration,
solver diagnostics, error estimates, and wall time.  A sidecar can be fed
back as a config and reproduces the run.  Failures exit nonzero and print
a machine-readable diagnostic JSON to stderr.

Configs are JSON with exhaustive unknown-key rejection; see
``example:`` in the README or the test fixtures.  ``SPINCHAIN_LOG``
(debug|info|warning) controls verbosity.
"""

from __future__ import annotations

import argparse
import copy
import enum
import json
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfigError, SpinChainError, UnknownAxisError, ValidationError
from .inversion import InversionMethod, InversionPlan, invert
from .kernels import load_tabulated
from .model import (ChainSpec, InitialState, ReservoirKind, ReservoirSpec, TimeGrid,
                    ValidatedConfig, validate)
from .observables import fidelity, populations
from .oracle import (PseudomodeSystem, VolterraConfig, VolterraScheme, solve_pseudomode,
                     solve_volterra)

log = logging.getLogger("spinchain")


class Backend(enum.Enum):
    LAPLACE = "laplace"
    VOLTERRA = "volterra"
    PSEUDOMODE = "pseudomode"
    CROSS_CHECK = "cross-check"


_PRESETS = ("first-site", "last-site", "center", "uniform-channel")

_TOP_KEYS = {"chain", "reservoirs", "initial", "grid", "backend", "inversion",
             "volterra", "output"}
_CHAIN_KEYS = {"n_sites", "coupling", "omega_eg"}
_GRID_KEYS = {"t_max", "n_points"}
_INV_KEYS = {"method", "contour_shift", "n_terms", "euler_depth", "target_tol"}
_VOL_KEYS = {"dt", "scheme"}
_OUT_KEYS = {"dir", "stem"}
_RES_KEYS = {
    "lorentzian": {"kind", "g", "gamma", "omega_c", "delta_c"},
    "ohmic": {"kind", "g", "omega_c", "s_param"},
    "tabulated": {"kind", "path", "samples"},
}


def _reject_unknown(section: dict, allowed: set, path: str):
    if not isinstance(section, dict):
        raise ConfigError(f"{path}: expected an object")
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"{path}: unknown key(s) {sorted(unknown)}; allowed: {sorted(allowed)}")


def _require(section: dict, key: str, path: str):
    if key not in section:
        raise ConfigError(f"{path}: missing required key '{key}'")
    return section[key]


def _number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}: expected a number, got {value!r}")
    return float(value)


@dataclass(frozen=True)
class RunSetup:
    """A parsed config: validated physics plus execution choices."""

    cfg: ValidatedConfig
    grid: TimeGrid
    backend: Backend
    plan: InversionPlan
    volterra: VolterraConfig
    out_dir: Path
    stem: str
    resolved: dict


def _parse_reservoir(section: dict, path: str, base_dir: Path) -> tuple[ReservoirSpec, dict]:
    if not isinstance(section, dict):
        raise ConfigError(f"{path}: expected an object")
    kind = _require(section, "kind", path)
    if kind not in _RES_KEYS:
        raise ConfigError(f"{path}.kind: unknown kind {kind!r}; allowed: {sorted(_RES_KEYS)}")
    _reject_unknown(section, _RES_KEYS[kind], path)
    if kind == "lorentzian":
        g = _number(_require(section, "g", path), f"{path}.g")
        gamma = _number(_require(section, "gamma", path), f"{path}.gamma")
        omega_c = section.get("omega_c")
        delta_c = section.get("delta_c")
        spec = ReservoirSpec.lorentzian(
            g=g, gamma=gamma,
            omega_c=None if omega_c is None else _number(omega_c, f"{path}.omega_c"),
            delta_c=None if delta_c is None else _number(delta_c, f"{path}.delta_c"))
        resolved = {"kind": kind, "g": spec.g, "gamma": spec.gamma}
        if spec.omega_c is not None:
            resolved["omega_c"] = spec.omega_c
        else:
            resolved["delta_c"] = spec.delta_c
    elif kind == "ohmic":
        spec = ReservoirSpec.ohmic(
            g=_number(_require(section, "g", path), f"{path}.g"),
            omega_c=_number(_require(section, "omega_c", path), f"{path}.omega_c"),
            s_param=_number(_require(section, "s_param", path), f"{path}.s_param"))
        resolved = {"kind": kind, "g": spec.g, "omega_c": spec.omega_c, "s_param": spec.s_param}
    else:
        if ("path" in section) == ("samples" in section):
            raise ConfigError(f"{path}: tabulated reservoirs need exactly one of 'path' or 'samples'")
        if "path" in section:
            table = Path(section["path"])
            if not table.is_absolute():
                table = base_dir / table
            spec = load_tabulated(table)
        else:
            samples = section["samples"]
            try:
                arr = np.asarray(samples, dtype=float)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"{path}.samples: expected [[omega, J], ...]") from exc
            if arr.ndim != 2 or arr.shape[1] != 2:
                raise ConfigError(f"{path}.samples: expected [[omega, J], ...]")
            spec = ReservoirSpec.tabulated(arr[:, 0], arr[:, 1])
        resolved = {"kind": kind, "samples": [[w, j] for w, j in spec.samples]}
    return spec, resolved


def _parse_initial(section, n_sites: int, path: str) -> tuple[InitialState, object]:
    if isinstance(section, str):
        if section not in _PRESETS:
            raise ConfigError(f"{path}: unknown preset {section!r}; allowed: {_PRESETS}")
        maker = {"first-site": InitialState.first_site, "last-site": InitialState.last_site,
                 "center": InitialState.center, "uniform-channel": InitialState.uniform_channel}
        return maker[section](n_sites), section
    _reject_unknown(section, {"amplitudes"}, path)
    amp_list = _require(section, "amplitudes", path)
    try:
        arr = np.asarray(amp_list, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}.amplitudes: expected [[re, im], ...]") from exc
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ConfigError(f"{path}.amplitudes: expected [[re, im], ...]")
    state = InitialState(arr[:, 0] + 1j * arr[:, 1])
    return state, {"amplitudes": [[re, im] for re, im in arr.tolist()]}


def parse_config(data: dict, base_dir: Path, *, backend_override: str | None = None,
                 out_dir_override: str | None = None, tol_override: float | None = None,
                 default_stem: str = "run") -> RunSetup:
    """Validate a raw config dict and resolve every default."""
    if isinstance(data, dict) and "config" in data and "chain" not in data:
        # metadata sidecar re-fed as a config
        _reject_unknown({k: None for k in ("config",)}, {"config"}, "$")
        data = data["config"]
    _reject_unknown(data, _TOP_KEYS, "$")

    chain_raw = _require(data, "chain", "$")
    _reject_unknown(chain_raw, _CHAIN_KEYS, "$.chain")
    n_sites = _require(chain_raw, "n_sites", "$.chain")
    if isinstance(n_sites, bool) or not isinstance(n_sites, int):
        raise ConfigError("$.chain.n_sites: expected an integer")
    chain = ChainSpec(n_sites=n_sites,
                      coupling=_number(chain_raw.get("coupling", 1.0), "$.chain.coupling"),
                      omega_eg=_number(chain_raw.get("omega_eg", 0.0), "$.chain.omega_eg"))

    res_raw = _require(data, "reservoirs", "$")
    _reject_unknown(res_raw, {"left", "right", "both"}, "$.reservoirs")
    if "both" in res_raw:
        if "left" in res_raw or "right" in res_raw:
            raise ConfigError("$.reservoirs: give either 'both' or 'left'+'right'")
        res1, r1_resolved = _parse_reservoir(res_raw["both"], "$.reservoirs.both", base_dir)
        res2, r2_resolved = res1, copy.deepcopy(r1_resolved)
    else:
        res1, r1_resolved = _parse_reservoir(_require(res_raw, "left", "$.reservoirs"),
                                             "$.reservoirs.left", base_dir)
        res2, r2_resolved = _parse_reservoir(_require(res_raw, "right", "$.reservoirs"),
                                             "$.reservoirs.right", base_dir)

    init, init_resolved = _parse_initial(_require(data, "initial", "$"), chain.n_sites, "$.initial")
    cfg = validate(chain, res1, res2, init)

    grid_raw = _require(data, "grid", "$")
    _reject_unknown(grid_raw, _GRID_KEYS, "$.grid")
    grid = TimeGrid.linspace(_number(_require(grid_raw, "t_max", "$.grid"), "$.grid.t_max"),
                             int(_number(_require(grid_raw, "n_points", "$.grid"), "$.grid.n_points")))

    backend_name = backend_override or data.get("backend") or _default_backend(cfg)
    try:
        backend = Backend(backend_name)
    except ValueError:
        raise ConfigError(f"$.backend: unknown backend {backend_name!r}") from None

    inv_raw = dict(data.get("inversion", {}))
    _reject_unknown(inv_raw, _INV_KEYS, "$.inversion")
    if "method" in inv_raw:
        try:
            inv_raw["method"] = InversionMethod(inv_raw["method"])
        except ValueError:
            raise ConfigError(f"$.inversion.method: unknown method {inv_raw['method']!r}") from None
    if tol_override is not None:
        inv_raw["target_tol"] = tol_override
    try:
        plan = InversionPlan(**inv_raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"$.inversion: {exc}") from exc

    vol_raw = dict(data.get("volterra", {}))
    _reject_unknown(vol_raw, _VOL_KEYS, "$.volterra")
    if "scheme" in vol_raw:
        try:
            vol_raw["scheme"] = VolterraScheme(vol_raw["scheme"])
        except ValueError:
            raise ConfigError(f"$.volterra.scheme: unknown scheme {vol_raw['scheme']!r}") from None
    vol_raw.setdefault("dt", min(1e-3, 0.1 / chain.coupling))
    volterra = VolterraConfig(**vol_raw)

    out_raw = data.get("output", {})
    _reject_unknown(out_raw, _OUT_KEYS, "$.output")
    out_dir = Path(out_dir_override or out_raw.get("dir", "."))
    stem = out_raw.get("stem", default_stem)

    resolved = {
        "chain": {"n_sites": chain.n_sites, "coupling": chain.coupling, "omega_eg": chain.omega_eg},
        "reservoirs": {"left": r1_resolved, "right": r2_resolved},
        "initial": init_resolved,
        "grid": {"t_max": grid.t_max, "n_points": len(grid)},
        "backend": backend.value,
        "inversion": {"method": plan.method.value, "contour_shift": plan.contour_shift,
                      "n_terms": plan.n_terms, "euler_depth": plan.euler_depth,
                      "target_tol": plan.target_tol},
        "volterra": {"dt": volterra.dt, "scheme": volterra.scheme.value},
        "output": {"dir": str(out_dir), "stem": stem},
    }
    return RunSetup(cfg=cfg, grid=grid, backend=backend, plan=plan, volterra=volterra,
                    out_dir=out_dir, stem=stem, resolved=resolved)


def _default_backend(cfg: ValidatedConfig) -> str:
    # the Ohmic inversion is the numerically riskiest path: cross-check it
    if any(r.g != 0.0 and r.kind is ReservoirKind.OHMIC for r in cfg.reservoirs):
        return Backend.CROSS_CHECK.value
    return Backend.LAPLACE.value


def _pseudomode_available(cfg: ValidatedConfig) -> bool:
    return all(r.g == 0.0 or r.kind is ReservoirKind.LORENTZIAN for r in cfg.reservoirs)


def _solve(setup: RunSetup):
    """Run the selected backend; returns (trajectory, diagnostics dict)."""
    cfg, grid = setup.cfg, setup.grid
    diagnostics: dict = {"backend": setup.backend.value}
    if setup.backend is Backend.LAPLACE:
        traj = invert(cfg, setup.plan, grid)
        diagnostics["max_est_error"] = float(traj.est_error.max())
    elif setup.backend is Backend.VOLTERRA:
        traj = solve_volterra(cfg, setup.volterra, grid)
        diagnostics["dt"] = setup.volterra.dt
    elif setup.backend is Backend.PSEUDOMODE:
        traj = solve_pseudomode(PseudomodeSystem.from_config(cfg), grid)
    else:
        traj = invert(cfg, setup.plan, grid)
        diagnostics["max_est_error"] = float(traj.est_error.max())
        if _pseudomode_available(cfg):
            oracle_traj = solve_pseudomode(PseudomodeSystem.from_config(cfg), grid)
            diagnostics["oracle"] = "pseudomode"
        else:
            oracle_traj = solve_volterra(cfg, setup.volterra, grid)
            diagnostics["oracle"] = "volterra"
            diagnostics["oracle_dt"] = setup.volterra.dt
        deviation = np.abs(traj.amplitudes - oracle_traj.amplitudes)
        diagnostics["cross_check"] = {
            "max_deviation": float(deviation.max()),
            "max_deviation_time": float(grid.t_values[int(np.argmax(deviation.max(axis=1)))]),
        }
        log.info("cross-check max deviation %.3e against %s",
                 deviation.max(), diagnostics["oracle"])
    return traj, diagnostics


def _format(value: float) -> str:
    return f"{value:.17g}"


def _write_atomic(path: Path, text: str):
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def write_trajectory_csv(path: Path, traj, pops, fid):
    n = traj.n_sites
    cols = ["t"]
    for i in range(1, n + 1):
        cols += [f"re_c{i}", f"im_c{i}"]
    cols += [f"p_{i}" for i in range(1, n + 1)] + ["p_channel", "p_total", "fidelity"]
    lines = [",".join(cols)]
    t_values = traj.grid.t_values
    for j in range(len(traj.grid)):
        row = [_format(t_values[j])]
        for i in range(n):
            amp = traj.amplitudes[j, i]
            row += [_format(amp.real), _format(amp.imag)]
        row += [_format(pops[f"P_{i}"].values[j]) for i in range(1, n + 1)]
        row += [_format(pops["P_channel"].values[j]), _format(pops["P_total"].values[j]),
                _format(fid.values[j])]
        lines.append(",".join(row))
    _write_atomic(path, "\n".join(lines) + "\n")


def execute_run(setup: RunSetup) -> dict:
    """Solve, write artifacts, and return a summary (paths + key numbers)."""
    start = time.monotonic()
    traj, diagnostics = _solve(setup)
    pops = populations(traj)
    fid = fidelity(traj)
    setup.out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = setup.out_dir / f"{setup.stem}.csv"
    meta_path = setup.out_dir / f"{setup.stem}.meta.json"
    write_trajectory_csv(csv_path, traj, pops, fid)

    j_peak = int(np.argmax(fid.values))
    summary = {
        "p_total_at_t_max": float(pops["P_total"].values[-1]),
        "max_fidelity": float(fid.values[j_peak]),
        "t_at_max_fidelity": float(traj.grid.t_values[j_peak]),
    }
    meta = {
        "config": setup.resolved,
        "diagnostics": diagnostics,
        "summary": summary,
        "validation_warnings": list(setup.cfg.warnings),
        "wall_time_s": time.monotonic() - start,
        "spinchain_version": __version__,
    }
    _write_atomic(meta_path, json.dumps(meta, indent=2, sort_keys=True) + "\n")
    log.info("wrote %s and %s", csv_path, meta_path)
    return {"csv": str(csv_path), "meta": str(meta_path), **summary}


# ---------------------------------------------------------------------------
# sweep machinery
# ---------------------------------------------------------------------------

def _axis_target(resolved: dict, axis: str):
    """Yield (container, key) pairs the axis refers to; UnknownAxisError otherwise."""
    tokens = axis.split(".")
    if tokens[0] == "reservoirs" and len(tokens) == 3 and tokens[1] == "both":
        sides = ["left", "right"]
    elif tokens[0] == "reservoirs" and len(tokens) == 3 and tokens[1] in ("left", "right"):
        sides = [tokens[1]]
    elif len(tokens) == 2 and tokens[0] in ("chain", "grid"):
        container = resolved.get(tokens[0], {})
        if tokens[1] not in container or not isinstance(container[tokens[1]], (int, float)) \
                or isinstance(container[tokens[1]], bool):
            raise UnknownAxisError(f"axis {axis!r} does not name a numeric scalar")
        return [(container, tokens[1])]
    else:
        raise UnknownAxisError(f"axis {axis!r} is not sweepable")
    targets = []
    for side in sides:
        container = resolved["reservoirs"][side]
        if tokens[2] not in container or not isinstance(container[tokens[2]], (int, float)):
            raise UnknownAxisError(f"axis {axis!r} does not name a numeric scalar ({side})")
        targets.append((container, tokens[2]))
    return targets


def _apply_axis(resolved: dict, axis: str, value: float) -> dict:
    data = copy.deepcopy(resolved)
    for container, key in _axis_target(data, axis):
        if isinstance(container[key], int) and not isinstance(container[key], bool):
            if abs(value - round(value)) > 1e-9:
                raise ConfigError(f"axis {axis!r} is integer-valued; got {value}")
            container[key] = int(round(value))
        else:
            container[key] = float(value)
    return data


def _sanitize(axis: str, value: float) -> str:
    return f"{axis.replace('.', '-')}={value:g}"


def _sweep_point(payload: str) -> dict:
    args = json.loads(payload)
    try:
        setup = parse_config(args["config"], Path(args["base_dir"]),
                             default_stem=args["stem"])
        result = execute_run(setup)
        return {"value": args["value"], "status": "ok", **result}
    except Exception as exc:  # recorded, sweep continues
        return {"value": args["value"], "status": "error",
                "error": type(exc).__name__, "message": str(exc)}


def execute_sweep(setup: RunSetup, axis: str, values: list[float], jobs: int,
                  base_dir: Path) -> dict:
    """Run one point per value, then write a deterministic summary CSV."""
    _axis_target(copy.deepcopy(setup.resolved), axis)  # validate axis up front
    payloads = []
    for value in values:
        point_config = _apply_axis(setup.resolved, axis, value)
        stem = f"{setup.stem}__{_sanitize(axis, value)}"
        point_config["output"] = {"dir": str(setup.out_dir), "stem": stem}
        payloads.append(json.dumps({"config": point_config, "base_dir": str(base_dir),
                                    "stem": stem, "value": value}))
    if jobs > 1 and len(payloads) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_point, payloads))
    else:
        rows = [_sweep_point(p) for p in payloads]

    setup.out_dir.mkdir(parents=True, exist_ok=True)
    summary_path = setup.out_dir / f"{setup.stem}__sweep.csv"
    lines = ["value,status,p_total_at_t_max,max_fidelity,t_at_max_fidelity,error"]
    for row in rows:
        if row["status"] == "ok":
            lines.append(",".join([_format(row["value"]), "ok",
                                   _format(row["p_total_at_t_max"]),
                                   _format(row["max_fidelity"]),
                                   _format(row["t_at_max_fidelity"]), ""]))
        else:
            lines.append(",".join([_format(row["value"]), "error", "", "", "",
                                   row["error"]]))
    _write_atomic(summary_path, "\n".join(lines) + "\n")
    meta = {
        "config": setup.resolved,
        "sweep": {"axis": axis, "values": list(values)},
        "spinchain_version": __version__,
    }
    _write_atomic(summary_path.with_name(f"{setup.stem}__sweep.meta.json"),
                  json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return {"summary": str(summary_path), "points": rows}


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _load_json(path: Path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spinchain", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="verb", required=True)
    for verb in ("run", "sweep", "validate"):
        p = sub.add_parser(verb)
        p.add_argument("config", type=Path)
        if verb in ("run", "sweep"):
            p.add_argument("--backend", choices=[b.value for b in Backend])
            p.add_argument("--out-dir")
            p.add_argument("--tol", type=float)
        if verb == "sweep":
            p.add_argument("--axis", required=True)
            p.add_argument("--values", required=True,
                           help="comma-separated numbers (empty string for a no-op sweep)")
            p.add_argument("--jobs", type=int, default=1)
    return parser


def _parse_values(raw: str) -> list[float]:
    raw = raw.strip()
    if not raw:
        return []
    try:
        return [float(tok) for tok in raw.split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise ConfigError(f"--values: expected comma-separated numbers, got {raw!r}") from exc


def main(argv=None) -> int:
    logging.basicConfig(
        level=getattr(logging, os.environ.get("SPINCHAIN_LOG", "warning").upper(), logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s")
    args = _build_parser().parse_args(argv)
    try:
        data = _load_json(args.config)
        setup = parse_config(
            data, args.config.parent,
            backend_override=getattr(args, "backend", None),
            out_dir_override=getattr(args, "out_dir", None),
            tol_override=getattr(args, "tol", None),
            default_stem=args.config.stem.removesuffix(".meta"))
    except (ConfigError, ValidationError) as exc:
        _emit_diagnostic("config-error", exc)
        return 2

    try:
        if args.verb == "validate":
            print(json.dumps({"status": "valid",
                              "warnings": list(setup.cfg.warnings)}, indent=2))
            return 0
        if args.verb == "run":
            result = execute_run(setup)
            print(json.dumps({"status": "ok", **result}, indent=2))
            return 0
        values = _parse_values(args.values)
        result = execute_sweep(setup, args.axis, values, args.jobs, args.config.parent)
        print(json.dumps({"status": "ok", "summary": result["summary"],
                          "points": result["points"]}, indent=2))
        return 0
    except (ConfigError, ValidationError) as exc:
        _emit_diagnostic("config-error", exc)
        return 2
    except SpinChainError as exc:
        _emit_diagnostic("run-error", exc)
        return 3


def _emit_diagnostic(status: str, exc: Exception):
    print(json.dumps({"status": status, "error": type(exc).__name__,
                      "message": str(exc)}), file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
