"""Synthetic artifacts in the simulation CLI's exact file formats.

The writers here mirror the external interface (column layout, sidecar
shape) without importing the simulator, so the figure package is tested
purely against the documented formats.
"""

import json
from pathlib import Path

import numpy as np
import pytest


def fmt(value: float) -> str:
    return f"{value:.17g}"


def reservoir_config(kind="lorentzian", g=0.3, **extra):
    if kind == "lorentzian":
        return {"kind": kind, "g": g, "gamma": extra.get("gamma", 0.02),
                "delta_c": extra.get("delta_c", 0.0)}
    return {"kind": kind, "g": g, "omega_c": extra.get("omega_c", 1.0),
            "s_param": extra.get("s_param", 1.0)}


def write_trajectory(directory: Path, stem: str, n_sites: int, t: np.ndarray,
                     site_populations: np.ndarray, reservoir=None) -> Path:
    """Trajectory CSV + sidecar; amplitudes are reconstructed as sqrt(p)."""
    directory.mkdir(parents=True, exist_ok=True)
    reservoir = reservoir or reservoir_config()
    p = np.asarray(site_populations, dtype=float)
    assert p.shape == (t.size, n_sites)
    cols = ["t"]
    for i in range(1, n_sites + 1):
        cols += [f"re_c{i}", f"im_c{i}"]
    cols += [f"p_{i}" for i in range(1, n_sites + 1)] + ["p_channel", "p_total", "fidelity"]
    lines = [",".join(cols)]
    for j in range(t.size):
        row = [fmt(t[j])]
        for i in range(n_sites):
            row += [fmt(np.sqrt(p[j, i])), fmt(0.0)]
        channel = float(p[j, 1:-1].sum()) if n_sites > 2 else 0.0
        total = float(p[j, 0] + channel + p[j, -1])
        mag = np.sqrt(p[j, -1])
        fid = 0.5 + p[j, -1] / 6.0 + mag / 3.0
        row += [fmt(p[j, i]) for i in range(n_sites)]
        row += [fmt(channel), fmt(total), fmt(fid)]
        lines.append(",".join(row))
    csv_path = directory / f"{stem}.csv"
    csv_path.write_text("\n".join(lines) + "\n")
    meta = {
        "config": {
            "chain": {"n_sites": n_sites, "coupling": 1.0, "omega_eg": 0.0},
            "reservoirs": {"left": reservoir, "right": reservoir},
            "initial": "first-site",
            "grid": {"t_max": float(t[-1]), "n_points": int(t.size)},
            "backend": "laplace",
        },
        "diagnostics": {"backend": "laplace"},
        "spinchain_version": "synthetic",
    }
    (directory / f"{stem}.meta.json").write_text(json.dumps(meta, indent=2))
    return csv_path


def write_sweep_summary(directory: Path, stem: str, values, max_fid, p_total,
                        axis="chain.n_sites", g=0.3) -> Path:
    directory.mkdir(parents=True, exist_ok=True)
    lines = ["value,status,p_total_at_t_max,max_fidelity,t_at_max_fidelity,error"]
    for v, f, p in zip(values, max_fid, p_total):
        lines.append(",".join([fmt(v), "ok", fmt(p), fmt(f), fmt(v / 1.0), ""]))
    path = directory / f"{stem}__sweep.csv"
    path.write_text("\n".join(lines) + "\n")
    meta = {
        "config": {
            "chain": {"n_sites": int(values[0]), "coupling": 1.0, "omega_eg": 0.0},
            "reservoirs": {"left": reservoir_config(g=g), "right": reservoir_config(g=g)},
            "initial": "first-site",
        },
        "sweep": {"axis": axis, "values": list(values)},
        "spinchain_version": "synthetic",
    }
    (directory / f"{stem}__sweep.meta.json").write_text(json.dumps(meta, indent=2))
    return path


def damped_populations(t: np.ndarray, n_sites: int, rate: float = 0.02) -> np.ndarray:
    """A plausible-looking population pattern: hopping beats under decay."""
    envelope = np.exp(-rate * t)
    p = np.empty((t.size, n_sites))
    for i in range(n_sites):
        phase = np.cos(0.5 * t - 0.9 * i) ** 2
        p[:, i] = envelope * phase / n_sites
    return p


@pytest.fixture
def fig2_inputs(tmp_path):
    t_short = np.linspace(0.0, 30.0, 61)
    t_long = np.linspace(0.0, 200.0, 101)
    weak = reservoir_config(g=0.3)
    strong = reservoir_config(g=1.5)
    return [
        write_trajectory(tmp_path, "a", 5, t_short, damped_populations(t_short, 5), weak),
        write_trajectory(tmp_path, "b", 5, t_short, damped_populations(t_short, 5, 0.05), strong),
        write_trajectory(tmp_path, "c", 5, t_long, damped_populations(t_long, 5), weak),
        write_trajectory(tmp_path, "d", 5, t_long, damped_populations(t_long, 5, 0.05), strong),
    ]


@pytest.fixture
def fig5_inputs(tmp_path):
    t = np.linspace(0.0, 40.0, 81)
    trajectories = [
        write_trajectory(tmp_path, f"traj_g{i}", 10, t,
                         damped_populations(t, 10, 0.01 * (i + 1)),
                         reservoir_config(g=0.1 * i))
        for i in range(3)
    ]
    n_values = np.array([4.0, 8.0, 12.0])
    summaries = [
        write_sweep_summary(tmp_path, f"sweep_g{i}", n_values,
                            0.95 - 0.05 * n_values / 4 - 0.02 * i,
                            0.5 + 0.01 * n_values, g=0.1 * i)
        for i in range(3)
    ]
    return trajectories + summaries
