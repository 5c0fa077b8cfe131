"""Loaders for the simulation CLI's file artifacts.

Two kinds of CSV exist: trajectory tables (header starting with ``t,``,
one row per time point, per-site amplitudes and derived observables) and
sweep summaries (header starting with ``value,status``).  Every artifact
carries a ``<stem>.meta.json`` sidecar with the fully resolved run
configuration; loading fails if the sidecar is missing, so a figure can
never silently mix artifacts from unknown provenance.  Plain two-column
density tables (the simulator's tabulated-reservoir input format) are also
readable for spectral-density panels.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = ["MissingInput", "MetadataMismatch", "TrajectoryTable", "SweepSummary",
           "load_trajectory", "load_sweep_summary", "load_density_table", "classify"]


class MissingInput(FileNotFoundError):
    """A referenced input file does not exist."""


class MetadataMismatch(ValueError):
    """Sidecar absent, unreadable, or inconsistent with the recipe."""


def _read_rows(path: Path) -> tuple[list[str], list[list[str]]]:
    if not path.exists():
        raise MissingInput(str(path))
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        return header, [row for row in reader if row]


def _sidecar(path: Path) -> dict:
    meta_path = path.with_suffix("")
    meta_path = meta_path.with_name(meta_path.name + ".meta.json")
    if not meta_path.exists():
        raise MetadataMismatch(f"{path}: missing sidecar {meta_path.name}")
    try:
        return json.loads(meta_path.read_text())
    except json.JSONDecodeError as exc:
        raise MetadataMismatch(f"{meta_path}: invalid JSON ({exc})") from exc


@dataclass(frozen=True)
class TrajectoryTable:
    """One run's time series plus its resolved configuration."""

    path: Path
    t: np.ndarray
    columns: dict[str, np.ndarray]
    meta: dict

    @property
    def n_sites(self) -> int:
        return int(self.meta["config"]["chain"]["n_sites"])

    def population(self, site: int) -> np.ndarray:
        return self.columns[f"p_{site}"]

    @property
    def channel(self) -> np.ndarray:
        return self.columns["p_channel"]

    @property
    def total(self) -> np.ndarray:
        return self.columns["p_total"]

    @property
    def fidelity(self) -> np.ndarray:
        return self.columns["fidelity"]

    def config_value(self, dotted: str):
        node = self.meta["config"]
        for key in dotted.split("."):
            node = node[key]
        return node


@dataclass(frozen=True)
class SweepSummary:
    """A sweep's per-value reductions plus its resolved configuration."""

    path: Path
    values: np.ndarray
    max_fidelity: np.ndarray
    p_total_at_t_max: np.ndarray
    meta: dict

    @property
    def axis(self) -> str:
        return self.meta["sweep"]["axis"]


def load_trajectory(path) -> TrajectoryTable:
    path = Path(path)
    header, rows = _read_rows(path)
    if not header or header[0] != "t":
        raise MetadataMismatch(f"{path}: not a trajectory table (header starts {header[:1]})")
    data = np.array([[float(v) for v in row] for row in rows])
    columns = {name: data[:, i] for i, name in enumerate(header)}
    meta = _sidecar(path)
    table = TrajectoryTable(path=path, t=columns["t"], columns=columns, meta=meta)
    n = table.n_sites
    if f"p_{n}" not in columns or f"p_{n + 1}" in columns:
        raise MetadataMismatch(f"{path}: table has a different site count than its sidecar (N={n})")
    return table


def load_sweep_summary(path) -> SweepSummary:
    path = Path(path)
    header, rows = _read_rows(path)
    if header[:2] != ["value", "status"]:
        raise MetadataMismatch(f"{path}: not a sweep summary (header starts {header[:2]})")
    ok_rows = [row for row in rows if row[1] == "ok"]
    idx = {name: header.index(name) for name in
           ("value", "p_total_at_t_max", "max_fidelity")}
    return SweepSummary(
        path=path,
        values=np.array([float(r[idx["value"]]) for r in ok_rows]),
        max_fidelity=np.array([float(r[idx["max_fidelity"]]) for r in ok_rows]),
        p_total_at_t_max=np.array([float(r[idx["p_total_at_t_max"]]) for r in ok_rows]),
        meta=_sidecar(path))


def load_density_table(path) -> tuple[np.ndarray, np.ndarray]:
    """Two-column (omega, J) text with '#' comments: the simulator's
    tabulated-density input format, reused for spectral-density panels."""
    path = Path(path)
    if not path.exists():
        raise MissingInput(str(path))
    data = np.loadtxt(path, comments="#", dtype=float)
    if data.ndim != 2 or data.shape[1] != 2:
        raise MetadataMismatch(f"{path}: expected two columns (omega, J)")
    return data[:, 0], data[:, 1]


def classify(path) -> str:
    """'trajectory' | 'summary' | 'density' by header inspection."""
    path = Path(path)
    if not path.exists():
        raise MissingInput(str(path))
    if path.suffix != ".csv":
        return "density"
    with open(path) as fh:
        first = fh.readline()
    if first.startswith("t,"):
        return "trajectory"
    if first.startswith("value,status"):
        return "summary"
    return "density"
