"""Deterministic matplotlib rendering of figure recipes.

Output must be byte-stable across runs: the SVG id-hash salt is pinned,
date metadata is stripped, and figure geometry is fixed per layout.
Rendering is read-only over its inputs.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .recipes import FigureRecipe, PanelSpec  # noqa: E402

__all__ = ["render"]

# black / teal / orange, as in the source plots
COLORS = ("#000000", "#177e89", "#e8871e")

matplotlib.rcParams["svg.hashsalt"] = "spinchain-figs"


def _style(i: int, panel: PanelSpec) -> dict:
    dashed = bool(panel.dashed[i]) if i < len(panel.dashed) else False
    return {"color": COLORS[i % len(COLORS)], "linestyle": "--" if dashed else "-",
            "linewidth": 1.2}


def _draw_populations(ax, panel: PanelSpec):
    table = panel.tables[0]
    n = table.n_sites
    ax.plot(table.t, table.population(1), color=COLORS[0], linewidth=1.2, label="$P_1$")
    ax.plot(table.t, table.population(n), color=COLORS[1], linewidth=1.2, label=f"$P_{{{n}}}$")
    if not panel.channel_inset:
        ax.plot(table.t, table.channel, color=COLORS[2], linewidth=1.2, label="$P_{ch}$")
    else:
        inset = ax.inset_axes([0.55, 0.55, 0.4, 0.35])
        inset.plot(table.t, table.channel, color=COLORS[2], linewidth=0.9)
        inset.set_title("$P_{ch}$", fontsize=7)
        inset.tick_params(labelsize=6)
    ax.set_ylabel("population")
    ax.legend(fontsize=7, loc="upper right")


def _draw_series(ax, panel: PanelSpec, pick, ylabel: str):
    for i, table in enumerate(panel.tables):
        label = panel.labels[i] if i < len(panel.labels) else ""
        ax.plot(table.t, pick(table), label=label or None, **_style(i, panel))
    ax.set_ylabel(ylabel)
    if any(panel.labels):
        ax.legend(fontsize=7)


def _draw_max_fidelity(ax, panel: PanelSpec):
    for i, summary in enumerate(panel.tables):
        label = panel.labels[i] if i < len(panel.labels) else ""
        ax.plot(summary.values, summary.max_fidelity, marker="o", markersize=3.5,
                label=label or None, **_style(i, panel))
    ax.set_xlabel("number of sites $N$")
    ax.set_ylabel("max fidelity")
    if any(panel.labels):
        ax.legend(fontsize=7)


def _draw_density(ax, panel: PanelSpec):
    for i, (omega, dens) in enumerate(panel.tables):
        label = panel.labels[i] if i < len(panel.labels) else ""
        ax.plot(omega, dens, label=label or None, **_style(i, panel))
    ax.set_xlabel(r"$\omega$")
    ax.set_ylabel(r"$J(\omega)$")
    if any(panel.labels):
        ax.legend(fontsize=7)


def _draw_panel(ax, panel: PanelSpec):
    if panel.kind == "populations":
        _draw_populations(ax, panel)
    elif panel.kind == "total":
        _draw_series(ax, panel, lambda t: t.total, "total population")
    elif panel.kind == "p1":
        _draw_series(ax, panel, lambda t: t.population(1), "$P_1$")
    elif panel.kind == "fidelity":
        _draw_series(ax, panel, lambda t: t.fidelity, "fidelity")
    elif panel.kind == "max-fidelity":
        _draw_max_fidelity(ax, panel)
    elif panel.kind == "density":
        _draw_density(ax, panel)
    else:
        raise ValueError(f"unknown panel kind {panel.kind!r}")
    if panel.kind not in ("max-fidelity", "density"):
        ax.set_xlabel("t")
    ax.set_title(panel.title, fontsize=9, loc="left")
    ax.grid(True, alpha=0.3)


def render(recipe: FigureRecipe, out_dir, stem: str | None = None,
           formats: tuple[str, ...] = ("png", "svg")) -> list[Path]:
    """Draw one figure and write it in each requested format.

    Returns the written paths.  Two renders of the same recipe produce
    byte-identical files.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = stem or recipe.figure_id
    rows, cols = recipe.layout
    fig, axes = plt.subplots(rows, cols, figsize=(3.6 * cols, 2.9 * rows), squeeze=False)
    try:
        flat = axes.ravel()
        for panel, ax in zip(recipe.panels, flat):
            _draw_panel(ax, panel)
        for ax in flat[len(recipe.panels):]:
            ax.set_axis_off()
        fig.tight_layout()
        written = []
        for fmt in formats:
            path = out_dir / f"{stem}.{fmt}"
            metadata = {"Date": None} if fmt == "svg" else {"Software": "spinchain-figs"}
            fig.savefig(path, format=fmt, dpi=150, metadata=metadata)
            written.append(path)
        return written
    finally:
        plt.close(fig)
