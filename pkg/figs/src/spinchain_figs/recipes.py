"""Figure recipes: which artifacts feed which panels, in caption order.

A recipe is a validated, fully-loaded description of one multi-panel
figure; building it checks input arity and the sidecar expectations
(matching chain sizes within a panel, paired couplings across panels, and
so on), so rendering itself cannot surprise.  Input files are passed as a
flat list in caption order; each builder documents the expected layout.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .artifacts import (MetadataMismatch, MissingInput, SweepSummary, TrajectoryTable,
                        classify, load_density_table, load_sweep_summary, load_trajectory)

__all__ = ["RecipeError", "PanelSpec", "FigureRecipe", "build_recipe", "FIGURE_IDS"]


class RecipeError(ValueError):
    """Wrong number or kind of inputs for the requested figure."""


@dataclass(frozen=True)
class PanelSpec:
    """One axes' worth of content.

    kind:
        populations    P_1 / P_N / P_channel of one trajectory
        total          P_total overlays
        p1             P_1 overlays
        fidelity       transfer-fidelity overlays
        max-fidelity   peak fidelity vs swept value (summaries)
        density        spectral-density overlays (two-column tables)
    """

    kind: str
    tables: tuple = ()
    labels: tuple[str, ...] = ()
    title: str = ""
    dashed: tuple[bool, ...] = ()
    channel_inset: bool = False


@dataclass(frozen=True)
class FigureRecipe:
    figure_id: str
    panels: tuple[PanelSpec, ...]
    layout: tuple[int, int]
    inputs: tuple[Path, ...] = field(default=(), compare=False)


def _trajectories(paths) -> list[TrajectoryTable]:
    return [load_trajectory(p) for p in paths]


def _same_sites(tables, what: str):
    sizes = {t.n_sites for t in tables}
    if len(sizes) > 1:
        raise MetadataMismatch(f"{what}: inputs mix chain sizes {sorted(sizes)}")


def _g_label(table: TrajectoryTable) -> str:
    return f"g = {table.config_value('reservoirs.left.g'):g}"


def _need(inputs, count, figure_id, hint):
    if len(inputs) != count:
        raise RecipeError(f"{figure_id} expects {count} inputs ({hint}); got {len(inputs)}")


def _build_fig2(inputs):
    """(a),(b): short-time populations; (c),(d): long-time totals.

    Inputs: 4 trajectory CSVs in caption order; (a,c) and (b,d) must pair
    up on the boundary coupling.
    """
    _need(inputs, 4, "fig2", "populations a, b; totals c, d")
    tables = _trajectories(inputs)
    _same_sites(tables, "fig2")
    for short, long_ in ((0, 2), (1, 3)):
        g_short = tables[short].config_value("reservoirs.left.g")
        g_long = tables[long_].config_value("reservoirs.left.g")
        if g_short != g_long:
            raise MetadataMismatch(
                f"fig2: panels {'ac' if short == 0 else 'bd'} disagree on g ({g_short} vs {g_long})")
    panels = [
        PanelSpec(kind="populations", tables=(tables[0],), title="(a) " + _g_label(tables[0])),
        PanelSpec(kind="populations", tables=(tables[1],), title="(b) " + _g_label(tables[1])),
        PanelSpec(kind="total", tables=(tables[2],), labels=("",), title="(c)"),
        PanelSpec(kind="total", tables=(tables[3],), labels=("",), title="(d)"),
    ]
    return tuple(panels), (2, 2)


def _build_fig3(inputs):
    """Top row: edge populations (channel inset); bottom row: totals.

    Inputs: 3 trajectory CSVs, one per chain length.
    """
    _need(inputs, 3, "fig3", "one long-horizon run per chain length")
    tables = _trajectories(inputs)
    top = [PanelSpec(kind="populations", tables=(t,), channel_inset=True,
                     title=f"({chr(97 + i)}) N = {t.n_sites}") for i, t in enumerate(tables)]
    bottom = [PanelSpec(kind="total", tables=(t,), labels=("",),
                        title=f"({chr(100 + i)})") for i, t in enumerate(tables)]
    return tuple(top + bottom), (2, 3)


def _grouped_totals(inputs, figure_id, label_key, label_fmt):
    if not inputs or len(inputs) % 3 != 0:
        raise RecipeError(f"{figure_id} expects one or two groups of 3 trajectory CSVs")
    tables = _trajectories(inputs)
    panels = []
    for start in range(0, len(tables), 3):
        group = tables[start:start + 3]
        _same_sites(group, figure_id)
        labels = tuple(label_fmt.format(t.config_value(label_key)) for t in group)
        panels.append(PanelSpec(kind="total", tables=tuple(group), labels=labels,
                                title=f"({chr(97 + start // 3)}) N = {group[0].n_sites}"))
    return tuple(panels), (1, len(panels))


def _build_fig4(inputs):
    """Totals under central excitation, one panel per chain length.

    Inputs: 3 or 6 trajectory CSVs (one group of three couplings per panel).
    """
    return _grouped_totals(inputs, "fig4", "reservoirs.left.g", "g = {:g}")


def _build_fig5(inputs):
    """(a): fidelity dynamics; (b): peak fidelity vs chain length.

    Inputs: trajectory CSVs (panel a) followed by sweep-summary CSVs
    (panel b), any split; kinds are detected from the files.
    """
    trajectories, summaries = [], []
    for path in inputs:
        kind = classify(path)
        if kind == "trajectory":
            trajectories.append(load_trajectory(path))
        elif kind == "summary":
            summaries.append(load_sweep_summary(path))
        else:
            raise RecipeError(f"fig5: {path} is neither a trajectory nor a sweep summary")
    if not trajectories or not summaries:
        raise RecipeError("fig5 expects at least one trajectory and one sweep summary")
    _same_sites(trajectories, "fig5(a)")
    for summary in summaries:
        if summary.axis != "chain.n_sites":
            raise MetadataMismatch(f"fig5: summary {summary.path} sweeps {summary.axis!r}, "
                                   "expected chain.n_sites")
    fid_labels = tuple(_g_label(t) for t in trajectories)
    sum_labels = tuple(f"g = {s.meta['config']['reservoirs']['left']['g']:g}" for s in summaries)
    return (
        PanelSpec(kind="fidelity", tables=tuple(trajectories), labels=fid_labels,
                  title=f"(a) N = {trajectories[0].n_sites}"),
        PanelSpec(kind="max-fidelity", tables=tuple(summaries), labels=sum_labels, title="(b)"),
    ), (1, 2)


def _build_fig6(inputs):
    """Totals for Ohmic reservoirs: exponent group, then cutoff group.

    Inputs: 3 or 6 trajectory CSVs.
    """
    if not inputs or len(inputs) % 3 != 0:
        raise RecipeError("fig6 expects one or two groups of 3 trajectory CSVs")
    tables = _trajectories(inputs)
    panels = []
    for start in range(0, len(tables), 3):
        group = tables[start:start + 3]
        _same_sites(group, "fig6")
        key = "s_param" if start == 0 else "omega_c"
        labels = tuple(f"{'S' if key == 's_param' else 'cutoff'} = "
                       f"{t.config_value('reservoirs.left.' + key):g}" for t in group)
        panels.append(PanelSpec(kind="total", tables=tuple(group), labels=labels,
                                title=f"({chr(97 + start // 3)})"))
    return tuple(panels), (1, len(panels))


def _build_fig7(inputs):
    """(a),(b): population triplets; (c),(d): first-site overlays.

    Inputs: 2 single trajectories, then two groups of 3.
    """
    _need(inputs, 8, "fig7", "2 population panels + 2 groups of 3 first-site overlays")
    tables = _trajectories(inputs)
    groups = (tables[2:5], tables[5:8])
    _same_sites(groups[0], "fig7(c)")  # panel (d) varies N by design
    panels = [
        PanelSpec(kind="populations", tables=(tables[0],), title="(a) " + _g_label(tables[0])),
        PanelSpec(kind="populations", tables=(tables[1],), title="(b) " + _g_label(tables[1])),
        PanelSpec(kind="p1", tables=tuple(groups[0]),
                  labels=tuple(f"S = {t.config_value('reservoirs.left.s_param'):g}"
                               for t in groups[0]), title="(c)"),
        PanelSpec(kind="p1", tables=tuple(groups[1]),
                  labels=tuple(f"N = {t.n_sites}" for t in groups[1]), title="(d)"),
    ]
    return tuple(panels), (2, 2)


def _build_fig8(inputs):
    """(a): two spectral densities; (b): totals, solid vs dashed families.

    Inputs: 2 density tables, then 3 + 3 trajectory CSVs (first family
    solid, second dashed).
    """
    _need(inputs, 8, "fig8", "2 density tables + 3+3 trajectory CSVs")
    densities = tuple(load_density_table(p) for p in inputs[:2])
    tables = _trajectories(inputs[2:])
    _same_sites(tables, "fig8")
    labels = tuple(f"g = {t.config_value('reservoirs.left.g'):g}" for t in tables)
    return (
        PanelSpec(kind="density", tables=densities, labels=("Lorentzian", "Ohmic"),
                  dashed=(False, True), title="(a)"),
        PanelSpec(kind="total", tables=tuple(tables), labels=labels,
                  dashed=(False,) * 3 + (True,) * 3, title=f"(b) N = {tables[0].n_sites}"),
    ), (1, 2)


_BUILDERS = {
    "fig2": _build_fig2,
    "fig3": _build_fig3,
    "fig4": _build_fig4,
    "fig5": _build_fig5,
    "fig6": _build_fig6,
    "fig7": _build_fig7,
    "fig8": _build_fig8,
}

FIGURE_IDS = tuple(sorted(_BUILDERS))


def build_recipe(figure_id: str, inputs) -> FigureRecipe:
    """Load and validate the inputs for one figure."""
    if figure_id not in _BUILDERS:
        raise RecipeError(f"unknown figure id {figure_id!r}; known: {', '.join(FIGURE_IDS)}")
    paths = tuple(Path(p) for p in inputs)
    for path in paths:
        if not path.exists():
            raise MissingInput(str(path))
    panels, layout = _BUILDERS[figure_id](paths)
    return FigureRecipe(figure_id=figure_id, panels=panels, layout=layout, inputs=paths)
