import json

import numpy as np
import pytest

from spinchain_figs.artifacts import MetadataMismatch, MissingInput
from spinchain_figs.cli import main
from spinchain_figs.recipes import RecipeError, build_recipe
from spinchain_figs.render import render

from conftest import damped_populations, reservoir_config, write_trajectory


class TestRecipes:
    def test_fig2_recipe(self, fig2_inputs):
        recipe = build_recipe("fig2", fig2_inputs)
        assert recipe.layout == (2, 2)
        kinds = [p.kind for p in recipe.panels]
        assert kinds == ["populations", "populations", "total", "total"]

    def test_fig2_wrong_arity(self, fig2_inputs):
        with pytest.raises(RecipeError):
            build_recipe("fig2", fig2_inputs[:3])

    def test_fig2_mismatched_pairing(self, tmp_path, fig2_inputs):
        # panel (c) must share its coupling with panel (a)
        t = np.linspace(0.0, 5.0, 11)
        odd = write_trajectory(tmp_path / "other", "c_bad", 5, t,
                               damped_populations(t, 5), reservoir_config(g=0.9))
        with pytest.raises(MetadataMismatch):
            build_recipe("fig2", [fig2_inputs[0], fig2_inputs[1], odd, fig2_inputs[3]])

    def test_fig2_mixed_sizes_rejected(self, tmp_path, fig2_inputs):
        t = np.linspace(0.0, 5.0, 11)
        small = write_trajectory(tmp_path / "other", "a_small", 3, t,
                                 damped_populations(t, 3))
        with pytest.raises(MetadataMismatch):
            build_recipe("fig2", [small, *fig2_inputs[1:]])

    def test_missing_input(self, tmp_path, fig2_inputs):
        with pytest.raises(MissingInput):
            build_recipe("fig2", [*fig2_inputs[:3], tmp_path / "ghost.csv"])

    def test_unknown_figure(self, fig2_inputs):
        with pytest.raises(RecipeError):
            build_recipe("fig9", fig2_inputs)

    def test_fig5_recipe(self, fig5_inputs):
        recipe = build_recipe("fig5", fig5_inputs)
        assert [p.kind for p in recipe.panels] == ["fidelity", "max-fidelity"]

    def test_fig5_needs_both_kinds(self, fig5_inputs):
        with pytest.raises(RecipeError):
            build_recipe("fig5", fig5_inputs[:3])


class TestRendering:
    def test_fig2_outputs_and_byte_stability(self, fig2_inputs, tmp_path):
        recipe = build_recipe("fig2", fig2_inputs)
        first = render(recipe, tmp_path / "out")
        assert {p.suffix for p in first} == {".png", ".svg"}
        blobs = {p.suffix: p.read_bytes() for p in first}
        again = render(build_recipe("fig2", fig2_inputs), tmp_path / "out")
        for p in again:
            assert p.read_bytes() == blobs[p.suffix], f"{p.suffix} not byte-stable"

    def test_render_is_read_only(self, fig2_inputs, tmp_path):
        before = {p: p.read_bytes() for p in fig2_inputs}
        render(build_recipe("fig2", fig2_inputs), tmp_path / "out")
        assert all(p.read_bytes() == blob for p, blob in before.items())

    def test_fig5_renders(self, fig5_inputs, tmp_path):
        files = render(build_recipe("fig5", fig5_inputs), tmp_path / "out")
        assert all(p.exists() and p.stat().st_size > 0 for p in files)

    @pytest.mark.parametrize("figure_id,n_panels", [("fig3", 6), ("fig4", 2),
                                                    ("fig6", 2), ("fig7", 4)])
    def test_other_layouts_render(self, figure_id, n_panels, tmp_path):
        t = np.linspace(0.0, 20.0, 41)
        inputs = []
        if figure_id == "fig3":
            inputs = [write_trajectory(tmp_path, f"n{n}", n, t, damped_populations(t, n))
                      for n in (3, 4, 5)]
        elif figure_id == "fig4":
            for panel, n in enumerate((5, 11)):
                for g in (1.0, 2.0, 3.0):
                    inputs.append(write_trajectory(
                        tmp_path, f"p{panel}g{g}", n, t, damped_populations(t, n),
                        reservoir_config(g=g)))
        elif figure_id == "fig6":
            for s in (1.0, 2.0, 3.0):
                inputs.append(write_trajectory(
                    tmp_path, f"s{s}", 6, t, damped_populations(t, 6),
                    reservoir_config(kind="ohmic", s_param=s)))
            for wc in (0.5, 1.0, 1.5):
                inputs.append(write_trajectory(
                    tmp_path, f"wc{wc}", 6, t, damped_populations(t, 6),
                    reservoir_config(kind="ohmic", omega_c=wc)))
        elif figure_id == "fig7":
            inputs = [
                write_trajectory(tmp_path, "w", 6, t, damped_populations(t, 6),
                                 reservoir_config(kind="ohmic", g=0.3)),
                write_trajectory(tmp_path, "s", 6, t, damped_populations(t, 6),
                                 reservoir_config(kind="ohmic", g=1.4)),
            ]
            for s in (0.5, 1.5, 3.0):
                inputs.append(write_trajectory(
                    tmp_path, f"cs{s}", 6, t, damped_populations(t, 6),
                    reservoir_config(kind="ohmic", s_param=s)))
            for n in (4, 8, 12):
                inputs.append(write_trajectory(
                    tmp_path, f"dn{n}", n, t, damped_populations(t, n),
                    reservoir_config(kind="ohmic", s_param=2.0)))
        recipe = build_recipe(figure_id, inputs)
        assert len(recipe.panels) == n_panels
        files = render(recipe, tmp_path / "out")
        assert all(p.exists() for p in files)

    def test_fig8_renders(self, tmp_path):
        t = np.linspace(0.0, 30.0, 61)
        omega = np.linspace(0.0, 8.0, 100)
        lorentz = tmp_path / "lorentz.txt"
        lorentz.write_text("\n".join(f"{w} {0.65 / 2 / np.pi / ((w - 3) ** 2 + 0.105625)}"
                                     for w in omega))
        ohmic = tmp_path / "ohmic.txt"
        ohmic.write_text("\n".join(f"{w} {w ** 3 * np.exp(-w) / 6}" for w in omega))
        inputs = [lorentz, ohmic]
        for fam, kind in (("L", "lorentzian"), ("O", "ohmic")):
            for g in (1.0, 2.0, 3.0):
                inputs.append(write_trajectory(
                    tmp_path, f"{fam}{g}", 7, t, damped_populations(t, 7),
                    reservoir_config(kind=kind, g=g)))
        files = render(build_recipe("fig8", inputs), tmp_path / "out")
        assert all(p.exists() for p in files)


class TestCli:
    def test_render_verb(self, fig2_inputs, tmp_path, capsys):
        code = main(["render", "--figure", "fig2",
                     "--inputs", *[str(p) for p in fig2_inputs],
                     "--out", str(tmp_path / "cli_out")])
        assert code == 0
        out = json.loads(capsys.readouterr().out)
        assert len(out["files"]) == 2

    def test_missing_input_exit_code(self, fig2_inputs, tmp_path, capsys):
        code = main(["render", "--figure", "fig2",
                     "--inputs", *[str(p) for p in fig2_inputs[:3]],
                     str(tmp_path / "ghost.csv"),
                     "--out", str(tmp_path)])
        assert code == 2
        diag = json.loads(capsys.readouterr().err)
        assert diag["error"] == "MissingInput"

    def test_single_format(self, fig2_inputs, tmp_path, capsys):
        code = main(["render", "--figure", "fig2",
                     "--inputs", *[str(p) for p in fig2_inputs],
                     "--out", str(tmp_path / "png_only"), "--formats", "png"])
        assert code == 0
        assert len(json.loads(capsys.readouterr().out)["files"]) == 1
