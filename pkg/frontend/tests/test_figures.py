"""Figure regeneration from real artifacts produced by the core CLI."""

import hashlib
import json
import math
import os
import subprocess
import sys

import numpy as np
import pytest

from sgfluxon_figures import plots
from sgfluxon_figures.cli import main as figures_main


@pytest.fixture(scope="module")
def artifacts(tmp_path_factory):
    """Small condensate/defect/pi-field artifacts via the primary CLI."""
    out = tmp_path_factory.mktemp("artifacts")
    env = dict(os.environ)

    def run(*args):
        r = subprocess.run(
            [sys.executable, "-m", "sgfluxon.cli", "--out", str(out), *args],
            capture_output=True, text=True, env=env,
        )
        assert r.returncode == 0, r.stderr
        return r

    run("condensate", "--profile", "sech", "--N", "2", "--x=-2:2:24", "--t", "0:1.5:20")
    run("defect", "--m", "0.416708", "--omega", "0", "--X=-8:8:24", "--T=-8:8:24")
    run("defect", "--m", "0.416708", "--omega", str(math.pi), "--X=-8:8:24", "--T=-8:8:24")
    # rename the second defect output before it is overwritten
    return out


@pytest.fixture(scope="module")
def h_artifacts(tmp_path_factory):
    out = tmp_path_factory.mktemp("hfield")
    r = subprocess.run(
        [sys.executable, "-m", "sgfluxon.cli", "--out", str(out), "pi-field",
         "--radius", "4.5", "--h-grid=-3:5:33,-3:3:25"],
        capture_output=True, text=True,
    )
    assert r.returncode == 0, r.stderr
    return out


def _sha(path):
    return hashlib.sha256(open(path, "rb").read()).hexdigest()


class TestDensity:
    def test_condensate_panel_and_rerun_identical(self, artifacts, tmp_path):
        csv = artifacts / "condensate_N2.csv"
        meta = artifacts / "condensate_N2.json"
        out1 = tmp_path / "panel1.png"
        out2 = tmp_path / "panel2.png"
        plots.render_density(str(csv), str(meta), str(out1))
        plots.render_density(str(csv), str(meta), str(out2))
        assert out1.exists() and out1.stat().st_size > 1000
        assert _sha(out1) == _sha(out2)

    def test_defect_panel(self, artifacts, tmp_path):
        out = tmp_path / "defect.png"
        plots.render_density(
            str(artifacts / "defect.csv"), str(artifacts / "defect.json"), str(out)
        )
        assert out.exists()

    def test_schema_mismatch_refused(self, artifacts, tmp_path):
        bad = tmp_path / "bad.json"
        meta = json.loads((artifacts / "condensate_N2.json").read_text())
        meta["nx"] = meta["nx"] + 3
        bad.write_text(json.dumps(meta))
        with pytest.raises(plots.SchemaError):
            plots.render_density(
                str(artifacts / "condensate_N2.csv"), str(bad), str(tmp_path / "x.png")
            )

    def test_pole_overlay_via_linear_map(self, artifacts, h_artifacts, tmp_path):
        cat = {"a": -0.4686, "b": 0.1848, "t_gc": 1.6091, "epsilon": 1 / 8}
        out = tmp_path / "overlay.png"
        plots.render_density(
            str(artifacts / "condensate_N2.csv"),
            str(artifacts / "condensate_N2.json"),
            str(out),
            poles_csv=str(h_artifacts / "pi_poles.csv"),
            pole_map=cat,
        )
        assert out.exists()


class TestHField:
    def test_h_panel_with_zero_curve_and_poles(self, h_artifacts, tmp_path):
        out1 = tmp_path / "h1.png"
        out2 = tmp_path / "h2.png"
        plots.render_h_field(
            str(h_artifacts / "pi_hgrid.csv"), str(out1),
            poles_csv=str(h_artifacts / "pi_poles.csv"),
        )
        plots.render_h_field(
            str(h_artifacts / "pi_hgrid.csv"), str(out2),
            poles_csv=str(h_artifacts / "pi_poles.csv"),
        )
        assert _sha(out1) == _sha(out2)


class TestCatalog:
    def test_sheet_and_mirror_property(self, tmp_path):
        # generate four small tiles directly through the core library
        from sgfluxon.defect import DefectParams, defect_grid

        tiles = []
        omegas = [0.0, math.pi / 3, 2 * math.pi / 3, math.pi]
        m = math.sin(math.pi / 24) ** 2
        for j, om in enumerate(omegas):
            g = defect_grid(DefectParams(m, om), (-20, 20), (-20, 20), 24, 24)
            csv = tmp_path / f"tile{j}.csv"
            sc = tmp_path / f"tile{j}.json"
            g.write_csv(str(csv), str(sc))
            tiles.append((str(csv), str(sc)))
        out = tmp_path / "sheet.png"
        plots.render_catalog(tiles, str(out))
        assert out.exists() and out.stat().st_size > 5000

        # sin-row mirror property between Omega and Omega + pi
        c0, _ = plots.load_field_csv(*tiles[0])
        c3, _ = plots.load_field_csv(*tiles[3])
        sin0 = 2 * c0["sin_half"] * c0["cos_half"]
        # Omega + pi shifts the background by a half period: sin u negates at
        # matching (X, T), cos u is unchanged
        par0 = DefectParams(m, 0.0)
        par3 = DefectParams(m, math.pi)
        from sgfluxon.defect import cos_sin_U

        for X, T in ((0.4, 1.2), (-2.0, 3.3)):
            a = cos_sin_U(X, T, par0)
            b = cos_sin_U(X, T, par3)
            assert abs((2 * a.sin_half * a.cos_half) + (2 * b.sin_half * b.cos_half)) < 1e-12

    def test_missing_tile_placeholder_warns(self, tmp_path):
        out = tmp_path / "partial.png"
        with pytest.warns(UserWarning):
            plots.render_catalog([None, None], str(out))
        assert out.exists()


class TestCli:
    def test_render_density_command(self, artifacts, tmp_path):
        out = tmp_path / "cli.png"
        rc = figures_main([
            "render-density",
            str(artifacts / "condensate_N2.csv"),
            str(artifacts / "condensate_N2.json"),
            str(out),
        ])
        assert rc == 0 and out.exists()


class TestSecondaryAcceptance:
    def test_criterion_summary(self, artifacts, h_artifacts, tmp_path):
        """Panels for the condensate field, the Re h field, a defect, and a
        catalog sheet, regenerated from CSVs alone, with byte-identical reruns."""
        import math

        from sgfluxon.defect import DefectParams, defect_grid

        made = {}
        p1_ = tmp_path / "fig2_style.png"
        plots.render_density(
            str(artifacts / "condensate_N2.csv"), str(artifacts / "condensate_N2.json"), str(p1_)
        )
        made["fig2-style"] = p1_
        p2_ = tmp_path / "fig1_style.png"
        plots.render_h_field(
            str(h_artifacts / "pi_hgrid.csv"), str(p2_), poles_csv=str(h_artifacts / "pi_poles.csv")
        )
        made["fig1-style"] = p2_
        p3_ = tmp_path / "fig12_style.png"
        plots.render_density(str(artifacts / "defect.csv"), str(artifacts / "defect.json"), str(p3_))
        made["fig12-style"] = p3_
        tiles = []
        for j, om in enumerate((0.0, math.pi / 3, 2 * math.pi / 3, math.pi)):
            g = defect_grid(DefectParams(math.sin(math.pi / 24) ** 2, om), (-20, 20), (-20, 20), 20, 20)
            csv, sc = tmp_path / f"c{j}.csv", tmp_path / f"c{j}.json"
            g.write_csv(str(csv), str(sc))
            tiles.append((str(csv), str(sc)))
        p4_ = tmp_path / "appendix_sheet.png"
        plots.render_catalog(tiles, str(p4_))
        made["appendix-sheet"] = p4_

        rerun = tmp_path / "rerun.png"
        plots.render_density(
            str(artifacts / "condensate_N2.csv"), str(artifacts / "condensate_N2.json"), str(rerun)
        )
        identical = _sha(p1_) == _sha(rerun)
        ok = identical and all(p.exists() and p.stat().st_size > 1000 for p in made.values())
        print(f"\nACCEPTANCE figures-secondary: {'PASS' if ok else 'FAIL'} "
              f"(panels={list(made)}, rerun byte-identical={identical})")
        assert ok
