"""CLI: config parsing, subcommand pipelines, output formats, exit codes."""

import json
import math
import os
from pathlib import Path

import numpy as np
import pytest

from cslrot.cli import (EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE, RunConfig,
                        parse_config, run)
from cslrot.serialize import read_csv_columns


@pytest.fixture
def outdir(tmp_path):
    d = tmp_path / "out"
    d.mkdir()
    return d


GOOD_CONFIG = """
[geometry]
preset = lee2020

[csl]
rc_min = 1e-5
rc_max = 1e-4
points_per_decade = 3
lambda_ref = 1e-8

[noise]
temperature = 300
gamma = 1e-3
inertia = 3.83e-7
omega0 = 0.113
s_th_override = 1e-30

[run]
output_dir = .
tolerance = 1e-6
plot = false
seed = 3
"""


class TestParseConfig:
    def test_minimal_preset(self, tmp_path):
        p = tmp_path / "c.ini"
        p.write_text("[geometry]\npreset = lee2020\n")
        cfg = parse_config(p)
        assert cfg.geometry_preset == "lee2020"
        assert cfg.tolerance == 1e-6          # defaults filled
        assert cfg.build_model() is not None

    def test_full_roundtrip(self, tmp_path):
        p = tmp_path / "c.ini"
        p.write_text(GOOD_CONFIG)
        cfg = parse_config(p)
        q = tmp_path / "again.ini"
        q.write_text(cfg.to_ini())
        cfg2 = parse_config(q)
        assert cfg2 == cfg

    def test_inline_roundtrip(self, tmp_path):
        p = tmp_path / "c.ini"
        p.write_text("""
[geometry]
kind = periodic_annulus
rho = 1.2e3
delta_rho = 1.93e4
r_inner = 1e-2
r_outer = 2e-2
n_sectors = 10
alpha = 0.1
height = 1e-3
""")
        cfg = parse_config(p)
        model = cfg.build_model()
        assert model.n_sectors == 10
        q = tmp_path / "rt.ini"
        q.write_text(cfg.to_ini())
        assert parse_config(q).build_model() == model

    def test_duplicate_key_rejected(self, tmp_path):
        p = tmp_path / "c.ini"
        p.write_text("[geometry]\npreset = lee2020\npreset = lee2020\n")
        with pytest.raises(Exception) as err:
            parse_config(p)
        assert "preset" in str(err.value)

    def test_unknown_key_rejected(self, tmp_path):
        p = tmp_path / "c.ini"
        p.write_text("[geometry]\npreset = lee2020\n\n[csl]\nbogus = 1\n")
        with pytest.raises(ValueError) as err:
            parse_config(p)
        assert "bogus" in str(err.value)

    def test_unit_suffix_rejected(self, tmp_path):
        p = tmp_path / "c.ini"
        p.write_text("[csl]\nrc_min = 1e-5 m\n")
        with pytest.raises(ValueError) as err:
            parse_config(p)
        assert "rc_min" in str(err.value)

    def test_geometry_invariant_surfaces(self, tmp_path):
        p = tmp_path / "c.ini"
        p.write_text("""
[geometry]
kind = periodic_annulus
rho = 1.2e3
delta_rho = 1.93e4
r_inner = 3e-2
r_outer = 2e-2
n_sectors = 10
alpha = 0.1
height = 1e-3
""")
        cfg = parse_config(p)
        with pytest.raises(Exception) as err:
            cfg.build_model()
        assert "r_inner" in str(err.value) or "r_outer" in str(err.value)

    def test_both_sources_rejected(self):
        cfg = RunConfig(geometry_preset="lee2020",
                        geometry_inline={"kind": "homogeneous_disk"})
        with pytest.raises(ValueError):
            cfg.build_model()


class TestSubcommands:
    def test_presets_lists_all(self, capsys):
        assert run(["presets"]) == EXIT_OK
        out = capsys.readouterr().out
        for name in ("table1_rc1e-4", "table1_rc1e-7", "lee2020",
                     "discussion_optimized"):
            assert name in out

    def test_dns_outputs(self, outdir, capsys):
        rc = run(["dns", "--preset", "table1_rc1e-4", "--rc", "1e-4",
                  "--rc", "3e-4", "--lambda", "1e-8", "--out", str(outdir),
                  "--no-plot"])
        assert rc == EXIT_OK
        meta, header, cols = read_csv_columns(outdir / "dns.csv")
        assert header[0] == "rc_m"
        assert meta["tool"] == "cslrot"
        assert len(cols[0]) == 2
        doc = json.loads((outdir / "dns.json").read_text())
        assert doc["metadata"]["lambda_ref"] == 1e-08

    def test_scan_alpha_endpoint_zero(self, outdir, capsys):
        rc = run(["scan-alpha", "--n", "100", "--rc", "1e-4", "--inertia",
                  "9e-6", "--epsilon", "2", "--h", "1e-4", "--grid", "12",
                  "--out", str(outdir), "--no-plot"])
        assert rc == EXIT_OK
        _, _, cols = read_csv_columns(outdir / "scan_alpha.csv")
        axis = np.array([float(v) for v in cols[0]])
        obj = np.array([float(v) for v in cols[1]])
        assert axis[-1] == pytest.approx(2 * math.pi / 100, rel=1e-12)
        assert obj[-1] == pytest.approx(0.0, abs=1e-30)

    def test_bound_with_figure_and_overlay(self, outdir, tmp_path):
        ov = tmp_path / "ov.csv"
        ov.write_text("label,rc_m,lambda_s^-1\next,1e-5,1e-8\next,1e-4,2e-9\n")
        rc = run(["bound", "--preset", "lee2020", "--rc-decades", "1e-4:1e-3",
                  "--points-per-decade", "3", "--overlay", str(ov),
                  "--out", str(outdir)])
        assert rc == EXIT_OK
        assert (outdir / "bound.csv").exists()
        assert (outdir / "bound.svg").exists()   # report renders a figure
        meta, header, cols = read_csv_columns(outdir / "bound.csv")
        assert header == ["rc_m", "lambda_max_s^-1", "p_factor", "y_factor",
                          "flags"]
        lam = [float(v) for v in cols[1]]
        assert all(v > 0 for v in lam)

    def test_bound_workers_match_serial(self, outdir, tmp_path):
        a = outdir / "a"
        b = outdir / "b"
        for out, workers in ((a, "1"), (b, "3")):
            out.mkdir()
            assert run(["bound", "--preset", "table1_rc1e-4",
                        "--s-th", "1e-30",
                        "--rc-decades", "1e-4:1e-3", "--points-per-decade",
                        "3", "--workers", workers, "--out", str(out),
                        "--no-plot"]) == EXIT_OK
        _, _, ca = read_csv_columns(a / "bound.csv")
        _, _, cb = read_csv_columns(b / "bound.csv")
        assert ca == cb

    def test_simulate_validate_exit_codes(self, outdir):
        args = ["simulate", "--temperature", "300", "--gamma", "0.3",
                "--inertia", "1e-12", "--omega0", "1.2566",
                "--s-th", "1e-33", "--dt", "0.025", "--duration", "1640",
                "--burn-in", "40", "--trajectories", "24", "--seed", "2",
                "--segment-length", "4096", "--validate", "--band",
                "0.05:1.2", "--out", str(outdir), "--no-plot"]
        assert run(args) == EXIT_OK
        doc = json.loads((outdir / "psd_validation.json").read_text())
        assert doc["passed"] is True

    def test_overlay_merge(self, outdir, tmp_path):
        f1 = tmp_path / "a.csv"
        f1.write_text("label,rc_m,lambda_s^-1\nx,1e-5,1e-9\n")
        f2 = tmp_path / "b.csv"
        f2.write_text("label,rc_m,lambda_s^-1\ny,2e-5,4e-9\n")
        assert run(["overlay-merge", str(f1), str(f2),
                    "--out", str(outdir)]) == EXIT_OK
        _, _, cols = read_csv_columns(outdir / "overlay_merged.csv")
        assert list(cols[0]) == ["x", "y"]

    def test_overlay_merge_bad_file(self, outdir, tmp_path):
        f1 = tmp_path / "bad.csv"
        f1.write_text("label,rc_m,lambda_s^-1\nx,1e-5,-1e-9\n")
        assert run(["overlay-merge", str(f1),
                    "--out", str(outdir)]) == EXIT_USAGE

    def test_usage_errors_exit_one(self, outdir):
        assert run(["dns", "--rc", "1e-4"]) == EXIT_USAGE      # no geometry
        assert run(["bound", "--preset", "table1_rc1e-4",
                    "--out", str(outdir), "--no-plot"]) == EXIT_USAGE  # no floor
        assert run(["nonsense"]) == EXIT_USAGE

    def test_unknown_preset_exit_one(self, outdir):
        assert run(["dns", "--preset", "nope", "--rc", "1e-4",
                    "--out", str(outdir)]) == EXIT_USAGE

    def test_config_driven_bound(self, outdir, tmp_path):
        cfgfile = tmp_path / "c.ini"
        cfgfile.write_text(GOOD_CONFIG)
        assert run(["bound", "--config", str(cfgfile), "--s-th", "1e-30",
                    "--out", str(outdir), "--no-plot"]) == EXIT_OK
        meta, _, cols = read_csv_columns(outdir / "bound.csv")
        assert len(cols[0]) == 4          # 3/decade over one decade

    def test_out_dir_env(self, tmp_path, monkeypatch):
        target = tmp_path / "envout"
        monkeypatch.setenv("CSLROT_OUT", str(target))
        assert run(["dns", "--preset", "table1_rc1e-4", "--rc", "1e-4",
                    "--no-plot"]) == EXIT_OK
        assert (target / "dns.csv").exists()


def test_float_roundtrip_17_digits(tmp_path):
    from cslrot.serialize import write_csv
    vals = [math.pi * 1e-7, 1.0 / 3.0, 2.0 ** -52]
    path = write_csv(tmp_path / "x.csv", ["v"], [[v] for v in vals])
    _, _, cols = read_csv_columns(path)
    assert [float(s) for s in cols[0]] == vals
