"""Experiment runner: config round-trip, CSV contracts, exit codes, outputs."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from catforge.cli import (
    CSV_SCHEMA,
    EXIT_CONFIG,
    EXIT_PRECONDITION,
    EXIT_TRUNCATION,
    ExperimentConfig,
    SweepSpec,
    emit_config,
    main,
    parse_config,
    run,
)


def read_rows(path):
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# schema=")
    cols = lines[1].split(",")
    return [dict(zip(cols, line.split(","))) for line in lines[2:]]


def test_config_roundtrip_basic():
    cfg = ExperimentConfig(scenario="wigner", g_mag=0.17, alpha_sq=50.0,
                           k=1, points=201, times=(0.0, 0.25))
    assert parse_config(emit_config(cfg)) == cfg


def test_config_roundtrip_with_sweep():
    cfg = ExperimentConfig(scenario="probability",
                           sweep=SweepSpec("g_mag", 0.0, 2.0, 11))
    assert parse_config(emit_config(cfg)) == cfg


@given(st.floats(min_value=0.0, max_value=3.0),
       st.floats(min_value=1.0, max_value=100.0),
       st.integers(min_value=-5, max_value=5))
@settings(max_examples=30, deadline=None)
def test_config_roundtrip_property(g, a2, k):
    cfg = ExperimentConfig(scenario="cat-fit", g_mag=g, alpha_sq=a2, k=k)
    assert parse_config(emit_config(cfg)) == cfg


def test_parse_rejects_unknown_key():
    with pytest.raises(Exception):
        parse_config("[wigner]\nbogus = 1\n")


def test_sweep_validation():
    with pytest.raises(Exception):
        SweepSpec("kappa", 0.0, 1.0, 5)
    with pytest.raises(Exception):
        SweepSpec("g_mag", 0.0, 1.0, 0)


def test_probability_zero_coupling_row(tmp_path):
    rc = main(["probability", "--set", "g_mag=0", "--set", "k=0",
               "--out", str(tmp_path)])
    assert rc == 0
    rows = read_rows(tmp_path / "results.csv")
    assert float(rows[0]["Pr"]) == 1.0


def test_results_rows_parse_losslessly(tmp_path):
    rc = main(["cat-fit", "--set", "g_mag=0.17", "--out", str(tmp_path)])
    assert rc == 0
    rows = read_rows(tmp_path / "results.csv")
    from catforge.cat import fit_cat
    from catforge.interaction import CouplingConfig, conditional_state_closed

    state, _ = conditional_state_closed(
        CouplingConfig(g=0.17, alpha=np.sqrt(50.0)), 0)
    fit = fit_cat(state)
    # shortest round-trip floats: parsing back recovers the exact double
    assert float(rows[0]["F"]) == fit.fidelity
    assert float(rows[0]["beta_mag"]) == fit.beta_mag
    assert rows[0]["Pr"] == ""


def test_sweep_produces_one_row_per_point(tmp_path):
    rc = main(["probability", "--set", "sweep_param=g_mag",
               "--set", "sweep_start=0.1", "--set", "sweep_stop=0.5",
               "--set", "sweep_steps=5", "--out", str(tmp_path),
               "--threads", "2"])
    assert rc == 0
    rows = read_rows(tmp_path / "results.csv")
    assert len(rows) == 5
    assert [float(r["g_mag"]) for r in rows] == pytest.approx(
        [0.1, 0.2, 0.3, 0.4, 0.5])


def test_wigner_outputs_grid_svg_manifest(tmp_path):
    rc = main(["wigner", "--set", "g_mag=0.17", "--set", "points=121",
               "--out", str(tmp_path)])
    assert rc == 0
    svg = (tmp_path / "wigner.svg").read_text()
    assert svg.startswith("<svg") and "rect" in svg
    manifest = (tmp_path / "manifest.txt").read_text()
    assert "wigner.csv" in manifest and "wigner.svg" in manifest
    grid_lines = (tmp_path / "wigner.csv").read_text().splitlines()
    assert grid_lines[0] == "# schema=catforge.wigner.v1"
    assert len(grid_lines) == 2 + 121 * 121
    # negative fringes are present in the interference region
    ws = [float(line.split(",")[2]) for line in grid_lines[2:]]
    assert min(ws) < -1e-3


def test_config_file_with_overrides(tmp_path):
    cfg_file = tmp_path / "run.ini"
    cfg_file.write_text("[probability]\ng_mag = 0.17\nk = 0\n")
    out = tmp_path / "out"
    rc = main(["probability", "--config", str(cfg_file),
               "--set", "k=1", "--out", str(out)])
    assert rc == 0
    rows = read_rows(out / "results.csv")
    assert rows[0]["k"] == "1"


def test_exit_code_config_error(tmp_path, capsys):
    rc = main(["probability", "--set", "g_mag=oops", "--out", str(tmp_path)])
    assert rc == EXIT_CONFIG
    assert "g_mag" in capsys.readouterr().err


def test_exit_code_unknown_key(tmp_path):
    rc = main(["probability", "--set", "nothere=1", "--out", str(tmp_path)])
    assert rc == EXIT_CONFIG


def test_exit_code_truncation(tmp_path, capsys):
    rc = main(["probability", "--set", "alpha_sq=50", "--set", "n_max=60",
               "--out", str(tmp_path)])
    assert rc == EXIT_TRUNCATION
    assert "n_max" in capsys.readouterr().err


def test_exit_code_precondition(tmp_path):
    rc = main(["loss", "--set", "times=0.3,0.1", "--out", str(tmp_path)])
    assert rc == EXIT_PRECONDITION


def test_rerun_byte_identical(tmp_path):
    args = ["metrology", "--set", "sweep_param=g_mag",
            "--set", "sweep_start=0.1", "--set", "sweep_stop=0.3",
            "--set", "sweep_steps=3"]
    main(args + ["--out", str(tmp_path / "a"), "--threads", "2"])
    main(args + ["--out", str(tmp_path / "b"), "--threads", "1"])
    assert ((tmp_path / "a" / "results.csv").read_bytes()
            == (tmp_path / "b" / "results.csv").read_bytes())


def test_schema_header_present(tmp_path):
    main(["channels", "--set", "g_mag=0.391", "--out", str(tmp_path)])
    first = (tmp_path / "results.csv").read_text().splitlines()[0]
    assert first == f"# schema={CSV_SCHEMA}"
