import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qbphase.errors import ConfigError, PhysicalityViolation, ScenarioError, UnknownFigure
from qbphase.experiments import (FIGURES, ScenarioConfig, figure_registry, format_config, parse_config,
                                 read_table, run_scenario, run_sweep, write_table)
from qbphase.experiments import cli, runner
from qbphase.experiments.io import format_table
from qbphase.experiments.registry import RATE_SWEEP, THREE_LEVEL, TWO_LEVEL

SMALL = dict(TWO_LEVEL, grid_points=400)


# ---- config ---------------------------------------------------------------

def test_parse_minimal_defaults():
    (cfg,) = parse_config("name = demo\n")
    assert cfg == ScenarioConfig(name="demo")


def test_parse_constants_and_comments():
    text = """
    # a ladder run
    model = three_level
    pulse_area = pi       # Theta_m
    sigma_ratio = 1/16
    phi = pi/2
    gamma21 = none
    """
    (cfg,) = parse_config("\n".join(line.strip() for line in text.splitlines()))
    assert cfg.pulse_area == math.pi
    assert cfg.phi == math.pi / 2
    assert cfg.sigma_ratio == pytest.approx(1 / 16)
    assert cfg.gamma21 is None


def test_unknown_key_rejected():
    with pytest.raises(ConfigError, match="unknown keys"):
        parse_config("gama = 0.1\n")


@pytest.mark.parametrize("text", ["model = four_level", "gamma = -1", "a = 0.8\nc = 0.5",
                                  "grid_points = 1", "sigma_ratio = 0.4", "gap_ratio = abc",
                                  "gamma = 1,2\neta = 3,4", "eta = ,"])
def test_invalid_configs(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_sweep_expansion():
    cfgs = parse_config("name = s\ngamma = 0, 1e-3, 1e-2\neta = 1e-4\n")
    assert [c.name for c in cfgs] == ["s-00", "s-01", "s-02"]
    assert [c.gamma for c in cfgs] == [0.0, 1e-3, 1e-2]
    assert all(c.eta == 1e-4 for c in cfgs)


def test_registry_round_trip():
    for cfg in figure_registry("fig-all"):
        (back,) = parse_config(format_config(cfg))
        assert back == cfg


@settings(max_examples=50, deadline=None)
@given(st.floats(0, 1), st.floats(0, 1), st.floats(-10, 10), st.floats(0, 1, exclude_min=True),
       st.integers(2, 10000))
def test_config_round_trip_property(a, c, phi, gamma, grid):
    cfg = ScenarioConfig(model="three_level", a=a, c=c * (1 - a), phi=phi, gamma=gamma, grid_points=grid,
                         sigma_ratio=1 / 16, pulse_area=math.pi)
    (back,) = parse_config(format_config(cfg))
    assert back == cfg


# ---- registry -------------------------------------------------------------

def test_registry_contents():
    assert FIGURES == ("fig2a", "fig2b", "fig3a", "fig3b", "fig4a", "fig4b", "fig5a", "fig5b",
                       "fig6a", "fig6b", "fig8", "fig9")
    fig2a = figure_registry("fig2a")
    assert [c.gamma for c in fig2a] == list(RATE_SWEEP)
    for c in fig2a:
        assert (c.model, c.gap_ratio, c.sigma_ratio, c.pulse_area, c.a, c.phi) == \
            ("two_level", 10.0, 0.125, math.pi / 2, 1.0, 0.0)
        assert c.eta == pytest.approx(c.gamma / 10)
    for c in figure_registry("fig4a"):
        assert (c.model, c.gap_ratio, c.gap2_ratio, c.sigma_ratio, c.pulse_area, c.a, c.c) == \
            ("three_level", 100.0, 95.0, 1 / 16, math.pi, 1.0, 0.0)
        assert c.upper_gamma == c.gamma
    for c in figure_registry("fig8"):
        assert c.model == "bipartite" and c.drive_ratio == 0.5
    names = [c.name for c in figure_registry("fig-all")]
    assert len(names) == len(set(names))


def test_unknown_figure():
    with pytest.raises(UnknownFigure):
        figure_registry("fig7")


# ---- runner and io --------------------------------------------------------

def test_run_scenario_table_invariants():
    res = run_scenario(ScenarioConfig(name="r", **dict(SMALL, gamma=1e-3, eta=1e-4)))
    cols = res.columns
    assert list(cols) == runner.column_names(2)
    assert len({len(v) for v in cols.values()}) == 1
    np.testing.assert_array_equal(cols["gp"], cols["pancharatnam"] - cols["dynamical"])
    rising = np.diff(cols["energy_integral"])[cols["energy"][1:] >= 0]
    assert np.all(rising >= -1e-12)
    assert res.summary["final_gp"] == cols["gp"][-1]


def test_closed_run_has_zero_deviation():
    res = run_scenario(ScenarioConfig(name="u", **SMALL))
    assert np.abs(res.columns["delta_gp"]).max() <= 1e-6


def test_io_round_trip(tmp_path):
    res = run_scenario(ScenarioConfig(name="io", **SMALL))
    path = write_table(res, tmp_path / "sub" / "io.tsv")
    header, cols = read_table(path)
    assert header["name"] == "io" and header["model"] == "two_level"
    assert float(header["summary.final_gp"]) == res.summary["final_gp"]
    for key, val in res.columns.items():
        np.testing.assert_array_equal(cols[key], val)
    (back,) = parse_config("\n".join(f"{k} = {v}" for k, v in header.items() if not k.startswith("summary.")))
    assert back == res.config


def test_run_sweep_order_and_parallel_identity():
    cfgs = [ScenarioConfig(name=f"p{k}", **dict(SMALL, gamma=g)) for k, g in enumerate((1e-2, 0.0, 1e-3))]
    serial = run_sweep(cfgs, parallelism=1)
    parallel = run_sweep(cfgs, parallelism=3)
    assert [r.config.name for r in parallel] == ["p0", "p1", "p2"]
    assert [format_table(r) for r in serial] == [format_table(r) for r in parallel]
    single = run_sweep(cfgs[:1], parallelism=4)[0]
    assert format_table(single) == format_table(run_scenario(cfgs[0]))
    with pytest.raises(ValueError):
        run_sweep(cfgs, parallelism=0)


_REAL_RUN = runner.run_scenario


def _fail_for(names, cause):
    real = _REAL_RUN

    def fake(cfg, frame=None, grid_points=None):
        if cfg.name in names:
            raise ScenarioError(cfg.name, cause)
        return real(cfg, frame, grid_points)
    return fake


def test_sweep_captures_failures(monkeypatch):
    monkeypatch.setattr(runner, "run_scenario", _fail_for({"b"}, ValueError("boom")))
    res = run_sweep([ScenarioConfig(name=n, **SMALL) for n in "abc"])
    assert [r.ok for r in res] == [True, False, True]
    assert isinstance(res[1].error, ScenarioError) and "boom" in str(res[1].error)


# ---- CLI ------------------------------------------------------------------

def _write_cfg(tmp_path, text):
    path = tmp_path / "scenario.cfg"
    path.write_text(text)
    return str(path)


def test_cli_run(tmp_path, capsys):
    cfg = _write_cfg(tmp_path, "name = demo\ngrid_points = 300\ngamma = 0, 1e-2\n")
    out = tmp_path / "out"
    assert cli.main(["run", "--config", cfg, "--out", str(out)]) == cli.EXIT_OK
    assert sorted(p.name for p in out.iterdir()) == ["demo-00.tsv", "demo-01.tsv"]
    header, _ = read_table(out / "demo-01.tsv")
    assert float(header["gamma"]) == 1e-2


def test_cli_config_errors(tmp_path, capsys):
    assert cli.main(["run", "--config", _write_cfg(tmp_path, "bogus = 1\n")]) == cli.EXIT_CONFIG
    assert cli.main(["run", "--config", str(tmp_path / "missing.cfg")]) == cli.EXIT_CONFIG
    assert cli.main(["figure", "fig7"]) == cli.EXIT_CONFIG
    assert cli.main(["figure", "fig2a", "--grid", "1"]) == cli.EXIT_CONFIG
    assert "config error" in capsys.readouterr().err


def test_cli_list_figures(capsys):
    assert cli.main(["list-figures"]) == cli.EXIT_OK
    assert capsys.readouterr().out.split() == list(FIGURES)


def test_cli_physics_and_partial_exit_codes(tmp_path, monkeypatch, capsys):
    cfg = _write_cfg(tmp_path, "name = x\ngrid_points = 200\neta = 0, 1e-3\n")
    monkeypatch.setattr(runner, "run_scenario",
                        _fail_for({"x-00", "x-01"}, PhysicalityViolation("trace", 0.5, 1e-6)))
    assert cli.main(["run", "--config", cfg, "--out", str(tmp_path)]) == cli.EXIT_PHYSICS
    monkeypatch.setattr(runner, "run_scenario", _fail_for({"x-01"}, PhysicalityViolation("trace", 0.5, 1e-6)))
    assert cli.main(["run", "--config", cfg, "--out", str(tmp_path)]) == cli.EXIT_PARTIAL
    assert (tmp_path / "x-00.tsv").exists()
    assert "trace guard" in capsys.readouterr().err


def test_cli_figure_with_overrides(tmp_path):
    out = tmp_path / "res"
    assert cli.main(["figure", "fig8", "--out", str(out), "--grid", "300", "--jobs", "2"]) == cli.EXIT_OK
    files = sorted(p.name for p in out.iterdir())
    assert files == [f"fig8-eta{k:02d}.tsv" for k in range(5)]
    header, cols = read_table(out / "fig8-eta00.tsv")
    assert header["grid_points"] == "300" and len(cols["t"]) == 301


def test_cli_check(capsys):
    assert cli.main(["check"]) == cli.EXIT_OK
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 6 and all(line.startswith("PASS") for line in lines)
