"""Scenario drivers: summaries, artifacts, and the check suite."""

import json
from pathlib import Path

import numpy as np
import pytest

from conftest import P_BAR_STAR
from wealthsim import config_from_dict, load_config, run_scenario, validate_checks
from wealthsim.errors import ConfigError

CONFIG_DIR = Path(__file__).resolve().parents[1] / "configs"

_BENCH_ECONOMY = {"s": "0.2", "tau_k": "0.2", "tau_l": "0.1",
                  "nu": "0.05", "delta": "1"}
_CD = {"kind": "cobb_douglas", "eps": "0.3"}


def _config(economy, production, network, simulation, scenario, outputs=None):
    sections = {"economy": economy, "production": production,
                "simulation": simulation, "scenario": {"name": scenario}}
    if network is not None:
        sections["network"] = network
    if outputs is not None:
        sections["outputs"] = outputs
    return config_from_dict(sections)


def test_run_scenario_requires_scenario_section():
    cfg = config_from_dict({"economy": _BENCH_ECONOMY, "production": _CD})
    with pytest.raises(ConfigError):
        run_scenario(cfg)


def test_stationary_initial_needs_stationary_regime():
    cfg = _config({"s": "0.2", "tau_k": "0.2", "nu": "0.01", "delta": "1"},
                  {"kind": "ces", "eps": "0.2", "gam": "0.7"},
                  {"n_households": "20", "n_firms": "4",
                   "invest_spread": "4", "labor_spread": "4", "seed": "0"},
                  {"dt": "0.25", "t_end": "10"},
                  "CompleteMarkets")
    with pytest.raises(ConfigError) as err:
        run_scenario(cfg)
    assert "stationary" in str(err.value)


def test_complete_markets_collapses_to_the_mean():
    cfg = _config(_BENCH_ECONOMY, _CD,
                  {"n_households": "60", "n_firms": "12",
                   "invest_spread": "12", "labor_spread": "12", "seed": "3"},
                  {"dt": "0.5", "t_end": "400", "burn_in": "0",
                   "record_every": "100", "seed": "7",
                   "initial": "stationary", "initial_spread": "0.2"},
                  "CompleteMarkets")
    summary = run_scenario(cfg)
    assert summary["scenario"] == "CompleteMarkets"
    assert summary["regime"]["regime"] == "stationary"
    assert summary["metrics"]["risk_fully_pooled"] is True
    assert summary["metrics"]["degenerate"] is True
    assert summary["metrics"]["max_abs_dev_from_stationary_mean"] < 1e-6 * P_BAR_STAR
    assert summary["snapshot_count"] == 5
    # pooled moments include the pre-relaxation snapshot; the path end is exact
    assert summary["mean_path"][-1] == pytest.approx(P_BAR_STAR, rel=1e-6)


def _incomplete_cfg(outputs=None, scenario="IncompleteMarkets"):
    return _config({**_BENCH_ECONOMY, "delta": "700"}, _CD,
                   {"n_households": "100", "n_firms": "100",
                    "invest_spread": "2", "labor_spread": "10", "seed": "7"},
                   {"dt": "0.1", "t_end": "30", "burn_in": "10",
                    "record_every": "5", "seed": "2",
                    "initial": "stationary", "initial_spread": "0.2"},
                   scenario, outputs)


def test_incomplete_markets_artifacts(tmp_path):
    out = tmp_path / "run"
    summary = run_scenario(_incomplete_cfg(), out_dir=out)

    assert summary["snapshot_count"] == 5
    assert summary["hill"] is not None
    assert set(summary["hill"]) == {"alpha", "stderr", "n_tail", "threshold"}
    assert 0.0 < summary["ks_distance"] < 1.0
    assert summary["metrics"]["alpha_analytic"] == pytest.approx(
        2.507936507936507, rel=1e-12)

    data = json.loads((out / "summary.json").read_text())
    assert data["scenario"] == "IncompleteMarkets"
    assert len(data["mean_path"]) == 5
    echoed = config_from_dict(data["config"])
    assert echoed.economy == _incomplete_cfg().economy
    assert echoed.scenario == "IncompleteMarkets"

    panel_lines = (out / "panel.csv").read_text().strip().splitlines()
    assert panel_lines[0] == "t,household_id,wealth"
    assert len(panel_lines) == 1 + 5 * 100

    density_lines = (out / "density.csv").read_text().strip().splitlines()
    assert density_lines[0] == "x,pdf,cdf"
    cdf = np.array([float(r.split(",")[2]) for r in density_lines[1:]])
    assert np.all(np.diff(cdf) >= 0.0)

    assert (out / "ccdf.csv").read_text().startswith("log_x,log_ccdf")


def test_json_format_suppresses_tables(tmp_path):
    out = tmp_path / "run"
    run_scenario(_incomplete_cfg(outputs={"format": "json"}), out_dir=out)
    assert (out / "summary.json").exists()
    assert not (out / "panel.csv").exists()
    assert not (out / "density.csv").exists()
    assert not (out / "ccdf.csv").exists()


def test_labor_only_compares_against_gaussian():
    cfg = _config(_BENCH_ECONOMY, _CD,
                  {"n_households": "60", "n_firms": "12",
                   "invest_spread": "12", "labor_spread": "3", "seed": "5"},
                  {"dt": "0.25", "t_end": "150", "burn_in": "50",
                   "record_every": "10", "seed": "1", "initial": "stationary"},
                  "LaborOnlyRisk")
    summary = run_scenario(cfg)
    m = summary["metrics"]
    assert m["analytic_mean"] == pytest.approx(P_BAR_STAR, rel=1e-12)
    assert m["analytic_variance"] > 0.0
    assert abs(m["sample_skewness"]) < 1.0
    assert summary["ks_distance"] < 0.25
    assert summary["hill"] is None


def test_staggered_wages_floor():
    summary = run_scenario(_incomplete_cfg(scenario="StaggeredWages"))
    m = summary["metrics"]
    assert m["bounded_away_from_zero"] is True
    assert m["min_wealth_after_burn_in"] > 0.0
    # the capital-noise tail is untouched by freezing wage income
    assert m["alpha_analytic"] == pytest.approx(2.507936507936507, rel=1e-12)
    assert summary["ks_distance"] is not None


def test_endogenous_growth_scenario():
    cfg = config_from_dict({
        "economy": {"s": "0.2", "tau_k": "0.2", "nu": "0.01",
                    "delta_theta_product": "10"},
        "production": {"kind": "ces", "eps": "0.2", "gam": "0.7"},
        "simulation": {"dt": "0.25", "t_end": "300", "burn_in": "200",
                       "record_every": "50", "seed": "3"},
        "scenario": {"name": "EndogenousGrowthRelative"},
    })
    summary = run_scenario(cfg)
    assert summary["regime"]["regime"] == "endogenous_growth"
    assert summary["snapshot_count"] == 3
    m = summary["metrics"]
    assert m["alpha_analytic"] == pytest.approx(4.114430180685449, rel=1e-12)
    assert m["growth_rate"] == pytest.approx(0.010067876424908159, rel=1e-12)
    assert m["mean_within_3_stderr_of_1"] is True
    assert summary["ks_distance"] is not None


def test_relative_growth_extreme_tail_matches_density():
    # tail index just above one: the pooled sample still tracks the
    # closed-form shape even though sample moments are useless there
    cfg = config_from_dict({
        "economy": {"s": "0.2", "tau_k": "0.2", "nu": "0.01",
                    "delta_theta_product": "300"},
        "production": {"kind": "ces", "eps": "0.2", "gam": "0.7"},
        "simulation": {"dt": "0.25", "t_end": "2500", "burn_in": "2400",
                       "record_every": "50", "seed": "2"},
        "scenario": {"name": "EndogenousGrowthRelative"},
    })
    summary = run_scenario(cfg)
    assert summary["metrics"]["alpha_analytic"] == pytest.approx(
        1.1038143393561817, rel=1e-12)
    assert summary["ks_distance"] < 0.05
    assert 0.9 < summary["hill"]["alpha"] < 1.4


def test_validate_checks_pass_on_shipped_config():
    cfg = load_config(CONFIG_DIR / "incomplete_markets.ini")
    checks = validate_checks(cfg)
    assert [c["name"] for c in checks] == [
        "economy_params", "euler_identity", "network_invariants",
        "noise_covariance", "density_normalization", "transition_continuity"]
    failed = [c for c in checks if not c["passed"]]
    assert failed == []
    assert "no growth transition" in checks[5]["detail"]


def test_validate_checks_degenerate_branches():
    quiet = config_from_dict({
        "economy": {**_BENCH_ECONOMY, "delta": "0"},
        "production": _CD,
    })
    by_name = {c["name"]: c for c in validate_checks(quiet)}
    assert all(c["passed"] for c in by_name.values())
    assert by_name["network_invariants"]["detail"] == "no network configured"
    assert "identically zero" in by_name["noise_covariance"]["detail"]
    assert "point mass" in by_name["density_normalization"]["detail"]

    untaxed = config_from_dict({
        "economy": {"s": "0.2", "tau_k": "0", "nu": "0.01", "delta": "300"},
        "production": {"kind": "ces", "eps": "0.2", "gam": "0.7"},
    })
    by_name = {c["name"]: c for c in validate_checks(untaxed)}
    assert "tau_k = 0" in by_name["transition_continuity"]["detail"]
    assert "no stationary shape" in by_name["density_normalization"]["detail"]


def test_validate_checks_boundary_continuity_for_growth_config():
    cfg = load_config(CONFIG_DIR / "endogenous_growth.ini")
    by_name = {c["name"]: c for c in validate_checks(cfg)}
    assert by_name["transition_continuity"]["passed"]
    assert by_name["density_normalization"]["passed"]
    failed = [c for c in by_name.values() if not c["passed"]]
    assert failed == []
