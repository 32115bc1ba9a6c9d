"""Tests for the named experiments."""

import math

import numpy as np
import pytest

from ringcore_sim.config import default_config
from ringcore_sim.fiberchan import build_channel
from ringcore_sim.constants import Direction
from ringcore_sim.experiments import (
    EXPERIMENT_RUNNERS,
    SCENARIOS,
    _mean_db,
    backward_launch,
    check_sweep,
    crosstalk_rows,
    rng_for,
    run_backward_power_sweep,
    run_ber_grid,
    run_budget_and_complexity,
    run_drift_tracking,
    run_experiment,
    run_tap_count_sweep,
    scenario_backward_powers,
    seed_int,
    tap_change,
    track_drift,
)
from ringcore_sim.report import LinkReport


def _sweep_row(scenario: str, power: float, measured: float, analytic: float) -> dict:
    return {
        "scenario": scenario,
        "backward_power_dbm": power,
        "measured_snr_db": measured,
        "measured_rb_ratio_db": analytic + 0.2 if math.isfinite(analytic) else analytic,
        "analytic_ratio_db": analytic,
    }


def _good_table() -> list[dict]:
    table = [_sweep_row("baseline", -math.inf, 12.0, math.inf)]
    for scenario, offset in (("same", 0.0), ("different", 3.0), ("multiplexed", -1.8)):
        table.append(_sweep_row(scenario, 0.0, 11.9, 43.0 + offset))
        table.append(_sweep_row(scenario, 20.0, 11.0 + offset / 10, 23.0 + offset))
    return table


class TestSeeding:
    """Test cases for job-keyed random streams."""

    def test_same_parts_same_seed(self):
        assert seed_int(7, "prbs", 0, "forward") == seed_int(7, "prbs", 0, "forward")

    def test_parts_and_seed_matter(self):
        base = seed_int(7, "prbs", 0)
        assert base != seed_int(7, "prbs", 1)
        assert base != seed_int(8, "prbs", 0)

    def test_generators_are_reproducible(self):
        a = rng_for(3, "link").standard_normal(4)
        b = rng_for(3, "link").standard_normal(4)
        assert np.array_equal(a, b)


class TestBackwardLaunch:
    """Test cases for the counter-propagating launch."""

    def test_default_launches_every_link_mode(self):
        cfg = default_config("ber_grid", 1)
        noise = backward_launch(cfg, 2)
        assert len(noise.p_backward_dbm) == 12
        assert set(noise.p_backward_dbm.values()) == {cfg.noise.p_forward_dbm}
        assert all(key.startswith("2:") for key in noise.p_backward_dbm)

    def test_explicit_powers_are_kept(self):
        cfg = default_config("ber_grid", 1)
        cfg.noise.p_backward_dbm = {"1:+3R": 5.0}
        assert backward_launch(cfg, 1).p_backward_dbm == {"1:+3R": 5.0}

    @pytest.mark.parametrize(
        "scenario, expected",
        [
            ("same", {"1:+3R": 10.0}),
            ("different", {"1:+4R": 10.0}),
            ("multiplexed", {"1:+3R": 10.0, "1:+4R": 10.0}),
        ],
    )
    def test_scenario_powers(self, scenario, expected):
        cfg = default_config("backward_power_sweep", 1)
        assert scenario_backward_powers(cfg, 1, scenario, 10.0) == expected

    def test_unknown_scenario(self):
        with pytest.raises(ValueError):
            scenario_backward_powers(default_config("ber_grid", 1), 1, "both", 0.0)


class TestCheckSweep:
    """Test cases for the sweep ordering checks."""

    def test_consistent_table_accepted(self):
        report = LinkReport("backward_power_sweep", 1, "00")
        check_sweep(report, _good_table())
        assert report.accepted
        assert len(report.checks) == 3 * len(SCENARIOS) + 1

    def test_measured_above_field_ratio_rejected(self):
        table = _good_table()
        table[2]["measured_snr_db"] = 30.0
        report = LinkReport("backward_power_sweep", 1, "00")
        check_sweep(report, table)
        failed = {c.name for c in report.checks if not c.passed}
        assert "same_measured_below_rb_ratio" in failed

    def test_field_ratio_far_from_analytic_rejected(self):
        table = _good_table()
        table[4]["measured_rb_ratio_db"] = table[4]["analytic_ratio_db"] + 2.5
        report = LinkReport("backward_power_sweep", 1, "00")
        check_sweep(report, table)
        failed = {c.name for c in report.checks if not c.passed}
        assert failed == {"different_rb_field_matches_analytic"}

    def test_rising_snr_rejected(self):
        table = _good_table()
        table[2]["measured_snr_db"] = 12.5
        report = LinkReport("backward_power_sweep", 1, "00")
        check_sweep(report, table)
        failed = {c.name for c in report.checks if not c.passed}
        assert failed == {"same_monotone"}

    def test_multiplexed_better_rejected(self):
        table = _good_table()
        table[6]["measured_snr_db"] = 11.8
        report = LinkReport("backward_power_sweep", 1, "00")
        check_sweep(report, table)
        assert not report.accepted


class TestHelpers:
    """Test cases for small experiment helpers."""

    def test_tap_change(self):
        before = np.ones((4, 4, 3))
        assert tap_change(before, before) == 0.0
        assert tap_change(before, 2 * before) == pytest.approx(1.0)
        assert tap_change(np.zeros(3), np.ones(3)) == math.inf

    def test_mean_db(self):
        assert _mean_db([10.0, 10.0]) == pytest.approx(10.0)
        assert _mean_db([math.inf]) == math.inf
        assert math.isnan(_mean_db([]))

    def test_every_experiment_has_a_runner(self):
        assert set(EXPERIMENT_RUNNERS) == {
            "ber_grid",
            "backward_power_sweep",
            "tap_count_sweep",
            "drift_tracking",
            "budget_check",
            "complexity_table",
        }


class TestCrosstalkRows:
    """Test cases for the per-group crosstalk table."""

    def test_rows_expose_aggregates_and_targets(self, small_config):
        cfg = small_config("ber_grid")
        channel = build_channel(cfg.profile, 2, cfg.link.simulated_cores)
        rows = crosstalk_rows(cfg, channel)
        by_mg = {r["mode_group"]: r for r in rows}
        assert set(by_mg) == {2, 3, 4}
        assert by_mg[3]["intermg_db"] == pytest.approx(-12.0, abs=0.5)
        # edge groups have one adjacent neighbour, so they leak less
        assert by_mg[2]["intermg_db"] < by_mg[3]["intermg_db"] - 1.0
        assert by_mg[4]["intermg_db"] < by_mg[3]["intermg_db"] - 1.0
        assert all(r["intermg_target_db"] == -12.0 for r in rows)
        assert all(r["intercore_db"] == -math.inf for r in rows)


class TestBudgetAndComplexity:
    """Test cases for the analytic budget and complexity experiment."""

    def test_default_budget_check_is_accepted(self):
        report = run_budget_and_complexity(default_config("budget_check", 3))
        assert report.accepted
        names = {c.name for c in report.checks}
        assert names == {"published_budget", "headline_se", "rncm_per_bit", "rncm_counter"}
        assert report.summary["net_se"] == pytest.approx(403.2)
        assert report.summary["rncm_per_bit"] == 20.0

    def test_tables(self):
        report = run_budget_and_complexity(default_config("complexity_table", 3))
        assert len(report.tables["power_budget"]) == 6
        assert len(report.tables["complexity"]) == 3
        assert len(report.tables["rncm_check"]) == 10
        assert report.experiment == "complexity_table"

    def test_headline_check_skipped_for_custom_se(self):
        cfg = default_config("budget_check", 3)
        cfg.se.n_wavelengths = 10
        report = run_budget_and_complexity(cfg)
        assert "headline_se" not in {c.name for c in report.checks}

    def test_run_experiment_records_elapsed_time(self):
        report = run_experiment(default_config("budget_check", 3))
        assert report.telemetry["elapsed_s"] >= 0


@pytest.mark.slow
@pytest.mark.integration
class TestLinkExperiments:
    """End-to-end runs of the simulated link at desk scale."""

    def test_ber_grid(self, small_config):
        cfg = small_config("ber_grid")
        report = run_ber_grid(cfg)
        assert len(report.rows) == 12
        assert {row.mode.direction for row in report.rows} == {Direction.FORWARD}
        assert {row.status for row in report.rows} <= {"pass", "fail", "no_lock", "diverged"}
        assert set(report.summary["mean_ber_by_mode_group"]) <= {"2", "3", "4"}
        assert report.telemetry["runner"]["state"] == "done"
        assert all(name.startswith("core1/MG") for name in report.taps)
        assert [(r["core"], r["mode_group"]) for r in report.tables["crosstalk"]] == [
            (1, 2),
            (1, 3),
            (1, 4),
        ]
        assert report.summary["worst_intermg_db"] == pytest.approx(-12.0, abs=0.5)

    def test_ber_grid_is_deterministic(self, small_config):
        cfg = small_config("ber_grid", mode_groups=[3])
        first = run_ber_grid(cfg)
        second = run_ber_grid(cfg)
        assert [r.as_record() for r in first.rows] == [r.as_record() for r in second.rows]

    def test_backward_power_sweep(self, small_config):
        cfg = small_config("backward_power_sweep")
        report = run_backward_power_sweep(cfg)
        table = report.tables["backward_power_sweep"]
        assert len(table) == 1 + len(SCENARIOS) * 2
        assert table[0]["scenario"] == "baseline"
        assert table[0]["analytic_ratio_db"] == math.inf
        same = [r for r in table if r["scenario"] == "same"]
        assert same[0]["analytic_ratio_db"] - same[1]["analytic_ratio_db"] == pytest.approx(20.0)
        assert len(report.tables["noise_budget"]) == len(table)
        assert {row.point for row in report.rows} >= {"baseline", "same@+20.0dBm"}
        for row in table[1:]:
            assert abs(row["measured_rb_ratio_db"] - row["analytic_ratio_db"]) <= 1.0
        assert table[0]["measured_rb_ratio_db"] == math.inf

    def test_tap_count_sweep(self, small_config):
        report = run_tap_count_sweep(small_config("tap_count_sweep"))
        table = report.tables["tap_count_sweep"]
        assert [r["taps"] for r in table] == [3, 15]
        assert table[1]["span_ps"] == pytest.approx(625.0)
        assert "knee_taps" in report.summary

    def test_drift_tracking(self, small_config):
        report = run_drift_tracking(small_config("drift_tracking", mode_groups=[3]))
        series = report.tables["drift_tracking"]
        assert [w["window"] for w in series] == [0, 1, 2]
        assert math.isnan(series[0]["tap_change"])
        group_power = [w["group_power"] for w in series]
        assert group_power == pytest.approx([group_power[0]] * 3, rel=1e-9)
        assert set(report.summary["failure_rate"]) == {"1"}

    def test_static_channel_keeps_taps(self, small_config):
        cfg = small_config("drift_tracking", mode_groups=[3])
        windows = track_drift(cfg, 0.0)
        changes = [w["tap_change"] for w in windows[1:]]
        assert all(math.isfinite(c) for c in changes)
        assert max(changes) < 0.2
        assert [w["group_power"] for w in windows] == pytest.approx([windows[0]["group_power"]] * 3)
