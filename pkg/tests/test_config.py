"""Tests for configuration loading, validation and hashing."""

import json
from dataclasses import replace

import pytest

from ringcore_sim.config import (
    CONFIG_SCHEMA,
    BidirNoiseConfig,
    ExperimentConfig,
    FiberProfile,
    config_hash,
    default_config,
    default_profile,
    load_config,
    mode_key,
    noise_config_for,
    parse_mode_key,
    spool_profile,
    validate_document,
)
from ringcore_sim.errors import ConfigurationError


def _write(tmp_path, document) -> str:
    path = tmp_path / "config.json"
    path.write_text(json.dumps(document))
    return str(path)


class TestFiberProfile:
    """Test cases for the fiber profile."""

    def test_default_mean_attenuation(self, profile):
        assert profile.mean_attenuation() == pytest.approx(0.32)
        assert profile.atten(1, 4) == 0.372
        assert profile.atten(2, 4) == 0.323

    def test_group_delay(self, profile):
        assert profile.group_delay_ns(2) == 0.0
        assert profile.group_delay_ns(3) == 25.0
        assert profile.group_delay_ns(4) == 50.0

    def test_json_round_trip_is_exact(self, profile):
        disabled = replace(profile, xt_intercore_db=None)
        restored = FiberProfile.from_json(disabled.to_json())
        assert restored == disabled
        assert json.loads(disabled.to_json())["xt_intercore_db"] is None

    def test_spool_profile_is_less_lossy(self):
        assert spool_profile().mean_attenuation() == pytest.approx(0.30)

    @pytest.mark.parametrize(
        "change",
        [
            {"mode_groups": [1, 2, 3]},
            {"mode_groups": [3, 2, 4]},
            {"xt_intermg_db": 3.0},
            {"dgd_ns_per_km": [5.0]},
            {"length_km": 0.0},
            {"drift_rate": -1.0},
        ],
    )
    def test_invalid_profiles(self, profile, change):
        with pytest.raises(ConfigurationError):
            replace(profile, **change).validate()

    def test_unknown_mode_group(self, profile):
        with pytest.raises(ConfigurationError):
            profile.mg_index(5)


class TestBidirNoiseConfig:
    """Test cases for the bidirectional noise config."""

    def test_derived_from_profile(self, profile):
        noise = noise_config_for(profile)
        assert noise.alpha_db_per_km == pytest.approx(0.32)
        assert noise.recapture_factor(3, 3) == 1e-3
        assert noise.recapture_factor(3, 4) == 5e-4

    def test_json_round_trip_is_exact(self):
        noise = BidirNoiseConfig(p_backward_dbm={"1:+3R": 12.5, "1:-4L": 3.0}).validate()
        assert BidirNoiseConfig.from_json(noise.to_json()) == noise

    def test_cross_recapture_above_same_rejected(self):
        with pytest.raises(ConfigurationError):
            BidirNoiseConfig(recapture=[[1e-3, 2e-3], [5e-4, 1e-3]], mode_groups=[2, 3]).validate()

    def test_scatter_above_attenuation_rejected(self):
        with pytest.raises(ConfigurationError):
            BidirNoiseConfig(alpha_scatter_db_per_km=0.5).validate()

    def test_nonfinite_power_rejected(self):
        with pytest.raises(ConfigurationError):
            BidirNoiseConfig(p_backward_dbm={"1:+3R": float("inf")}).validate()


class TestModeKeys:
    """Test cases for backward mode keys."""

    def test_round_trip(self):
        assert parse_mode_key(mode_key(2, -3, "L")) == (2, -3, "L")
        assert mode_key(1, 4, "R") == "1:+4R"

    @pytest.mark.parametrize("key", ["1+3R", "1:+3X", "1:0R", "a:+3R", "1:R"])
    def test_malformed(self, key):
        with pytest.raises(ConfigurationError):
            parse_mode_key(key)


class TestLoadConfig:
    """Test cases for loading JSON configs."""

    def test_minimal_document(self, tmp_path):
        cfg = load_config(_write(tmp_path, {"experiment": "ber_grid", "seed": 3}))
        assert cfg.seed == 3
        assert cfg.profile == default_profile()
        assert cfg.noise.alpha_db_per_km == pytest.approx(0.32)

    def test_overrides_win(self, tmp_path):
        path = _write(tmp_path, {"experiment": "ber_grid", "seed": 3})
        cfg = load_config(path, seed=9, output_dir="elsewhere", symbols=None)
        assert cfg.seed == 9
        assert cfg.output_dir == "elsewhere"
        assert cfg.symbols == 200_000

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigurationError, match="not found"):
            load_config(tmp_path / "missing.json")

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text("{not json")
        with pytest.raises(ConfigurationError, match="not valid JSON"):
            load_config(path)

    def test_schema_violation_names_location(self, tmp_path):
        document = {"experiment": "ber_grid", "seed": 3, "dsp": {"taps": 40}}
        with pytest.raises(ConfigurationError, match="dsp/taps"):
            load_config(_write(tmp_path, document))

    def test_unknown_key_rejected(self, tmp_path):
        with pytest.raises(ConfigurationError):
            load_config(_write(tmp_path, {"experiment": "ber_grid", "seed": 3, "colour": 1}))

    def test_even_taps_rejected_semantically(self, tmp_path):
        document = {"experiment": "ber_grid", "seed": 3, "dsp": {"taps": 14}}
        with pytest.raises(ConfigurationError, match="odd"):
            load_config(_write(tmp_path, document))

    def test_missing_seed(self):
        with pytest.raises(ConfigurationError):
            validate_document({"experiment": "ber_grid"})

    def test_schema_lists_every_experiment(self):
        assert set(CONFIG_SCHEMA["properties"]["experiment"]["enum"]) == {
            "ber_grid",
            "backward_power_sweep",
            "tap_count_sweep",
            "drift_tracking",
            "budget_check",
            "complexity_table",
        }


class TestConfigHash:
    """Test cases for the result-relevant config hash."""

    def test_stable_for_equal_configs(self):
        assert config_hash(default_config("ber_grid", 1)) == config_hash(
            default_config("ber_grid", 1)
        )

    def test_execution_settings_not_hashed(self):
        a = default_config("ber_grid", 1)
        b = default_config("ber_grid", 1, output_dir="other", parallel=4)
        assert config_hash(a) == config_hash(b)

    def test_seed_changes_hash(self):
        assert config_hash(default_config("ber_grid", 1)) != config_hash(
            default_config("ber_grid", 2)
        )

    def test_dict_round_trip(self):
        cfg = default_config("drift_tracking", 5)
        restored = ExperimentConfig.from_dict(cfg.to_dict()).validate()
        assert config_hash(restored) == config_hash(cfg)


class TestDefaultConfig:
    """Test cases for experiment defaults."""

    def test_unknown_experiment(self):
        with pytest.raises(ConfigurationError):
            default_config("eye_diagram", 1)

    def test_negative_seed(self):
        with pytest.raises(ConfigurationError):
            default_config("ber_grid", -1)

    def test_profile_is_default(self):
        assert default_config("ber_grid", 0).profile == default_profile()
