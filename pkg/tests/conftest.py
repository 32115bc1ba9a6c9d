"""Shared test fixtures for ringcore-sim tests."""

import csv
import json
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

from ringcore_sim.config import (
    ExperimentConfig,
    FiberProfile,
    default_config,
    default_profile,
    noise_config_for,
)
from ringcore_sim.constants import Direction
from ringcore_sim.envelope import ComplexEnvelope, group_mode_ids
from ringcore_sim.report import CSV_COLUMNS
from ringcore_sim.txgen import PrbsGenerator, PulseShaper, transmit


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator for test signals."""
    return np.random.default_rng(20240611)


@pytest.fixture
def profile() -> FiberProfile:
    return default_profile()


@pytest.fixture
def transparent_profile() -> FiberProfile:
    """Lossless-mixing profile without crosstalk, DMD or drift."""
    return replace(
        default_profile(),
        xt_intermg_db=None,
        xt_intercore_db=None,
        intra_group_mixing=False,
        intra_dmd_ps_per_km=[0.0, 0.0, 0.0],
        drift_rate=0.0,
    ).validate()


@pytest.fixture
def noise_cfg(profile):
    return noise_config_for(profile)


@pytest.fixture
def shaper() -> PulseShaper:
    return PulseShaper(roll_off=0.01, samples_per_symbol=2, span_symbols=128)


@pytest.fixture
def group_signals(shaper):
    """Four shaped 8QAM channels of core 1, MG 3 (forward), 2^14 symbols each."""

    def _make(n_symbols: int = 1 << 14, core: int = 1, mode_group: int = 3, seed: int = 1):
        transmissions = {}
        for i, mode in enumerate(group_mode_ids(core, mode_group, Direction.FORWARD)):
            gen = PrbsGenerator.from_seed(seed * 101 + i)
            transmissions[mode] = transmit(gen, n_symbols, shaper)
        return transmissions

    return _make


@pytest.fixture
def white_envelope(rng):
    def _make(n: int = 8192, power: float = 1.0) -> ComplexEnvelope:
        samples = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) * np.sqrt(power / 2)
        return ComplexEnvelope(samples, 24e9, 12e9)

    return _make


@pytest.fixture
def small_config(tmp_path) -> ExperimentConfig:
    """Desk-scale config: one core, no loaded neighbours, short blocks."""

    def _make(experiment: str = "ber_grid", **link_overrides) -> ExperimentConfig:
        cfg = default_config(experiment, seed=11)
        cfg.symbols = 1 << 15
        cfg.output_dir = str(tmp_path / "out")
        cfg.link = replace(
            cfg.link,
            loaded_cores=[],
            directions=["forward"],
            drift_segments=1,
            **link_overrides,
        )
        cfg.sweep = replace(
            cfg.sweep,
            sweep_symbols=1 << 15,
            backward_powers_dbm=[0.0, 20.0],
            tap_counts=[3, 15],
            drift_windows=3,
            drift_window_symbols=1 << 14,
        )
        return cfg.validate()

    return _make


SAMPLE_ROWS = [
    {
        "point": "",
        "core": "1",
        "mode_group": "2",
        "charge": "2",
        "polarization": "R",
        "wavelength": "0",
        "direction": "forward",
        "ber": "0.0041",
        "ci_low": "0.0039",
        "ci_high": "0.0043",
        "snr_db": "13.2",
        "evm_percent": "21.9",
        "status": "pass",
    },
    {
        "point": "",
        "core": "1",
        "mode_group": "3",
        "charge": "-3",
        "polarization": "L",
        "wavelength": "0",
        "direction": "forward",
        "ber": "0.031",
        "ci_low": "0.030",
        "ci_high": "0.032",
        "snr_db": "9.8",
        "evm_percent": "32.4",
        "status": "fail",
    },
    {
        "point": "",
        "core": "1",
        "mode_group": "4",
        "charge": "4",
        "polarization": "R",
        "wavelength": "0",
        "direction": "backward",
        "ber": "",
        "ci_low": "",
        "ci_high": "",
        "snr_db": "",
        "evm_percent": "",
        "status": "no_lock",
    },
]


@pytest.fixture
def sample_records() -> list[dict[str, str]]:
    return [dict(row) for row in SAMPLE_ROWS]


@pytest.fixture
def results_dir(tmp_path, sample_records) -> Path:
    """A tiny results directory with results.csv and report.json."""
    out = tmp_path / "results"
    out.mkdir()
    with (out / "results.csv").open("w", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(sample_records)
    report = {
        "experiment": "ber_grid",
        "seed": 11,
        "config_hash": "ab" * 32,
        "counts": {"total": 3, "passed": 1, "failed": 2},
        "accepted": False,
        "acceptance": [{"name": "all_channels_below_fec", "passed": False, "detail": ""}],
        "telemetry": {"runner": {"state": "done"}},
    }
    (out / "report.json").write_text(json.dumps(report))
    return out
