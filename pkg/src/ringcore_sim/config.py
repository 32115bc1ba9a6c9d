"""Configuration dataclasses, JSON schema and loading for ringcore-sim.

Every config is a slotted dataclass whose JSON keys are exactly its field
names. ``FiberProfile`` and ``BidirNoiseConfig`` round-trip bit-exactly
through JSON; disabled crosstalk is written as ``null``.
"""

import hashlib
import json
import logging
import math
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Optional

import jsonschema

from .constants import EXCLUDED_MODE_GROUPS, Direction
from .errors import ConfigurationError

logger = logging.getLogger(__name__)

EXPERIMENTS = (
    "ber_grid",
    "backward_power_sweep",
    "tap_count_sweep",
    "drift_tracking",
    "budget_check",
    "complexity_table",
)


@dataclass(slots=True)
class FiberProfile:
    """Per-core, per-mode-group physical parameters of the ring-core fiber link."""

    length_km: float = 5.0
    cores: int = 7
    mode_groups: list[int] = field(default_factory=lambda: [2, 3, 4])
    # [core - 1][mode group index]
    atten_db_per_km: list[list[float]] = field(default_factory=list)
    # one entry per adjacent pair of mode_groups
    dgd_ns_per_km: list[float] = field(default_factory=lambda: [5.0, 5.0])
    intra_dmd_ps_per_km: list[float] = field(default_factory=lambda: [50.0, 50.0, 50.0])
    xt_intermg_db: Optional[float] = -12.0
    xt_intermg_falloff_db: float = 10.0
    xt_intercore_db: Optional[float] = -20.0
    rayleigh_scatter_db_per_km: float = 0.25
    recapture_same: float = 1e-3
    recapture_cross: float = 5e-4
    fresnel_reflectance: float = 1e-3
    mux_insertion_loss_db: list[float] = field(default_factory=lambda: [13.0, 13.0, 14.0])
    demux_insertion_loss_db: list[float] = field(default_factory=lambda: [9.0, 9.0, 9.0])
    intra_group_mixing: bool = True
    drift_rate: float = 1.0
    reciprocal: bool = False
    distributed_xt: bool = False
    in_fiber_xt_db_per_km: float = -35.0
    xt_sections: int = 5

    def __post_init__(self) -> None:
        if not self.atten_db_per_km:
            self.atten_db_per_km = [[0.32] * len(self.mode_groups) for _ in range(self.cores)]

    def validate(self) -> "FiberProfile":
        """Check profile invariants, raising ConfigurationError on violation."""
        n_mg = len(self.mode_groups)
        if self.length_km <= 0:
            raise ConfigurationError("length_km must be positive")
        if not 1 <= self.cores <= 7:
            raise ConfigurationError("cores must be between 1 and 7")
        if not self.mode_groups:
            raise ConfigurationError("at least one mode group is required")
        excluded = EXCLUDED_MODE_GROUPS.intersection(self.mode_groups)
        if excluded:
            raise ConfigurationError(
                f"mode groups {sorted(excluded)} are not usable as spatial channels"
            )
        if sorted(set(self.mode_groups)) != list(self.mode_groups):
            raise ConfigurationError("mode_groups must be strictly increasing")
        if len(self.atten_db_per_km) != self.cores or any(
            len(row) != n_mg for row in self.atten_db_per_km
        ):
            raise ConfigurationError("atten_db_per_km must be cores x mode_groups")
        if any(value < 0 for row in self.atten_db_per_km for value in row):
            raise ConfigurationError("attenuation values must be non-negative")
        if len(self.dgd_ns_per_km) != n_mg - 1:
            raise ConfigurationError("dgd_ns_per_km needs one value per adjacent MG pair")
        for name in ("intra_dmd_ps_per_km", "mux_insertion_loss_db", "demux_insertion_loss_db"):
            values = getattr(self, name)
            if len(values) != n_mg:
                raise ConfigurationError(f"{name} needs one value per mode group")
            if any(v < 0 for v in values):
                raise ConfigurationError(f"{name} values must be non-negative")
        for name in ("xt_intermg_db", "xt_intercore_db"):
            value = getattr(self, name)
            if value is not None and value >= 0:
                raise ConfigurationError(f"{name} must be negative dB (or null to disable)")
        if self.in_fiber_xt_db_per_km >= 0:
            raise ConfigurationError("in_fiber_xt_db_per_km must be negative dB")
        if not (0 < self.recapture_same < 1 and 0 < self.recapture_cross < 1):
            raise ConfigurationError("recapture factors must lie in (0, 1)")
        if not 0 <= self.fresnel_reflectance < 1:
            raise ConfigurationError("fresnel_reflectance must lie in [0, 1)")
        if self.drift_rate < 0:
            raise ConfigurationError("drift_rate must be non-negative")
        if self.xt_sections < 1:
            raise ConfigurationError("xt_sections must be at least 1")
        return self

    def mg_index(self, mode_group: int) -> int:
        try:
            return self.mode_groups.index(mode_group)
        except ValueError:
            raise ConfigurationError(f"mode group {mode_group} not in profile") from None

    def atten(self, core: int, mode_group: int) -> float:
        """Attenuation in dB/km of one (core, MG)."""
        return self.atten_db_per_km[core - 1][self.mg_index(mode_group)]

    def mean_attenuation(self) -> float:
        values = [v for row in self.atten_db_per_km for v in row]
        return math.fsum(values) / len(values)

    def group_delay_ns(self, mode_group: int) -> float:
        """Accumulated inter-MG group delay of a MG relative to the lowest MG."""
        idx = self.mg_index(mode_group)
        return math.fsum(self.dgd_ns_per_km[:idx]) * self.length_km

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "FiberProfile":
        return cls(**_known(cls, data))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "FiberProfile":
        return cls.from_dict(json.loads(text))


def default_profile() -> FiberProfile:
    """Field-calibrated 5-km, 7-core profile.

    MG |l|=2 and 3 sit at 0.314 and 0.316 dB/km; |l|=4 is lossier, with an
    extra anomaly on core 1. The core/MG mean is 0.32 dB/km.
    """
    atten = []
    for core in range(1, 8):
        mg4 = 0.372 if core == 1 else 0.323
        atten.append([0.314, 0.316, mg4])
    return FiberProfile(atten_db_per_km=atten).validate()


def spool_profile() -> FiberProfile:
    """Laboratory-spool analogue: 0.02 dB/km below the field profile."""
    profile = default_profile()
    atten = [[round(v - 0.02, 6) for v in row] for row in profile.atten_db_per_km]
    return replace(profile, atten_db_per_km=atten).validate()


@dataclass(slots=True)
class BidirNoiseConfig:
    """Bidirectional launch powers and backscatter parameters."""

    p_forward_dbm: float = 8.0
    # keys "<core>:<signed charge><R|L>", e.g. "1:+3R"
    p_backward_dbm: dict[str, float] = field(default_factory=dict)
    alpha_db_per_km: float = 0.32
    alpha_scatter_db_per_km: float = 0.25
    length_km: float = 5.0
    mode_groups: list[int] = field(default_factory=lambda: [2, 3, 4])
    # [forward MG index][backward MG index]
    recapture: list[list[float]] = field(default_factory=list)
    fresnel_reflectance: float = 1e-3
    demux_mode_suppression_db: float = 12.0
    cmrr_db: Optional[float] = None

    def __post_init__(self) -> None:
        if not self.recapture:
            self.recapture = recapture_matrix(self.mode_groups, 1e-3, 5e-4)

    def validate(self) -> "BidirNoiseConfig":
        n = len(self.mode_groups)
        if len(self.recapture) != n or any(len(row) != n for row in self.recapture):
            raise ConfigurationError("recapture must be square over mode_groups")
        for m in range(n):
            for k in range(n):
                value = self.recapture[m][k]
                if not 0 < value < 1:
                    raise ConfigurationError("recapture factors must lie in (0, 1)")
                if k != m and self.recapture[m][m] < value:
                    raise ConfigurationError(
                        "same-mode recapture must not be below cross-mode recapture"
                    )
        if self.alpha_scatter_db_per_km > self.alpha_db_per_km:
            raise ConfigurationError("alpha_scatter must not exceed alpha")
        if self.alpha_db_per_km < 0 or self.alpha_scatter_db_per_km < 0:
            raise ConfigurationError("attenuation coefficients must be non-negative")
        if self.length_km < 0:
            raise ConfigurationError("length_km must be non-negative")
        powers = [self.p_forward_dbm, *self.p_backward_dbm.values()]
        if not all(math.isfinite(p) for p in powers):
            raise ConfigurationError("launch powers must be finite")
        for key in self.p_backward_dbm:
            parse_mode_key(key)
        if not 0 <= self.fresnel_reflectance < 1:
            raise ConfigurationError("fresnel_reflectance must lie in [0, 1)")
        return self

    def recapture_factor(self, forward_mg: int, backward_mg: int) -> float:
        return self.recapture[self.mode_groups.index(forward_mg)][
            self.mode_groups.index(backward_mg)
        ]

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "BidirNoiseConfig":
        return cls(**_known(cls, data))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "BidirNoiseConfig":
        return cls.from_dict(json.loads(text))


def recapture_matrix(mode_groups: list[int], same: float, cross: float) -> list[list[float]]:
    return [[same if m == n else cross for n in mode_groups] for m in mode_groups]


def noise_config_for(profile: FiberProfile, **overrides: Any) -> BidirNoiseConfig:
    """Noise config consistent with a fiber profile."""
    values = {
        "alpha_db_per_km": profile.mean_attenuation(),
        "alpha_scatter_db_per_km": profile.rayleigh_scatter_db_per_km,
        "length_km": profile.length_km,
        "mode_groups": list(profile.mode_groups),
        "recapture": recapture_matrix(
            profile.mode_groups, profile.recapture_same, profile.recapture_cross
        ),
        "fresnel_reflectance": profile.fresnel_reflectance,
    }
    values.update(overrides)
    return BidirNoiseConfig(**values).validate()


def mode_key(core: int, charge: int, polarization: str) -> str:
    return f"{core}:{charge:+d}{polarization}"


def parse_mode_key(key: str) -> tuple[int, int, str]:
    """Parse "<core>:<signed charge><R|L>" into (core, charge, polarization)."""
    try:
        core_text, rest = key.split(":")
        polarization = rest[-1]
        charge = int(rest[:-1])
        core = int(core_text)
    except (ValueError, IndexError):
        raise ConfigurationError(f"malformed backward mode key {key!r}") from None
    if polarization not in ("R", "L") or charge == 0:
        raise ConfigurationError(f"malformed backward mode key {key!r}")
    return core, charge, polarization


@dataclass(slots=True)
class LinkConfig:
    baud_hz: float = 12e9
    samples_per_symbol: int = 2
    roll_off: float = 0.01
    span_symbols: int = 128
    rx_filter_excess: float = 1.2
    osnr_db: Optional[float] = 18.0
    ref_bandwidth_hz: float = 12.5e9
    ase_polarization_share: float = 0.5
    mode_groups: list[int] = field(default_factory=lambda: [2, 3, 4])
    cores_under_test: list[int] = field(default_factory=lambda: [1])
    loaded_cores: list[int] = field(default_factory=lambda: [2])
    wavelengths: int = 1
    directions: list[str] = field(default_factory=lambda: ["forward", "backward"])
    drift_segments: int = 4
    inject_backscatter: bool = True

    @property
    def sample_rate_hz(self) -> float:
        return self.baud_hz * self.samples_per_symbol

    @property
    def simulated_cores(self) -> list[int]:
        return sorted(set(self.cores_under_test) | set(self.loaded_cores))

    def direction_enums(self) -> list[Direction]:
        return [Direction(d) for d in self.directions]


@dataclass(slots=True)
class DspConfig:
    taps: int = 15
    step_size: float = 1e-3
    rde_step_scale: float = 0.5
    detector_window: int = 2048
    dispersion_threshold: float = 0.1
    passes: int = 2
    divergence_limit: float = 1e3
    singularity_threshold: float = 0.9
    bps_phases: int = 32
    bps_window: int = 64
    foe_min_symbols: int = 1 << 14
    foe_max_offset_hz: Optional[float] = None


@dataclass(slots=True)
class FrontEndImpairments:
    """Receiver front-end impairments common to the four modes of a group."""

    freq_offset_hz: float = 150e6
    laser_linewidth_hz: float = 100e3
    timing_offset_samples: float = 0.37


@dataclass(slots=True)
class SweepConfig:
    forward_power_dbm: float = 8.0
    backward_powers_dbm: list[float] = field(
        default_factory=lambda: [-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0]
    )
    forward_mode_group: int = 3
    other_mode_group: int = 4
    sweep_symbols: int = 1 << 16
    tap_counts: list[int] = field(default_factory=lambda: [1, 3, 5, 7, 9, 11, 13, 15])
    drift_rates: list[float] = field(default_factory=lambda: [1.0])
    drift_windows: int = 8
    drift_window_symbols: int = 10_000
    drift_window_interval_s: float = 0.05
    drift_substeps: int = 4


@dataclass(slots=True)
class SeConfig:
    """Spectral-efficiency accounting parameters."""

    n_modes_per_direction: int = 84
    n_directions: int = 2
    bits_per_symbol: int = 3
    baud_hz: float = 12e9
    grid_hz: float = 12.5e9
    n_wavelengths: int = 40
    fec_overhead: float = 0.20

    def validate(self) -> "SeConfig":
        if min(self.n_modes_per_direction, self.n_directions, self.bits_per_symbol) < 1:
            raise ConfigurationError("mode, direction and bit counts must be positive")
        if self.n_wavelengths < 0:
            raise ConfigurationError("n_wavelengths must be non-negative")
        if self.baud_hz <= 0 or self.grid_hz <= 0:
            raise ConfigurationError("baud and grid must be positive")
        if not 0 <= self.fec_overhead < 1:
            raise ConfigurationError("fec_overhead must lie in [0, 1)")
        return self


@dataclass(slots=True)
class ComplexityVariant:
    """One system point of the SE versus MIMO-complexity table."""

    label: str
    mimo_size: int
    taps: int
    bits_per_symbol: int
    n_modes_per_direction: int
    n_directions: int = 2
    baud_hz: float = 12e9
    grid_hz: float = 12.5e9
    fec_overhead: float = 0.20


def default_variants() -> list[ComplexityVariant]:
    return [
        ComplexityVariant("ring-core OAM, 4x4 per MG", 4, 15, 3, 84),
        ComplexityVariant("single-mode 22-core analogue, 1x1", 1, 15, 3, 44),
        ComplexityVariant("strongly coupled few-mode analogue, 12x12", 12, 15, 3, 12),
    ]


@dataclass(slots=True)
class ExperimentConfig:
    experiment: str
    seed: int
    symbols: int = 200_000
    output_dir: str = "results"
    parallel: int = 1
    acceptance: bool = True
    profile: FiberProfile = field(default_factory=default_profile)
    noise: BidirNoiseConfig = field(default_factory=BidirNoiseConfig)
    link: LinkConfig = field(default_factory=LinkConfig)
    dsp: DspConfig = field(default_factory=DspConfig)
    front_end: FrontEndImpairments = field(default_factory=FrontEndImpairments)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    se: SeConfig = field(default_factory=SeConfig)
    variants: list[ComplexityVariant] = field(default_factory=default_variants)

    def validate(self) -> "ExperimentConfig":
        if self.experiment not in EXPERIMENTS:
            raise ConfigurationError(f"unknown experiment {self.experiment!r}")
        if self.seed < 0:
            raise ConfigurationError("seed must be a non-negative integer")
        if self.symbols < 4096:
            raise ConfigurationError("symbols must be at least 4096")
        self.profile.validate()
        self.noise.validate()
        self.se.validate()
        if not set(self.link.mode_groups) <= set(self.profile.mode_groups):
            raise ConfigurationError("link mode groups must be part of the profile")
        for core in self.link.simulated_cores:
            if not 1 <= core <= self.profile.cores:
                raise ConfigurationError(f"core {core} outside the profile")
        if self.dsp.taps % 2 == 0 or not 1 <= self.dsp.taps <= 31:
            raise ConfigurationError("equalizer taps must be odd and in 1..31")
        if any(n % 2 == 0 or not 1 <= n <= 31 for n in self.sweep.tap_counts):
            raise ConfigurationError("tap counts must be odd and in 1..31")
        if self.link.samples_per_symbol != 2:
            raise ConfigurationError("the digital chain runs at 2 samples per symbol")
        if self.link.span_symbols % 2:
            raise ConfigurationError("span_symbols must be even")
        return self

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ExperimentConfig":
        values = dict(data)
        nested = {
            "profile": FiberProfile.from_dict,
            "noise": BidirNoiseConfig.from_dict,
            "link": lambda d: LinkConfig(**_known(LinkConfig, d)),
            "dsp": lambda d: DspConfig(**_known(DspConfig, d)),
            "front_end": lambda d: FrontEndImpairments(**_known(FrontEndImpairments, d)),
            "sweep": lambda d: SweepConfig(**_known(SweepConfig, d)),
            "se": lambda d: SeConfig(**_known(SeConfig, d)),
        }
        for key, build in nested.items():
            if key in values:
                values[key] = build(values[key])
        if "variants" in values:
            values["variants"] = [
                ComplexityVariant(**_known(ComplexityVariant, v)) for v in values["variants"]
            ]
        if "noise" not in values and "profile" in values:
            values["noise"] = noise_config_for(values["profile"])
        return cls(**_known(cls, values))


def default_config(experiment: str, seed: int = 0, **overrides: Any) -> ExperimentConfig:
    """Desk-scale defaults for one experiment."""
    profile = default_profile()
    cfg = ExperimentConfig(
        experiment=experiment,
        seed=seed,
        profile=profile,
        noise=noise_config_for(profile),
    )
    for key, value in overrides.items():
        setattr(cfg, key, value)
    return cfg.validate()


def _known(cls: type, data: dict[str, Any]) -> dict[str, Any]:
    names = {f.name for f in fields(cls)}
    unknown = set(data) - names
    if unknown:
        raise ConfigurationError(f"unknown {cls.__name__} keys: {sorted(unknown)}")
    return dict(data)


_NUMBER = {"type": "number"}
_NULLABLE_NUMBER = {"type": ["number", "null"]}
_INT = {"type": "integer"}
_BOOL = {"type": "boolean"}


def _array(items: dict, min_items: int = 0) -> dict:
    return {"type": "array", "items": items, "minItems": min_items}


def _object(properties: dict, required: tuple[str, ...] = ()) -> dict:
    return {
        "type": "object",
        "properties": properties,
        "required": list(required),
        "additionalProperties": False,
    }


FIBER_PROFILE_SCHEMA = _object(
    {
        "length_km": {"type": "number", "exclusiveMinimum": 0},
        "cores": {"type": "integer", "minimum": 1, "maximum": 7},
        "mode_groups": _array({"type": "integer", "minimum": 2}, 1),
        "atten_db_per_km": _array(_array({"type": "number", "minimum": 0})),
        "dgd_ns_per_km": _array(_NUMBER),
        "intra_dmd_ps_per_km": _array({"type": "number", "minimum": 0}),
        "xt_intermg_db": _NULLABLE_NUMBER,
        "xt_intermg_falloff_db": {"type": "number", "minimum": 0},
        "xt_intercore_db": _NULLABLE_NUMBER,
        "rayleigh_scatter_db_per_km": {"type": "number", "minimum": 0},
        "recapture_same": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "recapture_cross": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "fresnel_reflectance": {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
        "mux_insertion_loss_db": _array(_NUMBER),
        "demux_insertion_loss_db": _array(_NUMBER),
        "intra_group_mixing": _BOOL,
        "drift_rate": {"type": "number", "minimum": 0},
        "reciprocal": _BOOL,
        "distributed_xt": _BOOL,
        "in_fiber_xt_db_per_km": _NUMBER,
        "xt_sections": {"type": "integer", "minimum": 1},
    }
)

BIDIR_NOISE_SCHEMA = _object(
    {
        "p_forward_dbm": _NUMBER,
        "p_backward_dbm": {
            "type": "object",
            "patternProperties": {r"^[1-7]:[+-][0-9]+[RL]$": _NUMBER},
            "additionalProperties": False,
        },
        "alpha_db_per_km": {"type": "number", "minimum": 0},
        "alpha_scatter_db_per_km": {"type": "number", "minimum": 0},
        "length_km": {"type": "number", "minimum": 0},
        "mode_groups": _array({"type": "integer", "minimum": 2}, 1),
        "recapture": _array(_array(_NUMBER)),
        "fresnel_reflectance": {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
        "demux_mode_suppression_db": {"type": "number", "minimum": 0},
        "cmrr_db": _NULLABLE_NUMBER,
    }
)

CONFIG_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "$id": "https://ringcore-sim.invalid/schema/experiment.json",
    "title": "ringcore-sim experiment configuration",
    **_object(
        {
            "experiment": {"enum": list(EXPERIMENTS)},
            "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
            "symbols": {"type": "integer", "minimum": 4096},
            "output_dir": {"type": "string"},
            "parallel": {"type": "integer", "minimum": 0},
            "acceptance": _BOOL,
            "profile": FIBER_PROFILE_SCHEMA,
            "noise": BIDIR_NOISE_SCHEMA,
            "link": _object(
                {
                    "baud_hz": {"type": "number", "exclusiveMinimum": 0},
                    "samples_per_symbol": {"const": 2},
                    "roll_off": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
                    "span_symbols": {"type": "integer", "minimum": 2},
                    "rx_filter_excess": {"type": "number", "minimum": 1},
                    "osnr_db": _NULLABLE_NUMBER,
                    "ref_bandwidth_hz": {"type": "number", "exclusiveMinimum": 0},
                    "ase_polarization_share": {
                        "type": "number",
                        "exclusiveMinimum": 0,
                        "maximum": 1,
                    },
                    "mode_groups": _array({"type": "integer", "minimum": 2}, 1),
                    "cores_under_test": _array({"type": "integer", "minimum": 1}, 1),
                    "loaded_cores": _array({"type": "integer", "minimum": 1}),
                    "wavelengths": {"type": "integer", "minimum": 1},
                    "directions": _array({"enum": ["forward", "backward"]}, 1),
                    "drift_segments": {"type": "integer", "minimum": 1},
                    "inject_backscatter": _BOOL,
                }
            ),
            "dsp": _object(
                {
                    "taps": {"type": "integer", "minimum": 1, "maximum": 31},
                    "step_size": {"type": "number", "exclusiveMinimum": 0},
                    "rde_step_scale": {"type": "number", "exclusiveMinimum": 0},
                    "detector_window": {"type": "integer", "minimum": 64},
                    "dispersion_threshold": {"type": "number", "exclusiveMinimum": 0},
                    "passes": {"type": "integer", "minimum": 1},
                    "divergence_limit": {"type": "number", "exclusiveMinimum": 0},
                    "singularity_threshold": {
                        "type": "number",
                        "exclusiveMinimum": 0,
                        "maximum": 1,
                    },
                    "bps_phases": {"type": "integer", "minimum": 4},
                    "bps_window": {"type": "integer", "minimum": 1},
                    "foe_min_symbols": {"type": "integer", "minimum": 256},
                    "foe_max_offset_hz": _NULLABLE_NUMBER,
                }
            ),
            "front_end": _object(
                {
                    "freq_offset_hz": _NUMBER,
                    "laser_linewidth_hz": {"type": "number", "minimum": 0},
                    "timing_offset_samples": _NUMBER,
                }
            ),
            "sweep": _object(
                {
                    "forward_power_dbm": _NUMBER,
                    "backward_powers_dbm": _array(_NUMBER, 1),
                    "forward_mode_group": {"type": "integer", "minimum": 2},
                    "other_mode_group": {"type": "integer", "minimum": 2},
                    "sweep_symbols": {"type": "integer", "minimum": 4096},
                    "tap_counts": _array({"type": "integer", "minimum": 1, "maximum": 31}, 1),
                    "drift_rates": _array({"type": "number", "minimum": 0}, 1),
                    "drift_windows": {"type": "integer", "minimum": 1},
                    "drift_window_symbols": {"type": "integer", "minimum": 4096},
                    "drift_window_interval_s": {"type": "number", "minimum": 0},
                    "drift_substeps": {"type": "integer", "minimum": 1},
                }
            ),
            "se": _object(
                {
                    "n_modes_per_direction": {"type": "integer", "minimum": 1},
                    "n_directions": {"type": "integer", "minimum": 1},
                    "bits_per_symbol": {"type": "integer", "minimum": 1},
                    "baud_hz": {"type": "number", "exclusiveMinimum": 0},
                    "grid_hz": {"type": "number", "exclusiveMinimum": 0},
                    "n_wavelengths": {"type": "integer", "minimum": 0},
                    "fec_overhead": {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
                }
            ),
            "variants": _array(
                _object(
                    {
                        "label": {"type": "string"},
                        "mimo_size": {"type": "integer", "minimum": 1},
                        "taps": {"type": "integer", "minimum": 1},
                        "bits_per_symbol": {"type": "integer", "minimum": 1},
                        "n_modes_per_direction": {"type": "integer", "minimum": 1},
                        "n_directions": {"type": "integer", "minimum": 1},
                        "baud_hz": {"type": "number", "exclusiveMinimum": 0},
                        "grid_hz": {"type": "number", "exclusiveMinimum": 0},
                        "fec_overhead": {"type": "number", "minimum": 0},
                    },
                    required=("label", "mimo_size", "taps", "bits_per_symbol", "n_modes_per_direction"),
                )
            ),
        },
        required=("experiment", "seed"),
    ),
}


def validate_document(document: dict[str, Any]) -> None:
    """Validate a raw config document against CONFIG_SCHEMA."""
    validator = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(document), key=lambda e: list(e.path))
    if errors:
        first = errors[0]
        location = "/".join(str(p) for p in first.path) or "<root>"
        raise ConfigurationError(f"config invalid at {location}: {first.message}")


def load_config(path: Path | str, **overrides: Any) -> ExperimentConfig:
    """Load, schema-check and semantically validate an experiment config."""
    path = Path(path)
    try:
        document = json.loads(path.read_text())
    except FileNotFoundError:
        raise ConfigurationError(f"config file not found: {path}") from None
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"config is not valid JSON: {e}") from None
    if not isinstance(document, dict):
        raise ConfigurationError("config document must be a JSON object")
    document.update({k: v for k, v in overrides.items() if v is not None})
    validate_document(document)
    cfg = ExperimentConfig.from_dict(document).validate()
    logger.debug("Loaded %s config from %s", cfg.experiment, path)
    return cfg


# Execution settings that never change results
_UNHASHED = ("output_dir", "parallel")


def config_hash(cfg: ExperimentConfig) -> str:
    """sha256 of the canonical JSON of the result-relevant config."""
    document = cfg.to_dict()
    for key in _UNHASHED:
        document.pop(key, None)
    canonical = json.dumps(document, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()
