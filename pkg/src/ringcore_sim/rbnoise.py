"""Rayleigh backscattering and Fresnel reflection from counter-propagating signals.

The forward receiver of (core, MG m) collects light scattered out of every
backward-travelling mode n of the same core. With natural-unit attenuation
alpha and scattering coefficient alpha_s the recaptured power is

    P_RB(m) = sum_n P_B(n) * alpha_s * B[m][n] * (1 - exp(-2 alpha L)) / (2 alpha)

A single far-facet Fresnel reflection adds ``P_B * R * exp(-2 alpha L)``,
suppressed further by the DEMUX when the reflected mode differs from the
forward one. Balanced detection removes the local-oscillator power from the
signal/RB ratio; with finite CMRR a direct-beat leak ``P_RB / cmrr`` remains.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.constants
import scipy.integrate

from .config import BidirNoiseConfig, parse_mode_key
from .constants import FIBER_GROUP_INDEX, MODES_PER_GROUP, Direction, Polarization
from .envelope import ComplexEnvelope, ModeId
from .fiberchan import ChannelState, propagate

logger = logging.getLogger(__name__)

DB_PER_NEPER_POWER = 10 / math.log(10)
RB_SLICES = 512


def db_per_km_to_natural(alpha_db_per_km: float) -> float:
    """Power attenuation coefficient in 1/km."""
    return alpha_db_per_km / DB_PER_NEPER_POWER


def dbm_to_watts(dbm: float) -> float:
    return 1e-3 * 10 ** (dbm / 10)


def watts_to_dbm(watts: float) -> float:
    if watts <= 0:
        return -math.inf
    return 10 * math.log10(watts / 1e-3)


def glass_air_reflectance(refractive_index: float = 1.444) -> float:
    """Normal-incidence Fresnel reflectance of a bare glass-air facet."""
    return ((refractive_index - 1) / (refractive_index + 1)) ** 2


def scatter_length_km(cfg: BidirNoiseConfig) -> float:
    """Effective backscatter length (1 - e^(-2 alpha L)) / (2 alpha) in km."""
    alpha = db_per_km_to_natural(cfg.alpha_db_per_km)
    if alpha == 0:
        return cfg.length_km
    return -math.expm1(-2 * alpha * cfg.length_km) / (2 * alpha)


def scatter_length_numeric_km(cfg: BidirNoiseConfig) -> float:
    """Same length by direct quadrature of exp(-2 alpha (L - z)) over the fiber."""
    alpha = db_per_km_to_natural(cfg.alpha_db_per_km)
    value, _ = scipy.integrate.quad(
        lambda z: math.exp(-2 * alpha * (cfg.length_km - z)),
        0.0,
        cfg.length_km,
        epsabs=0.0,
        epsrel=1e-13,
    )
    return value


def rb_power_single(
    p_backward_w: float, cfg: BidirNoiseConfig, forward_mg: int, backward_mg: int
) -> float:
    """RB power (W) recaptured by a forward MG from one backward mode."""
    if p_backward_w < 0:
        raise ValueError("backward power must be non-negative")
    alpha_s = db_per_km_to_natural(cfg.alpha_scatter_db_per_km)
    return p_backward_w * alpha_s * cfg.recapture_factor(forward_mg, backward_mg) * scatter_length_km(cfg)


@dataclass(slots=True)
class RbPower:
    """Total RB power at one forward receiver with per-backward-mode terms."""

    total_w: float
    contributions: dict[str, float] = field(default_factory=dict)


def _backward_in_core(cfg: BidirNoiseConfig, core: int) -> list[tuple[str, int, float]]:
    modes = []
    for key, dbm in sorted(cfg.p_backward_dbm.items()):
        b_core, charge, _ = parse_mode_key(key)
        if b_core == core and abs(charge) in cfg.mode_groups:
            modes.append((key, abs(charge), dbm_to_watts(dbm)))
    return modes


def rb_power(cfg: BidirNoiseConfig, core: int, forward_mg: int) -> RbPower:
    """RB power at the forward receiver of (core, MG) from all backward modes of that core."""
    contributions = {
        key: rb_power_single(watts, cfg, forward_mg, backward_mg)
        for key, backward_mg, watts in _backward_in_core(cfg, core)
    }
    return RbPower(total_w=math.fsum(contributions.values()), contributions=contributions)


def fresnel_power(p_backward_w: float, cfg: BidirNoiseConfig, same_mode: bool) -> float:
    """Far-facet Fresnel reflection (W) of one backward mode reaching the forward receiver."""
    alpha = db_per_km_to_natural(cfg.alpha_db_per_km)
    reflected = p_backward_w * cfg.fresnel_reflectance * math.exp(-2 * alpha * cfg.length_km)
    if not same_mode:
        reflected *= 10 ** (-cfg.demux_mode_suppression_db / 10)
    return reflected


def fresnel_total(cfg: BidirNoiseConfig, core: int, forward_mg: int) -> float:
    return math.fsum(
        fresnel_power(watts, cfg, same_mode=backward_mg == forward_mg)
        for _, backward_mg, watts in _backward_in_core(cfg, core)
    )


def received_signal_w(cfg: BidirNoiseConfig) -> float:
    alpha = db_per_km_to_natural(cfg.alpha_db_per_km)
    return dbm_to_watts(cfg.p_forward_dbm) * math.exp(-alpha * cfg.length_km)


@dataclass(slots=True)
class DetectedRatio:
    """Detected signal over RB noise after balanced coherent detection."""

    ratio_db: float
    signal_w: float
    rb_w: float
    contributions: dict[str, float] = field(default_factory=dict)

    @property
    def is_unbounded(self) -> bool:
        return math.isinf(self.ratio_db)


def cmrr_factor(cmrr_db: Optional[float]) -> float:
    return 1.0 if cmrr_db is None else 1.0 + 10 ** (-cmrr_db / 10)


def detected_ratio(
    cfg: BidirNoiseConfig, core: int = 1, forward_mg: int = 3, cmrr_db: Optional[float] = None
) -> DetectedRatio:
    """Ratio <I_S-lo>^2 / <I_RB-lo>^2 in dB; ``+inf`` without backward power.

    ``cmrr_db`` overrides the config's common-mode rejection (None = ideal).
    """
    rb = rb_power(cfg, core, forward_mg)
    signal = received_signal_w(cfg)
    cmrr = cfg.cmrr_db if cmrr_db is None else cmrr_db
    noise = rb.total_w * cmrr_factor(cmrr)
    ratio = math.inf if noise == 0 else 10 * math.log10(signal / noise)
    return DetectedRatio(ratio_db=ratio, signal_w=signal, rb_w=noise, contributions=rb.contributions)


def rb_as_noise_field(
    p_rb: float,
    template: ComplexEnvelope,
    seed_stream: "int | np.random.Generator | np.random.SeedSequence" = 0,
) -> ComplexEnvelope:
    """Circular complex Gaussian field with mean power ``p_rb``, shaped like ``template``."""
    if p_rb < 0:
        raise ValueError("p_rb must be non-negative")
    n = len(template)
    if p_rb == 0:
        return template.with_samples(np.zeros(n, dtype=np.complex128))
    rng = seed_stream if isinstance(seed_stream, np.random.Generator) else np.random.default_rng(seed_stream)
    field_samples = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) * math.sqrt(p_rb / 2)
    return template.with_samples(field_samples)


def backward_mode(key: str) -> ModeId:
    """Backward-travelling mode named by a ``"<core>:<charge><R|L>"`` key."""
    core, charge, polarization = parse_mode_key(key)
    return ModeId(core, charge, Polarization(polarization), Direction.BACKWARD)


def slice_profile(cfg: BidirNoiseConfig, slices: int = RB_SLICES) -> tuple[np.ndarray, np.ndarray]:
    """Round-trip delay (s) and attenuation-weighted length (km) of each fiber slice.

    Slice weights integrate exp(-2 alpha d) over the slice, so they sum to
    the effective backscatter length.
    """
    if slices < 1:
        raise ValueError("at least one slice is required")
    edges = np.linspace(0.0, cfg.length_km, slices + 1)
    alpha = db_per_km_to_natural(cfg.alpha_db_per_km)
    if alpha == 0:
        weights = np.diff(edges)
    else:
        weights = -np.diff(np.exp(-2 * alpha * edges)) / (2 * alpha)
    centers_m = 0.5 * (edges[:-1] + edges[1:]) * 1e3
    delays = 2 * centers_m * FIBER_GROUP_INDEX / scipy.constants.c
    return delays, weights


def rb_field(
    backward: ComplexEnvelope,
    p_backward_w: float,
    cfg: BidirNoiseConfig,
    forward_mg: int,
    backward_mg: int,
    seed_stream: "int | np.random.Generator | np.random.SeedSequence" = 0,
    n_outputs: int = MODES_PER_GROUP,
    slices: int = RB_SLICES,
) -> np.ndarray:
    """Backscattered field (sqrt(W)) at the forward receivers of one group.

    The fiber is cut into ``slices`` reflectors. Each returns the backward
    waveform, normalized to unit power and delayed by the slice's round
    trip, with an independent circular Gaussian gain per receiver whose
    variance is the slice's share of the recaptured power. Delays wrap
    around the block. Returns shape (n_outputs, n).
    """
    if p_backward_w < 0:
        raise ValueError("backward power must be non-negative")
    n = len(backward)
    if p_backward_w == 0 or backward.power == 0:
        return np.zeros((n_outputs, n), dtype=np.complex128)
    rng = seed_stream if isinstance(seed_stream, np.random.Generator) else np.random.default_rng(seed_stream)
    delays, weights = slice_profile(cfg, slices)
    alpha_s = db_per_km_to_natural(cfg.alpha_scatter_db_per_km)
    variance = p_backward_w * alpha_s * cfg.recapture_factor(forward_mg, backward_mg) * weights
    gains = (rng.standard_normal((n_outputs, slices)) + 1j * rng.standard_normal((n_outputs, slices))) * np.sqrt(
        variance / 2
    )
    offsets = np.round(delays * backward.sample_rate_hz).astype(np.int64) % n
    response = np.zeros((n_outputs, n), dtype=np.complex128)
    for row in range(n_outputs):
        np.add.at(response[row], offsets, gains[row])
    shape = np.fft.fft(backward.samples / math.sqrt(backward.power))
    return np.fft.ifft(np.fft.fft(response, axis=1) * shape[None, :], axis=1)


def facet_reflection(
    channel: ChannelState, backward_inputs: dict[ModeId, ComplexEnvelope]
) -> dict[ModeId, ComplexEnvelope]:
    """Backward fields reflected at the far facet and carried back by the forward link.

    Each backward mode re-enters the fiber as the forward mode with the
    same core, charge and polarization. No reflectance is applied; the
    result only holds the lit groups.
    """
    at_facet = propagate(channel, backward_inputs, Direction.BACKWARD)
    lit = {(m.core, m.mode_group) for m in backward_inputs}
    reflected = {
        ModeId(mode.core, mode.charge, mode.polarization, Direction.FORWARD): env
        for mode, env in at_facet.items()
        if (mode.core, mode.mode_group) in lit
    }
    returned = propagate(channel, reflected, Direction.FORWARD)
    return {mode: env for mode, env in returned.items() if (mode.core, mode.mode_group) in lit}


def fresnel_field(reflected: np.ndarray, p_backward_w: float, cfg: BidirNoiseConfig, same_mode: bool) -> np.ndarray:
    """Scale a round-trip reflected waveform (rows = receivers) to the Fresnel power in sqrt(W)."""
    reflected = np.atleast_2d(reflected)
    shape_power = float(np.mean(np.abs(reflected) ** 2))
    if shape_power == 0:
        return np.zeros_like(reflected, dtype=np.complex128)
    return reflected * math.sqrt(fresnel_power(p_backward_w, cfg, same_mode) / shape_power)


def backscatter_to_signal(
    cfg: BidirNoiseConfig, core: int, forward_mg: int, include_fresnel: bool = True
) -> float:
    """Linear (RB + Fresnel) power relative to the received forward signal."""
    ratio = detected_ratio(cfg, core, forward_mg)
    noise = ratio.rb_w
    if include_fresnel:
        noise += fresnel_total(cfg, core, forward_mg)
    return noise / ratio.signal_w


@dataclass(slots=True)
class NoiseBudget:
    signal_w: float
    rb_w: float
    fresnel_w: float
    ase_w: float

    @property
    def total_noise_w(self) -> float:
        return self.rb_w + self.fresnel_w + self.ase_w

    @property
    def snr_db(self) -> float:
        if self.total_noise_w == 0:
            return math.inf
        return 10 * math.log10(self.signal_w / self.total_noise_w)

    def to_dict(self) -> dict[str, float]:
        return {
            "signal_dbm": watts_to_dbm(self.signal_w),
            "rb_dbm": watts_to_dbm(self.rb_w),
            "fresnel_dbm": watts_to_dbm(self.fresnel_w),
            "ase_dbm": watts_to_dbm(self.ase_w),
            "snr_db": self.snr_db,
        }


def backward_noise_budget(
    cfg: BidirNoiseConfig,
    core: int,
    forward_mg: int,
    osnr_db: Optional[float] = None,
    polarization_share: float = 0.5,
) -> NoiseBudget:
    """RB, Fresnel and ASE contributions at one forward receiver.

    ASE is referred to the signal bandwidth with the same polarization
    share the link simulation uses.
    """
    ratio = detected_ratio(cfg, core, forward_mg)
    ase = 0.0
    if osnr_db is not None and math.isfinite(osnr_db):
        ase = ratio.signal_w * polarization_share / 10 ** (osnr_db / 10)
    budget = NoiseBudget(
        signal_w=ratio.signal_w,
        rb_w=ratio.rb_w,
        fresnel_w=fresnel_total(cfg, core, forward_mg),
        ase_w=ase,
    )
    logger.debug("Noise budget core %d MG %d: %s", core, forward_mg, budget.to_dict())
    return budget
