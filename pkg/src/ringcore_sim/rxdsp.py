"""Blind coherent receiver for one 4-mode group.

Chain: front-end impairments (test input only), coarse frequency range
check, receive filter, timing recovery, 4x4 MIMO CMA/RDE equalizer at T/2,
fourth-power frequency-offset estimation, blind phase search,
minimum-distance decisions. Nothing here looks at transmitted data; the
report's convergence flag comes from the statistics of the outputs.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.linalg
import scipy.ndimage
from numpy.lib.stride_tricks import sliding_window_view

from .config import DspConfig, FrontEndImpairments
from .constants import MODES_PER_GROUP, EqualizerStage
from .envelope import ComplexEnvelope, check_compatible
from .errors import AdaptationError, EstimationError, RangeError
from .txgen import STAR_8QAM, QamSymbolMap

logger = logging.getLogger(__name__)

MIN_TIMING_SAMPLES = 4096
DIVERGENCE_CHECK_INTERVAL = 64
SINGULARITY_CHECK_INTERVAL = 256
# symbol-rate Nyquist band in cycles per sample at 2 samples per symbol
IN_BAND_CYCLES = 0.25


def _rng(seed_stream) -> np.random.Generator:
    if isinstance(seed_stream, np.random.Generator):
        return seed_stream
    return np.random.default_rng(seed_stream)


def fractional_delay(samples: np.ndarray, delay_samples: float) -> np.ndarray:
    """Band-limited circular delay by a (possibly fractional) number of samples."""
    if delay_samples == 0:
        return np.array(samples, dtype=np.complex128, copy=True)
    freqs = np.fft.fftfreq(samples.shape[-1])
    return np.fft.ifft(np.fft.fft(samples, axis=-1) * np.exp(-2j * np.pi * freqs * delay_samples), axis=-1)


def wiener_phase(n: int, linewidth_hz: float, sample_rate_hz: float, rng: np.random.Generator) -> np.ndarray:
    """Laser phase walk with Gaussian increments of variance 2 pi linewidth / fs."""
    if linewidth_hz == 0:
        return np.zeros(n)
    sigma = math.sqrt(2 * math.pi * linewidth_hz / sample_rate_hz)
    return np.cumsum(rng.standard_normal(n) * sigma)


def apply_front_end(
    signals: Sequence[ComplexEnvelope],
    imp: FrontEndImpairments,
    seed_stream: "int | np.random.Generator | np.random.SeedSequence" = 0,
) -> list[ComplexEnvelope]:
    """Common timing offset, frequency offset and laser phase noise for one group."""
    n, fs, _ = check_compatible(signals)
    if not math.isclose(signals[0].samples_per_symbol, 2.0):
        raise EstimationError("front end expects 2 samples per symbol")
    rng = _rng(seed_stream)
    phase = 2 * np.pi * imp.freq_offset_hz * np.arange(n) / fs + wiener_phase(
        n, imp.laser_linewidth_hz, fs, rng
    )
    rotation = np.exp(1j * phase) if np.any(phase) else None
    out = []
    for env in signals:
        samples = fractional_delay(env.samples, imp.timing_offset_samples)
        if rotation is not None:
            samples = samples * rotation
        out.append(env.with_samples(samples))
    return out


def receive_filter(signal: ComplexEnvelope, roll_off: float, excess: float = 1.2) -> ComplexEnvelope:
    """Zero-phase brickwall low-pass at ``excess * (1 + roll_off) * baud / 2``."""
    cutoff = excess * (1 + roll_off) * signal.symbol_rate_hz / 2
    freqs = np.fft.fftfreq(len(signal), d=1.0 / signal.sample_rate_hz)
    spectrum = np.fft.fft(signal.samples)
    spectrum[np.abs(freqs) > cutoff] = 0
    return signal.with_samples(np.fft.ifft(spectrum))


def estimate_timing(signals: Sequence[ComplexEnvelope]) -> float:
    """Symbol-phase offset in symbols, in (-0.5, 0.5].

    Evaluates the baud-rate spectral line of |x|^2 in the frequency domain,
    pairing X(f) with X(f - baud) over one baud-wide band and summing over
    the streams. The estimator is invariant to input scaling.
    """
    n, _, _ = check_compatible(signals)
    if n < MIN_TIMING_SAMPLES:
        raise EstimationError(f"timing recovery needs at least {MIN_TIMING_SAMPLES} samples, got {n}")
    if n % 2:
        raise EstimationError("timing recovery needs an even number of samples at 2 samples/symbol")
    half = n // 2
    line = 0j
    for env in signals:
        spectrum = np.fft.fft(env.samples)
        line += np.vdot(spectrum[half:], spectrum[:half])
    if line == 0:
        raise EstimationError("no timing line in the received signal")
    return -float(np.angle(line)) / (2 * np.pi)


def timing_recovery(signals: Sequence[ComplexEnvelope]) -> tuple[list[ComplexEnvelope], float]:
    """Estimate the common symbol-phase offset and remove it."""
    tau = estimate_timing(signals)
    sps = signals[0].samples_per_symbol
    corrected = [
        env.with_samples(
            fractional_delay(env.samples, -tau * sps),
            metadata={**env.metadata, "timing_symbols": tau},
        )
        for env in signals
    ]
    logger.debug("Timing offset %.4f symbols", tau)
    return corrected, tau


def cma_floor(qam_map: QamSymbolMap = STAR_8QAM) -> float:
    """Noiseless CMA cost E[(R^2 - |a|^2)^2] of the alphabet."""
    power = np.abs(qam_map.points) ** 2
    return float(np.mean((qam_map.cma_radius_sq - power) ** 2))


@dataclass(slots=True)
class MimoEqualizerState:
    """Tap matrix (out, in, tap) of a half-symbol-spaced MIMO FIR equalizer."""

    taps: np.ndarray
    step_size: float = 1e-3
    moduli: tuple[float, ...] = ()
    stage: EqualizerStage = EqualizerStage.CMA

    @property
    def n_taps(self) -> int:
        return self.taps.shape[2]

    @property
    def tap_energy(self) -> float:
        return float(np.sum(np.abs(self.taps) ** 2))

    @classmethod
    def center_spike(
        cls,
        n_taps: int,
        step_size: float = 1e-3,
        size: int = MODES_PER_GROUP,
        qam_map: QamSymbolMap = STAR_8QAM,
    ) -> "MimoEqualizerState":
        if n_taps < 1 or n_taps % 2 == 0:
            raise ValueError("tap count must be odd and positive")
        taps = np.zeros((size, size, n_taps), dtype=np.complex128)
        taps[np.arange(size), np.arange(size), n_taps // 2] = 1.0
        return cls(taps=taps, step_size=step_size, moduli=(qam_map.cma_radius_sq,))

    def copy(self) -> "MimoEqualizerState":
        return MimoEqualizerState(self.taps.copy(), self.step_size, self.moduli, self.stage)

    def to_json(self) -> list:
        """Taps as nested [re, im] pairs, shape (out, in, tap, 2)."""
        return np.stack([self.taps.real, self.taps.imag], axis=-1).tolist()


@dataclass(slots=True)
class EqualizerReport:
    converged: bool = False
    switch_symbol: Optional[int] = None
    reinitialized: list[int] = field(default_factory=list)
    tap_energy: float = 0.0
    cost_trace: np.ndarray = field(default_factory=lambda: np.zeros(0))


def equalizer_windows(x: np.ndarray, n_taps: int) -> np.ndarray:
    """(streams, symbols, taps) view of circularly padded T/2 input, one window per symbol."""
    half = n_taps // 2
    padded = np.pad(x, ((0, 0), (half, half)), mode="wrap")
    return sliding_window_view(padded, n_taps, axis=1)[:, ::2, :]


@dataclass(slots=True)
class MultiplicationCounter:
    complex_multiplications: int = 0

    def add(self, count: int) -> None:
        self.complex_multiplications += count


def apply_taps(
    taps: np.ndarray, x: np.ndarray, counter: Optional[MultiplicationCounter] = None
) -> np.ndarray:
    """Steady-state filtering with fixed taps; (in streams, 2n) -> (out streams, n)."""
    n_out, n_in, n_taps = taps.shape
    windows = equalizer_windows(x, n_taps)
    flat = taps.reshape(n_out, n_in * n_taps)
    out = np.empty((n_out, windows.shape[1]), dtype=np.complex128)
    for k in range(windows.shape[1]):
        out[:, k] = flat @ windows[:, k, :].reshape(-1)
        if counter is not None:
            counter.add(flat.size)
    return out


def _duplicate_outputs(y: np.ndarray, threshold: float) -> list[int]:
    centered = y - y.mean(axis=1, keepdims=True)
    norms = np.linalg.norm(centered, axis=1)
    norms[norms == 0] = 1.0
    corr = np.abs(centered @ centered.conj().T) / np.outer(norms, norms)
    duplicates = []
    for i in range(y.shape[0]):
        for j in range(i + 1, y.shape[0]):
            if corr[i, j] > threshold and j not in duplicates:
                duplicates.append(j)
    return duplicates


def _reinitialize(taps: np.ndarray, output: int) -> None:
    """Point a duplicate output at the subspace the other outputs do not cover."""
    center = taps.shape[2] // 2
    others = np.delete(taps[:, :, center], output, axis=0)
    basis = scipy.linalg.null_space(others)
    taps[output] = 0
    if basis.shape[1]:
        taps[output, :, center] = basis[:, 0].conj()
    else:
        taps[output, output, center] = 1.0


def orthogonalize_in_band(taps: np.ndarray) -> np.ndarray:
    """Nearest scaled-unitary response at every in-band DFT bin of the taps.

    The length-N DFT of an N-tap filter samples its frequency response
    exactly, so each in-band bin is replaced by the unitary factor of its
    polar decomposition times the bin's mean gain. Outputs of an
    orthogonal response cannot lock onto the same source. Bins outside the
    symbol-rate Nyquist band carry no signal and are left alone.
    """
    n_taps = taps.shape[2]
    spectrum = np.fft.fft(taps, axis=2)
    for b in np.flatnonzero(np.abs(np.fft.fftfreq(n_taps)) <= IN_BAND_CYCLES):
        unitary, positive = scipy.linalg.polar(spectrum[:, :, b])
        spectrum[:, :, b] = unitary * (np.trace(positive).real / positive.shape[0])
    return np.fft.ifft(spectrum, axis=2)


def mimo_equalize(
    signals: "Sequence[ComplexEnvelope] | np.ndarray",
    state: MimoEqualizerState,
    dsp: Optional[DspConfig] = None,
    qam_map: QamSymbolMap = STAR_8QAM,
    passes: Optional[int] = None,
) -> tuple[np.ndarray, MimoEqualizerState, EqualizerReport]:
    """Adapt the equalizer over the block and return 1-sample/symbol outputs.

    Acquisition runs CMA with modulus R^2 while the in-band tap response is
    held orthogonal. Once the windowed excess dispersion falls below the
    threshold with no duplicated outputs, updates become radius-directed
    with the step scaled by ``rde_step_scale``; a block that never gets
    there stays in CMA. Outputs are checked for duplicates during
    adaptation; a duplicate is re-initialized and acquisition restarts.
    Outputs come from the last pass.
    """
    dsp = dsp or DspConfig()
    if state.n_taps > 31 or state.n_taps % 2 == 0:
        raise ValueError("tap count must be odd and at most 31")
    x = np.asarray(signals) if isinstance(signals, np.ndarray) else np.stack([s.samples for s in signals])
    scale = math.sqrt(np.mean(np.abs(x) ** 2))
    if scale == 0:
        raise AdaptationError("equalizer input is all-zero", {"tap_energy": state.tap_energy})
    x = x / scale

    state = state.copy()
    taps = state.taps
    n_out, n_in, n_taps = taps.shape
    flat = taps.reshape(n_out, n_in * n_taps)
    windows = equalizer_windows(x, n_taps)
    n_symbols = windows.shape[1]
    r2 = qam_map.cma_radius_sq
    inner, outer = qam_map.radii
    rings = (inner**2, outer**2)
    threshold_sq = qam_map.ring_threshold_sq
    floor = cma_floor(qam_map)
    window = min(dsp.detector_window, n_symbols)
    mu = state.step_size if state.stage is EqualizerStage.CMA else state.step_size * dsp.rde_step_scale

    report = EqualizerReport()
    out = np.empty((n_out, n_symbols), dtype=np.complex128)
    costs = np.empty(n_symbols)
    total_passes = passes if passes is not None else dsp.passes
    for pass_index in range(total_passes):
        # first output index of this pass not preceded by a re-initialization
        settled = 0
        for k in range(n_symbols):
            xk = windows[:, k, :].reshape(-1)
            y = flat @ xk
            power = (y * y.conj()).real
            costs[k] = float(np.mean((r2 - power) ** 2))
            if state.stage is EqualizerStage.CMA:
                err = y * (r2 - power)
            else:
                target = np.where(power < threshold_sq, rings[0], rings[1])
                err = y * (target - power)
            flat += mu * np.outer(err, xk.conj())
            out[:, k] = y
            done = k + 1
            if done % DIVERGENCE_CHECK_INTERVAL == 0:
                energy = float(np.sum(np.abs(flat) ** 2))
                if not math.isfinite(energy) or energy >= dsp.divergence_limit:
                    raise AdaptationError(
                        f"equalizer diverged at symbol {k} (tap energy {energy:.3g})",
                        {"symbol": k, "pass": pass_index, "stage": state.stage.value, "tap_energy": energy},
                    )
                if state.stage is EqualizerStage.CMA:
                    taps[...] = orthogonalize_in_band(taps)
            if done % SINGULARITY_CHECK_INTERVAL == 0 and done - settled >= window:
                duplicates = _duplicate_outputs(out[:, done - window : done], dsp.singularity_threshold)
                if duplicates:
                    for output in duplicates:
                        logger.warning("Equalizer output %d duplicates another source, re-initializing", output)
                        _reinitialize(taps, output)
                        report.reinitialized.append(output)
                    taps[...] = orthogonalize_in_band(taps)
                    state.stage = EqualizerStage.CMA
                    mu = state.step_size
                    settled = done
                    continue
            if (
                state.stage is EqualizerStage.CMA
                and done % window == 0
                and done - settled >= window
                and (costs[done - window : done].mean() - floor) / floor < dsp.dispersion_threshold
            ):
                state.stage = EqualizerStage.RDE
                mu = state.step_size * dsp.rde_step_scale
                report.switch_symbol = pass_index * n_symbols + done
                logger.debug("Equalizer switched to RDE at symbol %d", report.switch_symbol)
        if pass_index == 0:
            report.cost_trace = costs.copy()

    if state.stage is EqualizerStage.CMA:
        logger.info("Dispersion detector did not fire; equalizer left in CMA")
    state.taps = taps.copy()
    state.moduli = rings if state.stage is EqualizerStage.RDE else (r2,)
    report.converged = state.stage is EqualizerStage.RDE and not _duplicate_outputs(
        out[:, -window:], dsp.singularity_threshold
    )
    report.tap_energy = state.tap_energy
    return out, state, report


def coarse_freq_offset(signals: Sequence[ComplexEnvelope]) -> float:
    """Spectral-centroid offset estimate (Hz) from the oversampled group signals.

    At 2 samples per symbol the shifted signal band stays inside the
    sampled band, so this estimate has no baud/4 ambiguity.
    """
    _, fs, _ = check_compatible(signals)
    psd = sum(np.abs(np.fft.fft(env.samples)) ** 2 for env in signals)
    total = float(np.sum(psd))
    if total == 0:
        raise EstimationError("no signal power for coarse frequency estimation")
    freqs = np.fft.fftfreq(len(signals[0]), d=1.0 / fs)
    return float(np.sum(freqs * psd) / total)


def check_capture_range(offset_hz: float, symbol_rate_hz: float) -> None:
    """Raise RangeError for an offset the fourth-power estimator would alias."""
    limit = symbol_rate_hz / 8
    if abs(offset_hz) > limit:
        raise RangeError(
            f"frequency offset near {offset_hz / 1e6:.0f} MHz is beyond the unambiguous {limit / 1e6:.0f} MHz"
        )


def freq_offset_estimate(
    symbols: np.ndarray,
    symbol_rate_hz: float,
    min_symbols: int = 1 << 14,
    max_offset_hz: Optional[float] = None,
    coarse_offset_hz: Optional[float] = None,
) -> float:
    """Fourth-power spectral peak estimate of the carrier frequency offset (Hz).

    ``symbols`` may hold several streams (rows); their fourth-power spectra
    are summed. At one sample per symbol an offset and the same offset
    shifted by baud/4 give identical fourth powers for a 90 degree
    symmetric alphabet, so the capture range is checked against
    ``coarse_offset_hz`` (see ``coarse_freq_offset``) when it is given.
    """
    y = np.atleast_2d(np.asarray(symbols, dtype=np.complex128))
    n = y.shape[1]
    if n < min_symbols:
        raise EstimationError(f"frequency offset estimation needs {min_symbols} symbols, got {n}")
    limit = symbol_rate_hz / 8
    if max_offset_hz is not None and max_offset_hz > limit:
        raise RangeError(f"search range {max_offset_hz:.3g} Hz beyond the unambiguous {limit:.3g} Hz")
    if coarse_offset_hz is not None:
        check_capture_range(coarse_offset_hz, symbol_rate_hz)
    power = np.mean(np.abs(y) ** 2, axis=1, keepdims=True)
    if not np.all(power > 0):
        raise EstimationError("frequency offset estimation needs non-zero streams")
    y = y / np.sqrt(power)
    n_fft = 1 << int(math.ceil(math.log2(4 * n)))
    spectrum = np.sum(np.abs(np.fft.fft(y**4, n_fft, axis=1)) ** 2, axis=0)
    freqs = np.fft.fftfreq(n_fft, d=1.0 / symbol_rate_hz)
    if max_offset_hz is not None:
        spectrum = np.where(np.abs(freqs) <= 4 * max_offset_hz, spectrum, 0.0)
    peak = int(np.argmax(spectrum))
    left, center, right = spectrum[peak - 1], spectrum[peak], spectrum[(peak + 1) % n_fft]
    denom = left - 2 * center + right
    offset = 0.5 * (left - right) / denom if denom else 0.0
    estimate = (freqs[peak] + offset * symbol_rate_hz / n_fft) / 4
    logger.debug("Frequency offset estimate %.3f MHz", estimate / 1e6)
    return float(estimate)


def remove_freq_offset(symbols: np.ndarray, offset_hz: float, symbol_rate_hz: float) -> np.ndarray:
    k = np.arange(np.asarray(symbols).shape[-1])
    return symbols * np.exp(-2j * np.pi * offset_hz * k / symbol_rate_hz)


def _nearest_distance(y: np.ndarray, points: np.ndarray) -> np.ndarray:
    return np.min(np.abs(y[..., None] - points) ** 2, axis=-1)


def carrier_phase_estimate(
    symbols: np.ndarray,
    qam_map: QamSymbolMap = STAR_8QAM,
    n_phases: int = 32,
    window: int = 64,
) -> tuple[np.ndarray, np.ndarray]:
    """Blind phase search over [0, pi/2) with decision-directed refinement.

    Returns (corrected symbols, phase estimate per symbol). Symbols are
    normalized to unit power first; the 90 degree ambiguity is left to
    alignment.
    """
    y = np.asarray(symbols, dtype=np.complex128)
    power = float(np.mean(np.abs(y) ** 2)) if y.size else 0.0
    if not power > 0 or not math.isfinite(power):
        raise EstimationError("carrier phase estimation needs a block with finite non-zero power")
    y = y / math.sqrt(power)
    test = np.arange(n_phases) * (np.pi / 2) / n_phases
    metric = np.empty((n_phases, y.size))
    for b, phi in enumerate(test):
        metric[b] = scipy.ndimage.uniform_filter1d(
            _nearest_distance(y * np.exp(-1j * phi), qam_map.points), size=window, mode="wrap"
        )
    coarse = test[np.argmin(metric, axis=0)]
    coarse = np.unwrap(4 * coarse) / 4

    rotated = y * np.exp(-1j * coarse)
    decisions = qam_map.points[np.argmin(np.abs(rotated[:, None] - qam_map.points) ** 2, axis=1)]
    product = rotated * decisions.conj()
    smoothed = scipy.ndimage.uniform_filter1d(product.real, size=window, mode="wrap") + 1j * (
        scipy.ndimage.uniform_filter1d(product.imag, size=window, mode="wrap")
    )
    phase = coarse + np.angle(smoothed)
    return y * np.exp(-1j * phase), phase


def decide_labels(symbols: np.ndarray, qam_map: QamSymbolMap = STAR_8QAM) -> np.ndarray:
    """Minimum-distance labels; ties go to the lowest label."""
    distances = np.abs(np.asarray(symbols)[..., None] - qam_map.points) ** 2
    return np.argmin(distances, axis=-1).astype(np.uint8)


def demap_decide(symbols: np.ndarray, qam_map: QamSymbolMap = STAR_8QAM) -> np.ndarray:
    return qam_map.labels_to_bits(decide_labels(symbols, qam_map))


def decision_evm(symbols: np.ndarray, qam_map: QamSymbolMap = STAR_8QAM) -> float:
    """Decision-directed EVM in percent."""
    decisions = qam_map.points[decide_labels(symbols, qam_map)]
    return 100 * math.sqrt(np.mean(np.abs(symbols - decisions) ** 2) / np.mean(np.abs(decisions) ** 2))


def normalized_fourth_moment(symbols: np.ndarray) -> np.ndarray:
    """E|y|^4 / (E|y|^2)^2 per stream (last axis)."""
    power = np.abs(np.atleast_2d(symbols)) ** 2
    mean_power = power.mean(axis=-1)
    mean_power[mean_power == 0] = np.nan
    return (power**2).mean(axis=-1) / mean_power**2


def separation_threshold(qam_map: QamSymbolMap = STAR_8QAM, noise_fraction: float = 0.0) -> float:
    """Fourth-moment level between one source and an equal two-source mix.

    Mixing two independent unit-power sources of kurtosis k equally gives
    k / 2 + 1, which lies above k for any sub-Gaussian alphabet. Circular
    Gaussian noise carrying ``noise_fraction`` of the power moves both
    levels up by the same amount.
    """
    kurtosis = float(normalized_fourth_moment(qam_map.points)[0])
    signal = 1.0 - noise_fraction
    noise_terms = 4 * signal * noise_fraction + 2 * noise_fraction**2
    return (kurtosis + kurtosis / 2 + 1) / 2 * signal**2 + noise_terms


def streams_separated(
    symbols: np.ndarray,
    qam_map: QamSymbolMap = STAR_8QAM,
    singularity_threshold: float = 0.9,
    evm_percent: Optional[Sequence[float]] = None,
) -> bool:
    """True when every stream looks like a single source and no two are copies.

    ``evm_percent`` (one value per stream) sets the noise allowance of each
    stream's fourth-moment threshold; without it the streams are taken as
    noise free.
    """
    symbols = np.atleast_2d(symbols)
    moments = normalized_fourth_moment(symbols)
    evm = np.zeros(symbols.shape[0]) if evm_percent is None else np.asarray(evm_percent, dtype=float)
    noise = np.clip((evm / 100) ** 2 / (1 + (evm / 100) ** 2), 0.0, 1.0)
    thresholds = np.array([separation_threshold(qam_map, float(n)) for n in noise])
    if not np.all(moments < thresholds):
        return False
    return not _duplicate_outputs(symbols, singularity_threshold)


@dataclass(slots=True)
class DspReport:
    converged: bool
    residual_freq_offset_hz: float
    evm_percent: float
    snr_db: list[float] = field(default_factory=list)
    timing_offset_symbols: float = 0.0
    switch_symbol: Optional[int] = None
    reinitialized: list[int] = field(default_factory=list)
    equalizer_stage: str = EqualizerStage.CMA.value
    fourth_moments: list[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "converged": self.converged,
            "freq_offset_hz": self.residual_freq_offset_hz,
            "evm_percent": self.evm_percent,
            "snr_db": self.snr_db,
            "timing_offset_symbols": self.timing_offset_symbols,
            "switch_symbol": self.switch_symbol,
            "reinitialized": self.reinitialized,
            "equalizer_stage": self.equalizer_stage,
            "fourth_moments": self.fourth_moments,
        }


@dataclass(slots=True)
class GroupDspResult:
    symbols: np.ndarray
    bits: list[np.ndarray]
    state: MimoEqualizerState
    report: DspReport


def receive_group(
    signals: Sequence[ComplexEnvelope],
    dsp: Optional[DspConfig] = None,
    state: Optional[MimoEqualizerState] = None,
    roll_off: float = 0.01,
    rx_filter_excess: float = 1.2,
    qam_map: QamSymbolMap = STAR_8QAM,
    passes: Optional[int] = None,
) -> GroupDspResult:
    """Run the full blind chain on the four received streams of one group."""
    dsp = dsp or DspConfig()
    baud = signals[0].symbol_rate_hz
    coarse = coarse_freq_offset(signals)
    check_capture_range(coarse, baud)
    filtered = [receive_filter(s, roll_off, rx_filter_excess) for s in signals]
    timed, tau = timing_recovery(filtered)
    if state is None:
        state = MimoEqualizerState.center_spike(dsp.taps, dsp.step_size, len(signals), qam_map)
    equalized, state, eq_report = mimo_equalize(timed, state, dsp, qam_map, passes=passes)

    min_symbols = min(dsp.foe_min_symbols, equalized.shape[1])
    offset = freq_offset_estimate(
        equalized, baud, min_symbols, dsp.foe_max_offset_hz, coarse_offset_hz=coarse
    )
    derotated = remove_freq_offset(equalized, offset, baud)
    corrected = np.empty_like(derotated)
    for i, stream in enumerate(derotated):
        corrected[i], _ = carrier_phase_estimate(stream, qam_map, dsp.bps_phases, dsp.bps_window)
    evm = [decision_evm(stream, qam_map) for stream in corrected]
    snr = [(-20 * math.log10(e / 100)) if e > 0 else math.inf for e in evm]
    separated = streams_separated(corrected, qam_map, dsp.singularity_threshold, evm)
    if eq_report.converged and not separated:
        logger.warning("Equalizer settled but the output streams are still mixed")
    report = DspReport(
        converged=separated,
        residual_freq_offset_hz=offset,
        evm_percent=float(np.sqrt(np.mean(np.square(evm)))),
        snr_db=snr,
        timing_offset_symbols=tau,
        switch_symbol=eq_report.switch_symbol,
        reinitialized=eq_report.reinitialized,
        equalizer_stage=state.stage.value,
        fourth_moments=[float(m) for m in normalized_fourth_moment(corrected)],
    )
    logger.info(
        "Group DSP: converged=%s switch=%s FOE=%.2f MHz EVM=%.2f%%",
        report.converged,
        report.switch_symbol,
        offset / 1e6,
        report.evm_percent,
    )
    return GroupDspResult(
        symbols=corrected,
        bits=[demap_decide(stream, qam_map) for stream in corrected],
        state=state,
        report=report,
    )
