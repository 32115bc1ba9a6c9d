"""Measurements that may look at the transmitted data.

BER with blind rotation/permutation/delay alignment against the PRBS
references, SNR/EVM, spectral efficiency and capacity (exact rational
arithmetic), MIMO complexity per bit and the optical power budget.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Optional, Sequence

import numpy as np
import scipy.optimize
import scipy.stats

from .config import ComplexityVariant, FiberProfile, SeConfig
from .constants import BITS_PER_SYMBOL, PREAMP_SENSITIVITY_DBM, PUBLISHED_BUDGET_ROWS
from .errors import NoLockError, ShapeError
from .rxdsp import MultiplicationCounter, apply_taps
from .txgen import GRAY_QUADRANT_POSITION, STAR_8QAM, PrbsDescriptor, QamSymbolMap, bits_to_labels

logger = logging.getLogger(__name__)

LOCK_SIGMA = 6.0
AMBIGUITY_MARGIN = 0.10
MIN_ALIGNMENT_BITS = 100_000


def rotation_permutation(quarter_turns: int) -> np.ndarray:
    """Label map of a counterclockwise rotation by ``quarter_turns * 90`` degrees."""
    by_position = {position: bits for bits, position in GRAY_QUADRANT_POSITION.items()}
    perm = np.empty(8, dtype=np.uint8)
    for label in range(8):
        ring, quadrant = label >> 2, label & 0b11
        perm[label] = ring << 2 | by_position[(GRAY_QUADRANT_POSITION[quadrant] + quarter_turns) % 4]
    return perm


def _derotated_bits(rx_bits: np.ndarray, quarter_turns: int) -> np.ndarray:
    if quarter_turns == 0:
        return rx_bits
    inverse = np.argsort(rotation_permutation(quarter_turns)).astype(np.uint8)
    return STAR_8QAM.labels_to_bits(inverse[bits_to_labels(rx_bits)])


def clopper_pearson(errors: int, n_bits: int, confidence: float = 0.95) -> tuple[float, float]:
    """Exact binomial confidence interval for an error count."""
    alpha = 1 - confidence
    low, high = 0.0, 1.0
    if errors > 0:
        low = float(scipy.stats.beta.ppf(alpha / 2, errors, n_bits - errors + 1))
    if errors < n_bits:
        high = float(scipy.stats.beta.ppf(1 - alpha / 2, errors + 1, n_bits - errors))
    return low, high


@dataclass(slots=True)
class Alignment:
    """Best alignment hypothesis of one received stream."""

    ber: float
    errors: int
    n_bits: int
    delay_bits: int
    rotation: int
    reference_index: int
    peak_sigma: float
    ambiguous: bool = False
    ci_low: float = 0.0
    ci_high: float = 0.0

    def to_dict(self) -> dict:
        return {
            "ber": self.ber,
            "errors": self.errors,
            "n_bits": self.n_bits,
            "delay_bits": self.delay_bits,
            "rotation": self.rotation,
            "reference_index": self.reference_index,
            "peak_sigma": self.peak_sigma,
            "ambiguous": self.ambiguous,
            "ci_low": self.ci_low,
            "ci_high": self.ci_high,
        }


@dataclass(slots=True)
class _Hypothesis:
    agreement: float
    delay: int
    sigma: float


def _correlate(rx_spectrum: np.ndarray, tx_spectrum: np.ndarray, n: int) -> _Hypothesis:
    """Circular correlation of +/-1 sequences; peak, its lag and robust significance."""
    corr = np.fft.irfft(rx_spectrum * tx_spectrum.conj(), n)
    delay = int(np.argmax(corr))
    median = float(np.median(corr))
    mad = float(np.median(np.abs(corr - median))) * 1.4826
    sigma = (corr[delay] - median) / mad if mad > 0 else math.inf
    return _Hypothesis(agreement=float(corr[delay]), delay=delay, sigma=sigma)


def _signed_spectrum(bits: np.ndarray) -> np.ndarray:
    return np.fft.rfft(1.0 - 2.0 * bits.astype(np.float64))


def _hypotheses(
    rx_streams: Sequence[np.ndarray], references: Sequence[np.ndarray]
) -> np.ndarray:
    """(rx, tx, rotation) grid of best-lag hypotheses."""
    n = rx_streams[0].size
    tx_spectra = [_signed_spectrum(ref) for ref in references]
    grid = np.empty((len(rx_streams), len(references), 4), dtype=object)
    for i, rx in enumerate(rx_streams):
        for k in range(4):
            if k and rx.size % BITS_PER_SYMBOL:
                grid[i, :, k] = None
                continue
            spectrum = _signed_spectrum(_derotated_bits(rx, k))
            for j, tx_spectrum in enumerate(tx_spectra):
                grid[i, j, k] = _correlate(spectrum, tx_spectrum, n)
    return grid


def _alignment(grid: np.ndarray, i: int, j: int, n: int) -> Alignment:
    candidates = [(k, h) for k, h in enumerate(grid[i, j]) if h is not None]
    k, best = max(candidates, key=lambda item: item[1].agreement)
    if best.sigma < LOCK_SIGMA:
        raise NoLockError(
            f"correlation peak {best.sigma:.1f} sigma is below the {LOCK_SIGMA:g} sigma lock threshold",
            peak_sigma=best.sigma,
        )
    errors = int(round((n - best.agreement) / 2))
    ber = errors / n
    runner_up = max(
        (
            h.agreement
            for jj in range(grid.shape[1])
            for kk, h in enumerate(grid[i, jj])
            if h is not None and (jj, kk) != (j, k)
        ),
        default=-math.inf,
    )
    second_ber = (n - runner_up) / (2 * n)
    ambiguous = second_ber <= ber * (1 + AMBIGUITY_MARGIN) if ber > 0 else second_ber <= 0
    if ambiguous:
        logger.warning("Ambiguous alignment for stream %d: BER %.3g vs runner-up %.3g", i, ber, second_ber)
    low, high = clopper_pearson(errors, n)
    return Alignment(
        ber=ber,
        errors=errors,
        n_bits=n,
        delay_bits=best.delay,
        rotation=k,
        reference_index=j,
        peak_sigma=best.sigma,
        ambiguous=ambiguous,
        ci_low=low,
        ci_high=high,
    )


def _reference_bits(reference: "PrbsDescriptor | np.ndarray", n: int) -> np.ndarray:
    if isinstance(reference, PrbsDescriptor):
        bits = reference.regenerate()
    else:
        bits = np.asarray(reference, dtype=np.uint8)
    if bits.size != n:
        raise ShapeError(f"received {n} bits but the reference holds {bits.size}")
    return bits


def align_and_ber(
    rx_bits: np.ndarray,
    tx_reference: "PrbsDescriptor | np.ndarray",
    min_bits: int = MIN_ALIGNMENT_BITS,
) -> Alignment:
    """BER of one stream after resolving 90-degree rotation and circular bit delay."""
    rx_bits = np.asarray(rx_bits, dtype=np.uint8)
    if rx_bits.size < min_bits:
        raise ShapeError(f"alignment needs at least {min_bits} bits, got {rx_bits.size}")
    reference = _reference_bits(tx_reference, rx_bits.size)
    return _alignment(_hypotheses([rx_bits], [reference]), 0, 0, rx_bits.size)


def align_group(
    rx_bits: Sequence[np.ndarray],
    tx_references: Sequence["PrbsDescriptor | np.ndarray"],
    min_bits: int = MIN_ALIGNMENT_BITS,
) -> list[Alignment]:
    """Align every output of a group to a distinct transmit stream.

    Rotation and delay are resolved per (output, input) pair; the
    output-to-input permutation is the minimum-total-BER assignment.
    Results follow the order of ``rx_bits``.
    """
    streams = [np.asarray(b, dtype=np.uint8) for b in rx_bits]
    n = streams[0].size
    if any(s.size != n for s in streams):
        raise ShapeError("received streams differ in length")
    if n < min_bits:
        raise ShapeError(f"alignment needs at least {min_bits} bits, got {n}")
    references = [_reference_bits(ref, n) for ref in tx_references]
    grid = _hypotheses(streams, references)
    cost = np.array(
        [
            [-max(h.agreement for h in grid[i, j] if h is not None) for j in range(len(references))]
            for i in range(len(streams))
        ]
    )
    rows, cols = scipy.optimize.linear_sum_assignment(cost)
    assignment = dict(zip(rows.tolist(), cols.tolist()))
    return [_alignment(grid, i, assignment[i], n) for i in range(len(streams))]


def snr_evm(
    symbols: np.ndarray,
    reference_symbols: Optional[np.ndarray] = None,
    qam_map: QamSymbolMap = STAR_8QAM,
) -> tuple[float, float]:
    """(SNR dB, EVM %) with SNR = -20 log10(EVM).

    With ``reference_symbols`` the estimate is data-aided; otherwise the
    nearest alphabet points serve as reference. A least-squares gain is
    removed first, so scaling the input changes nothing. Clean input gives
    ``(inf, 0.0)``.
    """
    y = np.asarray(symbols, dtype=np.complex128)
    if reference_symbols is None:
        normalized = y / math.sqrt(np.mean(np.abs(y) ** 2))
        ref = qam_map.points[np.argmin(np.abs(normalized[:, None] - qam_map.points) ** 2, axis=1)]
    else:
        ref = np.asarray(reference_symbols, dtype=np.complex128)
    gain = np.vdot(ref, y) / np.vdot(ref, ref)
    error = y / gain - ref
    evm = math.sqrt(np.mean(np.abs(error) ** 2) / np.mean(np.abs(ref) ** 2))
    if evm < 1e-12:
        return math.inf, 0.0
    return -20 * math.log10(evm), 100 * evm


class RawNet(NamedTuple):
    raw: float
    net: float


def _exact(value: float) -> Fraction:
    return Fraction(str(value))


def spectral_efficiency(cfg: SeConfig) -> RawNet:
    """Raw and net spectral efficiency in bit/s/Hz."""
    cfg.validate()
    raw = (
        Fraction(cfg.n_directions * cfg.n_modes_per_direction * cfg.bits_per_symbol)
        * _exact(cfg.baud_hz)
        / _exact(cfg.grid_hz)
    )
    return RawNet(float(raw), float(raw / (1 + _exact(cfg.fec_overhead))))


def capacity(cfg: SeConfig) -> RawNet:
    """Raw and net aggregate capacity in bit/s."""
    cfg.validate()
    raw = (
        Fraction(cfg.n_directions * cfg.n_modes_per_direction * cfg.n_wavelengths * cfg.bits_per_symbol)
        * _exact(cfg.baud_hz)
    )
    return RawNet(float(raw), float(raw / (1 + _exact(cfg.fec_overhead))))


def rncm_per_bit(mimo_size: int, taps: int, bits_per_symbol: int, kind: str = "TDE") -> float:
    """Steady-state complex multiplications per recovered bit of a time-domain equalizer."""
    if kind != "TDE":
        raise ValueError(f"unsupported equalizer kind {kind!r}")
    if min(mimo_size, taps, bits_per_symbol) < 1:
        raise ValueError("mimo size, taps and bits per symbol must be positive")
    return float(Fraction(mimo_size * taps, bits_per_symbol))


def count_rncm_per_bit(
    mimo_size: int, taps: int, bits_per_symbol: int, n_symbols: int = 64, seed: int = 0
) -> float:
    """Run the fixed-tap equalizer with a multiplication counter and divide by recovered bits."""
    rng = np.random.default_rng(seed)
    tap_matrix = rng.standard_normal((mimo_size, mimo_size, taps)) + 0j
    x = rng.standard_normal((mimo_size, 2 * n_symbols)) + 0j
    counter = MultiplicationCounter()
    apply_taps(tap_matrix, x, counter)
    return float(Fraction(counter.complex_multiplications, mimo_size * n_symbols * bits_per_symbol))


@dataclass(slots=True)
class ComplexityPoint:
    label: str
    net_se: float
    rncm_per_bit: float

    def to_dict(self) -> dict:
        return {"label": self.label, "net_se": self.net_se, "rncm_per_bit": self.rncm_per_bit}


def complexity_points(variants: Sequence[ComplexityVariant]) -> list[ComplexityPoint]:
    """(net SE, RNCM/bit) per system variant."""
    points = []
    for v in variants:
        se = spectral_efficiency(
            SeConfig(
                n_modes_per_direction=v.n_modes_per_direction,
                n_directions=v.n_directions,
                bits_per_symbol=v.bits_per_symbol,
                baud_hz=v.baud_hz,
                grid_hz=v.grid_hz,
                fec_overhead=v.fec_overhead,
            )
        )
        points.append(ComplexityPoint(v.label, se.net, rncm_per_bit(v.mimo_size, v.taps, v.bits_per_symbol)))
    return points


@dataclass(slots=True)
class PowerBudgetLedger:
    """Launch power of one MG followed by ordered gain/loss stages in dB."""

    launch_dbm: float
    entries: list[tuple[str, float]] = field(default_factory=list)
    mode_group: Optional[int] = None

    def to_dict(self) -> dict:
        return {
            "mode_group": self.mode_group,
            "launch_dbm": self.launch_dbm,
            "entries": [{"stage": name, "db": db} for name, db in self.entries],
        }


class BudgetResult(NamedTuple):
    received_dbm: float
    below_sensitivity: bool


def power_budget(ledger: PowerBudgetLedger, sensitivity_dbm: float = PREAMP_SENSITIVITY_DBM) -> BudgetResult:
    """Received power by exact decimal summation of the ledger."""
    if not all(math.isfinite(db) for _, db in ledger.entries) or not math.isfinite(ledger.launch_dbm):
        raise ValueError("ledger entries must be finite")
    total = _exact(ledger.launch_dbm) + sum((_exact(db) for _, db in ledger.entries), Fraction(0))
    received = float(total)
    below = received < sensitivity_dbm
    if below:
        logger.warning(
            "MG %s receives %.2f dBm, below the %.1f dBm pre-amplifier sensitivity",
            ledger.mode_group,
            received,
            sensitivity_dbm,
        )
    return BudgetResult(received, below)


def ledger_from_profile(
    profile: FiberProfile, mode_group: int, launch_dbm: float, core: int = 1, split_db: float = 3.0
) -> PowerBudgetLedger:
    idx = profile.mg_index(mode_group)
    fiber = round(profile.atten(core, mode_group) * profile.length_km, 6)
    return PowerBudgetLedger(
        launch_dbm=launch_dbm,
        entries=[
            ("mux_insertion_loss", -profile.mux_insertion_loss_db[idx]),
            ("bidirectional_split", -split_db),
            ("fiber_loss", -fiber),
            ("demux_insertion_loss", -profile.demux_insertion_loss_db[idx]),
        ],
        mode_group=mode_group,
    )


def published_ledgers() -> list[PowerBudgetLedger]:
    return [
        PowerBudgetLedger(
            launch_dbm=launch,
            entries=[
                ("mux_insertion_loss", mux),
                ("bidirectional_split", split),
                ("fiber_loss", fiber),
                ("demux_insertion_loss", demux),
            ],
            mode_group=mg,
        )
        for mg, launch, mux, split, fiber, demux in PUBLISHED_BUDGET_ROWS
    ]


def aligned_reference_symbols(
    alignment: Alignment,
    reference: "PrbsDescriptor | np.ndarray",
    qam_map: QamSymbolMap = STAR_8QAM,
) -> Optional[np.ndarray]:
    """Transmitted symbols rotated and delayed as the alignment found them.

    Returns None when the bit delay does not fall on a symbol boundary.
    """
    if alignment.delay_bits % BITS_PER_SYMBOL:
        return None
    bits = _reference_bits(reference, alignment.n_bits)
    labels = rotation_permutation(alignment.rotation)[bits_to_labels(bits)]
    return np.roll(qam_map.points[labels], alignment.delay_bits // BITS_PER_SYMBOL)
