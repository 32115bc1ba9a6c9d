"""Transmitter: PRBS bits, star 8QAM mapping and raised-cosine pulse shaping."""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .constants import BITS_PER_SYMBOL, PRBS_DEGREE, PRBS_PERIOD
from .envelope import ComplexEnvelope
from .errors import ConfigurationError, FramingError

logger = logging.getLogger(__name__)


@dataclass(slots=True)
class PrbsGenerator:
    """Fibonacci LFSR producing the x^18 + x^11 + 1 maximal-length sequence.

    ``state`` holds the next 18 output bits, bit i being the i-th bit to come
    out. The recurrence is s[k+18] = s[k+11] ^ s[k].
    """

    state: int = (1 << PRBS_DEGREE) - 1
    degree: int = PRBS_DEGREE
    tap_polynomial: tuple[int, int] = (18, 11)

    def __post_init__(self) -> None:
        if self.degree != PRBS_DEGREE or self.tap_polynomial != (18, 11):
            raise ConfigurationError("only the degree-18 {18, 11} generator is supported")
        self.state &= PRBS_PERIOD
        if self.state == 0:
            raise ConfigurationError("PRBS state must not be all-zero")

    @classmethod
    def from_seed(cls, seed: int) -> "PrbsGenerator":
        """Deterministic non-zero state from an arbitrary integer seed."""
        return cls(state=1 + (int(seed) % PRBS_PERIOD))

    def copy(self) -> "PrbsGenerator":
        return PrbsGenerator(state=self.state)


def _state_bits(state: int) -> np.ndarray:
    return ((state >> np.arange(PRBS_DEGREE)) & 1).astype(np.uint8)


def _bits_state(bits: np.ndarray) -> int:
    return int(np.dot(bits.astype(np.int64), 1 << np.arange(PRBS_DEGREE, dtype=np.int64)))


def prbs_bits(gen: PrbsGenerator, n: int) -> np.ndarray:
    """Next ``n`` bits of the sequence; advances ``gen.state`` by ``n`` steps."""
    if n < 1:
        raise ConfigurationError("bit count must be at least 1")
    if gen.state == 0:
        raise ConfigurationError("PRBS state must not be all-zero")
    hi, lo = gen.tap_polynomial
    total = n + hi
    buf = np.empty(total, dtype=np.uint8)
    buf[:hi] = _state_bits(gen.state)
    filled = hi
    while filled < total:
        # s[t] = s[t - 18*2^j + 11*2^j] ^ s[t - 18*2^j] holds for every j
        scale = 1 << max(0, int(math.log2(filled // hi)))
        lag_hi, lag_lo = hi * scale, lo * scale
        count = min(lag_hi - lag_lo, total - filled)
        k = filled - lag_hi
        np.bitwise_xor(
            buf[k + lag_lo : k + lag_lo + count],
            buf[k : k + count],
            out=buf[filled : filled + count],
        )
        filled += count
    gen.state = _bits_state(buf[n : n + hi])
    return buf[:n].copy()


@dataclass(frozen=True, slots=True)
class PrbsDescriptor:
    """Everything needed to regenerate a channel's transmitted bits."""

    state: int
    n_bits: int

    def regenerate(self) -> np.ndarray:
        return prbs_bits(PrbsGenerator(state=self.state), self.n_bits)


# Gray quadrant order counterclockwise: 00, 01, 11, 10
GRAY_QUADRANT_POSITION = {0b00: 0, 0b01: 1, 0b11: 2, 0b10: 3}


@dataclass(frozen=True, slots=True, eq=False)
class QamSymbolMap:
    """Star 8QAM: two 4-point rings, label index = 4*b2 + 2*b1 + b0."""

    points: np.ndarray = field(repr=False)
    bit_labels: tuple[int, ...]
    norm_factor: float

    @property
    def radii(self) -> tuple[float, float]:
        """Scaled (inner, outer) ring radii."""
        mags = np.abs(self.points)
        return float(mags.min()), float(mags.max())

    @property
    def cma_radius_sq(self) -> float:
        """R^2 = E|a|^4 / E|a|^2 over the alphabet."""
        power = np.abs(self.points) ** 2
        return float(np.mean(power**2) / np.mean(power))

    @property
    def ring_threshold_sq(self) -> float:
        """|y|^2 boundary between the rings: mean of the squared radii."""
        inner, outer = self.radii
        return 0.5 * (inner**2 + outer**2)

    def labels_to_bits(self, labels: np.ndarray) -> np.ndarray:
        labels = np.asarray(labels, dtype=np.uint8)
        shifts = np.arange(BITS_PER_SYMBOL - 1, -1, -1, dtype=np.uint8)
        return ((labels[:, None] >> shifts) & 1).astype(np.uint8).reshape(-1)


def star_8qam() -> QamSymbolMap:
    inner, outer = 1.0, 1.0 + math.sqrt(3.0)
    norm = 1.0 / math.sqrt(2.5 + math.sqrt(3.0))
    points = np.empty(8, dtype=np.complex128)
    for label in range(8):
        ring = label >> 2
        position = GRAY_QUADRANT_POSITION[label & 0b11]
        if ring == 0:
            points[label] = inner * np.exp(1j * (np.pi / 4 + position * np.pi / 2))
        else:
            points[label] = outer * np.exp(1j * position * np.pi / 2)
    points *= norm
    points.setflags(write=False)
    return QamSymbolMap(points=points, bit_labels=tuple(range(8)), norm_factor=norm)


STAR_8QAM = star_8qam()


def bits_to_labels(bits: np.ndarray) -> np.ndarray:
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.size % BITS_PER_SYMBOL:
        raise FramingError(f"{bits.size} bits do not form whole 3-bit symbols")
    triplets = bits.reshape(-1, BITS_PER_SYMBOL)
    return (triplets[:, 0] << 2 | triplets[:, 1] << 1 | triplets[:, 2]).astype(np.uint8)


def map_8qam(bits: np.ndarray, qam_map: QamSymbolMap = STAR_8QAM) -> np.ndarray:
    """Map bits (b2 b1 b0 per symbol, b2 first) to scaled constellation points."""
    return qam_map.points[bits_to_labels(bits)]


def raised_cosine_taps(roll_off: float, samples_per_symbol: int, span_symbols: int) -> np.ndarray:
    """Raised-cosine impulse response with ``span*sps + 1`` taps, unnormalized."""
    n_taps = span_symbols * samples_per_symbol + 1
    t = (np.arange(n_taps) - (n_taps - 1) / 2) / samples_per_symbol
    denom = 1.0 - (2.0 * roll_off * t) ** 2
    singular = np.isclose(denom, 0.0, atol=1e-12)
    safe = np.where(singular, 1.0, denom)
    taps = np.sinc(t) * np.cos(np.pi * roll_off * t) / safe
    taps[singular] = (np.pi / 4) * np.sinc(1.0 / (2.0 * roll_off))
    return taps


@dataclass(slots=True)
class PulseShaper:
    """Nyquist raised-cosine transmit filter, normalized to unit output power."""

    roll_off: float = 0.01
    samples_per_symbol: int = 2
    span_symbols: int = 128
    taps: np.ndarray = field(default=None, repr=False)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if not 0 < self.roll_off <= 1:
            raise ConfigurationError("roll_off must lie in (0, 1]")
        if self.samples_per_symbol < 2:
            raise ConfigurationError("samples_per_symbol must be at least 2")
        if self.span_symbols <= 0 or self.span_symbols % 2:
            raise ConfigurationError("span_symbols must be a positive even integer")
        if self.taps is None:
            raw = raised_cosine_taps(self.roll_off, self.samples_per_symbol, self.span_symbols)
            self.taps = raw * math.sqrt(self.samples_per_symbol / np.sum(raw**2))

    @property
    def group_delay_symbols(self) -> float:
        return self.span_symbols / 2


def pulse_shape(
    symbols: np.ndarray, shaper: PulseShaper, symbol_rate_hz: float = 12e9
) -> ComplexEnvelope:
    """Upsample and filter a symbol block (circular, causal).

    The block is treated as periodic so every experiment can work on
    circular blocks; the filter delay of ``span/2`` symbols is recorded.
    """
    symbols = np.asarray(symbols, dtype=np.complex128)
    if symbols.size == 0:
        raise FramingError("no symbols to shape")
    sps = shaper.samples_per_symbol
    n = symbols.size * sps
    upsampled = np.zeros(n, dtype=np.complex128)
    upsampled[::sps] = symbols
    kernel = np.zeros(n, dtype=np.complex128)
    taps = shaper.taps
    if taps.size <= n:
        kernel[: taps.size] = taps
    else:
        np.add.at(kernel, np.arange(taps.size) % n, taps)
    samples = np.fft.ifft(np.fft.fft(upsampled) * np.fft.fft(kernel))
    return ComplexEnvelope(
        samples=samples,
        sample_rate_hz=symbol_rate_hz * sps,
        symbol_rate_hz=symbol_rate_hz,
        delay_symbols=shaper.group_delay_symbols,
        metadata={"roll_off": shaper.roll_off, "span_symbols": shaper.span_symbols},
    )


def occupied_bandwidth(taps: np.ndarray, sample_rate_hz: float, level_db: float = -20.0) -> float:
    """Two-sided bandwidth (Hz) outside which the tap spectrum stays below ``level_db``."""
    n_fft = max(1 << 16, 1 << int(np.ceil(np.log2(taps.size * 8))))
    spectrum = np.abs(np.fft.fftshift(np.fft.fft(taps, n_fft))) ** 2
    freqs = np.fft.fftshift(np.fft.fftfreq(n_fft, d=1.0 / sample_rate_hz))
    above = freqs[spectrum >= spectrum.max() * 10 ** (level_db / 10)]
    return float(above.max() - above.min())


@dataclass(slots=True)
class Transmission:
    """A shaped channel plus the data needed to score it."""

    envelope: ComplexEnvelope
    symbols: np.ndarray
    reference: PrbsDescriptor


def transmit(
    gen: PrbsGenerator,
    n_symbols: int,
    shaper: PulseShaper,
    symbol_rate_hz: float = 12e9,
    qam_map: QamSymbolMap = STAR_8QAM,
) -> Transmission:
    """PRBS -> 8QAM -> pulse shaping for one channel; advances ``gen``."""
    reference = PrbsDescriptor(state=gen.state, n_bits=n_symbols * BITS_PER_SYMBOL)
    bits = prbs_bits(gen, reference.n_bits)
    symbols = map_8qam(bits, qam_map)
    envelope = pulse_shape(symbols, shaper, symbol_rate_hz)
    logger.debug("Generated %d symbols from PRBS state %#07x", n_symbols, reference.state)
    return Transmission(envelope=envelope, symbols=symbols, reference=reference)
