"""Sampled complex baseband fields and spatial channel identifiers."""

from dataclasses import dataclass, field, replace
from typing import Any, Iterable, Sequence

import numpy as np

from .constants import Direction, Polarization
from .errors import ShapeError


@dataclass(frozen=True, slots=True)
class ModeId:
    """One spatial/polarization channel: core, signed charge, polarization, direction."""

    core: int
    charge: int
    polarization: Polarization
    direction: Direction = Direction.FORWARD

    @property
    def mode_group(self) -> int:
        return abs(self.charge)

    @property
    def label(self) -> str:
        return f"<{self.charge:+d},{self.polarization.value}>"

    def sort_key(self) -> tuple:
        """Stable ordering: direction, core, group, then the in-group index."""
        return (
            self.direction.value,
            self.core,
            self.mode_group,
            group_index(self),
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "core": self.core,
            "charge": self.charge,
            "polarization": self.polarization.value,
            "direction": self.direction.value,
        }


def group_mode_ids(
    core: int, mode_group: int, direction: Direction = Direction.FORWARD
) -> list[ModeId]:
    """The four degenerate modes of a group in canonical order.

    Order: <+l,R>, <+l,L>, <-l,R>, <-l,L>.
    """
    return [
        ModeId(core, sign * mode_group, pol, direction)
        for sign in (1, -1)
        for pol in (Polarization.R, Polarization.L)
    ]


def group_index(mode: ModeId) -> int:
    """Position of a mode inside its group (0..3)."""
    return (0 if mode.charge > 0 else 2) + (0 if mode.polarization is Polarization.R else 1)


@dataclass(slots=True)
class ComplexEnvelope:
    """Uniformly sampled complex field of one channel."""

    samples: np.ndarray
    sample_rate_hz: float
    symbol_rate_hz: float
    delay_symbols: float = 0.0
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.samples = np.asarray(self.samples, dtype=np.complex128)
        if self.samples.ndim != 1:
            raise ShapeError("ComplexEnvelope samples must be one-dimensional")

    def __len__(self) -> int:
        return self.samples.shape[0]

    @property
    def samples_per_symbol(self) -> float:
        return self.sample_rate_hz / self.symbol_rate_hz

    @property
    def power(self) -> float:
        return float(np.mean(np.abs(self.samples) ** 2))

    def with_samples(self, samples: np.ndarray, **changes: Any) -> "ComplexEnvelope":
        """Copy with new samples, keeping rate and metadata."""
        changes.setdefault("metadata", dict(self.metadata))
        return replace(self, samples=samples, **changes)


def check_compatible(envelopes: Iterable[ComplexEnvelope]) -> tuple[int, float, float]:
    """Return (length, sample rate, symbol rate) shared by all envelopes."""
    envelopes = list(envelopes)
    if not envelopes:
        raise ShapeError("no signals given")
    first = envelopes[0]
    for env in envelopes[1:]:
        if len(env) != len(first):
            raise ShapeError(f"length mismatch: {len(env)} != {len(first)}")
        if env.sample_rate_hz != first.sample_rate_hz:
            raise ShapeError(
                f"sample-rate mismatch: {env.sample_rate_hz} != {first.sample_rate_hz}"
            )
    return len(first), first.sample_rate_hz, first.symbol_rate_hz


def stack(envelopes: Sequence[ComplexEnvelope]) -> np.ndarray:
    """Stack envelopes into a (channels, samples) array."""
    check_compatible(envelopes)
    return np.stack([env.samples for env in envelopes])
