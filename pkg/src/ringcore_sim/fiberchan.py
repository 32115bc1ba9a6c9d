"""Ring-core fiber channel with OAM MUX/DEMUX transfer matrices.

Per (core, MG) group the fiber is ``U_out . D(f) . U_in`` times the group
attenuation and common group delay, where ``D(f)`` holds the intra-group
DMD delays. All inter-MG and inter-core crosstalk sits in the MUX and
DEMUX matrices (half each), optionally complemented by lumped in-fiber
coupling sections. Propagation works on circular blocks in the frequency
domain so fractional delays are exact.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Mapping, Optional, Sequence

import numpy as np
import scipy.linalg
import scipy.signal
import scipy.stats

from .config import FiberProfile
from .constants import HEX7_MAX_NEIGHBOURS, HEX7_NEIGHBOURS, MODES_PER_GROUP, Direction
from .envelope import ComplexEnvelope, ModeId, check_compatible, group_index, group_mode_ids
from .errors import ShapeError

logger = logging.getLogger(__name__)

GroupKey = tuple[int, int]  # (core, mode group)


def _rng(seed_stream: "int | np.random.Generator | np.random.SeedSequence") -> np.random.Generator:
    if isinstance(seed_stream, np.random.Generator):
        return seed_stream
    return np.random.default_rng(seed_stream)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary matrix."""
    return np.asarray(scipy.stats.unitary_group.rvs(dim, random_state=rng), dtype=np.complex128)


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Random Hermitian generator with unit Frobenius norm."""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    h = 0.5 * (g + g.conj().T)
    return h / np.linalg.norm(h)


def unitarity_error(u: np.ndarray) -> float:
    return float(np.max(np.abs(u @ u.conj().T - np.eye(u.shape[0]))))


@dataclass(slots=True)
class IntraGroupChannel:
    """Strong coupling inside one 4-mode group.

    ``mixing`` is the output-side unitary (the one that drifts);
    ``input_mixing`` the launch-side unitary.
    """

    mixing: np.ndarray
    delays_ps: np.ndarray
    drift_rate: float = 1.0
    input_mixing: np.ndarray = field(default_factory=lambda: np.eye(MODES_PER_GROUP, dtype=np.complex128))

    def response(self, freqs_hz: np.ndarray) -> np.ndarray:
        """(F, 4, 4) transfer of the intra-group part at the given frequencies."""
        phases = np.exp(-2j * np.pi * np.outer(freqs_hz, self.delays_ps * 1e-12))
        return np.einsum("ij,fj,jk->fik", self.mixing, phases, self.input_mixing)

    def transposed(self) -> "IntraGroupChannel":
        """Reverse-direction realization under reciprocity."""
        return IntraGroupChannel(
            mixing=self.input_mixing.T.copy(),
            delays_ps=self.delays_ps.copy(),
            drift_rate=self.drift_rate,
            input_mixing=self.mixing.T.copy(),
        )


@dataclass(slots=True)
class GroupChannel:
    intra: IntraGroupChannel
    loss_db: float
    group_delay_ps: float

    @property
    def amplitude(self) -> float:
        return 10 ** (-self.loss_db / 20)


@dataclass(slots=True)
class MuxDemuxMatrix:
    """Insertion loss per channel and the unit-column crosstalk block matrix."""

    insertion_loss_db: np.ndarray
    xt_block: np.ndarray

    def as_mux(self) -> np.ndarray:
        return self.xt_block * (10 ** (-self.insertion_loss_db / 20))[None, :]

    def as_demux(self) -> np.ndarray:
        return (10 ** (-self.insertion_loss_db / 20))[:, None] * self.xt_block


@dataclass(slots=True)
class DirectionalLink:
    groups: dict[GroupKey, GroupChannel]
    mux: MuxDemuxMatrix
    demux: MuxDemuxMatrix
    section_couplings: list[np.ndarray] = field(default_factory=list)


@dataclass(slots=True)
class ChannelState:
    """A built channel: group realizations per direction plus end modules."""

    profile: FiberProfile
    seed: int
    group_keys: list[GroupKey]
    links: dict[Direction, DirectionalLink]

    @property
    def n_channels(self) -> int:
        return len(self.group_keys) * MODES_PER_GROUP

    @property
    def cores(self) -> list[int]:
        return sorted({core for core, _ in self.group_keys})

    def group_slice(self, key: GroupKey) -> slice:
        pos = self.group_keys.index(key)
        return slice(pos * MODES_PER_GROUP, (pos + 1) * MODES_PER_GROUP)

    def channel_index(self, mode: ModeId) -> int:
        key = (mode.core, mode.mode_group)
        if key not in self.group_keys:
            raise ShapeError(f"mode {mode} is not part of this channel")
        return self.group_slice(key).start + group_index(mode)

    def mode_ids(self, direction: Direction) -> list[ModeId]:
        return [m for core, mg in self.group_keys for m in group_mode_ids(core, mg, direction)]


def _intra_delays(spread_ps: float, rng: np.random.Generator) -> np.ndarray:
    """Four zero-mean delays whose spread is exactly ``spread_ps``."""
    if spread_ps == 0:
        return np.zeros(MODES_PER_GROUP)
    raw = np.concatenate(([0.0, 1.0], rng.uniform(0.0, 1.0, MODES_PER_GROUP - 2))) * spread_ps
    raw = rng.permutation(raw)
    return raw - raw.mean()


def intermg_pair_levels(profile: FiberProfile) -> dict[tuple[int, int], float]:
    """Linear leak per MG pair inside one core, worst MG aggregate = xt_intermg_db."""
    if profile.xt_intermg_db is None or len(profile.mode_groups) < 2:
        return {}
    weights = {
        (a, b): 10 ** (-profile.xt_intermg_falloff_db * (abs(a - b) - 1) / 10)
        for a in profile.mode_groups
        for b in profile.mode_groups
        if a != b
    }
    worst = max(
        sum(w for (a, _), w in weights.items() if a == mg) for mg in profile.mode_groups
    )
    scale = 10 ** (profile.xt_intermg_db / 10) / worst
    return {pair: scale * w for pair, w in weights.items()}


def intercore_pair_level(profile: FiberProfile) -> float:
    """Linear same-MG leak between two adjacent cores."""
    if profile.xt_intercore_db is None:
        return 0.0
    return 10 ** (profile.xt_intercore_db / 10) / HEX7_MAX_NEIGHBOURS


def pair_levels(profile: FiberProfile, keys: Sequence[GroupKey]) -> dict[tuple[int, int], float]:
    """Linear end-to-end leak for every ordered (launched, received) group pair."""
    intermg = intermg_pair_levels(profile)
    intercore = intercore_pair_level(profile)
    levels = {}
    for a, (core_a, mg_a) in enumerate(keys):
        for b, (core_b, mg_b) in enumerate(keys):
            if a == b:
                continue
            if core_a == core_b:
                level = intermg.get((mg_a, mg_b), 0.0)
            elif mg_a == mg_b and core_b in HEX7_NEIGHBOURS.get(core_a, ()):
                level = intercore
            else:
                level = 0.0
            if level > 0:
                levels[(a, b)] = level
    return levels


def _coupling_matrix(
    levels: Mapping[tuple[int, int], float], n_groups: int, share: float, rng: np.random.Generator
) -> np.ndarray:
    """I + E with Gaussian blocks rescaled so each column leaks exactly share*level."""
    k = n_groups * MODES_PER_GROUP
    matrix = np.eye(k, dtype=np.complex128)
    for (a, b), level in sorted(levels.items()):
        block = rng.standard_normal((MODES_PER_GROUP, MODES_PER_GROUP)) + 1j * rng.standard_normal(
            (MODES_PER_GROUP, MODES_PER_GROUP)
        )
        block *= np.sqrt(share * level) / np.linalg.norm(block, axis=0, keepdims=True)
        rows = slice(b * MODES_PER_GROUP, (b + 1) * MODES_PER_GROUP)
        cols = slice(a * MODES_PER_GROUP, (a + 1) * MODES_PER_GROUP)
        matrix[rows, cols] = block
    return matrix / np.linalg.norm(matrix, axis=0, keepdims=True)


def _section_levels(profile: FiberProfile, keys: Sequence[GroupKey]) -> dict[tuple[int, int], float]:
    per_section = 10 ** (profile.in_fiber_xt_db_per_km / 10) * profile.length_km / profile.xt_sections
    return {
        (a, b): per_section
        for a, (core_a, mg_a) in enumerate(keys)
        for b, (core_b, mg_b) in enumerate(keys)
        if core_a == core_b and abs(mg_a - mg_b) == 1
    }


def _build_link(profile: FiberProfile, keys: list[GroupKey], rng: np.random.Generator) -> DirectionalLink:
    groups = {}
    for core, mg in keys:
        idx = profile.mg_index(mg)
        if profile.intra_group_mixing:
            u_in, u_out = random_unitary(4, rng), random_unitary(4, rng)
        else:
            u_in = np.eye(MODES_PER_GROUP, dtype=np.complex128)
            u_out = np.eye(MODES_PER_GROUP, dtype=np.complex128)
        spread = profile.intra_dmd_ps_per_km[idx] * profile.length_km
        intra = IntraGroupChannel(
            mixing=u_out,
            delays_ps=_intra_delays(spread, rng),
            drift_rate=profile.drift_rate,
            input_mixing=u_in,
        )
        groups[(core, mg)] = GroupChannel(
            intra=intra,
            loss_db=profile.atten(core, mg) * profile.length_km,
            group_delay_ps=profile.group_delay_ns(mg) * 1e3,
        )
    levels = pair_levels(profile, keys)
    mux_il = np.repeat(
        [profile.mux_insertion_loss_db[profile.mg_index(mg)] for _, mg in keys], MODES_PER_GROUP
    )
    demux_il = np.repeat(
        [profile.demux_insertion_loss_db[profile.mg_index(mg)] for _, mg in keys], MODES_PER_GROUP
    )
    mux = MuxDemuxMatrix(mux_il.astype(float), _coupling_matrix(levels, len(keys), 0.5, rng))
    demux = MuxDemuxMatrix(demux_il.astype(float), _coupling_matrix(levels, len(keys), 0.5, rng))
    couplings = []
    if profile.distributed_xt and profile.xt_sections > 1:
        section = _section_levels(profile, keys)
        couplings = [
            _coupling_matrix(section, len(keys), 1.0, rng) for _ in range(profile.xt_sections - 1)
        ]
    return DirectionalLink(groups=groups, mux=mux, demux=demux, section_couplings=couplings)


def _reverse_link(link: DirectionalLink) -> DirectionalLink:
    return DirectionalLink(
        groups={
            key: replace(group, intra=group.intra.transposed()) for key, group in link.groups.items()
        },
        mux=MuxDemuxMatrix(link.demux.insertion_loss_db.copy(), link.demux.xt_block.T.copy()),
        demux=MuxDemuxMatrix(link.mux.insertion_loss_db.copy(), link.mux.xt_block.T.copy()),
        section_couplings=[c.T.copy() for c in reversed(link.section_couplings)],
    )


def build_channel(profile: FiberProfile, seed: int, cores: Optional[Sequence[int]] = None) -> ChannelState:
    """Draw a frozen channel realization, deterministic in ``seed``.

    ``cores`` restricts the realization to a subset of cores; crosstalk
    levels still follow the full 7-core hexagonal layout.
    """
    profile.validate()
    selected = sorted(cores) if cores is not None else list(range(1, profile.cores + 1))
    keys = [(core, mg) for core in selected for mg in profile.mode_groups]
    forward_seq, backward_seq = np.random.SeedSequence([seed, 0xC4A7]).spawn(2)
    forward = _build_link(profile, keys, np.random.default_rng(forward_seq))
    if profile.reciprocal:
        backward = _reverse_link(forward)
    else:
        backward = _build_link(profile, keys, np.random.default_rng(backward_seq))
    logger.debug("Built channel seed=%d with %d groups", seed, len(keys))
    return ChannelState(
        profile=profile,
        seed=seed,
        group_keys=keys,
        links={Direction.FORWARD: forward, Direction.BACKWARD: backward},
    )


def _group_stage(
    group: GroupChannel, xg: np.ndarray, freqs: np.ndarray, section: int, n_sections: int
) -> np.ndarray:
    if section == 0:
        xg = group.intra.input_mixing @ xg
        for j, delay in enumerate(group.intra.delays_ps):
            if delay:
                xg[j] *= np.exp(-2j * np.pi * freqs * delay * 1e-12)
        xg = group.intra.mixing @ xg
    common = group.amplitude ** (1 / n_sections) * np.exp(
        -2j * np.pi * freqs * group.group_delay_ps * 1e-12 / n_sections
    )
    return xg * common


def propagate(
    channel: ChannelState,
    inputs: Mapping[ModeId, ComplexEnvelope],
    direction: Direction = Direction.FORWARD,
) -> dict[ModeId, ComplexEnvelope]:
    """Propagate whole-group inputs through MUX, fiber and DEMUX.

    Groups without inputs are dark. The result holds every mode of the
    channel, so leakage into dark groups is visible.
    """
    if not inputs:
        raise ShapeError("no input signals")
    n, fs, baud = check_compatible(inputs.values())
    present: dict[GroupKey, int] = {}
    for mode in inputs:
        if mode.direction is not direction:
            raise ShapeError(f"mode {mode} does not travel {direction.value}")
        key = (mode.core, mode.mode_group)
        present[key] = present.get(key, 0) + 1
    partial = [key for key, count in present.items() if count != MODES_PER_GROUP]
    if partial:
        raise ShapeError(f"inputs do not form whole 4-mode groups: {partial}")

    link = channel.links[direction]
    spectrum = np.zeros((channel.n_channels, n), dtype=np.complex128)
    for mode, env in inputs.items():
        spectrum[channel.channel_index(mode)] = np.fft.fft(env.samples)
    freqs = np.fft.fftfreq(n, d=1.0 / fs)

    spectrum = link.mux.as_mux() @ spectrum
    n_sections = len(link.section_couplings) + 1
    for section in range(n_sections):
        for key in channel.group_keys:
            rows = channel.group_slice(key)
            spectrum[rows] = _group_stage(link.groups[key], spectrum[rows], freqs, section, n_sections)
        if section < n_sections - 1:
            spectrum = link.section_couplings[section] @ spectrum
    spectrum = link.demux.as_demux() @ spectrum
    samples = np.fft.ifft(spectrum, axis=1)

    template = next(iter(inputs.values()))
    return {
        mode: ComplexEnvelope(
            samples=samples[channel.channel_index(mode)],
            sample_rate_hz=fs,
            symbol_rate_hz=baud,
            delay_symbols=template.delay_symbols,
        )
        for mode in channel.mode_ids(direction)
    }


def transfer_matrix(
    channel: ChannelState, freqs_hz: np.ndarray, direction: Direction = Direction.FORWARD
) -> np.ndarray:
    """(F, K, K) end-to-end field transfer matrix at the given frequencies."""
    link = channel.links[direction]
    freqs_hz = np.asarray(freqs_hz, dtype=float)
    n_sections = len(link.section_couplings) + 1
    k = channel.n_channels
    total = np.broadcast_to(link.mux.as_mux(), (freqs_hz.size, k, k)).copy()
    for section in range(n_sections):
        stage = np.zeros((freqs_hz.size, k, k), dtype=np.complex128)
        for key in channel.group_keys:
            rows = channel.group_slice(key)
            group = link.groups[key]
            common = group.amplitude ** (1 / n_sections) * np.exp(
                -2j * np.pi * freqs_hz * group.group_delay_ps * 1e-12 / n_sections
            )
            block = group.intra.response(freqs_hz) if section == 0 else np.eye(MODES_PER_GROUP)[None]
            stage[:, rows, rows] = block * common[:, None, None]
        total = stage @ total
        if section < n_sections - 1:
            total = link.section_couplings[section] @ total
    return link.demux.as_demux() @ total


@dataclass(slots=True)
class CrosstalkMatrix:
    """Group-to-group crosstalk in dB, indexed [launched, received]."""

    group_keys: list[GroupKey]
    db: np.ndarray

    def _aggregate(self, key: GroupKey, same_core: bool) -> float:
        a = self.group_keys.index(key)
        linear = 0.0
        for b, (core, mg) in enumerate(self.group_keys):
            if b == a:
                continue
            if same_core and core == key[0]:
                linear += 10 ** (self.db[a, b] / 10)
            elif not same_core and core != key[0] and mg == key[1]:
                linear += 10 ** (self.db[a, b] / 10)
        return 10 * math.log10(linear) if linear > 0 else -math.inf

    def intermg_aggregate(self, core: int, mode_group: int) -> float:
        """Power leaked into the other MGs of the same core."""
        return self._aggregate((core, mode_group), same_core=True)

    def intercore_aggregate(self, core: int, mode_group: int) -> float:
        """Power leaked into the same MG of other cores."""
        return self._aggregate((core, mode_group), same_core=False)

    def worst_intermg(self) -> float:
        return max(self.intermg_aggregate(*key) for key in self.group_keys)

    def worst_intercore(self) -> float:
        return max(self.intercore_aggregate(*key) for key in self.group_keys)


def measure_crosstalk(
    channel: ChannelState,
    direction: Direction = Direction.FORWARD,
    bandwidth_hz: float = 12e9,
    n_freqs: int = 64,
) -> CrosstalkMatrix:
    """Probe each group with unit power and integrate received power per group.

    Leakage is relative to the power surviving in the launched group;
    groups receiving nothing report ``-inf``.
    """
    freqs = np.linspace(-bandwidth_hz / 2, bandwidth_hz / 2, n_freqs)
    power = np.abs(transfer_matrix(channel, freqs, direction)) ** 2
    mean_power = power.mean(axis=0)
    n_groups = len(channel.group_keys)
    received = np.zeros((n_groups, n_groups))
    for a, key_a in enumerate(channel.group_keys):
        cols = channel.group_slice(key_a)
        for b, key_b in enumerate(channel.group_keys):
            received[a, b] = mean_power[channel.group_slice(key_b), cols].sum() / MODES_PER_GROUP
    with np.errstate(divide="ignore"):
        db = 10 * np.log10(received / np.diag(received)[:, None])
    return CrosstalkMatrix(group_keys=list(channel.group_keys), db=db)


def advance_drift(
    channel: ChannelState,
    dt: float,
    seed_stream: "int | np.random.Generator | np.random.SeedSequence",
) -> ChannelState:
    """Random-walk every intra-group output unitary by ``drift_rate * dt``.

    Each step left-multiplies: U <- expm(i eps H) U with a fresh Hermitian H
    per group, forward link first. End-module crosstalk blocks are left
    unchanged.
    """
    if dt < 0:
        raise ValueError("dt must be non-negative")
    if dt == 0:
        return channel
    rng = _rng(seed_stream)

    def drifted(link: DirectionalLink) -> DirectionalLink:
        groups = {}
        for key in channel.group_keys:
            group = link.groups[key]
            eps = group.intra.drift_rate * dt
            if eps == 0:
                groups[key] = group
                continue
            step = scipy.linalg.expm(1j * eps * random_hermitian(MODES_PER_GROUP, rng))
            mixing, _ = scipy.linalg.polar(step @ group.intra.mixing)
            groups[key] = replace(group, intra=replace(group.intra, mixing=mixing))
        return replace(link, groups=groups)

    forward = drifted(channel.links[Direction.FORWARD])
    if channel.profile.reciprocal:
        backward = _reverse_link(forward)
    else:
        backward = drifted(channel.links[Direction.BACKWARD])
    return replace(channel, links={Direction.FORWARD: forward, Direction.BACKWARD: backward})


def power_fluctuation_trace(
    channel: ChannelState,
    core: int,
    mode_group: int,
    times_s: Sequence[float],
    seed_stream: "int | np.random.Generator | np.random.SeedSequence",
    direction: Direction = Direction.FORWARD,
) -> tuple[np.ndarray, np.ndarray]:
    """Received (single-mode, whole-group) power for a launch into mode <+l,R>.

    Returns two arrays aligned with ``times_s``, in linear units relative to
    the launched power. The fiber-only transfer at DC is used so end-module
    crosstalk does not mask the drift.
    """
    rng = _rng(seed_stream)
    single, group_total = [], []
    previous = times_s[0] if len(times_s) else 0.0
    state = channel
    for t in times_s:
        state = advance_drift(state, max(0.0, t - previous), rng)
        previous = t
        group = state.links[direction].groups[(core, mode_group)]
        column = group.intra.response(np.zeros(1))[0][:, 0] * group.amplitude
        single.append(abs(column[0]) ** 2)
        group_total.append(float(np.sum(np.abs(column) ** 2)))
    return np.asarray(single), np.asarray(group_total)


def add_optical_noise(
    signal: ComplexEnvelope,
    osnr_db: Optional[float],
    ref_bandwidth_hz: float = 12.5e9,
    seed_stream: "int | np.random.Generator | np.random.SeedSequence" = 0,
    polarization_share: float = 1.0,
    signal_power: Optional[float] = None,
) -> ComplexEnvelope:
    """Add white circular Gaussian noise at the requested OSNR.

    Signal power over the noise power falling inside ``ref_bandwidth_hz``
    equals ``osnr_db`` (scaled by ``polarization_share`` for a single
    polarization tributary). ``None`` or ``+inf`` leaves the signal as is.
    """
    if len(signal) == 0:
        raise ShapeError("cannot add noise to an empty signal")
    if osnr_db is None or math.isinf(osnr_db) and osnr_db > 0:
        return signal
    if not math.isfinite(osnr_db):
        raise ValueError("osnr_db must be finite or +inf")
    power = signal.power if signal_power is None else signal_power
    noise_in_ref = power / 10 ** (osnr_db / 10)
    noise_power = noise_in_ref * signal.sample_rate_hz / ref_bandwidth_hz * polarization_share
    rng = _rng(seed_stream)
    noise = rng.standard_normal(len(signal)) + 1j * rng.standard_normal(len(signal))
    return signal.with_samples(signal.samples + noise * math.sqrt(noise_power / 2))


def gaussian_probe(n_samples: int, sample_rate_hz: float, center_s: float, width_s: float) -> np.ndarray:
    t = np.arange(n_samples) / sample_rate_hz
    return np.exp(-0.5 * ((t - center_s) / width_s) ** 2).astype(np.complex128)


@dataclass(slots=True)
class ImpulseResponse:
    times_s: np.ndarray
    power: np.ndarray

    def peaks(self, rel_height: float = 0.5) -> np.ndarray:
        """Peak times (s), refined by parabolic interpolation."""
        indices, _ = scipy.signal.find_peaks(self.power, height=rel_height * self.power.max())
        dt = self.times_s[1] - self.times_s[0]
        refined = []
        for i in indices:
            if 0 < i < self.power.size - 1:
                y0, y1, y2 = self.power[i - 1 : i + 2]
                denom = y0 - 2 * y1 + y2
                offset = 0.5 * (y0 - y2) / denom if denom else 0.0
            else:
                offset = 0.0
            refined.append(self.times_s[i] + offset * dt)
        return np.asarray(refined)


def impulse_response(
    channel: ChannelState,
    core: int,
    probe_mg_set: Sequence[int],
    direction: Direction = Direction.FORWARD,
    sample_rate_hz: float = 24e9,
    pulse_width_s: float = 0.5e-9,
    lead_s: float = 5e-9,
) -> ImpulseResponse:
    """Power profile at the core's outputs after incoherent probing of each mode.

    A Gaussian probe is launched into every mode of each probe group in turn;
    received powers over all modes of the core are summed.
    """
    span_s = max(channel.profile.group_delay_ns(mg) for mg in probe_mg_set) * 1e-9
    n = 1 << int(math.ceil(math.log2((span_s + 2 * lead_s) * sample_rate_hz)))
    probe = gaussian_probe(n, sample_rate_hz, lead_s, pulse_width_s)
    zeros = np.zeros(n, dtype=np.complex128)
    power = np.zeros(n)
    core_modes = [m for m in channel.mode_ids(direction) if m.core == core]
    for mg in probe_mg_set:
        modes = group_mode_ids(core, mg, direction)
        for launched in modes:
            inputs = {
                m: ComplexEnvelope(probe if m == launched else zeros, sample_rate_hz, sample_rate_hz / 2)
                for m in modes
            }
            outputs = propagate(channel, inputs, direction)
            for mode in core_modes:
                power += np.abs(outputs[mode].samples) ** 2
    return ImpulseResponse(times_s=np.arange(n) / sample_rate_hz, power=power)


def estimate_dgd(response: ImpulseResponse, length_km: float) -> float:
    """Inter-MG DGD in ns/km from the two strongest response peaks."""
    peaks = response.peaks()
    if peaks.size < 2:
        return 0.0
    heights = np.interp(peaks, response.times_s, response.power)
    first, second = np.sort(peaks[np.argsort(heights)[-2:]])
    return (second - first) * 1e9 / length_km
