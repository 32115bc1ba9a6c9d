"""Named experiments composing transmitter, channel, backscatter, receiver and metrics."""

import logging
import math
import time
import zlib
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Optional, Sequence

import numpy as np

from .config import (
    BidirNoiseConfig,
    DspConfig,
    ExperimentConfig,
    SeConfig,
    config_hash,
    mode_key,
)
from .constants import Direction
from .envelope import ComplexEnvelope, ModeId, group_mode_ids
from .errors import AdaptationError, EstimationError, NoLockError
from .fiberchan import (
    ChannelState,
    add_optical_noise,
    advance_drift,
    build_channel,
    measure_crosstalk,
    power_fluctuation_trace,
    propagate,
)
from .metrics import (
    align_group,
    aligned_reference_symbols,
    capacity,
    complexity_points,
    count_rncm_per_bit,
    ledger_from_profile,
    power_budget,
    published_ledgers,
    rncm_per_bit,
    snr_evm,
    spectral_efficiency,
)
from .rbnoise import (
    backscatter_to_signal,
    backward_mode,
    backward_noise_budget,
    cmrr_factor,
    dbm_to_watts,
    detected_ratio,
    facet_reflection,
    fresnel_field,
    rb_as_noise_field,
    rb_field,
    received_signal_w,
)
from .report import ChannelRow, LinkReport
from .runner import ChannelJob, ChannelJobRunner
from .rxdsp import MimoEqualizerState, apply_front_end, receive_group
from .txgen import (
    PrbsDescriptor,
    PrbsGenerator,
    PulseShaper,
    Transmission,
    transmit,
)

logger = logging.getLogger(__name__)

GroupKey = tuple[int, int]
MONOTONE_TOLERANCE_DB = 0.1
RB_FIELD_TOLERANCE_DB = 1.0
PUBLISHED_RECEIVED_DBM = (-24.59, -24.60, -24.74)
SCENARIOS = ("same", "different", "multiplexed")


def seed_sequence(seed: int, *parts: Any) -> np.random.SeedSequence:
    """Independent stream keyed by the job identity, not by execution order."""
    return np.random.SeedSequence(
        [seed, *(zlib.crc32(str(part).encode()) for part in parts)]
    )


def seed_int(seed: int, *parts: Any) -> int:
    return int(seed_sequence(seed, *parts).generate_state(1, dtype=np.uint64)[0])


def rng_for(seed: int, *parts: Any) -> np.random.Generator:
    return np.random.default_rng(seed_sequence(seed, *parts))


def shaper_for(cfg: ExperimentConfig) -> PulseShaper:
    link = cfg.link
    return PulseShaper(link.roll_off, link.samples_per_symbol, link.span_symbols)


def prbs_for(cfg: ExperimentConfig, mode: ModeId, wavelength: int) -> PrbsGenerator:
    return PrbsGenerator.from_seed(
        seed_int(
            cfg.seed, "prbs", wavelength, mode.direction.value, mode.core, mode.label
        )
    )


def transmit_groups(
    cfg: ExperimentConfig,
    keys: Sequence[GroupKey],
    direction: Direction,
    wavelength: int,
    n_symbols: int,
    generators: Optional[dict[ModeId, PrbsGenerator]] = None,
) -> dict[ModeId, Transmission]:
    """Shaped signals for every mode of the given groups.

    Passing ``generators`` continues their PRBS streams across calls.
    """
    shaper = shaper_for(cfg)
    out = {}
    for core, mg in keys:
        for mode in group_mode_ids(core, mg, direction):
            if generators is not None:
                gen = generators[mode]
            else:
                gen = prbs_for(cfg, mode, wavelength)
            out[mode] = transmit(gen, n_symbols, shaper, cfg.link.baud_hz)
    return out


def backward_launch(cfg: ExperimentConfig, core: int) -> BidirNoiseConfig:
    """Counter-propagating launch seen by the receivers of one core.

    Without explicit backward powers every mode of the link's MGs
    counter-propagates at the forward per-mode power.
    """
    if cfg.noise.p_backward_dbm:
        return cfg.noise
    powers = {
        mode_key(core, m.charge, m.polarization.value): cfg.noise.p_forward_dbm
        for mg in cfg.link.mode_groups
        for m in group_mode_ids(core, mg)
    }
    return replace(cfg.noise, p_backward_dbm=powers)


def propagate_with_drift(
    channel: ChannelState,
    inputs: dict[ModeId, ComplexEnvelope],
    direction: Direction,
    segments: int,
    rng: np.random.Generator,
) -> tuple[dict[ModeId, ComplexEnvelope], ChannelState]:
    """Piecewise-frozen drift across one block.

    Returns the spliced outputs and the channel state at the end of the block.
    """
    if segments <= 1 or channel.profile.drift_rate == 0:
        return propagate(channel, inputs, direction), channel
    first = next(iter(inputs.values()))
    n = len(first)
    step = n / first.sample_rate_hz / segments
    bounds = np.linspace(0, n, segments + 1).astype(int)
    pieces: dict[ModeId, list[np.ndarray]] = {}
    state = channel
    out: dict[ModeId, ComplexEnvelope] = {}
    for s in range(segments):
        out = propagate(state, inputs, direction)
        for mode, env in out.items():
            pieces.setdefault(mode, []).append(env.samples[bounds[s] : bounds[s + 1]])
        state = advance_drift(state, step, rng)
    spliced = {
        mode: out[mode].with_samples(np.concatenate(parts))
        for mode, parts in pieces.items()
    }
    return spliced, state


def add_receiver_noise(
    cfg: ExperimentConfig,
    outputs: dict[ModeId, ComplexEnvelope],
    rng: np.random.Generator,
    backscatter: Optional[dict[GroupKey, float]] = None,
) -> dict[ModeId, ComplexEnvelope]:
    """ASE on every output, plus backscatter where ``backscatter`` has a ratio.

    ``backscatter`` maps (core, MG) to the linear backscatter-to-signal ratio.
    """
    received = {}
    for mode, env in outputs.items():
        noisy = add_optical_noise(
            env,
            cfg.link.osnr_db,
            cfg.link.ref_bandwidth_hz,
            rng,
            polarization_share=cfg.link.ase_polarization_share,
        )
        ratio = (backscatter or {}).get((mode.core, mode.mode_group), 0.0)
        if ratio > 0:
            scattered = rb_as_noise_field(env.power * ratio, env, rng)
            noisy = noisy.with_samples(noisy.samples + scattered.samples)
        received[mode] = noisy
    return received


def receive_link(
    cfg: ExperimentConfig,
    channel: ChannelState,
    transmissions: dict[ModeId, Transmission],
    direction: Direction,
    rng: np.random.Generator,
    backscatter: Optional[dict[GroupKey, float]] = None,
    segments: Optional[int] = None,
) -> tuple[dict[ModeId, ComplexEnvelope], ChannelState]:
    """Propagate one block and add the receiver-side optical noise."""
    inputs = {mode: tx.envelope for mode, tx in transmissions.items()}
    outputs, state = propagate_with_drift(
        channel,
        inputs,
        direction,
        cfg.link.drift_segments if segments is None else segments,
        rng,
    )
    return add_receiver_noise(cfg, outputs, rng, backscatter), state


@dataclass
class GroupJobResult:
    rows: list[ChannelRow]
    taps: Optional[list] = None
    dsp: dict[str, Any] = field(default_factory=dict)
    state: Optional[MimoEqualizerState] = None
    mean_snr_db: float = math.nan


def _mean_db(values_db: Sequence[float]) -> float:
    finite = [v for v in values_db if math.isfinite(v)]
    if not finite:
        return math.inf if values_db else math.nan
    return float(10 * np.log10(np.mean([10 ** (v / 10) for v in finite])))


def receive_group_job(
    samples: np.ndarray,
    sample_rate_hz: float,
    symbol_rate_hz: float,
    modes: list[ModeId],
    references: list[PrbsDescriptor],
    cfg: ExperimentConfig,
    front_end_seed: int,
    dsp: Optional[DspConfig] = None,
    state: Optional[MimoEqualizerState] = None,
    passes: Optional[int] = None,
    min_bits: Optional[int] = None,
    wavelength: int = 0,
    point: str = "",
) -> GroupJobResult:
    """Blind DSP plus alignment for one group; DSP failures become failed rows."""
    dsp = dsp or cfg.dsp
    envelopes = [ComplexEnvelope(s, sample_rate_hz, symbol_rate_hz) for s in samples]
    envelopes = apply_front_end(envelopes, cfg.front_end, front_end_seed)
    try:
        result = receive_group(
            envelopes,
            dsp,
            state=state,
            roll_off=cfg.link.roll_off,
            rx_filter_excess=cfg.link.rx_filter_excess,
            passes=passes,
        )
        n_bits = result.bits[0].size
        alignments = align_group(
            result.bits,
            references,
            min_bits=n_bits if min_bits is None else min_bits,
        )
    except AdaptationError as exc:
        logger.warning("Group %s%s diverged: %s", point, modes[0].label, exc)
        return GroupJobResult(
            [ChannelRow.failed(m, "diverged", wavelength, point) for m in modes]
        )
    except (EstimationError, NoLockError) as exc:
        logger.warning("Group %s%s lost lock: %s", point, modes[0].label, exc)
        return GroupJobResult(
            [ChannelRow.failed(m, "no_lock", wavelength, point) for m in modes]
        )

    rows = []
    for i, alignment in enumerate(alignments):
        j = alignment.reference_index
        reference = aligned_reference_symbols(alignment, references[j])
        snr, evm = snr_evm(result.symbols[i], reference)
        rows.append(
            ChannelRow.measured(
                modes[j],
                alignment.ber,
                (alignment.ci_low, alignment.ci_high),
                snr,
                evm,
                wavelength,
                point,
            )
        )
    return GroupJobResult(
        rows=rows,
        taps=result.state.to_json(),
        dsp=result.report.to_dict(),
        state=result.state,
        mean_snr_db=_mean_db([row.snr_db for row in rows]),
    )


def _group_job(
    cfg: ExperimentConfig,
    received: dict[ModeId, ComplexEnvelope],
    transmissions: dict[ModeId, Transmission],
    core: int,
    mg: int,
    direction: Direction,
    wavelength: int = 0,
    point: str = "",
    front_end_parts: tuple = (),
    **extra: Any,
) -> ChannelJob:
    modes = group_mode_ids(core, mg, direction)
    first = received[modes[0]]
    return ChannelJob(
        key=(point, wavelength, direction.value, core, mg),
        func=receive_group_job,
        kwargs={
            "samples": np.stack([received[m].samples for m in modes]),
            "sample_rate_hz": first.sample_rate_hz,
            "symbol_rate_hz": first.symbol_rate_hz,
            "modes": modes,
            "references": [transmissions[m].reference for m in modes],
            "cfg": cfg,
            "front_end_seed": seed_int(
                cfg.seed,
                "front_end",
                wavelength,
                direction.value,
                core,
                mg,
                *front_end_parts,
            ),
            "wavelength": wavelength,
            "point": point,
            **extra,
        },
    )


def _run_jobs(
    jobs: list[ChannelJob], runner: ChannelJobRunner
) -> list[GroupJobResult]:
    results = []
    for outcome in runner.run(jobs):
        if outcome.ok:
            results.append(outcome.result)
            continue
        point, wavelength, direction, core, mg = outcome.key
        modes = group_mode_ids(core, mg, Direction(direction))
        results.append(
            GroupJobResult(
                [ChannelRow.failed(m, "no_lock", wavelength, point) for m in modes]
            )
        )
    return results


def _status(runner: ChannelJobRunner) -> dict[str, Any]:
    status = runner.get_status()
    status["state"] = status["state"].value
    return status


def _group_keys(cfg: ExperimentConfig, cores: Sequence[int]) -> list[GroupKey]:
    return [(core, mg) for core in cores for mg in cfg.link.mode_groups]


def _backscatter_map(
    cfg: ExperimentConfig, keys: Sequence[GroupKey]
) -> dict[GroupKey, float]:
    if not cfg.link.inject_backscatter:
        return {}
    return {
        (core, mg): backscatter_to_signal(backward_launch(cfg, core), core, mg)
        for core, mg in keys
    }


def mean_ber_by_group(rows: Sequence[ChannelRow]) -> dict[int, float]:
    by_mg: dict[int, list[float]] = {}
    for row in rows:
        if not math.isnan(row.ber):
            by_mg.setdefault(row.mode.mode_group, []).append(row.ber)
    return {mg: float(np.mean(values)) for mg, values in sorted(by_mg.items())}


def crosstalk_rows(
    cfg: ExperimentConfig, channel: ChannelState, wavelength: int = 0
) -> list[dict[str, Any]]:
    """Measured aggregate crosstalk of every group under test next to the profile targets."""
    xt = measure_crosstalk(channel, Direction.FORWARD, cfg.link.baud_hz)
    rows = []
    for core, mg in _group_keys(cfg, cfg.link.cores_under_test):
        rows.append(
            {
                "wavelength": wavelength,
                "core": core,
                "mode_group": mg,
                "intermg_db": xt.intermg_aggregate(core, mg),
                "intermg_target_db": cfg.profile.xt_intermg_db,
                "intercore_db": xt.intercore_aggregate(core, mg),
                "intercore_target_db": cfg.profile.xt_intercore_db,
            }
        )
    return rows


def run_ber_grid(
    cfg: ExperimentConfig, runner: Optional[ChannelJobRunner] = None
) -> LinkReport:
    """BER of every (core, MG, direction) channel at the configured wavelengths."""
    runner = runner or ChannelJobRunner(cfg.parallel)
    report = LinkReport("ber_grid", cfg.seed, config_hash(cfg))
    cores = cfg.link.simulated_cores
    keys = _group_keys(cfg, cores)
    backscatter = _backscatter_map(cfg, keys)
    crosstalk: list[dict[str, Any]] = []
    for wavelength in range(cfg.link.wavelengths):
        channel = build_channel(
            cfg.profile, seed_int(cfg.seed, "channel", wavelength), cores
        )
        crosstalk.extend(crosstalk_rows(cfg, channel, wavelength))
        for direction in cfg.link.direction_enums():
            logger.info(
                "Simulating wavelength %d, %s direction", wavelength, direction.value
            )
            tx = transmit_groups(cfg, keys, direction, wavelength, cfg.symbols)
            rx, _ = receive_link(
                cfg,
                channel,
                tx,
                direction,
                rng_for(cfg.seed, "link", wavelength, direction.value),
                backscatter,
            )
            jobs = [
                _group_job(cfg, rx, tx, core, mg, direction, wavelength)
                for core, mg in _group_keys(cfg, cfg.link.cores_under_test)
            ]
            for job, result in zip(jobs, _run_jobs(jobs, runner)):
                report.rows.extend(result.rows)
                if result.taps is not None:
                    _, _, dir_name, core, mg = job.key
                    name = f"core{core}/MG{mg}/{dir_name}/w{wavelength}"
                    report.taps[name] = result.taps

    means = mean_ber_by_group(report.rows)
    report.summary = {
        "mean_ber_by_mode_group": {str(k): v for k, v in means.items()},
        "worst_intermg_db": max((r["intermg_db"] for r in crosstalk), default=-math.inf),
        "worst_intercore_db": max((r["intercore_db"] for r in crosstalk), default=-math.inf),
    }
    report.tables["crosstalk"] = crosstalk
    logger.info(
        "Aggregate XT: inter-MG %.1f dB, inter-core %.1f dB",
        report.summary["worst_intermg_db"],
        report.summary["worst_intercore_db"],
    )
    if cfg.acceptance:
        counts = report.counts()
        report.check(
            "all_channels_below_fec",
            counts["failed"] == 0,
            f"{counts['failed']} of {counts['total']} channels fail",
        )
        if {2, 3, 4} <= set(means):
            report.check(
                "mode_group_3_worst",
                means[3] >= means[2] and means[3] >= means[4],
                f"mean BER by MG: {means}",
            )
    report.telemetry["runner"] = _status(runner)
    return report


def scenario_backward_powers(
    cfg: ExperimentConfig, core: int, scenario: str, power_dbm: float
) -> dict[str, float]:
    """Backward launch for one sweep scenario, keyed like ``"1:+3R"``."""
    same = mode_key(core, cfg.sweep.forward_mode_group, "R")
    other = mode_key(core, cfg.sweep.other_mode_group, "R")
    if scenario == "same":
        return {same: power_dbm}
    if scenario == "different":
        return {other: power_dbm}
    if scenario == "multiplexed":
        return {same: power_dbm, other: power_dbm}
    raise ValueError(f"unknown scenario {scenario!r}")


@dataclass
class BackscatterShapes:
    """Per-backward-mode fields at one forward group for 1 W of backward launch.

    ``rb`` and ``fresnel`` hold (4, n) arrays in sqrt(W) keyed by backward
    mode key; fields scale with the square root of the launch power.
    """

    rb: dict[str, np.ndarray] = field(default_factory=dict)
    fresnel: dict[str, np.ndarray] = field(default_factory=dict)

    def fields(self, backward_dbm: dict[str, float]) -> tuple[np.ndarray, np.ndarray]:
        """Summed (RB, Fresnel) fields for one backward launch."""
        first = next(iter(self.rb.values()))
        rb = np.zeros_like(first)
        fresnel = np.zeros_like(first)
        for key, dbm in backward_dbm.items():
            amplitude = math.sqrt(dbm_to_watts(dbm))
            rb = rb + amplitude * self.rb[key]
            fresnel = fresnel + amplitude * self.fresnel[key]
        return rb, fresnel


def backscatter_shapes(
    cfg: ExperimentConfig,
    channel: ChannelState,
    noise: BidirNoiseConfig,
    core: int,
    forward_mg: int,
    keys: Sequence[str],
    n_symbols: int,
) -> BackscatterShapes:
    """Transmit each backward mode once and build its RB and Fresnel fields."""
    shaper = shaper_for(cfg)
    shapes = BackscatterShapes()
    for key in sorted(keys):
        mode = backward_mode(key)
        tx = transmit(prbs_for(cfg, mode, 0), n_symbols, shaper, cfg.link.baud_hz).envelope
        shapes.rb[key] = rb_field(
            tx, 1.0, noise, forward_mg, mode.mode_group, rng_for(cfg.seed, "sweep_rb", key)
        )
        lit = {
            m: tx if m == mode else tx.with_samples(np.zeros(len(tx), dtype=np.complex128))
            for m in group_mode_ids(core, mode.mode_group, Direction.BACKWARD)
        }
        returned = facet_reflection(channel, lit)
        # a reflection in another group reaches this receiver through DEMUX leakage
        rows = np.stack(
            [returned[m].samples for m in group_mode_ids(core, mode.mode_group, Direction.FORWARD)]
        )
        shapes.fresnel[key] = fresnel_field(
            rows, 1.0, noise, same_mode=mode.mode_group == forward_mg
        )
    return shapes


def run_backward_power_sweep(
    cfg: ExperimentConfig, runner: Optional[ChannelJobRunner] = None
) -> LinkReport:
    """Forward SNR of the swept MG versus counter-propagating launch power.

    Backward modes are transmitted and turned into backscattered fields:
    distributed Rayleigh reflectors along the fiber plus the far-facet
    reflection carried through the channel. The forward block is propagated
    once; each point adds the fields for its launch powers, and the RB
    ratio is measured on the realized field.
    """
    runner = runner or ChannelJobRunner(cfg.parallel)
    report = LinkReport("backward_power_sweep", cfg.seed, config_hash(cfg))
    sweep = cfg.sweep
    core = cfg.link.cores_under_test[0]
    mg = sweep.forward_mode_group
    cores = cfg.link.simulated_cores
    channel = build_channel(cfg.profile, seed_int(cfg.seed, "channel", 0), cores)
    tx = transmit_groups(
        cfg, _group_keys(cfg, cores), Direction.FORWARD, 0, sweep.sweep_symbols
    )
    modes = group_mode_ids(core, mg, Direction.FORWARD)
    clean = propagate(channel, {m: t.envelope for m, t in tx.items()})
    clean = {m: clean[m] for m in modes}
    rx = add_receiver_noise(cfg, clean, rng_for(cfg.seed, "sweep_link"))
    forward_noise = replace(cfg.noise, p_forward_dbm=sweep.forward_power_dbm)
    signal_power = float(np.mean([clean[m].power for m in modes]))
    # simulation power units per watt at the forward receiver
    scale = signal_power / received_signal_w(forward_noise)

    points: list[tuple[str, float, dict[str, float]]] = [("baseline", -math.inf, {})]
    for scenario in SCENARIOS:
        for power in sweep.backward_powers_dbm:
            backward = scenario_backward_powers(cfg, core, scenario, power)
            points.append((scenario, power, backward))
    keys = {key for _, _, backward in points for key in backward}
    shapes = backscatter_shapes(
        cfg, channel, forward_noise, core, mg, sorted(keys), sweep.sweep_symbols
    )

    jobs = []
    analytic = []
    measured_rb = []
    cmrr = cmrr_factor(forward_noise.cmrr_db)
    for scenario, power, backward in points:
        noise = replace(forward_noise, p_backward_dbm=backward)
        analytic.append(detected_ratio(noise, core, mg).ratio_db)
        if not backward:
            measured_rb.append(math.inf)
            point_rx = rx
        else:
            rb, fresnel = shapes.fields(backward)
            rb_w = float(np.mean(np.abs(rb) ** 2)) * scale * cmrr
            measured_rb.append(
                10 * math.log10(signal_power / rb_w) if rb_w > 0 else math.inf
            )
            total = (rb + fresnel) * math.sqrt(scale)
            point_rx = {
                m: rx[m].with_samples(rx[m].samples + total[i])
                for i, m in enumerate(modes)
            }
        label = scenario if not backward else f"{scenario}@{power:+.1f}dBm"
        jobs.append(
            _group_job(cfg, point_rx, tx, core, mg, Direction.FORWARD, point=label)
        )

    table = []
    budget = []
    results = _run_jobs(jobs, runner)
    for (scenario, power, backward), ratio_db, field_db, result in zip(
        points, analytic, measured_rb, results
    ):
        report.rows.extend(result.rows)
        bers = [row.ber for row in result.rows if not math.isnan(row.ber)]
        table.append(
            {
                "scenario": scenario,
                "backward_power_dbm": power,
                "measured_snr_db": result.mean_snr_db,
                "measured_rb_ratio_db": field_db,
                "analytic_ratio_db": ratio_db,
                "mean_ber": float(np.mean(bers)) if bers else math.nan,
            }
        )
        noise_budget = backward_noise_budget(
            replace(forward_noise, p_backward_dbm=backward),
            core,
            mg,
            cfg.link.osnr_db,
            cfg.link.ase_polarization_share,
        )
        budget.append(
            {"scenario": scenario, "backward_power_dbm": power, **noise_budget.to_dict()}
        )
    report.tables["backward_power_sweep"] = table
    report.tables["noise_budget"] = budget
    if cfg.acceptance:
        check_sweep(report, table)
    report.telemetry["runner"] = _status(runner)
    return report


def check_sweep(report: LinkReport, table: list[dict[str, Any]]) -> None:
    """Ordering checks on a backward-power sweep table."""
    by_scenario: dict[str, list[dict[str, Any]]] = {}
    for row in table:
        by_scenario.setdefault(row["scenario"], []).append(row)
    for rows in by_scenario.values():
        rows.sort(key=lambda r: r["backward_power_dbm"])
    baseline = by_scenario.get("baseline", [{"measured_snr_db": math.inf}])[0]
    tol = MONOTONE_TOLERANCE_DB

    for scenario in SCENARIOS:
        rows = by_scenario.get(scenario, [])
        measured = [r["measured_snr_db"] for r in rows]
        ratios = [r["analytic_ratio_db"] for r in rows]
        fields = [r.get("measured_rb_ratio_db", r["analytic_ratio_db"]) for r in rows]
        report.check(
            f"{scenario}_measured_below_rb_ratio",
            all(m <= f + tol for m, f in zip(measured, fields)),
            f"measured SNR {measured} vs RB field ratio {fields}",
        )
        report.check(
            f"{scenario}_rb_field_matches_analytic",
            all(abs(f - a) <= RB_FIELD_TOLERANCE_DB for f, a in zip(fields, ratios)),
            f"RB field ratio {fields} vs analytic {ratios}",
        )
        previous = [baseline["measured_snr_db"], *measured]
        report.check(
            f"{scenario}_monotone",
            all(b <= a + tol for a, b in zip(previous, measured))
            and all(b < a for a, b in zip(ratios, ratios[1:])),
            f"measured {measured}",
        )

    single: dict[float, float] = {}
    for scenario in ("same", "different"):
        for r in by_scenario.get(scenario, []):
            power = r["backward_power_dbm"]
            single[power] = min(single.get(power, math.inf), r["measured_snr_db"])
    multiplexed = [
        r for r in by_scenario.get("multiplexed", []) if r["backward_power_dbm"] in single
    ]
    report.check(
        "multiplexed_not_better",
        all(
            r["measured_snr_db"] <= single[r["backward_power_dbm"]] + tol
            for r in multiplexed
        ),
        "multiplexed backward launch versus the worse single-mode launch",
    )


def run_tap_count_sweep(
    cfg: ExperimentConfig, runner: Optional[ChannelJobRunner] = None
) -> LinkReport:
    """BER of one isolated group versus equalizer tap count."""
    runner = runner or ChannelJobRunner(cfg.parallel)
    report = LinkReport("tap_count_sweep", cfg.seed, config_hash(cfg))
    core = cfg.link.cores_under_test[0]
    mg = cfg.sweep.forward_mode_group
    profile = replace(cfg.profile, xt_intermg_db=None, xt_intercore_db=None)
    channel = build_channel(profile, seed_int(cfg.seed, "channel", 0), [core])
    tx = transmit_groups(
        cfg, [(core, mg)], Direction.FORWARD, 0, cfg.sweep.sweep_symbols
    )
    link_cfg = replace(cfg, link=replace(cfg.link, inject_backscatter=False))
    rx, _ = receive_link(
        link_cfg, channel, tx, Direction.FORWARD, rng_for(cfg.seed, "taps_link")
    )

    jobs = [
        _group_job(
            cfg,
            rx,
            tx,
            core,
            mg,
            Direction.FORWARD,
            point=f"taps={n:02d}",
            dsp=replace(cfg.dsp, taps=n),
        )
        for n in cfg.sweep.tap_counts
    ]
    table = []
    for n, result in zip(cfg.sweep.tap_counts, _run_jobs(jobs, runner)):
        report.rows.extend(result.rows)
        bers = [row.ber for row in result.rows]
        locked = not any(math.isnan(b) for b in bers)
        table.append(
            {
                "taps": n,
                "span_ps": n / cfg.link.sample_rate_hz * 1e12,
                "mean_ber": float(np.mean(bers)) if locked else math.nan,
                "status": "locked" if locked else result.rows[0].status,
                "passed": all(row.passed for row in result.rows),
            }
        )
    report.tables["tap_count_sweep"] = table
    knee = next((r["taps"] for r in table if r["passed"]), None)
    report.summary = {"knee_taps": knee}
    if cfg.acceptance:
        by_taps = {r["taps"]: r for r in table}
        if 15 in by_taps:
            report.check("passes_at_15_taps", by_taps[15]["passed"], str(by_taps[15]))
        if 3 in by_taps:
            report.check("fails_at_3_taps", not by_taps[3]["passed"], str(by_taps[3]))
    report.telemetry["runner"] = _status(runner)
    return report


def tap_change(before: np.ndarray, after: np.ndarray) -> float:
    """Relative Frobenius change of the tap tensor."""
    reference = np.linalg.norm(before)
    if not reference:
        return math.inf
    return float(np.linalg.norm(after - before) / reference)


def track_drift(cfg: ExperimentConfig, drift_rate: float) -> list[dict[str, Any]]:
    """Windowed BER and tap change for one drift rate with a carried equalizer."""
    sweep = cfg.sweep
    core = cfg.link.cores_under_test[0]
    mg = sweep.forward_mode_group
    keys = [(core, m) for m in cfg.link.mode_groups]
    profile = replace(cfg.profile, drift_rate=drift_rate)
    channel = build_channel(profile, seed_int(cfg.seed, "channel", 0), [core])
    generators = {
        mode: prbs_for(cfg, mode, 0)
        for key in keys
        for mode in group_mode_ids(*key, Direction.FORWARD)
    }
    drift_rng = rng_for(cfg.seed, "drift", drift_rate)
    trace_rng = rng_for(cfg.seed, "drift_trace", drift_rate)
    backscatter = _backscatter_map(cfg, keys)
    substep = sweep.drift_window_interval_s / sweep.drift_substeps
    state: Optional[MimoEqualizerState] = None
    windows = []
    for w in range(sweep.drift_windows):
        if w:
            for _ in range(sweep.drift_substeps):
                channel = advance_drift(channel, substep, drift_rng)
        tx = transmit_groups(
            cfg, keys, Direction.FORWARD, 0, sweep.drift_window_symbols, generators
        )
        rx, _ = receive_link(
            cfg,
            channel,
            tx,
            Direction.FORWARD,
            rng_for(cfg.seed, "drift_link", drift_rate, w),
            backscatter,
            segments=1,
        )
        job = _group_job(
            cfg,
            rx,
            tx,
            core,
            mg,
            Direction.FORWARD,
            point=f"rate={drift_rate:g}/w{w:03d}",
            front_end_parts=(drift_rate, w),
            state=state,
            passes=None if state is None else 1,
        )
        result = receive_group_job(**job.kwargs)
        locked = result.state is not None
        change = math.nan
        if locked and state is not None:
            change = tap_change(state.taps, result.state.taps)
        single, group_power = power_fluctuation_trace(
            channel, core, mg, [0.0], trace_rng
        )
        bers = [row.ber for row in result.rows]
        windows.append(
            {
                "drift_rate": drift_rate,
                "window": w,
                "time_s": w * sweep.drift_window_interval_s,
                "ber": float(np.mean(bers)) if locked else math.nan,
                "tap_change": change,
                "single_mode_power": float(single[0]),
                "group_power": float(group_power[0]),
                "tracked": locked and all(row.passed for row in result.rows),
                "rows": result.rows,
            }
        )
        if locked:
            state = result.state
        else:
            logger.warning("Drift rate %g: lost track in window %d", drift_rate, w)
    return windows


def run_drift_tracking(
    cfg: ExperimentConfig, runner: Optional[ChannelJobRunner] = None
) -> LinkReport:
    """Equalizer tracking of a slowly drifting intra-group channel."""
    runner = runner or ChannelJobRunner(cfg.parallel)
    report = LinkReport("drift_tracking", cfg.seed, config_hash(cfg))
    rates = cfg.sweep.drift_rates
    jobs = [
        ChannelJob(key=rate, func=track_drift, kwargs={"cfg": cfg, "drift_rate": rate})
        for rate in rates
    ]
    series = []
    failures = {}
    for rate, outcome in zip(rates, runner.run(jobs)):
        windows = outcome.result if outcome.ok else []
        for window in windows:
            report.rows.extend(window.pop("rows"))
            series.append(window)
        failed = sum(1 for w in windows if not w["tracked"])
        failures[f"{rate:g}"] = failed / len(windows) if windows else 1.0
        if failed:
            logger.warning(
                "Drift rate %g: %d of %d windows failed", rate, failed, len(windows)
            )
    report.tables["drift_tracking"] = series
    report.summary = {"failure_rate": failures}
    if cfg.acceptance:
        for rate in rates:
            if rate <= cfg.profile.drift_rate:
                report.check(
                    f"tracks_drift_rate_{rate:g}",
                    failures[f"{rate:g}"] == 0,
                    f"failure rate {failures[f'{rate:g}']:.2f}",
                )
    report.telemetry["runner"] = _status(runner)
    return report


def _ledger_row(source: str, ledger) -> dict[str, Any]:
    result = power_budget(ledger)
    return {
        "source": source,
        **ledger.to_dict(),
        "received_dbm": result.received_dbm,
        "below_sensitivity": result.below_sensitivity,
    }


def run_budget_and_complexity(
    cfg: ExperimentConfig, runner: Optional[ChannelJobRunner] = None
) -> LinkReport:
    """Power-budget ledgers, headline SE/capacity and the SE-versus-RNCM table."""
    report = LinkReport(cfg.experiment, cfg.seed, config_hash(cfg))
    ledgers = [_ledger_row("published", ledger) for ledger in published_ledgers()]
    core = cfg.link.cores_under_test[0]
    for mg in cfg.profile.mode_groups:
        ledger = ledger_from_profile(cfg.profile, mg, cfg.noise.p_forward_dbm, core)
        ledgers.append(_ledger_row("profile", ledger))
    report.tables["power_budget"] = ledgers

    se = spectral_efficiency(cfg.se)
    cap = capacity(cfg.se)
    rncm = rncm_per_bit(4, cfg.dsp.taps, cfg.se.bits_per_symbol)
    report.summary = {
        "raw_se": se.raw,
        "net_se": se.net,
        "raw_capacity_bps": cap.raw,
        "net_capacity_bps": cap.net,
        "rncm_per_bit": rncm,
    }
    report.tables["complexity"] = [p.to_dict() for p in complexity_points(cfg.variants)]

    rng = rng_for(cfg.seed, "rncm")
    triples = [tuple(int(v) for v in rng.integers(1, [13, 32, 9])) for _ in range(10)]
    counted = [
        {
            "mimo_size": m,
            "taps": n,
            "bits_per_symbol": b,
            "closed_form": rncm_per_bit(m, n, b),
            "counted": count_rncm_per_bit(m, n, b, n_symbols=16),
        }
        for m, n, b in triples
    ]
    report.tables["rncm_check"] = counted

    if cfg.acceptance:
        published = [r["received_dbm"] for r in ledgers if r["source"] == "published"]
        report.check(
            "published_budget",
            all(
                abs(got - want) <= 0.005
                for got, want in zip(published, PUBLISHED_RECEIVED_DBM)
            ),
            f"received {published}",
        )
        if cfg.se == SeConfig():
            report.check(
                "headline_se",
                (se.raw, se.net) == (483.84, 403.2)
                and (cap.raw, cap.net) == (241.92e12, 201.6e12),
                f"SE {tuple(se)}, capacity {tuple(cap)}",
            )
        if cfg.dsp.taps == 15 and cfg.se.bits_per_symbol == 3:
            report.check("rncm_per_bit", rncm == 20.0, f"{rncm}")
        report.check(
            "rncm_counter",
            all(row["closed_form"] == row["counted"] for row in counted),
            "instrumented equalizer against the closed form",
        )
    return report


ExperimentRunner = Callable[[ExperimentConfig, Optional[ChannelJobRunner]], LinkReport]

EXPERIMENT_RUNNERS: dict[str, ExperimentRunner] = {
    "ber_grid": run_ber_grid,
    "backward_power_sweep": run_backward_power_sweep,
    "tap_count_sweep": run_tap_count_sweep,
    "drift_tracking": run_drift_tracking,
    "budget_check": run_budget_and_complexity,
    "complexity_table": run_budget_and_complexity,
}


def run_experiment(
    cfg: ExperimentConfig, runner: Optional[ChannelJobRunner] = None
) -> LinkReport:
    """Validate, run and time one experiment."""
    cfg.validate()
    started = time.perf_counter()
    logger.info("Starting %s (seed %d)", cfg.experiment, cfg.seed)
    report = EXPERIMENT_RUNNERS[cfg.experiment](cfg, runner)
    report.telemetry["elapsed_s"] = round(time.perf_counter() - started, 3)
    logger.info(
        "Finished %s in %.1f s: %s",
        cfg.experiment,
        report.telemetry["elapsed_s"],
        report.counts(),
    )
    return report
