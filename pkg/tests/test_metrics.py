"""Tests for alignment, BER, SNR/EVM, SE, complexity and power budgets."""

import math

import numpy as np
import pytest

from ringcore_sim.config import SeConfig, default_variants
from ringcore_sim.errors import NoLockError, ShapeError
from ringcore_sim.metrics import (
    PowerBudgetLedger,
    align_and_ber,
    align_group,
    aligned_reference_symbols,
    capacity,
    clopper_pearson,
    complexity_points,
    count_rncm_per_bit,
    ledger_from_profile,
    power_budget,
    published_ledgers,
    rncm_per_bit,
    rotation_permutation,
    snr_evm,
    spectral_efficiency,
)
from ringcore_sim.txgen import STAR_8QAM, PrbsDescriptor, bits_to_labels

N_BITS = 120_000


def _reference(state: int = 4321) -> PrbsDescriptor:
    return PrbsDescriptor(state=state, n_bits=N_BITS)


def _rotate_bits(bits: np.ndarray, quarter_turns: int) -> np.ndarray:
    labels = rotation_permutation(quarter_turns)[bits_to_labels(bits)]
    return STAR_8QAM.labels_to_bits(labels)


class TestRotation:
    """Test cases for the 90-degree rotation label maps."""

    def test_zero_turns_is_identity(self):
        assert rotation_permutation(0).tolist() == list(range(8))

    @pytest.mark.parametrize("turns", [1, 2, 3])
    def test_label_map_matches_geometric_rotation(self, turns):
        perm = rotation_permutation(turns)
        rotated = STAR_8QAM.points * np.exp(1j * turns * np.pi / 2)
        assert np.allclose(STAR_8QAM.points[perm], rotated)


class TestAlignAndBer:
    """Test cases for single-stream alignment."""

    def test_delayed_stream_has_zero_ber(self):
        ref = _reference()
        rx = np.roll(ref.regenerate(), 300)
        alignment = align_and_ber(rx, ref)
        assert alignment.ber == 0.0
        assert alignment.delay_bits == 300
        assert alignment.rotation == 0
        assert not alignment.ambiguous

    def test_rotated_stream_is_resolved(self):
        ref = _reference()
        rx = _rotate_bits(np.roll(ref.regenerate(), 300), 1)
        alignment = align_and_ber(rx, ref)
        assert alignment.ber == 0.0
        assert alignment.rotation == 1

    def test_counts_flipped_bits(self, rng):
        ref = _reference()
        rx = ref.regenerate().copy()
        flipped = rng.choice(N_BITS, 1200, replace=False)
        rx[flipped] ^= 1
        alignment = align_and_ber(rx, ref)
        assert alignment.errors == 1200
        assert alignment.ber == pytest.approx(0.01)
        assert alignment.ci_low < 0.01 < alignment.ci_high

    def test_unrelated_bits_do_not_lock(self, rng):
        rx = rng.integers(0, 2, N_BITS).astype(np.uint8)
        with pytest.raises(NoLockError) as exc_info:
            align_and_ber(rx, _reference())
        assert exc_info.value.peak_sigma < 6.0

    def test_too_few_bits(self):
        with pytest.raises(ShapeError):
            align_and_ber(np.zeros(3000, dtype=np.uint8), PrbsDescriptor(1, 3000))

    def test_reference_length_mismatch(self):
        with pytest.raises(ShapeError):
            align_and_ber(np.zeros(N_BITS, dtype=np.uint8), PrbsDescriptor(1, N_BITS + 3))


class TestAlignGroup:
    """Test cases for group alignment with output permutation."""

    def test_permutation_is_recovered(self):
        refs = [_reference(state) for state in (11, 22, 33, 44)]
        order = [2, 0, 3, 1]
        rx = [np.roll(refs[j].regenerate(), 30 * (i + 1)) for i, j in enumerate(order)]
        alignments = align_group(rx, refs)
        assert [a.reference_index for a in alignments] == order
        assert all(a.ber == 0.0 for a in alignments)

    def test_stream_length_mismatch(self):
        refs = [_reference(11), _reference(22)]
        rx = [np.zeros(N_BITS, dtype=np.uint8), np.zeros(N_BITS - 3, dtype=np.uint8)]
        with pytest.raises(ShapeError):
            align_group(rx, refs)


class TestClopperPearson:
    """Test cases for the exact binomial interval."""

    def test_zero_errors(self):
        low, high = clopper_pearson(0, 1000)
        assert low == 0.0
        assert high == pytest.approx(1 - 0.025 ** (1 / 1000))

    def test_all_errors(self):
        low, high = clopper_pearson(1000, 1000)
        assert high == 1.0
        assert low == pytest.approx(0.025 ** (1 / 1000))

    def test_interval_contains_estimate(self):
        low, high = clopper_pearson(24, 1000)
        assert low < 0.024 < high


class TestSnrEvm:
    """Test cases for SNR and EVM."""

    def test_clean_symbols(self):
        assert snr_evm(STAR_8QAM.points) == (math.inf, 0.0)

    def test_scale_invariant(self, rng):
        symbols = STAR_8QAM.points[rng.integers(0, 8, 4096)]
        noisy = symbols + 0.1 * (rng.standard_normal(4096) + 1j * rng.standard_normal(4096))
        snr, evm = snr_evm(noisy)
        assert snr_evm(3.0 * noisy) == pytest.approx((snr, evm))
        assert snr == pytest.approx(-20 * math.log10(evm / 100))

    def test_data_aided_estimate(self, rng):
        symbols = STAR_8QAM.points[rng.integers(0, 8, 1 << 16)]
        noise = 0.1 * (rng.standard_normal(1 << 16) + 1j * rng.standard_normal(1 << 16))
        snr, _ = snr_evm(symbols + noise, symbols)
        assert snr == pytest.approx(10 * math.log10(1 / 0.02), abs=0.1)


class TestSpectralEfficiency:
    """Test cases for SE and capacity accounting."""

    def test_headline_numbers(self):
        se = spectral_efficiency(SeConfig())
        assert se.raw == pytest.approx(483.84)
        assert se.net == pytest.approx(403.2)

    def test_capacity(self):
        cap = capacity(SeConfig())
        assert cap.raw == pytest.approx(241.92e12)
        assert cap.net == pytest.approx(201.6e12)

    def test_zero_wavelengths_gives_zero_capacity(self):
        assert capacity(SeConfig(n_wavelengths=0)).raw == 0.0


class TestComplexity:
    """Test cases for MIMO complexity per bit."""

    def test_formula(self):
        assert rncm_per_bit(4, 15, 3) == 20.0
        assert rncm_per_bit(12, 15, 3) == 60.0

    def test_counter_agrees_with_formula(self):
        assert count_rncm_per_bit(4, 15, 3) == rncm_per_bit(4, 15, 3)
        assert count_rncm_per_bit(2, 7, 2, n_symbols=16) == rncm_per_bit(2, 7, 2)

    def test_unsupported_kind(self):
        with pytest.raises(ValueError):
            rncm_per_bit(4, 15, 3, kind="FDE")

    def test_variant_points(self):
        points = complexity_points(default_variants())
        assert points[0].rncm_per_bit == 20.0
        assert points[0].net_se == pytest.approx(403.2)
        assert points[1].rncm_per_bit == 5.0


class TestPowerBudget:
    """Test cases for the optical power budget."""

    def test_published_rows(self):
        received = [power_budget(ledger).received_dbm for ledger in published_ledgers()]
        assert received == pytest.approx([-24.59, -24.60, -24.74], abs=1e-12)

    def test_below_sensitivity_flagged(self):
        ledger = PowerBudgetLedger(-20.0, [("fiber_loss", -20.0)])
        assert power_budget(ledger).below_sensitivity

    def test_nonfinite_entry_rejected(self):
        with pytest.raises(ValueError):
            power_budget(PowerBudgetLedger(0.0, [("fiber_loss", math.inf)]))

    @pytest.mark.parametrize("mode_group, expected", [(2, -24.59), (3, -24.60)])
    def test_ledger_from_profile(self, profile, mode_group, expected):
        ledger = ledger_from_profile(profile, mode_group, 1.98)
        assert power_budget(ledger).received_dbm == pytest.approx(expected, abs=1e-12)


class TestAlignedReference:
    """Test cases for rebuilding the transmitted symbols of an alignment."""

    def test_matches_rotated_delayed_stream(self):
        ref = _reference()
        rx = _rotate_bits(np.roll(ref.regenerate(), 300), 3)
        alignment = align_and_ber(rx, ref)
        symbols = aligned_reference_symbols(alignment, ref)
        assert np.allclose(symbols, STAR_8QAM.points[bits_to_labels(rx)])

    def test_none_for_unaligned_delay(self):
        ref = _reference()
        alignment = align_and_ber(np.roll(ref.regenerate(), 301), ref)
        assert aligned_reference_symbols(alignment, ref) is None
