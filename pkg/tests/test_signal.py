"""
Tests for the FSK signal model and link budget.

Tests cover:
- Energy per bit for both architectures
- Symbol construction and received-vector synthesis
- Frequency assignments, orthogonality and interference coefficients
"""

import math

import numpy as np
import pytest

from config import BIT_DURATION_S, NOISE_DENSITY_W_HZ
from radio.channel import NO_FADING
from radio.signal import (
    FrequencyAssignment,
    RxSymbol,
    SignalError,
    SystemConfig,
    TagPhases,
    check_orthogonality,
    energy_per_bit_monostatic,
    energy_per_bit_multistatic,
    monostatic_scale,
    rho_coefficient,
    rho_matrix,
    snr,
    synthesize_rx,
    synthesize_rx_batch,
    tag_symbol,
    tag_symbols,
)


@pytest.fixture
def config():
    """Unit transmit power on the reader and two CEs."""
    return SystemConfig.common_power(1.0, n_emitters=2)


class TestSystemConfig:
    """Tests for SystemConfig."""

    def test_modulation_factor(self, config):
        """|Gamma_0 - Gamma_1| (2/pi) s with the default tag constants."""
        assert config.modulation_factor == pytest.approx(2 * (2 / math.pi) * 0.1)

    def test_common_power(self, config):
        """Reader and every CE share the transmit power."""
        assert config.reader_power == 1.0
        assert config.ce_powers == (1.0, 1.0)

    def test_with_tx_power(self, config):
        """Replacing the power keeps the emitter count."""
        updated = config.with_tx_power(0.5)
        assert updated.reader_power == 0.5
        assert updated.ce_powers == (0.5, 0.5)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"reader_power": 0.0},
            {"reader_power": 1.0, "ce_powers": (1.0, -1.0)},
            {"reader_power": 1.0, "noise_density": 0.0},
            {"reader_power": 1.0, "scattering_efficiency": 1.5},
            {"reader_power": 1.0, "reflection_gap": 2.5},
            {"reader_power": 1.0, "bit_duration": 0.0},
        ],
    )
    def test_invalid_config_raises(self, kwargs):
        """Out-of-range constants are rejected."""
        with pytest.raises(SignalError):
            SystemConfig(**kwargs)


class TestEnergyPerBit:
    """Tests for the per-architecture energy expressions."""

    def test_multistatic_energy(self, config):
        """E = P_C L_CT L_TR F^2 T."""
        expected = 1.0 * 1e-4 * 1e-5 * config.modulation_factor**2 * BIT_DURATION_S
        assert energy_per_bit_multistatic(config, 1e-4, 1e-5) == pytest.approx(expected)

    def test_multistatic_uses_indexed_emitter(self):
        """Each CE contributes its own transmit power."""
        config = SystemConfig(reader_power=1.0, ce_powers=(1.0, 4.0))
        assert energy_per_bit_multistatic(config, 1e-4, 1e-4, ce_index=1) == pytest.approx(
            4 * energy_per_bit_multistatic(config, 1e-4, 1e-4, ce_index=0)
        )

    def test_multistatic_missing_emitter_raises(self, config):
        """Asking for a CE that does not exist fails."""
        with pytest.raises(SignalError):
            energy_per_bit_multistatic(config, 1e-4, 1e-4, ce_index=2)

    def test_monostatic_energy_rayleigh(self, config):
        """With M = 1 the prefactor (1 + M)/(2M) is one: E = 2 P_R L^2 F^2 T."""
        expected = 2 * 1.0 * (1e-4) ** 2 * config.modulation_factor**2 * BIT_DURATION_S
        assert energy_per_bit_monostatic(config, 1e-4, 1.0) == pytest.approx(expected)

    def test_monostatic_energy_without_fading(self, config):
        """Without fading the prefactor is 1/2."""
        expected = (1e-4) ** 2 * config.modulation_factor**2 * BIT_DURATION_S
        assert energy_per_bit_monostatic(config, 1e-4, NO_FADING) == pytest.approx(expected)

    def test_monostatic_scale(self):
        """M/(M+1), and 1 for a static link."""
        assert monostatic_scale(1.0) == 0.5
        assert monostatic_scale(NO_FADING) == 1.0
        np.testing.assert_allclose(monostatic_scale(np.array([1.0, 3.0])), [0.5, 0.75])

    def test_scaled_energy_is_roundtrip_mean(self, config):
        """Scale times energy equals P_R L^2 F^2 T for every m."""
        for m in (1.0, 2.0, 5.7619):
            scaled = monostatic_scale(m) * energy_per_bit_monostatic(config, 1e-3, m)
            assert scaled == pytest.approx((1e-3) ** 2 * config.modulation_factor**2 * BIT_DURATION_S)

    def test_snr(self, config):
        """SNR is energy over noise density."""
        assert snr(NOISE_DENSITY_W_HZ * 10, config) == pytest.approx(10.0)

    def test_non_positive_gain_raises(self, config):
        """Path gains must be positive."""
        with pytest.raises(SignalError):
            energy_per_bit_multistatic(config, 0.0, 1e-4)


class TestSymbols:
    """Tests for FSK symbols and received vectors."""

    def test_symbols_have_unit_norm(self):
        """Every symbol has two lines of magnitude sqrt(1/2)."""
        x = tag_symbols(np.array([0, 1, 1, 0]), 0.3, 1.2)
        np.testing.assert_allclose(np.sum(np.abs(x) ** 2, axis=-1), 1.0)

    def test_bit_selects_subcarrier(self):
        """Bit 0 occupies lines 0-1, bit 1 lines 2-3."""
        phases = TagPhases(0.5, 1.5)
        zero = tag_symbol(0, phases)
        one = tag_symbol(1, phases)
        assert np.all(zero[2:] == 0) and np.all(zero[:2] != 0)
        assert np.all(one[:2] == 0) and np.all(one[2:] != 0)
        assert zero[1] == pytest.approx(np.conj(zero[0]))

    def test_invalid_bit_raises(self):
        """Only binary symbols exist."""
        with pytest.raises(SignalError):
            tag_symbol(2, TagPhases(0.0, 0.0))

    def test_tag_phases_range(self, rng):
        """Phases lie in [0, 2pi)."""
        with pytest.raises(SignalError):
            TagPhases(2 * math.pi, 0.0)
        phases = TagPhases.sample(rng)
        assert 0 <= phases.phi0 < 2 * math.pi

    def test_noiseless_vector(self, rng):
        """Without noise r = h sqrt(scale E) x."""
        rx = synthesize_rx_batch(1, 0.0, 0.0, 0.5, 0.0, 4.0, 0.0, rng, energy_scale=0.5)
        assert np.sum(np.abs(rx) ** 2) == pytest.approx(0.25 * 0.5 * 4.0)

    def test_noise_variance(self, rng):
        """Each complex noise line has variance N0."""
        rx = synthesize_rx_batch(np.zeros(50_000, dtype=int), 0.0, 0.0, 0.0, 0.0, 1.0, 2.0, rng)
        assert np.mean(np.abs(rx[:, 2]) ** 2) == pytest.approx(2.0, rel=0.03)

    def test_synthesize_rx_symbol(self, config, rng):
        """Single-symbol wrapper returns a 4-entry RxSymbol."""
        rx = synthesize_rx(1, TagPhases(0.1, 0.2), 1.0, 0.3, 1e-18, config, rng, monostatic_m=1.0, slot=2)
        assert isinstance(rx, RxSymbol)
        assert rx.vector.shape == (4,)
        assert rx.truth_bit == 1
        assert rx.slot == 2

    def test_rx_symbol_shape_checked(self):
        """RxSymbol holds exactly four lines."""
        with pytest.raises(SignalError):
            RxSymbol(vector=np.zeros(3), truth_bit=0, channel_amp=1.0, channel_phase=0.0)


class TestFrequencyPlan:
    """Tests for assignments, orthogonality and rho coefficients."""

    def test_frequencies(self):
        """F_n0 = base + c spacing and F_n1 = F_n0 + spacing / 5."""
        freqs = FrequencyAssignment.identity(3).frequencies()
        np.testing.assert_allclose(freqs[:, 0], [0.11e6, 0.12e6, 0.13e6])
        np.testing.assert_allclose(freqs[:, 1] - freqs[:, 0], 2e3)

    def test_bad_permutation_raises(self):
        """Assignments must be bijections onto 1..N."""
        with pytest.raises(SignalError):
            FrequencyAssignment(permutation=(1, 1, 3))

    def test_random_assignment_is_permutation(self, rng):
        """Random assignments use every frequency pair once."""
        assignment = FrequencyAssignment.random(10, rng)
        assert sorted(assignment.permutation) == list(range(1, 11))

    @pytest.mark.parametrize("coherent", [True, False])
    def test_default_plan_is_orthogonal(self, coherent):
        """The default plan satisfies both orthogonality conditions."""
        report = check_orthogonality(FrequencyAssignment.identity(20), BIT_DURATION_S, coherent)
        assert report
        assert report.violations == []

    def test_detuned_plan_violates(self):
        """A spacing that is not a multiple of 1/T is reported."""
        assignment = FrequencyAssignment.identity(3, spacing=10.1e3)
        report = check_orthogonality(assignment, BIT_DURATION_S, coherent=False)
        assert not report
        assert report.violations

    def test_low_frequency_violates(self):
        """Frequencies must exceed the orthogonality factor times 1/(2T)."""
        assignment = FrequencyAssignment.identity(2, base_freq=1e3, spacing=1e3)
        report = check_orthogonality(assignment, BIT_DURATION_S, coherent=True)
        assert not report

    def test_rho_matrix_properties(self):
        """rho is symmetric with a zero diagonal."""
        rho = rho_matrix(FrequencyAssignment.identity(5), BIT_DURATION_S)
        np.testing.assert_allclose(rho, rho.T)
        np.testing.assert_array_equal(np.diag(rho), 0.0)
        assert np.all(rho[~np.eye(5, dtype=bool)] > 0)

    def test_rho_adjacent_value(self):
        """Adjacent pairs are separated by 8 kHz at the closest tones."""
        rho = rho_matrix(FrequencyAssignment.identity(2), BIT_DURATION_S)
        expected = 1.0 / (2 * math.pi * BIT_DURATION_S * 8e3) ** 2
        assert rho[0, 1] == pytest.approx(expected)

    def test_rho_decreases_with_separation(self):
        """Farther frequency pairs interfere less."""
        rho = rho_matrix(FrequencyAssignment.identity(4), BIT_DURATION_S)
        assert rho[0, 1] > rho[0, 2] > rho[0, 3]

    def test_rho_coefficient_matches_matrix(self):
        """Pairwise helper equals the matrix entry."""
        assignment = FrequencyAssignment.identity(4, epsilon=1e-2)
        rho = rho_matrix(assignment, BIT_DURATION_S)
        assert rho_coefficient(assignment, 1, 3, BIT_DURATION_S) == pytest.approx(rho[1, 3])
        with pytest.raises(SignalError):
            rho_coefficient(assignment, 2, 2, BIT_DURATION_S)
