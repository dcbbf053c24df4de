"""
Tests for scenario descriptions and Monte-Carlo estimates.
"""

import json
import math

import numpy as np
import pytest

from radio.channel import NO_FADING
from simulation.scenario import (
    NO_FADING_LAW,
    Architecture,
    EstimateWithCI,
    FadingKind,
    FadingLaw,
    ScenarioSpec,
    SimulationError,
    SweepMode,
)


class TestFadingLaw:
    """Tests for FadingLaw."""

    def test_rician_mapping(self):
        """kappa pairs are stored as Nakagami m."""
        law = FadingLaw.rician("los", kappa_ce_tag=9.0, kappa_tag_reader=10.0)
        assert law.m_ce_tag == pytest.approx(100 / 19)
        assert law.m_tag_reader == pytest.approx(121 / 21)
        assert law.is_fixed
        assert not law.is_rayleigh

    def test_rayleigh_default(self):
        """The default law is Rayleigh."""
        assert FadingLaw(name="rayleigh").is_rayleigh

    def test_fixed_draw_shapes(self, rng):
        """Fixed laws broadcast to (L, N) and (N,)."""
        m_ce, m_tr = FadingLaw(name="x", m_ce_tag=2.0, m_tag_reader=3.0).draw(rng, n_tags=5, n_emitters=2)
        assert m_ce.shape == (2, 5)
        assert m_tr.shape == (5,)
        assert np.all(m_ce == 2.0) and np.all(m_tr == 3.0)

    def test_kappa_uniform_draw(self, rng):
        """kappa ~ U[0, 20] maps into m in [1, 441/41]."""
        law = FadingLaw(name="rice", kind=FadingKind.KAPPA_UNIFORM, low=0.0, high=20.0)
        m_ce, m_tr = law.draw(rng, n_tags=1000, n_emitters=3)
        assert m_ce.shape == (3, 1000)
        assert np.all(m_tr >= 1.0) and np.all(m_tr <= 441 / 41)
        assert not law.is_fixed

    def test_m_uniform_draw(self, rng):
        """m ~ U[1, 5] per link."""
        law = FadingLaw(name="nak", kind=FadingKind.M_UNIFORM, low=1.0, high=5.0)
        _, m_tr = law.draw(rng, n_tags=1000, n_emitters=0)
        assert m_tr.min() >= 1.0 and m_tr.max() <= 5.0

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"m_ce_tag": 0.2},
            {"m_tag_reader": math.nan},
            {"kind": FadingKind.M_UNIFORM, "low": 0.1, "high": 5.0},
            {"kind": FadingKind.KAPPA_UNIFORM, "low": 5.0, "high": 1.0},
        ],
    )
    def test_invalid_laws_raise(self, kwargs):
        """Out-of-range parameters are rejected."""
        with pytest.raises(SimulationError):
            FadingLaw(name="bad", **kwargs)

    def test_no_fading_law(self):
        """The static law uses NO_FADING on both links."""
        assert NO_FADING_LAW.m_ce_tag == NO_FADING
        assert NO_FADING_LAW.m_tag_reader == NO_FADING


class TestEstimateWithCI:
    """Tests for EstimateWithCI."""

    def test_from_counts(self):
        """Exact binomial interval, close to the normal one for large counts."""
        est = EstimateWithCI.from_counts(1000, 10_000, seed=1)
        assert est.mean == pytest.approx(0.1)
        wald = 1.959964 * math.sqrt(0.1 * 0.9 / 10_000)
        assert est.half_width_95 == pytest.approx(wald, rel=0.05)
        assert est.covers(0.1)
        assert not est.covers(0.2)
        assert est.lower < est.mean < est.upper

    def test_zero_errors(self):
        """No errors still gives an interval of nonzero width above zero."""
        est = EstimateWithCI.from_counts(0, 100, seed=1)
        assert est.mean == 0.0
        assert est.lower == 0.0
        assert est.upper == pytest.approx(1 - 0.025 ** (1 / 100), rel=1e-9)
        assert est.half_width_95 == pytest.approx(est.upper / 2)

    @pytest.mark.parametrize(
        "p,n_trials", [(1e-3, 10_000), (1e-4, 100_000), (0.01, 1000), (0.3, 1000)]
    )
    def test_interval_calibration(self, p, n_trials):
        """95% intervals cover the true error rate in at least 93% of 1000 repetitions."""
        rng = np.random.default_rng(2024)
        counts = rng.binomial(n_trials, p, size=1000)
        covered = [EstimateWithCI.from_counts(k, n_trials, seed=0).covers(p) for k in counts]
        assert np.mean(covered) >= 0.93

    def test_from_samples(self):
        """Sample mean with a normal interval."""
        est = EstimateWithCI.from_samples([1.0, 2.0, 3.0, 4.0], seed=7)
        assert est.mean == pytest.approx(2.5)
        assert est.n_trials == 4
        assert est.half_width_95 > 0

    def test_invalid(self):
        """Empty estimates and negative widths are rejected."""
        with pytest.raises(SimulationError):
            EstimateWithCI.from_counts(0, 0, seed=1)
        with pytest.raises(SimulationError):
            EstimateWithCI.from_counts(11, 10, seed=1)
        with pytest.raises(SimulationError):
            EstimateWithCI.from_samples([], seed=1)
        with pytest.raises(SimulationError):
            EstimateWithCI(mean=0.1, half_width_95=-1.0, n_trials=1, seed=1)


class TestScenarioSpec:
    """Tests for ScenarioSpec."""

    def test_defaults(self):
        """A BER spec needs only a sweep."""
        spec = ScenarioSpec(command="ber", sweep=(10.0,))
        assert spec.architectures == (Architecture.MONOSTATIC, Architecture.MULTISTATIC)
        np.testing.assert_array_equal(spec.sweep_array, [10.0])

    def test_empty_sweep_raises(self):
        """Sweeps need at least one point."""
        with pytest.raises(SimulationError):
            ScenarioSpec(command="outage", sweep=())

    def test_fixed_snr_needs_fixed_laws(self):
        """Random per-link m is only meaningful with a geometry."""
        law = FadingLaw(name="rice", kind=FadingKind.KAPPA_UNIFORM, low=0.0, high=20.0)
        with pytest.raises(SimulationError):
            ScenarioSpec(command="ber", sweep=(10.0,), fadings=(law,))
        ScenarioSpec(command="ber", sweep=(1e-3,), fadings=(law,), mode=SweepMode.POWER_SWEEP)

    def test_non_positive_snr_raises(self):
        """SNR values must be positive."""
        with pytest.raises(SimulationError):
            ScenarioSpec(command="ber", sweep=(0.0,))

    @pytest.mark.parametrize("field", ["trials", "topologies", "realizations", "shard_size", "n_tags"])
    def test_sizes_positive(self, field):
        """Counts must be at least one."""
        with pytest.raises(SimulationError):
            ScenarioSpec(command="ber", sweep=(10.0,), **{field: 0})

    def test_grid_required(self):
        """Geometry-based commands need a grid."""
        spec = ScenarioSpec(command="outage", sweep=(1.0,))
        with pytest.raises(SimulationError):
            _ = spec.grid
        assert ScenarioSpec(command="outage", sweep=(1.0,), grid_side=40.0, grid_step=1.0).grid.k == 40

    def test_require_tx_power(self):
        """Outage and energy runs need a transmit power."""
        with pytest.raises(SimulationError):
            ScenarioSpec(command="energy", sweep=(1e-5,)).require_tx_power()
        assert ScenarioSpec(command="energy", sweep=(1e-5,), tx_power=3.16).require_tx_power() == 3.16

    def test_emitter_count(self):
        """Monostatic runs use no CE, multistatic runs one per slot unless listed."""
        spec = ScenarioSpec(command="outage", sweep=(1.0,), n_slots=4)
        assert spec.emitter_count(Architecture.MONOSTATIC) == 0
        assert spec.emitter_count(Architecture.MULTISTATIC) == 4
        listed = ScenarioSpec(command="outage", sweep=(1.0,), n_slots=4, emitters=((0.0, 0.0), (1.0, 1.0)))
        assert listed.emitter_count(Architecture.MULTISTATIC) == 2

    def test_system_config(self):
        """Reader and every CE share the transmit power."""
        config = ScenarioSpec(command="ber", sweep=(10.0,)).system_config(0.5, 3)
        assert config.reader_power == 0.5
        assert config.ce_powers == (0.5, 0.5, 0.5)

    def test_to_dict_is_json(self):
        """Resolved configurations serialize, infinity included."""
        spec = ScenarioSpec(command="ber", sweep=(10.0, math.inf), fadings=(NO_FADING_LAW,))
        data = spec.to_dict()
        text = json.dumps(data)
        assert '"inf"' in text
        assert data["architectures"] == ["monostatic", "multistatic"]
        assert data["mode"] == "fixed_snr"

    def test_hashable(self):
        """Specs are frozen and hashable."""
        spec = ScenarioSpec(command="ber", sweep=(10.0,))
        assert hash(spec) == hash(ScenarioSpec(command="ber", sweep=(10.0,)))
