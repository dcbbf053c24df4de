"""
Tests for path loss and fading distributions.

Tests cover:
- Rician to Nakagami mapping and path gain
- Nakagami samplers (moments, KS tests)
- Normalization and consistency of the link, monostatic and dyadic power laws
"""

import math

import numpy as np
import pytest
from scipy import integrate, stats

from config import REFERENCE_DISTANCE_M, WAVELENGTH_M
from radio.channel import (
    NO_FADING,
    ChannelError,
    FadingParams,
    PathLossParams,
    dyadic_power_cdf,
    dyadic_power_cdf_rayleigh,
    dyadic_power_pdf,
    link_power_cdf,
    link_power_pdf,
    monostatic_power_cdf,
    monostatic_power_cdf_rayleigh,
    monostatic_power_pdf,
    path_gain,
    path_loss,
    rician_to_nakagami,
    sample_dyadic_power,
    sample_link_power,
    sample_monostatic_power,
    sample_nakagami_amplitude,
)

# Line-of-sight pairs used by the fixed-SNR comparisons
M_CE_TAG_LOS = 100 / 19
M_TAG_READER_LOS = 121 / 21

DYADIC_PAIRS = [(1.0, 1.0), (M_CE_TAG_LOS, M_TAG_READER_LOS), (1.0, M_TAG_READER_LOS), (2.0, 2.0)]


def _integrate(fn, lo, hi):
    value, _ = integrate.quad(fn, lo, hi, epsabs=1e-12, epsrel=1e-10, limit=500)
    return value


class TestRicianMapping:
    """Tests for rician_to_nakagami and FadingParams."""

    @pytest.mark.parametrize(
        "kappa,expected",
        [(0.0, 1.0), (9.0, 100 / 19), (10.0, 121 / 21)],
    )
    def test_known_values(self, kappa, expected):
        """kappa = 0 is Rayleigh; the line-of-sight values give 5.2632 and 5.7619."""
        assert rician_to_nakagami(kappa) == pytest.approx(expected, rel=1e-12)

    def test_array_input(self):
        """Arrays map element-wise."""
        result = rician_to_nakagami(np.array([0.0, 10.0]))
        np.testing.assert_allclose(result, [1.0, 121 / 21])

    def test_negative_kappa_raises(self):
        """Negative K-factors are invalid."""
        with pytest.raises(ChannelError):
            rician_to_nakagami(-0.1)

    def test_fading_params_from_rician(self):
        """FadingParams keeps only the mapped m values."""
        params = FadingParams.from_rician(10.0, [9.0, 0.0])
        assert params.m_tag_reader == pytest.approx(121 / 21)
        assert params.m_ce_tag == pytest.approx((100 / 19, 1.0))

    def test_fading_params_rejects_small_m(self):
        """m below 1/2 is not a Nakagami parameter."""
        with pytest.raises(ChannelError):
            FadingParams(m_tag_reader=0.3)

    def test_rayleigh_factory(self):
        """Rayleigh parameters have m = 1 on every link."""
        params = FadingParams.rayleigh(n_emitters=3)
        assert params.m_tag_reader == 1.0
        assert params.m_ce_tag == (1.0, 1.0, 1.0)


class TestPathGain:
    """Tests for the log-distance path loss."""

    def test_reference_distance_gain(self):
        """At d0 the gain is the free-space constant."""
        expected = (WAVELENGTH_M / (4 * math.pi * REFERENCE_DISTANCE_M)) ** 2
        assert path_gain(REFERENCE_DISTANCE_M, 2.3) == pytest.approx(expected)

    def test_exponent_scaling(self):
        """Ten times the distance costs 10^nu."""
        assert path_gain(10.0, 2.0) == pytest.approx(path_gain(1.0, 2.0) / 100)
        assert path_gain(10.0, 2.5) == pytest.approx(path_gain(1.0, 2.5) / 10**2.5)

    def test_vectorized(self):
        """Arrays of distances and exponents broadcast."""
        gains = path_gain(np.array([1.0, 2.0, 4.0]), np.array([2.0, 2.0, 2.0]))
        assert gains.shape == (3,)
        assert gains[1] == pytest.approx(gains[0] / 4)

    def test_below_reference_distance_raises(self):
        """The model is invalid inside d0."""
        with pytest.raises(ChannelError):
            path_gain(0.5, 2.0)

    def test_path_loss_params(self):
        """path_loss uses the parameter object."""
        params = PathLossParams(exponent=2.0)
        assert path_loss(5.0, params) == pytest.approx(path_gain(5.0, 2.0))

    @pytest.mark.parametrize(
        "kwargs",
        [{"exponent": 0.0}, {"exponent": 2.0, "wavelength": 0.0}, {"exponent": 2.0, "reference_distance": -1.0}],
    )
    def test_invalid_params_raise(self, kwargs):
        """Non-positive parameters are rejected."""
        with pytest.raises(ChannelError):
            PathLossParams(**kwargs)


class TestSamplers:
    """Moments and goodness of fit of the fading samplers."""

    @pytest.mark.parametrize("m", [1.0, 2.5, M_TAG_READER_LOS])
    def test_link_power_moments(self, m, rng):
        """a^2 has unit mean and variance 1/m."""
        power = sample_link_power(m, rng, size=200_000)
        assert power.mean() == pytest.approx(1.0, abs=0.01)
        assert power.var() == pytest.approx(1.0 / m, rel=0.03)

    @pytest.mark.parametrize("m", [1.0, M_CE_TAG_LOS])
    def test_link_power_ks(self, m, rng):
        """a^2 passes a KS test against Gamma(m, 1/m)."""
        power = sample_link_power(m, rng, size=100_000)
        result = stats.kstest(power, stats.gamma(a=m, scale=1 / m).cdf)
        assert result.pvalue > 0.01

    def test_no_fading_is_deterministic(self, rng):
        """m = inf gives unit power."""
        power = sample_link_power(NO_FADING, rng, size=10)
        np.testing.assert_array_equal(power, np.ones(10))
        assert sample_nakagami_amplitude(NO_FADING, rng) == 1.0

    def test_per_element_m(self, rng):
        """An array of m draws each element from its own law."""
        m = np.array([1.0, NO_FADING])
        power = sample_link_power(np.broadcast_to(m, (50_000, 2)), rng)
        assert np.all(power[:, 1] == 1.0)
        assert power[:, 0].var() == pytest.approx(1.0, rel=0.05)

    def test_rayleigh_dyadic_ks(self, rng):
        """Rayleigh dyadic samples pass KS against the closed-form CDF."""
        g = sample_dyadic_power(1.0, 1.0, rng, size=100_000)
        result = stats.kstest(g, dyadic_power_cdf_rayleigh)
        assert result.pvalue > 0.01

    def test_rayleigh_monostatic_ks(self, rng):
        """Rayleigh roundtrip samples pass KS against 1 - exp(-sqrt(x))."""
        g = sample_monostatic_power(1.0, rng, size=100_000)
        result = stats.kstest(g, monostatic_power_cdf_rayleigh)
        assert result.pvalue > 0.01

    def test_nakagami_dyadic_empirical_cdf(self, rng):
        """Line-of-sight dyadic samples follow the quadrature CDF."""
        g = sample_dyadic_power(M_CE_TAG_LOS, M_TAG_READER_LOS, rng, size=100_000)
        points = np.linspace(0.2, 3.0, 15)
        empirical = (g[:, None] <= points).mean(axis=0)
        np.testing.assert_allclose(
            empirical, dyadic_power_cdf(points, M_CE_TAG_LOS, M_TAG_READER_LOS), atol=0.006
        )

    def test_seeded_generators_reproduce(self):
        """Identical seeds give identical draws."""
        a = sample_dyadic_power(1.0, 2.0, np.random.default_rng(7), size=100)
        b = sample_dyadic_power(1.0, 2.0, np.random.default_rng(7), size=100)
        np.testing.assert_array_equal(a, b)


class TestDistributions:
    """Normalization and internal consistency of the power laws."""

    @pytest.mark.parametrize("m1,m2", DYADIC_PAIRS)
    def test_dyadic_pdf_normalized(self, m1, m2):
        """The dyadic density integrates to one."""
        total = _integrate(lambda x: dyadic_power_pdf(x, m1, m2), 0.0, 1.0) + _integrate(
            lambda x: dyadic_power_pdf(x, m1, m2), 1.0, np.inf
        )
        assert total == pytest.approx(1.0, abs=1e-6)

    @pytest.mark.parametrize("m1,m2", DYADIC_PAIRS)
    def test_dyadic_cdf_is_pdf_integral(self, m1, m2):
        """CDF equals the integrated density."""
        for x in (0.1, 0.7, 2.0):
            expected = _integrate(lambda t: dyadic_power_pdf(t, m1, m2), 0.0, x)
            assert dyadic_power_cdf(x, m1, m2) == pytest.approx(expected, rel=1e-6)

    def test_dyadic_pdf_symmetric_in_m(self):
        """Swapping the link parameters leaves the product law unchanged."""
        x = np.linspace(0.1, 3.0, 10)
        np.testing.assert_allclose(
            dyadic_power_pdf(x, 1.0, 5.0), dyadic_power_pdf(x, 5.0, 1.0), rtol=1e-10
        )

    def test_dyadic_cdf_rayleigh_limits(self):
        """CDF starts at 0 and tends to 1."""
        assert dyadic_power_cdf_rayleigh(0.0) == 0.0
        assert dyadic_power_cdf_rayleigh(100.0) == pytest.approx(1.0, abs=1e-6)

    @pytest.mark.parametrize("cdf", [dyadic_power_cdf_rayleigh, monostatic_power_cdf_rayleigh])
    def test_rayleigh_cdfs_are_concave(self, cdf):
        """CDF((x1 + x2) / 2) >= (CDF(x1) + CDF(x2)) / 2 for every pair on a grid."""
        x = np.geomspace(1e-3, 20.0, 40)
        x1, x2 = np.meshgrid(x, x)
        midpoint = cdf((x1 + x2) / 2)
        chord = (cdf(x1) + cdf(x2)) / 2
        assert np.all(midpoint >= chord - 1e-12)

    def test_dyadic_cdf_with_one_static_link(self):
        """A non-fading link reduces the dyadic law to the other link's law."""
        assert dyadic_power_cdf(0.8, NO_FADING, 2.0) == pytest.approx(link_power_cdf(0.8, 2.0))
        assert dyadic_power_cdf(0.8, NO_FADING, NO_FADING) == 0.0
        assert dyadic_power_cdf(1.2, NO_FADING, NO_FADING) == 1.0

    @pytest.mark.parametrize("m", [1.0, 2.0, M_TAG_READER_LOS])
    def test_monostatic_pdf_normalized(self, m):
        """The roundtrip density integrates to one."""
        total = _integrate(lambda x: monostatic_power_pdf(x, m), 0.0, 1.0) + _integrate(
            lambda x: monostatic_power_pdf(x, m), 1.0, np.inf
        )
        assert total == pytest.approx(1.0, abs=1e-6)

    def test_monostatic_cdf_rayleigh_matches_general(self):
        """The m = 1 closed form equals the general CDF."""
        x = np.linspace(0.0, 10.0, 25)
        np.testing.assert_allclose(monostatic_power_cdf(x, 1.0), monostatic_power_cdf_rayleigh(x), rtol=1e-12)

    def test_link_power_pdf_matches_gamma(self):
        """a^2 density is Gamma(m, 1/m)."""
        x = np.linspace(0.1, 4.0, 10)
        np.testing.assert_allclose(link_power_pdf(x, 3.0), stats.gamma.pdf(x, a=3.0, scale=1 / 3.0))

    def test_link_power_cdf_no_fading_step(self):
        """Without fading the power CDF is a unit step at 1."""
        assert link_power_cdf(0.99, NO_FADING) == 0.0
        assert link_power_cdf(1.0, NO_FADING) == 1.0

    def test_density_without_fading_raises(self):
        """Densities do not exist for a deterministic link."""
        with pytest.raises(ChannelError):
            dyadic_power_pdf(1.0, NO_FADING, 1.0)

    def test_negative_argument_raises(self):
        """CDFs are defined on x >= 0 only."""
        with pytest.raises(ChannelError):
            dyadic_power_cdf(-1.0, 1.0, 1.0)
