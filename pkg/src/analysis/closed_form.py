"""
Closed-form performance expressions for monostatic and multistatic backscatter.

- BER of noncoherent envelope detection (exact), which is also the Chernoff upper bound of
  coherent detection, for Nakagami fading
- Exact coherent BER (closed form for Rayleigh monostatic, quadrature otherwise)
- Diversity order as the negative high-SNR log-log slope of a BER curve
- Average / instantaneous SINR under adjacent-channel interference
- Rayleigh information-outage upper bounds and their L-slot products
- Energy outage of passive tags via the regularized lower incomplete gamma function

All functions are pure and vectorized unless noted.
"""

from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np
from scipy import special, stats

from analysis.specfun import hyper_u, quadrature
from config import DIVERSITY_POINTS, DIVERSITY_WINDOW_DB
from radio.channel import (
    dyadic_power_cdf,
    dyadic_power_cdf_rayleigh,
    link_power_cdf,
    monostatic_power_cdf_rayleigh,
)
from radio.signal import monostatic_scale


class AnalyticError(ValueError):
    """Raised when a closed form is evaluated outside its domain."""

    pass


def _scalar(*args) -> bool:
    return all(np.ndim(a) == 0 for a in args)


def _out(values, scalar: bool):
    return float(values) if scalar else np.asarray(values, dtype=float)


def _check_snr(snr) -> np.ndarray:
    arr = np.asarray(snr, dtype=float)
    if np.any(~(arr > 0)):
        raise AnalyticError("SNR must be > 0")
    return arr


def _check_m(*ms) -> list[np.ndarray]:
    arrays = [np.asarray(m, dtype=float) for m in ms]
    for arr in arrays:
        if np.any(np.isnan(arr)) or np.any(arr < 0.5):
            raise AnalyticError("Nakagami m must be >= 0.5")
    return arrays


@dataclass
class SinrBreakdown:
    """Signal, per-interferer and noise terms of one tag's SINR."""

    signal_energy: float
    interference_terms: list[tuple[int, float]] = field(default_factory=list)
    noise: float = 0.0

    def __post_init__(self):
        if self.signal_energy < 0 or self.noise < 0:
            raise AnalyticError("SINR terms must be >= 0")
        if any(term < 0 for _, term in self.interference_terms):
            raise AnalyticError("interference terms must be >= 0")

    @property
    def interference(self) -> float:
        return float(sum(term for _, term in self.interference_terms))

    @property
    def sinr(self) -> float:
        return self.signal_energy / (self.interference + self.noise)


@dataclass(frozen=True)
class OutageQuery:
    """Thresholds of an outage evaluation."""

    theta: float
    theta_h: float
    slots: int = 1

    def __post_init__(self):
        if not self.theta > 0 or not self.theta_h > 0:
            raise AnalyticError("outage thresholds must be > 0")
        if self.slots < 1:
            raise AnalyticError(f"slots must be >= 1, got {self.slots}")


# =============================================================================
# BER
# =============================================================================


def ber_bound_monostatic(m_tag_reader, snr):
    """
    Noncoherent monostatic BER, 1/2 x^(M/2) U(M/2, 1/2, x) with x = (M + M^2) / (2 SNR).

    Exact for envelope detection and an upper bound for coherent detection.
    """
    (m,) = _check_m(m_tag_reader)
    s = _check_snr(snr)
    m, s = np.broadcast_arrays(m, s)
    result = np.empty(s.shape, dtype=float)

    no_fading = np.isinf(m)
    result[no_fading] = 0.5 * np.exp(-s[no_fading] / 2)

    fading = ~no_fading
    mf, sf = m[fading], s[fading]
    x = (mf + mf**2) / (2 * sf)
    result[fading] = 0.5 * x ** (mf / 2) * hyper_u(mf / 2, 0.5, x)
    return _out(np.minimum(result, 0.5), _scalar(m_tag_reader, snr))


def ber_exact_rayleigh_monostatic(snr):
    """
    Exact coherent BER of a Rayleigh monostatic link, 1/2 - e^(1/SNR) Q(sqrt(2/SNR)).

    Evaluated as 1/2 - erfcx(1/sqrt(SNR)) / 2, which cannot overflow at low SNR.
    """
    s = _check_snr(snr)
    return _out(0.5 - 0.5 * special.erfcx(1.0 / np.sqrt(s)), _scalar(snr))


def ber_bound_multistatic(m_ce_tag, m_tag_reader, snr):
    """
    Noncoherent multistatic BER, 1/2 x^(M_n) U(M_n, 1 + M_n - M_ln, x) with x = 2 M_ln M_n / SNR.

    Exact for envelope detection and an upper bound for coherent detection.
    """
    m_ln, m_n = _check_m(m_ce_tag, m_tag_reader)
    s = _check_snr(snr)
    m_ln, m_n, s = np.broadcast_arrays(m_ln, m_n, s)
    result = np.empty(s.shape, dtype=float)

    inf_ln, inf_n = np.isinf(m_ln), np.isinf(m_n)
    both = inf_ln & inf_n
    result[both] = 0.5 * np.exp(-s[both] / 2)

    # one deterministic link: Gamma moment generating function of the other
    only_ln = inf_ln & ~inf_n
    result[only_ln] = 0.5 * (1 + s[only_ln] / (2 * m_n[only_ln])) ** (-m_n[only_ln])
    only_n = inf_n & ~inf_ln
    result[only_n] = 0.5 * (1 + s[only_n] / (2 * m_ln[only_n])) ** (-m_ln[only_n])

    dyadic = ~(inf_ln | inf_n)
    a, b, sd = m_n[dyadic], 1 + m_n[dyadic] - m_ln[dyadic], s[dyadic]
    x = 2 * m_ln[dyadic] * m_n[dyadic] / sd
    result[dyadic] = 0.5 * x**a * hyper_u(a, b, x)
    return _out(np.minimum(result, 0.5), _scalar(m_ce_tag, m_tag_reader, snr))


def _coherent_average(cdf: Callable[[float], float], c: float) -> float:
    # E[Q(sqrt(c g))] = int_0^inf phi(t) F_g(t^2 / c) dt
    def integrand(t: float) -> float:
        return stats.norm.pdf(t) * cdf(t * t / c)

    return quadrature(integrand, 0.0, 40.0, points=[1.0, 3.0, 6.0])


def _ber_coherent_monostatic_scalar(m: float, snr: float) -> float:
    if np.isinf(m):
        return float(special.ndtr(-np.sqrt(snr)))
    c = monostatic_scale(m) * snr
    return _coherent_average(lambda x: float(special.gammainc(m, m * np.sqrt(x))), c)


def ber_coherent_monostatic(m_tag_reader, snr):
    """Exact coherent monostatic BER E[Q(sqrt(a^4 M/(M+1) SNR))] by quadrature."""
    (m,) = _check_m(m_tag_reader)
    s = _check_snr(snr)
    result = np.vectorize(_ber_coherent_monostatic_scalar, otypes=[float])(m, s)
    return _out(result, _scalar(m_tag_reader, snr))


def _ber_coherent_multistatic_scalar(m_ln: float, m_n: float, snr: float) -> float:
    if np.isinf(m_ln) and np.isinf(m_n):
        return float(special.ndtr(-np.sqrt(snr)))
    if m_ln == 1.0 and m_n == 1.0:
        return _coherent_average(lambda x: float(dyadic_power_cdf_rayleigh(x)), snr)
    return _coherent_average(lambda x: float(dyadic_power_cdf(x, m_ln, m_n)), snr)


def ber_coherent_multistatic(m_ce_tag, m_tag_reader, snr):
    """Exact coherent multistatic BER E[Q(sqrt(a_CT^2 a_TR^2 SNR))] by nested quadrature."""
    m_ln, m_n = _check_m(m_ce_tag, m_tag_reader)
    s = _check_snr(snr)
    result = np.vectorize(_ber_coherent_multistatic_scalar, otypes=[float])(m_ln, m_n, s)
    return _out(result, _scalar(m_ce_tag, m_tag_reader, snr))


def diversity_order_from_curve(snr_db, ber) -> float:
    """Negative least-squares slope of log10(BER) against log10(SNR)."""
    snr_db = np.asarray(snr_db, dtype=float)
    ber = np.asarray(ber, dtype=float)
    if snr_db.shape != ber.shape or snr_db.size < 2:
        raise AnalyticError("need at least two matching (SNR, BER) points")
    if np.any(~(ber > 0)):
        raise AnalyticError("BER values must be > 0 to fit a log-log slope")
    slope, _ = np.polyfit(snr_db / 10.0, np.log10(ber), 1)
    return float(-slope)


def diversity_order(
    ber_fn: Callable[[np.ndarray], np.ndarray],
    snr_lo_db: float = DIVERSITY_WINDOW_DB[0],
    snr_hi_db: float = DIVERSITY_WINDOW_DB[1],
    n_points: int = DIVERSITY_POINTS,
) -> float:
    """
    Diversity order of a BER curve over a high-SNR window.

    Args:
        ber_fn: BER as a function of linear SNR (vectorized)
        snr_lo_db, snr_hi_db: Fit window in dB
        n_points: Number of equally spaced dB points in the window
    """
    if not snr_hi_db > snr_lo_db:
        raise AnalyticError("snr_hi_db must exceed snr_lo_db")
    snr_db = np.linspace(snr_lo_db, snr_hi_db, n_points)
    ber = np.asarray(ber_fn(10 ** (snr_db / 10)), dtype=float)
    return diversity_order_from_curve(snr_db, ber)


# =============================================================================
# SINR
# =============================================================================


def _check_rho(rho: np.ndarray, n_tags: int) -> np.ndarray:
    rho = np.asarray(rho, dtype=float)
    if rho.shape != (n_tags, n_tags):
        raise AnalyticError(f"rho must have shape ({n_tags}, {n_tags}), got {rho.shape}")
    return rho


def sinr(weighted_energies, rho, noise_density) -> np.ndarray:
    """
    SINR of every tag: w_n / (sum_j rho_nj w_j + N0) along the last axis.

    With w = E this is the average SINR; with w = g * E (times M/(M+1) for monostatic
    tags) the instantaneous one. rho has a zero diagonal.
    """
    w = np.asarray(weighted_energies, dtype=float)
    rho = _check_rho(rho, w.shape[-1])
    return w / (w @ rho.T + noise_density)


def avg_sinr_monostatic(n: int, energies, rho, noise_density: float) -> float:
    """Average SINR of tag n: E_n / (sum_j rho_nj E_j + N0); fading means cancel."""
    return float(sinr(energies, rho, noise_density)[n])


def avg_sinr_multistatic(l: int, n: int, energies, rho, noise_density: float) -> float:
    """Average SINR of tag n in slot l; energies has shape (L, N)."""
    energies = np.asarray(energies, dtype=float)
    return float(sinr(energies[l], rho, noise_density)[n])


def instantaneous_sinr_monostatic(n: int, fading_power, m_tag_reader, energies, rho, noise_density):
    """SINR of tag n for one fading draw g = a^4, keeping the M/(M+1) factors of every tag."""
    w = np.asarray(fading_power) * monostatic_scale(m_tag_reader) * np.asarray(energies)
    return float(sinr(w, rho, noise_density)[n])


def instantaneous_sinr_multistatic(n: int, fading_power, energies, rho, noise_density):
    """SINR of tag n in one slot for one draw of the dyadic powers g."""
    w = np.asarray(fading_power) * np.asarray(energies)
    return float(sinr(w, rho, noise_density)[n])


def sinr_breakdown(n: int, weighted_energies, rho, noise_density: float) -> SinrBreakdown:
    """Itemized SINR of tag n; all other tags interfere."""
    w = np.asarray(weighted_energies, dtype=float)
    rho = _check_rho(rho, w.size)
    terms = [(j, float(rho[n, j] * w[j])) for j in range(w.size) if j != n]
    return SinrBreakdown(signal_energy=float(w[n]), interference_terms=terms, noise=noise_density)


# =============================================================================
# Information outage
# =============================================================================


def _check_theta(theta, avg_sinr):
    theta = np.asarray(theta, dtype=float)
    avg_sinr = np.asarray(avg_sinr, dtype=float)
    if np.any(theta < 0) or np.any(~(avg_sinr > 0)):
        raise AnalyticError("theta must be >= 0 and average SINR > 0")
    return theta, avg_sinr


def outage_bound_monostatic(theta, avg_sinr):
    """Rayleigh per-slot bound P(SINR <= theta) <= 1 - exp(-sqrt(2 theta / SINR))."""
    t, s = _check_theta(theta, avg_sinr)
    return _out(monostatic_power_cdf_rayleigh(2 * t / s), _scalar(theta, avg_sinr))


def outage_bound_multistatic(theta, avg_sinr):
    """Rayleigh per-slot bound 1 - 2 sqrt(theta/SINR) K_1(2 sqrt(theta/SINR))."""
    t, s = _check_theta(theta, avg_sinr)
    return _out(dyadic_power_cdf_rayleigh(t / s), _scalar(theta, avg_sinr))


def l_slot_outage(per_slot_probs: Sequence[float] | np.ndarray, axis: int = -1):
    """Outage over L independent slots: product of the per-slot probabilities."""
    probs = np.asarray(per_slot_probs, dtype=float)
    if probs.size == 0:
        raise AnalyticError("need at least one slot")
    if np.any(probs < 0) or np.any(probs > 1):
        raise AnalyticError("per-slot probabilities must lie in [0, 1]")
    result = np.prod(probs, axis=axis)
    return float(result) if np.ndim(result) == 0 else result


# =============================================================================
# Energy outage
# =============================================================================


def _harvest_outage_per_slot(theta_h, power, gain, m, extra_dims: int) -> np.ndarray:
    # P(P * L * a^2 <= theta_h) for a^2 ~ Gamma(m, 1/m)
    theta = np.asarray(theta_h, dtype=float)
    if np.any(~(theta > 0)):
        raise AnalyticError("harvesting threshold must be > 0")
    mean_power = np.asarray(power, dtype=float) * np.asarray(gain, dtype=float)
    if np.any(~(mean_power > 0)):
        raise AnalyticError("transmit powers and path gains must be > 0")
    theta = theta.reshape(theta.shape + (1,) * extra_dims)
    return link_power_cdf(theta / mean_power, m)


def energy_outage_monostatic(theta_h, reader_power: float, gain_tag_reader, m_tag_reader, slots: int):
    """
    Energy outage of monostatic tags over L slots, (gamma(M, M theta_h / (P_R L)) / Gamma(M))^L.

    Output shape is theta_h.shape + gain_tag_reader.shape.
    """
    if slots < 1:
        raise AnalyticError(f"slots must be >= 1, got {slots}")
    (m,) = _check_m(m_tag_reader)
    gain = np.asarray(gain_tag_reader, dtype=float)
    per_slot = _harvest_outage_per_slot(theta_h, reader_power, gain, m, gain.ndim)
    return _out(per_slot**slots, _scalar(theta_h, gain_tag_reader, m_tag_reader))


def energy_outage_multistatic(theta_h, ce_powers, gain_ce_tag, m_ce_tag):
    """
    Energy outage of multistatic tags, prod_l gamma(M_ln, M_ln theta_h / (P_Cl L_ln)) / Gamma(M_ln).

    gain_ce_tag and m_ce_tag have shape (L,) or (L, N); slot l is served by CE l.
    Output shape is theta_h.shape + gain_ce_tag.shape[1:].
    """
    gain = np.asarray(gain_ce_tag, dtype=float)
    if gain.ndim == 0:
        raise AnalyticError("gain_ce_tag needs a leading CE axis")
    (m,) = _check_m(m_ce_tag)
    powers = np.asarray(ce_powers, dtype=float).reshape((-1,) + (1,) * (gain.ndim - 1))
    if powers.shape[0] != gain.shape[0]:
        raise AnalyticError("one transmit power per carrier emitter is required")
    per_slot = _harvest_outage_per_slot(theta_h, powers, gain, m, gain.ndim)
    result = np.prod(per_slot, axis=-gain.ndim)
    return float(result) if np.ndim(result) == 0 else result


def energy_outage_aggregates(per_tag_probs, axis: int = -1) -> tuple:
    """(average, maximum) energy outage across tags."""
    probs = np.asarray(per_tag_probs, dtype=float)
    if probs.size == 0:
        raise AnalyticError("need at least one tag")
    mean, worst = probs.mean(axis=axis), probs.max(axis=axis)
    if np.ndim(mean) == 0:
        return float(mean), float(worst)
    return mean, worst
