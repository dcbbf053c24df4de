"""
Propagation and small-scale fading for monostatic and multistatic backscatter links.

- Log-distance path loss referenced to d0 = 1 m
- Nakagami-m amplitude sampling (Rician kappa mapped to m at construction time)
- Distributions of the received fading power: single link a^2, monostatic
  roundtrip a^4 and multistatic dyadic product a_CT^2 * a_TR^2

Samplers take a caller-owned numpy Generator; there is no global random state.
Links are sampled independently, across tags as well as across slots.
"""

import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
from scipy import special, stats

from analysis.specfun import log_bessel_k, quadrature
from config import REFERENCE_DISTANCE_M, WAVELENGTH_M

# Nakagami m flag for a deterministic unit-amplitude link
NO_FADING = math.inf

MIN_NAKAGAMI_M = 0.5


class ChannelError(ValueError):
    """Raised on invalid channel parameters or distribution arguments."""

    pass


def rician_to_nakagami(kappa):
    """Map a Rician K-factor to the Nakagami m with matching amount of fading."""
    arr = np.asarray(kappa, dtype=float)
    if np.any(~(arr >= 0)):
        raise ChannelError("Rician kappa must be >= 0")
    m = (arr + 1) ** 2 / (2 * arr + 1)
    return float(m) if np.ndim(kappa) == 0 else m


def _check_m(m, allow_no_fading: bool = True) -> np.ndarray:
    arr = np.asarray(m, dtype=float)
    if np.any(np.isnan(arr)) or np.any(arr < MIN_NAKAGAMI_M):
        raise ChannelError(f"Nakagami m must be >= {MIN_NAKAGAMI_M}")
    if not allow_no_fading and np.any(np.isinf(arr)):
        raise ChannelError("density undefined without fading (m = inf)")
    return arr


@dataclass(frozen=True)
class FadingParams:
    """Nakagami m of the tag-to-reader link and of every CE-to-tag link of one tag."""

    m_tag_reader: float
    m_ce_tag: tuple[float, ...] = field(default_factory=tuple)

    def __post_init__(self):
        _check_m(self.m_tag_reader)
        _check_m(list(self.m_ce_tag))
        object.__setattr__(self, "m_ce_tag", tuple(float(m) for m in self.m_ce_tag))

    @classmethod
    def from_rician(
        cls, kappa_tag_reader: float, kappa_ce_tag: Sequence[float] = ()
    ) -> "FadingParams":
        """Build from Rician K-factors; only the mapped m values are kept."""
        return cls(
            m_tag_reader=rician_to_nakagami(kappa_tag_reader),
            m_ce_tag=tuple(rician_to_nakagami(k) for k in kappa_ce_tag),
        )

    @classmethod
    def rayleigh(cls, n_emitters: int = 0) -> "FadingParams":
        return cls(m_tag_reader=1.0, m_ce_tag=(1.0,) * n_emitters)


@dataclass(frozen=True)
class PathLossParams:
    """Log-distance path loss: L = (lambda / (4 pi d0))^2 (d0 / d)^nu."""

    exponent: float
    wavelength: float = WAVELENGTH_M
    reference_distance: float = REFERENCE_DISTANCE_M

    def __post_init__(self):
        if not self.wavelength > 0:
            raise ChannelError(f"wavelength must be > 0, got {self.wavelength}")
        if not self.reference_distance > 0:
            raise ChannelError(f"reference distance must be > 0, got {self.reference_distance}")
        if not self.exponent > 0:
            raise ChannelError(f"path-loss exponent must be > 0, got {self.exponent}")


def path_gain(
    distance,
    exponent,
    wavelength: float = WAVELENGTH_M,
    reference_distance: float = REFERENCE_DISTANCE_M,
):
    """Vectorized path gain over arrays of distances and exponents."""
    d = np.asarray(distance, dtype=float)
    nu = np.asarray(exponent, dtype=float)
    if np.any(~(d >= reference_distance)):
        raise ChannelError(
            f"distance below the reference distance {reference_distance} m "
            f"(min {np.nanmin(d):.4g} m); the path-loss model is invalid there"
        )
    gain = (wavelength / (4 * np.pi * reference_distance)) ** 2 * (reference_distance / d) ** nu
    return float(gain) if np.ndim(distance) == 0 and np.ndim(exponent) == 0 else gain


def path_loss(distance, params: PathLossParams):
    """Path gain (<= (lambda/4pi)^2) of a link of the given length."""
    return path_gain(distance, params.exponent, params.wavelength, params.reference_distance)


# =============================================================================
# Sampling
# =============================================================================


def sample_link_power(m, rng: np.random.Generator, size=None) -> np.ndarray:
    """Fading power a^2 ~ Gamma(m, 1/m); exactly 1 where m is NO_FADING."""
    m_arr = _check_m(m)
    if size is None:
        size = m_arr.shape
    no_fading = np.isinf(m_arr)
    shape = np.where(no_fading, 1.0, m_arr)
    power = rng.gamma(shape=shape, scale=1.0 / shape, size=size)
    return np.where(no_fading, 1.0, power)


def sample_nakagami_amplitude(m, rng: np.random.Generator, size=None):
    """Nakagami-m amplitude a with E[a^2] = 1."""
    amp = np.sqrt(sample_link_power(m, rng, size))
    return float(amp) if size is None and np.ndim(m) == 0 else amp


def sample_phase(rng: np.random.Generator, size=None):
    """Channel phase, uniform on [0, 2 pi)."""
    return rng.uniform(0.0, 2 * np.pi, size=size)


def sample_monostatic_power(m, rng: np.random.Generator, size=None) -> np.ndarray:
    """Roundtrip fading power a^4 of a monostatic link."""
    return sample_link_power(m, rng, size) ** 2


def sample_dyadic_power(m_ce_tag, m_tag_reader, rng: np.random.Generator, size=None) -> np.ndarray:
    """Dyadic fading power a_CT^2 * a_TR^2 of a multistatic link."""
    if size is None:
        size = np.broadcast_shapes(np.shape(m_ce_tag), np.shape(m_tag_reader))
    return sample_link_power(m_ce_tag, rng, size) * sample_link_power(m_tag_reader, rng, size)


# =============================================================================
# Distributions
# =============================================================================


def _check_support(x, strict: bool, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    bad = ~(arr > 0) if strict else ~(arr >= 0)
    if np.any(bad):
        raise ChannelError(f"{name} requires x {'>' if strict else '>='} 0")
    return arr


def link_power_pdf(x, m):
    """Density of a^2 ~ Gamma(m, 1/m)."""
    x_arr = _check_support(x, strict=False, name="link_power_pdf")
    m_arr = _check_m(m, allow_no_fading=False)
    pdf = stats.gamma.pdf(x_arr, a=m_arr, scale=1.0 / m_arr)
    return float(pdf) if np.ndim(x) == 0 and np.ndim(m) == 0 else pdf


def link_power_cdf(x, m):
    """CDF of a^2; a unit step at 1 for NO_FADING."""
    x_arr = _check_support(x, strict=False, name="link_power_cdf")
    m_arr = _check_m(m)
    shape = np.where(np.isinf(m_arr), 1.0, m_arr)
    cdf = np.where(np.isinf(m_arr), (x_arr >= 1.0).astype(float), special.gammainc(shape, shape * x_arr))
    return float(cdf) if np.ndim(x) == 0 and np.ndim(m) == 0 else cdf


def dyadic_power_pdf(x, m_ce_tag, m_tag_reader):
    """
    Density of the dyadic power g = a_CT^2 * a_TR^2.

    f(x) = 2 (x m1 m2)^((m1+m2)/2) K_{m2-m1}(2 sqrt(m1 m2 x)) / (x Gamma(m1) Gamma(m2)),
    evaluated in the log domain.
    """
    x_arr = _check_support(x, strict=True, name="dyadic_power_pdf")
    m1 = _check_m(m_ce_tag, allow_no_fading=False)
    m2 = _check_m(m_tag_reader, allow_no_fading=False)
    z = 2 * np.sqrt(m1 * m2 * x_arr)
    log_pdf = (
        np.log(2.0)
        + 0.5 * (m1 + m2) * np.log(x_arr * m1 * m2)
        + log_bessel_k(m2 - m1, z)
        - np.log(x_arr)
        - special.gammaln(m1)
        - special.gammaln(m2)
    )
    pdf = np.exp(log_pdf)
    return float(pdf) if all(np.ndim(v) == 0 for v in (x, m_ce_tag, m_tag_reader)) else pdf


def dyadic_power_cdf_rayleigh(x):
    """Dyadic Rayleigh power CDF, 1 - 2 sqrt(x) K_1(2 sqrt(x))."""
    x_arr = _check_support(x, strict=False, name="dyadic_power_cdf_rayleigh")
    z = 2 * np.sqrt(x_arr)
    with np.errstate(invalid="ignore", divide="ignore"):
        # z K_1(z) -> 1 as z -> 0
        tail = np.where(z > 0, z * special.kve(1, np.where(z > 0, z, 1.0)) * np.exp(-z), 1.0)
    cdf = np.clip(1.0 - tail, 0.0, 1.0)
    return float(cdf) if np.ndim(x) == 0 else cdf


def _dyadic_power_cdf_scalar(x: float, m1: float, m2: float) -> float:
    if x == 0:
        return 0.0
    if np.isinf(m1) and np.isinf(m2):
        return float(x >= 1.0)
    if np.isinf(m1):
        return float(link_power_cdf(x, m2))
    if np.isinf(m2):
        return float(link_power_cdf(x, m1))
    if m1 == 1.0 and m2 == 1.0:
        return float(dyadic_power_cdf_rayleigh(x))

    # condition on the tag-to-reader power y: P(a_CT^2 <= x / y)
    def integrand(y: float) -> float:
        return special.gammainc(m1, m1 * x / y) * stats.gamma.pdf(y, a=m2, scale=1.0 / m2)

    value = quadrature(integrand, 0.0, 1.0) + quadrature(integrand, 1.0, np.inf)
    return min(max(value, 0.0), 1.0)


def dyadic_power_cdf(x, m_ce_tag, m_tag_reader):
    """Dyadic power CDF for general Nakagami m (one-dimensional quadrature)."""
    x_arr = _check_support(x, strict=False, name="dyadic_power_cdf")
    m1 = _check_m(m_ce_tag)
    m2 = _check_m(m_tag_reader)
    cdf = np.vectorize(_dyadic_power_cdf_scalar, otypes=[float])(x_arr, m1, m2)
    return float(cdf) if all(np.ndim(v) == 0 for v in (x, m_ce_tag, m_tag_reader)) else cdf


def monostatic_power_pdf(x, m):
    """Density of the roundtrip power a^4: m^m x^(m/2-1) e^(-m sqrt(x)) / (2 Gamma(m))."""
    x_arr = _check_support(x, strict=True, name="monostatic_power_pdf")
    m_arr = _check_m(m, allow_no_fading=False)
    log_pdf = (
        m_arr * np.log(m_arr)
        + (m_arr / 2 - 1) * np.log(x_arr)
        - m_arr * np.sqrt(x_arr)
        - np.log(2.0)
        - special.gammaln(m_arr)
    )
    pdf = np.exp(log_pdf)
    return float(pdf) if np.ndim(x) == 0 and np.ndim(m) == 0 else pdf


def monostatic_power_cdf(x, m):
    """CDF of a^4: P(a^2 <= sqrt(x))."""
    x_arr = _check_support(x, strict=False, name="monostatic_power_cdf")
    return link_power_cdf(np.sqrt(x_arr), m)


def monostatic_power_cdf_rayleigh(x):
    """Monostatic Rayleigh power CDF, 1 - exp(-sqrt(x))."""
    x_arr = _check_support(x, strict=False, name="monostatic_power_cdf_rayleigh")
    cdf = -np.expm1(-np.sqrt(x_arr))
    return float(cdf) if np.ndim(x) == 0 else cdf
