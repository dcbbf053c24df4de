"""
Baseband FSK signal model and link budget for scatter-radio tags.

Each bit is carried by one of two subcarrier frequencies; after CFO correction and DC
blocking the received signal of one tag in one slot is a 4-dimensional complex vector
(two spectral lines per subcarrier). This module synthesizes those vectors, computes
energy per bit and SNR for both architectures, and derives the adjacent-channel
interference coefficients of a subcarrier frequency assignment.
"""

import itertools
from dataclasses import dataclass, field, replace

import numpy as np

from config import (
    BIT_DURATION_S,
    EPSILON_PER_BIT_DURATION,
    FSK_TONE_OFFSET_FRACTION,
    NOISE_DENSITY_W_HZ,
    ORTHOGONALITY_FACTOR,
    ORTHOGONALITY_REL_TOL,
    REFLECTION_GAP,
    SCATTERING_EFFICIENCY,
    SUBCARRIER_BASE_HZ,
    SUBCARRIER_SPACING_HZ,
    WAVELENGTH_M,
)

SQRT_HALF = np.sqrt(0.5)


class SignalError(ValueError):
    """Raised on invalid link-budget or frequency-plan parameters."""

    pass


@dataclass(frozen=True)
class SystemConfig:
    """Noise, timing, transmit powers and tag constants shared by every link."""

    reader_power: float
    ce_powers: tuple[float, ...] = ()
    noise_density: float = NOISE_DENSITY_W_HZ
    bit_duration: float = BIT_DURATION_S
    reflection_gap: float = REFLECTION_GAP
    scattering_efficiency: float = SCATTERING_EFFICIENCY
    wavelength: float = WAVELENGTH_M

    def __post_init__(self):
        object.__setattr__(self, "ce_powers", tuple(float(p) for p in self.ce_powers))
        if not self.reader_power > 0 or any(not p > 0 for p in self.ce_powers):
            raise SignalError("transmit powers must be > 0")
        if not self.noise_density > 0:
            raise SignalError(f"noise density must be > 0, got {self.noise_density}")
        if not self.bit_duration > 0:
            raise SignalError(f"bit duration must be > 0, got {self.bit_duration}")
        if not 0 < self.scattering_efficiency <= 1:
            raise SignalError("scattering efficiency must lie in (0, 1]")
        if not 0 < self.reflection_gap <= 2:
            raise SignalError("reflection gap |Gamma_0 - Gamma_1| must lie in (0, 2]")
        if not self.wavelength > 0:
            raise SignalError(f"wavelength must be > 0, got {self.wavelength}")

    @classmethod
    def common_power(cls, tx_power: float, n_emitters: int, **kwargs) -> "SystemConfig":
        """Fair-comparison configuration: reader and every CE transmit tx_power."""
        return cls(reader_power=tx_power, ce_powers=(tx_power,) * n_emitters, **kwargs)

    def with_tx_power(self, tx_power: float) -> "SystemConfig":
        return replace(self, reader_power=tx_power, ce_powers=(tx_power,) * len(self.ce_powers))

    @property
    def modulation_factor(self) -> float:
        """|Gamma_0 - Gamma_1| * (2/pi) * s_n, common to both architectures."""
        return self.reflection_gap * (2 / np.pi) * self.scattering_efficiency


@dataclass(frozen=True)
class TagPhases:
    """Implementation-specific phase mismatch of one tag, constant over all slots."""

    phi0: float
    phi1: float

    def __post_init__(self):
        for name in ("phi0", "phi1"):
            value = getattr(self, name)
            if not 0 <= value < 2 * np.pi:
                raise SignalError(f"{name} must lie in [0, 2pi), got {value}")

    @classmethod
    def sample(cls, rng: np.random.Generator) -> "TagPhases":
        phi0, phi1 = rng.uniform(0.0, 2 * np.pi, size=2)
        return cls(float(phi0), float(phi1))


@dataclass
class RxSymbol:
    """Received 4-dimensional baseband vector of one tag in one slot."""

    vector: np.ndarray
    truth_bit: int
    channel_amp: float
    channel_phase: float
    slot: int = 0
    tag: int = 0

    def __post_init__(self):
        self.vector = np.asarray(self.vector, dtype=complex)
        if self.vector.shape != (4,):
            raise SignalError(f"received vector must have exactly 4 entries, got {self.vector.shape}")


@dataclass(frozen=True)
class FrequencyAssignment:
    """
    Assignment of subcarrier-frequency pairs to tags.

    permutation[n] = c is the 1-based frequency pair of tag n:
    F_{n,0} = base + c * spacing, F_{n,1} = F_{n,0} + spacing / 5.
    epsilon defaults to 2 pi T when rho coefficients are computed.
    """

    permutation: tuple[int, ...]
    base_freq: float = SUBCARRIER_BASE_HZ
    spacing: float = SUBCARRIER_SPACING_HZ
    epsilon: float | None = None
    tone_offset_fraction: float = FSK_TONE_OFFSET_FRACTION

    def __post_init__(self):
        perm = tuple(int(c) for c in self.permutation)
        object.__setattr__(self, "permutation", perm)
        if sorted(perm) != list(range(1, len(perm) + 1)):
            raise SignalError("permutation must be a bijection onto 1..N")
        if not self.spacing > 0 or not self.base_freq > 0:
            raise SignalError("base frequency and spacing must be > 0")
        if not 0 < self.tone_offset_fraction < 1:
            raise SignalError("tone offset fraction must lie in (0, 1)")
        if self.epsilon is not None and not self.epsilon > 0:
            raise SignalError(f"epsilon must be > 0, got {self.epsilon}")

    @classmethod
    def random(cls, n_tags: int, rng: np.random.Generator, **kwargs) -> "FrequencyAssignment":
        """Uniformly random assignment of the N frequency pairs."""
        return cls(permutation=tuple(rng.permutation(n_tags) + 1), **kwargs)

    @classmethod
    def identity(cls, n_tags: int, **kwargs) -> "FrequencyAssignment":
        return cls(permutation=tuple(range(1, n_tags + 1)), **kwargs)

    @property
    def n_tags(self) -> int:
        return len(self.permutation)

    def frequencies(self) -> np.ndarray:
        """Subcarrier frequencies, shape (N, 2): column i is the frequency of bit i."""
        c = np.asarray(self.permutation, dtype=float)
        f0 = self.base_freq + c * self.spacing
        return np.column_stack([f0, f0 + self.spacing * self.tone_offset_fraction])

    def epsilon_for(self, bit_duration: float) -> float:
        return self.epsilon if self.epsilon is not None else EPSILON_PER_BIT_DURATION * bit_duration


# =============================================================================
# Symbols
# =============================================================================


def tag_symbols(bits, phi0, phi1) -> np.ndarray:
    """Batch of unit-norm FSK symbols, shape (..., 4)."""
    bits = np.asarray(bits)
    phi0 = np.asarray(phi0, dtype=float)
    phi1 = np.asarray(phi1, dtype=float)
    shape = np.broadcast_shapes(bits.shape, phi0.shape, phi1.shape)
    out = np.zeros(shape + (4,), dtype=complex)
    zero = np.broadcast_to(bits == 0, shape)
    one = ~zero
    e0 = np.broadcast_to(np.exp(1j * phi0), shape)
    e1 = np.broadcast_to(np.exp(1j * phi1), shape)
    out[..., 0] = np.where(zero, SQRT_HALF * e0, 0)
    out[..., 1] = np.where(zero, SQRT_HALF * np.conj(e0), 0)
    out[..., 2] = np.where(one, SQRT_HALF * e1, 0)
    out[..., 3] = np.where(one, SQRT_HALF * np.conj(e1), 0)
    return out


def tag_symbol(bit: int, phases: TagPhases) -> np.ndarray:
    """Unit-norm 4-vector x for one bit: two lines of magnitude sqrt(1/2)."""
    if bit not in (0, 1):
        raise SignalError(f"bit must be 0 or 1, got {bit}")
    return tag_symbols(bit, phases.phi0, phases.phi1)


# =============================================================================
# Link budget
# =============================================================================


def monostatic_scale(m_tag_reader):
    """Energy scaling M/(M+1) of the monostatic roundtrip; 1 without fading."""
    m = np.asarray(m_tag_reader, dtype=float)
    scale = np.where(np.isinf(m), 1.0, m / np.where(np.isinf(m), 1.0, m + 1))
    return float(scale) if np.ndim(m_tag_reader) == 0 else scale


def _check_gains(*gains):
    for gain in gains:
        if np.any(~(np.asarray(gain, dtype=float) > 0)):
            raise SignalError("path gains must be > 0")


def energy_per_bit_multistatic(
    config: SystemConfig, gain_ce_tag, gain_tag_reader, ce_index: int = 0
):
    """
    Average energy per bit of a tag illuminated by CE ce_index.

    mu = sqrt(2 P_C L_CT L_TR) * |Gamma_0 - Gamma_1| * (2/pi) * s, E = mu^2 T / 2.
    """
    _check_gains(gain_ce_tag, gain_tag_reader)
    if not 0 <= ce_index < len(config.ce_powers):
        raise SignalError(f"no carrier emitter with index {ce_index}")
    mu_sq = 2 * config.ce_powers[ce_index] * np.asarray(gain_ce_tag) * np.asarray(gain_tag_reader)
    energy = mu_sq * config.modulation_factor**2 * config.bit_duration / 2
    return float(energy) if np.ndim(energy) == 0 else energy


def energy_per_bit_monostatic(config: SystemConfig, gain_tag_reader, m_tag_reader):
    """
    Average energy per bit of a monostatic tag.

    mu = sqrt(2 P_R) L_TR |Gamma_0 - Gamma_1| (2/pi) s, E = ((1 + M) / (2 M)) mu^2 T.
    The path gain enters mu linearly: the signal travels the link twice.
    """
    _check_gains(gain_tag_reader)
    m = np.asarray(m_tag_reader, dtype=float)
    if np.any(np.isnan(m)) or np.any(m < 0.5):
        raise SignalError("Nakagami m must be >= 0.5")
    prefactor = 0.5 / monostatic_scale(m)
    mu_sq = 2 * config.reader_power * np.asarray(gain_tag_reader) ** 2 * config.modulation_factor**2
    energy = prefactor * mu_sq * config.bit_duration
    return float(energy) if np.ndim(energy) == 0 else energy


def snr(energy_per_bit, config: SystemConfig):
    """Average SNR E / N0."""
    value = np.asarray(energy_per_bit, dtype=float) / config.noise_density
    return float(value) if np.ndim(value) == 0 else value


# =============================================================================
# Frequency plan
# =============================================================================


@dataclass
class OrthogonalityReport:
    """Outcome of an orthogonality check; truthy when no violation was found."""

    ok: bool
    violations: list[tuple[float, float, str]] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def check_orthogonality(
    assignment: FrequencyAssignment,
    bit_duration: float,
    coherent: bool,
    factor: float = ORTHOGONALITY_FACTOR,
    rel_tol: float = ORTHOGONALITY_REL_TOL,
) -> OrthogonalityReport:
    """
    Check that every pair of distinct subcarrier frequencies is separated by an integer
    multiple of 1/(2T) (coherent) or 1/T (noncoherent), and that every frequency is at
    least `factor` times 1/(2T).
    """
    freqs = np.unique(assignment.frequencies().ravel())
    unit = 1 / (2 * bit_duration) if coherent else 1 / bit_duration
    violations: list[tuple[float, float, str]] = []

    for f in freqs:
        if f * 2 * bit_duration < factor:
            violations.append((float(f), float(f), f"below {factor} x 1/(2T)"))

    for fa, fb in itertools.combinations(freqs, 2):
        k = abs(fb - fa) / unit
        if abs(k - round(k)) > rel_tol * max(1.0, k):
            violations.append((float(fa), float(fb), f"difference is {k:.6g} x {unit:g} Hz"))

    return OrthogonalityReport(ok=not violations, violations=violations)


def rho_matrix(assignment: FrequencyAssignment, bit_duration: float) -> np.ndarray:
    """
    Interference coefficients rho_nj = max over bit pairs of [eps |F_n,i - F_j,k|]^-2.

    Symmetric, zero on the diagonal.
    """
    freqs = assignment.frequencies()
    eps = assignment.epsilon_for(bit_duration)
    # (N, N, 2, 2) separations between every pair of tones of every pair of tags
    diff = np.abs(freqs[:, None, :, None] - freqs[None, :, None, :])
    closest = diff.min(axis=(2, 3))
    np.fill_diagonal(closest, np.inf)
    if np.any(closest == 0):
        raise SignalError("two tags share a subcarrier frequency")
    return 1.0 / (eps * closest) ** 2


def rho_coefficient(assignment: FrequencyAssignment, n: int, j: int, bit_duration: float) -> float:
    """rho_nj for two distinct tags (0-based indices)."""
    if n == j:
        raise SignalError("rho is only defined between distinct tags")
    freqs = assignment.frequencies()
    closest = np.abs(freqs[n][:, None] - freqs[j][None, :]).min()
    return float(1.0 / (assignment.epsilon_for(bit_duration) * closest) ** 2)


# =============================================================================
# Received vectors
# =============================================================================


def synthesize_rx_batch(
    bits,
    phi0,
    phi1,
    channel_amp,
    channel_phase,
    energy,
    noise_density: float,
    rng: np.random.Generator,
    energy_scale=1.0,
) -> np.ndarray:
    """
    r = h sqrt(energy_scale * E) x + w with w ~ CN(0, N0 I_4), shape (..., 4).

    energy_scale is M/(M+1) for monostatic links and 1 for multistatic ones.
    noise_density = 0 disables the noise.
    """
    if noise_density < 0:
        raise SignalError("noise density must be >= 0")
    x = tag_symbols(bits, phi0, phi1)
    gain = (
        np.asarray(channel_amp)
        * np.exp(1j * np.asarray(channel_phase))
        * np.sqrt(np.asarray(energy_scale) * np.asarray(energy))
    )
    rx = gain[..., None] * x
    if noise_density > 0:
        sigma = np.sqrt(noise_density / 2)
        rx = rx + sigma * (rng.standard_normal(rx.shape) + 1j * rng.standard_normal(rx.shape))
    return rx


def synthesize_rx(
    bit: int,
    phases: TagPhases,
    channel_amp: float,
    channel_phase: float,
    energy: float,
    config: SystemConfig,
    rng: np.random.Generator,
    monostatic_m: float | None = None,
    slot: int = 0,
    tag: int = 0,
) -> RxSymbol:
    """
    Received vector of one tag in one slot.

    For monostatic links pass the roundtrip amplitude a_TR^2 and phase 2 phi together with
    monostatic_m, which applies the sqrt(M/(M+1)) prefactor.
    """
    if bit not in (0, 1):
        raise SignalError(f"bit must be 0 or 1, got {bit}")
    scale = 1.0 if monostatic_m is None else monostatic_scale(monostatic_m)
    vector = synthesize_rx_batch(
        bit,
        phases.phi0,
        phases.phi1,
        channel_amp,
        channel_phase,
        energy,
        config.noise_density,
        rng,
        energy_scale=scale,
    )
    return RxSymbol(
        vector=vector,
        truth_bit=bit,
        channel_amp=channel_amp,
        channel_phase=channel_phase,
        slot=slot,
        tag=tag,
    )
