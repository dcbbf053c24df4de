"""
Bit decisions on received FSK vectors.

Three receivers are provided:
- coherent minimum distance (full CSI), equivalent to ML for equal-energy orthogonal symbols
- noncoherent envelope detection given the tag phases, |r1 + e^{2j phi0} r2| vs |r3 + e^{2j phi1} r4|
- square-law reference detection, |r1|^2 + |r2|^2 vs |r3|^2 + |r4|^2

Batch functions operate on arrays of shape (..., 4) and are what the simulation kernel
uses; the single-symbol functions wrap them. Exact ties always decide bit 0.
"""

from dataclasses import dataclass
from enum import StrEnum

import numpy as np

from radio.signal import RxSymbol, TagPhases, tag_symbols


class DetectionError(ValueError):
    """Raised on inconsistent receiver inputs."""

    pass


class DetectorKind(StrEnum):
    COHERENT = "coherent"
    NONCOHERENT = "noncoherent"
    SQUARE_LAW = "square_law"


class KnowledgeMode(StrEnum):
    FULL_CSI = "full_csi"
    AMPLITUDES_AND_TAG_PHASES_ONLY = "amplitudes_and_tag_phases_only"


@dataclass(frozen=True)
class ChannelKnowledge:
    """What the receiver knows about the channel of one tag in one slot."""

    amplitude: float
    phase: float
    mode: KnowledgeMode = KnowledgeMode.FULL_CSI

    def __post_init__(self):
        if not self.amplitude >= 0:
            raise DetectionError(f"channel amplitude must be >= 0, got {self.amplitude}")

    @property
    def gain(self) -> complex:
        return self.amplitude * np.exp(1j * self.phase)

    @classmethod
    def for_detector(cls, kind: DetectorKind, amplitude: float, phase: float) -> "ChannelKnowledge":
        mode = (
            KnowledgeMode.FULL_CSI
            if kind == DetectorKind.COHERENT
            else KnowledgeMode.AMPLITUDES_AND_TAG_PHASES_ONLY
        )
        return cls(amplitude=amplitude, phase=phase, mode=mode)


# =============================================================================
# Decision statistics (positive favours bit 1)
# =============================================================================


def coherent_statistic(rx, gain, phi0, phi1) -> np.ndarray:
    """
    Re<g x1, r> - Re<g x0, r>; gain is the full effective complex gain h sqrt(scale E).

    Summing this statistic over slots is maximum-ratio combining.
    """
    rx = np.asarray(rx, dtype=complex)
    gain = np.asarray(gain, dtype=complex)
    x0 = tag_symbols(np.zeros(np.shape(phi0), dtype=int), phi0, phi1)
    x1 = tag_symbols(np.ones(np.shape(phi0), dtype=int), phi0, phi1)
    corr0 = np.real(np.conj(gain) * np.sum(np.conj(x0) * rx, axis=-1))
    corr1 = np.real(np.conj(gain) * np.sum(np.conj(x1) * rx, axis=-1))
    return corr1 - corr0


def noncoherent_statistic(rx, phi0, phi1) -> np.ndarray:
    """|r3 + e^{2j phi1} r4| - |r1 + e^{2j phi0} r2|."""
    rx = np.asarray(rx, dtype=complex)
    z0 = np.abs(rx[..., 0] + np.exp(2j * np.asarray(phi0)) * rx[..., 1])
    z1 = np.abs(rx[..., 2] + np.exp(2j * np.asarray(phi1)) * rx[..., 3])
    return z1 - z0


def square_law_statistic(rx) -> np.ndarray:
    """(|r3|^2 + |r4|^2) - (|r1|^2 + |r2|^2)."""
    power = np.abs(np.asarray(rx, dtype=complex)) ** 2
    return power[..., 2] + power[..., 3] - power[..., 0] - power[..., 1]


def decide(statistic) -> np.ndarray:
    """Bit 1 only for a strictly positive statistic."""
    return (np.asarray(statistic) > 0).astype(np.int8)


def decide_coherent(rx, gain, phi0, phi1) -> np.ndarray:
    return decide(coherent_statistic(rx, gain, phi0, phi1))


def decide_noncoherent(rx, phi0, phi1) -> np.ndarray:
    return decide(noncoherent_statistic(rx, phi0, phi1))


def decide_square_law(rx) -> np.ndarray:
    return decide(square_law_statistic(rx))


# =============================================================================
# Single-symbol receivers
# =============================================================================


def detect_coherent(rx: RxSymbol, h: complex, energy_scale: float, phases: TagPhases) -> int:
    """argmin_i ||r - h sqrt(energy_scale) x(i)||; energy_scale includes E (and M/(M+1))."""
    gain = h * np.sqrt(energy_scale)
    return int(decide_coherent(rx.vector, gain, phases.phi0, phases.phi1))


def detect_noncoherent(rx: RxSymbol, phases: TagPhases) -> int:
    """Envelope detector; only the tag phases are known."""
    return int(decide_noncoherent(rx.vector, phases.phi0, phases.phi1))


def detect_square_law(rx: RxSymbol) -> int:
    """Energy comparison between the two subcarriers."""
    return int(decide_square_law(rx.vector))
