"""
Scenario description and estimate types for the Monte-Carlo kernel.

A ScenarioSpec is the fully resolved, SI-unit form of a run configuration (see
data.config_loader). Every physical quantity is linear: SNR and SINR thresholds are
ratios, powers are in W, lengths in m, times in s.
"""

import math
from dataclasses import asdict, dataclass
from enum import StrEnum

import numpy as np
from scipy import stats

from config import (
    BIT_DURATION_S,
    CONFIDENCE_LEVEL,
    DEFAULT_BER_TRIALS,
    DEFAULT_ENERGY_MC_DRAWS,
    DEFAULT_OUTAGE_REALIZATIONS,
    DEFAULT_OUTAGE_TOPOLOGIES,
    DEFAULT_PLACEMENT_TOPOLOGIES,
    DEFAULT_PLACEMENT_TRIALS,
    DEFAULT_SEED,
    DIVERSITY_POINTS,
    DIVERSITY_WINDOW_DB,
    HARVESTING_THRESHOLD_W,
    NOISE_DENSITY_W_HZ,
    PATH_LOSS_EXPONENT_RANGE,
    REFLECTION_GAP,
    SCATTERING_EFFICIENCY,
    SHARD_SIZE,
    SUBCARRIER_BASE_HZ,
    SUBCARRIER_SPACING_HZ,
    WAVELENGTH_M,
)
from radio.channel import NO_FADING, rician_to_nakagami
from radio.detect import DetectorKind
from radio.signal import SystemConfig
from radio.topology import DistancePolicy, Grid, Point


class SimulationError(Exception):
    """Raised on invalid scenarios or failed Monte-Carlo runs."""

    pass


class Architecture(StrEnum):
    MONOSTATIC = "monostatic"
    MULTISTATIC = "multistatic"


class SweepMode(StrEnum):
    FIXED_SNR = "fixed_snr"
    POWER_SWEEP = "power_sweep"


class EnergyMode(StrEnum):
    ANALYTIC = "analytic"
    MONTE_CARLO = "monte_carlo"
    BOTH = "both"


class PlacementMetric(StrEnum):
    ENERGY = "energy"
    OUTAGE = "outage"


class FadingKind(StrEnum):
    FIXED = "fixed"
    KAPPA_UNIFORM = "kappa_uniform"
    M_UNIFORM = "m_uniform"


@dataclass(frozen=True)
class FadingLaw:
    """
    Per-link Nakagami m law of a scenario.

    FIXED uses m_ce_tag / m_tag_reader for every link. KAPPA_UNIFORM draws a Rician
    kappa ~ U[low, high] per link and maps it to m; M_UNIFORM draws m ~ U[low, high].
    """

    name: str
    kind: FadingKind = FadingKind.FIXED
    m_ce_tag: float = 1.0
    m_tag_reader: float = 1.0
    low: float = 0.0
    high: float = 0.0

    def __post_init__(self):
        if self.kind == FadingKind.FIXED:
            for m in (self.m_ce_tag, self.m_tag_reader):
                if math.isnan(m) or m < 0.5:
                    raise SimulationError(f"fading '{self.name}': Nakagami m must be >= 0.5")
        elif not 0 <= self.low <= self.high or (
            self.kind == FadingKind.M_UNIFORM and self.low < 0.5
        ):
            raise SimulationError(f"fading '{self.name}': invalid range [{self.low}, {self.high}]")

    @classmethod
    def rician(cls, name: str, kappa_ce_tag: float, kappa_tag_reader: float) -> "FadingLaw":
        return cls(
            name=name,
            m_ce_tag=rician_to_nakagami(kappa_ce_tag),
            m_tag_reader=rician_to_nakagami(kappa_tag_reader),
        )

    @property
    def is_fixed(self) -> bool:
        return self.kind == FadingKind.FIXED

    @property
    def is_rayleigh(self) -> bool:
        return self.is_fixed and self.m_ce_tag == 1.0 and self.m_tag_reader == 1.0

    def _draw(self, rng: np.random.Generator, shape: tuple[int, ...]) -> np.ndarray:
        values = rng.uniform(self.low, self.high, size=shape)
        return rician_to_nakagami(values) if self.kind == FadingKind.KAPPA_UNIFORM else values

    def draw(
        self, rng: np.random.Generator, n_tags: int, n_emitters: int
    ) -> tuple[np.ndarray, np.ndarray]:
        """(m_ce_tag with shape (L, N), m_tag_reader with shape (N,)), one value per link."""
        if self.is_fixed:
            return (
                np.full((n_emitters, n_tags), self.m_ce_tag),
                np.full(n_tags, self.m_tag_reader),
            )
        m_tag_reader = self._draw(rng, (n_tags,))
        m_ce_tag = self._draw(rng, (n_emitters, n_tags))
        return m_ce_tag, m_tag_reader


NO_FADING_LAW = FadingLaw(name="none", m_ce_tag=NO_FADING, m_tag_reader=NO_FADING)


@dataclass
class EstimateWithCI:
    """
    Monte-Carlo mean with a two-sided confidence interval.

    Error counts carry an exact binomial interval in low / high, which is not symmetric
    around the mean; half_width_95 is then half its width. Sample means use a normal
    interval and leave low / high unset.
    """

    mean: float
    half_width_95: float
    n_trials: int
    seed: int
    low: float | None = None
    high: float | None = None

    def __post_init__(self):
        if self.half_width_95 < 0 or math.isnan(self.half_width_95):
            raise SimulationError("confidence half-width must be >= 0")

    @staticmethod
    def _z(confidence: float) -> float:
        return float(stats.norm.ppf(0.5 + confidence / 2))

    @classmethod
    def from_counts(
        cls, errors: int, n_trials: int, seed: int, confidence: float = CONFIDENCE_LEVEL
    ) -> "EstimateWithCI":
        """Binomial proportion with a Clopper-Pearson interval (nonzero width at zero errors)."""
        if n_trials < 1:
            raise SimulationError("an estimate needs at least one trial")
        if not 0 <= errors <= n_trials:
            raise SimulationError(f"{errors} errors out of {n_trials} trials")
        ci = stats.binomtest(int(errors), int(n_trials)).proportion_ci(confidence, method="exact")
        return cls(
            mean=errors / n_trials,
            half_width_95=float(ci.high - ci.low) / 2,
            n_trials=int(n_trials),
            seed=seed,
            low=float(ci.low),
            high=float(ci.high),
        )

    @classmethod
    def from_samples(
        cls, samples, seed: int, confidence: float = CONFIDENCE_LEVEL
    ) -> "EstimateWithCI":
        values = np.asarray(samples, dtype=float)
        if values.size < 1:
            raise SimulationError("an estimate needs at least one sample")
        spread = values.std(ddof=1) if values.size > 1 else 0.0
        half = cls._z(confidence) * spread / math.sqrt(values.size)
        return cls(mean=float(values.mean()), half_width_95=float(half), n_trials=values.size, seed=seed)

    @property
    def lower(self) -> float:
        return self.low if self.low is not None else self.mean - self.half_width_95

    @property
    def upper(self) -> float:
        return self.high if self.high is not None else self.mean + self.half_width_95

    def covers(self, value: float) -> bool:
        return self.lower <= value <= self.upper


@dataclass(frozen=True)
class ScenarioSpec:
    """
    Fully resolved run configuration.

    sweep holds linear values: SNR for fixed-SNR BER runs, transmit power (W) for power
    sweeps, SINR thresholds for outage runs, harvesting thresholds (W) for energy runs.
    """

    command: str
    sweep: tuple[float, ...]
    architectures: tuple[Architecture, ...] = (Architecture.MONOSTATIC, Architecture.MULTISTATIC)
    detectors: tuple[DetectorKind, ...] = (DetectorKind.COHERENT, DetectorKind.NONCOHERENT)
    mode: SweepMode = SweepMode.FIXED_SNR
    fadings: tuple[FadingLaw, ...] = (FadingLaw(name="rayleigh"),)

    # geometry
    grid_side: float | None = None
    grid_step: float | None = None
    n_tags: int = 1
    n_slots: int = 1
    tx_power: float | None = None
    ple_range: tuple[float, float] = PATH_LOSS_EXPONENT_RANGE
    reader: Point | None = None
    emitters: tuple[Point, ...] | None = None
    distance_policy: DistancePolicy = DistancePolicy.RESAMPLE

    # Monte-Carlo sizes
    trials: int = DEFAULT_BER_TRIALS
    topologies: int = DEFAULT_OUTAGE_TOPOLOGIES
    realizations: int = DEFAULT_OUTAGE_REALIZATIONS
    mc_draws: int = DEFAULT_ENERGY_MC_DRAWS
    energy_mode: EnergyMode = EnergyMode.ANALYTIC
    analytic_only: bool = False

    # placement search
    placement_metric: PlacementMetric = PlacementMetric.ENERGY
    t_max: int = DEFAULT_PLACEMENT_TRIALS
    exhaustive: bool = False
    placement_topologies: int = DEFAULT_PLACEMENT_TOPOLOGIES
    theta: float = 1.0
    theta_h: float = HARVESTING_THRESHOLD_W

    # diversity fit window (dB)
    diversity_window: tuple[float, float] = DIVERSITY_WINDOW_DB
    diversity_points: int = DIVERSITY_POINTS

    # link budget and frequency plan
    noise_density: float = NOISE_DENSITY_W_HZ
    bit_duration: float = BIT_DURATION_S
    reflection_gap: float = REFLECTION_GAP
    scattering_efficiency: float = SCATTERING_EFFICIENCY
    wavelength: float = WAVELENGTH_M
    base_freq: float = SUBCARRIER_BASE_HZ
    spacing: float = SUBCARRIER_SPACING_HZ
    epsilon: float | None = None

    seed: int = DEFAULT_SEED
    shard_size: int = SHARD_SIZE

    def __post_init__(self):
        if not self.sweep and self.command not in ("diversity", "place"):
            raise SimulationError("sweep must contain at least one value")
        if self.trials < 1:
            raise SimulationError(f"trials must be >= 1, got {self.trials}")
        for name in ("topologies", "realizations", "mc_draws", "t_max", "placement_topologies"):
            if getattr(self, name) < 1:
                raise SimulationError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.n_tags < 1 or self.n_slots < 1:
            raise SimulationError("n_tags and n_slots must be >= 1")
        if self.shard_size < 1:
            raise SimulationError(f"shard_size must be >= 1, got {self.shard_size}")
        if not self.architectures or not self.fadings:
            raise SimulationError("at least one architecture and one fading law are required")
        if self.mode == SweepMode.FIXED_SNR and self.command == "ber":
            if any(not law.is_fixed for law in self.fadings):
                raise SimulationError("fixed-SNR BER runs need fixed Nakagami m values")
            if any(not v > 0 for v in self.sweep):
                raise SimulationError("SNR sweep values must be > 0")
        lo, hi = self.ple_range
        if not 0 < lo <= hi:
            raise SimulationError(f"invalid path-loss exponent range {self.ple_range}")

    @property
    def grid(self) -> Grid:
        if self.grid_side is None or self.grid_step is None:
            raise SimulationError(f"command '{self.command}' needs a grid (side and step)")
        return Grid(self.grid_side, self.grid_step)

    @property
    def sweep_array(self) -> np.ndarray:
        return np.asarray(self.sweep, dtype=float)

    def require_tx_power(self) -> float:
        if self.tx_power is None or not self.tx_power > 0:
            raise SimulationError(f"command '{self.command}' needs a transmit power > 0")
        return self.tx_power

    def system_config(self, tx_power: float, n_emitters: int) -> SystemConfig:
        """Fair-comparison link budget: reader and every CE transmit tx_power."""
        return SystemConfig.common_power(
            tx_power,
            n_emitters,
            noise_density=self.noise_density,
            bit_duration=self.bit_duration,
            reflection_gap=self.reflection_gap,
            scattering_efficiency=self.scattering_efficiency,
            wavelength=self.wavelength,
        )

    def emitter_count(self, architecture: Architecture) -> int:
        """Monostatic runs have no CE; multistatic runs dedicate one CE per slot."""
        if architecture == Architecture.MONOSTATIC:
            return 0
        return len(self.emitters) if self.emitters is not None else self.n_slots

    def to_dict(self) -> dict:
        """JSON-serializable resolved configuration (manifest and cache key)."""
        data = asdict(self)
        data["sweep"] = [_json_float(v) for v in self.sweep]
        data["fadings"] = [
            {k: _json_float(v) if isinstance(v, float) else str(v) for k, v in asdict(law).items()}
            for law in self.fadings
        ]
        for key, value in data.items():
            if isinstance(value, float):
                data[key] = _json_float(value)
            elif isinstance(value, StrEnum):
                data[key] = str(value)
        data["architectures"] = [str(a) for a in self.architectures]
        data["detectors"] = [str(d) for d in self.detectors]
        return data


def _json_float(value: float):
    # JSON has no infinity
    return value if math.isfinite(value) else str(value)
