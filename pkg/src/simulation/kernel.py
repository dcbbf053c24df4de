"""
Monte-Carlo engine for backscatter network comparisons.

Runs:
- run_ber: BER curves vs average SNR (fixed-SNR mode) or vs common transmit power on a
  random single-tag geometry (power-sweep mode), with closed forms side by side
- run_info_outage: average information outage vs SINR threshold over random topologies
  and random subcarrier assignments, with Rayleigh upper bounds
- run_energy_outage: average and maximum energy outage of passive tags vs harvesting
  threshold, closed form and/or Gamma-sampling Monte-Carlo
- run_placement_search: ranking of carrier-emitter layouts by a tag-averaged metric
- run_diversity: high-SNR slopes of the closed-form BER curves

Reproducibility: every unit of work (BER shard, topology, placement trial) draws from its
own numpy Generator seeded by SeedSequence(seed, spawn_key=(stream, ...indices)). The
shard partition depends on the trial count and shard size only, and partial results are
merged by summation, so the worker count never changes the output.
"""

import math
import threading
from collections.abc import Callable, Iterable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from tqdm import tqdm

from analysis.closed_form import (
    ber_bound_monostatic,
    ber_bound_multistatic,
    ber_coherent_monostatic,
    ber_coherent_multistatic,
    ber_exact_rayleigh_monostatic,
    diversity_order,
    energy_outage_aggregates,
    energy_outage_monostatic,
    energy_outage_multistatic,
    l_slot_outage,
    outage_bound_monostatic,
    outage_bound_multistatic,
)
from config import DEFAULT_THREADS, REFERENCE_DISTANCE_M
from radio.channel import path_gain, sample_link_power, sample_phase
from radio.detect import (
    DetectorKind,
    coherent_statistic,
    decide,
    decide_noncoherent,
    decide_square_law,
)
from radio.signal import (
    FrequencyAssignment,
    energy_per_bit_monostatic,
    energy_per_bit_multistatic,
    monostatic_scale,
    rho_matrix,
    synthesize_rx_batch,
)
from radio.topology import (
    DistancePolicy,
    Point,
    Topology,
    anchor_positions,
    enumerate_emitter_placements,
    link_distances,
    sample_emitter_placement,
    sample_topology,
    tag_candidates,
)
from simulation.scenario import (
    Architecture,
    EnergyMode,
    EstimateWithCI,
    FadingLaw,
    PlacementMetric,
    ScenarioSpec,
    SimulationError,
    SweepMode,
)
from utils.logging import get_logger
from utils.units import linear_to_db, watts_to_dbm

logger = get_logger(__name__)

# Independent random streams per run type
STREAM_BER = 1
STREAM_OUTAGE = 2
STREAM_ENERGY = 3
STREAM_PLACEMENT = 4


def stream_rng(seed: int, stream: int, *key: int) -> np.random.Generator:
    """Generator of one unit of work; independent of every other (stream, key)."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stream, *key)))


def shard_sizes(trials: int, shard_size: int) -> list[int]:
    """Fixed partition of trials into shards; the last shard holds the remainder."""
    if trials < 1:
        raise SimulationError(f"trials must be >= 1, got {trials}")
    full, rest = divmod(trials, shard_size)
    return [shard_size] * full + ([rest] if rest else [])


@dataclass
class KernelResult:
    """Tabular result of one run plus the Monte-Carlo estimates behind it."""

    frame: pd.DataFrame
    estimates: dict[tuple[str, ...], list[EstimateWithCI]] = field(default_factory=dict)
    clamped_links: int = 0


@dataclass
class PlacementResult:
    """Ranked emitter layouts; best is the first-found argmin."""

    best: list[Point]
    best_metric: float
    frame: pd.DataFrame


@dataclass
class _BerTally:
    errors: dict[DetectorKind, int]
    trials: int
    bound_sum: float = 0.0
    clamped: int = 0

    def __add__(self, other: "_BerTally") -> "_BerTally":
        return _BerTally(
            errors={k: self.errors[k] + other.errors[k] for k in self.errors},
            trials=self.trials + other.trials,
            bound_sum=self.bound_sum + other.bound_sum,
            clamped=self.clamped + other.clamped,
        )


@dataclass
class _Geometry:
    """Per-trial link state of a BER shard, slots on the last axis."""

    energy: np.ndarray  # (n, L)
    m_tag_reader: np.ndarray  # (n,)
    m_ce_tag: np.ndarray  # (n, L)
    noise_density: float
    clamped: int = 0


def _format_layout(points: Iterable[Point]) -> str:
    return ";".join(f"{x:g}:{y:g}" for x, y in points)


class SimulationKernel:
    """
    Executes the Monte-Carlo runs of one ScenarioSpec.

    Args:
        spec: Resolved scenario
        threads: Worker threads; results do not depend on it
        show_progress: Show tqdm progress bars
    """

    def __init__(self, spec: ScenarioSpec, threads: int = DEFAULT_THREADS, show_progress: bool = False):
        if threads < 1:
            raise SimulationError(f"threads must be >= 1, got {threads}")
        self.spec = spec
        self.threads = threads
        self.show_progress = show_progress
        self._clamped = 0
        self._clamp_lock = threading.Lock()

    # -------------------------------------------------------------------------
    # Shared helpers
    # -------------------------------------------------------------------------

    def _map(self, fn: Callable, items: list, desc: str | None = None) -> list:
        """Ordered map over items, threaded when threads > 1."""
        if self.threads == 1 or len(items) <= 1:
            return [fn(item) for item in self._progress(items, desc, len(items))]
        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            return list(self._progress(pool.map(fn, items), desc, len(items)))

    def _progress(self, items, desc: str | None, total: int | None = None):
        if not self.show_progress or desc is None:
            return items
        return tqdm(items, desc=desc, total=total)

    def _anchors(self, architecture: Architecture) -> tuple[Point, list[Point]]:
        spec = self.spec
        if architecture == Architecture.MONOSTATIC:
            reader, _ = anchor_positions(spec.grid, 0, spec.reader)
            return reader, []
        return anchor_positions(
            spec.grid, spec.emitter_count(architecture), spec.reader, spec.emitters
        )

    def _sample_topology(
        self, architecture: Architecture, rng: np.random.Generator, n_tags: int | None = None
    ) -> Topology:
        reader, emitters = self._anchors(architecture)
        return sample_topology(
            self.spec.grid,
            n_tags or self.spec.n_tags,
            len(emitters),
            rng,
            reader=reader,
            emitters=emitters,
            ple_range=self.spec.ple_range,
            distance_policy=self.spec.distance_policy,
        )

    def _gains(self, topology: Topology) -> tuple[np.ndarray, np.ndarray]:
        """Path gains (tag-reader (N,), CE-tag (L, N))."""
        clamp = self.spec.distance_policy == DistancePolicy.CLAMP
        distances = link_distances(topology, clamp=clamp)
        with self._clamp_lock:
            self._clamped += distances.clamped
        ple_tr, ple_ct = topology.exponents(default=self.spec.ple_range[0])
        wavelength = self.spec.wavelength
        return (
            path_gain(distances.tag_reader, ple_tr, wavelength),
            path_gain(distances.ce_tag, ple_ct, wavelength),
        )

    def _slot_energies(
        self, architecture: Architecture, gain_tr: np.ndarray, gain_ct: np.ndarray, m_tr: np.ndarray
    ) -> np.ndarray:
        """Average energy per bit of every tag in every slot, shape (L, N)."""
        spec = self.spec
        n_slots = spec.n_slots
        n_emitters = gain_ct.shape[0]
        config = spec.system_config(spec.require_tx_power(), n_emitters)
        if architecture == Architecture.MONOSTATIC:
            energy = energy_per_bit_monostatic(config, gain_tr, m_tr)
            return np.broadcast_to(energy, (n_slots,) + np.shape(energy)).copy()
        rows = [
            energy_per_bit_multistatic(config, gain_ct[l % n_emitters], gain_tr, l % n_emitters)
            for l in range(n_slots)
        ]
        return np.asarray(rows, dtype=float)

    def _per_slot(self, per_emitter: np.ndarray) -> np.ndarray:
        # slot l is illuminated by CE l mod L_e
        n_emitters = per_emitter.shape[0]
        return per_emitter[[l % n_emitters for l in range(self.spec.n_slots)]]

    def _report_clamping(self) -> int:
        clamped, self._clamped = self._clamped, 0
        if clamped:
            logger.warning(
                "Clamped %d link distances below the %.3g m reference distance",
                clamped,
                REFERENCE_DISTANCE_M,
            )
        return clamped

    # -------------------------------------------------------------------------
    # BER
    # -------------------------------------------------------------------------

    def _ber_geometry(
        self,
        architecture: Architecture,
        law: FadingLaw,
        x: float,
        rng: np.random.Generator,
        n: int,
        candidates: np.ndarray | None,
    ) -> _Geometry:
        spec = self.spec
        n_slots = spec.n_slots

        if spec.mode == SweepMode.FIXED_SNR:
            # E / N0 = SNR; infinite SNR disables the noise
            noise = 0.0 if math.isinf(x) else spec.noise_density
            energy = 1.0 if math.isinf(x) else x * spec.noise_density
            return _Geometry(
                energy=np.full((n, n_slots), energy),
                m_tag_reader=np.full(n, law.m_tag_reader),
                m_ce_tag=np.full((n, n_slots), law.m_ce_tag),
                noise_density=noise,
            )

        reader, emitters = self._anchors(architecture)
        n_emitters = len(emitters)
        tags = candidates[rng.integers(len(candidates), size=n)]
        m_ce, m_tr = law.draw(rng, n, n_emitters)
        lo, hi = spec.ple_range
        ple_tr = rng.uniform(lo, hi, size=n)
        ple_ct = rng.uniform(lo, hi, size=(n_emitters, n))

        d_tr = np.linalg.norm(tags - np.asarray(reader), axis=-1)
        d_ct = np.linalg.norm(
            np.asarray(emitters, dtype=float).reshape(-1, 2)[:, None, :] - tags[None, :, :], axis=-1
        )
        clamped = 0
        if spec.distance_policy == DistancePolicy.CLAMP:
            d0 = REFERENCE_DISTANCE_M
            clamped = int(np.sum(d_tr < d0) + np.sum(d_ct < d0))
            d_tr, d_ct = np.maximum(d_tr, d0), np.maximum(d_ct, d0)
        gain_tr = path_gain(d_tr, ple_tr, spec.wavelength)
        gain_ct = path_gain(d_ct, ple_ct, spec.wavelength)

        config = spec.system_config(x, n_emitters)
        if architecture == Architecture.MONOSTATIC:
            energy = np.repeat(energy_per_bit_monostatic(config, gain_tr, m_tr)[:, None], n_slots, axis=1)
            m_ce_slots = np.ones((n, n_slots))
        else:
            ce = [l % n_emitters for l in range(n_slots)]
            energy = np.column_stack(
                [energy_per_bit_multistatic(config, gain_ct[c], gain_tr, c) for c in ce]
            )
            m_ce_slots = m_ce[ce].T
        return _Geometry(
            energy=energy,
            m_tag_reader=m_tr,
            m_ce_tag=m_ce_slots,
            noise_density=spec.noise_density,
            clamped=clamped,
        )

    def _ber_shard(
        self,
        architecture: Architecture,
        law: FadingLaw,
        x: float,
        rng: np.random.Generator,
        n: int,
        candidates: np.ndarray | None,
    ) -> _BerTally:
        spec = self.spec
        geo = self._ber_geometry(architecture, law, x, rng, n, candidates)
        tally = _BerTally(errors={d: 0 for d in spec.detectors}, trials=n, clamped=geo.clamped)

        if spec.mode == SweepMode.POWER_SWEEP and spec.n_slots == 1:
            snr = geo.energy[:, 0] / geo.noise_density
            if architecture == Architecture.MONOSTATIC:
                bound = ber_bound_monostatic(geo.m_tag_reader, snr)
            else:
                bound = ber_bound_multistatic(geo.m_ce_tag[:, 0], geo.m_tag_reader, snr)
            tally.bound_sum = float(np.sum(bound))

        if spec.analytic_only:
            return tally

        n_slots = spec.n_slots
        bits = rng.integers(0, 2, size=n)
        phi0 = rng.uniform(0.0, 2 * np.pi, size=n)
        phi1 = rng.uniform(0.0, 2 * np.pi, size=n)
        m_tr = np.broadcast_to(geo.m_tag_reader[:, None], (n, n_slots))

        if architecture == Architecture.MONOSTATIC:
            # roundtrip: amplitude a^2, phase 2 phi
            amp = sample_link_power(m_tr, rng)
            phase = 2 * sample_phase(rng, size=(n, n_slots))
            scale = monostatic_scale(m_tr)
        else:
            amp = np.sqrt(sample_link_power(geo.m_ce_tag, rng) * sample_link_power(m_tr, rng))
            phase = sample_phase(rng, size=(n, n_slots))
            scale = np.ones((n, n_slots))

        rx = synthesize_rx_batch(
            bits[:, None],
            phi0[:, None],
            phi1[:, None],
            amp,
            phase,
            geo.energy,
            geo.noise_density,
            rng,
            energy_scale=scale,
        )
        gain = amp * np.exp(1j * phase) * np.sqrt(scale * geo.energy)

        # selection combining for the receivers without phase knowledge
        best_slot = np.argmax(np.abs(gain), axis=1)
        selected = rx[np.arange(n), best_slot]

        for detector in spec.detectors:
            if detector == DetectorKind.COHERENT:
                stat = coherent_statistic(rx, gain, phi0[:, None], phi1[:, None]).sum(axis=1)
                decisions = decide(stat)
            elif detector == DetectorKind.NONCOHERENT:
                decisions = decide_noncoherent(selected, phi0, phi1)
            else:
                decisions = decide_square_law(selected)
            tally.errors[detector] = int(np.count_nonzero(decisions != bits))
        return tally

    def _ber_closed_forms(self, architecture: Architecture, law: FadingLaw, snr: float) -> dict:
        """Exact and bound columns per detector for fixed-SNR, single-slot runs."""
        nan = (math.nan, math.nan)
        result = {d: nan for d in self.spec.detectors}
        if self.spec.n_slots != 1:
            return result
        if math.isinf(snr):
            coherent_exact, bound = 0.0, 0.0
        elif architecture == Architecture.MONOSTATIC:
            bound = ber_bound_monostatic(law.m_tag_reader, snr)
            coherent_exact = (
                ber_exact_rayleigh_monostatic(snr)
                if law.m_tag_reader == 1.0
                else ber_coherent_monostatic(law.m_tag_reader, snr)
            )
        else:
            bound = ber_bound_multistatic(law.m_ce_tag, law.m_tag_reader, snr)
            coherent_exact = ber_coherent_multistatic(law.m_ce_tag, law.m_tag_reader, snr)

        if DetectorKind.COHERENT in result:
            result[DetectorKind.COHERENT] = (coherent_exact, bound)
        if DetectorKind.NONCOHERENT in result:
            result[DetectorKind.NONCOHERENT] = (bound, bound)
        return result

    def run_ber(self) -> KernelResult:
        """BER per sweep point, architecture, fading law and detector."""
        spec = self.spec
        if spec.command != "ber":
            raise SimulationError(f"run_ber needs a 'ber' scenario, got '{spec.command}'")
        fixed = spec.mode == SweepMode.FIXED_SNR
        x_column = "snr_db" if fixed else "ptx_dbm"
        shards = shard_sizes(spec.trials, spec.shard_size)
        rows: list[dict] = []
        estimates: dict[tuple[str, ...], list[EstimateWithCI]] = {}

        logger.info(
            "BER run: %d points, %d trials/point in %d shards, %d thread(s)",
            len(spec.sweep),
            spec.trials,
            len(shards),
            self.threads,
        )

        for a_idx, architecture in enumerate(spec.architectures):
            candidates = None
            if not fixed:
                reader, emitters = self._anchors(architecture)
                candidates = tag_candidates(spec.grid, reader, emitters, spec.distance_policy)

            for f_idx, law in enumerate(spec.fadings):
                points = list(enumerate(spec.sweep))
                for p_idx, x in self._progress(points, f"BER {architecture} {law.name}", len(points)):
                    total = None
                    if not (fixed and spec.analytic_only):
                        tasks = [
                            (s_idx, size, stream_rng(spec.seed, STREAM_BER, a_idx, f_idx, p_idx, s_idx))
                            for s_idx, size in enumerate(shards)
                        ]
                        tallies = self._map(
                            lambda t: self._ber_shard(architecture, law, x, t[2], t[1], candidates),
                            tasks,
                        )
                        total = tallies[0]
                        for tally in tallies[1:]:
                            total = total + tally
                        self._clamped += total.clamped

                    if fixed:
                        analytic = self._ber_closed_forms(architecture, law, x)
                        x_value = float(linear_to_db(x)) if math.isfinite(x) else math.inf
                    else:
                        mean_bound = total.bound_sum / total.trials if spec.n_slots == 1 else math.nan
                        analytic = {
                            d: (math.nan, math.nan if d == DetectorKind.SQUARE_LAW else mean_bound)
                            for d in spec.detectors
                        }
                        x_value = float(watts_to_dbm(x))

                    for detector in spec.detectors:
                        exact, bound = analytic[detector]
                        if spec.analytic_only:
                            ber, half, n_trials = math.nan, math.nan, 0
                        else:
                            est = EstimateWithCI.from_counts(
                                total.errors[detector], total.trials, spec.seed
                            )
                            key = (str(architecture), law.name, str(detector))
                            estimates.setdefault(key, []).append(est)
                            ber, half, n_trials = est.mean, est.half_width_95, est.n_trials
                        rows.append(
                            {
                                x_column: x_value,
                                "arch": str(architecture),
                                "fading": law.name,
                                "detector": str(detector),
                                "ber": ber,
                                "ci_half_width": half,
                                "n_trials": n_trials,
                                "exact": exact,
                                "bound": bound,
                            }
                        )
                    logger.debug("BER %s %s point %d done", architecture, law.name, p_idx)

        clamped = self._report_clamping()
        return KernelResult(frame=pd.DataFrame(rows), estimates=estimates, clamped_links=clamped)

    # -------------------------------------------------------------------------
    # Information outage
    # -------------------------------------------------------------------------

    def _rho_stack(self, n_tags: int, rng: np.random.Generator, count: int) -> np.ndarray:
        spec = self.spec
        return np.stack(
            [
                rho_matrix(
                    FrequencyAssignment.random(
                        n_tags, rng, base_freq=spec.base_freq, spacing=spec.spacing, epsilon=spec.epsilon
                    ),
                    spec.bit_duration,
                )
                for _ in range(count)
            ]
        )

    def _average_sinr(self, energies: np.ndarray, rho: np.ndarray) -> np.ndarray:
        """Average SINR (R, L, N) for energies (L, N) under R assignments."""
        interference = np.einsum("rnj,lj->rln", rho, energies)
        return energies[None] / (interference + self.spec.noise_density)

    def _outage_topology(
        self, architecture: Architecture, law: FadingLaw, thetas: np.ndarray, rng: np.random.Generator
    ) -> dict[str, np.ndarray]:
        spec = self.spec
        n_tags, n_slots, n_real = spec.n_tags, spec.n_slots, spec.realizations
        topology = self._sample_topology(architecture, rng)
        gain_tr, gain_ct = self._gains(topology)
        m_ce, m_tr = law.draw(rng, n_tags, topology.n_emitters)
        energies = self._slot_energies(architecture, gain_tr, gain_ct, m_tr)
        rho = self._rho_stack(n_tags, rng, n_real)

        shape = (n_real, n_slots, n_tags)
        if architecture == Architecture.MONOSTATIC:
            fading = sample_link_power(np.broadcast_to(m_tr, shape), rng) ** 2
            weighted = fading * monostatic_scale(m_tr) * energies
            bound_fn = outage_bound_monostatic
        else:
            m_slot = np.broadcast_to(self._per_slot(m_ce), shape)
            fading = sample_link_power(m_slot, rng) * sample_link_power(np.broadcast_to(m_tr, shape), rng)
            weighted = fading * energies
            bound_fn = outage_bound_multistatic

        interference = np.einsum("rnj,rlj->rln", rho, weighted)
        inst = weighted / (interference + spec.noise_density)
        best = inst.max(axis=1)

        result = {
            "mc": (best[None] <= thetas[:, None, None]).mean(axis=(1, 2)),
            "mc_slot": (inst[None] <= thetas[:, None, None, None]).mean(axis=(1, 2, 3)),
        }
        if law.is_rayleigh:
            per_slot = bound_fn(thetas[:, None, None, None], self._average_sinr(energies, rho)[None])
            result["bound"] = l_slot_outage(per_slot, axis=2).mean(axis=(1, 2))
            result["bound_slot"] = per_slot.mean(axis=(1, 2, 3))
        else:
            result["bound"] = np.full(thetas.shape, math.nan)
            result["bound_slot"] = np.full(thetas.shape, math.nan)
        return result

    def run_info_outage(self) -> KernelResult:
        """Average information outage vs SINR threshold (MC and Rayleigh bounds)."""
        spec = self.spec
        thetas = spec.sweep_array
        spec.require_tx_power()
        if spec.n_tags == 1:
            logger.warning("Single-tag outage run: no adjacent-channel interference")

        frames = []
        for a_idx, architecture in enumerate(spec.architectures):
            for f_idx, law in enumerate(spec.fadings):
                logger.info(
                    "Outage %s/%s: %d topologies x %d assignments",
                    architecture,
                    law.name,
                    spec.topologies,
                    spec.realizations,
                )
                indices = list(range(spec.topologies))
                results = self._map(
                    lambda t: self._outage_topology(
                        architecture, law, thetas, stream_rng(spec.seed, STREAM_OUTAGE, a_idx, f_idx, t)
                    ),
                    indices,
                    f"Outage {architecture} {law.name}",
                )
                columns = {k: np.mean([r[k] for r in results], axis=0) for k in results[0]}
                frame = pd.DataFrame(
                    {
                        "theta_db": linear_to_db(np.maximum(thetas, np.finfo(float).tiny)),
                        "arch": str(architecture),
                        "fading": law.name,
                        **columns,
                    }
                )
                violations = int(np.sum(frame["mc"] > frame["bound"] + 0.01))
                if violations:
                    logger.warning(
                        "%s/%s: Monte-Carlo outage exceeds the bound at %d thresholds",
                        architecture,
                        law.name,
                        violations,
                    )
                frames.append(frame)

        clamped = self._report_clamping()
        frame = pd.concat(frames, ignore_index=True)[
            ["theta_db", "arch", "fading", "mc", "bound", "mc_slot", "bound_slot"]
        ]
        return KernelResult(frame=frame, clamped_links=clamped)

    # -------------------------------------------------------------------------
    # Energy outage
    # -------------------------------------------------------------------------

    def _energy_topology(
        self, architecture: Architecture, law: FadingLaw, thetas: np.ndarray, rng: np.random.Generator
    ) -> dict[str, np.ndarray]:
        spec = self.spec
        power = spec.require_tx_power()
        n_tags, n_slots = spec.n_tags, spec.n_slots
        topology = self._sample_topology(architecture, rng)
        gain_tr, gain_ct = self._gains(topology)
        m_ce, m_tr = law.draw(rng, n_tags, topology.n_emitters)
        mono = architecture == Architecture.MONOSTATIC
        result: dict[str, np.ndarray] = {}

        if not mono:
            gain_ct, m_ce = self._per_slot(gain_ct), self._per_slot(m_ce)

        if spec.energy_mode in (EnergyMode.ANALYTIC, EnergyMode.BOTH):
            if mono:
                probs = energy_outage_monostatic(thetas, power, gain_tr, m_tr, n_slots)
            else:
                probs = energy_outage_multistatic(thetas, [power] * n_slots, gain_ct, m_ce)
            result["avg"], result["max"] = energy_outage_aggregates(probs, axis=-1)

        if spec.energy_mode in (EnergyMode.MONTE_CARLO, EnergyMode.BOTH):
            shape = (spec.mc_draws, n_slots, n_tags)
            if mono:
                harvested = power * gain_tr * sample_link_power(np.broadcast_to(m_tr, shape), rng)
            else:
                harvested = power * gain_ct * sample_link_power(np.broadcast_to(m_ce, shape), rng)
            best = harvested.max(axis=1)
            probs_mc = (best[None] <= thetas[:, None, None]).mean(axis=1)
            result["avg_mc"], result["max_mc"] = energy_outage_aggregates(probs_mc, axis=-1)
        return result

    def run_energy_outage(self) -> KernelResult:
        """Average and maximum energy outage vs harvesting threshold."""
        spec = self.spec
        thetas = spec.sweep_array
        spec.require_tx_power()
        frames = []
        for a_idx, architecture in enumerate(spec.architectures):
            for f_idx, law in enumerate(spec.fadings):
                logger.info(
                    "Energy outage %s/%s: %d topologies (%s)",
                    architecture,
                    law.name,
                    spec.topologies,
                    spec.energy_mode,
                )
                indices = list(range(spec.topologies))
                results = self._map(
                    lambda t: self._energy_topology(
                        architecture, law, thetas, stream_rng(spec.seed, STREAM_ENERGY, a_idx, f_idx, t)
                    ),
                    indices,
                    f"Energy {architecture} {law.name}",
                )
                columns = {}
                for key in ("avg", "max", "avg_mc", "max_mc"):
                    columns[key] = (
                        np.mean([r[key] for r in results], axis=0)
                        if key in results[0]
                        else np.full(thetas.shape, math.nan)
                    )
                frames.append(
                    pd.DataFrame(
                        {
                            "theta_h_dbm": watts_to_dbm(thetas),
                            "arch": str(architecture),
                            "fading": law.name,
                            **columns,
                        }
                    )
                )

        clamped = self._report_clamping()
        return KernelResult(frame=pd.concat(frames, ignore_index=True), clamped_links=clamped)

    # -------------------------------------------------------------------------
    # Placement search
    # -------------------------------------------------------------------------

    def _placement_metric(self, reader: Point, emitters: list[Point]) -> float:
        spec = self.spec
        law = spec.fadings[0]
        power = spec.require_tx_power()
        values = []
        for t in range(spec.placement_topologies):
            # same stream per topology index for every candidate layout
            rng = stream_rng(spec.seed, STREAM_PLACEMENT, 1, t)
            topology = sample_topology(
                spec.grid,
                spec.n_tags,
                len(emitters),
                rng,
                reader=reader,
                emitters=emitters,
                ple_range=spec.ple_range,
                distance_policy=spec.distance_policy,
            )
            gain_tr, gain_ct = self._gains(topology)
            m_ce, m_tr = law.draw(rng, spec.n_tags, len(emitters))
            if spec.placement_metric == PlacementMetric.ENERGY:
                probs = energy_outage_multistatic(
                    spec.theta_h, [power] * spec.n_slots, self._per_slot(gain_ct), self._per_slot(m_ce)
                )
                values.append(float(np.mean(probs)))
            else:
                energies = self._slot_energies(Architecture.MULTISTATIC, gain_tr, gain_ct, m_tr)
                rho = self._rho_stack(spec.n_tags, rng, spec.realizations)
                per_slot = outage_bound_multistatic(spec.theta, self._average_sinr(energies, rho))
                values.append(float(np.mean(l_slot_outage(per_slot, axis=1))))
        return float(np.mean(values))

    def run_placement_search(self) -> PlacementResult:
        """Rank CE layouts by the tag-averaged metric; ties keep the first-found layout."""
        spec = self.spec
        grid = spec.grid
        n_emitters = spec.n_slots
        reader = tuple(spec.reader) if spec.reader is not None else (grid.side / 2, grid.side / 2)
        grid.check_capacity(spec.n_tags, n_emitters)

        if spec.exhaustive:
            candidates = list(enumerate_emitter_placements(grid, n_emitters, reader))
            logger.info("Exhaustive placement search over %d layouts", len(candidates))
        else:
            rng = stream_rng(spec.seed, STREAM_PLACEMENT, 0)
            candidates = [
                sample_emitter_placement(grid, n_emitters, reader, rng) for _ in range(spec.t_max)
            ]
            logger.info("Random placement search over %d layouts", len(candidates))

        metrics = self._map(
            lambda layout: self._placement_metric(reader, layout),
            candidates,
            "Placements",
        )
        self._report_clamping()

        order = np.argsort(np.asarray(metrics), kind="stable")
        frame = pd.DataFrame(
            {
                "rank": np.arange(1, len(candidates) + 1),
                "metric": np.asarray(metrics)[order],
                "emitters": [_format_layout(candidates[i]) for i in order],
                "candidate": order,
            }
        )
        best = int(order[0])
        return PlacementResult(best=candidates[best], best_metric=float(metrics[best]), frame=frame)

    # -------------------------------------------------------------------------
    # Diversity
    # -------------------------------------------------------------------------

    def run_diversity(self) -> KernelResult:
        """High-SNR slope of the noncoherent and exact coherent closed-form curves."""
        spec = self.spec
        lo, hi = spec.diversity_window
        rows = []
        for architecture in spec.architectures:
            for law in spec.fadings:
                if not law.is_fixed:
                    raise SimulationError("diversity needs fixed Nakagami m values")
                m_ln, m_n = law.m_ce_tag, law.m_tag_reader
                if architecture == Architecture.MONOSTATIC:
                    curves = {
                        "noncoherent_exact": lambda s: ber_bound_monostatic(m_n, s),
                        "coherent_exact": lambda s: ber_coherent_monostatic(m_n, s),
                    }
                else:
                    curves = {
                        "noncoherent_exact": lambda s: ber_bound_multistatic(m_ln, m_n, s),
                        "coherent_exact": lambda s: ber_coherent_multistatic(m_ln, m_n, s),
                    }
                for curve, fn in curves.items():
                    slope = diversity_order(fn, lo, hi, spec.diversity_points)
                    logger.debug("Diversity %s/%s/%s: %.4f", architecture, law.name, curve, slope)
                    rows.append(
                        {"arch": str(architecture), "fading": law.name, "curve": curve, "slope": slope}
                    )
        return KernelResult(frame=pd.DataFrame(rows))


def level_crossing(x, y, level: float) -> float:
    """First x at which a nondecreasing curve y(x) reaches level (linear interpolation)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    above = np.flatnonzero(y >= level)
    if above.size == 0:
        return math.nan
    i = int(above[0])
    if i == 0:
        return float(x[0])
    x0, x1, y0, y1 = x[i - 1], x[i], y[i - 1], y[i]
    return float(x0 + (level - y0) * (x1 - x0) / (y1 - y0))


def architecture_gap(
    frame: pd.DataFrame, x_column: str, value_column: str, level: float, fading: str
) -> float:
    """
    Horizontal distance (in x units) between the multistatic and monostatic curves at level.

    Positive when the multistatic curve reaches the level at a larger threshold, i.e.
    when multistatic is better.
    """
    crossings = {}
    for arch in (Architecture.MONOSTATIC, Architecture.MULTISTATIC):
        rows = frame[(frame["arch"] == str(arch)) & (frame["fading"] == fading)]
        if rows.empty:
            raise SimulationError(f"no {arch} rows for fading '{fading}'")
        crossings[arch] = level_crossing(rows[x_column], rows[value_column], level)
    return crossings[Architecture.MULTISTATIC] - crossings[Architecture.MONOSTATIC]


def run_ber(spec: ScenarioSpec, threads: int = DEFAULT_THREADS, show_progress: bool = False) -> KernelResult:
    return SimulationKernel(spec, threads, show_progress).run_ber()


def run_info_outage(
    spec: ScenarioSpec, threads: int = DEFAULT_THREADS, show_progress: bool = False
) -> KernelResult:
    return SimulationKernel(spec, threads, show_progress).run_info_outage()


def run_energy_outage(
    spec: ScenarioSpec, threads: int = DEFAULT_THREADS, show_progress: bool = False
) -> KernelResult:
    return SimulationKernel(spec, threads, show_progress).run_energy_outage()


def run_placement_search(
    spec: ScenarioSpec, threads: int = DEFAULT_THREADS, show_progress: bool = False
) -> PlacementResult:
    return SimulationKernel(spec, threads, show_progress).run_placement_search()


def run_diversity(spec: ScenarioSpec) -> KernelResult:
    return SimulationKernel(spec).run_diversity()
