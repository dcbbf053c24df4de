"""
Monte-Carlo simulation of backscatter networks.
"""

from .kernel import (
    KernelResult,
    PlacementResult,
    SimulationKernel,
    architecture_gap,
    level_crossing,
    run_ber,
    run_diversity,
    run_energy_outage,
    run_info_outage,
    run_placement_search,
)
from .scenario import (
    Architecture,
    EnergyMode,
    EstimateWithCI,
    FadingKind,
    FadingLaw,
    PlacementMetric,
    ScenarioSpec,
    SimulationError,
    SweepMode,
)

__all__ = [
    "KernelResult",
    "PlacementResult",
    "SimulationKernel",
    "architecture_gap",
    "level_crossing",
    "run_ber",
    "run_diversity",
    "run_energy_outage",
    "run_info_outage",
    "run_placement_search",
    "Architecture",
    "EnergyMode",
    "EstimateWithCI",
    "FadingKind",
    "FadingLaw",
    "PlacementMetric",
    "ScenarioSpec",
    "SimulationError",
    "SweepMode",
]
