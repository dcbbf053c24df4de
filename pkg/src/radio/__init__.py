"""
Radio layer: fading channels, FSK signal model, detectors and grid topologies.
"""

from .channel import (
    NO_FADING,
    ChannelError,
    FadingParams,
    PathLossParams,
    path_gain,
    path_loss,
    rician_to_nakagami,
)
from .detect import DetectionError, DetectorKind, KnowledgeMode
from .signal import FrequencyAssignment, SignalError, SystemConfig, TagPhases, rho_matrix
from .topology import DistancePolicy, Grid, Topology, TopologyError, sample_topology

__all__ = [
    "NO_FADING",
    "ChannelError",
    "FadingParams",
    "PathLossParams",
    "path_gain",
    "path_loss",
    "rician_to_nakagami",
    "DetectionError",
    "DetectorKind",
    "KnowledgeMode",
    "FrequencyAssignment",
    "SignalError",
    "SystemConfig",
    "TagPhases",
    "rho_matrix",
    "DistancePolicy",
    "Grid",
    "Topology",
    "TopologyError",
    "sample_topology",
]
