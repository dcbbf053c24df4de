"""
Configuration constants for the Multiscatter project.

Multiscatter - monostatic vs. multistatic backscatter network analysis.

Physical quantities are stored in SI units (W, W/Hz, s, Hz, m). The presets at the
bottom are written the way run configuration files are: JSON-shaped dictionaries whose
physical quantities are strings with explicit unit suffixes, parsed by data.config_loader.
"""

import math
from pathlib import Path

# =============================================================================
# Project Paths
# =============================================================================

PROJECT_ROOT = Path(__file__).parent.parent
DATA_DIR = PROJECT_ROOT / "data"
CACHE_DIR = DATA_DIR / "cache"
OUTPUT_DIR = PROJECT_ROOT / "output"
LOG_FILE = OUTPUT_DIR / "multiscatter.log"

# =============================================================================
# Noise and Tag Parameters
# =============================================================================

SPEED_OF_LIGHT_M_S = 3e8
CARRIER_FREQUENCY_HZ = 868e6
WAVELENGTH_M = SPEED_OF_LIGHT_M_S / CARRIER_FREQUENCY_HZ

# Path-loss model is only valid beyond this distance
REFERENCE_DISTANCE_M = 1.0

NOISE_DENSITY_DBM_HZ = -169.0
NOISE_DENSITY_W_HZ = 10 ** (NOISE_DENSITY_DBM_HZ / 10) * 1e-3

# |Gamma_0 - Gamma_1| and scattering efficiency s_n, identical for every tag
REFLECTION_GAP = 2.0
SCATTERING_EFFICIENCY = 0.1

# =============================================================================
# Subcarrier (FSK) Parameters
# =============================================================================

BIT_DURATION_S = 1e-3
SUBCARRIER_BASE_HZ = 0.1e6
SUBCARRIER_SPACING_HZ = 0.01e6

# F_{n,1} = F_{n,0} + F_sp / 5
FSK_TONE_OFFSET_FRACTION = 0.2

# epsilon_{n,j} = 2*pi*T
EPSILON_PER_BIT_DURATION = 2 * math.pi

# "F >> 1/(2T)" is checked as F * 2T >= this factor
ORTHOGONALITY_FACTOR = 10.0

# Relative tolerance when testing frequency differences for integer multiples
ORTHOGONALITY_REL_TOL = 1e-9

# =============================================================================
# Scenario Randomization Laws
# =============================================================================

RICIAN_KAPPA_RANGE = (0.0, 20.0)
NAKAGAMI_M_RANGE = (1.0, 5.0)
PATH_LOSS_EXPONENT_RANGE = (2.0, 2.5)

# Line-of-sight links used by the fixed-SNR BER comparisons
KAPPA_TAG_READER_LOS = 10.0
KAPPA_CE_TAG_LOS = 9.0

# =============================================================================
# Thresholds
# =============================================================================

# Passive-tag RF front-end sensitivity
HARVESTING_THRESHOLD_DBM = -22.0
HARVESTING_THRESHOLD_W = 10 ** (HARVESTING_THRESHOLD_DBM / 10) * 1e-3

# Outage level at which architecture gaps are read off the curves
REFERENCE_OUTAGE_LEVEL = 0.1

# =============================================================================
# Monte-Carlo Settings
# =============================================================================

DEFAULT_SEED = 20190417
DEFAULT_THREADS = 1

# Trials are partitioned into shards of this size; the partition never depends on threads
SHARD_SIZE = 10_000

DEFAULT_BER_TRIALS = 100_000
DEFAULT_OUTAGE_TOPOLOGIES = 20
DEFAULT_OUTAGE_REALIZATIONS = 200
DEFAULT_ENERGY_TOPOLOGIES = 200
DEFAULT_ENERGY_MC_DRAWS = 20_000
DEFAULT_PLACEMENT_TRIALS = 50
DEFAULT_PLACEMENT_TOPOLOGIES = 20

# Two-sided 95% confidence intervals
CONFIDENCE_LEVEL = 0.95

# Attempts before topology rejection sampling gives up
MAX_TOPOLOGY_ATTEMPTS = 1000

# Exhaustive placement search refuses ensembles larger than this
MAX_EXHAUSTIVE_PLACEMENTS = 100_000

# =============================================================================
# Analytic Settings
# =============================================================================

DIVERSITY_WINDOW_DB = (50.0, 70.0)
DIVERSITY_POINTS = 21

# Quadrature defaults (scipy.integrate.quad)
QUAD_ABS_TOL = 1e-13
QUAD_REL_TOL = 1e-10
QUAD_MAX_SUBDIVISIONS = 200

# hyper_u switches to its asymptotic series beyond this argument
HYPERU_ASYMPTOTIC_THRESHOLD = 1e3

# =============================================================================
# Output Settings
# =============================================================================

CSV_FLOAT_FORMAT = "%.9e"
MANIFEST_FILENAME = "manifest.json"

# =============================================================================
# Presets
# =============================================================================

# Canonical run configurations for the standard comparisons. Every key may be
# overridden by a --config file; --seed / --trials override both.
PRESETS: dict[str, dict] = {
    # BER vs SNR, both architectures, LoS Rician links (kappa_n = 10, kappa_ln = 9)
    "fig4": {
        "command": "ber",
        "mode": "fixed_snr",
        "architectures": ["monostatic", "multistatic"],
        "detectors": ["coherent", "noncoherent"],
        "fading": [
            {"name": "rician", "kappa_ce_tag": KAPPA_CE_TAG_LOS, "kappa_tag_reader": KAPPA_TAG_READER_LOS},
        ],
        "sweep": {"start": "0 dB", "stop": "30 dB", "step": "2.5 dB"},
        "slots": 1,
        "trials": DEFAULT_BER_TRIALS,
    },
    # BER vs SNR, bistatic only: NLoS CE-to-tag (M_ln = 1), LoS tag-to-reader (M_n = 5.7619)
    "fig5": {
        "command": "ber",
        "mode": "fixed_snr",
        "architectures": ["multistatic"],
        "detectors": ["coherent", "noncoherent"],
        "fading": [
            {"name": "rayleigh-rice", "kappa_ce_tag": 0, "kappa_tag_reader": KAPPA_TAG_READER_LOS},
        ],
        "sweep": {"start": "0 dB", "stop": "30 dB", "step": "2.5 dB"},
        "slots": 1,
        "trials": DEFAULT_BER_TRIALS,
    },
    # BER vs transmit power, random tag on a 40 m grid, reader [0,0], single CE [40,40]
    "fig6": {
        "command": "ber",
        "mode": "power_sweep",
        "architectures": ["monostatic", "multistatic"],
        "detectors": ["coherent", "noncoherent"],
        "fading": [
            {"name": "rician-uniform", "kappa_range": list(RICIAN_KAPPA_RANGE)},
        ],
        "sweep": {"start": "0 dBm", "stop": "40 dBm", "step": "2.5 dBm"},
        "grid": {"side": "40 m", "step": "1 m"},
        "reader": ["0 m", "0 m"],
        "emitters": [["40 m", "40 m"]],
        "path_loss_exponent_range": list(PATH_LOSS_EXPONENT_RANGE),
        "slots": 1,
        "trials": DEFAULT_BER_TRIALS,
    },
    # Energy outage vs harvesting threshold, passive tags, 2.5 m grid
    "fig9": {
        "command": "energy",
        "architectures": ["monostatic", "multistatic"],
        "fading": [
            {"name": "nakagami", "m_range": list(NAKAGAMI_M_RANGE)},
        ],
        "sweep": {"start": "-30 dBm", "stop": "10 dBm", "step": "1 dBm"},
        "grid": {"side": "2.5 m", "step": "0.125 m"},
        "tx_power": "35 dBm",
        "tags": 8,
        "slots": 4,
        "topologies": DEFAULT_ENERGY_TOPOLOGIES,
        "energy_mode": "analytic",
        "distance_policy": "clamp",
        "path_loss_exponent_range": list(PATH_LOSS_EXPONENT_RANGE),
    },
    # Information outage vs SINR threshold, semi-passive tags, 200 m grid
    "fig10": {
        "command": "outage",
        "architectures": ["monostatic", "multistatic"],
        "fading": [
            {"name": "rayleigh", "m_ce_tag": 1, "m_tag_reader": 1},
            {"name": "nakagami", "m_range": list(NAKAGAMI_M_RANGE)},
        ],
        "sweep": {"start": "-40 dB", "stop": "30 dB", "step": "2.5 dB"},
        "grid": {"side": "200 m", "step": "5 m"},
        "tx_power": "28 dBm",
        "tags": 100,
        "slots": 4,
        "topologies": DEFAULT_OUTAGE_TOPOLOGIES,
        "realizations": DEFAULT_OUTAGE_REALIZATIONS,
        "path_loss_exponent_range": list(PATH_LOSS_EXPONENT_RANGE),
    },
}

# Descriptive names accepted wherever a preset name is
PRESET_ALIASES: dict[str, str] = {
    "los-ber": "fig4",
    "bistatic-ber": "fig5",
    "power-sweep": "fig6",
    "energy-grid": "fig9",
    "dense-outage": "fig10",
}

PRESET_NAMES = (*PRESETS, *PRESET_ALIASES)
