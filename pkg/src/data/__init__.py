"""
Run configuration, result caching and output writing.
"""

from .cache import CacheError, ResultCache, make_key
from .config_loader import ConfigError, build_scenario, load_scenario, merge_config
from .writer import RunManifest, WriterError, write_csv, write_gnuplot, write_result

__all__ = [
    "CacheError",
    "ResultCache",
    "make_key",
    "ConfigError",
    "build_scenario",
    "load_scenario",
    "merge_config",
    "RunManifest",
    "WriterError",
    "write_csv",
    "write_gnuplot",
    "write_result",
]
