"""
Utility modules for Multiscatter.
"""

from .logging import get_logger, progress_logging, setup_logging
from .units import (
    Quantity,
    UnitError,
    db_to_linear,
    dbm_to_watts,
    linear_to_db,
    parse_quantity,
    watts_to_dbm,
)

__all__ = [
    "get_logger",
    "progress_logging",
    "setup_logging",
    "Quantity",
    "UnitError",
    "db_to_linear",
    "dbm_to_watts",
    "linear_to_db",
    "parse_quantity",
    "watts_to_dbm",
]
