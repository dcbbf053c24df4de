"""
File-based caching of Monte-Carlo results.

Result frames are stored as parquet files under data/cache/, keyed by a digest of
the run (command, resolved configuration, seed, trials). The worker count is never part
of the key: results do not depend on it.
"""

import hashlib
import json
from pathlib import Path
from typing import Any

import pandas as pd

from config import CACHE_DIR
from utils.logging import get_logger

logger = get_logger(__name__)


class CacheError(Exception):
    """Base exception for cache errors."""

    pass


def make_key(command: str, config: dict[str, Any], seed: int, trials: int) -> str:
    """SHA-256 digest of the canonical JSON form of a run."""
    payload = {"command": command, "config": config, "seed": seed, "trials": trials}
    try:
        canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"), default=str)
    except (TypeError, ValueError) as e:
        raise CacheError(f"run configuration is not serializable: {e}") from e
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


class ResultCache:
    """
    Parquet cache for result DataFrames.

    Corrupt or unreadable files are treated as misses.
    """

    def __init__(self, cache_dir: Path = CACHE_DIR, enabled: bool = True):
        """
        Initialize the result cache.

        Args:
            cache_dir: Directory for cache files
            enabled: When False every lookup misses and nothing is written
        """
        self.cache_dir = cache_dir
        self.enabled = enabled
        if enabled:
            self.cache_dir.mkdir(parents=True, exist_ok=True)

    def _get_cache_path(self, key: str) -> Path:
        safe_key = "".join(c if c.isalnum() or c in "-_" else "_" for c in key)
        if len(safe_key) > 100:
            safe_key = hashlib.sha256(key.encode()).hexdigest()
        return self.cache_dir / f"{safe_key}.parquet"

    def get(self, key: str) -> pd.DataFrame | None:
        """
        Get a cached result frame.

        Returns:
            Cached DataFrame or None on a miss
        """
        if not self.enabled:
            return None
        filepath = self._get_cache_path(key)
        if not filepath.exists():
            return None
        try:
            df = pd.read_parquet(filepath, engine="pyarrow")
        except Exception as e:
            logger.warning("Ignoring unreadable cache file %s: %s", filepath.name, e)
            return None
        logger.debug("Cache hit %s", key[:12])
        return df

    def set(self, key: str, df: pd.DataFrame) -> Path | None:
        """
        Cache a result frame.

        Returns:
            Path to the cache file, or None when caching is disabled
        """
        if not self.enabled:
            return None
        filepath = self._get_cache_path(key)
        tmp = filepath.with_suffix(".parquet.tmp")
        try:
            df.to_parquet(tmp, engine="pyarrow", index=False)
            tmp.replace(filepath)
        except OSError as e:
            raise CacheError(f"cannot write cache file {filepath}: {e}") from e
        return filepath

    def invalidate(self, key: str) -> bool:
        """
        Remove a cached result.

        Returns:
            True if an entry was removed, False if not found
        """
        filepath = self._get_cache_path(key)
        if filepath.exists():
            filepath.unlink()
            return True
        return False

    def clear(self) -> int:
        """
        Clear all cached results.

        Returns:
            Number of files removed
        """
        if not self.cache_dir.exists():
            return 0
        count = 0
        for filepath in self.cache_dir.glob("*.parquet*"):
            if filepath.is_file():
                filepath.unlink()
                count += 1
        return count
