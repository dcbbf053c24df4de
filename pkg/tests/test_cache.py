"""
Tests for the result cache.

Tests cover:
- Cache keys
- Parquet round trip of result frames
- Disabled caches, corrupt files, invalidation and clearing
"""

import math

import pandas as pd
import pytest

from data.cache import CacheError, ResultCache, make_key


@pytest.fixture
def cache(tmp_path):
    """ResultCache in a temporary directory."""
    return ResultCache(cache_dir=tmp_path / "cache")


@pytest.fixture
def frame():
    return pd.DataFrame(
        {
            "snr_db": [0.0, 10.0, math.inf],
            "arch": ["monostatic", "monostatic", "monostatic"],
            "ber": [0.25, 0.05, 0.0],
            "n_trials": [1000, 1000, 1000],
        }
    )


class TestMakeKey:
    """Tests for make_key."""

    def test_stable(self):
        """Key order in the configuration does not matter."""
        a = make_key("ber", {"x": 1, "y": [1, 2]}, 7, 100)
        b = make_key("ber", {"y": [1, 2], "x": 1}, 7, 100)
        assert a == b
        assert len(a) == 64

    @pytest.mark.parametrize(
        "args",
        [
            ("outage", {"x": 1}, 7, 100),
            ("ber", {"x": 2}, 7, 100),
            ("ber", {"x": 1}, 8, 100),
            ("ber", {"x": 1}, 7, 101),
        ],
    )
    def test_every_part_matters(self, args):
        """Command, configuration, seed and trials all change the key."""
        assert make_key(*args) != make_key("ber", {"x": 1}, 7, 100)

    def test_unserializable_config(self):
        """Circular configurations are rejected."""
        config: dict = {}
        config["self"] = config
        with pytest.raises(CacheError):
            make_key("ber", config, 1, 1)


class TestResultCache:
    """Tests for the ResultCache class."""

    def test_round_trip(self, cache, frame):
        """Frames come back unchanged, infinity included."""
        key = make_key("ber", {}, 1, 1000)
        path = cache.set(key, frame)
        assert path.exists() and path.suffix == ".parquet"
        pd.testing.assert_frame_equal(cache.get(key), frame)

    def test_miss(self, cache):
        """Unknown keys miss."""
        assert cache.get("absent") is None

    def test_disabled(self, tmp_path, frame):
        """A disabled cache neither reads nor writes."""
        cache = ResultCache(cache_dir=tmp_path / "off", enabled=False)
        assert cache.set("k", frame) is None
        assert cache.get("k") is None
        assert not (tmp_path / "off").exists()

    def test_corrupt_file_is_a_miss(self, cache, frame):
        """Unreadable parquet files are ignored."""
        path = cache.set("k", frame)
        path.write_bytes(b"not parquet")
        assert cache.get("k") is None

    def test_long_keys_are_hashed(self, cache, frame):
        """File names stay short."""
        path = cache.set("x" * 300, frame)
        assert len(path.stem) == 64

    def test_invalidate(self, cache, frame):
        """Invalidation removes one entry."""
        cache.set("k", frame)
        assert cache.invalidate("k")
        assert not cache.invalidate("k")
        assert cache.get("k") is None

    def test_clear(self, cache, frame):
        """Clearing removes every entry and reports the count."""
        cache.set("a", frame)
        cache.set("b", frame)
        assert cache.clear() == 2
        assert cache.get("a") is None
        assert cache.clear() == 0
