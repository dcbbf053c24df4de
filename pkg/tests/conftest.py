"""
Pytest configuration and fixtures for Multiscatter tests.
"""

import sys
from pathlib import Path

import numpy as np
import pytest

# Add src directory to Python path for imports
src_path = Path(__file__).parent.parent / "src"
sys.path.insert(0, str(src_path))


def pytest_configure(config):
    """Register custom markers."""
    config.addinivalue_line(
        "markers", "slow: marks full-scale and 10^6-sample acceptance tests"
    )


def pytest_addoption(parser):
    """Add command line option for slow tests."""
    parser.addoption(
        "--run-slow",
        action="store_true",
        default=False,
        help="Run slow Monte-Carlo acceptance tests",
    )


def pytest_collection_modifyitems(config, items):
    """Skip slow tests unless --run-slow is specified."""
    if config.getoption("--run-slow"):
        return

    skip_slow = pytest.mark.skip(reason="Use --run-slow to run Monte-Carlo acceptance tests")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def rng():
    """Seeded generator shared by sampler tests."""
    return np.random.default_rng(12345)
