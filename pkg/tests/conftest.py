"""
Pytest configuration and fixtures for ladder entropy tests.
"""

import pytest

from tests.fixtures.ladder_fixtures import (  # noqa: F401
    bell_state,
    correlated_counts,
    correlated_empirical,
    fast_config,
    product_state,
    reference_distribution,
    reference_partition,
    reference_state,
    two_atom_cut,
)


@pytest.fixture(autouse=True)
def isolated_environment(monkeypatch):
    """Keep LADDER_* variables from the developer's shell out of tests."""
    monkeypatch.delenv("LADDER_CACHE_DIR", raising=False)
    monkeypatch.delenv("LADDER_OUTPUT_DIR", raising=False)
