"""
Test fixtures and builders for ladder entropy tests.

Provides:
- The 6-rung reference ground state (solved once per session)
- Hand-built states and distributions with known entropies
- A builder for synthetic filter curves
"""

import math
from typing import Optional, Sequence

import numpy as np
import pytest

from src.domain.entities.distributions import BitstringDistribution
from src.domain.entities.states import GroundState
from src.domain.services import hamiltonian
from src.domain.services.distribution import empirical_distribution, exact_distribution
from src.domain.value_objects.curves import EntropySummary, FilterCurve, FilterPoint
from src.domain.value_objects.partition import Bipartition
from src.infrastructure.config.settings import RunConfig

REFERENCE_RUNGS = 6
REFERENCE_RB_OVER_A = 2.35
REFERENCE_DELTA_OVER_OMEGA = 3.5
REFERENCE_SVN = 0.844
REFERENCE_MUTUAL_INFORMATION = 0.559

LN2 = math.log(2.0)


def make_state(amplitudes: Sequence[float], n_atoms: Optional[int] = None) -> GroundState:
    """Wrap an amplitude vector (normalized here) as a GroundState."""
    vector = np.asarray(amplitudes, dtype=np.float64)
    vector = vector / np.linalg.norm(vector)
    atoms = n_atoms if n_atoms is not None else int(round(math.log2(vector.size)))
    return GroundState(
        amplitudes=vector,
        n_atoms=atoms,
        energy=0.0,
        gap=1.0,
        converged=True,
        residual_norm=0.0,
        solver="dense",
    )


def make_curve(
    p_mins: Sequence[float],
    conditional: Sequence[float],
    mutual: Optional[Sequence[float]] = None,
    n_atoms: int = 4,
) -> FilterCurve:
    """Synthetic curve whose S_{A|B} and S_{B|A} both follow ``conditional``."""
    mutual_values = list(mutual) if mutual is not None else [0.0] * len(p_mins)
    points = tuple(
        FilterPoint(
            p_min=float(p),
            kept_states=1,
            kept_mass=1.0,
            summary=EntropySummary(
                s_ab=float(y),
                s_a=float(y) + float(i),
                s_b=float(y) + float(i),
                s_a_given_b=float(y),
                s_b_given_a=float(y),
                mutual_information=float(i),
            ),
        )
        for p, y, i in zip(p_mins, conditional, mutual_values)
    )
    return FilterCurve(points=points, partition=Bipartition.half(n_atoms), source="exact")


@pytest.fixture
def bell_state() -> GroundState:
    """(|00> + |11>) / sqrt(2): S^vN = ln 2 across the single cut."""
    return make_state([1.0, 0.0, 0.0, 1.0])


@pytest.fixture
def product_state() -> GroundState:
    """|+>|0>: no entanglement."""
    return make_state([1.0, 1.0, 0.0, 0.0])


@pytest.fixture
def two_atom_cut() -> Bipartition:
    return Bipartition(n_atoms=2, size_a=1)


@pytest.fixture
def correlated_counts() -> dict:
    """2-atom shots split evenly between 00 and 11: I = ln 2."""
    return {"00": 50, "11": 50}


@pytest.fixture
def correlated_empirical(correlated_counts) -> BitstringDistribution:
    return empirical_distribution(correlated_counts)


@pytest.fixture
def fast_config(tmp_path) -> RunConfig:
    """2-rung configuration writing into a temporary directory."""
    return RunConfig(
        n_rungs=2,
        cache_dir=tmp_path / "cache",
        output_dir=tmp_path / "results",
    )


@pytest.fixture(scope="session")
def reference_state() -> GroundState:
    spec = hamiltonian.make_spec(REFERENCE_RUNGS, REFERENCE_RB_OVER_A, REFERENCE_DELTA_OVER_OMEGA)
    return hamiltonian.ground_state(spec)


@pytest.fixture(scope="session")
def reference_partition() -> Bipartition:
    return Bipartition.half(2 * REFERENCE_RUNGS)


@pytest.fixture(scope="session")
def reference_distribution(reference_state) -> BitstringDistribution:
    return exact_distribution(reference_state)
