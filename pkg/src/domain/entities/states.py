"""
Hamiltonian parameters and ground-state results.
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from src.domain.entities.ladder import CouplingTable, LadderGeometry
from src.shared.errors import ValidationError


@dataclass(frozen=True)
class HamiltonianSpec:
    """
    H/Omega = 1/2 sum_i X_i - (Delta/Omega) sum_i n_i + sum_{i<j} V_ij n_i n_j.

    ``geometry`` may be None for hand-built coupling tables that do not come
    from a ladder (single atoms, decoupled test systems).
    """

    geometry: Optional[LadderGeometry]
    couplings: CouplingTable
    delta_over_omega: float

    def __post_init__(self) -> None:
        if self.geometry is not None and self.geometry.n_atoms != self.couplings.n_atoms:
            raise ValidationError(
                f"geometry has {self.geometry.n_atoms} atoms but couplings cover {self.couplings.n_atoms}"
            )
        if not math.isfinite(self.delta_over_omega):
            raise ValidationError(f"delta_over_omega must be finite, got {self.delta_over_omega!r}")

    @property
    def n_atoms(self) -> int:
        return self.couplings.n_atoms

    @property
    def dimension(self) -> int:
        return 1 << self.n_atoms


@dataclass(frozen=True)
class GroundState:
    """
    Real, unit-norm amplitude vector over the 2^N computational basis.

    The global sign is fixed so the largest-magnitude amplitude is positive.
    ``projected_p_min`` is set on states produced by a filtration projector,
    whose energy/gap fields are inherited from the parent eigenstate.
    """

    amplitudes: np.ndarray = field(repr=False)
    n_atoms: int
    energy: float
    gap: float
    converged: bool
    residual_norm: float
    degenerate: bool = False
    solver: str = "krylov"
    iterations: int = 0
    projected_p_min: Optional[float] = None

    def __post_init__(self) -> None:
        self.amplitudes.setflags(write=False)

    @property
    def dimension(self) -> int:
        return int(self.amplitudes.shape[0])

    def probabilities(self) -> np.ndarray:
        return self.amplitudes**2
