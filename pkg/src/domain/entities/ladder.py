"""
Two-leg ladder geometry and its van der Waals coupling table.

Lengths are in units of the inter-rung spacing a (a_x = a, a_y = 2a) and
couplings in units of the Rabi frequency.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np

from src.shared.errors import ValidationError

RUNG_LENGTH = 2.0  # a_y / a_x


@dataclass(frozen=True)
class LadderGeometry:
    """Atom positions of a 2 x n_rungs ladder in rung-major order."""

    n_rungs: int
    positions: Tuple[Tuple[float, float], ...]

    @property
    def n_atoms(self) -> int:
        return 2 * self.n_rungs

    def rung_of(self, atom: int) -> int:
        return atom // 2

    def leg_of(self, atom: int) -> int:
        return atom % 2

    def distances(self) -> np.ndarray:
        """Pairwise distance matrix in units of a."""
        coords = np.asarray(self.positions, dtype=np.float64)
        delta = coords[:, None, :] - coords[None, :, :]
        return np.sqrt(np.sum(delta**2, axis=-1))

    def as_report(self) -> Dict[str, List[float]]:
        """Atom index to coordinates, for JSON reports."""
        return {str(i): [float(x), float(y)] for i, (x, y) in enumerate(self.positions)}


@dataclass(frozen=True)
class CouplingTable:
    """Symmetric pair couplings V_ij = (R_b/a)^6 / d_ij^6."""

    rb_over_a: float
    v: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        v = self.v
        if v.ndim != 2 or v.shape[0] != v.shape[1] or v.shape[0] < 1:
            raise ValidationError(f"coupling table must be square, got shape {v.shape}")
        if not np.all(np.isfinite(v)) or np.any(v < 0.0):
            raise ValidationError("couplings must be finite and nonnegative")
        if np.any(np.diag(v) != 0.0) or not np.array_equal(v, v.T):
            raise ValidationError("couplings must be symmetric with a zero diagonal")
        v.setflags(write=False)

    @property
    def n_atoms(self) -> int:
        return int(self.v.shape[0])
