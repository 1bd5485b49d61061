"""
Ladder construction and van der Waals couplings.
"""

import math

import numpy as np

from src.domain.entities.ladder import RUNG_LENGTH, CouplingTable, LadderGeometry
from src.shared.errors import ValidationError


def build_ladder(n_rungs: int) -> LadderGeometry:
    """
    Build a 2 x n_rungs ladder with open boundaries.

    Atom i sits on rung i // 2 and leg i % 2, at (rung, 2 * leg) in units of a.
    """
    if isinstance(n_rungs, bool) or not isinstance(n_rungs, (int, np.integer)) or n_rungs < 1:
        raise ValidationError(f"n_rungs must be a positive integer, got {n_rungs!r}")
    positions = tuple(
        (float(atom // 2), RUNG_LENGTH * (atom % 2)) for atom in range(2 * int(n_rungs))
    )
    return LadderGeometry(n_rungs=int(n_rungs), positions=positions)


def couplings(geom: LadderGeometry, rb_over_a: float) -> CouplingTable:
    """All-pairs couplings V_ij = (R_b/a)^6 / d_ij^6 with V_ii = 0, no cutoff."""
    if not math.isfinite(rb_over_a) or rb_over_a <= 0.0:
        raise ValidationError(f"rb_over_a must be positive, got {rb_over_a!r}")

    distances = geom.distances()
    v = np.zeros_like(distances)
    off_diagonal = ~np.eye(geom.n_atoms, dtype=bool)
    v[off_diagonal] = (rb_over_a / distances[off_diagonal]) ** 6
    return CouplingTable(rb_over_a=float(rb_over_a), v=v)


def physical_spacing_um(rb_over_a: float, rb_um: float) -> float:
    """Lattice spacing a in micrometres for a given blockade radius."""
    if rb_over_a <= 0.0:
        raise ValidationError(f"rb_over_a must be positive, got {rb_over_a!r}")
    return rb_um / rb_over_a
