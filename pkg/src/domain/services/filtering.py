"""
Probability filtering and p_min sweeps.

Filtering keeps bitstrings with p >= p_min and renormalizes the survivors;
every entropy downstream is taken on the renormalized distribution.
"""

from typing import Optional, Sequence, Tuple, Union

import numpy as np

from src.domain.entities.distributions import BitstringDistribution
from src.domain.entities.states import GroundState
from src.domain.services.distribution import entropy_summary
from src.domain.services.entanglement import filtered_vn_entropy
from src.domain.value_objects.curves import FilterCurve, FilterPoint
from src.domain.value_objects.partition import Bipartition
from src.shared.errors import EmptySelectionError, ValidationError
from src.shared.logging import get_logger
from src.shared.patterns.parallel import ordered_map

logger = get_logger(__name__)

GRID_MIN_EXPONENT = -7.0
GRID_MAX_EXPONENT = -0.5
GRID_POINTS = 121


def default_grid(
    min_exponent: float = GRID_MIN_EXPONENT,
    max_exponent: float = GRID_MAX_EXPONENT,
    points: int = GRID_POINTS,
) -> np.ndarray:
    """Exact p_min = 0 anchor followed by a log-uniform grid."""
    if points < 1:
        raise ValidationError(f"grid needs at least one point, got {points}")
    if min_exponent > max_exponent or max_exponent > 0.0:
        raise ValidationError(f"invalid grid exponents [{min_exponent}, {max_exponent}]")
    return np.concatenate([[0.0], np.logspace(min_exponent, max_exponent, points)])


def validate_grid(grid: Sequence[float]) -> np.ndarray:
    values = np.asarray(grid, dtype=np.float64)
    if values.ndim != 1 or values.size == 0:
        raise ValidationError("p_min grid must be a non-empty list")
    if np.any(values < 0.0) or np.any(values > 1.0):
        raise ValidationError("p_min grid values must lie in [0, 1]")
    if np.any(np.diff(values) <= 0.0):
        raise ValidationError("p_min grid must be strictly increasing")
    return values


def _select(dist: BitstringDistribution, keep: np.ndarray, threshold: float) -> Tuple[BitstringDistribution, float]:
    if not np.any(keep):
        raise EmptySelectionError(
            f"filter at p_min={threshold!r} leaves no bitstrings (max probability {dist.probabilities.max()!r})",
            threshold=threshold,
        )
    if np.all(keep):
        return dist, 1.0

    kept = dist.probabilities[keep]
    kept_mass = float(kept.sum())
    if dist.counts is not None:
        counts = dist.counts[keep]
        total = int(counts.sum())
        filtered = BitstringDistribution(
            n_atoms=dist.n_atoms,
            bitstrings=dist.bitstrings[keep],
            probabilities=counts / total,
            source=dist.source,
            n_shots=total,
            counts=counts,
        )
    else:
        filtered = BitstringDistribution(
            n_atoms=dist.n_atoms,
            bitstrings=dist.bitstrings[keep],
            probabilities=kept / kept_mass,
            source=dist.source,
        )
    return filtered, kept_mass


def _filter_with_mass(dist: BitstringDistribution, p_min: float) -> Tuple[BitstringDistribution, float]:
    if not 0.0 <= p_min <= 1.0:
        raise ValidationError(f"p_min must be in [0, 1], got {p_min!r}")
    if p_min == 0.0:
        return dist, 1.0
    return _select(dist, dist.probabilities >= p_min, p_min)


def filter_distribution(dist: BitstringDistribution, p_min: float) -> BitstringDistribution:
    """
    Keep p >= p_min and renormalize. When nothing is removed the input is
    returned as is, so filter(d, 0) is the identity.

    Raises:
        EmptySelectionError: no bitstring reaches p_min
    """
    return _filter_with_mass(dist, p_min)[0]


def filter_by_min_count(dist: BitstringDistribution, min_count: int) -> BitstringDistribution:
    """Drop bitstrings observed fewer than min_count times (p_min = min_count / n_shots)."""
    if not dist.is_empirical or dist.counts is None or dist.n_shots is None:
        raise ValidationError("count-based filtering needs an empirical distribution")
    if min_count < 0:
        raise ValidationError(f"min_count must be nonnegative, got {min_count}")
    return _select(dist, dist.counts >= min_count, min_count / dist.n_shots)[0]


def _point(
    dist: BitstringDistribution,
    part: Bipartition,
    p_min: float,
    state: Optional[GroundState],
) -> Union[FilterPoint, EmptySelectionError]:
    try:
        filtered, kept_mass = _filter_with_mass(dist, p_min)
    except EmptySelectionError as exc:
        return exc
    svn = filtered_vn_entropy(state, part, p_min) if state is not None else None
    return FilterPoint(
        p_min=p_min,
        kept_states=filtered.size,
        kept_mass=kept_mass,
        summary=entropy_summary(filtered, part),
        filtered_svn=svn,
    )


def sweep(
    dist: BitstringDistribution,
    part: Bipartition,
    grid: Sequence[float],
    state: Optional[GroundState] = None,
    workers: Optional[int] = 1,
) -> FilterCurve:
    """
    One filter point per grid value. The first grid value with an empty
    survivor set ends the curve and is recorded as ``cutoff_p_min``.

    With ``state`` (exact sources only) each point also carries the
    filtered von Neumann entropy of the projected state.
    """
    values = validate_grid(grid)
    if state is not None and dist.is_empirical:
        raise ValidationError("filtered S^vN needs an exact distribution; empirical sweeps take no state")

    results = ordered_map(lambda p: _point(dist, part, float(p), state), values, workers)

    points = []
    cutoff = None
    for result in results:
        if isinstance(result, EmptySelectionError):
            cutoff = result.threshold
            logger.debug("sweep_cutoff", p_min=cutoff, points=len(points))
            break
        points.append(result)

    return FilterCurve(
        points=tuple(points),
        partition=part,
        source=dist.source,
        n_shots=dist.n_shots,
        cutoff_p_min=cutoff,
    )
