"""
Bitstring distributions, marginals, Shannon entropies and mutual information.

All entropies are plug-in estimates in nats.
"""

from typing import Mapping, Union

import numpy as np
from scipy.special import entr

from src.domain.entities.distributions import BitstringDistribution, ShotCounts
from src.domain.entities.states import GroundState
from src.domain.value_objects.curves import EntropySummary
from src.domain.value_objects.partition import Bipartition, Side
from src.shared.errors import ValidationError


def exact_distribution(state: GroundState, epsilon: float = 0.0) -> BitstringDistribution:
    """Distribution {n: c_n^2} over states with c_n^2 > epsilon, renormalized."""
    if epsilon < 0.0:
        raise ValidationError(f"epsilon must be nonnegative, got {epsilon!r}")
    probabilities = state.probabilities()
    support = np.flatnonzero(probabilities > epsilon)
    if support.size == 0:
        raise ValidationError(f"no basis state has probability above epsilon={epsilon!r}")
    kept = probabilities[support]
    return BitstringDistribution(
        n_atoms=state.n_atoms,
        bitstrings=support.astype(np.uint64),
        probabilities=kept / kept.sum(),
        source="exact",
    )


def empirical_distribution(counts: Union[ShotCounts, Mapping[str, int]]) -> BitstringDistribution:
    """Plug-in distribution count / total from observed shots."""
    record = counts if isinstance(counts, ShotCounts) else ShotCounts.from_mapping(counts)
    total = record.total
    return BitstringDistribution(
        n_atoms=record.n_atoms,
        bitstrings=np.array(record.bitstrings),
        probabilities=record.counts / total,
        source="empirical",
        n_shots=total,
        counts=np.array(record.counts),
    )


def _check_partition(dist: BitstringDistribution, part: Bipartition) -> None:
    if part.n_atoms != dist.n_atoms:
        raise ValidationError(
            f"bipartition covers {part.n_atoms} atoms but the distribution has {dist.n_atoms}"
        )


def _side_keys(dist: BitstringDistribution, part: Bipartition, side: Side) -> np.ndarray:
    if side == "A":
        return dist.bitstrings & np.uint64(part.mask_a)
    return dist.bitstrings >> np.uint64(part.size_a)


def marginal(dist: BitstringDistribution, part: Bipartition, side: Side) -> BitstringDistribution:
    """p(n_A) = sum_{n_B} p(n_A n_B), or symmetrically for B."""
    _check_partition(dist, part)
    keys, inverse = np.unique(_side_keys(dist, part, side), return_inverse=True)
    probabilities = np.bincount(inverse, weights=dist.probabilities, minlength=keys.size)
    counts = None
    if dist.counts is not None:
        counts = np.bincount(inverse, weights=dist.counts, minlength=keys.size).astype(np.int64)
    return BitstringDistribution(
        n_atoms=part.side_size(side),
        bitstrings=keys,
        probabilities=probabilities,
        source=dist.source,
        n_shots=dist.n_shots,
        counts=counts,
    )


def _entropy(probabilities: np.ndarray) -> float:
    return float(np.sum(entr(probabilities)))


def shannon_entropy(dist: BitstringDistribution) -> float:
    """-sum p ln p."""
    return _entropy(dist.probabilities)


def entropy_summary(dist: BitstringDistribution, part: Bipartition) -> EntropySummary:
    """
    Joint, marginal and conditional entropies plus I = S_A + S_B - S_AB.

    S_{A|B} = S_AB - S_B, so I = S_A - S_{A|B} holds exactly.
    """
    _check_partition(dist, part)
    s_ab = _entropy(dist.probabilities)
    s_a = _entropy(_marginal_probabilities(dist, part, "A"))
    s_b = _entropy(_marginal_probabilities(dist, part, "B"))
    return EntropySummary(
        s_ab=s_ab,
        s_a=s_a,
        s_b=s_b,
        s_a_given_b=s_ab - s_b,
        s_b_given_a=s_ab - s_a,
        mutual_information=s_a + s_b - s_ab,
    )


def _marginal_probabilities(dist: BitstringDistribution, part: Bipartition, side: Side) -> np.ndarray:
    _, inverse = np.unique(_side_keys(dist, part, side), return_inverse=True)
    return np.bincount(inverse, weights=dist.probabilities)


def total_variation(first: BitstringDistribution, second: BitstringDistribution) -> float:
    """1/2 sum |p - q| over the union of both supports."""
    if first.n_atoms != second.n_atoms:
        raise ValidationError("distributions cover different numbers of atoms")
    keys = np.union1d(first.bitstrings, second.bitstrings)
    p = np.zeros(keys.size)
    q = np.zeros(keys.size)
    p[np.searchsorted(keys, first.bitstrings)] = first.probabilities
    q[np.searchsorted(keys, second.bitstrings)] = second.probabilities
    return 0.5 * float(np.abs(p - q).sum())
