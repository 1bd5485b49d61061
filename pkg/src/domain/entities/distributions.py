"""
Sparse bitstring distributions and shot-count records.
"""

from dataclasses import dataclass, field
from typing import Dict, Literal, Mapping, Optional

import numpy as np

from src.shared.errors import ValidationError
from src.shared.utils.bitstrings import MAX_BITSTRING_ATOMS, parse_bitstring, render_bitstring

Source = Literal["exact", "empirical"]

NORMALIZATION_TOLERANCE = 1e-10


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class ShotCounts:
    """Observed bitstrings (sorted, unique) with their positive counts."""

    n_atoms: int
    bitstrings: np.ndarray = field(repr=False)
    counts: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if not 1 <= self.n_atoms <= MAX_BITSTRING_ATOMS:
            raise ValidationError(f"n_atoms must be in [1, {MAX_BITSTRING_ATOMS}], got {self.n_atoms}")
        if self.bitstrings.shape != self.counts.shape:
            raise ValidationError("bitstrings and counts must have the same length")
        if self.counts.size == 0 or int(self.counts.sum()) == 0:
            raise ValidationError("shot record is empty")
        if np.any(self.counts < 1):
            raise ValidationError("all counts must be at least 1")
        if np.any(np.diff(self.bitstrings.astype(np.int64)) <= 0) and self.bitstrings.size > 1:
            raise ValidationError("bitstrings must be sorted and unique")
        _frozen(self.bitstrings)
        _frozen(self.counts)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @classmethod
    def from_arrays(cls, n_atoms: int, bitstrings: np.ndarray, counts: np.ndarray) -> "ShotCounts":
        """Aggregate possibly repeated bitstrings, dropping zero counts."""
        keys = np.asarray(bitstrings, dtype=np.uint64)
        weights = np.asarray(counts, dtype=np.int64)
        unique, inverse = np.unique(keys, return_inverse=True)
        summed = np.bincount(inverse, weights=weights, minlength=unique.size).astype(np.int64)
        keep = summed > 0
        return cls(n_atoms=n_atoms, bitstrings=unique[keep], counts=summed[keep])

    @classmethod
    def from_mapping(cls, counts: Mapping[str, int]) -> "ShotCounts":
        """Build from atom-0-first text keys; all keys must have equal length."""
        if not counts:
            raise ValidationError("shot record is empty")
        n_atoms: Optional[int] = None
        keys = []
        values = []
        for text, count in counts.items():
            value, length = parse_bitstring(text)
            if n_atoms is None:
                n_atoms = length
            elif length != n_atoms:
                raise ValidationError(f"inconsistent bitstring length: {text!r} has {length} atoms, expected {n_atoms}")
            if int(count) < 1:
                raise ValidationError(f"count for {text!r} must be at least 1, got {count}")
            keys.append(value)
            values.append(int(count))
        assert n_atoms is not None
        return cls.from_arrays(n_atoms, np.array(keys, dtype=np.uint64), np.array(values, dtype=np.int64))

    def as_text_dict(self) -> Dict[str, int]:
        return {
            render_bitstring(int(key), self.n_atoms): int(count)
            for key, count in zip(self.bitstrings, self.counts)
        }


@dataclass(frozen=True)
class BitstringDistribution:
    """
    Probability map over bitstrings, stored as sorted unique keys and
    strictly positive probabilities.

    Empirical distributions keep their integer counts; ``n_shots`` is the
    total count behind the stored probabilities.
    """

    n_atoms: int
    bitstrings: np.ndarray = field(repr=False)
    probabilities: np.ndarray = field(repr=False)
    source: Source = "exact"
    n_shots: Optional[int] = None
    counts: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if not 1 <= self.n_atoms <= MAX_BITSTRING_ATOMS:
            raise ValidationError(f"n_atoms must be in [1, {MAX_BITSTRING_ATOMS}], got {self.n_atoms}")
        if self.bitstrings.shape != self.probabilities.shape:
            raise ValidationError("bitstrings and probabilities must have the same length")
        if self.bitstrings.size == 0:
            raise ValidationError("distribution has no entries")
        if np.any(self.probabilities <= 0.0):
            raise ValidationError("all stored probabilities must be positive")
        total = float(np.sum(self.probabilities))
        if abs(total - 1.0) > NORMALIZATION_TOLERANCE:
            raise ValidationError(f"probabilities sum to {total!r}, expected 1")
        if self.source == "empirical":
            if self.n_shots is None or self.counts is None:
                raise ValidationError("empirical distributions need n_shots and counts")
            if int(self.counts.sum()) != self.n_shots:
                raise ValidationError("counts do not add up to n_shots")
            _frozen(self.counts)
        elif self.source != "exact":
            raise ValidationError(f"unknown distribution source {self.source!r}")
        _frozen(self.bitstrings)
        _frozen(self.probabilities)

    @property
    def size(self) -> int:
        return int(self.bitstrings.size)

    @property
    def is_empirical(self) -> bool:
        return self.source == "empirical"

    def as_dict(self) -> Dict[str, float]:
        return {
            render_bitstring(int(key), self.n_atoms): float(p)
            for key, p in zip(self.bitstrings, self.probabilities)
        }
