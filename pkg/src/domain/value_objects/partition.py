"""
Bipartitions and Schmidt spectra.
"""

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from src.shared.errors import ValidationError

Side = Literal["A", "B"]


@dataclass(frozen=True)
class Bipartition:
    """
    Contiguous split: A holds atoms 0..size_a-1 (the low bits of a
    bitstring), B holds the rest.
    """

    n_atoms: int
    size_a: int

    def __post_init__(self) -> None:
        if self.n_atoms < 2:
            raise ValidationError(f"a bipartition needs at least 2 atoms, got {self.n_atoms}")
        if not 1 <= self.size_a <= self.n_atoms - 1:
            raise ValidationError(f"size_a must be in [1, {self.n_atoms - 1}], got {self.size_a}")

    @classmethod
    def half(cls, n_atoms: int) -> "Bipartition":
        return cls(n_atoms=n_atoms, size_a=n_atoms // 2)

    @property
    def size_b(self) -> int:
        return self.n_atoms - self.size_a

    @property
    def mask_a(self) -> int:
        return (1 << self.size_a) - 1

    @property
    def is_balanced(self) -> bool:
        return self.size_a == self.size_b

    def complement(self) -> "Bipartition":
        """The cut with the roles of the two sides' sizes exchanged."""
        return Bipartition(n_atoms=self.n_atoms, size_a=self.size_b)

    def side_size(self, side: Side) -> int:
        return self.size_a if side == "A" else self.size_b


@dataclass(frozen=True)
class SchmidtSpectrum:
    """Nonincreasing eigenvalues of a reduced density matrix."""

    eigenvalues: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        self.eigenvalues.setflags(write=False)

    @property
    def rank(self) -> int:
        return int(np.count_nonzero(self.eigenvalues > 0.0))
