"""
Entropy summaries and filter curves.
"""

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from src.domain.value_objects.partition import Bipartition


@dataclass(frozen=True)
class EntropySummary:
    """Shannon entropies (nats) of a joint distribution and its two marginals."""

    s_ab: float
    s_a: float
    s_b: float
    s_a_given_b: float
    s_b_given_a: float
    mutual_information: float

    def conditional(self, which: str) -> float:
        return self.s_a_given_b if which == "A|B" else self.s_b_given_a


@dataclass(frozen=True)
class FilterPoint:
    p_min: float
    kept_states: int
    kept_mass: float
    summary: EntropySummary
    filtered_svn: Optional[float] = None


@dataclass(frozen=True)
class FilterCurve:
    """
    Filter points in increasing p_min. When a grid value leaves no survivors
    the curve stops and ``cutoff_p_min`` records that value.
    """

    points: Tuple[FilterPoint, ...]
    partition: Bipartition
    source: str
    n_shots: Optional[int] = None
    cutoff_p_min: Optional[float] = None

    def __len__(self) -> int:
        return len(self.points)

    @property
    def p_mins(self) -> np.ndarray:
        return np.array([point.p_min for point in self.points], dtype=np.float64)

    @property
    def mutual_information(self) -> np.ndarray:
        return np.array([point.summary.mutual_information for point in self.points], dtype=np.float64)

    def conditional_entropy(self, which: str) -> np.ndarray:
        return np.array([point.summary.conditional(which) for point in self.points], dtype=np.float64)

    def svn_gap(self) -> Optional[Tuple[float, float]]:
        """Mean and standard deviation of S^vN(p_min) - I(p_min) where available."""
        gaps: List[float] = [
            point.filtered_svn - point.summary.mutual_information
            for point in self.points
            if point.filtered_svn is not None
        ]
        if not gaps:
            return None
        values = np.array(gaps)
        return float(values.mean()), float(values.std())
