"""
Sigmoid fits, estimate reports and subsample error bars.
"""

from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np
from scipy.special import expit

from src.domain.value_objects.curves import FilterCurve

FitMethod = Literal["least_squares", "half_reduction_fallback"]
Conditional = Literal["A|B", "B|A"]


@dataclass(frozen=True)
class SigmoidFit:
    """
    f(x) = floor + amplitude / (1 + exp(steepness * (x - center)))
    with x = log10(p_min). The inflection sits at x = center.
    """

    amplitude: float
    floor: float
    steepness: float
    center: float
    residual_rms: float
    converged: bool
    method: FitMethod
    which: Conditional = "A|B"

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return logistic(np.asarray(x, dtype=np.float64), self.amplitude, self.floor, self.steepness, self.center)

    @property
    def p_star(self) -> float:
        return float(10.0**self.center)


def logistic(x: np.ndarray, amplitude: float, floor: float, steepness: float, center: float) -> np.ndarray:
    # expit(-z) == 1 / (1 + exp(z)) without overflow
    return floor + amplitude * expit(-steepness * (x - center))


@dataclass(frozen=True)
class EstimateReport:
    """Outcome of the inflection-point stopping rule on one filter curve."""

    curve: FilterCurve
    i_unfiltered: float
    i_at_smallest_pmin: Optional[float]
    conditional_curve_used: Conditional = "A|B"
    fit: Optional[SigmoidFit] = None
    fit_alt: Optional[SigmoidFit] = None
    i_at_inflection: Optional[float] = None
    i_at_inflection_alt: Optional[float] = None
    reference_svn: Optional[float] = None
    failure: Optional[str] = None

    @property
    def p_star(self) -> Optional[float]:
        return self.fit.p_star if self.fit is not None else None


@dataclass(frozen=True)
class SubsampleErrors:
    """Pointwise mean/std of I(p_min) over repeated subsamples."""

    grid: np.ndarray
    mean: np.ndarray
    std: np.ndarray
    n_valid: np.ndarray
    sub_size: int
    n_subsamples: int
    seed: int
