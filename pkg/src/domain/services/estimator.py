"""
Inflection-point stopping rule, shot sampling and subsample error bars.

The conditional entropy S_{A|B}(p_min) is fit with a four-parameter logistic
in x = log10(p_min); the mutual information at the grid point nearest the
inflection is the entanglement estimate.
"""

from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import least_squares
from tenacity import RetryError, Retrying, retry_if_exception_type, stop_after_attempt

from src.domain.entities.distributions import BitstringDistribution, ShotCounts
from src.domain.entities.states import GroundState
from src.domain.services.distribution import empirical_distribution, entropy_summary
from src.domain.services.entanglement import entanglement_entropy
from src.domain.services.filtering import sweep, validate_grid
from src.domain.value_objects.curves import FilterCurve
from src.domain.value_objects.estimates import (
    Conditional,
    EstimateReport,
    SigmoidFit,
    SubsampleErrors,
    logistic,
)
from src.domain.value_objects.partition import Bipartition
from src.shared.errors import FitError, FlatCurveError, InsufficientPointsError, ValidationError
from src.shared.logging import get_logger
from src.shared.patterns.parallel import ordered_map

logger = get_logger(__name__)

MIN_FIT_POINTS = 8
FLAT_RANGE = 1e-6
FIT_TOLERANCE = 1e-8
CENTER_MARGIN = 1.0
RETRY_CENTERS = 5
RETRY_STEEPNESS = (1.0, 3.0, 10.0)


class _FitNotConverged(Exception):
    pass


def _crossing(x: np.ndarray, y: np.ndarray, level: float) -> Optional[float]:
    """First x where y drops to level, linearly interpolated."""
    below = np.flatnonzero(y <= level)
    if below.size == 0:
        return None
    i = int(below[0])
    if i == 0 or y[i - 1] == y[i]:
        return float(x[i])
    t = (y[i - 1] - level) / (y[i - 1] - y[i])
    return float(x[i - 1] + t * (x[i] - x[i - 1]))


def _fit_data(curve: FilterCurve, which: Conditional) -> Tuple[np.ndarray, np.ndarray]:
    p_mins = curve.p_mins
    usable = p_mins > 0.0
    if int(usable.sum()) < MIN_FIT_POINTS:
        raise InsufficientPointsError(
            f"sigmoid fit needs {MIN_FIT_POINTS} points with p_min > 0, curve has {int(usable.sum())}"
        )
    x = np.log10(p_mins[usable])
    y = curve.conditional_entropy(which)[usable]
    if float(y.max() - y.min()) < FLAT_RANGE:
        raise FlatCurveError("conditional entropy is flat under filtering: nothing to filter")
    return x, y


def _initial_parameters(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """(amplitude, floor, steepness, center) from the data."""
    floor = float(y.min())
    amplitude = float(y.max() - y.min())
    center = _crossing(x, y, floor + amplitude / 2.0)
    upper = _crossing(x, y, floor + 0.75 * amplitude)
    lower = _crossing(x, y, floor + 0.25 * amplitude)
    span = (lower - upper) if upper is not None and lower is not None else 0.0
    if span <= 0.0:
        span = (x.max() - x.min()) / 4.0
    if center is None:
        center = float(np.median(x))
    return np.array([amplitude, floor, 4.0 / span, center])


def _center_window(x: np.ndarray) -> Tuple[float, float]:
    return float(x.min() - CENTER_MARGIN), float(x.max() + CENTER_MARGIN)


def _least_squares_fit(x: np.ndarray, y: np.ndarray, start: np.ndarray, which: Conditional) -> SigmoidFit:
    def residuals(params: np.ndarray) -> np.ndarray:
        return logistic(x, *params) - y

    initial_cost = 0.5 * float(np.sum(residuals(start) ** 2))
    result = least_squares(residuals, start, method="lm", xtol=FIT_TOLERANCE, ftol=FIT_TOLERANCE, gtol=FIT_TOLERANCE)
    amplitude, floor, steepness, center = (float(value) for value in result.x)
    low, high = _center_window(x)
    if not (
        result.success
        and result.cost <= initial_cost
        and amplitude > 0.0
        and steepness > 0.0
        and low <= center <= high
    ):
        raise _FitNotConverged(result.message)
    return SigmoidFit(
        amplitude=amplitude,
        floor=floor,
        steepness=steepness,
        center=center,
        residual_rms=float(np.sqrt(np.mean(result.fun**2))),
        converged=True,
        method="least_squares",
        which=which,
    )


def _retry_starts(x: np.ndarray, start: np.ndarray) -> List[np.ndarray]:
    starts = [start]
    for center in np.linspace(x.min(), x.max(), RETRY_CENTERS):
        for steepness in RETRY_STEEPNESS:
            starts.append(np.array([start[0], start[1], steepness, center]))
    return starts


def _half_reduction_fit(
    x: np.ndarray, y: np.ndarray, start: np.ndarray, original: float, which: Conditional
) -> SigmoidFit:
    low, high = _center_window(x)
    center = _crossing(x, y, original / 2.0)
    center = float(x.max()) if center is None else float(np.clip(center, low, high))
    amplitude, floor, steepness, _ = (float(value) for value in start)
    model = logistic(x, amplitude, floor, steepness, center)
    return SigmoidFit(
        amplitude=amplitude,
        floor=floor,
        steepness=steepness,
        center=center,
        residual_rms=float(np.sqrt(np.mean((model - y) ** 2))),
        converged=False,
        method="half_reduction_fallback",
        which=which,
    )


def fit_sigmoid(curve: FilterCurve, which: Conditional = "A|B") -> SigmoidFit:
    """
    Fit d + L / (1 + exp(k (x - x0))) to the conditional entropy against
    log10(p_min) by Levenberg-Marquardt.

    A data-driven start is tried first, then a coarse (x0, k) grid. If none
    converges, x0 falls back to where the conditional entropy first drops to
    half its unfiltered value.

    Raises:
        InsufficientPointsError: fewer than 8 points with p_min > 0
        FlatCurveError: the conditional entropy does not move
    """
    x, y = _fit_data(curve, which)
    start = _initial_parameters(x, y)
    starts = _retry_starts(x, start)

    try:
        for attempt in Retrying(
            stop=stop_after_attempt(len(starts)),
            retry=retry_if_exception_type(_FitNotConverged),
        ):
            with attempt:
                fit = _least_squares_fit(x, y, starts[attempt.retry_state.attempt_number - 1], which)
        return fit
    except RetryError:
        original = float(curve.conditional_entropy(which)[0])
        logger.warning("sigmoid_fit_fallback", which=which, attempts=len(starts))
        return _half_reduction_fit(x, y, start, original, which)


def mutual_information_at(curve: FilterCurve, center: float) -> float:
    """I at the positive grid point nearest x0 in log10(p_min); ties go to the smaller p_min."""
    p_mins = curve.p_mins
    usable = np.flatnonzero(p_mins > 0.0)
    distance = np.abs(np.log10(p_mins[usable]) - center)
    return float(curve.points[int(usable[int(np.argmin(distance))])].summary.mutual_information)


def estimate(
    dist: BitstringDistribution,
    part: Bipartition,
    grid: Sequence[float],
    state: Optional[GroundState] = None,
    workers: Optional[int] = 1,
) -> EstimateReport:
    """
    Sweep, fit S_{A|B} (and S_{B|A} for unequal cuts) and read I at the
    inflection point. A failed primary fit degrades to a report holding
    the unfiltered I and the failure reason.
    """
    curve = sweep(dist, part, grid, state=state, workers=workers)
    i_unfiltered = entropy_summary(dist, part).mutual_information
    positive = [point for point in curve.points if point.p_min > 0.0]
    i_smallest = positive[0].summary.mutual_information if positive else None
    reference = entanglement_entropy(state, part) if state is not None else None

    try:
        fit = fit_sigmoid(curve, "A|B")
    except FitError as exc:
        logger.warning("estimate_without_fit", reason=str(exc))
        return EstimateReport(
            curve=curve,
            i_unfiltered=i_unfiltered,
            i_at_smallest_pmin=i_smallest,
            reference_svn=reference,
            failure=str(exc),
        )

    fit_alt = None
    i_alt = None
    if not part.is_balanced:
        try:
            fit_alt = fit_sigmoid(curve, "B|A")
            i_alt = mutual_information_at(curve, fit_alt.center)
        except FitError as exc:
            logger.warning("alternate_fit_failed", reason=str(exc))

    report = EstimateReport(
        curve=curve,
        i_unfiltered=i_unfiltered,
        i_at_smallest_pmin=i_smallest,
        conditional_curve_used="A|B",
        fit=fit,
        fit_alt=fit_alt,
        i_at_inflection=mutual_information_at(curve, fit.center),
        i_at_inflection_alt=i_alt,
        reference_svn=reference,
    )
    logger.info(
        "estimate_complete",
        i_unfiltered=report.i_unfiltered,
        i_at_inflection=report.i_at_inflection,
        p_star=report.p_star,
        method=fit.method,
    )
    return report


def sample_shots(dist: BitstringDistribution, n_shots: int, seed: int) -> ShotCounts:
    """Multinomial draw of n_shots bitstrings; deterministic given seed."""
    if n_shots < 1:
        raise ValidationError(f"n_shots must be at least 1, got {n_shots}")
    rng = np.random.default_rng(seed)
    probabilities = dist.probabilities / dist.probabilities.sum()
    counts = rng.multinomial(n_shots, probabilities)
    return ShotCounts.from_arrays(dist.n_atoms, dist.bitstrings, counts)


def subsample_errors(
    counts: ShotCounts,
    sub_size: int,
    n_subsamples: int,
    part: Bipartition,
    grid: Sequence[float],
    seed: int,
    workers: Optional[int] = 1,
) -> SubsampleErrors:
    """
    Draw n_subsamples subsets of sub_size shots without replacement from the
    pooled shots and return the pointwise mean and standard deviation of
    I(p_min). Subsample j uses the random stream seeded with seed + j.
    """
    if not 1 <= sub_size <= counts.total:
        raise ValidationError(f"sub_size must be in [1, {counts.total}], got {sub_size}")
    if n_subsamples < 1:
        raise ValidationError(f"n_subsamples must be at least 1, got {n_subsamples}")
    values = validate_grid(grid)

    def one(index: int) -> np.ndarray:
        rng = np.random.default_rng(seed + index)
        drawn = rng.multivariate_hypergeometric(counts.counts, sub_size, method="marginals")
        record = ShotCounts.from_arrays(counts.n_atoms, counts.bitstrings, drawn)
        curve = sweep(empirical_distribution(record), part, values)
        row = np.full(values.size, np.nan)
        row[: len(curve)] = curve.mutual_information
        return row

    rows = np.vstack(ordered_map(one, range(n_subsamples), workers))
    valid = ~np.isnan(rows)
    n_valid = valid.sum(axis=0)
    has_data = n_valid > 0
    mean = np.divide(np.where(valid, rows, 0.0).sum(axis=0), n_valid, out=np.full(values.size, np.nan), where=has_data)
    deviation = np.where(valid, rows - mean, 0.0)
    std = np.sqrt(
        np.divide((deviation**2).sum(axis=0), n_valid, out=np.full(values.size, np.nan), where=has_data)
    )
    return SubsampleErrors(
        grid=values,
        mean=mean,
        std=std,
        n_valid=n_valid,
        sub_size=sub_size,
        n_subsamples=n_subsamples,
        seed=seed,
    )
