"""
CSV/JSON writers for curves, scans and reports.
"""

import math
from pathlib import Path
from typing import Iterable, Optional, Sequence

from pydantic import BaseModel

from src.domain.value_objects.curves import FilterCurve
from src.domain.value_objects.estimates import SubsampleErrors
from src.infrastructure.persistence.files import atomic_write_text, write_csv

CURVE_COLUMNS = [
    "p_min",
    "kept_states",
    "kept_mass",
    "s_ab",
    "s_a",
    "s_b",
    "s_a_given_b",
    "s_b_given_a",
    "mutual_information",
    "filtered_svn",
]

PHASE_COLUMNS = [
    "rb_over_a",
    "delta_over_omega",
    "energy",
    "gap",
    "degenerate",
    "s_ab",
    "s_a",
    "s_b",
    "s_vn",
    "mutual_information",
]

SUBSAMPLE_COLUMNS = ["p_min", "mean_mutual_information", "std_mutual_information", "n_valid"]


def curve_rows(curve: FilterCurve) -> Iterable[Sequence[object]]:
    for point in curve.points:
        summary = point.summary
        yield [
            point.p_min,
            point.kept_states,
            point.kept_mass,
            summary.s_ab,
            summary.s_a,
            summary.s_b,
            summary.s_a_given_b,
            summary.s_b_given_a,
            summary.mutual_information,
            point.filtered_svn,
        ]


def write_curve_csv(path: Path, curve: FilterCurve) -> Path:
    return write_csv(path, CURVE_COLUMNS, curve_rows(curve))


def write_phase_csv(path: Path, rows: Iterable[Sequence[object]]) -> Path:
    return write_csv(path, PHASE_COLUMNS, rows)


def _finite_or_none(value: float) -> Optional[float]:
    return float(value) if math.isfinite(value) else None


def write_subsample_csv(path: Path, errors: SubsampleErrors) -> Path:
    rows = (
        [float(p), _finite_or_none(mean), _finite_or_none(std), int(valid)]
        for p, mean, std, valid in zip(errors.grid, errors.mean, errors.std, errors.n_valid)
    )
    return write_csv(path, SUBSAMPLE_COLUMNS, rows)


def write_model_json(path: Path, model: BaseModel) -> Path:
    return atomic_write_text(path, model.model_dump_json(indent=2) + "\n")
