"""
JSON report schemas.

Reports embed the resolved configuration and the grid so every output is
self-describing and reproducible from (config, seed).
"""

from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field

from src.domain.entities.ladder import LadderGeometry
from src.domain.entities.states import GroundState
from src.domain.value_objects.estimates import EstimateReport, SigmoidFit
from src.infrastructure.config.settings import RunConfig


class SigmoidFitSchema(BaseModel):
    which: str
    method: str
    converged: bool
    amplitude: float
    floor: float
    steepness: float
    center: float
    p_star: float
    residual_rms: float

    @classmethod
    def from_domain(cls, fit: SigmoidFit) -> "SigmoidFitSchema":
        return cls(
            which=fit.which,
            method=fit.method,
            converged=fit.converged,
            amplitude=fit.amplitude,
            floor=fit.floor,
            steepness=fit.steepness,
            center=fit.center,
            p_star=fit.p_star,
            residual_rms=fit.residual_rms,
        )


class GroundStateSchema(BaseModel):
    n_atoms: int
    energy: float
    gap: float
    converged: bool
    degenerate: bool
    residual_norm: float
    solver: str
    iterations: int

    @classmethod
    def from_domain(cls, state: GroundState) -> "GroundStateSchema":
        return cls(
            n_atoms=state.n_atoms,
            energy=state.energy,
            gap=state.gap,
            converged=state.converged,
            degenerate=state.degenerate,
            residual_norm=state.residual_norm,
            solver=state.solver,
            iterations=state.iterations,
        )


class GroundStateReportSchema(BaseModel):
    config: Dict[str, Any]
    geometry: Dict[str, List[float]]
    state: GroundStateSchema
    size_a: int
    s_vn: float
    reliable: bool
    cache_path: Optional[str] = None


class EstimateReportSchema(BaseModel):
    config: Dict[str, Any]
    source: str
    n_shots: Optional[int] = None
    size_a: int
    size_b: int
    grid: List[float]
    cutoff_p_min: Optional[float] = None
    geometry: Optional[Dict[str, List[float]]] = None
    ground_state: Optional[GroundStateSchema] = None

    i_unfiltered: float
    i_at_smallest_pmin: Optional[float] = None
    conditional_curve_used: str
    p_star: Optional[float] = None
    i_at_inflection: Optional[float] = None
    i_at_inflection_alt: Optional[float] = None
    fit: Optional[SigmoidFitSchema] = None
    fit_alt: Optional[SigmoidFitSchema] = None
    reference_svn: Optional[float] = None
    svn_gap_mean: Optional[float] = None
    svn_gap_std: Optional[float] = None
    failure: Optional[str] = None
    reliable: bool = True
    provenance: Dict[str, Any] = Field(default_factory=dict)

    @classmethod
    def from_domain(
        cls,
        report: EstimateReport,
        config: RunConfig,
        grid: List[float],
        state: Optional[GroundState] = None,
        geometry: Optional[LadderGeometry] = None,
        provenance: Optional[Dict[str, Any]] = None,
    ) -> "EstimateReportSchema":
        gap = report.curve.svn_gap()
        part = report.curve.partition
        return cls(
            config=config_payload(config),
            source=report.curve.source,
            n_shots=report.curve.n_shots,
            size_a=part.size_a,
            size_b=part.size_b,
            grid=[float(value) for value in grid],
            cutoff_p_min=report.curve.cutoff_p_min,
            geometry=geometry.as_report() if geometry is not None else None,
            ground_state=GroundStateSchema.from_domain(state) if state is not None else None,
            i_unfiltered=report.i_unfiltered,
            i_at_smallest_pmin=report.i_at_smallest_pmin,
            conditional_curve_used=report.conditional_curve_used,
            p_star=report.p_star,
            i_at_inflection=report.i_at_inflection,
            i_at_inflection_alt=report.i_at_inflection_alt,
            fit=SigmoidFitSchema.from_domain(report.fit) if report.fit is not None else None,
            fit_alt=SigmoidFitSchema.from_domain(report.fit_alt) if report.fit_alt is not None else None,
            reference_svn=report.reference_svn,
            svn_gap_mean=gap[0] if gap is not None else None,
            svn_gap_std=gap[1] if gap is not None else None,
            failure=report.failure,
            reliable=not (state is not None and state.degenerate),
            provenance=dict(provenance or {}),
        )


def config_payload(config: RunConfig) -> Dict[str, Any]:
    return config.model_dump(mode="json")
