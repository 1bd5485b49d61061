"""
Pipelines behind the CLI subcommands.

Each pipeline resolves a RunConfig into a ground state (solved or cached),
a bitstring distribution (exact, sampled or ingested) and an estimate report.
"""

from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from src.domain.entities.distributions import BitstringDistribution, ShotCounts
from src.domain.entities.ladder import LadderGeometry
from src.domain.entities.states import GroundState
from src.domain.services import hamiltonian
from src.domain.services.distribution import empirical_distribution, entropy_summary, exact_distribution
from src.domain.services.entanglement import entanglement_entropy
from src.domain.services.estimator import estimate, sample_shots, subsample_errors
from src.domain.services.filtering import default_grid, filter_by_min_count
from src.domain.services.lattice import build_ladder, physical_spacing_um
from src.domain.value_objects.estimates import EstimateReport, SubsampleErrors
from src.domain.value_objects.partition import Bipartition
from src.infrastructure.config.settings import RunConfig
from src.infrastructure.persistence.shot_files import ShotFormat, read_shot_file
from src.infrastructure.persistence.state_store import GroundStateStore
from src.presentation.schemas.reports import EstimateReportSchema
from src.shared.errors import CapabilityError, ValidationError
from src.shared.logging import get_logger
from src.shared.patterns.parallel import ordered_map

logger = get_logger(__name__)


@dataclass(frozen=True)
class GroundStateResult:
    config: RunConfig
    state: GroundState
    geometry: LadderGeometry
    s_vn: float
    cache_path: Optional[Path] = None


@dataclass(frozen=True)
class EstimateResult:
    config: RunConfig
    report: EstimateReport
    grid: np.ndarray
    state: Optional[GroundState] = None
    geometry: Optional[LadderGeometry] = None
    provenance: Dict[str, Any] = field(default_factory=dict)

    def to_schema(self) -> EstimateReportSchema:
        return EstimateReportSchema.from_domain(
            self.report,
            self.config,
            [float(value) for value in self.grid],
            state=self.state,
            geometry=self.geometry,
            provenance=self.provenance,
        )


def grid_for(config: RunConfig) -> np.ndarray:
    return default_grid(config.grid_min_exponent, config.grid_max_exponent, config.grid_points)


def bipartition_for(config: RunConfig) -> Bipartition:
    return Bipartition(n_atoms=config.n_atoms, size_a=config.resolved_size_a)


def solver_parameters(config: RunConfig) -> Dict[str, Any]:
    return {
        "n_rungs": config.n_rungs,
        "rb_over_a": config.rb_over_a,
        "delta_over_omega": config.delta_over_omega,
        "tol": config.tol,
        "max_iterations": config.max_iterations,
        "seed": config.seed,
    }


def check_capability(config: RunConfig) -> None:
    """Refuse exact solves above the configured atom ceiling."""
    if config.n_atoms > config.max_exact_atoms and not config.allow_large:
        logger.warning("exact_solve_refused", n_atoms=config.n_atoms, ceiling=config.max_exact_atoms)
        raise CapabilityError(
            f"{config.n_rungs} rungs ({config.n_atoms} atoms) exceed the exact-solve ceiling of "
            f"{config.max_exact_atoms} atoms; pass --allow-large to accept the memory cost"
        )


class LadderPipeline:
    """Runs solves, estimates and sweeps for a resolved configuration."""

    def __init__(self, use_cache: bool = True):
        self.use_cache = use_cache

    def solve(self, config: RunConfig) -> GroundStateResult:
        check_capability(config)
        parameters = solver_parameters(config)
        store = GroundStateStore(config.cache_dir) if self.use_cache else None

        state = store.load(parameters) if store is not None else None
        cache_path = store.path_for(parameters) if store is not None else None
        if state is None:
            spec = hamiltonian.make_spec(config.n_rungs, config.rb_over_a, config.delta_over_omega)
            state = hamiltonian.ground_state(spec, config.tol, config.max_iterations, config.seed)
            if store is not None:
                cache_path = store.save(parameters, state)

        geometry = build_ladder(config.n_rungs)
        s_vn = entanglement_entropy(state, bipartition_for(config))
        return GroundStateResult(config=config, state=state, geometry=geometry, s_vn=s_vn, cache_path=cache_path)

    def _provenance(self, config: RunConfig, **extra: Any) -> Dict[str, Any]:
        return {
            "solver": solver_parameters(config),
            "lattice_spacing_um": physical_spacing_um(config.rb_over_a, config.rb_um),
            **extra,
        }

    def _empirical_estimate(
        self,
        config: RunConfig,
        record: ShotCounts,
        reference: Optional[GroundStateResult],
        provenance: Dict[str, Any],
    ) -> EstimateResult:
        if record.n_atoms != config.n_atoms:
            raise ValidationError(
                f"shot bitstrings have {record.n_atoms} atoms but {config.n_rungs} rungs need {config.n_atoms}"
            )
        dist: BitstringDistribution = empirical_distribution(record)
        if config.min_count is not None:
            dist = filter_by_min_count(dist, config.min_count)
        grid = grid_for(config)
        report = estimate(dist, bipartition_for(config), grid, workers=config.workers)
        state = None
        geometry = build_ladder(config.n_rungs)
        if reference is not None:
            report = replace(report, reference_svn=reference.s_vn)
            state = reference.state
        return EstimateResult(
            config=config,
            report=report,
            grid=grid,
            state=state,
            geometry=geometry,
            provenance=provenance,
        )

    def estimate(self, config: RunConfig) -> EstimateResult:
        """Exact pipeline, or sampled shots of the exact state when config.shots is set."""
        if config.shots is None and config.min_count is not None:
            raise ValidationError("min_count filters shot counts; set shots or use ingest for empirical data")
        solved = self.solve(config)
        if config.shots is not None:
            record = sample_shots(exact_distribution(solved.state), config.shots, config.seed)
            provenance = self._provenance(config, sampled_shots=config.shots, sampling_seed=config.seed)
            return self._empirical_estimate(config, record, solved, provenance)

        grid = grid_for(config)
        dist = exact_distribution(solved.state)
        report = estimate(dist, bipartition_for(config), grid, state=solved.state, workers=config.workers)
        return EstimateResult(
            config=config,
            report=report,
            grid=grid,
            state=solved.state,
            geometry=solved.geometry,
            provenance=self._provenance(config, cache_path=str(solved.cache_path) if solved.cache_path else None),
        )

    def ingest(self, path: Path, fmt: ShotFormat, config: RunConfig) -> EstimateResult:
        """Empirical pipeline on a shot file; no filtered S^vN column."""
        record = read_shot_file(path, fmt, expected_atoms=config.n_atoms)
        logger.info("shots_ingested", path=str(path), shots=record.total, distinct=int(record.counts.size))
        provenance = self._provenance(config, shot_file=str(path), shots=record.total)
        return self._empirical_estimate(config, record, None, provenance)

    def sample(self, config: RunConfig, n_shots: int) -> ShotCounts:
        solved = self.solve(config)
        return sample_shots(exact_distribution(solved.state), n_shots, config.seed)

    def subsample(self, config: RunConfig, shots_path: Optional[Path] = None, fmt: ShotFormat = "auto") -> SubsampleErrors:
        """Error bars from repeated subsamples of a shot pool (file or freshly sampled)."""
        if shots_path is not None:
            record = read_shot_file(shots_path, fmt, expected_atoms=config.n_atoms)
        else:
            if config.shots is None:
                raise ValidationError("subsample needs a shot file or a --shots pool size")
            record = self.sample(config, config.shots)
        return subsample_errors(
            record,
            config.subsample_size,
            config.n_subsamples,
            bipartition_for(config),
            grid_for(config),
            config.seed,
            workers=config.workers,
        )

    def _run_all(self, configs: Sequence[RunConfig], workers: int) -> List[EstimateResult]:
        for item in configs:
            check_capability(item)
        return ordered_map(self.estimate, configs, workers)

    def sweep_volume(self, config: RunConfig, rungs: Sequence[int]) -> List[EstimateResult]:
        configs = [config.with_updates(n_rungs=int(n), size_a=None) for n in rungs]
        return self._run_all(configs, config.workers)

    def sweep_spacing(self, config: RunConfig, rb_values: Sequence[float]) -> List[EstimateResult]:
        configs = [config.with_updates(rb_over_a=float(rb)) for rb in rb_values]
        return self._run_all(configs, config.workers)

    def sweep_bipartition(self, config: RunConfig, sizes: Sequence[int]) -> List[EstimateResult]:
        configs = [config.with_updates(size_a=int(size)) for size in sizes]
        return self._run_all(configs, config.workers)

    def phase_scan(
        self, config: RunConfig, rb_values: Sequence[float], delta_values: Sequence[float]
    ) -> List[List[Any]]:
        """S^vN and the bitstring-entropy bound chain on an (R_b/a, Delta/Omega) grid."""
        configs = [
            config.with_updates(rb_over_a=float(rb), delta_over_omega=float(delta))
            for rb in rb_values
            for delta in delta_values
        ]
        for item in configs:
            check_capability(item)

        def cell(item: RunConfig) -> List[Any]:
            solved = self.solve(item)
            summary = entropy_summary(exact_distribution(solved.state), bipartition_for(item))
            return [
                item.rb_over_a,
                item.delta_over_omega,
                solved.state.energy,
                solved.state.gap,
                solved.state.degenerate,
                summary.s_ab,
                summary.s_a,
                summary.s_b,
                solved.s_vn,
                summary.mutual_information,
            ]

        return ordered_map(cell, configs, config.workers)
