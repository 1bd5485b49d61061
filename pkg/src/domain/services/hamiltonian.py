"""
Matrix-free Rydberg ladder Hamiltonian and ground-state solvers.

The Krylov path runs ARPACK's implicitly restarted Lanczos (scipy ``eigsh``)
on a ``LinearOperator`` so no matrix is ever stored; the dense path is the
oracle for small systems.
"""

from dataclasses import replace
from typing import List, Optional, Tuple

import numpy as np
import scipy.linalg
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh
from tenacity import Retrying, retry_if_exception_type, stop_after_attempt

from src.domain.entities.ladder import CouplingTable
from src.domain.entities.states import GroundState, HamiltonianSpec
from src.domain.services.lattice import build_ladder, couplings
from src.shared.errors import CapabilityError, SolverConvergenceError, ValidationError
from src.shared.logging import get_logger

logger = get_logger(__name__)

DEFAULT_TOLERANCE = 1e-10
DEFAULT_MAX_ITERATIONS = 500
DEFAULT_SEED = 1234

MAX_ADDRESSABLE_ATOMS = 30
DENSE_MAX_ATOMS = 12
KRYLOV_MIN_DIMENSION = 16
DEGENERACY_FACTOR = 100.0
RESIDUAL_ATTEMPTS = 3


class _ResidualAboveTolerance(Exception):
    def __init__(self, state: GroundState, v0: np.ndarray):
        self.state = state
        self.v0 = v0
        super().__init__(f"residual {state.residual_norm:.3e}")


def make_spec(n_rungs: int, rb_over_a: float, delta_over_omega: float) -> HamiltonianSpec:
    geometry = build_ladder(n_rungs)
    return HamiltonianSpec(
        geometry=geometry,
        couplings=couplings(geometry, rb_over_a),
        delta_over_omega=float(delta_over_omega),
    )


def spec_from_couplings(table: CouplingTable, delta_over_omega: float) -> HamiltonianSpec:
    """Spec for a hand-built coupling table with no ladder geometry."""
    return HamiltonianSpec(geometry=None, couplings=table, delta_over_omega=float(delta_over_omega))


def _check_addressable(spec: HamiltonianSpec) -> None:
    if spec.n_atoms > MAX_ADDRESSABLE_ATOMS:
        raise CapabilityError(
            f"2^{spec.n_atoms} basis states exceed the addressable limit of 2^{MAX_ADDRESSABLE_ATOMS}"
        )


def diagonal_energies(spec: HamiltonianSpec) -> np.ndarray:
    """
    Diagonal of H for every bitstring n:
    -(Delta/Omega) sum_i n_i + sum_{i<j} V_ij n_i n_j.
    """
    _check_addressable(spec)
    n_atoms = spec.n_atoms
    index = np.arange(spec.dimension, dtype=np.int64)
    occupied = [((index >> i) & 1).astype(bool) for i in range(n_atoms)]
    v = spec.couplings.v

    energies = np.zeros(spec.dimension, dtype=np.float64)
    for i in range(n_atoms):
        local = np.full(spec.dimension, -spec.delta_over_omega, dtype=np.float64)
        for j in range(i + 1, n_atoms):
            local[occupied[j]] += v[i, j]
        energies[occupied[i]] += local[occupied[i]]
    return energies


def apply_h(spec: HamiltonianSpec, v: np.ndarray, diagonal: Optional[np.ndarray] = None) -> np.ndarray:
    """
    (H v)[n] = diag[n] v[n] + 1/2 sum_i v[n XOR 2^i].

    Pass ``diagonal`` from ``diagonal_energies`` to avoid recomputing it.
    """
    vector = np.asarray(v, dtype=np.float64)
    if vector.ndim != 1 or vector.shape[0] != spec.dimension:
        raise ValidationError(f"vector length {vector.shape} does not match dimension {spec.dimension}")
    diag = diagonal_energies(spec) if diagonal is None else diagonal

    out = diag * vector
    for i in range(spec.n_atoms):
        block = 1 << i
        # axis 1 of the reshape is bit i; reversing it flips that bit
        flipped = vector.reshape(-1, 2, block)[:, ::-1, :]
        out.reshape(-1, 2, block)[...] += 0.5 * flipped
    return out


def expectation(spec: HamiltonianSpec, v: np.ndarray, diagonal: Optional[np.ndarray] = None) -> float:
    vector = np.asarray(v, dtype=np.float64)
    return float(vector @ apply_h(spec, vector, diagonal) / (vector @ vector))


def as_linear_operator(spec: HamiltonianSpec, diagonal: Optional[np.ndarray] = None) -> Tuple[LinearOperator, List[int]]:
    """LinearOperator view of H plus a one-element list counting matvecs."""
    diag = diagonal_energies(spec) if diagonal is None else diagonal
    calls = [0]

    def matvec(x: np.ndarray) -> np.ndarray:
        calls[0] += 1
        return apply_h(spec, np.ravel(x), diag)

    operator = LinearOperator((spec.dimension, spec.dimension), matvec=matvec, rmatvec=matvec, dtype=np.float64)
    return operator, calls


def _fix_sign(vector: np.ndarray) -> np.ndarray:
    vector = vector / np.linalg.norm(vector)
    if vector[int(np.argmax(np.abs(vector)))] < 0.0:
        vector = -vector
    return vector


def _residual(spec: HamiltonianSpec, vector: np.ndarray, energy: float, diag: np.ndarray) -> float:
    return float(np.linalg.norm(apply_h(spec, vector, diag) - energy * vector))


def _flag_degeneracy(gap: float, tol: float, solver: str) -> bool:
    degenerate = gap < DEGENERACY_FACTOR * tol
    if degenerate:
        logger.warning("near_degenerate_ground_state", gap=gap, tolerance=tol, solver=solver)
    return degenerate


def dense_ground_state(spec: HamiltonianSpec, tol: float = DEFAULT_TOLERANCE) -> GroundState:
    """Full dense eigendecomposition; limited to 2^12 basis states."""
    if spec.n_atoms > DENSE_MAX_ATOMS:
        raise CapabilityError(
            f"dense solver is limited to {DENSE_MAX_ATOMS} atoms, spec has {spec.n_atoms}"
        )
    diag = diagonal_energies(spec)
    dimension = spec.dimension
    matrix = np.diag(diag)
    index = np.arange(dimension)
    for i in range(spec.n_atoms):
        matrix[index, index ^ (1 << i)] += 0.5

    values, vectors = scipy.linalg.eigh(matrix)
    vector = _fix_sign(vectors[:, 0])
    energy = float(values[0])
    gap = float(values[1] - values[0])
    return GroundState(
        amplitudes=vector,
        n_atoms=spec.n_atoms,
        energy=energy,
        gap=gap,
        converged=True,
        residual_norm=_residual(spec, vector, energy, diag),
        degenerate=_flag_degeneracy(gap, tol, "dense"),
        solver="dense",
        iterations=0,
    )


def _krylov_solve(
    spec: HamiltonianSpec,
    diag: np.ndarray,
    tol: float,
    max_iterations: int,
    v0: np.ndarray,
) -> GroundState:
    operator, calls = as_linear_operator(spec, diag)
    # ARPACK's criterion is relative to |lambda|; scale it so the absolute
    # residual lands below tol
    scale = max(1.0, float(np.max(np.abs(diag))) + 0.5 * spec.n_atoms)
    try:
        values, vectors = eigsh(operator, k=2, which="SA", v0=v0, tol=0.1 * tol / scale, maxiter=max_iterations)
    except ArpackNoConvergence as exc:
        best = np.inf
        if exc.eigenvectors is not None and len(exc.eigenvalues) > 0:
            order = np.argsort(exc.eigenvalues)
            candidate = _fix_sign(exc.eigenvectors[:, order[0]])
            best = _residual(spec, candidate, float(exc.eigenvalues[order[0]]), diag)
        raise SolverConvergenceError("Krylov eigensolver did not converge", best, calls[0]) from exc

    order = np.argsort(values)
    energy = float(values[order[0]])
    gap = float(values[order[1]] - values[order[0]])
    vector = _fix_sign(vectors[:, order[0]])
    residual = _residual(spec, vector, energy, diag)
    state = GroundState(
        amplitudes=vector,
        n_atoms=spec.n_atoms,
        energy=energy,
        gap=gap,
        converged=residual <= tol,
        residual_norm=residual,
        solver="krylov",
        iterations=calls[0],
    )
    if residual > tol:
        raise _ResidualAboveTolerance(state, vector)
    return state


def ground_state(
    spec: HamiltonianSpec,
    tol: float = DEFAULT_TOLERANCE,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
    seed: int = DEFAULT_SEED,
) -> GroundState:
    """
    Lowest eigenpair of H with a seeded random start vector.

    The gap is the distance to the second Ritz value. Systems with fewer than
    KRYLOV_MIN_DIMENSION basis states go to the dense solver.

    Raises:
        SolverConvergenceError: no eigenpair with residual <= tol
        CapabilityError: dimension beyond the addressable limit
    """
    if tol <= 0.0:
        raise ValidationError(f"tol must be positive, got {tol!r}")
    if max_iterations < 1:
        raise ValidationError(f"max_iterations must be positive, got {max_iterations!r}")
    _check_addressable(spec)

    if spec.dimension < KRYLOV_MIN_DIMENSION:
        return dense_ground_state(spec, tol)

    diag = diagonal_energies(spec)
    # restarts begin from the previous Ritz vector
    start = [np.random.default_rng(seed).standard_normal(spec.dimension)]

    try:
        for attempt in Retrying(
            stop=stop_after_attempt(RESIDUAL_ATTEMPTS),
            retry=retry_if_exception_type(_ResidualAboveTolerance),
            reraise=True,
        ):
            with attempt:
                try:
                    state = _krylov_solve(spec, diag, tol, max_iterations, start[0])
                except _ResidualAboveTolerance as exc:
                    start[0] = exc.v0
                    raise
    except _ResidualAboveTolerance as exc:
        raise SolverConvergenceError(
            "Krylov residual above tolerance", exc.state.residual_norm, exc.state.iterations
        ) from exc

    state = replace(state, degenerate=_flag_degeneracy(state.gap, tol, "krylov"))
    logger.info(
        "ground_state_solved",
        n_atoms=spec.n_atoms,
        energy=state.energy,
        gap=state.gap,
        residual=state.residual_norm,
        matvecs=state.iterations,
    )
    return state
