"""
Schmidt spectra, von Neumann entropy and the filtration projector.
"""

from dataclasses import replace
from typing import List, Optional, Sequence

import numpy as np
import scipy.linalg
from scipy.special import entr

from src.domain.entities.states import GroundState
from src.domain.value_objects.partition import Bipartition, SchmidtSpectrum, Side
from src.shared.errors import EmptySelectionError, SpectrumError, ValidationError

CLAMP_TOLERANCE = 1e-10
TRACE_TOLERANCE = 1e-10


def _amplitude_matrix(state: GroundState, part: Bipartition) -> np.ndarray:
    if part.n_atoms != state.n_atoms:
        raise ValidationError(
            f"bipartition covers {part.n_atoms} atoms but the state has {state.n_atoms}"
        )
    # n = n_A + 2^|A| n_B, so C-order rows are B and columns are A
    return np.asarray(state.amplitudes).reshape(1 << part.size_b, 1 << part.size_a)


def _spectrum_from_values(raw: np.ndarray) -> SchmidtSpectrum:
    if np.any(raw < -CLAMP_TOLERANCE):
        raise SpectrumError(f"reduced density matrix eigenvalue {raw.min():.3e} is too negative to clamp")
    values = np.clip(raw, 0.0, None)
    trace = float(values.sum())
    if abs(trace - 1.0) > TRACE_TOLERANCE:
        raise SpectrumError(f"Schmidt spectrum sums to {trace!r}; is the state normalized?")
    return SchmidtSpectrum(eigenvalues=np.sort(values)[::-1].copy())


def schmidt_spectrum(state: GroundState, part: Bipartition) -> SchmidtSpectrum:
    """
    Eigenvalues of rho_A = Tr_B |psi><psi| as squared singular values of the
    2^|B| x 2^|A| amplitude matrix; rho_A is never formed.
    """
    singular = scipy.linalg.svdvals(_amplitude_matrix(state, part))
    return _spectrum_from_values(singular**2)


def reduced_spectrum(state: GroundState, part: Bipartition, side: Side) -> SchmidtSpectrum:
    """
    Spectrum of the reduced density matrix of one side, built explicitly.

    Used to check S_A = S_B independently of the SVD path.
    """
    matrix = _amplitude_matrix(state, part)
    rho = matrix.T @ matrix if side == "A" else matrix @ matrix.T
    return _spectrum_from_values(scipy.linalg.eigvalsh(rho))


def von_neumann_entropy(spectrum: SchmidtSpectrum) -> float:
    """-sum lambda ln lambda in nats, with 0 ln 0 = 0."""
    return float(np.sum(entr(spectrum.eigenvalues)))


def project_filter_state(state: GroundState, p_min: float) -> GroundState:
    """
    Normalized P(p_min)|psi>: amplitudes with |c_n|^2 < p_min are zeroed.

    Raises:
        EmptySelectionError: p_min exceeds every |c_n|^2
    """
    if not 0.0 <= p_min <= 1.0:
        raise ValidationError(f"p_min must be in [0, 1], got {p_min!r}")
    if p_min == 0.0:
        return state

    probabilities = state.probabilities()
    keep = probabilities >= p_min
    if not np.any(keep):
        raise EmptySelectionError(
            f"projection at p_min={p_min!r} removes every basis state (max probability {probabilities.max()!r})",
            threshold=p_min,
        )
    projected = np.where(keep, state.amplitudes, 0.0)
    projected = projected / np.linalg.norm(projected)
    return replace(state, amplitudes=projected, projected_p_min=float(p_min))


def filtered_vn_entropy(state: GroundState, part: Bipartition, p_min: float) -> float:
    return von_neumann_entropy(schmidt_spectrum(project_filter_state(state, p_min), part))


def filtered_svn_curve(state: GroundState, part: Bipartition, grid: Sequence[float]) -> List[Optional[float]]:
    """Filtered S^vN along a grid; None from the first empty projection on."""
    values: List[Optional[float]] = []
    for p_min in grid:
        try:
            values.append(filtered_vn_entropy(state, part, float(p_min)))
        except EmptySelectionError:
            values.extend([None] * (len(grid) - len(values)))
            break
    return values


def entanglement_entropy(state: GroundState, part: Bipartition) -> float:
    return von_neumann_entropy(schmidt_spectrum(state, part))
