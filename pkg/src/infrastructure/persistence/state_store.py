"""
Binary cache for ground-state vectors.

File layout: 16-byte header (8-byte magic, uint32 n_atoms, uint32 flags)
followed by 2^n_atoms little-endian float64 amplitudes. Energy, gap and
solver provenance live in a JSON sidecar next to the vector.
"""

import hashlib
import json
import struct
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple

import numpy as np

from src.domain.entities.states import GroundState
from src.infrastructure.persistence.files import atomic_write_bytes, write_json
from src.shared.errors import ValidationError
from src.shared.logging import get_logger

logger = get_logger(__name__)

MAGIC = b"RYDLADGS"
HEADER = struct.Struct("<8sII")

FLAG_CONVERGED = 1
FLAG_DEGENERATE = 2
FLAG_DENSE = 4


def _flags(state: GroundState) -> int:
    flags = 0
    if state.converged:
        flags |= FLAG_CONVERGED
    if state.degenerate:
        flags |= FLAG_DEGENERATE
    if state.solver == "dense":
        flags |= FLAG_DENSE
    return flags


def save_ground_state(path: Path, state: GroundState, provenance: Optional[Mapping[str, Any]] = None) -> Path:
    header = HEADER.pack(MAGIC, state.n_atoms, _flags(state))
    payload = header + np.asarray(state.amplitudes, dtype="<f8").tobytes()
    target = atomic_write_bytes(Path(path), payload)
    write_json(
        sidecar_path(target),
        {
            "energy": state.energy,
            "gap": state.gap,
            "residual_norm": state.residual_norm,
            "iterations": state.iterations,
            "solver": state.solver,
            "provenance": dict(provenance or {}),
        },
    )
    return target


def sidecar_path(path: Path) -> Path:
    return Path(path).with_suffix(".json")


def load_ground_state(path: Path) -> Tuple[GroundState, Dict[str, Any]]:
    """
    Read a cached vector and its sidecar.

    Raises:
        ValidationError: wrong magic or truncated payload
    """
    raw = Path(path).read_bytes()
    if len(raw) < HEADER.size:
        raise ValidationError(f"{path}: file shorter than the state header")
    magic, n_atoms, flags = HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise ValidationError(f"{path}: not a ground-state file")
    amplitudes = np.frombuffer(raw, dtype="<f8", offset=HEADER.size).astype(np.float64)
    if amplitudes.size != 1 << n_atoms:
        raise ValidationError(f"{path}: expected {1 << n_atoms} amplitudes, found {amplitudes.size}")

    meta = json.loads(sidecar_path(path).read_text(encoding="utf-8"))
    state = GroundState(
        amplitudes=amplitudes,
        n_atoms=int(n_atoms),
        energy=float(meta["energy"]),
        gap=float(meta["gap"]),
        converged=bool(flags & FLAG_CONVERGED),
        residual_norm=float(meta["residual_norm"]),
        degenerate=bool(flags & FLAG_DEGENERATE),
        solver="dense" if flags & FLAG_DENSE else "krylov",
        iterations=int(meta.get("iterations", 0)),
    )
    return state, meta.get("provenance", {})


class GroundStateStore:
    """Content-addressed cache keyed by the solve parameters."""

    def __init__(self, cache_dir: Path):
        self.cache_dir = Path(cache_dir)

    def key_for(self, parameters: Mapping[str, Any]) -> str:
        canonical = json.dumps({key: parameters[key] for key in sorted(parameters)}, sort_keys=True)
        digest = hashlib.sha1(canonical.encode("utf-8")).hexdigest()[:12]
        return f"gs_r{parameters['n_rungs']}_{digest}"

    def path_for(self, parameters: Mapping[str, Any]) -> Path:
        return self.cache_dir / f"{self.key_for(parameters)}.bin"

    def load(self, parameters: Mapping[str, Any]) -> Optional[GroundState]:
        path = self.path_for(parameters)
        if not path.exists() or not sidecar_path(path).exists():
            return None
        state, _ = load_ground_state(path)
        logger.info("ground_state_cache_hit", path=str(path))
        return state

    def save(self, parameters: Mapping[str, Any], state: GroundState) -> Path:
        path = save_ground_state(self.path_for(parameters), state, parameters)
        logger.info("ground_state_cached", path=str(path))
        return path
