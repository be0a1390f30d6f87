import numpy as np

from pydantic import BaseModel, ConfigDict
from typing import List, Optional
from enum import Enum


class SolverOutcome(str, Enum):
    CONVERGED = "converged"
    NOT_FOUND = "not-found"
    NOT_CONVERGED = "not-converged"
    DIVERGED = "diverged"
    GEOMETRY_VIOLATED = "geometry-violated"


class TraceEntry(BaseModel):
    iteration: int
    J: float
    grad_norm: float
    cerami: float
    step: float = 0.0


class SolverState(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    u: np.ndarray
    J: float
    grad: np.ndarray
    grad_norm: float
    residual: float
    trace: List[TraceEntry] = []
    outcome: SolverOutcome = SolverOutcome.CONVERGED
    detail: str = ""
    iterates: List[np.ndarray] = []
    scanned_t: Optional[List[float]] = None
    seed_energy: Optional[float] = None
    path_energies: Optional[List[float]] = None

    @property
    def converged(self) -> bool:
        return self.outcome == SolverOutcome.CONVERGED
