from pydantic import BaseModel
from typing import List, Optional, Tuple

from app.models.reports import Provenance


class Certificate(BaseModel):
    x0: List[float]
    radius: float
    eta: float
    r: float
    omega_R: float
    V_inf: float
    delta: float
    gamma_bar: float
    gamma_provenance: Provenance
    alpha_r: float
    beta_eta: float
    integral_F: float
    cond_318: bool
    cond_H1: bool
    cond_H2: bool
    Lambda: Optional[Tuple[float, float]] = None
    admissible: bool
    rho_tilde_u: float
    rho_bound: float
    rho_below_r: bool


class FeasibilityReport(BaseModel):
    feasible: bool
    best: Optional[Certificate] = None
    least_violated: Optional[Certificate] = None
    violation_gap: float
    eta_bounds: Tuple[float, float]
    r_bounds: Tuple[float, float]
    grid: int
