from pydantic import BaseModel, Field
from typing import List, Optional
from enum import Enum


class ModelFamily(str, Enum):
    CONSTANT = "constant"
    LOG_SATURATING = "log_saturating"
    X_MODULATED = "x_modulated"


class WeightKind(str, Enum):
    CONSTANT = "constant"
    DECAYING = "decaying"


class NonlinearityKind(str, Enum):
    ZERO = "zero"
    LOG_SUPERLINEAR = "log_superlinear"
    POWER = "power"
    SATURATED_WELL = "saturated_well"


class FamilyKind(str, Enum):
    TRANSLATING_BUMP = "translating-bump"
    SPREADING_BUMP = "spreading-bump"
    RADIAL_BUMP = "radial-bump"
    TENT = "tent"
    GAUSSIAN_LIKE = "gaussian-like"


class CompanionKind(str, Enum):
    POWER = "power"
    H = "H"
    H_STAR = "H*"


class ModelParams(BaseModel):
    d: int = Field(3, ge=1)
    p: float = 2.0
    q: float = 2.5
    p_t_amplitude: float = Field(0.0, ge=0)
    q_t_amplitude: float = Field(0.0, ge=0)
    p_x_amplitude: float = Field(0.0, ge=0)
    q_x_amplitude: float = Field(0.0, ge=0)
    x_scale: float = Field(1.0, gt=0)
    mu: float = Field(1.0, ge=0)
    weight: WeightKind = WeightKind.CONSTANT
    v0: float = 1.0
    v2: float = Field(1.0, ge=0)


class ModelConfig(ModelParams):
    catalog: ModelFamily = ModelFamily.CONSTANT
    strict: bool = True


class NonlinearityConfig(BaseModel):
    kind: NonlinearityKind = NonlinearityKind.LOG_SUPERLINEAR
    exponent: Optional[float] = None
    c_b: Optional[float] = None
    b_minus: Optional[float] = None
    b_plus: Optional[float] = None
    sigma: Optional[float] = None
    c_tilde: float = Field(50.0, gt=0)
    r0: Optional[float] = None
    well_depth: float = Field(10.0, ge=0)
    well_eps: float = Field(1e-3, gt=0)


class SamplingConfig(BaseModel):
    radii: int = Field(64, ge=2)
    directions: int = Field(32, ge=1)
    t_values: int = Field(64, ge=8)
    radius: float = Field(8.0, gt=0)
    t_max: float = Field(1e6, gt=1)
    t_min: float = Field(1e-4, gt=0)
    monte_carlo: int = Field(4096, ge=64)
    seed: Optional[int] = None


class FieldConfig(BaseModel):
    """A sampled field fixture: a constant value on a set of given measure or a ball."""

    value: float = 1.0
    measure: Optional[float] = None
    ball_radius: float = Field(1.0, gt=0)
    shells: int = Field(256, ge=4)
    weight_by_v: bool = False


class CompanionConfig(BaseModel):
    kind: CompanionKind = CompanionKind.POWER
    exponent: float = 3.0
    scale: float = Field(1.0, gt=0)


class CertificateConfig(BaseModel):
    x0: Optional[List[float]] = None
    radius: float = Field(1.0, gt=0)
    eta: float = Field(1.0, gt=0)
    r: float = Field(25.0, gt=0)
    gamma_bar: Optional[float] = Field(None, gt=0)
    gamma: Optional[float] = Field(None, gt=0)
    eta_bounds: List[float] = [1e-2, 1e2]
    r_bounds: List[float] = [1e-1, 1e4]
    grid: int = Field(64, ge=2)


class ProbeKind(str, Enum):
    RATIO = "ratio"
    LIONS = "lions"
    BREZIS_LIEB = "brezis-lieb"
    COMPACTNESS = "compactness"
    MODULAR = "modular"


class ProbeConfig(BaseModel):
    kind: ProbeKind = ProbeKind.LIONS
    family: FamilyKind = FamilyKind.SPREADING_BUMP
    count: int = Field(16, ge=1)
    scale: float = Field(1.0, gt=0)
    growth: float = Field(1.25, gt=0)
    amplitude_power: float = 1.5
    lions_radius: float = Field(1.0, gt=0)
    target: str = "H*"
    lebesgue_exponent: Optional[float] = None
    shells: int = Field(128, ge=8)
    truncation_radius: float = Field(8.0, gt=0)
    spacing: float = Field(0.25, gt=0)


class SolverConfig(BaseModel):
    lam: float = Field(3.0, gt=0)
    shells: int = Field(64, ge=8)
    r_max: float = Field(4.0, gt=0)
    seed_radius: float = Field(2.0, gt=0)
    max_iter: int = Field(5000, ge=1)
    beads: int = Field(32, ge=4)
    string_shells: Optional[int] = Field(64, ge=8)
    sweeps: int = Field(400, ge=1)
    tol: float = Field(1e-7, gt=0)
    saddle_tol: float = Field(1e-5, gt=0)
    mountain_pass: bool = True
    seed_from_certificate: bool = False
    refinement_check: bool = False


class RunConfig(BaseModel):
    version: int = 1
    model: ModelConfig = ModelConfig()
    nonlinearity: Optional[NonlinearityConfig] = None
    sampling: SamplingConfig = SamplingConfig()
    field: FieldConfig = FieldConfig()
    companion: CompanionConfig = CompanionConfig()
    certificate: CertificateConfig = CertificateConfig()
    probe: ProbeConfig = ProbeConfig()
    solver: SolverConfig = SolverConfig()
    x: Optional[List[float]] = None
    t: List[float] = [0.0, 0.5, 1.0, 2.0]
