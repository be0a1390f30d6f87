from pydantic import BaseModel
from typing import List, Optional
from enum import Enum

from app.models.reports import ValidationReport


class TrendVerdict(str, Enum):
    DIVERGENT = "divergent"
    BOUNDED = "bounded"
    NON_VANISHING = "non-vanishing"
    LIONS_CONSISTENT = "lions-consistent"
    LIONS_INCONSISTENT = "lions-inconsistent"
    CONSISTENT = "consistent"
    INCONSISTENT = "inconsistent"
    REFUSED = "refused"


NEGATIVE_TRENDS = (TrendVerdict.LIONS_INCONSISTENT, TrendVerdict.INCONSISTENT)


class RatioScan(BaseModel):
    target: str
    family: str
    indices: List[int] = []
    sobolev_norms: List[float] = []
    target_norms: List[float] = []
    ratios: List[float] = []
    skipped: List[int] = []
    kendall_tau: float = 0.0
    growth_rate: Optional[float] = None
    verdict: TrendVerdict = TrendVerdict.BOUNDED


class LionsReport(BaseModel):
    family: str
    companion: str
    radius: float
    indices: List[int] = []
    ball_sup: List[float] = []
    companion_norms: List[float] = []
    sobolev_norms: List[float] = []
    weak_pairings: List[float] = []
    weakly_null: bool = False
    verdict: TrendVerdict = TrendVerdict.NON_VANISHING


class BrezisLiebReport(BaseModel):
    gaps: List[float] = []
    verdict: TrendVerdict = TrendVerdict.CONSISTENT


class CompactnessReport(BaseModel):
    family: str
    ratios: List[float] = []
    verdict: TrendVerdict = TrendVerdict.CONSISTENT
    detail: str = ""


class ModularRelationReport(ValidationReport):
    modular: float = 0.0
    norm: float = 0.0
    lower: float = 0.0
    upper: float = 0.0
    scalings: List[float] = []
    scaled_modulars: List[float] = []
    scaled_norms: List[float] = []
