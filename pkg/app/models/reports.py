from pydantic import BaseModel
from typing import Any, Dict, List, Optional
from enum import Enum


class Verdict(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    CONSISTENT = "consistent"
    INCONSISTENT = "inconsistent"
    UNVERIFIABLE = "unverifiable-at-scale"
    REPORTED = "reported"
    REFUSED = "refused"


NEGATIVE_VERDICTS = (Verdict.FAIL, Verdict.INCONSISTENT)


class Provenance(str, Enum):
    COMPUTED = "computed"
    ESTIMATED = "estimated"
    USER_SUPPLIED = "user-supplied"
    ESTIMATED_LOWER_BOUND = "estimated-lower-bound"


class NumericRecord(BaseModel):
    op: str
    value: Optional[float]
    tol: float
    provenance: Provenance = Provenance.COMPUTED
    inputs_digest: Optional[str] = None


class CheckResult(BaseModel):
    condition: str
    verdict: Verdict
    heuristic: bool = False
    witness: Optional[Dict[str, Any]] = None
    detail: str = ""


class ValidationReport(BaseModel):
    checks: List[CheckResult] = []

    def verdict_of(self, condition: str) -> Verdict:
        for check in self.checks:
            if check.condition == condition:
                return check.verdict
        raise KeyError(condition)

    def check(self, condition: str) -> CheckResult:
        for check in self.checks:
            if check.condition == condition:
                return check
        raise KeyError(condition)

    @property
    def failed(self) -> bool:
        return any(check.verdict in NEGATIVE_VERDICTS for check in self.checks)


class CompanionReport(ValidationReport):
    label: str = ""
