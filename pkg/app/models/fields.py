import numpy as np

from pydantic import BaseModel, ConfigDict, model_validator
from typing import Optional, Tuple

from app.errors import InputError


class SampledField(BaseModel):
    """
    Function values and quadrature weights on a truncated domain.

    points has shape (n, d); weights, values and the optional gradient
    magnitudes have shape (n,). Box grids also record their lattice shape and
    spacing.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    points: np.ndarray
    weights: np.ndarray
    values: np.ndarray
    gradient: Optional[np.ndarray] = None
    truncation_radius: float
    domain_measure: Optional[float] = None
    shape: Optional[Tuple[int, ...]] = None
    spacing: Optional[float] = None

    @model_validator(mode="after")
    def check_layout(self):
        if self.points.ndim != 2:
            raise InputError("points must be an (n, d) array")
        n = self.points.shape[0]
        for name in ("weights", "values"):
            if getattr(self, name).shape != (n,):
                raise InputError(f"{name} must have shape ({n},)")
        if self.gradient is not None and self.gradient.shape != (n,):
            raise InputError(f"gradient must have shape ({n},)")
        if np.any(self.weights <= 0):
            raise InputError("quadrature weights must be positive")
        if not np.all(np.isfinite(self.values)):
            raise InputError("field values must be finite")
        if self.domain_measure is not None:
            total = float(np.sum(self.weights))
            if abs(total - self.domain_measure) > 1e-10 * self.domain_measure:
                raise InputError(
                    f"weights sum to {total:.12g}, expected domain measure {self.domain_measure:.12g}"
                )
        return self

    @property
    def dimension(self) -> int:
        return self.points.shape[1]

    @property
    def size(self) -> int:
        return self.points.shape[0]

    @property
    def sup(self) -> float:
        return float(np.max(np.abs(self.values))) if self.size else 0.0

    def with_values(self, values: np.ndarray, gradient: Optional[np.ndarray] = None) -> "SampledField":
        return self.model_copy(update={"values": np.asarray(values, dtype=float), "gradient": gradient})

    def scaled(self, factor: float) -> "SampledField":
        gradient = None if self.gradient is None else abs(factor) * self.gradient
        return self.with_values(factor * self.values, gradient)

    def gradient_field(self) -> "SampledField":
        if self.gradient is None:
            raise InputError("field carries no gradient values")
        return self.with_values(self.gradient, None)

    def same_grid(self, other: "SampledField") -> bool:
        return (
            self.points.shape == other.points.shape
            and np.array_equal(self.points, other.points)
            and np.array_equal(self.weights, other.weights)
        )
