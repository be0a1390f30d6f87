"""
Evaluation of h, H, modulars, Luxemburg norms and the convex conjugate of a
double phase model.
"""

import logging
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np
from scipy import integrate, optimize

from app.config.config import QUAD_TOL
from app.core import numerics
from app.core.exponent_models import DoublePhaseModel
from app.errors import BracketError, InputError, QuadratureError
from app.models.fields import SampledField

logger = logging.getLogger(__name__)

ABS_FLOOR = 1e-14
MAX_BISECTIONS = 200
CACHE_SIZE = 4096


class NFunctionHandle:
    """
    Evaluator of the generalized N-function H(x,t) of a model.

    H is integrated in closed form on the panel [0, min(t,1)], where the
    exponents do not depend on t, and on [1,t] by adaptive vector quadrature
    when they do. The handle is immutable after construction; the optional
    cache is an lru_cache keyed on the raw (x, t) bytes.
    """

    def __init__(self, model: DoublePhaseModel, quad_tol: float = QUAD_TOL, cache: bool = False):
        self.model = model
        self.quad_tol = quad_tol
        self.cache = cache
        self._cached = lru_cache(maxsize=CACHE_SIZE)(self._eval_from_bytes) if cache else None

    def _broadcast(self, x, t) -> Tuple[np.ndarray, np.ndarray, tuple]:
        points = numerics.as_points(x, self.model.d)
        values = numerics.nonnegative(t)
        if points.shape[0] == 1:
            flat = values.reshape(-1)
            return np.repeat(points, flat.size, axis=0), flat, values.shape
        if values.ndim == 0:
            return points, np.full(points.shape[0], float(values)), (points.shape[0],)
        if values.shape != (points.shape[0],):
            raise InputError(f"{points.shape[0]} points but t has shape {values.shape}")
        return points, values, values.shape

    def _h(self, X: np.ndarray, T: np.ndarray) -> np.ndarray:
        p = self.model.p.eval(X, T)
        q = self.model.q.eval(X, T)
        return T ** (p - 1.0) + self.model.mu(X) * T ** (q - 1.0)

    def _H(self, X: np.ndarray, T: np.ndarray) -> np.ndarray:
        ones = np.ones(T.shape)
        p1 = self.model.p.eval(X, ones)
        q1 = self.model.q.eval(X, ones)
        mu = self.model.mu(X)
        if not self.model.t_dependent:
            return T ** p1 / p1 + mu * T ** q1 / q1

        low = np.minimum(T, 1.0)
        result = low ** p1 / p1 + mu * low ** q1 / q1
        upper = T > 1.0
        if np.any(upper):
            Xu, Tu = X[upper], T[upper]
            span = Tu - 1.0

            def integrand(theta):
                return span * self._h(Xu, 1.0 + theta * span)

            value, error, info = integrate.quad_vec(
                integrand, 0.0, 1.0, epsabs=ABS_FLOOR, epsrel=self.quad_tol, norm="max", full_output=True
            )
            if not info.success:
                raise QuadratureError("Quadrature of H on [1, t] did not converge", float(error))
            result[upper] += value
        return result

    def _eval_from_bytes(self, x_bytes: bytes, t_bytes: bytes, d: int) -> np.ndarray:
        X = np.frombuffer(x_bytes).reshape(-1, d)
        T = np.frombuffer(t_bytes)
        result = self._H(X, T)
        result.setflags(write=False)
        return result

    def h(self, x, t) -> np.ndarray:
        X, T, shape = self._broadcast(x, t)
        return self._h(X, T).reshape(shape)

    def eval_H(self, x, t) -> np.ndarray:
        """
        H(x,t) for t >= 0.

        Args:
            x: a point of shape (d,) or points of shape (n, d).
            t: nonnegative scalar or array matching the points.

        Returns:
            np.ndarray: H values with the broadcast shape.

        Raises:
            InputError: negative or non-finite t, or a dimension mismatch.
            QuadratureError: the [1, t] panel did not converge.
        """
        X, T, shape = self._broadcast(x, t)
        if self._cached is not None:
            X = np.ascontiguousarray(X, dtype=float)
            T = np.ascontiguousarray(T, dtype=float)
            return np.array(self._cached(X.tobytes(), T.tobytes(), self.model.d)).reshape(shape)
        return self._H(X, T).reshape(shape)

    def ratio(self, x, t) -> np.ndarray:
        """h(x,t) t / H(x,t) for t > 0."""
        return self.h(x, t) * np.asarray(t) / self.eval_H(x, t)

    def _check_field(self, u: SampledField):
        if u.dimension != self.model.d:
            raise InputError(f"field of dimension {u.dimension} does not match model dimension {self.model.d}")

    def _field_weights(self, u: SampledField, weight_by_V: bool) -> np.ndarray:
        return u.weights * self.model.V(u.points) if weight_by_V else u.weights

    def modular(self, u: SampledField, weight_by_V: bool = False) -> float:
        """Sum of w_i [V(x_i)] H(x_i, |u_i|)."""
        self._check_field(u)
        weights = self._field_weights(u, weight_by_V)
        return float(np.sum(weights * self._H(u.points, np.abs(u.values))))

    def luxemburg_norm(self, u: SampledField, weight_by_V: bool = False) -> float:
        """
        The unique lam > 0 with modular(u / lam) = 1.

        Raises:
            BracketError: the bracket could not be expanded around the root.
        """
        self._check_field(u)
        weights = self._field_weights(u, weight_by_V)
        magnitude = np.abs(u.values)
        return numerics.luxemburg(
            lambda s: float(np.sum(weights * self._H(u.points, s * magnitude))), u.sup
        )

    def conjugate_argmax(self, x, s) -> np.ndarray:
        """tau* with h(x, tau*) = s, by vectorized monotone bisection."""
        X, S, shape = self._broadcast(x, s)
        low = np.zeros_like(S)
        high = np.maximum(S, 1.0)
        for _ in range(numerics.MAX_BRACKET_EXPANSIONS):
            short = self._h(X, high) < S
            if not np.any(short):
                break
            high = np.where(short, 2.0 * high, high)
        else:
            raise BracketError("Conjugate bracket expansion failed", (0.0, float(np.max(high))))
        for _ in range(MAX_BISECTIONS):
            mid = 0.5 * (low + high)
            below = self._h(X, mid) < S
            low = np.where(below, mid, low)
            high = np.where(below, high, mid)
            if np.all(high - low <= 1e-15 * high):
                break
        tau = 0.5 * (low + high)
        tau[S == 0] = 0.0
        return tau.reshape(shape)

    def conjugate(self, x, s) -> np.ndarray:
        """H~(x,s) = s tau* - H(x,tau*)."""
        X, S, shape = self._broadcast(x, s)
        tau = self.conjugate_argmax(X, S)
        return (S * tau - self._H(X, tau)).reshape(shape)

    def young_gap(self, x, tau, sigma) -> np.ndarray:
        X, T, shape = self._broadcast(x, tau)
        _, S, _ = self._broadcast(X, np.broadcast_to(sigma, T.shape))
        return (self._H(X, T) + self.conjugate(X, S) - T * S).reshape(shape)

    def conjugate_slope(self, x, s, rel_step: float = 1e-5) -> np.ndarray:
        """h~(x,s) by central differences of the conjugate."""
        X, S, shape = self._broadcast(x, s)
        return numerics.central_difference(lambda v: self.conjugate(X, v), S, rel_step).reshape(shape)

    def conjugate_ratio(self, x, s) -> np.ndarray:
        X, S, shape = self._broadcast(x, s)
        return (self.conjugate_slope(X, S) * S / self.conjugate(X, S)).reshape(shape)

    def conjugate_bound(self, x, s) -> Tuple[np.ndarray, np.ndarray]:
        """(H~(x, h(x,s)), (q^+ - 1) H(x,s)); the first never exceeds the second."""
        X, S, shape = self._broadcast(x, s)
        lhs = self.conjugate(X, self._h(X, S))
        rhs = (self.model.q_plus - 1.0) * self._H(X, S)
        return lhs.reshape(shape), rhs.reshape(shape)

    def biconjugate(self, x, t) -> float:
        """sup over s of (t s - H~(x,s)), by bounded scalar maximization."""
        point = numerics.as_points(x, self.model.d)[:1]
        t = float(t)
        if t == 0:
            return 0.0
        top = 2.0 * float(self._h(point, np.array([t]))[0]) + 1.0
        result = optimize.minimize_scalar(
            lambda s: float(self.conjugate(point, np.array([s]))[0]) - t * s,
            bounds=(0.0, top),
            method="bounded",
            options={"xatol": 1e-12 * top, "maxiter": 500},
        )
        return float(-result.fun)

    def conjugate_modular(self, v: SampledField, weight_by_V: bool = False) -> float:
        self._check_field(v)
        weights = self._field_weights(v, weight_by_V)
        return float(np.sum(weights * self.conjugate(v.points, np.abs(v.values))))

    def conjugate_norm(self, v: SampledField, weight_by_V: bool = False) -> float:
        """Luxemburg norm of v against the conjugate modular."""
        self._check_field(v)
        return numerics.luxemburg(lambda s: self.conjugate_modular(v.scaled(s), weight_by_V), v.sup)

    def holder_pair(self, u: SampledField, v: SampledField) -> Tuple[float, float]:
        """(|sum w u v|, 2 ||u||_H ||v||_H~) for a pair on the same grid."""
        if not u.same_grid(v):
            raise InputError("Hoelder pair must share one grid")
        lhs = abs(float(np.sum(u.weights * u.values * v.values)))
        return lhs, 2.0 * self.luxemburg_norm(u) * self.conjugate_norm(v)

    def aux1_bracket(self, measure: float) -> Tuple[float, float]:
        """
        Bounds for the norm of the characteristic function of a set of given measure.

        Uses C1 = 1/p^+ <= H(x,1) and C2 = (1 + ||mu||)/p^- >= H(x,1).
        """
        model = self.model
        c1 = measure / model.p_plus
        c2 = measure * (1.0 + model.mu_sup) / model.p_minus
        lower = min(c1 ** (1.0 / model.p_minus), c1 ** (1.0 / model.q_plus))
        upper = max(c2 ** (1.0 / model.p_minus), c2 ** (1.0 / model.q_plus))
        return lower, upper

    def characteristic_norm(self, measure: float, center: Optional[np.ndarray] = None) -> float:
        """Norm of the characteristic function of a set of given measure lumped at center."""
        point = np.zeros((1, self.model.d)) if center is None else numerics.as_points(center, self.model.d)
        field = SampledField(
            points=point, weights=np.array([measure]), values=np.ones(1), truncation_radius=0.0
        )
        return self.luxemburg_norm(field)
