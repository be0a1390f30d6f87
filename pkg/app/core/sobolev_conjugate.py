"""
Sobolev conjugate H_* of the model N-function and the companion checks of
the embedding theorems.

H is replaced below t = 1 by its asymptotic form built from the declared
limits p_inf, q_inf, mu_inf; the result is called H circ. N is tabulated per
radial key on a geometric grid and inverted by a safeguarded Newton iteration.
"""

import logging
import threading
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Tuple

import numpy as np
from scipy import integrate
from scipy.interpolate import PchipInterpolator

from app.config.config import SOBOLEV_PER_DECADE
from app.core import numerics
from app.core.exponent_models import critical_exponent
from app.core.nfunction_engine import NFunctionHandle
from app.errors import InputError, QuadratureError
from app.models.catalog import SamplingConfig
from app.models.reports import CheckResult, CompanionReport, Verdict

logger = logging.getLogger(__name__)

GAUSS_NODES, GAUSS_WEIGHTS = np.polynomial.legendre.leggauss(8)
TABLE_LIMITS = (1e-30, 1e30)
NEWTON_ITERATIONS = 60
LADDER_KS = (0.5, 1.0, 2.0, 10.0)
SLOPE_SLACK = 1e-3


@dataclass(frozen=True)
class NTable:
    t: np.ndarray
    integral: np.ndarray
    guess: PchipInterpolator


class SobolevConjugateHandle:
    def __init__(self, base: NFunctionHandle, tol: float = 1e-7, per_decade: int = SOBOLEV_PER_DECADE,
                 t_range: Tuple[float, float] = (1e-6, 1e6)):
        self.base = base
        self.model = base.model
        self.tol = tol
        self.per_decade = per_decade
        self.t_range = t_range
        self._tables: Dict[float, NTable] = {}
        self._lock = threading.Lock()
        if self.model.p_plus >= self.model.d:
            raise InputError("The Sobolev conjugate needs p^+ < d")

    @property
    def p_star(self) -> float:
        return critical_exponent(self.model.p_minus, self.model.d)

    @property
    def q_star(self) -> float:
        return critical_exponent(self.model.q_plus, self.model.d)

    def _key(self, x) -> float:
        return round(float(numerics.radii(numerics.as_points(x, self.model.d))[0]), 12)

    def _point(self, key: float) -> np.ndarray:
        point = np.zeros((1, self.model.d))
        point[0, 0] = key
        return point

    def hcirc(self, x, t) -> np.ndarray:
        """H circ: the asymptotic power form below 1 and H itself from 1 on."""
        X, T, shape = self.base._broadcast(x, t)
        model = self.model
        result = T ** model.p_inf / model.p_inf + model.mu_inf * T ** model.q_inf / model.q_inf
        upper = T >= 1.0
        if np.any(upper):
            result[upper] = self.base.eval_H(X[upper], T[upper])
        return result.reshape(shape)

    def _regular_part(self, tau: np.ndarray) -> np.ndarray:
        """(tau^{p_inf} / H circ(tau))^{1/(d-1)} on (0, 1)."""
        model = self.model
        inverse = 1.0 / model.p_inf + (model.mu_inf / model.q_inf) * tau ** (model.q_inf - model.p_inf)
        return (1.0 / inverse) ** (1.0 / (model.d - 1))

    def _integrand(self, point: np.ndarray, tau: np.ndarray) -> np.ndarray:
        tau = np.asarray(tau, dtype=float)
        hc = self.hcirc(point, tau.reshape(-1)).reshape(tau.shape)
        return (tau / hc) ** (1.0 / (self.model.d - 1))

    def _singular_integral(self, t: float) -> float:
        """Integral of the N integrand on [0, t], t <= 1, with an algebraic weight at 0."""
        if t == 0:
            return 0.0
        alpha = -(self.model.p_inf - 1.0) / (self.model.d - 1)
        value, error = integrate.quad(
            lambda s: float(self._regular_part(np.array(s * t))), 0.0, 1.0,
            weight="alg", wvar=(alpha, 0.0), epsabs=1e-15, epsrel=1e-13, limit=200,
        )
        # substituting tau = t s
        scale = t ** (alpha + 1.0)
        if error > max(self.tol, 1e-10) * abs(value):
            raise QuadratureError("Singular panel of N did not converge", error * scale)
        return value * scale

    def _regular_integral(self, point: np.ndarray, a: float, b: float) -> float:
        if b <= a:
            return 0.0
        value, error = integrate.quad(
            lambda s: float(self._integrand(point, np.array([s]))[0]), a, b,
            epsabs=1e-15, epsrel=1e-12, limit=400,
        )
        if error > max(self.tol, 1e-10) * max(abs(value), 1e-300):
            raise QuadratureError("Regular panel of N did not converge", error)
        return value

    def eval_N(self, x, t) -> np.ndarray:
        """
        N(x,t) = (integral_0^t (tau / H circ(x,tau))^{1/(d-1)} dtau)^{(d-1)/d}, by direct quadrature.

        Raises:
            QuadratureError: a panel did not reach the tolerance.
        """
        X, T, shape = self.base._broadcast(x, t)
        exponent = (self.model.d - 1.0) / self.model.d
        out = np.empty(T.shape)
        for i, (point, value) in enumerate(zip(X, T)):
            point = point.reshape(1, -1)
            total = self._singular_integral(min(value, 1.0))
            total += self._regular_integral(point, 1.0, value)
            out[i] = total ** exponent
        return out.reshape(shape)

    def _increments(self, point: np.ndarray, t: np.ndarray) -> np.ndarray:
        """8-point Gauss-Legendre integrals over consecutive table intervals."""
        a, b = t[:-1], t[1:]
        half = 0.5 * (b - a)
        mid = 0.5 * (b + a)
        nodes = mid[:, None] + half[:, None] * GAUSS_NODES[None, :]
        values = self._integrand(point, nodes)
        return half * (values @ GAUSS_WEIGHTS)

    def _build_table(self, key: float, t_low: float, t_high: float) -> NTable:
        point = self._point(key)
        decades_low = int(np.floor(np.log10(t_low)))
        decades_high = int(np.ceil(np.log10(t_high)))
        t = np.logspace(decades_low, decades_high, (decades_high - decades_low) * self.per_decade + 1)
        if decades_low <= 0 <= decades_high:
            # t = 1 is a node so no Gauss panel straddles the switch of H circ
            t[-decades_low * self.per_decade] = 1.0
        if t[0] <= 1.0:
            start = self._singular_integral(t[0])
        else:
            start = self._singular_integral(1.0) + self._regular_integral(point, 1.0, t[0])
        integral = start + np.concatenate([[0.0], np.cumsum(self._increments(point, t))])
        if np.any(np.diff(integral) <= 0):
            raise QuadratureError("N tabulation lost strict monotonicity", 0.0)
        guess = PchipInterpolator(np.log(integral), np.log(t))
        logger.debug("Tabulated N at |x|=%g on [%g, %g] with %d nodes", key, t[0], t[-1], t.size)
        return NTable(t=t, integral=integral, guess=guess)

    def _table(self, key: float, low_ok: Optional[Callable[[NTable], bool]] = None,
               high_ok: Optional[Callable[[NTable], bool]] = None) -> NTable:
        """The table for key, extended by factors of 1e3 until both coverage predicates hold."""

        def covered(table: NTable) -> bool:
            return (low_ok is None or low_ok(table)) and (high_ok is None or high_ok(table))

        table = self._tables.get(key)
        if table is not None and covered(table):
            return table
        with self._lock:
            table = self._tables.get(key)
            if table is None:
                table = self._build_table(key, *self.t_range)
            t_low, t_high = table.t[0], table.t[-1]
            while not covered(table):
                if low_ok is not None and not low_ok(table):
                    t_low /= 1e3
                if high_ok is not None and not high_ok(table):
                    t_high *= 1e3
                if t_low < TABLE_LIMITS[0] or t_high > TABLE_LIMITS[1]:
                    raise InputError("N table extension left the supported range")
                table = self._build_table(key, t_low, t_high)
            self._tables[key] = table
        return table

    def tabulated_N(self, x, t) -> np.ndarray:
        """N read from the table: Gauss-Legendre from the nearest lower node."""
        key = self._key(x)
        t = numerics.nonnegative(t)
        flat = t.reshape(-1)
        positive = flat[flat > 0]
        if not positive.size:
            return np.zeros(t.shape)
        table = self._table(
            key,
            low_ok=lambda tb: tb.t[0] <= positive.min(),
            high_ok=lambda tb: tb.t[-1] >= positive.max(),
        )
        point = self._point(key)
        out = np.zeros(flat.shape)
        for i, value in enumerate(flat):
            if value > 0:
                out[i] = self._integral_at(table, point, value)
        return (out ** ((self.model.d - 1.0) / self.model.d)).reshape(t.shape)

    def _integral_at(self, table: NTable, point: np.ndarray, t: float) -> float:
        i = int(np.clip(np.searchsorted(table.t, t) - 1, 0, table.t.size - 2))
        return float(table.integral[i] + self._increments(point, np.array([table.t[i], t]))[0])

    def inverse_N(self, x, y) -> np.ndarray:
        """N^{-1}(x,y): PCHIP initial guess, then Newton safeguarded by the table bracket."""
        key = self._key(x)
        y = numerics.nonnegative(y)
        flat = y.reshape(-1)
        targets = flat ** (self.model.d / (self.model.d - 1.0))
        positive = targets[targets > 0]
        if not positive.size:
            return np.zeros(y.shape)
        table = self._table(
            key,
            low_ok=lambda tb: tb.integral[0] <= positive.min(),
            high_ok=lambda tb: tb.integral[-1] >= positive.max(),
        )
        point = self._point(key)
        out = np.zeros(flat.shape)
        for i, target in enumerate(targets):
            if target > 0:
                out[i] = self._invert(table, point, target)
        return out.reshape(y.shape)

    def _invert(self, table: NTable, point: np.ndarray, target: float) -> float:
        j = int(np.clip(np.searchsorted(table.integral, target), 1, table.t.size - 1))
        low, high = table.t[j - 1], table.t[j]
        t = float(np.clip(np.exp(table.guess(np.log(target))), low, high))
        for _ in range(NEWTON_ITERATIONS):
            residual = self._integral_at(table, point, t) - target
            if abs(residual) <= 1e-14 * target:
                return t
            if residual > 0:
                high = t
            else:
                low = t
            slope = float(self._integrand(point, np.array([t]))[0])
            step = t - residual / slope if slope > 0 else 0.5 * (low + high)
            if not low < step < high:
                step = 0.5 * (low + high)
            if abs(step - t) <= 1e-15 * t:
                return step
            t = step
        relative = abs(self._integral_at(table, point, t) - target) / target
        if relative > self.tol:
            raise QuadratureError("N inversion missed the tolerance", relative)
        return t

    def eval_H_star(self, x, t) -> np.ndarray:
        """H_*(x,t) = H circ(x, N^{-1}(x,t))."""
        s = self.inverse_N(x, t)
        flat = s.reshape(-1)
        point = self._point(self._key(x))
        return self.hcirc(point, flat).reshape(s.shape)

    def eval_H_star_points(self, x, t) -> np.ndarray:
        """H_* at many points: one table per distinct radius, a single one when p, q and mu ignore x."""
        X, T, shape = self.base._broadcast(x, t)
        if self.model.x_homogeneous:
            return self.eval_H_star(X[0], T).reshape(shape)
        keys = np.round(numerics.radii(X), 12)
        out = np.empty(T.shape)
        for key in np.unique(keys):
            mask = keys == key
            out[mask] = self.eval_H_star(self._point(float(key))[0], T[mask])
        return out.reshape(shape)

    def h_star(self, x, t) -> np.ndarray:
        """Derivative of H_* by central differences with step 1e-5 t."""
        return numerics.central_difference(lambda v: self.eval_H_star(x, v), t)

    def star_ratio(self, x, t) -> np.ndarray:
        return self.h_star(x, t) * np.asarray(t) / self.eval_H_star(x, t)

    def tabulate(self, x, ts) -> np.ndarray:
        """Rows (t, N, H_*) for export."""
        ts = np.asarray(ts, dtype=float)
        return np.column_stack([ts, self.tabulated_N(x, ts), self.eval_H_star(x, ts)])


@dataclass(frozen=True)
class CompanionFunction:
    """
    A generalized N-function V(x,t) with declared ratio bounds v^-, v^+ and
    bounds C1 <= V(x,1) <= C2.
    """

    evaluate: Callable[[np.ndarray, np.ndarray], np.ndarray]
    v_minus: float
    v_plus: float
    c1: float
    c2: float
    label: str

    @classmethod
    def power(cls, exponent: float, scale: float = 1.0) -> "CompanionFunction":
        return cls(
            evaluate=lambda x, t: scale * np.asarray(t, dtype=float) ** exponent,
            v_minus=exponent, v_plus=exponent, c1=scale, c2=scale, label=f"t^{exponent:g}",
        )

    @classmethod
    def from_nfunction(cls, handle: NFunctionHandle) -> "CompanionFunction":
        model = handle.model
        return cls(
            evaluate=handle.eval_H, v_minus=model.p_minus, v_plus=model.q_plus,
            c1=1.0 / model.p_plus, c2=(1.0 + model.mu_sup) / model.p_minus, label="H",
        )

    @classmethod
    def from_sobolev(cls, sobolev: SobolevConjugateHandle, probe_radii=(0.0, 1.0, 4.0)) -> "CompanionFunction":
        at_one = [float(sobolev.eval_H_star(_on_axis(sobolev.model.d, r), 1.0)) for r in probe_radii]
        return cls(
            evaluate=sobolev.eval_H_star_points, v_minus=sobolev.p_star, v_plus=sobolev.q_star,
            c1=min(at_one) * (1 - 1e-9), c2=max(at_one) * (1 + 1e-9), label="H*",
        )

    @classmethod
    def composed_power(cls, handle: NFunctionHandle, exponent: float) -> "CompanionFunction":
        """R(H) with R(t) = t^exponent."""
        model = handle.model
        return cls(
            evaluate=lambda x, t: handle.eval_H(x, t) ** exponent,
            v_minus=exponent * model.p_minus, v_plus=exponent * model.q_plus,
            c1=(1.0 / model.p_plus) ** exponent, c2=((1.0 + model.mu_sup) / model.p_minus) ** exponent,
            label=f"H^{exponent:g}",
        )


def _on_axis(d: int, r: float) -> np.ndarray:
    point = np.zeros(d)
    point[0] = r
    return point


def _slower_than_star(sobolev: SobolevConjugateHandle, comp: CompanionFunction, point, tail: np.ndarray) -> dict:
    """Fitted log-log slopes of V(x,kt)/H_*(x,t) over the tail ladder, per k."""
    star = sobolev.eval_H_star(point, tail)
    return {k: numerics.loglog_slope(tail, comp.evaluate(point, k * tail) / star) for k in LADDER_KS}


def companion_check(sobolev: SobolevConjugateHandle, comp: CompanionFunction,
                    sampling: Optional[SamplingConfig] = None) -> CompanionReport:
    """
    Verdicts for the companion conditions of the embedding theorems.

    Limit conditions are ladder heuristics and flagged as such.

    Args:
        sobolev (SobolevConjugateHandle): H_* of the model.
        comp (CompanionFunction): the candidate V.
        sampling (Optional[SamplingConfig]): radius and t range of the ladders.

    Returns:
        CompanionReport: verdicts for bf, cA, <<, mla1b, mla1, mla2 and the Lemma Aux candidate.
    """
    sampling = sampling or SamplingConfig()
    handle = sobolev.base
    model = sobolev.model
    d = model.d
    checks = []
    radii = np.linspace(0.0, min(sampling.radius, 4.0), 4)
    points = [_on_axis(d, r) for r in radii]

    at_one = np.array([float(comp.evaluate(p, 1.0)) for p in points])
    checks.append(CheckResult(
        condition="(bf)",
        verdict=Verdict.PASS if np.all((comp.c1 <= at_one) & (at_one <= comp.c2)) else Verdict.FAIL,
        witness={"V(x,1)": at_one.tolist(), "C1": comp.c1, "C2": comp.c2},
    ))

    ts = np.geomspace(max(sampling.t_min, 1e-4), min(sampling.t_max, 1e4), 41)
    ratios = []
    for p in points:
        V = comp.evaluate(p, ts)
        ratios.append(numerics.central_difference(lambda v: comp.evaluate(p, v), ts) * ts / V)
    ratios = np.concatenate(ratios)
    ok = comp.v_minus > 1 and np.all(ratios >= comp.v_minus - 1e-4) and np.all(ratios <= comp.v_plus + 1e-4)
    checks.append(CheckResult(
        condition="(cA)",
        verdict=Verdict.PASS if ok else Verdict.FAIL,
        witness={"min_ratio": float(ratios.min()), "max_ratio": float(ratios.max()),
                 "v_minus": comp.v_minus, "v_plus": comp.v_plus},
    ))

    tail = np.geomspace(1e2, min(sampling.t_max, 1e4), 17)
    slopes = [_slower_than_star(sobolev, comp, p, tail) for p in points]
    worst = max(max(s.values()) for s in slopes)
    checks.append(CheckResult(
        condition="(<<)", heuristic=True,
        verdict=Verdict.CONSISTENT if worst < -SLOPE_SLACK else Verdict.INCONSISTENT,
        witness={"max_slope": worst, "k": list(LADDER_KS)},
        detail="slope of log V(x,kt)/H_*(x,t) over the tail ladder must be negative",
    ))

    small = np.geomspace(max(sampling.t_min, 1e-8), 1e-1, 15)
    small_slopes = [
        numerics.loglog_slope(small, comp.evaluate(p, small) / handle.eval_H(p, small)) for p in points
    ]
    checks.append(CheckResult(
        condition="(mla1b)", heuristic=True,
        verdict=Verdict.PASS if min(small_slopes) > SLOPE_SLACK else Verdict.FAIL,
        witness={"min_slope": min(small_slopes)},
        detail="V/H -> 0 as t -> 0, read from the small-t slope",
    ))
    checks.append(CheckResult(
        condition="(mla1)", heuristic=True,
        verdict=Verdict.PASS if min(small_slopes) >= -SLOPE_SLACK else Verdict.FAIL,
        witness={"min_slope": min(small_slopes)},
        detail="limsup V/H < infinity as t -> 0, read from the small-t slope",
    ))

    unit = np.geomspace(max(sampling.t_min, 1e-6), 1.0, 25)
    found = None
    for a in np.linspace(0.05, 0.95, 19):
        if all(
            np.all(comp.evaluate(p, unit) <= handle.eval_H(p, unit) ** a
                   * sobolev.eval_H_star(p, unit) ** (1 - a) * (1 + 1e-9))
            for p in points
        ):
            found = float(a)
            break
    checks.append(CheckResult(
        condition="(mla2)",
        verdict=Verdict.PASS if found is not None else Verdict.FAIL,
        witness={"a": found},
        detail="V <= H^a H_*^{1-a} on t <= 1 for some a in (0,1)",
    ))

    checks.append(_aux_candidate(sobolev, points, tail))
    return CompanionReport(checks=checks, label=comp.label)


def _aux_candidate(sobolev: SobolevConjugateHandle, points, tail) -> CheckResult:
    """R(t) = t^r with r at the middle of (1, p^-_*/q^+), checked against its three clauses."""
    model = sobolev.model
    upper = sobolev.p_star / model.q_plus
    r = 0.5 * (1.0 + upper)
    candidate = CompanionFunction.composed_power(sobolev.base, r)
    slopes = [_slower_than_star(sobolev, candidate, p, tail) for p in points]
    worst = max(max(s.values()) for s in slopes)
    outer = CompanionFunction.power(r)
    at_one = np.concatenate([np.atleast_1d(outer.evaluate(p, 1.0)) for p in points])
    clauses = {
        "ratio": 1.0 < r < upper,
        "bounded_at_one": bool(np.all(np.isfinite(at_one)) and at_one.min() > 0),
        "slower_than_star": worst < -SLOPE_SLACK,
    }
    return CheckResult(
        condition="Lemma Aux candidate", heuristic=True,
        verdict=Verdict.CONSISTENT if all(clauses.values()) else Verdict.INCONSISTENT,
        witness={"r": r, "upper": upper, "max_slope": worst, "R_at_one": [float(at_one.min()), float(at_one.max())],
                 **clauses},
        detail="R(t) = t^r: ratio r in (1, p^-_*/q^+), R(1) = 1, R(H) << H_*",
    )
