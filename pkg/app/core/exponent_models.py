"""
Catalog of exponents, weights, potentials and nonlinearities, and the
validators of the structural hypotheses on them.

Every catalog object is radial in x, so evaluators only look at |x|.
"""

import logging
from dataclasses import dataclass, replace
from typing import Mapping, Optional, Union

import numpy as np

from app.config.config import SEED
from app.core import numerics
from app.core.grids import ball_volume
from app.errors import ModelError
from app.models.catalog import (
    ModelFamily, ModelParams, NonlinearityConfig, NonlinearityKind, SamplingConfig, WeightKind,
)
from app.models.reports import CheckResult, ValidationReport, Verdict

logger = logging.getLogger(__name__)

SLACK = 1e-12


@dataclass(frozen=True)
class ExponentField:
    """
    p(x,t) = base + a*L/(1+L) + c*(1 - 1/(1+|x|/scale)) with L = ln(max(t,1)).

    Constant for t in [0,1], nondecreasing for t >= 1, Lipschitz in x with
    constant c/scale; the bounds are exact suprema and infima of the family.
    """

    base: float
    t_amplitude: float = 0.0
    x_amplitude: float = 0.0
    x_scale: float = 1.0

    def eval(self, x, t) -> np.ndarray:
        r = numerics.radii(x)
        log_t = np.log(np.maximum(np.asarray(t, dtype=float), 1.0))
        modulation = 1.0 - 1.0 / (1.0 + r / self.x_scale)
        return self.base + self.t_amplitude * log_t / (1.0 + log_t) + self.x_amplitude * modulation

    @property
    def lower_bound(self) -> float:
        return self.base

    @property
    def upper_bound(self) -> float:
        return self.base + self.t_amplitude + self.x_amplitude

    @property
    def lipschitz_x(self) -> float:
        return self.x_amplitude / self.x_scale

    @property
    def limit(self) -> float:
        """Value on [0,1] as |x| -> infinity."""
        return self.base + self.x_amplitude

    @property
    def t_dependent(self) -> bool:
        return self.t_amplitude > 0


@dataclass(frozen=True)
class Weight:
    kind: WeightKind
    mu0: float

    def eval(self, x) -> np.ndarray:
        r = numerics.radii(x)
        if self.kind == WeightKind.DECAYING:
            return self.mu0 / (1.0 + r ** 2)
        return np.full(r.shape, self.mu0)

    @property
    def sup(self) -> float:
        return self.mu0

    @property
    def limit(self) -> float:
        return 0.0 if self.kind == WeightKind.DECAYING else self.mu0

    @property
    def lipschitz(self) -> float:
        return 3.0 * np.sqrt(3.0) / 8.0 * self.mu0 if self.kind == WeightKind.DECAYING else 0.0


@dataclass(frozen=True)
class Potential:
    """V(x) = v0 + v2 |x|^2."""

    v0: float
    v2: float

    def eval(self, x) -> np.ndarray:
        return self.v0 + self.v2 * numerics.radii(x) ** 2

    @property
    def floor(self) -> float:
        return self.v0

    @property
    def limit(self) -> float:
        return np.inf if self.v2 > 0 else self.v0

    def sublevel_radius(self, level: float) -> float:
        """Radius of {V < level}; infinite when the potential stays below level."""
        if level <= self.v0:
            return 0.0
        if self.v2 == 0:
            return np.inf
        return float(np.sqrt((level - self.v0) / self.v2))


@dataclass(frozen=True)
class DoublePhaseModel:
    p: ExponentField
    q: ExponentField
    weight: Weight
    potential: Potential
    d: int
    family: ModelFamily = ModelFamily.CONSTANT
    strict: bool = True

    def mu(self, x) -> np.ndarray:
        return self.weight.eval(x)

    def V(self, x) -> np.ndarray:
        return self.potential.eval(x)

    @property
    def p_minus(self) -> float:
        return self.p.lower_bound

    @property
    def p_plus(self) -> float:
        return self.p.upper_bound

    @property
    def q_minus(self) -> float:
        return self.q.lower_bound

    @property
    def q_plus(self) -> float:
        return self.q.upper_bound

    @property
    def mu_sup(self) -> float:
        return self.weight.sup

    @property
    def p_inf(self) -> float:
        return self.p.limit

    @property
    def q_inf(self) -> float:
        return self.q.limit

    @property
    def mu_inf(self) -> float:
        return self.weight.limit

    @property
    def t_dependent(self) -> bool:
        return self.p.t_dependent or self.q.t_dependent

    @property
    def x_homogeneous(self) -> bool:
        """True when p, q and mu do not depend on x (V may)."""
        return (
            self.p.x_amplitude == 0 and self.q.x_amplitude == 0 and self.weight.kind == WeightKind.CONSTANT
        )

    @property
    def p_critical(self) -> float:
        """p^-_* = d p^- / (d - p^-), infinite when p^- >= d."""
        return critical_exponent(self.p_minus, self.d)

    @property
    def q_critical(self) -> float:
        return critical_exponent(self.q_plus, self.d)


def critical_exponent(s: float, d: int) -> float:
    return d * s / (d - s) if s < d else np.inf


def _exponent_gap(params: ModelParams) -> float:
    """Exact infimum of q - p over the family."""
    return (
        (params.q - params.p)
        + min(0.0, params.q_t_amplitude - params.p_t_amplitude)
        + min(0.0, params.q_x_amplitude - params.p_x_amplitude)
    )


def make_model(catalog_id: Union[str, ModelFamily], params: Optional[Mapping] = None, strict: bool = True) -> DoublePhaseModel:
    """
    Build a catalog model.

    Args:
        catalog_id: one of "constant", "log_saturating", "x_modulated".
        params: ModelParams fields; missing entries take their defaults.
        strict: reject parameters that break the structural hypotheses. Non-strict
            models are diagnostic only and never receive certificates.

    Returns:
        DoublePhaseModel: a model whose declared bounds are exact for its family.

    Raises:
        ModelError: unknown catalog id or inadmissible parameters.
    """
    try:
        family = ModelFamily(catalog_id)
    except ValueError:
        raise ModelError(f"Unknown catalog id '{catalog_id}'")

    params = params if isinstance(params, ModelParams) else ModelParams(**dict(params or {}))

    if family == ModelFamily.CONSTANT and (
        params.p_t_amplitude or params.q_t_amplitude or params.p_x_amplitude or params.q_x_amplitude
    ):
        raise ModelError("The constant family takes no amplitudes")
    if family == ModelFamily.LOG_SATURATING and (params.p_x_amplitude or params.q_x_amplitude):
        raise ModelError("The log_saturating family only varies in t")
    if family == ModelFamily.X_MODULATED and (params.p_t_amplitude or params.q_t_amplitude):
        raise ModelError("The x_modulated family only varies in x")
    if params.v0 <= 0:
        raise ModelError(f"Potential floor V0 must be positive, got {params.v0}")

    model = DoublePhaseModel(
        p=ExponentField(params.p, params.p_t_amplitude, params.p_x_amplitude, params.x_scale),
        q=ExponentField(params.q, params.q_t_amplitude, params.q_x_amplitude, params.x_scale),
        weight=Weight(params.weight, params.mu),
        potential=Potential(params.v0, params.v2),
        d=params.d,
        family=family,
        strict=strict,
    )

    if not strict:
        if model.p_minus <= 1 or model.q_minus <= 1:
            raise ModelError("Exponents must exceed 1 even in diagnostic mode")
        return model

    # Check (H)(i) and (H)(iv) algebra on the declared bounds
    if params.d < 3:
        raise ModelError(f"Dimension must be at least 3, got {params.d}")
    if model.p_minus < 2 or model.p_plus >= model.d:
        raise ModelError(f"Need 2 <= p^- <= p^+ < d, got p^-={model.p_minus}, p^+={model.p_plus}, d={model.d}")
    if _exponent_gap(params) <= 0:
        raise ModelError("Requires p(x,t) < q(x,t) strictly")
    if model.q_plus >= model.p_critical:
        raise ModelError(f"Requires q^+ < p^-_* = {model.p_critical:.6g}, got q^+={model.q_plus}")
    if model.q_plus / model.p_minus >= 1.0 + 1.0 / model.d:
        raise ModelError(
            f"q^+/p^- = {model.q_plus / model.p_minus:.6g} >= 1 + 1/d = {1.0 + 1.0 / model.d:.6g}"
        )
    return model


@dataclass(frozen=True)
class Nonlinearity:
    """
    Catalog nonlinearity f with primitive F and majorant b.

    The majorant is b(t) = c_b (t^{b^- - 1} + t^{b^+ - 1}) with primitive B.
    All catalog nonlinearities are x-independent; x is accepted for interface
    uniformity.
    """

    kind: NonlinearityKind
    exponent: float
    c_b: float
    b_minus: float
    b_plus: float
    sigma: float
    c_tilde: float
    r0: float
    well_depth: float = 0.0
    well_eps: float = 0.0

    def _log_f(self, t: np.ndarray) -> np.ndarray:
        s = self.exponent
        a = np.abs(t)
        return np.sign(t) * (a ** (s - 1) * np.log1p(a) + a ** s / (s * (1.0 + a)))

    def _log_F(self, t: np.ndarray) -> np.ndarray:
        a = np.abs(t)
        return a ** self.exponent * np.log1p(a) / self.exponent

    def f(self, x, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if self.kind == NonlinearityKind.ZERO:
            return np.zeros_like(t)
        if self.kind == NonlinearityKind.POWER:
            return np.sign(t) * np.abs(t) ** (self.exponent - 1)
        if self.kind == NonlinearityKind.LOG_SUPERLINEAR:
            return self._log_f(t)
        t4 = t ** 4
        return 4.0 * self.well_depth * t ** 3 / (1.0 + t4) ** 2 + self.well_eps * self._log_f(t)

    def F(self, x, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if self.kind == NonlinearityKind.ZERO:
            return np.zeros_like(t)
        if self.kind == NonlinearityKind.POWER:
            return np.abs(t) ** self.exponent / self.exponent
        if self.kind == NonlinearityKind.LOG_SUPERLINEAR:
            return self._log_F(t)
        t4 = t ** 4
        return self.well_depth * t4 / (1.0 + t4) + self.well_eps * self._log_F(t)

    def F_tilde(self, x, t, q_plus: float) -> np.ndarray:
        """(1/q^+) f(x,t) t - F(x,t)."""
        t = np.asarray(t, dtype=float)
        return self.f(x, t) * t / q_plus - self.F(x, t)

    def b(self, t) -> np.ndarray:
        a = np.abs(np.asarray(t, dtype=float))
        return self.c_b * (a ** (self.b_minus - 1) + a ** (self.b_plus - 1))

    def B(self, t) -> np.ndarray:
        a = np.abs(np.asarray(t, dtype=float))
        return self.c_b * (a ** self.b_minus / self.b_minus + a ** self.b_plus / self.b_plus)

    def sigma_window(self, model: DoublePhaseModel):
        lower = model.d / model.p_minus
        if self.kind == NonlinearityKind.POWER:
            s = self.exponent
            upper = s / (s - model.p_minus) if s > model.p_minus else np.inf
        elif self.kind == NonlinearityKind.ZERO:
            upper = np.inf
        else:
            upper = model.q_plus / (model.q_plus - model.p_minus + 1.0)
        return lower, upper


def make_nonlinearity(config: Optional[NonlinearityConfig], model: DoublePhaseModel) -> Nonlinearity:
    """
    Instantiate a catalog nonlinearity, filling model-dependent defaults.

    Raises:
        ModelError: if an explicit exponent leaves the admissible range of its kind.
    """
    config = config or NonlinearityConfig()
    q_plus = model.q_plus
    p_crit = model.p_critical
    kind = config.kind

    if kind == NonlinearityKind.POWER:
        upper = p_crit if np.isfinite(p_crit) else q_plus + 2.0
        exponent = config.exponent if config.exponent is not None else 0.5 * (q_plus + upper)
        if model.strict and not q_plus < exponent < p_crit:
            raise ModelError(f"Power exponent must lie in (q^+, p^-_*) = ({q_plus}, {p_crit}), got {exponent}")
        default_b = exponent
        default_cb = 1.0
    else:
        exponent = config.exponent if config.exponent is not None else q_plus
        default_b = min(q_plus + 0.5, 0.5 * (q_plus + p_crit))
        default_cb = config.well_depth + config.well_eps if kind == NonlinearityKind.SATURATED_WELL else 1.0

    if kind == NonlinearityKind.SATURATED_WELL:
        default_r0 = 2.0 * (config.well_depth * q_plus ** 2 / config.well_eps) ** (1.0 / q_plus)
    else:
        default_r0 = 1.0

    nl = Nonlinearity(
        kind=kind,
        exponent=exponent,
        c_b=config.c_b if config.c_b is not None else default_cb,
        b_minus=config.b_minus if config.b_minus is not None else default_b,
        b_plus=config.b_plus if config.b_plus is not None else (config.b_minus or default_b),
        sigma=0.0,
        c_tilde=config.c_tilde,
        r0=config.r0 if config.r0 is not None else max(default_r0, 1.0),
        well_depth=config.well_depth if kind == NonlinearityKind.SATURATED_WELL else 0.0,
        well_eps=config.well_eps if kind == NonlinearityKind.SATURATED_WELL else 0.0,
    )
    if config.sigma is not None:
        sigma = config.sigma
    else:
        lower, upper = nl.sigma_window(model)
        sigma = 0.5 * (lower + upper) if lower < upper < np.inf else lower + 0.5
    return replace(nl, sigma=sigma)


def _sample_points(model: DoublePhaseModel, sampling: SamplingConfig, seed: int) -> np.ndarray:
    radii = np.linspace(0.0, sampling.radius, sampling.radii)
    directions = numerics.sphere_directions(model.d, sampling.directions, seed)
    return (radii[:, None, None] * directions[None, :, :]).reshape(-1, model.d)


def _sample_t(sampling: SamplingConfig) -> np.ndarray:
    below = np.linspace(0.0, 1.0, sampling.t_values // 4)
    above = np.geomspace(1.0, sampling.t_max, sampling.t_values - below.size)
    return np.concatenate([below, above])


def _check(condition, ok, witness=None, detail="", heuristic=False, positive=Verdict.PASS, negative=Verdict.FAIL):
    return CheckResult(
        condition=condition,
        verdict=positive if ok else negative,
        heuristic=heuristic,
        witness=None if ok else witness,
        detail=detail,
    )


def _structural_checks(model: DoublePhaseModel, points: np.ndarray, ts: np.ndarray, rng) -> list:
    checks = []
    X = np.repeat(points, ts.size, axis=0)
    T = np.tile(ts, points.shape[0])
    p = model.p.eval(X, T)
    q = model.q.eval(X, T)

    in_bounds = (
        np.all(p >= model.p_minus - SLACK) and np.all(p <= model.p_plus + SLACK)
        and np.all(q >= model.q_minus - SLACK) and np.all(q <= model.q_plus + SLACK)
    )
    ranges = 2 <= model.p_minus and model.p_plus < model.d and model.q_minus >= 2
    checks.append(_check(
        "(H)(i) bounds", in_bounds and ranges,
        witness={"p_minus": model.p_minus, "p_plus": model.p_plus, "q_minus": model.q_minus, "d": model.d},
        detail="2 <= p^- <= p^+ < d, 2 <= q^- and sampled values within the declared bounds",
    ))

    gap = q - p
    crit = model.p_critical
    ordered = np.all(gap > 0) and np.all(q < crit)
    worst = int(np.argmin(np.minimum(gap, crit - q)))
    checks.append(_check(
        "(H)(i) ordering", ordered,
        witness={"x": X[worst].tolist(), "t": float(T[worst]), "p": float(p[worst]), "q": float(q[worst]), "p_crit": crit},
        detail="p(x,t) < q(x,t) < p^-_* on samples",
    ))

    mu = model.mu(points)
    checks.append(_check(
        "(H)(i) weight", bool(np.all(mu >= 0)),
        witness={"min_mu": float(np.min(mu))},
        detail="mu >= 0 on samples",
    ))

    below = ts[ts <= 1.0]
    constant = True
    monotone = True
    above = ts[ts >= 1.0]
    for field in (model.p, model.q):
        at_one = field.eval(points, np.ones(points.shape[0]))
        for t in below:
            constant &= bool(np.allclose(field.eval(points, np.full(points.shape[0], t)), at_one, rtol=0, atol=SLACK))
        values = np.stack([field.eval(points, np.full(points.shape[0], t)) for t in above], axis=1)
        monotone &= bool(np.all(np.diff(values, axis=1) >= -SLACK))
    checks.append(_check("(H)(ii) constant on [0,1]", constant, witness={}, detail="p, q do not depend on t <= 1"))
    checks.append(_check("(H)(ii) monotone", monotone, witness={}, detail="p, q nondecreasing in t >= 1"))

    # Lipschitz constants on random pairs
    pairs = rng.integers(0, points.shape[0], size=(512, 2))
    tp = rng.choice(ts, size=512)
    xa, xb = points[pairs[:, 0]], points[pairs[:, 1]]
    dist = np.linalg.norm(xa - xb, axis=1)
    lipschitz = True
    for field in (model.p, model.q):
        jump = np.abs(field.eval(xa, tp) - field.eval(xb, tp))
        lipschitz &= bool(np.all(jump <= field.lipschitz_x * dist + SLACK))
    checks.append(_check(
        "(H)(iii) Lipschitz", lipschitz,
        witness={"c_p": model.p.lipschitz_x, "c_q": model.q.lipschitz_x},
        detail="|p(x,t) - p(y,t)| <= c_p |x - y| on random pairs",
    ))

    ratio = model.q_plus / model.p_minus
    bound = 1.0 + 1.0 / model.d
    checks.append(_check(
        "(H)(iv)", ratio < bound,
        witness={"q_plus/p_minus": ratio, "1+1/d": bound},
        detail="q^+/p^- < 1 + 1/d",
    ))
    return checks


def _potential_checks(model: DoublePhaseModel, points: np.ndarray, sampling: SamplingConfig, seed: int) -> list:
    checks = []
    V = model.V(points)
    floor = model.potential.floor
    checks.append(_check(
        "(V0)(i)", bool(np.all(V >= floor - SLACK) and floor > 0),
        witness={"min_V": float(np.min(V)), "V0": floor},
        detail="V >= V0 > 0 on samples",
    ))

    # |{V < L}| for a ladder of levels, Monte-Carlo inside the truncation and declared tail outside
    mc = numerics.ball_samples(model.d, sampling.monte_carlo, sampling.radius, seed=seed)
    inside_volume = float(ball_volume(model.d, sampling.radius))
    V_mc = model.V(mc)
    measures = []
    witness = None
    for k in range(1, 11):
        level = floor * 2.0 ** k
        if model.potential.limit < level:
            witness = {"L": level, "V_limit": float(model.potential.limit)}
            break
        inside = inside_volume * float(np.mean(V_mc < level))
        radius = model.potential.sublevel_radius(level)
        tail = float(ball_volume(model.d, radius) - inside_volume) if radius > sampling.radius else 0.0
        measures.append({"L": level, "measure": inside + tail, "tail": tail})
    checks.append(CheckResult(
        condition="(V0)(ii)",
        verdict=Verdict.FAIL if witness else Verdict.PASS,
        witness=witness,
        detail=f"finite measure of sublevel sets on the ladder {measures}" if not witness
        else "the declared limit of V lies below the level, the sublevel set is unbounded",
    ))

    unit = numerics.ball_samples(model.d, sampling.monte_carlo, 1.0, seed=seed + 1)
    volume = float(ball_volume(model.d, 1.0))
    centers = 2.0 ** np.arange(0, 8)
    e1 = np.zeros(model.d)
    e1[0] = 1.0
    integrals = np.array([volume * float(np.mean(1.0 / model.V(unit + c * e1))) for c in centers])
    checks.append(_check(
        "(V1)(ii)", numerics.tends_to_zero(integrals),
        witness={"integrals": integrals.tolist()},
        detail="integral of 1/V over B_1(x) decreases toward 0 as |x| grows",
        heuristic=True, positive=Verdict.CONSISTENT, negative=Verdict.INCONSISTENT,
    ))
    return checks


def _nonlinearity_checks(model: DoublePhaseModel, nl: Nonlinearity, sampling: SamplingConfig) -> list:
    checks = []
    x = np.zeros(model.d)
    ts = np.concatenate([np.geomspace(1e-6, 1.0, 64), np.geomspace(1.0, sampling.t_max, 64)[1:]])
    signed = np.concatenate([-ts[::-1], ts])

    f = nl.f(x, signed)
    b = nl.b(signed)
    excess = np.abs(f) - b * (1.0 + SLACK)
    checks.append(_check(
        "(F)(i) majorant", bool(np.all(excess <= 0)),
        witness={"t": float(signed[int(np.argmax(excess))]), "excess": float(np.max(excess))},
        detail="|f(x,t)| <= b(x,|t|)",
    ))
    window = model.q_plus <= nl.b_minus <= nl.b_plus < model.p_critical
    checks.append(_check(
        "(F)(i) exponents", window,
        witness={"q_plus": model.q_plus, "b_minus": nl.b_minus, "b_plus": nl.b_plus, "p_crit": model.p_critical},
        detail="q^+ <= b^- <= b^+ < p^-_*",
    ))

    probe = np.geomspace(1e-2, 1e3, 200)
    step = 1e-6 * probe
    derivative = (nl.F(x, probe + step) - nl.F(x, probe - step)) / (2.0 * step)
    error = np.abs(derivative - nl.f(x, probe)) / (1.0 + np.abs(nl.f(x, probe)))
    checks.append(_check(
        "(F) primitive", bool(np.all(error < 1e-5)),
        witness={"max_error": float(np.max(error))},
        detail="dF/dt matches f by central differences",
    ))

    ladder = np.geomspace(1.0, sampling.t_max, 13)
    growth = nl.F(x, ladder) / ladder ** model.q_plus
    checks.append(_check(
        "(F)(ii)", numerics.kendall_tau(growth[-8:]) >= 0.6 and growth[-1] > growth[-8],
        witness={"ratios": growth.tolist()},
        detail="F(x,t)/|t|^{q^+} increasing along a ladder to t_max",
        heuristic=True, positive=Verdict.CONSISTENT, negative=Verdict.INCONSISTENT,
    ))

    small = np.geomspace(1e-1, 1e-8, 15)
    decay = np.abs(nl.f(x, small)) / small ** (model.p_minus - 1)
    checks.append(_check(
        "(F)(iii)", numerics.tends_to_zero(decay),
        witness={"ratios": decay.tolist()},
        detail="f(x,t) = o(|t|^{p^- - 1}) as t -> 0",
        heuristic=True, positive=Verdict.CONSISTENT, negative=Verdict.INCONSISTENT,
    ))

    large = ts[ts >= nl.r0]
    F_tilde = nl.F_tilde(x, large, model.q_plus)
    positive = bool(np.all(F_tilde > 0))
    lower, upper = nl.sigma_window(model)
    sigma_ok = nl.sigma > model.d / model.p_minus
    required = np.inf
    if positive:
        required = float(np.max(
            np.abs(nl.f(x, large)) ** nl.sigma / (large ** ((model.p_minus - 1) * nl.sigma) * F_tilde)
        ))
    checks.append(_check(
        "(F)(iv)", positive and sigma_ok and required <= nl.c_tilde,
        witness={
            "F_tilde_positive": positive, "sigma": nl.sigma, "d/p_minus": model.d / model.p_minus,
            "required_c_tilde": required, "c_tilde": nl.c_tilde, "r0": nl.r0,
        },
        detail="F~ > 0 for |t| >= r0, sigma > d/p^- and |f|^sigma <= c~ |t|^{(p^- - 1) sigma} F~",
    ))
    checks.append(CheckResult(
        condition="(F)(iv) sigma window",
        verdict=Verdict.REPORTED,
        witness={"lower": lower, "upper": upper, "sigma": nl.sigma, "inside": bool(lower <= nl.sigma <= upper)},
        detail="sigma range for which the growth condition holds",
    ))

    F_large = nl.F(x, large)
    theta = float(np.min(large * nl.f(x, large) / F_large)) if np.all(F_large > 0) else 0.0
    checks.append(CheckResult(
        condition="(AR)",
        verdict=Verdict.REPORTED,
        witness={"theta_estimate": theta, "q_plus": model.q_plus, "holds": theta > model.q_plus},
        detail="Ambrosetti-Rabinowitz: inf t f/F over |t| >= r0 compared with q^+ (informational)",
    ))
    return checks


def validate_hypotheses(model: DoublePhaseModel, nl: Optional[Nonlinearity] = None,
                        sampling: Optional[SamplingConfig] = None) -> ValidationReport:
    """
    Check every structural hypothesis on samples.

    Failures are verdicts, never exceptions.

    Args:
        model (DoublePhaseModel): the model, strict or diagnostic.
        nl (Optional[Nonlinearity]): nonlinearity to validate as well.
        sampling (Optional[SamplingConfig]): sample sizes, radius and seed.

    Returns:
        ValidationReport: one CheckResult per sub-condition.
    """
    sampling = sampling or SamplingConfig()
    seed = SEED if sampling.seed is None else sampling.seed
    rng = np.random.default_rng(seed)
    points = _sample_points(model, sampling, seed)
    ts = _sample_t(sampling)

    checks = _structural_checks(model, points, ts, rng)
    checks += _potential_checks(model, points, sampling, seed)
    if nl is not None:
        checks += _nonlinearity_checks(model, nl, sampling)

    report = ValidationReport(checks=checks)
    for check in report.checks:
        if check.verdict in (Verdict.FAIL, Verdict.INCONSISTENT):
            logger.warning("%s: %s (%s)", check.condition, check.verdict.value, check.witness)
    return report
