"""
Explicit constants of the two-solution existence theorem and admissibility of
(lambda, eta, r) configurations.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Sequence, Tuple

import numpy as np

from app.config.config import SEED, THREADS
from app.core import numerics
from app.core.exponent_models import DoublePhaseModel, Nonlinearity
from app.core.grids import ball_volume, shell_field
from app.core.nfunction_engine import NFunctionHandle
from app.errors import InputError
from app.models.certificate import Certificate, FeasibilityReport
from app.models.fields import SampledField
from app.models.reports import Provenance

logger = logging.getLogger(__name__)

V_INF_SAMPLES = 10_000
V_INF_STARTS = 10
H1_POINTS = 256
SHELLS = 256
DIRECTIONS = 16
RHO_SHELLS = 2048


def gamma_bar_from_constant(gamma: float, nl: Nonlinearity) -> float:
    """gamma_bar = max{gamma^{b^+}, gamma^{b^-}}."""
    return max(gamma ** nl.b_plus, gamma ** nl.b_minus)


def _center(model: DoublePhaseModel, x0) -> np.ndarray:
    return np.zeros(model.d) if x0 is None else numerics.as_points(x0, model.d)[0]


def sup_potential(model: DoublePhaseModel, x0: np.ndarray, R: float, seed: int = SEED) -> float:
    """
    sup of V over the closed ball B(x0, R).

    Quasi-random samples in the ball, then coordinate ascent with projection
    back onto the ball from the best starts.
    """
    samples = numerics.ball_samples(model.d, V_INF_SAMPLES, R, center=x0, seed=seed)
    values = model.V(samples)
    best = samples[np.argsort(values)[-V_INF_STARTS:]]

    def project(point):
        offset = point - x0
        norm = np.linalg.norm(offset)
        return point if norm <= R else x0 + offset * (R / norm)

    top = float(values.max())
    for start in best:
        point = start.copy()
        value = float(model.V(point)[0])
        step = 0.25 * R
        while step > 1e-12 * R:
            improved = False
            for axis in range(model.d):
                for sign in (1.0, -1.0):
                    trial = point.copy()
                    trial[axis] += sign * step
                    trial = project(trial)
                    trial_value = float(model.V(trial)[0])
                    if trial_value > value:
                        point, value, improved = trial, trial_value, True
            if not improved:
                step *= 0.5
        top = max(top, value)
    return top


def compute_delta(model: DoublePhaseModel, R: float, omega_R: float, V_inf: float) -> float:
    m = min(R ** model.p_minus, R ** model.q_plus)
    d = model.d
    tail = 2.0 ** (model.q_plus + 1.0 - d) * (2.0 ** d - 1.0)
    return model.p_minus * m / (max(1.0, model.mu_sup) * omega_R * (V_inf * m + tail))


def compute_alpha(model: DoublePhaseModel, nl: Nonlinearity, r, gamma_bar: float):
    """alpha(r) = gamma_bar max{(q^+ r)^{b^+/p^-}, (q^+ r)^{b^-/q^+}} / r; vectorized in r."""
    scaled = model.q_plus * np.asarray(r, dtype=float)
    return gamma_bar * np.maximum(
        scaled ** (nl.b_plus / model.p_minus), scaled ** (nl.b_minus / model.q_plus)
    ) / np.asarray(r, dtype=float)


def half_ball_integral(model: DoublePhaseModel, nl: Nonlinearity, x0: np.ndarray, R: float, eta: float,
                       seed: int = SEED) -> float:
    """Integral of F(x, eta) over B(x0, R/2) by radial shells averaged over directions."""
    directions = numerics.sphere_directions(model.d, DIRECTIONS, seed)
    field = shell_field(
        lambda r: (np.full(r.shape, eta), np.zeros(r.shape)), R / 2.0, SHELLS, model.d, x0, directions
    )
    return float(np.sum(field.weights * nl.F(field.points, field.values)))


def compute_beta(model: DoublePhaseModel, integral_F: float, eta: float, delta: float) -> float:
    return delta * integral_F / max(eta ** model.p_minus, eta ** model.q_plus)


def tilde_u_profile(eta: float, R: float, x0=None, shells: int = SHELLS, d: int = 3,
                    directions: Optional[np.ndarray] = None) -> SampledField:
    """
    The cone: eta on B(x0, R/2), (2 eta / R)(R - |x - x0|) on the annulus, 0 outside.

    Shells cover [0, R] so the support is exact; an even shell count puts R/2
    on a shell boundary.
    """
    if eta <= 0 or R <= 0:
        raise InputError("tilde u needs eta > 0 and R > 0")
    x0 = np.zeros(d) if x0 is None else np.asarray(x0, dtype=float)
    return shell_field(lambda r: cone(r, eta, R), R, shells, d, x0, directions)


def cone(r: np.ndarray, eta: float, R: float) -> Tuple[np.ndarray, np.ndarray]:
    r = np.asarray(r, dtype=float)
    values = np.where(r <= R / 2.0, eta, np.clip(2.0 * eta / R * (R - r), 0.0, None))
    gradient = np.where((r > R / 2.0) & (r < R), 2.0 * eta / R, 0.0)
    return values, gradient


def rho(handle: NFunctionHandle, u: SampledField) -> float:
    """rho(u) = rho_H(|grad u|) + rho_{H,V}(u)."""
    return handle.modular(u.gradient_field()) + handle.modular(u, weight_by_V=True)


def compute_certificate(model: DoublePhaseModel, nl: Nonlinearity, x0=None, R: float = 1.0, eta: float = 1.0,
                        r: float = 25.0, gamma_bar: float = 1.0,
                        provenance: Provenance = Provenance.USER_SUPPLIED,
                        handle: Optional[NFunctionHandle] = None, V_inf: Optional[float] = None,
                        seed: int = SEED) -> Certificate:
    """
    Evaluate delta, alpha(r), beta(eta) and the admissibility flags.

    Args:
        model (DoublePhaseModel): a strict model.
        nl (Nonlinearity): the nonlinearity.
        x0: center of the ball B(x0, R).
        R, eta, r, gamma_bar (float): positive parameters.
        provenance (Provenance): where gamma_bar comes from.
        handle (Optional[NFunctionHandle]): reused for rho(tilde u).
        V_inf (Optional[float]): precomputed sup of V over the ball.
        seed (int): seeds the ball samples and the sphere directions.

    Returns:
        Certificate: every intermediate, the flags and Lambda.

    Raises:
        InputError: non-positive parameters or a diagnostic model.
    """
    if not model.strict:
        raise InputError("Certificates are never issued for diagnostic models")
    if min(R, eta, r, gamma_bar) <= 0:
        raise InputError("R, eta, r and gamma_bar must be positive")

    center = _center(model, x0)
    handle = handle or NFunctionHandle(model)
    omega_R = float(ball_volume(model.d, R))
    if V_inf is None:
        V_inf = sup_potential(model, center, R, seed)
    delta = compute_delta(model, R, omega_R, V_inf)
    alpha = float(compute_alpha(model, nl, r, gamma_bar))
    integral_F = half_ball_integral(model, nl, center, R, eta, seed)
    beta = compute_beta(model, integral_F, eta, delta)

    level = max(eta ** model.p_minus, eta ** model.q_plus)
    cond_318 = level < delta * r
    cond_H1 = _check_H1(model, nl, center, R, eta, seed)
    cond_H2 = alpha < beta
    Lambda = (1.0 / beta, 1.0 / alpha) if cond_H2 and alpha > 0 else None

    directions = numerics.sphere_directions(model.d, DIRECTIONS, seed)
    profile = tilde_u_profile(eta, R, center, RHO_SHELLS, model.d, directions)
    rho_tilde = rho(handle, profile)

    return Certificate(
        x0=center.tolist(), radius=R, eta=eta, r=r,
        omega_R=omega_R, V_inf=V_inf, delta=delta,
        gamma_bar=gamma_bar, gamma_provenance=provenance,
        alpha_r=alpha, beta_eta=beta, integral_F=integral_F,
        cond_318=cond_318, cond_H1=cond_H1, cond_H2=cond_H2, Lambda=Lambda,
        admissible=cond_318 and cond_H1 and cond_H2,
        rho_tilde_u=rho_tilde, rho_bound=level / delta, rho_below_r=rho_tilde < r,
    )


def _check_H1(model: DoublePhaseModel, nl: Nonlinearity, center: np.ndarray, R: float, eta: float,
              seed: int = SEED) -> bool:
    """F(x,t) >= 0 for t in [0, eta] on sampled points of B(x0, R)."""
    points = numerics.ball_samples(model.d, 64, R, center=center, seed=seed)
    ts = np.linspace(0.0, eta, H1_POINTS)
    X = np.repeat(points, ts.size, axis=0)
    T = np.tile(ts, points.shape[0])
    return bool(np.all(nl.F(X, T) >= 0))


def feasibility_search(model: DoublePhaseModel, nl: Nonlinearity, x0=None, R: float = 1.0, gamma_bar: float = 1.0,
                       eta_bounds: Sequence[float] = (1e-2, 1e2), r_bounds: Sequence[float] = (1e-1, 1e4),
                       grid: int = 64, threads: int = THREADS,
                       provenance: Provenance = Provenance.USER_SUPPLIED, seed: int = SEED) -> FeasibilityReport:
    """
    Log-grid search over (eta, r) maximizing beta(eta) - alpha(r) subject to (318) and (H1).

    Rows of the grid are evaluated on a thread pool; the reduction runs in row
    order so the result does not depend on scheduling.

    Returns:
        FeasibilityReport: the best certificate, or the least-violated point.
    """
    if min(eta_bounds) <= 0 or min(r_bounds) <= 0 or not np.all(np.isfinite([*eta_bounds, *r_bounds])):
        raise InputError("search box must be positive and finite")
    center = _center(model, x0)
    omega_R = float(ball_volume(model.d, R))
    V_inf = sup_potential(model, center, R, seed)
    delta = compute_delta(model, R, omega_R, V_inf)
    etas = np.geomspace(eta_bounds[0], eta_bounds[1], grid)
    rs = np.geomspace(r_bounds[0], r_bounds[1], grid)
    alphas = compute_alpha(model, nl, rs, gamma_bar)

    def row(eta):
        integral_F = half_ball_integral(model, nl, center, R, eta, seed)
        beta = compute_beta(model, integral_F, eta, delta)
        h1 = _check_H1(model, nl, center, R, eta, seed)
        level = max(eta ** model.p_minus, eta ** model.q_plus)
        return beta, h1, level < delta * rs

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        rows = list(pool.map(row, etas))

    best, best_gap = None, -np.inf
    fallback, fallback_gap = None, -np.inf
    for i, (beta, h1, ok_318) in enumerate(rows):
        gaps = beta - alphas
        j = int(np.argmax(gaps))
        if gaps[j] > fallback_gap:
            fallback, fallback_gap = (i, j), float(gaps[j])
        if not h1 or not np.any(ok_318):
            continue
        masked = np.where(ok_318, gaps, -np.inf)
        j = int(np.argmax(masked))
        if masked[j] > best_gap:
            best, best_gap = (i, j), float(masked[j])

    choice = best or fallback
    gap = best_gap if best is not None else fallback_gap
    certificate = compute_certificate(
        model, nl, center, R, float(etas[choice[0]]), float(rs[choice[1]]), gamma_bar, provenance,
        V_inf=V_inf, seed=seed,
    )
    feasible = best is not None and certificate.admissible
    if not feasible:
        logger.info("No admissible (eta, r) in the search box; smallest violation %.6g", -gap)
    return FeasibilityReport(
        feasible=feasible,
        best=certificate if feasible else None,
        least_violated=None if feasible else certificate,
        violation_gap=max(0.0, -gap),
        eta_bounds=tuple(eta_bounds),
        r_bounds=tuple(r_bounds),
        grid=grid,
    )


def gamma_lower_bound(handle: NFunctionHandle, nl: Nonlinearity, fields: Sequence[SampledField]) -> Tuple[float, int]:
    """
    max over the fields of ||u||_{L^B} / ||u||_{W^{1,H}_V}, a lower bound on the embedding constant.

    Returns:
        Tuple[float, int]: the bound and the index of the maximizing field.
    """
    best, arg = 0.0, -1
    for index, u in enumerate(fields):
        denominator = handle.luxemburg_norm(u.gradient_field()) + handle.luxemburg_norm(u, weight_by_V=True)
        if denominator == 0:
            logger.info("Skipping zero field %d", index)
            continue
        magnitude = np.abs(u.values)
        b_norm = numerics.luxemburg(lambda s: float(np.sum(u.weights * nl.B(s * magnitude))), u.sup)
        ratio = b_norm / denominator
        if ratio > best:
            best, arg = ratio, index
    return best, arg
