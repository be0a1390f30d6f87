"""Shared numerical helpers: point handling, sampling, trend tests and the Luxemburg root solve."""

import logging
from typing import Callable

import numpy as np
from scipy import optimize, stats
from scipy.stats import qmc

from app.errors import BracketError, InputError

logger = logging.getLogger(__name__)

MAX_BRACKET_EXPANSIONS = 200
MAX_ROOT_ITERATIONS = 200
UNIT_MODULAR_TOL = 1e-6
RATE_FLOOR = 1e-3


def as_points(x, d: int) -> np.ndarray:
    """Return x as an (n, d) array; a single point becomes one row."""
    points = np.asarray(x, dtype=float)
    if points.ndim == 1:
        points = points.reshape(1, -1)
    if points.ndim != 2 or points.shape[1] != d:
        raise InputError(f"points of dimension {points.shape[-1]} do not match model dimension {d}")
    return points


def radii(x) -> np.ndarray:
    return np.linalg.norm(np.atleast_2d(np.asarray(x, dtype=float)), axis=-1)


def nonnegative(t, name: str = "t") -> np.ndarray:
    values = np.asarray(t, dtype=float)
    if np.any(values < 0) or not np.all(np.isfinite(values)):
        raise InputError(f"{name} must be finite and nonnegative")
    return values


def sobol(d: int, n: int, seed: int) -> np.ndarray:
    """n scrambled Sobol points in the unit cube, drawn from the next power-of-two block."""
    sampler = qmc.Sobol(d=d, scramble=True, seed=seed)
    return sampler.random_base2(int(np.ceil(np.log2(max(n, 2)))))[:n]


def sphere_directions(d: int, n: int, seed: int) -> np.ndarray:
    """Scrambled Sobol points pushed through the normal quantile onto the unit sphere."""
    if d == 1:
        return np.array([[1.0], [-1.0]])[: max(n, 1)]
    cube = sobol(d, n, seed)
    gauss = stats.norm.ppf(np.clip(cube, 1e-12, 1 - 1e-12))
    return gauss / np.linalg.norm(gauss, axis=1, keepdims=True)


def ball_samples(d: int, n: int, radius: float, center=None, seed: int = 0) -> np.ndarray:
    """Quasi-random points uniformly distributed in a ball."""
    cube = sobol(d + 1, n, seed)
    gauss = stats.norm.ppf(np.clip(cube[:, :d], 1e-12, 1 - 1e-12))
    directions = gauss / np.linalg.norm(gauss, axis=1, keepdims=True)
    scale = radius * cube[:, d] ** (1.0 / d)
    points = directions * scale[:, None]
    if center is not None:
        points = points + np.asarray(center, dtype=float)
    return points


def kendall_tau(values) -> float:
    values = np.asarray(values, dtype=float)
    if values.size < 2 or np.allclose(values, values[0], rtol=1e-12, atol=0.0):
        return 0.0
    tau = stats.kendalltau(np.arange(values.size), values).statistic
    return 0.0 if np.isnan(tau) else float(tau)


def tends_to_zero(values, window: int = 8) -> bool:
    """Monotone-decrease trend over the last `window` entries with a halving of the level."""
    values = np.asarray(values, dtype=float)
    tail = values[-window:]
    # nonincreasing down to an exact zero
    if tail.size and tail[-1] == 0 and np.all(np.diff(tail) <= 0):
        return True
    return kendall_tau(tail) <= -0.6 and tail[-1] <= 0.5 * tail[0]


def grows_without_bound(values, window: int = 8) -> bool:
    values = np.asarray(values, dtype=float)
    tail = values[-window:]
    return kendall_tau(tail) >= 0.6 and tail[-1] >= 2.0 * tail[0]


def log_growth_rate(values) -> float:
    """Least-squares slope of log values against the index; nan unless every value is positive."""
    values = np.asarray(values, dtype=float)
    if values.size < 2 or np.any(values <= 0):
        return np.nan
    return float(np.polyfit(np.arange(values.size), np.log(values), 1)[0])


def keeps_growing(values, window: int = 8) -> bool:
    """
    Increasing trend over the last `window` entries whose log growth rate does
    not saturate: the rate over the later half is above RATE_FLOOR and at
    least half the rate over the earlier half.
    """
    tail = np.asarray(values, dtype=float)[-window:]
    if tail.size < 4 or np.any(tail <= 0) or kendall_tau(tail) < 0.6:
        return False
    half = tail.size // 2
    early, late = log_growth_rate(tail[:half + 1]), log_growth_rate(tail[half:])
    return late > RATE_FLOOR and late >= 0.5 * early


def loglog_slope(t, y) -> float:
    """Least-squares slope of log y against log t; zero data gives -inf."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(y <= 0):
        return -np.inf if np.all(y <= 0) else np.nan
    return float(np.polyfit(np.log(t), np.log(y), 1)[0])


def central_difference(f: Callable[[np.ndarray], np.ndarray], t, rel_step: float = 1e-5) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    step = rel_step * np.maximum(t, 1e-300)
    return (f(t + step) - f(t - step)) / (2.0 * step)


def luxemburg(modular: Callable[[float], float], sup: float, rtol: float = 1e-8) -> float:
    """
    Solve modular(1 / lam) = 1 for the Luxemburg norm lam.

    Args:
        modular (Callable): s -> rho(s * u), increasing in s.
        sup (float): sup norm of u, used to seed the bracket.
        rtol (float): relative tolerance of the root.

    Returns:
        float: the norm, 0 for the zero field.

    Raises:
        BracketError: if no sign change is found after doubling expansions.
    """
    if sup == 0:
        return 0.0

    def excess(lam: float) -> float:
        return modular(1.0 / lam) - 1.0

    low, high = sup / 10.0, 10.0 * sup
    expansions = 0
    while excess(low) <= 0:
        low /= 2.0
        expansions += 1
        if expansions > MAX_BRACKET_EXPANSIONS or low == 0:
            raise BracketError("Luxemburg bracket expansion failed at the lower end", (low, high))
    while excess(high) >= 0:
        high *= 2.0
        expansions += 1
        if expansions > MAX_BRACKET_EXPANSIONS or not np.isfinite(high):
            raise BracketError("Luxemburg bracket expansion failed at the upper end", (low, high))

    lam = optimize.brentq(
        excess, low, high, xtol=1e-300, rtol=min(rtol, 1e-12), maxiter=MAX_ROOT_ITERATIONS
    )
    if abs(excess(lam)) > UNIT_MODULAR_TOL:
        raise BracketError("Luxemburg root missed the unit modular", (low, high))
    return float(lam)
