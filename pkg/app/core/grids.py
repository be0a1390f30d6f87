"""Radial shell and box lattice grids over truncated domains."""

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.special import betainc, gamma

from app.errors import InputError
from app.models.fields import SampledField


def ball_volume(d: int, radius) -> np.ndarray:
    return np.pi ** (d / 2.0) * np.asarray(radius, dtype=float) ** d / gamma(1.0 + d / 2.0)


def along_axis(r: np.ndarray, d: int, center=None, direction=None) -> np.ndarray:
    """Place radii on the ray from center along direction (default e1)."""
    unit = np.zeros(d)
    unit[0] = 1.0
    if direction is not None:
        unit = np.asarray(direction, dtype=float) / np.linalg.norm(direction)
    points = np.outer(r, unit)
    if center is not None:
        points = points + np.asarray(center, dtype=float)
    return points


def sphere_fraction_in_ball(d: int, s, distance: float, radius: float) -> np.ndarray:
    """
    Fraction of the sphere |x - c| = s lying in B(y, radius), |y - c| = distance.

    The sphere meets the ball where cos(angle to y - c) >= t with
    t = (s^2 + distance^2 - radius^2) / (2 s distance); the area of that cap
    is a regularized incomplete beta function.
    """
    s = np.asarray(s, dtype=float)
    if d == 1:
        return 0.5 * (np.abs(s - distance) <= radius) + 0.5 * (s + distance <= radius)
    if distance == 0.0:
        return (s <= radius).astype(float)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.clip((s ** 2 + distance ** 2 - radius ** 2) / (2.0 * s * distance), -1.0, 1.0)
    cap = 0.5 * betainc(0.5 * (d - 1), 0.5, 1.0 - t ** 2)
    fraction = np.where(t >= 0.0, cap, 1.0 - cap)
    return np.where(s <= radius - distance, 1.0, fraction)


def ball_integral(d: int, density, support: float, distance: float, radius: float, shells: int = 512) -> float:
    """
    Integral over B(y, radius) of a density radial about c, |y - c| = distance.

    Args:
        density (Callable): s -> density at distance s from c, zero beyond support.
        shells (int): midpoint shells over the radii the ball reaches.
    """
    lower, upper = max(0.0, distance - radius), min(support, distance + radius)
    if upper <= lower:
        return 0.0
    edges = np.linspace(lower, upper, shells + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    volumes = ball_volume(d, edges[1:]) - ball_volume(d, edges[:-1])
    return float(np.sum(volumes * density(mid) * sphere_fraction_in_ball(d, mid, distance, radius)))


@dataclass(frozen=True)
class RadialGrid:
    """
    Nodes r_i = i * dr, i = 0..N, on [0, r_max].

    Node weights are the exact volumes of the dual shells
    [r_i - dr/2, r_i + dr/2] clipped to [0, r_max], so they add up to the
    ball volume; cell weights are the exact volumes of [r_i, r_{i+1}].
    """

    d: int
    r_max: float
    n: int

    def __post_init__(self):
        if self.n < 2 or self.r_max <= 0 or self.d < 1:
            raise InputError("radial grid needs n >= 2, r_max > 0 and d >= 1")

    @property
    def dr(self) -> float:
        return self.r_max / self.n

    @cached_property
    def nodes(self) -> np.ndarray:
        return np.linspace(0.0, self.r_max, self.n + 1)

    @cached_property
    def midpoints(self) -> np.ndarray:
        return 0.5 * (self.nodes[:-1] + self.nodes[1:])

    @cached_property
    def weights(self) -> np.ndarray:
        lower = np.clip(self.nodes - 0.5 * self.dr, 0.0, self.r_max)
        upper = np.clip(self.nodes + 0.5 * self.dr, 0.0, self.r_max)
        return ball_volume(self.d, upper) - ball_volume(self.d, lower)

    @cached_property
    def cell_weights(self) -> np.ndarray:
        return ball_volume(self.d, self.nodes[1:]) - ball_volume(self.d, self.nodes[:-1])

    @property
    def volume(self) -> float:
        return float(ball_volume(self.d, self.r_max))

    @cached_property
    def points(self) -> np.ndarray:
        return along_axis(self.nodes, self.d)

    @cached_property
    def midpoint_points(self) -> np.ndarray:
        return along_axis(self.midpoints, self.d)

    def derivative(self, u: np.ndarray) -> np.ndarray:
        """Difference quotients on the cells, centered at the cell midpoints."""
        return np.diff(u) / self.dr

    def field(self, values: np.ndarray, gradient=None) -> SampledField:
        return SampledField(
            points=self.points,
            weights=self.weights,
            values=np.asarray(values, dtype=float),
            gradient=None if gradient is None else np.asarray(gradient, dtype=float),
            truncation_radius=self.r_max,
            domain_measure=self.volume,
        )


def shell_field(profile, radius: float, shells: int, d: int, center=None, directions=None) -> SampledField:
    """
    Midpoint shell quadrature of a radial profile around center.

    Args:
        profile (Callable): r -> (value, gradient magnitude) arrays.
        radius (float): outer radius of the shells.
        shells (int): number of equal-width shells.
        d (int): dimension.
        center (Optional[array]): shell center, origin by default.
        directions (Optional[array]): unit directions averaged per shell; e1 by default.

    Returns:
        SampledField: one node per (shell, direction) with weight shell volume / directions.
    """
    edges = np.linspace(0.0, radius, shells + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    volumes = ball_volume(d, edges[1:]) - ball_volume(d, edges[:-1])
    if directions is None:
        directions = along_axis(np.ones(1), d)
    directions = np.atleast_2d(directions)
    values, gradient = profile(mid)
    count = directions.shape[0]
    points = np.concatenate([along_axis(mid, d, center, direction) for direction in directions])
    return SampledField(
        points=points,
        weights=np.tile(volumes / count, count),
        values=np.tile(values, count),
        gradient=np.tile(gradient, count),
        truncation_radius=radius,
        domain_measure=float(ball_volume(d, radius)),
    )


def box_lattice(d: int, half_width: float, spacing: float):
    """Cell-centered cubic lattice on [-half_width, half_width]^d."""
    count = int(round(2.0 * half_width / spacing))
    if count < 1:
        raise InputError("box lattice needs spacing smaller than its width")
    spacing = 2.0 * half_width / count
    axis = -half_width + spacing * (np.arange(count) + 0.5)
    mesh = np.meshgrid(*([axis] * d), indexing="ij")
    points = np.stack([m.ravel() for m in mesh], axis=1)
    return points, (count,) * d, spacing


def box_field(values_and_gradient, d: int, half_width: float, spacing: float, center=None) -> SampledField:
    """Cell-centered box field around center; values_and_gradient maps points to (values, gradient)."""
    points, shape, spacing = box_lattice(d, half_width, spacing)
    offset = np.zeros(d) if center is None else np.asarray(center, dtype=float)
    points = points + offset
    values, gradient = values_and_gradient(points)
    cell = spacing ** d
    return SampledField(
        points=points,
        weights=np.full(points.shape[0], cell),
        values=values,
        gradient=gradient,
        truncation_radius=float(np.linalg.norm(offset)) + half_width * np.sqrt(d),
        domain_measure=cell * points.shape[0],
        shape=shape,
        spacing=spacing,
    )
