"""
Test-function families and numerical probes of the embeddings of the weighted
double phase Sobolev space: ratio scans, the Lions vanishing lemma, the
Brezis-Lieb splitting, compactness under a coercive potential and the
modular-norm relation.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from app.core import numerics
from app.core.grids import along_axis, ball_integral, box_field, shell_field
from app.core.nfunction_engine import NFunctionHandle
from app.core.sobolev_conjugate import CompanionFunction
from app.errors import InputError
from app.models.catalog import FamilyKind
from app.models.fields import SampledField
from app.models.probes import (
    BrezisLiebReport, CompactnessReport, LionsReport, ModularRelationReport, RatioScan, TrendVerdict,
)
from app.models.reports import CheckResult, Verdict

logger = logging.getLogger(__name__)

TREND_WINDOW = 8
MAX_CELLS_PER_AXIS = 64
GAUSSIAN_CUTOFF = 4.0
TRANSLATION_STEP = 3.0
WEAK_TEST_CENTERS = 5
GAP_ROUNDING = 1e-12
CENTER_SPACING = 0.5
BALL_SHELLS = 512


def bump(rho: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """exp(1 - 1/(1 - rho^2)) on rho < 1 with |d/drho|; equal to 1 at the origin."""
    rho = np.asarray(rho, dtype=float)
    inside = rho < 1.0
    safe = np.where(inside, rho, 0.0)
    gap = 1.0 - safe ** 2
    value = np.where(inside, np.exp(1.0 - 1.0 / gap), 0.0)
    slope = np.where(inside, value * 2.0 * safe / gap ** 2, 0.0)
    return value, slope


def tent(rho: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    rho = np.asarray(rho, dtype=float)
    return np.clip(1.0 - rho, 0.0, None), np.where(rho < 1.0, 1.0, 0.0)


def gaussian(rho: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """exp(-rho^2) cut off at GAUSSIAN_CUTOFF."""
    rho = np.asarray(rho, dtype=float)
    inside = rho < GAUSSIAN_CUTOFF
    value = np.where(inside, np.exp(-rho ** 2), 0.0)
    return value, 2.0 * rho * value


PROFILES = {
    FamilyKind.TRANSLATING_BUMP: (bump, 1.0),
    FamilyKind.SPREADING_BUMP: (bump, 1.0),
    FamilyKind.RADIAL_BUMP: (bump, 1.0),
    FamilyKind.TENT: (tent, 1.0),
    FamilyKind.GAUSSIAN_LIKE: (gaussian, GAUSSIAN_CUTOFF),
}


@dataclass(frozen=True)
class TestFamily:
    """
    Indexed sequence u_1, u_2, ... of radial profiles w.

    * translating-bump: w(|x - y_n| / scale) with y_n = 3 n^2 scale e1.
    * spreading-bump, tent, gaussian-like: s_n^{-a} w(|x| / s_n) with
      s_n = scale growth^n; growth > 1 spreads, growth < 1 concentrates.
    * radial-bump: growth^n w(|x| / scale), the scalings of one bump.
    """

    __test__ = False

    kind: FamilyKind
    d: int
    count: int = 16
    scale: float = 1.0
    growth: float = 1.25
    amplitude_power: float = 1.5
    shells: int = 128
    spacing: float = 0.25

    def __post_init__(self):
        if self.count < 1 or self.scale <= 0 or self.growth <= 0 or self.shells < 2 or self.spacing <= 0:
            raise InputError("test family needs count >= 1 and positive scale, growth, shells and spacing")

    @property
    def radial(self) -> bool:
        return self.kind != FamilyKind.TRANSLATING_BUMP

    def _check_index(self, n: int):
        if not 1 <= n <= self.count:
            raise InputError(f"family index {n} outside 1..{self.count}")

    def width(self, n: int) -> float:
        if self.kind in (FamilyKind.TRANSLATING_BUMP, FamilyKind.RADIAL_BUMP):
            return self.scale
        return self.scale * self.growth ** n

    def amplitude(self, n: int) -> float:
        if self.kind == FamilyKind.TRANSLATING_BUMP:
            return 1.0
        if self.kind == FamilyKind.RADIAL_BUMP:
            return self.growth ** n
        return self.width(n) ** (-self.amplitude_power)

    def center(self, n: int) -> np.ndarray:
        center = np.zeros(self.d)
        if self.kind == FamilyKind.TRANSLATING_BUMP:
            center[0] = TRANSLATION_STEP * n ** 2 * self.scale
        return center

    def support_radius(self, n: int) -> float:
        return self.width(n) * PROFILES[self.kind][1]

    def profile(self, n: int, r: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Values and gradient magnitudes at distance r from the center."""
        shape, _ = PROFILES[self.kind]
        width = self.width(n)
        value, slope = shape(np.asarray(r, dtype=float) / width)
        amplitude = self.amplitude(n)
        return amplitude * value, amplitude * slope / width

    def evaluate(self, n: int, points) -> Tuple[np.ndarray, np.ndarray]:
        self._check_index(n)
        points = numerics.as_points(points, self.d)
        return self.profile(n, np.linalg.norm(points - self.center(n), axis=1))

    def member(self, n: int) -> SampledField:
        """Radial shells over the support for radial kinds, a box around the bump otherwise."""
        self._check_index(n)
        if self.radial:
            return shell_field(lambda r: self.profile(n, r), self.support_radius(n), self.shells, self.d)
        return self.box_member(n, self.spacing)

    def box_member(self, n: int, spacing: Optional[float] = None) -> SampledField:
        """Box around the support; the spacing is coarsened to at most MAX_CELLS_PER_AXIS cells per axis."""
        self._check_index(n)
        half_width = self.support_radius(n)
        spacing = max(spacing or self.spacing, 2.0 * half_width / MAX_CELLS_PER_AXIS)
        return box_field(lambda x: self.evaluate(n, x), self.d, half_width, spacing, self.center(n))

    def member_on(self, n: int, grid: SampledField) -> SampledField:
        values, gradient = self.evaluate(n, grid.points)
        return grid.with_values(values, gradient)

    def common_grid(self) -> SampledField:
        """One grid carrying every member, for probes that combine members."""
        if self.radial:
            radius = max(self.support_radius(n) for n in range(1, self.count + 1))
            return shell_field(lambda r: (np.zeros(r.shape), np.zeros(r.shape)), radius, self.shells, self.d)
        boxes = [self.box_member(n) for n in range(1, self.count + 1)]
        points = np.concatenate([box.points for box in boxes])
        return SampledField(
            points=points,
            weights=np.concatenate([box.weights for box in boxes]),
            values=np.zeros(points.shape[0]),
            gradient=np.zeros(points.shape[0]),
            truncation_radius=max(box.truncation_radius for box in boxes),
        )


def make_family(kind, d: int, **options) -> TestFamily:
    return TestFamily(kind=FamilyKind(kind), d=d, **options)


def weighted_sobolev_norm(handle: NFunctionHandle, u: SampledField) -> float:
    """
    ||grad u||_H + ||u||_{H,V}.

    Raises:
        InputError: the field carries no gradient.
    """
    return handle.luxemburg_norm(u.gradient_field()) + handle.luxemburg_norm(u, weight_by_V=True)


def unweighted_sobolev_norm(handle: NFunctionHandle, u: SampledField) -> float:
    return handle.luxemburg_norm(u.gradient_field()) + handle.luxemburg_norm(u)


def companion_norm(comp: CompanionFunction, u: SampledField) -> float:
    """Luxemburg norm of u in the Orlicz space of the companion."""
    magnitude = np.abs(u.values)
    return numerics.luxemburg(lambda s: float(np.sum(u.weights * comp.evaluate(u.points, s * magnitude))), u.sup)


def _trend(values: Sequence[float]) -> Tuple[float, float, bool]:
    """Kendall tau and log growth rate of the last members, and whether they diverge."""
    values = np.asarray(values, dtype=float)
    tail = values[-TREND_WINDOW:]
    divergent = numerics.grows_without_bound(values, TREND_WINDOW) or numerics.keeps_growing(values, TREND_WINDOW)
    return numerics.kendall_tau(tail), numerics.log_growth_rate(tail), divergent


def embedding_ratio_scan(handle: NFunctionHandle, target: CompanionFunction, family: TestFamily,
                         count: Optional[int] = None) -> RatioScan:
    """
    Ratios ||u_n||_target / ||u_n||_{W_V} along a family.

    Args:
        handle (NFunctionHandle): the model's evaluator.
        target (CompanionFunction): H, H_*, a companion, or t^r for L^r.
        family (TestFamily): the test sequence.
        count (Optional[int]): number of members, the family's own count by default.

    Returns:
        RatioScan: ratios and a divergent / bounded verdict; divergent when the last
            members double or grow at a log rate that does not saturate.
    """
    count = count or family.count
    scan = RatioScan(target=target.label, family=family.kind.value)
    for n in range(1, count + 1):
        u = family.member(n)
        if u.sup == 0:
            logger.info("Skipping zero member %d of %s", n, family.kind.value)
            scan.skipped.append(n)
            continue
        sobolev = weighted_sobolev_norm(handle, u)
        target_norm = companion_norm(target, u)
        scan.indices.append(n)
        scan.sobolev_norms.append(sobolev)
        scan.target_norms.append(target_norm)
        scan.ratios.append(target_norm / sobolev)

    if scan.ratios:
        scan.kendall_tau, rate, divergent = _trend(scan.ratios)
        scan.growth_rate = None if np.isnan(rate) else rate
        scan.verdict = TrendVerdict.DIVERGENT if divergent else TrendVerdict.BOUNDED
    return scan


def center_lattice(center: np.ndarray, radius: float) -> np.ndarray:
    """Ball centers of the lattice (CENTER_SPACING radius) Z^d in the cell block around center."""
    center = np.asarray(center, dtype=float)
    spacing = CENTER_SPACING * radius
    base = np.floor(center / spacing)
    block = np.meshgrid(*([np.arange(-1, 3)] * center.size), indexing="ij")
    offsets = np.stack([b.ravel() for b in block], axis=1)
    return spacing * (base + offsets)


def ball_sup(handle: NFunctionHandle, family: TestFamily, n: int, radius: float) -> float:
    """
    sup over lattice centers y of the integral of H(x, |u_n|) over B(y, radius).

    The lattice has spacing CENTER_SPACING radius whatever the field's own
    grid. Members are radially nonincreasing about their center, so the sup
    is attained in the lattice block around it; each ball integral weights
    the shells by the part of the sphere inside the ball.
    """
    if radius <= 0:
        raise InputError("ball radius must be positive")
    c = family.center(n)

    def density(s):
        values, _ = family.profile(n, s)
        return handle.eval_H(along_axis(s, family.d, c), np.abs(values))

    distances = np.unique(np.round(np.linalg.norm(center_lattice(c, radius) - c, axis=1), 12))
    support = family.support_radius(n)
    return max(ball_integral(family.d, density, support, float(D), radius, BALL_SHELLS) for D in distances)


def weak_pairings(u: SampledField) -> float:
    """max_k |<u, phi_k>| over unit gaussians centered at k e1, k = 0..4."""
    pairings = []
    for k in range(WEAK_TEST_CENTERS):
        offset = u.points.copy()
        offset[:, 0] -= float(k)
        phi = np.exp(-np.sum(offset ** 2, axis=1))
        pairings.append(abs(float(np.sum(u.weights * u.values * phi))))
    return max(pairings)


def lions_vanishing_probe(handle: NFunctionHandle, family: TestFamily, comp: CompanionFunction,
                          radius: float = 1.0, count: Optional[int] = None) -> LionsReport:
    """
    Vanishing in the ball-sup sense against convergence in L^V.

    Raises:
        InputError: the sequence is not bounded in W^{1,H}.
    """
    count = count or family.count
    report = LionsReport(family=family.kind.value, companion=comp.label, radius=radius)
    for n in range(1, count + 1):
        u = family.box_member(n)
        report.indices.append(n)
        report.ball_sup.append(ball_sup(handle, family, n, radius))
        report.companion_norms.append(companion_norm(comp, u))
        report.sobolev_norms.append(unweighted_sobolev_norm(handle, u))
        report.weak_pairings.append(weak_pairings(u))

    if numerics.grows_without_bound(report.sobolev_norms, TREND_WINDOW):
        raise InputError(f"{family.kind.value} sequence is unbounded in W^(1,H)")
    report.weakly_null = numerics.tends_to_zero(report.weak_pairings, TREND_WINDOW)
    if not numerics.tends_to_zero(report.ball_sup, TREND_WINDOW):
        report.verdict = TrendVerdict.NON_VANISHING
    elif numerics.tends_to_zero(report.companion_norms, TREND_WINDOW):
        report.verdict = TrendVerdict.LIONS_CONSISTENT
    else:
        report.verdict = TrendVerdict.LIONS_INCONSISTENT
        logger.warning("Vanishing %s sequence does not tend to zero in L^%s", family.kind.value, comp.label)
    return report


def brezis_lieb_gap(handle: NFunctionHandle, u: SampledField, shifts: Sequence[SampledField]) -> BrezisLiebReport:
    """g_n = rho_H(u + v_n) - rho_H(v_n) - rho_H(u) for fields v_n on the grid of u."""
    report = BrezisLiebReport()
    rho_u = handle.modular(u)
    for v in shifts:
        if not u.same_grid(v):
            raise InputError("Brezis-Lieb shifts must share the grid of u")
        combined = u.with_values(u.values + v.values)
        rho_v = handle.modular(v)
        gap = handle.modular(combined) - rho_v - rho_u
        # summation order leaves residues at rounding level for disjoint supports
        if abs(gap) <= GAP_ROUNDING * max(1.0, rho_u + rho_v):
            gap = 0.0
        report.gaps.append(gap)
    gaps = np.abs(report.gaps)
    if gaps.size and not numerics.tends_to_zero(gaps, TREND_WINDOW):
        report.verdict = TrendVerdict.INCONSISTENT
    return report


def brezis_lieb_probe(handle: NFunctionHandle, family: TestFamily) -> BrezisLiebReport:
    """Gap of the first member against the whole family on one common grid."""
    grid = family.common_grid()
    u = family.member_on(1, grid)
    shifts = [family.member_on(n, grid) for n in range(1, family.count + 1)]
    return brezis_lieb_gap(handle, u, shifts)


def compactness_probe(handle: NFunctionHandle, family: TestFamily, count: Optional[int] = None) -> CompactnessReport:
    """
    ||u_n||_H / ||u_n||_{W_V} must tend to zero along weakly null sequences when V is coercive.

    Refused when the potential has a finite limit at infinity.
    """
    report = CompactnessReport(family=family.kind.value)
    if np.isfinite(handle.model.potential.limit):
        report.verdict = TrendVerdict.REFUSED
        report.detail = f"V tends to {handle.model.potential.limit:g} at infinity; the embedding is not compact"
        logger.info(report.detail)
        return report
    scan = embedding_ratio_scan(handle, CompanionFunction.from_nfunction(handle), family, count)
    report.ratios = scan.ratios
    if not numerics.tends_to_zero(scan.ratios, TREND_WINDOW):
        report.verdict = TrendVerdict.INCONSISTENT
    return report


def _modular_pair(handle: NFunctionHandle, u: SampledField) -> Tuple[float, float]:
    modular = handle.modular(u.gradient_field()) + handle.modular(u, weight_by_V=True)
    return modular, weighted_sobolev_norm(handle, u)


def modular_relation(handle: NFunctionHandle, u: SampledField, scalings: Optional[Sequence[float]] = None,
                     rtol: float = 1e-8) -> ModularRelationReport:
    """
    Compare rho(u) = rho_H(|grad u|) + rho_{H,V}(u) with the norm n = ||u||_{W_V}.

    Checks 2^{-q^+} min{n^{p^-}, n^{q^+}} <= rho(u) <= max{n^{p^-}, n^{q^+}}, and
    that rho(tu) and ||tu|| go to zero and to infinity together along the scalings.
    """
    model = handle.model
    p, q = model.p_minus, model.q_plus
    scalings = np.geomspace(1e-3, 1e3, 13) if scalings is None else np.asarray(scalings, dtype=float)

    modular, norm = _modular_pair(handle, u)
    upper = max(norm ** p, norm ** q)
    lower = 2.0 ** (-q) * min(norm ** p, norm ** q)
    slack = rtol * max(1.0, upper)
    report = ModularRelationReport(modular=modular, norm=norm, lower=lower, upper=upper)
    report.checks.append(CheckResult(
        condition="modular upper bound",
        verdict=Verdict.PASS if modular <= upper + slack else Verdict.FAIL,
        witness={"modular": modular, "bound": upper},
    ))
    report.checks.append(CheckResult(
        condition="modular lower bound",
        verdict=Verdict.PASS if modular >= lower - slack else Verdict.FAIL,
        witness={"modular": modular, "bound": lower},
    ))

    for t in scalings:
        scaled_modular, scaled_norm = _modular_pair(handle, u.scaled(float(t)))
        report.scalings.append(float(t))
        report.scaled_modulars.append(scaled_modular)
        report.scaled_norms.append(scaled_norm)
    modulars = np.asarray(report.scaled_modulars)
    norms = np.asarray(report.scaled_norms)
    together = bool(
        np.all(np.diff(modulars) > 0) and np.all(np.diff(norms) > 0)
        and (modulars[0] < 1.0) == (norms[0] < 1.0) and (modulars[-1] > 1.0) == (norms[-1] > 1.0)
    )
    report.checks.append(CheckResult(
        condition="modular-norm scaling",
        verdict=Verdict.PASS if together else Verdict.FAIL,
        heuristic=True,
        witness={"first": [modulars[0], norms[0]], "last": [modulars[-1], norms[-1]]},
    ))
    return report


def probe_sequence(family: TestFamily) -> List[SampledField]:
    return [family.member(n) for n in range(1, family.count + 1)]
