import numpy as np
import pytest
from scipy import integrate, optimize

from app.core import numerics
from app.core.embedding_lab import (
    ball_sup, brezis_lieb_gap, brezis_lieb_probe, bump, compactness_probe, embedding_ratio_scan,
    lions_vanishing_probe, make_family, modular_relation, probe_sequence, weak_pairings,
    weighted_sobolev_norm,
)
from app.core.exponent_models import make_model
from app.core.grids import ball_integral, shell_field
from app.core.nfunction_engine import NFunctionHandle
from app.core.sobolev_conjugate import CompanionFunction
from app.errors import InputError
from app.models.fields import SampledField
from app.models.probes import TrendVerdict
from app.models.reports import Verdict


def test_bump_profile():
    value, slope = bump(np.array([0.0, 0.5, 1.0, 2.0]))
    assert value[0] == pytest.approx(1.0)
    assert value[1] == pytest.approx(np.exp(1.0 - 1.0 / 0.75))
    assert value[2] == 0.0 and value[3] == 0.0
    assert slope[0] == 0.0 and slope[3] == 0.0


def test_translating_family_layout():
    family = make_family("translating-bump", 3, count=4)
    assert np.allclose(family.center(2), [12.0, 0.0, 0.0])
    values, _ = family.evaluate(2, family.center(2))
    assert values[0] == pytest.approx(1.0)
    member = family.member(2)
    assert member.shape == (8, 8, 8)
    assert member.spacing == pytest.approx(0.25)


def test_spreading_family_amplitude():
    family = make_family("spreading-bump", 3, growth=2.0, amplitude_power=1.5)
    assert family.width(2) == pytest.approx(4.0)
    assert family.amplitude(2) == pytest.approx(4.0 ** -1.5)
    assert family.member(2).sup == pytest.approx(0.125, rel=1e-2)


def test_family_rejects_bad_index_and_options():
    family = make_family("tent", 3, count=4)
    with pytest.raises(InputError):
        family.member(5)
    with pytest.raises(InputError):
        make_family("tent", 3, count=0)
    with pytest.raises(ValueError):
        make_family("spiral", 3)


def test_test_sequence_length():
    assert len(probe_sequence(make_family("gaussian-like", 3, count=5))) == 5


def test_ratio_scan_against_H_is_bounded(handle):
    family = make_family("translating-bump", 3, count=12)
    scan = embedding_ratio_scan(handle, CompanionFunction.from_nfunction(handle), family)
    assert scan.indices == list(range(1, 13))
    assert len(scan.ratios) == 12
    assert scan.verdict == TrendVerdict.BOUNDED
    # V grows along the translations, so the ratio drops
    assert scan.kendall_tau < 0


def test_lions_check_on_translations_is_non_vanishing(handle):
    family = make_family("translating-bump", 3, count=10)
    report = lions_vanishing_probe(handle, family, CompanionFunction.power(3.0))
    assert report.verdict == TrendVerdict.NON_VANISHING
    assert report.weakly_null
    assert report.ball_sup[-1] == pytest.approx(report.ball_sup[0], rel=1e-9)


def test_lions_check_on_spreading_bumps_is_consistent(handle):
    family = make_family("spreading-bump", 3, count=10, growth=1.5)
    report = lions_vanishing_probe(handle, family, CompanionFunction.power(3.0))
    assert report.verdict == TrendVerdict.LIONS_CONSISTENT
    assert report.weakly_null


def test_lions_check_refuses_unbounded_sequences(handle):
    family = make_family("radial-bump", 3, count=10)
    with pytest.raises(InputError, match="unbounded"):
        lions_vanishing_probe(handle, family, CompanionFunction.power(3.0))


def test_ball_sup_catches_a_bump_between_lattice_points(handle):
    # centered at 0.25 e1, halfway between the ball centers 0 and 0.5 e1
    family = make_family("translating-bump", 3, count=1, scale=1.0 / 12.0)
    assert family.center(1)[0] == pytest.approx(0.25)
    whole = shell_field(lambda r: family.profile(1, r), family.support_radius(1), 256, 3, family.center(1))
    assert ball_sup(handle, family, 1, 1.0) == pytest.approx(handle.modular(whole), rel=1e-3)


def test_ball_sup_of_a_wide_bump_uses_the_nearest_center(handle):
    family = make_family("spreading-bump", 3, count=4, growth=2.0)
    assert ball_sup(handle, family, 4, 0.5) > ball_sup(handle, family, 4, 0.25)
    with pytest.raises(InputError):
        ball_sup(handle, family, 4, 0.0)


@pytest.mark.parametrize("distance", [0.0, 0.3, 0.9, 1.7])
def test_ball_integral_of_a_constant_density_is_the_ball_volume(distance):
    volume = ball_integral(3, np.ones_like, 5.0, distance, 1.0, shells=2048)
    assert volume == pytest.approx(4.0 * np.pi / 3.0, rel=1e-4)


def test_ball_integral_outside_the_support_is_zero():
    assert ball_integral(3, np.ones_like, 1.0, 2.5, 1.0) == 0.0
    # half of a symmetric interval in one dimension
    assert ball_integral(1, np.ones_like, 1.0, 1.0, 1.0) == pytest.approx(1.0, rel=1e-3)


def test_weak_pairings_of_a_far_bump_vanish():
    family = make_family("translating-bump", 3, count=6)
    assert weak_pairings(family.member(6)) == 0.0
    assert weak_pairings(family.member(1)) > 0.0


def test_brezis_lieb_on_disjoint_translations(handle):
    report = brezis_lieb_probe(handle, make_family("translating-bump", 3, count=10))
    assert report.gaps[0] != 0.0
    assert report.gaps[1:] == [0.0] * 9
    assert report.verdict == TrendVerdict.CONSISTENT


def test_brezis_lieb_on_spreading_bumps(handle):
    report = brezis_lieb_probe(handle, make_family("spreading-bump", 3, count=12, growth=1.5))
    assert abs(report.gaps[-1]) < abs(report.gaps[1])
    assert report.verdict == TrendVerdict.CONSISTENT


def test_brezis_lieb_rejects_mismatched_grids(handle):
    u = shell_field(lambda r: (1.0 - r, np.ones(r.shape)), 1.0, 16, 3)
    v = shell_field(lambda r: (1.0 - r, np.ones(r.shape)), 1.0, 32, 3)
    with pytest.raises(InputError):
        brezis_lieb_gap(handle, u, [v])


def test_brezis_lieb_flags_a_persistent_gap(handle):
    u = shell_field(lambda r: (1.0 - r, np.ones(r.shape)), 1.0, 32, 3)
    report = brezis_lieb_gap(handle, u, [u] * 10)
    assert report.verdict == TrendVerdict.INCONSISTENT


def test_compactness_with_coercive_potential(handle):
    report = compactness_probe(handle, make_family("translating-bump", 3, count=10))
    assert report.verdict == TrendVerdict.CONSISTENT
    assert report.ratios[-1] < 0.5 * report.ratios[2]


def test_compactness_refused_for_bounded_potential():
    flat = NFunctionHandle(make_model("constant", {"d": 3, "p": 2.0, "q": 2.5, "v0": 1.0, "v2": 0.0}))
    report = compactness_probe(flat, make_family("translating-bump", 3, count=4))
    assert report.verdict == TrendVerdict.REFUSED
    assert report.ratios == []


def test_modular_relation_holds_for_a_bump(handle):
    u = make_family("spreading-bump", 3, growth=1.0).member(1)
    report = modular_relation(handle, u)
    assert all(check.verdict == Verdict.PASS for check in report.checks)
    assert report.lower <= report.modular <= report.upper
    assert len(report.scaled_norms) == 13
    assert "witness_index" not in report.model_dump()


def test_modular_relation_checks_named(handle):
    u = make_family("tent", 3, growth=1.0).member(1)
    report = modular_relation(handle, u, scalings=[0.01, 1.0, 100.0])
    assert [check.condition for check in report.checks] == [
        "modular upper bound", "modular lower bound", "modular-norm scaling",
    ]


def test_missing_gradient_is_an_input_error(handle):
    field = SampledField(points=np.zeros((1, 3)), weights=np.ones(1), values=np.ones(1), truncation_radius=0.0)
    with pytest.raises(InputError):
        weighted_sobolev_norm(handle, field)


@pytest.fixture
def flat_handle():
    """p = 2, q = 2.5, mu = 1 with V = 1."""
    return NFunctionHandle(make_model("constant", {"d": 3, "p": 2.0, "q": 2.5, "mu": 1.0, "v0": 1.0, "v2": 0.0}))


def tent_field(shells: int):
    return shell_field(lambda r: (np.maximum(0.0, 1.0 - r), np.ones(r.shape)), 1.0, shells, 3)


def reference_tent_norm() -> float:
    def H(t):
        return t ** 2 / 2.0 + t ** 2.5 / 2.5

    volume = 4.0 * np.pi / 3.0
    gradient = optimize.brentq(lambda lam: volume * H(1.0 / lam) - 1.0, 1e-3, 1e3, xtol=1e-14)
    values = optimize.brentq(
        lambda lam: integrate.quad(lambda r: 4.0 * np.pi * r ** 2 * H((1.0 - r) / lam), 0.0, 1.0)[0] - 1.0,
        1e-3, 1e3, xtol=1e-14,
    )
    return gradient + values


def test_tent_norm_matches_reference_quadrature(flat_handle):
    norm = weighted_sobolev_norm(flat_handle, tent_field(256))
    assert norm > 0
    assert norm == pytest.approx(reference_tent_norm(), rel=1e-3)
    assert weighted_sobolev_norm(flat_handle, tent_field(256)) == pytest.approx(norm, rel=1e-8)


def test_tent_norm_is_homogeneous_and_mesh_stable(flat_handle):
    u = tent_field(128)
    norm = weighted_sobolev_norm(flat_handle, u)
    assert weighted_sobolev_norm(flat_handle, u.scaled(2.0)) == pytest.approx(2.0 * norm, rel=1e-7)
    assert weighted_sobolev_norm(flat_handle, tent_field(256)) == pytest.approx(norm, rel=0.02)
    assert weighted_sobolev_norm(flat_handle, u.scaled(0.0)) == 0.0


def test_lebesgue_ratio_scan_is_mesh_stable(handle):
    maxima = []
    for shells in (128, 256):
        family = make_family("radial-bump", 3, count=20, growth=1.1, shells=shells)
        scan = embedding_ratio_scan(handle, CompanionFunction.power(2.0), family)
        maxima.append(max(scan.ratios))
    assert np.isfinite(maxima[0])
    assert maxima[1] == pytest.approx(maxima[0], rel=0.02)


def test_ratio_scan_beyond_the_critical_exponent_diverges(p2_handle):
    # L^7 against W^(1,2) concentrating at scale s behaves like s^(-1/14)
    family = make_family("spreading-bump", 3, count=16, growth=0.8)
    scan = embedding_ratio_scan(p2_handle, CompanionFunction.power(7.0), family)
    assert scan.verdict == TrendVerdict.DIVERGENT
    assert scan.kendall_tau > 0.6
    assert scan.growth_rate > np.log(1.25) / 14.0 * 0.9


def test_ratio_scan_beyond_the_critical_exponent_on_spreading_bumps_is_bounded(p2_handle):
    scan = embedding_ratio_scan(p2_handle, CompanionFunction.power(7.0), make_family("spreading-bump", 3, count=16))
    assert scan.verdict == TrendVerdict.BOUNDED
    assert scan.ratios[-1] < scan.ratios[0]


def test_keeps_growing_separates_power_laws_from_saturation():
    n = np.arange(1, 17)
    assert numerics.keeps_growing(1.02 ** n)
    assert not numerics.keeps_growing(1.0 - 0.5 ** n)
    assert not numerics.keeps_growing(np.full(16, 2.0))
    assert numerics.log_growth_rate(1.02 ** n) == pytest.approx(np.log(1.02))
