from functools import lru_cache

import numpy as np
import pytest
from hypothesis import given, strategies as st

from app.core.certificate import (
    compute_alpha, compute_certificate, cone, feasibility_search, gamma_bar_from_constant,
    gamma_lower_bound, rho, sup_potential, tilde_u_profile,
)
from app.core.embedding_lab import make_family, probe_sequence
from app.core.exponent_models import make_model, make_nonlinearity
from app.core.grids import shell_field
from app.core.nfunction_engine import NFunctionHandle
from app.errors import InputError
from app.models.catalog import NonlinearityConfig, NonlinearityKind
from app.models.reports import Provenance


@pytest.fixture
def certificate(model, log_nl, handle):
    return compute_certificate(model, log_nl, R=1.0, eta=1.0, r=25.0, gamma_bar=1.0, handle=handle)


def test_worked_example_constants(certificate):
    assert certificate.omega_R == pytest.approx(4.0 * np.pi / 3.0, rel=1e-12)
    assert certificate.V_inf == pytest.approx(2.0, rel=1e-9)
    assert certificate.delta == pytest.approx(0.040126, abs=5e-6)
    assert certificate.alpha_r == pytest.approx(19.76, abs=5e-3)
    assert certificate.beta_eta == pytest.approx(0.00583, rel=1e-2)


def test_worked_example_is_not_admissible(certificate):
    assert certificate.cond_H1
    assert not certificate.cond_H2
    assert certificate.Lambda is None
    assert not certificate.admissible
    assert certificate.gamma_provenance == Provenance.USER_SUPPLIED


def test_rho_of_tilde_u_is_below_its_bound(certificate):
    assert certificate.rho_tilde_u <= certificate.rho_bound
    assert certificate.rho_bound == pytest.approx(1.0 / certificate.delta)


def test_sup_potential_on_shifted_ball(model):
    # V = 1 + |x|^2 peaks at the far side of B((1,0,0), 1)
    assert sup_potential(model, np.array([1.0, 0.0, 0.0]), 1.0) == pytest.approx(5.0, rel=1e-9)


def test_alpha_is_linear_in_gamma_bar(model, log_nl):
    r = np.geomspace(0.1, 1e4, 9)
    assert np.allclose(compute_alpha(model, log_nl, r, 3.0), 3.0 * compute_alpha(model, log_nl, r, 1.0))


def test_gamma_bar_from_constant(log_nl):
    assert gamma_bar_from_constant(2.0, log_nl) == pytest.approx(8.0)
    assert gamma_bar_from_constant(0.5, log_nl) == pytest.approx(0.125)


def test_zero_nonlinearity_never_certifies(model):
    zero = make_nonlinearity(NonlinearityConfig(kind=NonlinearityKind.ZERO), model)
    certificate = compute_certificate(model, zero, eta=1.0, r=25.0)
    assert certificate.integral_F == 0.0
    assert certificate.beta_eta == 0.0
    assert certificate.cond_H1
    assert not certificate.cond_H2
    assert certificate.Lambda is None


@pytest.mark.parametrize("R, eta, r, gamma_bar", [(0.0, 1.0, 25.0, 1.0), (1.0, -1.0, 25.0, 1.0),
                                                  (1.0, 1.0, 0.0, 1.0), (1.0, 1.0, 25.0, 0.0)])
def test_non_positive_parameters_are_rejected(model, log_nl, R, eta, r, gamma_bar):
    with pytest.raises(InputError):
        compute_certificate(model, log_nl, R=R, eta=eta, r=r, gamma_bar=gamma_bar)


def test_diagnostic_models_get_no_certificate(log_nl):
    diagnostic = make_model("constant", {"d": 3, "p": 2.0, "q": 3.0}, strict=False)
    with pytest.raises(InputError):
        compute_certificate(diagnostic, log_nl)


def test_search_over_worked_example_is_infeasible(model, log_nl):
    report = feasibility_search(model, log_nl, grid=16, threads=2)
    assert not report.feasible
    assert report.best is None
    assert report.least_violated is not None
    assert report.violation_gap > 0
    assert report.eta_bounds == (1e-2, 1e2)


def test_search_does_not_depend_on_thread_count(model, log_nl):
    one = feasibility_search(model, log_nl, grid=8, threads=1)
    four = feasibility_search(model, log_nl, grid=8, threads=4)
    assert one.violation_gap == four.violation_gap
    assert one.least_violated.eta == four.least_violated.eta


def test_search_box_must_be_positive(model, log_nl):
    with pytest.raises(InputError):
        feasibility_search(model, log_nl, eta_bounds=(0.0, 1.0))


def test_cone_profile():
    values, gradient = cone(np.array([0.0, 0.25, 0.5, 0.75, 1.0]), 2.0, 1.0)
    assert np.allclose(values, [2.0, 2.0, 2.0, 1.0, 0.0])
    assert np.allclose(gradient, [0.0, 0.0, 0.0, 4.0, 0.0])


def test_tilde_u_rejects_non_positive_eta():
    with pytest.raises(InputError):
        tilde_u_profile(0.0, 1.0)


def test_rho_grows_with_eta(handle):
    small = rho(handle, tilde_u_profile(0.5, 1.0, shells=256))
    large = rho(handle, tilde_u_profile(1.0, 1.0, shells=256))
    assert 0 < small < large


def test_gamma_lower_bound_skips_zero_fields(handle, log_nl):
    zero = shell_field(lambda r: (np.zeros(r.shape), np.zeros(r.shape)), 1.0, 64, 3)
    bump = shell_field(lambda r: (1.0 - r, np.ones(r.shape)), 1.0, 64, 3)
    bound, index = gamma_lower_bound(handle, log_nl, [zero, bump])
    assert bound > 0
    assert index == 1


def test_gamma_lower_bound_is_stable_under_mesh_doubling(handle, log_nl):
    bounds = [
        gamma_lower_bound(handle, log_nl, probe_sequence(make_family("spreading-bump", 3, count=20, shells=shells)))[0]
        for shells in (64, 128)
    ]
    assert bounds[0] > 0
    assert bounds[1] == pytest.approx(bounds[0], rel=0.02)


@lru_cache(maxsize=None)
def worked_setup():
    model = make_model("constant", {"d": 3, "p": 2.0, "q": 2.5, "mu": 1.0, "v0": 1.0, "v2": 1.0})
    nl = make_nonlinearity(NonlinearityConfig(kind=NonlinearityKind.LOG_SUPERLINEAR, b_minus=3.0, b_plus=3.0), model)
    return model, nl, NFunctionHandle(model)


@given(R=st.floats(min_value=0.25, max_value=2.0), eta=st.floats(min_value=0.1, max_value=3.0),
       r=st.floats(min_value=0.5, max_value=100.0))
def test_rho_of_tilde_u_below_r_whenever_318_holds(R, eta, r):
    model, nl, handle = worked_setup()
    certificate = compute_certificate(model, nl, R=R, eta=eta, r=r, gamma_bar=1.0, handle=handle)
    if certificate.cond_318:
        assert certificate.rho_below_r
        assert certificate.rho_tilde_u < r
