import numpy as np
import pytest
from hypothesis import given, strategies as st

from app.core.exponent_models import make_model, make_nonlinearity, validate_hypotheses
from app.errors import ModelError
from app.models.catalog import NonlinearityConfig, NonlinearityKind, SamplingConfig, WeightKind
from app.models.reports import Verdict

SMALL = SamplingConfig(radii=8, directions=4, t_values=16, monte_carlo=256)


def test_constant_model_bounds(model):
    assert model.p_minus == 2.0
    assert model.q_plus == 2.5
    assert model.p_critical == pytest.approx(6.0)
    assert model.x_homogeneous
    assert not model.t_dependent


def test_unknown_catalog_id_is_rejected():
    with pytest.raises(ModelError):
        make_model("no_such_family", {})


def test_q_ratio_violating_hiv_is_rejected():
    # q^+/p^- = 1.5 >= 1 + 1/3
    with pytest.raises(ModelError, match="1 \\+ 1/d"):
        make_model("constant", {"d": 3, "p": 2.0, "q": 3.0})


def test_nonpositive_potential_floor_is_rejected():
    with pytest.raises(ModelError):
        make_model("constant", {"v0": 0.0})


def test_family_restrictions():
    with pytest.raises(ModelError):
        make_model("log_saturating", {"p_x_amplitude": 0.1})
    with pytest.raises(ModelError):
        make_model("x_modulated", {"q_t_amplitude": 0.1})


def test_diagnostic_mode_accepts_equal_exponents():
    model = make_model("constant", {"p": 2.0, "q": 2.0}, strict=False)
    assert not model.strict
    assert model.q_plus == model.p_minus


@given(t=st.floats(min_value=0.0, max_value=1.0))
def test_log_saturating_exponent_constant_below_one(t):
    model = make_model("log_saturating", {"p": 2.0, "q": 2.3, "p_t_amplitude": 0.1, "q_t_amplitude": 0.1})
    x = np.zeros((1, 3))
    assert model.p.eval(x, np.array([t]))[0] == pytest.approx(2.0)
    assert model.q.eval(x, np.array([t]))[0] == pytest.approx(2.3)


@given(t=st.floats(min_value=1.0, max_value=1e8), r=st.floats(min_value=0.0, max_value=100.0))
def test_exponents_stay_within_declared_bounds(t, r):
    model = make_model("log_saturating", {"p": 2.0, "q": 2.3, "p_t_amplitude": 0.1, "q_t_amplitude": 0.1})
    x = np.array([[r, 0.0, 0.0]])
    p = model.p.eval(x, np.array([t]))[0]
    q = model.q.eval(x, np.array([t]))[0]
    assert model.p_minus <= p <= model.p_plus
    assert model.q_minus <= q <= model.q_plus
    assert p < q


def test_decaying_weight_limit():
    model = make_model("constant", {"weight": WeightKind.DECAYING, "mu": 2.0})
    assert model.mu_sup == 2.0
    assert model.mu_inf == 0.0
    assert model.mu(np.array([1.0, 0.0, 0.0]))[0] == pytest.approx(1.0)


def test_validate_reports_hiv_with_witness():
    model = make_model("constant", {"d": 3, "p": 2.0, "q": 3.0}, strict=False)
    report = validate_hypotheses(model, sampling=SMALL)

    check = report.check("(H)(iv)")
    assert check.verdict == Verdict.FAIL
    assert check.witness["q_plus/p_minus"] == pytest.approx(1.5)
    assert check.witness["1+1/d"] == pytest.approx(4.0 / 3.0)
    assert report.failed


def test_validate_bounded_potential_fails_sublevel_condition():
    model = make_model("constant", {"v0": 1.0, "v2": 0.0})
    report = validate_hypotheses(model, sampling=SMALL)

    check = report.check("(V0)(ii)")
    assert check.verdict == Verdict.FAIL
    assert check.witness["L"] == pytest.approx(2.0)


def test_validate_worked_model_passes(model, log_nl):
    report = validate_hypotheses(model, log_nl, SMALL)

    for condition in ("(H)(i) bounds", "(H)(i) ordering", "(H)(ii) constant on [0,1]", "(H)(ii) monotone",
                      "(H)(iii) Lipschitz", "(H)(iv)", "(V0)(i)", "(V0)(ii)", "(F)(i) majorant", "(F)(i) exponents",
                      "(F) primitive"):
        assert report.verdict_of(condition) == Verdict.PASS, condition
    assert report.verdict_of("(V1)(ii)") == Verdict.CONSISTENT


def test_log_nonlinearity_growth_condition_with_sigma_two(model):
    nl = make_nonlinearity(NonlinearityConfig(kind=NonlinearityKind.LOG_SUPERLINEAR, sigma=2.0), model)
    report = validate_hypotheses(model, nl, SMALL)

    check = report.check("(F)(iv)")
    assert check.verdict == Verdict.PASS
    window = report.check("(F)(iv) sigma window").witness
    assert window["lower"] == pytest.approx(1.5)
    assert window["upper"] == pytest.approx(2.5 / 1.5)


def test_nonlinearity_defaults(model, well_nl):
    log_nl = make_nonlinearity(None, model)
    assert log_nl.exponent == pytest.approx(2.5)
    assert log_nl.b_minus == pytest.approx(3.0)
    assert well_nl.c_b == pytest.approx(10.0 + 1e-3)
    assert well_nl.r0 == pytest.approx(2.0 * (10.0 * 2.5 ** 2 / 1e-3) ** (1.0 / 2.5))


def test_power_nonlinearity_exponent_range(model):
    with pytest.raises(ModelError):
        make_nonlinearity(NonlinearityConfig(kind=NonlinearityKind.POWER, exponent=7.0), model)
    nl = make_nonlinearity(NonlinearityConfig(kind=NonlinearityKind.POWER), model)
    assert model.q_plus < nl.exponent < model.p_critical


@pytest.mark.parametrize("kind", list(NonlinearityKind))
def test_primitive_matches_nonlinearity(model, kind):
    nl = make_nonlinearity(NonlinearityConfig(kind=kind), model)
    t = np.geomspace(1e-2, 1e2, 25)
    step = 1e-6 * t
    derivative = (nl.F(None, t + step) - nl.F(None, t - step)) / (2.0 * step)
    assert np.allclose(derivative, nl.f(None, t), rtol=1e-5, atol=1e-9)


def test_example_nonlinearity_F_tilde_closed_form(model):
    nl = make_nonlinearity(None, model)
    a = np.geomspace(1e-3, 1e3, 25)
    t = np.concatenate([-a, a])
    expected = np.abs(t) ** 3.5 / (2.5 ** 2 * (1.0 + np.abs(t)))
    assert np.allclose(nl.F_tilde(np.zeros(3), t, model.q_plus), expected, rtol=1e-10, atol=0.0)
