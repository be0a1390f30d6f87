import numpy as np
import pytest
from hypothesis import given, strategies as st

from app.core.exponent_models import make_model
from app.core.grids import shell_field
from app.core.nfunction_engine import NFunctionHandle
from app.errors import InputError
from app.models.fields import SampledField

CATALOG = [
    ("constant", {"p": 2.0, "q": 2.5, "mu": 1.0}),
    ("constant", {"p": 2.2, "q": 2.6, "mu": 0.5, "weight": "decaying"}),
    ("log_saturating", {"p": 2.0, "q": 2.3, "p_t_amplitude": 0.1, "q_t_amplitude": 0.2}),
    ("x_modulated", {"p": 2.0, "q": 2.4, "p_x_amplitude": 0.2, "q_x_amplitude": 0.1}),
    ("log_saturating", {"p": 2.1, "q": 2.5, "q_t_amplitude": 0.15, "mu": 2.0}),
]


def unit_node(value: float, d: int = 3) -> SampledField:
    return SampledField(points=np.zeros((1, d)), weights=np.ones(1), values=np.array([value]),
                        truncation_radius=0.0, domain_measure=1.0)


def unit_ball(value: float = 1.0, shells: int = 256) -> SampledField:
    return shell_field(lambda r: (np.full(r.shape, value), np.zeros(r.shape)), 1.0, shells, 3)


def test_closed_form_values(handle, origin):
    assert handle.eval_H(origin, 1.0) == pytest.approx(0.9, rel=1e-12)
    assert handle.eval_H(origin, 2.0) == pytest.approx(4.262741699, rel=1e-9)
    assert handle.eval_H(origin, 0.0) == 0.0
    assert handle.h(origin, 1.0) == pytest.approx(2.0)


def test_negative_t_is_rejected(handle, origin):
    with pytest.raises(InputError):
        handle.eval_H(origin, -1.0)


def test_dimension_mismatch_is_rejected(handle):
    with pytest.raises(InputError):
        handle.eval_H(np.zeros(2), 1.0)


def test_t_dependent_quadrature_matches_derivative():
    handle = NFunctionHandle(make_model(*CATALOG[2]))
    x = np.zeros(3)
    t = np.array([1.5, 5.0, 50.0])
    step = 1e-5 * t
    derivative = (handle.eval_H(x, t + step) - handle.eval_H(x, t - step)) / (2.0 * step)
    assert np.allclose(derivative, handle.h(x, t), rtol=1e-4)


def test_cached_handle_matches_uncached(model, origin):
    cached = NFunctionHandle(model, cache=True)
    plain = NFunctionHandle(model)
    t = np.linspace(0.0, 5.0, 11)
    assert np.array_equal(cached.eval_H(origin, t), plain.eval_H(origin, t))
    assert np.array_equal(cached.eval_H(origin, t), plain.eval_H(origin, t))


@pytest.mark.parametrize("family, params", CATALOG)
def test_ratio_bounds_on_catalog(family, params):
    model = make_model(family, params)
    handle = NFunctionHandle(model)
    points = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 5.0, 0.0]])
    for x in points:
        ratio = handle.ratio(x, np.geomspace(1e-4, 1e6, 40))
        assert np.all(ratio >= model.p_minus - 1e-8)
        assert np.all(ratio <= model.q_plus + 1e-8)


def test_modular_examples(handle):
    ball = unit_ball()
    volume = 4.0 * np.pi / 3.0
    assert handle.modular(ball) == pytest.approx(0.9 * volume, rel=1e-12)
    assert handle.modular(unit_ball(0.0)) == 0.0
    # int_B (1 + |x|^2) = 4 pi / 3 + 4 pi / 5
    weighted = handle.modular(unit_ball(shells=2048), weight_by_V=True)
    assert weighted == pytest.approx(0.9 * (4.0 * np.pi / 3.0 + 4.0 * np.pi / 5.0), rel=1e-5)


def test_luxemburg_norm_examples(p2_handle, handle):
    assert p2_handle.luxemburg_norm(unit_node(2.0)) == pytest.approx(np.sqrt(2.0), rel=1e-9)
    assert p2_handle.luxemburg_norm(unit_node(0.0)) == 0.0
    assert handle.luxemburg_norm(unit_ball()) == pytest.approx(1.826, abs=2e-3)


@given(value=st.floats(min_value=1e-3, max_value=1e3), scale=st.floats(min_value=1e-2, max_value=1e2))
def test_luxemburg_unit_modular_and_homogeneity(value, scale):
    handle = NFunctionHandle(make_model(*CATALOG[0]))
    field = unit_node(value)
    norm = handle.luxemburg_norm(field)
    assert handle.modular(field.scaled(1.0 / norm)) == pytest.approx(1.0, abs=1e-6)
    assert handle.luxemburg_norm(field.scaled(scale)) == pytest.approx(scale * norm, rel=1e-7)


def test_conjugate_examples(p2_handle, handle, origin):
    assert p2_handle.conjugate(origin, 1.0) == pytest.approx(0.5, rel=1e-10)
    assert handle.conjugate(origin, 0.0) == 0.0
    assert handle.conjugate(origin, 2.0) == pytest.approx(1.1, rel=1e-10)
    assert handle.conjugate_argmax(origin, 2.0) == pytest.approx(1.0, rel=1e-12)


def test_young_gap(p2_handle, origin):
    assert p2_handle.young_gap(origin, 1.0, 2.0) == pytest.approx(0.5, rel=1e-10)


@given(tau=st.floats(min_value=0.0, max_value=50.0), sigma=st.floats(min_value=0.0, max_value=50.0))
def test_young_inequality(tau, sigma):
    handle = NFunctionHandle(make_model(*CATALOG[0]))
    assert handle.young_gap(np.zeros(3), tau, sigma) >= -1e-9 * (1.0 + tau * sigma)


@pytest.mark.parametrize("t", [0.5, 1.0, 3.0])
def test_biconjugate_recovers_H(handle, origin, t):
    assert handle.biconjugate(origin, t) == pytest.approx(float(handle.eval_H(origin, t)), rel=1e-7)


def test_conjugate_bound(handle, origin):
    lhs, rhs = handle.conjugate_bound(origin, np.geomspace(1e-3, 1e3, 20))
    assert np.all(lhs <= rhs * (1 + 1e-9))


def test_conjugate_ratio_is_dual(handle, origin):
    ratio = handle.conjugate_ratio(origin, np.geomspace(1e-2, 1e2, 9))
    assert np.all(ratio >= 2.5 / 1.5 - 1e-4)
    assert np.all(ratio <= 2.0 + 1e-4)


def test_holder_pair(handle):
    ball = unit_ball(shells=64)
    v = ball.with_values(np.linspace(0.1, 2.0, ball.size))
    lhs, rhs = handle.holder_pair(ball, v)
    assert lhs <= rhs


def test_holder_pair_rejects_different_grids(handle):
    with pytest.raises(InputError):
        handle.holder_pair(unit_ball(shells=64), unit_ball(shells=32))


def test_characteristic_norm_within_bracket(handle):
    for measure in (0.1, 1.0, 10.0):
        lower, upper = handle.aux1_bracket(measure)
        assert lower <= handle.characteristic_norm(measure) <= upper


@pytest.mark.parametrize("family, params", CATALOG)
@given(lam=st.floats(min_value=1e-3, max_value=10.0), t=st.floats(min_value=1e-3, max_value=10.0))
def test_scaling_envelope(family, params, lam, t):
    model = make_model(family, params)
    handle = NFunctionHandle(model)
    low, high = sorted((lam ** model.p_minus, lam ** model.q_plus))
    for x in (np.zeros(3), np.array([0.0, 2.0, 0.0])):
        H = float(handle.eval_H(x, t))
        scaled = float(handle.eval_H(x, lam * t))
        assert low * H * (1.0 - 1e-9) <= scaled <= high * H * (1.0 + 1e-9)


@given(values=st.lists(st.floats(min_value=1e-3, max_value=1e2), min_size=1, max_size=6),
       measure=st.floats(min_value=1e-2, max_value=1e2))
def test_norm_modular_sandwich(values, measure):
    model = make_model(*CATALOG[0])
    handle = NFunctionHandle(model)
    n = len(values)
    field = SampledField(points=np.zeros((n, 3)), weights=np.full(n, measure / n), values=np.array(values),
                         truncation_radius=0.0, domain_measure=measure)
    norm = handle.luxemburg_norm(field)
    rho = handle.modular(field)
    low, high = sorted((norm ** model.p_minus, norm ** model.q_plus))
    assert low * (1.0 - 1e-5) <= rho <= high * (1.0 + 1e-5)
