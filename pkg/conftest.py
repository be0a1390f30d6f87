import os
import sys

import numpy as np
import pytest
from hypothesis import settings

sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from app.core.exponent_models import make_model, make_nonlinearity
from app.core.nfunction_engine import NFunctionHandle
from app.models.catalog import NonlinearityConfig, NonlinearityKind

settings.register_profile("dphase", deadline=None, max_examples=40)
settings.load_profile("dphase")


@pytest.fixture
def model():
    """The worked example: d = 3, p = 2, q = 2.5, mu = 1, V = 1 + |x|^2."""
    return make_model("constant", {"d": 3, "p": 2.0, "q": 2.5, "mu": 1.0, "v0": 1.0, "v2": 1.0})


@pytest.fixture
def handle(model):
    return NFunctionHandle(model)


@pytest.fixture
def p2_model():
    """p = 2 with mu = 0: H(t) = t^2 / 2."""
    return make_model("constant", {"d": 3, "p": 2.0, "q": 2.5, "mu": 0.0, "v0": 1.0, "v2": 1.0})


@pytest.fixture
def p2_handle(p2_model):
    return NFunctionHandle(p2_model)


@pytest.fixture
def log_nl(model):
    return make_nonlinearity(NonlinearityConfig(kind=NonlinearityKind.LOG_SUPERLINEAR, b_minus=3.0, b_plus=3.0), model)


@pytest.fixture
def well_nl(model):
    return make_nonlinearity(NonlinearityConfig(kind=NonlinearityKind.SATURATED_WELL), model)


@pytest.fixture
def origin():
    return np.zeros(3)
