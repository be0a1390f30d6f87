import numpy as np
import pytest

from app.core.certificate import compute_certificate
from app.core.exponent_models import make_nonlinearity
from app.core.grids import RadialGrid
from app.core.radial_solver import (
    certified_seed, coercivity_probe, energy, find_negative_solution, make_problem, mesh_refinement_check,
    monotonicity_probe, reparametrize, seed_profile, solve, splus_probe, string_problem, transfer,
)
from app.errors import InputError
from app.models.catalog import NonlinearityConfig, NonlinearityKind, SolverConfig
from app.models.reports import Verdict
from app.models.solver import SolverOutcome


@pytest.fixture
def grid():
    return RadialGrid(3, 4.0, 16)


@pytest.fixture
def problem(model, handle, well_nl, grid):
    return make_problem(model, well_nl, 3.0, grid, handle)


@pytest.fixture
def profile(grid):
    return 0.8 * np.cos(0.5 * np.pi * grid.nodes / grid.r_max)


def test_weights_add_up_to_the_ball(grid):
    assert grid.weights.sum() == pytest.approx(4.0 * np.pi * 64.0 / 3.0, rel=1e-12)
    assert grid.cell_weights.sum() == pytest.approx(4.0 * np.pi * 64.0 / 3.0, rel=1e-12)


def test_gradient_matches_finite_differences(problem, profile):
    g = problem.gradient(profile)
    step = 1e-6
    for i in range(problem.size - 1):
        e = np.zeros(problem.size)
        e[i] = step
        difference = (problem.energy(profile + e) - problem.energy(profile - e)) / (2.0 * step)
        assert difference == pytest.approx(g[i], abs=1e-5 * max(1.0, abs(g[i])))
    assert g[-1] == 0.0


def test_lambda_derivative(model, handle, well_nl, grid, profile):
    lower = make_problem(model, well_nl, 3.0 - 1e-4, grid, handle).energy(profile)
    upper = make_problem(model, well_nl, 3.0 + 1e-4, grid, handle).energy(profile)
    derivative = make_problem(model, well_nl, 3.0, grid, handle).lambda_derivative(profile)
    assert (upper - lower) / 2e-4 == pytest.approx(derivative, rel=1e-8)


def test_hessian_band_matches_dense_differences(problem, profile):
    banded = problem.hessian_banded(profile)
    n = problem.size
    steps = 1e-6 * np.maximum(1.0, np.abs(profile))
    for j in range(n - 1):
        e = np.zeros(n)
        e[j] = steps[j]
        column = (problem.gradient(profile + e) - problem.gradient(profile - e)) / (2.0 * steps[j])
        assert banded[1, j] == pytest.approx(column[j], rel=1e-6)
        if j > 0:
            assert banded[0, j] == pytest.approx(column[j - 1], rel=1e-6, abs=1e-9)
        assert banded[2, j] == pytest.approx(column[j + 1], rel=1e-6, abs=1e-9)
    assert banded[1, -1] == 1.0


def test_boundary_node_is_pinned(problem, profile):
    lifted = profile.copy()
    lifted[-1] = 5.0
    assert problem.energy(lifted) == problem.energy(profile)


def test_energy_rejects_bad_profiles(model, well_nl, grid):
    with pytest.raises(InputError):
        energy(model, well_nl, 3.0, grid, np.zeros(grid.n))
    bad = np.zeros(grid.n + 1)
    bad[2] = np.nan
    with pytest.raises(InputError):
        energy(model, well_nl, 3.0, grid, bad)


def test_grid_dimension_must_match(model, well_nl):
    with pytest.raises(InputError):
        make_problem(model, well_nl, 3.0, RadialGrid(2, 4.0, 16))


def test_operator_is_monotone(problem):
    check = monotonicity_probe(problem)
    assert check.verdict == Verdict.PASS
    assert check.witness["pairs"] == 100
    assert check.witness["min_pairing"] > 0


def test_operator_is_coercive(problem):
    check = coercivity_probe(problem, seed_profile(problem, 2.0))
    assert check.verdict == Verdict.PASS


def test_reparametrize_equalizes_beads():
    path = np.array([[0.0, 0.0], [0.1, 0.0], [0.2, 0.0], [1.0, 0.0]])
    equal = reparametrize(path)
    assert np.allclose(equal[:, 0], [0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0])
    stuck = np.array([[0.0, 0.0], [0.0, 0.0], [1.0, 0.0]])
    assert reparametrize(stuck) is stuck


def test_zero_nonlinearity_has_no_negative_solution(model, handle, grid):
    zero = make_nonlinearity(NonlinearityConfig(kind=NonlinearityKind.ZERO), model)
    state = find_negative_solution(make_problem(model, zero, 3.0, grid, handle), SolverConfig(shells=16))
    assert state.outcome == SolverOutcome.NOT_FOUND
    assert np.all(np.asarray(state.scanned_t) >= 0)


def test_two_solutions_of_opposite_energy(model, handle, well_nl):
    first, second = solve(model, well_nl, SolverConfig(lam=3.0, shells=64, r_max=4.0, seed_radius=2.0), handle)
    assert first.converged, first.detail
    assert first.J < 0
    assert first.residual < 1e-4
    assert second is not None
    assert second.converged, second.detail
    assert second.J > 0
    assert second.residual < 1e-4


def test_splus_needs_stored_iterates(model, handle, grid):
    zero = make_nonlinearity(NonlinearityConfig(kind=NonlinearityKind.ZERO), model)
    problem = make_problem(model, zero, 3.0, grid, handle)
    state = find_negative_solution(problem, SolverConfig(shells=16))
    assert splus_probe(problem, state).verdict == Verdict.REPORTED


@pytest.fixture
def worked_certificate(model, log_nl, handle):
    return compute_certificate(model, log_nl, R=1.0, eta=1.0, r=25.0, gamma_bar=1.0, handle=handle)


def test_certified_seed_has_negative_energy_beyond_one_over_beta(model, handle, log_nl, worked_certificate):
    assert worked_certificate.cond_318 and worked_certificate.cond_H1
    lam = 2.0 / worked_certificate.beta_eta
    problem = make_problem(model, log_nl, lam, RadialGrid(3, 4.0, 64), handle)
    seed = certified_seed(problem, worked_certificate)
    assert seed[0] == 1.0
    assert seed[problem.grid.nodes >= 1.0].max() == 0.0
    assert problem.energy(seed) < 0


def test_negative_search_starts_from_the_certificate(model, handle, grid, worked_certificate):
    zero = make_nonlinearity(NonlinearityConfig(kind=NonlinearityKind.ZERO), model)
    problem = make_problem(model, zero, 3.0, grid, handle)
    state = find_negative_solution(problem, SolverConfig(shells=16), worked_certificate)
    assert state.seed_energy == pytest.approx(problem.energy(certified_seed(problem, worked_certificate)))
    assert state.seed_energy != pytest.approx(problem.energy(seed_profile(problem, 2.0)))


def test_certified_seed_needs_a_centered_ball_inside_the_grid(problem, worked_certificate):
    with pytest.raises(InputError):
        certified_seed(problem, worked_certificate.model_copy(update={"x0": [1.0, 0.0, 0.0]}))
    with pytest.raises(InputError):
        certified_seed(problem, worked_certificate.model_copy(update={"radius": 8.0}))


def test_transfer_is_exact_on_piecewise_linear_profiles():
    coarse, fine = RadialGrid(3, 4.0, 8), RadialGrid(3, 4.0, 32)
    u = np.maximum(0.0, 2.0 - coarse.nodes)
    assert np.allclose(transfer(u, coarse, fine), np.maximum(0.0, 2.0 - fine.nodes))


def test_string_runs_on_the_coarser_mesh(problem):
    assert string_problem(problem, None) is problem
    assert string_problem(problem, 64) is problem
    assert string_problem(make_problem(problem.handle.model, problem.nl, 3.0, RadialGrid(3, 4.0, 128)), 64).grid.n == 64


def test_energies_are_stable_when_the_mesh_doubles(model, handle, well_nl):
    check = mesh_refinement_check(model, well_nl, SolverConfig(lam=3.0, shells=64, r_max=4.0, seed_radius=2.0), handle)
    assert check.verdict == Verdict.PASS, check.witness
    assert check.witness["shells"] == [64, 128]
    assert check.witness["relative_change"]["J_mountain_pass"] < 0.01
