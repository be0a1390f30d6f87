"""
Radial finite-difference discretization of the energy functional

    J(u) = int H(x, |grad u|) + V(x) H(x, |u|) - lam F(x, u)

on a ball with u = 0 on its boundary, and the two critical point searches:
a negative-energy local minimizer and a positive-energy mountain pass point.
"""

import logging
from typing import List, Optional, Tuple

import numpy as np
from scipy.interpolate import interp1d
from scipy.linalg import LinAlgError, solve_banded

from app.core import numerics
from app.core.certificate import cone
from app.core.embedding_lab import bump
from app.core.exponent_models import DoublePhaseModel, Nonlinearity
from app.core.grids import RadialGrid
from app.core.nfunction_engine import NFunctionHandle
from app.errors import InputError
from app.models.catalog import SolverConfig
from app.models.certificate import Certificate
from app.models.reports import CheckResult, Verdict
from app.models.solver import SolverOutcome, SolverState, TraceEntry

logger = logging.getLogger(__name__)

ARMIJO_C = 1e-4
SHRINK = 0.5
MIN_STEP = 1e-18
DIVERGENCE_LEVEL = 1e12
SEED_SCAN = np.geomspace(1e-3, 1e3, 121)
POLISH_SWITCH = 1e-4
NEWTON_ITERATIONS = 60
TRACE_EVERY = 10
REPARAMETRIZE_EVERY = 10
TEST_BUMPS = 16
REFINEMENT_TOLERANCE = 0.01


class RadialProblem:
    """
    The discrete energy on a RadialGrid.

    Cells carry H(|u'|) with the difference quotient at the cell midpoint and
    the exact shell volume as weight; nodes carry V H(|u|) - lam F(u) with the
    dual-shell volume. The last node is pinned to zero.
    """

    def __init__(self, handle: NFunctionHandle, nl: Nonlinearity, lam: float, grid: RadialGrid):
        if handle.model.d != grid.d:
            raise InputError(f"grid dimension {grid.d} does not match model dimension {handle.model.d}")
        self.handle = handle
        self.nl = nl
        self.lam = lam
        self.grid = grid
        self.nodes = grid.points
        self.mids = grid.midpoint_points
        self.V = handle.model.V(self.nodes)

    @property
    def size(self) -> int:
        return self.grid.n + 1

    def prepare(self, u) -> np.ndarray:
        u = np.array(u, dtype=float)
        if u.shape != (self.size,):
            raise InputError(f"radial profile must have {self.size} nodes, got shape {u.shape}")
        if not np.all(np.isfinite(u)):
            raise InputError("radial profile has non-finite values")
        u[-1] = 0.0
        return u

    def modular(self, u) -> float:
        u = self.prepare(u)
        du = self.grid.derivative(u)
        cells = np.sum(self.grid.cell_weights * self.handle.eval_H(self.mids, np.abs(du)))
        nodes = np.sum(self.grid.weights * self.V * self.handle.eval_H(self.nodes, np.abs(u)))
        return float(cells + nodes)

    def potential_energy(self, u) -> float:
        u = self.prepare(u)
        return float(np.sum(self.grid.weights * self.nl.F(self.nodes, u)))

    def energy(self, u) -> float:
        value = self.modular(u) - self.lam * self.potential_energy(u)
        if not np.isfinite(value):
            raise InputError("energy is not finite")
        return value

    def lambda_derivative(self, u) -> float:
        """dJ/dlam = -sum w F(u)."""
        return -self.potential_energy(u)

    def operator(self, u) -> np.ndarray:
        """Gradient of the modular part: flux differences plus V h(|u|) sign(u)."""
        u = self.prepare(u)
        du = self.grid.derivative(u)
        flux = self.grid.cell_weights * self.handle.h(self.mids, np.abs(du)) * np.sign(du) / self.grid.dr
        g = np.zeros(self.size)
        g[:-1] -= flux
        g[1:] += flux
        g += self.grid.weights * self.V * self.handle.h(self.nodes, np.abs(u)) * np.sign(u)
        g[-1] = 0.0
        return g

    def gradient(self, u) -> np.ndarray:
        u = self.prepare(u)
        g = self.operator(u) - self.lam * self.grid.weights * self.nl.f(self.nodes, u)
        g[-1] = 0.0
        return g

    def hessian_banded(self, u) -> np.ndarray:
        """
        Tridiagonal Hessian in solve_banded layout from three colored
        central differences of the gradient.
        """
        u = self.prepare(u)
        n = self.size
        steps = 1e-6 * np.maximum(1.0, np.abs(u))
        columns = np.arange(n)
        banded = np.zeros((3, n))
        for color in range(3):
            mask = columns % 3 == color
            shift = np.where(mask, steps, 0.0)
            diff = self.gradient(u + shift) - self.gradient(u - shift)
            for offset in (-1, 0, 1):
                # a[i, j] with i = j + offset is stored at banded[1 + offset, j]
                rows = columns[mask] + offset
                valid = (rows >= 0) & (rows < n)
                j = columns[mask][valid]
                banded[1 + offset, j] = diff[rows[valid]] / (2.0 * steps[j])
        banded[:, -1] = 0.0
        banded[1, -1] = 1.0
        return banded

    def norm(self, u) -> float:
        """||u'||_H on the cells plus ||u||_{H,V} on the nodes, the discrete W_V norm."""
        u = self.prepare(u)
        du = np.abs(self.grid.derivative(u))
        magnitude = np.abs(u)
        cell_w = self.grid.cell_weights
        node_w = self.grid.weights * self.V
        gradient_part = numerics.luxemburg(
            lambda s: float(np.sum(cell_w * self.handle.eval_H(self.mids, s * du))), float(du.max(initial=0.0))
        )
        value_part = numerics.luxemburg(
            lambda s: float(np.sum(node_w * self.handle.eval_H(self.nodes, s * magnitude))),
            float(magnitude.max(initial=0.0)),
        )
        return gradient_part + value_part

    def cerami(self, u, grad: np.ndarray) -> float:
        return (1.0 + self.norm(u)) * float(np.linalg.norm(grad))


def make_problem(model: DoublePhaseModel, nl: Nonlinearity, lam: float, grid: RadialGrid,
                 handle: Optional[NFunctionHandle] = None) -> RadialProblem:
    return RadialProblem(handle or NFunctionHandle(model), nl, lam, grid)


def energy(model: DoublePhaseModel, nl: Nonlinearity, lam: float, grid: RadialGrid, u) -> float:
    return make_problem(model, nl, lam, grid).energy(u)


def gradient(model: DoublePhaseModel, nl: Nonlinearity, lam: float, grid: RadialGrid, u) -> np.ndarray:
    return make_problem(model, nl, lam, grid).gradient(u)


def _state(problem: RadialProblem, u: np.ndarray, outcome: SolverOutcome, detail: str = "",
           trace: Optional[List[TraceEntry]] = None, iterates: Optional[List[np.ndarray]] = None) -> SolverState:
    g = problem.gradient(u)
    return SolverState(
        u=u, J=problem.energy(u), grad=g, grad_norm=float(np.linalg.norm(g)),
        residual=weak_residual(problem, u), trace=trace or [], outcome=outcome, detail=detail,
        iterates=iterates or [],
    )


def _safe_energy(problem: RadialProblem, u) -> float:
    try:
        return problem.energy(u)
    except InputError:
        return np.inf


def _diverging(u: np.ndarray, J: float) -> bool:
    return not np.isfinite(J) or J < -DIVERGENCE_LEVEL or np.max(np.abs(u)) > 1e8


def descend(problem: RadialProblem, u, max_iter: int, tol: float, stop: float = 0.0):
    """
    Armijo steepest descent with Barzilai-Borwein trial steps.

    Stops when grad_norm < max(tol, stop) (1 + |J|).

    Returns:
        Tuple: (u, outcome, detail, trace, iterates)
    """
    u = problem.prepare(u)
    J = problem.energy(u)
    g = problem.gradient(u)
    step = 1.0 / max(float(np.linalg.norm(g, np.inf)), 1.0)
    trace, iterates = [], []
    previous = None

    for iteration in range(max_iter):
        grad_norm = float(np.linalg.norm(g))
        if iteration % TRACE_EVERY == 0:
            trace.append(TraceEntry(iteration=iteration, J=J, grad_norm=grad_norm,
                                    cerami=problem.cerami(u, g), step=step))
            iterates.append(u.copy())
            logger.debug("descent %d: J = %.12g, |J'| = %.3g, step = %.3g", iteration, J, grad_norm, step)
        if grad_norm < max(tol, stop) * (1.0 + abs(J)):
            return u, SolverOutcome.CONVERGED, "", trace, iterates

        if previous is not None:
            s, y = u - previous[0], g - previous[1]
            curvature = float(s @ y)
            if curvature > 0:
                step = float(s @ s) / curvature
        slope = grad_norm ** 2
        while True:
            trial = u - step * g
            trial_J = _safe_energy(problem, trial)
            if trial_J <= J - ARMIJO_C * step * slope:
                break
            step *= SHRINK
            if step < MIN_STEP:
                return u, SolverOutcome.NOT_CONVERGED, "line search stalled", trace, iterates

        previous = (u, g)
        u, J = problem.prepare(trial), trial_J
        g = problem.gradient(u)
        if _diverging(u, J):
            logger.warning("Descent diverged at iteration %d with J = %.6g", iteration, J)
            return u, SolverOutcome.DIVERGED, f"J = {J:.6g} after {iteration + 1} steps", trace, iterates

    return u, SolverOutcome.NOT_CONVERGED, f"no convergence after {max_iter} steps", trace, iterates


def newton_polish(problem: RadialProblem, u, tol: float, iterations: int = NEWTON_ITERATIONS):
    """
    Damped Newton on grad J = 0 with backtracking on the merit |grad J|^2.

    Returns:
        Tuple[np.ndarray, bool]: the polished profile and whether tol (1 + |J|) was reached.
    """
    u = problem.prepare(u)
    g = problem.gradient(u)
    for _ in range(iterations):
        merit = float(g @ g)
        if np.sqrt(merit) <= tol * (1.0 + abs(problem.energy(u))):
            return u, True
        try:
            direction = solve_banded((1, 1), problem.hessian_banded(u), -g)
        except (LinAlgError, ValueError):
            logger.info("Newton polish hit a singular Hessian")
            return u, False
        if not np.all(np.isfinite(direction)):
            return u, False
        alpha = 1.0
        while alpha > 1e-8:
            trial = problem.prepare(u + alpha * direction)
            trial_g = problem.gradient(trial)
            if float(trial_g @ trial_g) <= (1.0 - 2.0 * ARMIJO_C * alpha) * merit:
                break
            alpha *= SHRINK
        else:
            return u, False
        u, g = trial, trial_g
    return u, float(np.linalg.norm(g)) <= tol * (1.0 + abs(problem.energy(u)))


def seed_profile(problem: RadialProblem, radius: float) -> np.ndarray:
    """The cone of height 1 on B(0, radius/2) sampled at the nodes."""
    values, _ = cone(problem.grid.nodes, 1.0, radius)
    return problem.prepare(values)


def certified_seed(problem: RadialProblem, certificate: Certificate) -> np.ndarray:
    """The certificate's cone u~(eta, R) sampled at the nodes."""
    if np.any(np.asarray(certificate.x0) != 0.0):
        raise InputError("radial seeds need a certificate centered at the origin")
    if certificate.radius > problem.grid.r_max:
        raise InputError(f"certificate radius {certificate.radius} exceeds the grid radius {problem.grid.r_max}")
    values, _ = cone(problem.grid.nodes, certificate.eta, certificate.radius)
    return problem.prepare(values)


def find_negative_solution(problem: RadialProblem, config: SolverConfig,
                           certificate: Optional[Certificate] = None) -> SolverState:
    """
    Local minimizer with negative energy.

    Scans J(t u~) over t in [1e-3, 1e3], starts from the bottom of the first
    negative basin, descends and polishes with Newton. u~ is the certificate's
    cone when one is given, the unit cone of config.seed_radius otherwise.
    """
    if certificate is not None:
        tilde = certified_seed(problem, certificate)
    else:
        tilde = seed_profile(problem, config.seed_radius)
    seed_energy = problem.energy(tilde)
    energies = np.array([problem.energy(t * tilde) for t in SEED_SCAN])
    negative = energies < 0
    if not np.any(negative):
        logger.info("J(t u~) stays nonnegative on the seed ray")
        state = _state(problem, np.zeros(problem.size), SolverOutcome.NOT_FOUND, "no negative energy on the seed ray")
        state.scanned_t = energies.tolist()
        state.seed_energy = seed_energy
        return state

    first = int(np.argmax(negative))
    last = first
    while last + 1 < negative.size and negative[last + 1]:
        last += 1
    best = first + int(np.argmin(energies[first:last + 1]))
    start = SEED_SCAN[best] * tilde

    u, outcome, detail, trace, iterates = descend(problem, start, config.max_iter, config.tol, POLISH_SWITCH)
    if outcome != SolverOutcome.DIVERGED:
        polished, ok = newton_polish(problem, u, config.tol)
        if ok and problem.energy(polished) < 0:
            u, outcome, detail = polished, SolverOutcome.CONVERGED, ""
        else:
            outcome = SolverOutcome.NOT_CONVERGED
            detail = detail or "Newton polish did not reach the tolerance in the negative basin"

    state = _state(problem, u, outcome, detail, trace, iterates)
    if state.converged and state.J >= 0:
        state.outcome = SolverOutcome.NOT_FOUND
        state.detail = "descent ended at nonnegative energy"
    state.scanned_t = energies.tolist()
    state.seed_energy = seed_energy
    log = logger.info if state.converged else logger.warning
    log("Negative solution: %s, J = %.6g, |J'| = %.3g", state.outcome.value, state.J, state.grad_norm)
    return state


def reparametrize(path: np.ndarray) -> np.ndarray:
    """Redistribute beads at equal arclength, keeping both endpoints."""
    lengths = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(path, axis=0), axis=1))])
    if np.any(np.diff(lengths) <= 0):
        return path
    targets = np.linspace(0.0, lengths[-1], path.shape[0])
    return interp1d(lengths, path, axis=0)(targets)


def transfer(u: np.ndarray, source: RadialGrid, target: RadialGrid) -> np.ndarray:
    """Linear interpolation of a nodal profile between grids of the same radius."""
    values = np.interp(target.nodes, source.nodes, u)
    values[-1] = 0.0
    return values


def string_problem(problem: RadialProblem, shells: Optional[int]) -> RadialProblem:
    """The problem on the mesh the string is relaxed on; the problem itself when it is not finer."""
    if shells is None or shells >= problem.grid.n:
        return problem
    grid = RadialGrid(problem.grid.d, problem.grid.r_max, shells)
    return RadialProblem(problem.handle, problem.nl, problem.lam, grid)


def relax_string(problem: RadialProblem, end: np.ndarray, config: SolverConfig) -> np.ndarray:
    """Beads from 0 to end moved by descent orthogonal to the path, reparametrized every few sweeps."""
    beads = config.beads
    path = np.linspace(0.0, 1.0, beads)[:, None] * end[None, :]
    steps = np.full(beads, 1.0 / max(float(np.linalg.norm(problem.gradient(end), np.inf)), 1.0))
    last_max = np.inf

    for sweep in range(1, config.sweeps + 1):
        for k in range(1, beads - 1):
            bead = path[k]
            g = problem.gradient(bead)
            tangent = path[k + 1] - path[k - 1]
            tangent /= max(np.linalg.norm(tangent), 1e-300)
            normal = g - (g @ tangent) * tangent
            slope = float(normal @ normal)
            if slope == 0:
                continue
            J = problem.energy(bead)
            step = 2.0 * steps[k]
            while step > MIN_STEP:
                trial = bead - step * normal
                if _safe_energy(problem, trial) <= J - ARMIJO_C * step * slope:
                    path[k] = problem.prepare(trial)
                    break
                step *= SHRINK
            steps[k] = step
        if sweep % REPARAMETRIZE_EVERY == 0:
            path = reparametrize(path)
            top = max(problem.energy(bead) for bead in path)
            if abs(top - last_max) <= 1e-9 * (1.0 + abs(top)):
                logger.debug("string settled after %d sweeps at J = %.12g", sweep, top)
                break
            last_max = top
    return path


def find_mountain_pass_solution(problem: RadialProblem, u1: np.ndarray, config: SolverConfig) -> SolverState:
    """
    String of beads from 0 to u1, relaxed by descent orthogonal to the path.

    The string lives on a mesh of config.string_shells shells so that every
    finer mesh starts from the same path; its top bead is polished there,
    interpolated onto the problem's mesh and polished again. A path maximum
    at or below zero means the mountain pass geometry is absent.
    """
    coarse = string_problem(problem, config.string_shells)
    end = transfer(problem.prepare(u1), problem.grid, coarse.grid)
    path = relax_string(coarse, end, config)

    energies = [coarse.energy(bead) for bead in path]
    top = int(np.argmax(energies))
    if energies[top] <= 0:
        state = _state(problem, transfer(path[top], coarse.grid, problem.grid), SolverOutcome.GEOMETRY_VIOLATED,
                       f"path maximum {energies[top]:.6g} is not positive")
        state.path_energies = energies
        return state

    u = path[top]
    if coarse is not problem:
        u, _ = newton_polish(coarse, u, config.saddle_tol)
        u = transfer(u, coarse.grid, problem.grid)
    u, ok = newton_polish(problem, u, config.saddle_tol)
    outcome, detail = SolverOutcome.CONVERGED, ""
    if not ok:
        outcome, detail = SolverOutcome.NOT_CONVERGED, "Newton polish of the top bead did not converge"
    elif problem.energy(u) <= 0:
        outcome, detail = SolverOutcome.NOT_CONVERGED, "polish left the positive energy level"
    state = _state(problem, u, outcome, detail)
    state.path_energies = energies
    log = logger.info if state.converged else logger.warning
    log("Mountain pass solution: %s, J = %.6g, |J'| = %.3g", state.outcome.value, state.J, state.grad_norm)
    return state


def probe_bumps(grid: RadialGrid, count: int = TEST_BUMPS) -> List[np.ndarray]:
    """Radial bumps supported on B(0, k r_max / count), k = 1..count."""
    return [bump(grid.nodes / (grid.r_max * k / count))[0] for k in range(1, count + 1)]


def weak_residual(problem: RadialProblem, u) -> float:
    """max over the test bumps v of |<J'(u), v>| / (1 + ||v||)."""
    g = problem.gradient(u)
    return max(abs(float(g @ v)) / (1.0 + problem.norm(v)) for v in probe_bumps(problem.grid))


def solve(model: DoublePhaseModel, nl: Nonlinearity, config: SolverConfig,
          handle: Optional[NFunctionHandle] = None,
          certificate: Optional[Certificate] = None) -> Tuple[SolverState, Optional[SolverState]]:
    """Negative-energy solution, then the mountain pass solution when the first converged."""
    grid = RadialGrid(model.d, config.r_max, config.shells)
    return solve_problem(make_problem(model, nl, config.lam, grid, handle), config, certificate)


def solve_problem(problem: RadialProblem, config: SolverConfig,
                  certificate: Optional[Certificate] = None) -> Tuple[SolverState, Optional[SolverState]]:
    first = find_negative_solution(problem, config, certificate)
    if not config.mountain_pass or not first.converged:
        return first, None
    return first, find_mountain_pass_solution(problem, first.u, config)


def mesh_refinement_check(model: DoublePhaseModel, nl: Nonlinearity, config: SolverConfig,
                          handle: Optional[NFunctionHandle] = None,
                          certificate: Optional[Certificate] = None) -> CheckResult:
    """Both energies on config.shells and twice as many shells agree to REFINEMENT_TOLERANCE."""
    handle = handle or NFunctionHandle(model)
    shells = [config.shells, 2 * config.shells]
    runs = [solve(model, nl, config.model_copy(update={"shells": n}), handle, certificate) for n in shells]
    energies = {"J_negative": [first.J for first, _ in runs]}
    converged = all(first.converged for first, _ in runs)
    if config.mountain_pass:
        energies["J_mountain_pass"] = [second.J if second is not None else None for _, second in runs]
        converged = converged and all(second is not None and second.converged for _, second in runs)
    witness = {"shells": shells, **energies}
    if not converged:
        return CheckResult(condition="mesh refinement", verdict=Verdict.REPORTED, heuristic=True, witness=witness,
                           detail="a solve did not converge on one of the meshes")
    changes = {name: abs(fine - coarse) / max(abs(coarse), 1e-300) for name, (coarse, fine) in energies.items()}
    witness["relative_change"] = changes
    stable = all(change < REFINEMENT_TOLERANCE for change in changes.values())
    return CheckResult(
        condition="mesh refinement",
        verdict=Verdict.PASS if stable else Verdict.FAIL,
        heuristic=True,
        witness=witness,
        detail=f"relative energy change below {REFINEMENT_TOLERANCE} when the shells double",
    )


def monotonicity_probe(problem: RadialProblem, pairs: int = 100, seed: int = 0) -> CheckResult:
    """<A(u) - A(v), u - v> > 0 on random pairs, A the gradient of the modular."""
    rng = np.random.default_rng(seed)
    worst = np.inf
    for _ in range(pairs):
        u = problem.prepare(rng.normal(size=problem.size))
        v = problem.prepare(rng.normal(size=problem.size))
        worst = min(worst, float((problem.operator(u) - problem.operator(v)) @ (u - v)))
    return CheckResult(
        condition="strict monotonicity",
        verdict=Verdict.PASS if worst > 0 else Verdict.FAIL,
        heuristic=True,
        witness={"min_pairing": worst, "pairs": pairs},
    )


def coercivity_probe(problem: RadialProblem, u, powers: int = 10) -> CheckResult:
    """<A(2^k u), 2^k u> / ||2^k u|| grows without bound for k = 0..powers."""
    u = problem.prepare(u)
    ratios = []
    for k in range(powers + 1):
        scaled = 2.0 ** k * u
        ratios.append(float(problem.operator(scaled) @ scaled) / problem.norm(scaled))
    return CheckResult(
        condition="coercivity",
        verdict=Verdict.PASS if numerics.grows_without_bound(ratios) else Verdict.FAIL,
        heuristic=True,
        witness={"ratios": ratios},
    )


def splus_probe(problem: RadialProblem, state: SolverState) -> CheckResult:
    """
    (S+) along the stored iterates: once <A(u_n), u_n - u> stops being
    positive the distance ||u_n - u|| must shrink.
    """
    if len(state.iterates) < 2:
        return CheckResult(condition="(S+)", verdict=Verdict.REPORTED, heuristic=True,
                           detail="fewer than two stored iterates")
    limit = state.u
    pairings = [float(problem.operator(v) @ (v - limit)) for v in state.iterates]
    distances = [problem.norm(v - limit) for v in state.iterates]
    eventually = max(pairings[-8:]) <= 1e-8 * (1.0 + abs(pairings[0]))
    consistent = not eventually or distances[-1] <= 0.5 * distances[0] or distances[-1] == 0
    return CheckResult(
        condition="(S+)",
        verdict=Verdict.CONSISTENT if consistent else Verdict.INCONSISTENT,
        heuristic=True,
        witness={"pairings": pairings[-3:], "distances": distances[-3:]},
    )


def cerami_trace(state: SolverState) -> CheckResult:
    """The Cerami values (1 + ||u_n||) |J'(u_n)| along the run."""
    values = [entry.cerami for entry in state.trace]
    if len(values) < 2:
        return CheckResult(condition="Cerami trace", verdict=Verdict.REPORTED, heuristic=True,
                           witness={"cerami": values})
    decreasing = numerics.tends_to_zero(values) or values[-1] <= 1e-3 * values[0]
    return CheckResult(
        condition="Cerami trace",
        verdict=Verdict.CONSISTENT if decreasing else Verdict.INCONSISTENT,
        heuristic=True,
        witness={"first": values[0], "last": values[-1]},
    )
