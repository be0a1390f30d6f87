import click

from app.core.certificate import compute_certificate
from app.core.grids import RadialGrid
from app.core.nfunction_engine import NFunctionHandle
from app.core.radial_solver import (
    cerami_trace, coercivity_probe, make_problem, mesh_refinement_check, monotonicity_probe, seed_profile,
    solve_problem, splus_probe,
)
from app.routes.certify import resolve_gamma_bar
from app.routes.common import artifact_run, build_model, build_nonlinearity, common_options

solve_route = click.Group()


def _state_records(writer, label, state):
    writer.record(f"J_{label}", state.J, 1e-10)
    writer.record(f"grad_norm_{label}", state.grad_norm)
    writer.record(f"weak_residual_{label}", state.residual)


@solve_route.command("solve")
@common_options
def solve(config_path, out_dir, seed, threads):
    """
    Find a negative-energy and a mountain pass solution of the radial problem.

    Writes the profiles to solutions.csv and the descent trace to trace.csv.
    Exits with 2 unless both solutions converge.
    """
    with artifact_run("solve", config_path, out_dir, seed, threads) as run:
        settings = run.config.solver
        model = build_model(run.config)
        nl = build_nonlinearity(run.config, model)
        grid = RadialGrid(model.d, settings.r_max, settings.shells)
        handle = NFunctionHandle(model)
        problem = make_problem(model, nl, settings.lam, grid, handle)
        writer = run.writer
        certificate = None
        if settings.seed_from_certificate:
            gamma_bar, provenance = resolve_gamma_bar(run.config, handle, nl)
            cert = run.config.certificate
            certificate = compute_certificate(model, nl, cert.x0, cert.radius, cert.eta, cert.r, gamma_bar, provenance,
                                              handle, seed=run.seed)
            writer.result("certificate", certificate)
        first, second = solve_problem(problem, settings, certificate)

        writer.result("negative", {"outcome": first.outcome, "detail": first.detail, "J": first.J,
                                   "seed_energy": first.seed_energy})
        _state_records(writer, "negative", first)
        columns = [grid.nodes, first.u]
        header = ["r", "u_negative"]
        if second is not None:
            writer.result("mountain_pass", {"outcome": second.outcome, "detail": second.detail, "J": second.J,
                                            "path_energies": second.path_energies})
            _state_records(writer, "mountain_pass", second)
            columns.append(second.u)
            header.append("u_mountain_pass")
        writer.write_csv("solutions.csv", header, zip(*columns))
        writer.write_csv("trace.csv", ["iteration", "J", "grad_norm", "cerami", "step"],
                         [(e.iteration, e.J, e.grad_norm, e.cerami, e.step) for e in first.trace])

        probe_seed = seed_profile(problem, settings.seed_radius)
        checks = [
            monotonicity_probe(problem, seed=run.seed),
            coercivity_probe(problem, first.u if first.J < 0 else probe_seed),
            splus_probe(problem, first),
            cerami_trace(first),
        ]
        if settings.refinement_check:
            checks.append(mesh_refinement_check(model, nl, settings, handle, certificate))
        writer.result("checks", checks)

        # Check if both critical points were found
        if not first.converged:
            writer.fail(f"negative solution {first.outcome.value}: {first.detail}")
        elif settings.mountain_pass and (second is None or not second.converged):
            writer.fail(f"mountain pass solution {second.outcome.value}: {second.detail}")
