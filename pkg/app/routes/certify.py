import click

from app.core.certificate import compute_certificate, feasibility_search, gamma_bar_from_constant, gamma_lower_bound
from app.core.embedding_lab import make_family, probe_sequence
from app.core.exponent_models import DoublePhaseModel, Nonlinearity
from app.core.nfunction_engine import NFunctionHandle
from app.models.catalog import RunConfig
from app.models.reports import Provenance
from app.routes.common import artifact_run, build_model, build_nonlinearity, common_options

certify_route = click.Group()


def resolve_gamma_bar(config: RunConfig, handle: NFunctionHandle, nl: Nonlinearity):
    """
    gamma_bar from the config, from an embedding constant gamma, or estimated.

    The estimate is a lower bound over the configured probe family, so a
    certificate built on it is only indicative.
    """
    certificate = config.certificate
    if certificate.gamma_bar is not None:
        return certificate.gamma_bar, Provenance.USER_SUPPLIED
    if certificate.gamma is not None:
        return gamma_bar_from_constant(certificate.gamma, nl), Provenance.USER_SUPPLIED
    probe = config.probe
    family = make_family(probe.family, handle.model.d, count=probe.count, scale=probe.scale, growth=probe.growth,
                         amplitude_power=probe.amplitude_power, shells=probe.shells, spacing=probe.spacing)
    gamma, _ = gamma_lower_bound(handle, nl, probe_sequence(family))
    return gamma_bar_from_constant(gamma, nl), Provenance.ESTIMATED_LOWER_BOUND


def _records(writer, certificate, provenance: Provenance):
    for name in ("omega_R", "V_inf", "delta", "alpha_r", "beta_eta", "integral_F", "rho_tilde_u", "rho_bound"):
        writer.record(name, getattr(certificate, name), 1e-8)
    writer.record("gamma_bar", certificate.gamma_bar, 0.0, provenance)


@certify_route.command("certify")
@common_options
def certify(config_path, out_dir, seed, threads):
    """
    Evaluate the two-solution certificate at the configured (x0, R, eta, r).

    Exits with 2 when the configuration is not admissible.
    """
    with artifact_run("certify", config_path, out_dir, seed, threads) as run:
        model: DoublePhaseModel = build_model(run.config)
        nl = build_nonlinearity(run.config, model)
        handle = NFunctionHandle(model)
        gamma_bar, provenance = resolve_gamma_bar(run.config, handle, nl)
        settings = run.config.certificate
        certificate = compute_certificate(
            model, nl, settings.x0, settings.radius, settings.eta, settings.r, gamma_bar, provenance, handle,
            seed=run.seed,
        )
        run.writer.result("certificate", certificate)
        _records(run.writer, certificate, provenance)

        # Check if all three admissibility conditions hold
        if not certificate.admissible:
            failed = [name for name in ("cond_318", "cond_H1", "cond_H2") if not getattr(certificate, name)]
            run.writer.fail(f"Configuration is not admissible: {', '.join(failed)} false")


@certify_route.command("search")
@common_options
def search(config_path, out_dir, seed, threads):
    """
    Search the (eta, r) box for an admissible configuration.

    Exits with 2 when the box holds none; the least-violated point is reported.
    """
    with artifact_run("search", config_path, out_dir, seed, threads) as run:
        model = build_model(run.config)
        nl = build_nonlinearity(run.config, model)
        handle = NFunctionHandle(model)
        gamma_bar, provenance = resolve_gamma_bar(run.config, handle, nl)
        settings = run.config.certificate
        report = feasibility_search(
            model, nl, settings.x0, settings.radius, gamma_bar,
            settings.eta_bounds, settings.r_bounds, settings.grid, run.threads, provenance, seed=run.seed,
        )
        run.writer.result("search", report)
        run.writer.record("violation_gap", report.violation_gap)
        chosen = report.best or report.least_violated
        _records(run.writer, chosen, provenance)

        if not report.feasible:
            run.writer.fail(f"No admissible (eta, r) in the search box, violation gap {report.violation_gap:.6g}")
