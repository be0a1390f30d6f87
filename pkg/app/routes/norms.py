import click
import numpy as np

from app.config.config import QUAD_TOL
from app.core.grids import shell_field
from app.core.nfunction_engine import NFunctionHandle
from app.models.catalog import RunConfig
from app.models.fields import SampledField
from app.routes.common import artifact_run, build_model, common_options, point

norms_route = click.Group()


def fixture_field(config: RunConfig, d: int) -> SampledField:
    """Constant field: one node of the given measure, or radial shells over a ball."""
    fixture = config.field
    if fixture.measure is not None:
        return SampledField(
            points=np.zeros((1, d)),
            weights=np.array([fixture.measure]),
            values=np.array([fixture.value]),
            gradient=np.zeros(1),
            truncation_radius=0.0,
            domain_measure=fixture.measure,
        )
    return shell_field(
        lambda r: (np.full(r.shape, fixture.value), np.zeros(r.shape)),
        fixture.ball_radius, fixture.shells, d,
    )


@norms_route.command("norm")
@common_options
def norm(config_path, out_dir, seed, threads):
    """
    Modular and Luxemburg norm of the configured field fixture.

    Also tabulates h, H and the ratio h t / H at the configured point and t values.
    """
    with artifact_run("norm", config_path, out_dir, seed, threads) as run:
        model = build_model(run.config)
        handle = NFunctionHandle(model)
        field = fixture_field(run.config, model.d)
        weight_by_V = run.config.field.weight_by_v

        run.writer.record("modular", handle.modular(field, weight_by_V=weight_by_V), QUAD_TOL)
        run.writer.record("luxemburg_norm", handle.luxemburg_norm(field, weight_by_V=weight_by_V), 1e-8)
        if run.config.field.measure is not None:
            lower, upper = handle.aux1_bracket(run.config.field.measure)
            run.writer.record("characteristic_norm_lower", lower)
            run.writer.record("characteristic_norm_upper", upper)

        x = point(run.config, model.d)
        ts = np.asarray(run.config.t, dtype=float)
        values = handle.eval_H(x, ts)
        slopes = handle.h(x, ts)
        ratios = np.where(ts > 0, slopes * ts / np.where(values > 0, values, 1.0), np.nan)
        run.writer.write_csv("nfunction.csv", ["t", "h", "H", "ratio"], zip(ts, slopes, values, ratios))


@norms_route.command("conjugate")
@common_options
def conjugate(config_path, out_dir, seed, threads):
    """
    Convex conjugate at the configured point and s values.

    Tabulates the maximizer tau*, H~, its slope and the Legendre round trip H** - H.
    """
    with artifact_run("conjugate", config_path, out_dir, seed, threads) as run:
        model = build_model(run.config)
        handle = NFunctionHandle(model)
        x = point(run.config, model.d)
        ss = np.asarray(run.config.t, dtype=float)

        tau = handle.conjugate_argmax(x, ss)
        values = handle.conjugate(x, ss)
        slopes = [float(handle.conjugate_slope(x, s)) if s > 0 else 0.0 for s in ss]
        duality = [handle.biconjugate(x, s) - float(handle.eval_H(x, s)) for s in ss]
        run.writer.write_csv(
            "conjugate.csv", ["s", "tau", "H_tilde", "h_tilde", "biconjugate_gap"],
            zip(ss, tau, values, slopes, duality),
        )
        run.writer.record("max_biconjugate_gap", max(abs(gap) for gap in duality), 1e-8)
        lhs, rhs = handle.conjugate_bound(x, ss)
        run.writer.record("conjugate_bound_slack", float(np.min(rhs - lhs)))
        if np.any(lhs > rhs * (1 + 1e-9) + 1e-12):
            run.writer.fail("H~(h(t)) exceeds (q+ - 1) H(t)")
