from typing import Optional

import click
import numpy as np

from app.core import numerics
from app.core.nfunction_engine import NFunctionHandle
from app.core.sobolev_conjugate import CompanionFunction, SobolevConjugateHandle, companion_check
from app.models.catalog import CompanionKind, RunConfig
from app.models.reports import NEGATIVE_VERDICTS
from app.routes.common import artifact_run, build_model, common_options, point

sobolev_route = click.Group()

TAIL = np.geomspace(1e2, 1e4, 9)


def build_companion(config: RunConfig, handle: NFunctionHandle,
                    sobolev: Optional[SobolevConjugateHandle] = None) -> CompanionFunction:
    companion = config.companion
    if companion.kind == CompanionKind.H:
        return CompanionFunction.from_nfunction(handle)
    if companion.kind == CompanionKind.H_STAR:
        return CompanionFunction.from_sobolev(sobolev or SobolevConjugateHandle(handle))
    return CompanionFunction.power(companion.exponent, companion.scale)


@sobolev_route.command("sobolev")
@common_options
def sobolev(config_path, out_dir, seed, threads):
    """
    Tabulate N and the Sobolev conjugate H_* at the configured point.

    Records N(1), H_*(1) and the fitted log-log slope of H_* on [1e2, 1e4].
    """
    with artifact_run("sobolev", config_path, out_dir, seed, threads) as run:
        model = build_model(run.config)
        handle = SobolevConjugateHandle(NFunctionHandle(model))
        x = point(run.config, model.d)
        ts = np.asarray(run.config.t, dtype=float)

        rows = handle.tabulate(x, ts)
        run.writer.write_csv("sobolev.csv", ["t", "N", "H_star"], rows.tolist())
        run.writer.record("N(1)", float(handle.tabulated_N(x, 1.0)), handle.tol)
        run.writer.record("H_star(1)", float(handle.eval_H_star(x, 1.0)), handle.tol)
        run.writer.record("H_star_tail_slope", numerics.loglog_slope(TAIL, handle.eval_H_star(x, TAIL)), 1e-3)
        run.writer.record("p_star", handle.p_star)
        run.writer.record("q_star", handle.q_star)


@sobolev_route.command("companion")
@common_options
def companion(config_path, out_dir, seed, threads):
    """
    Check a companion function against the embedding conditions.

    Exits with 2 when a condition fails.
    """
    with artifact_run("companion", config_path, out_dir, seed, threads) as run:
        model = build_model(run.config)
        base = NFunctionHandle(model)
        handle = SobolevConjugateHandle(base)
        comp = build_companion(run.config, base, handle)
        report = companion_check(handle, comp, run.config.sampling)

        run.writer.result("label", report.label)
        run.writer.result("checks", report.checks)
        run.writer.write_csv(
            "companion.csv",
            ["condition", "verdict", "heuristic"],
            [(check.condition, check.verdict.value, check.heuristic) for check in report.checks],
        )
        # Check if any embedding condition is violated
        if report.failed:
            failed = [check.condition for check in report.checks if check.verdict in NEGATIVE_VERDICTS]
            run.writer.fail(f"Companion {report.label} violates {', '.join(failed)}")
