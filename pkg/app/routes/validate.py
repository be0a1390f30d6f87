import click

from app.core.exponent_models import make_model, validate_hypotheses
from app.models.reports import NEGATIVE_VERDICTS
from app.routes.common import artifact_run, build_nonlinearity, common_options

validate_route = click.Group()


@validate_route.command("validate")
@common_options
def validate(config_path, out_dir, seed, threads):
    """
    Check the structural hypotheses of a model and its nonlinearity.

    Writes every check with its verdict, heuristic flag and witness to
    report.json and checks.csv. Exits with 2 when any check fails.
    """
    with artifact_run("validate", config_path, out_dir, seed, threads) as run:
        # Build in diagnostic mode so violated hypotheses become verdicts
        params = run.config.model.model_dump(exclude={"catalog", "strict"})
        model = make_model(run.config.model.catalog, params, strict=False)
        nl = build_nonlinearity(run.config, model)
        report = validate_hypotheses(model, nl, run.config.sampling)

        run.writer.result("checks", report.checks)
        run.writer.write_csv(
            "checks.csv",
            ["condition", "verdict", "heuristic"],
            [(check.condition, check.verdict.value, check.heuristic) for check in report.checks],
        )
        for name in ("p_minus", "p_plus", "q_minus", "q_plus", "p_critical", "q_critical"):
            run.writer.record(name, getattr(model, name))

        # Check if any hypothesis is violated
        if report.failed:
            failed = [check.condition for check in report.checks if check.verdict in NEGATIVE_VERDICTS]
            run.writer.fail(f"Hypotheses violated: {', '.join(failed)}")
