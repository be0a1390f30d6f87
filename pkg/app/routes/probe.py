import click

from app.core.embedding_lab import (
    TestFamily, brezis_lieb_probe, compactness_probe, embedding_ratio_scan, lions_vanishing_probe, make_family,
    modular_relation,
)
from app.core.nfunction_engine import NFunctionHandle
from app.core.sobolev_conjugate import CompanionFunction, SobolevConjugateHandle
from app.errors import ConfigError
from app.models.catalog import ProbeKind, RunConfig
from app.models.probes import NEGATIVE_TRENDS, TrendVerdict
from app.routes.common import artifact_run, build_model, common_options
from app.routes.sobolev import build_companion

probe_route = click.Group()


def build_family(config: RunConfig, d: int) -> TestFamily:
    probe = config.probe
    return make_family(
        probe.family, d, count=probe.count, scale=probe.scale, growth=probe.growth,
        amplitude_power=probe.amplitude_power, shells=probe.shells, spacing=probe.spacing,
    )


def build_target(config: RunConfig, handle: NFunctionHandle) -> CompanionFunction:
    """Ratio-scan target: "H", "H*", "V" (the configured companion) or "r" (L^r)."""
    target = config.probe.target
    if target == "H":
        return CompanionFunction.from_nfunction(handle)
    if target == "H*":
        return CompanionFunction.from_sobolev(SobolevConjugateHandle(handle))
    if target == "V":
        return build_companion(config, handle)
    if target == "r":
        if config.probe.lebesgue_exponent is None:
            raise ConfigError("probe target 'r' needs probe.lebesgue_exponent")
        return CompanionFunction.power(config.probe.lebesgue_exponent)
    raise ConfigError(f"Unknown probe target '{target}'")


@probe_route.command("probe")
@common_options
def probe(config_path, out_dir, seed, threads):
    """
    Run one embedding probe along a test family.

    Kinds: ratio, lions, brezis-lieb, compactness, modular. The per-member
    series goes to probe.csv. Exits with 2 on an inconsistent verdict.
    """
    with artifact_run("probe", config_path, out_dir, seed, threads) as run:
        config = run.config
        model = build_model(config)
        handle = NFunctionHandle(model)
        family = build_family(config, model.d)
        kind = config.probe.kind
        writer = run.writer

        if kind == ProbeKind.RATIO:
            scan = embedding_ratio_scan(handle, build_target(config, handle), family)
            writer.result("probe", scan)
            writer.write_csv("probe.csv", ["n", "sobolev_norm", "target_norm", "ratio"],
                             zip(scan.indices, scan.sobolev_norms, scan.target_norms, scan.ratios))
            verdict = scan.verdict
        elif kind == ProbeKind.LIONS:
            comp = build_companion(config, handle)
            report = lions_vanishing_probe(handle, family, comp, config.probe.lions_radius)
            writer.result("probe", report)
            writer.write_csv(
                "probe.csv", ["n", "s_n", "v_n", "g_n", "ratio_n", "weak_n"],
                [(n, s, v, g, v / g if g else float("nan"), w) for n, s, v, g, w in zip(
                    report.indices, report.ball_sup, report.companion_norms, report.sobolev_norms,
                    report.weak_pairings)],
            )
            verdict = report.verdict
        elif kind == ProbeKind.BREZIS_LIEB:
            report = brezis_lieb_probe(handle, family)
            writer.result("probe", report)
            writer.write_csv("probe.csv", ["n", "gap"], enumerate(report.gaps, start=1))
            verdict = report.verdict
        elif kind == ProbeKind.COMPACTNESS:
            report = compactness_probe(handle, family)
            writer.result("probe", report)
            writer.write_csv("probe.csv", ["n", "ratio"], enumerate(report.ratios, start=1))
            verdict = report.verdict
        else:
            report = modular_relation(handle, family.member(1))
            writer.result("probe", report)
            writer.write_csv("probe.csv", ["t", "modular", "norm"],
                             zip(report.scalings, report.scaled_modulars, report.scaled_norms))
            writer.record("modular", report.modular, 1e-10)
            writer.record("norm", report.norm, 1e-8)
            verdict = TrendVerdict.INCONSISTENT if report.failed else TrendVerdict.CONSISTENT

        writer.result("verdict", verdict)
        # Check if the probe contradicts the embedding statement
        if verdict in NEGATIVE_TRENDS:
            writer.fail(f"{kind.value} probe on {family.kind.value}: {verdict.value}")
