import logging
from contextlib import contextmanager
from pathlib import Path
from typing import Optional

import click
import numpy as np
from pydantic import ValidationError

from app.config.config import OUTPUT_DIR, SEED, THREADS
from app.core.artifacts import ArtifactWriter
from app.core.exponent_models import DoublePhaseModel, Nonlinearity, make_model, make_nonlinearity
from app.errors import ConfigError, ToolkitException, VerdictFailure
from app.models.catalog import RunConfig

logger = logging.getLogger(__name__)

CONFIG_VERSION = 1


def load_config(path: Optional[str]) -> RunConfig:
    """
    Parse a JSON run configuration; no path gives the defaults.

    Raises:
        ConfigError: unreadable file, malformed document or unknown schema version.
    """
    if path is None:
        return RunConfig()
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"Cannot read config {path}: {exc}")
    try:
        config = RunConfig.model_validate_json(text)
    except ValidationError as exc:
        raise ConfigError(f"Malformed config {path}: {exc.error_count()} error(s)\n{exc}")
    # Check if the schema version is supported
    if config.version != CONFIG_VERSION:
        raise ConfigError(f"Unsupported config version {config.version}, expected {CONFIG_VERSION}")
    return config


def build_model(config: RunConfig) -> DoublePhaseModel:
    params = config.model.model_dump(exclude={"catalog", "strict"})
    return make_model(config.model.catalog, params, config.model.strict)


def build_nonlinearity(config: RunConfig, model: DoublePhaseModel) -> Nonlinearity:
    return make_nonlinearity(config.nonlinearity, model)


def point(config: RunConfig, d: int) -> np.ndarray:
    if config.x is None:
        return np.zeros(d)
    if len(config.x) != d:
        raise ConfigError(f"x has {len(config.x)} coordinates, model dimension is {d}")
    return np.asarray(config.x, dtype=float)


OPTIONS = (
    click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None,
                 help="JSON run configuration."),
    click.option("--out", "out_dir", type=click.Path(file_okay=False), default=None,
                 help="Output directory for report.json, CSV tables and manifest.json."),
    click.option("--seed", type=int, default=None, help="Seed of every sampler (default DPH_SEED)."),
    click.option("--threads", type=int, default=None, help="Worker threads (default DPH_THREADS)."),
)


def common_options(func):
    """--config, --out, --seed and --threads, shared by every command."""
    for option in reversed(OPTIONS):
        func = option(func)
    return func


class Run:
    """A parsed configuration plus the artifact writer of one command."""

    def __init__(self, command: str, config: RunConfig, writer: ArtifactWriter):
        self.command = command
        self.config = config
        self.writer = writer
        self.seed = writer.seed
        self.threads = writer.threads


@contextmanager
def artifact_run(command: str, config_path: Optional[str], out_dir: Optional[str], seed: Optional[int],
                 threads: Optional[int]):
    """
    Open a run, yield it, then write report.json and manifest.json.

    A negative verdict recorded with writer.fail() becomes VerdictFailure
    (exit 2) once the artifacts are on disk; toolkit errors are written with
    their own exit code and re-raised.
    """
    config = load_config(config_path)
    seed = seed if seed is not None else (config.sampling.seed if config.sampling.seed is not None else SEED)
    config.sampling.seed = seed
    threads = threads if threads is not None else THREADS
    out = Path(out_dir) if out_dir else Path(OUTPUT_DIR) / command
    writer = ArtifactWriter(out, command, config.model_dump(mode="json"), seed, threads)
    logger.info("Running %s into %s", command, out)
    try:
        yield Run(command, config, writer)
    except ToolkitException as exc:
        writer.failure = exc.detail
        writer.finish(exc.exit_code)
        raise
    if writer.failure is not None:
        writer.finish(VerdictFailure.exit_code)
        raise VerdictFailure(writer.failure)
    writer.finish(0)
