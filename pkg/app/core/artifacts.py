"""Run artifacts: report.json, CSV tables and manifest.json under one output directory."""

import csv
import json
import logging
import math
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel

from app import __version__
from app.models.manifest import RunManifest, config_digest
from app.models.reports import NumericRecord, Provenance

logger = logging.getLogger(__name__)


def plain(value: Any) -> Any:
    """
    Convert pydantic models, numpy values and non-finite floats to plain JSON data.

    Non-finite floats become the strings "inf", "-inf" and "nan".
    """
    if isinstance(value, BaseModel):
        return plain(value.model_dump(mode="python"))
    if isinstance(value, dict):
        return {str(key): plain(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [plain(item) for item in value]
    if isinstance(value, np.ndarray):
        return [plain(item) for item in value.tolist()]
    if isinstance(value, (np.floating, float)):
        value = float(value)
        if math.isfinite(value):
            return value
        return "nan" if math.isnan(value) else ("inf" if value > 0 else "-inf")
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, datetime):
        return value.isoformat()
    if hasattr(value, "value") and isinstance(getattr(value, "value"), str):
        return value.value
    return value


def dumps(document: Any) -> str:
    return json.dumps(plain(document), sort_keys=True, indent=2) + "\n"


class ArtifactWriter:
    """
    Collects the numeric records and tables of one command run.

    Records go to report.json next to the command's results; CSV tables are
    written as they are produced; manifest.json is written last with the exit
    code of the run.
    """

    def __init__(self, out_dir, command: str, config_document: Dict[str, Any], seed: int, threads: int):
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.command = command
        self.digest = config_digest(plain(config_document))
        self.seed = seed
        self.threads = threads
        self.started_at = datetime.now(timezone.utc)
        self.records: List[NumericRecord] = []
        self.results: Dict[str, Any] = {}
        self.outputs: List[str] = []
        self.failure: Optional[str] = None

    def record(self, op: str, value, tol: float = 0.0, provenance: Provenance = Provenance.COMPUTED):
        value = None if value is None else float(value)
        self.records.append(NumericRecord(op=op, value=value, tol=tol, provenance=provenance,
                                          inputs_digest=self.digest))

    def result(self, key: str, value: Any):
        self.results[key] = value

    def fail(self, detail: str):
        """Mark the run's verdict as negative; the command exits with code 2."""
        logger.warning("%s: %s", self.command, detail)
        self.failure = detail

    def write_csv(self, name: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
        path = self.out_dir / name
        with path.open("w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(header)
            for row in rows:
                writer.writerow([repr(float(item)) if isinstance(item, (float, np.floating)) else item
                                 for item in row])
        self.outputs.append(name)
        return path

    def write_json(self, name: str, document: Any) -> Path:
        path = self.out_dir / name
        path.write_text(dumps(document))
        self.outputs.append(name)
        return path

    def finish(self, exit_code: int) -> RunManifest:
        self.write_json("report.json", {
            "command": self.command,
            "records": self.records,
            "results": self.results,
            "failure": self.failure,
        })
        manifest = RunManifest(
            command=self.command,
            config_digest=self.digest,
            seed=self.seed,
            threads=self.threads,
            tool_version=__version__,
            started_at=self.started_at,
            finished_at=datetime.now(timezone.utc),
            exit_code=exit_code,
            outputs=sorted(self.outputs + ["manifest.json"]),
        )
        (self.out_dir / "manifest.json").write_text(dumps(manifest))
        return manifest
