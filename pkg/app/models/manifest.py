import hashlib
import json

from pydantic import BaseModel
from typing import Any, Dict, List
from datetime import datetime


def config_digest(document: Dict[str, Any]) -> str:
    canonical = json.dumps(document, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


class RunManifest(BaseModel):
    command: str
    config_digest: str
    seed: int
    threads: int
    tool_version: str
    started_at: datetime
    finished_at: datetime
    exit_code: int
    outputs: List[str] = []
