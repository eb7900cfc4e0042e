"""Run manifests: enough provenance to reproduce any CLI run.

Every command that writes an output file also writes a manifest next to
it, recording the exact argument vector, resolved options, SHA-256 of
every input file, the seed, and the toolkit version. Replaying the
manifest's argv against the same inputs reproduces the outputs
bit-for-bit.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone

MANIFEST_SUFFIX = ".manifest.json"


def file_sha256(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def manifest_path_for(output_path: str) -> str:
    return output_path + MANIFEST_SUFFIX


def utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass
class RunManifest:
    command: str
    argv: list[str]
    options: dict
    inputs: dict[str, str] = field(default_factory=dict)
    outputs: list[str] = field(default_factory=list)
    diagnostics: list[str] = field(default_factory=list)
    seed: int | None = None
    version: str = ""
    created_at: str = ""
    finished_at: str = ""

    def add_input(self, path: str) -> None:
        self.inputs[path] = file_sha256(path)

    def write(self, path: str) -> None:
        self.finished_at = utc_now()
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(asdict(self), fh, indent=2, sort_keys=True)
            fh.write("\n")


def load_manifest(path: str) -> RunManifest:
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    return RunManifest(**raw)
