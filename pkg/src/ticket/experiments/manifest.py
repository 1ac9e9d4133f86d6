"""Run manifests: what was run and the digest of every file it wrote."""

import hashlib
import json
import logging
from pathlib import Path
from typing import Any

from pydantic import BaseModel, ConfigDict, Field

from ticket import __version__

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"


class RunManifest(BaseModel):
    """Command, parameters, seed, tool version and artifact digests."""

    model_config = ConfigDict(frozen=True)

    command: str
    parameters: dict[str, Any] = Field(default_factory=dict)
    seed: int | None = None
    tool_version: str = __version__
    artifacts: dict[str, str] = Field(default_factory=dict)


def sha256_file(path: str | Path) -> str:
    """Hex SHA-256 of a file's bytes."""
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def dump_json(data: Any) -> str:
    """Canonical JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def write_json(path: str | Path, data: Any) -> Path:
    """Write canonical JSON and return the path."""
    path = Path(path)
    path.write_text(dump_json(data), encoding="utf-8", newline="\n")
    return path


def build_manifest(
    command: str,
    out_dir: str | Path,
    files: list[str],
    parameters: dict[str, Any] | None = None,
    seed: int | None = None,
) -> RunManifest:
    """Hash the given files (names relative to out_dir) into a manifest."""
    out_dir = Path(out_dir)
    return RunManifest(
        command=command,
        parameters=parameters or {},
        seed=seed,
        artifacts={name: sha256_file(out_dir / name) for name in sorted(files)},
    )


def write_manifest(manifest: RunManifest, out_dir: str | Path) -> Path:
    """Write manifest.json into out_dir."""
    return write_json(Path(out_dir) / MANIFEST_NAME, manifest.model_dump(mode="json"))


def verify_manifest(out_dir: str | Path) -> list[str]:
    """Names of artifacts whose current digest differs from the manifest.

    Missing files count as mismatches. An empty list means every digest matches.
    """
    out_dir = Path(out_dir)
    manifest = RunManifest.model_validate_json(
        (out_dir / MANIFEST_NAME).read_text(encoding="utf-8")
    )
    mismatched = []
    for name, digest in manifest.artifacts.items():
        path = out_dir / name
        if not path.exists() or sha256_file(path) != digest:
            mismatched.append(name)
    if mismatched:
        logger.warning("Manifest mismatch in %s: %s", out_dir, mismatched)
    return mismatched
