"""Run manifests: canonical JSON serialization and artifact inventories.

Every artifact except the manifest itself is written through
canonical_json_bytes / text writers so that reruns with identical
configuration and seed reproduce byte-identical payloads; the manifest
carries the wall-clock timings and is therefore excluded from that
guarantee (its file inventory hashes still are reproducible).
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path


def canonical_json_bytes(obj) -> bytes:
    """Serialize with sorted keys and fixed separators; trailing newline."""
    return (
        json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False).encode("utf-8")
        + b"\n"
    )


def write_json(path: Path, obj) -> Path:
    path = Path(path)
    path.write_bytes(canonical_json_bytes(obj))
    return path


def write_text(path: Path, text: str) -> Path:
    path = Path(path)
    path.write_bytes(text.encode("utf-8"))
    return path


def sha256_of(path: Path) -> str:
    h = hashlib.sha256()
    h.update(Path(path).read_bytes())
    return h.hexdigest()


def write_manifest(
    out_dir: Path,
    config: dict,
    timings: dict[str, float],
    files: list[Path],
    extra: dict | None = None,
) -> Path:
    """Write manifest.json describing one command run."""
    from . import __version__
    from .curves import catalog_names

    out_dir = Path(out_dir)
    inventory = {
        Path(f).name: f"sha256:{sha256_of(f)}" for f in sorted(files, key=lambda p: Path(p).name)
    }
    doc = {
        "package": {"name": "jacobi-spectra", "version": __version__},
        "catalog": list(catalog_names()),
        "config": config,
        "timings_s": {k: round(float(v), 6) for k, v in timings.items()},
        "files": inventory,
    }
    if extra:
        doc.update(extra)
    path = out_dir / "manifest.json"
    path.write_bytes(canonical_json_bytes(doc))
    return path
