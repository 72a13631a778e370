"""Deterministic CSV/JSON emission and run manifests."""
from __future__ import annotations

import hashlib
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

ENGINE_VERSION = "0.1.0"


def fmt(x) -> str:
    """Round-trip text for a CSV cell: 17 significant digits for floats."""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return format(x, ".17g")
    if x is None:
        return ""
    return str(x)


def csv_text(columns, rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(fmt(v) for v in row) + "\n")
    return buf.getvalue()


def csv_from_arrays(columns, *arrays) -> str:
    return csv_text(columns, zip(*arrays))


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    return obj


def json_text(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


@dataclass
class RunManifest:
    subcommand: str
    parameters: dict
    engine_version: str = ENGINE_VERSION
    ring_size: int | None = None
    wall_clock: float = 0.0
    files: dict = field(default_factory=dict)  # path -> sha256 of the body

    def to_dict(self) -> dict:
        return {
            "subcommand": self.subcommand,
            "parameters": self.parameters,
            "engine_version": self.engine_version,
            "ring_size": self.ring_size,
            "wall_clock_seconds": self.wall_clock,
            "files": self.files,
        }


class Emitter:
    """Writes output files and records their digests in a manifest."""

    def __init__(self, manifest: RunManifest):
        self.manifest = manifest

    def write(self, path: str | Path, text: str) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
        self.manifest.files[str(path)] = sha256_text(text)
        return path

    def write_manifest(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json_text(self.manifest.to_dict()))
        return path


def manifest_path_for(out: Path) -> Path:
    """``result.csv`` -> ``result.manifest.json``; a directory gets ``manifest.json``."""
    if out.suffix:
        return out.with_name(out.stem + ".manifest.json")
    return out / "manifest.json"
