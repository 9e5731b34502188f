"""Deterministic CSV/JSON emission and run manifests.

All files are plain text with LF line endings.  Floats are written with
repr (shortest round-trip form), so identical numbers give identical bytes;
every CSV starts with a schema comment line so downstream readers can
dispatch without guessing.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path


def format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    return str(value)


def write_csv(path, schema: str, header, rows) -> Path:
    """Write rows to a CSV with `# schema: <schema>` as its first line."""
    path = Path(path)
    lines = [f"# schema: {schema}", ",".join(header)]
    for row in rows:
        lines.append(",".join(format_value(v) for v in row))
    path.write_text("\n".join(lines) + "\n")
    return path


def _jsonable(value):
    if isinstance(value, float) and (math.isnan(value) or math.isinf(value)):
        return format_value(value)  # JSON has no nan/inf literals
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if hasattr(value, "tolist"):  # numpy scalars and arrays
        return _jsonable(value.tolist())
    return value


def write_json(path, obj) -> Path:
    path = Path(path)
    path.write_text(json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n")
    return path


@dataclass(frozen=True)
class RunManifest:
    """Everything needed to reproduce one CLI run byte-for-byte.

    resolved_params holds the post-preset, post-override inputs; loading a
    manifest as --config picks that section up again.  For stochastic runs
    the master seed is recorded in settings.
    """

    subcommand: str
    version: str
    resolved_params: dict
    settings: dict = field(default_factory=dict)
    outputs: tuple = ()
    wall_clock_s: float = 0.0

    def to_dict(self) -> dict:
        return {
            "subcommand": self.subcommand,
            "version": self.version,
            "resolved_params": dict(self.resolved_params),
            "settings": dict(self.settings),
            "outputs": list(self.outputs),
            "wall_clock_s": self.wall_clock_s,
        }


def write_manifest(out_dir, manifest: RunManifest) -> Path:
    return write_json(Path(out_dir) / "manifest.json", manifest.to_dict())
