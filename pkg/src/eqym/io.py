"""Run artifacts: resolved configs, summaries and CSV tables, written deterministically."""
from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field, is_dataclass
from importlib import metadata
from pathlib import Path

import numpy as np

TOOL = "eqym"
CSV_VERSION = 1  # bump when column contracts change


def tool_version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0+unknown"


def _default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if is_dataclass(obj):
        return asdict(obj)
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _finite(obj):
    """JSON has no NaN/inf: map them to null so files stay strict."""
    if isinstance(obj, float) and not np.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    return obj


def dumps(obj) -> str:
    return json.dumps(_finite(json.loads(json.dumps(obj, default=_default))), indent=2, sort_keys=True,
                      allow_nan=False) + "\n"


def write_json(path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj))
    return path


def fmt(x) -> str:
    return repr(float(x))  # shortest round-trip form


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) if isinstance(v, (float, np.floating, int, np.integer)) else v for v in row])
    return path


def read_csv(path) -> tuple[list, np.ndarray]:
    with open(path) as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array(rows[1:], dtype=float)


def grid_rows(r, fields: dict, radial: dict | None = None, temporal: dict | None = None):
    """Grid state table: r, then (value, d/dr, d/dt) per field."""
    radial, temporal = radial or {}, temporal or {}
    r = np.asarray(r, float)
    names = list(fields)
    header = ["r"] + [c for k in names for c in (k, f"d{k}/dr", f"d{k}/dt")]
    cols = [r]
    for k in names:
        v = np.asarray(fields[k], float) * np.ones_like(r)
        cols += [v, np.asarray(radial.get(k, np.gradient(v, r, edge_order=2)), float) * np.ones_like(r),
                 np.asarray(temporal.get(k, 0.0), float) * np.ones_like(r)]
    return header, np.column_stack(cols)


@dataclass
class RunConfig:
    """Resolved configuration of one CLI run."""

    command: str
    params: dict = field(default_factory=dict)
    seed: int = 0
    out: str = "runs"

    def validate(self):
        if not self.command:
            raise ValueError("missing command")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        return self


def write_run(out_dir, config: RunConfig, results: list, extra: dict | None = None) -> dict:
    """Write config.json and summary.json; return the summary."""
    out = Path(out_dir)
    write_json(out / "config.json", {"tool": TOOL, "version": tool_version(), "csv_version": CSV_VERSION,
                                     "config": asdict(config)})
    summary = {
        "tool": TOOL,
        "version": tool_version(),
        "command": config.command,
        "passed": all(r["passed"] for r in results),
        "results": results,
    }
    if extra:
        summary.update(extra)
    write_json(out / "summary.json", summary)
    return summary
