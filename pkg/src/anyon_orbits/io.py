"""CSV and JSON writers that embed the run configuration in every file."""

from __future__ import annotations

import csv
import json
import math
import platform
from pathlib import Path

import numpy as np

from . import __version__
from .config import RunConfig


def metadata(config: RunConfig, **extra) -> dict:
    """Everything needed to regenerate a table: config, extra parameters, versions."""
    return {
        "package_version": __version__,
        "numpy": np.__version__,
        "python": platform.python_version(),
        "config": config.as_dict(),
        "parameters": _jsonable(extra),
    }


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


def resolve_path(config: RunConfig, name: str | Path) -> Path:
    p = Path(name)
    if not p.is_absolute():
        p = Path(config.output_dir) / p
    p.parent.mkdir(parents=True, exist_ok=True)
    return p


def write_json(path: str | Path, payload: dict, meta: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    doc = {"metadata": meta, **_jsonable(payload)}
    path.write_text(json.dumps(doc, indent=2, sort_keys=False) + "\n")
    return path


def write_csv(path: str | Path, columns: dict[str, "np.ndarray | list"], meta: dict) -> Path:
    """Columnar CSV; metadata goes in leading ``#`` lines as compact JSON."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    names = list(columns)
    data = [list(np.asarray(columns[n]).tolist()) for n in names]
    lengths = {len(c) for c in data}
    if len(lengths) > 1:
        raise ValueError("all columns must have the same length")
    with path.open("w", newline="") as fh:
        for key, value in meta.items():
            fh.write(f"# {key}: {json.dumps(_jsonable(value), sort_keys=True)}\n")
        writer = csv.writer(fh)
        writer.writerow(names)
        for row in zip(*data):
            writer.writerow([_fmt(v) for v in row])
    return path


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def read_csv(path: str | Path) -> tuple[dict, dict[str, list[str]]]:
    """Inverse of :func:`write_csv`: (metadata, columns as strings)."""
    meta: dict = {}
    lines = []
    with Path(path).open() as fh:
        for line in fh:
            if line.startswith("# "):
                key, _, value = line[2:].partition(": ")
                meta[key] = json.loads(value)
            else:
                lines.append(line)
    reader = csv.reader(lines)
    header = next(reader)
    cols: dict[str, list[str]] = {h: [] for h in header}
    for row in reader:
        for h, v in zip(header, row):
            cols[h].append(v)
    return meta, cols
