"""Portable JSON serialization for batches of paths.

The on-disk format is a JSON array of objects, one per path:
{"dim": d, "times": [t0, ...], "values": [[v00, ..., v0d], ...]}.
Time-channel bookkeeping is not part of the portable format.
"""

from __future__ import annotations

import json
from os import PathLike

import numpy as np

from .errors import DataError, InvalidPathError
from .paths import Path


def path_to_dict(path: Path) -> dict:
    return {"dim": path.dim,
            "times": path.times.tolist(),
            "values": path.values.tolist()}


def dict_to_path(obj: dict) -> Path:
    if not isinstance(obj, dict):
        raise DataError("each path entry must be a JSON object")
    missing = [k for k in ("dim", "times", "values") if k not in obj]
    if missing:
        raise DataError(f"path entry is missing keys {missing}")
    try:
        times = np.asarray(obj["times"], dtype=float)
        values = np.asarray(obj["values"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise DataError(f"malformed path entry: {exc}") from exc
    if values.ndim != 2:
        raise DataError("values must be a list of per-point rows")
    if values.shape[1] != obj["dim"]:
        raise DataError(
            f"declared dim {obj['dim']} but value rows have {values.shape[1]} entries")
    try:
        return Path(times, values)
    except InvalidPathError as exc:
        raise DataError(f"invalid path entry: {exc}") from exc


def write_paths(paths: list[Path], target) -> None:
    """Write a batch to a file path or open text handle."""
    payload = [path_to_dict(p) for p in paths]
    if isinstance(target, (str, PathLike)):
        with open(target, "w") as fh:
            json.dump(payload, fh)
    else:
        json.dump(payload, target)


def read_paths(source) -> list[Path]:
    """Read a batch from a file path or open text handle."""
    try:
        if isinstance(source, (str, PathLike)):
            with open(source) as fh:
                payload = json.load(fh)
        else:
            payload = json.load(source)
    except OSError as exc:
        raise DataError(f"cannot read path file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"path file is not valid JSON: {exc}") from exc
    if not isinstance(payload, list):
        raise DataError("path file must hold a JSON array of path objects")
    return [dict_to_path(obj) for obj in payload]
