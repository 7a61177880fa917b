"""Versioned parameter checkpoints.

A checkpoint is a JSON object mapping parameter names to shape plus a
base64-encoded little-endian float32 payload. Keys are sorted and floats
never pass through decimal text, so files are byte-stable across platforms.
"""

from __future__ import annotations

import base64
import json
from pathlib import Path

import numpy as np

from .tensor import Tensor

FORMAT_VERSION = 1


class CheckpointError(Exception):
    pass


def save_params(params: dict[str, Tensor], path) -> None:
    payload = {
        "format": "molfuse-checkpoint",
        "version": FORMAT_VERSION,
        "params": {
            name: {
                "shape": list(p.shape),
                "data": base64.b64encode(
                    np.ascontiguousarray(p.data, dtype="<f4").tobytes()
                ).decode("ascii"),
            }
            for name, p in params.items()
        },
    }
    Path(path).write_text(json.dumps(payload, sort_keys=True, indent=0) + "\n")


def load_params(path, dtype=np.float64) -> dict[str, Tensor]:
    try:
        payload = json.loads(Path(path).read_text())
    except (OSError, ValueError) as exc:
        raise CheckpointError(f"cannot read checkpoint {path}: {exc}") from exc
    if payload.get("format") != "molfuse-checkpoint":
        raise CheckpointError(f"{path} is not a molfuse checkpoint")
    if payload.get("version") != FORMAT_VERSION:
        raise CheckpointError(f"unsupported checkpoint version {payload.get('version')}")
    params: dict[str, Tensor] = {}
    for name, entry in payload["params"].items():
        raw = base64.b64decode(entry["data"])
        arr = np.frombuffer(raw, dtype="<f4").reshape(entry["shape"]).astype(dtype)
        params[name] = Tensor(arr, requires_grad=True)
    return params
