"""Frame coefficient matrix files.

Two interchangeable formats:

* JSON: ``{"n": rows, "m": cols, "data": [row-major doubles]}``
* binary: a 16-byte header (magic ``FRMX``, little-endian u32 n, u32 m,
  4 reserved zero bytes) followed by n*m row-major little-endian float64.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

__all__ = ["load_matrix", "save_matrix_binary", "save_matrix_json"]

MAGIC = b"FRMX"
_HEADER = struct.Struct("<4sII4x")


def save_matrix_json(path, matrix) -> None:
    mat = np.asarray(matrix, dtype=float)
    if mat.ndim != 2:
        raise ValueError("matrix must be 2-d")
    payload = {
        "n": int(mat.shape[0]),
        "m": int(mat.shape[1]),
        "data": [float(v) for v in mat.ravel()],
    }
    Path(path).write_text(json.dumps(payload))


def save_matrix_binary(path, matrix) -> None:
    mat = np.ascontiguousarray(np.asarray(matrix, dtype="<f8"))
    if mat.ndim != 2:
        raise ValueError("matrix must be 2-d")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, mat.shape[0], mat.shape[1]))
        fh.write(mat.tobytes())


def load_matrix(path) -> np.ndarray:
    """Load a coefficient matrix, sniffing the format from the magic bytes."""
    path = Path(path)
    raw = path.read_bytes()
    if raw[:4] == MAGIC:
        if len(raw) < _HEADER.size:
            raise ValueError(f"{path}: truncated binary matrix header")
        _, n, m = _HEADER.unpack_from(raw)
        expected = _HEADER.size + 8 * n * m
        if len(raw) != expected:
            raise ValueError(
                f"{path}: expected {expected} bytes for a {n}x{m} matrix, got {len(raw)}"
            )
        mat = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size).reshape(n, m)
        mat = mat.astype(float)
    else:
        payload = json.loads(raw.decode("utf-8"))
        n, m = int(payload["n"]), int(payload["m"])
        data = np.asarray(payload["data"], dtype=float)
        if data.size != n * m:
            raise ValueError(f"{path}: data length {data.size} does not match {n}x{m}")
        mat = data.reshape(n, m)
    if not np.all(np.isfinite(mat)):
        raise ValueError(f"{path}: matrix contains non-finite entries")
    return mat
