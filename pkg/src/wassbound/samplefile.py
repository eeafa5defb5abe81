"""Sample-matrix file format: small self-describing binary, plus CSV bridge.

Layout: 8 magic bytes, then version, n, d as 64-bit little-endian unsigned
integers, then n*d float64 values in row-major order. Round trips are
bit-exact, unlike CSV.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

MAGIC = b"WBSAMPLE"
VERSION = 1
_HEADER = struct.Struct("<8sQQQ")


class DataError(ValueError):
    """Malformed or inconsistent sample data."""


def write_samples(path, points: np.ndarray) -> None:
    pts = np.ascontiguousarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2:
        raise DataError(f"samples must be a 2-d array, got shape {pts.shape}")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, pts.shape[0], pts.shape[1]))
        fh.write(pts.astype("<f8").tobytes())


def read_samples(path) -> np.ndarray:
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if len(raw) < _HEADER.size:
        raise DataError(f"{path}: file too short for a sample-matrix header")
    magic, version, n, d = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise DataError(f"{path}: bad magic bytes, not a sample-matrix file")
    if version != VERSION:
        raise DataError(f"{path}: unsupported version {version}")
    expected = _HEADER.size + 8 * n * d
    if len(raw) != expected:
        raise DataError(f"{path}: expected {expected} bytes for {n}x{d} doubles, got {len(raw)}")
    data = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size).reshape(n, d)
    out = np.ascontiguousarray(data)
    if not np.all(np.isfinite(out)):
        raise DataError(f"{path}: sample matrix contains non-finite values")
    return out


def read_csv_samples(path) -> np.ndarray:
    try:
        data = np.loadtxt(path, delimiter=",", dtype=np.float64, ndmin=2)
    except (OSError, ValueError) as exc:
        raise DataError(f"cannot parse {path} as numeric CSV: {exc}") from exc
    if not np.all(np.isfinite(data)):
        raise DataError(f"{path}: CSV contains non-finite values")
    return data


def write_csv_samples(path, points: np.ndarray) -> None:
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[:, None]
    with open(path, "w", newline="") as fh:
        for row in pts:
            fh.write(",".join(f"{v:.17g}" for v in row))
            fh.write("\n")
