"""File formats shared with the analysis toolkit, written independently
from their byte-level contracts.

FEAT: magic b"FEAT", u32 LE version=1, u32 n_frames, u32 dim, then
n_frames*dim float32 LE row-major. CDBK: magic b"CDBK", same header shape,
k*dim float32 centroids. Units and manifests are JSONL with compact
separators. Files are written atomically (temp in the same directory,
then rename).
"""

from __future__ import annotations

import json
import os
import struct
import tempfile
from pathlib import Path

import numpy as np

from .errors import BadCodebook

FEATURE_MAGIC = b"FEAT"
CODEBOOK_MAGIC = b"CDBK"
FORMAT_VERSION = 1
HEADER = struct.Struct("<4sIII")


def _atomic_write_bytes(path, payload: bytes) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def write_feature_file(values: np.ndarray, path) -> None:
    """Write one utterance's frames as a FEAT file."""
    arr = np.ascontiguousarray(np.asarray(values, dtype=np.float32))
    if arr.ndim != 2:
        raise ValueError(f"features must be 2-D, got shape {arr.shape}")
    if arr.shape[1] < 1:
        raise ValueError("feature dim must be >= 1")
    if not np.isfinite(arr).all():
        raise ValueError("features must be finite")
    header = HEADER.pack(FEATURE_MAGIC, FORMAT_VERSION, arr.shape[0], arr.shape[1])
    _atomic_write_bytes(path, header + arr.astype("<f4").tobytes())


def read_codebook(path) -> np.ndarray:
    """Read CDBK centroids as float64, matching the toolkit's in-memory view."""
    data = Path(path).read_bytes()
    if data[:4] != CODEBOOK_MAGIC:
        raise BadCodebook(f"{path}: expected magic {CODEBOOK_MAGIC!r}, got {data[:4]!r}")
    if len(data) < HEADER.size:
        raise BadCodebook(f"{path}: header truncated at {len(data)} bytes")
    _, version, k, dim = HEADER.unpack_from(data)
    if version != FORMAT_VERSION:
        raise BadCodebook(f"{path}: unsupported version {version}")
    if k < 1 or dim < 1:
        raise BadCodebook(f"{path}: k and dim must be >= 1, got k={k}, dim={dim}")
    expected = HEADER.size + 4 * k * dim
    if len(data) != expected:
        raise BadCodebook(
            f"{path}: expected {expected} bytes for {k}x{dim} payload, got {len(data)}"
        )
    return (
        np.frombuffer(data, dtype="<f4", offset=HEADER.size)
        .reshape(k, dim)
        .astype(np.float64)
    )


def _dump_jsonl(rows: list[dict]) -> bytes:
    lines = [
        json.dumps(row, ensure_ascii=False, separators=(",", ":")) for row in rows
    ]
    return ("".join(line + "\n" for line in lines)).encode("utf-8")


def write_manifest(entries: list[dict], path) -> None:
    """Write {id, path, group?, layer?} manifest lines.

    Paths should be relative to the manifest's directory. The optional
    layer key records which encoder layer produced the features; readers
    that only need id/path/group ignore it.
    """
    rows = []
    for entry in entries:
        row = {"id": entry["id"], "path": entry["path"]}
        if entry.get("group") is not None:
            row["group"] = entry["group"]
        if entry.get("layer") is not None:
            row["layer"] = entry["layer"]
        rows.append(row)
    _atomic_write_bytes(path, _dump_jsonl(rows))


def write_unit_records(records: list[dict], path) -> None:
    """Write {id, units, group?} lines, byte-compatible with the toolkit."""
    rows = []
    for rec in records:
        row = {"id": rec["id"], "units": rec["units"]}
        if rec.get("group") is not None:
            row["group"] = rec["group"]
        rows.append(row)
    _atomic_write_bytes(path, _dump_jsonl(rows))
