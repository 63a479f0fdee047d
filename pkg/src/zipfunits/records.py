"""On-disk corpus formats: JSON Lines symbol records and binary feature files.

Record files are UTF-8 JSON Lines, one object per line. Unit records carry
``{"id": str, "units": [int, ...], "group": str?}``; token records carry
``tokens`` instead of ``units``. Unknown keys are ignored, duplicate ids are
an error, and every malformed line is reported with its line number.

Feature files are binary: 4 magic bytes ``FEAT``, then three little-endian
u32 fields (version=1, n_frames, dim), then n_frames*dim IEEE-754 float32
values in row-major order. A JSON Lines manifest maps utterance ids to
feature-file paths.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    BadMagic,
    BadVersion,
    IoFailure,
    MalformedRecord,
    NonFiniteValue,
    TruncatedPayload,
)

FEATURE_MAGIC = b"FEAT"
FEATURE_VERSION = 1
FEATURE_HEADER = struct.Struct("<4sIII")
FRAME_PERIOD_MS = 20


@dataclass
class UtteranceRecord:
    """One utterance as a sequence of discrete unit ids."""

    id: str
    units: list[int]
    group: str | None = None


@dataclass
class TokenRecord:
    """One utterance as a sequence of word (or raw-text) tokens."""

    id: str
    tokens: list[str]
    group: str | None = None


@dataclass(eq=False)
class FeatureMatrix:
    """Frame-level features for one utterance, one row per 20 ms frame."""

    id: str
    values: np.ndarray  # (n_frames, dim) float32, row-major
    group: str | None = None
    frame_period_ms: int = FRAME_PERIOD_MS

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float32)
        if arr.ndim != 2:
            raise ValueError(f"feature values must be 2-D, got shape {arr.shape}")
        if arr.shape[1] < 1:
            raise ValueError("feature dim must be >= 1")
        if not np.isfinite(arr).all():
            raise NonFiniteValue(f"feature matrix {self.id!r} has non-finite values")
        self.values = np.ascontiguousarray(arr)

    @property
    def n_frames(self) -> int:
        return int(self.values.shape[0])

    @property
    def dim(self) -> int:
        return int(self.values.shape[1])

    def __eq__(self, other):
        if not isinstance(other, FeatureMatrix):
            return NotImplemented
        return (
            self.id == other.id
            and self.group == other.group
            and self.values.shape == other.values.shape
            and np.array_equal(self.values, other.values)
        )


@dataclass
class ManifestEntry:
    id: str
    path: Path
    group: str | None = None


# --------------------------------------------------------------------------
# JSON Lines records


def _parse_line(raw: str, path, line_no: int) -> dict:
    try:
        obj = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise MalformedRecord(path, line_no, f"invalid JSON: {exc.msg}") from exc
    if not isinstance(obj, dict):
        raise MalformedRecord(path, line_no, "line is not a JSON object")
    return obj


def _take_id(obj: dict, path, line_no: int) -> str:
    ident = obj.get("id")
    if not isinstance(ident, str) or not ident:
        raise MalformedRecord(path, line_no, "missing or empty 'id'")
    return ident


def _take_group(obj: dict, path, line_no: int) -> str | None:
    group = obj.get("group")
    if group is None:
        return None
    if not isinstance(group, str):
        raise MalformedRecord(path, line_no, "'group' must be a string")
    return group


def _check_units(units, path, line_no: int) -> list[int]:
    if not isinstance(units, list):
        raise MalformedRecord(path, line_no, "missing or non-array 'units'")
    for u in units:
        # bool is an int subclass; JSON true/false must not pass as unit ids
        if not isinstance(u, int) or isinstance(u, bool):
            raise MalformedRecord(path, line_no, f"unit {u!r} is not an integer")
        if u < 0:
            raise MalformedRecord(path, line_no, f"unit {u} is negative")
    return units


def _check_tokens(tokens, path, line_no: int) -> list[str]:
    if not isinstance(tokens, list):
        raise MalformedRecord(path, line_no, "missing or non-array 'tokens'")
    for t in tokens:
        if not isinstance(t, str) or not t:
            raise MalformedRecord(path, line_no, f"token {t!r} is not a non-empty string")
    return tokens


def read_unit_records(path) -> list[UtteranceRecord]:
    """Read unit records in file order, validating every line."""
    records: list[UtteranceRecord] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            obj = _parse_line(raw, path, line_no)
            ident = _take_id(obj, path, line_no)
            if ident in seen:
                raise MalformedRecord(path, line_no, f"duplicate id {ident!r}")
            seen.add(ident)
            units = _check_units(obj.get("units"), path, line_no)
            records.append(UtteranceRecord(ident, units, _take_group(obj, path, line_no)))
    return records


def read_token_records(path) -> list[TokenRecord]:
    """Read token records in file order, validating every line."""
    records: list[TokenRecord] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            obj = _parse_line(raw, path, line_no)
            ident = _take_id(obj, path, line_no)
            if ident in seen:
                raise MalformedRecord(path, line_no, f"duplicate id {ident!r}")
            seen.add(ident)
            tokens = _check_tokens(obj.get("tokens"), path, line_no)
            records.append(TokenRecord(ident, tokens, _take_group(obj, path, line_no)))
    return records


def _dump_record(rec, payload_key: str, payload) -> str:
    obj: dict = {"id": rec.id, payload_key: payload}
    if rec.group is not None:
        obj["group"] = rec.group
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


def _validate_for_write(records, check_payload, path):
    seen: set[str] = set()
    for line_no, rec in enumerate(records, start=1):
        if not isinstance(rec.id, str) or not rec.id:
            raise MalformedRecord(path, line_no, "record id must be a non-empty string")
        if rec.id in seen:
            raise MalformedRecord(path, line_no, f"duplicate id {rec.id!r}")
        seen.add(rec.id)
        check_payload(rec, path, line_no)


def write_unit_records(records: list[UtteranceRecord], path) -> None:
    """Write unit records, one JSON object per line. Byte-stable across runs."""
    _validate_for_write(
        records, lambda r, p, n: _check_units(list(r.units), p, n), path
    )
    lines = [_dump_record(r, "units", [int(u) for u in r.units]) for r in records]
    _write_text(path, "".join(line + "\n" for line in lines))


def write_token_records(records: list[TokenRecord], path) -> None:
    """Write token records, one JSON object per line. Byte-stable across runs."""
    _validate_for_write(
        records, lambda r, p, n: _check_tokens(list(r.tokens), p, n), path
    )
    lines = [_dump_record(r, "tokens", list(r.tokens)) for r in records]
    _write_text(path, "".join(line + "\n" for line in lines))


def _write_text(path, text: str) -> None:
    try:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


# --------------------------------------------------------------------------
# Binary feature files


def write_feature_matrix(matrix: FeatureMatrix, path) -> None:
    """Write one feature matrix in the FEAT binary format."""
    if matrix.values.size and not np.isfinite(matrix.values).all():
        raise NonFiniteValue(f"refusing to write non-finite features for {matrix.id!r}")
    header = FEATURE_HEADER.pack(
        FEATURE_MAGIC, FEATURE_VERSION, matrix.n_frames, matrix.dim
    )
    payload = np.ascontiguousarray(matrix.values, dtype="<f4").tobytes()
    try:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_bytes(header + payload)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def read_feature_matrix(path, id: str | None = None, group: str | None = None) -> FeatureMatrix:
    """Read and validate one FEAT file.

    The binary format carries no utterance id; callers pass one (usually from
    a manifest), otherwise the file stem is used.
    """
    data = Path(path).read_bytes()
    if data[:4] != FEATURE_MAGIC:
        raise BadMagic(f"{path}: expected magic {FEATURE_MAGIC!r}, got {data[:4]!r}")
    if len(data) < FEATURE_HEADER.size:
        raise TruncatedPayload(f"{path}: header truncated at {len(data)} bytes")
    _, version, n_frames, dim = FEATURE_HEADER.unpack_from(data)
    if version != FEATURE_VERSION:
        raise BadVersion(f"{path}: unsupported version {version}")
    if dim < 1:
        raise TruncatedPayload(f"{path}: dim must be >= 1, got {dim}")
    expected = FEATURE_HEADER.size + 4 * n_frames * dim
    if len(data) != expected:
        raise TruncatedPayload(
            f"{path}: expected {expected} bytes for {n_frames}x{dim} payload, got {len(data)}"
        )
    values = (
        np.frombuffer(data, dtype="<f4", offset=FEATURE_HEADER.size)
        .reshape(n_frames, dim)
        .copy()
    )
    if values.size and not np.isfinite(values).all():
        raise NonFiniteValue(f"{path}: payload contains non-finite values")
    return FeatureMatrix(id=id or Path(path).stem, values=values, group=group)


# --------------------------------------------------------------------------
# Manifests


def read_manifest(path) -> list[ManifestEntry]:
    """Read a manifest mapping utterance ids to feature-file paths.

    Relative paths are resolved against the manifest's own directory.
    """
    base = Path(path).parent
    entries: list[ManifestEntry] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            obj = _parse_line(raw, path, line_no)
            ident = _take_id(obj, path, line_no)
            if ident in seen:
                raise MalformedRecord(path, line_no, f"duplicate id {ident!r}")
            seen.add(ident)
            rel = obj.get("path")
            if not isinstance(rel, str) or not rel:
                raise MalformedRecord(path, line_no, "missing or empty 'path'")
            target = Path(rel)
            if not target.is_absolute():
                target = base / target
            entries.append(ManifestEntry(ident, target, _take_group(obj, path, line_no)))
    return entries


def write_manifest(entries: list[ManifestEntry], path) -> None:
    lines = []
    for e in entries:
        obj: dict = {"id": e.id, "path": str(e.path)}
        if e.group is not None:
            obj["group"] = e.group
        lines.append(json.dumps(obj, ensure_ascii=False, separators=(",", ":")))
    _write_text(path, "".join(line + "\n" for line in lines))


def load_feature_matrices(manifest_path) -> list[FeatureMatrix]:
    """Load every feature file named by a manifest, in manifest order."""
    return [
        read_feature_matrix(e.path, id=e.id, group=e.group)
        for e in read_manifest(manifest_path)
    ]
