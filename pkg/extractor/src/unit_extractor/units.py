"""Discretize frame features against a trained codebook.

The label rule mirrors the analysis toolkit exactly so both tools emit
identical unit streams for the same inputs: frames and centroids are
compared in float64, distance is the squared euclidean sum over the last
axis, ties go to the lowest centroid index, and consecutive repeats are
collapsed.
"""

from __future__ import annotations

from itertools import groupby
from pathlib import Path

import numpy as np

from .config import ExtractorConfig
from .errors import DimensionMismatch
from .featio import read_codebook, write_unit_records
from .features import extract_features


def nearest_units(centroids: np.ndarray, frames: np.ndarray) -> list[int]:
    """Nearest-centroid label per frame; ties go to the lowest index."""
    cents = np.asarray(centroids, dtype=np.float64)
    feats = np.asarray(frames, dtype=np.float64)
    if feats.ndim != 2:
        raise DimensionMismatch(f"frames must be 2-D, got shape {feats.shape}")
    if feats.shape[0] and feats.shape[1] != cents.shape[1]:
        raise DimensionMismatch(
            f"frames have dim {feats.shape[1]}, codebook has dim {cents.shape[1]}"
        )
    if feats.shape[0] == 0:
        return []
    d2 = ((feats[:, None, :] - cents[None, :, :]) ** 2).sum(axis=2)
    return [int(u) for u in d2.argmin(axis=1)]


def dedupe(units: list[int]) -> list[int]:
    """Collapse consecutive repeats: 3 3 7 7 3 -> 3 7 3."""
    return [symbol for symbol, _ in groupby(units)]


def extract_units(
    audio_paths,
    config: ExtractorConfig,
    codebook_path,
    out_path,
    group: str | None = None,
    collapse_repeats: bool = True,
) -> list[dict]:
    """Extract, quantize, and write unit records, one line per input file.

    Records are written in input order with the file stem as the id and
    are byte-compatible with the analysis toolkit's unit JSONL.
    """
    centroids = read_codebook(codebook_path)
    records = []
    for audio_path in audio_paths:
        path = Path(audio_path)
        frames = extract_features(path, config)
        if frames.shape[0] and frames.shape[1] != centroids.shape[1]:
            raise DimensionMismatch(
                f"{path.name}: features have dim {frames.shape[1]}, "
                f"codebook has dim {centroids.shape[1]}"
            )
        units = nearest_units(centroids, frames)
        if collapse_repeats:
            units = dedupe(units)
        record = {"id": path.stem, "units": units}
        if group is not None:
            record["group"] = group
        records.append(record)
    write_unit_records(records, out_path)
    return records
