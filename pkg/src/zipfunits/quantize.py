"""k-means vector quantization of frame features into discrete unit sequences.

Training is full-batch Lloyd's with k-means++ initialization, seeded and
fully deterministic: accumulation runs in frame order, assignment ties break
toward the lowest centroid index, and an empty cluster is re-seeded at the
point farthest from its assigned centroid. Consecutive duplicate units are
collapsed with dedupe() after assignment.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from itertools import groupby
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator

from .errors import (
    BadMagic,
    BadVersion,
    DimensionMismatch,
    InsufficientPoints,
    IoFailure,
    NonFiniteValue,
    TruncatedPayload,
)
from .records import FeatureMatrix, UtteranceRecord
from .validation import (
    as_frame_array,
    normalize_seed,
    require_non_negative,
    require_positive_int,
    stack_frames,
)

CODEBOOK_MAGIC = b"CDBK"
CODEBOOK_VERSION = 1
CODEBOOK_HEADER = struct.Struct("<4sIII")

DEFAULT_K = 200
DEFAULT_MAX_ITERS = 100
DEFAULT_TOL = 1e-6


@dataclass(eq=False)
class Codebook:
    """k centroids defining the unit inventory."""

    centroids: np.ndarray  # (k, dim) float64
    trained_on: str | None = None

    def __post_init__(self):
        arr = np.asarray(self.centroids, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"centroids must be (k, dim) with k,dim >= 1, got {arr.shape}")
        if not np.isfinite(arr).all():
            raise NonFiniteValue("centroids contain non-finite values")
        self.centroids = np.ascontiguousarray(arr)

    @property
    def k(self) -> int:
        return int(self.centroids.shape[0])

    @property
    def dim(self) -> int:
        return int(self.centroids.shape[1])

    def __eq__(self, other):
        if not isinstance(other, Codebook):
            return NotImplemented
        return (
            self.trained_on == other.trained_on
            and self.centroids.shape == other.centroids.shape
            and np.array_equal(self.centroids, other.centroids)
        )


def _nearest(centroids: np.ndarray, frames: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per frame: index of the closest centroid (ties -> lowest index) and
    its squared distance. Chunked so k*dim stays within a bounded buffer."""
    n = frames.shape[0]
    labels = np.empty(n, dtype=np.int64)
    dist2 = np.empty(n, dtype=np.float64)
    if n == 0:
        return labels, dist2
    k, dim = centroids.shape
    chunk = max(1, int(2**24 / max(1, k * dim)))
    for start in range(0, n, chunk):
        block = frames[start : start + chunk]
        d2 = ((block[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
        lab = d2.argmin(axis=1)  # argmin returns the first (lowest) index on ties
        labels[start : start + chunk] = lab
        dist2[start : start + chunk] = np.take_along_axis(d2, lab[:, None], axis=1)[:, 0]
    return labels, dist2


def _kmeans_plus_plus(frames: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    centroids = np.empty((k, frames.shape[1]), dtype=np.float64)
    first = int(rng.integers(frames.shape[0]))
    centroids[0] = frames[first]
    d2 = ((frames - centroids[0]) ** 2).sum(axis=1)
    for j in range(1, k):
        total = float(d2.sum())
        if total > 0.0:
            idx = int(rng.choice(frames.shape[0], p=d2 / total))
        else:
            # fewer distinct points than centers; any point will do
            idx = int(rng.integers(frames.shape[0]))
        centroids[j] = frames[idx]
        d2 = np.minimum(d2, ((frames - centroids[j]) ** 2).sum(axis=1))
    return centroids


def _reseed_empty(centroids, labels, dist2, frames, k):
    counts = np.bincount(labels, minlength=k)
    for cluster in np.flatnonzero(counts == 0):
        idx = int(dist2.argmax())
        centroids[cluster] = frames[idx]
        labels[idx] = cluster
        dist2[idx] = 0.0


def _cluster_means(frames, labels, k):
    # np.add.at accumulates in frame order, keeping sums reproducible
    sums = np.zeros((k, frames.shape[1]), dtype=np.float64)
    np.add.at(sums, labels, frames)
    counts = np.bincount(labels, minlength=k).astype(np.float64)
    return sums / counts[:, None]


class KMeansQuantizer(BaseEstimator):
    """Learns a k-means codebook over frame features; predicts unit ids.

    Attributes after fit: ``codebook_``, ``inertia_`` (final within-cluster
    sum of squares), ``inertia_trace_`` (one value per Lloyd iteration plus
    the final state; non-increasing), ``n_iter_``.
    """

    def __init__(
        self,
        k: int = DEFAULT_K,
        seed: int = 0,
        max_iters: int = DEFAULT_MAX_ITERS,
        tol: float = DEFAULT_TOL,
    ):
        self.k = k
        self.seed = seed
        self.max_iters = max_iters
        self.tol = tol

    def fit(self, X, y=None):
        k = require_positive_int("k", self.k)
        max_iters = require_positive_int("max_iters", self.max_iters)
        tol = require_non_negative("tol", self.tol)
        frames = stack_frames(X)
        if frames.shape[0] < k:
            raise InsufficientPoints(frames.shape[0], k)

        rng = np.random.default_rng(normalize_seed(self.seed))
        centroids = _kmeans_plus_plus(frames, k, rng)
        trace: list[float] = []
        n_iter = 0
        for _ in range(max_iters):
            labels, dist2 = _nearest(centroids, frames)
            _reseed_empty(centroids, labels, dist2, frames, k)
            trace.append(float(dist2.sum()))
            updated = _cluster_means(frames, labels, k)
            shift = float(np.sqrt(((updated - centroids) ** 2).sum(axis=1).max()))
            centroids = updated
            n_iter += 1
            if shift <= tol:
                break
        labels, dist2 = _nearest(centroids, frames)
        _reseed_empty(centroids, labels, dist2, frames, k)
        trace.append(float(dist2.sum()))

        self.codebook_ = Codebook(centroids)
        self.inertia_trace_ = trace
        self.inertia_ = trace[-1]
        self.n_iter_ = n_iter
        return self

    def predict(self, X) -> np.ndarray:
        """Map each frame of one feature matrix to its nearest centroid index."""
        frames = as_frame_array(X)
        if frames.shape[1] != self.codebook_.dim:
            raise DimensionMismatch(
                f"features have dim {frames.shape[1]}, codebook has {self.codebook_.dim}"
            )
        labels, _ = _nearest(self.codebook_.centroids, frames)
        return labels


def kmeans_train(
    features,
    k: int,
    seed: int = 0,
    max_iters: int = DEFAULT_MAX_ITERS,
    tol: float = DEFAULT_TOL,
) -> Codebook:
    """Train a codebook on a batch of feature matrices."""
    return KMeansQuantizer(k=k, seed=seed, max_iters=max_iters, tol=tol).fit(features).codebook_


def assign(codebook: Codebook, features: FeatureMatrix, group: str | None = None) -> UtteranceRecord:
    """Quantize one utterance's frames into a unit-id sequence."""
    frames = as_frame_array(features)
    if frames.shape[1] != codebook.dim:
        raise DimensionMismatch(
            f"features have dim {frames.shape[1]}, codebook has {codebook.dim}"
        )
    labels, _ = _nearest(codebook.centroids, frames)
    return UtteranceRecord(
        id=features.id,
        units=[int(u) for u in labels],
        group=group if group is not None else features.group,
    )


def dedupe(units):
    """Collapse each maximal run of identical consecutive symbols to one."""
    return [symbol for symbol, _ in groupby(units)]


def inertia(codebook: Codebook, features) -> float:
    """Sum of squared distances from every frame to its nearest centroid."""
    frames = stack_frames(features)
    if frames.shape[0] and frames.shape[1] != codebook.dim:
        raise DimensionMismatch(
            f"features have dim {frames.shape[1]}, codebook has {codebook.dim}"
        )
    _, dist2 = _nearest(codebook.centroids, frames)
    return float(dist2.sum())


# --------------------------------------------------------------------------
# Codebook file format: magic CDBK, u32 version=1, u32 k, u32 dim, then
# k*dim float32 little-endian, row-major. float64 centroids are narrowed to
# float32 on write.


def write_codebook(codebook: Codebook, path) -> None:
    header = CODEBOOK_HEADER.pack(
        CODEBOOK_MAGIC, CODEBOOK_VERSION, codebook.k, codebook.dim
    )
    payload = np.ascontiguousarray(codebook.centroids, dtype="<f4").tobytes()
    data = header + payload
    if path == "-":
        import sys

        sys.stdout.buffer.write(data)
        return
    try:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_bytes(data)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def read_codebook(path) -> Codebook:
    data = Path(path).read_bytes()
    if data[:4] != CODEBOOK_MAGIC:
        raise BadMagic(f"{path}: expected magic {CODEBOOK_MAGIC!r}, got {data[:4]!r}")
    if len(data) < CODEBOOK_HEADER.size:
        raise TruncatedPayload(f"{path}: header truncated at {len(data)} bytes")
    _, version, k, dim = CODEBOOK_HEADER.unpack_from(data)
    if version != CODEBOOK_VERSION:
        raise BadVersion(f"{path}: unsupported version {version}")
    if k < 1 or dim < 1:
        raise TruncatedPayload(f"{path}: k and dim must be >= 1, got k={k}, dim={dim}")
    expected = CODEBOOK_HEADER.size + 4 * k * dim
    if len(data) != expected:
        raise TruncatedPayload(
            f"{path}: expected {expected} bytes for {k}x{dim} payload, got {len(data)}"
        )
    centroids = (
        np.frombuffer(data, dtype="<f4", offset=CODEBOOK_HEADER.size)
        .reshape(k, dim)
        .astype(np.float64)
    )
    return Codebook(centroids)
