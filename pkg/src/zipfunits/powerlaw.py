"""Rank-frequency distributions and least-squares power-law fitting.

A count table becomes a rank-frequency distribution by sorting items by
descending count (ties broken by item order, each item getting its own
rank). Fitting regresses log10(count) on log10(rank): the negated slope is
the exponent eta and 10**intercept is the amplitude a of f_r = a * r**-eta.
Head and tail ranks usually deviate, so fits run on a configurable band of
ranks (default: top 0.1% to 10% of the vocabulary).
"""

from __future__ import annotations

import csv
import io
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator

from .errors import (
    BadBand,
    DegeneratePoints,
    EmptyTable,
    IoFailure,
    TooFewPoints,
)
from .ngrams import NgramTable, render_item
from .validation import normalize_seed, require_positive_int

DEFAULT_TRIM_LO = 0.001
DEFAULT_TRIM_HI = 0.10
DEFAULT_PLOT_POINTS = 500


@dataclass(frozen=True)
class RankEntry:
    rank: int
    item: tuple
    count: float
    rel_freq: float


@dataclass
class RankFrequency:
    """Items sorted by descending count, ranks 1..V, rel_freq = count/total."""

    entries: list[RankEntry]
    total: int

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def vocab_size(self) -> int:
        return len(self.entries)


@dataclass
class PowerLawFit:
    """Least-squares fit of f_r = a * r**-eta in log10 space."""

    a: float
    eta: float
    eta_fixed: bool
    rmse_log: float  # root-mean-square residual in log10 space
    n_points: int
    trim_lo_rank: int
    trim_hi_rank: int


def rank_frequency(table: NgramTable) -> RankFrequency:
    """Rank a table's items by descending count; ties take item order."""
    if not table.counts:
        raise EmptyTable("cannot rank an empty table")
    ordered = sorted(table.counts.items(), key=lambda kv: (-kv[1], kv[0]))
    total = table.total
    entries = [
        RankEntry(rank, item, count, count / total)
        for rank, (item, count) in enumerate(ordered, start=1)
    ]
    return RankFrequency(entries, total)


def trim_bounds(vocab_size: int, lo_frac: float, hi_frac: float) -> tuple[int, int]:
    """Rank band [lo, hi] covering fractions (lo_frac, hi_frac] of the vocabulary."""
    if not (0.0 <= lo_frac < hi_frac <= 1.0):
        raise BadBand(f"need 0 <= lo < hi <= 1, got lo={lo_frac}, hi={hi_frac}")
    # snap to 9 decimals so decimal fractions (0.001, 0.10) hit exact rank
    # boundaries despite binary float error
    lo_rank = max(1, math.ceil(round(lo_frac * vocab_size, 9)))
    hi_rank = max(lo_rank, math.floor(round(hi_frac * vocab_size, 9)))
    return lo_rank, hi_rank


def trim(
    rf: RankFrequency,
    lo_frac: float = DEFAULT_TRIM_LO,
    hi_frac: float = DEFAULT_TRIM_HI,
) -> list[tuple[int, float]]:
    """Keep the (rank, count) points inside the fitting band."""
    lo_rank, hi_rank = trim_bounds(len(rf.entries), lo_frac, hi_frac)
    points = [(e.rank, e.count) for e in rf.entries[lo_rank - 1 : hi_rank]]
    if len(points) < 2:
        raise TooFewPoints(
            f"band [{lo_rank}, {hi_rank}] keeps {len(points)} ranks, need >= 2"
        )
    return points


def fit_powerlaw(points, fix_eta: float | None = None) -> PowerLawFit:
    """Fit f_r = a * r**-eta to (rank, count) points by least squares in log10.

    With ``fix_eta`` the slope is pinned and only the amplitude is estimated
    (closed form: log10 a = mean(log10 f + eta * log10 r)).
    """
    pts = list(points)
    if len(pts) < 2:
        raise TooFewPoints(f"need at least 2 points, got {len(pts)}")
    ranks = np.asarray([p[0] for p in pts], dtype=np.float64)
    counts = np.asarray([p[1] for p in pts], dtype=np.float64)
    if np.any(ranks < 1):
        raise ValueError("ranks must be >= 1")
    if np.any(counts <= 0):
        raise ValueError("counts must be positive")
    x = np.log10(ranks)
    y = np.log10(counts)
    if fix_eta is None:
        xm = x.mean()
        sxx = float(((x - xm) ** 2).sum())
        if sxx == 0.0:
            raise DegeneratePoints("all ranks equal; slope is undefined")
        slope = float(((x - xm) * (y - y.mean())).sum()) / sxx
        eta = -slope
        intercept = float(y.mean()) - slope * float(xm)
    else:
        eta = float(fix_eta)
        intercept = float((y + eta * x).mean())
    residuals = y - (intercept - eta * x)
    rmse = math.sqrt(float((residuals**2).mean()))
    return PowerLawFit(
        a=10.0**intercept,
        eta=eta,
        eta_fixed=fix_eta is not None,
        rmse_log=rmse,
        n_points=len(pts),
        trim_lo_rank=int(ranks.min()),
        trim_hi_rank=int(ranks.max()),
    )


class PowerLawRegressor(BaseEstimator):
    """sklearn-style wrapper: fit (rank, count) data, predict counts per rank."""

    def __init__(self, fix_eta: float | None = None):
        self.fix_eta = fix_eta

    def fit(self, X, y=None):
        """X is either (rank, count) pairs, or ranks with counts passed as y."""
        if y is None:
            points = [(float(r), float(c)) for r, c in np.asarray(X, dtype=np.float64)]
        else:
            ranks = np.asarray(X, dtype=np.float64).reshape(-1)
            points = list(zip(ranks, np.asarray(y, dtype=np.float64)))
        self.result_ = fit_powerlaw(points, fix_eta=self.fix_eta)
        self.a_ = self.result_.a
        self.eta_ = self.result_.eta
        self.rmse_log_ = self.result_.rmse_log
        return self

    def predict(self, ranks):
        r = np.asarray(ranks, dtype=np.float64).reshape(-1)
        return self.a_ * r ** (-self.eta_)


def thin(rf: RankFrequency, max_points: int) -> list[RankEntry]:
    """Pick at most ``max_points`` entries on a log-spaced rank grid.

    Rank 1 and rank V always survive. Thinning is for plot output only;
    fitting always uses the untouched distribution.
    """
    require_positive_int("max_points", max_points)
    if max_points < 2:
        raise ValueError("max_points must be >= 2")
    vocab = len(rf.entries)
    if max_points >= vocab:
        return list(rf.entries)
    grid = np.geomspace(1.0, float(vocab), num=max_points)
    ranks = np.unique(np.clip(np.rint(grid).astype(np.int64), 1, vocab))
    return [rf.entries[r - 1] for r in ranks]


def sample_zipf_sequence(
    n_items: int, eta: float, n_draws: int, seed: int
) -> np.ndarray:
    """Draw n_draws i.i.d. items from p(r) proportional to r**-eta, items 1..n_items."""
    require_positive_int("n_items", n_items)
    require_positive_int("n_draws", n_draws)
    if eta < 0:
        raise ValueError(f"eta must be >= 0, got {eta}")
    ranks = np.arange(1, n_items + 1, dtype=np.float64)
    weights = ranks ** (-float(eta))
    probs = weights / weights.sum()
    rng = np.random.default_rng(normalize_seed(seed))
    return rng.choice(n_items, size=n_draws, p=probs).astype(np.int64) + 1


def sample_zipf(n_items: int, eta: float, n_draws: int, seed: int) -> NgramTable:
    """Sample a synthetic unigram table from a truncated power law."""
    seq = sample_zipf_sequence(n_items, eta, n_draws, seed)
    items, freq = np.unique(seq, return_counts=True)
    counts = {(int(i),): int(c) for i, c in zip(items, freq)}
    return NgramTable(1, "unit", counts, int(n_draws))


# --------------------------------------------------------------------------
# Export


def write_plot_csv(entries: list[RankEntry], kind: str, path) -> None:
    """Write plot-ready rows: rank,item,count,rel_freq."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["rank", "item", "count", "rel_freq"])
    for e in entries:
        count = int(e.count) if float(e.count).is_integer() else repr(e.count)
        writer.writerow([e.rank, render_item(e.item, kind), count, repr(e.rel_freq)])
    text = buf.getvalue()
    if path == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def fit_report(fit: PowerLawFit, total_tokens: int, vocab_size: int) -> dict:
    """JSON-ready summary of a fit plus the distribution it came from."""
    return {
        "a": fit.a,
        "eta": fit.eta,
        "eta_fixed": fit.eta_fixed,
        "rmse_log": fit.rmse_log,
        "n_points": fit.n_points,
        "trim_lo_rank": fit.trim_lo_rank,
        "trim_hi_rank": fit.trim_hi_rank,
        "total_tokens": total_tokens,
        "vocab_size": vocab_size,
    }
