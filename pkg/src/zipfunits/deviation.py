"""Group-level deviation analysis of rank-frequency distributions.

Given per-group count tables, each group gets a free-exponent power-law fit
and three scalar deviation metrics against a reference group. The metrics
(delta_eta, log_curve_distance, top-K mass) are this toolkit's own
summaries of how a distribution departs from the reference; they are not
standard quantities, and the report output says so. All per-group fits and
distances use relative frequencies, so groups of different data sizes stay
comparable.
"""

from __future__ import annotations

import json
import sys
import zlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    IncompatibleTables,
    InsufficientData,
    IoFailure,
    MissingReference,
    TooFewPoints,
)
from .ngrams import NgramTable
from .powerlaw import (
    DEFAULT_TRIM_HI,
    DEFAULT_TRIM_LO,
    PowerLawFit,
    RankFrequency,
    fit_powerlaw,
    rank_frequency,
    trim_bounds,
)
from .records import UtteranceRecord
from .validation import normalize_seed, require_positive_int

DEFAULT_TOP_K = 20

METRIC_DEFINITIONS = {
    "delta_eta": "fitted exponent minus the reference group's fitted exponent",
    "log_curve_distance": (
        "mean absolute log10 relative-frequency gap to the reference curve "
        "over the shared trimmed rank range"
    ),
    "top_mass_K": "fraction of all occurrences carried by the K highest ranks",
}


@dataclass
class GroupStats:
    eta: float
    a: float
    rmse_log: float
    top_mass_K: float
    delta_eta: float
    log_curve_distance: float


@dataclass
class DeviationReport:
    reference: str
    per_group: dict[str, GroupStats]
    K: int
    n_utterances_per_group: int | None = None
    seed: int | None = None


def partition_by_group(records: list[UtteranceRecord]) -> dict[str, list[UtteranceRecord]]:
    """Bucket records by group label; unlabeled records are dropped."""
    groups: dict[str, list[UtteranceRecord]] = {}
    for rec in records:
        if rec.group is not None:
            groups.setdefault(rec.group, []).append(rec)
    return groups


def subsample_groups(
    records: list[UtteranceRecord], size: int, seed: int
) -> dict[str, list[UtteranceRecord]]:
    """Draw the same number of records from every group, reproducibly.

    Sampling is uniform without replacement over each group's ids in
    ascending order; each group's draw depends only on (seed, label), not on
    which other groups are present. Output records are sorted by id.
    """
    require_positive_int("size", size)
    groups = partition_by_group(records)
    sampled: dict[str, list[UtteranceRecord]] = {}
    for label in sorted(groups):
        members = sorted(groups[label], key=lambda r: r.id)
        if len(members) < size:
            raise InsufficientData(label, len(members), size)
        rng = np.random.default_rng(
            [normalize_seed(seed), zlib.crc32(label.encode("utf-8"))]
        )
        picks = rng.choice(len(members), size=size, replace=False)
        sampled[label] = [members[i] for i in sorted(int(i) for i in picks)]
    return sampled


def top_mass(rf: RankFrequency, K: int) -> float:
    """Fraction of total occurrences held by ranks 1..min(K, V)."""
    require_positive_int("K", K)
    upto = min(K, len(rf.entries))
    return sum(e.count for e in rf.entries[:upto]) / rf.total


def compare_groups(
    tables: dict[str, NgramTable],
    reference: str,
    trim_lo: float = DEFAULT_TRIM_LO,
    trim_hi: float = DEFAULT_TRIM_HI,
    K: int = DEFAULT_TOP_K,
    n_utterances_per_group: int | None = None,
    seed: int | None = None,
) -> DeviationReport:
    """Fit every group and quantify its deviation from the reference group."""
    if reference not in tables:
        raise MissingReference(
            f"reference group {reference!r} not in {sorted(tables)}"
        )
    ref_table = tables[reference]
    for label, table in tables.items():
        if table.n != ref_table.n or table.kind != ref_table.kind:
            raise IncompatibleTables(
                f"group {label!r} is n={table.n}/{table.kind}, reference is "
                f"n={ref_table.n}/{ref_table.kind}"
            )

    rfs: dict[str, RankFrequency] = {}
    bands: dict[str, tuple[int, int]] = {}
    fits: dict[str, PowerLawFit] = {}
    for label in sorted(tables):
        rf = rank_frequency(tables[label])
        lo, hi = trim_bounds(len(rf.entries), trim_lo, trim_hi)
        points = [(e.rank, e.rel_freq) for e in rf.entries[lo - 1 : hi]]
        if len(points) < 2:
            raise TooFewPoints(
                f"group {label!r}: band [{lo}, {hi}] keeps {len(points)} ranks"
            )
        rfs[label] = rf
        bands[label] = (lo, hi)
        fits[label] = fit_powerlaw(points)

    ref_fit = fits[reference]
    ref_rf = rfs[reference]
    ref_lo, ref_hi = bands[reference]

    per_group: dict[str, GroupStats] = {}
    for label in sorted(tables):
        fit = fits[label]
        lo = max(bands[label][0], ref_lo)
        hi = min(bands[label][1], ref_hi)
        if hi < lo:
            raise TooFewPoints(
                f"group {label!r} shares no trimmed ranks with the reference"
            )
        gaps = [
            abs(
                np.log10(rfs[label].entries[r - 1].rel_freq)
                - np.log10(ref_rf.entries[r - 1].rel_freq)
            )
            for r in range(lo, hi + 1)
        ]
        per_group[label] = GroupStats(
            eta=fit.eta,
            a=fit.a,
            rmse_log=fit.rmse_log,
            top_mass_K=top_mass(rfs[label], K),
            delta_eta=fit.eta - ref_fit.eta,
            log_curve_distance=float(np.mean(gaps)),
        )
    return DeviationReport(
        reference=reference,
        per_group=per_group,
        K=K,
        n_utterances_per_group=n_utterances_per_group,
        seed=seed,
    )


def report_to_dict(report: DeviationReport) -> dict:
    """JSON-ready view of a report, with the invented metrics spelled out."""
    return {
        "reference": report.reference,
        "K": report.K,
        "n_utterances_per_group": report.n_utterances_per_group,
        "seed": report.seed,
        "per_group": {
            label: {
                "eta": stats.eta,
                "a": stats.a,
                "rmse_log": stats.rmse_log,
                "top_mass_K": stats.top_mass_K,
                "delta_eta": stats.delta_eta,
                "log_curve_distance": stats.log_curve_distance,
            }
            for label, stats in sorted(report.per_group.items())
        },
        "metric_definitions": METRIC_DEFINITIONS,
    }


def write_report_json(report: DeviationReport, path) -> None:
    text = json.dumps(report_to_dict(report), indent=2) + "\n"
    if path == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc
