"""n-gram count tables over unit sequences, character streams, and word tokens.

Windows never cross utterance boundaries: an utterance of length L
contributes max(0, L - n + 1) n-grams. Tables are mergeable, so corpora can
be counted in shards and combined.
"""

from __future__ import annotations

import csv
import io
import sys
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import IncompatibleTables, IoFailure, MalformedRecord, ZeroLength
from .records import TokenRecord, UtteranceRecord
from .validation import require_positive_int

KINDS = ("unit", "character", "word")


@dataclass
class NgramTable:
    """Counts of n-grams (tuples of symbols) plus their grand total."""

    n: int
    kind: str  # one of KINDS
    counts: dict[tuple, int] = field(default_factory=dict)
    total: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        require_positive_int("n", self.n)


def count_unit_ngrams(records: list[UtteranceRecord], n: int) -> NgramTable:
    """Count unit n-grams within each utterance."""
    require_positive_int("n", n)
    windows = []
    for rec in records:
        units = np.asarray(rec.units, dtype=np.int64)
        if units.size >= n:
            windows.append(np.lib.stride_tricks.sliding_window_view(units, n))
    if not windows:
        return NgramTable(n, "unit", {}, 0)
    stacked = np.concatenate(windows, axis=0)
    uniq, freq = np.unique(stacked, axis=0, return_counts=True)
    counts = {
        tuple(int(v) for v in row): int(c) for row, c in zip(uniq, freq)
    }
    return NgramTable(n, "unit", counts, int(stacked.shape[0]))


def char_sequence(tokens: list[str], charset=None, joiner: str | None = " ") -> str:
    """Build the character stream for one record.

    Tokens are joined with ``joiner`` (None concatenates directly), then any
    character outside ``charset`` is dropped. ``charset=None`` keeps all
    characters.
    """
    if joiner is not None:
        if len(joiner) != 1:
            raise ValueError("joiner must be a single character or None")
        if charset is not None and joiner not in charset:
            raise ValueError("joiner must be a member of charset")
    text = (joiner or "").join(tokens)
    if charset is not None:
        keep = frozenset(charset)
        text = "".join(ch for ch in text if ch in keep)
    return text


def count_char_ngrams(
    records: list[TokenRecord],
    n: int,
    charset=None,
    joiner: str | None = " ",
) -> NgramTable:
    """Count character n-grams over per-record character streams."""
    require_positive_int("n", n)
    counter: Counter = Counter()
    total = 0
    for rec in records:
        text = char_sequence(rec.tokens, charset=charset, joiner=joiner)
        m = len(text) - n + 1
        if m > 0:
            counter.update(tuple(text[i : i + n]) for i in range(m))
            total += m
    return NgramTable(n, "character", dict(counter), total)


def count_words(records: list[TokenRecord]) -> NgramTable:
    """Count word unigrams over all records."""
    counter: Counter = Counter()
    total = 0
    for rec in records:
        counter.update((tok,) for tok in rec.tokens)
        total += len(rec.tokens)
    return NgramTable(1, "word", dict(counter), total)


def choose_n(ref_total_len: int, target_total_len: int) -> int:
    """Pick n as the average number of target symbols per reference symbol,
    rounded up (corpus-level totals, minimum 1)."""
    ref = int(ref_total_len)
    target = int(target_total_len)
    if ref <= 0:
        raise ZeroLength(f"reference length must be positive, got {ref}")
    if target <= 0:
        raise ZeroLength(f"target length must be positive, got {target}")
    return max(1, -(-target // ref))


def merge(a: NgramTable, b: NgramTable) -> NgramTable:
    """Pointwise-add two tables of the same order and kind."""
    if a.n != b.n:
        raise IncompatibleTables(f"cannot merge n={a.n} with n={b.n}")
    if a.kind != b.kind:
        raise IncompatibleTables(f"cannot merge kind={a.kind} with kind={b.kind}")
    merged = Counter(a.counts)
    merged.update(b.counts)
    return NgramTable(a.n, a.kind, dict(merged), a.total + b.total)


# --------------------------------------------------------------------------
# CSV export / import


def render_item(item: tuple, kind: str) -> str:
    if kind == "unit":
        return "-".join(str(u) for u in item)
    if kind == "character":
        return "".join(item)
    return " ".join(item)


def parse_item(text: str, kind: str, n: int) -> tuple:
    if kind == "unit":
        return tuple(int(part) for part in text.split("-"))
    if kind == "character":
        return tuple(text)
    return (text,) if n == 1 else tuple(text.split(" "))


def write_table_csv(table: NgramTable, path) -> None:
    """Write a table as CSV, rows sorted by descending count then item."""
    buf = io.StringIO()
    buf.write(f"#n={table.n},kind={table.kind},total={table.total}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["item", "count"])
    for item, count in sorted(table.counts.items(), key=lambda kv: (-kv[1], kv[0])):
        writer.writerow([render_item(item, table.kind), count])
    text = buf.getvalue()
    if path == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def read_table_csv(path) -> NgramTable:
    """Read a table written by write_table_csv, revalidating its invariants."""
    with open(path, encoding="utf-8", newline="") as fh:
        header = fh.readline().strip()
        if not header.startswith("#"):
            raise MalformedRecord(path, 1, "missing '#n=...,kind=...,total=...' header")
        meta = {}
        for part in header[1:].split(","):
            key, _, value = part.partition("=")
            meta[key.strip()] = value.strip()
        try:
            n = int(meta["n"])
            kind = meta["kind"]
            total = int(meta["total"])
        except (KeyError, ValueError) as exc:
            raise MalformedRecord(path, 1, f"bad table header: {header}") from exc
        if kind not in KINDS:
            raise MalformedRecord(path, 1, f"unknown kind {kind!r}")
        counts: dict[tuple, int] = {}
        reader = csv.reader(fh)
        for line_no, row in enumerate(reader, start=2):
            if line_no == 2:
                if row != ["item", "count"]:
                    raise MalformedRecord(path, 2, "missing 'item,count' header row")
                continue
            if len(row) != 2:
                raise MalformedRecord(path, line_no, f"expected 2 columns, got {len(row)}")
            try:
                item = parse_item(row[0], kind, n)
                count = int(row[1])
            except ValueError as exc:
                raise MalformedRecord(path, line_no, f"bad row: {row}") from exc
            if len(item) != n:
                raise MalformedRecord(path, line_no, f"item {row[0]!r} is not a {n}-gram")
            if count <= 0:
                raise MalformedRecord(path, line_no, f"count must be positive, got {count}")
            if item in counts:
                raise MalformedRecord(path, line_no, f"duplicate item {row[0]!r}")
            counts[item] = count
    if sum(counts.values()) != total:
        raise MalformedRecord(path, 1, "header total does not match sum of counts")
    return NgramTable(n, kind, counts, total)
