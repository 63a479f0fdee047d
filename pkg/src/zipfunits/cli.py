"""Command-line pipeline: train a codebook, quantize features, count n-grams,
fit power laws, and compare speaker groups.

Exit codes: 0 success, 2 bad input (files, flags, preconditions), 1 internal
failure. Data goes to stdout only when the output path is ``-``; diagnostics
always go to stderr. Every command is deterministic given its flags, inputs,
and seed.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path

import numpy as np

from .deviation import (
    DEFAULT_TOP_K,
    compare_groups,
    subsample_groups,
    write_report_json,
)
from .errors import IoFailure, MalformedRecord, ZipfUnitsError
from .ngrams import (
    KINDS,
    char_sequence,
    choose_n,
    count_char_ngrams,
    count_unit_ngrams,
    count_words,
    read_table_csv,
    write_table_csv,
)
from .powerlaw import (
    DEFAULT_PLOT_POINTS,
    DEFAULT_TRIM_HI,
    DEFAULT_TRIM_LO,
    fit_powerlaw,
    fit_report,
    rank_frequency,
    sample_zipf,
    sample_zipf_sequence,
    thin,
    trim,
    write_plot_csv,
)
from .quantize import (
    DEFAULT_K,
    DEFAULT_MAX_ITERS,
    DEFAULT_TOL,
    KMeansQuantizer,
    assign,
    dedupe,
    read_codebook,
    write_codebook,
)
from .records import (
    UtteranceRecord,
    load_feature_matrices,
    read_feature_matrix,
    read_manifest,
    read_token_records,
    read_unit_records,
    write_unit_records,
)


def _write_json(payload: dict, path) -> None:
    text = json.dumps(payload, indent=2) + "\n"
    if path == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def _joiner_arg(value: str) -> str | None:
    # "none" selects direct concatenation; any single char is a literal joiner
    return None if value == "none" else value


def _cmd_kmeans_train(args) -> int:
    mats = load_feature_matrices(args.manifest)
    est = KMeansQuantizer(
        k=args.k, seed=args.seed, max_iters=args.max_iters, tol=args.tol
    ).fit(mats)
    write_codebook(est.codebook_, args.out)
    print(
        f"k={args.k} inertia={est.inertia_!r} iterations={est.n_iter_}",
        file=sys.stderr,
    )
    return 0


def _cmd_quantize(args) -> int:
    book = read_codebook(args.codebook)
    records = []
    for entry in read_manifest(args.manifest):
        mat = read_feature_matrix(entry.path, id=entry.id, group=entry.group)
        rec = assign(book, mat)
        if not args.no_dedupe:
            rec = UtteranceRecord(rec.id, dedupe(rec.units), rec.group)
        records.append(rec)
    write_unit_records(records, args.out)
    return 0


def _cmd_count(args) -> int:
    if args.kind == "unit":
        table = count_unit_ngrams(read_unit_records(args.input), args.n)
    elif args.kind == "character":
        table = count_char_ngrams(
            read_token_records(args.input),
            args.n,
            charset=args.charset,
            joiner=args.joiner,
        )
    else:
        if args.n != 1:
            raise ZipfUnitsError("word tables support n=1 only")
        table = count_words(read_token_records(args.input))
    write_table_csv(table, args.out)
    return 0


def _detect_kind(path) -> str:
    """Peek at the first record to tell unit files from token files."""
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            if not raw.strip():
                continue
            try:
                obj = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise MalformedRecord(path, line_no, f"invalid JSON: {exc}") from exc
            if isinstance(obj, dict) and "units" in obj:
                return "unit"
            if isinstance(obj, dict) and "tokens" in obj:
                return "word"
            raise MalformedRecord(path, line_no, "record has neither units nor tokens")
    raise MalformedRecord(path, 1, "empty file, cannot detect record kind")


def _total_symbols(path, kind: str, charset, joiner) -> int:
    if kind == "auto":
        kind = _detect_kind(path)
    if kind == "unit":
        return sum(len(r.units) for r in read_unit_records(path))
    records = read_token_records(path)
    if kind == "word":
        return sum(len(r.tokens) for r in records)
    return sum(
        len(char_sequence(r.tokens, charset=charset, joiner=joiner))
        for r in records
    )


def _cmd_choose_n(args) -> int:
    ref_total = _total_symbols(args.ref, args.ref_kind, args.charset, args.joiner)
    target_total = _total_symbols(
        args.target, args.target_kind, args.charset, args.joiner
    )
    print(choose_n(ref_total, target_total))
    return 0


def _cmd_fit(args) -> int:
    table = read_table_csv(args.table)
    rf = rank_frequency(table)
    points = trim(rf, args.trim_lo, args.trim_hi)
    fit = fit_powerlaw(points, fix_eta=args.fix_eta)
    _write_json(fit_report(fit, total_tokens=table.total, vocab_size=len(rf)), args.out)
    if args.plot_out is not None:
        write_plot_csv(thin(rf, args.max_plot_points), table.kind, args.plot_out)
    return 0


def _safe_label(label: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]", "_", label)


def _cmd_compare(args) -> int:
    records = read_unit_records(args.units)
    sampled = subsample_groups(records, args.sample_size, args.seed)
    tables = {
        label: count_unit_ngrams(recs, args.n) for label, recs in sampled.items()
    }
    report = compare_groups(
        tables,
        args.reference,
        trim_lo=args.trim_lo,
        trim_hi=args.trim_hi,
        K=args.k_top,
        n_utterances_per_group=args.sample_size,
        seed=args.seed,
    )
    write_report_json(report, args.out)
    if args.plot_dir is not None:
        out_dir = Path(args.plot_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        for label, table in sorted(tables.items()):
            rf = rank_frequency(table)
            write_plot_csv(
                thin(rf, args.max_plot_points),
                table.kind,
                out_dir / f"{_safe_label(label)}.csv",
            )
    return 0


def _cmd_sample_zipf(args) -> int:
    if args.records:
        seq = sample_zipf_sequence(args.items, args.eta, args.draws, args.seed)
        records = [
            UtteranceRecord(
                f"{args.id_prefix}{i:06d}",
                [int(u) for u in chunk],
                args.group,
            )
            for i, chunk in enumerate(np.array_split(seq, args.utterances))
        ]
        write_unit_records(records, args.out)
    else:
        write_table_csv(sample_zipf(args.items, args.eta, args.draws, args.seed), args.out)
    return 0


def _cmd_thin(args) -> int:
    table = read_table_csv(args.table)
    rf = rank_frequency(table)
    write_plot_csv(thin(rf, args.max_points), table.kind, args.out)
    return 0


def _add_trim_flags(sub) -> None:
    sub.add_argument(
        "--trim-lo",
        type=float,
        default=DEFAULT_TRIM_LO,
        help="lower rank fraction kept for fitting (default %(default)s)",
    )
    sub.add_argument(
        "--trim-hi",
        type=float,
        default=DEFAULT_TRIM_HI,
        help="upper rank fraction kept for fitting (default %(default)s)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zipfunits",
        description="Rank-frequency statistics and power-law fits for discrete unit sequences.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("kmeans-train", help="train a codebook from feature files")
    p.add_argument("--manifest", required=True, help="JSONL manifest of feature files")
    p.add_argument("--k", type=int, default=DEFAULT_K, help="codebook size (default %(default)s)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-iters", type=int, default=DEFAULT_MAX_ITERS)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--out", required=True, help="codebook output path ('-' for stdout)")
    p.set_defaults(func=_cmd_kmeans_train)

    p = sub.add_parser("quantize", help="map feature files to unit sequences")
    p.add_argument("--manifest", required=True)
    p.add_argument("--codebook", required=True)
    p.add_argument("--no-dedupe", action="store_true", help="keep consecutive repeats")
    p.add_argument("--out", default="-", help="units JSONL output (default stdout)")
    p.set_defaults(func=_cmd_quantize)

    p = sub.add_parser("count", help="build an n-gram count table")
    p.add_argument("--input", required=True, help="units or tokens JSONL")
    p.add_argument("--kind", required=True, choices=KINDS)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--charset", default=None, help="characters kept for character counts")
    p.add_argument(
        "--joiner",
        type=_joiner_arg,
        default=" ",
        help="character placed between tokens; 'none' concatenates (default space)",
    )
    p.add_argument("--out", default="-", help="table CSV output (default stdout)")
    p.set_defaults(func=_cmd_count)

    p = sub.add_parser(
        "choose-n",
        help="pick n so reference and target tables describe comparable spans",
    )
    p.add_argument("--ref", required=True, help="reference JSONL (denominator)")
    p.add_argument("--target", required=True, help="target JSONL (numerator)")
    p.add_argument("--ref-kind", choices=("auto", "unit", "word", "character"), default="auto")
    p.add_argument("--target-kind", choices=("auto", "unit", "word", "character"), default="auto")
    p.add_argument("--charset", default=None)
    p.add_argument("--joiner", type=_joiner_arg, default=" ")
    p.set_defaults(func=_cmd_choose_n)

    p = sub.add_parser("fit", help="fit a power law to a count table")
    p.add_argument("--table", required=True, help="table CSV")
    _add_trim_flags(p)
    p.add_argument("--fix-eta", type=float, default=None, help="fit only a, holding eta here")
    p.add_argument("--out", default="-", help="fit JSON output (default stdout)")
    p.add_argument("--plot-out", default=None, help="also write a thinned plot CSV here")
    p.add_argument("--max-plot-points", type=int, default=DEFAULT_PLOT_POINTS)
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("compare", help="quantify per-group deviation from a reference group")
    p.add_argument("--units", required=True, help="units JSONL with group labels")
    p.add_argument("--reference", required=True, help="reference group label")
    p.add_argument("--n", type=int, default=1)
    p.add_argument(
        "--sample-size",
        type=int,
        default=10000,
        help="utterances drawn per group (default %(default)s)",
    )
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--k-top", type=int, default=DEFAULT_TOP_K, help="ranks counted as high-frequency")
    _add_trim_flags(p)
    p.add_argument("--out", default="-", help="report JSON output (default stdout)")
    p.add_argument("--plot-dir", default=None, help="write one thinned plot CSV per group here")
    p.add_argument("--max-plot-points", type=int, default=DEFAULT_PLOT_POINTS)
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("sample-zipf", help="generate synthetic power-law data")
    p.add_argument("--items", type=int, required=True, help="vocabulary size")
    p.add_argument("--eta", type=float, default=1.0)
    p.add_argument("--draws", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument(
        "--records",
        action="store_true",
        help="emit units JSONL instead of a count table",
    )
    p.add_argument("--utterances", type=int, default=1000, help="records to split draws into")
    p.add_argument("--group", default=None, help="group label stamped on emitted records")
    p.add_argument("--id-prefix", default="u", help="record id prefix (default 'u')")
    p.add_argument("--out", default="-")
    p.set_defaults(func=_cmd_sample_zipf)

    p = sub.add_parser("thin", help="reduce a table to plot-ready points")
    p.add_argument("--table", required=True)
    p.add_argument("--max-points", type=int, default=DEFAULT_PLOT_POINTS)
    p.add_argument("--out", default="-", help="plot CSV output (default stdout)")
    p.set_defaults(func=_cmd_thin)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ZipfUnitsError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:
        print(f"internal error: {exc!r}", file=sys.stderr)
        return 1


def run() -> None:
    raise SystemExit(main())
