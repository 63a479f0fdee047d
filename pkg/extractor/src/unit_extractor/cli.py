"""Command-line adapter: audio in, FEAT files + manifest out, optionally
unit sequences when a codebook is supplied.

Exit codes: 0 success, 2 bad input (files, flags, preconditions), 1 internal
failure. Diagnostics go to stderr. Every run is deterministic given its
flags, inputs, and seed.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .config import (
    DEFAULT_LAYER,
    DEFAULT_MOCK_DIM,
    DEFAULT_MODEL,
    ExtractorConfig,
)
from .errors import DimensionMismatch, ExtractorError
from .featio import read_codebook, write_manifest, write_unit_records
from .features import extract_features
from .units import dedupe, nearest_units


def cmd_extract(args) -> int:
    config = ExtractorConfig(
        model=args.model,
        layer=args.layer,
        mock_mode=args.mock,
        mock_dim=args.mock_dim,
        seed=args.seed,
    )
    audio_paths = [Path(p) for p in args.audio]
    stems = [p.stem for p in audio_paths]
    for stem in stems:
        if stems.count(stem) > 1:
            raise ExtractorError(
                f"duplicate utterance id {stem!r}: input file stems must be unique"
            )

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest_path = Path(args.manifest_out)

    centroids = None
    if args.codebook is not None:
        centroids = read_codebook(args.codebook)

    entries = []
    unit_records = []
    total_frames = 0
    for path in audio_paths:
        feat_path = out_dir / (path.stem + ".feat")
        frames = extract_features(path, config, out_path=feat_path)
        total_frames += frames.shape[0]
        entry = {
            "id": path.stem,
            "path": os.path.relpath(feat_path, manifest_path.parent),
        }
        if args.group is not None:
            entry["group"] = args.group
        if not config.mock_mode:
            entry["layer"] = config.layer
        entries.append(entry)
        if centroids is not None:
            if frames.shape[0] and frames.shape[1] != centroids.shape[1]:
                raise DimensionMismatch(
                    f"{path.name}: features have dim {frames.shape[1]}, "
                    f"codebook has dim {centroids.shape[1]}"
                )
            units = nearest_units(centroids, frames)
            if not args.no_dedupe:
                units = dedupe(units)
            record = {"id": path.stem, "units": units}
            if args.group is not None:
                record["group"] = args.group
            unit_records.append(record)

    write_manifest(entries, manifest_path)
    if centroids is not None:
        units_out = args.units_out
        if units_out is None:
            units_out = out_dir / "units.jsonl"
        write_unit_records(unit_records, units_out)
    print(
        f"extracted {len(entries)} files, {total_frames} frames"
        + (f", units -> {units_out}" if centroids is not None else ""),
        file=sys.stderr,
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="unit-extract",
        description="Run a speech encoder over audio and export frame features.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "extract",
        help="decode audio, extract frame features, write FEAT files + manifest",
    )
    p.add_argument("audio", nargs="+", help="input WAV files, processed in order")
    p.add_argument("--out-dir", required=True, help="directory for FEAT files")
    p.add_argument(
        "--manifest-out", required=True, help="path for the manifest JSONL"
    )
    p.add_argument(
        "--mock",
        action="store_true",
        help="emit deterministic pseudo-features instead of running a model",
    )
    p.add_argument(
        "--mock-dim",
        type=int,
        default=DEFAULT_MOCK_DIM,
        help="feature dim in mock mode",
    )
    p.add_argument("--seed", type=int, default=0, help="mock-mode seed")
    p.add_argument("--model", default=DEFAULT_MODEL, help="encoder model identifier")
    p.add_argument(
        "--layer", type=int, default=DEFAULT_LAYER, help="encoder layer to export"
    )
    p.add_argument("--group", default=None, help="group label for every output row")
    p.add_argument(
        "--codebook",
        default=None,
        help="CDBK file; when given, also emit quantized unit sequences",
    )
    p.add_argument(
        "--units-out",
        default=None,
        help="units JSONL path (default: <out-dir>/units.jsonl)",
    )
    p.add_argument(
        "--no-dedupe",
        action="store_true",
        help="keep consecutive repeated units",
    )
    p.set_defaults(func=cmd_extract)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ExtractorError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:
        print(f"internal error: {exc!r}", file=sys.stderr)
        return 1


def run() -> None:
    raise SystemExit(main())
