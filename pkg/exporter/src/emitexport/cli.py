"""CLI: export emissions for one split of a corpus."""

from __future__ import annotations

import argparse
import sys

from .errors import ExportError
from .export import ExportJob, export
from .model import DEFAULT_MODEL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="emit-export",
        description="Run a pretrained ASR model over a corpus and write "
        "emission matrices for alignqc",
    )
    parser.add_argument("--manifest", required=True, help="corpus root (contains txt/)")
    parser.add_argument("--split", required=True)
    parser.add_argument("--out", required=True, help="output directory for .emit files")
    parser.add_argument("--expand-s", type=float, default=1.0)
    parser.add_argument("--model", default=DEFAULT_MODEL)
    parser.add_argument("--audio-root", help="defaults to <manifest>/wav")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    job = ExportJob(
        corpus_root=args.manifest,
        split=args.split,
        out_dir=args.out,
        model_name=args.model,
        expand_s=args.expand_s,
        audio_root=args.audio_root,
    )
    try:
        count = export(job)
    except (ExportError, OSError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    print(f"exported {count} utterances to {args.out}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
