"""Command-line surface.

Machine-readable results (JSONL reports, CSV tables, scores, decoded text)
go to files or stdout; human summaries and errors go to stderr. Every
subcommand is deterministic given its inputs and seed; ``--workers`` is a
throughput knob with no observable effect on outputs.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .audio import read_wav
from .corpus import (
    CorpusManifest,
    Patch,
    apply_patch,
    parse_mustc,
    sample_subset,
    write_manifest,
)
from .ctc import force_align, greedy_decode
from .curation import (
    calibrate,
    corrupt_corpus,
    filter_corpus,
    fix_from_span,
    load_labels,
    save_labels,
    write_calibration_csv,
)
from .detector import (
    DetectorConfig,
    Verdict,
    detect_corpus,
    detect_speaker_name,
    read_verdicts,
    speaker_name_rate,
    write_verdicts,
)
from .emission import Vocab, load_emission
from .errors import AlignQcError
from .metrics import bootstrap_ci, corpus_bleu, sentence_bleu
from .providers import DirectoryEmissionProvider


def _detector_config(args: argparse.Namespace) -> DetectorConfig:
    return DetectorConfig(
        expand_s=args.expand_s,
        overrun_tol_s=args.overrun_tol_s,
        edit_ratio=args.edit_ratio,
        max_name_len=args.max_name_len,
    )


def _add_corpus_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--corpus", required=True, help="corpus root (contains txt/)")
    parser.add_argument("--split", required=True, help="split name, e.g. train")


def _add_threshold_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--expand-s", type=float, default=1.0)
    parser.add_argument("--overrun-tol-s", type=float, default=0.15)
    parser.add_argument("--edit-ratio", type=float, default=0.7)
    parser.add_argument("--max-name-len", type=int, default=20)


def _read_lines(path: str) -> list[str]:
    return Path(path).read_text(encoding="utf-8").splitlines()


def _wav_duration(path: Path) -> float:
    return read_wav(path).duration_s


def _file_durations(corpus_root: str, manifest) -> dict[str, float] | None:
    """Durations of referenced wav files, when they exist on disk."""
    wav_root = Path(corpus_root) / "wav"
    durations: dict[str, float] = {}
    for utt in manifest:
        path = wav_root / utt.audio_path
        if not path.is_file():
            return None
        if utt.audio_path not in durations:
            durations[utt.audio_path] = _wav_duration(path)
    return durations


def _cmd_scan(args: argparse.Namespace) -> int:
    manifest = parse_mustc(args.corpus, args.split)
    provider = DirectoryEmissionProvider(args.emissions)
    vocab = provider.load_vocab()
    entries = detect_corpus(
        manifest, provider, vocab, _detector_config(args), workers=args.workers
    )
    write_verdicts(entries, args.out)
    flagged = sum(1 for e in entries if not isinstance(e, Verdict) or e.flagged)
    print(f"flagged {flagged} of {len(entries)}", file=sys.stderr)
    return 0


def _cmd_filter(args: argparse.Namespace) -> int:
    manifest = parse_mustc(args.corpus, args.split)
    verdicts = read_verdicts(args.report)
    clean, removed = filter_corpus(manifest, verdicts)
    write_manifest(clean, args.out_dir)
    if args.removed_dir:
        write_manifest(removed, args.removed_dir)
    print(f"kept {len(clean)} of {len(manifest)} (removed {len(removed)})", file=sys.stderr)
    return 0


def _cmd_fix(args: argparse.Namespace) -> int:
    manifest = parse_mustc(args.corpus, args.split)
    verdicts = {v.utterance_id: v for v in read_verdicts(args.report)}
    durations = _file_durations(args.corpus, manifest)
    fixed_utts = []
    n_fixed = 0
    for utt in manifest:
        verdict = verdicts.get(utt.id)
        if (
            isinstance(verdict, Verdict)
            and verdict.flagged
            and verdict.aligned_span is not None
        ):
            file_duration = durations[utt.audio_path] if durations else float("inf")
            fixed_utts.append(
                fix_from_span(utt, verdict.aligned_span, args.pad_s, file_duration)
            )
            n_fixed += 1
        else:
            fixed_utts.append(utt)
    fixed = CorpusManifest(name=manifest.name, utterances=tuple(fixed_utts))
    write_manifest(fixed, args.out_dir)
    print(f"fixed {n_fixed} of {len(manifest)}", file=sys.stderr)
    return 0


def _cmd_align(args: argparse.Namespace) -> int:
    em = load_emission(args.emit)
    vocab = Vocab.load(args.vocab)
    result = force_align(em, vocab, args.transcript)
    spans = [
        {"word": s.word, "start_s": s.start_s, "end_s": s.end_s} for s in result.spans
    ]
    print(json.dumps(spans, ensure_ascii=False))
    if not result.feasible:
        print("alignment infeasible", file=sys.stderr)
    return 0


def _cmd_decode(args: argparse.Namespace) -> int:
    em = load_emission(args.emit)
    vocab = Vocab.load(args.vocab)
    print(greedy_decode(em, vocab))
    return 0


def _cmd_score(args: argparse.Namespace) -> int:
    hyps = _read_lines(args.hyp)
    refs = _read_lines(args.ref)
    if args.sentence_level:
        if len(hyps) != len(refs):
            raise AlignQcError(f"{len(hyps)} hypotheses vs {len(refs)} references")
        last = None
        for hyp, ref in zip(hyps, refs):
            last = sentence_bleu(hyp, ref)
            print(f"{last.score:.1f}")
        if last is not None:
            print(last.signature, file=sys.stderr)
        return 0
    if args.bootstrap:
        from .metrics import _signature

        mean, ci95 = bootstrap_ci(hyps, refs, resamples=args.bootstrap, seed=args.seed)
        point = corpus_bleu(hyps, refs)
        print(f"BLEU = {point.score:.1f} (bootstrap mean {mean:.1f} +- {ci95:.1f})")
        print(_signature("none", (args.bootstrap, args.seed)), file=sys.stderr)
        return 0
    score = corpus_bleu(hyps, refs)
    print(score.format())
    print(score.signature, file=sys.stderr)
    return 0


def _parse_grid(tols: str, ratios: str) -> list[tuple[float, float]]:
    tol_values = [float(v) for v in tols.split(",") if v.strip()]
    ratio_values = [float(v) for v in ratios.split(",") if v.strip()]
    return [(t, r) for t in tol_values for r in ratio_values]


def _cmd_calibrate(args: argparse.Namespace) -> int:
    manifest = parse_mustc(args.corpus, args.split)
    provider = DirectoryEmissionProvider(args.emissions)
    vocab = provider.load_vocab()
    labels = load_labels(args.labels)
    grid = _parse_grid(args.overrun_tols, args.edit_ratios)
    report = calibrate(
        manifest,
        provider,
        vocab,
        labels,
        grid,
        base_cfg=_detector_config(args),
        workers=args.workers,
    )
    write_calibration_csv(report, args.out)
    best = report.best_by_f1()
    print(
        f"best f1={best.f1:.3f} at tol={best.overrun_tol_s} ratio={best.edit_ratio} "
        f"(precision={best.precision:.3f} recall={best.recall:.3f})",
        file=sys.stderr,
    )
    return 0


def _cmd_corrupt(args: argparse.Namespace) -> int:
    manifest = parse_mustc(args.corpus, args.split)
    durations = _file_durations(args.corpus, manifest)
    corrupted, labels = corrupt_corpus(
        manifest,
        fraction=args.fraction,
        shift_range_s=(args.shift_lo, args.shift_hi),
        seed=args.seed,
        file_durations=durations,
    )
    write_manifest(corrupted, args.out_dir)
    save_labels(labels, args.labels_out)
    print(f"shifted {sum(labels.values())} of {len(manifest)}", file=sys.stderr)
    return 0


def _cmd_speaker_names(args: argparse.Namespace) -> int:
    manifest = parse_mustc(args.corpus, args.split)
    rate = speaker_name_rate(manifest, _detector_config(args))
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            for utt in manifest:
                hit = detect_speaker_name(utt.transcript, args.max_name_len)
                if hit:
                    record = {"id": utt.id, "name": hit[0], "remainder": hit[1]}
                    fh.write(json.dumps(record, ensure_ascii=False) + "\n")
    print(f"{rate:.4f}")
    return 0


def _cmd_sample(args: argparse.Namespace) -> int:
    manifest = parse_mustc(args.corpus, args.split)
    subset = sample_subset(manifest, args.n, args.seed)
    if args.out_split:
        subset = CorpusManifest(name=args.out_split, utterances=subset.utterances)
    write_manifest(subset, args.out_dir)
    print(f"sampled {len(subset)} of {len(manifest)}", file=sys.stderr)
    return 0


def _cmd_patch(args: argparse.Namespace) -> int:
    manifest = parse_mustc(args.corpus, args.split)
    patched = apply_patch(manifest, Patch.load(args.patch))
    if args.out_split:
        patched = CorpusManifest(name=args.out_split, utterances=patched.utterances)
    write_manifest(patched, args.out_dir)
    print(f"patched split written to {args.out_dir}", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="alignqc",
        description="Quality control for speech-translation corpora",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    scan = sub.add_parser("scan", help="detect misaligned utterances")
    _add_corpus_args(scan)
    scan.add_argument("--emissions", required=True, help="directory of .emit files")
    scan.add_argument("--out", required=True, help="verdict JSONL path")
    _add_threshold_args(scan)
    scan.add_argument("--workers", type=int, default=1)
    scan.set_defaults(handler=_cmd_scan)

    flt = sub.add_parser("filter", help="split a corpus by scan verdicts")
    _add_corpus_args(flt)
    flt.add_argument("--report", required=True, help="verdict JSONL from scan")
    flt.add_argument("--out-dir", required=True, help="root for the clean split")
    flt.add_argument("--removed-dir", help="optional root for the removed split")
    flt.set_defaults(handler=_cmd_filter)

    fix = sub.add_parser("fix", help="move flagged windows onto their aligned words")
    _add_corpus_args(fix)
    fix.add_argument("--report", required=True, help="verdict JSONL from scan")
    fix.add_argument("--out-dir", required=True)
    fix.add_argument("--pad-s", type=float, default=0.15)
    fix.set_defaults(handler=_cmd_fix)

    align = sub.add_parser("align", help="force-align a transcript to one emission file")
    align.add_argument("--emit", required=True)
    align.add_argument("--vocab", required=True)
    align.add_argument("--transcript", required=True)
    align.set_defaults(handler=_cmd_align)

    decode = sub.add_parser("decode", help="greedy-decode one emission file")
    decode.add_argument("--emit", required=True)
    decode.add_argument("--vocab", required=True)
    decode.set_defaults(handler=_cmd_decode)

    score = sub.add_parser("score", help="BLEU between hypothesis and reference files")
    score.add_argument("--hyp", required=True)
    score.add_argument("--ref", required=True)
    score.add_argument("--sentence-level", action="store_true")
    score.add_argument("--bootstrap", type=int, default=0, metavar="N")
    score.add_argument("--seed", type=int, default=12345)
    score.set_defaults(handler=_cmd_score)

    cal = sub.add_parser("calibrate", help="precision/recall sweep against labels")
    _add_corpus_args(cal)
    cal.add_argument("--emissions", required=True)
    cal.add_argument("--labels", required=True, help="ground-truth JSON labels")
    cal.add_argument("--overrun-tols", default="0.05,0.1,0.15,0.2,0.3")
    cal.add_argument("--edit-ratios", default="0.3,0.5,0.7,0.9")
    cal.add_argument("--out", required=True, help="CSV report path")
    _add_threshold_args(cal)
    cal.add_argument("--workers", type=int, default=1)
    cal.set_defaults(handler=_cmd_calibrate)

    cor = sub.add_parser("corrupt", help="plant labeled offset shifts")
    _add_corpus_args(cor)
    cor.add_argument("--fraction", type=float, required=True)
    cor.add_argument("--shift-lo", type=float, default=0.5)
    cor.add_argument("--shift-hi", type=float, default=1.0)
    cor.add_argument("--seed", type=int, default=0)
    cor.add_argument("--out-dir", required=True)
    cor.add_argument("--labels-out", required=True)
    cor.set_defaults(handler=_cmd_corrupt)

    names = sub.add_parser("speaker-names", help="rate of leading speaker labels")
    _add_corpus_args(names)
    names.add_argument("--max-name-len", type=int, default=20)
    names.add_argument("--expand-s", type=float, default=1.0, help=argparse.SUPPRESS)
    names.add_argument("--overrun-tol-s", type=float, default=0.15, help=argparse.SUPPRESS)
    names.add_argument("--edit-ratio", type=float, default=0.7, help=argparse.SUPPRESS)
    names.add_argument("--out", help="optional JSONL of detected names")
    names.set_defaults(handler=_cmd_speaker_names)

    sample = sub.add_parser("sample", help="uniform subset of a split")
    _add_corpus_args(sample)
    sample.add_argument("--n", type=int, required=True)
    sample.add_argument("--seed", type=int, default=12345)
    sample.add_argument("--out-dir", required=True)
    sample.add_argument("--out-split", help="rename the written split")
    sample.set_defaults(handler=_cmd_sample)

    patch = sub.add_parser("patch", help="apply a JSON patch to a split")
    _add_corpus_args(patch)
    patch.add_argument("--patch", required=True)
    patch.add_argument("--out-dir", required=True)
    patch.add_argument("--out-split", help="rename the written split")
    patch.set_defaults(handler=_cmd_patch)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return args.handler(args)
    except (AlignQcError, OSError, ValueError, KeyError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
