"""Acting on verdicts: filtering, boundary fixing, corruption, calibration.

Filtering partitions a corpus by verdict; boundary fixing rewrites an
utterance's time window around its aligned words; corruption manufactures
labeled misalignment for calibration; calibration sweeps thresholds over
cached measurements and reports precision/recall per grid point (misaligned
is the positive class throughout).
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Mapping, Sequence

from .corpus import CorpusManifest, Utterance
from .ctc import AlignmentResult
from .detector import (
    DetectorConfig,
    EmissionProvider,
    Measurements,
    Verdict,
    VerdictError,
    _map_ordered,
    apply_thresholds,
    measure_utterance,
)
from .emission import Vocab
from .errors import (
    InfeasibleAlignment,
    LabelCoverageMismatch,
    VerdictCoverageMismatch,
)
from .rng import SplitMix64

LabelSet = dict[str, bool]


def filter_corpus(
    manifest: CorpusManifest, verdicts: Sequence[Verdict | VerdictError]
) -> tuple[CorpusManifest, CorpusManifest]:
    """Partition into (clean, removed) by verdict, preserving order.

    Verdicts must cover every manifest id exactly once. Error entries count
    as removed: an utterance that could not be checked is not kept in a
    clean corpus.
    """
    by_id: dict[str, Verdict | VerdictError] = {}
    for entry in verdicts:
        if entry.utterance_id in by_id:
            raise VerdictCoverageMismatch(f"duplicate verdict for {entry.utterance_id}")
        by_id[entry.utterance_id] = entry
    missing = [utt.id for utt in manifest if utt.id not in by_id]
    extra = set(by_id) - set(manifest.ids())
    if missing or extra:
        raise VerdictCoverageMismatch(
            f"missing={missing[:5]}{'...' if len(missing) > 5 else ''} extra={sorted(extra)[:5]}"
        )
    clean, removed = [], []
    for utt in manifest:
        entry = by_id[utt.id]
        keep = isinstance(entry, Verdict) and not entry.flagged
        (clean if keep else removed).append(utt)
    return (
        CorpusManifest(name=manifest.name, utterances=tuple(clean)),
        CorpusManifest(name=manifest.name, utterances=tuple(removed)),
    )


def fix_from_span(
    utt: Utterance,
    span: tuple[float, float],
    pad_s: float = 0.15,
    file_duration_s: float = float("inf"),
) -> Utterance:
    """Rewrite the utterance window around an aligned (start, end) span."""
    new_offset = max(0.0, span[0] - pad_s)
    new_end = min(file_duration_s, span[1] + pad_s)
    if new_end <= new_offset:
        raise InfeasibleAlignment(f"{utt.id}: degenerate window after clamping")
    return replace(utt, offset_s=new_offset, duration_s=new_end - new_offset)


def fix_boundaries(
    utt: Utterance,
    alignment: AlignmentResult,
    pad_s: float = 0.15,
    file_duration_s: float = float("inf"),
) -> Utterance:
    """Move the utterance window to wrap the aligned words plus padding.

    Text fields are untouched; only the time range moves. The new window
    always contains every aligned span.
    """
    if not alignment.feasible or not alignment.spans:
        raise InfeasibleAlignment(utt.id)
    return fix_from_span(
        utt, (alignment.start_s, alignment.end_s), pad_s, file_duration_s
    )


def corrupt_corpus(
    manifest: CorpusManifest,
    fraction: float,
    shift_range_s: tuple[float, float],
    seed: int,
    file_durations: Mapping[str, float] | None = None,
) -> tuple[CorpusManifest, LabelSet]:
    """Shift a deterministic fraction of utterance offsets to plant misalignment.

    Selected utterances get their offset moved by a magnitude uniform in
    ``shift_range_s`` with random sign (durations unchanged); offsets clamp to
    the file bounds when ``file_durations`` (keyed by audio_path) is given,
    and the sign flips if clamping would nullify the shift. Labels mark
    exactly the selected ids (True = misaligned).
    """
    lo, hi = shift_range_s
    if not 0.0 <= fraction <= 1.0:
        raise ValueError("fraction must be in [0, 1]")
    if not 0.0 <= lo <= hi:
        raise ValueError("need 0 <= lo <= hi")
    total = len(manifest)
    n_corrupt = round(fraction * total)
    rng = SplitMix64(seed)
    labels: LabelSet = {}
    corrupted: list[Utterance] = []
    needed = n_corrupt
    for i, utt in enumerate(manifest):
        take = needed > 0 and rng.next_float() * (total - i) < needed
        labels[utt.id] = take
        if not take:
            corrupted.append(utt)
            continue
        needed -= 1
        magnitude = rng.next_uniform(lo, hi)
        sign = 1.0 if rng.next_float() < 0.5 else -1.0
        max_offset = float("inf")
        if file_durations is not None:
            max_offset = max(0.0, file_durations[utt.audio_path] - utt.duration_s)

        def shifted(direction: float) -> float:
            return min(max_offset, max(0.0, utt.offset_s + direction * magnitude))

        new_offset = shifted(sign)
        if new_offset == utt.offset_s and magnitude > 0.0:
            new_offset = shifted(-sign)
        corrupted.append(replace(utt, offset_s=new_offset))
    return CorpusManifest(name=manifest.name, utterances=tuple(corrupted)), labels


def save_labels(labels: LabelSet, path: Path | str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(labels, fh, ensure_ascii=False, indent=2)
        fh.write("\n")


def load_labels(path: Path | str) -> LabelSet:
    with open(path, encoding="utf-8") as fh:
        return {str(k): bool(v) for k, v in json.load(fh).items()}


@dataclass(frozen=True)
class CalibrationRow:
    overrun_tol_s: float
    edit_ratio: float
    true_pos: int
    false_pos: int
    false_neg: int
    precision: float | None
    recall: float | None
    f1: float | None


@dataclass(frozen=True)
class CalibrationReport:
    rows: tuple[CalibrationRow, ...]

    def best_by_f1(self) -> CalibrationRow:
        scored = [row for row in self.rows if row.f1 is not None]
        if not scored:
            raise ValueError("no grid point has a defined F1")
        return max(scored, key=lambda row: row.f1)


CSV_FIELDS = (
    "overrun_tol_s",
    "edit_ratio",
    "true_pos",
    "false_pos",
    "false_neg",
    "precision",
    "recall",
    "f1",
)


def _ratio(num: int, den: int) -> float | None:
    return num / den if den > 0 else None


def rows_from_measurements(
    measurements: Sequence[Measurements],
    labels: LabelSet,
    grid: Sequence[tuple[float, float]],
    base_cfg: DetectorConfig = DetectorConfig(),
) -> CalibrationReport:
    """Apply each grid point's thresholds to cached measurements."""
    truth = [labels[m.utterance_id] for m in measurements]
    rows = []
    for overrun_tol_s, edit_ratio in grid:
        cfg = replace(base_cfg, overrun_tol_s=overrun_tol_s, edit_ratio=edit_ratio)
        flagged = [apply_thresholds(m, cfg).flagged for m in measurements]
        tp = sum(f and t for f, t in zip(flagged, truth))
        fp = sum(f and not t for f, t in zip(flagged, truth))
        fn = sum(t and not f for f, t in zip(flagged, truth))
        precision = _ratio(tp, tp + fp)
        recall = _ratio(tp, tp + fn)
        f1 = None
        if precision is not None and recall is not None and precision + recall > 0:
            f1 = 2 * precision * recall / (precision + recall)
        rows.append(
            CalibrationRow(
                overrun_tol_s=overrun_tol_s,
                edit_ratio=edit_ratio,
                true_pos=tp,
                false_pos=fp,
                false_neg=fn,
                precision=precision,
                recall=recall,
                f1=f1,
            )
        )
    return CalibrationReport(rows=tuple(rows))


def calibrate(
    manifest: CorpusManifest,
    provider: EmissionProvider,
    vocab: Vocab,
    labels: LabelSet,
    grid: Sequence[tuple[float, float]],
    base_cfg: DetectorConfig = DetectorConfig(),
    workers: int = 1,
) -> CalibrationReport:
    """Sweep (overrun_tol_s, edit_ratio) grid points over one detection pass.

    Alignment and decoding run once per utterance; thresholds are applied
    post hoc, which is observably identical to re-running detection per grid
    point.
    """
    missing = [utt.id for utt in manifest if utt.id not in labels]
    if missing:
        raise LabelCoverageMismatch(f"unlabeled ids: {missing[:5]}")

    def one(utt: Utterance) -> Measurements:
        em_original, em_expanded = provider.emissions_for(utt)
        return measure_utterance(utt, em_expanded, em_original, vocab)

    measurements = _map_ordered(one, manifest.utterances, workers)
    return rows_from_measurements(measurements, labels, grid, base_cfg)


def write_calibration_csv(report: CalibrationReport, path: Path | str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_FIELDS)
        for row in report.rows:
            writer.writerow(
                [
                    repr(row.overrun_tol_s),
                    repr(row.edit_ratio),
                    row.true_pos,
                    row.false_pos,
                    row.false_neg,
                    "" if row.precision is None else repr(row.precision),
                    "" if row.recall is None else repr(row.recall),
                    "" if row.f1 is None else repr(row.f1),
                ]
            )
