"""Per-utterance misalignment detection and the speaker-name heuristic.

Two independent rules drive the misalignment verdict:

* alignment overrun -- force-align the transcript against emissions for the
  expanded audio window; flag when the aligned span starts before or ends
  after the declared window by more than the tolerance;
* decode discrepancy -- greedy-decode emissions for the original window and
  flag when the character edit distance to the given transcript exceeds
  ``edit_ratio`` times the transcript length (both normalized).

Raw measurements are threshold-free, so a calibration sweep can re-apply
different thresholds without re-running alignment. Reported overrun values
are zeroed when the alignment lies inside the tolerance-extended window.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Protocol, Sequence

from .corpus import CorpusManifest, Utterance
from .ctc import force_align, greedy_decode, normalize_text
from .emission import EmissionMatrix, Vocab
from .errors import AlignQcError, EmptyNormalizedTranscript
from .metrics import levenshtein

REASON_OVERRUN_START = "OverrunStart"
REASON_OVERRUN_END = "OverrunEnd"
REASON_EDIT_DISTANCE = "EditDistance"
REASON_INFEASIBLE = "AlignmentInfeasible"


@dataclass(frozen=True)
class DetectorConfig:
    """Detection thresholds; the defaults are the standard operating point."""

    expand_s: float = 1.0
    overrun_tol_s: float = 0.15
    edit_ratio: float = 0.7
    max_name_len: int = 20

    def __post_init__(self):
        if min(self.expand_s, self.overrun_tol_s, self.edit_ratio) <= 0:
            raise ValueError("all thresholds must be > 0")
        if self.max_name_len <= 0:
            raise ValueError("max_name_len must be > 0")
        if self.edit_ratio > 2:
            raise ValueError("edit_ratio above 2 is almost certainly a mistake")


@dataclass(frozen=True)
class Measurements:
    """Threshold-free per-utterance measurements."""

    utterance_id: str
    feasible: bool
    raw_overrun_start_s: float
    raw_overrun_end_s: float
    edit_distance: int
    transcript_len: int
    decoded: str
    aligned_span: tuple[float, float] | None

    @property
    def edit_ratio_observed(self) -> float:
        return self.edit_distance / self.transcript_len


@dataclass(frozen=True)
class Verdict:
    """Detector decision for one utterance."""

    utterance_id: str
    flagged: bool
    reasons: tuple[str, ...]
    overrun_start_s: float
    overrun_end_s: float
    edit_distance: int
    edit_ratio_observed: float
    decoded_transcript: str
    aligned_span: tuple[float, float] | None

    def __post_init__(self):
        object.__setattr__(self, "reasons", tuple(self.reasons))
        if self.flagged != bool(self.reasons):
            raise ValueError("flagged must mirror a non-empty reason set")


@dataclass(frozen=True)
class VerdictError:
    """Stream entry for an utterance whose detection failed."""

    utterance_id: str
    error: str


class EmissionProvider(Protocol):
    """Source of (original-window, expanded-window) emissions per utterance."""

    def emissions_for(self, utt: Utterance) -> tuple[EmissionMatrix, EmissionMatrix]:
        ...


def measure_utterance(
    utt: Utterance,
    em_expanded: EmissionMatrix,
    em_original: EmissionMatrix,
    vocab: Vocab,
) -> Measurements:
    """Compute all detector measurements without applying any threshold."""
    transcript_norm = normalize_text(utt.transcript)
    if not transcript_norm:
        raise EmptyNormalizedTranscript(utt.id)

    alignment = force_align(em_expanded, vocab, utt.transcript)
    if alignment.feasible:
        raw_start = max(0.0, utt.offset_s - alignment.start_s)
        raw_end = max(0.0, alignment.end_s - utt.end_s)
        span = (alignment.start_s, alignment.end_s)
    else:
        raw_start = raw_end = 0.0
        span = None

    decoded = greedy_decode(em_original, vocab)
    distance = levenshtein(normalize_text(decoded), transcript_norm)
    return Measurements(
        utterance_id=utt.id,
        feasible=alignment.feasible,
        raw_overrun_start_s=raw_start,
        raw_overrun_end_s=raw_end,
        edit_distance=distance,
        transcript_len=len(transcript_norm),
        decoded=decoded,
        aligned_span=span,
    )


def apply_thresholds(measurements: Measurements, cfg: DetectorConfig) -> Verdict:
    """Turn raw measurements into a verdict under the given thresholds."""
    reasons = []
    start_over = measurements.raw_overrun_start_s
    end_over = measurements.raw_overrun_end_s
    if not measurements.feasible:
        reasons.append(REASON_INFEASIBLE)
    else:
        if start_over > cfg.overrun_tol_s:
            reasons.append(REASON_OVERRUN_START)
        if end_over > cfg.overrun_tol_s:
            reasons.append(REASON_OVERRUN_END)
    if measurements.edit_distance > cfg.edit_ratio * measurements.transcript_len:
        reasons.append(REASON_EDIT_DISTANCE)
    return Verdict(
        utterance_id=measurements.utterance_id,
        flagged=bool(reasons),
        reasons=tuple(reasons),
        overrun_start_s=start_over if start_over > cfg.overrun_tol_s else 0.0,
        overrun_end_s=end_over if end_over > cfg.overrun_tol_s else 0.0,
        edit_distance=measurements.edit_distance,
        edit_ratio_observed=measurements.edit_ratio_observed,
        decoded_transcript=measurements.decoded,
        aligned_span=measurements.aligned_span,
    )


def detect_utterance(
    utt: Utterance,
    em_expanded: EmissionMatrix,
    em_original: EmissionMatrix,
    vocab: Vocab,
    cfg: DetectorConfig = DetectorConfig(),
) -> Verdict:
    return apply_thresholds(measure_utterance(utt, em_expanded, em_original, vocab), cfg)


def _map_ordered(fn: Callable, items: Sequence, workers: int) -> list:
    """Apply fn over items, optionally in a thread pool; output keeps input order."""
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def detect_corpus(
    manifest: CorpusManifest,
    provider: EmissionProvider,
    vocab: Vocab,
    cfg: DetectorConfig = DetectorConfig(),
    workers: int = 1,
) -> list[Verdict | VerdictError]:
    """One verdict per utterance, in manifest order regardless of workers.

    Per-utterance failures (missing emission files, empty transcripts, ...)
    become VerdictError entries instead of aborting the run.
    """

    def one(utt: Utterance) -> Verdict | VerdictError:
        try:
            em_original, em_expanded = provider.emissions_for(utt)
            return detect_utterance(utt, em_expanded, em_original, vocab, cfg)
        except (AlignQcError, OSError, ValueError, KeyError) as exc:
            return VerdictError(utterance_id=utt.id, error=f"{type(exc).__name__}: {exc}")

    return _map_ordered(one, manifest.utterances, workers)


_NAME_PUNCT = set(".,!?;:\"()")


def detect_speaker_name(
    text: str, max_name_len: int = 20
) -> tuple[str, str] | None:
    """Split a leading speaker label off a transcript, if one is present.

    The prefix before the first ``": "`` counts as a speaker name when it is
    shorter than ``max_name_len`` characters, has one to three tokens that
    each start with an uppercase letter, and contains no sentence
    punctuation. Returns (name, remainder) or None.
    """
    head, sep, remainder = text.partition(": ")
    if not sep or not head:
        return None
    if len(head) >= max_name_len:
        return None
    if any(ch in _NAME_PUNCT for ch in head):
        return None
    tokens = head.split()
    if not 1 <= len(tokens) <= 3:
        return None
    if not all(tok[0].isupper() for tok in tokens):
        return None
    return head, remainder


def speaker_name_rate(
    manifest: CorpusManifest, cfg: DetectorConfig = DetectorConfig()
) -> float:
    """Fraction of utterances whose transcript opens with a speaker label."""
    if len(manifest) == 0:
        return 0.0
    hits = sum(
        detect_speaker_name(utt.transcript, cfg.max_name_len) is not None
        for utt in manifest
    )
    return hits / len(manifest)


def verdict_to_json(entry: Verdict | VerdictError) -> str:
    """One JSONL line per entry; key order is part of the format."""
    if isinstance(entry, VerdictError):
        payload = {"id": entry.utterance_id, "error": entry.error}
    else:
        payload = {
            "id": entry.utterance_id,
            "flagged": entry.flagged,
            "reasons": list(entry.reasons),
            "overrun_start_s": entry.overrun_start_s,
            "overrun_end_s": entry.overrun_end_s,
            "edit_distance": entry.edit_distance,
            "edit_ratio_observed": entry.edit_ratio_observed,
            "decoded": entry.decoded_transcript,
            "aligned_span": list(entry.aligned_span) if entry.aligned_span else None,
        }
    return json.dumps(payload, ensure_ascii=False)


def verdict_from_json(line: str) -> Verdict | VerdictError:
    payload = json.loads(line)
    if "error" in payload:
        return VerdictError(utterance_id=payload["id"], error=payload["error"])
    span = payload["aligned_span"]
    return Verdict(
        utterance_id=payload["id"],
        flagged=payload["flagged"],
        reasons=tuple(payload["reasons"]),
        overrun_start_s=payload["overrun_start_s"],
        overrun_end_s=payload["overrun_end_s"],
        edit_distance=payload["edit_distance"],
        edit_ratio_observed=payload["edit_ratio_observed"],
        decoded_transcript=payload["decoded"],
        aligned_span=tuple(span) if span else None,
    )


def write_verdicts(entries: Iterable[Verdict | VerdictError], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for entry in entries:
            fh.write(verdict_to_json(entry) + "\n")


def read_verdicts(path) -> list[Verdict | VerdictError]:
    with open(path, encoding="utf-8") as fh:
        return [verdict_from_json(line) for line in fh if line.strip()]
