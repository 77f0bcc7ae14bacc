"""CTC forced alignment and greedy decoding over emission matrices.

Forced alignment is a Viterbi pass over the blank-interleaved label graph:
the normalized transcript becomes a character sequence (word gaps as the
delimiter token), blanks are interleaved around every label (length 2L+1),
and each frame may stay on its state, advance one state, or advance two
states when that skips a blank between two distinct labels. The backtrace
assigns each frame to a state, which gives per-character frame intervals
and, from those, per-word time spans.

Scores are log-domain throughout; an infeasible alignment is reported as
``feasible=False`` with a ``-inf`` score, never as an exception.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .emission import EmissionMatrix, Vocab
from .errors import EmptyNormalizedTranscript
from .textnorm import normalize_text, transcript_labels

NEG_INF = float("-inf")


@dataclass(frozen=True)
class WordSpan:
    word: str
    start_s: float
    end_s: float

    def __post_init__(self):
        if self.start_s > self.end_s:
            raise ValueError(f"span for {self.word!r} ends before it starts")


@dataclass(frozen=True)
class AlignmentResult:
    """Per-word spans plus the log-probability of the best frame path."""

    spans: tuple[WordSpan, ...]
    path_log_score: float
    feasible: bool

    def __post_init__(self):
        object.__setattr__(self, "spans", tuple(self.spans))
        if not self.feasible and self.spans:
            raise ValueError("infeasible result cannot carry spans")
        for left, right in zip(self.spans, self.spans[1:]):
            if right.start_s < left.end_s:
                raise ValueError("spans must be time-ordered and non-overlapping")

    @property
    def start_s(self) -> float:
        return self.spans[0].start_s

    @property
    def end_s(self) -> float:
        return self.spans[-1].end_s


_INFEASIBLE = AlignmentResult(spans=(), path_log_score=NEG_INF, feasible=False)


def _extended_states(label_ids: list[int], blank: int) -> np.ndarray:
    ext = np.full(2 * len(label_ids) + 1, blank, dtype=np.int64)
    ext[1::2] = label_ids
    return ext


def min_frames_required(labels: list[str]) -> int:
    """Labels plus one forced blank between each repeated pair."""
    return len(labels) + sum(a == b for a, b in zip(labels, labels[1:]))


def _viterbi_states(
    em: EmissionMatrix, vocab: Vocab, labels: list[str]
) -> tuple[np.ndarray, float] | None:
    """Best-path state sequence over the blank-interleaved graph, or None
    when no finite path exists. States are 0..2L, odd ones being labels."""
    label_ids = [vocab.index(tok) for tok in labels]
    frames_t = em.frames_t
    if frames_t < min_frames_required(labels):
        return None

    ext = _extended_states(label_ids, vocab.blank_index)
    n_states = len(ext)
    # advance-2 into state s is legal only when s is a label state and the
    # label two states back is different (the skipped state is then a blank).
    can_skip = np.zeros(n_states, dtype=bool)
    if n_states > 2:
        can_skip[2:] = (np.arange(2, n_states) % 2 == 1) & (ext[2:] != ext[:-2])

    emit = em.log_probs.astype(np.float64)[:, ext]
    score = np.full(n_states, NEG_INF)
    score[0] = emit[0, 0]
    score[1] = emit[0, 1]
    # jump[t, s]: how many states the best path advanced to arrive at s at t.
    jump = np.zeros((frames_t, n_states), dtype=np.int8)
    for t in range(1, frames_t):
        stay = score
        adv1 = np.concatenate(([NEG_INF], score[:-1]))
        adv2 = np.concatenate(([NEG_INF, NEG_INF], score[:-2]))
        adv2 = np.where(can_skip, adv2, NEG_INF)
        stacked = np.stack((adv2, adv1, stay))
        choice = stacked.argmax(axis=0)  # ties resolve to the larger jump
        score = stacked[choice, np.arange(n_states)] + emit[t]
        jump[t] = 2 - choice

    end_states = (n_states - 1, n_states - 2)
    best_end = end_states[int(np.argmax([score[end_states[0]], score[end_states[1]]]))]
    path_score = float(score[best_end])
    if not np.isfinite(path_score):
        return None

    states = np.empty(frames_t, dtype=np.int64)
    state = best_end
    for t in range(frames_t - 1, -1, -1):
        states[t] = state
        state -= int(jump[t, state])
    return states, path_score


def force_align(em: EmissionMatrix, vocab: Vocab, transcript: str) -> AlignmentResult:
    """Best monotone assignment of the transcript's characters to frames.

    Ties in the Viterbi maximum are broken toward the transition that
    advances furthest (advance-2, then advance-1, then stay), and toward the
    more advanced end state, which makes the alignment deterministic.
    """
    labels = transcript_labels(transcript, vocab.word_delim)
    if not labels:
        raise EmptyNormalizedTranscript(transcript)
    best = _viterbi_states(em, vocab, labels)
    if best is None:
        return _INFEASIBLE
    states, path_score = best

    n_states = 2 * len(labels) + 1
    first_frame = np.full(n_states, -1, dtype=np.int64)
    last_frame = np.full(n_states, -1, dtype=np.int64)
    for t, s in enumerate(states):
        if first_frame[s] < 0:
            first_frame[s] = t
        last_frame[s] = t

    spans = []
    word_chars: list[tuple[int, int]] = []  # (label position, state index)
    for pos, token in enumerate(labels + [vocab.word_delim]):
        if token == vocab.word_delim:
            if word_chars:
                text = "".join(labels[p] for p, _ in word_chars)
                start = em.frame_start_s(int(first_frame[word_chars[0][1]]))
                end = em.frame_start_s(int(last_frame[word_chars[-1][1]]) + 1)
                spans.append(WordSpan(word=text, start_s=start, end_s=end))
            word_chars = []
        else:
            word_chars.append((pos, 2 * pos + 1))
    return AlignmentResult(spans=tuple(spans), path_log_score=path_score, feasible=True)


def greedy_decode(em: EmissionMatrix, vocab: Vocab) -> str:
    """Frame argmax, collapse repeats, drop blanks, word delimiters to spaces."""
    best = em.log_probs.argmax(axis=1)
    kept = best[np.concatenate(([True], best[1:] != best[:-1]))]
    kept = kept[kept != vocab.blank_index]
    text = "".join(vocab.tokens[i] for i in kept)
    return " ".join(text.replace(vocab.word_delim, " ").split())


__all__ = [
    "AlignmentResult",
    "WordSpan",
    "force_align",
    "greedy_decode",
    "min_frames_required",
    "normalize_text",
]
