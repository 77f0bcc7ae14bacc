"""Acoustic-model boundary: emission matrices, their file format, and a
synthetic generator.

An emission matrix holds frame-level log-probabilities over a token
vocabulary, plus the time metadata needed to map frames back to the source
audio. Real matrices come from an exporter running an ASR model; synthetic
ones are constructed from known character timings and serve as a desk-scale
oracle for the alignment and detection pipeline.

File format (little-endian, "EMIT" format, version 1)::

    bytes 0..3    magic "EMIT"
    u32           version = 1
    u32           T (frames)
    u32           V (vocabulary size)
    f32           stride_s (seconds per frame)
    f64           abs_start_s (time of frame 0 in the source file)
    T*V f32       log-probabilities, row-major

The vocabulary lives in a sidecar UTF-8 text file (``vocab.txt`` next to the
emission files), one token per line, line 0 being the blank token. Log-probs
of exactly zero probability are floored at LOG_ZERO rather than -inf so files
stay finite.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import BadMagic, CharNotInVocab, DimensionOverflow, TruncatedFile
from .rng import SplitMix64
from .textnorm import transcript_labels

MAGIC = b"EMIT"
VERSION = 1
LOG_ZERO = -1.0e4
_HEADER = struct.Struct("<4sIIIfd")
_MAX_DIM = 1 << 31
VOCAB_FILENAME = "vocab.txt"


@dataclass(frozen=True)
class Vocab:
    """Token list with the blank at index 0 and ``|`` as word delimiter."""

    tokens: tuple[str, ...]
    word_delim: str = "|"
    blank_index: int = field(default=0, init=False)

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        if len(self.tokens) < 2:
            raise ValueError("vocab needs the blank plus at least one symbol")
        if len(set(self.tokens)) != len(self.tokens):
            raise ValueError("vocab tokens must be unique")
        object.__setattr__(
            self, "_index", {tok: i for i, tok in enumerate(self.tokens)}
        )

    def __len__(self) -> int:
        return len(self.tokens)

    def index(self, token: str) -> int:
        try:
            return self._index[token]
        except KeyError:
            raise CharNotInVocab(token) from None

    def __contains__(self, token: str) -> bool:
        return token in self._index

    @staticmethod
    def load(path: Path | str) -> "Vocab":
        lines = Path(path).read_text(encoding="utf-8").splitlines()
        return Vocab(tuple(lines))

    def save(self, path: Path | str) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for token in self.tokens:
                fh.write(token + "\n")


@dataclass(frozen=True, eq=False)
class EmissionMatrix:
    """T x V frame-level log-probabilities with time metadata.

    ``stride_s`` is kept at float32 precision (the file stores it as f32) so
    save/load round-trips are bit-exact.
    """

    log_probs: np.ndarray
    stride_s: float
    abs_start_s: float

    def __post_init__(self):
        probs = np.ascontiguousarray(self.log_probs, dtype=np.float32)
        if probs.ndim != 2:
            raise ValueError("log_probs must be a T x V matrix")
        t, v = probs.shape
        if t < 1 or v < 2:
            raise ValueError(f"need T >= 1 and V >= 2, got {t} x {v}")
        row_max = probs.max(axis=1, keepdims=True).astype(np.float64)
        lse = row_max[:, 0] + np.log(
            np.exp(probs.astype(np.float64) - row_max).sum(axis=1)
        )
        if np.abs(lse).max() > 1e-3:
            raise ValueError("rows must be proper log-distributions (logsumexp ~ 0)")
        probs.flags.writeable = False  # matrices are immutable once built
        object.__setattr__(self, "log_probs", probs)
        object.__setattr__(self, "stride_s", float(np.float32(self.stride_s)))
        object.__setattr__(self, "abs_start_s", float(self.abs_start_s))

    @property
    def frames_t(self) -> int:
        return self.log_probs.shape[0]

    @property
    def vocab_v(self) -> int:
        return self.log_probs.shape[1]

    def frame_start_s(self, frame: int) -> float:
        return self.abs_start_s + frame * self.stride_s

    @property
    def abs_end_s(self) -> float:
        return self.frame_start_s(self.frames_t)


def save_emission(em: EmissionMatrix, path: Path | str) -> None:
    header = _HEADER.pack(
        MAGIC, VERSION, em.frames_t, em.vocab_v, em.stride_s, em.abs_start_s
    )
    Path(path).write_bytes(header + em.log_probs.astype("<f4").tobytes())


def load_emission(path: Path | str) -> EmissionMatrix:
    data = Path(path).read_bytes()
    if len(data) < 4 or data[:4] != MAGIC:
        raise BadMagic(f"{path}: not an emission file")
    if len(data) < _HEADER.size:
        raise TruncatedFile(f"{path}: header incomplete")
    _, version, frames_t, vocab_v, stride_s, abs_start_s = _HEADER.unpack_from(data)
    if version != VERSION:
        raise BadMagic(f"{path}: unsupported version {version}")
    if not (1 <= frames_t < _MAX_DIM and 2 <= vocab_v < _MAX_DIM):
        raise DimensionOverflow(f"{path}: {frames_t} x {vocab_v}")
    expected = _HEADER.size + 4 * frames_t * vocab_v
    if len(data) < expected:
        raise TruncatedFile(f"{path}: {len(data)} bytes, header claims {expected}")
    probs = np.frombuffer(
        data, dtype="<f4", count=frames_t * vocab_v, offset=_HEADER.size
    ).reshape(frames_t, vocab_v)
    return EmissionMatrix(log_probs=probs, stride_s=stride_s, abs_start_s=abs_start_s)


def synthesize_emissions(
    transcript: str,
    vocab: Vocab,
    char_times: Sequence[tuple[str, float, float]],
    stride_s: float,
    window: tuple[float, float],
    noise_eps: float = 0.0,
    seed: int = 0,
) -> EmissionMatrix:
    """Render emissions for a transcript whose character timings are known.

    ``char_times`` lists, in order, every label of the normalized transcript
    (word gaps as the delimiter token; a plain space is accepted too) with its
    absolute [start, end) interval. A frame favors the character whose
    interval overlaps it the most (overlaps under one microsecond are treated
    as frame-quantization noise and ignored); frames owned by no character
    favor the blank.

    The favored token receives probability ``1 - noise_eps`` and the rest is
    spread uniformly over the other tokens. When ``noise_eps > 0``, each
    character independently renders as a uniformly random vocab token with
    probability ``noise_eps`` (a confusion, or a dropout when the draw lands
    on blank), drawn from a SplitMix64 stream seeded with ``seed``; silence
    stays confidently blank. The knob therefore reads as "this fraction of
    the characters carry wrong evidence", which is the unit the detection
    rules reason about.
    """
    if not 0.0 <= noise_eps < 1.0:
        raise ValueError("noise_eps must be in [0, 1)")
    labels = transcript_labels(transcript, vocab.word_delim)
    for token in labels:
        vocab.index(token)
    timed = [
        (vocab.word_delim if token == " " else token, start, end)
        for token, start, end in char_times
    ]
    if [token for token, _, _ in timed] != labels:
        raise ValueError("char_times must list the normalized transcript in order")
    for token, _, _ in timed:
        vocab.index(token)

    stride = float(np.float32(stride_s))
    win_start, win_end = window
    frames_t = max(1, round((win_end - win_start) / stride))
    v = len(vocab)

    token_idx = np.array([vocab.index(tok) for tok, _, _ in timed], dtype=np.int64)
    if noise_eps > 0.0 and timed:
        rng = SplitMix64(seed)
        for c in range(len(token_idx)):
            if rng.next_float() < noise_eps:
                token_idx[c] = rng.next_below(v)

    frame_lo = win_start + stride * np.arange(frames_t)
    favored = np.full(frames_t, vocab.blank_index, dtype=np.int64)
    if timed:
        starts = np.array([s for _, s, _ in timed])
        ends = np.array([e for _, _, e in timed])
        overlap = np.minimum(frame_lo[:, None] + stride, ends[None, :]) - np.maximum(
            frame_lo[:, None], starts[None, :]
        )
        best = overlap.argmax(axis=1)
        owned = overlap[np.arange(frames_t), best] > 1e-6
        favored[owned] = token_idx[best[owned]]

    fill = LOG_ZERO if noise_eps == 0.0 else np.log(noise_eps / (v - 1))
    favored_logp = 0.0 if noise_eps == 0.0 else np.log1p(-noise_eps)
    probs = np.full((frames_t, v), fill, dtype=np.float64)
    probs[np.arange(frames_t), favored] = favored_logp
    return EmissionMatrix(log_probs=probs, stride_s=stride, abs_start_s=win_start)
