"""Writer for the "EMIT" binary format (version 1) and its vocab sidecar.

Layout, little-endian: magic ``EMIT``, u32 version=1, u32 T, u32 V,
f32 stride_s, f64 abs_start_s, then T*V f32 log-probabilities row-major.
The vocabulary is a UTF-8 text file next to the emissions, one token per
line, line 0 being the blank token.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

MAGIC = b"EMIT"
VERSION = 1
_HEADER = struct.Struct("<4sIIIfd")
VOCAB_FILENAME = "vocab.txt"


def write_emissions(
    path: Path | str, log_probs: np.ndarray, stride_s: float, abs_start_s: float
) -> None:
    probs = np.ascontiguousarray(log_probs, dtype="<f4")
    if probs.ndim != 2:
        raise ValueError("log_probs must be T x V")
    frames_t, vocab_v = probs.shape
    header = _HEADER.pack(
        MAGIC, VERSION, frames_t, vocab_v, np.float32(stride_s), float(abs_start_s)
    )
    Path(path).write_bytes(header + probs.tobytes())


def write_vocab(directory: Path | str, tokens: list[str]) -> Path:
    path = Path(directory) / VOCAB_FILENAME
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for token in tokens:
            fh.write(token + "\n")
    return path
