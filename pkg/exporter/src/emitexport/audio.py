"""WAV reading and window cutting with consumer-compatible arithmetic.

The cut rule must agree bit-for-bit with the consumer's: the expanded window
[offset - expand, offset + duration + expand] is intersected with the file,
the start snaps down to a sample boundary, and exactly
round(window_length * rate) samples are taken. ``abs_start_s`` of the
emissions derives from that snapped start.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np


@dataclass(frozen=True)
class Window:
    samples: np.ndarray
    sample_rate_hz: int
    abs_start_s: float


def read_wav(path: Path | str) -> tuple[np.ndarray, int]:
    data = Path(path).read_bytes()
    if len(data) < 12 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise ValueError(f"{path}: not a RIFF/WAVE file")
    pos = 12
    fmt = None
    body = None
    while pos + 8 <= len(data):
        tag = data[pos : pos + 4]
        (size,) = struct.unpack_from("<I", data, pos + 4)
        chunk = data[pos + 8 : pos + 8 + size]
        if tag == b"fmt " and fmt is None:
            fmt = chunk
        elif tag == b"data" and body is None:
            body = chunk
        pos += 8 + size + (size & 1)
    if fmt is None or body is None:
        raise ValueError(f"{path}: missing fmt or data chunk")
    audio_format, channels, rate, _, _, bits = struct.unpack_from("<HHIIHH", fmt, 0)
    if channels != 1:
        raise ValueError(f"{path}: expected mono, got {channels} channels")
    if audio_format == 1 and bits == 16:
        samples = (
            np.frombuffer(body[: len(body) - len(body) % 2], dtype="<i2").astype(
                np.float32
            )
            / 32768.0
        )
    elif audio_format == 3 and bits == 32:
        samples = np.frombuffer(body[: len(body) - len(body) % 4], dtype="<f4").astype(
            np.float32
        )
    else:
        raise ValueError(f"{path}: unsupported format {audio_format}/{bits}-bit")
    return samples, rate


def cut_window(
    samples: np.ndarray,
    rate: int,
    offset_s: float,
    duration_s: float,
    expand_s: float,
) -> Window:
    file_duration = len(samples) / rate
    start_s = max(0.0, offset_s - expand_s)
    end_s = min(file_duration, offset_s + duration_s + expand_s)
    if end_s <= start_s:
        raise ValueError("window lies outside the file")
    start_idx = math.floor(start_s * rate)
    end_idx = min(len(samples), start_idx + round((end_s - start_s) * rate))
    return Window(
        samples=samples[start_idx:end_idx],
        sample_rate_hz=rate,
        abs_start_s=start_idx / rate,
    )
