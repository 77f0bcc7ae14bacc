"""WAV reading and time-exact segment cutting.

Only mono RIFF/WAVE files in PCM16 or IEEE-float32 are accepted; anything
else is rejected rather than silently resampled or downmixed. Segment
cutting snaps the window start down to a sample boundary and takes exactly
round(window_length * rate) samples, so the sample count matches the window
length, conversions stay within one sample, and a cut never reads outside
the buffer.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import CorruptHeader, EmptyWindow, UnsupportedFormat

_FMT_PCM = 1
_FMT_FLOAT = 3
_FMT_EXTENSIBLE = 0xFFFE


@dataclass(frozen=True)
class AudioBuffer:
    """A whole mono audio file, samples normalized to [-1, 1]."""

    samples: np.ndarray
    sample_rate_hz: int

    def __post_init__(self):
        if self.sample_rate_hz <= 0:
            raise ValueError("sample_rate_hz must be positive")

    @property
    def duration_s(self) -> float:
        return len(self.samples) / self.sample_rate_hz


@dataclass(frozen=True)
class AudioSegment:
    """A cut of an AudioBuffer with exact bookkeeping of where it came from."""

    samples: np.ndarray
    sample_rate_hz: int
    abs_start_s: float
    requested_window: tuple[float, float]
    clamped: bool

    @property
    def duration_s(self) -> float:
        return len(self.samples) / self.sample_rate_hz

    @property
    def abs_end_s(self) -> float:
        return self.abs_start_s + self.duration_s


def _read_chunks(data: bytes) -> dict[bytes, bytes]:
    if len(data) < 12 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise CorruptHeader("not a RIFF/WAVE file")
    chunks: dict[bytes, bytes] = {}
    pos = 12
    while pos + 8 <= len(data):
        tag = data[pos : pos + 4]
        (size,) = struct.unpack_from("<I", data, pos + 4)
        body = data[pos + 8 : pos + 8 + size]
        if len(body) < size:
            raise CorruptHeader(f"chunk {tag!r} truncated")
        if tag not in chunks:
            chunks[tag] = body
        pos += 8 + size + (size & 1)
    return chunks


def read_wav(path: Path | str) -> AudioBuffer:
    """Read a mono PCM16 or float32 WAV file into a normalized buffer.

    PCM16 samples are scaled by 1/32768 (so 32767 maps to 32767/32768);
    float32 samples are taken as-is.
    """
    data = Path(path).read_bytes()
    chunks = _read_chunks(data)
    if b"fmt " not in chunks or b"data" not in chunks:
        raise CorruptHeader("missing fmt or data chunk")
    fmt = chunks[b"fmt "]
    if len(fmt) < 16:
        raise CorruptHeader("fmt chunk too short")
    audio_format, channels, rate, _, _, bits = struct.unpack_from("<HHIIHH", fmt, 0)
    if audio_format == _FMT_EXTENSIBLE and len(fmt) >= 26:
        (audio_format,) = struct.unpack_from("<H", fmt, 24)
    if channels != 1:
        raise UnsupportedFormat(f"expected mono, got {channels} channels")
    body = chunks[b"data"]
    if audio_format == _FMT_PCM and bits == 16:
        raw = np.frombuffer(body[: len(body) - len(body) % 2], dtype="<i2")
        samples = raw.astype(np.float64) / 32768.0
    elif audio_format == _FMT_FLOAT and bits == 32:
        raw = np.frombuffer(body[: len(body) - len(body) % 4], dtype="<f4")
        samples = raw.astype(np.float64)
    else:
        raise UnsupportedFormat(f"format code {audio_format} with {bits}-bit samples")
    return AudioBuffer(samples=samples, sample_rate_hz=rate)


def write_wav_pcm16(path: Path | str, samples: np.ndarray, sample_rate_hz: int) -> None:
    """Write a mono PCM16 WAV file (test and fixture helper)."""
    clipped = np.clip(np.asarray(samples, dtype=np.float64), -1.0, 1.0)
    pcm = np.round(clipped * 32768.0).clip(-32768, 32767).astype("<i2")
    body = pcm.tobytes()
    header = b"RIFF" + struct.pack("<I", 36 + len(body)) + b"WAVE"
    header += b"fmt " + struct.pack(
        "<IHHIIHH", 16, _FMT_PCM, 1, sample_rate_hz, sample_rate_hz * 2, 2, 16
    )
    header += b"data" + struct.pack("<I", len(body))
    Path(path).write_bytes(header + body)


def cut_segment(
    buf: AudioBuffer, offset_s: float, duration_s: float, expand_s: float = 0.0
) -> AudioSegment:
    """Cut [offset - expand, offset + duration + expand], clamped to the file.

    ``abs_start_s`` is the time of the first returned sample (the clamped
    start snapped down to a sample boundary), so downstream frame times can
    be trusted to within one sample.
    """
    if offset_s < 0 or duration_s <= 0 or expand_s < 0:
        raise ValueError("offset_s >= 0, duration_s > 0, expand_s >= 0 required")
    requested = (offset_s - expand_s, offset_s + duration_s + expand_s)
    start_s = max(0.0, requested[0])
    end_s = min(buf.duration_s, requested[1])
    if end_s <= start_s:
        raise EmptyWindow(f"window {requested} lies outside 0..{buf.duration_s:.3f}s")
    rate = buf.sample_rate_hz
    start_idx = math.floor(start_s * rate)
    end_idx = min(len(buf.samples), start_idx + round((end_s - start_s) * rate))
    return AudioSegment(
        samples=buf.samples[start_idx:end_idx],
        sample_rate_hz=rate,
        abs_start_s=start_idx / rate,
        requested_window=requested,
        clamped=(start_s > requested[0]) or (end_s < requested[1]),
    )


def clamped_window(
    offset_s: float, duration_s: float, expand_s: float, file_duration_s: float
) -> tuple[float, float]:
    """The expanded window [offset - expand, offset + duration + expand]
    intersected with [0, file_duration]. Shared arithmetic for anything that
    must agree with cut_segment about where an expanded window starts."""
    return (
        max(0.0, offset_s - expand_s),
        min(file_duration_s, offset_s + duration_s + expand_s),
    )
