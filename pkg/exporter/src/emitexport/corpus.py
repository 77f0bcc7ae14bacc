"""Minimal reader for the segment-manifest layout.

The exporter only needs the timing side of a corpus: ``txt/<split>.yaml``
with one flow-style mapping per line carrying ``duration``, ``offset``, and
``wav`` (or ``rpath``), optionally ``speaker_id`` and ``id``. Ids follow the
layout convention ``<wav-stem>_<zero-based-line-index>`` when not explicit,
which is what keeps emission filenames in sync with the consumer.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path


@dataclass(frozen=True)
class Segment:
    id: str
    audio_path: str
    offset_s: float
    duration_s: float


def _parse_entry(line: str, lineno: int) -> dict[str, str]:
    stripped = line.strip()
    if not stripped.startswith("-"):
        raise ValueError(f"line {lineno}: expected '- {{...}}'")
    body = stripped[1:].strip()
    if not (body.startswith("{") and body.endswith("}")):
        raise ValueError(f"line {lineno}: expected a flow-style mapping")
    entry: dict[str, str] = {}
    field = []
    quote = None
    fields = []
    for ch in body[1:-1]:
        if quote:
            if ch == quote:
                quote = None
            field.append(ch)
        elif ch in "'\"":
            quote = ch
            field.append(ch)
        elif ch == ",":
            fields.append("".join(field))
            field = []
        else:
            field.append(ch)
    fields.append("".join(field))
    for raw in fields:
        if not raw.strip():
            continue
        key, sep, value = raw.partition(":")
        if not sep:
            raise ValueError(f"line {lineno}: field {raw.strip()!r} has no value")
        value = value.strip()
        if len(value) >= 2 and value[0] == value[-1] and value[0] in "'\"":
            value = value[1:-1]
        entry[key.strip()] = value
    return entry


def read_segments(corpus_root: Path | str, split: str) -> list[Segment]:
    yaml_path = Path(corpus_root) / "txt" / f"{split}.yaml"
    segments = []
    lines = yaml_path.read_text(encoding="utf-8").splitlines()
    for index, line in enumerate(l for l in lines if l.strip()):
        entry = _parse_entry(line, index + 1)
        wav = entry.get("wav") or entry.get("rpath")
        if not wav:
            raise ValueError(f"line {index + 1}: missing 'wav'")
        segments.append(
            Segment(
                id=entry.get("id") or f"{Path(wav).stem}_{index}",
                audio_path=wav,
                offset_s=float(entry["offset"]),
                duration_s=float(entry["duration"]),
            )
        )
    return segments
