"""Segment-manifest corpora: parsing, writing, sampling, and patching.

A corpus split lives in the conventional three-file layout::

    <root>/txt/<split>.yaml   one flow-style mapping per line (segment list)
    <root>/txt/<split>.en     source text, one line per segment
    <root>/txt/<split>.de     target text, one line per segment
    <root>/wav/*.wav          referenced audio

Only that yaml subset is supported: each entry is a single line of the form
``- {key: value, ...}`` with scalar values. This keeps the parser bounded and
the read/write round-trip a field-level identity.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterator, Mapping

from .errors import (
    IoFailure,
    LineCountMismatch,
    MalformedEntry,
    MissingFile,
    NTooLarge,
    UnknownId,
)
from .rng import SplitMix64

PATCHABLE_FIELDS = ("offset_s", "duration_s", "transcript", "translation")


@dataclass(frozen=True)
class Utterance:
    """One corpus row: an audio window plus its transcript and translation."""

    id: str
    audio_path: str
    offset_s: float
    duration_s: float
    transcript: str
    translation: str
    speaker_id: str | None = None

    def __post_init__(self):
        if not self.id:
            raise ValueError("utterance id must be non-empty")
        if self.offset_s < 0:
            raise ValueError(f"{self.id}: offset_s must be >= 0, got {self.offset_s}")
        if self.duration_s <= 0:
            raise ValueError(f"{self.id}: duration_s must be > 0, got {self.duration_s}")
        for field in ("transcript", "translation"):
            value = getattr(self, field)
            if not value.strip():
                raise ValueError(f"{self.id}: {field} is empty")
            if "\n" in value or "\r" in value:
                raise ValueError(f"{self.id}: {field} must be a single line")

    @property
    def end_s(self) -> float:
        return self.offset_s + self.duration_s


@dataclass(frozen=True)
class CorpusManifest:
    """An ordered, id-unique sequence of utterances under a split name."""

    name: str
    utterances: tuple[Utterance, ...]

    def __post_init__(self):
        object.__setattr__(self, "utterances", tuple(self.utterances))
        seen: set[str] = set()
        for utt in self.utterances:
            if utt.id in seen:
                raise ValueError(f"duplicate utterance id {utt.id!r}")
            seen.add(utt.id)

    def __len__(self) -> int:
        return len(self.utterances)

    def __iter__(self) -> Iterator[Utterance]:
        return iter(self.utterances)

    def ids(self) -> list[str]:
        return [utt.id for utt in self.utterances]

    def by_id(self, utt_id: str) -> Utterance:
        for utt in self.utterances:
            if utt.id == utt_id:
                return utt
        raise KeyError(utt_id)


@dataclass(frozen=True)
class Patch:
    """Per-utterance field overrides keyed by utterance id.

    File form is a JSON object ``{"<id>": {"offset_s": ..., "translation": ...}}``
    whose inner keys are restricted to offset_s, duration_s, transcript,
    translation.
    """

    entries: Mapping[str, Mapping[str, object]]

    def __post_init__(self):
        clean: dict[str, dict[str, object]] = {}
        for utt_id, overrides in self.entries.items():
            for key in overrides:
                if key not in PATCHABLE_FIELDS:
                    raise ValueError(f"patch for {utt_id!r} has unknown field {key!r}")
            clean[utt_id] = dict(overrides)
        object.__setattr__(self, "entries", clean)

    @staticmethod
    def load(path: Path | str) -> "Patch":
        with open(path, encoding="utf-8") as fh:
            return Patch(json.load(fh))

    def save(self, path: Path | str) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(dict(self.entries), fh, ensure_ascii=False, indent=2)
            fh.write("\n")


def _parse_scalar(raw: str) -> str:
    raw = raw.strip()
    if len(raw) >= 2 and raw[0] == raw[-1] and raw[0] in "'\"":
        return raw[1:-1]
    return raw


def _split_fields(body: str, lineno: int) -> list[str]:
    """Split ``key: value, key: value`` on commas outside quotes."""
    fields: list[str] = []
    depth_quote: str | None = None
    start = 0
    for i, ch in enumerate(body):
        if depth_quote is not None:
            if ch == depth_quote:
                depth_quote = None
        elif ch in "'\"":
            depth_quote = ch
        elif ch == ",":
            fields.append(body[start:i])
            start = i + 1
    if depth_quote is not None:
        raise MalformedEntry(f"line {lineno}: unterminated quote")
    fields.append(body[start:])
    return [f for f in fields if f.strip()]


def _parse_entry_line(line: str, lineno: int) -> dict[str, str]:
    stripped = line.strip()
    if not stripped.startswith("-"):
        raise MalformedEntry(f"line {lineno}: expected a '- {{...}}' entry")
    stripped = stripped[1:].strip()
    if not (stripped.startswith("{") and stripped.endswith("}")):
        raise MalformedEntry(f"line {lineno}: expected a flow-style mapping")
    entry: dict[str, str] = {}
    for field in _split_fields(stripped[1:-1], lineno):
        key, sep, value = field.partition(":")
        if not sep:
            raise MalformedEntry(f"line {lineno}: field {field.strip()!r} has no value")
        entry[key.strip()] = _parse_scalar(value)
    return entry


def _entry_float(entry: dict[str, str], key: str, lineno: int) -> float:
    if key not in entry:
        raise MalformedEntry(f"line {lineno}: missing {key!r}")
    try:
        return float(entry[key])
    except ValueError:
        raise MalformedEntry(
            f"line {lineno}: {key!r} is not a number: {entry[key]!r}"
        ) from None


def _split_paths(root_dir: Path | str, split: str) -> tuple[Path, Path, Path]:
    txt = Path(root_dir) / "txt"
    return txt / f"{split}.yaml", txt / f"{split}.en", txt / f"{split}.de"


def parse_mustc(root_dir: Path | str, split: str) -> CorpusManifest:
    """Load a split from the three-file layout into a manifest.

    Ids are taken from an ``id`` key when present, otherwise synthesized as
    ``<wav-stem>_<line-index>`` (zero-based) so they stay unique and stable.
    """
    yaml_path, en_path, de_path = _split_paths(root_dir, split)
    for path in (yaml_path, en_path, de_path):
        if not path.is_file():
            raise MissingFile(str(path))

    entries = yaml_path.read_text(encoding="utf-8").splitlines()
    en_lines = en_path.read_text(encoding="utf-8").splitlines()
    de_lines = de_path.read_text(encoding="utf-8").splitlines()
    entries = [line for line in entries if line.strip()]
    if not (len(entries) == len(en_lines) == len(de_lines)):
        raise LineCountMismatch(
            f"{split}: {len(entries)} segments vs {len(en_lines)} source lines "
            f"vs {len(de_lines)} target lines"
        )

    utterances = []
    for index, (line, en, de) in enumerate(zip(entries, en_lines, de_lines)):
        lineno = index + 1
        entry = _parse_entry_line(line, lineno)
        wav = entry.get("wav") or entry.get("rpath")
        if not wav:
            raise MalformedEntry(f"line {lineno}: missing 'wav' (or 'rpath')")
        utt_id = entry.get("id") or f"{Path(wav).stem}_{index}"
        try:
            utterances.append(
                Utterance(
                    id=utt_id,
                    audio_path=wav,
                    offset_s=_entry_float(entry, "offset", lineno),
                    duration_s=_entry_float(entry, "duration", lineno),
                    transcript=en,
                    translation=de,
                    speaker_id=entry.get("speaker_id"),
                )
            )
        except ValueError as exc:
            raise MalformedEntry(f"line {lineno}: {exc}") from None
    return CorpusManifest(name=split, utterances=tuple(utterances))


def _format_scalar(value: str) -> str:
    if value == "" or any(c in value for c in ",:{}'\"") or value != value.strip():
        if '"' not in value:
            return f'"{value}"'
        if "'" not in value:
            return f"'{value}'"
        raise IoFailure(f"cannot quote value mixing both quote kinds: {value!r}")
    return value


def _format_entry(utt: Utterance) -> str:
    # repr() keeps float round-trips exact (17.2 -> "17.2" -> 17.2).
    parts = [
        f"duration: {utt.duration_s!r}",
        f"offset: {utt.offset_s!r}",
        f"id: {_format_scalar(utt.id)}",
    ]
    if utt.speaker_id is not None:
        parts.append(f"speaker_id: {_format_scalar(utt.speaker_id)}")
    parts.append(f"wav: {_format_scalar(utt.audio_path)}")
    return "- {" + ", ".join(parts) + "}"


def write_manifest(manifest: CorpusManifest, root_dir: Path | str) -> None:
    """Write the three-file layout (UTF-8, LF) so that a re-parse is identical."""
    yaml_path, en_path, de_path = _split_paths(root_dir, manifest.name)
    try:
        yaml_path.parent.mkdir(parents=True, exist_ok=True)
        with open(yaml_path, "w", encoding="utf-8", newline="\n") as fh:
            for utt in manifest:
                fh.write(_format_entry(utt) + "\n")
        with open(en_path, "w", encoding="utf-8", newline="\n") as fh:
            for utt in manifest:
                fh.write(utt.transcript + "\n")
        with open(de_path, "w", encoding="utf-8", newline="\n") as fh:
            for utt in manifest:
                fh.write(utt.translation + "\n")
    except OSError as exc:
        raise IoFailure(str(exc)) from exc


def sample_subset(manifest: CorpusManifest, n: int, seed: int) -> CorpusManifest:
    """Choose n utterances uniformly without replacement, keeping input order.

    Selection sampling: walking the corpus once, item i is taken when
    ``next_float() * (remaining_items) < remaining_needed``. The walk stops as
    soon as n items are taken, so the draw sequence is part of the contract.
    """
    total = len(manifest)
    if not 0 <= n <= total:
        raise NTooLarge(f"cannot sample {n} of {total}")
    rng = SplitMix64(seed)
    taken: list[Utterance] = []
    needed = n
    for i, utt in enumerate(manifest):
        if needed == 0:
            break
        if rng.next_float() * (total - i) < needed:
            taken.append(utt)
            needed -= 1
    return CorpusManifest(name=manifest.name, utterances=tuple(taken))


def apply_patch(manifest: CorpusManifest, patch: Patch) -> CorpusManifest:
    """Return a manifest with patch overrides applied; order and size unchanged."""
    unknown = set(patch.entries) - set(manifest.ids())
    if unknown:
        raise UnknownId(", ".join(sorted(unknown)))
    patched = []
    for utt in manifest:
        overrides = patch.entries.get(utt.id)
        patched.append(replace(utt, **overrides) if overrides else utt)
    return CorpusManifest(name=manifest.name, utterances=tuple(patched))
