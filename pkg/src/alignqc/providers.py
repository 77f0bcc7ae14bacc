"""Emission sources for corpus-scale detection.

A provider answers "give me the (original-window, expanded-window) emission
matrices for this utterance". Two implementations:

* DirectoryEmissionProvider reads ``<id>.orig.emit`` / ``<id>.exp.emit``
  files (plus the shared ``vocab.txt`` sidecar) produced by an exporter
  running a real acoustic model;
* SyntheticEmissionProvider renders matrices on the fly from a ground-truth
  character timeline, which makes the whole detection pipeline verifiable at
  desk scale: the truth says where the words really are, the manifest says
  where the windows claim to be, and the detector has to tell them apart.

``build_synthetic_corpus`` manufactures such a ground-truthed corpus: random
letter words laid out on a timeline with generous file margins, so corruption
shifts up to a second never clamp against file boundaries.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from .audio import clamped_window
from .corpus import CorpusManifest, Utterance
from .emission import (
    VOCAB_FILENAME,
    EmissionMatrix,
    Vocab,
    load_emission,
    save_emission,
    synthesize_emissions,
)
from .errors import MissingFile
from .rng import SplitMix64, derive

_LETTERS = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"
DEFAULT_VOCAB = Vocab(("<blank>", "|", "'") + tuple(_LETTERS))


def emission_paths(directory: Path | str, utt_id: str) -> tuple[Path, Path]:
    base = Path(directory)
    return base / f"{utt_id}.orig.emit", base / f"{utt_id}.exp.emit"


class DirectoryEmissionProvider:
    """Reads exported emission files named ``<utterance-id>.{orig,exp}.emit``."""

    def __init__(self, directory: Path | str):
        self.directory = Path(directory)

    def load_vocab(self) -> Vocab:
        path = self.directory / VOCAB_FILENAME
        if not path.is_file():
            raise MissingFile(str(path))
        return Vocab.load(path)

    def emissions_for(self, utt: Utterance) -> tuple[EmissionMatrix, EmissionMatrix]:
        orig_path, exp_path = emission_paths(self.directory, utt.id)
        for path in (orig_path, exp_path):
            if not path.is_file():
                raise MissingFile(str(path))
        return load_emission(orig_path), load_emission(exp_path)


def _fnv1a64(text: str) -> int:
    value = 0xCBF29CE484222325
    for byte in text.encode("utf-8"):
        value = ((value ^ byte) * 0x100000001B3) & ((1 << 64) - 1)
    return value


@dataclass(frozen=True)
class UtteranceTruth:
    """Where an utterance's characters actually sit in its audio file."""

    char_times: tuple[tuple[str, float, float], ...]
    file_duration_s: float
    true_offset_s: float
    true_duration_s: float

    @property
    def true_end_s(self) -> float:
        return self.true_offset_s + self.true_duration_s


class SyntheticEmissionProvider:
    """Renders emissions from ground truth, mimicking an exported directory.

    Noise draws are seeded per utterance id (and per window kind), so a
    provider is deterministic regardless of evaluation order or worker count.
    """

    def __init__(
        self,
        truths: Mapping[str, UtteranceTruth],
        vocab: Vocab = DEFAULT_VOCAB,
        stride_s: float = 0.02,
        expand_s: float = 1.0,
        noise_eps: float = 0.0,
        seed: int = 0,
    ):
        self.truths = dict(truths)
        self.vocab = vocab
        self.stride_s = stride_s
        self.expand_s = expand_s
        self.noise_eps = noise_eps
        self.seed = seed

    def _render(
        self, utt: Utterance, truth: UtteranceTruth, expand_s: float, kind: int
    ) -> EmissionMatrix:
        window = clamped_window(
            utt.offset_s, utt.duration_s, expand_s, truth.file_duration_s
        )
        return synthesize_emissions(
            utt.transcript,
            self.vocab,
            truth.char_times,
            stride_s=self.stride_s,
            window=window,
            noise_eps=self.noise_eps,
            seed=derive(self.seed ^ _fnv1a64(utt.id), kind),
        )

    def emissions_for(self, utt: Utterance) -> tuple[EmissionMatrix, EmissionMatrix]:
        truth = self.truths.get(utt.id)
        if truth is None:
            raise MissingFile(f"no ground truth for {utt.id}")
        original = self._render(utt, truth, expand_s=0.0, kind=0)
        expanded = self._render(utt, truth, expand_s=self.expand_s, kind=1)
        return original, expanded


def write_emission_dir(
    manifest: CorpusManifest,
    provider,
    vocab: Vocab,
    directory: Path | str,
) -> None:
    """Materialize a provider into the on-disk emission layout."""
    base = Path(directory)
    base.mkdir(parents=True, exist_ok=True)
    vocab.save(base / VOCAB_FILENAME)
    for utt in manifest:
        original, expanded = provider.emissions_for(utt)
        orig_path, exp_path = emission_paths(base, utt.id)
        save_emission(original, orig_path)
        save_emission(expanded, exp_path)


def build_synthetic_corpus(
    n: int,
    seed: int = 0,
    stride_s: float = 0.02,
    words_range: tuple[int, int] = (2, 5),
    chars_range: tuple[int, int] = (2, 6),
    margin_range: tuple[float, float] = (0.03, 0.27),
    split_name: str = "synth",
) -> tuple[CorpusManifest, dict[str, UtteranceTruth]]:
    """Generate a ground-truthed corpus of random letter words.

    Characters occupy two to three frame strides each, separated by two
    strides of blank (so repeats always collapse correctly), with the word
    delimiter rendered as its own two-stride token between words. The declared
    window wraps the words with lead/tail margins drawn from ``margin_range``
    (small enough by default that boundary fixing can recover the window),
    and each virtual file keeps 2.5 s of slack on both sides so corruption
    shifts never hit a file edge.
    """
    rng = SplitMix64(seed)
    utterances = []
    truths: dict[str, UtteranceTruth] = {}
    for i in range(n):
        n_words = words_range[0] + rng.next_below(words_range[1] - words_range[0] + 1)
        words = []
        for _ in range(n_words):
            n_chars = chars_range[0] + rng.next_below(
                chars_range[1] - chars_range[0] + 1
            )
            words.append("".join(_LETTERS[rng.next_below(26)] for _ in range(n_chars)))
        transcript = " ".join(words)

        char_times: list[tuple[str, float, float]] = []
        cursor = 2.5
        first_char_start = cursor
        for w, word in enumerate(words):
            if w > 0:
                cursor += 2 * stride_s  # blank gap before the delimiter
                char_times.append(("|", cursor, cursor + 2 * stride_s))
                cursor += 2 * stride_s
                cursor += 2 * stride_s  # blank gap after the delimiter
            for ch in word:
                char_frames = 2 + rng.next_below(2)
                char_times.append((ch, cursor, cursor + char_frames * stride_s))
                cursor += char_frames * stride_s
                cursor += 2 * stride_s  # blank gap between characters
        last_char_end = char_times[-1][2]

        lead = rng.next_uniform(*margin_range)
        tail = rng.next_uniform(*margin_range)
        offset = first_char_start - lead
        duration = (last_char_end + tail) - offset
        file_duration = last_char_end + 2.5

        utt_id = f"synth_{i}"
        utterances.append(
            Utterance(
                id=utt_id,
                audio_path=f"{utt_id}.wav",
                offset_s=offset,
                duration_s=duration,
                transcript=transcript,
                translation=f"ubersetzung {i}",
                speaker_id=f"spk.{i % 7}",
            )
        )
        truths[utt_id] = UtteranceTruth(
            char_times=tuple(char_times),
            file_duration_s=file_duration,
            true_offset_s=offset,
            true_duration_s=duration,
        )
    manifest = CorpusManifest(name=split_name, utterances=tuple(utterances))
    return manifest, truths
