"""Export loop: two emission files per utterance plus one vocab sidecar."""

from __future__ import annotations

import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .audio import cut_window, read_wav
from .corpus import read_segments
from .emitfile import write_emissions, write_vocab
from .errors import AudioMissing
from .model import DEFAULT_MODEL, AcousticModel


@dataclass
class ExportJob:
    corpus_root: Path
    split: str
    out_dir: Path
    model_name: str = DEFAULT_MODEL
    expand_s: float = 1.0
    audio_root: Path | None = None  # defaults to <corpus_root>/wav

    def __post_init__(self):
        self.corpus_root = Path(self.corpus_root)
        self.out_dir = Path(self.out_dir)
        if self.audio_root is None:
            self.audio_root = self.corpus_root / "wav"
        self.audio_root = Path(self.audio_root)


class _FileCache:
    """Utterances arrive grouped by file; keep the last file decoded."""

    def __init__(self):
        self._path = None
        self._value = None

    def get(self, path: Path):
        if path != self._path:
            self._value = read_wav(path)
            self._path = path
        return self._value


def export(job: ExportJob, model: AcousticModel | None = None) -> int:
    """Write ``<id>.orig.emit`` and ``<id>.exp.emit`` for every utterance.

    Returns the number of utterances exported. Utterances whose audio file
    is missing are skipped and reported on stderr rather than failing the
    whole run.
    """
    if model is None:
        from .model import Wav2Vec2CharModel

        model = Wav2Vec2CharModel.load(job.model_name)

    segments = read_segments(job.corpus_root, job.split)
    job.out_dir.mkdir(parents=True, exist_ok=True)
    write_vocab(job.out_dir, model.tokens)

    cache = _FileCache()
    exported = 0
    for segment in segments:
        wav_path = job.audio_root / segment.audio_path
        try:
            if not wav_path.is_file():
                raise AudioMissing(str(wav_path))
            samples, rate = cache.get(wav_path)
            for expand_s, suffix in ((0.0, "orig"), (job.expand_s, "exp")):
                window = cut_window(
                    samples, rate, segment.offset_s, segment.duration_s, expand_s
                )
                log_probs = model.log_probs(window.samples, rate)
                write_emissions(
                    job.out_dir / f"{segment.id}.{suffix}.emit",
                    np.asarray(log_probs),
                    stride_s=model.stride_s,
                    abs_start_s=window.abs_start_s,
                )
            exported += 1
        except AudioMissing as exc:
            print(f"skipping {segment.id}: missing audio {exc}", file=sys.stderr)
    return exported
