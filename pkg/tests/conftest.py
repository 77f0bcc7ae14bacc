import pytest

from alignqc.corpus import CorpusManifest, Utterance, write_manifest
from alignqc.emission import Vocab


@pytest.fixture
def tiny_vocab() -> Vocab:
    return Vocab(("<blank>", "|", "A", "B", "C"))


def make_utterance(i: int = 0, **overrides) -> Utterance:
    fields = dict(
        id=f"ted_100_{i}",
        audio_path="ted_100.wav",
        offset_s=10.0 + 5.0 * i,
        duration_s=3.0,
        transcript=f"Hello there number {i}.",
        translation=f"Hallo du Nummer {i}.",
        speaker_id="spk.100",
    )
    fields.update(overrides)
    return Utterance(**fields)


def make_manifest(n: int = 3, name: str = "dev") -> CorpusManifest:
    return CorpusManifest(name=name, utterances=tuple(make_utterance(i) for i in range(n)))


@pytest.fixture
def disk_corpus(tmp_path):
    manifest = make_manifest(4)
    write_manifest(manifest, tmp_path / "corpus")
    return tmp_path / "corpus", manifest
