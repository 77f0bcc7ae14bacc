import numpy as np
import pytest


class FakeCharModel:
    """Deterministic stand-in with the same surface as the real model.

    Emission rows are proper log-distributions whose favored token is a
    fixed function of the frame's energy, so exports are reproducible and
    checkable without torch ever running.
    """

    def __init__(self, downsample: int = 320, rate: int = 16000):
        self.tokens = ["<pad>", "|", "'"] + [chr(c) for c in range(65, 91)]
        self.stride_s = downsample / rate
        self._downsample = downsample

    def log_probs(self, samples: np.ndarray, rate: int) -> np.ndarray:
        frames_t = max(1, len(samples) // self._downsample)
        v = len(self.tokens)
        usable = frames_t * self._downsample
        frames = samples[:usable].reshape(frames_t, self._downsample)
        energy = np.abs(frames).mean(axis=1)
        favored = (energy * 1e4).astype(np.int64) % v
        probs = np.full((frames_t, v), 0.2 / (v - 1))
        probs[np.arange(frames_t), favored] = 0.8
        return np.log(probs).astype(np.float32)


@pytest.fixture
def fake_model():
    return FakeCharModel()


@pytest.fixture
def tiny_corpus(tmp_path):
    """Two short wav files and a three-utterance split."""
    from alignqc.audio import write_wav_pcm16

    rate = 16000
    rng = np.random.default_rng(0)
    wav_dir = tmp_path / "wav"
    wav_dir.mkdir()
    write_wav_pcm16(wav_dir / "talk_1.wav", rng.uniform(-0.3, 0.3, 8 * rate), rate)
    write_wav_pcm16(wav_dir / "talk_2.wav", rng.uniform(-0.3, 0.3, 6 * rate), rate)

    txt = tmp_path / "txt"
    txt.mkdir()
    (txt / "dev.yaml").write_text(
        "- {duration: 2.0, offset: 1.5, wav: talk_1.wav, speaker_id: spk.1}\n"
        "- {duration: 1.5, offset: 4.25, wav: talk_1.wav, speaker_id: spk.1}\n"
        "- {duration: 2.5, offset: 0.75, wav: talk_2.wav, speaker_id: spk.2}\n",
        encoding="utf-8",
    )
    (txt / "dev.en").write_text("one\ntwo\nthree\n", encoding="utf-8")
    (txt / "dev.de").write_text("eins\nzwei\ndrei\n", encoding="utf-8")
    return tmp_path
