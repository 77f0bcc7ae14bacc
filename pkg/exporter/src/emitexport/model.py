"""Acoustic models that turn a waveform window into emission log-probs.

Any object with ``tokens`` (blank first, ``|`` present), ``stride_s``, and
``log_probs(samples, rate) -> ndarray[T, V]`` works as a model; the default
is a wav2vec2-style character CTC checkpoint loaded through transformers.
The frame stride is computed from the model's convolutional downsampling
factor rather than hard-coded, and outputs are plain log-softmax: no
temperature, no language model.
"""

from __future__ import annotations

import math
from typing import Protocol

import numpy as np

from .errors import ModelLoadFailure

DEFAULT_MODEL = "facebook/wav2vec2-large-960h"


class AcousticModel(Protocol):
    tokens: list[str]
    stride_s: float

    def log_probs(self, samples: np.ndarray, rate: int) -> np.ndarray:
        ...


class Wav2Vec2CharModel:
    """Character-level CTC model from a transformers checkpoint."""

    def __init__(self, model, processor):
        import torch  # local import keeps module importable without torch

        self._torch = torch
        self._model = model.eval()
        self._processor = processor
        self._device = "cuda" if torch.cuda.is_available() else "cpu"
        self._model.to(self._device)

        vocab = processor.tokenizer.get_vocab()
        by_index = sorted(vocab.items(), key=lambda kv: kv[1])
        tokens = [token for token, _ in by_index]
        blank = model.config.pad_token_id or 0
        # blank must sit at index 0 in the sidecar; permute if the
        # checkpoint puts it elsewhere
        self._permutation = None
        if blank != 0:
            order = [blank] + [i for i in range(len(tokens)) if i != blank]
            self._permutation = np.array(order)
            tokens = [tokens[i] for i in order]
        if "|" not in tokens:
            raise ModelLoadFailure("model vocabulary has no '|' word delimiter")
        self.tokens = tokens

        downsample = math.prod(model.config.conv_stride)
        self.stride_s = downsample / processor.feature_extractor.sampling_rate

    @classmethod
    def load(cls, name: str = DEFAULT_MODEL) -> "Wav2Vec2CharModel":
        try:
            from transformers import Wav2Vec2ForCTC, Wav2Vec2Processor

            model = Wav2Vec2ForCTC.from_pretrained(name)
            processor = Wav2Vec2Processor.from_pretrained(name)
        except Exception as exc:
            raise ModelLoadFailure(f"could not load {name!r}: {exc}") from exc
        return cls(model, processor)

    def log_probs(self, samples: np.ndarray, rate: int) -> np.ndarray:
        torch = self._torch
        inputs = self._processor(
            samples.astype(np.float32), sampling_rate=rate, return_tensors="pt"
        )
        with torch.no_grad():
            logits = self._model(inputs.input_values.to(self._device)).logits[0]
            log_probs = torch.log_softmax(logits.float(), dim=-1).cpu().numpy()
        if self._permutation is not None:
            log_probs = log_probs[:, self._permutation]
        return log_probs
