"""Text metrics: Levenshtein distance and signature-compatible BLEU.

BLEU follows the WMT convention: mteval-13a tokenization, four n-gram orders
with clipped counts, case-sensitive, single reference. Sentence scores use
exponential smoothing (each zero-match order n with candidates contributes
``1 / (2^k * total_n)`` where k counts the zero orders so far); corpus scores
use the plain statistics with no smoothing substitution, so a corpus with a
zero-match order scores 0. Scores are percentages; tables should round to one
decimal while the raw value keeps full precision.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import LengthMismatch
from .rng import SplitMix64, derive

NGRAM_ORDER = 4
_SCORER_VERSION = "0.1.0"


def levenshtein(a: str, b: str) -> int:
    """Minimum number of single-character inserts, deletes, and substitutions."""
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    if len(a) < len(b):
        a, b = b, a
    target = np.frombuffer(b.encode("utf-32-le"), dtype=np.uint32)
    idx = np.arange(len(target) + 1)
    prev = idx.copy()
    for ch in a:
        cur = prev + 1  # deletion
        cur[1:] = np.minimum(cur[1:], prev[:-1] + (target != ord(ch)))  # substitution
        # insertions: cur[j] <= cur[k] + (j - k) for every k < j, which is a
        # running minimum of cur[j] - j
        cur = np.minimum.accumulate(cur - idx) + idx
        prev = cur
    return int(prev[-1])


# mteval-13a tokenization rules.
_PUNCT = re.compile(r"([\{-\~\[-\` -\&\(-\+\:-\@\/])")
_PERIOD_COMMA_PRE = re.compile(r"([^0-9])([\.,])")
_PERIOD_COMMA_POST = re.compile(r"([\.,])([^0-9])")
_DIGIT_DASH = re.compile(r"([0-9])(-)")


def tokenize_13a(text: str) -> list[str]:
    """Tokenize a segment with the mteval-v13a rules."""
    norm = text.replace("<skipped>", "")
    norm = norm.replace("-\n", "").replace("\n", " ")
    norm = (
        norm.replace("&quot;", '"')
        .replace("&amp;", "&")
        .replace("&lt;", "<")
        .replace("&gt;", ">")
    )
    norm = f" {norm} "
    norm = _PUNCT.sub(r" \1 ", norm)
    norm = _PERIOD_COMMA_PRE.sub(r"\1 \2 ", norm)
    norm = _PERIOD_COMMA_POST.sub(r" \1 \2", norm)
    norm = _DIGIT_DASH.sub(r"\1 \2 ", norm)
    return norm.split()


@dataclass(frozen=True)
class BleuScore:
    """Corpus or sentence BLEU with its component statistics."""

    score: float
    precisions: tuple[float, float, float, float]
    brevity_penalty: float
    hyp_len: int
    ref_len: int
    signature: str

    def format(self) -> str:
        return f"BLEU = {self.score:.1f}"


def _signature(smooth: str, bootstrap: tuple[int, int] | None = None) -> str:
    parts = ["nrefs:1"]
    if bootstrap is not None:
        parts += [f"bs:{bootstrap[0]}", f"seed:{bootstrap[1]}"]
    parts += [
        "case:mixed",
        "eff:no",
        "tok:13a",
        f"smooth:{smooth}",
        f"version:{_SCORER_VERSION}",
    ]
    return "|".join(parts)


def _segment_stats(hyp: str, ref: str) -> tuple[list[int], list[int], int, int]:
    hyp_toks = tokenize_13a(hyp)
    ref_toks = tokenize_13a(ref)
    correct = [0] * NGRAM_ORDER
    total = [0] * NGRAM_ORDER
    for n in range(1, NGRAM_ORDER + 1):
        hyp_grams = Counter(
            tuple(hyp_toks[i : i + n]) for i in range(len(hyp_toks) - n + 1)
        )
        if not hyp_grams:
            continue
        ref_grams = Counter(
            tuple(ref_toks[i : i + n]) for i in range(len(ref_toks) - n + 1)
        )
        total[n - 1] = sum(hyp_grams.values())
        correct[n - 1] = sum(
            min(count, ref_grams[gram]) for gram, count in hyp_grams.items()
        )
    return correct, total, len(hyp_toks), len(ref_toks)


def _brevity_penalty(hyp_len: int, ref_len: int) -> float:
    if hyp_len >= ref_len:
        return 1.0
    if hyp_len == 0:
        return 0.0
    return math.exp(1.0 - ref_len / hyp_len)


def _score_from_stats(
    correct: Sequence[int],
    total: Sequence[int],
    hyp_len: int,
    ref_len: int,
    smooth: str,
    bootstrap: tuple[int, int] | None = None,
) -> BleuScore:
    precisions = [0.0] * NGRAM_ORDER
    fallback = 1.0
    for n in range(1, NGRAM_ORDER + 1):
        if total[n - 1] == 0:
            break
        if correct[n - 1] == 0:
            if smooth == "exp":
                fallback *= 2.0
                precisions[n - 1] = 100.0 / (fallback * total[n - 1])
        else:
            precisions[n - 1] = 100.0 * correct[n - 1] / total[n - 1]
    bp = _brevity_penalty(hyp_len, ref_len)
    # nth root of the product: exact for the all-100 case and never above 100
    # since each precision is at most 100.
    geo_mean = math.prod(precisions) ** (1.0 / NGRAM_ORDER)
    return BleuScore(
        score=bp * geo_mean,
        precisions=tuple(precisions),
        brevity_penalty=bp,
        hyp_len=hyp_len,
        ref_len=ref_len,
        signature=_signature(smooth, bootstrap),
    )


def sentence_bleu(hyp: str, ref: str) -> BleuScore:
    """Case-sensitive sentence BLEU with exponential smoothing."""
    correct, total, hyp_len, ref_len = _segment_stats(hyp, ref)
    return _score_from_stats(correct, total, hyp_len, ref_len, smooth="exp")


def _corpus_stats(
    hyps: Sequence[str], refs: Sequence[str]
) -> list[tuple[list[int], list[int], int, int]]:
    if len(hyps) != len(refs):
        raise LengthMismatch(f"{len(hyps)} hypotheses vs {len(refs)} references")
    if not hyps:
        raise ValueError("need at least one segment")
    return [_segment_stats(h, r) for h, r in zip(hyps, refs)]


def _sum_stats(
    stats: Sequence[tuple[list[int], list[int], int, int]],
    bootstrap: tuple[int, int] | None = None,
) -> BleuScore:
    correct = [0] * NGRAM_ORDER
    total = [0] * NGRAM_ORDER
    hyp_len = 0
    ref_len = 0
    for seg_correct, seg_total, seg_hyp_len, seg_ref_len in stats:
        for n in range(NGRAM_ORDER):
            correct[n] += seg_correct[n]
            total[n] += seg_total[n]
        hyp_len += seg_hyp_len
        ref_len += seg_ref_len
    return _score_from_stats(
        correct, total, hyp_len, ref_len, smooth="none", bootstrap=bootstrap
    )


def corpus_bleu(hyps: Sequence[str], refs: Sequence[str]) -> BleuScore:
    """Corpus BLEU over summed clipped statistics, no smoothing."""
    return _sum_stats(_corpus_stats(hyps, refs))


def bootstrap_ci(
    hyps: Sequence[str],
    refs: Sequence[str],
    resamples: int = 1000,
    seed: int = 12345,
) -> tuple[float, float]:
    """Paired bootstrap: mean corpus BLEU over resamples and the 95% interval
    half-width under a normal approximation (1.96 times the sample standard
    deviation of the resampled scores).

    Resample r draws its segment indices from an independent SplitMix64
    stream seeded with ``derive(seed, r)``, so results do not depend on
    evaluation order.
    """
    if resamples < 1:
        raise ValueError("need at least one resample")
    stats = _corpus_stats(hyps, refs)
    n = len(stats)
    scores = np.empty(resamples)
    for r in range(resamples):
        rng = SplitMix64(derive(seed, r))
        resampled = [stats[rng.next_below(n)] for _ in range(n)]
        scores[r] = _sum_stats(resampled).score
    mean = float(scores.mean())
    ci95 = 0.0 if resamples < 2 else float(1.96 * scores.std(ddof=1))
    return mean, ci95
