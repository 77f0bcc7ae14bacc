import math

import numpy as np
import pytest

from alignqc.ctc import (
    _viterbi_states,
    force_align,
    greedy_decode,
    min_frames_required,
    normalize_text,
)
from alignqc.emission import EmissionMatrix, Vocab, synthesize_emissions
from alignqc.errors import CharNotInVocab, EmptyNormalizedTranscript
from alignqc.textnorm import transcript_labels


def one_hot_emissions(vocab: Vocab, favored: list[str], stride=0.02, abs_start=0.0):
    probs = np.full((len(favored), len(vocab)), -1e4)
    for t, token in enumerate(favored):
        probs[t, vocab.index(token)] = 0.0
    return EmissionMatrix(log_probs=probs, stride_s=stride, abs_start_s=abs_start)


class TestNormalizeText:
    def test_uppercase_and_punctuation_removal(self):
        assert normalize_text("That's what we were looking for.") == "THAT'S WHAT WE WERE LOOKING FOR"

    def test_typographic_apostrophe_mapped(self):
        assert normalize_text("don’t stop") == "DON'T STOP"

    def test_disallowed_chars_deleted_not_spaced(self):
        assert normalize_text("x-ray") == "XRAY"

    def test_whitespace_collapsed(self):
        assert normalize_text("  a \t b  ") == "A B"

    def test_digits_deleted(self):
        assert normalize_text("80's revival") == "'S REVIVAL"


class TestGreedyDecode:
    def test_collapse_repeats_then_drop_blanks(self, tiny_vocab):
        em = one_hot_emissions(tiny_vocab, ["A", "A", "<blank>", "B"])
        assert greedy_decode(em, tiny_vocab) == "AB"

    def test_blank_separates_repeats(self, tiny_vocab):
        em = one_hot_emissions(tiny_vocab, ["A", "<blank>", "A"])
        assert greedy_decode(em, tiny_vocab) == "AA"

    def test_all_blank_decodes_empty(self, tiny_vocab):
        em = one_hot_emissions(tiny_vocab, ["<blank>"] * 6)
        assert greedy_decode(em, tiny_vocab) == ""

    def test_word_delimiter_becomes_single_space(self, tiny_vocab):
        em = one_hot_emissions(
            tiny_vocab, ["A", "|", "<blank>", "|", "B"]
        )
        assert greedy_decode(em, tiny_vocab) == "A B"


class TestForceAlign:
    def test_two_single_char_words_at_known_frames(self, tiny_vocab):
        # A owns frame 1 and B owns frame 3; the delimiter gets no frames of
        # its own, so each word span is exactly its character's frame.
        em = synthesize_emissions(
            "A B",
            tiny_vocab,
            [("A", 0.02, 0.04), ("|", 0.05, 0.05), ("B", 0.06, 0.08)],
            0.02,
            (0.0, 0.1),
        )
        result = force_align(em, tiny_vocab, "A B")
        assert result.feasible
        assert [s.word for s in result.spans] == ["A", "B"]
        assert result.spans[0].start_s == pytest.approx(0.02, abs=1e-6)
        assert result.spans[0].end_s == pytest.approx(0.04, abs=1e-6)
        assert result.spans[1].start_s == pytest.approx(0.06, abs=1e-6)
        assert result.spans[1].end_s == pytest.approx(0.08, abs=1e-6)

    def test_single_word_span_covers_first_to_last_char(self, tiny_vocab):
        em = synthesize_emissions(
            "AB",
            tiny_vocab,
            [("A", 0.02, 0.04), ("B", 0.06, 0.08)],
            0.02,
            (0.0, 0.1),
        )
        result = force_align(em, tiny_vocab, "AB")
        assert [s.word for s in result.spans] == ["AB"]
        assert result.spans[0].start_s == pytest.approx(0.02, abs=1e-6)
        assert result.spans[0].end_s == pytest.approx(0.08, abs=1e-6)

    def test_pigeonhole_infeasibility(self, tiny_vocab):
        em = one_hot_emissions(tiny_vocab, ["A", "B"])
        result = force_align(em, tiny_vocab, "ABC")
        assert not result.feasible
        assert result.spans == ()
        assert result.path_log_score == float("-inf")

    def test_repeat_needs_blank_between(self, tiny_vocab):
        assert min_frames_required(["A", "A"]) == 3
        em = one_hot_emissions(tiny_vocab, ["A", "A"])
        assert not force_align(em, tiny_vocab, "AA").feasible

    def test_single_char_single_frame(self, tiny_vocab):
        em = one_hot_emissions(tiny_vocab, ["A"], abs_start=7.5)
        result = force_align(em, tiny_vocab, "A")
        assert result.feasible
        span = result.spans[0]
        assert span.word == "A"
        assert span.start_s == 7.5
        assert span.end_s == pytest.approx(7.5 + 0.02, abs=1e-6)

    def test_empty_transcript_raises(self, tiny_vocab):
        em = one_hot_emissions(tiny_vocab, ["A"])
        with pytest.raises(EmptyNormalizedTranscript):
            force_align(em, tiny_vocab, "123 !!")

    def test_char_not_in_vocab(self, tiny_vocab):
        em = one_hot_emissions(tiny_vocab, ["A"])
        with pytest.raises(CharNotInVocab):
            force_align(em, tiny_vocab, "Z")

    def test_words_joined_equal_normalized_transcript(self, tiny_vocab):
        text = "CAB BA ACC"
        char_times = []
        cursor = 0.1
        for token in transcript_labels(text):
            char_times.append((token, cursor, cursor + 0.04))
            cursor += 0.08
        em = synthesize_emissions(text, tiny_vocab, char_times, 0.02, (0.0, cursor + 0.1))
        result = force_align(em, tiny_vocab, text)
        assert " ".join(s.word for s in result.spans) == normalize_text(text)
        starts = [s.start_s for s in result.spans]
        assert starts == sorted(starts)
        for left, right in zip(result.spans, result.spans[1:]):
            assert left.end_s <= right.start_s

    def test_deterministic_on_uniform_emissions(self, tiny_vocab):
        probs = np.log(np.full((6, len(tiny_vocab)), 1.0 / len(tiny_vocab)))
        em = EmissionMatrix(log_probs=probs, stride_s=0.02, abs_start_s=0.0)
        first = force_align(em, tiny_vocab, "AB")
        for _ in range(3):
            assert force_align(em, tiny_vocab, "AB") == first


def enumerate_ctc_paths(em: EmissionMatrix, vocab: Vocab, labels: list[str]):
    """Exhaustive enumeration of valid CTC paths; the independent oracle.

    Yields (score, states) for every monotone walk of the blank-interleaved
    sequence that starts in state 0 or 1 and ends in one of the two final
    states, scoring each frame by its state's emission log-probability.
    """
    label_ids = [vocab.index(tok) for tok in labels]
    ext = [vocab.blank_index]
    for lid in label_ids:
        ext += [lid, vocab.blank_index]
    n_states = len(ext)
    frames_t = em.frames_t
    log_probs = em.log_probs.astype(np.float64)
    final_states = {n_states - 1, n_states - 2}
    results = []

    def walk(t, state, score, states):
        score += log_probs[t, ext[state]]
        states.append(state)
        if t == frames_t - 1:
            if state in final_states:
                results.append((score, list(states)))
        else:
            nexts = [state, state + 1]
            if (
                state + 2 < n_states
                and (state + 2) % 2 == 1
                and ext[state + 2] != ext[state]
            ):
                nexts.append(state + 2)
            for nxt in nexts:
                if nxt < n_states:
                    walk(t + 1, nxt, score, states)
        states.pop()

    for start in (0, 1):
        if start < n_states:
            walk(0, start, 0.0, [])
    return results


def random_case(rng, vocab):
    frames_t = int(rng.integers(1, 9))
    raw = rng.random((frames_t, len(vocab))) + 1e-3
    probs = raw / raw.sum(axis=1, keepdims=True)
    em = EmissionMatrix(log_probs=np.log(probs), stride_s=0.02, abs_start_s=0.0)
    length = int(rng.integers(1, 4))
    chars = rng.choice(list("AB "), size=length)
    transcript = normalize_text("".join(chars))
    return em, transcript


class TestOracleEquivalence:
    def test_viterbi_matches_exhaustive_enumeration(self):
        vocab = Vocab(("<blank>", "|", "A", "B"))
        rng = np.random.default_rng(20240817)
        checked = 0
        while checked < 200:
            em, transcript = random_case(rng, vocab)
            if not transcript:
                continue
            labels = transcript_labels(transcript)
            paths = enumerate_ctc_paths(em, vocab, labels)
            got = _viterbi_states(em, vocab, labels)
            if not paths:
                assert got is None
                assert not force_align(em, vocab, transcript).feasible
            else:
                best_score = max(score for score, _ in paths)
                assert got is not None
                states, score = got
                assert score == pytest.approx(best_score, abs=1e-9)
                argmax_paths = [p for s, p in paths if abs(s - best_score) < 1e-9]
                assert states.tolist() in argmax_paths
            checked += 1

    def test_score_is_additive_along_reported_path(self, tiny_vocab):
        rng = np.random.default_rng(7)
        for _ in range(50):
            raw = rng.random((6, len(tiny_vocab))) + 1e-3
            probs = raw / raw.sum(axis=1, keepdims=True)
            em = EmissionMatrix(log_probs=np.log(probs), stride_s=0.02, abs_start_s=0.0)
            labels = transcript_labels("AB")
            states, score = _viterbi_states(em, tiny_vocab, labels)
            ext = [tiny_vocab.blank_index, tiny_vocab.index("A"), tiny_vocab.blank_index,
                   tiny_vocab.index("B"), tiny_vocab.blank_index]
            replayed = sum(
                float(em.log_probs[t, ext[s]]) for t, s in enumerate(states)
            )
            assert math.isclose(replayed, score, abs_tol=1e-9)


class TestDecodeAlignConsistency:
    def test_zero_noise_decode_equals_aligned_transcript(self, tiny_vocab):
        rng = np.random.default_rng(3)
        for _ in range(25):
            n_words = int(rng.integers(1, 4))
            words = [
                "".join(rng.choice(list("ABC"), size=int(rng.integers(1, 5))))
                for _ in range(n_words)
            ]
            text = " ".join(words)
            char_times = []
            cursor = 0.08
            for token in transcript_labels(text):
                char_times.append((token, cursor, cursor + 0.04))
                cursor += 0.08
            em = synthesize_emissions(
                text, tiny_vocab, char_times, 0.02, (0.0, cursor + 0.08)
            )
            assert greedy_decode(em, tiny_vocab) == normalize_text(text)
            result = force_align(em, tiny_vocab, text)
            assert " ".join(s.word for s in result.spans) == normalize_text(text)
