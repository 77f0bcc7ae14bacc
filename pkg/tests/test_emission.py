import numpy as np
import pytest

from alignqc.emission import (
    EmissionMatrix,
    Vocab,
    load_emission,
    save_emission,
    synthesize_emissions,
)
from alignqc.errors import BadMagic, CharNotInVocab, DimensionOverflow, TruncatedFile


def normalized_matrix(rng, frames, vocab_size) -> EmissionMatrix:
    raw = rng.random((frames, vocab_size)) + 1e-3
    probs = raw / raw.sum(axis=1, keepdims=True)
    return EmissionMatrix(
        log_probs=np.log(probs), stride_s=0.02, abs_start_s=rng.random() * 5
    )


def matrices_equal(a: EmissionMatrix, b: EmissionMatrix) -> bool:
    return (
        np.array_equal(a.log_probs, b.log_probs)
        and a.stride_s == b.stride_s
        and a.abs_start_s == b.abs_start_s
    )


class TestFileFormat:
    def test_round_trip_bit_exact(self, tmp_path):
        rng = np.random.default_rng(0)
        em = normalized_matrix(rng, 3, 4)
        save_emission(em, tmp_path / "m.emit")
        assert matrices_equal(load_emission(tmp_path / "m.emit"), em)

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "x.emit"
        path.write_bytes(b"XXXX" + b"\x00" * 64)
        with pytest.raises(BadMagic):
            load_emission(path)

    def test_truncated_payload(self, tmp_path):
        rng = np.random.default_rng(1)
        path = tmp_path / "t.emit"
        save_emission(normalized_matrix(rng, 10, 5), path)
        data = path.read_bytes()
        path.write_bytes(data[: len(data) - 40])
        with pytest.raises(TruncatedFile):
            load_emission(path)

    def test_header_dimension_overflow(self, tmp_path):
        rng = np.random.default_rng(2)
        path = tmp_path / "d.emit"
        save_emission(normalized_matrix(rng, 2, 3), path)
        data = bytearray(path.read_bytes())
        data[8:12] = (0).to_bytes(4, "little")  # T = 0
        path.write_bytes(bytes(data))
        with pytest.raises(DimensionOverflow):
            load_emission(path)

    def test_unsupported_version(self, tmp_path):
        rng = np.random.default_rng(3)
        path = tmp_path / "v.emit"
        save_emission(normalized_matrix(rng, 2, 3), path)
        data = bytearray(path.read_bytes())
        data[4:8] = (9).to_bytes(4, "little")
        path.write_bytes(bytes(data))
        with pytest.raises(BadMagic):
            load_emission(path)


class TestVocab:
    def test_save_load_round_trip(self, tmp_path):
        vocab = Vocab(("<blank>", "|", "'", "A", "B"))
        vocab.save(tmp_path / "vocab.txt")
        assert Vocab.load(tmp_path / "vocab.txt") == vocab

    def test_unknown_token_raises(self, tiny_vocab):
        with pytest.raises(CharNotInVocab):
            tiny_vocab.index("Z")

    def test_needs_blank_plus_symbol(self):
        with pytest.raises(ValueError):
            Vocab(("<blank>",))

    def test_duplicate_tokens_rejected(self):
        with pytest.raises(ValueError):
            Vocab(("<blank>", "A", "A"))


class TestMatrixInvariants:
    def test_rows_must_normalize(self):
        with pytest.raises(ValueError):
            EmissionMatrix(
                log_probs=np.zeros((2, 3)), stride_s=0.02, abs_start_s=0.0
            )

    def test_needs_two_tokens(self):
        with pytest.raises(ValueError):
            EmissionMatrix(
                log_probs=np.zeros((2, 1)), stride_s=0.02, abs_start_s=0.0
            )

    def test_stride_is_float32_precision(self):
        em = EmissionMatrix(
            log_probs=np.log(np.full((1, 2), 0.5)), stride_s=0.02, abs_start_s=0.0
        )
        assert em.stride_s == float(np.float32(0.02))


class TestSynthesize:
    def test_single_char_one_hot_frames(self, tiny_vocab):
        em = synthesize_emissions(
            "A", tiny_vocab, [("A", 0.02, 0.04)], 0.02, (0.0, 0.1)
        )
        assert em.frames_t == 5
        assert em.vocab_v == len(tiny_vocab)
        favored = em.log_probs.argmax(axis=1)
        assert favored.tolist() == [0, tiny_vocab.index("A"), 0, 0, 0]
        assert em.log_probs[1, tiny_vocab.index("A")] == 0.0
        assert em.abs_start_s == 0.0

    def test_empty_transcript_is_all_blank(self, tiny_vocab):
        em = synthesize_emissions("", tiny_vocab, [], 0.02, (0.0, 0.2))
        assert np.all(em.log_probs.argmax(axis=1) == tiny_vocab.blank_index)

    def test_same_seed_identical(self, tiny_vocab):
        args = ("AB", tiny_vocab, [("A", 0.0, 0.05), ("B", 0.1, 0.15)], 0.02, (0.0, 0.3))
        em1 = synthesize_emissions(*args, noise_eps=0.3, seed=5)
        em2 = synthesize_emissions(*args, noise_eps=0.3, seed=5)
        assert matrices_equal(em1, em2)

    def test_different_seed_differs(self, tiny_vocab):
        char_times = [(c, 0.1 * i, 0.1 * i + 0.06) for i, c in enumerate("ABCABC")]
        args = ("ABCABC", tiny_vocab, char_times, 0.02, (0.0, 0.8))
        em1 = synthesize_emissions(*args, noise_eps=0.5, seed=1)
        em2 = synthesize_emissions(*args, noise_eps=0.5, seed=2)
        assert not matrices_equal(em1, em2)

    def test_rows_normalized_with_and_without_noise(self, tiny_vocab):
        for eps in (0.0, 0.2, 0.7):
            em = synthesize_emissions(
                "AB", tiny_vocab, [("A", 0.0, 0.05), ("B", 0.1, 0.15)],
                0.02, (0.0, 0.3), noise_eps=eps, seed=3,
            )
            lse = np.logaddexp.reduce(em.log_probs.astype(np.float64), axis=1)
            assert np.abs(lse).max() < 1e-3

    def test_char_outside_vocab(self, tiny_vocab):
        with pytest.raises(CharNotInVocab):
            synthesize_emissions("AZ", tiny_vocab, [("A", 0, 0.1), ("Z", 0.2, 0.3)], 0.02, (0, 0.4))

    def test_char_times_must_match_transcript(self, tiny_vocab):
        with pytest.raises(ValueError):
            synthesize_emissions("AB", tiny_vocab, [("A", 0, 0.1)], 0.02, (0, 0.4))

    def test_plain_space_accepted_for_delimiter(self, tiny_vocab):
        em = synthesize_emissions(
            "A B",
            tiny_vocab,
            [("A", 0.0, 0.04), (" ", 0.06, 0.1), ("B", 0.12, 0.16)],
            0.02,
            (0.0, 0.2),
        )
        favored = [tiny_vocab.tokens[i] for i in em.log_probs.argmax(axis=1)]
        assert favored[3] == "|"
