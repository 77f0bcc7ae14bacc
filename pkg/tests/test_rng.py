"""The generator contract matters: sampling, corruption, and bootstrap
reproducibility all hang off these exact sequences."""

from alignqc.rng import SplitMix64, derive

MASK = (1 << 64) - 1


def reference_splitmix64(state: int, count: int) -> list[int]:
    """Straight transliteration of the published splitmix64 reference."""
    out = []
    for _ in range(count):
        state = (state + 0x9E3779B97F4A7C15) & MASK
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
        out.append(z ^ (z >> 31))
    return out


def test_matches_reference_sequence():
    for seed in (0, 1, 42, 0xDEADBEEF, (1 << 64) - 1):
        rng = SplitMix64(seed)
        assert [rng.next_u64() for _ in range(20)] == reference_splitmix64(seed, 20)


def test_known_first_output_for_seed_zero():
    # frozen from the reference recurrence above
    assert SplitMix64(0).next_u64() == 16294208416658607535


def test_floats_in_unit_interval_and_plausibly_uniform():
    rng = SplitMix64(7)
    values = [rng.next_float() for _ in range(2000)]
    assert all(0.0 <= v < 1.0 for v in values)
    assert abs(sum(values) / len(values) - 0.5) < 0.02


def test_next_below_bounds_and_determinism():
    rng1, rng2 = SplitMix64(5), SplitMix64(5)
    draws1 = [rng1.next_below(13) for _ in range(500)]
    draws2 = [rng2.next_below(13) for _ in range(500)]
    assert draws1 == draws2
    assert set(draws1) <= set(range(13))


def test_derive_is_indexed_access_into_the_stream():
    rng = SplitMix64(99)
    stream = [rng.next_u64() for _ in range(10)]
    assert [derive(99, k) for k in range(10)] == stream
