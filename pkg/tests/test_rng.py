import numpy as np
from hypothesis import given, settings, strategies as st

from minkdiff.rng import SplitMix64


def test_reference_stream_seed_zero():
    r = SplitMix64(0)
    assert r.next_u64() == 0xE220A8397B1DCDAF
    assert r.next_u64() == 0x6E789E6AA1B965F4


def test_reference_stream_seed_1234567():
    r = SplitMix64(1234567)
    assert [r.next_u64() for _ in range(3)] == [
        6457827717110365317, 3203168211198807973, 9817491932198370423]


@given(st.integers(min_value=0, max_value=2**64 - 1))
@settings(max_examples=50)
def test_same_seed_same_stream(seed):
    a, b = SplitMix64(seed), SplitMix64(seed)
    assert [a.next_u64() for _ in range(4)] == [b.next_u64() for _ in range(4)]


@given(st.integers(min_value=0, max_value=2**32))
@settings(max_examples=30)
def test_uniform_in_unit_interval(seed):
    x = SplitMix64(seed).random(64)
    assert np.all((x >= 0) & (x < 1))


def test_integers_within_range():
    r = SplitMix64(5)
    vals = [r.integers(3, 9) for _ in range(500)]
    assert min(vals) == 3 and max(vals) == 8


def test_unit_vectors_are_unit_and_spread():
    v = SplitMix64(11).unit_vectors(2000)
    assert np.allclose(np.linalg.norm(v, axis=1), 1.0)
    # mean of uniform directions is near zero
    assert np.linalg.norm(v.mean(axis=0)) < 0.08
