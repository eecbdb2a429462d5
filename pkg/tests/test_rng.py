import numpy as np
import pytest

from benfrag.rng import RngSpec, mix64, uniform_at, uniform_block


def test_same_spec_same_sequence():
    a = uniform_block(RngSpec(42, 7), 0, 100)
    b = uniform_block(RngSpec(42, 7), 0, 100)
    assert np.array_equal(a, b)


def test_blocks_compose_to_one_stream():
    spec = RngSpec(123, 5)
    whole = uniform_block(spec, 0, 64)
    parts = np.concatenate([uniform_block(spec, off, 7) for off in range(0, 63, 7)])
    assert np.array_equal(whole[:63], parts)


def test_offset_is_random_access():
    spec = RngSpec(9, 1)
    whole = uniform_block(spec, 0, 50)
    for off in (0, 1, 3, 4, 17, 49):
        assert uniform_block(spec, off, 1)[0] == whole[off]


def test_uniform_at_matches_block():
    spec = RngSpec(5, 2)
    whole = uniform_block(spec, 0, 30)
    idx = np.array([0, 3, 29, 11])
    assert np.array_equal(uniform_at(spec, idx), whole[idx])


def test_different_streams_differ():
    a = uniform_block(RngSpec(1, 0), 0, 16)
    b = uniform_block(RngSpec(1, 1), 0, 16)
    c = uniform_block(RngSpec(2, 0), 0, 16)
    assert not np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_derive_gives_disjoint_streams():
    spec = RngSpec(42, 0)
    seen = {uniform_block(spec.derive(i), 0, 4).tobytes() for i in range(64)}
    assert len(seen) == 64
    assert spec.derive(3) == spec.derive(3)


def test_mix64_is_bijective_on_samples():
    values = [mix64(i) for i in range(1000)]
    assert len(set(values)) == 1000


@pytest.mark.parametrize("seed,stream", [(-1, 0), (0, -1), (2 ** 64, 0)])
def test_spec_rejects_out_of_range(seed, stream):
    with pytest.raises(ValueError):
        RngSpec(seed, stream)


def test_block_argument_validation():
    with pytest.raises(ValueError):
        uniform_block(RngSpec(1), -1, 4)
    with pytest.raises(ValueError):
        uniform_block(RngSpec(1), 0, -4)
    assert uniform_block(RngSpec(1), 0, 0).size == 0
