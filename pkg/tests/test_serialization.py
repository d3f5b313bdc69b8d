import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import ttbeam as tb
from ttbeam.errors import RankChainError

from conftest import random_small_tt


def bit_equal(a: tb.TTTensor, b: tb.TTTensor) -> bool:
    return a.shape == b.shape and all(
        np.array_equal(x, y) for x, y in zip(a.cores, b.cores)
    )


def test_round_trip_bit_exact():
    t = tb.tt_random((5, 6, 7), 3, seed=0)
    assert bit_equal(t, tb.deserialize(tb.serialize(t)))


def test_round_trip_preserves_special_values():
    core = np.array([[[-0.0], [1e-300], [1e300]]])
    t = tb.TTTensor([core])
    t2 = tb.deserialize(tb.serialize(t))
    assert t2.cores[0].tobytes() == t.cores[0].tobytes()


def test_file_round_trip(tmp_path):
    t = tb.tt_random((4, 4, 4), 2, seed=1)
    path = tmp_path / "t.ttv"
    tb.save(t, path)
    assert bit_equal(t, tb.load(path))


def test_empty_input_rejected():
    with pytest.raises(ValueError, match="truncated header"):
        tb.deserialize(b"")


def test_bad_magic_rejected():
    with pytest.raises(ValueError, match="bad magic"):
        tb.deserialize(b"NOPE" + b"\x00" * 16)


def test_truncated_payload_names_core():
    data = tb.serialize(tb.tt_random((3, 3), 2, seed=2))
    with pytest.raises(ValueError, match="core 2"):
        tb.deserialize(data[:-8])


def test_trailing_bytes_rejected():
    data = tb.serialize(tb.tt_const((2, 2), 1.0))
    with pytest.raises(ValueError, match="trailing"):
        tb.deserialize(data + b"\x00")


def test_broken_rank_chain_rejected():
    # hand-build a header whose boundary rank is wrong
    header = b"TTV1" + struct.pack("<I", 1)
    header += struct.pack("<1Q", 3)
    header += struct.pack("<2Q", 2, 1)
    header += b"\x00" * (2 * 3 * 8)
    with pytest.raises(RankChainError, match="r_0=2"):
        tb.deserialize(header)


def test_zero_rank_rejected():
    header = b"TTV1" + struct.pack("<I", 2)
    header += struct.pack("<2Q", 3, 3)
    header += struct.pack("<3Q", 1, 0, 1)
    with pytest.raises(RankChainError, match="r_1"):
        tb.deserialize(header)


def test_json_round_trip():
    t = tb.tt_random((3, 4, 5), 2, seed=3)
    assert bit_equal(t, tb.from_json(tb.to_json(t)))


def test_json_shape_mismatch_names_core():
    t = tb.tt_const((2, 2), 1.0)
    doc = tb.to_json(t)
    broken = doc.replace('"d": 2', '"d": 2').replace("[[[1.0", "[[[1.0, 1.0")
    with pytest.raises((RankChainError, ValueError)):
        tb.from_json(broken)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_round_trip_property(seed):
    rng = np.random.default_rng(seed)
    t = random_small_tt(rng, max_d=4, max_n=5, max_r=3, max_elems=1000)
    assert bit_equal(t, tb.deserialize(tb.serialize(t)))
    assert bit_equal(t, tb.from_json(tb.to_json(t)))
