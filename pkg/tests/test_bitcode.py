import numpy as np
import pytest
from hypothesis import given, strategies as st

from bqcs.bitcode import (
    BitCode,
    CodeFormatError,
    binary_dot,
    complement,
    dot_rows,
    hamming,
    load_code,
    memory_bits,
    pack,
    pack_rows,
    save_code,
    unpack,
)

LENGTHS = list(range(1, 201)) + [1023, 1024, 1025]

signs = st.lists(st.sampled_from([-1, 1]), min_size=1, max_size=300)


def brute_dot(x, y):
    return sum(int(a) * int(b) for a, b in zip(x, y))


def test_pack_examples():
    c = pack([1, -1, 1])
    assert c.length == 3 and c.words.tolist() == [5]
    assert pack([1] * 64).words.tolist() == [0xFFFFFFFFFFFFFFFF]
    c = pack([-1] * 65)
    assert c.words.tolist() == [0, 0]


def test_pack_rejects_non_signs():
    with pytest.raises(ValueError):
        pack([1, 0, -1])
    with pytest.raises(ValueError):
        pack([1, 2])
    with pytest.raises(ValueError):
        pack([])


def test_unpack_single_bits():
    assert unpack(BitCode(1, [1])).tolist() == [1]
    assert unpack(BitCode(1, [0])).tolist() == [-1]


def test_non_canonical_rejected():
    with pytest.raises(ValueError):
        BitCode(3, [0b1000])


def test_round_trip_1000_vectors(rng):
    for i in range(1000):
        n = LENGTHS[i % len(LENGTHS)]
        x = rng.choice([-1, 1], size=n)
        assert np.array_equal(unpack(pack(x)), x)


@given(signs)
def test_round_trip_property(x):
    c = pack(x)
    assert unpack(c).tolist() == x
    tail = c.length % 64
    if tail:
        assert int(c.words[-1]) >> tail == 0


def test_dot_identical_and_antipodal(rng):
    a = pack(rng.choice([-1, 1], size=100))
    assert binary_dot(a, a) == 100
    assert binary_dot(a, complement(a)) == -100


def test_dot_and_hamming_match_brute_force(rng):
    for n in LENGTHS:
        x, y = rng.choice([-1, 1], size=(2, n))
        a, b = pack(x), pack(y)
        assert binary_dot(a, b) == brute_dot(x, y)
        assert hamming(a, b) == sum(int(u != v) for u, v in zip(x, y))


def test_hamming_example():
    assert hamming(pack([1, -1, 1]), pack([1, 1, 1])) == 1
    a = pack([1, -1])
    assert hamming(a, a) == 0


@given(st.integers(1, 300).flatmap(lambda n: st.tuples(
    st.lists(st.sampled_from([-1, 1]), min_size=n, max_size=n),
    st.lists(st.sampled_from([-1, 1]), min_size=n, max_size=n))))
def test_dot_hamming_identity(pair):
    a, b = pack(pair[0]), pack(pair[1])
    p = a.length
    assert binary_dot(a, b) == p - 2 * hamming(a, b)
    assert binary_dot(a, b) == binary_dot(b, a)
    assert binary_dot(a, a) == p
    assert (binary_dot(a, b) - p) % 2 == 0


def test_length_mismatch():
    with pytest.raises(ValueError):
        binary_dot(pack([1, 1]), pack([1, 1, 1]))
    with pytest.raises(ValueError):
        hamming(pack([1]), pack([1, 1]))


@given(signs)
def test_complement_is_canonical(x):
    c = complement(pack(x))
    assert unpack(c).tolist() == [-v for v in x]
    assert complement(c) == pack(x)


def test_dot_rows_matches_single(rng):
    for n in (1, 9, 64, 65, 130):
        X = rng.choice([-1, 1], size=(7, n))
        w = pack(rng.choice([-1, 1], size=n))
        got = dot_rows(pack_rows(X > 0), w)
        assert got.tolist() == [binary_dot(pack(row), w) for row in X]


def test_memory_bits():
    assert memory_bits(pack([1] * 256)) == 256
    assert memory_bits(pack([1])) == 1
    for p in (1, 63, 64, 65, 4096):
        assert p * 32 / memory_bits(pack([1] * p)) == 32.0


def test_equality_and_hash():
    a, b = pack([1, -1, 1]), pack([1, -1, 1])
    assert a == b and hash(a) == hash(b)
    assert a != pack([1, 1, 1])
    with pytest.raises(AttributeError):
        a.length = 4


@given(signs)
def test_code_file_round_trip(tmp_path_factory, x):
    path = tmp_path_factory.mktemp("c") / "c.bqc"
    c = pack(x)
    save_code(c, path)
    raw = path.read_bytes()
    assert raw[:4] == b"BQC1"
    assert int.from_bytes(raw[4:12], "little") == len(x)
    assert load_code(path) == c


def test_code_file_errors(tmp_path):
    path = tmp_path / "c.bqc"
    path.write_bytes(b"NOPE" + bytes(16))
    with pytest.raises(CodeFormatError, match="magic"):
        load_code(path)
    save_code(pack([1] * 70), path)
    path.write_bytes(path.read_bytes()[:-8])
    with pytest.raises(CodeFormatError):
        load_code(path)
    path.write_bytes(b"BQC1" + (3).to_bytes(8, "little") + (0xFF).to_bytes(8, "little"))
    with pytest.raises(CodeFormatError, match="tail"):
        load_code(path)
