"""Packed ±1 codes and XOR/popcount kernels.

Layout: entry ``i`` lives in word ``i // 64`` at bit ``i % 64`` (LSB first),
+1 is stored as a set bit and -1 as a clear bit.  Bits past ``length`` in the
last word are always zero, so two codes are equal iff their words are.
"""
from __future__ import annotations

import struct
from os import PathLike

import numpy as np

__all__ = [
    "BitCode",
    "CodeFormatError",
    "pack",
    "pack_bits",
    "pack_rows",
    "unpack",
    "complement",
    "binary_dot",
    "hamming",
    "dot_rows",
    "memory_bits",
    "save_code",
    "load_code",
]

CODE_MAGIC = b"BQC1"


def n_words(p: int) -> int:
    return (p + 63) // 64


def _tail_mask(p: int) -> np.uint64:
    r = p % 64
    return np.uint64(0xFFFFFFFFFFFFFFFF) if r == 0 else np.uint64((1 << r) - 1)


class BitCode:
    """Immutable packed ±1 vector."""

    __slots__ = ("length", "words")

    def __init__(self, length: int, words):
        length = int(length)
        if length < 1:
            raise ValueError("BitCode length must be >= 1")
        w = np.array(words, dtype=np.uint64).reshape(-1)
        if w.size != n_words(length):
            raise ValueError(f"length {length} needs {n_words(length)} words, got {w.size}")
        if w[-1] & ~_tail_mask(length):
            raise ValueError("non-canonical BitCode: tail bits beyond length are set")
        w.flags.writeable = False
        object.__setattr__(self, "length", length)
        object.__setattr__(self, "words", w)

    def __setattr__(self, name, value):
        raise AttributeError("BitCode is immutable")

    def __eq__(self, other):
        if not isinstance(other, BitCode):
            return NotImplemented
        return self.length == other.length and np.array_equal(self.words, other.words)

    def __hash__(self):
        return hash((self.length, self.words.tobytes()))

    def __len__(self):
        return self.length

    def __repr__(self):
        return f"BitCode(length={self.length}, words=[{', '.join(hex(int(x)) for x in self.words[:4])}{', ...' if self.words.size > 4 else ''}])"


def pack_bits(bits) -> np.ndarray:
    """Pack a boolean array along its last axis into little-endian uint64 words.

    Returns shape ``bits.shape[:-1] + (ceil(p/64),)``.  Tails are zero.
    """
    bits = np.asarray(bits, dtype=bool)
    p = bits.shape[-1]
    nw = n_words(p)
    pad = nw * 64 - p
    if pad:
        bits = np.concatenate([bits, np.zeros(bits.shape[:-1] + (pad,), dtype=bool)], axis=-1)
    packed = np.packbits(bits, axis=-1, bitorder="little")
    return np.ascontiguousarray(packed).view("<u8").astype(np.uint64, copy=False)


def pack(signs) -> BitCode:
    s = np.asarray(signs).reshape(-1)
    if s.size == 0:
        raise ValueError("cannot pack an empty sign vector")
    pos = s == 1
    if not np.all(pos | (s == -1)):
        raise ValueError("pack expects every entry to be exactly +1 or -1")
    return BitCode(s.size, pack_bits(pos))


def pack_rows(bits) -> np.ndarray:
    """Pack a 2-D boolean matrix row by row; see :func:`pack_bits`."""
    bits = np.asarray(bits, dtype=bool)
    if bits.ndim != 2:
        raise ValueError("pack_rows expects a 2-D array")
    return pack_bits(bits)


def unpack(code: BitCode) -> np.ndarray:
    raw = np.ascontiguousarray(code.words, dtype="<u8").view(np.uint8)
    bits = np.unpackbits(raw, bitorder="little")[: code.length]
    return bits.astype(np.int8) * 2 - 1


def complement(code: BitCode) -> BitCode:
    w = ~code.words
    w[-1] &= _tail_mask(code.length)
    return BitCode(code.length, w)


def _check_pair(a: BitCode, b: BitCode):
    if a.length != b.length:
        raise ValueError(f"code length mismatch: {a.length} vs {b.length}")


def hamming(a: BitCode, b: BitCode) -> int:
    _check_pair(a, b)
    return int(np.bitwise_count(a.words ^ b.words).sum(dtype=np.int64))


def binary_dot(a: BitCode, b: BitCode) -> int:
    """Exact ±1 inner product, ``p - 2 * popcount(a XOR b)``."""
    return a.length - 2 * hamming(a, b)


def dot_rows(rows: np.ndarray, code: BitCode) -> np.ndarray:
    """Binary dot of every packed row in ``rows`` against ``code``.

    ``rows`` comes from :func:`pack_rows` on sign bits of length ``code.length``.
    """
    rows = np.asarray(rows, dtype=np.uint64)
    if rows.ndim != 2 or rows.shape[1] != code.words.size:
        raise ValueError(f"rows must have shape (n, {code.words.size}), got {rows.shape}")
    ham = np.bitwise_count(rows ^ code.words).sum(axis=1, dtype=np.int64)
    return code.length - 2 * ham


def memory_bits(code: BitCode) -> int:
    """Payload size in bits, one per entry, container overhead excluded."""
    return code.length


class CodeFormatError(ValueError):
    pass


def save_code(code: BitCode, path: str | PathLike) -> None:
    with open(path, "wb") as fh:
        fh.write(CODE_MAGIC + struct.pack("<Q", code.length) + code.words.astype("<u8").tobytes())


def load_code(path: str | PathLike) -> BitCode:
    with open(path, "rb") as fh:
        raw = fh.read()
    if raw[:4] != CODE_MAGIC:
        raise CodeFormatError(f"{path}: bad magic {raw[:4]!r}, expected {CODE_MAGIC!r}")
    if len(raw) < 12:
        raise CodeFormatError(f"{path}: truncated header")
    (p,) = struct.unpack("<Q", raw[4:12])
    if p < 1:
        raise CodeFormatError(f"{path}: code length must be >= 1")
    need = 8 * n_words(p)
    if len(raw) - 12 != need:
        raise CodeFormatError(f"{path}: length {p} needs {need} payload bytes, found {len(raw) - 12}")
    words = np.frombuffer(raw, dtype="<u8", offset=12).astype(np.uint64)
    try:
        return BitCode(p, words)
    except ValueError as exc:
        raise CodeFormatError(f"{path}: {exc}") from None
