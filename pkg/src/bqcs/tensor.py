"""Dense tensors, seeded generation and the BQT1 file format.

Tensors are plain ``numpy.ndarray`` objects of dtype float64.  Everything
that accepts a tensor runs it through :func:`as_tensor` first, which is where
the finiteness invariant is enforced.

Random generation uses numpy's Philox counter-based bit generator.  The
128-bit Philox key is built from the two 64-bit halves of a :class:`Seed`
(``value`` low, ``stream_id`` high), so every (value, stream_id) pair names
an independent stream.  Gaussian samples come from numpy's ziggurat
transform of that stream.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass
from os import PathLike
from typing import Sequence

import numpy as np

__all__ = [
    "Seed",
    "TensorFormatError",
    "TruncatedTensorError",
    "as_tensor",
    "flatten",
    "random_gaussian",
    "random_uniform01",
    "save_tensor",
    "load_tensor",
]

MASK64 = (1 << 64) - 1
TENSOR_MAGIC = b"BQT1"


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


@dataclass(frozen=True)
class Seed:
    """64-bit seed value plus a sub-stream index."""

    value: int
    stream_id: int = 0

    def __post_init__(self):
        for name in ("value", "stream_id"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or not 0 <= int(v) <= MASK64:
                raise ValueError(f"Seed.{name} must be an unsigned 64-bit integer, got {v!r}")
            object.__setattr__(self, name, int(v))

    def derive(self, label: int) -> "Seed":
        """Child seed for sub-stream ``label``; a pure function of (self, label)."""
        return Seed(self.value, splitmix64(self.stream_id ^ splitmix64(int(label) & MASK64)))

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.Philox(key=self.value | (self.stream_id << 64)))

    def to_list(self) -> list[int]:
        return [self.value, self.stream_id]

    @classmethod
    def coerce(cls, seed) -> "Seed":
        if isinstance(seed, Seed):
            return seed
        if isinstance(seed, (tuple, list)):
            return cls(*seed)
        return cls(int(seed))


def _check_shape(shape: Sequence[int]) -> tuple[int, ...]:
    shape = tuple(int(d) for d in shape)
    if not shape:
        raise ValueError("shape must have at least one dimension")
    if any(d < 1 for d in shape):
        raise ValueError(f"invalid shape {shape}: every dimension must be >= 1")
    return shape


def as_tensor(x) -> np.ndarray:
    """Convert ``x`` to a float64 array, rejecting NaN/Inf and empty input."""
    t = np.asarray(x, dtype=np.float64)
    if t.ndim == 0:
        t = t.reshape(1)
    if t.size == 0:
        raise ValueError("tensor must contain at least one element")
    if not np.all(np.isfinite(t)):
        raise ValueError("tensor contains NaN or Inf")
    return t


def random_gaussian(shape: Sequence[int], seed) -> np.ndarray:
    shape = _check_shape(shape)
    return Seed.coerce(seed).generator().standard_normal(shape)


def random_uniform01(shape: Sequence[int], seed) -> np.ndarray:
    shape = _check_shape(shape)
    return Seed.coerce(seed).generator().random(shape)


def flatten(t) -> np.ndarray:
    """Row-major flattening to a 1-D tensor."""
    return np.ascontiguousarray(as_tensor(t)).reshape(-1)


class TensorFormatError(ValueError):
    """File is not a BQT1 tensor (bad magic or malformed header)."""


class TruncatedTensorError(TensorFormatError):
    """Header dimensions disagree with the payload length."""


def save_tensor(t, path: str | PathLike) -> None:
    t = as_tensor(t)
    if t.ndim > 255:
        raise ValueError("rank must fit in one byte")
    header = TENSOR_MAGIC + struct.pack("<B", t.ndim) + struct.pack(f"<{t.ndim}Q", *t.shape)
    payload = np.ascontiguousarray(t, dtype="<f4").tobytes()
    with open(path, "wb") as fh:
        fh.write(header + payload)


def load_tensor(path: str | PathLike) -> np.ndarray:
    with open(path, "rb") as fh:
        raw = fh.read()
    if raw[:4] != TENSOR_MAGIC:
        raise TensorFormatError(f"{path}: bad magic {raw[:4]!r}, expected {TENSOR_MAGIC!r}")
    if len(raw) < 5:
        raise TruncatedTensorError(f"{path}: missing rank byte")
    rank = raw[4]
    if rank == 0:
        raise TensorFormatError(f"{path}: rank 0 is not allowed")
    end = 5 + 8 * rank
    if len(raw) < end:
        raise TruncatedTensorError(f"{path}: header declares rank {rank} but holds {len(raw) - 5} dim bytes")
    dims = struct.unpack(f"<{rank}Q", raw[5:end])
    if any(d < 1 for d in dims):
        raise TensorFormatError(f"{path}: zero-sized dimension in {dims}")
    n = int(np.prod(dims, dtype=object))
    if len(raw) - end != 4 * n:
        raise TruncatedTensorError(
            f"{path}: dims {dims} need {4 * n} payload bytes, found {len(raw) - end}"
        )
    data = np.frombuffer(raw, dtype="<f4", offset=end).astype(np.float64).reshape(dims)
    if not np.all(np.isfinite(data)):
        raise TensorFormatError(f"{path}: payload contains NaN or Inf")
    return data
