"""Binary quantizers: plain sign and sign of a dithered random projection."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from os import PathLike
from pathlib import Path

import numpy as np

from .bitcode import BitCode, binary_dot, load_code, pack_bits, save_code
from .sensing import SensingEnsemble, gen_ensemble
from .tensor import Seed, flatten

__all__ = [
    "QuantizedLayer",
    "sign_quantize",
    "sign_bits",
    "optimal_scale",
    "qcs_quantize",
    "qcs_bits",
    "quantize_layer",
    "est_similarity",
    "est_inner",
    "inner_from_agreement",
    "sidecar_path",
]


def _strict_flatten(w) -> np.ndarray:
    w = np.asarray(w, dtype=np.float64).reshape(-1)
    if np.isnan(w).any():
        raise ValueError("cannot quantize a tensor containing NaN")
    return flatten(w)


def sign_bits(x) -> np.ndarray:
    """Boolean sign pattern with the tie rule sign(0) = +1."""
    return np.asarray(x) >= 0


def sign_quantize(w) -> BitCode:
    w = _strict_flatten(w)
    return BitCode(w.size, pack_bits(sign_bits(w)))


def optimal_scale(w) -> float:
    """Least-squares α for ``w ≈ α·sign(w)``: the mean absolute value."""
    w = _strict_flatten(w)
    return float(np.mean(np.abs(w)))


def qcs_bits(X, ens: SensingEnsemble) -> np.ndarray:
    """Sign bits of ``Φx + ξ`` for each row ``x`` of ``X`` (or a single vector)."""
    X = np.asarray(X, dtype=np.float64)
    if X.shape[-1] != ens.p:
        raise ValueError(f"input has {X.shape[-1]} entries per vector, ensemble expects p={ens.p}")
    if np.isnan(X).any():
        raise ValueError("cannot quantize a tensor containing NaN")
    return sign_bits(X @ ens.phi.T + ens.dither)


def qcs_quantize(w, ens: SensingEnsemble) -> BitCode:
    w = _strict_flatten(w)
    if w.size != ens.p:
        raise ValueError(f"tensor has {w.size} entries, ensemble expects p={ens.p}")
    return BitCode(ens.m, pack_bits(qcs_bits(w, ens)))


@dataclass(frozen=True)
class QuantizedLayer:
    code: BitCode
    scheme: str
    alpha: float | None
    norm: float
    ensemble_ref: dict | None = None

    def __post_init__(self):
        if self.scheme == "standard":
            if self.ensemble_ref is not None:
                raise ValueError("standard layers carry no ensemble reference")
        elif self.scheme == "qcs":
            if self.ensemble_ref is None:
                raise ValueError("qcs layers need an ensemble reference")
            if self.code.length != self.ensemble_ref["m"]:
                raise ValueError("qcs code length must equal ensemble m")
        else:
            raise ValueError(f"unknown scheme {self.scheme!r}")

    def sidecar(self) -> dict:
        return {"scheme": self.scheme, "alpha": self.alpha, "norm": self.norm, "ensemble_ref": self.ensemble_ref}

    def ensemble(self) -> SensingEnsemble:
        """Regenerate the sensing ensemble this layer was quantized with."""
        if self.ensemble_ref is None:
            raise ValueError("standard layers have no ensemble")
        ref = self.ensemble_ref
        return gen_ensemble(ref["m"], ref["p"], ref["dither_mode"], ref["normalize"], Seed(*ref["seed"]))

    def save(self, path: str | PathLike) -> Path:
        """Write the code file and its JSON sidecar; returns the sidecar path."""
        save_code(self.code, path)
        side = sidecar_path(path)
        side.write_text(json.dumps(self.sidecar(), indent=2, sort_keys=True) + "\n")
        return side

    @classmethod
    def load(cls, path: str | PathLike) -> "QuantizedLayer":
        meta = json.loads(sidecar_path(path).read_text())
        return cls(load_code(path), meta["scheme"], meta["alpha"], meta["norm"], meta["ensemble_ref"])


def sidecar_path(path: str | PathLike) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".json")


def quantize_layer(w, scheme: str, ens: SensingEnsemble | None = None) -> QuantizedLayer:
    w = _strict_flatten(w)
    norm = float(np.linalg.norm(w))
    if scheme == "standard":
        return QuantizedLayer(sign_quantize(w), "standard", optimal_scale(w), norm)
    if scheme == "qcs":
        if ens is None:
            raise ValueError("the qcs scheme needs a sensing ensemble")
        if ens.seed is None:
            raise ValueError("qcs layers need a seeded (regenerable) ensemble")
        return QuantizedLayer(qcs_quantize(w, ens), "qcs", None, norm, ens.ref())
    raise ValueError(f"unknown scheme {scheme!r}")


def est_similarity(a: BitCode, b: BitCode) -> float:
    """Normalized code agreement ``binary_dot(a, b) / length`` in [-1, 1]."""
    return binary_dot(a, b) / a.length


def inner_from_agreement(s, norm_a, norm_b):
    """Vectorized core of :func:`est_inner`.

    For shared Gaussian hyperplanes, E[s] = 1 - 2θ/π, so θ̂ = (π/2)(1 - s).
    """
    s = np.asarray(s, dtype=np.float64)
    theta = np.clip(0.5 * np.pi * (1.0 - s), 0.0, np.pi)
    # cos(π/2) is not exactly zero in floating point
    cos = np.where(s == 0.0, 0.0, np.cos(theta))
    return np.asarray(norm_a) * np.asarray(norm_b) * cos


def est_inner(a: BitCode, b: BitCode, norm_a: float, norm_b: float) -> float:
    if norm_a < 0 or norm_b < 0:
        raise ValueError("norms must be non-negative")
    return float(inner_from_agreement(est_similarity(a, b), norm_a, norm_b))


def angle_between(x, y) -> float:
    x, y = flatten(x), flatten(y)
    c = float(x @ y) / (np.linalg.norm(x) * np.linalg.norm(y))
    return math.acos(min(1.0, max(-1.0, c)))
