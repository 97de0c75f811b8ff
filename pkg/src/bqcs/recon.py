"""Projected back-projection decoding of one-bit QCS codes."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bitcode import BitCode, unpack
from .quantize import qcs_quantize
from .sensing import SensingEnsemble, gen_ensemble
from .tensor import Seed, flatten

__all__ = [
    "ReconResult",
    "hard_threshold",
    "pbp_reconstruct",
    "recon_error_sweep",
    "cosine_similarity",
    "aligned_l2_error",
    "sparse_signal",
]


@dataclass(frozen=True, eq=False)
class ReconResult:
    w_hat: np.ndarray
    cosine_similarity: float | None
    l2_error: float | None
    m_over_p: float
    k: int
    m: int = 0
    seed: Seed | None = None


def hard_threshold(x, k: int) -> np.ndarray:
    """Keep the ``k`` largest-magnitude entries; ties go to the lower index."""
    x = flatten(x)
    if not 1 <= k <= x.size:
        raise ValueError(f"need 1 <= k <= p, got k={k}, p={x.size}")
    keep = np.argsort(-np.abs(x), kind="stable")[:k]
    out = np.zeros_like(x)
    out[keep] = x[keep]
    return out


def cosine_similarity(a, b) -> float:
    a, b = flatten(a), flatten(b)
    den = np.linalg.norm(a) * np.linalg.norm(b)
    if den == 0:
        return 0.0
    return float(np.clip(a @ b / den, -1.0, 1.0))


def aligned_l2_error(w_hat, w) -> float:
    """min over c of ‖c·ŵ − w‖ / ‖w‖."""
    w_hat, w = flatten(w_hat), flatten(w)
    nw = np.linalg.norm(w)
    hh = w_hat @ w_hat
    if hh == 0:
        return 1.0
    c = (w_hat @ w) / hh
    return float(np.linalg.norm(c * w_hat - w) / nw)


def pbp_reconstruct(code: BitCode, ens: SensingEnsemble, k: int, norm_hint: float, truth=None) -> ReconResult:
    """ŵ = H_k(λ·Φᵀq) with λ = √(π/2)·norm_hint/m on the N(0,1)-entry scale of Φ.

    For Gaussian rows, E[Φᵀ sign(Φw)] = m·√(2/π)·w/‖w‖, so λ makes the
    back-projection an unbiased estimate of ``w`` before thresholding.
    """
    if ens.dithered or ens.dither_mode.kind != "none":
        raise NotImplementedError("decoding dithered codes is not supported; use dither_mode='none'")
    if code.length != ens.m:
        raise ValueError(f"code length {code.length} does not match ensemble m={ens.m}")
    if not 1 <= k <= ens.p:
        raise ValueError(f"need 1 <= k <= p, got k={k}")
    if not norm_hint > 0:
        raise ValueError("norm_hint must be > 0")
    phi = ens.phi * math.sqrt(ens.m) if ens.normalize else ens.phi
    lam = math.sqrt(math.pi / 2) * norm_hint / ens.m
    w_hat = hard_threshold(lam * (phi.T @ unpack(code)), k)
    cos = l2 = None
    if truth is not None:
        cos = cosine_similarity(w_hat, truth)
        l2 = aligned_l2_error(w_hat, truth)
    return ReconResult(w_hat, cos, l2, ens.m / ens.p, k, ens.m, ens.seed)


def sparse_signal(p: int, k: int, seed, amplitudes: str = "gaussian") -> np.ndarray:
    """Unit-norm k-sparse vector on a uniformly random support.

    ``gaussian`` draws N(0,1) values; ``rademacher`` uses equal magnitudes
    with random signs, so no support entry is arbitrarily small.
    """
    if not 1 <= k <= p:
        raise ValueError(f"need 1 <= k <= p, got k={k}, p={p}")
    rng = Seed.coerce(seed).generator()
    support = rng.choice(p, size=k, replace=False)
    if amplitudes == "gaussian":
        vals = rng.standard_normal(k)
    elif amplitudes == "rademacher":
        vals = rng.choice([-1.0, 1.0], size=k)
    else:
        raise ValueError(f"unknown amplitude law {amplitudes!r}")
    w = np.zeros(p)
    w[support] = vals
    return w / np.linalg.norm(w)


def recon_error_sweep(w, k: int, m_list, seeds) -> list[ReconResult]:
    """One dither-free reconstruction per (m, seed); ensembles seeded by (seed, m)."""
    w = flatten(w)
    m_list = [int(m) for m in m_list]
    if not m_list:
        raise ValueError("m_list must be non-empty")
    if m_list != sorted(m_list):
        raise ValueError("m_list must be ascending")
    norm = float(np.linalg.norm(w))
    results = []
    for m in m_list:
        for s in seeds:
            ens = gen_ensemble(m, w.size, "none", False, Seed.coerce(s).derive(m))
            results.append(pbp_reconstruct(qcs_quantize(w, ens), ens, k, norm, truth=w))
    return results
