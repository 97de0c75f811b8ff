"""Gaussian sensing ensembles and empirical RIP probing."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .tensor import Seed, flatten

__all__ = [
    "DitherMode",
    "SensingEnsemble",
    "RipEstimate",
    "gen_ensemble",
    "identity_ensemble",
    "measure",
    "sparse_probes",
    "probe_deltas",
    "rip_probe",
    "rip_constant_exhaustive",
]

_PHI_STREAM = 1
_DITHER_STREAM = 2
_PROBE_STREAM = 3


@dataclass(frozen=True)
class DitherMode:
    """``none``, ``uniform01`` (U[0,1)) or ``scaled`` (U[0,delta))."""

    kind: str = "uniform01"
    delta: float = 1.0

    def __post_init__(self):
        if self.kind not in ("none", "uniform01", "scaled"):
            raise ValueError(f"unknown dither mode {self.kind!r}")
        if self.kind == "scaled":
            if not math.isfinite(self.delta) or self.delta < 0:
                raise ValueError(f"scaled dither needs a finite delta >= 0, got {self.delta}")
        else:
            object.__setattr__(self, "delta", 0.0 if self.kind == "none" else 1.0)

    @classmethod
    def parse(cls, text) -> "DitherMode":
        """Accepts ``none``, ``uniform01``, ``scaled:<delta>`` or a DitherMode."""
        if isinstance(text, DitherMode):
            return text
        text = str(text).strip()
        if text.startswith("scaled"):
            _, _, num = text.partition(":")
            if not num:
                raise ValueError("scaled dither needs a width, e.g. 'scaled:0.5'")
            return cls("scaled", float(num))
        return cls(text)

    def __str__(self):
        return f"scaled:{self.delta:g}" if self.kind == "scaled" else self.kind


@dataclass(frozen=True, eq=False)
class SensingEnsemble:
    m: int
    p: int
    phi: np.ndarray = field(repr=False)
    dither: np.ndarray = field(repr=False)
    dither_mode: DitherMode
    normalize: bool
    seed: Seed | None

    def __post_init__(self):
        if self.phi.shape != (self.m, self.p) or self.dither.shape != (self.m,):
            raise ValueError("ensemble arrays do not match (m, p)")
        if not (np.all(np.isfinite(self.phi)) and np.all(np.isfinite(self.dither))):
            raise ValueError("ensemble contains non-finite entries")
        if self.dither_mode.kind == "none" and np.any(self.dither):
            raise ValueError("dither_mode none requires an all-zero dither")
        self.phi.flags.writeable = False
        self.dither.flags.writeable = False

    @property
    def dithered(self) -> bool:
        return bool(np.any(self.dither))

    def ref(self) -> dict:
        """Regeneration tuple recorded in sidecars and reports."""
        return {
            "m": self.m,
            "p": self.p,
            "dither_mode": str(self.dither_mode),
            "normalize": self.normalize,
            "seed": None if self.seed is None else self.seed.to_list(),
        }


@dataclass(frozen=True)
class RipEstimate:
    k: int
    delta_hat: float
    trials: int
    seed: Seed


def gen_ensemble(m: int, p: int, dither_mode="uniform01", normalize: bool = False, seed=0) -> SensingEnsemble:
    """Draw Φ with i.i.d. N(0,1) entries (times 1/√m if ``normalize``) and a dither."""
    m, p = int(m), int(p)
    if m < 1 or p < 1:
        raise ValueError(f"need m >= 1 and p >= 1, got m={m}, p={p}")
    mode = DitherMode.parse(dither_mode)
    seed = Seed.coerce(seed)
    phi = seed.derive(_PHI_STREAM).generator().standard_normal((m, p))
    if normalize:
        phi /= math.sqrt(m)
    if mode.kind == "none":
        dither = np.zeros(m)
    else:
        dither = seed.derive(_DITHER_STREAM).generator().random(m) * mode.delta
    return SensingEnsemble(m, p, phi, dither, mode, bool(normalize), seed)


def identity_ensemble(p: int, scale: float = 1.0) -> SensingEnsemble:
    if p < 1:
        raise ValueError("p must be >= 1")
    if not scale > 0:
        raise ValueError(f"identity scale must be > 0, got {scale}")
    return SensingEnsemble(p, p, np.eye(p) * scale, np.zeros(p), DitherMode("none"), False, None)


def measure(ens: SensingEnsemble, w) -> np.ndarray:
    """Φw, without the dither."""
    w = flatten(w)
    if w.size != ens.p:
        raise ValueError(f"vector has {w.size} entries, ensemble expects p={ens.p}")
    return ens.phi @ w


def sparse_probes(p: int, k: int, trials: int, seed) -> np.ndarray:
    """``trials`` unit-norm k-sparse rows: uniform random support, Gaussian values."""
    if not 1 <= k <= p:
        raise ValueError(f"need 1 <= k <= p, got k={k}, p={p}")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = Seed.coerce(seed).derive(_PROBE_STREAM).generator()
    X = np.zeros((trials, p))
    for t in range(trials):
        support = rng.choice(p, size=k, replace=False)
        X[t, support] = rng.standard_normal(k)
    norms = np.linalg.norm(X, axis=1)
    # a Gaussian draw of exactly zero is the only way to get here
    X[norms == 0, 0] = 1.0
    norms[norms == 0] = 1.0
    return X / norms[:, None]


def _probe_matrix(ens: SensingEnsemble) -> np.ndarray:
    return ens.phi if ens.normalize else ens.phi / math.sqrt(ens.m)


def probe_deltas(ens: SensingEnsemble, X) -> np.ndarray:
    """|‖(1/√m)Φx‖² − ‖x‖²| / ‖x‖² for each row x of ``X``."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[1] != ens.p:
        raise ValueError(f"probe vectors have {X.shape[1]} entries, ensemble expects p={ens.p}")
    Y = X @ _probe_matrix(ens).T
    nx = np.einsum("ij,ij->i", X, X)
    return np.abs(np.einsum("ij,ij->i", Y, Y) - nx) / nx


def rip_probe(ens: SensingEnsemble, k: int, trials: int, seed) -> RipEstimate:
    """Empirical lower bound on the restricted isometry constant of order ``k``.

    Samples random k-sparse unit vectors and reports the worst observed
    deviation of the squared norm.  Not a certificate: the true constant is a
    max over all supports.
    """
    seed = Seed.coerce(seed)
    if k > ens.p:
        raise ValueError(f"sparsity k={k} exceeds ambient dimension p={ens.p}")
    X = sparse_probes(ens.p, k, trials, seed)
    return RipEstimate(k, float(probe_deltas(ens, X).max()), trials, seed)


def rip_constant_exhaustive(ens: SensingEnsemble, k: int) -> float:
    """Exact δ_k by enumerating every support of size k (small p only)."""
    if ens.p > 16 or k > 3:
        raise ValueError("exhaustive RIP is limited to p <= 16 and k <= 3")
    if not 1 <= k <= ens.p:
        raise ValueError(f"need 1 <= k <= p, got k={k}")
    A = _probe_matrix(ens)
    worst = 0.0
    for support in itertools.combinations(range(ens.p), k):
        sub = A[:, support]
        eig = np.linalg.eigvalsh(sub.T @ sub)
        worst = max(worst, abs(eig[0] - 1.0), abs(eig[-1] - 1.0))
    return float(worst)
