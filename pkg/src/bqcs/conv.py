"""Single-output-channel convolution: float reference and binary approximations.

Tensors are laid out (height, width, channels); kernels (kh, kw, c).  The
convolution is a cross-correlation (no kernel flip).  Every output element is
the inner product of one flattened receptive field with the flattened
kernel, which is what lets both binary schemes reuse the vector quantizers.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .bitcode import dot_rows, pack_rows
from .quantize import inner_from_agreement, qcs_bits, qcs_quantize, sign_bits, sign_quantize
from .sensing import SensingEnsemble
from .tensor import as_tensor

__all__ = [
    "ConvSpec",
    "PatchMatrix",
    "im2col",
    "conv_reference",
    "approx_conv_standard",
    "approx_conv_qcs",
    "relative_error",
]


@dataclass(frozen=True)
class ConvSpec:
    kernel_shape: tuple[int, int, int]
    stride: int = 1
    padding: int = 0

    def __post_init__(self):
        ks = tuple(int(d) for d in self.kernel_shape)
        if len(ks) != 3 or min(ks) < 1:
            raise ValueError(f"kernel_shape must be [kh, kw, c] with entries >= 1, got {self.kernel_shape}")
        if self.stride < 1 or self.padding < 0:
            raise ValueError("stride must be >= 1 and padding >= 0")
        object.__setattr__(self, "kernel_shape", ks)

    @property
    def p(self) -> int:
        kh, kw, c = self.kernel_shape
        return kh * kw * c

    def output_shape(self, input_shape) -> tuple[int, int]:
        if len(input_shape) != 3:
            raise ValueError(f"input must be (h, w, c), got shape {tuple(input_shape)}")
        h, w, c = input_shape
        kh, kw, kc = self.kernel_shape
        if c != kc:
            raise ValueError(f"input has {c} channels, kernel expects {kc}")
        oh = (h + 2 * self.padding - kh) // self.stride + 1
        ow = (w + 2 * self.padding - kw) // self.stride + 1
        if oh < 1 or ow < 1 or h + 2 * self.padding < kh or w + 2 * self.padding < kw:
            raise ValueError(f"kernel {self.kernel_shape} does not fit input {tuple(input_shape)} with padding {self.padding}")
        return oh, ow


@dataclass(frozen=True, eq=False)
class PatchMatrix:
    data: np.ndarray
    out_shape: tuple[int, int]

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]


def _image(I) -> np.ndarray:
    I = as_tensor(I)
    if I.ndim == 2:
        I = I[:, :, None]
    return I


def _kernel(W, spec: ConvSpec) -> np.ndarray:
    W = as_tensor(W)
    if W.ndim == 2:
        W = W[:, :, None]
    if W.shape != spec.kernel_shape:
        raise ValueError(f"kernel has shape {W.shape}, spec says {spec.kernel_shape}")
    return W.reshape(-1)


def im2col(I, spec: ConvSpec) -> PatchMatrix:
    """Receptive fields as rows, each flattened in (kh, kw, c) order."""
    I = _image(I)
    oh, ow = spec.output_shape(I.shape)
    pad = spec.padding
    if pad:
        I = np.pad(I, ((pad, pad), (pad, pad), (0, 0)))
    kh, kw, c = spec.kernel_shape
    win = sliding_window_view(I, (kh, kw), axis=(0, 1))  # (H', W', c, kh, kw)
    win = win[: (oh - 1) * spec.stride + 1 : spec.stride, : (ow - 1) * spec.stride + 1 : spec.stride]
    data = np.ascontiguousarray(win.transpose(0, 1, 3, 4, 2)).reshape(oh * ow, kh * kw * c)
    return PatchMatrix(data, (oh, ow))


def conv_reference(I, W, spec: ConvSpec) -> np.ndarray:
    pm = im2col(I, spec)
    return (pm.data @ _kernel(W, spec)).reshape(pm.out_shape)


def approx_conv_standard(I, W, spec: ConvSpec, scale_mode: str = "dual") -> np.ndarray:
    """Sign-binarized convolution rescaled by mean absolute values.

    ``weight_only`` multiplies by the kernel's scale alone; ``dual`` also by
    each patch's own scale; ``none`` leaves the raw ±1 dot products.
    """
    pm = im2col(I, spec)
    w = _kernel(W, spec)
    dots = dot_rows(pack_rows(sign_bits(pm.data)), sign_quantize(w)).astype(np.float64)
    if scale_mode == "none":
        alpha = 1.0
    elif scale_mode == "weight_only":
        alpha = np.mean(np.abs(w))
    elif scale_mode == "dual":
        alpha = np.mean(np.abs(w)) * np.mean(np.abs(pm.data), axis=1)
    else:
        raise ValueError(f"unknown scale_mode {scale_mode!r}")
    return (dots * alpha).reshape(pm.out_shape)


def approx_conv_qcs(I, W, spec: ConvSpec, ens: SensingEnsemble, mode: str = "debiased") -> np.ndarray:
    """Convolution from QCS codes of every patch and of the kernel.

    All patches and the kernel are measured with the same ensemble.  ``raw``
    returns the integer code dot products; ``debiased`` maps code agreement to
    an angle and rescales by the stored Euclidean norms.
    """
    if ens.p != spec.p:
        raise ValueError(f"ensemble p={ens.p} does not match kernel size {spec.p}")
    if mode not in ("raw", "debiased"):
        raise ValueError(f"unknown mode {mode!r}")
    pm = im2col(I, spec)
    w = _kernel(W, spec)
    dots = dot_rows(pack_rows(qcs_bits(pm.data, ens)), qcs_quantize(w, ens))
    if mode == "raw":
        return dots.astype(np.float64).reshape(pm.out_shape)
    s = dots / ens.m
    out = inner_from_agreement(s, _row_norms(pm.data), _row_norms(w[None, :])[0])
    return out.reshape(pm.out_shape)


def _row_norms(X: np.ndarray) -> np.ndarray:
    # one summation path for patches and kernel, so equal vectors get equal norms
    return np.sqrt(np.sum(X * X, axis=1))


def relative_error(approx, reference) -> float:
    approx = np.asarray(approx, dtype=np.float64)
    reference = np.asarray(reference, dtype=np.float64)
    if approx.shape != reference.shape:
        raise ValueError(f"shape mismatch: {approx.shape} vs {reference.shape}")
    ref = np.linalg.norm(reference)
    if ref == 0:
        raise ValueError("reference has zero norm")
    return float(np.linalg.norm(approx - reference) / ref)
