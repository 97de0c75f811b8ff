import numpy as np
import pytest

from bqcs.conv import (
    ConvSpec,
    approx_conv_qcs,
    approx_conv_standard,
    conv_reference,
    im2col,
    relative_error,
)
from bqcs.sensing import gen_ensemble, identity_ensemble
from bqcs.tensor import Seed, random_gaussian


def naive_conv(I, W, stride=1, pad=0):
    h, w, c = I.shape
    kh, kw, _ = W.shape
    P = np.zeros((h + 2 * pad, w + 2 * pad, c))
    P[pad:pad + h, pad:pad + w] = I
    oh = (h + 2 * pad - kh) // stride + 1
    ow = (w + 2 * pad - kw) // stride + 1
    out = np.zeros((oh, ow))
    for i in range(oh):
        for j in range(ow):
            for a in range(kh):
                for b in range(kw):
                    for ch in range(c):
                        out[i, j] += P[i * stride + a, j * stride + b, ch] * W[a, b, ch]
    return out


def naive_sign_conv(I, W, spec, dual):
    """Unpacked ±1 arithmetic, no bit tricks."""
    pm = im2col(I, spec).data
    w = W.reshape(-1)
    sw = np.where(w >= 0, 1, -1)
    out = []
    for row in pm:
        sx = np.where(row >= 0, 1, -1)
        alpha = np.abs(w).mean() * (np.abs(row).mean() if dual else 1.0)
        out.append(sum(int(a) * int(b) for a, b in zip(sx, sw)) * alpha)
    return np.array(out).reshape(im2col(I, spec).out_shape)


def test_scalar_kernel():
    I = np.array([[1.0, 2.0], [3.0, 4.0]])
    out = conv_reference(I, np.array([[[2.0]]]), ConvSpec((1, 1, 1)))
    assert out.tolist() == [[2, 4], [6, 8]]


def test_counting():
    out = conv_reference(np.ones((3, 3, 1)), np.ones((2, 2, 1)), ConvSpec((2, 2, 1)))
    assert out.shape == (2, 2) and (out == 4).all()


@pytest.mark.parametrize("stride,pad", [(1, 0), (2, 0), (1, 1), (2, 2), (3, 1)])
def test_reference_matches_naive_loops(stride, pad):
    I = random_gaussian([5, 5, 2], Seed(1, stride * 10 + pad))
    W = random_gaussian([3, 3, 2], Seed(2, stride * 10 + pad))
    spec = ConvSpec((3, 3, 2), stride, pad)
    ref = naive_conv(I, W, stride, pad)
    np.testing.assert_allclose(conv_reference(I, W, spec), ref, rtol=1e-12, atol=1e-12)


def test_im2col_examples():
    I = np.arange(4.0).reshape(2, 2, 1)
    pm = im2col(I, ConvSpec((2, 2, 1)))
    assert pm.rows == 1 and pm.cols == 4
    assert pm.data[0].tolist() == [0, 1, 2, 3]
    pm = im2col(np.array([[[7.0]]]), ConvSpec((3, 3, 1), padding=1))
    assert pm.data.tolist() == [[0, 0, 0, 0, 7, 0, 0, 0, 0]]


def test_im2col_channel_order():
    I = np.arange(8.0).reshape(2, 2, 2)
    row = im2col(I, ConvSpec((2, 2, 2))).data[0]
    assert row.tolist() == I.reshape(-1).tolist()


def test_patch_decomposition(rng):
    for s in range(5):
        I = random_gaussian([6, 7, 3], Seed(s))
        W = random_gaussian([2, 3, 3], Seed(s, 1))
        spec = ConvSpec((2, 3, 3), stride=1 + s % 2, padding=s % 3)
        pm = im2col(I, spec)
        np.testing.assert_allclose(conv_reference(I, W, spec).reshape(-1), pm.data @ W.reshape(-1), rtol=1e-12)


def test_bilinearity(rng):
    spec = ConvSpec((3, 3, 2))
    I1, I2 = rng.standard_normal((2, 6, 6, 2))
    W1, W2 = rng.standard_normal((2, 3, 3, 2))
    a, b = 1.7, -0.4
    np.testing.assert_allclose(conv_reference(a * I1 + b * I2, W1, spec),
                               a * conv_reference(I1, W1, spec) + b * conv_reference(I2, W1, spec), rtol=1e-9, atol=1e-12)
    np.testing.assert_allclose(conv_reference(I1, a * W1 + b * W2, spec),
                               a * conv_reference(I1, W1, spec) + b * conv_reference(I1, W2, spec), rtol=1e-9, atol=1e-12)


def test_shape_errors():
    with pytest.raises(ValueError):
        conv_reference(np.ones((2, 2, 1)), np.ones((3, 3, 1)), ConvSpec((3, 3, 1)))
    with pytest.raises(ValueError):
        conv_reference(np.ones((4, 4, 2)), np.ones((3, 3, 1)), ConvSpec((3, 3, 1)))
    with pytest.raises(ValueError):
        conv_reference(np.ones((4, 4, 1)), np.ones((2, 2, 1)), ConvSpec((3, 3, 1)))
    with pytest.raises(ValueError):
        ConvSpec((0, 3, 1))
    with pytest.raises(ValueError):
        ConvSpec((3, 3, 1), stride=0)


def test_standard_constant_tensors():
    I = np.full((5, 5, 1), 0.75)
    W = np.full((3, 3, 1), 1.25)
    spec = ConvSpec((3, 3, 1))
    ref = conv_reference(I, W, spec)
    dual = approx_conv_standard(I, W, spec, "dual")
    assert np.array_equal(dual, ref)
    assert (dual == 9 * 0.75 * 1.25).all()
    assert (approx_conv_standard(I, W, spec, "weight_only") == 9 * 1.25).all()


@pytest.mark.parametrize("dual", [False, True])
def test_standard_matches_unpacked_oracle(dual):
    spec = ConvSpec((3, 3, 1))
    for s in range(5):
        I, W = random_gaussian([7, 7, 1], Seed(s)), random_gaussian([3, 3, 1], Seed(s, 1))
        got = approx_conv_standard(I, W, spec, "dual" if dual else "weight_only")
        want = naive_sign_conv(I, W, spec, dual)
        np.testing.assert_allclose(got, want, rtol=1e-12)
        ref = conv_reference(I, W, spec)
        assert relative_error(got, ref) == pytest.approx(relative_error(want, ref), rel=1e-12)


def test_standard_bad_mode():
    with pytest.raises(ValueError):
        approx_conv_standard(np.ones((3, 3, 1)), np.ones((3, 3, 1)), ConvSpec((3, 3, 1)), "triple")


def test_qcs_identity_equals_unscaled_standard():
    spec = ConvSpec((3, 3, 2), padding=1)
    for s in range(5):
        I, W = random_gaussian([6, 6, 2], Seed(s)), random_gaussian([3, 3, 2], Seed(s, 1))
        raw = approx_conv_qcs(I, W, spec, identity_ensemble(18, 1.0), "raw")
        assert np.array_equal(raw, approx_conv_standard(I, W, spec, "none"))


def test_qcs_raw_outputs_are_bounded_integers():
    spec = ConvSpec((3, 3, 1))
    I, W = random_gaussian([7, 7, 1], Seed(3)), random_gaussian([3, 3, 1], Seed(4))
    ens = gen_ensemble(45, 9, "uniform01", False, Seed(5))
    out = approx_conv_qcs(I, W, spec, ens, "raw")
    assert np.array_equal(out, np.round(out)) and np.abs(out).max() <= 45
    assert ((out + 45) % 2 == 0).all()


def test_qcs_single_patch_identical_codes():
    W = random_gaussian([3, 3, 1], Seed(9))
    ens = gen_ensemble(500, 9, "none", False, Seed(10))
    out = approx_conv_qcs(W, W, ConvSpec((3, 3, 1)), ens, "debiased")
    assert out.shape == (1, 1)
    w = W.reshape(-1)
    n = np.sqrt(np.sum(w * w))
    assert out[0, 0] == n * n
    assert out[0, 0] == pytest.approx(np.linalg.norm(w) ** 2, rel=1e-14)


def test_qcs_ensemble_mismatch():
    with pytest.raises(ValueError):
        approx_conv_qcs(np.ones((4, 4, 1)), np.ones((3, 3, 1)), ConvSpec((3, 3, 1)), identity_ensemble(8, 1.0))
    with pytest.raises(ValueError):
        approx_conv_qcs(np.ones((4, 4, 1)), np.ones((3, 3, 1)), ConvSpec((3, 3, 1)), identity_ensemble(9, 1.0), "fancy")


def qcs_errors(ratio, seeds=20):
    spec = ConvSpec((3, 3, 1))
    errs = []
    for s in range(seeds):
        I, W = random_gaussian([7, 7, 1], Seed(s, 1)), random_gaussian([3, 3, 1], Seed(s, 2))
        ens = gen_ensemble(9 * ratio, 9, "none", False, Seed(s, 100 + ratio))
        errs.append(relative_error(approx_conv_qcs(I, W, spec, ens, "debiased"), conv_reference(I, W, spec)))
    return np.median(errs)


def test_oversampling_reduces_error():
    assert qcs_errors(8) < qcs_errors(1)


def test_error_monotone_along_ratios():
    medians = [qcs_errors(r) for r in (1, 2, 4, 8, 16)]
    inversions = sum(b > a for a, b in zip(medians, medians[1:]))
    assert inversions <= 1


def test_relative_error_examples(rng):
    ref = rng.standard_normal((3, 4))
    assert relative_error(ref, ref) == 0.0
    assert relative_error(np.zeros_like(ref), ref) == 1.0
    assert relative_error(2 * ref, ref) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        relative_error(ref, np.zeros_like(ref))
    with pytest.raises(ValueError):
        relative_error(ref[:2], ref)
