import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bqcs.sensing import (
    DitherMode,
    gen_ensemble,
    identity_ensemble,
    measure,
    probe_deltas,
    rip_constant_exhaustive,
    rip_probe,
    sparse_probes,
)
from bqcs.tensor import Seed


def naive_matvec(A, x):
    out = []
    for i in range(A.shape[0]):
        acc = 0.0
        for j in range(A.shape[1]):
            acc += A[i, j] * x[j]
        out.append(acc)
    return np.array(out)


def test_grm_moments():
    ens = gen_ensemble(128, 64, "none", False, Seed(3))
    assert abs(ens.phi.mean()) < 0.04
    assert abs(ens.phi.var() - 1) < 0.06
    assert not ens.dither.any()


def test_normalize_scales_by_inv_sqrt_m():
    a = gen_ensemble(50, 10, "none", False, Seed(4))
    b = gen_ensemble(50, 10, "none", True, Seed(4))
    np.testing.assert_allclose(b.phi, a.phi / math.sqrt(50), rtol=1e-15)


def test_dither_modes():
    ens = gen_ensemble(16, 16, "uniform01", False, Seed(5))
    assert ens.dither.min() >= 0 and ens.dither.max() < 1 and ens.dither.any()
    sc = gen_ensemble(1000, 4, "scaled:0.25", False, Seed(5))
    assert sc.dither.min() >= 0 and sc.dither.max() < 0.25
    with pytest.raises(ValueError):
        gen_ensemble(4, 4, DitherMode("scaled", -1.0), False, Seed(0))
    with pytest.raises(ValueError):
        DitherMode.parse("scaled:-0.5")
    with pytest.raises(ValueError):
        DitherMode.parse("gaussian")
    assert str(DitherMode.parse("scaled:0.5")) == "scaled:0.5"


def test_regeneration_is_identical():
    a = gen_ensemble(12, 7, "uniform01", True, Seed(8, 2))
    b = gen_ensemble(12, 7, "uniform01", True, Seed(8, 2))
    assert a.phi.tobytes() == b.phi.tobytes() and a.dither.tobytes() == b.dither.tobytes()
    c = gen_ensemble(**{k: v for k, v in a.ref().items() if k != "seed"}, seed=Seed(*a.ref()["seed"]))
    assert c.phi.tobytes() == a.phi.tobytes()


def test_invalid_dims():
    with pytest.raises(ValueError):
        gen_ensemble(0, 3)
    with pytest.raises(ValueError):
        identity_ensemble(3, 0.0)
    with pytest.raises(ValueError):
        identity_ensemble(3, -1.0)


def test_identity_ensemble_construction():
    e = identity_ensemble(3, 1.0)
    assert e.phi.tolist() == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    assert not e.dither.any() and e.dither_mode.kind == "none"
    assert np.diag(identity_ensemble(4, 2.0).phi).tolist() == [2, 2, 2, 2]


def test_measure_examples(rng):
    w = rng.standard_normal(6)
    assert np.array_equal(measure(identity_ensemble(6, 1.0), w), w)
    ens = gen_ensemble(8, 8, "uniform01", False, Seed(1))
    assert not measure(ens, np.zeros(8)).any()
    np.testing.assert_allclose(measure(ens, w[:6].tolist() + [0.3, -0.1]), naive_matvec(ens.phi, w[:6].tolist() + [0.3, -0.1]), rtol=1e-12)
    with pytest.raises(ValueError):
        measure(ens, np.ones(7))


@given(st.integers(0, 2**32))
def test_measure_is_linear(s):
    ens = gen_ensemble(9, 5, "none", False, Seed(s))
    g = np.random.default_rng(s)
    w1, w2 = g.standard_normal((2, 5))
    np.testing.assert_allclose(measure(ens, w1 + w2), measure(ens, w1) + measure(ens, w2), rtol=1e-9, atol=1e-12)


def test_sparse_probes_shape():
    X = sparse_probes(20, 3, 50, Seed(0))
    assert X.shape == (50, 20)
    assert (np.count_nonzero(X, axis=1) <= 3).all()
    np.testing.assert_allclose(np.linalg.norm(X, axis=1), 1.0)


@pytest.mark.parametrize("p", [1, 5, 16])
def test_identity_probe_is_exactly_zero(p):
    ens = identity_ensemble(p, math.sqrt(p))
    for k in range(1, p + 1):
        assert rip_probe(ens, k, 20, Seed(k)).delta_hat == 0.0


def test_probe_errors():
    ens = gen_ensemble(4, 4, "none", False, Seed(0))
    with pytest.raises(ValueError):
        rip_probe(ens, 5, 10, Seed(0))
    with pytest.raises(ValueError):
        rip_probe(ens, 2, 0, Seed(0))


def test_probe_respects_normalize_flag():
    raw = gen_ensemble(64, 32, "none", False, Seed(2))
    nrm = gen_ensemble(64, 32, "none", True, Seed(2))
    a = rip_probe(raw, 4, 30, Seed(1)).delta_hat
    b = rip_probe(nrm, 4, 30, Seed(1)).delta_hat
    assert a == pytest.approx(b, rel=1e-12)


def test_grm_probe_below_bound():
    hits = sum(rip_probe(gen_ensemble(256, 512, "none", False, Seed(s)), 8, 200, Seed(s, 1)).delta_hat < 0.6
               for s in range(20))
    assert hits >= 19


def test_nested_probe_sets_are_monotone():
    # pad each k=1 probe into k=8 and k=32 probe sets: max over a superset cannot shrink
    p = 128
    ens = gen_ensemble(96, p, "none", False, Seed(10))
    X1 = sparse_probes(p, 1, 40, Seed(1))
    X8 = np.vstack([X1, sparse_probes(p, 8, 40, Seed(8))])
    X32 = np.vstack([X8, sparse_probes(p, 32, 40, Seed(32))])
    d1, d8, d32 = (probe_deltas(ens, X).max() for X in (X1, X8, X32))
    assert d1 <= d8 <= d32


def test_probe_never_exceeds_exhaustive_constant():
    for s in range(5):
        ens = gen_ensemble(20, 12, "none", False, Seed(s))
        for k in (1, 2, 3):
            exact = rip_constant_exhaustive(ens, k)
            assert 0 <= rip_probe(ens, k, 300, Seed(s, k)).delta_hat <= exact + 1e-12


def test_exhaustive_identity_and_limits():
    assert rip_constant_exhaustive(identity_ensemble(6, math.sqrt(6)), 3) == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(ValueError):
        rip_constant_exhaustive(gen_ensemble(4, 17, "none", False, Seed(0)), 2)


def test_delta_shrinks_with_m():
    p, k = 256, 8
    small = [rip_probe(gen_ensemble(128, p, "none", False, Seed(s)), k, 50, Seed(s, 9)).delta_hat for s in range(50)]
    large = [rip_probe(gen_ensemble(512, p, "none", False, Seed(s)), k, 50, Seed(s, 9)).delta_hat for s in range(50)]
    assert min(small + large) >= 0
    assert np.median(large) < np.median(small)
