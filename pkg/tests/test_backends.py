"""Cross-checks between the compiled kernels and the numpy fallback."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

import kanprobe as kp
from kanprobe import backend

HAS_COMPILED = "compiled" in backend.available()

needs_compiled = pytest.mark.skipif(not HAS_COMPILED, reason="compiled kernels not built")


def _random_case(kind, rng, dtype):
    d = int(rng.integers(2, 12))
    c = int(rng.integers(2, 6))
    g = int(rng.integers(1, 7))
    n = int(rng.integers(1, 9))
    head = kp.init_head(kind, d, c, g, seed=int(rng.integers(10_000)))
    for name, p in head.parameters().items():
        setattr(head, name, p.astype(dtype))
    X = rng.uniform(-2.5, 2.5, (n, d)).astype(dtype)
    GL = rng.normal(0.0, 1.0, (n, c)).astype(dtype)
    return head, X, GL


def _with_backend(name, fn):
    prev = backend.active()
    backend.set_backend(name)
    try:
        return fn()
    finally:
        backend.set_backend(prev)


class TestSelection:
    def test_numpy_always_available(self):
        assert "numpy" in backend.available()

    def test_active_in_available(self):
        assert backend.active() in backend.available()

    def test_set_backend_roundtrip(self):
        prev = backend.active()
        backend.set_backend("numpy")
        assert backend.active() == "numpy"
        backend.set_backend(prev)
        assert backend.active() == prev

    def test_unknown_backend_rejected(self):
        with pytest.raises(ValueError):
            backend.set_backend("fortran")

    @needs_compiled
    def test_compiled_kernels_importable(self):
        mod = _with_backend("compiled", backend.get_kernels)
        assert hasattr(mod, "fourier_forward")
        assert hasattr(mod, "spline_backward")


@needs_compiled
class TestParity:
    @pytest.mark.parametrize("kind", ["frkan", "kan"])
    def test_forward_f64(self, kind):
        rng = np.random.default_rng(101)
        for _ in range(30):
            head, X, _ = _random_case(kind, rng, np.float64)
            a = _with_backend("compiled", lambda: kp.forward_batch(head, X))
            b = _with_backend("numpy", lambda: kp.forward_batch(head, X))
            assert a.dtype == b.dtype == np.float64
            assert_allclose(a, b, rtol=1e-10, atol=1e-12)

    @pytest.mark.parametrize("kind", ["frkan", "kan"])
    def test_backward_f64(self, kind):
        rng = np.random.default_rng(202)
        for _ in range(30):
            head, X, GL = _random_case(kind, rng, np.float64)
            a = _with_backend("compiled", lambda: kp.backward_batch(head, X, GL))
            b = _with_backend("numpy", lambda: kp.backward_batch(head, X, GL))
            assert set(a.grads) == set(b.grads)
            for name in a.grads:
                assert_allclose(a.grads[name], b.grads[name], rtol=1e-10, atol=1e-12)
            assert_allclose(a.grad_input, b.grad_input, rtol=1e-10, atol=1e-12)

    @pytest.mark.parametrize("kind", ["frkan", "kan"])
    def test_forward_f32(self, kind):
        rng = np.random.default_rng(303)
        for _ in range(15):
            head, X, _ = _random_case(kind, rng, np.float32)
            a = _with_backend("compiled", lambda: kp.forward_batch(head, X))
            b = _with_backend("numpy", lambda: kp.forward_batch(head, X))
            assert a.dtype == b.dtype == np.float32
            assert_allclose(a, b, rtol=2e-4, atol=2e-4)

    @pytest.mark.parametrize("kind", ["frkan", "kan"])
    def test_backward_f32(self, kind):
        rng = np.random.default_rng(404)
        for _ in range(15):
            head, X, GL = _random_case(kind, rng, np.float32)
            a = _with_backend("compiled", lambda: kp.backward_batch(head, X, GL))
            b = _with_backend("numpy", lambda: kp.backward_batch(head, X, GL))
            for name in a.grads:
                assert_allclose(a.grads[name], b.grads[name], rtol=3e-3, atol=3e-3)
            assert_allclose(a.grad_input, b.grad_input, rtol=3e-3, atol=3e-3)

    def test_training_run_matches_to_tolerance(self):
        # a short end-to-end fit should land in (nearly) the same place
        data = kp.synth_gaussian_clusters(80, 6, 3, sep=4.0, seed=6)
        head = kp.init_head("frkan", 6, 3, 3, seed=6)
        cfg = kp.TrainConfig(learning_rate=1e-3, batch_size=16, epochs=2, seed=6)
        val = kp.synth_gaussian_clusters(40, 6, 3, sep=4.0, seed=7)
        ta, ha = _with_backend("compiled", lambda: kp.train(head, data, val, cfg))
        tb, hb = _with_backend("numpy", lambda: kp.train(head, data, val, cfg))
        for name, p in ta.parameters().items():
            assert_allclose(p, tb.parameters()[name], rtol=1e-8, atol=1e-10)
        assert_allclose(ha.train, hb.train, rtol=1e-9)
        assert_allclose(ha.val, hb.val, rtol=1e-9)
