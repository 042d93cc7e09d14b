"""Backend parity: the numba kernels and the numpy fallback must agree."""

import numpy as np
import pytest

from cplxnet import kernels

numba_triple = None
try:
    numba_triple = kernels.numba_kernels()
except ImportError:
    pass

numpy_triple = kernels.numpy_kernels()

needs_numba = pytest.mark.skipif(numba_triple is None, reason="numba unavailable")


def _random_case(seed):
    rng = np.random.default_rng(seed)
    b, ci, co = rng.integers(1, 5), rng.integers(1, 4), rng.integers(1, 6)
    h, w = rng.integers(2, 8), rng.integers(3, 12)
    kh, kw = rng.integers(1, h + 1), rng.integers(1, w + 1)
    x = rng.uniform(-1, 1, (b, ci, h, w)).astype(np.float32)
    f = rng.uniform(-1, 1, (co, ci, kh, kw)).astype(np.float32)
    g = rng.uniform(-1, 1, (b, co, h - kh + 1, w - kw + 1)).astype(np.float32)
    return x, f, g


@needs_numba
@pytest.mark.parametrize("seed", range(20))
def test_forward_parity(seed):
    x, f, _ = _random_case(seed)
    a = numba_triple[0](x, f)
    b = numpy_triple[0](x, f)
    assert a.shape == b.shape
    assert np.abs(a - b).max() <= 1e-6


@needs_numba
@pytest.mark.parametrize("seed", range(20))
def test_backward_input_parity(seed):
    x, f, g = _random_case(seed)
    a = numba_triple[1](g, f)
    b = numpy_triple[1](g, f)
    assert a.shape == x.shape
    assert np.abs(a - b).max() <= 1e-6


@needs_numba
@pytest.mark.parametrize("seed", range(20))
def test_backward_filters_parity(seed):
    x, f, g = _random_case(seed)
    kh, kw = f.shape[2], f.shape[3]
    a = numba_triple[2](g, x, kh, kw)
    b = numpy_triple[2](g, x, kh, kw)
    assert a.shape == f.shape
    assert np.abs(a - b).max() <= 1e-5


def test_active_backend_name():
    assert kernels.active_backend() in ("numba", "numpy")
