import numpy as np
import pytest

from cplxnet.tensor import Tensor


def fd_gradcheck(func, arrays, eps=1e-3, rel_tol=1e-3, abs_tol=1e-4):
    """Central finite differences vs tape gradients for every input array.

    ``func`` maps positional Tensors to a scalar Tensor and must be pure
    (re-evaluable); arrays are float32 and are perturbed in place.
    """
    tensors = [Tensor(a, requires_grad=True) for a in arrays]
    loss = func(*tensors)
    loss.backward()

    def eval_loss():
        return func(*[Tensor(a) for a in arrays]).item()

    for t, a in zip(tensors, arrays):
        flat = a.reshape(-1)
        gflat = t.grad.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + eps
            lp = eval_loss()
            flat[i] = orig - eps
            lm = eval_loss()
            flat[i] = orig
            num = (lp - lm) / (2.0 * eps)
            err = abs(gflat[i] - num)
            # float32 forward rounding makes the fd quotient itself noisy
            fd_noise = 2.0 * np.finfo(np.float32).eps * max(abs(lp), abs(lm)) / eps
            assert err <= abs_tol + rel_tol * abs(num) + fd_noise, (
                f"grad mismatch at {i}: tape {gflat[i]:.6g} vs fd {num:.6g}"
            )


@pytest.fixture(scope="session")
def tiny_dataset():
    """2 frames per (mod, snr): 440 frames, enough for split/io tests."""
    from cplxnet.siggen import generate_dataset

    return generate_dataset(2, seed=123)
