import json
from dataclasses import dataclass

import numpy as np
import pytest

import cplxnet.tensor as T
from cplxnet.actmax import ActMaxConfig, OneHotImage, maximize, render_gallery
from cplxnet.errors import ContractError
from cplxnet.tensor import Tensor


@dataclass(frozen=True)
class _LinearSpec:
    num_classes: int = 2
    input_shape: tuple = (2, 8)


class _LinearModel:
    """logits = flatten(x) @ W -- the ascent direction has a closed form.

    With W = [u, -u] the class-0 logit margin is 2 <x, u>, so the optimal
    input is a positive multiple of u and the ascent trajectory must align
    with it.
    """

    def __init__(self, w: np.ndarray):
        self.spec = _LinearSpec(num_classes=w.shape[1])
        self.w = Tensor(w.astype(np.float32))

    def forward(self, x, training=False):
        flat = T.reshape(x, (x.shape[0], -1))
        return T.matmul(flat, self.w)


def _opposed_model(seed=0):
    rng = np.random.default_rng(seed)
    u = rng.normal(size=16)
    u /= np.linalg.norm(u)
    return _LinearModel(np.stack([u, -u], axis=1)), u


class TestConfig:
    def test_zero_steps(self):
        with pytest.raises(ContractError):
            ActMaxConfig(steps=0)

    def test_confidence_bounds(self):
        with pytest.raises(ContractError):
            ActMaxConfig(target_confidence=1.0)
        with pytest.raises(ContractError):
            ActMaxConfig(target_confidence=0.05)

    def test_bad_class_id(self):
        model, _ = _opposed_model()
        with pytest.raises(ContractError):
            maximize(model, 2)


class TestLinearOracle:
    def test_ascends_to_known_direction(self):
        model, u = _opposed_model()
        img = maximize(model, 0, ActMaxConfig(steps=400, l2_penalty=0.001,
                                              target_confidence=0.98, seed=1))
        x = img.input.reshape(-1)
        cosine = x @ u / np.linalg.norm(x)
        assert cosine >= 0.99
        assert img.softmax[0] >= 0.98
        assert img.reached_target

    def test_other_class_flips_direction(self):
        model, u = _opposed_model()
        img = maximize(model, 1, ActMaxConfig(steps=400, l2_penalty=0.001, seed=1))
        x = img.input.reshape(-1)
        assert x @ (-u) / np.linalg.norm(x) >= 0.99

    def test_penalty_shrinks_solution(self):
        # unreachable target so both runs spend the full step budget at
        # their penalised optimum; heavier l2 must give a smaller input
        model, _ = _opposed_model()
        common = dict(steps=300, target_confidence=0.9999999, seed=2)
        light = maximize(model, 0, ActMaxConfig(l2_penalty=1e-3, **common))
        heavy = maximize(model, 0, ActMaxConfig(l2_penalty=1.0, **common))
        assert np.linalg.norm(heavy.input) < 0.5 * np.linalg.norm(light.input)

    def test_more_steps_never_worse(self):
        model, _ = _opposed_model()
        cfg = dict(l2_penalty=0.01, target_confidence=0.9999999, seed=3)
        short = maximize(model, 0, ActMaxConfig(steps=5, **cfg))
        long = maximize(model, 0, ActMaxConfig(steps=80, **cfg))
        assert long.objective >= short.objective

    def test_determinism(self):
        model, _ = _opposed_model()
        cfg = ActMaxConfig(steps=50, seed=4)
        a = maximize(model, 0, cfg)
        b = maximize(model, 0, cfg)
        assert np.array_equal(a.input, b.input)
        assert a.objective == b.objective


class TestGallery:
    def _images(self, k=3):
        rng = np.random.default_rng(5)
        out = []
        for i in range(k):
            sm = np.full(k, 0.01)
            sm[i] = 1.0 - 0.01 * (k - 1)
            out.append(OneHotImage(rng.normal(size=(2, 128)).astype(np.float32),
                                   i, sm, 10, -0.5, True))
        return out

    def test_writes_svg_and_sidecar(self, tmp_path):
        names = ("M0", "M1", "M2")
        refs = {i: np.zeros((2, 128), np.float32) for i in range(3)}
        svg, sidecar = tmp_path / "g.svg", tmp_path / "g.json"
        render_gallery(self._images(), refs, names, svg, sidecar)
        assert svg.read_text().startswith("<svg")
        doc = json.loads(sidecar.read_text())
        assert doc["kind"] == "cplxnet-actmax"
        assert [c["name"] for c in doc["classes"]] == list(names)
        assert all(c["confidence"] > 0.9 for c in doc["classes"])

    def test_missing_class_rejected(self, tmp_path):
        refs = {i: np.zeros((2, 128), np.float32) for i in range(3)}
        with pytest.raises(ContractError, match="2"):
            render_gallery(self._images()[:2], refs, ("M0", "M1", "M2"),
                           tmp_path / "g.svg")
