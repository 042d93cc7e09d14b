"""Activation maximization: synthesize the input a trained model calls
one class with near-total confidence.

Gradient ascent over the input only (parameters frozen, dropout off) on

    log softmax(target) - l2_penalty * ||x||^2

with backtracking: a step that lowers the objective halves the step size
and is retried, so the accepted objective sequence is non-decreasing.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import svgplot
from . import tensor as T
from .errors import ContractError, NumericError
from .tensor import Tensor

__all__ = ["ActMaxConfig", "OneHotImage", "maximize", "render_gallery"]


@dataclass(frozen=True)
class ActMaxConfig:
    steps: int = 1000
    step_size: float = 0.05
    l2_penalty: float = 0.01
    target_confidence: float = 0.999
    init_scale: float = 0.01
    seed: int = 0

    def __post_init__(self):
        if self.steps < 1:
            raise ContractError("steps must be >= 1")
        if not (1.0 / 11.0 < self.target_confidence < 1.0):
            raise ContractError("target_confidence must be in (1/11, 1)")


@dataclass
class OneHotImage:
    input: np.ndarray          # (2, 128)
    class_id: int
    softmax: np.ndarray        # (K,)
    iterations: int
    objective: float
    reached_target: bool


def _objective_and_grad(model, x: Tensor, class_id: int, lam: float):
    onehot = np.zeros((1, model.spec.num_classes), np.float32)
    onehot[0, class_id] = 1.0
    logits = model.forward(x, training=False)
    xent = T.softmax_xent(logits, onehot)          # = -log softmax(target)
    penalty = T.mul(T.tsum(T.mul(x, x)), lam)
    loss = xent + penalty                          # minimize == ascend objective
    x.zero_grad()
    loss.backward()
    probs = T.softmax(logits.data)[0]
    return -loss.item(), x.grad.copy(), probs


def maximize(model, class_id: int, cfg: ActMaxConfig = ActMaxConfig()) -> OneHotImage:
    if not 0 <= class_id < model.spec.num_classes:
        raise ContractError(f"class_id {class_id} outside [0, {model.spec.num_classes})")
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, class_id]))
    shape = (1, *model.spec.input_shape)
    x = Tensor(rng.normal(0.0, cfg.init_scale, size=shape), requires_grad=True)

    obj, grad, probs = _objective_and_grad(model, x, class_id, cfg.l2_penalty)
    best = OneHotImage(x.data[0].copy(), class_id, probs, 0, obj,
                       probs[class_id] >= cfg.target_confidence)
    step = cfg.step_size
    it = 0
    while it < cfg.steps and probs[class_id] < cfg.target_confidence:
        it += 1
        candidate = x.data - step * grad           # descend the loss
        if not np.isfinite(candidate).all():
            raise NumericError(f"non-finite iterate at step {it}")
        xc = Tensor(candidate, requires_grad=True)
        new_obj, new_grad, new_probs = _objective_and_grad(model, xc, class_id, cfg.l2_penalty)
        if new_obj < obj and step > 1e-8:
            step *= 0.5                            # reject, retry smaller
            continue
        x, obj, grad, probs = xc, new_obj, new_grad, new_probs
        if obj >= best.objective:
            best = OneHotImage(x.data[0].copy(), class_id, probs, it, obj,
                               probs[class_id] >= cfg.target_confidence)
    best.iterations = it
    best.reached_target = bool(best.softmax[class_id] >= cfg.target_confidence)
    return best


def render_gallery(images, references, mod_names, out_svg, out_json=None):
    """Side-by-side synthesized vs reference I/Q panels, one per class.

    ``references`` maps class id -> (2, 128) frame drawn from the highest
    train SNR of the paradigm.  Writes the SVG plus a JSON sidecar with
    the achieved confidences.
    """
    by_class = {img.class_id: img for img in images}
    missing = [i for i in range(len(mod_names)) if i not in by_class]
    if missing:
        raise ContractError(f"missing synthesized inputs for classes {missing}")
    panels = []
    for i, name in enumerate(mod_names):
        img = by_class[i]
        conf = float(img.softmax[i])
        panels.append((
            f"{name} (p={conf:.3f})",
            [("synthesized", img.input), ("reference", references[i])],
        ))
    svgplot.iq_panels(out_svg, panels)
    if out_json is not None:
        doc = {
            "kind": "cplxnet-actmax",
            "classes": [
                {
                    "name": mod_names[i],
                    "class_id": i,
                    "confidence": float(by_class[i].softmax[i]),
                    "iterations": by_class[i].iterations,
                    "reached_target": by_class[i].reached_target,
                }
                for i in range(len(mod_names))
            ],
        }
        with open(out_json, "w") as fh:
            json.dump(doc, fh, indent=1, sort_keys=True)
