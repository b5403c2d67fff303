"""Model loading for the adapter.

Two loader specs are accepted:

* a path to a ``.json`` file describing a bag-of-words logistic
  regression: ``{"classes": ["neg", "pos"], "weights": {"word": w, ...},
  "bias": 0.0}``;
* ``module:attribute`` — the attribute must expose ``classes`` (a list
  of names or an int count) and ``predict(tokens, pad) -> list[float]``.

Both are deterministic: identical requests always yield identical
probabilities.
"""
from __future__ import annotations

import importlib
import json
import math
from dataclasses import dataclass, field


class ModelLoadError(Exception):
    pass


def _sigmoid(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


@dataclass(frozen=True)
class LogisticModel:
    """Binary bag-of-words logistic regression.

    The positive-class logit is the sum of per-word weights plus the
    bias; pad and out-of-vocabulary tokens contribute zero.
    """
    classes: tuple[str, str] = ("neg", "pos")
    weights: dict[str, float] = field(default_factory=dict)
    bias: float = 0.0

    @classmethod
    def from_dict(cls, d: dict) -> "LogisticModel":
        try:
            classes = tuple(str(c) for c in d.get("classes", ("neg", "pos")))
            weights = {str(k): float(v)
                       for k, v in dict(d.get("weights", {})).items()}
            bias = float(d.get("bias", 0.0))
        except (TypeError, ValueError) as e:
            raise ModelLoadError(f"malformed model description: {e}") from e
        if len(classes) != 2:
            raise ModelLoadError("logistic model must define exactly 2 classes")
        unknown = set(d) - {"classes", "weights", "bias"}
        if unknown:
            raise ModelLoadError(f"unknown model keys: {sorted(unknown)}")
        return cls(classes, weights, bias)

    def predict(self, tokens, pad: str) -> list[float]:
        z = self.bias + math.fsum(
            self.weights.get(t, 0.0) for t in tokens if t != pad)
        return [_sigmoid(-z), _sigmoid(z)]


def load_model(spec: str):
    """Resolve a loader spec to a model object with .classes/.predict."""
    if spec.endswith(".json"):
        try:
            with open(spec, encoding="utf-8") as f:
                return LogisticModel.from_dict(json.load(f))
        except OSError as e:
            raise ModelLoadError(f"cannot read model file: {e}") from e
        except json.JSONDecodeError as e:
            raise ModelLoadError(f"model file is not valid JSON: {e}") from e
    if ":" in spec:
        mod_name, _, attr = spec.rpartition(":")
        try:
            obj = getattr(importlib.import_module(mod_name), attr)
        except (ImportError, AttributeError) as e:
            raise ModelLoadError(f"cannot import {spec!r}: {e}") from e
        if isinstance(obj, dict):
            return LogisticModel.from_dict(obj)
        if not hasattr(obj, "predict") or not hasattr(obj, "classes"):
            raise ModelLoadError(
                f"{spec!r} must expose .classes and .predict(tokens, pad)")
        return obj
    raise ModelLoadError(
        f"model spec {spec!r} is neither a .json path nor module:attribute")


def class_count(model) -> int:
    c = model.classes
    return c if isinstance(c, int) else len(c)
