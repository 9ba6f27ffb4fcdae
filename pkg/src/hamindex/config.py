"""Declarative model and coefficient specifications (YAML or JSON)."""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np
import yaml

from .errors import InvalidArgumentError
from .models import (HamiltonianModel, anisotropic_model, expression_model, expression_path,
                     nonautonomous_model, quadratic_model, quadratic_plus_model, soft_power_model)
from .symplectic import CoefficientPath, constant_path, trig_path

MODEL_KEYS = {"type", "n", "beta", "sigma", "omega", "mu", "upsilon", "lambda", "period", "expression",
              "bhat", "b", "params", "varrho", "modulation", "base", "name"}
COEFF_KEYS = {"type", "matrix", "B0", "cos", "sin", "entries", "period"}


def load_config(path) -> dict:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise InvalidArgumentError(f"cannot read config {path}: {exc.strerror}") from None
    try:
        data = json.loads(text) if p.suffix == ".json" else yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise InvalidArgumentError(f"cannot parse config {path}: {exc}") from None
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise InvalidArgumentError("config root must be a mapping")
    return data


def _matrix(value, what) -> np.ndarray:
    try:
        M = np.asarray(value, dtype=float)
    except (TypeError, ValueError):
        raise InvalidArgumentError(f"{what} must be a numeric matrix") from None
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] % 2:
        raise InvalidArgumentError(f"{what} must be square of even order, got shape {M.shape}")
    return M


def build_coefficient(spec: dict) -> CoefficientPath:
    """Coefficient path from {type: constant|trig|expression, ...}."""
    if not isinstance(spec, dict):
        raise InvalidArgumentError("coefficient spec must be a mapping")
    unknown = set(spec) - COEFF_KEYS
    if unknown:
        raise InvalidArgumentError(f"unknown coefficient keys: {sorted(unknown)}")
    kind = spec.get("type", "constant")
    period = float(spec.get("period", 2 * math.pi))
    if period <= 0:
        raise InvalidArgumentError("period must be positive")
    if kind == "constant":
        if "matrix" not in spec:
            raise InvalidArgumentError("constant coefficient needs 'matrix'")
        return constant_path(_matrix(spec["matrix"], "matrix"), period)
    if kind == "trig":
        B0 = _matrix(spec["B0"], "B0")
        cos = [_matrix(M, "cos term") for M in spec.get("cos", [])]
        sin = [_matrix(M, "sin term") for M in spec.get("sin", [])]
        if len(cos) != len(sin):
            raise InvalidArgumentError("cos and sin lists must have equal length (use zero matrices)")
        return trig_path(B0, cos, sin, period)
    if kind == "expression":
        return expression_path(spec["entries"], period)
    raise InvalidArgumentError(f"unknown coefficient type {kind!r}")


def build_model(spec: dict) -> HamiltonianModel:
    """Model from {type: soft_power|anisotropic|quadratic|expression|nonautonomous|quadratic_plus, ...}."""
    if not isinstance(spec, dict):
        raise InvalidArgumentError("model spec must be a mapping")
    unknown = set(spec) - MODEL_KEYS
    if unknown:
        raise InvalidArgumentError(f"unknown model keys: {sorted(unknown)}")
    kind = spec.get("type", "soft_power")
    n = int(spec.get("n", 1))
    if n < 1:
        raise InvalidArgumentError("n must be >= 1")
    if kind == "soft_power":
        model = soft_power_model(n, float(spec.get("beta", 1.75)))
    elif kind == "anisotropic":
        model = anisotropic_model(n, float(spec.get("sigma", 1.0)), float(spec.get("omega", 1.0)),
                                  float(spec.get("beta", 1.75)))
    elif kind == "quadratic":
        model = quadratic_model(n, float(spec.get("b", 1.0)))
    elif kind == "expression":
        if "expression" not in spec:
            raise InvalidArgumentError("expression model needs 'expression'")
        params = {k: float(spec[k]) for k in ("sigma", "omega", "mu", "upsilon", "beta", "lambda", "varrho")
                  if k in spec}
        params.update({k: float(v) for k, v in (spec.get("params") or {}).items()})
        period = spec.get("period")
        model = expression_model(str(spec["expression"]), n, None if period is None else float(period), params,
                                 spec.get("name"))
    elif kind == "nonautonomous":
        base = build_model(spec.get("base", {"type": "soft_power", "n": n}))
        period = float(spec.get("period", 2 * math.pi))
        mod = expression_path([[spec.get("modulation", "1"), 0], [0, 0]], period)

        def a(t):
            return mod.func(np.atleast_1d(t))[:, 0, 0]

        model = nonautonomous_model(base, a, period)
    elif kind == "quadratic_plus":
        base = build_model(spec.get("base", {"type": "soft_power", "n": n}))
        bspec = dict(spec.get("bhat") or {})
        bspec.setdefault("period", spec.get("period", 2 * math.pi))
        model = quadratic_plus_model(build_coefficient(bspec), base)
    else:
        raise InvalidArgumentError(f"unknown model type {kind!r}")
    if "varrho" in spec and kind != "expression":
        model.params["varrho"] = float(spec["varrho"])
    return model
