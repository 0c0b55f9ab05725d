"""Run configuration: one JSON document per run, validated into model objects."""

from __future__ import annotations

import copy
import json
from pathlib import Path

from .errors import ConfigError, FBWavesError
from .model import ModelSpec, reaction_from_rates
from .phase_plane import Regularisation

DIFFUSIVITY_KEYS = (("D_i", "D_g"), ("k", "alpha", "beta"))
RATE_KEYS = ("lambda_i", "lambda_g", "K_i")

REGULARISATIONS = {
    "nonlocal": Regularisation.NONLOCAL,
    "viscous_positive": Regularisation.VISCOUS_POSITIVE,
    "viscous_negative": Regularisation.VISCOUS_NEGATIVE,
}


def load(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    return cfg


def apply_overrides(cfg: dict, pairs) -> dict:
    """``KEY=VALUE`` overrides of top-level scalar fields; VALUE is parsed as JSON when possible."""
    cfg = copy.deepcopy(cfg)
    for pair in pairs or ():
        if "=" not in pair:
            raise ConfigError(f"override {pair!r} is not KEY=VALUE")
        key, raw = pair.split("=", 1)
        if isinstance(cfg.get(key), (dict, list)):
            raise ConfigError(f"override {key!r} targets a structured field")
        try:
            cfg[key] = json.loads(raw)
        except json.JSONDecodeError:
            cfg[key] = raw
    return cfg


def _number(section, key, required=True, default=None):
    if key not in section or section[key] is None:
        if required:
            raise ConfigError(f"missing model field {key!r}")
        return default
    value = section[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"model field {key!r} must be a number, got {value!r}")
    return float(value)


def build_model(cfg: dict) -> ModelSpec:
    """Model from ``cfg["model"]``.

    Exactly one diffusivity parameterisation (``D_i, D_g`` or ``k, alpha,
    beta``) and one reaction parameterisation (``r`` with optional ``A``,
    or ``lambda_i, lambda_g, K_i`` with optional ``K_g``) must be present.
    ``A`` absent or null selects the logistic reaction.
    """
    m = cfg.get("model")
    if not isinstance(m, dict):
        raise ConfigError("config needs a 'model' object")
    present = [keys for keys in DIFFUSIVITY_KEYS if any(k in m for k in keys)]
    if len(present) == 2:
        raise ConfigError("model gives both D_i/D_g and k/alpha/beta; choose one diffusivity "
                          "parameterisation")
    if not present:
        raise ConfigError("model needs D_i/D_g or k/alpha/beta")
    has_r = "r" in m or "A" in m
    has_rates = any(k in m for k in RATE_KEYS + ("K_g",))
    if has_r and has_rates:
        raise ConfigError("model gives both r/A and lambda/K rates; choose one reaction "
                          "parameterisation")
    if not (has_r or has_rates):
        raise ConfigError("model needs r (and A) or lambda_i/lambda_g/K_i")

    try:
        if has_rates:
            rates = [_number(m, k) for k in RATE_KEYS] + [_number(m, "K_g", False, 0.0)]
            r, A, _ = reaction_from_rates(*rates)
        else:
            r = _number(m, "r")
            A = _number(m, "A", required=False)
        if present[0] == DIFFUSIVITY_KEYS[0]:
            model = ModelSpec.from_diffusivities(_number(m, "D_i"), _number(m, "D_g"), r, A)
        else:
            model = ModelSpec.from_roots(_number(m, "k"), _number(m, "alpha"),
                                         _number(m, "beta"), r, A)
    except ConfigError:
        raise
    except (FBWavesError, ValueError) as exc:
        raise ConfigError(f"invalid model: {exc}") from exc
    return model


def regularisations(names) -> list[Regularisation]:
    if isinstance(names, str):
        names = [names]
    out = []
    for n in names:
        if n not in REGULARISATIONS:
            raise ConfigError(f"unknown regularisation {n!r}; expected one of {sorted(REGULARISATIONS)}")
        out.append(REGULARISATIONS[n])
    return out


def section(cfg: dict, name: str) -> dict:
    s = cfg.get(name, {})
    if not isinstance(s, dict):
        raise ConfigError(f"'{name}' must be an object")
    return s
