"""Experiment configuration: JSON schema, validation and hashing.

A config is a JSON object::

    {
      "family": {"kind": "ratio_power"},
      "p": 2,
      "K": [1.0, 1.02],
      "U": {"center": [], "radius": 1.0},
      "V": {"center": [[0, 1.0]], "radius": 0.5},
      "M": 1,
      "metric": "lp",                      # or "fnorm", or a full metric object
      "budget_cap": 1000000,
      "grid_per_block": 20,
      "horizon_policy": "scheduled",       # or "exhaustive"
      "output_dir": "runs/demo"
    }

Only ``family``, ``p``, ``K``, ``U``, ``V`` and ``M`` are required.
"""

import hashlib
import json
import math
from dataclasses import dataclass
from typing import Optional

from .constructor import DEFAULT_CAP
from .errors import ConfigError
from .sequence_space import FNormLadder, LpNorm, OpenBall, Seminorm, SparseVector, metric_from_json
from .weight_families import CompactInterval, WeightFamily, family_from_json

POLICIES = ("scheduled", "exhaustive")
# cut-offs of the default F-norm ladder: p_1 sees e_0, p_2 sees e_0..e_10, p_3 everything
DEFAULT_FNORM_CUTS = (0, 10)


@dataclass(frozen=True)
class ExperimentConfig:
    family: WeightFamily
    p: float
    K: CompactInterval
    U: OpenBall
    V: OpenBall
    M: int
    metric_name: str = "lp"
    budget_cap: int = DEFAULT_CAP
    grid_per_block: int = 20
    horizon_policy: str = "scheduled"
    output_dir: Optional[str] = None
    source: Optional[dict] = None

    @property
    def metric(self):
        return self.V.metric

    def config_hash(self):
        blob = json.dumps(self.source, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


def default_fnorm(p):
    return FNormLadder(tuple(Seminorm(p, c) for c in DEFAULT_FNORM_CUTS) + (Seminorm(p, None),))


def _metric(choice, p, errors):
    if choice in (None, "lp"):
        return LpNorm(p), "lp"
    if choice == "fnorm":
        return default_fnorm(p), "fnorm"
    if isinstance(choice, dict):
        try:
            m = metric_from_json(choice)
        except (ValueError, KeyError, TypeError) as exc:
            errors.append(f"metric: {exc}")
            return None, None
        return m, choice.get("kind")
    errors.append(f"metric: expected 'lp', 'fnorm' or an object, got {choice!r}")
    return None, None


def _ball(name, data, metric, errors):
    if not isinstance(data, dict):
        errors.append(f"{name}: expected an object with center and radius")
        return None
    try:
        center = SparseVector.from_json(data.get("center", []))
    except (ValueError, TypeError) as exc:
        errors.append(f"{name}.center: {exc}")
        return None
    radius = data.get("radius")
    if not isinstance(radius, (int, float)) or isinstance(radius, bool):
        errors.append(f"{name}.radius: expected a number")
        return None
    if not (radius > 0 and math.isfinite(radius)):
        errors.append(f"{name}.radius: must be positive and finite, got {radius}")
        return None
    return OpenBall(center, float(radius), metric)


def _positive_int(name, value, errors):
    if not isinstance(value, int) or isinstance(value, bool) or value < 1:
        errors.append(f"{name}: expected an integer >= 1, got {value!r}")
        return None
    return value


def config_from_dict(data: dict, overrides: Optional[dict] = None) -> ExperimentConfig:
    """Validate a decoded config; raise :class:`ConfigError` listing every problem."""
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    data = dict(data)
    for k, v in (overrides or {}).items():
        if v is not None:
            data[k] = v
    errors = []
    for key in ("family", "p", "K", "U", "V", "M"):
        if key not in data:
            errors.append(f"{key}: required")
    if errors:
        raise ConfigError(errors)

    family = None
    try:
        family = family_from_json(data["family"])
    except (ValueError, KeyError, TypeError, AttributeError) as exc:
        errors.append(f"family: {exc}")

    p = data["p"]
    if not isinstance(p, (int, float)) or isinstance(p, bool) or not (p >= 1 and math.isfinite(p)):
        errors.append(f"p: expected a finite number >= 1, got {p!r}")
        p = None
    else:
        p = float(p)

    K = None
    try:
        a, b = data["K"]
        K = CompactInterval(float(a), float(b))
    except (ValueError, TypeError) as exc:
        errors.append(f"K: {exc}")
    if family is not None and K is not None and p is not None:
        dom = family.parameter_domain(p)
        if not K.within(dom):
            errors.append(f"K: [{K.a:g}, {K.b:g}] is not inside {dom.describe()} for {family.kind} on l^{p:g}")

    metric, metric_name = (None, None) if p is None else _metric(data.get("metric"), p, errors)
    U = V = None
    if metric is not None:
        U = _ball("U", data["U"], metric, errors)
        V = _ball("V", data["V"], metric, errors)
        if V is not None and V.center.is_zero():
            errors.append("V.center: must be nonzero")

    M = _positive_int("M", data["M"], errors)
    cap = _positive_int("budget_cap", data.get("budget_cap", DEFAULT_CAP), errors)
    grid = _positive_int("grid_per_block", data.get("grid_per_block", 20), errors)
    policy = data.get("horizon_policy", "scheduled")
    if policy not in POLICIES:
        errors.append(f"horizon_policy: expected one of {POLICIES}, got {policy!r}")
    out = data.get("output_dir")
    if out is not None and not isinstance(out, str):
        errors.append("output_dir: expected a string")

    if errors:
        raise ConfigError(errors)
    return ExperimentConfig(
        family=family,
        p=p,
        K=K,
        U=U,
        V=V,
        M=M,
        metric_name=metric_name,
        budget_cap=cap,
        grid_per_block=grid,
        horizon_policy=policy,
        output_dir=out,
        source=data,
    )


def parse_config(text: str, overrides: Optional[dict] = None) -> ExperimentConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}") from None
    return config_from_dict(data, overrides)


def load_config(path, overrides=None) -> ExperimentConfig:
    with open(path) as fh:
        return parse_config(fh.read(), overrides)

