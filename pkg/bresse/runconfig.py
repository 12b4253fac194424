# bresse/runconfig.py

import json
import math
import numbers
import os
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Iterable, Mapping, Optional, Tuple, Union

from .config import (
    DEFAULT_FIT_WINDOW,
    DEFAULT_LAMBDA_MAX,
    DEFAULT_N,
    DEFAULT_PARAMS,
    DEFAULT_SCAN_FACTORS,
    DEFAULT_SEED,
    DEFAULT_SHOOTING_MODES,
    DEFAULT_SWEEP_COUNT,
    DEFAULT_T,
    OUTPUT_DIR,
    VERIFY_LAMBDA,
    VERIFY_TRIALS,
)
from .exceptions import ConfigError, ParameterError
from .model import BresseParams, impedances


class Scenario(str, Enum):
    DEFAULT = "default"
    CONSERVATIVE = "conservative"  # all gains zero
    TIMOSHENKO = "timoshenko"  # ell = 0
    MATCHED_IMPEDANCE = "matched_impedance"  # gamma_j = Z_j


@dataclass(frozen=True)
class RunConfig:
    params: BresseParams = field(default_factory=BresseParams)
    N: int = DEFAULT_N
    dt: Optional[float] = None  # None: h / (2 max wave speed)
    T: float = DEFAULT_T
    lambda_max: float = DEFAULT_LAMBDA_MAX
    sweep_count: int = DEFAULT_SWEEP_COUNT
    scenario: Scenario = Scenario.DEFAULT
    output_dir: str = OUTPUT_DIR
    seed: int = DEFAULT_SEED
    fit_window: Tuple[float, float] = DEFAULT_FIT_WINDOW
    lumped: bool = False
    verify_lambda: float = VERIFY_LAMBDA
    verify_trials: int = VERIFY_TRIALS
    shooting_modes: int = DEFAULT_SHOOTING_MODES
    scan_factors: Tuple[float, ...] = DEFAULT_SCAN_FACTORS

    def to_dict(self) -> Dict[str, Any]:
        out = {name: getattr(self, name) for name in _RUN_FIELDS}
        out.update(self.params.to_dict())
        out["scenario"] = self.scenario.value
        out["fit_window"] = list(self.fit_window)
        out["scan_factors"] = list(self.scan_factors)
        return out


_PARAM_FIELDS = tuple(DEFAULT_PARAMS)
_RUN_FIELDS = (
    "N", "dt", "T", "lambda_max", "sweep_count", "scenario", "output_dir", "seed",
    "fit_window", "lumped", "verify_lambda", "verify_trials", "shooting_modes", "scan_factors",
)
KNOWN_KEYS = frozenset(_PARAM_FIELDS + _RUN_FIELDS)


def _is_number(value) -> bool:
    return isinstance(value, numbers.Real) and not isinstance(value, bool)


def _positive_float(key: str, value) -> float:
    if not _is_number(value) or not math.isfinite(value) or value <= 0:
        raise ConfigError(key, f"must be a positive number, got {value!r}")
    return float(value)


def _int_at_least(key: str, value, low: int) -> int:
    if not _is_number(value) or int(value) != value or value < low:
        raise ConfigError(key, f"must be an integer >= {low}, got {value!r}")
    return int(value)


def _parse_value(text: str):
    """JSON literal when possible (numbers, booleans, lists), else the raw string."""
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def parse_overrides(pairs: Iterable[str]) -> Dict[str, Any]:
    """Turn ["key=value", ...] into a dict; malformed pairs raise ConfigError."""
    out: Dict[str, Any] = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ConfigError(pair, "overrides must look like key=value")
        out[key] = _parse_value(value.strip())
    return out


def load_config_file(path: str) -> Dict[str, Any]:
    """Read a flat JSON object."""
    if not os.path.exists(path):
        raise ConfigError("config", f"file {path} does not exist")
    with open(path, "r", encoding="utf-8") as handle:
        try:
            data = json.load(handle)
        except json.JSONDecodeError as e:
            raise ConfigError("config", f"{path} is not valid JSON: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError("config", f"{path} must hold a flat JSON object")
    return data


def apply_scenario(params: BresseParams, scenario: Scenario) -> BresseParams:
    """Overwrite only the fields the scenario names."""
    if scenario is Scenario.CONSERVATIVE:
        return params.with_updates(gamma1=0.0, gamma2=0.0, gamma3=0.0)
    if scenario is Scenario.TIMOSHENKO:
        return params.with_updates(ell=0.0)
    if scenario is Scenario.MATCHED_IMPEDANCE:
        z = impedances(params)
        return params.with_updates(gamma1=z.z1, gamma2=z.z2, gamma3=z.z3)
    return params


def parse_config(
    path: Optional[str] = None,
    overrides: Optional[Union[Mapping[str, Any], Iterable[str]]] = None,
    out: Optional[str] = None,
) -> RunConfig:
    """
    Build a validated RunConfig from defaults, a JSON file and overrides.

    Args:
        path: Flat JSON config file (optional)
        overrides: Mapping or "key=value" strings applied after the file
        out: Output directory, taking precedence over both

    Returns:
        RunConfig; the scenario preset is applied last and the result is
        validated again

    Raises:
        ConfigError: unknown key, malformed file or invalid value (names the field)
    """
    merged: Dict[str, Any] = {}
    if path:
        merged.update(load_config_file(path))
    if overrides:
        merged.update(dict(overrides) if isinstance(overrides, Mapping) else parse_overrides(overrides))
    if out:
        merged["output_dir"] = out

    unknown = sorted(set(merged) - KNOWN_KEYS)
    if unknown:
        raise ConfigError(unknown[0], f"unknown key (known keys: {', '.join(sorted(KNOWN_KEYS))})")

    try:
        scenario = Scenario(merged.get("scenario", Scenario.DEFAULT.value))
    except ValueError:
        raise ConfigError("scenario", f"expected one of {[s.value for s in Scenario]}, got {merged['scenario']!r}")

    param_values = {name: merged.get(name, DEFAULT_PARAMS[name]) for name in _PARAM_FIELDS}
    try:
        params = apply_scenario(BresseParams(**param_values), scenario)
    except ParameterError as e:
        raise ConfigError(e.field, str(e).split(": ", 1)[-1]) from e

    dt = merged.get("dt")
    window = merged.get("fit_window", DEFAULT_FIT_WINDOW)
    if (not isinstance(window, (list, tuple)) or len(window) != 2
            or not all(_is_number(t) for t in window) or not 0 <= window[0] < window[1]):
        raise ConfigError("fit_window", f"must be two increasing nonnegative times, got {window!r}")
    factors = merged.get("scan_factors", DEFAULT_SCAN_FACTORS)
    if not isinstance(factors, (list, tuple)) or not factors or not all(_is_number(f) and f >= 0 for f in factors):
        raise ConfigError("scan_factors", f"must be a non-empty list of nonnegative numbers, got {factors!r}")
    lumped = merged.get("lumped", False)
    if not isinstance(lumped, bool):
        raise ConfigError("lumped", f"must be true or false, got {lumped!r}")
    output_dir = merged.get("output_dir", OUTPUT_DIR)
    if not isinstance(output_dir, str) or not output_dir:
        raise ConfigError("output_dir", f"must be a directory path, got {output_dir!r}")
    verify_lambda = merged.get("verify_lambda", VERIFY_LAMBDA)
    if not _is_number(verify_lambda) or not math.isfinite(verify_lambda):
        raise ConfigError("verify_lambda", f"must be a real number, got {verify_lambda!r}")

    return RunConfig(
        params=params,
        N=_int_at_least("N", merged.get("N", DEFAULT_N), 1),
        dt=None if dt is None else _positive_float("dt", dt),
        T=_positive_float("T", merged.get("T", DEFAULT_T)),
        lambda_max=_positive_float("lambda_max", merged.get("lambda_max", DEFAULT_LAMBDA_MAX)),
        sweep_count=_int_at_least("sweep_count", merged.get("sweep_count", DEFAULT_SWEEP_COUNT), 2),
        scenario=scenario,
        output_dir=output_dir,
        seed=_int_at_least("seed", merged.get("seed", DEFAULT_SEED), 0),
        fit_window=(float(window[0]), float(window[1])),
        lumped=lumped,
        verify_lambda=float(verify_lambda),
        verify_trials=_int_at_least("verify_trials", merged.get("verify_trials", VERIFY_TRIALS), 1),
        shooting_modes=_int_at_least("shooting_modes", merged.get("shooting_modes", DEFAULT_SHOOTING_MODES), 0),
        scan_factors=tuple(float(f) for f in factors),
    )
