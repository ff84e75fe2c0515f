import math
import os
import threading
from typing import Any, Dict, Optional

_DEFAULTS = {
    "tol": 1e-9,
    "theorem_tol": 1e-8,
    "seed": 0,
    "max_attempts": 8,
    "ambiguity_factor": 10.0,
}

_settings: Optional[Dict[str, Any]] = None
_lock = threading.Lock()


def _load() -> Dict[str, Any]:
    settings = dict(_DEFAULTS)
    env_tol = os.environ.get("NILSYM_TOL")
    if env_tol:
        try:
            settings["tol"] = _check_tol("NILSYM_TOL", float(env_tol))
        except ValueError as e:
            raise ValueError(f"Invalid NILSYM_TOL '{env_tol}': {e}") from None
    return settings


def _check_tol(name: str, value: float) -> float:
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise TypeError(f"{name} must be a number, got {type(value).__name__}")
    if not math.isfinite(value) or value <= 0:
        raise ValueError(f"{name} must be a positive finite number, got {value}")
    return float(value)


def _settings_view() -> Dict[str, Any]:
    global _settings
    with _lock:
        if _settings is None:
            _settings = _load()
        return dict(_settings)


def configure(
    tol: Optional[float] = None,
    theorem_tol: Optional[float] = None,
    seed: Optional[int] = None,
    max_attempts: Optional[int] = None,
    ambiguity_factor: Optional[float] = None,
) -> None:
    """Update global settings. Values left as None keep their current value."""
    global _settings
    updates: Dict[str, Any] = {}
    if tol is not None:
        updates["tol"] = _check_tol("tol", tol)
    if theorem_tol is not None:
        updates["theorem_tol"] = _check_tol("theorem_tol", theorem_tol)
    if ambiguity_factor is not None:
        if _check_tol("ambiguity_factor", ambiguity_factor) <= 1:
            raise ValueError(f"ambiguity_factor must exceed 1, got {ambiguity_factor}")
        updates["ambiguity_factor"] = float(ambiguity_factor)
    if seed is not None:
        if not isinstance(seed, int) or seed < 0:
            raise ValueError(f"seed must be a non-negative integer, got {seed!r}")
        updates["seed"] = seed
    if max_attempts is not None:
        if not isinstance(max_attempts, int) or max_attempts < 1:
            raise ValueError(f"max_attempts must be a positive integer, got {max_attempts!r}")
        updates["max_attempts"] = max_attempts
    with _lock:
        if _settings is None:
            _settings = _load()
        _settings.update(updates)


def reset() -> None:
    """Drop configured values; the next read reloads defaults and NILSYM_TOL."""
    global _settings
    with _lock:
        _settings = None


def get(name: str) -> Any:
    settings = _settings_view()
    if name not in settings:
        raise KeyError(f"Unknown setting '{name}'. Available settings: {sorted(settings)}")
    return settings[name]


def resolve_tol(tol: Optional[float] = None) -> float:
    return get("tol") if tol is None else _check_tol("tol", tol)


def resolve_seed(seed: Optional[int] = None) -> int:
    return get("seed") if seed is None else seed
