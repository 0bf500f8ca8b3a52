from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .exceptions import ConfigError

SUM_TOL = 1e-12


def _as_weights(name: str, values: Sequence[float]) -> tuple[float, ...]:
    try:
        weights = tuple(float(v) for v in values)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name}: weights must be real numbers ({exc})") from None
    if len(weights) < 2:
        raise ConfigError(f"{name}: need at least two weights, got {len(weights)}")
    for i, w in enumerate(weights):
        if not 0.0 < w < 1.0:
            raise ConfigError(f"{name}[{i}] = {w!r} is not in the open interval (0, 1)")
    total = math.fsum(weights)
    if abs(total - 1.0) > SUM_TOL:
        raise ConfigError(f"{name}: weights sum to {total!r}, not 1 within {SUM_TOL:g}")
    return weights


@dataclass(frozen=True)
class ModelParams:
    """Digit weights ``a`` (alphabet A1, length ``c1``) and ``b`` (A2, length ``c2``)."""

    a: tuple[float, ...]
    b: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", _as_weights("a", self.a))
        object.__setattr__(self, "b", _as_weights("b", self.b))

    @property
    def c1(self) -> int:
        return len(self.a)

    @property
    def c2(self) -> int:
        return len(self.b)

    @property
    def log_a(self) -> np.ndarray:
        return np.log(np.asarray(self.a))

    @property
    def log_b(self) -> np.ndarray:
        return np.log(np.asarray(self.b))

    def weights(self, which: str) -> np.ndarray:
        if which == "a":
            return np.asarray(self.a)
        if which == "b":
            return np.asarray(self.b)
        raise ValueError(f"which must be 'a' or 'b', got {which!r}")

    def base(self, which: str) -> int:
        return self.c1 if which == "a" else self.c2
