"""Run configuration: JSON in, validated model objects out.

Example::

    {
      "weights": {"a": ["0.25", "0.75"], "b": ["1/3", "2/3"]},
      "schedule": {"preset": "squares", "max_depth": 1048576},
      "code": "identity",
      "seed": 12345,
      "tau": {"q_grid": [-2, 0, 1, 2], "depths": [255, 65535]}
    }

Weights may be decimal or fraction strings (parsed to the nearest double and
echoed verbatim) or plain JSON numbers.
"""
from __future__ import annotations

import copy
import json
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

from .exceptions import ConfigError
from .params import ModelParams
from .projection import IsometryCode
from .symbolic import DEFAULT_MAX_DEPTH, EpochSchedule

SECTIONS = ("tau", "spectrum", "verify", "sample", "project")


def _number(value: Any, where: str) -> float:
    if isinstance(value, bool):
        raise ConfigError(f"{where}: expected a number, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            return float(Fraction(value.strip()))
        except (ValueError, ZeroDivisionError):
            pass
    raise ConfigError(f"{where}: expected a number or numeric string, got {value!r}")


def _int(value: Any, where: str, minimum: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{where}: expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(f"{where}: must be >= {minimum}, got {value}")
    return value


def _weights(raw: Any, where: str) -> tuple[float, ...]:
    if not isinstance(raw, list):
        raise ConfigError(f"{where}: expected a list of weights")
    return tuple(_number(v, f"{where}[{i}]") for i, v in enumerate(raw))


def _schedule(raw: Any, c1: int, c2: int) -> EpochSchedule:
    raw = {"preset": "squares"} if raw is None else raw
    if isinstance(raw, str):
        raw = {"preset": raw}
    if not isinstance(raw, dict):
        raise ConfigError("schedule: expected an object or a preset name")
    unknown = set(raw) - {"preset", "max_depth", "ratio", "T"}
    if unknown:
        raise ConfigError(f"schedule: unknown field(s) {sorted(unknown)}")
    preset = raw.get("preset", "explicit" if "T" in raw else "squares")
    max_depth = _int(raw.get("max_depth", DEFAULT_MAX_DEPTH), "schedule.max_depth", 1)
    ratio = _number(raw["ratio"], "schedule.ratio") if "ratio" in raw else None
    explicit = None
    if "T" in raw:
        if not isinstance(raw["T"], list):
            raise ConfigError("schedule.T: expected a list of integers")
        explicit = tuple(_int(t, f"schedule.T[{i}]", 1) for i, t in enumerate(raw["T"]))
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return EpochSchedule(preset=preset, c1=c1, c2=c2, max_depth=max_depth,
                                 ratio=ratio, explicit=explicit)
    except ConfigError as exc:
        raise ConfigError(f"schedule: {exc}") from None


def _code(raw: Any) -> IsometryCode:
    if raw is None or raw == "identity":
        return IsometryCode()
    if raw in ("gray", "gray-binary"):
        return IsometryCode("gray")
    if isinstance(raw, dict) and set(raw) == {"permutation"} and isinstance(raw["permutation"], dict):
        perm = raw["permutation"]
        try:
            return IsometryCode("permutation", tuple(perm.get("a", ())), tuple(perm.get("b", ())))
        except Exception as exc:  # noqa: BLE001 - re-raised with the field name
            raise ConfigError(f"code.permutation: {exc}") from None
    raise ConfigError(f"code: expected 'identity', 'gray' or {{'permutation': ...}}, got {raw!r}")


@dataclass(frozen=True)
class RunConfig:
    params: ModelParams
    schedule: EpochSchedule
    code: IsometryCode
    seed: int
    sections: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict)

    def section(self, name: str) -> dict:
        return self.sections.get(name) or {}

    @classmethod
    def from_dict(cls, raw: dict, seed: int | None = None) -> RunConfig:
        if not isinstance(raw, dict):
            raise ConfigError("config: top level must be a JSON object")
        raw = copy.deepcopy(raw)
        if seed is not None:
            raw["seed"] = seed
        unknown = set(raw) - {"alphabets", "weights", "schedule", "code", "seed", *SECTIONS}
        if unknown:
            raise ConfigError(f"config: unknown field(s) {sorted(unknown)}")
        weights = raw.get("weights")
        if not isinstance(weights, dict) or set(weights) != {"a", "b"}:
            raise ConfigError("weights: expected an object with keys 'a' and 'b'")
        a = _weights(weights["a"], "weights.a")
        b = _weights(weights["b"], "weights.b")
        if "alphabets" in raw:
            alph = raw["alphabets"]
            if not isinstance(alph, list) or len(alph) != 2:
                raise ConfigError("alphabets: expected [c1, c2]")
            c1, c2 = (_int(c, f"alphabets[{i}]", 2) for i, c in enumerate(alph))
            if (c1, c2) != (len(a), len(b)):
                raise ConfigError(
                    f"alphabets: [{c1}, {c2}] does not match weight lengths [{len(a)}, {len(b)}]")
        try:
            params = ModelParams(a, b)
        except ConfigError as exc:
            raise ConfigError(f"weights.{exc}") from None
        schedule = _schedule(raw.get("schedule"), params.c1, params.c2)
        code = _code(raw.get("code"))
        seed_value = _int(raw.get("seed", 0), "seed", 0)
        if seed_value >= 2**64:
            raise ConfigError("seed: must fit in 64 bits")
        sections = {}
        for name in SECTIONS:
            if name in raw:
                if not isinstance(raw[name], dict):
                    raise ConfigError(f"{name}: expected an object")
                sections[name] = raw[name]
        return cls(params, schedule, code, seed_value, sections, raw)

    def echo(self) -> str:
        """Compact, key-sorted JSON of the effective configuration."""
        return json.dumps(self.raw, sort_keys=True, separators=(",", ":"))


def load_config(path: str | Path, seed: int | None = None) -> RunConfig:
    text = Path(path).read_text(encoding="utf-8")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return RunConfig.from_dict(raw, seed)


def section_numbers(section: dict, key: str, default: list, where: str) -> list[float]:
    values = section.get(key, default)
    if not isinstance(values, list):
        raise ConfigError(f"{where}.{key}: expected a list")
    return [_number(v, f"{where}.{key}[{i}]") for i, v in enumerate(values)]


def section_ints(section: dict, key: str, default: list, where: str, minimum: int = 0) -> list[int]:
    values = section.get(key, default)
    if not isinstance(values, list):
        raise ConfigError(f"{where}.{key}: expected a list")
    return [_int(v, f"{where}.{key}[{i}]", minimum) for i, v in enumerate(values)]


def section_int(section: dict, key: str, default: int, where: str, minimum: int = 0) -> int:
    return _int(section.get(key, default), f"{where}.{key}", minimum)


def section_number(section: dict, key: str, default, where: str):
    value = section.get(key, default)
    return None if value is None else _number(value, f"{where}.{key}")
