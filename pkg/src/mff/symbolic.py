"""Mixed symbolic spaces: epoch schedules, words and the ultrametric.

Positions are 1-based, as in the usual notation for words
``w = e_1 e_2 ... e_n``.  Position ``j`` carries alphabet ``A1`` (size ``c1``)
when ``T_{2k-1} <= j < T_{2k}`` and alphabet ``A2`` (size ``c2``) when
``T_{2k} <= j < T_{2k+1}``.
"""
from __future__ import annotations

import enum
import math
import warnings
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .exceptions import ConfigError, DomainError

DEFAULT_MAX_DEPTH = 2**20

PRESETS = ("squares", "factorial", "geometric", "explicit")


class Alphabet(enum.IntEnum):
    A1 = 1
    A2 = 2


def _squares(limit: int) -> list[int]:
    bounds = [1, 2]
    while bounds[-1] <= limit:
        bounds.append(bounds[-1] ** 2)
    return bounds


def _factorial(limit: int) -> list[int]:
    bounds = [1]
    k = 2
    while bounds[-1] <= limit:
        bounds.append(bounds[-1] * k)
        k += 1
    return bounds


def _geometric(limit: int, ratio: float) -> list[int]:
    bounds = [1]
    while bounds[-1] <= limit:
        bounds.append(max(bounds[-1] + 1, math.ceil(bounds[-1] * ratio)))
    return bounds


@dataclass(frozen=True)
class EpochSchedule:
    """Epoch boundaries ``T_1 < T_2 < ...`` and the two alphabet sizes.

    ``squares`` (1, 2, 4, 16, 256, 65536, ...) and ``factorial`` have
    unbounded ratios ``T_{k+1}/T_k``.  ``geometric`` and ``explicit``
    schedules are accepted, but the divergence of that ratio cannot be
    checked on a finite prefix; :attr:`caveat` records this.

    For an ``explicit`` list, positions past the last listed boundary belong
    to the final epoch.
    """

    preset: str = "squares"
    c1: int = 2
    c2: int = 2
    max_depth: int = DEFAULT_MAX_DEPTH
    ratio: float | None = None
    explicit: tuple[int, ...] | None = None
    boundaries: tuple[int, ...] = field(init=False, repr=False, compare=False)
    caveat: str | None = field(init=False, repr=False, compare=False)
    _a1_before: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        for name in ("c1", "c2"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 2:
                raise ConfigError(f"{name} must be an integer >= 2, got {value!r}")
        if isinstance(self.max_depth, bool) or not isinstance(self.max_depth, (int, np.integer)) \
                or self.max_depth < 1:
            raise ConfigError(f"max_depth must be a positive integer, got {self.max_depth!r}")
        limit = int(self.max_depth)
        caveat = None
        if self.preset == "squares":
            bounds = _squares(limit)
        elif self.preset == "factorial":
            bounds = _factorial(limit)
        elif self.preset == "geometric":
            if self.ratio is None or not self.ratio > 1:
                raise ConfigError(f"geometric schedule needs ratio > 1, got {self.ratio!r}")
            bounds = _geometric(limit, float(self.ratio))
            caveat = "geometric schedule: T_{k+1}/T_k does not diverge"
        elif self.preset == "explicit":
            if not self.explicit:
                raise ConfigError("explicit schedule needs a non-empty list of boundaries")
            bounds = [int(t) for t in self.explicit]
            if bounds[0] != 1:
                raise ConfigError(f"explicit schedule must start with T_1 = 1, got {bounds[0]}")
            for k, (s, t) in enumerate(zip(bounds, bounds[1:]), start=1):
                if t <= s:
                    raise ConfigError(
                        f"explicit schedule must be strictly increasing: T_{k}={s}, T_{k + 1}={t}")
            object.__setattr__(self, "explicit", tuple(bounds))
            if bounds[-1] <= limit:
                bounds = bounds + [limit + 1]
            caveat = "explicit schedule: divergence of T_{k+1}/T_k is the caller's responsibility"
        else:
            raise ConfigError(f"unknown schedule preset {self.preset!r}; expected one of {PRESETS}")
        if caveat is not None:
            warnings.warn(caveat, stacklevel=3)

        a1_before = [0]
        for k in range(1, len(bounds)):
            span = bounds[k] - bounds[k - 1]
            a1_before.append(a1_before[-1] + (span if k % 2 == 1 else 0))
        object.__setattr__(self, "boundaries", tuple(bounds))
        object.__setattr__(self, "caveat", caveat)
        object.__setattr__(self, "_a1_before", tuple(a1_before))

    def _check(self, j: int, lo: int) -> None:
        if not lo <= j <= self.max_depth:
            raise DomainError(f"position {j} outside [{lo}, {self.max_depth}]")

    def _epoch(self, j: int) -> int:
        """1-based epoch index k with ``T_k <= j < T_{k+1}``."""
        return bisect_right(self.boundaries, j)

    def alphabet_at(self, j: int) -> Alphabet:
        self._check(j, 1)
        return Alphabet.A1 if self._epoch(j) % 2 == 1 else Alphabet.A2

    def alphabet_size(self, j: int) -> int:
        return self.c1 if self.alphabet_at(j) is Alphabet.A1 else self.c2

    def count_a(self, n: int) -> int:
        """Number ``N_n`` of positions ``j <= n`` carrying ``A1``."""
        self._check(n, 0)
        if n == 0:
            return 0
        k = self._epoch(n)
        count = self._a1_before[k - 1]
        if k % 2 == 1:
            count += n - self.boundaries[k - 1] + 1
        return count

    def log_diameter(self, n: int) -> float:
        """Natural log of the diameter of any depth-``n`` cylinder."""
        na = self.count_a(n)
        if n == 0:
            return 0.0
        return -(na * math.log(self.c1) + (n - na) * math.log(self.c2))

    def segments(self, n: int) -> Iterator[tuple[int, int, Alphabet]]:
        """Maximal runs ``[start, stop)`` of positions ``1..n`` sharing an alphabet."""
        self._check(n, 0)
        k = 1
        while k <= len(self.boundaries) and self.boundaries[k - 1] <= n:
            start = self.boundaries[k - 1]
            stop = self.boundaries[k] if k < len(self.boundaries) else n + 1
            yield start, min(stop, n + 1), Alphabet.A1 if k % 2 == 1 else Alphabet.A2
            k += 1

    def sizes(self, n: int) -> np.ndarray:
        """Alphabet size at each position ``1..n`` (index ``j - 1``)."""
        out = np.empty(n, dtype=np.int64)
        for start, stop, tag in self.segments(n):
            out[start - 1:stop - 1] = self.c1 if tag is Alphabet.A1 else self.c2
        return out

    def a1_mask(self, n: int) -> np.ndarray:
        out = np.zeros(n, dtype=bool)
        for start, stop, tag in self.segments(n):
            if tag is Alphabet.A1:
                out[start - 1:stop - 1] = True
        return out


def validate_word(schedule: EpochSchedule, word: Sequence[int]) -> np.ndarray:
    """Return ``word`` as an integer array after checking every digit."""
    digits = np.asarray(word, dtype=np.int64)
    if digits.ndim != 1:
        raise DomainError("a word must be a one-dimensional digit sequence")
    n = digits.size
    if n > schedule.max_depth:
        raise DomainError(f"word of length {n} exceeds max_depth {schedule.max_depth}")
    for start, stop, tag in schedule.segments(n):
        seg = digits[start - 1:stop - 1]
        size = schedule.c1 if tag is Alphabet.A1 else schedule.c2
        if seg.size and (seg.min() < 0 or seg.max() >= size):
            bad = start + int(np.flatnonzero((seg < 0) | (seg >= size))[0])
            raise DomainError(f"digit {digits[bad - 1]} at position {bad} not in alphabet of size {size}")
    return digits


def common_prefix_len(w: Sequence[int], v: Sequence[int]) -> int:
    w = np.asarray(w)
    v = np.asarray(v)
    m = min(w.size, v.size)
    diff = np.flatnonzero(w[:m] != v[:m])
    return int(diff[0]) if diff.size else m


def distance(schedule: EpochSchedule, w: Sequence[int], v: Sequence[int]) -> float:
    """Log of the ultrametric distance; ``-inf`` when the words agree on their common length."""
    k = common_prefix_len(w, v)
    if k == min(len(w), len(v)):
        return -math.inf
    return schedule.log_diameter(k)
