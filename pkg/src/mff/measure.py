"""Product measures on the mixed symbolic space.

A :class:`DigitMeasure` assigns each position the digit law of its epoch:
``a`` on ``A1`` positions and ``b`` on ``A2`` positions.  The base measure and
its tilted companions differ only in those two weight vectors, which are
stored as natural logs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .exceptions import ConfigError, DomainError
from .params import ModelParams
from .spectrum import TiltedWeights, _check_compatible, tilt_alpha, tilt_q
from .symbolic import Alphabet, EpochSchedule, validate_word

__all__ = [
    "DigitMeasure", "derive_rng", "tilt_alpha", "tilt_q",
]

PROB_TOL = 1e-12


def derive_rng(seed: int, index: int) -> np.random.Generator:
    """Generator for sample ``index`` of a batch with master ``seed``.

    The stream depends only on ``(seed, index)``, so batches can be split
    across workers in any way without changing a single draw.
    """
    if seed < 0 or index < 0:
        raise ValueError("seed and index must be non-negative")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(index)])))


@dataclass(frozen=True)
class DigitMeasure:
    schedule: EpochSchedule
    log_a: np.ndarray
    log_b: np.ndarray
    kind: str = "base"
    q_a: float | None = None
    q_b: float | None = None
    _cdf_a: np.ndarray = field(init=False, repr=False, compare=False)
    _cdf_b: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        log_a = np.asarray(self.log_a, dtype=float)
        log_b = np.asarray(self.log_b, dtype=float)
        if (log_a.size, log_b.size) != (self.schedule.c1, self.schedule.c2):
            raise ConfigError(
                f"weight lengths ({log_a.size}, {log_b.size}) do not match alphabets "
                f"({self.schedule.c1}, {self.schedule.c2})")
        for name, lw in (("a", log_a), ("b", log_b)):
            total = math.fsum(np.exp(lw))
            if abs(total - 1.0) > PROB_TOL:
                raise ConfigError(f"digit law {name} sums to {total!r}")
        for arr in (log_a, log_b):
            arr.setflags(write=False)
        object.__setattr__(self, "log_a", log_a)
        object.__setattr__(self, "log_b", log_b)
        object.__setattr__(self, "_cdf_a", self._cdf(log_a))
        object.__setattr__(self, "_cdf_b", self._cdf(log_b))

    @staticmethod
    def _cdf(log_w: np.ndarray) -> np.ndarray:
        cdf = np.cumsum(np.exp(log_w))
        cdf[-1] = 1.0
        return cdf

    @classmethod
    def base(cls, params: ModelParams, schedule: EpochSchedule) -> DigitMeasure:
        _check_compatible(params, schedule)
        return cls(schedule, params.log_a, params.log_b)

    @classmethod
    def from_tilt(cls, tilted: TiltedWeights, schedule: EpochSchedule,
                  kind: str = "tilted") -> DigitMeasure:
        return cls(schedule, tilted.log_a, tilted.log_b, kind, tilted.q_a, tilted.q_b)

    @classmethod
    def tilted_q(cls, params: ModelParams, schedule: EpochSchedule, q: float) -> DigitMeasure:
        """The measure ``mu_q`` with ``mu_q(w) = mu(w)**q |w|**tau_n(q)``."""
        _check_compatible(params, schedule)
        return cls.from_tilt(tilt_q(params, q), schedule, "tilted-q")

    @classmethod
    def tilted_alpha(cls, params: ModelParams, schedule: EpochSchedule,
                     alpha: float) -> DigitMeasure:
        """The measure whose typical points have local exponent ``alpha`` under ``mu``."""
        _check_compatible(params, schedule)
        return cls.from_tilt(tilt_alpha(params, alpha), schedule, "tilted-alpha")

    @property
    def a(self) -> np.ndarray:
        return np.exp(self.log_a)

    @property
    def b(self) -> np.ndarray:
        return np.exp(self.log_b)

    def log_weights_at(self, j: int) -> np.ndarray:
        return self.log_a if self.schedule.alphabet_at(j) is Alphabet.A1 else self.log_b

    def log_mass(self, word: Sequence[int]) -> float:
        """``log m([w])``: the sum of the log digit weights along ``w``."""
        digits = validate_word(self.schedule, word)
        total = 0.0
        for start, stop, tag in self.schedule.segments(digits.size):
            log_w = self.log_a if tag is Alphabet.A1 else self.log_b
            counts = np.bincount(digits[start - 1:stop - 1], minlength=log_w.size)
            used = counts > 0
            total += float(counts[used] @ log_w[used])
        return total

    def log_mass_many(self, words: np.ndarray) -> np.ndarray:
        """Row-wise :meth:`log_mass` for a 2-D array of equal-depth words."""
        words = np.asarray(words, dtype=np.int64)
        n = words.shape[1]
        validate_word(self.schedule, words.max(axis=0) if words.size else [])
        if words.size and words.min() < 0:
            raise DomainError("negative digit")
        out = np.zeros(words.shape[0])
        for start, stop, tag in self.schedule.segments(n):
            log_w = self.log_a if tag is Alphabet.A1 else self.log_b
            out += log_w[words[:, start - 1:stop - 1]].sum(axis=1)
        return out

    def sample(self, depth: int, seed: int, index: int = 0) -> np.ndarray:
        """Digits ``1..depth`` drawn independently from the epoch laws."""
        if not 0 <= depth <= self.schedule.max_depth:
            raise DomainError(f"depth {depth} outside [0, {self.schedule.max_depth}]")
        rng = derive_rng(seed, index)
        out = np.empty(depth, dtype=np.int64)
        for start, stop, tag in self.schedule.segments(depth):
            cdf = self._cdf_a if tag is Alphabet.A1 else self._cdf_b
            u = rng.random(stop - start)
            out[start - 1:stop - 1] = np.searchsorted(cdf, u, side="right")
        return out
