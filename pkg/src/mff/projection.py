"""Projection of the symbolic space onto ``[0, 1]``.

The digit map sends ``e_1 e_2 ...`` to ``sum_n e_n |w_n|`` where ``|w_n|`` is
the diameter of a depth-``n`` cylinder, so depth-``n`` cylinders become the
mixed-radix basic intervals of generation ``n``.  Interval navigation works
digit by digit with carries and borrows.

Isometry codes act on words before projection.  For the Gray code the
isometry ``g`` is the prefix-XOR map; the preimage of a basic interval's word
is therefore its Gray encoding, and adjacent intervals have preimages that
differ in exactly one digit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from .exceptions import BoundaryError, DomainError, UnsupportedCodeError
from .measure import DigitMeasure
from .symbolic import EpochSchedule, validate_word

FLOAT_BITS = 52


def _cell_count(schedule: EpochSchedule, n: int) -> int:
    count = 1
    for start, stop, tag in schedule.segments(n):
        count *= (schedule.c1 if tag == 1 else schedule.c2) ** (stop - start)
    return count


def gamma_point(schedule: EpochSchedule, word: Sequence[int], exact: bool = False):
    """Image of (the finite prefix) ``word`` under the digit map."""
    digits = validate_word(schedule, word)
    if exact:
        return interval_of_word(schedule, digits).left
    if digits.size == 0:
        return 0.0
    scales = np.cumprod(1.0 / schedule.sizes(digits.size))
    return math.fsum((digits * scales).tolist())


@dataclass(frozen=True)
class BasicInterval:
    """The generation-``n`` interval that is the image of the cylinder ``[word]``."""

    schedule: EpochSchedule
    word: tuple[int, ...]

    @property
    def depth(self) -> int:
        return len(self.word)

    @property
    def iota(self) -> int:
        """Mixed-radix index of the interval among its generation, left to right."""
        index = 0
        for d, size in zip(self.word, self.schedule.sizes(self.depth).tolist()):
            index = index * size + d
        return index

    @property
    def left(self) -> Fraction:
        return Fraction(self.iota, _cell_count(self.schedule, self.depth))

    @property
    def right(self) -> Fraction:
        return Fraction(self.iota + 1, _cell_count(self.schedule, self.depth))

    @property
    def log_length(self) -> float:
        return self.schedule.log_diameter(self.depth)


def interval_of_word(schedule: EpochSchedule, word: Sequence[int]) -> BasicInterval:
    return BasicInterval(schedule, tuple(validate_word(schedule, word).tolist()))


def word_of_index(schedule: EpochSchedule, n: int, index: int) -> tuple[int, ...]:
    """Digits of the ``index``-th generation-``n`` interval (0-based)."""
    total = _cell_count(schedule, n)
    if not 0 <= index < total:
        raise DomainError(f"index {index} outside [0, {total})")
    digits = []
    for size in reversed(schedule.sizes(n).tolist()):
        index, d = divmod(index, size)
        digits.append(d)
    return tuple(reversed(digits))


def interval_containing(schedule: EpochSchedule, x, n: int) -> BasicInterval:
    """Generation-``n`` interval containing ``x``; the left one at shared endpoints.

    Floats are accepted only while the generation has at most ``2**52`` cells;
    deeper queries should pass the digit stream to :func:`interval_of_word`.
    """
    if isinstance(x, float) and -schedule.log_diameter(n) > FLOAT_BITS * math.log(2) + 1e-9:
        raise DomainError(
            f"depth {n} is finer than float resolution; pass a digit stream instead")
    value = Fraction(x)
    if not 0 <= value <= 1:
        raise DomainError(f"x={x!r} outside [0, 1]")
    sizes = schedule.sizes(n).tolist()
    if value == 1:
        return BasicInterval(schedule, tuple(s - 1 for s in sizes))
    digits = []
    for size in sizes:
        value *= size
        d = math.floor(value)
        digits.append(d)
        value -= d
    word = tuple(digits)
    if value == 0 and any(word):
        word = _step(word, sizes, -1)
    return BasicInterval(schedule, word)


def _step(word: Sequence[int], sizes: Sequence[int], direction: int) -> tuple[int, ...] | None:
    """Same-depth successor (``+1``) or predecessor (``-1``) with carry/borrow."""
    w = np.asarray(word, dtype=np.int64)
    top = np.asarray(sizes, dtype=np.int64) - 1
    if direction > 0:
        movable = np.flatnonzero(w != top)
        if not movable.size:
            return None
        k = movable[-1]
        out = w.copy()
        out[k] += 1
        out[k + 1:] = 0
    else:
        movable = np.flatnonzero(w != 0)
        if not movable.size:
            return None
        k = movable[-1]
        out = w.copy()
        out[k] -= 1
        out[k + 1:] = top[k + 1:]
    return tuple(out.tolist())


def neighbors(schedule: EpochSchedule, interval: BasicInterval):
    """``(left neighbour, right neighbour)``; ``None`` at the ends of ``[0, 1]``."""
    sizes = schedule.sizes(interval.depth)
    prev = _step(interval.word, sizes, -1)
    nxt = _step(interval.word, sizes, +1)
    return (None if prev is None else BasicInterval(schedule, prev),
            None if nxt is None else BasicInterval(schedule, nxt))


def neighbor_split_depth(schedule: EpochSchedule, word: Sequence[int], side: str) -> int:
    """Common-prefix length of ``word`` and its right (``'+'``) or left (``'-'``) neighbour.

    Equals the 0-based index of the last digit that is not maximal (``'+'``)
    or not zero (``'-'``).
    """
    w = np.asarray(word, dtype=np.int64)
    if side == "+":
        movable = np.flatnonzero(w != schedule.sizes(w.size) - 1)
    elif side == "-":
        movable = np.flatnonzero(w != 0)
    else:
        raise ValueError(f"side must be '+' or '-', got {side!r}")
    if not movable.size:
        raise BoundaryError(f"no {side} neighbour at the edge of [0, 1]")
    return int(movable[-1])


# -- isometry codes -----------------------------------------------------------

def _binary(word: Sequence[int]) -> np.ndarray:
    w = np.asarray(word, dtype=np.int64)
    if w.size and (w.min() < 0 or w.max() > 1):
        raise UnsupportedCodeError("Gray codes need binary digits")
    return w


def gray_encode(word: Sequence[int]) -> tuple[int, ...]:
    """``y_j = x_j XOR x_{j-1}`` with ``x_0 = 0``."""
    w = _binary(word)
    out = w.copy()
    out[1:] ^= w[:-1]
    return tuple(out.tolist())


def gray_decode(word: Sequence[int]) -> tuple[int, ...]:
    """``y_j = x_1 XOR ... XOR x_j``; inverse of :func:`gray_encode`."""
    w = _binary(word)
    return tuple(np.bitwise_xor.accumulate(w).tolist()) if w.size else ()


@dataclass(frozen=True)
class IsometryCode:
    """A prefix-preserving bijection ``g`` of the symbolic space.

    ``kind`` is ``'identity'``, ``'gray'`` (binary alphabets only) or
    ``'permutation'`` with one digit permutation per alphabet.
    """

    kind: str = "identity"
    perm_a: tuple[int, ...] | None = None
    perm_b: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("identity", "gray", "permutation"):
            raise UnsupportedCodeError(f"unknown isometry code {self.kind!r}")
        if self.kind == "permutation":
            for name in ("perm_a", "perm_b"):
                perm = getattr(self, name)
                if perm is None or sorted(perm) != list(range(len(perm))):
                    raise UnsupportedCodeError(f"{name} must be a permutation of 0..c-1, got {perm!r}")
                object.__setattr__(self, name, tuple(int(p) for p in perm))

    def _check(self, schedule: EpochSchedule) -> None:
        if self.kind == "gray" and (schedule.c1, schedule.c2) != (2, 2):
            raise UnsupportedCodeError("the Gray code is defined for binary alphabets only")
        if self.kind == "permutation" and (len(self.perm_a), len(self.perm_b)) != (schedule.c1, schedule.c2):
            raise UnsupportedCodeError("permutation lengths do not match the alphabets")

    def _permute(self, schedule: EpochSchedule, word, inverse: bool) -> tuple[int, ...]:
        w = validate_word(schedule, word)
        pa, pb = np.asarray(self.perm_a), np.asarray(self.perm_b)
        if inverse:
            pa, pb = np.argsort(pa), np.argsort(pb)
        mask = schedule.a1_mask(w.size)
        return tuple(np.where(mask, pa[np.where(mask, w, 0)], pb[np.where(mask, 0, w)]).tolist())

    def forward(self, schedule: EpochSchedule, word: Sequence[int]) -> tuple[int, ...]:
        """``g(word)``."""
        self._check(schedule)
        if self.kind == "gray":
            return gray_decode(word)
        if self.kind == "permutation":
            return self._permute(schedule, word, inverse=False)
        return tuple(int(d) for d in word)

    def preimage(self, schedule: EpochSchedule, word: Sequence[int]) -> tuple[int, ...]:
        """``g^{-1}(word)``."""
        self._check(schedule)
        if self.kind == "gray":
            return gray_encode(word)
        if self.kind == "permutation":
            return self._permute(schedule, word, inverse=True)
        return tuple(int(d) for d in word)


IDENTITY = IsometryCode()


def nu_log_mass_interval(measure: DigitMeasure, code: IsometryCode, interval: BasicInterval) -> float:
    """``log nu_g(I) = log mu(g^{-1}(word of I))``."""
    return measure.log_mass(code.preimage(measure.schedule, interval.word))


class LogBracket(NamedTuple):
    lower: float
    upper: float

    @property
    def exact(self) -> bool:
        return self.lower == self.upper


def _cover(lo: tuple[int, ...], hi: tuple[int, ...], sizes: list[int]) -> list[tuple[int, ...]]:
    """Maximal cylinders whose union is the cell range ``[lo, hi]``."""
    depth = len(lo)

    def tail_up(k: int) -> list[tuple[int, ...]]:
        if not any(lo[k:]):
            return [lo[:k]]
        return tail_up(k + 1) + [lo[:k] + (d,) for d in range(lo[k] + 1, sizes[k])]

    def tail_down(k: int) -> list[tuple[int, ...]]:
        if all(d == s - 1 for d, s in zip(hi[k:], sizes[k:])):
            return [hi[:k]]
        return tail_down(k + 1) + [hi[:k] + (d,) for d in range(hi[k])]

    s = 0
    while s < depth and lo[s] == hi[s]:
        s += 1
    if s == depth:
        return [lo]
    if not any(lo[s:]) and all(d == z - 1 for d, z in zip(hi[s:], sizes[s:])):
        return [lo[:s]]
    middle = [lo[:s] + (d,) for d in range(lo[s] + 1, hi[s])]
    return tail_up(s + 1) + middle + tail_down(s + 1)


def _log_mass_of_range(measure: DigitMeasure, code: IsometryCode, schedule: EpochSchedule,
                       first: int, last: int, depth: int) -> float:
    if first > last:
        return -math.inf
    sizes = schedule.sizes(depth).tolist()
    pieces = _cover(word_of_index(schedule, depth, first), word_of_index(schedule, depth, last), sizes)
    logs = [measure.log_mass(code.preimage(schedule, piece)) for piece in pieces]
    return float(np.logaddexp.reduce(logs))


def nu_log_mass_ball(measure: DigitMeasure, code: IsometryCode, x, r, depth_cap: int) -> LogBracket:
    """Bracket for ``log nu_g([x - r, x + r] ∩ [0, 1])``.

    The lower end sums the generation-``depth_cap`` cells inside the ball, the
    upper end those meeting it; they coincide when both ends of the ball lie
    on the grid of that generation.
    """
    schedule = measure.schedule
    x, r = Fraction(x), Fraction(r)
    if not 0 <= x <= 1:
        raise DomainError(f"x={x} outside [0, 1]")
    if r <= 0:
        raise DomainError("radius must be positive")
    if r >= 1:
        return LogBracket(0.0, 0.0)
    left, right = max(Fraction(0), x - r), min(Fraction(1), x + r)
    cells = _cell_count(schedule, depth_cap)
    lo_scaled, hi_scaled = left * cells, right * cells
    inner = (math.ceil(lo_scaled), math.floor(hi_scaled) - 1)
    outer = (math.floor(lo_scaled), math.ceil(hi_scaled) - 1)
    lower = _log_mass_of_range(measure, code, schedule, *inner, depth_cap)
    if inner == outer:
        return LogBracket(lower, lower)
    upper = _log_mass_of_range(measure, code, schedule, *outer, depth_cap)
    return LogBracket(lower, min(upper, 0.0))
