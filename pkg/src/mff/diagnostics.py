"""Weak-doubling diagnostics for projected measures.

A point ``x`` is exceptional at depth ``n`` (``x in E_n``) when the word of
its generation-``n`` interval shares fewer than ``<n> = floor(n - sqrt n)``
leading digits with the word of one of its neighbours.  Off ``E_n`` the
neighbouring masses differ by at most ``C0**(sqrt(n) + 1)``; the mass of
``E_n`` under any measure whose children carry at most a fraction ``C1`` of
their parent is at most ``2 * C1**sqrt(n)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ._parallel import ordered_map
from .exceptions import BoundaryError, ResourceError
from .measure import DigitMeasure
from .params import ModelParams
from .projection import IDENTITY, IsometryCode, _step, neighbor_split_depth
from .spectrum import tilt_q
from .symbolic import EpochSchedule

EXHAUSTIVE_BUDGET = 2**22
RATIO_SLACK = 1e-9


def threshold(n: int) -> int:
    """``floor(n - sqrt(n))`` in exact integer arithmetic."""
    if n < 1:
        raise ValueError(f"threshold needs n >= 1, got {n}")
    root = math.isqrt(n)
    return n - (root if root * root == n else root + 1)


@dataclass(frozen=True)
class DoublingConstants:
    c0: float
    c1: float
    c2: float
    degenerate: bool

    @property
    def c0_prime(self) -> float:
        """Smallest mass fraction of a grandchild cylinder: ``c2**2``."""
        return self.c2 ** 2


def _constants(a: np.ndarray, b: np.ndarray) -> DoublingConstants:
    c0 = max(a.max() / a.min(), b.max() / b.min())
    return DoublingConstants(float(c0), float(max(a.max(), b.max())),
                             float(min(a.min(), b.min())), not c0 > 1.0)


def constants(params: ModelParams, q: float | None = None) -> DoublingConstants:
    """``C0`` (largest same-alphabet weight ratio), ``C1`` and ``C2``.

    ``C1`` is the largest weight of the base measure, or of the ``q``-tilted
    measure when ``q`` is given; ``C2`` is the smallest base weight.
    ``degenerate`` is set when ``C0 = 1`` (uniform weights).
    """
    a, b = params.weights("a"), params.weights("b")
    base = _constants(a, b)
    if q is None:
        return base
    tw = tilt_q(params, q)
    return DoublingConstants(base.c0, float(max(tw.a.max(), tw.b.max())), base.c2, base.degenerate)


def measure_constants(measure: DigitMeasure) -> DoublingConstants:
    return _constants(measure.a, measure.b)


def en_membership(schedule: EpochSchedule, word: Sequence[int]) -> bool:
    """Whether the interval with this depth-``n`` word lies in ``E_n``.

    A missing neighbour (an end of ``[0, 1]``) never makes a point exceptional.
    """
    n = len(word)
    cut = threshold(n) if n else 0
    for side in ("+", "-"):
        try:
            if neighbor_split_depth(schedule, word, side) < cut:
                return True
        except BoundaryError:
            continue
    return False


@dataclass(frozen=True)
class DoublingReport:
    n: int
    samples: int
    frac_in_En: float
    bound: float
    ratio_violations: int
    non_members: int
    max_log_ratio: float
    log_ratio_bound: float
    constants: DoublingConstants
    sampler_c1: float
    extra: dict = field(default_factory=dict)


def _sample_doubling(sampler: DigitMeasure, nu: DigitMeasure, code: IsometryCode,
                     n: int, seed: int, index: int) -> tuple[bool, float]:
    schedule = nu.schedule
    word = code.forward(schedule, sampler.sample(n, seed, index))
    member = en_membership(schedule, word)
    log_i = nu.log_mass(code.preimage(schedule, word))
    sizes = schedule.sizes(n)
    worst = 0.0
    for direction in (-1, +1):
        other = _step(word, sizes, direction)
        if other is not None:
            worst = max(worst, abs(log_i - nu.log_mass(code.preimage(schedule, other))))
    return member, worst


def doubling_report(sampler: DigitMeasure, nu: DigitMeasure, n: int, samples: int, seed: int,
                    code: IsometryCode = IDENTITY, workers: int = 1) -> DoublingReport:
    """Monte-Carlo view of the weak doubling inequality at depth ``n``.

    Points are drawn from the projection of ``sampler`` (``nu`` itself or one
    of its tilted companions).  For each point the report records whether it
    falls in ``E_n`` and the largest log mass ratio of ``nu`` between its
    interval and the neighbours.  ``ratio_violations`` counts non-members of
    ``E_n`` breaking the ``C0**(sqrt(n) + 1)`` bound, which cannot happen.
    """
    if samples < 1:
        raise ValueError("need at least one sample")
    consts = measure_constants(nu)
    sampler_c1 = float(max(sampler.a.max(), sampler.b.max()))
    log_bound = (math.sqrt(n) + 1.0) * math.log(consts.c0)
    results = ordered_map(_sample_doubling, (sampler, nu, code, n, seed), samples, workers)
    members = np.array([m for m, _ in results], dtype=bool)
    ratios = np.array([r for _, r in results])
    off = ratios[~members]
    return DoublingReport(
        n=n, samples=samples, frac_in_En=float(members.mean()),
        bound=2.0 * sampler_c1 ** math.sqrt(n),
        ratio_violations=int(np.count_nonzero(off > log_bound + RATIO_SLACK)),
        non_members=int(off.size),
        max_log_ratio=float(off.max()) if off.size else 0.0,
        log_ratio_bound=log_bound, constants=consts, sampler_c1=sampler_c1)


@dataclass(frozen=True)
class ExhaustiveReport:
    n: int
    words: int
    non_members: int
    violations: int
    max_log_ratio: float
    log_ratio_bound: float
    en_mass: dict
    en_bound: dict


def _all_words(schedule: EpochSchedule, n: int) -> np.ndarray:
    """Every depth-``n`` word, one per row, in left-to-right interval order."""
    sizes = schedule.sizes(n).tolist()
    count = math.prod(sizes)
    if count > EXHAUSTIVE_BUDGET:
        raise ResourceError(f"{count} words at depth {n} exceed the budget {EXHAUSTIVE_BUDGET}")
    grids = np.indices(sizes, dtype=np.int8).reshape(n, -1)
    return grids.T.astype(np.int64)


def exhaustive_doubling(nu: DigitMeasure, n: int, code: IsometryCode = IDENTITY,
                        varpi: dict[str, DigitMeasure] | None = None) -> ExhaustiveReport:
    """Check the doubling bound for every depth-``n`` interval and the exact ``E_n`` masses.

    Split depths come from the first differing column of consecutive rows in
    interval order, independently of :func:`neighbor_split_depth`.
    ``varpi`` maps labels to measures whose image under the projection is
    weighed on ``E_n``; each gets the bound ``2 * C1**sqrt(n)``.
    """
    schedule = nu.schedule
    words = _all_words(schedule, n)
    if code.kind == "identity":
        pre = words
    else:
        pre = np.array([code.preimage(schedule, w) for w in words], dtype=np.int64)
    log_nu = nu.log_mass_many(pre)

    differs = words[1:] != words[:-1]
    split_next = differs.argmax(axis=1)
    cut = threshold(n)
    member = np.zeros(len(words), dtype=bool)
    member[:-1] |= split_next < cut
    member[1:] |= split_next < cut

    consts = measure_constants(nu)
    log_bound = (math.sqrt(n) + 1.0) * math.log(consts.c0)
    gaps = np.abs(np.diff(log_nu))
    # a pair counts once for each endpoint that is off E_n
    relevant = np.concatenate([gaps[~member[:-1]], gaps[~member[1:]]])
    varpi = varpi or {}
    en_mass, en_bound = {}, {}
    for label, measure in varpi.items():
        log_w = log_nu if measure is nu else measure.log_mass_many(pre)
        en_mass[label] = float(np.exp(log_w[member]).sum())
        en_bound[label] = 2.0 * float(max(measure.a.max(), measure.b.max())) ** math.sqrt(n)
    return ExhaustiveReport(
        n=n, words=len(words), non_members=int(np.count_nonzero(~member)),
        violations=int(np.count_nonzero(relevant > log_bound + RATIO_SLACK)),
        max_log_ratio=float(relevant.max()) if relevant.size else 0.0,
        log_ratio_bound=log_bound, en_mass=en_mass, en_bound=en_bound)
