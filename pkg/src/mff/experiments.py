"""Monte-Carlo checks of the level-set formalism and tau_n oscillation studies."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ._parallel import ordered_map
from .exceptions import ResourceError
from .measure import DigitMeasure
from .params import ModelParams
from .projection import IDENTITY, IsometryCode, interval_containing, nu_log_mass_ball
from .spectrum import ENUMERATION_BUDGET, spectrum_point, tau_n, theta
from .symbolic import Alphabet, EpochSchedule, validate_word


@dataclass(frozen=True)
class ExponentTrace:
    depths: tuple[int, ...]
    values: tuple[float, ...]
    tag: str = "nu-interval"


def _position_logs(measure: DigitMeasure, digits: np.ndarray) -> np.ndarray:
    """Log weight of each digit under ``measure``."""
    out = np.empty(digits.size)
    for start, stop, tag in measure.schedule.segments(digits.size):
        log_w = measure.log_a if tag is Alphabet.A1 else measure.log_b
        out[start - 1:stop - 1] = log_w[digits[start - 1:stop - 1]]
    return out


def _diameters(schedule: EpochSchedule, depths: Sequence[int]) -> np.ndarray:
    return np.array([schedule.log_diameter(n) for n in depths])


def exponent_trace(measure: DigitMeasure, code: IsometryCode, word: Sequence[int],
                   depths: Sequence[int], tag: str = "nu-interval") -> ExponentTrace:
    """``log m(I_n(x)) / log |I_n|`` along the digit stream ``word`` of ``x``."""
    schedule = measure.schedule
    depths = tuple(int(n) for n in depths)
    if not depths:
        return ExponentTrace((), (), tag)
    if min(depths) < 1:
        raise ValueError("depths must be positive")
    digits = validate_word(schedule, word)[:max(depths)]
    if digits.size < max(depths):
        raise ValueError(f"word of length {digits.size} is shorter than depth {max(depths)}")
    pre = np.asarray(code.preimage(schedule, digits), dtype=np.int64)
    cum = np.cumsum(_position_logs(measure, pre))
    idx = np.array(depths) - 1
    values = cum[idx] / _diameters(schedule, depths)
    return ExponentTrace(depths, tuple(values.tolist()), tag)


def ball_exponent(measure: DigitMeasure, code: IsometryCode, x: float, r: float,
                  depth_cap: int) -> tuple[float, float]:
    """Bracket for ``log nu(B(x, r)) / log r`` (order follows the bracket)."""
    bracket = nu_log_mass_ball(measure, code, x, r, depth_cap)
    log_r = math.log(r)
    return bracket.upper / log_r, bracket.lower / log_r


# -- formalism check ------------------------------------------------------------

def epoch_probe_depths(schedule: EpochSchedule, limit: int) -> list[tuple[int, str]]:
    """Depths ``T_k - 1 <= limit`` with the alphabet of the epoch that just ended."""
    out = []
    for k, t in enumerate(schedule.boundaries[1:], start=2):
        n = t - 1
        if n > min(limit, schedule.max_depth):
            break
        out.append((n, "A-end" if k % 2 == 0 else "B-end"))
    return out


@dataclass(frozen=True)
class FormalismReport:
    alpha: float
    samples: int
    n: int
    mean: float
    sd: float
    se: float
    tolerance: float
    mean_pass: bool
    predicted_sd: float
    per_digit_var: tuple[float, float]
    degenerate_tilt: bool
    probe_depths: tuple[int, ...]
    probe_kinds: tuple[str, ...]
    own_mean: tuple[float, ...]
    own_expected: tuple[float, ...]
    own_pass: bool
    h_a: float
    h_b: float
    f_dim: float
    f_Dim: float
    Dim_valid: bool
    q_a: float
    q_b: float
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.mean_pass and self.own_pass


def _formalism_sample(tilted: DigitMeasure, base: DigitMeasure, n: int,
                      probes: np.ndarray, seed: int, index: int) -> tuple[float, np.ndarray]:
    digits = tilted.sample(n, seed, index)
    nu_log = _position_logs(base, digits).sum()
    own = np.cumsum(_position_logs(tilted, digits))[probes - 1] if probes.size else np.empty(0)
    return float(nu_log), own


def _per_digit_stats(log_tilt: np.ndarray, log_w: np.ndarray, base: int) -> tuple[float, float, float]:
    """Mean, variance and range of ``-log_c w`` for a digit drawn from the tilt."""
    x = -log_w / math.log(base)
    p = np.exp(log_tilt)
    mean = float(p @ x)
    return mean, float(p @ (x - mean) ** 2), float(x.max() - x.min())


def mc_formalism_check(params: ModelParams, schedule: EpochSchedule, alpha: float,
                       samples: int, n: int, seed: int, workers: int = 1) -> FormalismReport:
    """Sample points typical for the ``alpha``-tilted measure and measure their exponents.

    The ``nu``-exponent at depth ``n`` should concentrate at ``alpha``.  The
    tilted measure's own exponent at the epoch-boundary depths should follow
    the ``N_n/n`` mixture of ``h(a~)`` and ``h(b~)``.  Tolerances are three
    standard errors plus the per-digit range over ``n``; they are CLT
    heuristics, not rigorous bounds.
    """
    point = spectrum_point(params, alpha)
    base = DigitMeasure.base(params, schedule)
    tilted = DigitMeasure.tilted_alpha(params, schedule, alpha)
    probes_kinds = epoch_probe_depths(schedule, n)
    probes = np.array([p for p, _ in probes_kinds], dtype=np.int64)

    log_diam = schedule.log_diameter(n)
    _, var_a, range_a = _per_digit_stats(tilted.log_a, base.log_a, params.c1)
    _, var_b, range_b = _per_digit_stats(tilted.log_b, base.log_b, params.c2)
    na = schedule.count_a(n)
    predicted_var = (na * var_a * math.log(params.c1) ** 2
                     + (n - na) * var_b * math.log(params.c2) ** 2) / log_diam ** 2
    digit_range = max(range_a, range_b)

    own_expected = []
    for p in probes.tolist():
        pa = schedule.count_a(p)
        la, lb = pa * math.log(params.c1), (p - pa) * math.log(params.c2)
        own_expected.append((la * point.h_a + lb * point.h_b) / (la + lb))

    if samples == 0:
        nan = math.nan
        return FormalismReport(
            float(alpha), 0, n, nan, nan, nan, nan, False, math.sqrt(predicted_var),
            (var_a, var_b), False, tuple(probes.tolist()), tuple(k for _, k in probes_kinds),
            (), tuple(own_expected), False, point.h_a, point.h_b, point.f_dim, point.f_Dim,
            point.Dim_valid, point.q_a, point.q_b)

    results = ordered_map(_formalism_sample, (tilted, base, n, probes, seed), samples, workers)
    exps = np.array([r[0] for r in results]) / log_diam
    mean = float(exps.mean())
    sd = float(exps.std(ddof=1)) if samples > 1 else 0.0
    se = sd / math.sqrt(samples)
    tol = 3.0 * se + digit_range / n
    own_mean, own_ok = [], True
    if probes.size:
        own = np.array([r[1] for r in results]) / _diameters(schedule, probes.tolist())
        own_mean = own.mean(axis=0).tolist()
        own_se = own.std(axis=0, ddof=1) / math.sqrt(samples) if samples > 1 else np.zeros(probes.size)
        own_tol = 3.0 * own_se + digit_range / probes
        own_ok = bool(np.all(np.abs(own.mean(axis=0) - own_expected) <= own_tol))
    max_tilt = float(max(tilted.a.max(), tilted.b.max()))
    return FormalismReport(
        alpha=float(alpha), samples=samples, n=n, mean=mean, sd=sd, se=se, tolerance=tol,
        mean_pass=abs(mean - alpha) <= tol, predicted_sd=math.sqrt(predicted_var),
        per_digit_var=(var_a, var_b), degenerate_tilt=max_tilt > 1 - 1e-6,
        probe_depths=tuple(probes.tolist()), probe_kinds=tuple(k for _, k in probes_kinds),
        own_mean=tuple(own_mean), own_expected=tuple(own_expected), own_pass=own_ok,
        h_a=point.h_a, h_b=point.h_b, f_dim=point.f_dim, f_Dim=point.f_Dim,
        Dim_valid=point.Dim_valid, q_a=point.q_a, q_b=point.q_b)


# -- tau oscillation --------------------------------------------------------------

def tau_oscillation_study(params: ModelParams, schedule: EpochSchedule, q_grid: Sequence[float],
                          depths: Sequence[int]) -> list[dict]:
    """``tau_n(q)`` across depths with its distance to both moment functions."""
    kinds = dict(epoch_probe_depths(schedule, max(depths, default=0)))
    rows = []
    for q in q_grid:
        ta, tb = theta(params, "a", q), theta(params, "b", q)
        for n in depths:
            value = tau_n(params, schedule, n, q)
            rows.append({
                "q": float(q), "n": int(n), "frac_a": schedule.count_a(n) / n,
                "tau_n": value, "theta_a": ta, "theta_b": tb,
                "dist_a": abs(value - ta), "dist_b": abs(value - tb),
                "probe": kinds.get(int(n), ""),
            })
    return rows


# -- coarse spectrum ----------------------------------------------------------------

def coarse_spectrum(measure: DigitMeasure, code: IsometryCode, n: int, bins: int) -> list[dict]:
    """Histogram of coarse exponents ``log nu(I) / log |I|`` over all depth-``n`` intervals.

    ``code`` permutes the depth-``n`` intervals without changing the multiset
    of masses, so the histogram is computed from the cylinder masses.
    """
    schedule = measure.schedule
    if bins < 1:
        raise ValueError("bins must be positive")
    count = 1
    for j in range(1, n + 1):
        count *= schedule.alphabet_size(j)
        if count > ENUMERATION_BUDGET:
            raise ResourceError(f"depth {n} has more than {ENUMERATION_BUDGET} intervals")
    code._check(schedule)
    log_m = np.zeros(1)
    for j in range(1, n + 1):
        log_m = np.add.outer(log_m, measure.log_weights_at(j)).ravel()
    log_diam = schedule.log_diameter(n)
    alpha = log_m / log_diam
    lo, hi = float(alpha.min()), float(alpha.max())
    if hi - lo <= 1e-9 * max(1.0, abs(lo)):
        # a single exponent: one bin regardless of the requested count
        bins = 1
        edges = np.array([lo - 1e-9, hi + 1e-9])
    else:
        edges = np.linspace(lo, hi, bins + 1)
    counts, _ = np.histogram(alpha, bins=edges)
    masses, _ = np.histogram(alpha, bins=edges, weights=np.exp(log_m))
    rows = []
    for k in range(bins):
        c = int(counts[k])
        rows.append({
            "alpha_lo": float(edges[k]), "alpha_hi": float(edges[k + 1]),
            "alpha": float(0.5 * (edges[k] + edges[k + 1])), "count": c,
            "log_count": math.log(c) / -log_diam if c else -math.inf,
            "mass": float(masses[k]),
        })
    return rows
