"""Closed-form moment scaling functions and their Legendre transforms.

For weights ``a`` on an alphabet of size ``c1`` the moment function is
``theta_a(q) = log_{c1}(sum_i a_i**q)``, and likewise ``theta_b`` in base
``c2``.  The finite-depth partition exponent ``tau_n`` is a convex
combination of the two, and its upper and lower limits are their pointwise
max and min.  All sums of powers go through log-sum-exp.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, NamedTuple

import numpy as np
from scipy.special import entr, logsumexp

from .exceptions import ConfigError, DegeneracyError, DomainError, ResourceError
from .params import ModelParams
from .symbolic import EpochSchedule

if TYPE_CHECKING:
    from .measure import DigitMeasure

ENUMERATION_BUDGET = 2**24
Q_LIMIT = 1e4
ROOT_TOL = 1e-12
DIM_VALID_TOL = 1e-8


def _scalar_or_array(values: np.ndarray, like) -> float | np.ndarray:
    return float(values) if np.ndim(like) == 0 else values


def _log_moment(log_w: np.ndarray, q) -> np.ndarray:
    """``log(sum_i w_i**q)`` for scalar or array ``q``."""
    q = np.asarray(q, dtype=float)
    return logsumexp(np.multiply.outer(q, log_w), axis=-1)


def _check_which(which: str) -> None:
    if which not in ("a", "b"):
        raise ValueError(f"which must be 'a' or 'b', got {which!r}")


def _log_weights(params: ModelParams, which: str) -> np.ndarray:
    _check_which(which)
    return params.log_a if which == "a" else params.log_b


def theta(params: ModelParams, which: str, q):
    """Moment function ``log_c(sum w_i**q)`` of one weight system."""
    log_w = _log_weights(params, which)
    values = _log_moment(log_w, q) / math.log(params.base(which))
    return _scalar_or_array(values, q)


def theta_prime(params: ModelParams, which: str, q):
    """Derivative of :func:`theta` in ``q``; nondecreasing."""
    log_w = _log_weights(params, which)
    qa = np.asarray(q, dtype=float)
    z = np.multiply.outer(qa, log_w)
    probs = np.exp(z - logsumexp(z, axis=-1, keepdims=True))
    values = (probs @ log_w) / math.log(params.base(which))
    return _scalar_or_array(values, q)


def _check_compatible(params: ModelParams, schedule: EpochSchedule) -> None:
    if (params.c1, params.c2) != (schedule.c1, schedule.c2):
        raise ConfigError(
            f"weights have lengths ({params.c1}, {params.c2}) but the schedule "
            f"has alphabets ({schedule.c1}, {schedule.c2})")


def tau_n(params: ModelParams, schedule: EpochSchedule, n: int, q):
    """Partition exponent at depth ``n``: ``sum_z mu(z)**q = |w|**(-tau_n(q))``."""
    _check_compatible(params, schedule)
    if n < 1:
        raise DomainError(f"tau_n needs n >= 1, got {n}")
    na = schedule.count_a(n)
    num = na * _log_moment(params.log_a, q) + (n - na) * _log_moment(params.log_b, q)
    return _scalar_or_array(num / -schedule.log_diameter(n), q)


def partition_sum_bruteforce(measure: DigitMeasure, n: int, q):
    """``log sum_{|z|=n} m(z)**q`` by explicit enumeration of every cylinder."""
    schedule = measure.schedule
    count = 1
    for j in range(1, n + 1):
        count *= schedule.alphabet_size(j)
        if count > ENUMERATION_BUDGET:
            raise ResourceError(
                f"depth {n} has more than {ENUMERATION_BUDGET} cylinders")
    log_masses = np.zeros(1)
    for j in range(1, n + 1):
        log_masses = np.add.outer(log_masses, measure.log_weights_at(j)).ravel()
    values = logsumexp(np.multiply.outer(np.asarray(q, dtype=float), log_masses), axis=-1)
    return _scalar_or_array(values, q)


def tau_limits(params: ModelParams, q) -> tuple:
    """``(tau_upper, tau_lower)``: the max and min of the two moment functions.

    These are the packing-type function ``B`` and the Hausdorff-type function
    ``b`` of both the symbolic measure and its projection.
    """
    ta = theta(params, "a", q)
    tb = theta(params, "b", q)
    return (_scalar_or_array(np.maximum(ta, tb), q),
            _scalar_or_array(np.minimum(ta, tb), q))


def tau_upper_derivative(params: ModelParams, q: float, tol: float = 1e-9) -> float | None:
    """Derivative of ``tau_upper`` at ``q``, or ``None`` at a non-smooth crossing."""
    ta, tb = theta(params, "a", q), theta(params, "b", q)
    da, db = theta_prime(params, "a", q), theta_prime(params, "b", q)
    if abs(ta - tb) > tol:
        return da if ta > tb else db
    if abs(da - db) <= tol:
        return da
    return None


@dataclass(frozen=True)
class TauCurve:
    q: np.ndarray
    theta_a: np.ndarray
    theta_b: np.ndarray
    tau_n: np.ndarray
    tau_upper: np.ndarray
    tau_lower: np.ndarray
    n: int


def tau_curve(params: ModelParams, schedule: EpochSchedule, q_grid, n: int) -> TauCurve:
    q = np.asarray(q_grid, dtype=float)
    ta = theta(params, "a", q)
    tb = theta(params, "b", q)
    return TauCurve(q=q, theta_a=ta, theta_b=tb, tau_n=tau_n(params, schedule, n, q),
                    tau_upper=np.maximum(ta, tb), tau_lower=np.minimum(ta, tb), n=n)


# -- Legendre transforms ----------------------------------------------------

def _asymptotics(params: ModelParams, which: str) -> tuple[float, float, float, float]:
    """Slopes and intercepts of the asymptotes of ``theta`` at -inf and +inf."""
    w = params.weights(which)
    c = math.log(params.base(which))
    wmax, wmin = w.max(), w.min()
    return (math.log(wmin) / c, math.log(np.count_nonzero(w == wmin)) / c,
            math.log(wmax) / c, math.log(np.count_nonzero(w == wmax)) / c)


def _right_derivative(params: ModelParams, which: str, q: float) -> float:
    if which in ("a", "b"):
        return theta_prime(params, which, q)
    ta, tb = theta(params, "a", q), theta(params, "b", q)
    da, db = theta_prime(params, "a", q), theta_prime(params, "b", q)
    if ta > tb:
        return da
    if tb > ta:
        return db
    return max(da, db)


def _value(params: ModelParams, which: str, q: float) -> float:
    if which in ("a", "b"):
        return theta(params, which, q)
    return max(theta(params, "a", q), theta(params, "b", q))


def legendre(params: ModelParams, alpha: float, which: str = "upper",
             q_max: float = 64.0) -> float:
    """``inf_q (alpha*q + f(q))`` for ``f`` in ``{'a', 'b', 'upper', 'lower'}``.

    ``'a'``/``'b'`` are the two moment functions, ``'upper'``/``'lower'`` their
    max and min.  The convex cases are minimised by bisection on the right
    derivative over ``[-q_max, q_max]``.  ``'lower'`` is generally not convex
    and is evaluated as the min of the two component transforms.  Returns
    ``-inf`` when the infimum over the real line diverges.
    """
    if which == "lower":
        return min(legendre(params, alpha, "a", q_max), legendre(params, alpha, "b", q_max))
    if which not in ("a", "b", "upper"):
        raise ValueError(f"unknown function {which!r}")
    if which == "upper":
        sa_lo, ca_lo, sa_hi, ca_hi = _asymptotics(params, "a")
        sb_lo, cb_lo, sb_hi, cb_hi = _asymptotics(params, "b")
        s_lo = min(sa_lo, sb_lo)
        c_lo = max(c for s, c in ((sa_lo, ca_lo), (sb_lo, cb_lo)) if s == s_lo)
        s_hi = max(sa_hi, sb_hi)
        c_hi = max(c for s, c in ((sa_hi, ca_hi), (sb_hi, cb_hi)) if s == s_hi)
    else:
        s_lo, c_lo, s_hi, c_hi = _asymptotics(params, which)

    alpha = float(alpha)
    edge = 1e-12 * max(1.0, abs(alpha))
    if alpha < -s_hi - edge or alpha > -s_lo + edge:
        return -math.inf
    if s_lo == s_hi:
        # affine function: the transform is finite at a single slope only
        return c_lo
    if abs(alpha + s_hi) <= edge:
        return c_hi
    if abs(alpha + s_lo) <= edge:
        return c_lo

    lo, hi = -float(q_max), float(q_max)
    if alpha + _right_derivative(params, which, lo) >= 0:
        q_star = lo
    elif alpha + _right_derivative(params, which, hi) < 0:
        q_star = hi
    else:
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if not lo < mid < hi:
                break
            if alpha + _right_derivative(params, which, mid) >= 0:
                hi = mid
            else:
                lo = mid
        q_star = hi
    return alpha * q_star + _value(params, which, q_star)


def entropy_tilted(weights, base: int) -> float:
    """Entropy ``-sum w_i log_c w_i`` of a probability vector."""
    w = np.asarray(weights, dtype=float)
    return float(entr(w).sum() / math.log(base))


# -- Tilting ------------------------------------------------------------------

class TiltedWeights(NamedTuple):
    q_a: float
    q_b: float
    log_a: np.ndarray
    log_b: np.ndarray

    @property
    def a(self) -> np.ndarray:
        return np.exp(self.log_a)

    @property
    def b(self) -> np.ndarray:
        return np.exp(self.log_b)


def _tilt(log_w: np.ndarray, q: float) -> np.ndarray:
    z = q * log_w
    return z - logsumexp(z)


def _check_q(q: float) -> float:
    q = float(q)
    if not math.isfinite(q) or abs(q) > Q_LIMIT:
        raise ConfigError(f"tilt exponent q={q!r} must be finite with |q| <= {Q_LIMIT:g}")
    return q


def tilt_q(params: ModelParams, q: float) -> TiltedWeights:
    """Weights ``a_i**q / sum_k a_k**q`` and ``b_j**q / sum_k b_k**q``."""
    q = _check_q(q)
    return TiltedWeights(q, q, _tilt(params.log_a, q), _tilt(params.log_b, q))


def alpha_range(params: ModelParams, which: str) -> tuple[float, float]:
    """Open range of ``-theta'`` for one weight system."""
    w = params.weights(which)
    c = math.log(params.base(which))
    return -math.log(w.max()) / c, -math.log(w.min()) / c


def solve_tilt_exponent(params: ModelParams, which: str, alpha: float) -> float:
    """The ``q`` with ``-theta'(q) = alpha``, by monotone bisection."""
    alpha = float(alpha)
    lo_alpha, hi_alpha = alpha_range(params, which)
    if lo_alpha == hi_alpha:
        if abs(alpha - lo_alpha) <= ROOT_TOL:
            return 1.0
        raise DegeneracyError(
            f"weights {which} are uniform: -theta'_{which} is constantly {lo_alpha!r}")
    if not lo_alpha < alpha < hi_alpha:
        raise DomainError(
            f"alpha={alpha!r} outside the open range ({lo_alpha!r}, {hi_alpha!r}) of -theta'_{which}")

    def excess(q: float) -> float:
        # decreasing in q
        return -theta_prime(params, which, q) - alpha

    lo, hi = -2.0, 2.0
    while excess(lo) < 0:
        lo *= 2
        if lo < -Q_LIMIT:
            raise DomainError(f"alpha={alpha!r} needs |q| > {Q_LIMIT:g}")
    while excess(hi) > 0:
        hi *= 2
        if hi > Q_LIMIT:
            raise DomainError(f"alpha={alpha!r} needs |q| > {Q_LIMIT:g}")
    for _ in range(300):
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        if excess(mid) > 0:
            lo = mid
        else:
            hi = mid
    q = lo if abs(excess(lo)) <= abs(excess(hi)) else hi
    if abs(excess(q)) > ROOT_TOL:
        raise DomainError(f"could not solve -theta'_{which}(q) = {alpha!r} to {ROOT_TOL:g}")
    return q


def tilt_alpha(params: ModelParams, alpha: float) -> TiltedWeights:
    """Tilt each weight system by the exponent calibrating it to ``alpha``."""
    q_a = solve_tilt_exponent(params, "a", alpha)
    q_b = solve_tilt_exponent(params, "b", alpha)
    return TiltedWeights(q_a, q_b, _tilt(params.log_a, q_a), _tilt(params.log_b, q_b))


# -- Spectrum ----------------------------------------------------------------

class SpectrumDomain(NamedTuple):
    alpha_min: float
    alpha_max: float

    @property
    def empty(self) -> bool:
        return not self.alpha_min < self.alpha_max

    def __contains__(self, alpha) -> bool:
        return self.alpha_min < alpha < self.alpha_max


def spectrum_domain(params: ModelParams) -> SpectrumDomain:
    """Intersection of the open ranges of ``-theta'_a`` and ``-theta'_b``."""
    lo_a, hi_a = alpha_range(params, "a")
    lo_b, hi_b = alpha_range(params, "b")
    return SpectrumDomain(max(lo_a, lo_b), min(hi_a, hi_b))


@dataclass(frozen=True)
class SpectrumPoint:
    alpha: float
    q_a: float
    q_b: float
    a_tilde: tuple[float, ...]
    b_tilde: tuple[float, ...]
    h_a: float
    h_b: float
    f_dim: float
    f_Dim: float
    dim_valid: bool
    Dim_valid: bool
    B_star: float


def spectrum_point(params: ModelParams, alpha: float) -> SpectrumPoint:
    """Level-set dimensions at ``alpha``.

    ``f_dim`` is the Hausdorff value ``min(h_a, h_b)``, ``f_Dim`` the packing
    candidate ``max(h_a, h_b)``; ``Dim_valid`` flags whether the latter agrees
    with the Legendre transform of ``tau_upper`` at ``alpha``.
    """
    dom = spectrum_domain(params)
    if alpha not in dom:
        raise DomainError(f"alpha={alpha!r} not in the open domain ({dom.alpha_min!r}, {dom.alpha_max!r})")
    tw = tilt_alpha(params, alpha)
    h_a = entropy_tilted(tw.a, params.c1)
    h_b = entropy_tilted(tw.b, params.c2)
    b_star = legendre(params, alpha, "upper")
    return SpectrumPoint(
        alpha=float(alpha), q_a=tw.q_a, q_b=tw.q_b,
        a_tilde=tuple(tw.a.tolist()), b_tilde=tuple(tw.b.tolist()),
        h_a=h_a, h_b=h_b, f_dim=min(h_a, h_b), f_Dim=max(h_a, h_b),
        dim_valid=True, Dim_valid=abs(max(h_a, h_b) - b_star) <= DIM_VALID_TOL,
        B_star=b_star)


def phi(params: ModelParams, t, alpha: float, tilted: TiltedWeights | None = None):
    """``max(log_c1 sum a_i**t a~_i, log_c2 sum b_j**t b~_j)`` for the ``alpha``-tilt."""
    tw = tilted if tilted is not None else tilt_alpha(params, alpha)
    t_arr = np.asarray(t, dtype=float)
    # written as a difference of two log moments so that phi(0) is exactly 0
    branch_a = (_log_moment(params.log_a, t_arr + tw.q_a)
                - _log_moment(params.log_a, tw.q_a)) / math.log(params.c1)
    branch_b = (_log_moment(params.log_b, t_arr + tw.q_b)
                - _log_moment(params.log_b, tw.q_b)) / math.log(params.c2)
    return _scalar_or_array(np.maximum(branch_a, branch_b), t)
