"""Invariant suites aggregated by ``mff verify``.

Every suite returns a plain dict with a ``status`` of ``pass``, ``fail`` or
``skipped`` and the measured margins, so the whole report serialises to JSON.
"""
from __future__ import annotations

import math

import numpy as np

from .config import RunConfig, section_int, section_ints, section_number, section_numbers
from .diagnostics import _all_words, doubling_report, exhaustive_doubling
from .exceptions import ResourceError
from .experiments import mc_formalism_check
from .measure import DigitMeasure, derive_rng
from .projection import IsometryCode
from .spectrum import ENUMERATION_BUDGET, partition_sum_bruteforce, spectrum_domain, tau_limits, tau_n, theta

ORACLE_TOL = 1e-9
NORMALIZATION_TOL = 1e-12
TILT_TOL = 1e-9


def _status(ok: bool) -> str:
    return "pass" if ok else "fail"


def _depth_budget(schedule, max_depth: int, budget: int) -> list[int]:
    depths, count = [], 1
    for n in range(1, max_depth + 1):
        count *= schedule.alphabet_size(n)
        if count > budget:
            break
        depths.append(n)
    return depths


def suite_oracle(cfg: RunConfig, max_depth: int, qs: list[float]) -> dict:
    measure = DigitMeasure.base(cfg.params, cfg.schedule)
    depths = _depth_budget(cfg.schedule, max_depth, ENUMERATION_BUDGET)
    worst = 0.0
    for n in depths:
        brute = partition_sum_bruteforce(measure, n, qs)
        closed = tau_n(cfg.params, cfg.schedule, n, qs) * -cfg.schedule.log_diameter(n)
        worst = max(worst, float(np.max(np.abs(brute - closed))))
    return {"status": _status(worst <= ORACLE_TOL), "max_abs_error": worst,
            "tolerance": ORACLE_TOL, "depths": depths, "q": qs}


def suite_normalization(cfg: RunConfig, depths: list[int]) -> dict:
    values = [theta(cfg.params, "a", 1.0), theta(cfg.params, "b", 1.0), *tau_limits(cfg.params, 1.0)]
    values += [tau_n(cfg.params, cfg.schedule, n, 1.0) for n in depths]
    worst = max(abs(v) for v in values)
    return {"status": _status(worst <= NORMALIZATION_TOL), "max_abs_value": worst,
            "tolerance": NORMALIZATION_TOL}


def suite_tilted_identity(cfg: RunConfig, max_depth: int, qs: list[float]) -> dict:
    base = DigitMeasure.base(cfg.params, cfg.schedule)
    depths = _depth_budget(cfg.schedule, max_depth, 2**20)
    identity_err, bound_excess = 0.0, -math.inf
    for q in qs:
        tilted = DigitMeasure.tilted_q(cfg.params, cfg.schedule, q)
        lower = tau_limits(cfg.params, q)[1]
        for n in depths:
            words = _all_words(cfg.schedule, n)
            log_mu = base.log_mass_many(words)
            log_tilt = tilted.log_mass_many(words)
            log_diam = cfg.schedule.log_diameter(n)
            rhs = q * log_mu + tau_n(cfg.params, cfg.schedule, n, q) * log_diam
            identity_err = max(identity_err, float(np.max(np.abs(log_tilt - rhs))))
            bound_excess = max(bound_excess, float(np.max(log_tilt - (q * log_mu + lower * log_diam))))
    ok = identity_err <= TILT_TOL and bound_excess <= TILT_TOL
    return {"status": _status(ok), "max_identity_error": identity_err,
            "max_bound_excess": bound_excess, "tolerance": TILT_TOL, "depths": depths, "q": qs}


def suite_doubling_exhaustive(cfg: RunConfig, depths: list[int], qs: list[float]) -> dict:
    nu = DigitMeasure.base(cfg.params, cfg.schedule)
    varpi = {"nu": nu}
    for q in qs:
        varpi[f"nu_q={q!r}"] = DigitMeasure.tilted_q(cfg.params, cfg.schedule, q)
    rows, ok = [], True
    for n in depths:
        try:
            rep = exhaustive_doubling(nu, n, cfg.code, varpi)
        except ResourceError as exc:
            rows.append({"n": n, "status": "skipped", "reason": str(exc)})
            continue
        en_ok = all(rep.en_mass[k] <= rep.en_bound[k] for k in rep.en_mass)
        row_ok = rep.violations == 0 and en_ok
        ok &= row_ok
        rows.append({"n": n, "status": _status(row_ok), "words": rep.words,
                     "non_members": rep.non_members, "violations": rep.violations,
                     "max_log_ratio": rep.max_log_ratio, "log_ratio_bound": rep.log_ratio_bound,
                     "en_mass": rep.en_mass, "en_bound": rep.en_bound})
    return {"status": _status(ok), "depths": rows}


def suite_doubling_sampled(cfg: RunConfig, n: int, samples: int, workers: int) -> dict:
    if samples == 0:
        return {"status": "skipped", "reason": "samples = 0"}
    nu = DigitMeasure.base(cfg.params, cfg.schedule)
    rep = doubling_report(nu, nu, n, samples, cfg.seed, cfg.code, workers)
    p = min(rep.bound, 1.0)
    slack = 3.0 * math.sqrt(p * (1 - p) / samples)
    ok = rep.ratio_violations == 0 and rep.frac_in_En <= rep.bound + slack
    return {"status": _status(ok), "n": n, "samples": samples, "frac_in_En": rep.frac_in_En,
            "bound": rep.bound, "sampling_slack": slack, "ratio_violations": rep.ratio_violations,
            "non_members": rep.non_members, "max_log_ratio": rep.max_log_ratio,
            "log_ratio_bound": rep.log_ratio_bound, "C0": rep.constants.c0,
            "C0_degenerate": rep.constants.degenerate}


def suite_formalism(cfg: RunConfig, alpha: float | None, n: int, samples: int, workers: int) -> dict:
    if samples == 0:
        return {"status": "skipped", "reason": "samples = 0"}
    dom = spectrum_domain(cfg.params)
    if dom.empty:
        return {"status": "skipped", "reason": "empty spectrum domain"}
    if alpha is None:
        alpha = 0.5 * (dom.alpha_min + dom.alpha_max)
    rep = mc_formalism_check(cfg.params, cfg.schedule, alpha, samples, n, cfg.seed, workers)
    return {"status": _status(rep.passed), "alpha": rep.alpha, "n": n, "samples": samples,
            "mean": rep.mean, "sd": rep.sd, "se": rep.se, "tolerance": rep.tolerance,
            "abs_error": abs(rep.mean - rep.alpha), "predicted_sd": rep.predicted_sd,
            "probe_depths": list(rep.probe_depths), "own_mean": list(rep.own_mean),
            "own_expected": list(rep.own_expected), "own_pass": rep.own_pass,
            "h_a": rep.h_a, "h_b": rep.h_b, "f_dim": rep.f_dim, "f_Dim": rep.f_Dim,
            "Dim_valid": rep.Dim_valid}


def suite_gray(cfg: RunConfig, max_depth: int, pairs: int) -> dict:
    if (cfg.params.c1, cfg.params.c2) != (2, 2):
        return {"status": "skipped", "reason": "Gray codes need binary alphabets"}
    code = IsometryCode("gray")
    nu = DigitMeasure.base(cfg.params, cfg.schedule)
    log_c0 = math.log(max(max(cfg.params.a) / min(cfg.params.a), max(cfg.params.b) / min(cfg.params.b)))
    flips_ok, worst_ratio = True, 0.0
    for n in range(1, max_depth + 1):
        words = _all_words(cfg.schedule, n)
        pre = words.copy()
        pre[:, 1:] ^= words[:, :-1]
        flips = np.count_nonzero(pre[1:] != pre[:-1], axis=1)
        flips_ok &= bool(np.all(flips == 1))
        log_nu = nu.log_mass_many(pre)
        worst_ratio = max(worst_ratio, float(np.max(np.abs(np.diff(log_nu)))))
    rng = derive_rng(cfg.seed, 2**32)
    prefix_ok = True
    depth = max(max_depth, 1)
    for _ in range(pairs):
        x = rng.integers(0, 2, depth)
        y = x.copy()
        k = int(rng.integers(0, depth + 1))
        y[k:] = rng.integers(0, 2, depth - k)
        gx, gy = np.array(code.forward(cfg.schedule, x)), np.array(code.forward(cfg.schedule, y))
        prefix_ok &= _prefix(gx, gy) == _prefix(x, y)
    ok = flips_ok and prefix_ok and worst_ratio <= log_c0 + 1e-9
    return {"status": _status(ok), "one_flip_adjacency": flips_ok, "prefix_preserved": prefix_ok,
            "max_adjacent_log_ratio": worst_ratio, "log_C0": log_c0, "max_depth": max_depth}


def _prefix(x: np.ndarray, y: np.ndarray) -> int:
    diff = np.flatnonzero(x != y)
    return int(diff[0]) if diff.size else x.size


def run_verify(cfg: RunConfig, workers: int = 1) -> dict:
    sec = cfg.section("verify")
    where = "verify"
    qs = section_numbers(sec, "oracle_q", [-2, -1, -0.5, 0, 0.5, 1, 2, 3], where)
    suites = {
        "oracle_equivalence": suite_oracle(cfg, section_int(sec, "oracle_max_depth", 12, where, 1), qs),
        "normalization": suite_normalization(
            cfg, section_ints(sec, "normalization_depths", [1, 15, 255, 65535], where, 1)),
        "tilted_identity": suite_tilted_identity(
            cfg, section_int(sec, "tilt_max_depth", 10, where, 1),
            section_numbers(sec, "tilt_q", [-2, 0.5, 2], where)),
        "doubling_exhaustive": suite_doubling_exhaustive(
            cfg, section_ints(sec, "doubling_depths", [9, 12], where, 1),
            section_numbers(sec, "doubling_q", [-2, 2], where)),
        "doubling_sampled": suite_doubling_sampled(
            cfg, section_int(sec, "doubling_sample_depth", 400, where, 1),
            section_int(sec, "doubling_samples", 500, where, 0), workers),
        "mc_formalism": suite_formalism(
            cfg, section_number(sec, "mc_alpha", None, where),
            section_int(sec, "mc_depth", 4096, where, 1),
            section_int(sec, "mc_samples", 200, where, 0), workers),
        "gray_isometry": suite_gray(
            cfg, section_int(sec, "gray_max_depth", 12, where, 1),
            section_int(sec, "gray_pairs", 1000, where, 0)),
    }
    passed = all(s["status"] != "fail" for s in suites.values())
    return {"passed": passed, "suites": suites}
