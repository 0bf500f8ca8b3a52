"""The ten acceptance criteria, each at its stated tolerance and time budget."""
import json
import math
import time

import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from mff import (DigitMeasure, EpochSchedule, IsometryCode, ModelParams, constants, entropy_tilted,
                 legendre, mc_formalism_check, partition_sum_bruteforce, phi, spectrum_domain,
                 spectrum_point, tau_limits, tau_n, theta, theta_prime, tilt_q)
from mff.cli import main
from mff.diagnostics import _all_words, exhaustive_doubling
from mff.projection import gray_decode
from mff.symbolic import common_prefix_len

RUNNING = ModelParams((0.25, 0.75), (1 / 3, 2 / 3))
SQUARES = EpochSchedule("squares")
QS = [-2, -1, -0.5, 0, 0.5, 1, 2, 3]
ALPHA_QB2 = -float(theta_prime(RUNNING, "b", 2.0))


def random_params(count, seed=2024):
    rng = np.random.default_rng(seed)
    out = []
    for k in range(count):
        c2 = 2 if k % 2 == 0 else 3
        a = rng.dirichlet(np.ones(2)) * 0.98 + 0.01
        b = rng.dirichlet(np.ones(c2)) * (1 - 0.01 * c2) + 0.01
        out.append(ModelParams(tuple(a / math.fsum(a)), tuple(b / math.fsum(b))))
    return out


def test_criterion_01_oracle_equivalence():
    start = time.perf_counter()
    worst = 0.0
    for params in random_params(20):
        for preset in ("squares", "factorial"):
            schedule = EpochSchedule(preset, c1=params.c1, c2=params.c2)
            mu = DigitMeasure.base(params, schedule)
            for n in range(1, 17):
                brute = partition_sum_bruteforce(mu, n, QS)
                closed = -tau_n(params, schedule, n, QS) * schedule.log_diameter(n)
                worst = max(worst, float(np.max(np.abs(brute - closed))))
    elapsed = time.perf_counter() - start
    print(f"criterion 1: max error {worst:.2e}, {elapsed:.1f} s")
    assert worst <= 1e-9
    assert elapsed < 30


def test_criterion_02_normalization():
    worst = 0.0
    for params in [RUNNING, *random_params(20)]:
        schedule = EpochSchedule("squares", c1=params.c1, c2=params.c2)
        values = [theta(params, "a", 1.0), theta(params, "b", 1.0), *tau_limits(params, 1.0)]
        values += [tau_n(params, schedule, n, 1.0) for n in (1, 2, 3, 15, 16, 255, 4096, 65535, 10**6)]
        worst = max(worst, max(abs(v) for v in values))
    assert worst <= 1e-12


def test_criterion_03_finite_surrogate():
    start = time.perf_counter()
    q = np.arange(-2, 2 + 1e-9, 0.25)
    dev_b = np.max(np.abs(tau_n(RUNNING, SQUARES, 255, q) - theta(RUNNING, "b", q)))
    dev_a = np.max(np.abs(tau_n(RUNNING, SQUARES, 65535, q) - theta(RUNNING, "a", q)))
    elapsed = time.perf_counter() - start
    print(f"criterion 3: |tau_255 - theta_b| {dev_b:.4f}, |tau_65535 - theta_a| {dev_a:.4f}")
    assert dev_b <= 0.05 and dev_a <= 0.05
    assert elapsed < 1


def _conjugate(which, alpha):
    res = minimize_scalar(lambda q: alpha * q + theta(RUNNING, which, q), bounds=(-60, 60),
                          method="bounded", options={"xatol": 1e-12})
    return res.fun


def test_criterion_04_legendre_identities():
    start = time.perf_counter()
    lo, hi = spectrum_domain(RUNNING)
    alphas = np.linspace(lo, hi, 52)[1:-1]
    legendre_err = max(abs(legendre(RUNNING, a, "lower") - min(_conjugate("a", a), _conjugate("b", a)))
                       for a in alphas)
    entropy_err = 0.0
    for q in np.linspace(-5, 5, 50):
        tw = tilt_q(RUNNING, q)
        for which, w in (("a", tw.a), ("b", tw.b)):
            expected = theta(RUNNING, which, q) - q * theta_prime(RUNNING, which, q)
            entropy_err = max(entropy_err, abs(entropy_tilted(w, 2) - expected))
    elapsed = time.perf_counter() - start
    print(f"criterion 4: legendre {legendre_err:.2e}, entropy {entropy_err:.2e}, {elapsed:.2f} s")
    assert legendre_err <= 1e-8
    assert entropy_err <= 1e-10
    assert elapsed < 5


def test_criterion_05_spectrum_targets():
    exact = spectrum_point(RUNNING, ALPHA_QB2)
    assert abs(exact.q_b - 2) <= 1e-8
    assert abs(exact.h_b - 0.7219281) <= 1e-5
    # the literal value quoted alongside the criterion
    literal = spectrum_point(RUNNING, 0.7849615)
    assert abs(literal.h_b - 0.7219281) <= 1e-5
    for alpha in (ALPHA_QB2, 0.7849615):
        assert phi(RUNNING, 0.0, alpha) == 0.0
        h = 1e-5
        slope = (phi(RUNNING, h, alpha) - phi(RUNNING, -h, alpha)) / (2 * h)
        assert abs(slope + alpha) <= 1e-6


def test_criterion_06_tilted_identity():
    mu = DigitMeasure.base(RUNNING, SQUARES)
    identity_err, excess = 0.0, -math.inf
    for q in (-2, 0.5, 2):
        mu_q = DigitMeasure.tilted_q(RUNNING, SQUARES, q)
        lower = tau_limits(RUNNING, q)[1]
        for n in range(1, 13):
            words = _all_words(SQUARES, n)
            log_mu, log_q = mu.log_mass_many(words), mu_q.log_mass_many(words)
            log_d = SQUARES.log_diameter(n)
            rhs = q * log_mu + tau_n(RUNNING, SQUARES, n, q) * log_d
            identity_err = max(identity_err, float(np.max(np.abs(log_q - rhs))))
            excess = max(excess, float(np.max(log_q - (q * log_mu + lower * log_d))))
    print(f"criterion 6: identity {identity_err:.2e}, bound excess {excess:.2e}")
    assert identity_err <= 1e-9
    assert excess <= 1e-9


def test_criterion_07_weak_doubling_core():
    start = time.perf_counter()
    nu = DigitMeasure.base(RUNNING, SQUARES)
    varpi = {"nu": nu, "nu_2": DigitMeasure.tilted_q(RUNNING, SQUARES, 2),
             "nu_-2": DigitMeasure.tilted_q(RUNNING, SQUARES, -2)}
    for n in (9, 12, 14):
        rep = exhaustive_doubling(nu, n, IsometryCode(), varpi)
        print(f"criterion 7: n={n} violations {rep.violations}, max ratio {rep.max_log_ratio:.3f} "
              f"<= {rep.log_ratio_bound:.3f}, E_n masses {rep.en_mass}")
        assert rep.violations == 0
        for label in varpi:
            assert rep.en_mass[label] <= rep.en_bound[label]
    assert time.perf_counter() - start < 60


def test_criterion_08_gray_isometry():
    rng = np.random.default_rng(8)
    for _ in range(10_000):
        x = rng.integers(0, 2, 32)
        y = x.copy()
        k = int(rng.integers(0, 33))
        y[k:] = rng.integers(0, 2, 32 - k)
        assert common_prefix_len(gray_decode(x), gray_decode(y)) == common_prefix_len(x, y)
    nu = DigitMeasure.base(RUNNING, SQUARES)
    log_c0 = math.log(constants(RUNNING).c0)
    worst = 0.0
    for n in range(1, 17):
        words = _all_words(SQUARES, n)
        pre = words.copy()
        pre[:, 1:] ^= words[:, :-1]
        assert np.all(np.count_nonzero(pre[1:] != pre[:-1], axis=1) == 1)
        worst = max(worst, float(np.max(np.abs(np.diff(nu.log_mass_many(pre))))))
    print(f"criterion 8: max adjacent log ratio {worst:.4f} <= ln C0 = {log_c0:.4f}")
    assert worst <= log_c0 + 1e-12


def test_criterion_09_monte_carlo_formalism():
    start = time.perf_counter()
    homog = ModelParams((0.25, 0.75), (0.25, 0.75))
    rep = mc_formalism_check(homog, SQUARES, 0.8112781, samples=2000, n=4096, seed=12345, workers=4)
    print(f"criterion 9: homogeneous mean {rep.mean:.5f}, sd {rep.sd:.5f}")
    assert abs(rep.mean - 0.8112781) <= 0.02
    assert rep.sd <= 0.05
    rep = mc_formalism_check(RUNNING, SQUARES, ALPHA_QB2, samples=500, n=65535, seed=12345, workers=4)
    print(f"criterion 9: inhomogeneous mean {rep.mean:.5f} vs alpha {ALPHA_QB2:.5f}")
    assert abs(rep.mean - ALPHA_QB2) <= 0.03
    assert time.perf_counter() - start < 120


def test_criterion_10_determinism(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"weights": {"a": ["1/4", "3/4"], "b": ["1/3", "2/3"]}, "seed": 2024}))
    outputs = []
    for k, workers in enumerate((1, 1, 8)):
        out = tmp_path / f"report{k}.json"
        assert main(["verify", "--config", str(cfg), "--out", str(out), "--workers", str(workers)]) == 0
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1] == outputs[2]
