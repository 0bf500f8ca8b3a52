import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mff import (BoundaryError, DigitMeasure, DomainError, EpochSchedule, IsometryCode, ModelParams,
                 UnsupportedCodeError, gamma_point, gray_decode, gray_encode, interval_containing,
                 interval_of_word, neighbor_split_depth, neighbors, nu_log_mass_ball,
                 nu_log_mass_interval, word_of_index)
from mff.diagnostics import _all_words
from mff.symbolic import common_prefix_len

BIN = EpochSchedule()
MIXED = EpochSchedule("squares", c1=2, c2=3)


def w(s):
    return tuple(int(c) for c in s)


def test_gamma_point_examples():
    assert gamma_point(BIN, w("0110")) == 0.375
    assert gamma_point(BIN, w("0000")) == 0.0
    assert gamma_point(MIXED, w("011"), exact=True) == Fraction(2, 9)
    assert gamma_point(MIXED, w("011")) == pytest.approx(2 / 9, abs=1e-15)


def test_interval_of_word_examples():
    assert (interval_of_word(BIN, w("011")).left, interval_of_word(BIN, w("011")).right) == (Fraction(3, 8), Fraction(1, 2))
    assert interval_of_word(BIN, w("000")).right == Fraction(1, 8)
    iv = interval_of_word(MIXED, w("012"))
    assert iv.iota == 5 and (iv.left, iv.right) == (Fraction(5, 18), Fraction(6, 18))
    assert iv.log_length == pytest.approx(-math.log(18))


def test_interval_containing_examples():
    assert interval_containing(BIN, 0.5, 2).word == w("01")
    assert interval_containing(BIN, 0.3, 3).word == w("010")
    assert interval_containing(BIN, 1.0, 2).word == w("11")
    assert interval_containing(BIN, 0.0, 4).word == w("0000")
    with pytest.raises(DomainError):
        interval_containing(BIN, 1.5, 2)
    with pytest.raises(DomainError):
        interval_containing(BIN, 0.5, 60)
    # exact rationals go deeper than floats
    assert interval_containing(BIN, Fraction(1, 3), 60).depth == 60


@settings(max_examples=200)
@given(sched=st.sampled_from([BIN, MIXED]), n=st.integers(1, 10), data=st.data())
def test_index_word_round_trip(sched, n, data):
    total = int(np.prod(sched.sizes(n)))
    i = data.draw(st.integers(0, total - 1))
    iv = interval_of_word(sched, word_of_index(sched, n, i))
    assert iv.iota == i
    assert iv.left == Fraction(i, total)
    assert gamma_point(sched, iv.word, exact=True) == iv.left
    # an interior point maps back to the same cell
    assert interval_containing(sched, (iv.left + iv.right) / 2, n).word == iv.word
    # the right endpoint belongs to the left cell
    assert interval_containing(sched, iv.right, n).word == iv.word


def test_word_of_index_range():
    with pytest.raises(DomainError):
        word_of_index(BIN, 3, 8)


def test_neighbors_examples():
    left, right = neighbors(BIN, interval_of_word(BIN, w("011")))
    assert left.word == w("010") and right.word == w("100")
    left, right = neighbors(BIN, interval_of_word(BIN, w("000")))
    assert left is None and right.word == w("001")
    assert neighbors(BIN, interval_of_word(BIN, w("111")))[1] is None


def test_split_depth_examples():
    assert neighbor_split_depth(BIN, w("011"), "+") == 0
    assert neighbor_split_depth(BIN, w("010"), "+") == 2
    assert neighbor_split_depth(BIN, w("0110"), "-") == 2
    with pytest.raises(BoundaryError):
        neighbor_split_depth(BIN, w("111"), "+")
    with pytest.raises(BoundaryError):
        neighbor_split_depth(BIN, w("000"), "-")


@given(sched=st.sampled_from([BIN, MIXED]), n=st.integers(1, 9), data=st.data())
def test_split_depth_is_common_prefix(sched, n, data):
    total = int(np.prod(sched.sizes(n)))
    i = data.draw(st.integers(0, total - 1))
    word = word_of_index(sched, n, i)
    for side, j in (("+", i + 1), ("-", i - 1)):
        if 0 <= j < total:
            assert neighbor_split_depth(sched, word, side) == common_prefix_len(word, word_of_index(sched, n, j))


def test_gray_examples():
    assert gray_encode(w("000")) == w("000")
    assert gray_encode(w("111")) == w("100")
    assert gray_decode(w("100")) == w("111")
    with pytest.raises(UnsupportedCodeError):
        gray_encode([0, 2])
    with pytest.raises(UnsupportedCodeError):
        IsometryCode("gray").forward(MIXED, [0, 1])


@given(st.lists(st.integers(0, 1), max_size=64))
def test_gray_inverse(word):
    assert gray_decode(gray_encode(word)) == tuple(word)
    assert gray_encode(gray_decode(word)) == tuple(word)


CODES = [IsometryCode("gray"), IsometryCode("permutation", (1, 0), (1, 0))]


@pytest.mark.parametrize("code", CODES)
def test_isometry_prefix_law(code):
    rng = np.random.default_rng(1)
    for _ in range(10_000):
        x = rng.integers(0, 2, 24)
        y = x.copy()
        k = int(rng.integers(0, 25))
        y[k:] = rng.integers(0, 2, 24 - k)
        assert common_prefix_len(code.forward(BIN, x), code.forward(BIN, y)) == common_prefix_len(x, y)
        assert code.preimage(BIN, code.forward(BIN, x)) == tuple(x.tolist())


def test_permutation_code_mixed():
    code = IsometryCode("permutation", (1, 0), (2, 0, 1))
    x = [0, 2, 1, 1, 0]
    assert code.forward(MIXED, x) == (1, 1, 0, 0, 1)
    assert code.preimage(MIXED, code.forward(MIXED, x)) == tuple(x)
    with pytest.raises(UnsupportedCodeError):
        IsometryCode("permutation", (0, 0), (1, 0))
    with pytest.raises(UnsupportedCodeError):
        code.forward(BIN, [0, 1])


def test_one_flip_adjacency():
    for n in range(1, 17):
        words = _all_words(BIN, n)
        pre = np.array([gray_encode(x) for x in words]) if n <= 10 else None
        if pre is None:
            pre = words.copy()
            pre[:, 1:] ^= words[:, :-1]
        assert np.all(np.count_nonzero(pre[1:] != pre[:-1], axis=1) == 1)


def test_nu_interval_examples(running):
    params, schedule = running
    mu = DigitMeasure.base(params, schedule)
    iv = interval_of_word(schedule, w("011"))
    assert nu_log_mass_interval(mu, IsometryCode(), iv) == pytest.approx(math.log(1 / 9), abs=1e-12)
    gray = nu_log_mass_interval(mu, IsometryCode("gray"), interval_of_word(schedule, w("100")))
    assert gray == pytest.approx(mu.log_mass(w("110")), abs=1e-12)
    uniform = DigitMeasure.base(ModelParams((0.5, 0.5), (0.5, 0.5)), schedule)
    assert nu_log_mass_interval(uniform, IsometryCode(), iv) == pytest.approx(math.log(1 / 8))


@pytest.mark.parametrize("code", [IsometryCode(), IsometryCode("gray"), IsometryCode("permutation", (1, 0), (0, 1))])
def test_tiling(running, code):
    params, schedule = running
    mu = DigitMeasure.base(params, schedule)
    for n in range(1, 13):
        total = 2**n
        ivs = [interval_of_word(schedule, word_of_index(schedule, n, i)) for i in range(total)]
        assert all(a.right == b.left for a, b in zip(ivs, ivs[1:]))
        logs = [nu_log_mass_interval(mu, code, iv) for iv in ivs]
        assert math.fsum(np.exp(logs)) == pytest.approx(1.0, abs=1e-10)


def test_ball_examples(running):
    params, schedule = running
    mu = DigitMeasure.base(params, schedule)
    uniform = DigitMeasure.base(ModelParams((0.5, 0.5), (0.5, 0.5)), schedule)
    ball = nu_log_mass_ball(uniform, IsometryCode(), 0.5, 0.25, 10)
    assert ball.exact and ball.lower == pytest.approx(math.log(0.5))
    ball = nu_log_mass_ball(mu, IsometryCode(), Fraction(1, 2), Fraction(1, 8), 8)
    assert ball.exact
    assert ball.lower == pytest.approx(np.logaddexp(mu.log_mass(w("011")), mu.log_mass(w("100"))), abs=1e-12)
    assert nu_log_mass_ball(mu, IsometryCode(), 0.3, 1.0, 5) == (0.0, 0.0)
    with pytest.raises(DomainError):
        nu_log_mass_ball(mu, IsometryCode(), 0.3, 0.0, 5)


@settings(max_examples=60)
@given(x=st.fractions(0, 1), r=st.fractions(Fraction(1, 1000), Fraction(1, 2)))
def test_ball_bracket_brute_force(x, r):
    """The bracket equals the inner and outer cell sums at the cap depth."""
    schedule = BIN
    mu = DigitMeasure.base(ModelParams((0.25, 0.75), (1 / 3, 2 / 3)), schedule)
    cap = 10
    masses = np.exp(mu.log_mass_many(_all_words(schedule, cap)))
    lo, hi = max(Fraction(0), x - r), min(Fraction(1), x + r)
    inner = sum(m for i, m in enumerate(masses) if lo <= Fraction(i, 1024) and Fraction(i + 1, 1024) <= hi)
    outer = sum(m for i, m in enumerate(masses) if Fraction(i + 1, 1024) > lo and Fraction(i, 1024) < hi)
    bracket = nu_log_mass_ball(mu, IsometryCode(), x, r, cap)
    assert math.exp(bracket.lower) == pytest.approx(inner, abs=1e-12)
    assert math.exp(bracket.upper) == pytest.approx(min(outer, 1.0), abs=1e-12)
    assert bracket.lower <= bracket.upper


def test_ball_interval_consistency(running):
    """Balls of radius about half a cell sit between a grandchild share and the cell plus neighbours."""
    params, schedule = running
    mu = DigitMeasure.base(params, schedule)
    c0_prime = min(min(params.a), min(params.b)) ** 2
    rng = np.random.default_rng(4)
    for _ in range(200):
        n = int(rng.integers(2, 16))
        x = Fraction(int(rng.integers(1, 2**30)), 2**30)
        r = Fraction(int(rng.integers(2**20 + 1, 2**21 + 1)), 2**(n + 22))
        iv = interval_containing(schedule, x, n)
        log_i = mu.log_mass(iv.word)
        nbrs = [mu.log_mass(v.word) for v in neighbors(schedule, iv) if v is not None]
        ball = nu_log_mass_ball(mu, IsometryCode(), x, r, n + 12)
        assert ball.upper <= np.logaddexp.reduce([log_i, *nbrs]) + 1e-9
        assert ball.lower >= math.log(c0_prime) + min([log_i, *nbrs]) - 1e-9
