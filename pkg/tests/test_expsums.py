import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kloostlab import expsums as ex
from kloostlab.interval import Interval
from kloostlab.modarith import DomainError, get_context, legendre, primes_up_to

PRIMES = primes_up_to(120)


def e(z, p):
    return cmath.exp(2j * math.pi * z / p)


def brute_kloosterman(p, m, n):
    total = 0j
    for x in range(1, p):
        xbar = next(y for y in range(1, p) if x * y % p == 1)
        total += e(m * x + n * xbar, p)
    return total


def brute_gauss(p, k, a):
    return sum(e(a * pow(x, k, p) % p, p) for x in range(p))


def divisors_of(n):
    return [d for d in range(1, n + 1) if n % d == 0]


# --- additive character and Kloosterman sums --------------------------------


def test_additive_char_examples():
    assert ex.additive_char(0, 13) == 1
    assert abs(ex.additive_char(13, 13) - 1) < 1e-15
    z = ex.additive_char(1, 5)
    assert z.real == pytest.approx(math.cos(2 * math.pi / 5), abs=1e-15)
    assert z.real == pytest.approx(0.309017, abs=1e-6)
    assert z.imag == pytest.approx(0.951057, abs=1e-6)


def test_kloosterman_degenerate():
    for p in (5, 7, 101):
        assert ex.kloosterman(p, 0, 0) == pytest.approx(p - 1, abs=ex.tol(p))
        for m in (1, 2, p - 1):
            assert ex.kloosterman(p, m, 0) == pytest.approx(-1, abs=ex.tol(p))
            assert ex.kloosterman(p, 0, m) == pytest.approx(-1, abs=ex.tol(p))


def test_kloosterman_p5():
    expected = 2 + 2 * math.cos(4 * math.pi / 5)
    assert brute_kloosterman(5, 1, 1).real == pytest.approx(expected, abs=1e-14)
    assert ex.kloosterman(5, 1, 1) == pytest.approx(expected, abs=1e-12)
    assert ex.kloosterman(5, 1, 1) == pytest.approx(0.381966, abs=1e-6)


@pytest.mark.parametrize("p", [3, 7, 13, 31])
def test_kloosterman_matches_brute_force(p):
    for m in range(p):
        for n in range(0, p, 3):
            assert ex.kloosterman(p, m, n) == pytest.approx(brute_kloosterman(p, m, n).real, abs=1e-11)


def test_kloosterman_row_matches_pointwise():
    p = 53
    for n in (1, 2, 17):
        re, im = ex.kloosterman_row(p, n)
        assert np.abs(im).max() < ex.tol(p)
        assert np.allclose(re, [ex.kloosterman(p, m, n) for m in range(1, p)], atol=1e-12)


@settings(max_examples=60)
@given(st.sampled_from(PRIMES), st.data())
def test_kloosterman_invariants(p, data):
    m = data.draw(st.integers(1, p - 1))
    n = data.draw(st.integers(1, p - 1))
    k = ex.kloosterman_complex(p, m, n)
    assert abs(k.imag) <= ex.tol(p)
    assert abs(k.real) <= 2 * math.sqrt(p) + ex.tol(p)
    assert ex.kloosterman(p, n, m) == pytest.approx(k.real, abs=ex.tol(p))
    assert ex.kloosterman(p, m * n % p, 1) == pytest.approx(k.real, abs=ex.tol(p))


# --- characters --------------------------------------------------------------


def test_char_value_examples():
    ctx = get_context(11)
    for x in range(1, 11):
        assert ex.char_value(ctx, 0, x) == 1
    for j in range(10):
        assert ex.char_value(ctx, j, 1) == 1
        assert ex.char_value(ctx, j, 0) == 0
    ctx7 = get_context(7)
    for x in range(7):
        assert ex.char_value(ctx7, 3, x) == pytest.approx(legendre(x, 7), abs=1e-15)


@pytest.mark.parametrize("p", [7, 13, 29])
def test_characters_are_multiplicative_and_conjugate(p):
    ctx = get_context(p)
    for j in range(p - 1):
        chi = ex.character_values(ctx, j)
        conj = ex.character_values(ctx, p - 1 - j)
        assert np.allclose(conj, np.conj(chi), atol=1e-14)
        for x in range(1, p):
            for y in range(1, p):
                assert chi[x * y % p] == pytest.approx(chi[x] * chi[y], abs=1e-13)
        assert abs(chi[ctx.g] ** ex.char_order(ctx, j) - 1) < 1e-12


def test_tau_examples():
    ctx = get_context(13)
    for a in range(1, 13):
        assert ex.tau(ctx, a, 0) == pytest.approx(-1, abs=1e-12)
    for j in range(1, 12):
        assert abs(ex.tau(ctx, 0, j)) < 1e-12
    assert abs(ex.tau(get_context(5), 1, 2)) == pytest.approx(math.sqrt(5), abs=1e-12)
    assert abs(ex.tau(get_context(5), 1, 2)) == pytest.approx(2.236068, abs=1e-6)


@settings(max_examples=40)
@given(st.sampled_from(PRIMES), st.data())
def test_tau_modulus_and_twist(p, data):
    ctx = get_context(p)
    j = data.draw(st.integers(1, p - 2))
    a = data.draw(st.integers(1, p - 1))
    t = ex.tau(ctx, a, j)
    assert abs(t) == pytest.approx(math.sqrt(p), abs=ex.tol(p))
    # tau(a; chi) = conj(chi)(a) tau(1; chi)
    assert t == pytest.approx(ex.char_value(ctx, p - 1 - j, a) * ex.tau(ctx, 1, j), abs=ex.tol(p))


# --- Gauss sums -------------------------------------------------------------


def test_gauss_sum_examples():
    for p in (5, 7, 13):
        for k in divisors_of(p - 1):
            assert ex.gauss_sum(p, k, 0) == pytest.approx(p, abs=1e-12)
        for a in range(1, p):
            assert abs(ex.gauss_sum(p, 1, a)) < 1e-12
    g = ex.gauss_sum(5, 2, 1)
    assert g.real == pytest.approx(1 + 4 * math.cos(2 * math.pi / 5), abs=1e-12)
    assert g.real == pytest.approx(math.sqrt(5), abs=1e-12)
    assert abs(g.imag) < 1e-12


def test_gauss_sum_rejects_bad_k():
    with pytest.raises(DomainError):
        ex.gauss_sum(7, 4, 1)
    with pytest.raises(DomainError):
        ex.gauss_sum(7, 0, 1)


@pytest.mark.parametrize("p", [5, 7, 13, 31])
def test_gauss_sum_matches_brute_force(p):
    for k in divisors_of(p - 1):
        for a in range(p):
            assert ex.gauss_sum(p, k, a) == pytest.approx(brute_gauss(p, k, a), abs=1e-10)


def test_gauss_via_characters_examples():
    ctx = get_context(11)
    for a in range(1, 11):
        assert ex.gauss_via_characters(ctx, 1, a) == 0
    assert ex.gauss_via_characters(get_context(5), 2, 1) == pytest.approx(ex.gauss_sum(5, 2, 1), abs=1e-12)
    assert ex.gauss_via_characters(get_context(7), 3, 2) == pytest.approx(ex.gauss_sum(7, 3, 2), abs=1e-12)


@pytest.mark.parametrize("p", [7, 13, 37, 61])
def test_gauss_via_characters_all(p):
    ctx = get_context(p)
    for k in divisors_of(p - 1):
        for a in range(1, p):
            assert ex.gauss_via_characters(ctx, k, a) == pytest.approx(ex.gauss_sum(p, k, a), abs=ex.tol(p))


def test_weighted_decomposition_is_not_the_gauss_sum():
    # an extra conj(chi)(a) weight breaks the identity once chi(a) != 1
    ctx = get_context(7)
    weighted = ex.gauss_via_characters_weighted(ctx, 3, 2)
    assert abs(weighted - ex.gauss_sum(7, 3, 2)) > 1.0
    assert ex.gauss_via_characters_weighted(ctx, 3, 1) == pytest.approx(ex.gauss_sum(7, 3, 1), abs=1e-12)


# --- quadratic sums ----------------------------------------------------------


def test_quad_sum_examples():
    for p in (5, 7, 11):
        for a in range(1, p):
            assert ex.quad_sum_complete(p, a, 0) == pytest.approx(legendre(a, p) * ex.gauss_sum(p, 2, 1), abs=1e-12)
    assert ex.quad_sum_complete(5, 1, 0) == pytest.approx(math.sqrt(5), abs=1e-12)
    direct = sum(e(2 * x * x + 3 * x, 7) for x in range(7))
    assert ex.quad_sum_complete(7, 2, 3) == pytest.approx(direct, abs=1e-12)
    assert abs(ex.quad_sum_complete(7, 2, 3) - ex.quad_sum_closed_form(7, 2, 3)) < 1e-9
    assert ex.quad_completion_holds(7, 2, 3)
    with pytest.raises(DomainError):
        ex.quad_sum_complete(7, 14, 1)


@pytest.mark.parametrize("p", [3, 11, 43])
def test_quad_completion_all(p):
    for a in range(1, p):
        for b in range(p):
            assert ex.quad_completion_holds(p, a, b)


# --- interval sums H and F -------------------------------------------------


def test_interval_phase_sums():
    p = 17
    I = Interval(3, 5)
    gamma = ex.interval_phase_sums(p, I)
    for r in range(p):
        assert gamma[r] == pytest.approx(sum(e(m * r, p) for m in range(4, 9)), abs=1e-13)


def test_h_sum_examples():
    p = 13
    ctx = get_context(p)
    for k in divisors_of(p - 1):
        for a in (1, 5):
            direct, via = ex.h_sum(ctx, k, a, Interval.single(4))
            assert direct == pytest.approx(ex.gauss_sum(p, k, 4 * a % p), abs=1e-12)
            assert via == pytest.approx(direct, abs=1e-12)
            direct, via = ex.h_sum(ctx, k, a, Interval.full(p))
            assert abs(direct) < ex.tol(p) and abs(via) < ex.tol(p)
    direct, via = ex.h_sum(get_context(7), 2, 1, Interval(0, 3))
    assert abs(direct - via) < 1e-9
    brute = sum(brute_gauss(7, 2, m) for m in (1, 2, 3))
    assert direct == pytest.approx(brute, abs=1e-12)


@settings(max_examples=40)
@given(st.sampled_from(primes_up_to(80, start=5)), st.data())
def test_h_sum_paths_agree(p, data):
    ctx = get_context(p)
    k = data.draw(st.sampled_from(divisors_of(p - 1)))
    a = data.draw(st.integers(1, p - 1))
    M = data.draw(st.integers(1, p - 1))
    K = data.draw(st.integers(0, p - 1 - M))
    direct, via = ex.h_sum(ctx, k, a, Interval(K, M))
    assert direct == pytest.approx(via, abs=ex.tol(p))


@pytest.mark.parametrize("p", [7, 11, 23])
def test_h_sum_quadratic_modulus_identity(p):
    # k = 2: one nonprincipal character, so |H| = sqrt(p) |sum_m (am/p)| exactly
    ctx = get_context(p)
    for a in (1, 2, p - 1):
        for M in (1, 3, p // 2):
            I = Interval(1, M)
            direct, _ = ex.h_sum(ctx, 2, a, I)
            rhs = math.sqrt(p) * abs(sum(legendre(a * m, p) for m in range(2, M + 2)))
            assert abs(direct) == pytest.approx(rhs, abs=ex.tol(p))


def test_h_sum_general_k_triangle_inequality():
    p = 31
    ctx = get_context(p)
    I = Interval(2, 9)
    for k in (3, 5, 6, 10):
        for a in (1, 3, 7):
            direct, _ = ex.h_sum(ctx, k, a, I)
            rhs = math.sqrt(p) * sum(
                abs(sum(ex.char_value(ctx, p - 1 - j, m) for m in range(3, 12)))
                for j in ex._characters_killed_by(p, k)
            )
            assert abs(direct) <= rhs + ex.tol(p)


def test_f_sum_examples():
    p = 11
    for a in (1, 4):
        for b in (0, 3):
            direct, via = ex.f_sum(p, a, b, Interval.single(6))
            assert direct == pytest.approx(ex.quad_sum_complete(p, 6 * a % p, 6 * b % p), abs=1e-12)
            assert via == pytest.approx(direct, abs=1e-12)
        direct, via = ex.f_sum(p, a, 0, Interval.full(p))
        assert abs(direct) < ex.tol(p) and abs(via) < ex.tol(p)
    direct, via = ex.f_sum(7, 1, 1, Interval.full(7))
    brute = sum(e(m * (x * x + x), 7) for m in range(1, 7) for x in range(7))
    assert direct == pytest.approx(brute, abs=1e-12)
    assert abs(direct) == pytest.approx(7, abs=1e-12)
    assert via == pytest.approx(direct, abs=1e-12)
    with pytest.raises(DomainError):
        ex.f_sum(7, 0, 1, Interval.full(7))


@settings(max_examples=40)
@given(st.sampled_from(primes_up_to(80)), st.data())
def test_f_sum_paths_agree(p, data):
    a = data.draw(st.integers(1, p - 1))
    b = data.draw(st.integers(0, p - 1))
    M = data.draw(st.integers(1, p - 1))
    K = data.draw(st.integers(0, p - 1 - M))
    direct, via = ex.f_sum(p, a, b, Interval(K, M))
    assert direct == pytest.approx(via, abs=ex.tol(p))
