import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kloostlab import boundslab as lab
from kloostlab import expsums as ex
from kloostlab.bilinear import SURROGATE_BOUNDS
from kloostlab.modarith import DomainError, primes_up_to
from kloostlab.rng import SplitMix64

PRIMES = primes_up_to(60)


def oracle_pairs(p, X, Y):
    return sum(
        1
        for x in range(-X, X + 1)
        for y in range(-Y, Y + 1)
        if x and y and (x * y - 1) % p == 0
    )


# --- inverse pairs -----------------------------------------------------------


def test_count_anchors():
    assert lab.count_inverse_pairs_bruteforce(5, 1, 1) == lab.count_inverse_pairs_divisor(5, 1, 1) == 2
    assert lab.count_inverse_pairs_bruteforce(7, 3, 3) == 6
    assert lab.count_inverse_pairs_divisor(7, 3, 3) == 6
    for p in (3, 5, 101, 199):
        assert lab.count_inverse_pairs_bruteforce(p, p - 1, p - 1) == 4 * (p - 1)
        assert lab.count_inverse_pairs_divisor(p, p - 1, p - 1) == 4 * (p - 1)
    assert lab.count_inverse_pairs_divisor(101, 1, 1) == 2


@pytest.mark.parametrize("p", [3, 5, 7, 13, 29])
def test_counters_match_oracle_on_full_grid(p):
    for X in range(1, p):
        for Y in range(1, p):
            expected = oracle_pairs(p, X, Y)
            assert lab.count_inverse_pairs_bruteforce(p, X, Y) == expected
            assert lab.count_inverse_pairs_divisor(p, X, Y) == expected


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(primes_up_to(3000)), st.data())
def test_counters_agree(p, data):
    X = data.draw(st.integers(1, p - 1))
    Y = data.draw(st.integers(1, p - 1))
    bf = lab.count_inverse_pairs_bruteforce(p, X, Y)
    assert bf == lab.count_inverse_pairs_divisor(p, X, Y)
    assert bf == lab.count_inverse_pairs_bruteforce(p, Y, X)


def test_counts_are_monotone():
    p = 37
    grid = np.array([[lab.count_inverse_pairs_divisor(p, X, Y) for Y in range(1, p)] for X in range(1, p)])
    assert np.all(np.diff(grid, axis=0) >= 0) and np.all(np.diff(grid, axis=1) >= 0)
    assert np.array_equal(grid, grid.T)


def test_counters_reject_out_of_range():
    for f in (lab.count_inverse_pairs_bruteforce, lab.count_inverse_pairs_divisor):
        with pytest.raises(DomainError):
            f(7, 0, 3)
        with pytest.raises(DomainError):
            f(7, 3, 7)


def test_inverse_pair_growth_is_bounded():
    pairs = [(10, 10), (50, 50), (100, 100)]
    g0 = lab.inverse_pair_growth(101, pairs)
    assert g0 == max(lab.count_inverse_pairs_divisor(101, X, Y) / (X * Y / 101 + 1) for X, Y in pairs)
    assert g0 <= 4 * math.log(101)
    assert lab.inverse_pair_growth(101, pairs, c=1) == pytest.approx(g0 / math.log(101))


# --- double-sum inequality ---------------------------------------------------


def test_vinogradov_example():
    p = 5
    res = lab.vinogradov_check(p, [0, 1, 2, 3, 4], [1], np.ones(5), [1])
    # sum_u e_p(u) vanishes
    assert res.lhs == pytest.approx(0, abs=1e-12)
    assert res.rhs == pytest.approx(5)
    assert res.holds


def test_vinogradov_singletons():
    res = lab.vinogradov_check(13, [3], [5], [1], [1])
    assert res.lhs == pytest.approx(1) and res.rhs == pytest.approx(math.sqrt(13)) and res.holds


def test_vinogradov_matches_direct_sum():
    p = 13
    U, V = [1, 4, 7], [0, 2, 3, 12]
    phi = [1, 2j, -0.5]
    psi = [0.3, 1, 1j, -1]
    direct = sum(a * b * cmath.exp(2j * math.pi * u * v / p) for u, a in zip(U, phi) for v, b in zip(V, psi))
    assert lab.vinogradov_check(p, U, V, phi, psi).lhs == pytest.approx(abs(direct), abs=1e-12)


def test_vinogradov_equality_on_full_sets():
    # with U = V = [0, p-1] and phi = e_p(-u v0), the bound is attained
    p, v0 = 11, 3
    U = list(range(p))
    phi = [cmath.exp(-2j * math.pi * u * v0 / p) for u in U]
    psi = np.zeros(p, dtype=complex)
    psi[v0] = 1
    res = lab.vinogradov_check(p, U, U, phi, psi)
    assert res.lhs == pytest.approx(res.rhs, rel=1e-12)
    assert res.holds


def test_vinogradov_rejects_bad_input():
    with pytest.raises(DomainError):
        lab.vinogradov_check(7, [0, 7], [1], [1, 1], [1])
    with pytest.raises(DomainError):
        lab.vinogradov_check(7, [0, 1], [1], [1], [1])


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(primes_up_to(400)), st.integers(0, 2**63))
def test_vinogradov_random_instances_hold(p, seed):
    res = lab.vinogradov_check(p, *lab.random_vinogradov_instance(p, SplitMix64(seed)))
    assert res.holds


# --- sweeps ------------------------------------------------------------------


def test_grid_point_validation():
    with pytest.raises(DomainError):
        lab.GridPoint(2, 2, policy="middle")
    with pytest.raises(DomainError):
        lab.GridPoint(2, 2, scheme="gaussian")
    with pytest.raises(DomainError):
        lab.GridPoint(2, 2, positions=0)


def test_sweep_example_p101():
    grid = [lab.GridPoint(m, m, positions=5) for m in (2, 4, 8, 16)]
    reports = lab.run_sweep(101, grid, seed=1)
    assert len(reports) == 20
    assert [r.row for r in reports] == list(range(20))
    for r in reports:
        assert {"p", "M", "N", "K", "L", "s_value", "bounds", "ratios", "seed"} <= set(r.to_dict())
        assert r.ratios["trivial"] <= 1
        assert r.ratios["majorant"] <= 1 + 1e-12
        assert r.ratios["completed_l2"] <= 1 + 1e-12
        assert 0 <= r.K <= 100 - r.M and 0 <= r.L <= 100 - r.N
        assert set(r.surrogates) == {k for k in r.bounds if k.split("_c")[0] in SURROGATE_BOUNDS}
        assert {"unweighted_mn_c0", "unweighted_mn_c1", "unweighted_mn_c2"} <= set(r.surrogates)
        for name, value in r.bounds.items():
            assert r.ratios[name] * value == pytest.approx(r.s_value, rel=1e-12)


@pytest.mark.parametrize("scheme", lab.WEIGHT_SCHEMES)
def test_sweep_hard_bounds_all_schemes(scheme):
    grid = [lab.GridPoint(m, n, "uniform", scheme, 3) for m, n in ((1, 1), (5, 40), (60, 3), (100, 100))]
    for r in lab.run_sweep(101, grid, seed=9):
        for name in lab.HARD_BOUNDS:
            if name in r.bounds:
                assert r.s_value <= r.bounds[name] + ex.tol(101)


def test_sweep_single_term_and_full_rows():
    p = 101
    r = lab.run_sweep(p, [lab.GridPoint(1, 1, "initial")], seed=0)[0]
    assert r.s_value == pytest.approx(abs(ex.kloosterman(p, 1, 1)), abs=1e-12)
    assert r.ratios["trivial"] == pytest.approx(r.s_value / (2 * math.sqrt(p)))
    full = lab.run_sweep(p, [lab.GridPoint(p - 1, p - 1)], seed=0)[0]
    assert full.s_value == pytest.approx(p - 1, abs=ex.tol(p))
    assert full.ratios["trivial"] == pytest.approx((p - 1) / (2 * (p - 1) ** 2 * math.sqrt(p)), rel=1e-9)


def test_sweep_initial_policy_and_single_plogp():
    reports = lab.run_sweep(211, [lab.GridPoint(30, 1, "initial", "ones", 2)], seed=0)
    assert all(r.K == 0 and r.L == 0 for r in reports)
    assert "single_plogp" in reports[0].bounds
    assert "initial_l1" in reports[0].bounds


def test_sweep_is_deterministic_across_jobs():
    grid = [lab.GridPoint(m, m, "uniform", s, 4) for m in (3, 9, 27) for s in ("ones", "unit_a")]
    serial = [r.to_dict() for r in lab.run_sweep(101, grid, seed=5, jobs=1)]
    parallel = [r.to_dict() for r in lab.run_sweep(101, grid, seed=5, jobs=2)]
    assert serial == parallel
    assert serial != [r.to_dict() for r in lab.run_sweep(101, grid, seed=6, jobs=1)]


def test_sweep_rejects_oversized_lengths():
    with pytest.raises(DomainError):
        lab.run_sweep(11, [lab.GridPoint(11, 1)], seed=0)


def test_sweep_raises_on_hard_violation(monkeypatch):
    monkeypatch.setattr(lab, "completed_l2_bound", lambda p, A, B: 0.0)
    with pytest.raises(lab.BoundViolation, match="completed_l2"):
        lab.run_sweep(31, [lab.GridPoint(3, 3)], seed=0)


def test_summarize_groups_by_grid_point():
    grid = [lab.GridPoint(4, 4, positions=3), lab.GridPoint(8, 8, scheme="unit_a", positions=2)]
    reports = lab.run_sweep(101, grid, seed=2)
    summary = lab.summarize(reports)
    assert [s["rows"] for s in summary] == [3, 2]
    assert summary[0]["max_s_value"] == max(r.s_value for r in reports[:3])
    assert summary[1]["max_ratios"]["l2_weighted"] == max(r.ratios["l2_weighted"] for r in reports[3:])
