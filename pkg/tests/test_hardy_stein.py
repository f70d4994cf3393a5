import math

import numpy as np
import pytest

from conftest import unit_bump
from levy_squarefn.hardy_stein import (F, F_eps, PExponent,
                                       hardy_stein_rhs,
                                       taylor_bound_ratios)


def test_F_quadratic_case():
    rng = np.random.default_rng(0)
    a = rng.standard_normal(100)
    b = rng.standard_normal(100)
    assert np.max(np.abs(F(2.0, a, b) - (b - a) ** 2)) < 1e-14


def test_F_vanishing_base_point():
    b = np.array([-2.0, -0.5, 0.5, 2.0])
    for p in (1.5, 2.0, 3.0):
        assert np.max(np.abs(F(p, 0.0, b) - np.abs(b) ** p)) < 1e-14
        assert np.all(F(p, b, b) == 0.0)


def test_F_nonnegative_samples():
    rng = np.random.default_rng(1)
    a = rng.uniform(-10, 10, 5000)
    b = rng.uniform(-10, 10, 5000)
    for p in (1.1, 1.5, 2.0, 3.0, 4.5):
        assert np.min(F(p, a, b)) >= -1e-14


def test_F_eps_limit():
    a, b = 0.7, -1.3
    for p in (1.2, 2.5):
        vals = [F_eps(p, e, a, b) for e in (1e-2, 1e-4, 1e-6)]
        assert vals[-1] == pytest.approx(F(p, a, b), rel=1e-6)


def test_F_eps_upper_bound_lemma():
    # 0 <= F_eps <= F / (p - 1) for p in (1, 2), any eps
    rng = np.random.default_rng(7)
    n = 100000
    a = np.concatenate([rng.uniform(-10, 10, n // 2),
                        np.exp(rng.uniform(np.log(1e-6), np.log(10),
                                           n // 2))
                        * rng.choice([-1, 1], n // 2)])
    b = np.concatenate([rng.uniform(-10, 10, n // 2),
                        np.exp(rng.uniform(np.log(1e-6), np.log(10),
                                           n // 2))
                        * rng.choice([-1, 1], n // 2)])
    eps = np.exp(rng.uniform(np.log(1e-8), np.log(10), n))
    for p in (1.1, 1.5, 1.9):
        fe = F_eps(p, eps, a, b)
        f0 = F(p, a, b)
        assert np.min(fe) >= -1e-12
        assert np.all(fe <= f0 / (p - 1.0) + 1e-12)


def test_taylor_ratio_extremes_seed_stable():
    for p in (1.1, 1.5, 1.9):
        r1 = taylor_bound_ratios(p, sample_count=100000, seed=0)
        r2 = taylor_bound_ratios(p, sample_count=100000, seed=1)
        assert 0.0 < r1["min_ratio"] <= r1["max_ratio"] < math.inf
        assert r1["min_ratio"] == pytest.approx(r2["min_ratio"], rel=0.05)
        assert r1["max_ratio"] == pytest.approx(r2["max_ratio"], rel=0.05)


def test_taylor_ratio_p2_is_one():
    r = taylor_bound_ratios(2.0, sample_count=100000, seed=0)
    assert r["min_ratio"] == pytest.approx(1.0, abs=1e-3)
    assert r["max_ratio"] == pytest.approx(1.0, abs=1e-3)


def test_pexponent_validation():
    with pytest.raises(Exception):
        PExponent(1.0)
    assert PExponent(1.5).q == pytest.approx(3.0)


def test_identity_cauchy(cauchy):
    model, grid, symbol, scheme, tq = cauchy
    f = unit_bump(grid)
    for p in (1.5, 2.0, 3.0):
        rep = hardy_stein_rhs(symbol, scheme, tq, f, p)
        assert rep.rel_error <= 2e-2
        assert rep.horizon_term >= 0.0
        assert rep.time_integral >= 0.0


def test_identity_stable15(stable15):
    model, grid, symbol, scheme, tq = stable15
    f = unit_bump(grid, width=0.8)
    rep = hardy_stein_rhs(symbol, scheme, tq, f, 2.0)
    assert rep.rel_error <= 2e-2


def test_identity_exact_for_p2_mean_free(cauchy_small):
    # for p = 2 the identity reduces to the L2 isometry, which the
    # torus quadrature reproduces to time-quadrature accuracy
    model, grid, symbol, scheme, tq = cauchy_small
    f = unit_bump(grid, width=1.2)
    rep = hardy_stein_rhs(symbol, scheme, tq, f, 2.0)
    assert rep.rel_error <= 2e-2
