import math

import numpy as np
import pytest

from conftest import unit_bump
from levy_squarefn.errors import ParameterError, ResolutionError
from levy_squarefn.spectral import Grid, GridFunction
from levy_squarefn.square_fn import (divergence_probe, duality_bound_check,
                                     isometry_check, polarization_check,
                                     norm_equivalence_report, square_G,
                                     square_Gstar, square_Gtilde)


def _mean_free(grid, width, center, sign=1.0):
    f = unit_bump(grid, width=width, center=center)
    return GridFunction(grid, sign * (f.values - f.values.mean()))


def test_isometry(cauchy):
    model, grid, symbol, scheme, tq = cauchy
    rep = isometry_check(symbol, scheme, tq, unit_bump(grid))
    assert rep.passed
    assert rep.rel_error <= 1e-2


def test_gtilde_half_of_g_in_l2(cauchy_small):
    model, grid, symbol, scheme, tq = cauchy_small
    f = _mean_free(grid, 1.0, 0.5)
    g = square_G(symbol, scheme, tq, f)
    gt = square_Gtilde(symbol, scheme, tq, f)
    assert np.all(gt.values.values <= g.values.values + 1e-14)
    assert 2.0 * gt.lp_norm(2.0) ** 2 == pytest.approx(
        g.lp_norm(2.0) ** 2, rel=2e-2)


def test_homogeneity_and_triangle(cauchy_small):
    model, grid, symbol, scheme, tq = cauchy_small
    f = _mean_free(grid, 0.9, -1.0)
    g = _mean_free(grid, 1.4, 2.0, sign=-1.0)
    gf = square_G(symbol, scheme, tq, f).values.values
    gg = square_G(symbol, scheme, tq, g).values.values
    scaled = square_G(
        symbol, scheme, tq, GridFunction(grid, -2.5 * f.values))
    assert np.max(np.abs(scaled.values.values - 2.5 * gf)) < 1e-10
    both = square_G(
        symbol, scheme, tq, GridFunction(grid, f.values + g.values))
    assert np.all(both.values.values <= gf + gg + 1e-12)


def test_g_below_sqrt2_gstar(cauchy_small):
    model, grid, symbol, scheme, tq = cauchy_small
    f = _mean_free(grid, 1.0, 0.0)
    g = square_G(symbol, scheme, tq, f).values.values
    gs = square_Gstar(symbol, scheme, tq, f).values.values
    assert np.all(g <= math.sqrt(2.0) * gs + 1e-10)


def test_gstar_window_monotone(cauchy_small):
    model, grid, symbol, scheme, tq = cauchy_small
    f = _mean_free(grid, 1.0, 0.0)
    prev = None
    for T in (0.5, 2.0, 8.0):
        cur = square_Gstar(symbol, scheme, tq, f, T=T).values.values
        if prev is not None:
            assert np.all(cur >= prev - 1e-12)
        prev = cur


def test_polarization(cauchy):
    model, grid, symbol, scheme, tq = cauchy
    f = _mean_free(grid, 1.0, -2.0)
    g = _mean_free(grid, 0.7, 1.0)
    rep = polarization_check(symbol, scheme, tq, f, g)
    assert rep.passed


def test_duality_random_pairs(cauchy_small):
    model, grid, symbol, scheme, tq = cauchy_small
    rng = np.random.default_rng(11)
    for _ in range(5):
        c1, c2 = rng.uniform(-4, 4, 2)
        w1, w2 = rng.uniform(0.5, 1.5, 2)
        f = _mean_free(grid, w1, c1)
        h = _mean_free(grid, w2, c2)
        rep = duality_bound_check(symbol, scheme, tq, f, h, p=1.5)
        assert rep.passed


def test_duality_p_range():
    grid = Grid(d=1, N=64, L=8.0)
    f = unit_bump(grid)
    with pytest.raises(ParameterError):
        duality_bound_check(None, None, None, f, f, p=3.0)


def test_norm_equivalence_p2(cauchy):
    model, grid, symbol, scheme, tq = cauchy
    family = [_mean_free(grid, w, c) for w, c in
              ((1.0, -3.0), (0.8, 0.0), (1.2, 2.5))]
    rep = norm_equivalence_report(symbol, scheme, tq, family, 2.0)
    target = 1.0 / math.sqrt(2.0)
    assert rep.min_ratio == pytest.approx(target, abs=1e-2)
    assert rep.max_ratio == pytest.approx(target, abs=1e-2)


def test_probe_requires_d2_and_resolution():
    with pytest.raises(ParameterError):
        divergence_probe(Grid(d=1, N=64, L=2.0), (1e-2,))
    with pytest.raises(ResolutionError):
        divergence_probe(Grid(d=2, N=64, L=2.0), (1e-4, 1e-1))


def test_probe_growth_small():
    grid = Grid(d=2, N=256, L=2.0)
    out = divergence_probe(grid, (1e-1, 1e-2, 1e-3),
                           enforce_resolution=False)
    vals = np.array(out["values"])[:, 0]
    assert vals[0] > vals[1] > vals[2]
