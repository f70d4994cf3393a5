import math

import numpy as np
import pytest

from conftest import make_setup, unit_bump
from levy_squarefn.errors import ResolutionError
from levy_squarefn.models import LevyMeasureModel, build_jump_quadrature
from levy_squarefn.spectral import (Grid, GridFunction, SpectrumFunction,
                                    auto_t_max, build_symbol_grid,
                                    build_time_quadrature,
                                    cauchy_closed_form, forward_transform,
                                    generator_apply, inverse_transform,
                                    maximal_function,
                                    periodized_cauchy_density,
                                    semigroup_apply, spectral_shift,
                                    subordination_check_alpha1,
                                    transition_density)


def test_transform_roundtrip_and_parseval():
    grid = Grid(d=2, N=64, L=4.0)
    rng = np.random.default_rng(0)
    f = GridFunction(grid, rng.standard_normal(grid.shape))
    F = forward_transform(f)
    back = inverse_transform(F)
    assert np.max(np.abs(back.values - f.values)) < 1e-12
    lhs = np.sum(f.values ** 2) * grid.h ** 2
    rhs = np.sum(np.abs(F.values) ** 2) / (2.0 * grid.L) ** 2
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_gaussian_transform_closed_form():
    grid = Grid(d=1, N=512, L=16.0)
    sigma = 1.3
    x = grid.axis_points()
    f = GridFunction(grid, np.exp(-x ** 2 / (2 * sigma ** 2)))
    F = forward_transform(f)
    xi = grid.axis_freqs()
    exact = sigma * math.sqrt(2.0 * math.pi) \
        * np.exp(-sigma ** 2 * xi ** 2 / 2.0)
    assert np.max(np.abs(F.values - exact)) < 1e-10


def test_spectral_shift_is_translation():
    grid = Grid(d=1, N=256, L=8.0)
    f = unit_bump(grid, width=0.8)
    shifted = spectral_shift(f, [grid.h * 7])
    assert np.max(np.abs(shifted.values - np.roll(f.values, -7))) < 1e-10


def test_transition_density_matches_periodized_cauchy():
    grid = Grid(d=1, N=1024, L=16.0)
    model = LevyMeasureModel("isotropic-stable", d=1, alpha=1.0)
    symbol = build_symbol_grid(model, grid)
    p1 = transition_density(symbol, 1.0)
    ref = periodized_cauchy_density(grid, 1.0, n_images=64)
    rel = np.abs(p1.values - ref.values) / ref.values
    assert np.max(rel) < 1e-3
    assert p1.integral() == pytest.approx(1.0, abs=1e-6)


def test_transition_density_d2():
    grid = Grid(d=2, N=512, L=8.0)
    model = LevyMeasureModel("isotropic-stable", d=2, alpha=1.0)
    symbol = build_symbol_grid(model, grid)
    p1 = transition_density(symbol, 1.0)
    ref = periodized_cauchy_density(grid, 1.0, n_images=12)
    mask = np.linalg.norm(grid.points(), axis=-1) <= 4.0
    rel = np.abs(p1.values - ref.values)[mask] / ref.values[mask]
    assert np.max(rel) < 1e-3


def test_nyquist_guard():
    grid = Grid(d=1, N=128, L=16.0)
    model = LevyMeasureModel("isotropic-stable", d=1, alpha=1.0)
    symbol = build_symbol_grid(model, grid)
    with pytest.raises(ResolutionError):
        transition_density(symbol, 0.05)


def test_chapman_kolmogorov(cauchy):
    model, grid, symbol, scheme, tq = cauchy
    pt = transition_density(symbol, 0.75)
    conv = semigroup_apply(symbol, 0.75, pt)
    p2t = transition_density(symbol, 1.5)
    l1 = np.sum(np.abs(conv.values - p2t.values)) * grid.h
    assert l1 < 1e-3


def test_semigroup_contraction(cauchy):
    model, grid, symbol, scheme, tq = cauchy
    f = unit_bump(grid)
    for p in (1.0, 1.5, 2.0, 3.0):
        n0 = f.lp_norm(p)
        for t in (0.01, 0.3, 5.0):
            assert semigroup_apply(symbol, t, f).lp_norm(p) <= n0 * (1 + 1e-12)


def test_maximal_function_dominates_and_bounded(cauchy):
    model, grid, symbol, scheme, tq = cauchy
    f = unit_bump(grid)
    star = maximal_function(symbol, f, tq.nodes)
    assert np.all(star.values >= np.abs(f.values) - 1e-15)
    for p in (1.5, 2.0, 3.0):
        q = p / (p - 1.0)
        assert star.lp_norm(p) <= q * f.lp_norm(p) * (1 + 1e-2)


def test_generator_eigenfunction():
    grid = Grid(d=1, N=256, L=16.0)
    model = LevyMeasureModel("isotropic-stable", d=1, alpha=1.0)
    quad = build_jump_quadrature(model, eps=1e-4, rmax=512.0, n_radial=600)
    xi0 = grid.axis_freqs()[8]
    f = GridFunction(grid, np.cos(xi0 * grid.axis_points()))
    lf = generator_apply(quad, f)
    assert np.max(np.abs(lf.values + xi0 * f.values)) < 1e-3 * xi0


def test_time_quadrature_exponential_integral():
    tq = build_time_quadrature(1e-4, 40.0, 24)
    for c in (0.5, 1.0, 4.0):
        approx = tq.weight_at_zero + np.sum(tq.weights * np.exp(-c * tq.nodes))
        assert approx == pytest.approx(1.0 / c, rel=1e-4)


def test_auto_t_max_scales_with_symbol():
    grid = Grid(d=1, N=256, L=16.0)
    m1 = build_symbol_grid(
        LevyMeasureModel("isotropic-stable", d=1, alpha=1.0), grid)
    m2 = build_symbol_grid(
        LevyMeasureModel("isotropic-stable", d=1, alpha=1.5), grid)
    assert auto_t_max(m1) > 0
    # the lowest nonzero frequency is < 1, so alpha = 1.5 gives the
    # smaller exponent there and needs the longer horizon
    assert auto_t_max(m2) > auto_t_max(m1)


def test_subordination_identity():
    out = subordination_check_alpha1(1, 1.0, [[0.0], [1.0], [3.0]])
    assert out["max_rel_error"] < 1e-8
    assert cauchy_closed_form(1, 1.0, [0.0]) == pytest.approx(
        1.0 / math.pi, rel=1e-14)


def test_tempered_symbol_grid_interpolation():
    grid = Grid(d=1, N=256, L=16.0)
    model = LevyMeasureModel("tempered-stable", d=1, alpha=1.0, lam=0.5)
    quad = build_jump_quadrature(model, eps=1e-6, rmax=200.0, n_radial=800)
    symbol = build_symbol_grid(model, grid, quad=quad)
    # tempered exponent is below the pure stable one, positive elsewhere
    stable = build_symbol_grid(
        LevyMeasureModel("isotropic-stable", d=1, alpha=1.0), grid)
    assert symbol.psi[0] == 0.0
    mask = np.ones(grid.N, dtype=bool)
    mask[0] = False
    assert np.all(symbol.psi[mask] > 0)
    assert np.all(symbol.psi[mask] < stable.psi[mask] + 1e-12)
