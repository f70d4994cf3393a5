import numpy as np
import pytest

from conftest import unit_bump
from levy_squarefn.errors import CostGuardError, ParameterError
from levy_squarefn.jumps import build_torus_scheme
from levy_squarefn.models import LevyMeasureModel
from levy_squarefn.spectral import (Grid, GridFunction, build_symbol_grid,
                                    build_time_quadrature,
                                    transition_density)
from levy_squarefn import mc


CAUCHY = LevyMeasureModel("isotropic-stable", d=1, alpha=1.0)


def test_path_config_validation():
    with pytest.raises(ParameterError):
        mc.PathConfig(eps=0.0, T=1.0, n=2000, seed=1)
    with pytest.raises(ParameterError):
        mc.PathConfig(eps=0.1, T=1.0, n=10, seed=1)


def test_cost_guard():
    cfg = mc.PathConfig(eps=1e-9, T=100.0, n=1000, seed=1)
    with pytest.raises(CostGuardError):
        mc.simulate_paths(CAUCHY, cfg)


def test_same_seed_identical_paths():
    cfg = mc.PathConfig(eps=0.1, T=1.0, n=1000, seed=99)
    a = mc.simulate_paths(CAUCHY, cfg)
    b = mc.simulate_paths(CAUCHY, cfg)
    for x, y in zip(a, b):
        assert np.array_equal(x.times, y.times)
        assert np.array_equal(x.jumps, y.jumps)
    c = mc.simulate_paths(CAUCHY, mc.PathConfig(eps=0.1, T=1.0, n=1000,
                                                seed=100))
    assert not np.array_equal(a[0].times, c[0].times)


def test_jump_statistics():
    cfg = mc.PathConfig(eps=0.2, T=2.0, n=4000, seed=5)
    paths = mc.simulate_paths(CAUCHY, cfg)
    lam = CAUCHY.tail_mass(0.2)
    counts = np.array([len(p.times) for p in paths])
    se = np.sqrt(lam * cfg.T / cfg.n)
    assert abs(counts.mean() - lam * cfg.T) < 4 * se
    # stable radius tail: P(|jump| > 2 eps) = 2^(-alpha)
    radii = np.concatenate([np.abs(p.jumps[:, 0]) for p in paths])
    assert np.min(radii) >= 0.2
    frac = np.mean(radii > 0.4)
    assert abs(frac - 0.5) < 4 * np.sqrt(0.25 / len(radii))


def test_position_at_accumulates_jumps():
    cfg = mc.PathConfig(eps=0.1, T=1.0, n=1000, seed=2)
    path = mc.simulate_paths(CAUCHY, cfg)[0]
    k = len(path.times) // 2
    if k:
        mid = 0.5 * (path.times[k - 1] + path.times[k])
        expect = path.jumps[:k].sum(axis=0)
        assert np.allclose(path.position_at(mid), expect)
    assert np.allclose(path.position_at(0.0), path.start)


def test_compound_poisson_jumps_from_atoms():
    cp = LevyMeasureModel("compound-poisson", d=1,
                          atoms=(((1.0,), 0.5), ((-1.0,), 0.5)))
    cfg = mc.PathConfig(eps=0.1, T=3.0, n=1000, seed=8)
    paths = mc.simulate_paths(cp, cfg)
    jumps = np.concatenate([p.jumps[:, 0] for p in paths])
    assert set(np.unique(jumps)) <= {-1.0, 1.0}


def test_empirical_density():
    grid = Grid(d=1, N=1024, L=16.0)
    symbol = build_symbol_grid(CAUCHY, grid)
    dens = transition_density(symbol, 0.5)
    cfg = mc.PathConfig(eps=1e-3, T=0.5, n=20000, seed=11)
    rep = mc.empirical_density_check(CAUCHY, cfg, 0.5, dens)
    assert rep.passed
    rep2 = mc.empirical_density_check(CAUCHY, cfg, 0.5, dens)
    assert rep.lhs == rep2.lhs


def test_martingale_and_isometry():
    grid = Grid(d=1, N=512, L=16.0)
    model = LevyMeasureModel("isotropic-stable", d=1, alpha=1.5)
    scheme = build_torus_scheme(model, grid, eps=0.05)
    sym_eps = mc.truncated_symbol_grid(scheme)
    f = unit_bump(grid)
    cfg = mc.PathConfig(eps=0.05, T=1.0, n=4000, seed=13)
    rep = mc.martingale_check(sym_eps, scheme, f, 1.0, model, cfg)
    assert rep.passed
    assert abs(rep.details["mean_M"]) <= 3 * rep.details["stderr_M"] + 1e-12


def test_gstar_integrated():
    grid = Grid(d=1, N=512, L=16.0)
    model = LevyMeasureModel("isotropic-stable", d=1, alpha=1.5)
    scheme = build_torus_scheme(model, grid, eps=0.1)
    sym_eps = mc.truncated_symbol_grid(scheme)
    tq = build_time_quadrature(1e-4, 0.5, 24)
    f = unit_bump(grid)
    cfg = mc.PathConfig(eps=0.1, T=0.5, n=1000, seed=17)
    rep = mc.gstar_integrated_check(sym_eps, scheme, tq, f, 0.5, model,
                                    cfg, z_stride=32)
    assert rep.passed


def test_truncated_symbol_nonnegative():
    grid = Grid(d=1, N=256, L=16.0)
    scheme = build_torus_scheme(CAUCHY, grid, eps=0.05)
    sym = mc.truncated_symbol_grid(scheme)
    assert sym.psi[0] == 0.0
    assert np.all(sym.psi >= 0.0)
    # truncation only removes mass from the exponent
    full = build_symbol_grid(CAUCHY, grid)
    assert np.all(sym.psi <= full.psi * (1 + 1e-3) + 1e-9)
