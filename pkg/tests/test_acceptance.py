"""End-to-end acceptance checks.

One test per headline criterion, at the tolerances the package promises.
Each runs against the default configuration unless the criterion itself
fixes the setup.  These are heavier than the unit tests; together they
take a few minutes.
"""

import math

import numpy as np
import pytest

from conftest import make_setup, unit_bump
from levy_squarefn import mc
from levy_squarefn.config import loads_config
from levy_squarefn.hardy_stein import (F, F_eps, hardy_stein_rhs,
                                       taylor_bound_ratios)
from levy_squarefn.jumps import build_torus_scheme
from levy_squarefn.models import (LevyMeasureModel, build_jump_quadrature,
                                  symbol_closed_form, symbol_quadrature)
from levy_squarefn.spectral import (Grid, build_symbol_grid,
                                    build_time_quadrature, maximal_function,
                                    periodized_cauchy_density,
                                    semigroup_apply, transition_density)
from levy_squarefn.square_fn import (divergence_probe, duality_bound_check,
                                     isometry_check, square_Gtilde)
from levy_squarefn.suites import gaussian_family, run_suite


CFG = loads_config("")


@pytest.fixture(scope="module")
def family512(cauchy):
    _, grid, _, _, _ = cauchy
    return gaussian_family(grid, CFG.family)


def _gtilde_ratios(setup, family, p):
    _, _, symbol, scheme, tq = setup
    return [square_Gtilde(symbol, scheme, tq, f).values.lp_norm(p)
            / f.lp_norm(p) for f in family]


def test_acceptance_hardy_stein_identity(cauchy, stable15):
    # identity at the working resolution, then first-order convergence
    # of the residual under simultaneous space/time refinement
    for setup in (cauchy, stable15):
        model, grid, symbol, scheme, tq = setup
        f = unit_bump(grid)
        for p in (1.5, 2.0, 3.0):
            rep = hardy_stein_rhs(symbol, scheme, tq, f, p)
            assert rep.rel_error <= 2e-2, (model.alpha, p, rep.rel_error)
    errs = []
    sizes = (256, 512, 1024)
    for N, npd in zip(sizes, (12, 24, 48)):
        _, grid, symbol, scheme, tq = make_setup(1.0, N=N, npd=npd)
        rep = hardy_stein_rhs(symbol, scheme, tq, unit_bump(grid), 1.5)
        errs.append(rep.rel_error)
    slope = -np.polyfit(np.log(sizes), np.log(errs), 1)[0]
    assert slope >= 0.8, (errs, slope)


def test_acceptance_l2_isometry(cauchy, family512):
    _, grid, symbol, scheme, tq = cauchy
    for f in family512:
        rep = isometry_check(symbol, scheme, tq, f, tol=1e-2)
        assert rep.passed, rep.rel_error
    for r in _gtilde_ratios(cauchy, family512, 2.0):
        assert abs(math.sqrt(2.0) * r - 1.0) <= 1e-2, r


def test_acceptance_symbol_quadrature():
    for alpha in (0.5, 1.0, 1.5):
        model = LevyMeasureModel("isotropic-stable", d=1, alpha=alpha)
        quad = build_jump_quadrature(model, eps=1e-6, rmax=1e6,
                                     n_radial=1600)
        for m in np.geomspace(0.5, 8.0, 17):
            xi = np.array([m])
            exact = symbol_closed_form(model, xi)
            approx = symbol_quadrature(model, quad, xi)
            assert abs(approx - exact) <= 1e-3 * exact, (alpha, m)


def test_acceptance_transition_density():
    for d, N, L in ((1, 1024, 16.0), (2, 512, 8.0)):
        grid = Grid(d=d, N=N, L=L)
        model = LevyMeasureModel("isotropic-stable", d=d, alpha=1.0)
        symbol = build_symbol_grid(model, grid)
        p1 = transition_density(symbol, 1.0)
        ref = periodized_cauchy_density(grid, 1.0,
                                        n_images=64 if d == 1 else 12)
        mask = np.linalg.norm(grid.points(), axis=-1) <= L / 2.0
        rel = np.max(np.abs(p1.values - ref.values)[mask]
                     / ref.values[mask])
        assert rel <= 1e-3, (d, rel)
        assert abs(p1.integral() - 1.0) <= 1e-6
        pt = transition_density(symbol, 0.75)
        p2t = transition_density(symbol, 1.5)
        conv = semigroup_apply(symbol, 0.75, pt)
        l1 = np.sum(np.abs(conv.values - p2t.values)) * grid.h ** d
        assert l1 <= 1e-3, (d, l1)


def test_acceptance_remainder_bounds():
    rng = np.random.default_rng(314)
    n = 100000
    a = np.concatenate([rng.uniform(-10, 10, n // 2),
                        rng.choice([-1, 1], n // 2)
                        * 10.0 ** rng.uniform(-6, 1, n // 2)])
    b = np.concatenate([rng.uniform(-10, 10, n // 2),
                        rng.choice([-1, 1], n // 2)
                        * 10.0 ** rng.uniform(-6, 1, n // 2)])
    eps = 10.0 ** rng.uniform(-8, 1, n)
    for p in (1.1, 1.5, 1.9):
        fe = F_eps(p, eps, a, b)
        assert fe.min() >= -1e-12, p
        assert np.all(fe <= F(p, a, b) / (p - 1.0) + 1e-12), p
        r1 = taylor_bound_ratios(p, sample_count=100000, seed=7)
        r2 = taylor_bound_ratios(p, sample_count=100000, seed=8)
        assert 0.0 < r1["min_ratio"] <= r1["max_ratio"] < math.inf
        assert abs(r1["min_ratio"] - r2["min_ratio"]) \
            <= 0.05 * r1["min_ratio"]
        assert abs(r1["max_ratio"] - r2["max_ratio"]) \
            <= 0.05 * r1["max_ratio"]


def test_acceptance_maximal_inequality(cauchy, family512):
    _, _, symbol, _, tq = cauchy
    stars = [maximal_function(symbol, f, tq.nodes) for f in family512]
    for p in (1.5, 2.0, 3.0):
        bound = p / (p - 1.0) * (1.0 + 1e-2)
        for f, fs in zip(family512, stars):
            assert fs.lp_norm(p) <= bound * f.lp_norm(p), p


def test_acceptance_multiplier_suite():
    result = run_suite(CFG, "multiplier")
    failed = [r.name for r in result.reports if not r.passed]
    assert not failed, failed


def test_acceptance_duality_pairs(cauchy_small):
    _, grid, symbol, scheme, tq = cauchy_small
    rng = np.random.default_rng(23)
    from levy_squarefn.spectral import GridFunction
    for _ in range(20):
        c1, c2 = rng.uniform(-4, 4, 2)
        w1, w2 = rng.uniform(0.5, 1.5, 2)
        f = unit_bump(grid, width=w1, center=c1)
        h = unit_bump(grid, width=w2, center=c2)
        f = GridFunction(grid, f.values - f.values.mean())
        h = GridFunction(grid, h.values - h.values.mean())
        rep = duality_bound_check(symbol, scheme, tq, f, h, p=1.5)
        assert rep.passed, rep.rel_error


def test_acceptance_monte_carlo():
    cauchy = LevyMeasureModel("isotropic-stable", d=1, alpha=1.0)
    grid = Grid(d=1, N=1024, L=16.0)
    symbol = build_symbol_grid(cauchy, grid)
    dens = transition_density(symbol, 0.5)
    pcfg = mc.PathConfig(eps=1e-3, T=0.5, n=100000, seed=41)
    rep = mc.empirical_density_check(cauchy, pcfg, 0.5, dens)
    assert rep.passed, rep.details

    model = LevyMeasureModel("isotropic-stable", d=1, alpha=1.5)
    grid = Grid(d=1, N=512, L=16.0)
    scheme = build_torus_scheme(model, grid, eps=0.05)
    sym_eps = mc.truncated_symbol_grid(scheme)
    f = unit_bump(grid)
    pcfg = mc.PathConfig(eps=0.05, T=1.0, n=10000, seed=43)
    rep = mc.martingale_check(sym_eps, scheme, f, 1.0, model, pcfg)
    assert rep.passed, rep.details

    scheme = build_torus_scheme(model, grid, eps=0.1)
    sym_eps = mc.truncated_symbol_grid(scheme)
    tq = build_time_quadrature(1e-4, 0.5, 24)
    pcfg = mc.PathConfig(eps=0.1, T=0.5, n=1000, seed=47)
    rep = mc.gstar_integrated_check(sym_eps, scheme, tq, f, 0.5, model,
                                    pcfg, z_stride=32)
    assert rep.passed, rep.details

    small = mc.PathConfig(eps=0.05, T=1.0, n=1000, seed=53)
    a = mc.simulate_paths(model, small)
    b = mc.simulate_paths(model, small)
    assert all(np.array_equal(x.times, y.times)
               and np.array_equal(x.jumps, y.jumps)
               for x, y in zip(a, b))


def test_acceptance_divergence_probe():
    grid = Grid(d=2, N=1024, L=2.0)
    s_values = (1e-1, 1e-2, 1e-3, 1e-4)
    probe = divergence_probe(grid, s_values, enforce_resolution=False)
    vals = np.array(probe["values"])[:, 0]
    inc = -np.diff(vals)
    assert np.all(inc > 0), vals
    assert inc[0] >= 0.5 * inc[1], inc
    smooth = divergence_probe(grid, s_values, smooth_contrast=True,
                              enforce_resolution=False)
    sinc = -np.diff(np.array(smooth["values"])[:, 0])
    assert sinc[0] <= 0.05 * sinc[-1], sinc


def test_acceptance_norm_equivalence(cauchy, family512):
    setup1024 = make_setup(1.0, N=1024)
    family1024 = gaussian_family(setup1024[1], CFG.family)
    for r in _gtilde_ratios(cauchy, family512, 2.0):
        assert abs(r - 1.0 / math.sqrt(2.0)) <= 1e-2, r
    for p in (1.5, 3.0):
        r512 = _gtilde_ratios(cauchy, family512, p)
        r1024 = _gtilde_ratios(setup1024, family1024, p)
        for pair in ((min(r512), min(r1024)), (max(r512), max(r1024))):
            assert abs(pair[0] - pair[1]) <= 0.05 * abs(pair[1]), (p, pair)
