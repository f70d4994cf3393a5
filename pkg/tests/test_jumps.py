import numpy as np
import pytest

from levy_squarefn.errors import ParameterError
from levy_squarefn.jumps import (build_torus_scheme, far_correlate,
                                 signed_indices)
from levy_squarefn.models import LevyMeasureModel
from levy_squarefn.spectral import Grid


def test_signed_indices():
    assert list(signed_indices(8)) == [0, 1, 2, 3, -4, -3, -2, -1]


def test_total_mass_matches_tail_d1():
    model = LevyMeasureModel("isotropic-stable", d=1, alpha=1.0)
    grid = Grid(d=1, N=512, L=16.0)
    scheme = build_torus_scheme(model, grid, eps=1e-4)
    assert scheme.total_mass() == pytest.approx(
        model.tail_mass(1e-4), rel=1e-6)


def test_total_mass_matches_tail_d2():
    model = LevyMeasureModel("isotropic-stable", d=2, alpha=1.2)
    grid = Grid(d=2, N=128, L=8.0)
    scheme = build_torus_scheme(model, grid, eps=1e-3)
    assert scheme.total_mass() == pytest.approx(
        model.tail_mass(1e-3), rel=1e-4)


def test_near_field_symmetric_under_negation():
    model = LevyMeasureModel("isotropic-stable", d=2, alpha=1.0)
    grid = Grid(d=2, N=64, L=4.0)
    scheme = build_torus_scheme(model, grid, eps=1e-3)
    nodes = {tuple(np.round(n, 12)): w
             for n, w in zip(scheme.near_nodes, scheme.near_weights)}
    for n, w in nodes.items():
        m = tuple(np.round(-np.asarray(n), 12))
        assert m in nodes
        assert nodes[m] == pytest.approx(w, rel=1e-12)


def test_far_weights_symmetric():
    model = LevyMeasureModel("isotropic-stable", d=1, alpha=0.8)
    grid = Grid(d=1, N=256, L=8.0)
    W = build_torus_scheme(model, grid, eps=1e-4).far_weights
    flipped = np.roll(W[::-1], 1)   # index n -> -n on the circle
    assert np.max(np.abs(W - flipped)) < 1e-15


def test_eps_bounds_enforced():
    model = LevyMeasureModel("isotropic-stable", d=1, alpha=1.0)
    grid = Grid(d=1, N=64, L=8.0)
    with pytest.raises(ParameterError):
        build_torus_scheme(model, grid, eps=10.0)
    with pytest.raises(ParameterError):
        build_torus_scheme(model, grid, eps=0.0)


def test_far_correlate_equals_roll_sum():
    rng = np.random.default_rng(3)
    W = rng.uniform(0, 1, 32)
    v = rng.standard_normal(32)
    out = far_correlate(W, v)
    direct = np.zeros(32)
    for n in range(32):
        direct += W[n] * np.roll(v, -n)
    assert np.max(np.abs(out - direct)) < 1e-12


def test_far_correlate_2d():
    rng = np.random.default_rng(4)
    W = rng.uniform(0, 1, (8, 8))
    v = rng.standard_normal((8, 8))
    out = far_correlate(W, v)
    direct = np.zeros((8, 8))
    for n1 in range(8):
        for n2 in range(8):
            direct += W[n1, n2] * np.roll(v, (-n1, -n2), axis=(0, 1))
    assert np.max(np.abs(out - direct)) < 1e-12


def test_compound_poisson_scheme_uses_atoms():
    cp = LevyMeasureModel("compound-poisson", d=1,
                          atoms=(((1.0,), 0.5), ((-1.0,), 0.5)))
    grid = Grid(d=1, N=128, L=8.0)
    scheme = build_torus_scheme(cp, grid, eps=0.1)
    assert len(scheme.near_nodes) == 2
    assert np.sum(scheme.far_weights) == 0.0
    assert scheme.total_mass() == pytest.approx(1.0)
    # atoms below the cutoff are dropped
    small = build_torus_scheme(cp, grid, eps=1.5)
    assert len(small.near_nodes) == 0


def test_split_radius_scales_with_h():
    model = LevyMeasureModel("isotropic-stable", d=1, alpha=1.0)
    g1 = Grid(d=1, N=128, L=8.0)
    g2 = Grid(d=1, N=256, L=8.0)
    s1 = build_torus_scheme(model, g1, eps=1e-4)
    s2 = build_torus_scheme(model, g2, eps=1e-4)
    assert s1.split_radius == pytest.approx(2 * s2.split_radius)
