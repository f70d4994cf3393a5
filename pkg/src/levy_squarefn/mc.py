"""Monte Carlo cross-validation of the semigroup and square functions.

The process is approximated by keeping only jumps of magnitude above a
cutoff eps; what remains is a compound Poisson process with rate
lambda(eps) = nu({|y| > eps}) whose paths are exactly simulable.  All
positions are wrapped to [-L, L), which makes the simulated process the
torus process generated by the periodized, eps-truncated measure; the
spectral counterparts in the checks use the matching exponent

    psi_eps(xi) = sum over the eps-truncated torus quadrature of
                  w (1 - cos(xi . y)),

so the comparison is MC-error-limited rather than truncation-limited.
Each path derives its own seed from (master seed, path index), making
results independent of batching and worker count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CostGuardError, ParameterError, UnsupportedOperationError
from .jumps import TorusJumpScheme, build_torus_scheme
from .models import LevyMeasureModel
from .multiplier import _scheme_symbol_sums
from .reports import VerificationReport
from .spectral import (Grid, GridFunction, SymbolGrid, TimeQuadrature,
                       build_time_quadrature, semigroup_apply)
from .square_fn import _increment_sq_sum, square_Gstar

__all__ = [
    "PathConfig",
    "PathSample",
    "MartingaleSample",
    "simulate_paths",
    "truncated_symbol_grid",
    "empirical_density_check",
    "martingale_check",
    "gstar_integrated_check",
]

_MAX_EXPECTED_JUMPS = 1e7


@dataclass(frozen=True)
class PathConfig:
    """Simulation parameters for the compound-Poisson approximation."""

    eps: float
    T: float
    n: int
    seed: int
    z: tuple = (0.0,)

    def __post_init__(self):
        if self.eps <= 0 or self.T <= 0:
            raise ParameterError("eps and T must be positive")
        if self.n < 1000:
            raise ParameterError("need at least 1e3 paths")


@dataclass
class PathSample:
    """One path: ordered jump times in (0, T] and jump vectors."""

    times: np.ndarray
    jumps: np.ndarray          # (K, d)
    start: np.ndarray

    def position_at(self, t: float) -> np.ndarray:
        k = int(np.searchsorted(self.times, t, side="right"))
        return self.start + self.jumps[:k].sum(axis=0)


@dataclass
class MartingaleSample:
    terminal: float
    realized_qv: float
    predictable_qv: float


def _jump_rate(model: LevyMeasureModel, eps: float) -> float:
    return model.tail_mass(eps)


def _draw_jumps(rng: np.random.Generator, model: LevyMeasureModel,
                eps: float, T: float):
    """Jump times and vectors of one truncated path."""
    lam = _jump_rate(model, eps)
    k = int(rng.poisson(lam * T))
    times = np.sort(rng.uniform(0.0, T, k))
    if model.kind == "compound-poisson":
        atoms = [(np.asarray(loc), m) for loc, m in model.atoms
                 if math.hypot(*loc) > eps]
        probs = np.array([m for _, m in atoms]) / lam
        idx = rng.choice(len(atoms), size=k, p=probs)
        jumps = np.stack([atoms[i][0] for i in idx]) if k else \
            np.zeros((0, model.d))
        return times, jumps
    if model.kind != "isotropic-stable":
        raise UnsupportedOperationError(
            "exact radial inverse-CDF sampling needs the stable tail")
    radii = eps * rng.uniform(0.0, 1.0, k) ** (-1.0 / model.alpha)
    if model.d == 1:
        signs = rng.choice([-1.0, 1.0], k)
        return times, (radii * signs)[:, None]
    theta = rng.uniform(0.0, 2.0 * math.pi, k)
    return times, np.stack([radii * np.cos(theta),
                            radii * np.sin(theta)], axis=1)


def _path_seeds(master: int, n: int):
    return np.random.SeedSequence(master).spawn(n)


def simulate_paths(model: LevyMeasureModel, cfg: PathConfig):
    """n independent truncated paths with per-path deterministic seeds."""
    lam = _jump_rate(model, cfg.eps)
    if lam * cfg.T > _MAX_EXPECTED_JUMPS:
        raise CostGuardError(
            f"expected jump count {lam * cfg.T:.3g} per path exceeds the "
            "budget; increase eps or decrease T")
    start = np.asarray(cfg.z, dtype=float)
    if start.shape != (model.d,):
        raise ParameterError("start point dimension mismatch")
    out = []
    for ss in _path_seeds(cfg.seed, cfg.n):
        rng = np.random.default_rng(ss)
        times, jumps = _draw_jumps(rng, model, cfg.eps, cfg.T)
        out.append(PathSample(times, jumps, start))
    return out


def _positions_at(model, cfg: PathConfig, t: float) -> np.ndarray:
    """X_t for every path, without retaining the full paths."""
    start = np.asarray(cfg.z, dtype=float)
    pos = np.empty((cfg.n, model.d))
    for i, ss in enumerate(_path_seeds(cfg.seed, cfg.n)):
        rng = np.random.default_rng(ss)
        times, jumps = _draw_jumps(rng, model, cfg.eps, cfg.T)
        k = int(np.searchsorted(times, t, side="right"))
        pos[i] = start + jumps[:k].sum(axis=0)
    return pos


def _wrap(x: np.ndarray, L: float) -> np.ndarray:
    return (x + L) % (2.0 * L) - L


def _upsample_1d(values: np.ndarray, factor: int = 8) -> np.ndarray:
    """Band-limited refinement of periodic samples by zero-padding."""
    N = len(values)
    U = np.fft.fft(values)
    M = N * factor
    V = np.zeros(M, dtype=complex)
    V[:N // 2] = U[:N // 2]
    V[-(N // 2):] = U[-(N // 2):]
    V[N // 2] = 0.5 * U[N // 2]
    V[M - N // 2] += 0.5 * U[N // 2]
    return np.fft.ifft(V).real * factor


def _interp_periodic(grid: Grid, fine: np.ndarray, x: np.ndarray,
                     factor: int = 8) -> np.ndarray:
    xp = -grid.L + np.arange(grid.N * factor) * (grid.h / factor)
    return np.interp(_wrap(x, grid.L), xp, fine, period=2.0 * grid.L)


def truncated_symbol_grid(scheme: TorusJumpScheme) -> SymbolGrid:
    """Exponent of the periodized eps-truncated measure on the dual grid."""
    grid = scheme.grid
    psi = _scheme_symbol_sums(scheme, grid)
    psi[(0,) * grid.d] = 0.0
    return SymbolGrid(grid, np.maximum(psi, 0.0),
                      provenance="truncated-quadrature")


def empirical_density_check(model: LevyMeasureModel, cfg: PathConfig,
                            t: float, density: GridFunction,
                            bin_cells: int = 8) -> VerificationReport:
    """Histogram of wrapped X_t against the grid transition density.

    The L^1 distance between bin frequencies and bin probabilities is
    compared with the aggregated three-sigma multinomial budget
    3 sqrt(p_b / n) per bin.
    """
    grid = density.grid
    if grid.d != 1:
        raise UnsupportedOperationError("density check implemented for d = 1")
    if t > cfg.T:
        raise ParameterError("need t <= T")
    if bin_cells < 1 or grid.N % bin_cells:
        raise ParameterError("bin width must be a whole number of cells")
    pos = _wrap(_positions_at(model, cfg, t)[:, 0], grid.L)
    n_bins = grid.N // bin_cells
    expected = density.values.reshape(n_bins, bin_cells).sum(axis=1) * grid.h
    edges = -grid.L + np.arange(n_bins + 1) * (bin_cells * grid.h)
    counts, _ = np.histogram(pos, bins=edges)
    observed = counts / cfg.n
    l1 = float(np.sum(np.abs(observed - expected)))
    budget = float(np.sum(3.0 * np.sqrt(np.maximum(expected, 0.0) / cfg.n)))
    return VerificationReport(
        name="empirical-density", lhs=l1, rhs=budget, rel_error=l1 / budget,
        tol=1.0, passed=l1 <= budget,
        details={"t": t, "n": cfg.n, "eps": cfg.eps, "bins": n_bins,
                 "expected_mass": float(np.sum(expected))})


def _slice_semigroup(symbol: SymbolGrid, f: GridFunction, T: float,
                     n_slices: int, factor: int = 8):
    """P_{T - tau} f on a uniform tau-grid, band-limited-upsampled."""
    taus = np.arange(n_slices + 1) * (T / n_slices)
    fine = np.empty((n_slices + 1, f.grid.N * factor))
    for j, tau in enumerate(taus):
        u = semigroup_apply(symbol, float(T - tau), f)
        fine[j] = _upsample_1d(u.values, factor)
    return taus, fine


def martingale_check(symbol_eps: SymbolGrid, scheme: TorusJumpScheme,
                     f: GridFunction, T: float, model: LevyMeasureModel,
                     cfg: PathConfig, n_slices: int = 256,
                     iso_tol: float = 0.05) -> VerificationReport:
    """Mean-zero, Ito isometry and realized-vs-predictable variation.

    M_t = P_{T-t} f(X_t) - P_T f(z) for the wrapped truncated process;
    the semigroup must be the one generated by the same truncated
    measure (see truncated_symbol_grid).  Path functions are read from
    band-limited upsamplings at jump times snapped to a tau-grid.
    """
    grid = f.grid
    if grid.d != 1:
        raise UnsupportedOperationError("martingale check implemented d = 1")
    taus, fine = _slice_semigroup(symbol_eps, f, T, n_slices)
    # predictable-variation integrand on the same slices
    V = np.empty((n_slices + 1, grid.N * 8))
    for j, tau in enumerate(taus):
        u = semigroup_apply(symbol_eps, float(T - tau), f)
        V[j] = _upsample_1d(_increment_sq_sum(scheme, u.values))
    u0 = semigroup_apply(symbol_eps, T, f)
    p_T_f_z = float(_interp_periodic(grid, _upsample_1d(u0.values),
                                     np.asarray(cfg.z))[0])
    dtau = T / n_slices
    mids = (np.arange(n_slices) + 0.5) * dtau
    start = float(np.asarray(cfg.z)[0])

    # draw every path once, then evaluate slice by slice
    end_pos = np.empty(cfg.n)
    path_mid_pos = np.empty((cfg.n, n_slices))
    jp_before, jp_after, jp_slice, jp_path = [], [], [], []
    for i, ss in enumerate(_path_seeds(cfg.seed, cfg.n)):
        rng = np.random.default_rng(ss)
        times, jumps = _draw_jumps(rng, model, cfg.eps, T)
        jumps = jumps[:, 0]
        pos_after = start + np.cumsum(jumps)
        end_pos[i] = pos_after[-1] if len(jumps) else start
        k = np.searchsorted(times, mids, side="right")
        path_mid_pos[i] = np.concatenate([[start], pos_after])[k]
        if len(jumps):
            jp_before.append(pos_after - jumps)
            jp_after.append(pos_after)
            jp_slice.append(np.clip(np.round(times / dtau).astype(int),
                                    0, n_slices))
            jp_path.append(np.full(len(jumps), i))
    terminals = _interp_periodic(grid, fine[-1], end_pos) - p_T_f_z

    # realized QV: increments of P_{T-s} f across each jump
    realized = np.zeros(cfg.n)
    if jp_before:
        jb = np.concatenate(jp_before)
        ja = np.concatenate(jp_after)
        js = np.concatenate(jp_slice)
        jpth = np.concatenate(jp_path)
        dm2 = np.empty(len(jb))
        for j in np.unique(js):
            sel = js == j
            dm2[sel] = (_interp_periodic(grid, fine[j], ja[sel])
                        - _interp_periodic(grid, fine[j], jb[sel])) ** 2
        np.add.at(realized, jpth, dm2)

    # predictable QV: tau-grid quadrature of V along each path
    Vmid = 0.5 * (V[:-1] + V[1:])
    predictable = np.zeros(cfg.n)
    for j in range(n_slices):
        predictable += _interp_periodic(grid, Vmid[j],
                                        path_mid_pos[:, j]) * dtau

    mean_m = float(np.mean(terminals))
    se_m = float(np.std(terminals, ddof=1) / math.sqrt(cfg.n))
    m2 = float(np.mean(terminals ** 2))
    rq = float(np.mean(realized))
    pq = float(np.mean(predictable))
    # the comparisons are paired per path, so the MC noise budget comes
    # from the spread of the differences, not of the raw statistics
    d_iso = terminals ** 2 - predictable
    d_rq = realized - predictable
    se_iso = float(np.std(d_iso, ddof=1) / math.sqrt(cfg.n))
    se_rq = float(np.std(d_rq, ddof=1) / math.sqrt(cfg.n))
    iso_err = abs(m2 - pq) / pq
    rq_err = abs(rq - pq) / pq
    passed = (abs(mean_m) <= 3.0 * se_m + 1e-12
              and abs(m2 - pq) <= iso_tol * pq + 3.0 * se_iso
              and abs(rq - pq) <= iso_tol * pq + 3.0 * se_rq)
    return VerificationReport(
        name="martingale", lhs=m2, rhs=pq, rel_error=iso_err, tol=iso_tol,
        passed=passed,
        details={"mean_M": mean_m, "stderr_M": se_m,
                 "realized_qv_mean": rq, "predictable_qv_mean": pq,
                 "realized_rel_err": rq_err, "stderr_iso": se_iso,
                 "stderr_realized": se_rq, "n": cfg.n, "T": T})


def gstar_integrated_check(symbol_eps: SymbolGrid, scheme: TorusJumpScheme,
                           tq: TimeQuadrature, f: GridFunction, T: float,
                           model: LevyMeasureModel, cfg: PathConfig,
                           z_stride: int = 32, n_slices: int = 128,
                           tol: float = 0.05) -> VerificationReport:
    """Integrated conditional identity: int G_{*,T}^2 = int E_z <M>_T dz.

    The left side comes from the spectral square function, the right
    side from path simulation started on a coarse z-subgrid; both use
    the same truncated torus measure.
    """
    grid = f.grid
    if grid.d != 1:
        raise UnsupportedOperationError("integrated check implemented d = 1")
    gs = square_Gstar(symbol_eps, scheme, tq, f, T=T)
    lhs = float(np.sum(gs.values.values ** 2) * grid.h)

    taus = np.arange(n_slices + 1) * (T / n_slices)
    V = np.empty((n_slices + 1, grid.N * 8))
    for j, tau in enumerate(taus):
        u = semigroup_apply(symbol_eps, float(T - tau), f)
        V[j] = _upsample_1d(_increment_sq_sum(scheme, u.values))
    dtau = T / n_slices
    Vmid = 0.5 * (V[:-1] + V[1:])

    z_points = grid.axis_points()[::z_stride]
    weight = grid.h * z_stride
    rhs = 0.0
    var_sum = 0.0
    seeds = _path_seeds(cfg.seed, cfg.n * len(z_points))
    mids = (np.arange(n_slices) + 0.5) * dtau
    for zi, z in enumerate(z_points):
        mid_pos = np.empty((cfg.n, n_slices))
        for i in range(cfg.n):
            rng = np.random.default_rng(seeds[zi * cfg.n + i])
            times, jumps = _draw_jumps(rng, model, cfg.eps, T)
            k = np.searchsorted(times, mids, side="right")
            mid_pos[i] = z + np.concatenate(
                [[0.0], np.cumsum(jumps[:, 0])])[k]
        vals = np.zeros(cfg.n)
        for j in range(n_slices):
            vals += _interp_periodic(grid, Vmid[j], mid_pos[:, j]) * dtau
        rhs += weight * float(np.mean(vals))
        var_sum += (weight ** 2) * float(np.var(vals, ddof=1)) / cfg.n
    budget = tol * lhs + 3.0 * math.sqrt(var_sum)
    err = abs(lhs - rhs)
    return VerificationReport(
        name="gstar-integrated", lhs=lhs, rhs=rhs, rel_error=err / lhs,
        tol=tol, passed=err <= budget,
        details={"budget": budget, "z_points": len(z_points),
                 "paths_per_z": cfg.n, "T": T})
