"""Square functions of semigroup increments and their exact L^2 checks.

G aggregates the squared increments (P_t f(x + y) - P_t f(x))^2 over
the jump measure and all times; Gtilde keeps only the terms where the
base point dominates, |P_t f(x)| > |P_t f(x + y)|; G_* averages the
squared increments against the transition density before aggregating.
On the periodic grid the constant mode survives the semigroup, so the
L^2 identities hold in the form ||f - mean f||_2^2 = ||G(f)||_2^2 =
2 ||Gtilde(f)||_2^2; mean-zero test functions make the comparison with
||f||_2^2 direct.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import (CostGuardError, ParameterError, ResolutionError,
                     UnsupportedOperationError)
from .jumps import TorusJumpScheme, build_torus_scheme, far_correlate
from .models import LevyMeasureModel
from .reports import VerificationReport
from .spectral import (Grid, GridFunction, SpectrumFunction, SymbolGrid,
                       TimeQuadrature, auto_t_max, build_symbol_grid,
                       build_time_quadrature, forward_transform,
                       inverse_transform, semigroup_apply)

__all__ = [
    "SquareFunctionResult",
    "NormEquivalenceReport",
    "square_G",
    "square_Gtilde",
    "square_Gstar",
    "isometry_check",
    "polarization_check",
    "norm_equivalence_report",
    "duality_bound_check",
    "divergence_probe",
]


@dataclass
class SquareFunctionResult:
    """A pointwise square function together with its integration window."""

    kind: str
    values: GridFunction
    t_window: tuple
    metadata: dict = field(default_factory=dict, repr=False)

    def lp_norm(self, p: float) -> float:
        return self.values.lp_norm(p)


@dataclass
class NormEquivalenceReport:
    p: float
    ratios: list
    min_ratio: float
    max_ratio: float
    drift: float | None = None
    metadata: dict = field(default_factory=dict, repr=False)


def _shift_from_spectrum(grid, uf, xi, y):
    """Band-limited translate computed from a cached spectrum (d = 1)."""
    return inverse_transform(
        SpectrumFunction(grid, uf * np.exp(-1j * xi * y))).values


def _shift_from_spectrum_nd(grid, uf, freqs, y):
    return inverse_transform(
        SpectrumFunction(grid, uf * np.exp(-1j * (freqs @ y)))).values


def _increment_sq_sum(scheme: TorusJumpScheme, u: np.ndarray) -> np.ndarray:
    """S(x) = sum over y of w_y (u(x + y) - u(x))^2 on the grid."""
    g = scheme.grid
    uf = forward_transform(GridFunction(g, u)).values
    out = np.zeros_like(u)
    if g.d == 1:
        xi = g.axis_freqs()
        for y, w in zip(scheme.near_nodes[:, 0], scheme.near_weights):
            us = _shift_from_spectrum(g, uf, xi, y)
            out += w * (us - u) ** 2
    else:
        freqs = g.freqs()
        for y, w in zip(scheme.near_nodes, scheme.near_weights):
            us = _shift_from_spectrum_nd(g, uf, freqs, y)
            out += w * (us - u) ** 2
    W = scheme.far_weights
    out += (far_correlate(W, u * u) - 2.0 * u * far_correlate(W, u)
            + u * u * float(np.sum(W)))
    return out


def _increment_cross_sum(scheme: TorusJumpScheme, u: np.ndarray,
                         v: np.ndarray) -> np.ndarray:
    """sum over y of w_y (u(x+y) - u(x))(v(x+y) - v(x))."""
    g = scheme.grid
    uf = forward_transform(GridFunction(g, u)).values
    vf = forward_transform(GridFunction(g, v)).values
    out = np.zeros_like(u)
    if g.d == 1:
        xi = g.axis_freqs()
        for y, w in zip(scheme.near_nodes[:, 0], scheme.near_weights):
            us = _shift_from_spectrum(g, uf, xi, y)
            vs = _shift_from_spectrum(g, vf, xi, y)
            out += w * (us - u) * (vs - v)
    else:
        freqs = g.freqs()
        for y, w in zip(scheme.near_nodes, scheme.near_weights):
            us = _shift_from_spectrum_nd(g, uf, freqs, y)
            vs = _shift_from_spectrum_nd(g, vf, freqs, y)
            out += w * (us - u) * (vs - v)
    W = scheme.far_weights
    wsum = float(np.sum(W))
    out += (far_correlate(W, u * v) - u * far_correlate(W, v)
            - v * far_correlate(W, u) + u * v * wsum)
    return out


def _increment_sq_sum_onesided(scheme: TorusJumpScheme,
                               u: np.ndarray) -> np.ndarray:
    """Same as _increment_sq_sum but restricted to |u(x)| > |u(x+y)|.

    Ties contribute zero, matching the strict inequality in the
    definition.  The far field needs the indicator per displacement, so
    it is evaluated by explicit rolls; in d = 2 this costs a full sweep
    over the weighted cells and is guarded.
    """
    g = scheme.grid
    uf = forward_transform(GridFunction(g, u)).values
    out = np.zeros_like(u)
    au = np.abs(u)
    if g.d == 1:
        xi = g.axis_freqs()
        for y, w in zip(scheme.near_nodes[:, 0], scheme.near_weights):
            us = _shift_from_spectrum(g, uf, xi, y)
            out += w * (us - u) ** 2 * (au > np.abs(us))
        W = scheme.far_weights
        cells = np.nonzero(W)[0]
        idx = (np.arange(g.N)[None, :] + cells[:, None]) % g.N
        shifted = u[idx]
        contrib = (shifted - u[None, :]) ** 2 \
            * (au[None, :] > np.abs(shifted))
        out += W[cells] @ contrib
        return out
    freqs = g.freqs()
    for y, w in zip(scheme.near_nodes, scheme.near_weights):
        us = _shift_from_spectrum_nd(g, uf, freqs, y)
        out += w * (us - u) ** 2 * (au > np.abs(us))
    W = scheme.far_weights
    cells = np.argwhere(W > 0)
    if len(cells) * u.size > 1 << 28:
        raise CostGuardError(
            "one-sided far-field sweep too large in d = 2; reduce N")
    for n1, n2 in cells:
        us = np.roll(u, (-n1, -n2), axis=(0, 1))
        out += W[n1, n2] * (us - u) ** 2 * (au > np.abs(us))
    return out


def _time_accumulate(symbol, scheme, tq, f, slice_fn):
    """sum_j v_j slice_fn(u_{t_j}) + weight_at_zero slice_fn(f)."""
    total = tq.weight_at_zero * slice_fn(f.values)
    for t, v in zip(tq.nodes, tq.weights):
        u = semigroup_apply(symbol, float(t), f)
        total = total + v * slice_fn(u.values)
    return total


def square_G(symbol: SymbolGrid, scheme: TorusJumpScheme,
             tq: TimeQuadrature, f: GridFunction) -> SquareFunctionResult:
    """G(f): L^2-in-(t, y) aggregate of semigroup increments."""
    start = time.monotonic()
    g2 = _time_accumulate(symbol, scheme, tq, f,
                          lambda u: _increment_sq_sum(scheme, u))
    vals = GridFunction(f.grid, np.sqrt(np.maximum(g2, 0.0)))
    meta = {"runtime_ms": round(1000 * (time.monotonic() - start), 1)}
    return SquareFunctionResult("G", vals, (0.0, float(tq.nodes[-1])), meta)


def square_Gtilde(symbol: SymbolGrid, scheme: TorusJumpScheme,
                  tq: TimeQuadrature, f: GridFunction
                  ) -> SquareFunctionResult:
    """Gtilde(f): increments restricted to |P_t f(x)| > |P_t f(x + y)|."""
    start = time.monotonic()
    g2 = _time_accumulate(symbol, scheme, tq, f,
                          lambda u: _increment_sq_sum_onesided(scheme, u))
    vals = GridFunction(f.grid, np.sqrt(np.maximum(g2, 0.0)))
    meta = {"runtime_ms": round(1000 * (time.monotonic() - start), 1)}
    return SquareFunctionResult("Gtilde", vals,
                                (0.0, float(tq.nodes[-1])), meta)


def square_Gstar(symbol: SymbolGrid, scheme: TorusJumpScheme,
                 tq: TimeQuadrature, f: GridFunction,
                 T: float = math.inf) -> SquareFunctionResult:
    """G_* (or G_{*,T}): increments averaged against p_t before summing.

    The inner z-average is the semigroup itself applied to the slice
    S_t, so each time node costs one extra spectral multiplication.
    """
    start = time.monotonic()
    tq_T = tq if T == math.inf else tq.truncated(0.0, T)
    total = tq_T.weight_at_zero * _increment_sq_sum(scheme, f.values)
    for t, v in zip(tq_T.nodes, tq_T.weights):
        u = semigroup_apply(symbol, float(t), f)
        slice_vals = _increment_sq_sum(scheme, u.values)
        total = total + v * semigroup_apply(
            symbol, float(t), GridFunction(f.grid, slice_vals)).values
    vals = GridFunction(f.grid, np.sqrt(np.maximum(total, 0.0)))
    meta = {"runtime_ms": round(1000 * (time.monotonic() - start), 1)}
    kind = "Gstar" if T == math.inf else "GstarT"
    return SquareFunctionResult(kind, vals, (0.0, float(tq_T.nodes[-1])),
                                meta)


def isometry_check(symbol: SymbolGrid, scheme: TorusJumpScheme,
                   tq: TimeQuadrature, f: GridFunction,
                   tol: float = 1e-2) -> VerificationReport:
    """||f - mean||_2^2 against ||G(f)||_2^2 and 2 ||Gtilde(f)||_2^2."""
    mean = f.values.mean()
    base = GridFunction(f.grid, f.values - mean)
    lhs = base.lp_norm(2.0) ** 2
    gg = square_G(symbol, scheme, tq, f).lp_norm(2.0) ** 2
    gt = 2.0 * square_Gtilde(symbol, scheme, tq, f).lp_norm(2.0) ** 2
    rel_g = abs(gg - lhs) / lhs
    rel_gt = abs(gt - lhs) / lhs
    return VerificationReport(
        name="l2-isometry", lhs=lhs, rhs=gg,
        rel_error=max(rel_g, rel_gt), tol=tol,
        passed=max(rel_g, rel_gt) <= tol,
        details={"G_sq": gg, "two_Gtilde_sq": gt, "rel_error_G": rel_g,
                 "rel_error_Gtilde": rel_gt, "mean_removed": float(mean)})


def polarization_check(symbol: SymbolGrid, scheme: TorusJumpScheme,
                       tq: TimeQuadrature, f: GridFunction,
                       g: GridFunction, tol: float = 1e-2,
                       abs_floor: float = 0.0) -> VerificationReport:
    """<f, g> against the bilinear increment integral.

    On the torus the pairing identity holds for the mean-free parts, so
    means are removed from both arguments before comparing.
    """
    fm = GridFunction(f.grid, f.values - f.values.mean())
    gm = GridFunction(g.grid, g.values - g.values.mean())
    hd = f.grid.h ** f.grid.d
    lhs = float(np.sum(fm.values * gm.values) * hd)
    # bilinear accumulation needs both semigroup orbits in lockstep
    total = tq.weight_at_zero * float(
        np.sum(_increment_cross_sum(scheme, fm.values, gm.values)) * hd)
    for t, v in zip(tq.nodes, tq.weights):
        u = semigroup_apply(symbol, float(t), fm).values
        w = semigroup_apply(symbol, float(t), gm).values
        total += v * float(np.sum(_increment_cross_sum(scheme, u, w)) * hd)
    rhs = total
    scale = max(abs(lhs), abs_floor,
                fm.lp_norm(2.0) * gm.lp_norm(2.0) * 1e-4)
    err = abs(rhs - lhs) / scale
    return VerificationReport(
        name="polarization", lhs=lhs, rhs=rhs, rel_error=err, tol=tol,
        passed=err <= tol, details={})


def norm_equivalence_report(symbol: SymbolGrid, scheme: TorusJumpScheme,
                            tq: TimeQuadrature, family, p: float
                            ) -> NormEquivalenceReport:
    """Ratios ||Gtilde(f)||_p / ||f||_p over a family of test functions."""
    if not (1.0 < p < math.inf):
        raise ParameterError("p must lie in (1, inf)")
    if not family:
        raise ParameterError("family must be nonempty")
    ratios = []
    for f in family:
        nf = f.lp_norm(p)
        if nf == 0.0:
            ratios.append(None)
            continue
        gt = square_Gtilde(symbol, scheme, tq, f)
        ratios.append(gt.lp_norm(p) / nf)
    valid = [r for r in ratios if r is not None]
    if not valid:
        raise ParameterError("family contains only zero functions")
    return NormEquivalenceReport(p, ratios, min(valid), max(valid))


def duality_bound_check(symbol: SymbolGrid, scheme: TorusJumpScheme,
                        tq: TimeQuadrature, f: GridFunction,
                        h: GridFunction, p: float = 2.0,
                        slack: float = 1e-8) -> VerificationReport:
    """|<f, h>| <= 2 integral of Gtilde(f) G(h), with the Hoelder split.

    The pairing identity behind the bound lives on mean-free data
    (the constant mode has no increments), so means are removed first.
    """
    if not (1.0 < p <= 2.0):
        raise ParameterError("stated duality case needs p in (1, 2]")
    fm = GridFunction(f.grid, f.values - f.values.mean())
    hm = GridFunction(h.grid, h.values - h.values.mean())
    hd = f.grid.h ** f.grid.d
    lhs = abs(float(np.sum(fm.values * hm.values) * hd))
    gt = square_Gtilde(symbol, scheme, tq, fm)
    gh = square_G(symbol, scheme, tq, hm)
    rhs = 2.0 * float(np.sum(gt.values.values * gh.values.values) * hd)
    q = p / (p - 1.0)
    hoelder = 2.0 * gt.lp_norm(p) * gh.lp_norm(q)
    ok = lhs <= rhs + slack
    return VerificationReport(
        name="duality-bound", lhs=lhs, rhs=rhs,
        rel_error=(lhs - rhs) / max(rhs, 1e-300), tol=slack, passed=ok,
        details={"hoelder_split": hoelder, "p": p, "q": q})


def _probe_singular_function(grid: Grid) -> GridFunction:
    """f(x) = |x|^(-3/2) on |x| <= 1 with the origin cell averaged.

    The pointwise value at the origin is meaningless; the cell carries
    the integral of the profile over the cell, divided by the cell
    volume, which is the stable representation of the local content.
    """
    pts = grid.points()
    r = np.linalg.norm(pts, axis=-1)
    r_safe = np.where(r > 0, r, 1.0)
    vals = np.where((r <= 1.0) & (r > 0), r_safe ** -1.5, 0.0)
    # average of |x|^(-3/2) over the origin cell: polar integral over
    # the inscribed disk plus the corner slivers of the square cell
    half = grid.h / 2.0
    theta = np.linspace(0.0, math.pi / 4.0, 65)
    radial = 2.0 * (half / np.cos(theta)) ** 0.5   # int_0^R r^(-1/2) dr
    cell_int = 8.0 * np.trapezoid(radial, theta)
    origin = (grid.N // 2,) * grid.d
    vals[origin] = cell_int / grid.h ** 2
    return GridFunction(grid, vals)


def divergence_probe(grid: Grid, s_values, probes=((0.5, 0.0), (1.0, 0.0)),
                     t_max: float | None = None, nodes_per_decade: int = 24,
                     eps: float = 1e-5, smooth_contrast: bool = False,
                     enforce_resolution: bool = True) -> dict:
    """Windowed G values at probe points for the critical-singularity test.

    Uses the d = 2 Cauchy semigroup (psi = |xi|) and the profile
    |x|^(-3/2) supported in the unit ball, whose square function is
    infinite everywhere in the continuum.  Returns, per probe point,
    the G values restricted to t in [s, t_max] for each requested s.
    The grid resolves time scales down to about one spatial spacing;
    below that the integrand saturates at its band-limited value, so
    smaller s raise a resolution error unless explicitly allowed.
    """
    if grid.d != 2:
        raise ParameterError("the probe is defined in d = 2")
    s_values = sorted(float(s) for s in s_values)
    if enforce_resolution and s_values[0] < grid.h:
        raise ResolutionError(
            f"window start {s_values[0]:.1e} is below the resolvable "
            f"time ~h = {grid.h:.1e}; increase N")
    model = LevyMeasureModel("isotropic-stable", d=2, alpha=1.0)
    symbol = build_symbol_grid(model, grid)
    scheme = build_torus_scheme(model, grid, eps=eps, i0=2)
    if t_max is None:
        t_max = auto_t_max(symbol)
    tq = build_time_quadrature(min(s_values), t_max, nodes_per_decade)

    if smooth_contrast:
        pts = grid.points()
        f = GridFunction(grid, np.exp(-np.sum(pts ** 2, axis=-1)
                                      / (2 * 0.25 ** 2)))
    else:
        f = _probe_singular_function(grid)

    idx = []
    for px in probes:
        ii = tuple(int(round((c + grid.L) / grid.h)) % grid.N for c in px)
        if any(abs((c + grid.L) / grid.h - round((c + grid.L) / grid.h))
               > 1e-9 for c in px):
            raise ParameterError("probe points must be grid-aligned")
        idx.append(ii)

    # per-time contributions at the probe points only: far cells by a
    # direct weighted sum, near field by the second-order (gradient)
    # completion over the index box around the origin
    W = scheme.far_weights
    m2 = scheme.second_moment_box + scheme.model.second_moment_ball(
        scheme.eps)
    freqs = grid.freqs()
    contrib = np.zeros((len(tq.nodes), len(probes)))
    for j, t in enumerate(tq.nodes):
        u = semigroup_apply(symbol, float(t), f)
        uf = forward_transform(u).values
        gx = inverse_transform(
            SpectrumFunction(grid, -1j * freqs[..., 0] * uf)).values
        gy = inverse_transform(
            SpectrumFunction(grid, -1j * freqs[..., 1] * uf)).values
        for k, ii in enumerate(idx):
            u0 = u.values[ii]
            rolled = np.roll(u.values, (-ii[0], -ii[1]), axis=(0, 1))
            far = float(np.sum(W * (rolled - u0) ** 2))
            grad2 = gx[ii] ** 2 + gy[ii] ** 2
            contrib[j, k] = far + 0.5 * grad2 * m2
    out = {"s_values": s_values, "probes": list(probes), "values": []}
    for s in s_values:
        mask = tq.nodes >= s * (1 - 1e-12)
        g_vals = np.sqrt(np.maximum(
            (tq.weights[mask, None] * contrib[mask]).sum(axis=0), 0.0))
        out["values"].append([float(v) for v in g_vals])
    return out
