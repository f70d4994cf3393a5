"""Symmetric Levy measures: densities, jump quadratures, characteristic exponents.

A symmetric pure-jump Levy process on R^d is determined by a measure nu on
R^d \\ {0} with integral of (1 ^ |y|^2) finite.  Four model kinds are
supported:

- ``isotropic-stable``: nu(dy) = A |y|^(-d-alpha) dy with the stable
  normalization constant A chosen so that the characteristic exponent is
  exactly |xi|^alpha.
- ``tempered-stable``: nu(dy) = A |y|^(-d-alpha) exp(-lam |y|) dy.
- ``truncated-stable``: the stable density cut off at radius |y| = R.
- ``compound-poisson``: a finite symmetric collection of atoms.

The characteristic exponent is psi(xi) = integral of (1 - cos(xi . y)) nu(dy).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, special

from .errors import DomainError, ParameterError, UnsupportedOperationError

__all__ = [
    "LevyMeasureModel",
    "JumpQuadrature",
    "stable_constant",
    "nu_density",
    "build_jump_quadrature",
    "symbol_closed_form",
    "symbol_quadrature",
    "check_levy_condition",
    "check_hartman_wintner",
]

_RADIAL_KINDS = ("isotropic-stable", "tempered-stable", "truncated-stable")

# surface measure of the unit sphere in R^d
_SPHERE_AREA = {1: 2.0, 2: 2.0 * math.pi}


def stable_constant(d: int, alpha: float) -> float:
    """Normalization A with nu(dy) = A |y|^(-d-alpha) dy giving psi = |xi|^alpha.

    A = 2^alpha Gamma((d + alpha)/2) pi^(-d/2) / |Gamma(-alpha/2)|.
    """
    num = 2.0 ** alpha * special.gamma((d + alpha) / 2.0)
    den = math.pi ** (d / 2.0) * abs(special.gamma(-alpha / 2.0))
    return num / den


@dataclass(frozen=True)
class LevyMeasureModel:
    """A symmetric Levy measure on R^d \\ {0}.

    Parameters
    ----------
    kind : str
        One of 'isotropic-stable', 'tempered-stable', 'truncated-stable',
        'compound-poisson'.
    d : int
        Ambient dimension, 1 or 2.
    alpha : float, optional
        Stability index in (0, 2) for the stable kinds.
    lam : float, optional
        Exponential tempering rate (tempered-stable only), >= 0.
    trunc_radius : float, optional
        Support radius R (truncated-stable only), > 0.
    atoms : tuple of (location, mass), optional
        Finite atoms for compound-poisson; the set must be symmetric
        under y -> -y.  Locations are d-tuples of floats.
    """

    kind: str
    d: int = 1
    alpha: float | None = None
    lam: float = 0.0
    trunc_radius: float | None = None
    atoms: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.kind not in _RADIAL_KINDS + ("compound-poisson",):
            raise ParameterError(f"unknown model kind {self.kind!r}")
        if self.d not in (1, 2):
            raise ParameterError("dimension d must be 1 or 2")
        if self.kind in _RADIAL_KINDS:
            if self.alpha is None or not (0.0 < self.alpha < 2.0):
                raise ParameterError("alpha must lie in (0, 2)")
            if self.kind == "tempered-stable" and self.lam < 0:
                raise ParameterError("tempering rate must be nonnegative")
            if self.kind == "truncated-stable":
                if self.trunc_radius is None or self.trunc_radius <= 0:
                    raise ParameterError("truncation radius must be positive")
        else:
            if not self.atoms:
                raise ParameterError("compound-poisson model needs atoms")
            locs = []
            for loc, mass in self.atoms:
                loc = tuple(float(c) for c in np.atleast_1d(loc))
                if len(loc) != self.d:
                    raise ParameterError("atom location has wrong dimension")
                if not any(loc):
                    raise ParameterError("atom at the origin is not allowed")
                if mass <= 0:
                    raise ParameterError("atom masses must be positive")
                locs.append((loc, float(mass)))
            canon = {}
            for loc, mass in locs:
                canon[loc] = canon.get(loc, 0.0) + mass
            for loc, mass in canon.items():
                neg = tuple(-c for c in loc)
                if abs(canon.get(neg, 0.0) - mass) > 1e-12 * mass:
                    raise ParameterError("atom set must be symmetric")
            object.__setattr__(self, "atoms", tuple(sorted(canon.items())))

    # -- radial profile ----------------------------------------------------

    def _amp(self) -> float:
        """Stable normalization constant for the radial kinds."""
        return stable_constant(self.d, self.alpha)

    def radial_profile(self, r):
        """Density value at radius r (radial kinds): A r^(-d-alpha) x cutoff."""
        if self.kind not in _RADIAL_KINDS:
            raise UnsupportedOperationError("model has no radial density")
        r = np.asarray(r, dtype=float)
        out = self._amp() * r ** (-self.d - self.alpha)
        if self.kind == "tempered-stable":
            out = out * np.exp(-self.lam * r)
        elif self.kind == "truncated-stable":
            out = np.where(r <= self.trunc_radius, out, 0.0)
        return out

    def radial_profile_derivative(self, r: float) -> float:
        """d/dr of the radial profile (used by oscillatory tail corrections)."""
        if self.kind not in _RADIAL_KINDS:
            raise UnsupportedOperationError("model has no radial density")
        rho = float(self.radial_profile(r))
        out = -(self.d + self.alpha) / r * rho
        if self.kind == "tempered-stable":
            out -= self.lam * rho
        return out

    def shell_mass(self, a: float, b: float) -> float:
        """nu mass of the shell a < |y| < b for radial kinds."""
        if self.kind not in _RADIAL_KINDS:
            raise UnsupportedOperationError("model has no radial density")
        if not (0 <= a <= b):
            raise ParameterError("need 0 <= a <= b")
        if a == b:
            return 0.0
        omega = _SPHERE_AREA[self.d]
        A = self._amp()
        al = self.alpha
        if self.kind == "truncated-stable":
            b = min(b, self.trunc_radius)
            if b <= a:
                return 0.0
        if self.kind == "tempered-stable" and self.lam > 0:
            val, _ = integrate.quad(
                lambda r: r ** (-1.0 - al) * math.exp(-self.lam * r), a, b,
                limit=200)
            return omega * A * val
        if a == 0:
            return math.inf
        return omega * A * (a ** (-al) - b ** (-al)) / al

    def shell_first_moment(self, a: float, b: float) -> float:
        """Integral of |y| over the shell a < |y| < b (for centroid nodes)."""
        if self.kind not in _RADIAL_KINDS:
            raise UnsupportedOperationError("model has no radial density")
        if a == b:
            return 0.0
        omega = _SPHERE_AREA[self.d]
        A = self._amp()
        al = self.alpha
        if self.kind == "truncated-stable":
            b = min(b, self.trunc_radius)
            if b <= a:
                return 0.0
        if self.kind == "tempered-stable" and self.lam > 0:
            val, _ = integrate.quad(
                lambda r: r ** (-al) * math.exp(-self.lam * r), a, b,
                limit=200)
            return omega * A * val
        if al == 1.0:
            return omega * A * math.log(b / a)
        return omega * A * (b ** (1.0 - al) - a ** (1.0 - al)) / (1.0 - al)

    def tail_mass(self, r: float) -> float:
        """nu({|y| > r})."""
        if self.kind == "compound-poisson":
            return sum(m for loc, m in self.atoms
                       if math.hypot(*loc) > r)
        if self.kind == "truncated-stable":
            if r >= self.trunc_radius:
                return 0.0
            return self.shell_mass(r, self.trunc_radius)
        if self.kind == "tempered-stable" and self.lam > 0:
            # split at a radius where the integrand is negligible
            rmax = r + 60.0 / self.lam
            return self.shell_mass(r, rmax)
        omega = _SPHERE_AREA[self.d]
        return omega * self._amp() * r ** (-self.alpha) / self.alpha

    def second_moment_ball(self, eps: float) -> float:
        """Integral of |y|^2 over the ball |y| < eps."""
        if self.kind == "compound-poisson":
            return sum(m * sum(c * c for c in loc)
                       for loc, m in self.atoms if math.hypot(*loc) < eps)
        omega = _SPHERE_AREA[self.d]
        A = self._amp()
        al = self.alpha
        b = eps
        if self.kind == "truncated-stable":
            b = min(eps, self.trunc_radius)
        if self.kind == "tempered-stable" and self.lam > 0:
            val, _ = integrate.quad(
                lambda r: r ** (1.0 - al) * math.exp(-self.lam * r), 0.0, b,
                limit=200)
            return omega * A * val
        return omega * A * b ** (2.0 - al) / (2.0 - al)


def nu_density(model: LevyMeasureModel, y) -> float:
    """Levy density at the point y != 0.

    For compound-poisson models the density (with respect to Lebesgue
    measure) is zero off the atoms; atom masses are read from
    ``model.atoms`` directly.
    """
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if y.shape != (model.d,):
        raise DomainError("point dimension does not match model")
    r = float(np.linalg.norm(y))
    if r == 0.0:
        raise DomainError("Levy density is undefined at y = 0")
    if model.kind == "compound-poisson":
        return 0.0
    return float(model.radial_profile(r))


@dataclass(frozen=True)
class JumpQuadrature:
    """Nodes y_k and weights w_k approximating integrals against nu.

    The node set is symmetric: for every node y there is a node -y with
    the same weight.  Radial nodes are geometrically spaced between the
    inner cutoff eps and the outer cutoff rmax; each node carries the
    exact nu mass of its radial cell and sits at the cell's mass
    centroid.
    """

    nodes: np.ndarray        # (K, d)
    weights: np.ndarray      # (K,)
    eps: float
    rmax: float
    n_radial: int
    n_angular: int
    radial_edges: np.ndarray | None = None

    def __post_init__(self):
        if self.nodes.ndim != 2 or len(self.nodes) != len(self.weights):
            raise ParameterError("nodes and weights are mismatched")
        if np.any(self.weights < 0):
            raise ParameterError("weights must be nonnegative")

    @property
    def radii(self) -> np.ndarray:
        return np.linalg.norm(self.nodes, axis=1)

    def geometric_ratio(self) -> float:
        """Ratio of consecutive radial cell edges (1.0 when unavailable)."""
        if self.radial_edges is None or len(self.radial_edges) < 2:
            return 1.0
        e = self.radial_edges
        return float(np.max(e[1:] / e[:-1]))


def build_jump_quadrature(model: LevyMeasureModel, eps: float, rmax: float,
                          n_radial: int = 64, n_angular: int = 16
                          ) -> JumpQuadrature:
    """Symmetric node/weight set for integrals over eps < |y| < rmax.

    Radial cells are geometric from eps to rmax with exact shell masses
    and mass-centroid nodes; in d = 2 each shell is split uniformly in
    angle with the angular set closed under rotation by pi.
    """
    if not (0 < eps < rmax):
        raise ParameterError("need 0 < eps < rmax")
    if model.kind == "compound-poisson":
        nodes, weights = [], []
        for loc, mass in model.atoms:
            r = math.hypot(*loc)
            if eps < r <= rmax:
                nodes.append(loc)
                weights.append(mass)
        if not nodes:
            nodes = np.zeros((0, model.d))
            weights = np.zeros(0)
        return JumpQuadrature(np.asarray(nodes, dtype=float).reshape(-1, model.d),
                              np.asarray(weights, dtype=float),
                              eps, rmax, 0, 0)

    if n_radial < 2:
        raise ParameterError("need at least 2 radial nodes")
    edges = np.geomspace(eps, rmax, n_radial + 1)
    masses = np.array([model.shell_mass(a, b)
                       for a, b in zip(edges[:-1], edges[1:])])
    firsts = np.array([model.shell_first_moment(a, b)
                       for a, b in zip(edges[:-1], edges[1:])])
    keep = masses > 0
    centers = np.sqrt(edges[:-1] * edges[1:])
    centers[keep] = firsts[keep] / masses[keep]
    centers, masses = centers[keep], masses[keep]

    if model.d == 1:
        nodes = np.concatenate([centers, -centers]).reshape(-1, 1)
        weights = np.concatenate([masses, masses]) / 2.0
        return JumpQuadrature(nodes, weights, eps, rmax, n_radial, 0,
                              radial_edges=edges)

    if n_angular < 2 or n_angular % 2:
        raise ParameterError("n_angular must be even and >= 2")
    theta = (np.arange(n_angular) + 0.5) * (2.0 * math.pi / n_angular)
    dirs = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    nodes = (centers[:, None, None] * dirs[None, :, :]).reshape(-1, 2)
    weights = np.repeat(masses / n_angular, n_angular)
    return JumpQuadrature(nodes, weights, eps, rmax, n_radial, n_angular,
                          radial_edges=edges)


def symbol_closed_form(model: LevyMeasureModel, xi) -> float:
    """psi(xi) in closed form, where one exists.

    isotropic-stable: |xi|^alpha.  compound-poisson: finite atom sum.
    Other kinds raise; use symbol_quadrature for them.
    """
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    if xi.shape != (model.d,):
        raise DomainError("frequency dimension does not match model")
    if model.kind == "isotropic-stable":
        return float(np.linalg.norm(xi) ** model.alpha)
    if model.kind == "compound-poisson":
        return float(sum(m * (1.0 - math.cos(float(np.dot(xi, loc))))
                         for loc, m in model.atoms))
    raise UnsupportedOperationError(
        f"no closed-form exponent for kind {model.kind!r}")


def _outer_correction(model: LevyMeasureModel, r_c: float, s: float) -> float:
    """Correction for the omitted region |y| > r_c in the exponent quadrature.

    The omitted contribution is tail_mass(r_c) minus the oscillatory
    integral of cos(s|y|) against nu beyond r_c.  In d = 1 the latter is
    expanded by parts to two boundary terms, accurate once s * r_c >> 1;
    in d = 2 the oscillatory part decays faster and only the mass term
    is kept.
    """
    tail = model.tail_mass(r_c)
    if model.kind == "truncated-stable" and r_c >= model.trunc_radius:
        return 0.0
    if model.d == 1 and s * r_c > 2.0 and model.kind in _RADIAL_KINDS:
        rho = float(model.radial_profile(r_c))
        drho = model.radial_profile_derivative(r_c)
        osc = 2.0 * (-rho * math.sin(s * r_c) / s
                     - drho * math.cos(s * r_c) / (s * s))
        return tail - osc
    return tail


def symbol_quadrature(model: LevyMeasureModel, quad: JumpQuadrature,
                      xi) -> float:
    """psi(xi) by quadrature: node sum + inner Taylor completion + tail.

    The removed inner ball |y| < eps contributes |xi|^2 / (2 d) times
    the second moment of nu over the ball (exact for radial models by
    the |xi . y|^2 / 2 Taylor expansion of 1 - cos).  Beyond a
    frequency-dependent cutoff radius (where the geometric cells can no
    longer resolve the oscillation of cos(xi . y)) the node sum is
    replaced by an analytic tail correction.
    """
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    if xi.shape != (model.d,):
        raise DomainError("frequency dimension does not match model")
    s = float(np.linalg.norm(xi))
    if s == 0.0:
        return 0.0

    radii = quad.radii
    if model.kind == "compound-poisson":
        val = float(np.sum(quad.weights * (1.0 - np.cos(quad.nodes @ xi))))
        # atoms beyond rmax are summed exactly
        for loc, m in model.atoms:
            if math.hypot(*loc) > quad.rmax:
                val += m * (1.0 - math.cos(float(np.dot(xi, loc))))
        return val

    ratio = quad.geometric_ratio()
    r_c = quad.rmax
    if ratio > 1.0:
        # keep cells whose width resolves the oscillation of cos(s r)
        r_resolve = 0.7 / (s * (ratio - 1.0))
        r_asym = 6.0 / s
        r_c = min(quad.rmax, max(r_resolve, r_asym))
    mask = radii <= r_c
    val = float(np.sum(quad.weights[mask]
                       * (1.0 - np.cos(quad.nodes[mask] @ xi))))
    val += 0.5 * s * s * model.second_moment_ball(quad.eps) / model.d
    val += _outer_correction(model, r_c, s)
    return max(val, 0.0)


def check_levy_condition(model: LevyMeasureModel,
                         quad: JumpQuadrature) -> float:
    """Quadrature value of the integral of (1 ^ |y|^2) against nu.

    Includes the analytic inner second moment and the analytic tail
    mass, so the value is finite and refinement-stable for every
    supported kind.
    """
    radii = quad.radii
    g = np.minimum(1.0, radii ** 2)
    val = float(np.sum(quad.weights * g))
    if model.kind != "compound-poisson":
        val += model.second_moment_ball(quad.eps)
        val += model.tail_mass(quad.rmax) if quad.rmax >= 1.0 else 0.0
    else:
        for loc, m in model.atoms:
            r = math.hypot(*loc)
            if r <= quad.eps or r > quad.rmax:
                val += m * min(1.0, r * r)
    return val


def check_hartman_wintner(model: LevyMeasureModel, xi_samples,
                          quad: JumpQuadrature | None = None):
    """Ratio sequence psi(xi)/log|xi| along increasing |xi|.

    Returns (ratios, passed) where ratios is a list of (|xi|, ratio)
    pairs and passed records whether the sequence is increasing over
    its second half.  The condition is asymptotic, so the flag is a
    report, not a proof.
    """
    pts = [np.atleast_1d(np.asarray(x, dtype=float)) for x in xi_samples]
    mags = [float(np.linalg.norm(x)) for x in pts]
    if any(m < 2.0 for m in mags):
        raise ParameterError("Hartman-Wintner samples need |xi| >= 2")
    if any(b <= a for a, b in zip(mags, mags[1:])):
        raise ParameterError("sample magnitudes must increase")
    ratios = []
    for x, m in zip(pts, mags):
        try:
            psi = symbol_closed_form(model, x)
        except UnsupportedOperationError:
            if quad is None:
                raise
            psi = symbol_quadrature(model, quad, x)
        ratios.append((m, psi / math.log(m)))
    vals = [r for _, r in ratios]
    half = vals[max(1, len(vals) // 2) - 1:]
    passed = all(b > a for a, b in zip(half, half[1:]))
    return ratios, passed
