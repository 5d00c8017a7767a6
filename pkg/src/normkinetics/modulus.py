"""Moduli of convexity of planar unit balls.

Two moduli are computed from the same boundary machinery:

  * the midpoint modulus: worst-case sinking of midpoints of unit vectors
    at prescribed separation, ``inf {1 - |(x+y)/2| : |x-y| >= delta}``;
  * the supporting-line modulus: the greatest nondecreasing function rho
    with ``u.y <= u.x - |u|_* rho(|y-x|)`` for boundary points x, y and
    normals u at x.

Both are evaluated by a sweep over boundary anchors with the partner point
solved on the exact boundary at prescribed separation (bisection), followed
by golden-section refinement around the coarse minimizers and the
monotone envelope required by the definitions.  The binned-pair approach
cannot resolve the small-separation asymptotics the power-type fit needs,
which is why the partner is solved to machine accuracy instead.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from .geometry import PlanarNorm, BoundaryAtlas, rot90

TWO_PI = 2.0 * math.pi
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


class DegenerateModulusError(ValueError):
    """The modulus vanishes on the fit range: the norm is not of power type
    p for any p (flat boundary segments)."""


# ---------------------------------------------------------------------------
# curves
# ---------------------------------------------------------------------------


@dataclass
class ModulusCurve:
    """Sampled modulus delta -> value, kind 'omega' or 'rho'."""

    kind: str
    deltas: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.deltas = np.asarray(self.deltas, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.kind not in ("omega", "rho"):
            raise ValueError("kind must be 'omega' or 'rho'")
        if np.any(np.diff(self.deltas) <= 0):
            raise ValueError("deltas must be strictly increasing")
        if np.any(self.values < 0):
            raise ValueError("modulus values must be nonnegative")
        if self.kind == "omega" and np.any(self.values > 1.0 + 1e-12):
            raise ValueError("omega values must lie in [0, 1]")
        if self.kind == "rho" and np.any(np.diff(self.values) < -1e-12):
            raise ValueError("rho curve must be nondecreasing")

    def to_csv(self, path):
        with open(path, "w") as fh:
            fh.write("delta,value\n")
            for d, v in zip(self.deltas, self.values):
                fh.write(f"{d:.12g},{v:.12g}\n")

    @classmethod
    def from_csv(cls, path, kind):
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        return cls(kind, data[:, 0], data[:, 1])


@dataclass
class PowerTypeFit:
    """Log-log least-squares fit value ~ K * delta^p on a delta range."""

    p_hat: float
    K_hat: float
    r_squared: float
    delta_range: Tuple[float, float]

    def to_dict(self):
        return {
            "p_hat": self.p_hat,
            "K_hat": self.K_hat,
            "r_squared": self.r_squared,
            "delta_min": self.delta_range[0],
            "delta_max": self.delta_range[1],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


# ---------------------------------------------------------------------------
# boundary pair scans
# ---------------------------------------------------------------------------


def _partner(norm, th1, delta, side, iters=48):
    """Solve |r(th2) - r(th1)| = delta for th2 on the given side of th1.

    The chord length grows from 0 to 2 as th2 sweeps half the boundary,
    so bisection on the angular offset finds the first crossing.
    """
    th1 = np.asarray(th1, dtype=float)
    x = norm.boundary_point(th1)
    lo = np.zeros_like(th1)
    hi = np.full_like(th1, math.pi)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        d = norm.gauge(norm.boundary_point(th1 + side * mid) - x)
        above = d >= delta
        hi = np.where(above, mid, hi)
        lo = np.where(above, lo, mid)
    return th1 + side * 0.5 * (lo + hi)


def _omega_objective(norm, th1, delta, iters=48):
    th1 = np.asarray(th1, dtype=float)
    th2 = _partner(norm, th1, delta, +1.0, iters)
    mid = 0.5 * (norm.boundary_point(th1) + norm.boundary_point(th2))
    return np.clip(1.0 - norm.gauge(mid), 0.0, 1.0)


def _corner_normal_candidates(atlas, th1):
    """Normals at the bracketing atlas entries around each angle, so that
    near a polygon vertex both adjacent edge normals are tried."""
    th = atlas._theta_of(np.stack([np.cos(th1), np.sin(th1)], axis=-1))
    i = atlas._bracket(th, atlas._theta_ext)
    n = len(atlas)
    return [atlas.normals[(i + k) % n] for k in (-1, 0, 1, 2)]


def _rho_objective(norm, th1, delta, atlas, iters=48):
    th1 = np.asarray(th1, dtype=float)
    x = norm.boundary_point(th1)
    if norm.is_smooth and norm.strictly_convex:
        phi = atlas._fd_normal_angle(th1)
        candidates = [np.stack([np.cos(phi), np.sin(phi)], axis=-1)]
    else:
        candidates = _corner_normal_candidates(atlas, th1)
    best = np.full(th1.shape, np.inf)
    for side in (+1.0, -1.0):
        y = norm.boundary_point(_partner(norm, th1, delta, side, iters))
        diff = x - y
        for u in candidates:
            val = np.einsum("...i,...i->...", u, diff) / norm.dual_gauge(u)
            best = np.minimum(best, val)
    return np.maximum(best, 0.0)


def _golden_min(f, lo, hi, iters=48):
    a = np.asarray(lo, dtype=float).copy()
    b = np.asarray(hi, dtype=float).copy()
    for _ in range(iters):
        c = b - _INVPHI * (b - a)
        d = a + _INVPHI * (b - a)
        pick = f(c) < f(d)
        b = np.where(pick, d, b)
        a = np.where(pick, a, c)
    mid = 0.5 * (a + b)
    return mid, f(mid)


def _local_minima_indices(vals, k=3, separation=2):
    order = np.argsort(vals)
    chosen = []
    for i in order:
        if all(min(abs(i - j), len(vals) - abs(i - j)) > separation for j in chosen):
            chosen.append(i)
        if len(chosen) == k:
            break
    return chosen


def _modulus_raw(norm, deltas, kind, n_scan=512, refine=True):
    """Equality-constrained infimum at each separation (no envelope yet).

    Fully vectorized over (separation, anchor angle); refinement runs one
    batched golden section over the best anchors of every separation.
    """
    atlas = norm.atlas()
    deltas = np.asarray(deltas, dtype=float)
    n_d = len(deltas)
    numeric = norm.uses_numeric_support
    if numeric:
        n_scan = min(n_scan, 256)  # each gauge call is a support maximization
    p_iters = 36 if numeric else 48
    grid = np.arange(n_scan) * (TWO_PI / n_scan)
    step = TWO_PI / n_scan

    def objective(th1, delta):
        if kind == "omega":
            return _omega_objective(norm, th1, delta, p_iters)
        return _rho_objective(norm, th1, delta, atlas, p_iters)

    th_all = np.broadcast_to(grid, (n_d, n_scan)).ravel()
    d_all = np.repeat(deltas, n_scan)
    vals = objective(th_all, d_all).reshape(n_d, n_scan)
    best = vals.min(axis=1)
    if refine:
        k = 3
        idx = np.array([_local_minima_indices(v, k=k) for v in vals])  # (n_d, k)
        centers = grid[idx].ravel()
        d_rep = np.repeat(deltas, k)
        _, fmin = _golden_min(lambda t: objective(t, d_rep),
                              centers - step, centers + step,
                              iters=30 if numeric else 40)
        best = np.minimum(best, fmin.reshape(n_d, k).min(axis=1))
    return np.maximum(best, 0.0)


def _with_envelope(norm, deltas, kind, n_scan, refine):
    """Values of the modulus with the inf-over-larger-separations envelope
    (this is exactly the definitional inf over pairs at separation >= delta,
    and realizes the greatest nondecreasing minorant for rho)."""
    deltas = np.atleast_1d(np.asarray(deltas, dtype=float))
    if np.any(deltas <= 0) or np.any(deltas > 2.0):
        raise ValueError("delta must lie in (0, 2]")
    hi = float(deltas.max())
    tail = np.linspace(hi, 2.0, 14)[1:] if hi < 2.0 else np.empty(0)
    grid = np.unique(np.concatenate([deltas, tail]))
    raw = _modulus_raw(norm, grid, kind, n_scan, refine)
    env = np.minimum.accumulate(raw[::-1])[::-1]
    lookup = {d: v for d, v in zip(grid, env)}
    return np.array([lookup[d] for d in deltas])


def omega_curve(norm: PlanarNorm, deltas, n_scan=512, refine=True) -> ModulusCurve:
    """Midpoint modulus of convexity sampled on a separation grid."""
    deltas = np.atleast_1d(np.asarray(deltas, dtype=float))
    vals = _with_envelope(norm, deltas, "omega", n_scan, refine)
    return ModulusCurve("omega", deltas, vals)


def rho_curve(norm: PlanarNorm, deltas, n_scan=512, refine=True) -> ModulusCurve:
    """Supporting-line modulus sampled on a separation grid (nondecreasing)."""
    deltas = np.atleast_1d(np.asarray(deltas, dtype=float))
    vals = _with_envelope(norm, deltas, "rho", n_scan, refine)
    vals = np.maximum.accumulate(vals)  # guard float wiggle at 1e-16 scale
    return ModulusCurve("rho", deltas, vals)


def omega(norm: PlanarNorm, delta, n_scan=512, refine=True) -> float:
    return float(omega_curve(norm, [float(delta)], n_scan, refine).values[0])


def rho(norm: PlanarNorm, delta, n_scan=512, refine=True) -> float:
    return float(rho_curve(norm, [float(delta)], n_scan, refine).values[0])


# ---------------------------------------------------------------------------
# checks and fits
# ---------------------------------------------------------------------------


def sandwich_check(norm: PlanarNorm, deltas, slack=1e-3, n_scan=512) -> dict:
    """Verify rho(delta/2) <= omega(delta) <= rho(delta)/2 on a grid.

    Violations beyond the discretization slack indicate a bug: the
    inequality is a theorem for every symmetric convex body.
    """
    deltas = np.atleast_1d(np.asarray(deltas, dtype=float))
    om = omega_curve(norm, deltas, n_scan).values
    rho_all = rho_curve(norm, np.unique(np.concatenate([deltas, deltas / 2.0])), n_scan)
    rmap = {d: v for d, v in zip(rho_all.deltas, rho_all.values)}
    rho_half = np.array([rmap[d / 2.0] for d in deltas])
    rho_full = np.array([rmap[d] for d in deltas])
    lower_margin = om - rho_half
    upper_margin = rho_full / 2.0 - om
    passed = bool(np.all(lower_margin >= -slack) and np.all(upper_margin >= -slack))
    return {
        "deltas": deltas.tolist(),
        "omega": om.tolist(),
        "rho_half": rho_half.tolist(),
        "rho": rho_full.tolist(),
        "lower_margin": lower_margin.tolist(),
        "upper_margin": upper_margin.tolist(),
        "slack": slack,
        "passed": passed,
    }


def nordlander_check(norm: PlanarNorm, deltas, slack=1e-6, n_scan=512) -> dict:
    """Verify the euclidean upper bound omega_B <= omega_2 on a grid, with
    omega_2 computed by the same pipeline on the euclidean spec."""
    deltas = np.atleast_1d(np.asarray(deltas, dtype=float))
    om_b = omega_curve(norm, deltas, n_scan).values
    om_2 = omega_curve(PlanarNorm.euclidean(), deltas, n_scan).values
    margin = om_2 + slack - om_b
    return {
        "deltas": deltas.tolist(),
        "omega_b": om_b.tolist(),
        "omega_euclid": om_2.tolist(),
        "margin": margin.tolist(),
        "slack": slack,
        "passed": bool(np.all(margin >= 0.0)),
    }


def fit_power_type(curve: ModulusCurve, delta_range=(1e-3, 1e-1)) -> PowerTypeFit:
    """Least squares on (log delta, log value) within the range.

    Values below 1e-12 are excluded (they are zero up to cancellation noise);
    raises DegenerateModulusError with fewer than 8 usable samples, which is
    the signature of flat boundary segments: not of power type p for any p.
    """
    lo, hi = float(delta_range[0]), float(delta_range[1])
    keep = (curve.deltas >= lo) & (curve.deltas <= hi) & (curve.values > 1e-12)
    if int(keep.sum()) < 8:
        raise DegenerateModulusError("degenerate modulus")
    ld = np.log(curve.deltas[keep])
    lv = np.log(curve.values[keep])
    slope, intercept = np.polyfit(ld, lv, 1)
    pred = slope * ld + intercept
    ss_res = float(np.sum((lv - pred) ** 2))
    ss_tot = float(np.sum((lv - lv.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return PowerTypeFit(float(slope), float(math.exp(intercept)), float(r2), (lo, hi))


def power_type_grid(lo=1e-3, hi=1e-1, n=24):
    """Default log-spaced separation grid for power-type fitting."""
    return np.geomspace(lo, hi, n)


# ---------------------------------------------------------------------------
# local graph and curvature
# ---------------------------------------------------------------------------


@dataclass
class LocalGraph:
    """Boundary samples in the tangent/inner-normal frame at a base point."""

    base: np.ndarray
    tangent: np.ndarray
    inner_normal: np.ndarray
    a: np.ndarray
    b: np.ndarray

    def convexity_violation(self):
        return float(np.max(-self.b))


def local_graph(norm: PlanarNorm, x, window, n_samples=201) -> LocalGraph:
    """Sample the boundary near x in the frame (tangent, inner normal).

    ``window`` is the angular half-width of the boundary parameter; it must
    not exceed half the boundary (pi).  Strictly convex C1 norms only.
    """
    if not (norm.is_smooth and norm.strictly_convex):
        raise ValueError("local_graph requires a strictly convex C1 norm")
    if window >= math.pi:
        raise ValueError("window exceeds half the boundary")
    x = np.asarray(x, dtype=float)
    atlas = norm.atlas()
    n = atlas.normal_at(x)
    tau = rot90(n)
    nu = -n
    th0 = math.atan2(x[1], x[0])
    ts = np.linspace(th0 - window, th0 + window, int(n_samples))
    gamma = norm.boundary_point(ts)
    rel = gamma - x
    return LocalGraph(x, tau, nu, rel @ tau, rel @ nu)


def graph_power_check(graph: LocalGraph, p, C, slack=1e-12) -> bool:
    """Whether b(t) >= C |a(t)|^p holds on the sampled window."""
    return bool(np.all(graph.b >= C * np.abs(graph.a) ** float(p) - slack))


def curvature_profile(atlas: BoundaryAtlas) -> np.ndarray:
    """Discrete curvature at every atlas point via the circumscribed circle
    of three consecutive points.  Polygon atlases are rejected: the
    curvature of a polygon is a Dirac comb and not representable here."""
    if atlas.vertex_mask is not None:
        raise ValueError("curvature is not representable on polygon atlases")
    p = atlas.points
    a = np.roll(p, 1, axis=0)
    c = np.roll(p, -1, axis=0)
    ab = p - a
    bc = c - p
    ac = c - a
    cross = ab[:, 0] * bc[:, 1] - ab[:, 1] * bc[:, 0]
    denom = (np.linalg.norm(ab, axis=1) * np.linalg.norm(bc, axis=1)
             * np.linalg.norm(ac, axis=1))
    return 2.0 * np.abs(cross) / denom


def curvature(atlas: BoundaryAtlas, x) -> float:
    """Discrete curvature at the atlas point nearest to x."""
    prof = curvature_profile(atlas)
    th = atlas._theta_of(np.asarray(x, dtype=float))
    i = int(np.argmin(np.abs(atlas.theta - th)))
    return float(prof[i])


def elliptic_check(norm: PlanarNorm, threshold=1e-3, n_samples=4096) -> bool:
    """True iff the discrete curvature is bounded below by the threshold,
    i.e. the ball is of power type 2 by the graph characterization."""
    prof = curvature_profile(norm.atlas(n_samples))
    return bool(prof.min() > threshold)
