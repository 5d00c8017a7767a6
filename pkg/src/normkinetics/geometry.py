"""Planar norms and the geometry of their unit balls.

A norm is described by a small spec tree (euclidean, l^p, symmetric polygon,
sums, duals, scalings).  :class:`PlanarNorm` evaluates the gauge (Minkowski
functional) and the dual gauge (support function of the ball), and builds
discrete boundary atlases: oriented closed polylines with arclengths,
tangents and outward unit normals.  The atlas is the workhorse for
everything downstream: the normal map and its inverse, the rotated body,
boundary quadrature.

Conventions:
  * ``x^perp`` is rotation by +pi/2, i.e. (x, y) -> (-y, x).
  * atlases are counterclockwise; the outward normal is the tangent
    rotated by -pi/2.
  * ``scaled(factor, base)`` means ``|x| = factor * |x|_base`` (the unit
    ball shrinks by 1/factor).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

TWO_PI = 2.0 * math.pi

# Sample count for internal support-function maximization when no closed
# form exists (sum norms); the parabolic refinement recovers the accuracy
# a much finer scan would give.
_SUPPORT_N = 1024
_SUPPORT_CHUNK = 8192


class CornerNormError(ValueError):
    """An operation required a strictly convex C1 ball but the norm has
    corners or flat edges, so the single-valued hypothesis fails."""


def rot90(x):
    """Rotate 2-vectors by +pi/2 (the ``perp`` operation)."""
    x = np.asarray(x, dtype=float)
    return np.stack([-x[..., 1], x[..., 0]], axis=-1)


def rot90_inv(x):
    """Rotate 2-vectors by -pi/2."""
    x = np.asarray(x, dtype=float)
    return np.stack([x[..., 1], -x[..., 0]], axis=-1)


def _cross2(a, b):
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def _normalize_rows(v):
    n = np.linalg.norm(v, axis=-1, keepdims=True)
    return v / n


def _conjugate_exponent(p):
    if p == 1.0:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)


def _lp_value(x, p):
    ax = np.abs(np.asarray(x, dtype=float))
    if p == 1.0:
        return ax.sum(axis=-1)
    if math.isinf(p):
        return ax.max(axis=-1)
    if p == 2.0:
        return np.sqrt((ax * ax).sum(axis=-1))
    return (ax**p).sum(axis=-1) ** (1.0 / p)


# ---------------------------------------------------------------------------
# Norm specification tree
# ---------------------------------------------------------------------------

_KIND_KEYS = {
    "euclidean": set(),
    "lp": {"p"},
    "polygon": {"vertices"},
    "sum": {"terms"},
    "dual": {"of"},
    "scaled": {"factor", "of"},
}


@dataclass(frozen=True)
class NormSpec:
    """Declarative description of a planar norm."""

    kind: str
    p: Optional[float] = None
    vertices: Optional[tuple] = None
    terms: Optional[tuple] = None
    of: Optional["NormSpec"] = None
    factor: Optional[float] = None

    def __post_init__(self):
        if self.kind not in _KIND_KEYS:
            raise ValueError(f"unknown norm kind '{self.kind}'")
        if self.kind == "lp":
            if self.p is None or not (self.p >= 1.0):
                raise ValueError("p must be >= 1")
        elif self.kind == "polygon":
            object.__setattr__(self, "vertices", _prepare_polygon(self.vertices))
        elif self.kind == "sum":
            if not self.terms:
                raise ValueError("sum requires >= 1 term")
            object.__setattr__(self, "terms", tuple(self.terms))
        elif self.kind == "dual":
            if self.of is None:
                raise ValueError("dual requires 'of'")
        elif self.kind == "scaled":
            if self.of is None:
                raise ValueError("scaled requires 'of'")
            if self.factor is None or not (self.factor > 0):
                raise ValueError("scaled factor must be > 0")

    def to_dict(self):
        d = {"kind": self.kind}
        if self.kind == "lp":
            d["p"] = self.p if math.isfinite(self.p) else "inf"
        elif self.kind == "polygon":
            d["vertices"] = [list(v) for v in self.vertices]
        elif self.kind == "sum":
            d["terms"] = [t.to_dict() for t in self.terms]
        elif self.kind == "dual":
            d["of"] = self.of.to_dict()
        elif self.kind == "scaled":
            d["factor"] = self.factor
            d["of"] = self.of.to_dict()
        return d

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def _prepare_polygon(vertices):
    """Validate and canonicalize a symmetric convex polygon vertex list.

    Vertices are sorted counterclockwise.  The list must be centrally
    symmetric, have >= 4 vertices, be in strictly convex position (no three
    consecutive collinear) and contain the origin strictly inside.
    """
    if vertices is None:
        raise ValueError("polygon requires 'vertices'")
    v = np.asarray([[float(a), float(b)] for a, b in vertices], dtype=float)
    if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 4:
        raise ValueError("polygon needs >= 4 two-dimensional vertices")
    order = np.argsort(np.arctan2(v[:, 1], v[:, 0]))
    v = v[order]
    n = v.shape[0]
    for i in range(n):
        if np.min(np.linalg.norm(v + v[i], axis=1)) > 1e-9:
            raise ValueError("polygon vertex list is not centrally symmetric")
    for i in range(n):
        a, b, c = v[i - 1], v[i], v[(i + 1) % n]
        cross = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0])
        if cross <= 1e-12:
            raise ValueError("polygon is not strictly convex (collinear or reflex vertices)")
    for i in range(n):
        # edge line must not pass through the origin
        if _cross2(v[i], v[(i + 1) % n]) <= 1e-12:
            raise ValueError("polygon does not contain the origin strictly inside")
    return tuple((float(a), float(b)) for a, b in v)


def parse_norm_spec(obj) -> NormSpec:
    """Parse a NormSpec from a JSON-style dict, rejecting unknown keys."""
    if not isinstance(obj, dict):
        raise ValueError("norm spec must be a JSON object")
    kind = obj.get("kind")
    if kind is None:
        raise ValueError("norm spec is missing the 'kind' key")
    if kind not in _KIND_KEYS:
        raise ValueError(f"unknown norm kind '{kind}'")
    allowed = _KIND_KEYS[kind] | {"kind"}
    for k in obj:
        if k not in allowed:
            raise ValueError(f"unknown key '{k}' for norm kind '{kind}'")
    if kind == "euclidean":
        return NormSpec("euclidean")
    if kind == "lp":
        p = obj.get("p")
        if isinstance(p, str) and p.lower() in ("inf", "infinity"):
            p = math.inf
        return NormSpec("lp", p=float(p))
    if kind == "polygon":
        return NormSpec("polygon", vertices=tuple(tuple(v) for v in obj["vertices"]))
    if kind == "sum":
        return NormSpec("sum", terms=tuple(parse_norm_spec(t) for t in obj["terms"]))
    if kind == "dual":
        return NormSpec("dual", of=parse_norm_spec(obj["of"]))
    return NormSpec("scaled", factor=float(obj["factor"]), of=parse_norm_spec(obj["of"]))


# ---------------------------------------------------------------------------
# PlanarNorm
# ---------------------------------------------------------------------------


class PlanarNorm:
    """Evaluable symmetric planar norm with gauge, dual gauge and atlases.

    Immutable after construction; all evaluation methods are pure and
    broadcast over arrays of shape (..., 2).
    """

    def __init__(self, spec: NormSpec):
        self.spec = spec
        self._atlases = {}
        self._children = []
        self._poly = None
        k = spec.kind
        if k == "euclidean":
            self.is_smooth, self.strictly_convex = True, True
        elif k == "lp":
            smooth = 1.0 < spec.p < math.inf
            self.is_smooth, self.strictly_convex = smooth, smooth
        elif k == "polygon":
            self.is_smooth, self.strictly_convex = False, False
            self._poly = _PolygonData(np.asarray(spec.vertices, dtype=float))
        elif k == "sum":
            self._children = [PlanarNorm(t) for t in spec.terms]
            self.is_smooth = all(c.is_smooth for c in self._children)
            self.strictly_convex = any(c.strictly_convex for c in self._children)
        elif k == "dual":
            child = PlanarNorm(spec.of)
            self._children = [child]
            # duality swaps smoothness and strict convexity
            self.is_smooth = child.strictly_convex
            self.strictly_convex = child.is_smooth
        elif k == "scaled":
            child = PlanarNorm(spec.of)
            self._children = [child]
            self.is_smooth = child.is_smooth
            self.strictly_convex = child.strictly_convex

    # -- constructors --------------------------------------------------------

    @classmethod
    def euclidean(cls):
        return cls(NormSpec("euclidean"))

    @classmethod
    def lp(cls, p):
        return cls(NormSpec("lp", p=float(p)))

    @classmethod
    def polygon(cls, vertices):
        return cls(NormSpec("polygon", vertices=tuple(tuple(v) for v in vertices)))

    @classmethod
    def sum_of(cls, *norms_or_specs):
        terms = tuple(n.spec if isinstance(n, PlanarNorm) else n for n in norms_or_specs)
        return cls(NormSpec("sum", terms=terms))

    @classmethod
    def dual_of(cls, norm_or_spec):
        of = norm_or_spec.spec if isinstance(norm_or_spec, PlanarNorm) else norm_or_spec
        return cls(NormSpec("dual", of=of))

    @classmethod
    def scaled(cls, factor, norm_or_spec):
        of = norm_or_spec.spec if isinstance(norm_or_spec, PlanarNorm) else norm_or_spec
        return cls(NormSpec("scaled", factor=float(factor), of=of))

    @classmethod
    def from_json(cls, text):
        return cls(parse_norm_spec(json.loads(text)))

    def __repr__(self):
        return f"PlanarNorm({self.spec.to_json()})"

    @property
    def uses_numeric_support(self):
        """True if some gauge in the spec tree has no closed form and falls
        back to support maximization (sum norms and their duals)."""
        if self.spec.kind == "sum":
            return True
        return any(c.uses_numeric_support for c in self._children)

    # -- basic evaluation ----------------------------------------------------

    @property
    def smoothness_flag(self):
        return "C1" if self.is_smooth else "corner"

    def gauge(self, x):
        """The norm itself: j_B(x) = inf{t > 0 : x in tB}."""
        x = np.asarray(x, dtype=float)
        k = self.spec.kind
        if k == "euclidean":
            return np.linalg.norm(x, axis=-1)
        if k == "lp":
            return _lp_value(x, self.spec.p)
        if k == "polygon":
            return np.max(x @ self._poly.edge_funcs.T, axis=-1)
        if k == "sum":
            return sum(c.gauge(x) for c in self._children)
        if k == "scaled":
            return self.spec.factor * self._children[0].gauge(x)
        return self._children[0].dual_gauge(x)  # dual

    def dual_gauge(self, x):
        """Dual norm = support function of the unit ball: sup_{y in B} x.y."""
        x = np.asarray(x, dtype=float)
        k = self.spec.kind
        if k == "euclidean":
            return np.linalg.norm(x, axis=-1)
        if k == "lp":
            return _lp_value(x, _conjugate_exponent(self.spec.p))
        if k == "polygon":
            return np.max(x @ self._poly.vertices.T, axis=-1)
        if k == "scaled":
            return self._children[0].dual_gauge(x) / self.spec.factor
        if k == "dual":
            return self._children[0].gauge(x)  # bidual identity
        return self._support_numeric(x)  # sum

    def boundary_point(self, theta):
        """Radial boundary parameterization r(theta) = u(theta)/|u(theta)|_B."""
        theta = np.asarray(theta, dtype=float)
        u = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
        g = self.gauge(u)
        return u / np.asarray(g)[..., None]

    def _support_numeric(self, x):
        """Support maximization over the boundary: coarse atlas max plus one
        parabolic refinement of the winning arc (the objective x.y is
        unimodal on boundary arcs of a convex body).  Evaluated in chunks to
        bound the (rows x atlas) intermediate."""
        x = np.asarray(x, dtype=float)
        lead = x.shape[:-1]
        xs = x.reshape(-1, 2)
        atl = self.atlas(_SUPPORT_N)
        pts_t = np.ascontiguousarray(atl.points.T)
        n = pts_t.shape[1]
        out = np.empty(xs.shape[0])
        for s in range(0, xs.shape[0], _SUPPORT_CHUNK):
            blk = xs[s:s + _SUPPORT_CHUNK]
            vals = blk @ pts_t                       # (chunk, N)
            i = np.argmax(vals, axis=-1)
            rows = np.arange(len(i))
            fm, f0, fp = vals[rows, (i - 1) % n], vals[rows, i], vals[rows, (i + 1) % n]
            denom = fm - 2.0 * f0 + fp
            with np.errstate(divide="ignore", invalid="ignore"):
                off = np.where(np.abs(denom) > 1e-300, 0.5 * (fm - fp) / denom, 0.0)
            off = np.clip(np.nan_to_num(off), -1.0, 1.0)
            theta_hat = atl.theta[i] + off * (TWO_PI / n)
            refined = np.einsum("ij,ij->i", blk, self.boundary_point(theta_hat))
            out[s:s + _SUPPORT_CHUNK] = np.maximum(f0, refined)
        return out.reshape(lead) if lead else out[0]

    # -- atlases ---------------------------------------------------------------

    def atlas(self, n_samples=4096, atlas_tol=1e-6) -> "BoundaryAtlas":
        key = (int(n_samples), float(atlas_tol))
        if key not in self._atlases:
            self._atlases[key] = boundary_atlas(self, n_samples, atlas_tol)
        return self._atlases[key]

    @property
    def equivalence_constants(self):
        """(c_low, c_high) with c_low|x|_2 <= |x| <= c_high|x|_2."""
        atl = self.atlas()
        radii = np.linalg.norm(atl.points, axis=1)
        return 1.0 / float(radii.max()), 1.0 / float(radii.min())


class _PolygonData:
    """Edge functionals, normals and vertex angles of a canonical polygon."""

    def __init__(self, vertices):
        self.vertices = vertices
        n = len(vertices)
        funcs = np.empty((n, 2))
        for i in range(n):
            a, b = vertices[i], vertices[(i + 1) % n]
            det = a[0] * b[1] - a[1] * b[0]
            funcs[i] = np.array([b[1] - a[1], a[0] - b[0]]) / det  # f.a = f.b = 1
        self.edge_funcs = funcs
        self.edge_normals = _normalize_rows(funcs)
        self.vertex_angles = np.arctan2(vertices[:, 1], vertices[:, 0])  # ascending


# ---------------------------------------------------------------------------
# Boundary atlas
# ---------------------------------------------------------------------------


class BoundaryAtlas:
    """Oriented closed polyline discretization of the unit sphere of a norm.

    Points are counterclockwise with strictly increasing polar angle; the
    polyline is closed logically (last point connects back to the first).
    All arrays are read-only; the atlas is safe to share between workers.
    """

    def __init__(self, points, theta, tangents, normals, gauge, atlas_tol,
                 is_smooth, strictly_convex, rotations=0, vertex_mask=None):
        self.points = np.ascontiguousarray(points, dtype=float)
        self.theta = np.ascontiguousarray(theta, dtype=float)
        self.tangents = np.ascontiguousarray(tangents, dtype=float)
        self.normals = np.ascontiguousarray(normals, dtype=float)
        self.gauge = gauge
        self.atlas_tol = float(atlas_tol)
        self.is_smooth = bool(is_smooth)
        self.strictly_convex = bool(strictly_convex)
        self.rotations = int(rotations) % 4
        self.vertex_mask = vertex_mask

        seg = np.roll(self.points, -1, axis=0) - self.points
        seglen = np.linalg.norm(seg, axis=1)
        self.cum_arclength = np.concatenate([[0.0], np.cumsum(seglen)])
        self.perimeter = float(self.cum_arclength[-1])

        phi = np.unwrap(np.arctan2(self.normals[:, 1], self.normals[:, 0]))
        phi = np.maximum.accumulate(phi)  # FD noise can break monotonicity at ~1e-12
        self.normal_angles = phi
        self._theta_ext = np.concatenate([self.theta, [self.theta[0] + TWO_PI]])
        self._phi_ext = np.concatenate([phi, [phi[0] + TWO_PI]])
        for arr in (self.points, self.theta, self.tangents, self.normals,
                    self.cum_arclength, self.normal_angles):
            arr.setflags(write=False)

    def __len__(self):
        return self.points.shape[0]

    @property
    def is_perp(self):
        return self.rotations == 1

    def perp(self) -> "BoundaryAtlas":
        """Atlas of the rotated body B^perp = {x^perp : x in B}.

        Chaining is allowed; four applications return the original data.
        """
        g = self.gauge
        return BoundaryAtlas(
            points=rot90(self.points),
            theta=self.theta + 0.5 * math.pi,
            tangents=rot90(self.tangents),
            normals=rot90(self.normals),
            gauge=lambda x: g(rot90_inv(x)),
            atlas_tol=self.atlas_tol,
            is_smooth=self.is_smooth,
            strictly_convex=self.strictly_convex,
            rotations=self.rotations + 1,
            vertex_mask=self.vertex_mask,
        )

    # -- boundary evaluation ---------------------------------------------------

    def radial(self, theta):
        """Exact boundary point in direction theta (via the gauge)."""
        theta = np.asarray(theta, dtype=float)
        u = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
        return u / np.asarray(self.gauge(u))[..., None]

    def _theta_of(self, x):
        x = np.asarray(x, dtype=float)
        th = np.arctan2(x[..., 1], x[..., 0])
        lo = self._theta_ext[0]
        return lo + np.mod(th - lo, TWO_PI)

    @staticmethod
    def _bracket(values, grid_ext):
        idx = np.searchsorted(grid_ext, values, side="right") - 1
        return np.clip(idx, 0, len(grid_ext) - 2)

    def normal_at(self, x):
        """Outward unit normal at the boundary location nearest to x.

        For strictly convex C1 norms the normal is a centered finite
        difference of the exact boundary at the query direction (the same
        evaluation ``inverse_normal`` refines against, so the two maps are
        mutually consistent to machine precision).  For corner norms it
        angle-interpolates between the bracketing atlas normals; at a
        polygon vertex this returns the angular midpoint of the adjacent
        edge normals (documented convention; the true normal cone is fat).
        Raises if x is not on the unit sphere within the atlas tolerance.
        """
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 1
        xs = np.atleast_2d(x)
        g = self.gauge(xs)
        if np.any(np.abs(g - 1.0) > max(self.atlas_tol, 1e-9)):
            raise ValueError("normal_at: point is not on the unit sphere within atlas_tol")
        th = self._theta_of(xs)
        if self.is_smooth and self.strictly_convex:
            phi = self._fd_normal_angle(th)
        else:
            i = self._bracket(th, self._theta_ext)
            t0, t1 = self._theta_ext[i], self._theta_ext[i + 1]
            w = (th - t0) / np.maximum(t1 - t0, 1e-300)
            phi = self._phi_ext[i] * (1.0 - w) + self._phi_ext[i + 1] * w
        n = np.stack([np.cos(phi), np.sin(phi)], axis=-1)
        return n[0] if scalar else n

    def _fd_normal_angle(self, theta, step=1e-3):
        """Normal angle from Richardson-extrapolated centered differences on
        the exact boundary (O(step^4) bias, low cancellation noise)."""
        t1 = self.radial(theta + step) - self.radial(theta - step)
        t2 = self.radial(theta + 2 * step) - self.radial(theta - 2 * step)
        p1 = np.arctan2(-t1[..., 0], t1[..., 1])  # angle of rot90_inv(t)
        p2 = np.arctan2(-t2[..., 0], t2[..., 1])
        return p1 + (np.mod(p1 - p2 + math.pi, TWO_PI) - math.pi) / 3.0

    def inverse_normal(self, u, corner_ok=False, refine_iters=46):
        """The boundary point x with n_B(x) = u (single-valued inverse).

        Requires a strictly convex C1 norm: the normal map of such a curve
        turns monotonically, so the inverse is located by a monotone bracket
        on the atlas normal angles and then refined by bisection against
        continuous finite-difference normals of the exact boundary.

        For polygon norms with ``corner_ok=True``, directions strictly
        inside a vertex normal cone map to that vertex; directions along an
        edge normal raise (the inverse is set-valued there).
        """
        u = np.asarray(u, dtype=float)
        scalar = u.ndim == 1
        us = _normalize_rows(np.atleast_2d(u))
        if not (self.is_smooth and self.strictly_convex):
            if not corner_ok:
                raise CornerNormError(
                    "inverse_normal: set-valued inverse (norm has corners or flat edges)")
            return self._inverse_normal_corner(us, scalar)
        phi0 = self._phi_ext[0]
        phi_u = phi0 + np.mod(np.arctan2(us[:, 1], us[:, 0]) - phi0, TWO_PI)
        i = self._bracket(phi_u, self._phi_ext)
        lo = self._theta_ext[i].copy()
        hi = self._theta_ext[i + 1].copy()

        def wrapped_diff(theta):
            return np.mod(self._fd_normal_angle(theta) - phi_u + math.pi, TWO_PI) - math.pi

        # The stored atlas angles carry an O(dtheta^2) bias, so the coarse
        # bracket may just miss the root; expand until it straddles.
        pad = TWO_PI / len(self)
        for _ in range(8):
            bad_lo = wrapped_diff(lo) > 0.0
            bad_hi = wrapped_diff(hi) < 0.0
            if not (np.any(bad_lo) or np.any(bad_hi)):
                break
            lo = np.where(bad_lo, lo - pad, lo)
            hi = np.where(bad_hi, hi + pad, hi)
            pad *= 2.0
        for _ in range(refine_iters):
            mid = 0.5 * (lo + hi)
            take_hi = wrapped_diff(mid) < 0.0
            lo = np.where(take_hi, mid, lo)
            hi = np.where(take_hi, hi, mid)
        pts = self.radial(0.5 * (lo + hi))
        return pts[0] if scalar else pts

    def _inverse_normal_corner(self, us, scalar):
        if self.vertex_mask is None:
            raise CornerNormError(
                "inverse_normal: almost-everywhere inverse is only implemented for polygon norms")
        phi_u = np.arctan2(us[:, 1], us[:, 0])
        edge_phi = np.arctan2(self.normals[~self.vertex_mask, 1],
                              self.normals[~self.vertex_mask, 0])
        edge_phi = np.unique(np.round(edge_phi, 12))
        gap = np.abs(np.mod(phi_u[:, None] - edge_phi[None, :] + math.pi, TWO_PI) - math.pi)
        if np.any(gap.min(axis=1) < 1e-9):
            raise ValueError("inverse_normal: direction lies along an edge normal (singular set)")
        phi0 = self._phi_ext[0]
        i = self._bracket(phi0 + np.mod(phi_u - phi0, TWO_PI), self._phi_ext)
        is_v1 = self.vertex_mask[(i + 1) % len(self)]
        pick = np.where(is_v1, (i + 1) % len(self), i)
        pts = self.points[pick]
        return pts[0] if scalar else pts

    # -- validation --------------------------------------------------------------

    def validate(self, full=False):
        """Measure the atlas invariants; returns a dict with an ``ok`` flag."""
        tol = self.atlas_tol
        report = {}
        g = self.gauge(self.points)
        report["max_gauge_deviation"] = float(np.max(np.abs(g - 1.0)))
        area = 0.5 * float(np.sum(_cross2(self.points, np.roll(self.points, -1, axis=0))))
        report["signed_area"] = area
        th = self._theta_of(-self.points)
        i = self._bracket(th, self._theta_ext)
        gap = np.minimum(
            np.linalg.norm(-self.points - self.points[i], axis=1),
            np.linalg.norm(-self.points - self.points[(i + 1) % len(self)], axis=1),
        )
        report["max_symmetry_gap"] = float(np.max(gap))
        if full:
            worst = -np.inf
            pts = self.points
            for s in range(0, len(self), 512):
                block = slice(s, min(s + 512, len(self)))
                dots = self.normals[block] @ pts.T  # (b, N)
                own = np.einsum("ij,ij->i", self.normals[block], pts[block])
                worst = max(worst, float((dots - own[:, None]).max()))
            report["max_supporting_violation"] = worst
        ok = (report["max_gauge_deviation"] <= tol
              and area > 0.0
              and report["max_symmetry_gap"] <= 10.0 * tol)
        if full:
            ok = ok and report["max_supporting_violation"] <= tol
        report["ok"] = bool(ok)
        return report


def boundary_atlas(norm: PlanarNorm, n_samples=4096, atlas_tol=1e-6) -> BoundaryAtlas:
    """Build a counterclockwise boundary atlas by radial sampling.

    Uniform angles (valid for every norm by 1-homogeneity of the gauge);
    for polygon norms the vertices are inserted exactly and edge samples
    carry the exact edge normal.  Rejects ``n_samples < 64``.
    """
    n_samples = int(n_samples)
    if n_samples < 64:
        raise ValueError("n_samples must be >= 64 (quadrature too coarse)")
    base = np.arange(n_samples) * (TWO_PI / n_samples)

    if norm.spec.kind == "polygon":
        return _polygon_atlas(norm, base, atlas_tol)

    points = norm.boundary_point(base)
    tangents = _normalize_rows(np.roll(points, -1, axis=0) - np.roll(points, 1, axis=0))
    normals = rot90_inv(tangents)
    return BoundaryAtlas(points, base, tangents, normals, norm.gauge, atlas_tol,
                         norm.is_smooth, norm.strictly_convex)


def _polygon_atlas(norm, base, atlas_tol):
    poly = norm._poly
    va = poly.vertex_angles                      # ascending in (-pi, pi]
    nv = len(va)
    va_mod = np.mod(va, TWO_PI)

    # drop base angles that collide with a vertex direction
    dmin = np.min(np.abs(np.mod(base[:, None] - va_mod[None, :] + math.pi, TWO_PI) - math.pi),
                  axis=1)
    base = base[dmin > 1e-12]

    theta = np.concatenate([base, va_mod])
    is_vertex = np.concatenate([np.zeros(len(base), bool), np.ones(nv, bool)])
    vertex_id = np.concatenate([np.full(len(base), -1), np.arange(nv)])
    order = np.argsort(theta, kind="stable")
    theta, is_vertex, vertex_id = theta[order], is_vertex[order], vertex_id[order]

    points = norm.boundary_point(theta)
    points[is_vertex] = poly.vertices[vertex_id[is_vertex]]

    # edge containing each sample: edge k spans [va_k, va_{k+1}) ccw
    rel = np.mod(theta - va[0], TWO_PI)
    va_rel = np.mod(va - va[0], TWO_PI)
    edge = np.clip(np.searchsorted(va_rel, rel + 1e-13, side="right") - 1, 0, nv - 1)
    normals = poly.edge_normals[edge].copy()

    # vertex convention: angular midpoint of the adjacent edge normals
    for j in np.where(is_vertex)[0]:
        k = vertex_id[j]
        normals[j] = _normalize_rows(
            (poly.edge_normals[(k - 1) % nv] + poly.edge_normals[k])[None, :])[0]
    tangents = rot90(normals)

    return BoundaryAtlas(points, theta, tangents, normals, norm.gauge, atlas_tol,
                         norm.is_smooth, norm.strictly_convex, 0, is_vertex)


# ---------------------------------------------------------------------------
# Radial maps and convex cones
# ---------------------------------------------------------------------------


def radial_project(norm: PlanarNorm, x):
    """p_B(x) = x / j_B(x), the radial projection onto the unit sphere."""
    x = np.asarray(x, dtype=float)
    g = np.asarray(norm.gauge(x))
    if np.any(g == 0.0):
        raise ValueError("radial_project is undefined at x = 0")
    return x / g[..., None]


def radial_symmetry(norm: PlanarNorm, x):
    """s_B(x) = j_B(x) p_B(-x); equals -x exactly when B is symmetric."""
    x = np.asarray(x, dtype=float)
    g = np.asarray(norm.gauge(x))
    if np.any(g == 0.0):
        raise ValueError("radial_symmetry is undefined at x = 0")
    return g[..., None] * radial_project(norm, -x)


@dataclass(frozen=True)
class Cone:
    """Convex cone C(u, v) = {a u + b v : a, b >= 0}, u and v non-collinear."""

    u: tuple
    v: tuple

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float)
        v = np.asarray(self.v, dtype=float)
        nu, nv = np.linalg.norm(u), np.linalg.norm(v)
        if nu == 0.0 or nv == 0.0:
            raise ValueError("cone generators must be nonzero")
        if abs(float(_cross2(u, v))) <= 1e-12 * nu * nv:
            raise ValueError("cone generators must not be collinear")
        object.__setattr__(self, "u", (float(u[0]), float(u[1])))
        object.__setattr__(self, "v", (float(v[0]), float(v[1])))


def cone_contains(cone: Cone, w, tol=1e-12):
    """True iff w = a u + b v with a, b >= -tol (generators normalized first)."""
    u = np.asarray(cone.u) / np.linalg.norm(cone.u)
    v = np.asarray(cone.v) / np.linalg.norm(cone.v)
    w = np.asarray(w, dtype=float)
    det = float(_cross2(u, v))
    a = (w[..., 0] * v[1] - w[..., 1] * v[0]) / det
    b = (u[0] * w[..., 1] - u[1] * w[..., 0]) / det
    scale = np.maximum(1.0, np.maximum(np.abs(a), np.abs(b)))
    return np.logical_and(a >= -tol * scale, b >= -tol * scale)


# Functional wrappers mirroring the operation names used around the library.

def gauge(norm: PlanarNorm, x):
    return norm.gauge(x)


def dual_norm(norm: PlanarNorm, x):
    return norm.dual_gauge(x)


def atlas_perp(atlas: BoundaryAtlas) -> BoundaryAtlas:
    return atlas.perp()


def normal_at(atlas: BoundaryAtlas, x):
    return atlas.normal_at(x)


def inverse_normal(atlas: BoundaryAtlas, u, corner_ok=False):
    return atlas.inverse_normal(u, corner_ok=corner_ok)
