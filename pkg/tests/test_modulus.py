import math

import numpy as np
import pytest

from normkinetics import PlanarNorm
from normkinetics.modulus import (
    DegenerateModulusError,
    ModulusCurve,
    curvature,
    curvature_profile,
    elliptic_check,
    fit_power_type,
    graph_power_check,
    local_graph,
    nordlander_check,
    omega,
    omega_curve,
    power_type_grid,
    rho,
    rho_curve,
    sandwich_check,
)


# ---------------------------------------------------------------------------
# independent oracles: dense pair enumeration on the exact boundary
# ---------------------------------------------------------------------------


def brute_omega(norm, delta, n=1500):
    th = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
    pts = norm.boundary_point(th)
    best = np.inf
    for s in range(0, n, 256):
        blk = pts[s:s + 256]
        diff = blk[:, None, :] - pts[None, :, :]
        d = norm.gauge(diff)
        mids = 0.5 * (blk[:, None, :] + pts[None, :, :])
        vals = 1.0 - norm.gauge(mids)
        vals = np.where(d >= delta, vals, np.inf)
        best = min(best, float(vals.min()))
    return best


def brute_rho_euclid(delta, n=3000):
    th = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
    pts = np.stack([np.cos(th), np.sin(th)], axis=-1)
    x = pts[0]  # rotation invariance: one anchor suffices on the circle
    d = np.linalg.norm(pts - x, axis=1)
    vals = (x - pts) @ x
    vals = np.where(d >= delta, vals, np.inf)
    return float(vals.min())


# ---------------------------------------------------------------------------
# omega
# ---------------------------------------------------------------------------


def test_omega_vanishes_at_zero(euclid, l4):
    for n in (euclid, l4):
        assert omega(n, 1e-6) <= 1e-9


def test_omega_euclid_against_brute_force_and_closed_form(euclid):
    # closed form 1 - sqrt(1 - d^2/4) cross-checks the brute-force oracle
    for delta in (0.5, 1.0, 1.6):
        closed = 1.0 - math.sqrt(1.0 - delta**2 / 4.0)
        bf = brute_omega(euclid, delta)
        assert bf == pytest.approx(closed, abs=3e-3)
        val = omega(euclid, delta)
        assert val == pytest.approx(closed, abs=1e-9)
        assert val <= bf + 1e-9  # brute force on a finite set overestimates


def test_omega_l4_against_brute_force(l4):
    for delta in (0.4, 1.0):
        assert omega(l4, delta) == pytest.approx(brute_omega(l4, delta), abs=3e-3)
        assert omega(l4, delta) <= brute_omega(l4, delta) + 1e-9


def test_omega_rounded_square_flat_edges(rounded_square):
    # the dual corners of the l1-with-euclidean-part ball give flat edges;
    # below the edge length midpoints stay on the boundary and omega is 0
    assert omega(rounded_square, 0.3) <= 1e-9
    assert brute_omega(rounded_square, 0.3, n=800) <= 1e-9


def test_omega_square_polygon_zero(square):
    assert omega(square, 1.0) == 0.0


def test_omega_monotone_within_slack(l3):
    curve = omega_curve(l3, np.linspace(0.1, 1.9, 10))
    assert np.all(np.diff(curve.values) >= -1e-3)


def test_omega_scaling_covariance(l3):
    # the definition constrains x, y to the unit sphere of each norm, so the
    # curve is scale free
    deltas = np.array([0.3, 0.8, 1.4])
    base = omega_curve(l3, deltas).values
    scaled = omega_curve(PlanarNorm.scaled(2.5, l3), deltas).values
    assert np.max(np.abs(base - scaled)) < 1e-9


# ---------------------------------------------------------------------------
# rho
# ---------------------------------------------------------------------------


def test_rho_vanishes_at_zero(euclid):
    assert rho(euclid, 1e-6) <= 1e-9


def test_rho_euclid_exact_values(euclid):
    # direct minimization under the supporting-line definition gives
    # 1 - cos(angle) = chord^2/2; note the known closed-form remark
    # 1 - sqrt(1 - d^2) shares only the d^2/2 asymptotics and is NOT
    # asserted at finite separation
    for delta in (0.5, 1.0):
        expected = delta**2 / 2.0
        assert brute_rho_euclid(delta) == pytest.approx(expected, abs=2e-3)
        assert rho(euclid, delta) == pytest.approx(expected, abs=1e-9)
    remark_value = 1.0 - math.sqrt(1.0 - 1.0**2)
    assert remark_value == 1.0  # recorded for reference; differs at delta=1


def test_rho_curve_nondecreasing(l4, square):
    for n in (l4, square):
        c = rho_curve(n, np.linspace(0.1, 1.9, 10))
        assert np.all(np.diff(c.values) >= 0.0)


# ---------------------------------------------------------------------------
# sandwich and euclidean bound
# ---------------------------------------------------------------------------


def test_sandwich_catalogue(euclid, l3, square):
    deltas = np.arange(0.2, 1.9, 0.4)
    for n in (euclid, l3, square):
        rep = sandwich_check(n, deltas)
        assert rep["passed"], rep


def test_sandwich_l4_mid_separation(l4):
    rep = sandwich_check(l4, [0.5])
    assert rep["passed"]
    # the 0.25/0.5 sandwich from the definition, spelled out
    assert rho(l4, 0.25) <= omega(l4, 0.5) + 1e-3
    assert omega(l4, 0.5) <= rho(l4, 0.5) / 2.0 + 1e-3


def test_nordlander_bound(l4, l15, euclid):
    deltas = np.arange(0.2, 1.9, 0.4)
    for n in (l4, l15):
        rep = nordlander_check(n, deltas)
        assert rep["passed"], rep
    rep = nordlander_check(euclid, deltas)
    assert rep["passed"]
    assert np.max(np.abs(np.asarray(rep["margin"]) - rep["slack"])) <= 1e-6  # equality


# ---------------------------------------------------------------------------
# power-type fits
# ---------------------------------------------------------------------------


def test_fit_power_type_euclidean(euclid):
    fit = fit_power_type(omega_curve(euclid, power_type_grid()))
    assert fit.p_hat == pytest.approx(2.0, abs=0.05)
    assert fit.r_squared > 0.999


def test_fit_power_type_lp_clarkson(l15, l3, l4):
    for n, expect in ((l15, 2.0), (l3, 3.0), (l4, 4.0)):
        fit = fit_power_type(omega_curve(n, power_type_grid()))
        assert fit.p_hat == pytest.approx(expect, abs=0.15)


def test_fit_power_type_degenerate(rounded_square):
    curve = omega_curve(rounded_square, power_type_grid())
    with pytest.raises(DegenerateModulusError, match="degenerate modulus"):
        fit_power_type(curve)


def test_fit_requires_enough_samples(euclid):
    curve = ModulusCurve("omega", [0.01, 0.02], [1e-4, 4e-4])
    with pytest.raises(DegenerateModulusError):
        fit_power_type(curve)


def test_modulus_curve_csv_round_trip(tmp_path, euclid):
    curve = omega_curve(euclid, [0.2, 0.7, 1.3])
    path = tmp_path / "omega.csv"
    curve.to_csv(path)
    text = path.read_text().splitlines()
    assert text[0] == "delta,value"
    again = ModulusCurve.from_csv(path, "omega")
    assert np.allclose(again.deltas, curve.deltas)
    assert np.allclose(again.values, curve.values, rtol=1e-11)


# ---------------------------------------------------------------------------
# local graph and curvature
# ---------------------------------------------------------------------------


def test_local_graph_circle(euclid):
    g = local_graph(euclid, np.array([1.0, 0.0]), window=0.8)
    # oracle: the circle graph is b = 1 - sqrt(1 - a^2) >= 0.4 a^2 there
    assert np.allclose(g.b, 1.0 - np.sqrt(1.0 - g.a**2), atol=1e-12)
    assert g.convexity_violation() <= 1e-12
    assert graph_power_check(g, 2.0, 0.4)


def test_local_graph_l4_flat_axis(l4):
    x = np.array([1.0, 0.0])
    g = local_graph(l4, x, window=0.3)
    assert not graph_power_check(g, 2.0, 0.05)  # quartic contact beats a t^2 bound
    assert graph_power_check(g, 4.0, 0.2)


def test_local_graph_l4_diagonal(l4):
    x = np.array([2.0 ** -0.25, 2.0 ** -0.25])
    g = local_graph(l4, x, window=0.3)
    assert graph_power_check(g, 2.0, 0.05)  # positive curvature there


def test_local_graph_window_limit(euclid):
    with pytest.raises(ValueError, match="half the boundary"):
        local_graph(euclid, np.array([1.0, 0.0]), window=3.5)


def test_curvature_circle(euclid):
    prof = curvature_profile(euclid.atlas())
    assert np.max(np.abs(prof - 1.0)) <= 1e-4
    assert curvature(euclid.atlas(), np.array([0.0, 1.0])) == pytest.approx(1.0, abs=1e-6)
    assert elliptic_check(euclid)


def test_curvature_l4_flat_axes(l4):
    prof = curvature_profile(l4.atlas())
    assert prof.min() < 1e-4
    assert not elliptic_check(l4)


def test_curvature_l15_elliptic(l15):
    assert elliptic_check(l15)
    fit = fit_power_type(omega_curve(l15, power_type_grid()))
    assert fit.p_hat == pytest.approx(2.0, abs=0.15)  # cross-check with the fit


def test_curvature_rejects_polygon(square):
    with pytest.raises(ValueError, match="polygon"):
        curvature_profile(square.atlas())
