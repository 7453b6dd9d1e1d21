"""Surface quadrature, support points, caps, omega, and tangency checks."""

import numpy as np
import pytest

from brlab.fitting import geometric_grid, loglog_slope
from brlab.gauge import Gauge, GaugeError
from brlab.surface import (ConvexSurface, angle_height_ratio,
                           cap_comparability_report, cap_doubling_report,
                           direction_perturbation_bound, omega_transfer_report,
                           support_shift_report)

M = 2 ** 14  # enough boundary samples for module-level checks


@pytest.fixture(scope="module")
def circle():
    return ConvexSurface.from_gauge(Gauge.euclidean(2), M)


@pytest.fixture(scope="module")
def ell4():
    return ConvexSurface.from_gauge(Gauge.ell(4), M)


def test_total_measure_circle(circle):
    assert circle.total_measure == pytest.approx(2 * np.pi, rel=1e-10)
    assert circle.chord_length_measure() == pytest.approx(
        circle.total_measure, rel=1e-8)


def test_normals_outward_unit(circle, ell4):
    for s in (circle, ell4):
        norms = np.linalg.norm(s.normals, axis=1)
        assert np.max(np.abs(norms - 1)) < 1e-12
        assert np.min(np.einsum("ij,ij->i", s.normals, s.points)) > 0


def test_support_point_circle(circle):
    pt, h = circle.support_point(np.array([0.0, 1.0]))
    assert np.allclose(pt, [0.0, 1.0], atol=1e-9)
    assert h == pytest.approx(1.0, abs=1e-12)


def test_support_point_ell4_axis(ell4):
    pt, _ = ell4.support_point(np.array([1.0, 0.0]))
    assert np.allclose(pt, [1.0, 0.0], atol=1e-9)


def test_support_point_ell4_diagonal_brute_force(ell4):
    # brute-force argmax over a fine fresh sampling is the oracle
    d = np.array([1.0, 1.0]) / np.sqrt(2)
    phi = np.arange(10 ** 6) * (2 * np.pi / 10 ** 6)
    u = np.stack([np.cos(phi), np.sin(phi)], axis=-1)
    bd = u / Gauge.ell(4)(u)[:, None]
    oracle = bd[np.argmax(bd @ d)]
    pt, _ = ell4.support_point(d)
    assert np.linalg.norm(pt - oracle) < 1e-4


def test_gauss_map_round_trip(ell4):
    rng = np.random.default_rng(0)
    for i in rng.integers(0, M, 25):
        pt, _ = ell4.support_point(ell4.normals[i])
        assert np.linalg.norm(pt - ell4.points[i]) < 1e-3


def test_cap_full_circle(circle):
    cap = circle.cap_in_direction(np.array([1.0, 0.0]), 2.0)
    assert cap.measure == pytest.approx(2 * np.pi, rel=1e-3)
    m = circle.cap_measures(np.array([1.0, 0.0]), [2.0])[0]
    assert m == pytest.approx(2 * np.pi, rel=1e-12)


def test_cap_small_height_arc_length(circle):
    # height s caps the circle along an arc of length 2*arccos(1-s)
    for r in (64.0, 1024.0, 4096.0):
        m = circle.cap_measures(np.array([0.6, 0.8]), [1.0 / r])[0]
        assert m == pytest.approx(2 * np.arccos(1 - 1 / r), rel=1e-4)
    m = circle.cap_measures(np.array([1.0, 0.0]), [1 / 4096.0])[0]
    assert m * np.sqrt(4096.0) == pytest.approx(2 * np.sqrt(2), rel=0.01)


def test_cap_membership_monotone(circle):
    cap1 = circle.cap_in_direction(np.array([0.0, 1.0]), 0.05)
    cap2 = circle.cap_in_direction(np.array([0.0, 1.0]), 0.2)
    assert set(cap1.member_indices) <= set(cap2.member_indices)
    assert cap1.measure <= cap2.measure <= circle.total_measure


def test_cap_empty_flag(circle):
    # center between quadrature nodes; below the node-to-plane gap the cap
    # catches no sample and is flagged empty
    half_step = np.pi / M
    d = np.array([np.cos(half_step), np.sin(half_step)])
    cap = circle.cap_in_direction(d, 1e-12)
    assert cap.empty and cap.measure == 0.0


def test_cap_height_rejects_nonpositive(circle):
    with pytest.raises(GaugeError):
        circle.cap_at_index(0, -0.1)


def test_omega_circle_constant(circle):
    prof = circle.omega_profile(np.linspace(0, 2 * np.pi, 64, endpoint=False))
    spread = prof.values.max() - prof.values.min()
    assert spread < 1e-6
    assert prof.values.max() == pytest.approx(2 * np.pi * np.sqrt(1.5), rel=1e-4)


def test_omega_ell4_blowup_slope(ell4):
    r_grid = geometric_grid(2 ** -4, 2 ** 16, 8)
    d = np.exp(np.linspace(np.log(2 ** -12), np.log(2 ** -8), 8))
    prof = ell4.omega_profile(d, r_grid)
    assert not prof.edge_saturated.any()
    slope = loglog_slope(ell4.distance_to_degeneracy(d), prof.values)
    assert slope == pytest.approx(-1 / 3, abs=0.05)


def test_omega_integrals_finite(ell4):
    prof = ell4.omega_profile()
    for p in (0.6, 0.9):
        val = ell4.omega_integral(prof, p)
        assert np.isfinite(val) and val > 0


def test_degenerate_normals_ell4(ell4):
    angles = ell4.degenerate_normal_angles()
    assert angles.size > 0
    # the four flat points have axis normals
    targets = np.array([0.0, np.pi / 2, np.pi, -np.pi / 2])
    for t in targets:
        assert np.min(np.abs(np.angle(np.exp(1j * (angles - t))))) < 1e-3
    d = ell4.distance_to_degeneracy(np.array([0.3]))
    assert d[0] == pytest.approx(0.3, abs=1e-3)


def test_cap_doubling(circle, ell4):
    rng = np.random.default_rng(0)
    rep_c = cap_doubling_report(circle, rng, finite_type_k=2)
    assert rep_c["upper_constant"] < 4.0
    rep_e = cap_doubling_report(ell4, np.random.default_rng(1), finite_type_k=4)
    assert rep_e["upper_constant"] < 8.0
    assert rep_e["down_constant"] < 8.0
    assert rep_e["down_lower_constant"] > 0.05


def test_cap_comparability(circle, ell4):
    rng = np.random.default_rng(2)
    rep = cap_comparability_report(circle, rng)
    assert rep["max_ratio"] == pytest.approx(1.0, abs=1e-6)
    assert rep["min_ratio"] == pytest.approx(1.0, abs=1e-6)
    rep4 = cap_comparability_report(ell4, np.random.default_rng(3))
    assert rep4["max_ratio"] < 30.0
    assert rep4["min_ratio"] > 1.0 / 30.0


def test_finite_type_orders(circle, ell4):
    assert circle.finite_type_order(np.array([0.3, 0.9])).order == 2
    assert ell4.finite_type_order(np.array([1.0, 0.0])).order == 4
    assert ell4.finite_type_order(np.array([1.0, 1.0])).order == 2


def test_finite_type_superellipsoid():
    surf = ConvexSurface.from_gauge(Gauge.superellipsoid((4, 4, 2)), 256)
    d = np.array([1.0, 0.0, 0.0])
    assert surf.finite_type_order(d, tangent=np.array([0.0, 1.0, 0.0])).order == 4
    assert surf.finite_type_order(d, tangent=np.array([0.0, 0.0, 1.0])).order == 2


def test_sphere_total_area():
    # lat-long central differences are second order in the grid step
    surf = ConvexSurface.from_gauge(Gauge.euclidean(3), 256)
    assert surf.total_measure == pytest.approx(4 * np.pi, rel=1e-3)
    finer = ConvexSurface.from_gauge(Gauge.euclidean(3), 512)
    err_c = abs(surf.total_measure - 4 * np.pi)
    err_f = abs(finer.total_measure - 4 * np.pi)
    assert err_f < 0.35 * err_c


def test_angle_height_model_quadratic():
    # b=1, m=2, theta0=0.1: gap = tan(0.1)^2/4 vs prediction 0.0025
    ratio = angle_height_ratio(1.0, 2, 0.1)
    gap = (np.tan(0.1) / 2) ** 2
    assert ratio == pytest.approx(gap / 0.0025, rel=1e-10)
    assert ratio == pytest.approx(1.0, abs=0.02)


def test_angle_height_small_angle_quartic():
    # m=4: gap / theta^{4/3} -> 4^{-4/3}
    for th in (1e-3, 1e-4):
        ratio = angle_height_ratio(1.0, 4, th)
        assert ratio == pytest.approx(1.0, abs=0.01)


def test_angle_height_b_scaling():
    th = 1e-4
    g1 = angle_height_ratio(1.0, 4, th)
    g2 = angle_height_ratio(2.0, 4, th)
    # prediction already carries |b|^{-1/(m-1)}, so ratios stay ~1
    assert g2 / g1 == pytest.approx(1.0, abs=0.01)


def test_angle_height_sweep_bracket():
    for m in (2, 3, 4, 6):
        for th in (0.3, 0.1, 0.03, 0.01):
            assert 0.25 <= angle_height_ratio(1.0, m, th) <= 4.0


def test_angle_height_unattainable():
    with pytest.raises(GaugeError):
        angle_height_ratio(1e-4, 2, 1.0, d=0.1)


def _pairs(rng, count=120):
    s = rng.uniform(0.2, 1.0, count)
    ydir = rng.normal(size=(count, 2))
    ydir /= np.linalg.norm(ydir, axis=1, keepdims=True)
    y = ydir * (s * rng.uniform(0.05, 0.999, count))[:, None]
    xdir = rng.normal(size=(count, 2))
    xdir /= np.linalg.norm(xdir, axis=1, keepdims=True)
    x = xdir * (s * rng.uniform(2.001, 50.0, count))[:, None]
    return x, y


def test_direction_perturbation_inequality():
    rng = np.random.default_rng(5)
    x, y = _pairs(rng)
    assert np.max(direction_perturbation_bound(x, y)) <= 1.0
    # |x| = 4|y| pins the bound at 1/2
    x0 = np.array([[4.0, 0.0]])
    y0 = np.array([[0.0, 1.0]])
    lhs = np.linalg.norm((x0 - y0) / np.linalg.norm(x0 - y0) - x0 / 4.0)
    assert lhs <= 0.5


def test_support_shift_circle(circle):
    rng = np.random.default_rng(6)
    x, y = _pairs(rng)
    rep = support_shift_report(circle, x, y)
    # circle oracle: gap = 1 - cos(angle) with angle <= 2|y|/|x|
    assert rep["max_scaled_gap"] <= 2.0 + 0.1
    assert rep["max_direction_ratio"] <= 1.0


def test_support_shift_zero_y(circle):
    x = np.array([[3.0, 1.0], [-2.5, 4.0]])
    y = np.zeros((2, 2))
    rep = support_shift_report(circle, x, y)
    assert rep["max_scaled_gap"] <= 1e-10


def test_omega_transfer(circle, ell4):
    rng = np.random.default_rng(7)
    x, y = _pairs(rng)
    prof_c = circle.omega_profile(np.linspace(0, 2 * np.pi, 256, endpoint=False))
    rep = omega_transfer_report(circle, prof_c, x, y)
    assert rep["max_ratio"] == pytest.approx(1.0, abs=1e-6)
    prof_e = ell4.omega_profile()
    rep4 = omega_transfer_report(ell4, prof_e, x, y)
    assert rep4["max_ratio"] < 20.0
    rep0 = omega_transfer_report(ell4, prof_e, x, np.zeros_like(x))
    assert rep0["max_ratio"] == pytest.approx(1.0, abs=1e-12)
