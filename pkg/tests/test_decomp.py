"""Dyadic bump, radial shell pieces, and angular partitions."""

import numpy as np
import pytest

from brlab.decomp import (AngularPartition, DyadicBump, PieceMultiplier,
                          assemble_radial, radial_pieces)
from brlab.fitting import geometric_grid, log2_slope
from brlab.gauge import Gauge
from brlab.surface import ConvexSurface


@pytest.fixture(scope="module")
def bump():
    return DyadicBump()


@pytest.fixture(scope="module")
def circle():
    return ConvexSurface.from_gauge(Gauge.euclidean(2), 2 ** 14)


def _sphere_samples(surface, count, seed=0):
    rng = np.random.default_rng(seed)
    a = rng.uniform(0, 2 * np.pi, count)
    return surface.gauge.boundary_point(np.stack([np.cos(a), np.sin(a)], -1))


def test_bump_support(bump):
    t = np.array([0.25, 0.5, 0.51, 1.99, 2.0, 3.0])
    v = bump(t)
    assert v[0] == v[1] == v[4] == v[5] == 0.0
    assert v[2] > 0 and v[3] > 0


def test_bump_partition_identity(bump):
    probe = np.concatenate([geometric_grid(2.0 ** -20, 2.0 ** 20, 8),
                            np.linspace(2.0 ** -20, 4.0, 10 ** 5)])
    assert bump.partition_defect(probe) <= 1e-12


def test_bump_values_at_one(bump):
    assert bump(np.array([1.0]))[0] == pytest.approx(1.0, abs=1e-15)
    # t = 0.4: phi(2t) + phi(t) = 1 with phi(t) = 0 below the support
    assert bump(np.array([0.4]))[0] == 0.0
    assert bump(np.array([0.8]))[0] == pytest.approx(
        1.0 - bump(np.array([1.6]))[0], abs=1e-15)


def test_bump_smoothness_probe(bump):
    # sixth finite differences converge under halving the step, the signature
    # of a genuinely smooth profile (jumps would scale like h**-6)
    t = np.array([0.7, 0.9, 1.0, 1.3, 1.6])

    def d6(h):
        vals = {k: bump(t + k * h) for k in range(-3, 4)}
        return (vals[3] - 6 * vals[2] + 15 * vals[1] - 20 * vals[0]
                + 15 * vals[-1] - 6 * vals[-2] + vals[-3]) / h ** 6

    coarse, fine = d6(4e-3), d6(2e-3)
    assert np.all(np.abs(fine - coarse) <= 0.05 * np.abs(fine) + 2e3)
    assert np.all(np.isfinite(fine))


def test_radial_piece_supports(bump):
    pieces = radial_pieces(1.5, 6, bump)
    u = np.linspace(0, 1, 400001)
    for k in (1, 3, 6):
        vals = pieces[k].from_rho(1.0 - u)
        live = u[vals > 0]
        assert live.min() >= 2.0 ** (-k - 2)
        assert live.max() <= 2.0 ** (-k)
        assert vals.max() <= 2.0 ** (-k * 1.5)


def test_radial_reconstruction_error(bump):
    rho = np.linspace(0.0, 1.25, 500001)
    for k_max, delta in ((6, 1.5), (10, 0.75)):
        total = assemble_radial(rho, delta, k_max, bump)
        target = np.where(rho < 1, 1 - rho, 0.0) ** delta
        assert np.max(np.abs(total - target)) <= 2.0 ** (-k_max * delta)


def test_radial_exact_at_half(bump):
    # 1 - rho = 1/2 sits in finitely many shells: the sum is exact
    val = assemble_radial(np.array([0.5]), 1.5, 4, bump)[0]
    assert val == pytest.approx(0.5 ** 1.5, abs=1e-15)
    assert assemble_radial(np.array([1.0, 1.3]), 1.5, 4, bump).max() == 0.0


def test_piece_zero_for_negative_delta():
    with pytest.raises(ValueError):
        radial_pieces(0.0, 3)


def test_partition_identity_and_support(circle):
    zeta = _sphere_samples(circle, 10 ** 4)
    for k in (1, 4, 7, 10):
        part = AngularPartition(circle, k)
        assert part.identity_defect(zeta) <= 1e-10
        assert part.support_defect(zeta) == 0.0


def test_partition_count_growth(circle):
    counts = [AngularPartition(circle, k).size for k in range(2, 11)]
    slope = log2_slope(range(2, 11), counts)
    assert slope == pytest.approx(0.5, abs=0.1)
    # greedy covering at radius 1/2 on the circle
    assert 7 <= counts[0] <= 26


def test_partition_window_floor_and_overlap(circle):
    zeta = _sphere_samples(circle, 4000, seed=3)
    floors = []
    overlaps = []
    for k in (2, 5, 8):
        part = AngularPartition(circle, k)
        floors.append(part.inner_cap_floor())
        overlaps.append(part.max_overlap(zeta))
    assert min(floors) >= 0.15          # windows stay thick on their caps
    assert max(overlaps) <= 8           # bounded overlap, stable in k


def test_partition_derivative_growth(circle):
    ks = [4, 5, 6, 7, 8]
    grads = [AngularPartition(circle, k).derivative_max(1, np.random.default_rng(k))
             for k in ks]
    assert log2_slope(ks, grads) == pytest.approx(0.5, abs=0.15)
    # orders two and three normalized by 2^{|a| k/2} stay bounded
    for k in (4, 6):
        part = AngularPartition(circle, k)
        for order in (2, 3):
            raw = part.derivative_max(order, np.random.default_rng(10 + k))
            assert raw / 2.0 ** (order * k / 2.0) < 50.0


def test_piece_multiplier_support_and_sum(circle):
    pieces = radial_pieces(1.5, 4)
    k = 3
    part = AngularPartition(circle, k)
    rng = np.random.default_rng(0)
    pts = rng.normal(size=(20000, 2))
    rho = circle.gauge(pts)
    total = np.zeros(len(pts))
    for l in range(part.size):
        pm = PieceMultiplier(pieces[k], part, l)
        vals = pm(pts)
        outside_shell = (1 - rho <= 2.0 ** (-k - 2)) | (1 - rho >= 2.0 ** -k)
        assert np.all(vals[outside_shell] == 0.0)
        total += vals
    target = pieces[k].from_rho(rho)
    assert np.max(np.abs(total - target)) <= 1e-10


def test_piece_multiplier_k_mismatch(circle):
    pieces = radial_pieces(1.5, 4)
    part = AngularPartition(circle, 3)
    with pytest.raises(ValueError):
        PieceMultiplier(pieces[2], part, 0)


def test_partition_k_zero_rejected(circle):
    with pytest.raises(ValueError):
        AngularPartition(circle, 0)


def test_full_multiplier_reconstruction_small(circle):
    # radial times angular pieces resum to the full multiplier on a grid
    delta, k_max = 1.5, 6
    pieces = radial_pieces(delta, k_max)
    rng = np.random.default_rng(1)
    pts = rng.normal(size=(8000, 2)) * 0.7
    rho = circle.gauge(pts)
    total = pieces[0].from_rho(rho)
    for k in range(1, k_max + 1):
        part = AngularPartition(circle, k)
        for l in range(part.size):
            total = total + PieceMultiplier(pieces[k], part, l)(pts)
    target = np.where(rho < 1, 1 - rho, 0.0) ** delta
    assert np.max(np.abs(total - target)) <= 2.0 ** (-k_max * delta) + 1e-10
