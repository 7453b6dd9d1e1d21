"""Summability means, maximal fields, piece operators, and covariance."""

import numpy as np
import pytest

from brlab import hardy
from brlab.decomp import AngularPartition, PieceMultiplier, radial_pieces
from brlab.fourier import GridSpec, SampledField
from brlab.gauge import Gauge
from brlab.riesz import (TGrid, default_tgrid, dilation_covariance_report,
                         dilation_limit, inside_ball_constant, maximal,
                         outside_ball_report, piece_maximal, riesz_mean,
                         strong_moment_order, weak_moment_order)
from brlab.surface import ConvexSurface

GAUGE = Gauge.euclidean(2)


@pytest.fixture(scope="module")
def grid():
    return GridSpec(n=2, n_side=512, half_width=32.0)


@pytest.fixture(scope="module")
def atom(grid):
    return hardy.make_atom(grid, 2 / 3, 1, np.zeros(2), 1.0, seed=0)


def test_tgrid_contract():
    tg = TGrid(0.125, 8.0, 8)
    vals = tg.values
    assert vals[0] == 0.125 and vals[-1] == pytest.approx(8.0)
    assert len(vals) == 49
    assert tg.refined().per_octave == 16
    with pytest.raises(ValueError):
        TGrid(0.125, 8.0, 4)
    with pytest.raises(ValueError):
        TGrid(2.0, 1.0, 8)


def test_moment_orders():
    assert weak_moment_order(2 / 3, 2) == 1
    assert weak_moment_order(0.7, 2) == 1      # ceil(6/7)
    assert weak_moment_order(0.5, 2) == 2
    assert strong_moment_order(7 / 4, 2) == 1  # floor(n(1/p'-1)) at p'=8/13


def test_zero_input_gives_zero(grid):
    zero = SampledField(np.zeros(grid.shape, complex), grid, "space")
    tg = TGrid(0.5, 2.0, 8)
    mf = maximal(zero, GAUGE, 1.5, tg)
    assert np.max(mf.values) == 0.0


def test_riesz_mean_vanishing_multiplier(grid, atom):
    # bandpass input supported where rho >= t gives an exactly zero mean
    fhat = atom.field.to_frequency()
    rho = GAUGE(np.stack(np.meshgrid(grid.axis("frequency"),
                                     grid.axis("frequency"),
                                     indexing="ij"), axis=-1))
    masked = np.where(rho >= 0.5, fhat.values, 0.0)
    high = SampledField(masked, grid, "frequency").to_space()
    out = riesz_mean(high, GAUGE, 1.5, 0.5)
    assert out.max_abs() <= 1e-14 * atom.field.max_abs()


def test_riesz_mean_linearity(grid, atom):
    other = hardy.make_atom(grid, 2 / 3, 1, np.zeros(2), 1.0, seed=5)
    combo = SampledField(2.0 * atom.field.values - 0.5 * other.field.values,
                         grid, "space")
    lhs = riesz_mean(combo, GAUGE, 1.5, 3.0).values
    rhs = 2.0 * riesz_mean(atom.field, GAUGE, 1.5, 3.0).values \
        - 0.5 * riesz_mean(other.field, GAUGE, 1.5, 3.0).values
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * np.max(np.abs(rhs))


def test_riesz_mean_large_t_limit():
    # effectively band-limited smooth input: the mean converges to it in L2
    # as t grows; probe at t = 2^6 times the effective band
    fine = GridSpec(n=2, n_side=1024, half_width=8.0)
    mesh = fine.mesh("space")
    f = SampledField(np.exp(-(mesh[0] ** 2 + mesh[1] ** 2) / 2).astype(complex),
                     fine, "space")
    band = 2.5
    t = 2 ** 6 * band
    assert t < dilation_limit(GAUGE, fine)
    out = riesz_mean(f, GAUGE, 1.5, t)
    rel = np.sqrt(np.sum(np.abs(out.values - f.values) ** 2)
                  / np.sum(np.abs(f.values) ** 2))
    assert rel <= 1e-2


def test_riesz_mean_refusal(grid, atom):
    with pytest.raises(ValueError):
        riesz_mean(atom.field, GAUGE, 1.5, 10.0 * dilation_limit(GAUGE, grid))


def test_maximal_dominates_every_t(grid, atom):
    tg = TGrid(0.25, 4.0, 8)
    mf = maximal(atom.field, GAUGE, 1.5, tg)
    for t in tg.values[::8]:
        single = np.abs(riesz_mean(atom.field, GAUGE, 1.5, t).values)
        assert np.all(mf.values >= single - 1e-14)
    assert mf.argmax_t.max() < len(tg.values)


def test_maximal_inside_ball_l1_bound(grid, atom):
    # on the doubled ball the maximal field is controlled by the kernel's
    # L1 mass times the atom's sup bound
    from brlab.fourier import synthesize
    tg = default_tgrid(GAUGE, grid, center=1.0, octaves_down=4, octaves_up=4)
    mf = maximal(atom.field, GAUGE, 1.5, tg)
    kernel = synthesize(
        lambda pts: np.where(GAUGE(pts) < 1, 1 - GAUGE(pts), 0.0) ** 1.5,
        GridSpec(n=2, n_side=1024, half_width=128.0))
    l1 = np.sum(np.abs(kernel.values)) * kernel.grid.cell_volume
    mesh = grid.mesh("space")
    inside = np.sqrt(mesh[0] ** 2 + mesh[1] ** 2) <= 2.0
    assert np.max(mf.values[inside]) <= l1 * atom.sup_bound * 1.05
    assert inside_ball_constant(mf, atom, 2 / 3) < np.inf


def test_piece_maximal_and_outside_report(grid, atom):
    surf = ConvexSurface.from_gauge(GAUGE, 2 ** 14)
    pieces = radial_pieces(1.75, 3)
    part = AngularPartition(surf, 2)
    pm = PieceMultiplier(pieces[2], part, 0)
    tg = TGrid(1.0, 2.0, 8)
    mf = piece_maximal(atom.field, pm, tg)
    assert np.max(mf.values) > 0
    rep = outside_ball_report(mf, atom, 2 / 3, 8 / 13, pm)
    assert np.isfinite(rep["outside_lp_mass_p"])
    assert rep["envelope_constant"] < 10.0


def test_dilation_covariance_exact():
    rep = dilation_covariance_report(GAUGE, 2 / 3, 1.5, scale=4.0, seed=0,
                                     n_side=256)
    assert rep["max_relative_deviation"] <= 0.02


def test_translation_covariance(grid):
    # translating the atom center moves the maximal field without changing
    # its quasinorm beyond interpolation noise
    tg = TGrid(0.5, 2.0, 8)
    a0 = hardy.make_atom(grid, 2 / 3, 1, np.zeros(2), 1.0, seed=2)
    a1 = hardy.make_atom(grid, 2 / 3, 1, np.array([5.0, -3.0]), 1.0, seed=2)
    q0 = hardy.weak_quasinorm(
        maximal(a0.field, GAUGE, 1.5, tg).values, 2 / 3, grid.cell_volume)
    q1 = hardy.weak_quasinorm(
        maximal(a1.field, GAUGE, 1.5, tg).values, 2 / 3, grid.cell_volume)
    assert q1.quasinorm == pytest.approx(q0.quasinorm, rel=0.01)
