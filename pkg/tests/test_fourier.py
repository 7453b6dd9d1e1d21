"""Grid transforms, kernel synthesis, oracle agreement, and field export."""

import numpy as np
import pytest
from scipy.special import j0 as scipy_j0

from brlab.decomp import AngularPartition, PieceMultiplier, radial_pieces
from brlab.fourier import (GridSpec, SampledField, UnderResolvedGridError,
                           bessel_j0_integral, decay_report, envelope_lp_mass,
                           envelope_report, radial_kernel_oracle, read_field,
                           ray_envelope, synthesize, synthesize_piece_kernel,
                           write_field)
from brlab.gauge import Gauge, auxiliary_index
from brlab.surface import ConvexSurface


@pytest.fixture(scope="module")
def grid():
    return GridSpec(n=2, n_side=256, half_width=16.0)


@pytest.fixture(scope="module")
def circle_surface():
    return ConvexSurface.from_gauge(Gauge.euclidean(2), 2 ** 14)


def test_grid_spacing(grid):
    assert grid.dx == pytest.approx(0.125)
    assert grid.dxi == pytest.approx(np.pi / 16)
    assert grid.nyquist == pytest.approx(np.pi / grid.dx)
    with pytest.raises(ValueError):
        GridSpec(n=2, n_side=300, half_width=4.0)


def test_round_trip_and_plancherel(grid):
    rng = np.random.default_rng(0)
    v = rng.normal(size=grid.shape) + 1j * rng.normal(size=grid.shape)
    f = SampledField(v, grid, "space")
    fhat = f.to_frequency()
    back = fhat.to_space()
    assert np.max(np.abs(back.values - v)) <= 1e-10 * np.max(np.abs(v))
    assert abs(f.energy() - fhat.energy()) <= 1e-10 * f.energy()


def test_gaussian_closed_form(grid):
    mesh = grid.mesh("space")
    f = SampledField(np.exp(-(mesh[0] ** 2 + mesh[1] ** 2) / 2).astype(complex),
                     grid, "space")
    fh = f.to_frequency()
    mf = grid.mesh("frequency")
    expected = 2 * np.pi * np.exp(-(mf[0] ** 2 + mf[1] ** 2) / 2)
    assert np.max(np.abs(fh.values - expected)) < 1e-12


def test_zero_multiplier(grid):
    f = synthesize(lambda pts: np.zeros(pts.shape[:-1]), grid)
    assert f.max_abs() == 0.0


def test_real_even_multiplier_gives_real_kernel(grid):
    gauge = Gauge.ell(4)
    f = synthesize(lambda pts: np.where(gauge(pts) < 1, 1 - gauge(pts), 0.0) ** 2,
                   grid)
    assert np.max(np.abs(f.values.imag)) <= 1e-10 * f.max_abs()
    # and even under x -> -x on the open grid (row/col 0 have no mirror)
    v = f.values[1:, 1:]
    assert np.max(np.abs(v - v[::-1, ::-1])) <= 1e-10 * f.max_abs()


def test_bessel_j0_against_scipy():
    x = np.linspace(0.0, 300.0, 3001)
    assert np.max(np.abs(bessel_j0_integral(x) - scipy_j0(x))) < 1e-11


def test_oracle_agreement_moderate_grid():
    gauge = Gauge.euclidean(2)
    delta = 1.5
    grid = GridSpec(n=2, n_side=512, half_width=64.0)
    field = synthesize(
        lambda pts: np.where(gauge(pts) < 1, 1 - gauge(pts), 0.0) ** delta, grid)
    c = grid.n_side // 2
    ii = np.arange(0, 65, 4)
    fft_vals = field.values[c + ii, c].real
    oracle = radial_kernel_oracle(
        lambda r: np.where(r < 1, 1 - r, 0.0) ** delta, ii * grid.dx)
    sup = np.max(np.abs(oracle))
    assert np.max(np.abs(fft_vals - oracle)) <= 1e-3 * sup


def test_synthesize_resolution_refusal():
    grid = GridSpec(n=2, n_side=256, half_width=16.0)
    with pytest.raises(UnderResolvedGridError):
        synthesize(lambda pts: np.zeros(pts.shape[:-1]), grid, k=6)


def test_piece_kernel_bundle(circle_surface):
    pieces = radial_pieces(1.5, 3)
    part = AngularPartition(circle_surface, 3)
    pm = PieceMultiplier(pieces[3], part, 0)
    grid = GridSpec(n=2, n_side=512, half_width=np.pi * 2 ** 6)
    bundle = synthesize_piece_kernel(pm, grid)
    assert bundle.predicted_scale == pytest.approx(2.0 ** (-3 * 3))
    rep = decay_report(bundle)
    assert rep["normalized_constant"] < 100.0
    assert rep["width_ratio"] > 1.0
    p_aux = auxiliary_index(1.5, 2)
    env = envelope_report(bundle, p_aux)
    assert env["joint_constant"] < 1e3
    assert env["gradient_to_value"] < 10.0


def test_envelope_mass_translation_invariant():
    grid = GridSpec(n=2, n_side=512, half_width=64.0)
    e0 = np.array([1.0, 0.0])
    tang = [np.array([0.0, 1.0])]
    base = envelope_lp_mass(grid, e0, tang, 2 / 3, 0.4)
    shifted = envelope_lp_mass(grid, e0, tang, 2 / 3, 0.4,
                               center=np.array([7.0, -3.0]))
    assert shifted == pytest.approx(base, rel=0.01)


def test_ray_envelope_power_law():
    # a synthetic radial power field gives back its slope
    grid = GridSpec(n=2, n_side=512, half_width=128.0)
    mesh = grid.mesh("space")
    r = np.sqrt(mesh[0] ** 2 + mesh[1] ** 2)
    vals = np.cos(3 * r) / (1 + r) ** 2
    f = SampledField(vals.astype(complex), grid, "space")
    r_env, v_env, kept = ray_envelope(f, np.array([1.0, 0.0]), 4.0, 32.0)
    from brlab.fitting import loglog_slope
    assert loglog_slope(r_env[kept], v_env[kept]) == pytest.approx(-2.0, abs=0.25)


def test_field_binary_round_trip(tmp_path, grid):
    rng = np.random.default_rng(5)
    f = SampledField(rng.normal(size=grid.shape)
                     + 1j * rng.normal(size=grid.shape), grid, "space")
    path = tmp_path / "field.bin"
    write_field(f, path)
    g = read_field(path)
    assert g.domain == "space"
    assert g.grid == grid
    assert np.array_equal(g.values, f.values)
    # documented layout: 4 magic + 4 + 4 + 8 + 1 header bytes, then 16/sample
    assert path.stat().st_size == 21 + 16 * grid.n_side ** 2
