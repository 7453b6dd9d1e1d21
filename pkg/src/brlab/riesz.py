"""Summability means for homogeneous multipliers and maximal-operator labs.

The mean of index delta at scale t multiplies the transform of f by
(1 - rho(xi)/t)_+**delta; the maximal field takes the pointwise sup of the
mean's modulus over a dyadic t-grid.  Experiment drivers measure weak-type
and strong-type constants over seeded atom ensembles and the per-piece decay
that makes the strong-type sum converge.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import hardy
from .decomp import AngularPartition, PieceMultiplier, radial_pieces
from .fitting import log2_slope
from .fourier import GridSpec, SampledField, envelope_weight
from .gauge import Gauge, auxiliary_index, critical_index

__all__ = [
    "TGrid",
    "MaximalField",
    "riesz_mean",
    "maximal",
    "piece_maximal",
    "gauge_on_grid",
    "dilation_limit",
    "weak_moment_order",
    "strong_moment_order",
    "default_atom_grid",
    "default_tgrid",
    "outside_ball_report",
    "weak_type_experiment",
    "strong_type_experiment",
    "piece_decay_study",
    "dilation_covariance_report",
]


@dataclass(frozen=True)
class TGrid:
    """Dyadic scale grid for the sup over t, with J points per octave."""

    t_min: float
    t_max: float
    per_octave: int = 8

    def __post_init__(self):
        if self.per_octave < 8:
            raise ValueError("t-grids need at least 8 points per octave")
        if not 0 < self.t_min < self.t_max:
            raise ValueError("need 0 < t_min < t_max")

    @property
    def values(self) -> np.ndarray:
        n_steps = int(np.ceil(self.per_octave * np.log2(self.t_max / self.t_min)))
        t = self.t_min * 2.0 ** (np.arange(n_steps + 1) / self.per_octave)
        t[-1] = min(t[-1], self.t_max)
        return t

    @property
    def octaves(self) -> float:
        return float(np.log2(self.t_max / self.t_min))

    def refined(self) -> "TGrid":
        return TGrid(self.t_min, self.t_max, 2 * self.per_octave)


@dataclass
class MaximalField:
    """Pointwise sup over the t-grid of the mean's modulus, with provenance."""

    values: np.ndarray          # float64, >= |mean at t| for every grid t
    argmax_t: np.ndarray        # int16 index into tgrid.values per cell
    tgrid: TGrid
    grid: GridSpec

    @property
    def cell_volume(self) -> float:
        return self.grid.cell_volume


# rho sampled on the centered frequency grid, cached per (gauge, grid)
_RHO_CACHE: dict = {}
_OUTER_RADIUS_CACHE: dict = {}


def gauge_on_grid(gauge: Gauge, grid: GridSpec) -> np.ndarray:
    key = (gauge.descriptor, grid)
    if key not in _RHO_CACHE:
        rho = np.empty(grid.shape)
        for sl, pts in grid.points_chunks(domain="frequency"):
            rho[sl] = gauge(pts)
        if len(_RHO_CACHE) > 8:
            _RHO_CACHE.pop(next(iter(_RHO_CACHE)))
        _RHO_CACHE[key] = rho
    return _RHO_CACHE[key]


def sphere_outer_radius(gauge: Gauge) -> float:
    """max |zeta| over the gauge unit sphere (sets the dilation refusal)."""
    key = gauge.descriptor
    if key not in _OUTER_RADIUS_CACHE:
        if gauge.n == 2:
            a = np.linspace(0, 2 * np.pi, 4096, endpoint=False)
            dirs = np.stack([np.cos(a), np.sin(a)], axis=-1)
        else:
            rng = np.random.default_rng(0)
            dirs = rng.normal(size=(8192, gauge.n))
            dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        _OUTER_RADIUS_CACHE[key] = float(np.max(1.0 / gauge(dirs)))
    return _OUTER_RADIUS_CACHE[key]


def dilation_limit(gauge: Gauge, grid: GridSpec) -> float:
    """Largest t whose multiplier support {rho < t} fits inside the grid."""
    return grid.nyquist / sphere_outer_radius(gauge)


def default_tgrid(gauge: Gauge, grid: GridSpec, center: float = 1.0,
                  octaves_down: float = 6.0, octaves_up: float = 6.0,
                  per_octave: int = 8) -> TGrid:
    """Dyadic window around a center scale, clipped at the dilation refusal."""
    limit = 0.99 * dilation_limit(gauge, grid)
    t_max = min(center * 2.0 ** octaves_up, limit)
    t_min = min(center * 2.0 ** (-octaves_down), t_max / 2.0)
    return TGrid(t_min, t_max, per_octave)


def riesz_mean(f: SampledField, gauge: Gauge, delta: float, t: float) -> SampledField:
    """Mean of index delta at scale t: multiply the transform by
    (1 - rho/t)_+**delta and invert."""
    if delta <= 0:
        raise ValueError("smoothing index delta must be positive")
    limit = dilation_limit(gauge, f.grid)
    if t > limit:
        raise ValueError(
            f"t={t:.3g} puts the multiplier support outside the grid "
            f"(limit {limit:.3g}); enlarge the frequency box")
    fhat = f.to_frequency()
    rho = gauge_on_grid(gauge, f.grid)
    mult = np.where(rho < t, (1.0 - rho / t), 0.0) ** delta
    return SampledField(fhat.values * mult, f.grid, "frequency").to_space()


def maximal(f: SampledField, gauge: Gauge, delta: float, tgrid: TGrid) -> MaximalField:
    """Pointwise sup of |mean| over the t-grid.

    Scales whose multiplier support misses every grid point contribute an
    exactly-zero mean and are skipped without a transform.
    """
    fhat = f.to_frequency()
    rho = gauge_on_grid(gauge, f.grid)
    rho_min = float(np.min(rho))
    best = np.zeros(f.grid.shape)
    arg = np.zeros(f.grid.shape, dtype=np.int16)
    ts = tgrid.values
    limit = dilation_limit(gauge, f.grid)
    if ts[-1] > limit:
        raise ValueError(f"t-grid exceeds the dilation limit {limit:.3g}")
    for i, t in enumerate(ts):
        if t <= rho_min:
            continue  # multiplier vanishes at every grid frequency
        mult = np.where(rho < t, (1.0 - rho / t), 0.0) ** delta
        mean = SampledField(fhat.values * mult, f.grid, "frequency").to_space()
        mag = np.abs(mean.values)
        better = mag > best
        best[better] = mag[better]
        arg[better] = i
    return MaximalField(values=best, argmax_t=arg, tgrid=tgrid, grid=f.grid)


def piece_maximal(f: SampledField, piece: PieceMultiplier, tgrid: TGrid) -> MaximalField:
    """Maximal field of one decomposition piece.

    The angular window is homogeneous of degree zero, so only the radial
    factor dilates: the multiplier at scale t is radial(rho/t) * window(xi).
    """
    fhat = f.to_frequency()
    grid = f.grid
    gauge = piece.partition.surface.gauge
    rho = gauge_on_grid(gauge, grid)
    window = piece.partition.grid_window(piece.l, grid)
    best = np.zeros(grid.shape)
    arg = np.zeros(grid.shape, dtype=np.int16)
    for i, t in enumerate(tgrid.values):
        radial = piece.radial.from_rho(rho / t)
        if not np.any(radial):
            continue
        mean = SampledField(fhat.values * (radial * window), grid,
                            "frequency").to_space()
        mag = np.abs(mean.values)
        better = mag > best
        best[better] = mag[better]
        arg[better] = i
    return MaximalField(values=best, argmax_t=arg, tgrid=tgrid, grid=grid)


# -- moment orders -------------------------------------------------------------


def weak_moment_order(p: float, n: int) -> int:
    """Atom moment order for critical-index weak-type runs."""
    return int(np.ceil(n * (1.0 / p - 1.0) - 1e-12))


def strong_moment_order(delta: float, n: int) -> int:
    """Atom moment order sufficient above the critical index (from p')."""
    p_aux = auxiliary_index(delta, n)
    return int(np.floor(n * (1.0 / p_aux - 1.0) + 1e-12))


def default_atom_grid(scale: float, n: int = 2) -> GridSpec:
    """Grid with 16 samples per atom radius and a box of 32 radii."""
    return GridSpec(n=n, n_side=1024, half_width=32.0 * scale)


# -- reports -------------------------------------------------------------------


def outside_ball_report(mfield: MaximalField, atom: hardy.Atom, p: float,
                        p_aux: float, piece: PieceMultiplier | None = None) -> dict:
    """Mass and envelope constants of a maximal field off the doubled ball.

    Reports the L^p mass outside B(x0; 2s) and, when a decomposition piece is
    given, the constant in the flat-envelope domination
    s**(-n/p) * 2**(-k(n-1)/(2p')) * P((x - x0)/s).
    """
    grid = mfield.grid
    n = grid.n
    mesh = grid.mesh("space")
    dist = np.sqrt(sum((mesh[i] - atom.center[i]) ** 2 for i in range(n)))
    outside = dist > 2.0 * atom.radius
    mass = float(np.sum(mfield.values[outside] ** p) * grid.cell_volume)
    report = {"outside_lp_mass_p": mass}
    if piece is not None:
        e0, tangents = piece.frame()
        env = envelope_weight(
            GridSpec(n=n, n_side=grid.n_side,
                     half_width=grid.half_width / atom.radius),
            e0, tangents, p_aux,
            center=atom.center / atom.radius)
        scale = (atom.radius ** (-n / p)
                 * 2.0 ** (-piece.k * (n - 1) / (2.0 * p_aux)))
        ratio = mfield.values[outside] / (scale * env[outside])
        report["envelope_constant"] = float(np.max(ratio))
        report["k"] = piece.k
    return report


def inside_ball_constant(mfield: MaximalField, atom: hardy.Atom, p: float) -> float:
    """max over lambda of lambda**p |{x in B(x0;2s): M > lambda/2}|."""
    grid = mfield.grid
    mesh = grid.mesh("space")
    dist = np.sqrt(sum((mesh[i] - atom.center[i]) ** 2
                       for i in range(grid.n)))
    vals = mfield.values[dist <= 2.0 * atom.radius]
    if vals.size == 0:
        return 0.0
    # lambda grid = doubled sample values makes the sublevel count exact
    order = np.sort(vals)[::-1]
    counts = np.arange(1, order.size + 1)
    lam = 2.0 * order
    return float(np.max(lam ** p * counts * grid.cell_volume))


def envelope_over_omega_constant(mfield: MaximalField, atom: hardy.Atom,
                                 p: float, omega_profile) -> float:
    """sup of M(x) (1+|x|)^{n/p} / omega(x/|x|) outside the doubled ball."""
    grid = mfield.grid
    if grid.n != 2:
        raise ValueError("the omega envelope check is planar")
    mesh = grid.mesh("space")
    x0 = np.broadcast_to(mesh[0], grid.shape)
    x1 = np.broadcast_to(mesh[1], grid.shape)
    r = np.sqrt(x0 ** 2 + x1 ** 2)
    dist = np.sqrt((x0 - atom.center[0]) ** 2 + (x1 - atom.center[1]) ** 2)
    mask = (dist > 2.0 * atom.radius) & (r <= grid.half_width / 2.0) & (r > 0)
    theta = np.arctan2(x1[mask], x0[mask])
    om = omega_profile.interp(theta)
    vals = mfield.values[mask] * (1.0 + r[mask]) ** (grid.n / p) / om
    return float(np.max(vals))


# -- experiments ---------------------------------------------------------------


def weak_type_experiment(gauge: Gauge, omega_profile, p: float, seeds,
                         scales=(0.25, 1.0, 4.0), per_octave: int = 8,
                         n_side: int = 1024) -> dict:
    """Weak-type surrogate at the critical index over a seeded atom family.

    Per atom: the critical-index maximal field, its weak quasinorm to the
    power p (the per-atom constant), the inside-ball sublevel constant, and
    the omega-envelope constant outside the doubled ball.
    """
    n = gauge.n
    delta = critical_index(p, n).delta
    mu = weak_moment_order(p, n)
    records = []
    for scale in scales:
        grid = GridSpec(n=n, n_side=n_side, half_width=32.0 * scale)
        # absolute t-window: runs at different scales then sample genuinely
        # different dilates instead of exact rescalings of one another
        tgrid = default_tgrid(gauge, grid, center=1.0, per_octave=per_octave)
        for seed in seeds:
            atom = hardy.make_atom(grid, p, mu, np.zeros(n), scale, seed)
            mfield = maximal(atom.field, gauge, delta, tgrid)
            quasi = hardy.weak_quasinorm(mfield.values, p, grid.cell_volume)
            records.append({
                "seed": int(seed),
                "scale": scale,
                "quasinorm_p": quasi.quasinorm ** p,
                "inside_constant": inside_ball_constant(mfield, atom, p),
                "omega_envelope_constant": envelope_over_omega_constant(
                    mfield, atom, p, omega_profile),
            })
    constants = np.array([r["quasinorm_p"] for r in records])
    return {
        "gauge": gauge.descriptor,
        "p": p,
        "delta": delta,
        "mu": mu,
        "records": records,
        "ensemble_max": float(np.max(constants)),
        "ensemble_min": float(np.min(constants)),
        "ensemble_spread": float(np.max(constants) / np.min(constants)),
        "inside_max": float(np.max([r["inside_constant"] for r in records])),
        "envelope_max": float(np.max([r["omega_envelope_constant"]
                                      for r in records])),
    }


def strong_type_experiment(gauge: Gauge, p: float, delta: float, seeds,
                           scales=(0.25, 1.0, 4.0), per_octave: int = 8,
                           n_side: int = 1024) -> dict:
    """Strong-type surrogate above the critical index: per-atom L^p masses."""
    n = gauge.n
    crit = critical_index(p, n).delta
    if delta <= crit:
        raise ValueError(
            f"the strong-type bound needs delta > critical index {crit:.4g}")
    mu = max(weak_moment_order(p, n), strong_moment_order(delta, n))
    records = []
    for scale in scales:
        grid = GridSpec(n=n, n_side=n_side, half_width=32.0 * scale)
        tgrid = default_tgrid(gauge, grid, center=1.0, per_octave=per_octave)
        for seed in seeds:
            atom = hardy.make_atom(grid, p, mu, np.zeros(n), scale, seed)
            mfield = maximal(atom.field, gauge, delta, tgrid)
            mass = hardy.lp_norm(mfield.values, p, grid.cell_volume) ** p
            records.append({"seed": int(seed), "scale": scale,
                            "lp_mass_p": mass})
    per_scale = {}
    for scale in scales:
        vals = [r["lp_mass_p"] for r in records if r["scale"] == scale]
        per_scale[scale] = (min(vals), max(vals))
    masses = np.array([r["lp_mass_p"] for r in records])
    scale_means = np.array([np.mean([r["lp_mass_p"] for r in records
                                     if r["scale"] == s]) for s in scales])
    return {
        "gauge": gauge.descriptor,
        "p": p,
        "delta": delta,
        "p_aux": auxiliary_index(delta, n),
        "mu": mu,
        "records": records,
        "ensemble_max": float(np.max(masses)),
        "ensemble_min": float(np.min(masses)),
        "scale_spread": float(np.max(scale_means) / np.min(scale_means)),
    }


def piece_decay_study(surface, p: float, delta: float, k_range,
                      scale: float = 4.0, seed: int = 0,
                      half_width: float = 64 * np.pi, n_side: int = 1024,
                      t_window=(1.0, 2.0), per_octave: int = 8) -> dict:
    """Per-shell outside-ball masses of the piece maximal operators.

    For each k the masses of all angular pieces are summed; their decay in k
    is the geometric series that makes the strong-type bound close, with
    exponent (p/p' - 1)(n - 1)/2 in log2.
    """
    gauge = surface.gauge
    n = gauge.n
    p_aux = auxiliary_index(delta, n)
    mu = max(weak_moment_order(p, n), strong_moment_order(delta, n))
    grid = GridSpec(n=n, n_side=n_side, half_width=half_width)
    atom = hardy.make_atom(grid, p, mu, np.zeros(n), scale, seed)
    tgrid = TGrid(t_window[0], t_window[1], per_octave)
    bump_pieces = radial_pieces(delta, max(k_range))
    per_k_mass = {}
    per_k_envelope = {}
    for k in k_range:
        partition = AngularPartition(surface, k)
        total = 0.0
        env_consts = []
        for l in range(partition.size):
            piece = PieceMultiplier(bump_pieces[k], partition, l)
            mfield = piece_maximal(atom.field, piece, tgrid)
            rep = outside_ball_report(mfield, atom, p, p_aux, piece)
            total += rep["outside_lp_mass_p"]
            env_consts.append(rep["envelope_constant"])
        per_k_mass[k] = total
        per_k_envelope[k] = float(np.max(env_consts))
    ks = sorted(per_k_mass)
    masses = np.array([per_k_mass[k] for k in ks])
    slope = log2_slope(ks, masses)
    predicted = -(p / p_aux - 1.0) * (n - 1) / 2.0
    return {
        "k_range": list(ks),
        "per_k_mass_p": {str(k): per_k_mass[k] for k in ks},
        "per_k_envelope_constant": {str(k): per_k_envelope[k] for k in ks},
        "fitted_exponent": slope,
        "predicted_exponent": predicted,
        "series_sum": float(np.sum(masses)),
        "p_aux": p_aux,
    }


def dilation_covariance_report(gauge: Gauge, p: float, delta: float,
                               scale: float = 4.0, seed: int = 0,
                               n_side: int = 512) -> dict:
    """Samplewise check of the rescaling identity between atom scales.

    An atom at radius s on a box of L = 16 s and its unit-ball renormalization
    on the box L/s see identical multiplier samples when the t-grids are
    matched by t <-> t*s, so the maximal fields must agree samplewise up to
    rounding after the s**(-n/p) renormalization.
    """
    n = gauge.n
    mu = weak_moment_order(p, n)
    grid_a = GridSpec(n=n, n_side=n_side, half_width=16.0 * scale)
    grid_b = GridSpec(n=n, n_side=n_side, half_width=16.0)
    atom = hardy.make_atom(grid_a, p, mu, np.zeros(n), scale, seed)
    unit_values = scale ** (n / p) * atom.field.values
    unit_field = SampledField(unit_values, grid_b, "space")
    tgrid_b = default_tgrid(gauge, grid_b, center=1.0, octaves_down=3,
                            octaves_up=3)
    tgrid_a = TGrid(tgrid_b.t_min / scale, tgrid_b.t_max / scale,
                    tgrid_b.per_octave)
    m_a = maximal(atom.field, gauge, delta, tgrid_a)
    m_b = maximal(unit_field, gauge, delta, tgrid_b)
    lhs = m_a.values
    rhs = scale ** (-n / p) * m_b.values
    denom = np.max(rhs)
    deviation = float(np.max(np.abs(lhs - rhs)) / denom)
    return {"max_relative_deviation": deviation, "scale": scale}
