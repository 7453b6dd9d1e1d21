"""Atoms with vanishing moments, weak-Lp quasinorms, and Lp norms on grids.

An (p, mu)-atom is an L-infinity function supported in a ball B(x0; s),
bounded by |B|**(-1/p), whose moments vanish through order mu.  Atoms are
built directly on the sampling grid (bump times polynomial, with the
polynomial chosen in the null space of the discrete moment system), so the
moment cancellation holds at grid level to rounding and convolutions against
grid kernels stay exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from math import gamma as gamma_fn

import numpy as np

from .fourier import GridSpec, SampledField

__all__ = [
    "Atom",
    "make_atom",
    "ball_volume",
    "WeakTypeReport",
    "weak_quasinorm",
    "lp_norm",
    "weak_sum_bound",
    "weak_sum_constant",
    "radial_omega_field",
    "polar_distribution_oracle",
]


def ball_volume(n: int, s: float) -> float:
    """Volume of the Euclidean ball of radius s in dimension n."""
    return np.pi ** (n / 2.0) / gamma_fn(n / 2.0 + 1.0) * s ** n


def _smooth_step(tau):
    tau = np.asarray(tau, dtype=float)
    out = np.zeros_like(tau)
    out[tau >= 1.0] = 1.0
    mid = (tau > 0.0) & (tau < 1.0)
    if np.any(mid):
        t = tau[mid]
        a = np.exp(-1.0 / t)
        b = np.exp(-1.0 / (1.0 - t))
        out[mid] = a / (a + b)
    return out


def _monomial_exponents(n: int, max_degree: int):
    exps = [e for e in product(range(max_degree + 1), repeat=n)
            if sum(e) <= max_degree]
    exps.sort(key=lambda e: (sum(e), e))
    return exps


@dataclass
class Atom:
    """A moment-cancelling atom sampled on a grid, with its certificates."""

    p: float
    mu: int
    center: np.ndarray
    radius: float
    seed: int
    field: SampledField
    sup_bound: float
    sup_value: float
    moment_residuals: dict

    @property
    def grid(self) -> GridSpec:
        return self.field.grid

    def verify(self, tol_moment: float = 1e-10, tol_sup: float = 1e-12) -> dict:
        """Re-check support, sup bound, and moment certificates."""
        vol = ball_volume(self.grid.n, self.radius)
        mesh = self.grid.mesh("space")
        dist = np.sqrt(sum((mesh[i] - self.center[i]) ** 2
                           for i in range(self.grid.n)))
        outside = dist > self.radius
        support_leak = float(np.max(np.abs(self.field.values[outside])))
        moment_scale = vol ** (1.0 - 1.0 / self.p)
        worst_moment = max(abs(v) for v in self.moment_residuals.values())
        return {
            "support_ok": support_leak == 0.0,
            "sup_ok": self.sup_value <= self.sup_bound + tol_sup,
            "moments_ok": worst_moment <= tol_moment * moment_scale,
            "support_leak": support_leak,
            "worst_moment": worst_moment,
            "moment_scale": moment_scale,
        }


def make_atom(grid: GridSpec, p: float, mu: int, center, radius: float,
              seed: int) -> Atom:
    """Construct an atom as bump times polynomial on the grid.

    The bump is flat inside 0.7 * radius and vanishes at the ball boundary;
    the polynomial has degree mu + 1 with coefficients drawn (seeded) from
    the null space of the moment system Gram matrix, then the product is
    rescaled to meet the sup-norm bound with equality.
    """
    if mu < 0:
        raise ValueError("moment order mu must be a nonnegative integer")
    if radius <= 0:
        raise ValueError("atom radius must be positive")
    center = np.asarray(center, dtype=float)
    n = grid.n
    if grid.dx > radius / 4.0:
        need = 2 ** int(np.ceil(np.log2(8.0 * grid.half_width / radius)))
        raise ValueError(
            f"grid spacing {grid.dx:.3g} too coarse for atom radius {radius}; "
            f"need n_side >= {need}")
    mesh = grid.mesh("space")
    dist = np.sqrt(sum((mesh[i] - center[i]) ** 2 for i in range(n)))
    eta = _smooth_step((radius - dist) / (0.3 * radius))

    scaled = [(mesh[i] - center[i]) / radius for i in range(n)]
    constraints = _monomial_exponents(n, mu)
    basis = _monomial_exponents(n, mu + 1)

    def monomial(e):
        out = np.ones(grid.shape)
        for i, power in enumerate(e):
            if power:
                out = out * scaled[i] ** power
        return out

    basis_fields = [eta * monomial(e) for e in basis]
    a_mat = np.empty((len(constraints), len(basis)))
    for r, alpha in enumerate(constraints):
        mono_a = monomial(alpha)
        for c in range(len(basis)):
            a_mat[r, c] = np.sum(mono_a * basis_fields[c])
    # null space of the moment constraints (full row rank for positive eta)
    _, sing, vt = np.linalg.svd(a_mat)
    rank = int(np.sum(sing > sing[0] * 1e-12))
    null_basis = vt[rank:].T
    if null_basis.shape[1] == 0:
        raise RuntimeError("moment system left no free polynomial directions")
    rng = np.random.default_rng(seed)
    coeffs = null_basis @ rng.normal(size=null_basis.shape[1])
    values = np.zeros(grid.shape)
    for c, bf in zip(coeffs, basis_fields):
        values += c * bf

    sup_bound = ball_volume(n, radius) ** (-1.0 / p)
    peak = float(np.max(np.abs(values)))
    if peak == 0.0:
        raise RuntimeError("degenerate polynomial draw produced a zero atom")
    values *= sup_bound / peak

    residuals = {}
    for alpha in constraints:
        residuals[str(alpha)] = float(np.sum(values * monomial(alpha))
                                      * grid.cell_volume)
    fld = SampledField(values.astype(np.complex128), grid, "space")
    return Atom(p=p, mu=mu, center=center, radius=radius, seed=seed,
                field=fld, sup_bound=sup_bound, sup_value=float(np.max(np.abs(values))),
                moment_residuals=residuals)


# -- weak-Lp machinery --------------------------------------------------------


@dataclass
class WeakTypeReport:
    """Distribution function and weak-Lp quasinorm of a sampled function."""

    p: float
    quasinorm: float
    lambdas: np.ndarray
    measures: np.ndarray
    cell_volume: float
    meta: dict = field(default_factory=dict)


def weak_quasinorm(values, p: float, cell_volume: float | None = None,
                   max_curve_points: int = 512) -> WeakTypeReport:
    """Exact weak-Lp quasinorm of a sampled field.

    The lambda grid is the set of distinct sample magnitudes, which makes the
    distribution function |{|g| > lambda}| exact on the grid: the quasinorm
    is max over samples v of v * (cells with magnitude >= v)**(1/p) times the
    cell volume root.
    """
    if isinstance(values, SampledField):
        cell_volume = values.cell_volume
        mags = np.abs(values.values).ravel()
    else:
        mags = np.abs(np.asarray(values)).ravel()
        if cell_volume is None:
            raise ValueError("cell_volume is required for raw arrays")
    mags = np.sort(mags)[::-1]
    distinct, start = np.unique(mags[::-1], return_index=True)
    distinct = distinct[::-1]
    count_ge = mags.size - start[::-1]
    positive = distinct > 0
    distinct = distinct[positive]
    count_ge = count_ge[positive]
    if distinct.size == 0:
        return WeakTypeReport(p=p, quasinorm=0.0, lambdas=np.zeros(0),
                              measures=np.zeros(0), cell_volume=cell_volume)
    quasi = float(np.max(distinct * (count_ge * cell_volume) ** (1.0 / p)))
    # strictly-greater counts give the right-continuous distribution curve;
    # with lambdas descending, nothing exceeds the first (largest) value
    count_gt = np.concatenate([[0], count_ge[:-1]])
    if distinct.size > max_curve_points:
        keep = np.unique(np.linspace(0, distinct.size - 1,
                                     max_curve_points).astype(int))
    else:
        keep = np.arange(distinct.size)
    return WeakTypeReport(p=p, quasinorm=quasi, lambdas=distinct[keep],
                          measures=count_gt[keep] * cell_volume,
                          cell_volume=cell_volume)


def lp_norm(values, p: float, cell_volume: float | None = None) -> float:
    """Discrete (sum |g|^p * cell)**(1/p); a quasinorm for p < 1."""
    if isinstance(values, SampledField):
        cell_volume = values.cell_volume
        mags = np.abs(values.values)
    else:
        mags = np.abs(np.asarray(values))
        if cell_volume is None:
            raise ValueError("cell_volume is required for raw arrays")
    return float((np.sum(mags ** p) * cell_volume) ** (1.0 / p))


def weak_sum_constant(p: float) -> float:
    """((2 - p) / (1 - p))**(1/p), the summing constant for weak-Lp pieces."""
    if not 0 < p < 1:
        raise ValueError("the summing bound needs 0 < p < 1")
    return ((2.0 - p) / (1.0 - p)) ** (1.0 / p)


def weak_sum_bound(fields, coeffs, p: float, cell_volume: float,
                   tol: float = 1e-9) -> dict:
    """Check the weak-quasinorm bound for a sum of unit weak-Lp functions.

    Every summand must have weak quasinorm at most one (verified first; a
    violator is named); the combined quasinorm is then compared against
    ((2-p)/(1-p))**(1/p) times the little-lp norm of the coefficients.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    arrays = []
    for k, f in enumerate(fields):
        arr = f.values if isinstance(f, SampledField) else np.asarray(f)
        q = weak_quasinorm(np.abs(arr), p, cell_volume).quasinorm
        if q > 1.0 + tol:
            raise ValueError(
                f"summand {k} has weak quasinorm {q:.6g} > 1; normalize first")
        arrays.append(arr)
    combined = np.zeros(arrays[0].shape, dtype=complex)
    for c, arr in zip(coeffs, arrays):
        combined = combined + c * arr
    combined_q = weak_quasinorm(np.abs(combined), p, cell_volume).quasinorm
    coeff_lp = float(np.sum(np.abs(coeffs) ** p) ** (1.0 / p))
    bound = weak_sum_constant(p) * coeff_lp
    return {
        "combined_quasinorm": combined_q,
        "bound": bound,
        "coefficient_lp": coeff_lp,
        "constant": weak_sum_constant(p),
        "holds": combined_q <= bound * (1 + 1e-12),
        "slack": bound / combined_q if combined_q > 0 else np.inf,
    }


# -- radially weighted test fields -------------------------------------------


def radial_omega_field(grid: GridSpec, p: float, omega_of_angle) -> SampledField:
    """Planar field (1 + |x|)**(-n/p) * omega(x/|x|) for quasinorm tests."""
    if grid.n != 2:
        raise ValueError("the radial test field is planar")
    mesh = grid.mesh("space")
    r = np.sqrt(mesh[0] ** 2 + mesh[1] ** 2)
    theta = np.arctan2(np.broadcast_to(mesh[1], grid.shape),
                       np.broadcast_to(mesh[0], grid.shape))
    vals = (1.0 + r) ** (-grid.n / p) * omega_of_angle(theta)
    return SampledField(vals.astype(np.complex128), grid, "space")


def polar_distribution_oracle(omega_of_angle, p: float, lambdas,
                              n_theta: int = 4096) -> np.ndarray:
    """|{(1+|x|)**(-2/p) * omega(theta) > lambda}| by polar quadrature.

    For each lambda the radial sublevel threshold is R(theta) =
    max(0, (omega/lambda)**(p/2) - 1) and the area is the integral of
    R**2 / 2 over the circle; this is the independent check for the grid
    distribution function in two dimensions.
    """
    theta = (np.arange(n_theta) + 0.5) * (2 * np.pi / n_theta)
    om = omega_of_angle(theta)
    lambdas = np.atleast_1d(np.asarray(lambdas, dtype=float))
    out = np.empty_like(lambdas)
    for i, lam in enumerate(lambdas):
        r_max = np.maximum((om / lam) ** (p / 2.0) - 1.0, 0.0)
        out[i] = float(np.sum(0.5 * r_max ** 2) * (2 * np.pi / n_theta))
    return out
