"""Dyadic-angular decomposition of the summability multiplier.

Splits (1 - rho)_+**delta into radial shell pieces driven by a smooth dyadic
bump and, per shell index k, an angular partition of unity built from caps of
ambient radius ~ 2**(-k/2) on the gauge unit sphere.  The product pieces are
the multipliers whose inverse transforms carry the anisotropic kernel decay.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .surface import ConvexSurface

__all__ = [
    "DyadicBump",
    "RadialPiece",
    "radial_pieces",
    "assemble_radial",
    "AngularPartition",
    "PieceMultiplier",
]


def _smooth_step(tau):
    """C-infinity step: 0 for tau <= 0, 1 for tau >= 1, monotone between."""
    tau = np.asarray(tau, dtype=float)
    out = np.zeros_like(tau)
    hi = tau >= 1.0
    out[hi] = 1.0
    mid = (tau > 0.0) & (tau < 1.0)
    if np.any(mid):
        t = tau[mid]
        with np.errstate(over="ignore"):
            a = np.exp(-1.0 / t)
            b = np.exp(-1.0 / (1.0 - t))
        out[mid] = a / (a + b)
    return out


class DyadicBump:
    """Smooth bump phi on (1/2, 2) with sum_k phi(2**k t) = 1 for t > 0.

    The seed profile is exp(-1/((t - 1/2)(2 - t))) extended by zero; dividing
    by its own dyadic sum makes the partition identity hold to machine
    precision, because the normalizer is invariant under t -> 2t.
    """

    support = (0.5, 2.0)

    def _seed(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        mask = (t > 0.5) & (t < 2.0)
        if np.any(mask):
            g = (t[mask] - 0.5) * (2.0 - t[mask])
            out[mask] = np.exp(-1.0 / g)
        return out

    def _normalizer(self, t):
        # only dyadic shifts with 2**j * t in (1/2, 2) contribute; that is a
        # window of width two around -log2(t)
        t = np.asarray(t, dtype=float)
        total = np.zeros_like(t)
        pos = t > 0
        if not np.any(pos):
            return total
        tp = t[pos]
        center = np.floor(-np.log2(tp)).astype(int)
        acc = np.zeros_like(tp)
        for off in (-2, -1, 0, 1, 2):
            acc += self._seed(np.ldexp(tp, center + off))
        total[pos] = acc
        return total

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        mask = (t > 0.5) & (t < 2.0)
        if np.any(mask):
            out[mask] = self._seed(t[mask]) / self._normalizer(t[mask])
        return out

    def partition_defect(self, t):
        """max |sum_k phi(2**k t) - 1| over a positive probe grid."""
        t = np.asarray(t, dtype=float)
        center = np.floor(-np.log2(t)).astype(int)
        acc = np.zeros_like(t)
        for off in (-2, -1, 0, 1, 2):
            acc += self(np.ldexp(t, center + off))
        return float(np.max(np.abs(acc - 1.0)))


@dataclass
class RadialPiece:
    """One radial shell factor of the multiplier decomposition.

    For k >= 1 the piece is phi(2**(k+1) * (1 - rho)) * (1 - rho)_+**delta,
    supported where 1 - rho lies in (2**(-k-2), 2**(-k)).  The k = 0 piece
    collects everything at unit distance from the sphere; by the partition
    identity it equals (1 - rho)_+**delta * (phi(2u) + phi(u)) with u = 1 - rho.
    """

    k: int
    delta: float
    bump: DyadicBump

    def from_rho(self, rho):
        u = 1.0 - np.asarray(rho, dtype=float)
        base = np.where(u > 0, u, 0.0) ** self.delta
        if self.k == 0:
            return base * (self.bump(2.0 * u) + self.bump(u))
        return base * self.bump(np.ldexp(u, self.k + 1))

    @property
    def shell(self) -> tuple[float, float]:
        """Support interval of 1 - rho (the whole unit ball for k = 0)."""
        if self.k == 0:
            return (2.0 ** -3, 1.0)
        return (2.0 ** -(self.k + 2), 2.0 ** -self.k)


def radial_pieces(delta: float, k_max: int, bump: DyadicBump | None = None):
    """Pieces k = 0..k_max; their sum reconstructs (1-rho)_+**delta up to
    2**(-k_max * delta) pointwise."""
    if delta <= 0:
        raise ValueError("radial decomposition needs delta > 0")
    bump = bump or DyadicBump()
    return [RadialPiece(k=k, delta=delta, bump=bump) for k in range(k_max + 1)]


def assemble_radial(rho, delta: float, k_max: int,
                    bump: DyadicBump | None = None):
    """Sum of the radial pieces on an array of gauge values."""
    pieces = radial_pieces(delta, k_max, bump)
    rho = np.asarray(rho, dtype=float)
    total = np.zeros_like(rho)
    for piece in pieces:
        total += piece.from_rho(rho)
    return total


class AngularPartition:
    """Partition of unity on a gauge unit sphere from a greedy cap covering.

    Centers are chosen by walking the quadrature samples and keeping every
    point farther than 2**(-k/2) (ambient distance) from all kept centers;
    windows are smooth bumps, identically one inside the covering radius and
    supported inside ``overlap_factor`` times it, then normalized by their
    sum.  Normalization makes the partition identity exact wherever the
    covering reaches, at the price that overlapping inner caps share their
    mass (the minimum window value on each inner cap is reported instead of
    being one).
    """

    def __init__(self, surface: ConvexSurface, k: int,
                 overlap_factor: float = 3.0):
        if k < 1:
            raise ValueError("angular partitions need k >= 1")
        self.surface = surface
        self.k = k
        self.radius = 2.0 ** (-k / 2.0)
        self.overlap_factor = overlap_factor
        self.center_indices = self._greedy_cover()
        self.centers = surface.points[self.center_indices]
        self.normals = surface.normals[self.center_indices]

    def _greedy_cover(self):
        pts = self.surface.points
        m = pts.shape[0]
        mindist = np.full(m, np.inf)
        centers = []
        next_idx = 0
        while True:
            centers.append(next_idx)
            d = np.linalg.norm(pts - pts[next_idx], axis=1)
            np.minimum(mindist, d, out=mindist)
            uncovered = mindist > self.radius
            if not np.any(uncovered):
                break
            next_idx = int(np.argmax(uncovered))
            if len(centers) > m:
                raise RuntimeError("covering failed to terminate")
        return np.asarray(centers, dtype=int)

    @property
    def size(self) -> int:
        return self.center_indices.size

    def frame(self, l: int):
        """Outer normal and tangent orthonormal basis at window center l."""
        e0 = self.normals[l]
        if self.surface.n == 2:
            return e0, [np.array([-e0[1], e0[0]])]
        seed = np.eye(3)[np.argmin(np.abs(e0))]
        t1 = seed - (seed @ e0) * e0
        t1 /= np.linalg.norm(t1)
        t2 = np.cross(e0, t1)
        return e0, [t1, t2]

    # -- window evaluation ---------------------------------------------------

    def _eta(self, l: int, zeta):
        d = np.linalg.norm(zeta - self.centers[l], axis=-1)
        r_in = self.radius
        r_out = self.overlap_factor * self.radius
        return _smooth_step((r_out - d) / (r_out - r_in))

    def eta_sum(self, zeta):
        total = np.zeros(zeta.shape[:-1])
        for l in range(self.size):
            total += self._eta(l, zeta)
        return total

    def window(self, l: int, zeta, eta_total=None):
        """Normalized window value on sphere points zeta (shape (..., n))."""
        if eta_total is None:
            eta_total = self.eta_sum(zeta)
        eta = self._eta(l, zeta)
        out = np.zeros_like(eta)
        pos = eta > 0
        out[pos] = eta[pos] / eta_total[pos]
        return out

    def window_homogeneous(self, l: int, points):
        """Window extended to nonzero ambient points by x -> x / rho(x)."""
        pts = np.asarray(points, dtype=float)
        rho = self.surface.gauge(pts)
        zeta = np.where(rho[..., None] > 0, pts / np.maximum(rho, 1e-300)[..., None], 0.0)
        vals = self.window(l, zeta)
        return np.where(rho > 0, vals, 0.0)

    def grid_window(self, l: int, grid) -> np.ndarray:
        """Homogeneous window sampled on a frequency grid, with the sphere
        projection and the window-sum normalizer cached per grid."""
        key = grid
        if not hasattr(self, "_grid_cache"):
            self._grid_cache = {}
        if key not in self._grid_cache:
            shape = grid.shape
            zeta = np.zeros(shape + (self.surface.n,))
            valid = np.zeros(shape, dtype=bool)
            for sl, pts in grid.points_chunks(domain="frequency"):
                rho = self.surface.gauge(pts)
                pos = rho > 0
                block = np.zeros(pts.shape)
                block[pos] = pts[pos] / rho[pos][..., None]
                zeta[sl] = block
                valid[sl] = pos
            eta_total = self.eta_sum(zeta)
            if len(self._grid_cache) > 2:
                self._grid_cache.pop(next(iter(self._grid_cache)))
            self._grid_cache[key] = (zeta, valid, eta_total)
        zeta, valid, eta_total = self._grid_cache[key]
        vals = self.window(l, zeta, eta_total)
        vals[~valid] = 0.0
        return vals

    # -- property verification ----------------------------------------------

    def identity_defect(self, zeta) -> float:
        """max |sum_l window_l - 1| over sphere points."""
        total = self.eta_sum(zeta)
        if np.any(total <= 0):
            return np.inf
        acc = np.zeros(zeta.shape[:-1])
        for l in range(self.size):
            acc += self.window(l, zeta, total)
        return float(np.max(np.abs(acc - 1.0)))

    def support_defect(self, zeta) -> float:
        """max window value outside the stated support radius (should be 0)."""
        worst = 0.0
        total = self.eta_sum(zeta)
        r_out = self.overlap_factor * self.radius
        for l in range(self.size):
            d = np.linalg.norm(zeta - self.centers[l], axis=-1)
            vals = self.window(l, zeta, total)
            outside = d >= r_out
            if np.any(outside):
                worst = max(worst, float(np.max(vals[outside])))
        return worst

    def inner_cap_floor(self) -> float:
        """min over centers of the window value on its own inner cap.

        With overlapping inner caps a normalized partition cannot be
        identically one there; the floor quantifies how far from exclusive
        the caps are and should stay bounded away from zero uniformly in k.
        """
        floor = np.inf
        pts = self.surface.points
        for l in range(self.size):
            d = np.linalg.norm(pts - self.centers[l], axis=1)
            zeta = pts[d < self.radius]
            vals = self.window(l, zeta)
            floor = min(floor, float(np.min(vals)))
        return floor

    def max_overlap(self, zeta) -> int:
        count = np.zeros(zeta.shape[:-1], dtype=int)
        for l in range(self.size):
            count += self._eta(l, zeta) > 0
        return int(np.max(count))

    def derivative_max(self, order: int, rng, n_samples: int = 200) -> float:
        """Max finite-difference partial derivative of the homogeneous window
        over the shell 1/2 <= rho <= 2, across all multiindices of the order."""
        n = self.surface.n
        h = min(self.radius / 50.0, 1e-3)
        angles = rng.uniform(0.0, 2 * np.pi, n_samples)
        radii = rng.uniform(0.75, 1.5, n_samples)
        if n == 2:
            base = np.stack([np.cos(angles), np.sin(angles)], axis=-1)
        else:
            z = rng.uniform(-1, 1, n_samples)
            s = np.sqrt(1 - z * z)
            base = np.stack([s * np.cos(angles), s * np.sin(angles), z], axis=-1)
        pts = self.surface.gauge.boundary_point(base) * radii[:, None]
        l = rng.integers(0, self.size)
        # bias half the samples into the tested window's support
        half = n_samples // 2
        local = self.centers[l] + self.radius * rng.normal(size=(half, n)) * 0.8
        pts[:half] = local * radii[:half, None] / self.surface.gauge(local)[:, None]

        worst = 0.0
        for alpha in _multiindices(n, order):
            vals = _central_difference(lambda q: self.window_homogeneous(l, q),
                                       pts, alpha, h)
            worst = max(worst, float(np.max(np.abs(vals))))
        return worst


def _multiindices(n: int, order: int):
    if n == 2:
        return [(a, order - a) for a in range(order + 1)]
    out = []
    for a in range(order + 1):
        for b in range(order - a + 1):
            out.append((a, b, order - a - b))
    return out


def _central_difference(f, pts, alpha, h):
    """Nested central differences for the partial derivative D^alpha."""
    vals = None
    # build tensor stencil: per axis the central-difference coefficients
    stencils = []
    for a in alpha:
        if a == 0:
            stencils.append({0: 1.0})
        elif a == 1:
            stencils.append({1: 0.5 / h, -1: -0.5 / h})
        elif a == 2:
            stencils.append({1: 1.0 / h ** 2, 0: -2.0 / h ** 2, -1: 1.0 / h ** 2})
        elif a == 3:
            stencils.append({2: 0.5 / h ** 3, 1: -1.0 / h ** 3,
                             -1: 1.0 / h ** 3, -2: -0.5 / h ** 3})
        else:
            raise ValueError("finite differences implemented to order 3")
    out = np.zeros(pts.shape[0])

    # iterate the tensor product of per-axis offsets
    def expand(axis, offset_vec, coef):
        nonlocal out
        if axis == len(alpha):
            shifted = pts + h * np.asarray(offset_vec, dtype=float)
            out = out + coef * f(shifted)
            return
        for off, c in stencils[axis].items():
            expand(axis + 1, offset_vec + [off], coef * c)

    expand(0, [], 1.0)
    return out


@dataclass
class PieceMultiplier:
    """Product of a radial shell piece and one angular window.

    Supported in the anisotropic plate where 1 - rho lies in the k-th dyadic
    shell and the sphere projection stays inside the window's cap.
    """

    radial: RadialPiece
    partition: AngularPartition
    l: int

    def __post_init__(self):
        if self.radial.k != self.partition.k:
            raise ValueError(
                f"radial piece k={self.radial.k} does not match partition "
                f"k={self.partition.k}")

    @property
    def k(self) -> int:
        return self.radial.k

    @property
    def delta(self) -> float:
        return self.radial.delta

    def frame(self):
        return self.partition.frame(self.l)

    def __call__(self, points):
        pts = np.asarray(points, dtype=float)
        rho = self.partition.surface.gauge(pts)
        return self.from_precomputed(rho, pts)

    def from_precomputed(self, rho, points, eta_total=None):
        """Evaluate using an existing gauge-value array (grid fast path)."""
        radial = self.radial.from_rho(rho)
        out = np.zeros_like(radial)
        active = radial != 0.0
        if np.any(active):
            pts = np.asarray(points, dtype=float)[active]
            zeta = pts / rho[active][..., None]
            tot = None if eta_total is None else eta_total[active]
            out[active] = radial[active] * self.partition.window(self.l, zeta, tot)
        return out
