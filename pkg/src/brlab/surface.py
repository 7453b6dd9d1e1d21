"""Convex hypersurface geometry for gauge unit spheres.

Provides boundary quadrature (positions, outer unit normals, surface-measure
weights), support points, spherical caps cut off by tangent-plane distance,
cap-measure scaling reports, the direction-indexed cap-decay profile

    omega(theta) = sup_{r>0} sigma[cap(xi(theta), 1/r)] * (1+r)**((n-1)/2),

finite-type contact-order probing, and the tangency checks used by the
weak-type experiments.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .gauge import Gauge, GaugeError

__all__ = [
    "ConvexSurface",
    "Cap",
    "OmegaProfile",
    "FiniteTypeProbe",
    "angle_height_ratio",
    "direction_perturbation_bound",
    "support_shift_report",
    "omega_transfer_report",
    "cap_doubling_report",
    "cap_comparability_report",
]

# discrete curvature below this fraction of the surface median marks a
# degeneracy (vanishing Gaussian curvature) point
DEGENERACY_FRACTION = 1e-6


def _fft_derivative(values: np.ndarray, order: int = 1) -> np.ndarray:
    """Spectral derivative of a smooth 2*pi-periodic sample array."""
    m = values.shape[0]
    k = np.fft.fftfreq(m, d=1.0 / m)
    if m % 2 == 0 and order % 2 == 1:
        k = k.copy()
        k[m // 2] = 0.0  # odd derivative of the Nyquist mode is ambiguous
    return np.real(np.fft.ifft(np.fft.fft(values) * (1j * k) ** order))


@dataclass
class Cap:
    """Boundary points within tangent-plane distance s of a cap center."""

    center: np.ndarray
    normal: np.ndarray
    height: float
    member_indices: np.ndarray
    measure: float
    empty: bool

    def contains_index(self, i: int) -> bool:
        return bool(np.isin(i, self.member_indices))


@dataclass
class OmegaProfile:
    """Sampled cap-decay profile over directions of the round sphere."""

    angles: np.ndarray            # 2-d surfaces: direction angles in [0, 2pi)
    values: np.ndarray
    r_grid: np.ndarray
    argmax_r: np.ndarray
    edge_saturated: np.ndarray    # sup attained at the last r-grid point

    def interp(self, angles) -> np.ndarray:
        """Periodic linear interpolation of omega at query angles."""
        a = np.mod(np.asarray(angles, dtype=float), 2 * np.pi)
        base = np.mod(self.angles, 2 * np.pi)
        order = np.argsort(base)
        return np.interp(a, base[order], self.values[order], period=2 * np.pi)


@dataclass
class FiniteTypeProbe:
    """Result of a divided-difference contact-order probe."""

    order: int | None
    slopes: np.ndarray
    stable: bool
    bound: int

    @property
    def exceeded_bound(self) -> bool:
        return self.order is None


class ConvexSurface:
    """Quadrature model of a gauge unit sphere in dimension 2 or 3."""

    def __init__(self, gauge: Gauge, points, normals, weights, curvature,
                 extra=None):
        self.gauge = gauge
        self.n = gauge.n
        self.points = points
        self.normals = normals
        self.weights = weights
        self.curvature = curvature
        self._extra = extra or {}
        self._degenerate_angles = None

    # -- construction ------------------------------------------------------

    @classmethod
    def from_gauge(cls, gauge: Gauge, samples: int | None = None) -> "ConvexSurface":
        if gauge.n == 2:
            return cls._build_2d(gauge, samples or 2 ** 16)
        if gauge.n == 3:
            side = samples or 1024
            return cls._build_3d(gauge, side, side)
        raise GaugeError("surfaces are supported in dimension 2 and 3 only")

    @classmethod
    def _build_2d(cls, gauge: Gauge, m: int) -> "ConvexSurface":
        phi = np.arange(m) * (2 * np.pi / m)
        u = np.stack([np.cos(phi), np.sin(phi)], axis=-1)
        rho = gauge(u)
        pts = u / rho[:, None]
        dx = _fft_derivative(pts[:, 0])
        dy = _fft_derivative(pts[:, 1])
        ddx = _fft_derivative(pts[:, 0], 2)
        ddy = _fft_derivative(pts[:, 1], 2)
        speed = np.hypot(dx, dy)
        dphi = 2 * np.pi / m
        weights = speed * dphi
        normals = np.stack([dy, -dx], axis=-1) / speed[:, None]
        # outer orientation: the origin is interior, so <normal, point> > 0
        if np.median(np.einsum("ij,ij->i", normals, pts)) < 0:
            normals = -normals
        curvature = np.abs(dx * ddy - dy * ddx) / speed ** 3
        extra = {
            "phi": phi,
            "speed": speed,
            "arclength": np.concatenate([[0.0], np.cumsum(weights)])[:-1],
            "perimeter": float(np.sum(weights)),
        }
        return cls(gauge, pts, normals, weights, curvature, extra)

    @classmethod
    def _build_3d(cls, gauge: Gauge, n_theta: int, n_phi: int) -> "ConvexSurface":
        theta = (np.arange(n_theta) + 0.5) * (np.pi / n_theta)
        phi = np.arange(n_phi) * (2 * np.pi / n_phi)
        tt, pp = np.meshgrid(theta, phi, indexing="ij")
        u = np.stack([np.sin(tt) * np.cos(pp),
                      np.sin(tt) * np.sin(pp),
                      np.cos(tt)], axis=-1)
        rho = gauge(u)
        pts = u / rho[..., None]
        h_t = np.pi / n_theta
        h_p = 2 * np.pi / n_phi

        def d_theta(a):
            out = np.empty_like(a)
            out[1:-1] = (a[2:] - a[:-2]) / (2 * h_t)
            out[0] = (a[1] - a[0]) / h_t
            out[-1] = (a[-1] - a[-2]) / h_t
            return out

        def d_phi(a):
            return (np.roll(a, -1, axis=1) - np.roll(a, 1, axis=1)) / (2 * h_p)

        dt = np.stack([d_theta(pts[..., i]) for i in range(3)], axis=-1)
        dp = np.stack([d_phi(pts[..., i]) for i in range(3)], axis=-1)
        cross = np.cross(dt, dp)
        area = np.linalg.norm(cross, axis=-1)
        weights = area * h_t * h_p
        normals = cross / np.maximum(area, 1e-300)[..., None]
        inner = np.einsum("ijk,ijk->ij", normals, pts)
        normals = normals * np.where(inner >= 0, 1.0, -1.0)[..., None]

        # Gaussian curvature from the first and second fundamental forms
        dtt = np.stack([d_theta(dt[..., i]) for i in range(3)], axis=-1)
        dpp = np.stack([d_phi(dp[..., i]) for i in range(3)], axis=-1)
        dtp = np.stack([d_phi(dt[..., i]) for i in range(3)], axis=-1)
        E = np.einsum("ijk,ijk->ij", dt, dt)
        F = np.einsum("ijk,ijk->ij", dt, dp)
        G = np.einsum("ijk,ijk->ij", dp, dp)
        L = np.einsum("ijk,ijk->ij", dtt, normals)
        M = np.einsum("ijk,ijk->ij", dtp, normals)
        N = np.einsum("ijk,ijk->ij", dpp, normals)
        denom = np.maximum(E * G - F * F, 1e-300)
        curvature = np.abs((L * N - M * M) / denom)

        extra = {"grid_shape": (n_theta, n_phi)}
        return cls(gauge, pts.reshape(-1, 3), normals.reshape(-1, 3),
                   weights.reshape(-1), curvature.reshape(-1), extra)

    # -- basic queries -----------------------------------------------------

    @property
    def total_measure(self) -> float:
        return float(np.sum(self.weights))

    def chord_length_measure(self) -> float:
        """Independent polygonal estimate of the total measure (2-d only)."""
        if self.n != 2:
            raise GaugeError("chord-length check is for planar surfaces")
        diffs = np.roll(self.points, -1, axis=0) - self.points
        return float(np.sum(np.linalg.norm(diffs, axis=1)))

    def support_point(self, direction):
        """Boundary point maximizing <xi, direction>; its outer normal is the
        given direction by convexity.

        Returns (point, support_value).  On planar surfaces the discrete
        argmax is refined by a parabolic fit in the boundary parameter and a
        fresh gauge evaluation, so the result is accurate well below the
        quadrature spacing.
        """
        d = np.asarray(direction, dtype=float)
        d = d / np.linalg.norm(d)
        proj = self.points @ d
        i = int(np.argmax(proj))
        if self.n != 2:
            return self.points[i].copy(), float(proj[i])
        m = self.points.shape[0]
        phi = self._extra["phi"]
        ip, iq = (i - 1) % m, (i + 1) % m
        f0, f1, f2 = proj[ip], proj[i], proj[iq]
        denom = f0 - 2 * f1 + f2
        shift = 0.0 if denom == 0 else 0.5 * (f0 - f2) / denom
        shift = float(np.clip(shift, -1.0, 1.0))
        phi_star = phi[i] + shift * (2 * np.pi / m)
        u = np.array([np.cos(phi_star), np.sin(phi_star)])
        point = u / self.gauge(u[None, :])[0]
        return point, float(point @ d)

    def support_points(self, directions):
        """Vectorized support points for an array of directions (K, n)."""
        dirs = np.asarray(directions, dtype=float)
        dirs = dirs / np.linalg.norm(dirs, axis=-1, keepdims=True)
        out_pts = np.empty_like(dirs)
        out_val = np.empty(dirs.shape[0])
        for j, d in enumerate(dirs):
            out_pts[j], out_val[j] = self.support_point(d)
        return out_pts, out_val

    # -- caps ----------------------------------------------------------------

    def cap_at_index(self, i: int, s: float) -> Cap:
        """Cap of height s centered at quadrature point i."""
        center = self.points[i]
        normal = self.normals[i]
        return self._cap(center, normal, float(center @ normal), s)

    def cap_in_direction(self, direction, s: float) -> Cap:
        """Cap of height s centered at the support point of a direction."""
        d = np.asarray(direction, dtype=float)
        d = d / np.linalg.norm(d)
        point, h = self.support_point(d)
        return self._cap(point, d, h, s)

    def _cap(self, center, normal, h, s) -> Cap:
        if s <= 0:
            raise GaugeError("cap height must be positive")
        dist = h - self.points @ normal   # tangent-plane distance, >= 0
        mask = dist < s
        idx = np.nonzero(mask)[0]
        measure = float(np.sum(self.weights[mask]))
        return Cap(center=np.array(center), normal=np.array(normal),
                   height=float(s), member_indices=idx, measure=measure,
                   empty=idx.size == 0)

    def cap_measures(self, direction, heights, interpolated: bool = True):
        """Measures of caps at the support point of `direction` for an array
        of heights.

        On planar surfaces the cap boundary is located by linear
        interpolation of the projection between quadrature samples, which
        removes the single-sample quantization of the naive weight sum; in
        3-d the plain weight sum is used.
        """
        d = np.asarray(direction, dtype=float)
        d = d / np.linalg.norm(d)
        s = np.atleast_1d(np.asarray(heights, dtype=float))
        _, h = self.support_point(d)
        proj = self.points @ d
        if self.n != 2 or not interpolated:
            order = np.argsort(proj)[::-1]
            csum = np.concatenate([[0.0], np.cumsum(self.weights[order])])
            sorted_desc = proj[order]
            counts = np.searchsorted(-sorted_desc, -(h - s), side="left")
            return csum[counts]
        return self._cap_measures_2d(proj, h, s)

    def _cap_measures_2d(self, proj, h, s):
        """Interpolated arc lengths of the superlevel sets {proj > h - s}.

        Convexity makes the projection circularly unimodal, so after rolling
        the minimum to index 0 the two branches around the peak are monotone
        and the cap boundary can be located by searchsorted plus linear
        interpolation within the straddling segments.
        """
        m = proj.shape[0]
        i_min = int(np.argmin(proj))
        p = np.roll(proj, -i_min)
        w = np.roll(self.weights, -i_min)
        seg = 0.5 * (w + np.roll(w, -1))   # arc length from sample i to i+1
        prefix = np.concatenate([[0.0], np.cumsum(seg)])   # position of sample i
        total = float(prefix[-1])
        i_peak = int(np.argmax(p))
        asc = p[: i_peak + 1]
        desc = p[i_peak:]
        c = h - s
        out = np.empty_like(c)
        low = c <= p[0]
        high = c >= p[i_peak]
        out[low] = total
        out[high] = 0.0
        mid = ~(low | high)
        if not np.any(mid):
            return out
        cm = c[mid]
        # ascending branch: first sample strictly above the threshold
        il = np.searchsorted(asc, cm, side="right")
        lf = (asc[il] - cm) / (asc[il] - asc[il - 1])
        # descending branch: last sample strictly above the threshold
        jd = desc.size - np.searchsorted(desc[::-1], cm, side="left")
        ir = i_peak + jd - 1
        p_next = p[(ir + 1) % m]
        rf = (p[ir] - cm) / (p[ir] - p_next)
        out[mid] = (prefix[ir] - prefix[il]
                    + lf * seg[il - 1] + rf * seg[ir])
        return out

    # -- omega profile -------------------------------------------------------

    def omega_profile(self, angles=None, r_grid=None) -> OmegaProfile:
        """Cap-decay profile over planar directions.

        The sup over r > 0 is taken over a dyadic grid; by homogeneity the
        support point depends only on the direction, so each direction costs
        one projection pass over the boundary.
        """
        if self.n != 2:
            raise GaugeError("omega profiles are implemented for planar surfaces")
        if angles is None:
            angles = (np.arange(512) + 0.5) * (2 * np.pi / 512)
        angles = np.asarray(angles, dtype=float)
        if r_grid is None:
            from .fitting import geometric_grid
            r_grid = geometric_grid(2.0 ** -4, 2.0 ** 12, 8)
        r_grid = np.asarray(r_grid, dtype=float)
        factor = (1.0 + r_grid) ** ((self.n - 1) / 2.0)
        values = np.empty_like(angles)
        argmax_r = np.empty_like(angles)
        edge = np.zeros(angles.shape, dtype=bool)
        for j, a in enumerate(angles):
            d = np.array([np.cos(a), np.sin(a)])
            meas = self.cap_measures(d, 1.0 / r_grid)
            curve = meas * factor
            i = int(np.argmax(curve))
            values[j] = curve[i]
            argmax_r[j] = r_grid[i]
            edge[j] = i == r_grid.size - 1
        return OmegaProfile(angles=angles, values=values, r_grid=r_grid,
                            argmax_r=argmax_r, edge_saturated=edge)

    def omega_integral(self, profile: OmegaProfile, p: float) -> float:
        """Riemann sum of omega**p over the direction circle."""
        a = np.sort(np.mod(profile.angles, 2 * np.pi))
        da = np.diff(np.concatenate([a, a[:1] + 2 * np.pi]))
        order = np.argsort(np.mod(profile.angles, 2 * np.pi))
        return float(np.sum(profile.values[order] ** p * da))

    # -- degeneracy set ------------------------------------------------------

    def degenerate_normal_angles(self) -> np.ndarray:
        """Directions (angles) of normals at curvature-degenerate points."""
        if self.n != 2:
            raise GaugeError("degeneracy angles are planar-only")
        if self._degenerate_angles is None:
            med = np.median(self.curvature)
            mask = self.curvature < DEGENERACY_FRACTION * med
            norms = self.normals[mask]
            self._degenerate_angles = np.arctan2(norms[:, 1], norms[:, 0])
        return self._degenerate_angles

    def distance_to_degeneracy(self, angles) -> np.ndarray:
        """Geodesic distance on the circle to the degenerate normal set."""
        flat = self.degenerate_normal_angles()
        a = np.atleast_1d(np.asarray(angles, dtype=float))
        if flat.size == 0:
            return np.full(a.shape, np.pi)
        diff = np.abs(a[:, None] - flat[None, :])
        diff = np.minimum(diff, 2 * np.pi - diff)
        return diff.min(axis=1)

    # -- finite type ---------------------------------------------------------

    def graph_height(self, point, normal, tangent, t: float) -> float:
        """Gap between the surface and its tangent plane at offset t.

        Shoots the ray point + t*tangent - u*normal into the body and returns
        the root u of rho = 1.  Convexity puts the surface weakly below the
        tangent plane, so u >= 0.
        """
        base = np.asarray(point) + t * np.asarray(tangent)

        def f(u):
            return self.gauge((base - u * np.asarray(normal))[None, :])[0] - 1.0

        hi = max(10.0 * t * t, 1e-12)
        while f(hi) > 0:
            hi *= 2.0
            if hi > 4.0:
                raise GaugeError("tangent ray fails to re-enter the body")
        if f(0.0) <= 0.0:
            return 0.0
        return brentq(f, 0.0, hi, xtol=1e-15, rtol=1e-15)

    def finite_type_order(self, direction, tangent=None, probe_base: float = 0.4,
                          n_scales: int = 6, bound: int = 8) -> FiniteTypeProbe:
        """Contact order of the tangent plane at the support point of a
        direction, probed by divided differences at dyadic scales.

        The order is the log2 ratio of tangent-plane gaps at successive
        scales; it is declared stable when two consecutive scales round to
        the same integer.  Orders beyond `bound` are reported as exceeded,
        not raised.
        """
        d = np.asarray(direction, dtype=float)
        d = d / np.linalg.norm(d)
        point, _ = self.support_point(d)
        if tangent is None:
            if self.n != 2:
                raise GaugeError("tangent direction is required in 3-d")
            tangent = np.array([-d[1], d[0]])
        else:
            tangent = np.asarray(tangent, dtype=float)
            tangent = tangent - (tangent @ d) * d
            tangent = tangent / np.linalg.norm(tangent)
        ts = probe_base * 2.0 ** (-np.arange(n_scales + 1, dtype=float))
        # symmetrize: convexity makes the leading contact order even, but the
        # two-sided average also guards against asymmetric cubic terms
        gaps = np.array([
            0.5 * (self.graph_height(point, d, tangent, t)
                   + self.graph_height(point, d, tangent, -t))
            for t in ts
        ])
        good = gaps > 1e-13
        slopes = np.full(n_scales, np.nan)
        for i in range(n_scales):
            if good[i] and good[i + 1]:
                slopes[i] = np.log2(gaps[i] / gaps[i + 1])
        rounded = np.round(slopes).astype(float)
        order = None
        stable = False
        for i in range(n_scales - 1):
            if np.isfinite(slopes[i]) and np.isfinite(slopes[i + 1]) \
                    and rounded[i] == rounded[i + 1] and rounded[i] >= 2:
                order = int(rounded[i])
                stable = True
                break
        if order is not None and order > bound:
            return FiniteTypeProbe(order=None, slopes=slopes, stable=stable,
                                   bound=bound)
        return FiniteTypeProbe(order=order, slopes=slopes, stable=stable,
                               bound=bound)


# -- tangency and transfer checks -------------------------------------------


def angle_height_ratio(b: float, m: int, theta0: float, d: float = 1.0) -> float:
    """Measured/predicted tangent-plane gap for the model curve b*t**m.

    The normal at the origin of the graph (t, b*t**m) is vertical; theta0 is
    the prescribed angle between it and the normal at t0.  Solves
    arctan(g'(t0)) = theta0 numerically and divides the gap |g(t0)| by the
    small-angle prediction |b|**(-1/(m-1)) * m**(-m/(m-1)) * theta0**(m/(m-1)).
    """
    if b <= 0 or m < 2 or theta0 <= 0:
        raise GaugeError("need b > 0, integer m >= 2, theta0 > 0")
    max_angle = np.arctan(m * b * d ** (m - 1))
    if theta0 > max_angle:
        raise GaugeError(
            f"theta0={theta0:.3g} unattainable on [-d, d] (max {max_angle:.3g})")

    def f(t):
        return np.arctan(m * b * t ** (m - 1)) - theta0

    t0 = brentq(f, 0.0, d, xtol=1e-15)
    gap = b * t0 ** m
    predicted = b ** (-1.0 / (m - 1)) * m ** (-m / (m - 1.0)) \
        * theta0 ** (m / (m - 1.0))
    return gap / predicted


def direction_perturbation_bound(x, y):
    """Ratio of |(x-y)/|x-y| - x/|x|| to its bound 2|y|/|x| (needs |x|>2|y|)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    nx = np.linalg.norm(x, axis=-1)
    ny = np.linalg.norm(y, axis=-1)
    if np.any(nx <= 2 * ny):
        raise GaugeError("direction bound requires |x| > 2|y|")
    lhs = np.linalg.norm((x - y) / np.linalg.norm(x - y, axis=-1, keepdims=True)
                         - x / nx[..., None], axis=-1)
    with np.errstate(invalid="ignore"):
        ratio = lhs / (2 * ny / nx)
    return np.where(ny > 0, ratio, 0.0)  # y = 0 leaves the direction unchanged


def support_shift_report(surface: ConvexSurface, xs, ys) -> dict:
    """Tangent-plane drift of support points under bounded shifts.

    For admissible pairs (|y| < s <= 1, |x| > 2s) measures the distance from
    the support point of x - y to the tangent plane at the support point of
    x, scaled by |x|; boundedness of the maximum is the claim under test.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    scaled = np.empty(xs.shape[0])
    dir_ratio = np.empty(xs.shape[0])
    for j in range(xs.shape[0]):
        x, y = xs[j], ys[j]
        nx = np.linalg.norm(x)
        xi_x, h = surface.support_point(x / nx)
        xi_shift, _ = surface.support_point((x - y) / np.linalg.norm(x - y))
        gap = h - xi_shift @ (x / nx)
        scaled[j] = gap * nx
        dir_ratio[j] = direction_perturbation_bound(x[None], y[None])[0]
    return {
        "max_scaled_gap": float(np.max(scaled)),
        "scaled_gaps": scaled,
        "max_direction_ratio": float(np.max(dir_ratio)),
    }


def omega_transfer_report(surface: ConvexSurface, profile: OmegaProfile,
                          xs, ys) -> dict:
    """Max of omega at the shifted direction over omega at the base direction."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    a_base = np.arctan2(xs[:, 1], xs[:, 0])
    shift = xs - ys
    a_shift = np.arctan2(shift[:, 1], shift[:, 0])
    ratios = profile.interp(a_shift) / profile.interp(a_base)
    return {"max_ratio": float(np.max(ratios)), "ratios": ratios}


def cap_doubling_report(surface: ConvexSurface, rng, finite_type_k: int = 2,
                        n_centers: int = 40, s_values=(0.5, 0.1, 0.02, 0.004),
                        gammas_up=(1.0, 2.0, 4.0, 8.0),
                        gammas_down=(0.5, 0.25, 0.125)) -> dict:
    """Cap-measure growth constants under height scaling.

    Upward scaling is tested against gamma**((n-1)/2); downward scaling
    against gamma**((n-1)/k) for the surface's finite type k (the measured
    ratio should stay below a constant multiple of each envelope).
    """
    n = surface.n
    idx = rng.integers(0, surface.points.shape[0], size=n_centers)
    up, down, down_lower = [], [], []
    for i in idx:
        d = surface.normals[i]
        for s in s_values:
            base = surface.cap_measures(d, [s])[0]
            if base <= 0:
                continue
            for g in gammas_up:
                ratio = surface.cap_measures(d, [g * s])[0] / base
                up.append(ratio / g ** ((n - 1) / 2.0))
            for g in gammas_down:
                ratio = surface.cap_measures(d, [g * s])[0] / base
                down.append(ratio / g ** ((n - 1) / float(finite_type_k)))
                down_lower.append(ratio / g ** ((n - 1) / 2.0))
    return {
        "upper_constant": float(np.max(up)),
        "down_constant": float(np.max(down)),
        "down_lower_constant": float(np.min(down_lower)),
        "samples": len(up) + len(down),
    }


def cap_comparability_report(surface: ConvexSurface, rng, n_centers: int = 25,
                             s_values=(0.2, 0.05, 0.01),
                             members_per_cap: int = 8) -> dict:
    """Measure ratios between caps of equal height centered inside each other."""
    idx = rng.integers(0, surface.points.shape[0], size=n_centers)
    ratios = []
    for i in idx:
        for s in s_values:
            cap = surface.cap_at_index(int(i), s)
            if cap.empty:
                continue
            base = surface.cap_measures(surface.normals[i], [s])[0]
            take = rng.choice(cap.member_indices,
                              size=min(members_per_cap, cap.member_indices.size),
                              replace=False)
            for j in take:
                other = surface.cap_measures(surface.normals[int(j)], [s])[0]
                ratios.append(other / base)
    ratios = np.asarray(ratios)
    return {
        "max_ratio": float(np.max(ratios)),
        "min_ratio": float(np.min(ratios)),
        "samples": int(ratios.size),
    }
