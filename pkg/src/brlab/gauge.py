"""Homogeneous distance functions, dilation groups, and index arithmetic.

A distance function rho is homogeneous with respect to a one-parameter
dilation group ``A_t``: ``rho(A_t x) = t * rho(x)`` for all ``t > 0``.
The unit sphere ``{rho = 1}`` of every gauge built here is a smooth convex
hypersurface; theorem-level experiments require the isotropic group
``A_t = t*I``, anisotropic diagonal groups are supported for demonstration
only.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = [
    "DilationGroup",
    "Gauge",
    "CriticalIndex",
    "critical_index",
    "auxiliary_index",
    "GaugeError",
]


class GaugeError(ValueError):
    """Raised for invalid gauge descriptors or out-of-domain indices."""


@dataclass(frozen=True)
class DilationGroup:
    """Diagonal dilation group ``A_t = diag(t**a_1, ..., t**a_n)``.

    The identity diagonal ``(1, ..., 1)`` encodes the isotropic dilations
    ``A_t = t*I`` assumed by the boundedness experiments.
    """

    exponents: tuple[float, ...]

    def __post_init__(self):
        if len(self.exponents) < 2:
            raise GaugeError("dilation group needs dimension >= 2")
        if any(a <= 0 for a in self.exponents):
            raise GaugeError("dilation exponents must be strictly positive")

    @property
    def n(self) -> int:
        return len(self.exponents)

    @property
    def is_isotropic(self) -> bool:
        return all(a == 1.0 for a in self.exponents)

    def apply(self, t, points):
        """Apply ``A_t`` to an array of points with shape (..., n)."""
        t = np.asarray(t, dtype=float)
        pts = np.asarray(points, dtype=float)
        scale = t[..., None] ** np.asarray(self.exponents)
        return scale * pts

    @classmethod
    def identity(cls, n: int) -> "DilationGroup":
        return cls((1.0,) * n)


def _superellipse_solve(points, powers, tol=1e-14, max_iter=80):
    """Ray-scaling gauge value for ``sum |x_i|**m_i = 1`` bodies.

    Solves ``g(x / t) = 1`` for ``t > 0`` by Newton iteration on ``log t``;
    ``g`` is strictly decreasing in ``t`` along every ray, so the root is
    unique for ``x != 0``.
    """
    pts = np.abs(np.asarray(points, dtype=float))
    powers = np.asarray(powers, dtype=float)
    norm = np.max(pts, axis=-1)
    out = np.zeros_like(norm)
    mask = norm > 0
    if not np.any(mask):
        return out
    u = pts[mask] / norm[mask, None]
    # g(u/tau) = sum (u_i/tau)^{m_i}; start from tau = 1 (g >= 1 there).
    log_tau = np.zeros(u.shape[0])
    for _ in range(max_iter):
        tau = np.exp(log_tau)
        terms = (u / tau[:, None]) ** powers
        g = terms.sum(axis=-1)
        dg_dlog = -(terms * powers).sum(axis=-1)
        step = -(g - 1.0) / dg_dlog
        log_tau += step
        if np.max(np.abs(step)) < tol:
            break
    out[mask] = norm[mask] * np.exp(log_tau)
    return out


class Gauge:
    """A homogeneous distance function together with its dilation group.

    Supported kinds:

    ``euclidean``
        rho(x) = |x|, any dimension.
    ``ell_m``
        rho(x) = (sum |x_i|**m)**(1/m) for an even integer m >= 2.  With an
        anisotropic diagonal group the exponent of axis i becomes m/a_i.
    ``superellipsoid``
        unit sphere {sum |x_i|**m_i = 1} with even integers m_i, extended by
        ray scaling (the unique t with x/t on the unit sphere).
    ``profile2d``
        planar body given by a positive radial profile R(theta); the gauge is
        rho(x) = |x| / R(theta(x)).  The profile must bound a convex body.
    """

    def __init__(self, kind, dilation, *, m=None, powers=None, profile=None,
                 profile_samples=4096, descriptor=None):
        self.kind = kind
        self.dilation = dilation
        self.m = m
        self.powers = tuple(powers) if powers is not None else None
        self.profile = profile
        self.smooth_away_from_origin = True
        self._descriptor = descriptor or self._default_descriptor()
        if kind == "profile2d":
            self._check_profile_convex(profile_samples)

    # -- constructors ------------------------------------------------------

    @classmethod
    def euclidean(cls, n: int = 2) -> "Gauge":
        return cls("euclidean", DilationGroup.identity(n))

    @classmethod
    def ell(cls, m: int, n: int = 2, dilation: DilationGroup | None = None) -> "Gauge":
        if m < 2 or m % 2 != 0:
            raise GaugeError(
                f"ell_{m}: exponent must be an even integer >= 2 so the unit "
                "sphere is smooth and convex")
        dil = dilation or DilationGroup.identity(n)
        if dil.n != n:
            raise GaugeError("dilation dimension mismatch")
        if any(m / a < 1 for a in dil.exponents):
            raise GaugeError("anisotropic exponent m/a_i < 1 breaks convexity")
        return cls("ell_m", dil, m=m)

    @classmethod
    def superellipsoid(cls, powers: tuple[int, ...]) -> "Gauge":
        if any(p < 2 or p % 2 != 0 for p in powers):
            raise GaugeError("superellipsoid powers must be even integers >= 2")
        return cls("superellipsoid", DilationGroup.identity(len(powers)),
                   powers=powers)

    @classmethod
    def from_profile_2d(cls, profile, samples: int = 4096) -> "Gauge":
        """Planar gauge from a radial profile R(theta) > 0 (vectorized)."""
        return cls("profile2d", DilationGroup.identity(2), profile=profile,
                   profile_samples=samples)

    # -- evaluation --------------------------------------------------------

    @property
    def n(self) -> int:
        return self.dilation.n

    @property
    def descriptor(self) -> str:
        """Stable string key used for caching and for run records."""
        return self._descriptor

    def _default_descriptor(self):
        if self.kind == "euclidean":
            base = f"euclidean:n={self.dilation.n}"
        elif self.kind == "ell_m":
            base = f"ell_{self.m}:n={self.dilation.n}"
        elif self.kind == "superellipsoid":
            base = "superellipsoid:" + ",".join(str(p) for p in self.powers)
        else:
            base = "profile2d:custom"
        if not self.dilation.is_isotropic:
            base += ":dil=" + ",".join(repr(a) for a in self.dilation.exponents)
        return base

    def __call__(self, points):
        """Evaluate rho on an array of points with shape (..., n)."""
        pts = np.asarray(points, dtype=float)
        if pts.shape[-1] != self.n:
            raise GaugeError(f"expected last axis {self.n}, got {pts.shape[-1]}")
        if self.kind == "euclidean":
            return np.linalg.norm(pts, axis=-1)
        if self.kind == "ell_m":
            if self.dilation.is_isotropic:
                # factor out the max coordinate to keep powers in range
                scale = np.max(np.abs(pts), axis=-1)
                out = np.zeros_like(scale)
                mask = scale > 0
                if np.any(mask):
                    u = np.abs(pts[mask]) / scale[mask, None]
                    out[mask] = scale[mask] * (u ** self.m).sum(axis=-1) ** (1.0 / self.m)
                return out
            exps = np.array([self.m / a for a in self.dilation.exponents])
            return (np.abs(pts) ** exps).sum(axis=-1) ** (1.0 / self.m)
        if self.kind == "superellipsoid":
            return _superellipse_solve(pts, self.powers)
        # profile2d: ray scaling against the boundary radius
        r = np.hypot(pts[..., 0], pts[..., 1])
        theta = np.arctan2(pts[..., 1], pts[..., 0])
        return r / self.profile(theta)

    def boundary_point(self, directions):
        """Scale unit-sphere points out of ambient directions (shape (..., n))."""
        d = np.asarray(directions, dtype=float)
        rho = self(d)
        if np.any(rho <= 0):
            raise GaugeError("boundary_point needs nonzero directions")
        return d / rho[..., None]

    def _check_profile_convex(self, samples):
        theta = np.linspace(0.0, 2 * np.pi, samples, endpoint=False)
        r = np.asarray(self.profile(theta), dtype=float)
        if np.any(r <= 0):
            raise GaugeError("profile radius must stay positive")
        pts = np.stack([r * np.cos(theta), r * np.sin(theta)], axis=-1)
        # discrete convexity: all turns of the closed polygon share one sign
        e = np.roll(pts, -1, axis=0) - pts
        cross = e[:, 0] * np.roll(e, -1, axis=0)[:, 1] - e[:, 1] * np.roll(e, -1, axis=0)[:, 0]
        if np.any(cross < -1e-12 * np.max(np.abs(cross))):
            raise GaugeError("profile does not bound a convex body")

    def __repr__(self):
        return f"Gauge({self.descriptor})"


@dataclass(frozen=True)
class CriticalIndex:
    """Critical smoothing index delta(p) = n(1/p - 1/2) - 1/2."""

    p: float
    n: int
    delta: float

    @cached_property
    def auxiliary_p(self) -> float:
        """The smaller exponent p' with delta = n(1/p' - 1/2) - 1/2."""
        return auxiliary_index(self.delta, self.n)


def critical_index(p: float, n: int) -> CriticalIndex:
    """Critical index for the weak-type bound at exponent p in (0, 1]."""
    if not 0 < p <= 1:
        raise GaugeError(f"p={p}: the index formula requires p in (0, 1]")
    return CriticalIndex(p=p, n=n, delta=n * (1.0 / p - 0.5) - 0.5)


def auxiliary_index(delta: float, n: int) -> float:
    """Invert delta = n(1/p' - 1/2) - 1/2 for p'.

    The result must land in (0, 1); callers probing too small a delta get a
    domain error and should raise delta instead.
    """
    if delta <= 0:
        raise GaugeError("auxiliary index needs delta > 0")
    p_aux = n / (delta + 0.5 + 0.5 * n)
    if not 0 < p_aux < 1:
        raise GaugeError(
            f"delta={delta} gives p'={p_aux:.6g} outside (0,1); raise delta")
    return p_aux
