"""Planar star-shaped domains with trigonometric-polynomial radial functions.

A domain is described by ``r(phi) = c0 + sum_k (a_k cos k phi + b_k sin k phi)``
around the origin.  Derivatives of r are closed-form, so boundary positions,
outward normals and curvature carry no discretization error; smooth analytic
shapes (the ellipse) are projected onto a finite Fourier basis, which is
machine-exact because their coefficients decay geometrically.

All geometric quantities of the estimates live here: area, perimeter,
diameter, curvature statistics, the two radii measured from a marked center
(rho_i, rho_e), the uniform interior/exterior ball radii (r_i, r_e), boundary
distance, and the aperture/height of the interior cones that drive the
pointwise bounds.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .constants import DomainScalars, _golden_min
from .errors import DomainError, GeometryError

Array = np.ndarray

__all__ = [
    "StarDomain2D",
    "BoundarySample",
    "boundary_sample",
    "area",
    "perimeter",
    "diameter",
    "H0_and_R",
    "rho_bounds",
    "ball_radii",
    "delta_gamma",
    "cone_params",
    "curvature_deviation",
    "star_radius",
    "inradius",
    "domain_scalars",
    "rotated",
]

_VALIDATION_SAMPLES = 4096
_CONE_APERTURE = math.pi / 4


# --------------------------------------------------------------------------
# the domain type
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class StarDomain2D:
    """Star-shaped planar domain, radial graph over the origin.

    ``r(phi) = c0 + sum_k (cos_coeffs[k-1] cos(k phi) + sin_coeffs[k-1]
    sin(k phi))`` must stay positive; this is checked on 4096 samples at
    construction.  The boundary is C-infinity by construction.
    """

    c0: float
    cos_coeffs: tuple[float, ...] = ()
    sin_coeffs: tuple[float, ...] = ()
    label: str = field(default="star", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "cos_coeffs", tuple(float(c) for c in self.cos_coeffs))
        object.__setattr__(self, "sin_coeffs", tuple(float(c) for c in self.sin_coeffs))
        object.__setattr__(self, "c0", float(self.c0))
        phi = np.linspace(0.0, 2.0 * math.pi, _VALIDATION_SAMPLES, endpoint=False)
        rmin = float(np.min(self.radial(phi)))
        if not rmin > 0.0:
            raise DomainError(
                f"radial function must be positive; min r = {rmin:.6g}"
            )

    # -- constructors ------------------------------------------------------

    @staticmethod
    def circle(radius: float = 1.0) -> "StarDomain2D":
        return StarDomain2D(c0=radius, label=f"circle(R={radius:g})")

    @staticmethod
    def ellipse(a: float, b: float, n_modes: int = 64) -> "StarDomain2D":
        """Ellipse with semi-axes a, b as a star domain.

        The radial function ``a b / sqrt(b^2 cos^2 + a^2 sin^2)`` is analytic,
        so its Fourier series converges geometrically; ``n_modes = 64`` already
        reaches machine precision for the aspect ratios used here.
        """
        if a <= 0 or b <= 0:
            raise DomainError(f"semi-axes must be positive, got a={a}, b={b}")
        n = 4096
        phi = 2.0 * math.pi * np.arange(n) / n
        r = a * b / np.sqrt((b * np.cos(phi)) ** 2 + (a * np.sin(phi)) ** 2)
        spec = np.fft.rfft(r) / n
        k_max = min(n_modes, spec.size - 1)
        cos_c = 2.0 * spec[1:k_max + 1].real
        sin_c = -2.0 * spec[1:k_max + 1].imag
        return StarDomain2D(
            c0=float(spec[0].real),
            cos_coeffs=tuple(cos_c),
            sin_coeffs=tuple(sin_c),
            label=f"ellipse(a={a:g},b={b:g})",
        )

    @staticmethod
    def cosine(eps: float, k: int, base: float = 1.0) -> "StarDomain2D":
        """Perturbed disk ``r = base + eps cos(k phi)``."""
        if k < 1:
            raise DomainError(f"mode number must be >= 1, got {k}")
        cos_c = [0.0] * k
        cos_c[k - 1] = eps
        return StarDomain2D(c0=base, cos_coeffs=tuple(cos_c),
                            label=f"cosine(eps={eps:g},k={k})")

    # -- closed-form evaluation --------------------------------------------

    @property
    def n_modes(self) -> int:
        return max(len(self.cos_coeffs), len(self.sin_coeffs))

    def _coefficient_arrays(self) -> tuple[Array, Array, Array]:
        K = self.n_modes
        a = np.zeros(K)
        b = np.zeros(K)
        a[: len(self.cos_coeffs)] = self.cos_coeffs
        b[: len(self.sin_coeffs)] = self.sin_coeffs
        return np.arange(1, K + 1, dtype=float), a, b

    def radial(self, phi: Array | float) -> Array:
        phi = np.asarray(phi, dtype=float)
        if self.n_modes == 0:
            return np.full(phi.shape, self.c0)
        k, a, b = self._coefficient_arrays()
        ang = phi[..., None] * k
        return self.c0 + np.cos(ang) @ a + np.sin(ang) @ b

    def radial_derivatives(self, phi: Array | float) -> tuple[Array, Array, Array]:
        """(r, r', r'') at the given angles, all closed-form."""
        phi = np.asarray(phi, dtype=float)
        if self.n_modes == 0:
            z = np.zeros(phi.shape)
            return np.full(phi.shape, self.c0), z, z.copy()
        k, a, b = self._coefficient_arrays()
        ang = phi[..., None] * k
        c, s = np.cos(ang), np.sin(ang)
        r = self.c0 + c @ a + s @ b
        r1 = -s @ (k * a) + c @ (k * b)
        r2 = -c @ (k * k * a) - s @ (k * k * b)
        return r, r1, r2

    def boundary(self, phi: Array | float) -> Array:
        phi = np.asarray(phi, dtype=float)
        r = self.radial(phi)
        return np.stack([r * np.cos(phi), r * np.sin(phi)], axis=-1)

    def contains(self, points: Array, tol: float = 0.0) -> Array:
        """Strict interior test by the radial graph (vectorized)."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        rho = np.hypot(pts[:, 0], pts[:, 1])
        phi = np.arctan2(pts[:, 1], pts[:, 0])
        return rho < self.radial(phi) - tol

    def radius_range(self) -> tuple[float, float]:
        phi = np.linspace(0.0, 2.0 * math.pi, _VALIDATION_SAMPLES, endpoint=False)
        r = self.radial(phi)
        lo = _refine_extremum(lambda t: self.radial(np.asarray(t)),
                              phi, r, np.argmin(r))
        hi = -_refine_extremum(lambda t: -self.radial(np.asarray(t)),
                               phi, -r, np.argmax(r))
        return lo, hi


def rotated(domain: StarDomain2D, alpha: float) -> StarDomain2D:
    """The same shape rotated by alpha (Fourier coefficients are remixed)."""
    k, a, b = domain._coefficient_arrays()
    ca, sa = np.cos(k * alpha), np.sin(k * alpha)
    return StarDomain2D(
        c0=domain.c0,
        cos_coeffs=tuple(a * ca - b * sa),
        sin_coeffs=tuple(a * sa + b * ca),
        label=f"{domain.label}@{alpha:g}rad",
    )


# --------------------------------------------------------------------------
# boundary samples
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundarySample:
    """One boundary point with its exact differential-geometry data."""

    phi: float
    position: Array
    normal: Array
    curvature: float
    weight: float  # arclength weight sqrt(r^2 + r'^2) * dphi


def _boundary_arrays(domain: StarDomain2D, m: int):
    phi = 2.0 * math.pi * np.arange(m) / m
    r, r1, r2 = domain.radial_derivatives(phi)
    speed = np.sqrt(r * r + r1 * r1)
    cphi, sphi = np.cos(phi), np.sin(phi)
    pos = np.stack([r * cphi, r * sphi], axis=-1)
    normal = np.stack([r * cphi + r1 * sphi, r * sphi - r1 * cphi], axis=-1)
    normal /= speed[:, None]
    kappa = (r * r + 2.0 * r1 * r1 - r * r2) / speed**3
    weight = speed * (2.0 * math.pi / m)
    return phi, pos, normal, kappa, weight


def boundary_sample(domain: StarDomain2D, m: int) -> list[BoundarySample]:
    """Uniform-in-phi boundary samples with exact normal and curvature."""
    if m < 64:
        raise DomainError(f"need at least 64 boundary samples, got {m}")
    phi, pos, normal, kappa, weight = _boundary_arrays(domain, m)
    return [
        BoundarySample(phi=float(phi[i]), position=pos[i], normal=normal[i],
                       curvature=float(kappa[i]), weight=float(weight[i]))
        for i in range(m)
    ]


# --------------------------------------------------------------------------
# bulk quantities
# --------------------------------------------------------------------------

def area(domain: StarDomain2D) -> float:
    """|Omega| = (1/2) int r^2 dphi, closed form by Parseval."""
    _, a, b = domain._coefficient_arrays() if domain.n_modes else (None, np.zeros(0), np.zeros(0))
    return math.pi * (domain.c0**2 + 0.5 * float(np.sum(a * a) + np.sum(b * b)))


def perimeter(domain: StarDomain2D, m: int = 4096) -> float:
    """|Gamma| = int sqrt(r^2 + r'^2) dphi by the periodic trapezoid rule.

    The integrand is smooth and periodic, so the rule converges geometrically.
    """
    phi = 2.0 * math.pi * np.arange(m) / m
    r, r1, _ = domain.radial_derivatives(phi)
    return float(np.sum(np.sqrt(r * r + r1 * r1))) * (2.0 * math.pi / m)


def _refine_extremum(fun, grid: Array, values: Array, j: int) -> float:
    """Golden-section refinement of a discrete minimum on a periodic grid."""
    step = grid[1] - grid[0] if grid.size > 1 else 2.0 * math.pi
    lo, hi = grid[j] - step, grid[j] + step
    t = _golden_min(lambda x: float(fun(x)), lo, hi, iters=90)
    return min(float(fun(t)), float(values[j]))


def diameter(domain: StarDomain2D, m: int = 1024) -> float:
    """Largest boundary-to-boundary distance, coarse grid plus refinement."""
    phi = 2.0 * math.pi * np.arange(m) / m
    pts = domain.boundary(phi)
    d2 = np.sum((pts[:, None, :] - pts[None, :, :]) ** 2, axis=-1)
    i, j = np.unravel_index(int(np.argmax(d2)), d2.shape)

    def dist(p1: float, p2: float) -> float:
        g1 = domain.boundary(np.asarray(p1))
        g2 = domain.boundary(np.asarray(p2))
        return -float(np.linalg.norm(g1 - g2))

    step = 2.0 * math.pi / m
    t1, t2 = float(phi[i]), float(phi[j])
    for _ in range(4):  # alternate golden-section in each parameter
        t1 = _golden_min(lambda x: dist(x, t2), t1 - step, t1 + step, iters=80)
        t2 = _golden_min(lambda x: dist(t1, x), t2 - step, t2 + step, iters=80)
    return max(-dist(t1, t2), math.sqrt(float(d2[i, j])))


def H0_and_R(domain: StarDomain2D) -> tuple[float, float]:
    """Reference curvature H0 = 1/R with R = 2 |Omega| / |Gamma|."""
    R = 2.0 * area(domain) / perimeter(domain)
    return 1.0 / R, R


def curvature_deviation(domain: StarDomain2D, m: int = 4096) -> float:
    """Normalized boundary L2 norm of kappa - H0 (measure dS / |Gamma|)."""
    _, _, _, kappa, weight = _boundary_arrays(domain, m)
    length = float(np.sum(weight))
    h0 = length / (2.0 * area(domain))
    return math.sqrt(float(np.sum(weight * (kappa - h0) ** 2)) / length)


# --------------------------------------------------------------------------
# radii and distances
# --------------------------------------------------------------------------

def rho_bounds(domain: StarDomain2D, z) -> tuple[float, float]:
    """(min, max) of |gamma(phi) - z| over the boundary, refined locally."""
    z = np.asarray(z, dtype=float)
    if not bool(domain.contains(z[None, :])[0]):
        raise DomainError(f"marked point {z.tolist()} is not inside the domain")
    phi = np.linspace(0.0, 2.0 * math.pi, _VALIDATION_SAMPLES, endpoint=False)
    d = np.linalg.norm(domain.boundary(phi) - z, axis=-1)

    def dist(t: float) -> float:
        return float(np.linalg.norm(domain.boundary(np.asarray(t)) - z))

    rho_i = _refine_extremum(dist, phi, d, int(np.argmin(d)))
    rho_e = -_refine_extremum(lambda t: -dist(t), phi, -d, int(np.argmax(d)))
    return rho_i, rho_e


def delta_gamma(domain: StarDomain2D, x) -> float:
    """Distance of x to the boundary, accurate to 1e-8."""
    x = np.asarray(x, dtype=float)
    phi = np.linspace(0.0, 2.0 * math.pi, _VALIDATION_SAMPLES, endpoint=False)
    d = np.linalg.norm(domain.boundary(phi) - x, axis=-1)

    def dist(t: float) -> float:
        return float(np.linalg.norm(domain.boundary(np.asarray(t)) - x))

    return _refine_extremum(dist, phi, d, int(np.argmin(d)))


def _min_boundary_distance(domain: StarDomain2D, centers: Array,
                           dense: Array) -> Array:
    """Distance of each center to the boundary (dense grid + parabolic fix).

    The squared distance is sampled on a uniform phi grid; a three-point
    parabola through the discrete minimum locates the continuous minimizer to
    O(dphi^3), and the true distance is re-evaluated there.
    """
    m = dense.shape[0]
    d2 = (np.sum(centers**2, axis=1)[:, None]
          + np.sum(dense**2, axis=1)[None, :]
          - 2.0 * centers @ dense.T)
    np.maximum(d2, 0.0, out=d2)
    j = np.argmin(d2, axis=1)
    rows = np.arange(centers.shape[0])
    left = d2[rows, (j - 1) % m]
    mid = d2[rows, j]
    right = d2[rows, (j + 1) % m]
    denom = left - 2.0 * mid + right
    shift = np.where(np.abs(denom) > 1e-300,
                     0.5 * (left - right) / np.maximum(np.abs(denom), 1e-300)
                     * np.sign(denom),
                     0.0)
    shift = np.clip(shift, -1.0, 1.0)
    dphi = 2.0 * math.pi / m
    phi_star = j * dphi + shift * dphi
    refined = np.linalg.norm(domain.boundary(phi_star) - centers, axis=-1)
    return np.minimum(np.sqrt(mid), refined)


def ball_radii(domain: StarDomain2D, probes: int = 512,
               dense: int = 8192) -> tuple[float, float]:
    """Uniform interior and exterior ball radii (r_i, r_e).

    r_i is the largest r such that at every boundary probe p the ball of
    radius r centered at p - r nu lies inside the domain; r_e is the analog
    for the complement and is capped at the diameter (convex shapes admit
    arbitrarily large exterior balls).  Found by bisection on r with
    vectorized inclusion tests against the radial function.
    """
    phi_p, pos, normal, _, _ = _boundary_arrays(domain, probes)
    dense_pts = domain.boundary(
        np.linspace(0.0, 2.0 * math.pi, dense, endpoint=False))
    d = diameter(domain)
    # near the rolling-ball threshold the inclusion violation grows only
    # quadratically in (r - r_i), so the slack must be far below the target
    # accuracy squared
    slack = 1e-12 * d

    def feasible(r: float, interior: bool) -> bool:
        centers = pos - r * normal if interior else pos + r * normal
        side = domain.contains(centers)
        if interior and not np.all(side):
            return False
        if not interior and np.any(side):
            return False
        dist = _min_boundary_distance(domain, centers, dense_pts)
        return bool(np.all(dist >= r - slack))

    out = []
    for interior in (True, False):
        hi = d
        if feasible(hi, interior):
            out.append(hi)  # capped at the diameter
            continue
        # squared-distance evaluation is cancellation-limited near r = 0, so
        # bracket from the largest clearly feasible radius first
        lo = next((r for r in (1e-3 * d, 1e-4 * d, 1e-5 * d)
                   if feasible(r, interior)), None)
        if lo is None:
            raise GeometryError(
                "could not bracket the uniform ball radius "
                f"({'interior' if interior else 'exterior'} side)"
            )
        for _ in range(48):
            mid = 0.5 * (lo + hi)
            if feasible(mid, interior):
                lo = mid
            else:
                hi = mid
        out.append(lo)
    return out[0], out[1]


def cone_params(domain: StarDomain2D) -> tuple[float, float]:
    """(aperture, height) of interior cones: (pi/4, r_i).

    Every boundary point of a C^2 domain with uniform interior ball radius
    r_i carries an interior cone of half-aperture pi/4 and height r_i
    (a cone of height a <= 2 r_i cos(theta) fits inside the touching ball).
    """
    r_i, _ = ball_radii(domain)
    return _CONE_APERTURE, r_i


def star_radius(domain: StarDomain2D) -> float:
    """Largest rho such that the domain is star-shaped w.r.t. B_rho(0).

    Equals the minimum over the boundary of the pedal distance
    gamma . nu = r^2 / sqrt(r^2 + r'^2) (distance from the origin to the
    tangent line).
    """
    phi = np.linspace(0.0, 2.0 * math.pi, _VALIDATION_SAMPLES, endpoint=False)

    def pedal(t) -> Array:
        r, r1, _ = domain.radial_derivatives(np.asarray(t))
        return r * r / np.sqrt(r * r + r1 * r1)

    vals = pedal(phi)
    return _refine_extremum(lambda t: float(pedal(t)), phi, vals,
                            int(np.argmin(vals)))


def inradius(domain: StarDomain2D) -> float:
    """Unconstrained inradius: max over interior centers of delta_Gamma."""
    dense_pts = domain.boundary(
        np.linspace(0.0, 2.0 * math.pi, _VALIDATION_SAMPLES, endpoint=False))
    # coarse polar scan of candidate centers
    best = (0.0, np.zeros(2))
    phi = np.linspace(0.0, 2.0 * math.pi, 48, endpoint=False)
    rmax = domain.radial(phi)
    for frac in (0.0, 0.15, 0.3, 0.45, 0.6, 0.75):
        centers = (frac * rmax)[:, None] * np.stack(
            [np.cos(phi), np.sin(phi)], axis=-1)
        if frac == 0.0:
            centers = centers[:1]
        dist = _min_boundary_distance(domain, centers, dense_pts)
        k = int(np.argmax(dist))
        if dist[k] > best[0]:
            best = (float(dist[k]), centers[k])
    # Nelder-Mead polish on the smooth objective
    res = minimize(
        lambda c: -_min_boundary_distance(domain, c[None, :], dense_pts)[0],
        best[1], method="Nelder-Mead",
        options={"xatol": 1e-12, "fatol": 1e-13, "maxiter": 400})
    return max(best[0], -float(res.fun))


def domain_scalars(domain: StarDomain2D) -> DomainScalars:
    """Bundle of validated scalar quantities (marked center = origin)."""
    rho_i, rho_e = rho_bounds(domain, np.zeros(2))
    return DomainScalars(
        N=2,
        volume=area(domain),
        surface=perimeter(domain),
        diameter=diameter(domain),
        r_i=rho_i,
        r_e=rho_e,
        r_Omega=inradius(domain),
    )
