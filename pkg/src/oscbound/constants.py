"""Closed-form constants and reduced one-dimensional minimizations.

Everything in this module is exact arithmetic on top of gamma/beta special
functions: measures of spherical caps and cones, sharp cone-average (Morrey)
constants, interpolation exponents, the two-term Hoelder-split minimization
that all oscillation estimates reduce to, and the explicit structural
constants used by the torsion stability pipeline (gradient bound, minimum
depth, weighted Poincare).  No discretization happens here.

Conventions
-----------
* Lebesgue-type norms are normalized: ``||g||_p`` means
  ``( (1/|D|) \\int_D |g|^p )^{1/p}`` over whichever region D applies.
* ``p = inf`` is represented by ``math.inf`` and handled as the exact limit
  of the finite-exponent formulas.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .errors import DomainError

INF = math.inf

__all__ = [
    "INF",
    "ExponentPair",
    "ConeSpec",
    "DomainScalars",
    "ConstantReport",
    "OscillationEstimate",
    "unit_ball_volume",
    "unit_sphere_area",
    "euler_beta",
    "cap_measure",
    "cone_measure",
    "alpha_pq",
    "morrey_cone_constant",
    "morrey_domain_constant",
    "two_term_minimize",
    "oscillation_bound",
    "psi_profile",
    "serrin_profile_exponent",
    "gradient_bound_M",
    "min_depth_bound",
    "weighted_poincare_structural_constant",
    "holder_conjugate",
    "near_field_coefficient",
    "far_field_coefficient",
]


# --------------------------------------------------------------------------
# record types
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ExponentPair:
    """A pair of integrability exponents ``1 <= p <= q <= inf`` in dimension N."""

    p: float
    q: float
    N: int

    def __post_init__(self) -> None:
        if int(self.N) != self.N or self.N < 2:
            raise DomainError(f"dimension must be an integer >= 2, got {self.N}")
        if not (1.0 <= self.p <= self.q):
            raise DomainError(f"need 1 <= p <= q, got p={self.p}, q={self.q}")


@dataclass(frozen=True, eq=False)
class ConeSpec:
    """A finite circular cone: vertex, unit axis, half-opening angle, height.

    The cone is ``{y : 0 < |y - vertex| <= height,
    <(y - vertex)/|y - vertex|, axis> > cos(theta)}``.  The axis is
    normalized on construction; ``theta`` must lie in (0, pi/2] and the
    height must be positive.
    """

    vertex: np.ndarray
    axis: np.ndarray
    theta: float
    height: float

    def __post_init__(self) -> None:
        vertex = np.asarray(self.vertex, dtype=float)
        axis = np.asarray(self.axis, dtype=float)
        if vertex.shape != axis.shape or vertex.ndim != 1:
            raise DomainError("vertex and axis must be 1-D arrays of equal length")
        norm = float(np.linalg.norm(axis))
        if not norm > 0.0:
            raise DomainError("cone axis must be nonzero")
        if not (0.0 < self.theta <= math.pi / 2.0):
            raise DomainError(f"half-opening angle must lie in (0, pi/2], got {self.theta}")
        if not self.height > 0.0:
            raise DomainError(f"cone height must be positive, got {self.height}")
        axis = axis / norm
        vertex.setflags(write=False)
        axis.setflags(write=False)
        object.__setattr__(self, "vertex", vertex)
        object.__setattr__(self, "axis", axis)

    @property
    def dim(self) -> int:
        return self.vertex.size


_SCALAR_TOL = 1e-9


@dataclass(frozen=True)
class DomainScalars:
    """Scalar geometry of a bounded domain with the standard consistency checks.

    ``r_i`` is the inscribed-ball radius measured from the domain's marked
    center, ``r_e`` the enclosing-ball radius from the same center, and
    ``r_Omega`` the unconstrained inradius.
    """

    N: int
    volume: float
    surface: float
    diameter: float
    r_i: float
    r_e: float
    r_Omega: float

    def __post_init__(self) -> None:
        if int(self.N) != self.N or self.N < 2:
            raise DomainError(f"dimension must be an integer >= 2, got {self.N}")
        for name in ("volume", "surface", "diameter", "r_i", "r_e", "r_Omega"):
            if not getattr(self, name) > 0.0:
                raise DomainError(f"{name} must be positive")
        ball = unit_ball_volume(self.N)
        checks = [
            ("|B| r_Omega^N <= |Omega|", ball * self.r_Omega**self.N, self.volume),
            ("|Omega| <= |B| d^N", self.volume, ball * self.diameter**self.N),
            ("N |B| r_Omega^{N-1} <= |Gamma|",
             self.N * ball * self.r_Omega ** (self.N - 1), self.surface),
            ("|Gamma| <= N |Omega| / r_i", self.surface, self.N * self.volume / self.r_i),
            ("r_i <= r_Omega", self.r_i, self.r_Omega),
            ("r_Omega <= d/2", self.r_Omega, self.diameter / 2.0),
        ]
        for label, lo, hi in checks:
            if lo > hi * (1.0 + _SCALAR_TOL):
                raise DomainError(f"domain scalars violate {label}: {lo:.12g} > {hi:.12g}")


@dataclass(frozen=True)
class ConstantReport:
    """A named constant, the inputs it was evaluated at, and how it was obtained."""

    name: str
    value: float
    inputs: dict[str, float] = field(default_factory=dict)
    provenance: str = ""

    def __post_init__(self) -> None:
        if not math.isfinite(self.value) or self.value < 0.0:
            raise DomainError(f"constant {self.name!r} must be finite and >= 0, got {self.value}")


@dataclass(frozen=True)
class OscillationEstimate:
    """Result of :func:`oscillation_bound`: the bound, its minimizing radius, regime tag."""

    value: float
    sigma_star: float
    regime: str
    alpha: float | None = None


# --------------------------------------------------------------------------
# measures on spheres and cones
# --------------------------------------------------------------------------

def unit_ball_volume(N: int) -> float:
    """Volume of the unit ball in R^N."""
    return math.pi ** (N / 2.0) / math.gamma(N / 2.0 + 1.0)


def unit_sphere_area(N: int) -> float:
    """Surface measure of the unit sphere S^{N-1} in R^N."""
    return N * unit_ball_volume(N)


def euler_beta(x: float, y: float) -> float:
    """Euler beta function B(x, y) for positive arguments, via log-gamma."""
    if not (x > 0.0 and y > 0.0):
        raise DomainError(f"beta function needs positive arguments, got ({x}, {y})")
    return math.exp(special.gammaln(x) + special.gammaln(y) - special.gammaln(x + y))


def cap_measure(theta: float, N: int) -> float:
    """Surface measure of the polar cap of half-angle theta on S^{N-1}.

    The cap is ``{omega in S^{N-1} : <omega, e> > cos(theta)}`` for any fixed
    unit vector e.  Valid for ``0 < theta <= pi/2``; the measure is computed
    from the regularized incomplete beta function, which reduces to arc
    length ``2 theta`` for N = 2 and to ``2 pi (1 - cos theta)`` for N = 3.
    """
    if int(N) != N or N < 2:
        raise DomainError(f"dimension must be an integer >= 2, got {N}")
    if not (0.0 < theta <= math.pi / 2.0):
        raise DomainError(f"cap half-angle must lie in (0, pi/2], got {theta}")
    if N == 2:
        return 2.0 * theta
    # |S^{N-2}| * int_0^theta sin^{N-2} t dt, with the sine integral expressed
    # through I_x(a, b) at x = sin^2(theta).
    sine_sq = math.sin(theta) ** 2
    a, b = (N - 1) / 2.0, 0.5
    partial = 0.5 * special.betainc(a, b, sine_sq) * euler_beta(a, b)
    return unit_sphere_area(N - 1) * partial


def cone_measure(spec: ConeSpec, N: int | None = None) -> float:
    """Lebesgue measure of a finite cone: cap measure times a^N / N."""
    dim = spec.dim if N is None else N
    if dim != spec.dim:
        raise DomainError(f"cone lives in dimension {spec.dim}, asked for {dim}")
    return cap_measure(spec.theta, dim) * spec.height**dim / dim


# --------------------------------------------------------------------------
# exponents and sharp cone constants
# --------------------------------------------------------------------------

def holder_conjugate(p: float) -> float:
    """Conjugate exponent p' = p/(p-1), with the conventions 1' = inf, inf' = 1."""
    if p == 1.0:
        return INF
    if p == INF:
        return 1.0
    if p < 1.0:
        raise DomainError(f"exponent must be >= 1, got {p}")
    return p / (p - 1.0)


def alpha_pq(pair: ExponentPair) -> float:
    """Interpolation weight alpha = p(q-N)/(N(q-p)) for 1 <= p <= N < q <= inf."""
    p, q, N = pair.p, pair.q, pair.N
    if p > N:
        raise DomainError(f"interpolation weight needs p <= N, got p={p} > N={N}")
    if q <= N:
        raise DomainError(f"interpolation weight needs q > N, got q={q} <= N={N}")
    if q == INF:
        return p / N
    return p * (q - N) / (N * (q - p))


def morrey_cone_constant(p: float, N: int, a: float) -> float:
    """Sharp constant of the cone-average gradient bound for p > N.

    For a cone C of height ``a`` in R^N the weighted kernel estimate gives
    ``|f(x) - f_C| <= c(p, N, a) ||grad f||_{p, C}`` with
    ``c = (a/N) B(1 - p'/N', p' + 1)^{1/p'}`` and the normalized norm on C.
    At p = inf the constant degenerates to ``a N / (N + 1)``, the exact
    average distance to the vertex.
    """
    if int(N) != N or N < 2:
        raise DomainError(f"dimension must be an integer >= 2, got {N}")
    if not a > 0.0:
        raise DomainError(f"cone height must be positive, got {a}")
    if not p > N:
        raise DomainError(f"cone-average constant needs p > N, got p={p}, N={N}")
    if p == INF:
        return a * N / (N + 1.0)
    pp = holder_conjugate(p)
    nn = holder_conjugate(N)
    return (a / N) * euler_beta(1.0 - pp / nn, pp + 1.0) ** (1.0 / pp)


def morrey_domain_constant(p: float, N: int, theta: float) -> float:
    """Geometry-normalized version of the cone constant for cones inside a domain.

    Returns ``k(N, p, theta) = B(1 - p'/N', p' + 1)^{1/p'} / (N^{1/p'}
    |S_theta|^{1/p})``; for a cone of height a sitting inside a domain of
    volume V this packages the norm inflation so that
    ``|f(x) - f_{C_x}| <= k a^{1 - N/p} V^{1/p} ||grad f||_{p}`` with the
    norm normalized over the whole domain.
    """
    if int(N) != N or N < 2:
        raise DomainError(f"dimension must be an integer >= 2, got {N}")
    if not p > N:
        raise DomainError(f"domain constant needs p > N, got p={p}, N={N}")
    cap = cap_measure(theta, N)
    if p == INF:
        # p' -> 1 and the cap exponent 1/p -> 0.
        return euler_beta(1.0 / N, 2.0) / N
    pp = holder_conjugate(p)
    nn = holder_conjugate(N)
    beta_val = euler_beta(1.0 - pp / nn, pp + 1.0)
    return beta_val ** (1.0 / pp) / (N ** (1.0 / pp) * cap ** (1.0 / p))


# --------------------------------------------------------------------------
# two-term minimization
# --------------------------------------------------------------------------

def _golden_min(fun, lo: float, hi: float, iters: int = 220) -> float:
    """Golden-section minimizer for a scalar convex function on [lo, hi]."""
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - inv_phi * (hi - lo)
    x2 = lo + inv_phi * (hi - lo)
    f1, f2 = fun(x1), fun(x2)
    for _ in range(iters):
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - inv_phi * (hi - lo)
            f1 = fun(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + inv_phi * (hi - lo)
            f2 = fun(x2)
    return x1 if f1 <= f2 else x2


def two_term_minimize(
    A: float,
    B: float,
    expA: float,
    expB: float,
    a: float,
    log_variant: bool = False,
) -> tuple[float, float]:
    """Minimize a two-term upper bound over the split radius sigma.

    Power mode minimizes ``A (sigma/a)^{expA} + B (sigma/a)^{expB}`` over
    ``sigma in (0, a]`` and needs ``expA > 0 > expB``.  Log mode minimizes
    ``A (sigma/a)^{expA} + B log(a/sigma)`` over ``sigma in (0, a/e]``
    (``expB`` is ignored).  Minimization runs on the objective itself —
    golden-section in log(sigma), which is exact-friendly because both
    objectives are convex there — so boundary exponents such as p = 1 need
    no special-casing.

    Returns ``(sigma_star, bound)``.  Degenerate coefficients follow the
    fixed conventions: both zero -> ``(a, 0)``; ``B = 0`` -> the infimum 0
    approached as sigma -> 0, reported as ``(0, 0)``.
    """
    if A < 0.0 or B < 0.0:
        raise DomainError(f"coefficients must be >= 0, got A={A}, B={B}")
    if not a > 0.0:
        raise DomainError(f"range bound must be positive, got {a}")
    if A == 0.0 and B == 0.0:
        return a, 0.0
    if B == 0.0:
        if not expA > 0.0:
            raise DomainError(f"need expA > 0, got {expA}")
        return 0.0, 0.0

    if log_variant:
        if not expA > 0.0:
            raise DomainError(f"log mode needs expA > 0, got {expA}")
        t_hi = -1.0  # sigma <= a/e
        if A == 0.0:
            return a / math.e, B  # B log(a/sigma) is decreasing in sigma

        def objective(t: float) -> float:
            return A * math.exp(expA * t) - B * t

        # interior critical point exp(expA t) = B/(A expA)
        t_crit = math.log(B / (A * expA)) / expA
        t_lo = min(t_hi - 40.0, t_crit - 2.0)
        t_star = min(_golden_min(objective, t_lo, t_hi), t_hi)
        candidates = [min(t_crit, t_hi), t_hi, t_star]
        best = min(candidates, key=objective)
        return a * math.exp(best), objective(best)

    if not (expA > 0.0 and expB < 0.0):
        raise DomainError(
            f"power mode needs expA > 0 and expB < 0, got expA={expA}, expB={expB}"
        )
    if A == 0.0:
        return a, B  # decreasing objective, boundary minimum at sigma = a

    def objective(t: float) -> float:
        return A * math.exp(expA * t) + B * math.exp(expB * t)

    t_crit = math.log(B * (-expB) / (A * expA)) / (expA - expB)
    t_lo = min(-45.0, t_crit - 2.0)
    t_star = _golden_min(objective, t_lo, 0.0)
    candidates = [min(t_crit, 0.0), 0.0, t_star]
    best = min(candidates, key=objective)
    return a * math.exp(best), objective(best)


# --------------------------------------------------------------------------
# oscillation bound on star-shaped domains
# --------------------------------------------------------------------------

def near_field_coefficient(q: float, N: int) -> float:
    """Hoelder constant of the kernel |z|^{1-N} over a ball, exponent q > N.

    ``( int_{B_sigma} |z|^{(1-N) q'} dz )^{1/q'} = C sigma^{1 - N/q}`` with
    ``C = [N |B_1| (q-1)/(q-N)]^{1 - 1/q}``; the limit q = inf gives N |B_1|.
    """
    if not q > N:
        raise DomainError(f"near-field coefficient needs q > N, got q={q}, N={N}")
    nb = N * unit_ball_volume(N)
    if q == INF:
        return nb
    return (nb * (q - 1.0) / (q - N)) ** (1.0 - 1.0 / q)


def far_field_coefficient(p: float, N: int) -> float:
    """Hoelder constant of |z|^{1-N} outside a ball, exponent 1 <= p < N.

    ``( int_{R^N \\ B_sigma} |z|^{(1-N) p'} dz )^{1/p'} = C sigma^{1 - N/p}``
    with ``C = [N |B_1| (p-1)/(N-p)]^{1 - 1/p}``; the limit p = 1 gives 1
    (the kernel supremum).
    """
    if not (1.0 <= p < N):
        raise DomainError(f"far-field coefficient needs 1 <= p < N, got p={p}, N={N}")
    if p == 1.0:
        return 1.0
    nb = N * unit_ball_volume(N)
    return (nb * (p - 1.0) / (N - p)) ** (1.0 - 1.0 / p)


def oscillation_bound(
    grad_p: float,
    grad_q: float,
    pair: ExponentPair,
    diameter: float,
    star_radius: float,
    volume: float,
) -> OscillationEstimate:
    """Constructive oscillation bound for a domain star-shaped about a ball.

    For a domain of volume V and diameter d that is star-shaped with respect
    to a ball of radius ``star_radius``, averaging over that ball along
    segments gives ``|f(x) - f_B| <= (d^N / (N |B_rho|)) int_Omega
    |grad f| |x-y|^{1-N} dy`` for every interior point, hence an oscillation
    bound after the kernel integral is split at radius sigma and each part is
    estimated by Hoelder's inequality.  The split is optimized by
    :func:`two_term_minimize`.  Norms are normalized by the domain volume.

    Regimes: ``p > N`` uses the single near-field estimate at sigma = d
    (``grad_q`` is ignored); ``p = N`` pairs the q-norm near field with a
    dyadic-shell N-norm far field, linear in log(d/sigma); ``p < N < q``
    interpolates between the q-norm near field and the p-norm far field,
    reproducing the ``||grad f||_p^alpha ||grad f||_q^{1-alpha}`` shape when
    the optimal sigma is interior.
    """
    if grad_p < 0.0 or grad_q < 0.0:
        raise DomainError("gradient norms must be >= 0")
    if not (diameter > 0.0 and star_radius > 0.0 and volume > 0.0):
        raise DomainError("diameter, star_radius, volume must be positive")
    if star_radius > diameter:
        raise DomainError("star_radius cannot exceed the diameter")
    p, q, N = pair.p, pair.q, pair.N
    ball = unit_ball_volume(N)
    d = diameter
    prefactor = 2.0 * d**N / (N * ball * star_radius**N)

    def raw(norm: float, expo: float) -> float:
        # normalized norm -> plain Lebesgue norm over the domain
        return norm if expo == INF else norm * volume ** (1.0 / expo)

    if p > N:
        coeff = near_field_coefficient(p, N)
        exp_p = 0.0 if p == INF else N / p
        value = prefactor * coeff * raw(grad_p, p) * d ** (1.0 - exp_p)
        return OscillationEstimate(value=value, sigma_star=d, regime="morrey")

    if q <= N:
        raise DomainError(f"regimes with p <= N need q > N, got q={q}, N={N}")
    eA = 1.0 - (0.0 if q == INF else N / q)
    A = near_field_coefficient(q, N) * raw(grad_q, q) * d**eA

    if p == N:
        # dyadic shells: each shell of ratio 2 contributes at most
        # ||grad f||_N (N |B_1| log 2)^{1 - 1/N}, and there are at most
        # 1 + log2(d/sigma) shells outside B_sigma.
        shell = raw(grad_p, N) * (N * ball * math.log(2.0)) ** (1.0 - 1.0 / N)
        sigma, inner = two_term_minimize(
            A, shell / math.log(2.0), eA, 0.0, d, log_variant=True
        )
        return OscillationEstimate(
            value=prefactor * (shell + inner), sigma_star=sigma, regime="log"
        )

    eB = 1.0 - N / p
    B = far_field_coefficient(p, N) * raw(grad_p, p) * d**eB
    sigma, inner = two_term_minimize(A, B, eA, eB, d)
    return OscillationEstimate(
        value=prefactor * inner,
        sigma_star=sigma,
        regime="interpolation",
        alpha=alpha_pq(pair),
    )


# --------------------------------------------------------------------------
# stability profiles and structural constants
# --------------------------------------------------------------------------

_REGULARITIES = ("C2", "C2gamma")


def _check_regularity(regularity: str) -> None:
    if regularity not in _REGULARITIES:
        raise DomainError(f"regularity must be one of {_REGULARITIES}, got {regularity!r}")


def psi_profile(sigma: float, N: int, regularity: str = "C2gamma", q: float = INF) -> float:
    """Dimension-dependent stability profile evaluated at deviation sigma >= 0.

    ``sigma`` itself for N in {2, 3}; ``sigma * max(log(1/sigma), 1)`` for
    N = 4; ``sigma^tau`` for N >= 5 with ``tau = 4/N`` for C^{2,gamma}
    boundaries and ``tau = 4/N - 2(N-4)/(N(q-2))`` for C^2 boundaries with
    finite q > N.
    """
    if sigma < 0.0:
        raise DomainError(f"deviation must be >= 0, got {sigma}")
    if int(N) != N or N < 2:
        raise DomainError(f"dimension must be an integer >= 2, got {N}")
    _check_regularity(regularity)
    if N in (2, 3):
        return float(sigma)
    if N == 4:
        if sigma == 0.0:
            return 0.0
        return sigma * max(math.log(1.0 / sigma), 1.0)
    if regularity == "C2gamma" or q == INF:
        tau = 4.0 / N
    else:
        if not q > N:
            raise DomainError(f"C2 profile needs q > N, got q={q}, N={N}")
        tau = 4.0 / N - 2.0 * (N - 4.0) / (N * (q - 2.0))
    return float(sigma) ** tau


def serrin_profile_exponent(N: int, q: float = INF, regularity: str = "C2") -> float:
    """Stability exponent for the overdetermined (constant normal derivative) problem.

    Defined for N >= 4: ``(4 - 2N/q) / (N + 1 - 2N/q)`` for C^2 boundaries
    with finite q > N, with the C^{2,gamma} / q -> inf limit ``4/(N+1)``.
    Dimensions N <= 3 do not use this exponent and raise a domain error.
    """
    if int(N) != N or N < 2:
        raise DomainError(f"dimension must be an integer >= 2, got {N}")
    if N <= 3:
        raise DomainError(f"profile exponent is only used for N >= 4, got N={N}")
    _check_regularity(regularity)
    if regularity == "C2gamma" or q == INF:
        return 4.0 / (N + 1.0)
    if not q > N:
        raise DomainError(f"need q > N, got q={q}, N={N}")
    return (4.0 - 2.0 * N / q) / (N + 1.0 - 2.0 * N / q)


def gradient_bound_M(N: int, d: float, r_e: float) -> float:
    """Explicit global gradient bound M = (N+1) d (d + r_e) / (2 r_e)."""
    if int(N) != N or N < 2:
        raise DomainError(f"dimension must be an integer >= 2, got {N}")
    if not (d > 0.0 and r_e > 0.0):
        raise DomainError("diameter and exterior radius must be positive")
    return (N + 1.0) * d * (d + r_e) / (2.0 * r_e)


def min_depth_bound(
    N: int,
    r_Omega: float,
    d: float | None = None,
    r_e: float | None = None,
    mean_convex: bool = False,
) -> float:
    """Lower bound on the boundary distance of the torsion minimum point.

    ``r_Omega / sqrt(N)`` for mean-convex domains; in general the same value
    damped by ``[1 + ((N^2-1)/(2N)) (d/r_e)(1 + d/r_e)]^{-1/2}``.
    """
    if int(N) != N or N < 2:
        raise DomainError(f"dimension must be an integer >= 2, got {N}")
    if not r_Omega > 0.0:
        raise DomainError("inradius must be positive")
    base = r_Omega / math.sqrt(N)
    if mean_convex:
        return base
    if d is None or r_e is None or not (d > 0.0 and r_e > 0.0):
        raise DomainError("general bound needs positive diameter and exterior radius")
    bracket = 1.0 + ((N * N - 1.0) / (2.0 * N)) * (d / r_e) * (1.0 + d / r_e)
    return base / math.sqrt(bracket)


def weighted_poincare_structural_constant(
    N: int,
    r: float,
    p: float,
    alpha: float,
    volume: float,
    d: float,
    r_i: float,
    r_e: float,
    mean_convex: bool = False,
    calibration_k: float = 1.0,
) -> float:
    """Structural constant of the distance-weighted Poincare inequality.

    Returns ``k * |Omega|^{(1-alpha)/N} (d/r_i)^N [N + (N^2-1)(d/(2 r_e))
    (1 + d/r_e)]^{N/2}``, dropping the bracket for mean-convex domains.
    ``calibration_k`` stands in for the absolute constant that depends only
    on (N, r, p, alpha); the admissible exponent window is
    ``1 <= p <= r <= Np/(N - p(1-alpha))`` with ``p(1-alpha) < N`` and
    ``0 <= alpha <= 1``.
    """
    if int(N) != N or N < 2:
        raise DomainError(f"dimension must be an integer >= 2, got {N}")
    if not (0.0 <= alpha <= 1.0):
        raise DomainError(f"weight exponent must lie in [0, 1], got {alpha}")
    if not 1.0 <= p <= r:
        raise DomainError(f"need 1 <= p <= r, got p={p}, r={r}")
    if not p * (1.0 - alpha) < N:
        raise DomainError(f"need p(1-alpha) < N, got p={p}, alpha={alpha}, N={N}")
    r_cap = N * p / (N - p * (1.0 - alpha))
    if r > r_cap * (1.0 + 1e-12):
        raise DomainError(f"need r <= Np/(N - p(1-alpha)) = {r_cap:.6g}, got r={r}")
    if not (volume > 0.0 and d > 0.0 and r_i > 0.0 and r_e > 0.0):
        raise DomainError("volume, diameter and radii must be positive")
    if not calibration_k > 0.0:
        raise DomainError("calibration constant must be positive")
    value = calibration_k * volume ** ((1.0 - alpha) / N) * (d / r_i) ** N
    if not mean_convex:
        value *= (N + (N * N - 1.0) * (d / (2.0 * r_e)) * (1.0 + d / r_e)) ** (N / 2.0)
    return value
