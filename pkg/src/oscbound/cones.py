"""Pointwise cone inequalities verified by product Gauss quadrature.

Every estimate of the analytic layer reduces to integrals of
``|grad f(y)| |y - x|^{1-N}`` over a finite cone with vertex x.  Working in
vertex-polar coordinates cancels the kernel singularity against the
``s^{N-1}`` Jacobian exactly, so plain product Gauss quadrature converges at
spectral rate and the inequalities can be checked to tight slack on a fixed
catalog of closed-form fields.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.stats import qmc

from .constants import (
    INF,
    ConeSpec,
    ExponentPair,
    cone_measure,
    holder_conjugate,
    morrey_cone_constant,
    two_term_minimize,
)
from .errors import DomainError, GeometryError

Array = np.ndarray

__all__ = [
    "AnalyticField",
    "QuadratureRule",
    "ConeCheck",
    "riesz_potential",
    "cone_average",
    "lp_norm_cone",
    "cone_samples",
    "verify_pointwise_cone",
    "verify_morrey_cone",
    "verify_interpolation_cone",
    "catalog_fields",
    "catalog_cones",
    "default_exponent_grid",
    "run_cone_sweep",
    "scale_field",
]


# --------------------------------------------------------------------------
# analytic fields
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class AnalyticField:
    """A closed-form scalar field with its exact gradient (hessian optional).

    ``value`` maps an (M, dim) array of points to (M,) values; ``gradient``
    maps it to (M, dim).  The gradient is validated against central finite
    differences by :meth:`self_check`.
    """

    label: str
    value: Callable[[Array], Array]
    gradient: Callable[[Array], Array]
    hessian: Callable[[Array], Array] | None = None

    def gradient_magnitude(self, points: Array) -> Array:
        return np.linalg.norm(np.asarray(self.gradient(points), dtype=float), axis=-1)

    def self_check(self, dim: int, n: int = 100, seed: int = 7, tol: float = 1e-6) -> float:
        """Max relative deviation of the gradient from central differences."""
        rng = np.random.default_rng(seed)
        pts = rng.uniform(0.3, 1.5, size=(n, dim))
        grad = np.asarray(self.gradient(pts), dtype=float)
        fd = np.empty_like(grad)
        h = 1e-6
        for j in range(dim):
            step = np.zeros(dim)
            step[j] = h
            fd[:, j] = (self.value(pts + step) - self.value(pts - step)) / (2.0 * h)
        scale = np.maximum(np.linalg.norm(grad, axis=1), 1.0)
        worst = float(np.max(np.linalg.norm(grad - fd, axis=1) / scale))
        if worst > tol:
            raise DomainError(
                f"field {self.label!r}: gradient disagrees with finite differences "
                f"(max relative deviation {worst:.3e} > {tol:.1e})"
            )
        return worst


def scale_field(field: AnalyticField, lam: float) -> AnalyticField:
    """The field lam * f, used by linearity checks."""
    return AnalyticField(
        label=f"{field.label}*{lam:g}",
        value=lambda pts: lam * field.value(pts),
        gradient=lambda pts: lam * np.asarray(field.gradient(pts)),
        hessian=None if field.hessian is None
        else (lambda pts: lam * np.asarray(field.hessian(pts))),
    )


# --------------------------------------------------------------------------
# quadrature on cones
# --------------------------------------------------------------------------

def _gauss_on(a: float, b: float, n: int) -> tuple[Array, Array]:
    xi, w = np.polynomial.legendre.leggauss(n)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    return mid + half * xi, half * w


def _orthonormal_frame(axis: Array) -> tuple[Array, Array]:
    pick = int(np.argmin(np.abs(axis)))
    e = np.zeros(3)
    e[pick] = 1.0
    u = np.cross(axis, e)
    u /= np.linalg.norm(u)
    return u, np.cross(axis, u)


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Product rule on a cone: Gauss radially, Gauss/uniform over the cap.

    ``weights`` are plain Lebesgue weights (they include the ``s^{N-1}``
    Jacobian) and sum to the cone measure; ``radii`` caches the distance of
    each node to the vertex so kernel powers never touch the singularity.
    For dimension 3 the polar angle is handled through cos(beta), keeping the
    cap factor polynomially exact, and the azimuth uses uniform points
    (trapezoidal rule, exact for trigonometric degree < n_angular).
    """

    cone: ConeSpec
    n_radial: int
    n_angular: int
    radial_nodes: Array
    radial_weights: Array      # weights for ds on (0, a), no Jacobian
    directions: Array          # (K, dim) unit vectors inside the cap
    direction_weights: Array   # (K,), sum = |S_theta|
    points: Array              # (n_radial * K, dim)
    radii: Array               # (n_radial * K,)
    weights: Array             # Lebesgue weights, sum = |C|

    @property
    def count(self) -> int:
        return self.points.shape[0]

    @staticmethod
    def build(cone: ConeSpec, n_radial: int = 48, n_angular: int = 48) -> "QuadratureRule":
        dim = cone.dim
        if dim not in (2, 3):
            raise DomainError(f"cone quadrature supports dimensions 2 and 3, got {dim}")
        s, ws = _gauss_on(0.0, cone.height, n_radial)

        if dim == 2:
            psi0 = math.atan2(cone.axis[1], cone.axis[0])
            phi, dw = _gauss_on(psi0 - cone.theta, psi0 + cone.theta, n_angular)
            dirs = np.stack([np.cos(phi), np.sin(phi)], axis=1)
        else:
            n_c = max(6, n_angular // 4)
            c, wc = _gauss_on(math.cos(cone.theta), 1.0, n_c)
            gamma = 2.0 * math.pi * np.arange(n_angular) / n_angular
            u, v = _orthonormal_frame(cone.axis)
            sin_b = np.sqrt(np.clip(1.0 - c * c, 0.0, None))
            dirs = (
                c[:, None, None] * cone.axis[None, None, :]
                + sin_b[:, None, None]
                * (np.cos(gamma)[None, :, None] * u + np.sin(gamma)[None, :, None] * v)
            ).reshape(-1, 3)
            dw = np.repeat(wc * (2.0 * math.pi / n_angular), n_angular)

        pts = (cone.vertex[None, None, :] + s[:, None, None] * dirs[None, :, :])
        radii = np.repeat(s, dirs.shape[0])
        w = (ws * s ** (dim - 1))[:, None] * dw[None, :]
        return QuadratureRule(
            cone=cone,
            n_radial=n_radial,
            n_angular=n_angular,
            radial_nodes=s,
            radial_weights=ws,
            directions=dirs,
            direction_weights=dw,
            points=pts.reshape(-1, dim),
            radii=radii,
            weights=w.reshape(-1),
        )

    def refined(self, factor: int = 2) -> "QuadratureRule":
        return QuadratureRule.build(self.cone, factor * self.n_radial,
                                    factor * self.n_angular)


def _rule_for(cone: ConeSpec, rule: QuadratureRule | None,
              n_radial: int = 48, n_angular: int = 48) -> QuadratureRule:
    if rule is None:
        return QuadratureRule.build(cone, n_radial, n_angular)
    same = (
        rule.cone is cone
        or (rule.cone.theta == cone.theta and rule.cone.height == cone.height
            and np.array_equal(rule.cone.vertex, cone.vertex)
            and np.array_equal(rule.cone.axis, cone.axis))
    )
    if not same:
        raise DomainError("quadrature rule was built for a different cone")
    return rule


def cone_samples(cone: ConeSpec, count: int = 10_000) -> Array:
    """Deterministic quasi-random points filling the cone (for sup norms)."""
    dim = cone.dim
    u = qmc.Halton(d=dim, scramble=False).random(count)
    s = cone.height * u[:, 0] ** (1.0 / dim)
    if dim == 2:
        psi0 = math.atan2(cone.axis[1], cone.axis[0])
        phi = psi0 + cone.theta * (2.0 * u[:, 1] - 1.0)
        dirs = np.stack([np.cos(phi), np.sin(phi)], axis=1)
    else:
        c = 1.0 - u[:, 1] * (1.0 - math.cos(cone.theta))
        gamma = 2.0 * math.pi * u[:, 2]
        ub, vb = _orthonormal_frame(cone.axis)
        sin_b = np.sqrt(np.clip(1.0 - c * c, 0.0, None))
        dirs = (
            c[:, None] * cone.axis[None, :]
            + sin_b[:, None] * (np.cos(gamma)[:, None] * ub + np.sin(gamma)[:, None] * vb)
        )
    return cone.vertex[None, :] + s[:, None] * dirs


# --------------------------------------------------------------------------
# cached per-(cone, field) evaluations
# --------------------------------------------------------------------------

class _ConeFieldData:
    """Lazy cache of the quantities every check re-uses."""

    def __init__(self, cone: ConeSpec, field: AnalyticField,
                 rule: QuadratureRule, samples: Array | None = None):
        self.cone = cone
        self.field = field
        self.rule = rule
        self._samples = samples
        self._grad_rule: Array | None = None
        self._grad_samples: Array | None = None
        self._norms: dict[float, float] = {}
        self._riesz: dict[bool, float] = {}
        self._average: float | None = None

    @property
    def samples(self) -> Array:
        if self._samples is None:
            self._samples = cone_samples(self.cone)
        return self._samples

    def sup_points(self) -> Array:
        # quasi-random fill plus the closed-cone extremes the open rule misses:
        # the vertex and the outer shell at the angular nodes.
        shell = self.cone.vertex[None, :] + self.cone.height * self.rule.directions
        return np.vstack([self.samples, shell, self.cone.vertex[None, :]])

    def grad_on_rule(self) -> Array:
        if self._grad_rule is None:
            self._grad_rule = self.field.gradient_magnitude(self.rule.points)
        return self._grad_rule

    def grad_on_samples(self) -> Array:
        if self._grad_samples is None:
            self._grad_samples = self.field.gradient_magnitude(self.sup_points())
        return self._grad_samples

    def vertex_value(self) -> float:
        return float(self.field.value(self.cone.vertex[None, :])[0])

    def average(self) -> float:
        if self._average is None:
            vals = np.asarray(self.field.value(self.rule.points), dtype=float)
            self._average = float(np.sum(self.rule.weights * vals)) / cone_measure(self.cone)
        return self._average

    def pointwise_lhs(self) -> float:
        return abs(self.vertex_value() - self.average())

    def riesz(self, weighted: bool) -> float:
        if weighted not in self._riesz:
            dim = self.cone.dim
            kernel_w = self.rule.weights / self.rule.radii ** (dim - 1)
            if weighted:
                kernel_w = kernel_w * (self.cone.height**dim - self.rule.radii**dim) / dim
            self._riesz[weighted] = float(
                np.sum(kernel_w * self.grad_on_rule())
            ) / cone_measure(self.cone)
        return self._riesz[weighted]

    def norm(self, p: float) -> float:
        if p not in self._norms:
            if p == INF:
                val = max(float(np.max(self.grad_on_rule())),
                          float(np.max(self.grad_on_samples())))
            else:
                mags = self.grad_on_rule()
                val = float(
                    np.sum(self.rule.weights * mags**p) / cone_measure(self.cone)
                ) ** (1.0 / p)
            self._norms[p] = val
        return self._norms[p]


# --------------------------------------------------------------------------
# integrals and norms (public API)
# --------------------------------------------------------------------------

def riesz_potential(
    cone: ConeSpec,
    field: AnalyticField,
    weighted: bool = False,
    rule: QuadratureRule | None = None,
    check: bool = False,
) -> float:
    """Kernel integral ``int_C |grad f(y)| |y-x|^{1-N} w(y) dmu_y``.

    ``w = (a^N - |y-x|^N)/N`` in the weighted variant and ``w = 1`` in the
    plain variant; the measure is normalized, ``dmu = dy/|C|``.  Computed in
    vertex-polar coordinates, where the kernel is cancelled by the Jacobian
    analytically.  With ``check=True`` the rule orders are doubled and a
    relative drift above 1e-8 raises :class:`GeometryError`.
    """
    rule = _rule_for(cone, rule)
    value = _ConeFieldData(cone, field, rule).riesz(weighted)
    if check:
        refined = _ConeFieldData(cone, field, rule.refined()).riesz(weighted)
        drift = abs(refined - value) / max(abs(refined), 1e-300)
        if drift > 1e-8:
            raise GeometryError(
                f"riesz potential did not converge for {field.label!r}: drift {drift:.2e}"
            )
    return value


def cone_average(
    cone: ConeSpec,
    field: AnalyticField,
    rule: QuadratureRule | None = None,
) -> float:
    """Mean of the field over the cone w.r.t. the normalized measure."""
    return _ConeFieldData(cone, field, _rule_for(cone, rule)).average()


def lp_norm_cone(
    cone: ConeSpec,
    vector_field: Callable[[Array], Array] | AnalyticField,
    p: float,
    rule: QuadratureRule | None = None,
    sup_samples: int = 10_000,
) -> float:
    """Normalized L^p norm of a (vector or scalar) field over the cone.

    ``p = inf`` is an essential sup estimated as the max over the quadrature
    nodes plus a deterministic quasi-random filling of the cone.
    """
    if not (p == INF or p >= 1.0):
        raise DomainError(f"exponent must be in [1, inf], got {p}")
    field_fn = vector_field.gradient if isinstance(vector_field, AnalyticField) else vector_field

    def magnitude(points: Array) -> Array:
        out = np.asarray(field_fn(points), dtype=float)
        return np.abs(out) if out.ndim == 1 else np.linalg.norm(out, axis=-1)

    rule = _rule_for(cone, rule)
    if p == INF:
        shell = cone.vertex[None, :] + cone.height * rule.directions
        best = max(float(np.max(magnitude(rule.points))),
                   float(np.max(magnitude(shell))),
                   float(np.max(magnitude(cone.vertex[None, :]))))
        if sup_samples > 0:
            best = max(best, float(np.max(magnitude(cone_samples(cone, sup_samples)))))
        return best
    mags = magnitude(rule.points)
    return float(np.sum(rule.weights * mags**p) / cone_measure(cone)) ** (1.0 / p)


# --------------------------------------------------------------------------
# margin checks
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ConeCheck:
    """One verified inequality instance: lhs <= rhs with margin = rhs - lhs."""

    field: str
    theta: float
    a: float
    check: str
    lhs: float
    rhs: float
    p: float | None = None
    q: float | None = None
    sigma: float | None = None

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    def ok(self, slack: float = 1e-9) -> bool:
        return self.margin >= -slack


def _pointwise_checks(data: _ConeFieldData) -> list[ConeCheck]:
    cone = data.cone
    lhs = data.pointwise_lhs()
    rhs_weighted = data.riesz(weighted=True)
    rhs_plain = (cone.height**cone.dim / cone.dim) * data.riesz(weighted=False)
    common = dict(field=data.field.label, theta=cone.theta, a=cone.height, lhs=lhs)
    return [
        ConeCheck(check="pointwise_weighted", rhs=rhs_weighted, **common),
        ConeCheck(check="pointwise_plain", rhs=rhs_plain, **common),
    ]


def _morrey_check(data: _ConeFieldData, p: float) -> ConeCheck:
    cone = data.cone
    N = cone.dim
    if not p > N:
        raise DomainError(f"cone-average bound needs p > N, got p={p}, N={N}")
    rhs = morrey_cone_constant(p, N, cone.height) * data.norm(p)
    return ConeCheck(field=data.field.label, theta=cone.theta, a=cone.height,
                     check="morrey", lhs=data.pointwise_lhs(), rhs=rhs, p=p)


def _interpolation_check(data: _ConeFieldData, pair: ExponentPair) -> ConeCheck:
    cone = data.cone
    N = cone.dim
    p, q = pair.p, pair.q
    if pair.N != N:
        raise DomainError(f"exponent pair is for N={pair.N}, cone has N={N}")
    if p > N or q <= N:
        raise DomainError(f"interpolation needs 1 <= p <= N < q, got p={p}, q={q}")
    a = cone.height
    lhs = a ** (N - 1) * data.riesz(weighted=False)
    norm_q = data.norm(q)

    if p < N:
        norm_p = data.norm(p)
        coef_a = N if q == INF else (N * (q - 1.0) / (q - N)) ** (1.0 - 1.0 / q)
        coef_b = 1.0 if p == 1.0 else (N * (p - 1.0) / (N - p)) ** (1.0 - 1.0 / p)
        exp_a = 1.0 if q == INF else 1.0 - N / q
        sigma, rhs = two_term_minimize(coef_a * norm_q, coef_b * norm_p,
                                       exp_a, 1.0 - N / p, a)
        return ConeCheck(field=data.field.label, theta=cone.theta, a=a,
                         check="interp_power", lhs=lhs, rhs=rhs, p=p, q=q, sigma=sigma)

    norm_n = data.norm(float(N))
    if norm_n == 0.0 or norm_q == 0.0:
        rhs, sigma = 0.0, a
    else:
        qq = holder_conjugate(q)
        factor = 1.0 if q == INF else q / (q - N)
        rhs = N * factor * norm_n * math.log(math.e * norm_q / (qq * norm_n))
        sigma = a * min((qq * norm_n / norm_q) ** factor, 1.0)
    return ConeCheck(field=data.field.label, theta=cone.theta, a=a,
                     check="interp_log", lhs=lhs, rhs=rhs, p=p, q=q, sigma=sigma)


def verify_pointwise_cone(
    cone: ConeSpec,
    field: AnalyticField,
    rule: QuadratureRule | None = None,
) -> list[ConeCheck]:
    """Margins of the two pointwise vertex bounds (weighted and plain kernel).

    The weighted bound is ``|f(x) - f_C| <= int_C |grad f| |y-x|^{1-N}
    (a^N - |y-x|^N)/N dmu``; the plain variant replaces the weight by its
    supremum ``a^N/N``.
    """
    return _pointwise_checks(_ConeFieldData(cone, field, _rule_for(cone, rule)))


def verify_morrey_cone(
    cone: ConeSpec,
    field: AnalyticField,
    p: float,
    rule: QuadratureRule | None = None,
) -> ConeCheck:
    """Margin of ``|f(x) - f_C| <= c(p, N, a) ||grad f||_{p,C}`` for p > N."""
    return _morrey_check(_ConeFieldData(cone, field, _rule_for(cone, rule)), p)


def verify_interpolation_cone(
    cone: ConeSpec,
    field: AnalyticField,
    pair: ExponentPair,
    rule: QuadratureRule | None = None,
) -> ConeCheck:
    """Margin of the interpolated kernel bound for ``1 <= p <= N < q``.

    The left side is ``a^{N-1}`` times the plain kernel integral.  For
    ``p < N`` the right side replays the two-term split: the q-norm controls
    the cone up to radius sigma, the p-norm the rest, and the split radius is
    optimized numerically.  For ``p = N`` the right side is the explicit
    log-interpolation bound ``N (q/(q-N)) ||grad f||_N
    log(e ||grad f||_q / (q' ||grad f||_N))`` (its q -> inf limit when
    q = inf); the reported sigma is the closed-form minimizing radius.
    """
    return _interpolation_check(_ConeFieldData(cone, field, _rule_for(cone, rule)), pair)


# --------------------------------------------------------------------------
# catalogs and the sweep
# --------------------------------------------------------------------------

def _coef(dim: int, values: Sequence[float]) -> Array:
    out = np.zeros(dim)
    take = min(dim, len(values))
    out[:take] = values[:take]
    return out


def catalog_fields(dim: int = 2) -> list[AnalyticField]:
    """The fixed, versioned test-field catalog (24 fields, any dim >= 2)."""
    c_mix = _coef(dim, [0.6, -0.8, 0.2])
    c_wave = _coef(dim, [3.0, -2.0, 1.0])
    c_exp = _coef(dim, [0.3, -0.4, 0.25])
    c_shift = _coef(dim, [0.5, 0.4, -0.3])
    e0 = _coef(dim, [1.0])
    e01 = _coef(dim, [1.0, 1.0])
    e12 = _coef(dim, [1.0, 2.0])
    scales = 1.0 + np.arange(dim)

    def radial2(pts):
        return np.sum(pts * pts, axis=1)

    def pad(cols: list[Array], m: int) -> Array:
        out = np.zeros((m, dim))
        for j, col in enumerate(cols):
            out[:, j] = col
        return out

    return [
        AnalyticField("const_one",
                      lambda y: np.ones(y.shape[0]),
                      lambda y: np.zeros_like(y)),
        AnalyticField("affine_axis",
                      lambda y: y[:, 0].copy(),
                      lambda y: np.tile(e0, (y.shape[0], 1))),
        AnalyticField("affine_mix",
                      lambda y: y @ c_mix,
                      lambda y: np.tile(c_mix, (y.shape[0], 1))),
        AnalyticField("quad_radial",
                      radial2,
                      lambda y: 2.0 * y),
        AnalyticField("quad_aniso",
                      lambda y: np.sum(scales * y * y, axis=1),
                      lambda y: 2.0 * scales * y),
        AnalyticField("cross_xy",
                      lambda y: y[:, 0] * y[:, 1],
                      lambda y: pad([y[:, 1], y[:, 0]], y.shape[0])),
        AnalyticField("harmonic_cubic",
                      lambda y: y[:, 0] ** 3 - 3.0 * y[:, 0] * y[:, 1] ** 2,
                      lambda y: pad([3.0 * (y[:, 0] ** 2 - y[:, 1] ** 2),
                                     -6.0 * y[:, 0] * y[:, 1]], y.shape[0])),
        AnalyticField("quartic_radial",
                      lambda y: radial2(y) ** 2,
                      lambda y: 4.0 * radial2(y)[:, None] * y),
        AnalyticField("gauss_origin",
                      lambda y: np.exp(-radial2(y)),
                      lambda y: -2.0 * np.exp(-radial2(y))[:, None] * y),
        AnalyticField("gauss_sharp",
                      lambda y: np.exp(-4.0 * radial2(y)),
                      lambda y: -8.0 * np.exp(-4.0 * radial2(y))[:, None] * y),
        AnalyticField("gauss_shift",
                      lambda y: np.exp(-np.sum((y - c_shift) ** 2, axis=1) / 2.25),
                      lambda y: (-2.0 / 2.25) * np.exp(
                          -np.sum((y - c_shift) ** 2, axis=1) / 2.25)[:, None] * (y - c_shift)),
        AnalyticField("exp_axis",
                      lambda y: np.exp(0.5 * y[:, 0]),
                      lambda y: 0.5 * np.exp(0.5 * y[:, 0])[:, None] * e0),
        AnalyticField("exp_inner",
                      lambda y: np.exp(y @ c_exp),
                      lambda y: np.exp(y @ c_exp)[:, None] * c_exp),
        AnalyticField("sin_axis",
                      lambda y: np.sin(2.0 * y[:, 0]),
                      lambda y: 2.0 * np.cos(2.0 * y[:, 0])[:, None] * e0),
        AnalyticField("cos_mix",
                      lambda y: np.cos(y @ e12),
                      lambda y: -np.sin(y @ e12)[:, None] * e12),
        AnalyticField("sincos_prod",
                      lambda y: np.sin(y[:, 0]) * np.cos(y[:, 1]),
                      lambda y: pad([np.cos(y[:, 0]) * np.cos(y[:, 1]),
                                     -np.sin(y[:, 0]) * np.sin(y[:, 1])], y.shape[0])),
        AnalyticField("plane_wave",
                      lambda y: np.sin(y @ c_wave),
                      lambda y: np.cos(y @ c_wave)[:, None] * c_wave),
        AnalyticField("runge",
                      lambda y: 1.0 / (1.0 + radial2(y)),
                      lambda y: -2.0 * y / (1.0 + radial2(y))[:, None] ** 2),
        AnalyticField("sqrt_reg",
                      lambda y: np.sqrt(1.0 + radial2(y)),
                      lambda y: y / np.sqrt(1.0 + radial2(y))[:, None]),
        AnalyticField("log_reg",
                      lambda y: np.log1p(radial2(y)),
                      lambda y: 2.0 * y / (1.0 + radial2(y))[:, None]),
        AnalyticField("atan_mix",
                      lambda y: np.arctan(y @ e01),
                      lambda y: (1.0 / (1.0 + (y @ e01) ** 2))[:, None] * e01),
        AnalyticField("dist_origin",
                      lambda y: np.linalg.norm(y, axis=1),
                      lambda y: y / np.maximum(
                          np.linalg.norm(y, axis=1), 1e-300)[:, None]),
        AnalyticField("cos_sq",
                      lambda y: np.cos(y[:, 0]) ** 2,
                      lambda y: (-2.0 * np.cos(y[:, 0]) * np.sin(y[:, 0]))[:, None] * e0),
        AnalyticField("ratio",
                      lambda y: y[:, 0] / (1.0 + y[:, 1] ** 2),
                      lambda y: pad([1.0 / (1.0 + y[:, 1] ** 2),
                                     -2.0 * y[:, 0] * y[:, 1] / (1.0 + y[:, 1] ** 2) ** 2],
                                    y.shape[0])),
    ]


THETA_GRID = (math.pi / 8, math.pi / 4, math.pi / 2)
HEIGHT_GRID = (0.5, 1.0, 2.0)


def catalog_cones(dim: int = 2) -> list[ConeSpec]:
    """Nine cones: (theta, a) grid at a fixed off-axis vertex and tilted axis."""
    vertex = _coef(dim, [0.3, -0.2, 0.1])
    axis = _coef(dim, [1.0, 2.0, -1.0])
    return [
        ConeSpec(vertex=vertex, axis=axis, theta=theta, height=a)
        for theta in THETA_GRID
        for a in HEIGHT_GRID
    ]


def default_exponent_grid(N: int) -> tuple[list[float], list[ExponentPair]]:
    """Morrey exponents and interpolation pairs exercised by the sweep."""
    morrey_ps = [N + 1.0, 2.0 * N, 4.0 * N, INF]
    qs = [N + 1.0, 2.0 * N, 4.0 * N, INF]
    ps = [1.0, (1.0 + N) / 2.0, float(N)]
    pairs = [ExponentPair(p, q, N) for p in ps for q in qs]
    return morrey_ps, pairs


def run_cone_sweep(
    dim: int = 2,
    fields: Sequence[AnalyticField] | None = None,
    cones: Sequence[ConeSpec] | None = None,
    morrey_ps: Iterable[float] | None = None,
    pairs: Iterable[ExponentPair] | None = None,
    n_radial: int = 48,
    n_angular: int = 48,
) -> list[ConeCheck]:
    """All cone checks over the catalog; norms are cached per (cone, field)."""
    fields = catalog_fields(dim) if fields is None else list(fields)
    cones = catalog_cones(dim) if cones is None else list(cones)
    default_ps, default_pairs = default_exponent_grid(dim)
    morrey_ps = default_ps if morrey_ps is None else list(morrey_ps)
    pairs = default_pairs if pairs is None else list(pairs)

    checks: list[ConeCheck] = []
    for cone in cones:
        rule = QuadratureRule.build(cone, n_radial, n_angular)
        samples = cone_samples(cone)
        for field in fields:
            data = _ConeFieldData(cone, field, rule, samples=samples)
            checks.extend(_pointwise_checks(data))
            for p in morrey_ps:
                checks.append(_morrey_check(data, p))
            for pair in pairs:
                checks.append(_interpolation_check(data, pair))
    return checks
