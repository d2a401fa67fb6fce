"""Lie-algebra data and target-geometry construction.

A :class:`TargetGeometry` bundles everything the energy and degree need about
the target 3-manifold N with its isometric group action: chart bounds, the
metric g_N, Killing-field components I_a, and moment-map coefficients
mu_{a;mu}.  Derived tensors (volume coefficient, the Hodge tensor Sigma in
dual storage, the metric dual of the moment map) are computed pointwise from
these evaluators, so the constructors only supply closed-form chart data.

All coefficient evaluators must be complex-safe numpy expressions: target-side
partial derivatives are taken by complex-step differentiation, which is exact
to machine precision for closed-form data.  A real 4th-order grid stencil is
available as an alternative (``method="grid-fd"``) and converges at O(h^4).

Conventions.  su(2) uses the orthonormal basis e_a = -i sigma_a for the inner
product (X, Y) = -tr(XY)/2, in which [e_b, e_c] = 2 eps_abc e_a; u(1) is R
with the single generator 1.  SU(2) group elements are stored as unit
quaternions (q0, q1, q2, q3) <-> q0 + q_a e_a.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConstraintViolated, MomentConditionFailed, NotRiemannian
from .exterior import EPS, mat_det, mat_inv
from .grid import PatchGrid, build_patch, extrapolate_margin, integrate, partial_derivative

_CSTEP = 1e-30


# ---------------------------------------------------------------------------
# Lie algebras and SU(2) quaternion helpers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LieAlgebraSpec:
    """Structure constants f^a_bc in an orthonormal basis, f[a, b, c]."""

    dim: int
    f: np.ndarray
    name: str = ""

    def __post_init__(self):
        f = self.f
        if f.shape != (self.dim,) * 3:
            raise ValueError("structure constants must be (dim, dim, dim)")
        if np.max(np.abs(f + np.swapaxes(f, 1, 2))) > 0:
            raise ValueError("structure constants not antisymmetric in lower indices")
        # Jacobi: f^a_be f^e_cd + f^a_ce f^e_db + f^a_de f^e_bc = 0
        jac = (
            np.einsum("abe,ecd->abcd", f, f)
            + np.einsum("ace,edb->abcd", f, f)
            + np.einsum("ade,ebc->abcd", f, f)
        )
        if np.max(np.abs(jac)) > 1e-14:
            raise ValueError("Jacobi identity fails")


def u1_algebra() -> LieAlgebraSpec:
    return LieAlgebraSpec(1, np.zeros((1, 1, 1)), "u1")


def su2_algebra() -> LieAlgebraSpec:
    """su(2) in the orthonormal basis e_a = -i sigma_a, so f^a_bc = 2 eps_abc."""
    return LieAlgebraSpec(3, 2.0 * EPS, "su2")


def qmul(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Quaternion product, components on the leading axis (4, ...)."""
    p0, p1, p2, p3 = p
    q0, q1, q2, q3 = q
    return np.stack(
        [
            p0 * q0 - p1 * q1 - p2 * q2 - p3 * q3,
            p0 * q1 + p1 * q0 + p2 * q3 - p3 * q2,
            p0 * q2 - p1 * q3 + p2 * q0 + p3 * q1,
            p0 * q3 + p1 * q2 - p2 * q1 + p3 * q0,
        ]
    )


def qconj(q: np.ndarray) -> np.ndarray:
    out = q.copy()
    out[1:] = -out[1:]
    return out


def qexp(v: np.ndarray) -> np.ndarray:
    """exp of a pure quaternion (components (3, ...)) as a unit quaternion."""
    norm = np.sqrt(np.sum(v * v, axis=0))
    small = norm < 1e-300
    n = np.where(small, 1.0, norm)
    sinc = np.where(small, 1.0, np.sin(norm) / n)
    return np.concatenate([np.cos(norm)[None], sinc[None] * v])


def qrot(q: np.ndarray) -> np.ndarray:
    """SO(3) matrix R[a, b] with q e_b q^{-1} = R[a, b] e_a."""
    w, x, y, z = q
    return np.stack(
        [
            np.stack([w * w + x * x - y * y - z * z, 2 * (x * y - w * z), 2 * (x * z + w * y)]),
            np.stack([2 * (x * y + w * z), w * w - x * x + y * y - z * z, 2 * (y * z - w * x)]),
            np.stack([2 * (x * z - w * y), 2 * (y * z + w * x), w * w - x * x - y * y + z * z]),
        ]
    )


# ---------------------------------------------------------------------------
# polar chart on the unit 2-sphere inside su(2)
# ---------------------------------------------------------------------------


def sph_x(u, v):
    """Unit vector x(u, v) = (sin u cos v, sin u sin v, cos u), shape (3, ...)."""
    return np.stack([np.sin(u) * np.cos(v), np.sin(u) * np.sin(v), np.cos(u) * np.ones_like(v)])


def sph_xu(u, v):
    return np.stack([np.cos(u) * np.cos(v), np.cos(u) * np.sin(v), -np.sin(u) * np.ones_like(v)])


def sph_xv(u, v):
    return np.stack([-np.sin(u) * np.sin(v), np.sin(u) * np.cos(v), np.zeros_like(u * v)])


def sph_chart_of_x(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Inverse chart: (u, v) with v wrapped into [0, 2 pi)."""
    u = np.arccos(np.clip(x[2], -1.0, 1.0))
    v = np.mod(np.arctan2(x[1], x[0]), 2.0 * np.pi)
    return u, v


# ---------------------------------------------------------------------------
# target geometry container
# ---------------------------------------------------------------------------


@dataclass
class TargetGeometry:
    """Chart data for (N, g_N, G-action); immutable after construction.

    ``metric_fn``, ``killing_fn`` and ``mu_fn`` map chart points y of shape
    (3, ...) to arrays of shape (3, 3, ...), (dim, 3, ...) and (dim, 3, ...)
    respectively, and must accept complex y (for complex-step derivatives).
    """

    name: str
    algebra: LieAlgebraSpec
    lo: tuple[float, float, float]
    hi: tuple[float, float, float]
    periodic: tuple[bool, bool, bool]
    metric_fn: Callable
    killing_fn: Callable
    mu_fn: Callable
    orientation: int = 1
    has_moment_constraint: bool = True
    fiber_axis: int | None = None  # u1 targets: chart axis shifted by the action
    action_fn: Callable | None = None  # (quaternion field, y) -> transformed y
    default_margin: float = 0.05
    volume_margins: tuple[float, ...] = (0.2, 0.1, 0.05)
    extras: dict = field(default_factory=dict)
    _volume_cache: dict = field(default_factory=dict, repr=False)

    def chart_grid(self, n, margin: float | None = None) -> PatchGrid:
        m = self.default_margin if margin is None else margin
        return build_patch(self.lo, self.hi, _triple(n), self.periodic, m)

    def metric(self, y: np.ndarray) -> np.ndarray:
        return self.metric_fn(y)

    def killing(self, y: np.ndarray) -> np.ndarray:
        return self.killing_fn(y)

    def mu(self, y: np.ndarray) -> np.ndarray:
        return self.mu_fn(y)

    def vol_coeff(self, y: np.ndarray) -> np.ndarray:
        """Coefficient of V_N against dy^1 ^ dy^2 ^ dy^3."""
        return self.orientation * np.sqrt(mat_det(self.metric_fn(y)))

    def sigma_dual(self, y: np.ndarray) -> np.ndarray:
        """Hodge tensor Sigma as the N-side star matrix (value slot, dual slot)."""
        g = self.metric_fn(y)
        return self.orientation * np.sqrt(mat_det(g)) * mat_inv(g)

    def mu_sharp(self, y: np.ndarray) -> np.ndarray:
        """Metric dual of the moment map, components (dim, 3, ...)."""
        g_inv = mat_inv(self.metric_fn(y))
        return np.einsum("mnxyz,anxyz->amxyz", g_inv, self.mu_fn(y))

    def volume(self, n=96, margins=None) -> float:
        """Margin-extrapolated integral of V_N over the chart."""
        margins = tuple(margins) if margins is not None else self.volume_margins
        key = (_triple(n), margins)
        if key not in self._volume_cache:
            vals = []
            for m in margins:
                grid = self.chart_grid(n, m)
                y = np.stack(grid.meshes())
                vals.append(integrate(self.vol_coeff(y), grid))
            self._volume_cache[key] = extrapolate_margin(margins, vals)
        return self._volume_cache[key]


def _triple(n):
    if np.isscalar(n):
        return (int(n),) * 3
    return tuple(int(k) for k in n)


def target_partials(fn: Callable, y: np.ndarray, grid: PatchGrid | None = None,
                    method: str = "complex-step") -> np.ndarray:
    """Partial derivatives of a chart evaluator at the points y (3, *shape).

    Returns d(fn)/dy^k stacked on a new leading axis k.  The complex-step
    method is exact to machine precision for closed-form evaluators; the
    grid-fd method applies the 4th-order grid stencils (requires ``grid`` and
    y sampled on it).
    """
    if method == "complex-step":
        out = []
        for k in range(3):
            yc = y.astype(complex)
            yc[k] = yc[k] + 1j * _CSTEP
            out.append(np.imag(fn(yc)) / _CSTEP)
        return np.stack(out)
    if method == "grid-fd":
        if grid is None:
            raise ValueError("grid-fd differentiation needs the sampling grid")
        vals = fn(y)
        return np.stack([partial_derivative(vals, k, grid) for k in range(3)])
    raise ValueError(f"unknown differentiation method {method!r}")


# ---------------------------------------------------------------------------
# moment-map and action diagnostics
# ---------------------------------------------------------------------------


def verify_moment_conditions(target: TargetGeometry, n=64, margin=None,
                             method: str = "complex-step") -> dict:
    """Residuals of the moment-map conditions on the target chart.

    def_residual:        max_a, points, comps |(d mu(I_a) - iota_{nu(I_a)} V_N)|
    constraint_residual: max_{a<=b} |(iota_{nu(I_a)} mu(I_b) + (a<->b)) / 2|,
                         the symmetrized contraction that must vanish for the
                         degree to be defined.
    """
    grid = target.chart_grid(n, margin)
    y = np.stack(grid.meshes())
    dmu = target_partials(target.mu_fn, y, grid, method)  # (k, a, comp, *sp)
    curl = np.einsum("mkl,kalxyz->amxyz", EPS, dmu)
    vol = target.vol_coeff(y)
    kil = target.killing_fn(y)
    def_res = float(np.max(np.abs(curl - vol * kil)))
    q = np.einsum("amxyz,bmxyz->abxyz", kil, target.mu_fn(y))
    sym = 0.5 * (q + np.swapaxes(q, 0, 1))
    return {
        "def_residual": def_res,
        "constraint_residual": float(np.max(np.abs(sym))),
        "constraint_matrix": np.mean(sym, axis=tuple(range(2, sym.ndim))),
    }


def nu_homomorphism_residual(target: TargetGeometry, n=64, margin=None,
                             method: str = "complex-step") -> float:
    """max |I_a . dI_b - I_b . dI_a - f^c_ab I_c| over basis pairs and points."""
    grid = target.chart_grid(n, margin)
    y = np.stack(grid.meshes())
    kil = target.killing_fn(y)
    dk = target_partials(target.killing_fn, y, grid, method)  # (m, b, lam, *sp)
    adv = np.einsum("amxyz,mblxyz->ablxyz", kil, dk)
    bracket = adv - np.swapaxes(adv, 0, 1)
    expected = np.einsum("cab,clxyz->ablxyz", target.algebra.f, kil)
    return float(np.max(np.abs(bracket - expected)))


def equivariance_residual(target: TargetGeometry, n=48, margin=None,
                          method: str = "complex-step") -> dict:
    """Equivariance residuals of mu (Lie-slot 1-form) and Sigma (TN-valued 2-form).

    For each basis direction b the Lie derivative along nu(I_b) must be
    compensated by the coadjoint rotation of Lie slots (mu) and the tangent
    rotation of value slots (Sigma).
    """
    grid = target.chart_grid(n, margin)
    y = np.stack(grid.meshes())
    kil = target.killing_fn(y)
    dk = target_partials(target.killing_fn, y, grid, method)  # (m, b, lam, *sp)
    f = target.algebra.f

    mu = target.mu_fn(y)
    dmu = target_partials(target.mu_fn, y, grid, method)  # (k, a, m, *sp)
    res_mu = (
        np.einsum("bnxyz,namxyz->abmxyz", kil, dmu)
        + np.einsum("anxyz,mbnxyz->abmxyz", mu, dk)
        + np.einsum("cab,cmxyz->abmxyz", f, mu)
    )

    sig = target.sigma_dual(y)  # (value mu, dual m, *sp)
    dsig = target_partials(target.sigma_dual, y, grid, method)  # (k, mu, m, *sp)
    div_k = np.einsum("nbnxyz->bxyz", dk)
    # Lie derivative of the dual-stored 2-form slot: X.grad b + b div X - (b.grad) X
    lie_form = (
        np.einsum("bnxyz,nsmxyz->bsmxyz", kil, dsig)
        + sig[None] * div_k[:, None, None]
        - np.einsum("smxyz,mblxyz->bslxyz", sig, dk)
    )
    res_sig = lie_form - np.einsum("nmxyz,nbsxyz->bsmxyz", sig, dk)
    return {
        "mu_residual": float(np.max(np.abs(res_mu))),
        "sigma_residual": float(np.max(np.abs(res_sig))),
    }


def sigma_duality_residual(target: TargetGeometry, n=24, margin=None) -> float:
    """max |g_N(u, Sigma(v, w)) - V_N(u, v, w)| over basis triples and points."""
    grid = target.chart_grid(n, margin)
    y = np.stack(grid.meshes())
    g = target.metric_fn(y)
    sig = target.sigma_dual(y)
    vol = target.vol_coeff(y)
    # Sigma(e_v, e_w) has components Sig[:, m] eps_mvw; pair with g and compare
    lhs = np.einsum("umxyz,mvw,euxyz->evwxyz", sig, EPS, g)
    rhs = EPS[..., None, None, None] * vol
    return float(np.max(np.abs(lhs - rhs)))


# ---------------------------------------------------------------------------
# U(1)-fibered targets (principal orbit S^1)
# ---------------------------------------------------------------------------


def make_u1_fibered_target(
    mu_x: Callable,
    mu_y: Callable,
    h: Callable,
    omega_x: Callable,
    chart_lo=(0.0, 0.0, 0.0),
    chart_hi=(2 * np.pi, np.pi / 2, 4 * np.pi),
    chart_periodic=(True, False, True),
    name: str = "u1-fibered",
    default_margin: float = 0.05,
    validate: bool = True,
    tol: float = 1e-5,
) -> TargetGeometry:
    """Circle-fibered target with nu = d/dtheta and mu-sharp = d/dy.

    The evaluators are functions of the base coordinates (x, y) of the chart
    (theta, x, y) and must be complex-safe.  The metric is assembled as

        g_N = (W^2 / (h mu_y)) (dtheta + omega)^2 + h dx^2 + mu^2 / mu_y,

    with W = d_x mu_y - d_y mu_x computed by complex step.  Requires mu_y > 0,
    h > 0 and W > 0 on the chart; W <= 0 makes d mu = iota_nu V_N unsolvable
    with a nondegenerate volume form.
    """

    def _w(x, y):
        dxy = np.imag(mu_y(x + 1j * _CSTEP, y)) / _CSTEP
        dyx = np.imag(mu_x(x, y + 1j * _CSTEP)) / _CSTEP
        return dxy - dyx

    def metric_fn(yc):
        x, yy = yc[1], yc[2]
        mx, my, hh, om = mu_x(x, yy), mu_y(x, yy), h(x, yy), omega_x(x, yy)
        w = _w(x, yy) if not np.iscomplexobj(yc) else _w_complex(x, yy)
        f = w * w / (hh * my)
        g = np.zeros((3, 3) + np.shape(x), dtype=np.result_type(yc, f))
        g[0, 0] = f
        g[0, 1] = g[1, 0] = f * om
        g[1, 1] = f * om * om + hh + mx * mx / my
        g[1, 2] = g[2, 1] = mx
        g[2, 2] = my
        return g

    def _w_complex(x, yy):
        # nested complex steps would collide; fall back to a tiny real step
        # pair on the already-complex arguments (second-order, scale 1e-7)
        e = 1e-7
        return (mu_y(x + e, yy) - mu_y(x - e, yy)) / (2 * e) - (
            mu_x(x, yy + e) - mu_x(x, yy - e)
        ) / (2 * e)

    def killing_fn(yc):
        shape = np.shape(yc[0])
        k = np.zeros((1, 3) + shape, dtype=np.result_type(yc))
        k[0, 0] = 1.0
        return k

    def mu_fn(yc):
        x, yy = yc[1], yc[2]
        m = np.zeros((1, 3) + np.shape(x), dtype=np.result_type(yc))
        m[0, 1] = mu_x(x, yy)
        m[0, 2] = mu_y(x, yy)
        return m

    def action_fn(lam, y):
        out = np.array(y, copy=True)
        out[0] = out[0] + lam
        return out

    t = TargetGeometry(
        name=name,
        algebra=u1_algebra(),
        lo=tuple(chart_lo),
        hi=tuple(chart_hi),
        periodic=tuple(chart_periodic),
        metric_fn=metric_fn,
        killing_fn=killing_fn,
        mu_fn=mu_fn,
        fiber_axis=0,
        action_fn=action_fn,
        default_margin=default_margin,
        extras={"mu_x": mu_x, "mu_y": mu_y, "h": h, "omega_x": omega_x, "w": _w},
    )
    if validate:
        grid = t.chart_grid(24)
        y = np.stack(grid.meshes())
        my = mu_y(y[1], y[2])
        hh = h(y[1], y[2])
        w = _w(y[1], y[2])
        if np.any(my <= 0) or np.any(hh <= 0):
            raise NotRiemannian("mu_y and h must be positive on the chart")
        if np.any(w <= 0):
            raise MomentConditionFailed(
                "d_x mu_y - d_y mu_x must be positive: d mu = iota_nu V_N fails"
            )
        res = verify_moment_conditions(t, n=24)
        if res["def_residual"] > tol or res["constraint_residual"] > tol:
            raise MomentConditionFailed(f"moment-map residuals {res} exceed {tol}")
    return t


def u1_s3_adjoint_target(default_margin: float = 0.05) -> TargetGeometry:
    """Adjoint U(1) action on the round 3-sphere in the (theta, x, y) chart.

    g_N = cos^2 x dtheta^2 + dx^2 + (1/4) sin^2 x dy^2 with mu = (1/4) sin^2 x dy.
    """
    t = make_u1_fibered_target(
        mu_x=lambda x, y: np.zeros_like(x * y),
        mu_y=lambda x, y: 0.25 * np.sin(x) ** 2 * np.ones_like(y),
        h=lambda x, y: np.ones_like(x * y),
        omega_x=lambda x, y: np.zeros_like(x * y),
        name="u1-s3-adjoint",
        default_margin=default_margin,
        validate=False,
    )
    t.extras["exact_volume"] = 2 * np.pi**2
    return t


# ---------------------------------------------------------------------------
# adjoint SU(2) targets on I x S^2 (principal orbit S^2)
# ---------------------------------------------------------------------------


@dataclass
class AdjointIntervalFamily:
    """Profile functions (h1, h2, eta1, eta2) on the interval, all complex-safe.

    The moment-map condition ties them together: 2 h1 h2^2 = eta2' - eta1 and
    the eta3 slot vanishes; this is enforced at construction on a dense sample.
    """

    h1: Callable
    h2: Callable
    eta1: Callable
    eta2: Callable
    interval: tuple[float, float]
    compact: str | None = None  # None | "s3" | "s1xs2"
    name: str = "adjoint-family"
    constraint_tol: float = 1e-8

    def eta2_prime(self, xi):
        return np.imag(self.eta2(xi + 1j * _CSTEP)) / _CSTEP

    def __post_init__(self):
        a, b = self.interval
        pad = 1e-6 * (b - a)
        xi = np.linspace(a + pad, b - pad, 512)
        lhs = 2.0 * self.h1(xi) * self.h2(xi) ** 2
        rhs = self.eta2_prime(xi) - self.eta1(xi)
        res = float(np.max(np.abs(lhs - rhs)))
        if res > self.constraint_tol:
            raise ConstraintViolated(
                f"2 h1 h2^2 = eta2' - eta1 fails: residual {res:.3e}"
            )
        if np.any(self.h1(xi) <= 0) or np.any(self.h2(xi) <= 0):
            raise ConstraintViolated("h1, h2 must be positive on the open interval")
        if self.compact is not None:
            self._check_compactification()

    def _check_compactification(self):
        a, b = self.interval
        eps = 1e-5 * (b - a)
        ends = np.array([a + eps, b - eps])
        if self.compact == "s3":
            # collapsing spheres at both ends: h2, eta1', eta2 -> 0
            d_eta1 = np.imag(self.eta1(ends + 1j * _CSTEP)) / _CSTEP
            checks = [self.h2(ends), d_eta1, self.eta2(ends)]
        elif self.compact == "s1xs2":
            per = [self.h1, self.h2, self.eta1, self.eta2]
            checks = [f(np.array([a + eps])) - f(np.array([b - eps])) for f in per]
        else:
            raise ValueError(f"unknown compactification {self.compact!r}")
        worst = max(float(np.max(np.abs(c))) for c in checks)
        if worst > 1e-3:
            raise ConstraintViolated(
                f"compactification limits violated (worst {worst:.3e})"
            )
        xi = np.linspace(a + 1e-9, b - 1e-9, 4097)
        vol = 4 * np.pi * np.trapezoid(self.h1(xi) * self.h2(xi) ** 2, xi)
        i1 = np.trapezoid(self.eta1(xi), xi)
        if abs(i1 + vol / (2 * np.pi)) > 1e-2 * max(abs(i1), 1e-30):
            raise ConstraintViolated("integral of eta1 differs from -Vol(N)/(2 pi)")


def round_s3_family() -> AdjointIntervalFamily:
    """Round 3-sphere: h1 = 1, h2 = sin, eta1 = -1, eta2 = -sin(2 xi)/2."""
    return AdjointIntervalFamily(
        h1=lambda xi: np.ones_like(xi),
        h2=np.sin,
        eta1=lambda xi: -np.ones_like(xi),
        eta2=lambda xi: -0.5 * np.sin(2.0 * xi),
        interval=(0.0, np.pi),
        compact="s3",
        name="round-s3",
    )


def eta2_zero_family(h2: Callable, interval, compact=None, name="eta2-zero") -> AdjointIntervalFamily:
    """Family with eta2 = 0, h1 = 1, so eta1 = -2 h2^2 (used by symplectic data)."""
    return AdjointIntervalFamily(
        h1=lambda xi: np.ones_like(xi),
        h2=h2,
        eta1=lambda xi: -2.0 * h2(xi) ** 2,
        eta2=lambda xi: np.zeros_like(xi),
        interval=tuple(interval),
        compact=compact,
        name=name,
    )


def monopole_family(xi_window=(0.15, 1.1)) -> AdjointIntervalFamily:
    """Coordinates with eta1 = -h1^2/3: h1 = 1, h2 = 1/sqrt(6), eta2 = 0."""
    c = 1.0 / np.sqrt(6.0)
    return AdjointIntervalFamily(
        h1=lambda xi: np.ones_like(xi),
        h2=lambda xi: c * np.ones_like(xi),
        eta1=lambda xi: -np.ones_like(xi) / 3.0,
        eta2=lambda xi: np.zeros_like(xi),
        interval=tuple(xi_window),
        name="monopole-window",
    )


def _adjoint_action(lam_quat: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Rotate the S^2 chart part by the adjoint action of a quaternion field."""
    u, v = y[1], y[2]
    x = sph_x(u, v)
    r = qrot(lam_quat)
    xr = np.einsum("ab...,b...->a...", r, x)
    ur, vr = sph_chart_of_x(xr)
    out = np.array(y, copy=True)
    out[1], out[2] = ur, vr
    return out


def make_adjoint_interval_target(fam: AdjointIntervalFamily,
                                 default_margin: float = 0.1) -> TargetGeometry:
    """Adjoint SU(2) target N = I x S^2 in the chart (xi, u, v).

    g_N = h1^2 dxi^2 + h2^2 (du^2 + sin^2 u dv^2), the action rotates the
    sphere factor, and mu(X) = eta1 dxi (X, x) + eta2 (dx, X).
    """

    def metric_fn(y):
        xi, u = y[0], y[1]
        g = np.zeros((3, 3) + np.shape(xi), dtype=np.result_type(y))
        g[0, 0] = fam.h1(xi) ** 2
        g[1, 1] = fam.h2(xi) ** 2 * np.ones_like(u)
        g[2, 2] = fam.h2(xi) ** 2 * np.sin(u) ** 2
        return g

    def killing_fn(y):
        u, v = y[1], y[2]
        x, xu, xv = sph_x(u, v), sph_xu(u, v), sph_xv(u, v)
        sin2 = np.sin(u) ** 2
        out = np.zeros((3, 3) + np.shape(u), dtype=np.result_type(y))
        for a in range(3):
            e = np.zeros((3,) + np.shape(u), dtype=np.result_type(y))
            e[a] = 1.0
            k = 2.0 * np.cross(x, e, axisa=0, axisb=0, axisc=0)
            out[a, 1] = np.sum(k * xu, axis=0)
            out[a, 2] = np.sum(k * xv, axis=0) / sin2
        return out

    def mu_fn(y):
        xi, u, v = y
        x, xu, xv = sph_x(u, v), sph_xu(u, v), sph_xv(u, v)
        e1, e2 = fam.eta1(xi), fam.eta2(xi)
        out = np.zeros((3, 3) + np.shape(u), dtype=np.result_type(y))
        out[:, 0] = e1 * x
        out[:, 1] = e2 * xu
        out[:, 2] = e2 * xv
        return out

    a, b = fam.interval
    t = TargetGeometry(
        name=f"adjoint-interval[{fam.name}]",
        algebra=su2_algebra(),
        lo=(a, 0.0, 0.0),
        hi=(b, np.pi, 2 * np.pi),
        periodic=(False, False, True),
        metric_fn=metric_fn,
        killing_fn=killing_fn,
        mu_fn=mu_fn,
        action_fn=_adjoint_action,
        default_margin=default_margin,
        volume_margins=(0.12, 0.06, 0.03),
        extras={"family": fam},
    )
    if fam.name == "round-s3":
        t.extras["exact_volume"] = 2 * np.pi**2
    return t


# ---------------------------------------------------------------------------
# left action of SU(2) on itself (principal orbit S^3): the obstruction case
# ---------------------------------------------------------------------------


def make_su2_left_target(K: float = 1.0) -> TargetGeometry:
    """Left-translation target on SU(2) with invariant volume K times round.

    The chart is hyperspherical: U(xi, u, v) = cos xi + sin xi x(u, v) as a
    unit quaternion.  The unique left-equivariant moment-map candidate
    mu(X) = (K/4) tr(X theta_R) satisfies d mu(X) = iota_{nu(X)} V_N but has
    iota_{nu(X)} mu(X) = (K/2) |X|^2 != 0, so no valid degree exists here.
    """
    if K <= 0:
        raise ValueError("K must be positive")
    scale = K ** (1.0 / 3.0)  # metric scale so that Vol = K * round volume

    def _q(y):
        xi, u, v = y
        x = sph_x(u, v)
        return np.concatenate([np.cos(xi)[None], np.sin(xi) * x])

    def _frame(y):
        """Chart basis vectors of the quaternion embedding and their norms."""
        xi, u, v = y
        x, xu, xv = sph_x(u, v), sph_xu(u, v), sph_xv(u, v)
        zero = np.zeros_like(xi)
        d_xi = np.concatenate([-np.sin(xi)[None], np.cos(xi) * x])
        d_u = np.concatenate([zero[None], np.sin(xi) * xu])
        d_v = np.concatenate([zero[None], np.sin(xi) * xv])
        norms = np.stack(
            [np.ones_like(xi), np.sin(xi) ** 2, np.sin(xi) ** 2 * np.sin(u) ** 2]
        )
        return (d_xi, d_u, d_v), norms

    def metric_fn(y):
        xi, u = y[0], y[1]
        g = np.zeros((3, 3) + np.shape(xi), dtype=np.result_type(y))
        g[0, 0] = scale**2 * np.ones_like(xi)
        g[1, 1] = scale**2 * np.sin(xi) ** 2
        g[2, 2] = scale**2 * np.sin(xi) ** 2 * np.sin(u) ** 2
        return g

    def killing_fn(y):
        q = _q(y)
        frame, norms = _frame(y)
        out = np.zeros((3, 3) + np.shape(y[0]), dtype=np.result_type(y))
        for a in range(3):
            e = np.zeros((4,) + np.shape(y[0]), dtype=np.result_type(y))
            e[a + 1] = 1.0
            minus_xu = -qmul(e, q)
            for m in range(3):
                out[a, m] = np.sum(minus_xu * frame[m], axis=0) / norms[m]
        return out

    def mu_fn(y):
        q = _q(y)
        qc = qconj(q)
        frame, _ = _frame(y)
        out = np.zeros((3, 3) + np.shape(y[0]), dtype=np.result_type(y))
        for m in range(3):
            theta = qmul(frame[m], qc)  # theta_R(d_m) as a pure quaternion
            out[:, m] = -(K / 2.0) * theta[1:]
        return out

    return TargetGeometry(
        name=f"su2-left[K={K}]",
        algebra=su2_algebra(),
        lo=(0.0, 0.0, 0.0),
        hi=(np.pi, np.pi, 2 * np.pi),
        periodic=(False, False, True),
        metric_fn=metric_fn,
        killing_fn=killing_fn,
        mu_fn=mu_fn,
        has_moment_constraint=False,
        default_margin=0.15,
        extras={"K": K},
    )


def left_action_obstruction(K: float, n=24) -> float:
    """The constant iota_{nu_L(X)} mu(X) for unit basis X: equals K/2.

    Computed by contracting the constructed moment-map candidate with the
    left-translation Killing fields on a sample grid; the defining condition
    d mu = iota_nu V_N holds, yet this constant is bounded away from zero.
    """
    if K <= 0:
        raise ValueError("K must be positive")
    target = make_su2_left_target(K)
    res = verify_moment_conditions(target, n=n)
    diag = np.diag(res["constraint_matrix"])
    val = float(np.mean(diag))
    if abs(val) < 1e-12 or np.max(np.abs(diag - val)) > 1e-9 * abs(val):
        raise ConstraintViolated("obstruction constant is not uniform over the basis")
    return val
