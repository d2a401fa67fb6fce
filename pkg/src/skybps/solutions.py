"""Constructors for the explicit BPS families, each returning a ready
Configuration together with family-specific diagnostics.

Families
--------
identity_u1     identity section of a U(1)-fibered target with A = A_x dx and
                the conformally deformed base metric that solves BPS1.
dirac_monopole  covariantly constant sphere direction, xi = 1/(2r) on a
                radial window of flat R^3 (radial coordinate s = 1/(2r), so
                the xi field is linear and exactly differentiated).
spinorial       spin-bundle connection of a surface C shifted by half a
                Clifford multiplication; curvature (1/2)(1 - K) omega_C Phi.
twisted         spinorial data plus B Phi dxi with B = alpha / (2 gamma).
spherical       equivariant f(xi)-profile connection over I x S^2.
symplectic      area-form-normalized (a, w) data on C = S^2.

Surfaces use a single conformal chart.  Spheres are realized in the Mercator
chart z = tau + i v with Omega = R^2 sech^2(tau): the curvature is constant
1/R^2 and the omitted polar caps carry area ~ exp(-2 tau_max), so no margin
extrapolation is needed on the surface factor.

All constant-Phi families place Phi at the chart point (u, v) = (pi/2, 0)
(the su(2) direction e_1); gauge data written for the north pole in matrix
form is rotated by e_3 -> e_1, e_1 -> -e_3 before being read off in the
orthonormal basis e_a.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import (
    ConstraintViolated,
    NormalizationFailed,
    NotRiemannian,
    ParamInconsistent,
)
from .exterior import Metric3
from .gaugefield import Configuration
from .grid import build_patch
from .lie_target import (
    AdjointIntervalFamily,
    TargetGeometry,
    eta2_zero_family,
    make_adjoint_interval_target,
    monopole_family,
    sph_x,
    sph_xu,
    sph_xv,
    u1_s3_adjoint_target,
)

_CSTEP = 1e-30


def _cdiff(fn: Callable, *args, axis: int):
    """Complex-step partial of a closed-form evaluator in argument ``axis``."""
    shifted = [a.astype(complex) if i == axis else a for i, a in enumerate(args)]
    shifted[axis] = shifted[axis] + 1j * _CSTEP
    return np.imag(fn(*shifted)) / _CSTEP


# ---------------------------------------------------------------------------
# conformal surface charts
# ---------------------------------------------------------------------------


@dataclass
class SurfaceGeometry:
    """A surface C in a single conformal chart g_C = Omega (dx1^2 + dx2^2).

    ``omega`` and ``gauss_k`` are complex-safe evaluators of the conformal
    factor and the Gauss curvature; ``chi`` is the declared Euler
    characteristic (None for non-compact charts).  The declared curvature is
    checked against -(Delta ln Omega) / (2 Omega) at construction.
    """

    omega: Callable
    gauss_k: Callable
    lo: tuple[float, float]
    hi: tuple[float, float]
    periodic: tuple[bool, bool]
    chi: int | None = None
    name: str = "surface"
    check_tol: float = 1e-6
    dlog_omega: Callable | None = None  # analytic (d1 lnOmega, d2 lnOmega)
    area_exact: float | None = None  # closed-form total area, when known

    def __post_init__(self):
        x1 = np.linspace(self.lo[0] + 1e-3, self.hi[0] - 1e-3, 41)
        x2 = np.linspace(self.lo[1] + 1e-3, self.hi[1] - 1e-3, 37)
        X1, X2 = np.meshgrid(x1, x2, indexing="ij")
        k_ref = self.curvature_from_omega(X1, X2)
        res = np.max(np.abs(k_ref - self.gauss_k(X1, X2)))
        if res > self.check_tol:
            raise ConstraintViolated(
                f"declared Gauss curvature differs from the conformal factor: {res:.3e}"
            )

    def log_omega_grad(self, x1, x2):
        """(d_1 ln Omega, d_2 ln Omega), analytic when supplied else complex step."""
        if self.dlog_omega is not None:
            return self.dlog_omega(x1, x2)
        ln = lambda a, b: np.log(self.omega(a, b))
        return _cdiff(ln, x1, x2, axis=0), _cdiff(ln, x1, x2, axis=1)

    def levi_civita_da_coeff(self, x1, x2, h: float = 1e-5):
        """dx1^dx2 coefficient of da for a = (d1 lnOmega dx2 - d2 lnOmega dx1)/4."""
        if self.dlog_omega is not None:
            d11 = _cdiff(lambda a, b: self.dlog_omega(a, b)[0], x1, x2, axis=0)
            d22 = _cdiff(lambda a, b: self.dlog_omega(a, b)[1], x1, x2, axis=1)
            return 0.25 * (d11 + d22)
        d11 = (self.log_omega_grad(x1 + h, x2)[0] - self.log_omega_grad(x1 - h, x2)[0]) / (2 * h)
        d22 = (self.log_omega_grad(x1, x2 + h)[1] - self.log_omega_grad(x1, x2 - h)[1]) / (2 * h)
        return 0.25 * (d11 + d22)

    def curvature_from_omega(self, x1, x2, h: float = 1e-5):
        """K = -(Delta ln Omega) / (2 Omega); outer derivative by central step."""
        d2 = (
            self.log_omega_grad(x1 + h, x2)[0] - self.log_omega_grad(x1 - h, x2)[0]
        ) / (2 * h)
        d2 += (
            self.log_omega_grad(x1, x2 + h)[1] - self.log_omega_grad(x1, x2 - h)[1]
        ) / (2 * h)
        return -d2 / (2.0 * self.omega(x1, x2))

    def area(self, n: int = 256) -> float:
        """Integral of omega_C over the chart (2D composite quadrature)."""
        g = build_patch(
            (self.lo[0], self.lo[1], 0.0),
            (self.hi[0], self.hi[1], 1.0),
            (n, n, 5),
            (self.periodic[0], self.periodic[1], False),
            0.0,
        )
        x1, x2, _ = g.meshes()
        from .grid import integrate

        return integrate(self.omega(x1, x2), g)

    def gauss_bonnet_defect(self, n: int = 256) -> float:
        """|int K omega_C - 2 pi chi| relative to 2 pi chi."""
        if self.chi is None:
            raise ValueError("Gauss-Bonnet needs a declared Euler characteristic")
        g = build_patch(
            (self.lo[0], self.lo[1], 0.0),
            (self.hi[0], self.hi[1], 1.0),
            (n, n, 5),
            (self.periodic[0], self.periodic[1], False),
            0.0,
        )
        x1, x2, _ = g.meshes()
        from .grid import integrate

        total = integrate(self.gauss_k(x1, x2) * self.omega(x1, x2), g)
        return abs(total - 2 * np.pi * self.chi) / abs(2 * np.pi * self.chi)


def mercator_sphere(curvature: float = 1.0, tau_max: float = 3.0) -> SurfaceGeometry:
    """Round sphere of constant Gauss curvature K in the Mercator chart.

    Omega(tau) = sech^2(tau) / K on (-tau_max, tau_max) x (0, 2 pi); the two
    polar caps left out carry area fraction 1 - tanh(tau_max).
    """
    if curvature <= 0:
        raise ParamInconsistent("the Mercator sphere needs positive curvature")
    K = float(curvature)
    return SurfaceGeometry(
        omega=lambda t, v: (1.0 / (K * np.cosh(t) ** 2)) * np.ones_like(v),
        gauss_k=lambda t, v: K * np.ones_like(t * v),
        lo=(-tau_max, 0.0),
        hi=(tau_max, 2 * np.pi),
        periodic=(False, True),
        chi=2,
        name=f"s2-round[K={K}]",
        dlog_omega=lambda t, v: (-2.0 * np.tanh(t) * np.ones_like(v), np.zeros_like(t * v)),
        area_exact=4.0 * np.pi / K,
    )


# ---------------------------------------------------------------------------
# shared result container
# ---------------------------------------------------------------------------


@dataclass
class FamilyResult:
    """A constructed family member plus its construction-time diagnostics."""

    family: str
    config: Configuration
    params: dict
    diagnostics: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# identity section of a U(1)-fibered target
# ---------------------------------------------------------------------------


def identity_u1_solution(
    a_x: Callable,
    target: TargetGeometry | None = None,
    n=48,
    margin: float = 0.2,
    da_x_dtheta: Callable | None = None,
) -> FamilyResult:
    """Identity map with connection A = A_x(theta, x) dx on a fibered target.

    Solves BPS1 with the conformally deformed base metric

        g_M = kappa [ f (dtheta + omega - A)^2 + h dx^2 ] + mu^2 / mu_y,
        kappa = 1 + 3 F_{theta x} mu_y / W,  W = d_x mu_y - d_y mu_x,

    and BPS2 holds with alpha = beta = gamma = 0.  A_x must not depend on y
    (the moment-dual flow) and kappa must stay positive on the grid.
    """
    target = target or u1_s3_adjoint_target()
    if target.fiber_axis != 0 or "mu_y" not in target.extras:
        raise ParamInconsistent("identity_u1_solution needs a u1-fibered target")
    ex = target.extras
    grid = build_patch(target.lo, target.hi, _n3(n), target.periodic, margin)
    th, x, y = grid.meshes()

    ax_vals = a_x(th, x)
    if da_x_dtheta is not None:
        f_tx = da_x_dtheta(th, x)
    else:
        f_tx = _cdiff(a_x, th, x, axis=0)

    mu_x, mu_y = ex["mu_x"](x, y), ex["mu_y"](x, y)
    hh, om, w = ex["h"](x, y), ex["omega_x"](x, y), ex["w"](x, y)

    def metric_formula(f_theta_x):
        kappa = 1.0 + 3.0 * f_theta_x * mu_y / w
        fib = w * w / (hh * mu_y)
        omt = om - ax_vals
        g = np.zeros((3, 3) + grid.shape)
        g[0, 0] = kappa * fib
        g[0, 1] = g[1, 0] = kappa * fib * omt
        g[1, 1] = kappa * (fib * omt * omt + hh) + mu_x * mu_x / mu_y
        g[1, 2] = g[2, 1] = mu_x
        g[2, 2] = mu_y
        return g, kappa

    g_arr, kappa = metric_formula(f_tx)
    if np.any(kappa <= 0):
        raise NotRiemannian(
            f"conformal factor reaches {kappa.min():.4g} <= 0; shrink A or the margin"
        )
    phi = np.stack([th, x, y])
    A = np.zeros((1, 3) + grid.shape)
    A[0, 1] = ax_vals
    cfg = Configuration(
        grid, target, phi, A, Metric3(g_arr), orientation=1, phi_winding=np.eye(3)
    )
    return FamilyResult(
        family="identity-u1",
        config=cfg,
        params={"n": _n3(n), "margin": margin},
        diagnostics={"kappa_min": float(kappa.min()), "metric_formula": metric_formula},
    )


# ---------------------------------------------------------------------------
# Dirac monopole window
# ---------------------------------------------------------------------------


def dirac_monopole(n=48, r_window=(0.5, 2.0), margin: float = 0.1) -> FamilyResult:
    """Abelian monopole: xi = 1/(2r), Phi constant, a the degree-1 connection.

    Built in the radial coordinate s = 1/(2r) (so xi = s exactly) on the
    window s in [1/(2 r_max), 1/(2 r_min)], with the flat metric
    g_M = ds^2/(4 s^4) + (du^2 + sin^2 u dv^2)/(4 s^2) and orientation -1
    (s decreases with r).  Solves BPS1 in coordinates with eta1 = -h1^2 / 3;
    BPS2 requires beta = 0.
    """
    r0, r1 = r_window
    s0, s1 = 1.0 / (2.0 * r1), 1.0 / (2.0 * r0)
    pad = 0.05 * (s1 - s0)
    fam = monopole_family((s0 - pad, s1 + pad))
    target = make_adjoint_interval_target(fam)
    grid = build_patch((s0, 0.0, 0.0), (s1, np.pi, 2 * np.pi),
                       _n3(n), (False, False, True), margin)
    s, u, v = grid.meshes()

    phi = np.stack([s, np.full(grid.shape, np.pi / 2), np.zeros(grid.shape)])
    A = np.zeros((3, 3) + grid.shape)
    A[0, 2] = 0.5 * (1.0 - np.cos(u))  # a = (1 - cos u)/2 dv along Phi = e_1

    g = np.zeros((3, 3) + grid.shape)
    g[0, 0] = 0.25 / s**4
    g[1, 1] = 0.25 / s**2
    g[2, 2] = 0.25 * np.sin(u) ** 2 / s**2

    winding = np.zeros((3, 3))
    winding[0, 0] = 1.0
    cfg = Configuration(grid, target, phi, A, Metric3(g), orientation=-1,
                        phi_winding=winding)

    star = cfg.star()
    dxi = cfg.dphi()[0]  # = ds exactly
    da = cfg.curvature()[0]
    res = float(np.max(np.abs(star.on_1(dxi[None])[0] + da)))
    return FamilyResult(
        family="dirac-monopole",
        config=cfg,
        params={"n": _n3(n), "margin": margin, "r_window": list(r_window)},
        diagnostics={"abelian_bps_residual": res},
    )


# ---------------------------------------------------------------------------
# spinorial family and its twist
# ---------------------------------------------------------------------------


def _spinorial_gauge_field(surface: SurfaceGeometry, grid, x1, x2) -> np.ndarray:
    """Connection components of the shifted spin connection in the e-basis.

    In the matrix gauge A = [[-i a, -conj(w)], [w, i a]] with
    a = (d_1 lnOmega dx2 - d_2 lnOmega dx1)/4 and w = sqrt(Omega)/2 (dx1 + i dx2);
    after the e_3 -> e_1 frame rotation the components are (a, Re w, Im w).
    """
    g1, g2 = surface.log_omega_grad(x1, x2)
    sq = np.sqrt(surface.omega(x1, x2))
    A = np.zeros((3, 3) + grid.shape)
    A[0, 1] = -0.25 * g2  # a, dx1 component
    A[0, 2] = 0.25 * g1  # a, dx2 component
    A[1, 1] = 0.5 * sq  # Re w
    A[2, 2] = 0.5 * sq  # Im w
    return A


def spinorial_solution(
    surface: SurfaceGeometry | None = None,
    fam: AdjointIntervalFamily | None = None,
    n=48,
    margin: float = 0.1,
    twist_b: float = 0.0,
) -> FamilyResult:
    """Spin-bundle solution over M = I x C with h1 = 1.

    Phi is the constant direction e_1, A is the shifted spin connection of C
    (plus B Phi dxi when ``twist_b`` is nonzero), and

        g_M = dxi^2 + (h2^2 + (3/2) eta1 (1 - K)) g_C.

    The conformal-block coefficient may fail positivity; the returned
    diagnostics carry the pointwise mask (a legal, flagged outcome) and the
    curvature-identity residual |F - (1/2)(1 - K) omega_C Phi|.

    The default profile family is the eta2 = 0 representative of the round
    3-sphere metric (h2 = sin, eta1 = -2 sin^2); choosing eta2 = 0 removes
    the eta2/h2^2 = -cot(xi) amplification of finite-difference noise near
    the collapsed spheres.  Other families (e.g. the canonical round pair
    with eta2 = -sin(2 xi)/2, or constant-h2 data) can be passed explicitly.
    """
    surface = surface or mercator_sphere(1.0)
    fam = fam or eta2_zero_family(np.sin, (0.0, np.pi), compact="s3", name="round-metric-eta2-zero")
    xi0, xi1 = fam.interval
    sample = np.linspace(xi0 + 1e-6, xi1 - 1e-6, 64)
    if np.max(np.abs(fam.h1(sample) - 1.0)) > 1e-12:
        raise ParamInconsistent("spinorial data needs coordinates with h1 = 1")
    target = make_adjoint_interval_target(fam)
    grid = build_patch(
        (xi0, surface.lo[0], surface.lo[1]),
        (xi1, surface.hi[0], surface.hi[1]),
        _n3(n),
        (False, surface.periodic[0], surface.periodic[1]),
        margin,
    )
    xi, x1, x2 = grid.meshes()

    A = _spinorial_gauge_field(surface, grid, x1, x2)
    if twist_b != 0.0:
        A[0, 0] = twist_b
    phi = np.stack([xi, np.full(grid.shape, np.pi / 2), np.zeros(grid.shape)])

    kk = surface.gauss_k(x1, x2)
    om = surface.omega(x1, x2)
    coef = fam.h2(xi) ** 2 + 1.5 * fam.eta1(xi) * (1.0 - kk)
    mask = coef > 0
    g = np.zeros((3, 3) + grid.shape)
    g[0, 0] = 1.0
    g[1, 1] = coef * om
    g[2, 2] = coef * om
    cfg = Configuration(grid, target, phi, A, Metric3(g), orientation=1)

    F = cfg.curvature()
    pred = np.zeros_like(F)
    pred[0, 0] = 0.5 * (1.0 - kk) * om
    if twist_b != 0.0:
        # -B dxi ^ d^A Phi contributes B sqrt(Omega) on both transverse slots
        sq = np.sqrt(om)
        pred[1, 1] = twist_b * sq
        pred[2, 2] = twist_b * sq
    f_res = float(np.max(np.abs(F - pred)))

    P = cfg.covariant_differential()
    dphi_pred = np.zeros_like(P)
    dphi_pred[0, 0] = 1.0
    dphi_pred[1, 1] = np.sqrt(om)
    dphi_pred[2, 2] = np.sqrt(om)
    dphi_res = float(np.max(np.abs(P - dphi_pred)))

    return FamilyResult(
        family="spinorial",
        config=cfg,
        params={"n": _n3(n), "margin": margin, "surface": surface.name,
                "family": fam.name, "twist_b": twist_b},
        diagnostics={
            "riemannian_everywhere": bool(np.all(mask)),
            "conformal_coefficient_min": float(np.min(coef)),
            "nonriemannian_mask": ~mask,
            "conformal_coefficient": coef,
            "curvature_identity_residual": f_res,
            "covariant_differential_residual": dphi_res,
            "surface": surface,
        },
    )


def twisted_spinorial_solution(
    alpha: float,
    gamma: float,
    beta: float | None = None,
    h2: Callable = np.sin,
    interval=(0.0, np.pi),
    n=48,
    margin: float = 0.1,
    tau_max: float = 3.0,
) -> FamilyResult:
    """Spinorial data shifted by B Phi dxi, B = alpha / (2 gamma); eta2 = 0.

    For alpha = 0 this is exactly the spinorial configuration.  For nonzero
    alpha the surface curvature must be the constant K = 1 - alpha/beta >
    0 with beta supplied (or derived when a curvature is implied); the
    compatibility h2^2 = beta eta1 (K - 1)/(2 alpha) then holds identically
    for eta1 = -2 h2^2.
    """
    if gamma == 0.0:
        raise ParamInconsistent("the twist needs gamma != 0")
    b = alpha / (2.0 * gamma)
    fam = eta2_zero_family(h2, interval, compact="s3" if interval == (0.0, np.pi) and h2 is np.sin else None,
                           name="eta2-zero")
    if alpha == 0.0:
        surface = mercator_sphere(1.0, tau_max)
        beta_eff = 0.0 if beta is None else beta
    else:
        if beta is None or beta == 0.0:
            raise ParamInconsistent("alpha != 0 needs beta != 0 with K = 1 - alpha/beta")
        curvature = 1.0 - alpha / beta
        if curvature <= 0.0:
            raise ParamInconsistent(
                f"implied constant curvature {curvature:.4g} <= 0 is not a shipped surface"
            )
        surface = mercator_sphere(curvature, tau_max)
        beta_eff = beta
        xi = np.linspace(interval[0] + 1e-6, interval[1] - 1e-6, 64)
        compat = h2(xi) ** 2 - beta * fam.eta1(xi) * (curvature - 1.0) / (2.0 * alpha)
        if np.max(np.abs(compat)) > 1e-10:
            raise ParamInconsistent("h2^2 = beta eta1 (K-1)/(2 alpha) fails")

    res = spinorial_solution(surface, fam, n=n, margin=margin, twist_b=b)
    xi, tau, v = res.config.grid.meshes()
    kk = surface.gauss_k(tau, v)
    cond1 = float(np.max(np.abs(alpha * h2(xi) ** 2 + 0.5 * beta_eff * fam.eta1(xi) * (1.0 - kk))))
    cond2 = abs(2.0 * gamma * b - alpha)
    cond3 = 0.0  # eta2 = 0 by construction
    res.family = "twisted-spinorial"
    res.params.update({"alpha": alpha, "beta": beta_eff, "gamma": gamma, "B": b})
    res.diagnostics.update(
        {"bps2_scalar_conditions": (cond1, cond2, cond3)}
    )
    return res


# ---------------------------------------------------------------------------
# spherical family
# ---------------------------------------------------------------------------


def spherical_solution(
    c1: float,
    c2: float,
    alpha: float,
    beta: float,
    xi_window=(0.2, 1.5),
    n=48,
    margin: float = 0.1,
    h1: Callable | None = None,
) -> FamilyResult:
    """Equivariant profile solution on M = I x S^2 with gamma = 0.

    phi is the identity, A = (f - 1)/2 x dx with f = sqrt(1 + c1 xi^2), and
    the target profiles (in the coordinate with eta2/eta1 = xi) are

        eta1 = c2 f^(-beta/alpha),  eta2 = xi eta1,
        h1 h2^2 = -(beta / 2 alpha) c1 c2 xi^2 f^(-beta/alpha - 2).

    The base metric is (1 - 3 alpha/beta)^2 (h1^2 dxi^2 + f^2 h2^2 g_S2) with
    the orientation carrying the sign of 1 - 3 alpha/beta.
    """
    if alpha == 0.0 or beta == 0.0:
        raise ParamInconsistent("spherical family needs alpha != 0 and beta != 0")
    if abs(3.0 * alpha / beta - 1.0) < 1e-12:
        raise ParamInconsistent("3 alpha / beta = 1 leaves no base metric")
    expo = -beta / alpha

    def f(xi):
        return np.sqrt(1.0 + c1 * xi**2)

    def eta1(xi):
        return c2 * f(xi) ** expo

    def eta2(xi):
        return c2 * xi * f(xi) ** expo

    def h1h2sq(xi):
        return -(beta / (2.0 * alpha)) * c1 * c2 * xi**2 * f(xi) ** (expo - 2.0)

    xi_s = np.linspace(xi_window[0], xi_window[1], 64)
    if np.any(1.0 + c1 * xi_s**2 <= 0.0):
        raise ParamInconsistent("f^2 = 1 + c1 xi^2 must stay positive on the window")
    if np.any(h1h2sq(xi_s) <= 0.0):
        raise ParamInconsistent("h1 h2^2 <= 0 on the window: flip the sign of c1 c2 beta/alpha")
    if c1 == 0.0:
        raise ParamInconsistent("c1 = 0 forces f = 1 and F = 0 (excluded trivial branch)")

    h1_fn = h1 or (lambda xi: np.ones_like(xi))

    def h2_fn(xi):
        return np.sqrt(h1h2sq(xi) / h1_fn(xi))

    fam = AdjointIntervalFamily(h1=h1_fn, h2=h2_fn, eta1=eta1, eta2=eta2,
                                interval=tuple(xi_window), name="spherical-profile")
    target = make_adjoint_interval_target(fam)
    grid = build_patch((xi_window[0], 0.0, 0.0), (xi_window[1], np.pi, 2 * np.pi),
                       _n3(n), (False, False, True), margin)
    xi, u, v = grid.meshes()

    x, xu, xv = sph_x(u, v), sph_xu(u, v), sph_xv(u, v)
    xxu = np.cross(x, xu, axisa=0, axisb=0, axisc=0)
    xxv = np.cross(x, xv, axisa=0, axisb=0, axisc=0)
    half = 0.5 * (f(xi) - 1.0)
    A = np.zeros((3, 3) + grid.shape)
    A[:, 1] = half * xxu
    A[:, 2] = half * xxv

    phi = np.stack([xi, u, v])
    sign = 1.0 - 3.0 * alpha / beta
    g = np.zeros((3, 3) + grid.shape)
    g[0, 0] = sign**2 * h1_fn(xi) ** 2
    g[1, 1] = sign**2 * f(xi) ** 2 * h2_fn(xi) ** 2
    g[2, 2] = g[1, 1] * np.sin(u) ** 2
    winding = np.zeros((3, 3))
    winding[1, 1] = 1.0
    winding[2, 2] = 1.0
    cfg = Configuration(grid, target, phi, A, Metric3(g),
                        orientation=int(np.sign(sign)), phi_winding=winding)

    fp = c1 * xi / f(xi)
    bps2a = 2.0 * alpha * h1h2sq(xi) * f(xi) ** 2 + beta * eta1(xi) * (f(xi) ** 2 - 1.0)
    bps2b = 2.0 * alpha * h1h2sq(xi) * f(xi) + beta * eta2(xi) * fp
    return FamilyResult(
        family="spherical",
        config=cfg,
        params={"n": _n3(n), "margin": margin, "c1": c1, "c2": c2,
                "alpha": alpha, "beta": beta, "xi_window": list(xi_window)},
        diagnostics={
            "bps2a_residual": float(np.max(np.abs(bps2a))),
            "bps2b_residual": float(np.max(np.abs(bps2b))),
            "profiles": {"f": f, "eta1": eta1, "eta2": eta2, "h1h2sq": h1h2sq},
        },
    )


def spherical_round_target_metric(xi, c1=1.0, c2=-1.0):
    """Target metric components (h1^2, h2^2) of the special round parameters.

    With (c1, c2, beta) = (1, -1, 2 alpha) and h1 = 1/(1 + xi^2) the target
    metric is dxi^2/(1+xi^2)^2 + (xi^2/(1+xi^2)) g_S2, which the substitution
    arctan(xi) turns into the round 3-sphere.
    """
    if (c1, c2) != (1.0, -1.0):
        raise ParamInconsistent("the round comparison is stated for c1 = 1, c2 = -1")
    return 1.0 / (1.0 + xi**2) ** 2, xi**2 / (1.0 + xi**2)


# ---------------------------------------------------------------------------
# symplectic family
# ---------------------------------------------------------------------------


def symplectic_solution(
    h2: Callable = np.sin,
    interval=(0.0, np.pi),
    n=48,
    margin: float = 0.1,
    tau_max: float = 3.0,
    xi_phase: Callable | None = None,
    w_scale: float = 1.0,
) -> FamilyResult:
    """Area-normalized (a, w) data on C = S^2 with eta2 = 0 and beta != 0.

    omega_C := -2 da must equal 2 i w ^ conj(w); the shipped construction uses
    the round unit sphere (Mercator chart), where a is half the Levi-Civita
    connection and w = sqrt(Omega)/2 dz, optionally rotated by a xi-dependent
    phase (a gauge twist that leaves all invariants unchanged).  ``w_scale``
    exists to demonstrate the normalization check and must be 1 for a valid
    construction.
    """
    surface = mercator_sphere(1.0, tau_max)
    fam = eta2_zero_family(h2, interval,
                           compact="s3" if interval == (0.0, np.pi) and h2 is np.sin else None,
                           name="symplectic-base")
    target = make_adjoint_interval_target(fam)
    xi0, xi1 = interval
    grid = build_patch((xi0, -tau_max, 0.0), (xi1, tau_max, 2 * np.pi),
                       _n3(n), (False, False, True), margin)
    xi, tau, v = grid.meshes()

    om = surface.omega(tau, v)
    sq = 0.5 * w_scale * np.sqrt(om)
    psi = xi_phase(xi) if xi_phase is not None else np.zeros_like(xi)
    w_re = np.zeros((3,) + grid.shape)
    w_im = np.zeros((3,) + grid.shape)
    # w_xi = e^{i psi} (sq dtau + i sq dv): components on the (tau, v) axes
    w_re[1], w_re[2] = sq * np.cos(psi), -sq * np.sin(psi)
    w_im[1], w_im[2] = sq * np.sin(psi), sq * np.cos(psi)

    g1, _ = surface.log_omega_grad(tau, v)
    a_v = 0.25 * g1  # a = (d_tau ln Omega)/4 dv on the Mercator chart
    A = np.zeros((3, 3) + grid.shape)
    A[0, 2] = a_v
    A[1] = w_re
    A[2] = w_im

    # normalization 2 i w ^ conj(w) = -2 da, checked on the closed forms
    two_i_wwbar = 4.0 * (w_re[1] * w_im[2] - w_re[2] * w_im[1])  # dtau^dv coefficient
    da_coeff = surface.levi_civita_da_coeff(tau, v)
    norm_res = float(np.max(np.abs(two_i_wwbar + 2.0 * da_coeff)))
    scale = float(np.max(np.abs(two_i_wwbar))) or 1.0
    if norm_res > 1e-10 * scale:
        raise NormalizationFailed(
            f"2 i w ^ conj(w) differs from -2 da by {norm_res:.3e}"
        )

    phi = np.stack([xi, np.full(grid.shape, np.pi / 2), np.zeros(grid.shape)])
    g = np.zeros((3, 3) + grid.shape)
    g[0, 0] = 1.0
    g[1, 1] = h2(xi) ** 2 * om
    g[2, 2] = h2(xi) ** 2 * om
    cfg = Configuration(grid, target, phi, A, Metric3(g), orientation=1)

    area = surface.area()
    return FamilyResult(
        family="symplectic",
        config=cfg,
        params={"n": _n3(n), "margin": margin, "tau_max": tau_max,
                "twisted": xi_phase is not None},
        diagnostics={
            "normalization_residual": norm_res,
            "omega_c_integral_over_2pi": area / (2 * np.pi),
            "surface": surface,
        },
    )


def _n3(n):
    if np.isscalar(n):
        return (int(n),) * 3
    return tuple(int(k) for k in n)


FAMILY_BUILDERS = {
    "identity-u1": identity_u1_solution,
    "dirac-monopole": dirac_monopole,
    "spinorial": spinorial_solution,
    "twisted-spinorial": twisted_spinorial_solution,
    "spherical": spherical_solution,
    "symplectic": symplectic_solution,
}
