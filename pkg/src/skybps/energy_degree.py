"""Gauged Skyrme energy, topological degree, BPS residuals and bound gap.

The energy of a configuration (phi, A) is

    E = int_M  c1 |d^A phi|^2 + c2 |Sig|^2 + c3 |nu|^2 + c4 |mus|^2
             + < c5 nu + c6 mus, Sig >

where hats over pullbacks are dropped: Sig = phi^{*A} Sigma, nu = phi^{*A} nu,
mus = phi^{*A} mu-sharp, and <a, b> = g_N(a ^ star_M b).  The coefficients
derive from three parameters (alpha, beta, gamma) via

    c1 = 1, c2 = 1 + alpha^2, c3 = gamma^2,
    c4 = 9 + beta^2, c5 = 2 alpha gamma, c6 = 2 (3 + alpha beta),

so that the density decomposes as a sum of squares plus twice the charge
density, giving E >= 6 Vol(N) |deg| with equality exactly on solutions of

    BPS1:  star_M d^A phi = phi^{*A}(Sigma + 3 mu-sharp)
    BPS2:  phi^{*A}(alpha Sigma + beta mu-sharp + gamma nu) = 0.

The degree is int_M phi^{*A}(V_N + mu) / int_N V_N; its integrand agrees
pointwise with (1/3) < star_M d^A phi, phi^{*A}(Sigma + 3 mu-sharp) >.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    MomentConditionFailed,
    NotRiemannian,
    RankDeficient,
    TargetMismatch,
    TraceConstraintFailed,
)
from .exterior import EPS, Metric3, StarMap, recover_metric, star_trace_residual
from .gaugefield import Configuration, equivariant_pullback, standard_specs
from .grid import PatchGrid, partial_derivative
from .lie_target import qconj, qmul, qrot, sph_x, su2_algebra


@dataclass(frozen=True)
class BPSParams:
    """BPS parameters (alpha, beta, gamma) and the induced energy coefficients."""

    alpha: float = 0.0
    beta: float = 0.0
    gamma: float = 0.0

    @property
    def c(self) -> tuple[float, float, float, float, float, float]:
        a, b, g = self.alpha, self.beta, self.gamma
        return (1.0, 1.0 + a * a, g * g, 9.0 + b * b, 2.0 * a * g, 2.0 * (3.0 + a * b))


def bps_coefficients(alpha: float, beta: float, gamma: float) -> BPSParams:
    return BPSParams(float(alpha), float(beta), float(gamma))


# ---------------------------------------------------------------------------
# pairings
# ---------------------------------------------------------------------------


def _pair(u, v, degree: int, star: StarMap, gslot: np.ndarray | None) -> np.ndarray:
    """Pointwise 3-form coefficient of g(u ^ star v) for slot-valued forms.

    u, v have shape (slot, 3, *sp); gslot contracts the slots (None = delta,
    for Lie-algebra slots in an orthonormal basis).
    """
    sv = star.on_1(v) if degree == 1 else star.on_2(v)
    if gslot is None:
        return np.einsum("uixyz,uixyz->xyz", u, sv)
    return np.einsum("uvxyz,uixyz,vixyz->xyz", gslot, u, sv, optimize=True)


def integrate_density(c: Configuration, rho: np.ndarray) -> float:
    """Integral over M of the 3-form with coordinate coefficient rho."""
    return c.orientation * float(np.sum(rho * c.grid.weights()))


def _pullbacks(c: Configuration) -> dict:
    if "pullbacks" not in c._memo:
        specs = standard_specs(c.target)
        c._memo["pullbacks"] = {
            "sigma": equivariant_pullback(c, specs["sigma"]),
            "nu": equivariant_pullback(c, specs["nu"]),
            "mu_sharp": equivariant_pullback(c, specs["mu_sharp"]),
            "volume": equivariant_pullback(c, specs["volume"]),
            "mu": equivariant_pullback(c, specs["mu"]),
            "gN": c.target.metric(c.phi),
        }
    return c._memo["pullbacks"]


# ---------------------------------------------------------------------------
# energy
# ---------------------------------------------------------------------------


def energy(c: Configuration, p: BPSParams, check_orthogonality: bool = True) -> dict:
    """Energy with per-term breakdown.

    Also verifies pointwise that the moment-map contraction constraint makes
    < nu-hat, mu-sharp-hat > vanish identically (skipped for targets without
    a valid moment map).
    """
    if not c.gM.riemannian:
        raise NotRiemannian("base metric is not positive definite on the grid")
    c1, c2, c3, c4, c5, c6 = p.c
    pb = _pullbacks(c)
    star = c.star()
    gN = pb["gN"]
    P = c.covariant_differential()
    dens = {
        "c1_dphi": c1 * _pair(P, P, 1, star, gN),
        "c2_sigma": c2 * _pair(pb["sigma"], pb["sigma"], 2, star, gN),
        "c3_nu": c3 * _pair(pb["nu"], pb["nu"], 2, star, gN),
        "c4_mu_sharp": c4 * _pair(pb["mu_sharp"], pb["mu_sharp"], 2, star, gN),
        "c5_nu_sigma": c5 * _pair(pb["nu"], pb["sigma"], 2, star, gN),
        "c6_mu_sigma": c6 * _pair(pb["mu_sharp"], pb["sigma"], 2, star, gN),
    }
    terms = {k: integrate_density(c, v) for k, v in dens.items()}
    out = {
        "total": float(sum(terms.values())),
        "terms": terms,
        "density": sum(dens.values()),
    }
    if check_orthogonality and c.target.has_moment_constraint:
        ortho = _pair(pb["nu"], pb["mu_sharp"], 2, star, gN)
        scale = max(float(np.max(np.abs(out["density"]))), 1.0)
        res = float(np.max(np.abs(ortho)))
        out["orthogonality_residual"] = res
        if res > 1e-10 * scale:
            raise MomentConditionFailed(
                f"< nu-hat, mu-sharp-hat > = {res:.3e} is not identically zero"
            )
    return out


# ---------------------------------------------------------------------------
# degree
# ---------------------------------------------------------------------------


def charge_density(c: Configuration) -> np.ndarray:
    """Coordinate coefficient of phi^{*A}(V_N + mu)."""
    pb = _pullbacks(c)
    return pb["volume"] + pb["mu"]


def charge_density_cross_residual(c: Configuration) -> float:
    """Pointwise mismatch of the two charge-density expressions (roundoff-level)."""
    pb = _pullbacks(c)
    rho = charge_density(c)
    star = c.star()
    stard = star.on_1(c.covariant_differential())
    b = pb["sigma"] + 3.0 * pb["mu_sharp"]
    alt = _pair(stard, b, 2, star, pb["gN"]) / 3.0
    scale = max(float(np.max(np.abs(rho))), 1.0)
    return float(np.max(np.abs(rho - alt))) / scale


def degree(c: Configuration, vol_n: float | None = None,
           constraint_tol: float = 1e-8) -> float:
    """Equivariant topological degree int_M phi^{*A}(V_N + mu) / Vol(N).

    The numerator is the quadrature over this configuration's (margined)
    patch; callers extrapolate over margins when a global integer is claimed.
    """
    t = c.target
    kil = t.killing(c.phi)
    mu = t.mu(c.phi)
    q = np.einsum("amxyz,bmxyz->abxyz", kil, mu)
    sym = 0.5 * (q + np.swapaxes(q, 0, 1))
    if float(np.max(np.abs(sym))) > constraint_tol * max(float(np.max(np.abs(mu))), 1.0):
        raise MomentConditionFailed(
            "target moment map violates the contraction constraint; degree undefined"
        )
    vol = t.volume() if vol_n is None else vol_n
    return integrate_density(c, charge_density(c)) / vol


# ---------------------------------------------------------------------------
# BPS residuals and the bound
# ---------------------------------------------------------------------------


def bps_residuals(c: Configuration, p: BPSParams) -> dict:
    """Sup-norm residuals of the two BPS equations over all components."""
    pb = _pullbacks(c)
    star = c.star()
    stard = star.on_1(c.covariant_differential())
    b = pb["sigma"] + 3.0 * pb["mu_sharp"]
    r1 = float(np.max(np.abs(stard - b)))
    second = p.alpha * pb["sigma"] + p.beta * pb["mu_sharp"] + p.gamma * pb["nu"]
    r2 = float(np.max(np.abs(second)))
    return {"r1": r1, "r2": r2}


def general_bound_coefficient(p: BPSParams) -> float | None:
    """Coefficient of Vol(N) |deg| in the general (non-BPS) lower bound.

    Reported as a number only; no sharpness or positivity validation is
    attempted (the parameter constraints making E positive are not pinned
    down here).
    """
    c1, c2, c3, c4, c5, c6 = p.c
    den = 4.0 * c3 * (9.0 * c2 + c4 - 3.0 * c6) - 9.0 * c5 * c5
    num = c1 * (c3 * (4.0 * c2 * c4 - c6 * c6) - c4 * c5 * c5)
    if den == 0.0 or num / den < 0.0:
        return None
    return 6.0 * float(np.sqrt(num / den))


def bound_gap(c: Configuration, p: BPSParams, vol_n: float | None = None) -> dict:
    """E - 6 Vol(N) |deg|, with the sum-of-squares consistency check.

    The energy density is recomputed from the Bogomolny decomposition
      |star dphi - B|^2 + |alpha Sig + beta mus + gamma nu|^2 + 2 <star dphi, B>
    (B = Sig + 3 mus) and compared pointwise against the six-term density;
    the two agree algebraically given the coefficient map and the pointwise
    orthogonality of nu-hat and mu-sharp-hat.
    """
    e = energy(c, p)
    pb = _pullbacks(c)
    star = c.star()
    gN = pb["gN"]
    stard = star.on_1(c.covariant_differential())
    b = pb["sigma"] + 3.0 * pb["mu_sharp"]
    diff = stard - b
    second = p.alpha * pb["sigma"] + p.beta * pb["mu_sharp"] + p.gamma * pb["nu"]
    dens2 = (
        _pair(diff, diff, 2, star, gN)
        + _pair(second, second, 2, star, gN)
        + 2.0 * _pair(stard, b, 2, star, gN)
    )
    scale = max(float(np.max(np.abs(e["density"]))), 1.0)
    decomp_residual = float(np.max(np.abs(dens2 - e["density"]))) / scale
    e2 = integrate_density(c, dens2)
    vol = c.target.volume() if vol_n is None else vol_n
    deg = degree(c, vol)
    bound = 6.0 * vol * abs(deg)
    return {
        "energy": e["total"],
        "energy_decomposed": e2,
        "decomposition_residual": decomp_residual,
        "degree": deg,
        "bound": bound,
        "gap": e["total"] - bound,
        "terms": e["terms"],
    }


# ---------------------------------------------------------------------------
# metric recovery from BPS1
# ---------------------------------------------------------------------------


def bps1_star_map(c: Configuration) -> StarMap:
    """The star-like map phi^{*A}(Sigma + 3 mu-sharp) o (phi^{*A})^{-1}."""
    pb = _pullbacks(c)
    P = c.covariant_differential()
    sv = np.linalg.svd(np.moveaxis(P, (0, 1), (-2, -1)), compute_uv=False)
    if np.any(sv[..., -1] <= 1e-8 * sv[..., 0]):
        raise RankDeficient("d^A phi is rank deficient; the star map is undefined")
    b = pb["sigma"] + 3.0 * pb["mu_sharp"]  # (value mu, dual m, *sp)
    inv_pt = np.linalg.inv(np.moveaxis(P, (0, 1), (-1, -2)))  # (*sp, mu, lam)
    t = np.einsum("umxyz,xyzul->mlxyz", b, inv_pt, optimize=True)
    return StarMap(s=t)


def solve_base_metric(c: Configuration, trace_tol: float = 1e-6) -> Metric3:
    """Recover g_M from BPS1 via the trace identity and the bilinear inverse.

    Raises ``TraceConstraintFailed`` when the star-like map cannot come from
    any metric; the recovered tensor may legally fail positive definiteness
    (``riemannian`` is computed, not assumed).
    """
    t = bps1_star_map(c)
    res = star_trace_residual(t)
    scale = max(float(np.max(np.abs(t.s))), 1.0)
    if res > trace_tol * scale:
        raise TraceConstraintFailed(
            f"trace residual {res:.3e} exceeds {trace_tol:.1e} * {scale:.3e}"
        )
    return recover_metric(t, trace_tol=None)


# ---------------------------------------------------------------------------
# SU(2) adjoint reduction of the energy
# ---------------------------------------------------------------------------


def su2_matrix_fields(c: Configuration) -> tuple[np.ndarray, np.ndarray]:
    """Represent an adjoint round-sphere configuration by (U, A) fields.

    U = cos(xi) + sin(xi) x(u, v) as a unit quaternion field.  Requires the
    round adjoint-interval target (h1 = 1, h2 = sin).
    """
    fam = c.target.extras.get("family")
    if fam is None or fam.name != "round-s3":
        raise TargetMismatch("SU(2) reduction needs the round adjoint-interval target")
    xi, u, v = c.phi
    U = np.concatenate([np.cos(xi)[None], np.sin(xi) * sph_x(u, v)])
    return U, c.A


def _lie_pair(u, v, degree: int, star: StarMap) -> np.ndarray:
    return _pair(u, v, degree, star, None)


def energy_su2_reduced(U: np.ndarray, A: np.ndarray, grid: PatchGrid, gM: Metric3,
                       p: BPSParams, orientation: int = 1) -> float:
    """Energy in the group-valued form, for U: M -> SU(2) and an su(2) connection.

    Uses L^A = U^{-1}(dU + [A, U]) and the curvature couplings

        c1 |L|^2 + (c2/4) |L^L|^2 + (1/2)(4 c3 + c4) |F|^2
        + (1/2)(c4 - 4 c3) <F, U^{-1} F U>
        + (1/4) <(2 c5 - c6) F - (2 c5 + c6) U^{-1} F U, L^L>

    with L^L = L ^ L.  Agrees with :func:`energy` on the round adjoint target.
    """
    from .exterior import hodge_star

    if U.shape[0] != 4 or A.shape[:2] != (3, 3):
        raise TargetMismatch("need a quaternion U field and an su(2) connection")
    c1, c2, c3, c4, c5, c6 = p.c
    f = su2_algebra().f
    dU = np.stack([partial_derivative(U, k, grid) for k in range(3)], axis=1)  # (4, 3, *sp)
    Uc = qconj(U)
    L = np.empty((3, 3) + grid.shape)
    for lam in range(3):
        a_l = np.concatenate([np.zeros((1,) + grid.shape), A[:, lam]])
        comm = qmul(a_l, U) - qmul(U, a_l)
        L[:, lam] = qmul(Uc, dU[:, lam] + comm)[1:]
    lwl = 0.5 * np.einsum("abc,bixyz,cjxyz,mij->amxyz", f, L, L, EPS, optimize=True)

    grads = np.stack([partial_derivative(A, lam, grid) for lam in range(3)])
    curl = np.einsum("mkl,kalxyz->amxyz", EPS, grads)
    F = curl + 0.5 * np.einsum("abc,bixyz,cjxyz,mij->amxyz", f, A, A, EPS, optimize=True)
    rot = qrot(Uc)
    UFU = np.einsum("baxyz,amxyz->bmxyz", rot, F)  # U^{-1} F U components

    star = hodge_star(gM, orientation)
    dens = (
        c1 * _lie_pair(L, L, 1, star)
        + 0.25 * c2 * _lie_pair(lwl, lwl, 2, star)
        + 0.5 * (4.0 * c3 + c4) * _lie_pair(F, F, 2, star)
        + 0.5 * (c4 - 4.0 * c3) * _lie_pair(F, UFU, 2, star)
        + 0.25 * _lie_pair((2.0 * c5 - c6) * F - (2.0 * c5 + c6) * UFU, lwl, 2, star)
    )
    return orientation * float(np.sum(dens * grid.weights()))


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

CSV_HEADER = ["family", "params", "n", "margin", "E", "deg", "bound", "gap", "r1", "r2", "exit"]


@dataclass
class EnergyReport:
    """One verification row: energy, degree, bound and residuals."""

    family: str
    params: dict
    n: int
    margin: float
    energy: float
    degree: float
    bound: float
    gap: float
    r1: float
    r2: float
    terms: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)
    exit_code: int = 0

    def to_json_dict(self) -> dict:
        return {
            "family": self.family,
            "params": self.params,
            "n": self.n,
            "margin": self.margin,
            "energy": self.energy,
            "degree": self.degree,
            "bound": self.bound,
            "gap": self.gap,
            "r1": self.r1,
            "r2": self.r2,
            "terms": self.terms,
            "extras": self.extras,
            "exit": self.exit_code,
        }

    def to_csv_row(self) -> list[str]:
        return [
            self.family,
            json.dumps(self.params, sort_keys=True, separators=(",", ":")),
            str(self.n),
            repr(self.margin),
            repr(self.energy),
            repr(self.degree),
            repr(self.bound),
            repr(self.gap),
            repr(self.r1),
            repr(self.r2),
            str(self.exit_code),
        ]
