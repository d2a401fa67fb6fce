"""Gauged configurations (phi, A) over a patch: curvature, covariant
differential, equivariant pullback, gauge transformations and rank
diagnostics.

phi is stored through its target-chart components phi^mu(x); maps that wind
around periodic axes (identity maps, fibre shifts) carry an explicit
``phi_winding`` slope matrix so that finite differences act on the periodic
remainder only.  A is stored through its Lie-algebra components A^a_lambda(x).

Derived fields are pure functions of the configuration and are memoized; a
Configuration is treated as immutable after construction.
"""

from __future__ import annotations

import base64
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ChartExit, DegreeOverflow, GridMismatch
from .exterior import EPS, Metric3, StarMap, assert_finite, hodge_star
from .grid import PatchGrid, partial_derivative
from .lie_target import TargetGeometry, qconj, qexp, qmul, qrot, target_partials


@dataclass
class Configuration:
    """A gauged Skyrme pair (phi, A) with base metric over a PatchGrid.

    phi: (3, *grid) target-chart components; A: (dim g, 3, *grid) Lie-valued
    1-form components (None means A = 0); gM: base metric; orientation: sign
    of the coordinate frame dx^0 ^ dx^1 ^ dx^2 against the orientation of M.
    """

    grid: PatchGrid
    target: TargetGeometry
    phi: np.ndarray
    A: np.ndarray | None
    gM: Metric3
    orientation: int = 1
    phi_winding: np.ndarray | None = None  # (3 target, 3 axes) linear slopes
    _memo: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.phi.shape != (3,) + self.grid.shape:
            raise GridMismatch("phi components do not match the grid")
        d = self.target.algebra.dim
        if self.A is None:
            self.A = np.zeros((d, 3) + self.grid.shape)
        if self.A.shape != (d, 3) + self.grid.shape:
            raise GridMismatch("A components do not match the grid/algebra")
        if self.gM.g.shape != (3, 3) + self.grid.shape:
            raise GridMismatch("gM does not match the grid")
        if self.phi_winding is None:
            self.phi_winding = np.zeros((3, 3))
        assert_finite(self.phi, "phi")
        assert_finite(self.A, "A")
        self._check_chart()

    def _check_chart(self):
        for mu in range(3):
            if self.target.periodic[mu]:
                continue
            lo, hi = self.target.lo[mu], self.target.hi[mu]
            vals = self.phi[mu]
            if vals.min() <= lo or vals.max() >= hi:
                raise ChartExit(
                    f"phi^{mu} in [{vals.min():.4g}, {vals.max():.4g}] leaves the "
                    f"open target chart ({lo:.4g}, {hi:.4g})"
                )

    # -- derived fields ----------------------------------------------------

    def star(self) -> StarMap:
        if "star" not in self._memo:
            self._memo["star"] = hodge_star(self.gM, self.orientation)
        return self._memo["star"]

    def dphi(self) -> np.ndarray:
        """Plain differential d phi^mu, winding-aware; shape (3, 3, *grid)."""
        if "dphi" not in self._memo:
            mesh = np.stack(self.grid.meshes())
            rem = self.phi - np.einsum("ml,lxyz->mxyz", self.phi_winding, mesh)
            out = np.stack(
                [partial_derivative(rem, lam, self.grid) for lam in range(3)], axis=1
            )
            out += self.phi_winding[:, :, None, None, None]
            self._memo["dphi"] = out
        return self._memo["dphi"]

    def curvature(self) -> np.ndarray:
        """F^a = dA^a + (1/2) f^a_bc A^b ^ A^c, dual storage (dim g, 3, *grid)."""
        if "F" not in self._memo:
            grads = np.stack(
                [partial_derivative(self.A, lam, self.grid) for lam in range(3)]
            )
            curl = np.einsum("mkl,kalxyz->amxyz", EPS, grads)
            # wedge of the two 1-form slots is a cross product in dual storage
            cross = 0.5 * np.einsum(
                "abc,bixyz,cjxyz,mij->amxyz",
                self.target.algebra.f, self.A, self.A, EPS, optimize=True,
            )
            self._memo["F"] = assert_finite(curl + cross, "curvature")
        return self._memo["F"]

    def covariant_differential(self) -> np.ndarray:
        """d^A phi^mu = d phi^mu - A^a I_a^mu(phi); shape (3 target, 3 form, *grid)."""
        if "P" not in self._memo:
            kil = self.target.killing(self.phi)  # (a, mu, *grid)
            out = self.dphi() - np.einsum("alxyz,amxyz->mlxyz", self.A, kil)
            self._memo["P"] = assert_finite(out, "covariant differential")
        return self._memo["P"]

    def bianchi_residual(self) -> float:
        """max |dF^a + f^a_bc A^b ^ F^c| (3-form coefficient, per algebra slot)."""
        F = self.curvature()
        div = sum(partial_derivative(F[:, m], m, self.grid) for m in range(3))
        quad = np.einsum(
            "abc,bmxyz,cmxyz->axyz", self.target.algebra.f, self.A, F, optimize=True
        )
        return float(np.max(np.abs(div + quad)))


def cofactor(P: np.ndarray) -> np.ndarray:
    """Map induced on 2-forms by the 1-form pullback P[mu, lam].

    C[m, rho] = (1/2) eps_mkl eps_rho-mu-nu P[mu, k] P[nu, l]; pulls a target
    dual 2-form b_rho back to the base dual component m.
    """
    return 0.5 * np.einsum("mkl,ruv,ukxyz,vlxyz->mrxyz", EPS, EPS, P, P, optimize=True)


def det_p(P: np.ndarray) -> np.ndarray:
    """det of the pullback matrix: phi^{*A}(dy^1^dy^2^dy^3) = det_p dx^1^dx^2^dx^3."""
    return np.einsum("uvw,uxyz,vxyz,wxyz->xyz", EPS, P[:, 0], P[:, 1], P[:, 2], optimize=True)


# ---------------------------------------------------------------------------
# equivariant pullback
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EquivariantFormSpec:
    """Coefficient data of an equivariant form of bidegree (p, q).

    ``coeff`` maps chart points y (3, ...) to the coefficient array with axes
    (algebra,)*p + (value 3,) if valued + (components of q,) if q > 0, then
    the point axes.  Total degree is 2p + q.
    """

    p: int
    q: int
    coeff: callable
    valued: bool = False
    name: str = ""


def standard_specs(target: TargetGeometry) -> dict[str, EquivariantFormSpec]:
    """The named equivariant forms used by the energy and degree."""
    return {
        "volume": EquivariantFormSpec(0, 3, target.vol_coeff, name="volume"),
        "mu": EquivariantFormSpec(1, 1, target.mu_fn, name="mu"),
        "sigma": EquivariantFormSpec(0, 2, target.sigma_dual, valued=True, name="sigma"),
        "nu": EquivariantFormSpec(1, 0, target.killing_fn, valued=True, name="nu"),
        "mu_sharp": EquivariantFormSpec(1, 0, target.mu_sharp, valued=True, name="mu_sharp"),
        "identity": EquivariantFormSpec(
            0, 1, _identity_coeff, valued=True, name="identity"
        ),
    }


def _identity_coeff(y):
    eye = np.eye(3)
    return np.broadcast_to(
        eye.reshape(3, 3, 1, 1, 1), (3, 3) + np.shape(y[0])
    ).astype(np.result_type(y))


def equivariant_pullback(c: Configuration, spec: EquivariantFormSpec) -> np.ndarray:
    """phi^{*A} of an equivariant form: F fills algebra slots, d^A phi form slots.

    Returns dual-storage components of the degree-(2p+q) result, with a
    leading value axis when the form is tangent-valued.  Degrees above 3 are
    rejected; p >= 2 cannot occur below degree 4 on a 3-manifold.
    """
    p, q = spec.p, spec.q
    deg = 2 * p + q
    if deg > 3:
        raise DegreeOverflow(f"pullback of degree {deg} > 3 (p={p}, q={q})")
    if p >= 2:
        raise DegreeOverflow("p >= 2 needs degree >= 4, unreachable on a 3-manifold")
    coeff = spec.coeff(c.phi)
    P = c.covariant_differential()
    if p == 0:
        if q == 0:
            return coeff
        if q == 1:
            return np.einsum("...uxyz,ulxyz->...lxyz", coeff, P)
        if q == 2:
            return np.einsum("...rxyz,mrxyz->...mxyz", coeff, cofactor(P))
        return coeff * det_p(P)
    F = c.curvature()
    if q == 0:
        # (p=1, q=0): a 2-form; value slot optional
        return np.einsum("a...xyz,amxyz->...mxyz", coeff, F)
    # (p=1, q=1): a 3-form
    return np.einsum("auxyz,amxyz,umxyz->xyz", coeff, F, P, optimize=True)


# ---------------------------------------------------------------------------
# naturality of the pullback against the equivariant differential
# ---------------------------------------------------------------------------


def pullback_naturality_residual(c: Configuration, spec: EquivariantFormSpec) -> float:
    """max-norm of phi^{*A}(d_g beta) - d(phi^{*A} beta).

    d_g beta(X) = d(beta(X)) - iota_{nu(X)} beta(X): the first part raises q,
    the second raises p.  For p >= 1 or 2p + q >= 3 both sides are forms of
    degree > 3 and the residual vanishes structurally (returns 0).  The
    meaningful cases on a 3-manifold are invariant (p = 0) forms of degree
    1 or 2; target-side coefficient derivatives are exact (complex step), the
    outer differential uses the 4th-order grid stencils.
    """
    if spec.valued:
        raise ValueError("naturality residual is defined for scalar-valued forms")
    p, q = spec.p, spec.q
    if p >= 1 or 2 * p + q >= 3:
        return 0.0
    grid, target = c.grid, c.target

    # d(phi^{*A} beta) by grid finite differences
    pb = equivariant_pullback(c, spec)
    if q == 1:
        grads = np.stack([partial_derivative(pb, k, grid) for k in range(3)])
        rhs = np.einsum("mkl,klxyz->mxyz", EPS, grads)
    else:  # q == 2
        rhs = sum(partial_derivative(pb[m], m, grid) for m in range(3))

    # exterior-derivative part of d_g beta, pulled back
    if q == 1:
        def dcoeff(y):
            dmu = target_partials(spec.coeff, y)
            return np.einsum("mkl,klxyz->mxyz", EPS, dmu)

        lhs = equivariant_pullback(c, EquivariantFormSpec(0, 2, dcoeff))
    else:
        def dcoeff(y):
            dmu = target_partials(spec.coeff, y)
            return np.einsum("mmxyz->xyz", dmu)

        lhs = equivariant_pullback(c, EquivariantFormSpec(0, 3, dcoeff))

    # contraction part: (iota_{nu(I_a)} beta) is a (1, q-1) form
    if q == 1:
        def contr(y):
            return np.einsum("alxyz,lxyz->axyz", target.killing_fn(y), spec.coeff(y))

        lhs = lhs - equivariant_pullback(c, EquivariantFormSpec(1, 0, contr))
    else:
        def contr(y):
            # (iota_{I_a} B)_l = (b x I_a)_l in dual storage
            return np.cross(
                spec.coeff(y)[None], target.killing_fn(y), axisa=1, axisb=1, axisc=1
            )

        lhs = lhs - equivariant_pullback(c, EquivariantFormSpec(1, 1, contr))
    return float(np.max(np.abs(lhs - rhs)))


def naturality_check_specs(target: TargetGeometry) -> list[tuple[str, EquivariantFormSpec]]:
    """Invariant (p = 0) forms on which the naturality residual is nontrivial.

    For circle-fibered targets the moment 1-form itself is invariant, as is
    its companion iota_nu V_N; for the sphere-orbit targets the invariant
    forms are radial profiles of dxi and of the orbit area form.
    """
    if target.algebra.dim == 1:
        def mu_one_form(y):
            return target.mu_fn(y)[0]

        def nu_volume(y):
            return target.vol_coeff(y) * target.killing_fn(y)[0]

        return [
            ("mu-1form", EquivariantFormSpec(0, 1, mu_one_form)),
            ("iota-nu-volume-2form", EquivariantFormSpec(0, 2, nu_volume)),
        ]

    def radial_one_form(y):
        out = np.zeros((3,) + np.shape(y[0]), dtype=np.result_type(y))
        out[0] = np.cos(y[0])
        return out

    def radial_area_form(y):
        # s(xi) * (area form of the orbit sphere), dual storage: omega = sin(u) du^dv
        out = np.zeros((3,) + np.shape(y[0]), dtype=np.result_type(y))
        out[0] = (1.0 + 0.25 * y[0]) * np.sin(y[1])
        return out

    return [
        ("radial-1form", EquivariantFormSpec(0, 1, radial_one_form)),
        ("radial-area-2form", EquivariantFormSpec(0, 2, radial_area_form)),
    ]


# ---------------------------------------------------------------------------
# gauge transformations
# ---------------------------------------------------------------------------


def gauge_transform(c: Configuration, lam: np.ndarray, finite: bool = True,
                    lam_winding: np.ndarray | None = None):
    """Apply a gauge transformation phi -> exp(-lam) . phi, A -> exp(-lam) . A.

    ``lam`` has shape (dim g, *grid).  In finite mode a new Configuration is
    returned; in infinitesimal mode the pair of first-order variation fields
    (phi_dot, A_dot) is returned instead.  ``lam_winding`` (dim g, 3) declares
    linear growth of lam along the axes so its differential is exact for
    non-periodic profiles on periodic axes.
    """
    grid, target = c.grid, c.target
    d = target.algebra.dim
    if lam.shape != (d,) + grid.shape:
        raise GridMismatch("gauge parameter does not match the grid/algebra")
    if lam_winding is None:
        lam_winding = np.zeros((d, 3))
    mesh = np.stack(grid.meshes())
    rem = lam - np.einsum("al,lxyz->axyz", lam_winding, mesh)
    dlam = np.stack([partial_derivative(rem, k, grid) for k in range(3)], axis=1)
    dlam += lam_winding[:, :, None, None, None]

    if not finite:
        kil = target.killing(c.phi)
        phi_dot = np.einsum("axyz,amxyz->mxyz", lam, kil)
        a_dot = dlam + np.einsum("abc,blxyz,cxyz->alxyz", target.algebra.f, c.A, lam)
        return phi_dot, a_dot

    if target.algebra.dim == 1:
        if target.action_fn is None or target.fiber_axis is None:
            raise ValueError("target does not define a finite u(1) action")
        phi_new = target.action_fn(lam[0], c.phi)
        a_new = c.A + dlam
        winding = c.phi_winding.copy()
        winding[target.fiber_axis] += lam_winding[0]
        return Configuration(grid, target, phi_new, a_new, c.gM, c.orientation, winding)

    if target.action_fn is None:
        raise ValueError("target does not define a finite group action")
    u = qexp(-lam)  # group element acting on the target
    g = qexp(lam)
    phi_new = target.action_fn(u, c.phi)
    # continuity across periodic wraps: keep the winding, re-wrap the remainder
    phi_new = _rewrap(phi_new, c.phi, target)
    dg = np.stack([partial_derivative(g, k, grid) for k in range(3)], axis=1)
    pure = np.stack([qmul(qconj(g), dg[:, k]) for k in range(3)], axis=1)
    maurer = pure[1:]  # e-basis components of g^{-1} dg
    rot = qrot(qconj(g))
    conjugated = np.einsum("baxyz,alxyz->blxyz", rot, c.A)
    a_new = maurer + conjugated
    return Configuration(grid, target, phi_new, a_new, c.gM, c.orientation,
                         c.phi_winding.copy())


def _rewrap(phi_new: np.ndarray, phi_old: np.ndarray, target: TargetGeometry) -> np.ndarray:
    """Shift periodic target components by full periods to stay near phi_old."""
    out = np.array(phi_new, copy=True)
    for mu in range(3):
        if not target.periodic[mu]:
            continue
        period = target.hi[mu] - target.lo[mu]
        jump = out[mu] - phi_old[mu]
        out[mu] = phi_old[mu] + (np.mod(jump + 0.5 * period, period) - 0.5 * period)
    return out


# ---------------------------------------------------------------------------
# rank diagnostics
# ---------------------------------------------------------------------------


def rank_profile(c: Configuration, threshold: float = 1e-8) -> dict:
    """Pointwise rank of d^A phi with the induced-star consistency checks.

    Reports the rank histogram, the rank of phi^{*A} star_N, whether the
    nullity relation rk(phi^{*A} star_N) = max(rk - 1, 0) holds wherever
    rk < 3, and the trace-free residual of the moment-map composite wherever
    rk = 3.
    """
    P = c.covariant_differential()
    Pm = np.moveaxis(P, (0, 1), (-2, -1))  # (..., mu, lam)
    sv = np.linalg.svd(Pm, compute_uv=False)
    # threshold relative to the largest singular value over the whole patch,
    # with an absolute roundoff floor so all-tiny fields count as rank 0
    global_scale = float(sv.max())
    cut = max(threshold * global_scale, 1e-12)
    ranks = np.sum(sv > cut, axis=-1)

    star_n = c.target.sigma_dual(c.phi)  # (rho dual, mu) target star matrix
    M = np.einsum("mrxyz,rnxyz->mnxyz", cofactor(P), star_n, optimize=True)
    sv_m = np.linalg.svd(np.moveaxis(M, (0, 1), (-2, -1)), compute_uv=False)
    # threshold against the composite's natural scale, not its own leading
    # singular value (which may itself be roundoff for degenerate maps)
    cut_m = max(threshold * global_scale**2 * float(np.max(np.abs(star_n))), 1e-12)
    ranks_m = np.sum(sv_m > cut_m, axis=-1)

    deficient = ranks < 3
    nullity_ok = bool(
        np.all(ranks_m[deficient] == np.maximum(ranks[deficient] - 1, 0))
    ) if np.any(deficient) else True

    tracefree = None
    if np.any(~deficient):
        mus = c.target.mu_sharp(c.phi)
        F = c.curvature()
        mhat = np.einsum("auxyz,amxyz->muxyz", mus, F)  # map: u_mu -> dual m
        full = ~deficient
        Pf = np.moveaxis(P, (0, 1), (-2, -1))[full]  # rows mu, cols lam
        inv = np.linalg.inv(np.swapaxes(Pf, -2, -1))  # (lam, mu)^{-1} -> (mu, lam)... see below
        # composite K[m, lam] = mhat[m, mu] * (P^T)^{-1}[mu, lam]
        mh = np.moveaxis(mhat, (0, 1), (-2, -1))[full]  # (..., m, mu)
        comp = mh @ inv  # (..., m, lam)
        anti = comp - np.swapaxes(comp, -2, -1)
        tracefree = float(np.max(np.abs(anti))) if comp.size else 0.0

    hist = {int(r): int(np.sum(ranks == r)) for r in np.unique(ranks)}
    return {
        "ranks": ranks,
        "histogram": hist,
        "star_pullback_ranks": ranks_m,
        "nullity_consistent": nullity_ok,
        "tracefree_residual": tracefree,
    }


# ---------------------------------------------------------------------------
# serialization (bit-exact JSON container)
# ---------------------------------------------------------------------------


def _encode(arr: np.ndarray) -> dict:
    a = np.ascontiguousarray(arr, dtype=np.float64)
    return {
        "shape": list(a.shape),
        "dtype": "float64",
        "data": base64.b64encode(a.tobytes()).decode("ascii"),
    }


def _decode(d: dict) -> np.ndarray:
    raw = base64.b64decode(d["data"])
    return np.frombuffer(raw, dtype=np.float64).reshape(d["shape"]).copy()


def configuration_to_json(c: Configuration, meta: dict | None = None) -> str:
    """Self-describing JSON snapshot; float arrays round-trip bit-exactly."""
    doc = {
        "schema": "skybps-configuration/1",
        "grid": c.grid.descriptor(),
        "orientation": c.orientation,
        "target": c.target.name,
        "meta": meta or {},
        "fields": {
            "phi": _encode(c.phi),
            "A": _encode(c.A),
            "gM": _encode(c.gM.g),
            "phi_winding": _encode(c.phi_winding),
        },
    }
    return json.dumps(doc)


def configuration_from_json(text: str, target: TargetGeometry) -> Configuration:
    doc = json.loads(text)
    if doc.get("schema") != "skybps-configuration/1":
        raise ValueError("unrecognized configuration container")
    if doc["target"] != target.name:
        raise ValueError(f"snapshot was taken on target {doc['target']!r}")
    grid = PatchGrid.from_descriptor(doc["grid"])
    f = doc["fields"]
    return Configuration(
        grid=grid,
        target=target,
        phi=_decode(f["phi"]),
        A=_decode(f["A"]),
        gM=Metric3(_decode(f["gM"])),
        orientation=doc["orientation"],
        phi_winding=_decode(f["phi_winding"]),
    )
