"""Pointwise exterior algebra and Hodge-star operations on 3D charts.

Differential forms are stored by their independent components: degrees
0,1,2,3 carry 1,3,3,1 components per point.  A 2-form B = (1/2) B_kl dx^k^dx^l
is stored through its epsilon-dual vector b_m = (1/2) eps_mkl B_kl, which makes
the algebra concrete:

    wedge of two 1-forms            -> cross product of component vectors
    wedge of a 1-form and a 2-form  -> dot product (3-form coefficient)
    exterior derivative of a 1-form -> curl, of a 2-form -> divergence
    contraction of a 2-form with V  -> cross product b x V

The Hodge star of a metric g maps 1-forms to 2-forms; in dual storage it is
the symmetric matrix  S = orientation * sqrt(det g) * g^{-1}.  Symmetry of S
is exactly the trace identity tr(iota_V o star) = 0 satisfied by every metric
star, and the bilinear form

    g_star(V, W) = (1/2) sum_ij star(e^j)(V, E_i) star(e^i)(E_j, W)

recovers g from S (a left inverse of g -> star on the trace-identity slice).
Maps S that do not come from a metric are legal inputs here; the recovered
tensor is then flagged when it fails positive definiteness.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConstraintViolated, DegreeOverflow, GridMismatch, SingularMetric
from .grid import PatchGrid, partial_derivative

N_COMP = {0: 1, 1: 3, 2: 3, 3: 1}

# Levi-Civita symbol, used throughout for dual-storage algebra.
EPS = np.zeros((3, 3, 3))
EPS[0, 1, 2] = EPS[1, 2, 0] = EPS[2, 0, 1] = 1.0
EPS[0, 2, 1] = EPS[2, 1, 0] = EPS[1, 0, 2] = -1.0


def assert_finite(values: np.ndarray, what: str = "field") -> np.ndarray:
    if not np.all(np.isfinite(values)):
        raise FloatingPointError(f"{what} contains non-finite values")
    return values


@dataclass
class FormField:
    """A degree-p differential form sampled on a grid.

    ``values`` has shape (*slot_dims, ncomp, n0, n1, n2) where ncomp is the
    number of independent components for the degree and the optional leading
    axis indexes a target-tangent or Lie-algebra slot.
    """

    grid: PatchGrid
    degree: int
    values: np.ndarray
    slot: str | None = None  # None | "target" | "lie"

    def __post_init__(self):
        if self.degree not in N_COMP:
            raise DegreeOverflow(f"degree {self.degree} not in 0..3")
        expect = N_COMP[self.degree]
        if self.values.shape[-3:] != self.grid.shape:
            raise GridMismatch("component arrays do not match the grid shape")
        comp_ax = self.values.ndim - 4
        if comp_ax < 0 or self.values.shape[comp_ax] != expect:
            raise ValueError(
                f"degree {self.degree} needs {expect} components, got shape {self.values.shape}"
            )
        assert_finite(self.values, f"degree-{self.degree} form")

    @property
    def ncomp(self) -> int:
        return N_COMP[self.degree]


def wedge(a: FormField, b: FormField) -> FormField:
    """Exterior product; bilinear and graded-antisymmetric.

    At most one factor may carry a slot; the product keeps it.
    """
    p, q = a.degree, b.degree
    if p + q > 3:
        raise DegreeOverflow(f"wedge of degrees {p} and {q} exceeds 3")
    if a.grid is not b.grid and a.grid != b.grid:
        raise GridMismatch("wedge of forms on different grids")
    if a.slot is not None and b.slot is not None:
        raise ValueError("wedge of two slot-valued forms is not defined here")
    va, vb = a.values, b.values
    out = wedge_values(p, q, va, vb)
    return FormField(a.grid, p + q, out, a.slot or b.slot)


def wedge_values(p: int, q: int, va: np.ndarray, vb: np.ndarray) -> np.ndarray:
    """Raw-array wedge kernel on dual storage (component axis at -4)."""
    if p in (0, 3) or q in (0, 3):
        # 1-component factor multiplies componentwise (broadcasts over comps)
        return va * vb
    if p == 1 and q == 1:
        return np.cross(va, vb, axisa=-4, axisb=-4, axisc=-4)
    if (p, q) in ((1, 2), (2, 1)):
        return np.sum(va * vb, axis=-4, keepdims=True)
    raise DegreeOverflow(f"wedge of degrees {p} and {q} exceeds 3")


def exterior_derivative(f: FormField) -> FormField:
    """Finite-difference exterior derivative.

    deg 0 -> gradient, deg 1 -> curl of the component vector (dual storage),
    deg 2 -> divergence of the dual vector.
    """
    g = f.grid
    if f.degree == 3:
        raise DegreeOverflow("d of a 3-form on a 3-manifold")
    if f.degree == 0:
        comps = [partial_derivative(f.values[..., 0, :, :, :], i, g) for i in range(3)]
        return FormField(g, 1, np.stack(comps, axis=-4), f.slot)
    grads = np.stack([partial_derivative(f.values, i, g) for i in range(3)], axis=-5)
    if f.degree == 1:
        curl = np.einsum("mkl,...kl->...m", EPS, np.moveaxis(grads, (-5, -4), (-2, -1)))
        return FormField(g, 2, np.moveaxis(curl, -1, -4), f.slot)
    div = np.einsum("...kk", np.moveaxis(grads, (-5, -4), (-2, -1)))[..., None]
    return FormField(g, 3, np.moveaxis(div, -1, -4), f.slot)


def contract(vector: np.ndarray, f: FormField) -> FormField:
    """Interior product iota_V with a vector field (components shape (3, *grid))."""
    v = f.values
    if f.degree == 0:
        raise ValueError("cannot contract a 0-form")
    if f.degree == 1:
        out = np.sum(vector * v, axis=-4, keepdims=True)
        return FormField(f.grid, 0, out, f.slot)
    if f.degree == 2:
        # (iota_V B)_l = eps_klm V^k b_m = (b x V)_l in dual storage
        out = np.cross(v, vector, axisa=-4, axisb=-4, axisc=-4)
        return FormField(f.grid, 1, out, f.slot)
    return FormField(f.grid, 2, vector * v, f.slot)


# ---------------------------------------------------------------------------
# metrics and star maps
# ---------------------------------------------------------------------------


def mat_det(m: np.ndarray) -> np.ndarray:
    """Determinant of a (3, 3, *spatial) matrix field."""
    return np.linalg.det(np.moveaxis(m, (0, 1), (-2, -1)))


def mat_inv(m: np.ndarray) -> np.ndarray:
    """Inverse of a (3, 3, *spatial) matrix field."""
    return np.moveaxis(np.linalg.inv(np.moveaxis(m, (0, 1), (-2, -1))), (-2, -1), (0, 1))


@dataclass
class Metric3:
    """Symmetric 3x3 metric components per grid point, shape (3, 3, *spatial).

    ``riemannian`` is computed from Sylvester minors, never assumed.
    """

    g: np.ndarray
    riemannian: bool = field(init=False)

    def __post_init__(self):
        gt = np.swapaxes(self.g, 0, 1)
        scale = max(float(np.max(np.abs(self.g))), 1.0)
        asym = float(np.max(np.abs(self.g - gt)))
        if asym > 1e-12 * scale:
            raise ValueError(f"metric asymmetry {asym:.3e} exceeds tolerance")
        self.g = 0.5 * (self.g + gt)
        self.riemannian = bool(np.all(self.riemannian_mask()))

    def riemannian_mask(self) -> np.ndarray:
        g = self.g
        m1 = g[0, 0]
        m2 = g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]
        m3 = mat_det(g)
        return (m1 > 0) & (m2 > 0) & (m3 > 0)

    def det(self) -> np.ndarray:
        return mat_det(self.g)

    def inv(self) -> np.ndarray:
        return mat_inv(self.g)


@dataclass
class StarMap:
    """Per-point linear map from 1-forms to 2-forms in dual storage.

    ``s`` includes the orientation sign; for a metric star it equals
    orientation * sqrt(det g) * g^{-1} and is symmetric.
    """

    s: np.ndarray  # (3, 3, *spatial)
    sqrt_det: np.ndarray | None = None  # set when built from a metric
    orientation: int = 1

    def on_1(self, comps: np.ndarray) -> np.ndarray:
        """Apply to 1-form components (..., 3, *spatial) -> dual 2-form."""
        return _matvec(self.s, comps)

    def on_2(self, dual: np.ndarray) -> np.ndarray:
        """Apply the deg-2 -> deg-1 companion (inverse of ``on_1``)."""
        return _matvec(self.inverse_matrix(), dual)

    def inverse_matrix(self) -> np.ndarray:
        return mat_inv(self.s)

    def on_0(self, f: np.ndarray) -> np.ndarray:
        if self.sqrt_det is None:
            raise ValueError("star on 0-forms needs a metric-built StarMap")
        return self.orientation * self.sqrt_det * f

    def on_3(self, rho: np.ndarray) -> np.ndarray:
        if self.sqrt_det is None:
            raise ValueError("star on 3-forms needs a metric-built StarMap")
        return self.orientation * rho / self.sqrt_det


def _matvec(m: np.ndarray, v: np.ndarray) -> np.ndarray:
    """(3,3,*sp) matrix times (...,3,*sp) vector over the -4 axis."""
    return np.einsum("abxyz,...bxyz->...axyz", m, v)


def hodge_star(metric: Metric3, orientation: int = 1) -> StarMap:
    """Star map of a riemannian metric; raises ``SingularMetric`` if det <= 0."""
    det = metric.det()
    if np.any(det <= 0):
        raise SingularMetric("metric determinant <= 0 on the grid")
    sq = np.sqrt(det)
    s = orientation * sq * metric.inv()
    return StarMap(s=s, sqrt_det=sq, orientation=orientation)


def star_trace_residual(star: StarMap) -> float:
    """max over points and basis vectors V of |tr(iota_V o star)|.

    In dual storage the trace against V = E_k is eps_kij S_ji, so the residual
    is the largest antisymmetric part of S.
    """
    s = star.s
    return float(
        max(
            np.max(np.abs(s[1, 2] - s[2, 1])),
            np.max(np.abs(s[2, 0] - s[0, 2])),
            np.max(np.abs(s[0, 1] - s[1, 0])),
        )
    )


def recover_metric(star: StarMap, trace_tol: float | None = 1e-8) -> Metric3:
    """Invert a star-like map back to a metric tensor.

    Implements the bilinear left inverse
    g(V, W) = (1/2) sum_ij star(e^j)(V, E_i) star(e^i)(E_j, W) in coordinate
    bases.  The output may fail positive definiteness (``riemannian`` False);
    that is a legal result for star-like maps not built from a metric.
    """
    if trace_tol is not None:
        res = star_trace_residual(star)
        scale = max(float(np.max(np.abs(star.s))), 1.0)
        if res > trace_tol * scale:
            raise ConstraintViolated(
                f"trace residual {res:.3e} exceeds tolerance {trace_tol:.1e} * {scale:.3e}"
            )
    s = star.s
    g = 0.5 * np.einsum("kim,jlp,mjxyz,pixyz->klxyz", EPS, EPS, s, s)
    g = 0.5 * (g + np.swapaxes(g, 0, 1))  # kill roundoff asymmetry
    return Metric3(g)


def pair_1(u: np.ndarray, v: np.ndarray, star: StarMap) -> np.ndarray:
    """Pointwise u ^ star(v) for slotless 1-forms, as a 3-form coefficient."""
    return np.sum(u * star.on_1(v), axis=-4)


def pair_2(u: np.ndarray, v: np.ndarray, star: StarMap) -> np.ndarray:
    """Pointwise u ^ star(v) for slotless 2-forms (dual storage)."""
    return np.sum(u * star.on_2(v), axis=-4)
