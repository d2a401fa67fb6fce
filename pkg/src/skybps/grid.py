"""Structured coordinate patches with high-order differentiation and quadrature.

A :class:`PatchGrid` discretizes a coordinate box in R^3.  Periodic axes carry
uniformly spaced points that exclude the right endpoint (trapezoidal weights,
spectrally accurate for smooth periodic integrands); bounded axes are shrunk
by a coordinate-singularity ``margin`` and carry inclusive endpoints with
Simpson-type weights.  All derivatives are 4th-order finite differences:
central stencils in the interior and on periodic axes, one-sided 5-point
stencils (exact on polynomials of degree <= 4) at bounded-axis endpoints.

Quantities that depend on the excluded margin slabs (volumes, degrees) are
recovered by power-law Richardson extrapolation over a decreasing sequence of
margins, see :func:`extrapolate_margin`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BoundsError, GridMismatch, ResolutionError

# 4th-order one-sided first-derivative stencils for the two rows nearest a
# boundary (forward form; the backward form is the reversed negation).
_EDGE0 = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / 12.0
_EDGE1 = np.array([-3.0, -10.0, 18.0, -6.0, 1.0]) / 12.0


@dataclass(frozen=True)
class PatchGrid:
    """Immutable structured 3D coordinate patch.

    Attributes:
        lo, hi: requested box bounds (before margin shrinking).
        n: points per axis (>= 5).
        periodic: periodicity flags per axis.
        margin: singular-endpoint clearance applied to non-periodic axes.
        lo_eff, hi_eff: bounds actually meshed (shrunk on non-periodic axes).
        h: grid spacing per axis.
    """

    lo: tuple[float, float, float]
    hi: tuple[float, float, float]
    n: tuple[int, int, int]
    periodic: tuple[bool, bool, bool]
    margin: float = 0.0
    lo_eff: tuple[float, float, float] = field(init=False)
    hi_eff: tuple[float, float, float] = field(init=False)
    h: tuple[float, float, float] = field(init=False)

    def __post_init__(self):
        lo_eff, hi_eff, h = [], [], []
        for i in range(3):
            if not np.isfinite(self.lo[i]) or not np.isfinite(self.hi[i]):
                raise BoundsError(f"axis {i}: non-finite bounds")
            if self.hi[i] <= self.lo[i]:
                raise BoundsError(f"axis {i}: hi={self.hi[i]} <= lo={self.lo[i]}")
            if self.n[i] < 5:
                raise ResolutionError(f"axis {i}: need n >= 5, got {self.n[i]}")
            if self.periodic[i]:
                a, b = self.lo[i], self.hi[i]
                step = (b - a) / self.n[i]
            else:
                if self.margin < 0:
                    raise BoundsError("margin must be >= 0")
                if self.margin >= (self.hi[i] - self.lo[i]) / 4.0:
                    raise BoundsError(
                        f"axis {i}: margin {self.margin} >= quarter of axis length"
                    )
                a, b = self.lo[i] + self.margin, self.hi[i] - self.margin
                step = (b - a) / (self.n[i] - 1)
            lo_eff.append(a)
            hi_eff.append(b)
            h.append(step)
        object.__setattr__(self, "lo_eff", tuple(lo_eff))
        object.__setattr__(self, "hi_eff", tuple(hi_eff))
        object.__setattr__(self, "h", tuple(h))

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.n

    def axis_points(self, i: int) -> np.ndarray:
        """1D coordinate array along axis i (periodic axes exclude hi)."""
        if self.periodic[i]:
            return self.lo_eff[i] + self.h[i] * np.arange(self.n[i])
        return np.linspace(self.lo_eff[i], self.hi_eff[i], self.n[i])

    def meshes(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Coordinate fields (X0, X1, X2), each of shape ``self.shape``."""
        return tuple(np.meshgrid(*(self.axis_points(i) for i in range(3)), indexing="ij"))

    def axis_weights(self, i: int) -> np.ndarray:
        """Composite quadrature weights along axis i; they sum to the axis length."""
        n, h = self.n[i], self.h[i]
        if self.periodic[i]:
            return np.full(n, h)
        w = np.zeros(n)
        if n % 2 == 1:
            w[0] = w[-1] = 1.0
            w[1:-1:2] = 4.0
            w[2:-1:2] = 2.0
            w *= h / 3.0
        else:
            # composite Simpson on the first n-4 intervals, 3/8 rule on the last 3
            m = n - 3
            w[0] = w[m - 1] = 1.0
            w[1 : m - 1 : 2] = 4.0
            w[2 : m - 1 : 2] = 2.0
            w[: m] *= h / 3.0
            w[m - 1 :] += np.array([1.0, 3.0, 3.0, 1.0]) * (3.0 * h / 8.0)
        return w

    def weights(self) -> np.ndarray:
        """Tensor-product quadrature weights, shape ``self.shape``."""
        w0, w1, w2 = (self.axis_weights(i) for i in range(3))
        return w0[:, None, None] * w1[None, :, None] * w2[None, None, :]

    def box_volume(self) -> float:
        """Coordinate volume of the meshed (margin-shrunk) box."""
        return float(np.prod([self.hi_eff[i] - self.lo_eff[i] for i in range(3)]))

    def with_resolution(self, n) -> "PatchGrid":
        """Same patch at a different resolution (for convergence studies)."""
        return PatchGrid(self.lo, self.hi, tuple(int(k) for k in n), self.periodic, self.margin)

    def with_margin(self, margin: float) -> "PatchGrid":
        """Same patch with a different singularity clearance."""
        return PatchGrid(self.lo, self.hi, self.n, self.periodic, margin)

    def descriptor(self) -> dict:
        """JSON-serializable description of the patch."""
        return {
            "lo": list(self.lo),
            "hi": list(self.hi),
            "n": list(self.n),
            "periodic": list(self.periodic),
            "margin": self.margin,
        }

    @staticmethod
    def from_descriptor(d: dict) -> "PatchGrid":
        return PatchGrid(
            tuple(d["lo"]), tuple(d["hi"]), tuple(d["n"]), tuple(d["periodic"]), d["margin"]
        )


def build_patch(lo, hi, n, periodic, margin=0.0) -> PatchGrid:
    """Construct a :class:`PatchGrid` with validated bounds and resolution."""
    return PatchGrid(tuple(map(float, lo)), tuple(map(float, hi)),
                     tuple(map(int, n)), tuple(map(bool, periodic)), float(margin))


def partial_derivative(values: np.ndarray, axis: int, grid: PatchGrid) -> np.ndarray:
    """4th-order finite-difference d/dx_axis of a sampled field.

    ``values`` may carry arbitrary leading component axes; the trailing three
    axes must match ``grid.shape``.  Periodic axes use the wrapped central
    stencil; bounded axes switch to one-sided 5-point stencils on the two
    rows nearest each endpoint.
    """
    if values.shape[-3:] != grid.shape:
        raise GridMismatch(f"field shape {values.shape[-3:]} != grid shape {grid.shape}")
    ax = values.ndim - 3 + axis
    h = grid.h[axis]
    if grid.periodic[axis]:
        out = (
            np.roll(values, 2, axis=ax)
            - 8.0 * np.roll(values, 1, axis=ax)
            + 8.0 * np.roll(values, -1, axis=ax)
            - np.roll(values, -2, axis=ax)
        ) / (12.0 * h)
        return out
    v = np.moveaxis(values, ax, -1)
    out = np.empty_like(v)
    out[..., 2:-2] = (v[..., :-4] - 8.0 * v[..., 1:-3] + 8.0 * v[..., 3:-1] - v[..., 4:]) / (12.0 * h)
    out[..., 0] = np.tensordot(v[..., :5], _EDGE0, axes=([-1], [0])) / h
    out[..., 1] = np.tensordot(v[..., :5], _EDGE1, axes=([-1], [0])) / h
    out[..., -1] = -np.tensordot(v[..., -5:], _EDGE0[::-1], axes=([-1], [0])) / h
    out[..., -2] = -np.tensordot(v[..., -5:], _EDGE1[::-1], axes=([-1], [0])) / h
    return np.moveaxis(out, -1, ax)


def gradient(values: np.ndarray, grid: PatchGrid) -> np.ndarray:
    """Stack of the three partial derivatives along a new leading axis."""
    return np.stack([partial_derivative(values, i, grid) for i in range(3)])


def integrate(f: np.ndarray, grid: PatchGrid, density: np.ndarray | None = None) -> float:
    """Composite quadrature of ``f`` (optionally times ``density``) over the patch.

    np.sum performs pairwise reduction, so the result is reproducible for a
    fixed grid and input.
    """
    if f.shape != grid.shape:
        raise GridMismatch(f"integrand shape {f.shape} != grid shape {grid.shape}")
    integrand = f if density is None else f * _checked(density, grid)
    return float(np.sum(integrand * grid.weights()))


def _checked(density: np.ndarray, grid: PatchGrid) -> np.ndarray:
    if density.shape != grid.shape:
        raise GridMismatch("density grid differs from integrand grid")
    return density


def extrapolate_margin(margins, values, min_signal=1e-9):
    """Power-law Richardson extrapolation of ``values`` as margin -> 0.

    ``margins`` must be a decreasing geometric sequence (constant ratio).  A
    three-point fit v(m) = v0 + c * m^p determines the order p empirically;
    with two points a quadratic deficit is assumed.  When successive values
    agree to ``min_signal`` the last value is returned (converged already).
    """
    margins = [float(m) for m in margins]
    values = [float(v) for v in values]
    if len(values) == 1:
        return values[0]
    if abs(values[-1] - values[-2]) < min_signal:
        return values[-1]
    if len(values) == 2:
        r = margins[0] / margins[1]
        return values[1] + (values[1] - values[0]) / (r**2 - 1.0)
    m1, m2, m3 = margins[-3:]
    v1, v2, v3 = values[-3:]
    r = m1 / m2
    if abs(m2 / m3 - r) > 1e-9 * r:
        raise ValueError("margins must form a geometric sequence")
    d1, d2 = v1 - v2, v2 - v3
    if abs(d2) < min_signal or abs(d1) < min_signal or d1 * d2 <= 0:
        return v3
    ratio = d1 / d2
    if ratio <= 1.0:  # not decreasing: no power law to fit, keep finest value
        return v3
    u = 1.0 / ratio  # r^{-p}
    return v3 - d2 * u / (1.0 - u)
