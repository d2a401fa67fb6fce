import numpy as np
import pytest

from skybps.errors import BoundsError, GridMismatch, ResolutionError
from skybps.grid import (
    build_patch,
    extrapolate_margin,
    integrate,
    partial_derivative,
)

PI = np.pi


def test_build_patch_s3_chart():
    g = build_patch((0, 0, 0), (2 * PI, PI / 2, 4 * PI), (32, 32, 32),
                    (True, False, True), 0.05)
    assert g.lo_eff[1] == pytest.approx(0.05)
    assert g.hi_eff[1] == pytest.approx(PI / 2 - 0.05)
    # periodic axes untouched
    assert g.lo_eff[0] == 0.0 and g.hi_eff[0] == 2 * PI
    assert all(h > 0 for h in g.h)


def test_build_patch_unit_box_weights():
    g = build_patch((0, 0, 0), (1, 1, 1), (5, 5, 5), (False, False, False), 0)
    assert np.sum(g.weights()) == pytest.approx(1.0, rel=1e-12)


@pytest.mark.parametrize("n", [5, 6, 16, 47, 48])
def test_weights_sum_to_box_volume(n):
    g = build_patch((0, -1, 2), (2 * PI, 1.5, 3), (n, n + 1, n + 2),
                    (True, False, False), 0.1)
    assert np.sum(g.weights()) == pytest.approx(g.box_volume(), rel=1e-12)


def test_build_patch_errors():
    with pytest.raises(BoundsError):
        build_patch((0, 0, 0), (1, -1, 1), (8, 8, 8), (False,) * 3, 0)
    with pytest.raises(ResolutionError):
        build_patch((0, 0, 0), (1, 1, 1), (4, 8, 8), (False,) * 3, 0)
    # margin >= quarter length rejected
    with pytest.raises(BoundsError):
        build_patch((0, 0, 0), (1, 1, 1), (8, 8, 8), (False,) * 3, 0.3)


def test_derivative_periodic_sin():
    # truncation is h^4 f^(5) / 30: 3.1e-6 at n=64, under 1e-6 from n=96 on
    g = build_patch((0, 0, 0), (2 * PI, 1, 1), (64, 5, 5), (True, False, False), 0)
    th = g.meshes()[0]
    err = np.max(np.abs(partial_derivative(np.sin(th), 0, g) - np.cos(th)))
    assert err < 5e-6
    g = build_patch((0, 0, 0), (2 * PI, 1, 1), (96, 5, 5), (True, False, False), 0)
    th = g.meshes()[0]
    err = np.max(np.abs(partial_derivative(np.sin(th), 0, g) - np.cos(th)))
    assert err < 1e-6


def test_derivative_constant_exact():
    g = build_patch((0, 0, 0), (1, 1, 1), (8, 8, 8), (False,) * 3, 0)
    f = np.full(g.shape, 2.5)
    # exact up to roundoff in the one-sided stencil rows
    assert np.max(np.abs(partial_derivative(f, 1, g))) < 1e-13


def test_derivative_polynomial_exact():
    g = build_patch((0, 0, 0), (1, 2, 1), (8, 16, 8), (False,) * 3, 0)
    x = g.meshes()[1]
    err = np.max(np.abs(partial_derivative(x**2, 1, g) - 2 * x))
    assert err < 1e-8
    # 4th-order one-sided stencils keep quartics exact too
    err4 = np.max(np.abs(partial_derivative(x**4, 1, g) - 4 * x**3))
    assert err4 < 1e-10


def test_richardson_consistency():
    errs = []
    for n in (32, 64):
        g = build_patch((0, 0, 0), (2 * PI, 1, 1), (n, 5, 5), (True, False, False), 0)
        th = g.meshes()[0]
        errs.append(np.max(np.abs(partial_derivative(np.sin(th), 0, g) - np.cos(th))))
    assert errs[0] / errs[1] >= 12.0
    # bounded axis with one-sided rows
    errs = []
    for n in (32, 64):
        g = build_patch((0, 0, 0), (1, 1, 1), (5, n, 5), (False,) * 3, 0)
        x = g.meshes()[1]
        errs.append(np.max(np.abs(partial_derivative(np.exp(x), 1, g) - np.exp(x))))
    assert errs[0] / errs[1] >= 12.0


def test_mixed_partials_commute():
    g = build_patch((0, 0, 0), (2 * PI, 1, 1), (64, 64, 5), (True, False, False), 0)
    th, x, _ = g.meshes()
    f = np.sin(th) * np.exp(x)
    d01 = partial_derivative(partial_derivative(f, 0, g), 1, g)
    d10 = partial_derivative(partial_derivative(f, 1, g), 0, g)
    assert np.max(np.abs(d01 - d10)) < 1e-6


def test_integrate_unit_box():
    g = build_patch((0, 0, 0), (1, 1, 1), (5, 5, 5), (False,) * 3, 0)
    assert integrate(np.ones(g.shape), g) == pytest.approx(1.0, rel=1e-12)
    assert integrate(np.ones(g.shape), g, np.ones(g.shape)) == pytest.approx(1.0)


def test_integrate_sin_squared_periodic():
    g = build_patch((0, 0, 0), (2 * PI, 1, 1), (16, 5, 5), (True, False, False), 0)
    th = g.meshes()[0]
    assert integrate(np.sin(th) ** 2, g) == pytest.approx(PI, abs=1e-12)


def test_integrate_round_s3_volume_margin_extrapolated():
    # hyperspherical chart (xi, u, psi): density sin^2(xi) sin(u)
    margins = [0.12, 0.06, 0.03]
    vals = []
    for m in margins:
        g = build_patch((0, 0, 0), (PI, PI, 2 * PI), (48, 48, 48),
                        (False, False, True), m)
        xi, u, _ = g.meshes()
        vals.append(integrate(np.sin(xi) ** 2 * np.sin(u), g))
    vol = extrapolate_margin(margins, vals)
    assert vol == pytest.approx(2 * PI**2, rel=1e-2)


def test_integrate_grid_mismatch():
    g1 = build_patch((0, 0, 0), (1, 1, 1), (5, 5, 5), (False,) * 3, 0)
    with pytest.raises(GridMismatch):
        integrate(np.ones((6, 5, 5)), g1)


def test_exact_differential_integrates_to_zero():
    # d/dtheta of a margin-supported smooth form integrates to ~0 over the
    # periodic axis (stencil and trapezoid weights are translation invariant)
    g = build_patch((0, 0, 0), (2 * PI, 1, 1), (32, 16, 16), (True, False, False), 0.1)
    th, x, y = g.meshes()
    bump = np.sin(PI * (x - g.lo_eff[1]) / (g.hi_eff[1] - g.lo_eff[1])) ** 2
    f = np.sin(2 * th) * bump * np.cos(y)
    total = integrate(partial_derivative(f, 0, g), g)
    assert abs(total) < 1e-10


def test_extrapolate_margin_power_law():
    margins = [0.2, 0.1, 0.05]
    vals = [1.0 - 3.0 * m**2 for m in margins]
    assert extrapolate_margin(margins, vals) == pytest.approx(1.0, abs=1e-12)
    vals = [2.0 + 0.7 * m for m in margins]
    assert extrapolate_margin(margins, vals) == pytest.approx(2.0, abs=1e-12)
    # converged sequences short-circuit
    assert extrapolate_margin(margins, [5.0, 5.0, 5.0]) == 5.0
