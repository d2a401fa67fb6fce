import numpy as np
import pytest

from conftest import smooth_adjoint_configuration, smooth_u1_configuration
from skybps.errors import ChartExit, DegreeOverflow
from skybps.exterior import Metric3
from skybps.gaugefield import (
    Configuration,
    EquivariantFormSpec,
    configuration_from_json,
    configuration_to_json,
    equivariant_pullback,
    gauge_transform,
    naturality_check_specs,
    pullback_naturality_residual,
    rank_profile,
    standard_specs,
)
from skybps.grid import build_patch
from skybps.lie_target import sph_x
from skybps.solutions import dirac_monopole, identity_u1_solution, spinorial_solution


def euclid(shape):
    g = np.zeros((3, 3) + shape)
    g[0, 0] = g[1, 1] = g[2, 2] = 1.0
    return Metric3(g)


# -- curvature ----------------------------------------------------------------


def test_curvature_zero_connection(u1_target):
    grid = build_patch(u1_target.lo, u1_target.hi, (8, 8, 8), u1_target.periodic, 0.1)
    phi = np.stack(grid.meshes())
    c = Configuration(grid, u1_target, phi, None, euclid(grid.shape),
                      phi_winding=np.eye(3))
    assert np.max(np.abs(c.curvature())) == 0.0


def test_curvature_abelian_analytic_oracle(u1_target):
    errs = []
    for n in (32, 64):
        grid = build_patch(u1_target.lo, u1_target.hi, (n, n, n),
                           u1_target.periodic, 0.1)
        th, x, y = grid.meshes()
        phi = np.stack([th, x, y])
        A = np.zeros((1, 3) + grid.shape)
        A[0, 1] = 0.3 * np.sin(th) * np.cos(y / 2)
        c = Configuration(grid, u1_target, phi, A, euclid(grid.shape),
                          phi_winding=np.eye(3))
        F = c.curvature()[0]
        exact = np.zeros_like(F)
        # dA = d_theta A_x dtheta^dx + d_y A_x dy^dx
        exact[2] = 0.3 * np.cos(th) * np.cos(y / 2)
        exact[0] = 0.3 * np.sin(th) * 0.5 * np.sin(y / 2)
        errs.append(np.max(np.abs(F - exact)))
    assert errs[0] < 1e-4
    assert errs[0] / errs[1] > 12.0  # 4th-order convergence


def test_curvature_spinorial_block_identity():
    res = spinorial_solution(n=32)
    assert res.diagnostics["curvature_identity_residual"] < 1e-3
    res2 = spinorial_solution(n=64)
    assert (res.diagnostics["curvature_identity_residual"]
            / res2.diagnostics["curvature_identity_residual"]) > 10.0


def test_bianchi_residual(adjoint_round_target):
    c = smooth_adjoint_configuration(adjoint_round_target, n=32)
    assert c.bianchi_residual() < 1e-5
    c2 = smooth_adjoint_configuration(adjoint_round_target, n=64)
    assert c2.bianchi_residual() < c.bianchi_residual() / 8.0


# -- covariant differential ----------------------------------------------------


def test_covariant_differential_reduces_to_differential(u1_target):
    c = smooth_u1_configuration(u1_target, n=16)
    c_free = Configuration(c.grid, c.target, c.phi, None, c.gM,
                           phi_winding=c.phi_winding)
    np.testing.assert_allclose(c_free.covariant_differential(), c_free.dphi())


def test_covariant_differential_identity_map(u1_target):
    res = identity_u1_solution(lambda th, x: 0.1 * np.sin(th) * np.ones_like(x),
                               n=16, margin=0.2)
    P = res.config.covariant_differential()
    ax = 0.1 * np.sin(res.config.grid.meshes()[0])
    np.testing.assert_allclose(P[0, 0], 1.0, atol=1e-12)
    np.testing.assert_allclose(P[0, 1], -ax, atol=1e-12)  # dtheta - A
    np.testing.assert_allclose(P[1, 1], 1.0, atol=1e-12)
    np.testing.assert_allclose(P[2, 2], 1.0, atol=1e-12)


def test_covariant_differential_monopole_rank_one():
    res = dirac_monopole(n=16)
    P = res.config.covariant_differential()
    # only the radial slot survives: d^A phi = dxi (x) d_xi
    np.testing.assert_allclose(P[0, 0], 1.0, atol=1e-12)
    assert np.max(np.abs(P[1:])) < 1e-12
    assert np.max(np.abs(P[0, 1:])) < 1e-12


# -- equivariant pullback -------------------------------------------------------


def test_pullback_identity_section_is_covariant_differential(u1_target):
    c = smooth_u1_configuration(u1_target, n=16)
    specs = standard_specs(u1_target)
    np.testing.assert_allclose(equivariant_pullback(c, specs["identity"]),
                               c.covariant_differential())


def test_pullback_flat_connection_ordinary_pullback(u1_target):
    c0 = smooth_u1_configuration(u1_target, n=16)
    c = Configuration(c0.grid, c0.target, c0.phi, None, c0.gM,
                      phi_winding=c0.phi_winding)
    vol = equivariant_pullback(c, standard_specs(u1_target)["volume"])
    # phi* V_N = rho(phi) det(d phi)
    P = c.dphi()
    det = np.einsum("uvw,uxyz,vxyz,wxyz->xyz", np.array(
        [[[float((i - j) * (j - k) * (k - i) / 2) for k in range(3)]
          for j in range(3)] for i in range(3)]), P[:, 0], P[:, 1], P[:, 2])
    np.testing.assert_allclose(vol, u1_target.vol_coeff(c.phi) * det, rtol=1e-12)


def test_pullback_spinorial_nu_vanishes():
    res = spinorial_solution(n=32)
    nu_hat = equivariant_pullback(res.config, standard_specs(res.config.target)["nu"])
    assert np.max(np.abs(nu_hat)) < 5e-4  # zero up to FD error in F


def test_pullback_grading_and_overflow(u1_target):
    c = smooth_u1_configuration(u1_target, n=16)
    sp = standard_specs(u1_target)
    assert equivariant_pullback(c, sp["volume"]).shape == c.grid.shape  # 3-form
    assert equivariant_pullback(c, sp["mu"]).shape == c.grid.shape  # 3-form
    assert equivariant_pullback(c, sp["sigma"]).shape == (3, 3) + c.grid.shape
    with pytest.raises(DegreeOverflow):
        equivariant_pullback(c, EquivariantFormSpec(2, 0, lambda y: None))


# -- naturality -----------------------------------------------------------------


def test_naturality_residual_mu_random_fields(u1_target):
    c = smooth_u1_configuration(u1_target, n=48)
    named = dict(naturality_check_specs(u1_target))
    assert pullback_naturality_residual(c, named["mu-1form"]) < 1e-5
    assert pullback_naturality_residual(c, named["iota-nu-volume-2form"]) < 1e-5


def test_naturality_classical_flat_case(u1_target):
    # A = 0: reduces to d(phi* beta) = phi*(d beta)
    c0 = smooth_u1_configuration(u1_target, n=48)
    c = Configuration(c0.grid, c0.target, c0.phi, None, c0.gM,
                      phi_winding=c0.phi_winding)
    for _, spec in naturality_check_specs(u1_target):
        assert pullback_naturality_residual(c, spec) < 1e-5


def test_naturality_top_degree_trivial(u1_target):
    c = smooth_u1_configuration(u1_target, n=16)
    assert pullback_naturality_residual(
        c, standard_specs(u1_target)["volume"]) == 0.0
    # the moment map itself has total degree 3: both sides vanish structurally
    assert pullback_naturality_residual(c, standard_specs(u1_target)["mu"]) == 0.0


def test_naturality_adjoint_radial_forms(adjoint_round_target):
    c = smooth_adjoint_configuration(adjoint_round_target, n=32)
    for _, spec in naturality_check_specs(adjoint_round_target):
        assert pullback_naturality_residual(c, spec) < 1e-5


# -- gauge transformations --------------------------------------------------------


def test_gauge_transform_identity(u1_target):
    c = smooth_u1_configuration(u1_target, n=16)
    lam = np.zeros((1,) + c.grid.shape)
    c2 = gauge_transform(c, lam)
    np.testing.assert_allclose(c2.phi, c.phi)
    np.testing.assert_allclose(c2.A, c.A)


def test_gauge_transform_u1_rules(u1_target):
    c = smooth_u1_configuration(u1_target, n=32)
    th, x, y = c.grid.meshes()
    lam = (0.05 * np.sin(th) * np.cos(y / 2))[None]
    c2 = gauge_transform(c, lam)
    np.testing.assert_allclose(c2.phi[0], c.phi[0] + lam[0])
    np.testing.assert_allclose(c2.phi[1:], c.phi[1:])
    # A -> A + d lambda
    dl = c2.A - c.A
    exact = np.stack([
        0.05 * np.cos(th) * np.cos(y / 2),
        np.zeros_like(th),
        -0.025 * np.sin(th) * np.sin(y / 2),
    ])[None]
    assert np.max(np.abs(dl - exact)) < 1e-4


def test_gauge_transform_infinitesimal_consistency(u1_target):
    c = smooth_u1_configuration(u1_target, n=16)
    th, _, y = c.grid.meshes()
    lam = (0.3 * np.cos(th) * np.sin(y / 2))[None]
    phi_dot, a_dot = gauge_transform(c, lam, finite=False)
    errs = []
    for t in (0.1, 0.05):
        ct = gauge_transform(c, t * lam)
        errs.append(max(
            np.max(np.abs((ct.phi - c.phi) / t - phi_dot)),
            np.max(np.abs((ct.A - c.A) / t - a_dot)),
        ))
    # u(1) action is affine: the variation is exact at first order
    assert errs[0] < 1e-12


def test_gauge_transform_su2_infinitesimal_first_order(adjoint_round_target):
    c = smooth_adjoint_configuration(adjoint_round_target, n=16)
    rng = np.random.default_rng(11)
    X, Y, Z = c.grid.meshes()
    lam = 0.2 * np.stack([np.sin(1.3 * X + a) * np.cos(0.9 * Y) for a in range(3)])
    phi_dot, a_dot = gauge_transform(c, lam, finite=False)
    errs = []
    for t in (0.2, 0.1):
        ct = gauge_transform(c, t * lam)
        errs.append(max(
            np.max(np.abs((ct.phi - c.phi) / t - phi_dot)),
            np.max(np.abs((ct.A - c.A) / t - a_dot)),
        ))
    assert errs[1] < 0.6 * errs[0]  # first-order convergence


def test_chart_exit_on_construction(adjoint_round_target):
    c = smooth_adjoint_configuration(adjoint_round_target, n=8)
    phi = c.phi.copy()
    phi[0] += 3.0  # push xi past the end of the interval chart
    with pytest.raises(ChartExit):
        Configuration(c.grid, c.target, phi, c.A, c.gM)


def test_pullback_gauge_invariance_exact_linear(u1_target):
    # lambda linear in theta: all FD inputs stay polynomial-exact, so the
    # pullbacks are invariant at roundoff level
    c = smooth_u1_configuration(u1_target, n=16, amp=0.0)
    th = c.grid.meshes()[0]
    lam = (0.2 * th)[None]
    c2 = gauge_transform(c, lam, lam_winding=np.array([[0.2, 0.0, 0.0]]))
    sp = standard_specs(u1_target)
    for name in ("volume", "mu", "sigma", "nu", "mu_sharp"):
        a = equivariant_pullback(c, sp[name])
        b = equivariant_pullback(c2, sp[name])
        assert np.max(np.abs(a - b)) < 1e-8, name


def test_pullback_gauge_invariance_smooth(adjoint_round_target):
    # scalar-valued pullbacks are pointwise invariant; tangent-valued ones are
    # equivariant, so their invariant content is the metric pairing density
    from skybps.energy_degree import _pair

    c = smooth_adjoint_configuration(adjoint_round_target, n=32)
    X, Y, Z = c.grid.meshes()
    lam = 0.1 * np.stack([np.sin(1.1 * X + a) * np.cos(1.3 * Y + a) for a in range(3)])
    c2 = gauge_transform(c, lam)
    sp = standard_specs(adjoint_round_target)
    for name in ("volume", "mu"):
        a = equivariant_pullback(c, sp[name])
        b = equivariant_pullback(c2, sp[name])
        scale = max(np.max(np.abs(a)), 1.0)
        assert np.max(np.abs(a - b)) < 1e-5 * scale, name
    star = c.star()
    for name in ("sigma", "nu", "mu_sharp"):
        a = equivariant_pullback(c, sp[name])
        b = equivariant_pullback(c2, sp[name])
        da = _pair(a, a, 2, star, c.target.metric(c.phi))
        db = _pair(b, b, 2, star, c2.target.metric(c2.phi))
        scale = max(np.max(np.abs(da)), 1.0)
        assert np.max(np.abs(da - db)) < 2e-4 * scale, name


# -- rank diagnostics -----------------------------------------------------------


def test_rank_profile_identity_full_rank(u1_target):
    res = identity_u1_solution(lambda th, x: 0.1 * np.sin(th) * np.ones_like(x),
                               n=16, margin=0.2)
    rp = rank_profile(res.config)
    assert rp["histogram"] == {3: 16**3}
    assert rp["tracefree_residual"] < 1e-10


def test_rank_profile_monopole():
    rp = rank_profile(dirac_monopole(n=16).config)
    assert set(rp["histogram"]) == {1}
    assert rp["nullity_consistent"]
    assert np.all(rp["star_pullback_ranks"] == 0)


def test_rank_profile_constant_map(u1_target):
    grid = build_patch(u1_target.lo, u1_target.hi, (8, 8, 8), u1_target.periodic, 0.1)
    phi = np.stack([np.full(grid.shape, v) for v in (1.0, 0.7, 2.0)])
    c = Configuration(grid, u1_target, phi, None, euclid(grid.shape))
    rp = rank_profile(c)
    assert set(rp["histogram"]) == {0}


# -- serialization ----------------------------------------------------------------


def test_configuration_json_roundtrip_bit_exact(u1_target):
    c = smooth_u1_configuration(u1_target, n=8)
    text = configuration_to_json(c, meta={"note": "test"})
    c2 = configuration_from_json(text, u1_target)
    assert np.array_equal(c2.phi, c.phi)
    assert np.array_equal(c2.A, c.A)
    assert np.array_equal(c2.gM.g, c.gM.g)
    assert c2.grid == c.grid
    # a second serialization is byte-identical
    assert configuration_to_json(c2, meta={"note": "test"}) == text
