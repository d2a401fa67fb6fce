import numpy as np
import pytest

from skybps.errors import (
    ConstraintViolated,
    NormalizationFailed,
    NotRiemannian,
    ParamInconsistent,
)
from skybps.energy_degree import bps_coefficients, bps_residuals, bound_gap, degree
from skybps.gaugefield import rank_profile, standard_specs, equivariant_pullback
from skybps.grid import extrapolate_margin, integrate
from skybps.lie_target import eta2_zero_family, round_s3_family
from skybps.solutions import (
    SurfaceGeometry,
    dirac_monopole,
    identity_u1_solution,
    mercator_sphere,
    spherical_round_target_metric,
    spherical_solution,
    spinorial_solution,
    symplectic_solution,
    twisted_spinorial_solution,
)

P0 = bps_coefficients(0, 0, 0)


# -- surfaces ---------------------------------------------------------------------


def test_mercator_sphere_consistency():
    for k in (0.5, 1.0, 2.0):
        s = mercator_sphere(k)
        assert s.gauss_bonnet_defect() < 1e-2
        assert s.area() == pytest.approx(4 * np.pi / k, rel=5e-3)
        assert s.area_exact == pytest.approx(4 * np.pi / k)


def test_surface_declared_curvature_checked():
    with pytest.raises(ConstraintViolated):
        SurfaceGeometry(
            omega=lambda t, v: 1.0 / np.cosh(t) ** 2 * np.ones_like(v),
            gauss_k=lambda t, v: 2.0 * np.ones_like(t * v),  # wrong: K = 1
            lo=(-2, 0), hi=(2, 2 * np.pi), periodic=(False, True), chi=2,
        )


def test_mercator_rejects_nonpositive_curvature():
    with pytest.raises(ParamInconsistent):
        mercator_sphere(-1.0)


# -- identity u1 ---------------------------------------------------------------------


def test_identity_u1_rejects_nonpositive_conformal_factor():
    with pytest.raises(NotRiemannian):
        identity_u1_solution(lambda th, x: 0.1 * np.sin(th) * np.ones_like(x),
                             n=16, margin=0.05)


def test_identity_u1_trivial_connection_is_isometry(u1_target):
    res = identity_u1_solution(lambda th, x: np.zeros_like(th * x), n=16, margin=0.1)
    np.testing.assert_allclose(res.config.gM.g, u1_target.metric(res.config.phi),
                               atol=1e-12)
    # ungauged case: r1 reduces to the residual of star dphi = phi* Sigma
    r = bps_residuals(res.config, P0)
    assert r["r1"] < 1e-12 and r["r2"] == 0.0


def test_identity_u1_residuals_and_refinement():
    rs = []
    for n in (24, 48):
        res = identity_u1_solution(lambda th, x: 0.1 * np.sin(th) * np.ones_like(x),
                                   n=n, margin=0.2)
        rs.append(bps_residuals(res.config, P0))
    assert rs[1]["r1"] < 5e-4
    assert rs[1]["r2"] == 0.0
    assert rs[0]["r1"] / rs[1]["r1"] > 8.0


# -- dirac monopole --------------------------------------------------------------------


def test_monopole_residuals_and_rank():
    res = dirac_monopole(n=32)
    assert res.diagnostics["abelian_bps_residual"] < 1e-5
    sp = standard_specs(res.config.target)
    sigma_hat = equivariant_pullback(res.config, sp["sigma"])
    assert np.max(np.abs(sigma_hat)) < 1e-12
    nu_hat = equivariant_pullback(res.config, sp["nu"])
    assert np.max(np.abs(nu_hat)) < 1e-12
    rp = rank_profile(res.config)
    assert set(rp["histogram"]) == {1}


def test_monopole_r2_linear_in_beta():
    res = dirac_monopole(n=16)
    r_at = {}
    for beta in (0.5, 1.0):
        r_at[beta] = bps_residuals(res.config, bps_coefficients(0.0, beta, 0.0))["r2"]
    assert r_at[1.0] == pytest.approx(2 * r_at[0.5], rel=1e-10)
    assert r_at[1.0] > 1e-3  # genuinely nonzero


# -- spinorial family -------------------------------------------------------------------


def test_spinorial_flat_case_k1():
    res = spinorial_solution(n=24)
    # K = 1: A is flat up to FD error and g_M is the pullback metric
    assert res.diagnostics["curvature_identity_residual"] < 2e-3
    xi = res.config.grid.meshes()[0]
    coef = res.diagnostics["conformal_coefficient"]
    np.testing.assert_allclose(coef, np.sin(xi) ** 2, atol=1e-12)
    assert res.diagnostics["riemannian_everywhere"]


def test_spinorial_k2_extends_to_s1xs2():
    # canonical round family: eta1 = -1, so the coefficient at the collapsed
    # spheres is 1 - (3/2)(1 - K) = 5/2 > 0 and the metric extends
    res = spinorial_solution(surface=mercator_sphere(2.0), fam=round_s3_family(),
                             n=16, margin=0.1)
    coef = res.diagnostics["conformal_coefficient"]
    assert res.diagnostics["riemannian_everywhere"]
    assert coef.min() > 1.0
    xi = res.config.grid.meshes()[0]
    end = np.sin(xi) ** 2 + 1.5  # h2^2 + (3/2)(K - 1) at K = 2
    np.testing.assert_allclose(coef, end, atol=1e-12)
    assert 1.5 == pytest.approx(float(coef.min()), abs=0.1)


def test_spinorial_nonriemannian_flag():
    # K = 1/2 with the canonical family: coefficient sin^2 - 3/4 changes sign
    res = spinorial_solution(surface=mercator_sphere(0.5), fam=round_s3_family(),
                             n=16, margin=0.1)
    coef = res.diagnostics["conformal_coefficient"]
    mask = res.diagnostics["nonriemannian_mask"]
    assert not res.diagnostics["riemannian_everywhere"]
    np.testing.assert_array_equal(mask, coef <= 0)
    assert mask.any() and not mask.all()


def test_spinorial_volume_identity():
    res = spinorial_solution(n=32, margin=0.1)
    c = res.config
    surface = res.diagnostics["surface"]
    vol_m = integrate(np.sqrt(c.gM.det()), c.grid)
    xi = c.grid.axis_points(0)
    w = c.grid.axis_weights(0)
    h2sq_int = float(np.sum(np.sin(xi) ** 2 * w))
    rhs = h2sq_int * (6 * np.pi * surface.chi - 2 * surface.area_exact)
    assert vol_m == pytest.approx(rhs, rel=1e-2)


def test_spinorial_degree_and_gap():
    res = spinorial_solution(n=32, margin=0.1)
    vol = res.config.target.volume(n=64)
    bg = bound_gap(res.config, P0, vol)
    assert abs(bg["gap"]) < 0.01 * bg["energy"]
    assert bg["degree"] == pytest.approx(np.tanh(2.9), abs=5e-3)


# -- twisted spinorial ------------------------------------------------------------------


def test_twisted_reduces_to_spinorial_at_alpha_zero():
    rt = twisted_spinorial_solution(alpha=0.0, gamma=0.7, n=16)
    rs = spinorial_solution(surface=mercator_sphere(1.0),
                            fam=eta2_zero_family(np.sin, (0.0, np.pi), compact="s3"),
                            n=16)
    assert np.max(np.abs(rt.config.phi - rs.config.phi)) < 1e-12
    assert np.max(np.abs(rt.config.A - rs.config.A)) < 1e-12
    assert np.max(np.abs(rt.config.gM.g - rs.config.gM.g)) < 1e-12
    assert rt.params["B"] == 0.0


def test_twisted_b_value_and_conditions():
    rt = twisted_spinorial_solution(alpha=-2.0, gamma=0.5, beta=2.0, n=24)
    assert rt.params["B"] == pytest.approx(-2.0)
    c1, c2, c3 = rt.diagnostics["bps2_scalar_conditions"]
    assert max(c1, c2, c3) < 5e-4
    p = bps_coefficients(-2.0, 2.0, 0.5)
    r = bps_residuals(rt.config, p)
    assert r["r1"] < 1e-2 and r["r2"] < 1e-2  # n = 24 here; under 5e-4 at n = 48


def test_twisted_requires_gamma_and_compatible_beta():
    with pytest.raises(ParamInconsistent):
        twisted_spinorial_solution(alpha=1.0, gamma=0.0, n=8)
    with pytest.raises(ParamInconsistent):
        twisted_spinorial_solution(alpha=1.0, gamma=0.5, beta=None, n=8)
    with pytest.raises(ParamInconsistent):
        # implied curvature 1 - alpha/beta <= 0 has no shipped surface
        twisted_spinorial_solution(alpha=2.0, gamma=0.5, beta=1.0, n=8)


# -- spherical family -------------------------------------------------------------------


def test_spherical_profiles_and_residuals():
    res = spherical_solution(1.0, -1.0, 1.0, 2.0, n=32)
    assert res.diagnostics["bps2a_residual"] < 1e-12
    assert res.diagnostics["bps2b_residual"] < 1e-12
    p = bps_coefficients(1.0, 2.0, 0.0)
    r = bps_residuals(res.config, p)
    assert r["r1"] < 5e-4 and r["r2"] < 5e-4


def test_spherical_round_target_special_parameters():
    # (c1, c2, beta) = (1, -1, 2 alpha), h1 = 1/(1+xi^2): after arctan the
    # target is the round 3-sphere
    res = spherical_solution(1.0, -1.0, 1.0, 2.0, n=8,
                             h1=lambda xi: 1.0 / (1.0 + xi**2))
    fam = res.config.target.extras["family"]
    xi = np.linspace(0.25, 1.45, 33)
    h1sq, h2sq = spherical_round_target_metric(xi)
    np.testing.assert_allclose(fam.h1(xi) ** 2, h1sq, atol=1e-8)
    np.testing.assert_allclose(fam.h2(xi) ** 2, h2sq, atol=1e-8)
    xt = np.arctan(xi)
    np.testing.assert_allclose(fam.h2(xi) ** 2, np.sin(xt) ** 2, atol=1e-8)
    np.testing.assert_allclose(fam.eta1(xi), -1.0 / (1.0 + xi**2), atol=1e-8)


def test_spherical_excluded_branches():
    with pytest.raises(ParamInconsistent):
        spherical_solution(0.0, -1.0, 1.0, 2.0, n=8)  # f = 1 forces F = 0
    with pytest.raises(ParamInconsistent):
        spherical_solution(1.0, -1.0, 1.0, 3.0, n=8)  # 3 alpha / beta = 1
    with pytest.raises(ParamInconsistent):
        spherical_solution(1.0, 1.0, 1.0, 2.0, n=8)  # h1 h2^2 < 0
    with pytest.raises(ParamInconsistent):
        spherical_solution(1.0, -1.0, 0.0, 2.0, n=8)  # alpha = 0


@pytest.mark.parametrize("build,params", [
    (lambda n: spherical_solution(1.0, -1.0, 1.0, 2.0, n=n), (1.0, 2.0, 0.0)),
    (lambda n: twisted_spinorial_solution(alpha=-2.0, gamma=0.5, beta=2.0, n=n),
     (-2.0, 2.0, 0.5)),
    (lambda n: symplectic_solution(n=n), (0.0, 1.0, 0.0)),
])
def test_family_residuals_decay_fourth_order(build, params):
    p = bps_coefficients(*params)
    r_coarse = bps_residuals(build(24).config, p)
    r_fine = bps_residuals(build(48).config, p)
    assert r_fine["r1"] < 5e-4
    assert r_coarse["r1"] / r_fine["r1"] > 8.0  # (48/24)^4 = 16 nominal
    if r_fine["r2"] > 1e-12:
        assert r_coarse["r2"] / r_fine["r2"] > 8.0


def test_spherical_degree_extrapolates_to_one():
    vol = None
    margins = [0.12, 0.06, 0.03]
    degs = []
    for m in margins:
        res = spherical_solution(1.0, -1.0, 1.0, 2.0, n=32, margin=m)
        if vol is None:
            vol = res.config.target.volume(n=64)
        degs.append(degree(res.config, vol))
    d = extrapolate_margin(margins, degs)
    assert abs(d - round(d)) < 1e-2
    assert round(d) == 1


# -- symplectic family -------------------------------------------------------------------


def test_symplectic_normalization_and_chi():
    res = symplectic_solution(n=24)
    assert res.diagnostics["normalization_residual"] < 1e-10
    assert res.diagnostics["omega_c_integral_over_2pi"] == pytest.approx(2.0, abs=2e-2)


def test_symplectic_normalization_violation():
    with pytest.raises(NormalizationFailed):
        symplectic_solution(n=8, w_scale=1.01)


def test_symplectic_untwisted_is_spinorial():
    # xi-independent w on the round sphere reproduces the spinorial data
    sy = symplectic_solution(n=16)
    sp = spinorial_solution(surface=mercator_sphere(1.0),
                            fam=eta2_zero_family(np.sin, (0.0, np.pi), compact="s3",
                                                 name="symplectic-base"),
                            n=16)
    assert np.max(np.abs(sy.config.A - sp.config.A)) < 1e-12
    assert np.max(np.abs(sy.config.phi - sp.config.phi)) < 1e-12
    assert np.max(np.abs(sy.config.gM.g - sp.config.gM.g)) < 1e-12


def test_symplectic_twisted_matches_untwisted_invariants():
    p = bps_coefficients(0.0, 1.2, 0.0)
    plain = symplectic_solution(n=24)
    twisted = symplectic_solution(n=24, xi_phase=lambda xi: 0.4 * xi)
    r_plain = bps_residuals(plain.config, p)
    r_tw = bps_residuals(twisted.config, p)
    assert r_tw["r1"] < 1e-2 and r_tw["r2"] < 1e-2  # n = 24; under 5e-4 at n = 48
    vol = plain.config.target.volume(n=64)
    assert degree(twisted.config, vol) == pytest.approx(degree(plain.config, vol),
                                                        abs=1e-6)
