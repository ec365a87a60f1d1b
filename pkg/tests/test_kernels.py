import numpy as np
import pytest
import mpmath as mp
from hypothesis import given, settings, strategies as st

from hyperflow import hypgeom as hg
from hyperflow.hypgeom import Point, TangentVector
from hyperflow.kernels import (
    AffineBoundary,
    Constant,
    ConvectionKernel,
    Exponential,
    Gaussian,
    Indicator,
    KernelConfigError,
    MomentError,
    Nonlinearity,
    SmoothBump,
    Zero,
    convection_from_dict,
    convection_to_dict,
    dissipativity_residual,
    eval_G_eps,
    eval_G_tilde,
    eval_J_eps,
    first_moment_ball,
    first_moment_field,
    g_tilde_ball,
    moment_AJ,
    moment_MG,
    moment_Mtilde_J,
    radial_from_dict,
    radial_to_dict,
    validate,
)

AFFINE = ConvectionKernel(AffineBoundary(1.0, (0.5, 0.0)), Gaussian(1.0))

mp.mp.dps = 30


def exact(f, a, b):
    """High precision adaptive quadrature, independent of scipy."""
    return float(mp.quad(f, [a, b]))


# -- rescaled kernels -----------------------------------------------------------


def test_J_eps_rescaling():
    J = Indicator(1.0)
    assert eval_J_eps(J, 0.25, 0.5, 2) == pytest.approx(16.0)
    assert eval_J_eps(J, 0.6, 0.5, 2) == 0.0
    assert eval_J_eps(Gaussian(1.0), 0.3, 1.0, 2) == pytest.approx(np.exp(-0.09))
    with pytest.raises(KernelConfigError):
        eval_J_eps(J, 0.1, 0.0, 2)


def test_constant_g1_is_separated():
    K = ConvectionKernel(Constant(2.0), Gaussian(1.0))
    w = TangentVector(Point.ball([0.3, -0.1]), [0.2, 0.05])
    assert eval_G_tilde(K, w) == pytest.approx(2.0 * np.exp(-(w.norm**2)))


def test_g1_factor_scale_invariant():
    x = Point.ball([0.1, 0.4])
    w1 = TangentVector(x, [0.1, -0.2])
    w2 = TangentVector(x, [0.2, -0.4])
    g1 = eval_G_tilde(AFFINE, w1) / np.exp(-(w1.norm**2))
    g2 = eval_G_tilde(AFFINE, w2) / np.exp(-(w2.norm**2))
    assert g1 == pytest.approx(g2, rel=1e-12)


def test_zero_vector_gives_zero():
    w = TangentVector(Point.ball([0.1, 0.1]), [0.0, 0.0])
    assert eval_G_tilde(AFFINE, w) == 0.0


def test_G_eps_unit_and_constant_cases():
    x, y = Point.ball([0.1, 0.2]), Point.ball([-0.3, 0.25])
    assert eval_G_eps(AFFINE, x, y, 1.0, 2) == pytest.approx(eval_G_tilde(AFFINE, hg.log_map(x, y)))
    K = ConvectionKernel(Constant(1.5), Gaussian(1.0))
    eps = 0.7
    d = hg.distance(x, y)
    assert eval_G_eps(K, x, y, eps, 2) == pytest.approx(eps**-3 * 1.5 * np.exp(-((d / eps) ** 2)))


def ball_points(r_max=0.85):
    coord = st.floats(-1.0, 1.0, allow_nan=False)
    return st.lists(coord, min_size=2, max_size=2).map(
        lambda c: np.asarray(c) * r_max / max(1.0, np.linalg.norm(c) + 1e-9)
    )


@settings(max_examples=100, deadline=None)
@given(ball_points(), ball_points(), st.floats(0.1, 1.0))
def test_G_eps_model_independent(a, b, eps):
    x, y = Point.ball(a), Point.ball(b)
    if hg.distance(x, y) < 1e-6:
        return
    in_ball = eval_G_eps(AFFINE, x, y, eps, 2)
    in_half = eval_G_eps(AFFINE, hg.cayley(x), hg.cayley(y), eps, 2)
    assert abs(in_ball - in_half) <= 1e-10 * max(1.0, abs(in_ball))


@settings(max_examples=200, deadline=None)
@given(ball_points(), st.floats(-1, 1), st.floats(-1, 1), st.floats(-3.0, 3.0))
def test_G_tilde_flow_invariant(a, v1, v2, t):
    w = TangentVector(Point.ball(a), np.array([v1, v2]) * 0.3)
    moved = hg.geodesic_flow(w, t)
    g0 = eval_G_tilde(AFFINE, w)
    assert abs(eval_G_tilde(AFFINE, moved) - g0) <= 1e-9 * (1 + g0)


@settings(max_examples=100, deadline=None)
@given(ball_points(0.6), st.floats(-1, 1), st.floats(-1, 1), st.floats(-2.0, 2.0), st.floats(0.1, 1.0))
def test_rescaled_kernel_flow_invariant(a, v1, v2, t, eps):
    x = np.asarray(a)
    v = np.array([v1, v2]) * 0.3
    xt, vt = hg.ball_flow(x, v, t)
    g0 = eps**-3 * g_tilde_ball(AFFINE, x, v / eps)
    g1 = eps**-3 * g_tilde_ball(AFFINE, xt, vt / eps)
    assert abs(g1 - g0) <= 1e-9 * (1 + g0)


def test_ball_and_tangent_evaluations_agree():
    rng = np.random.default_rng(0)
    x = rng.uniform(-0.5, 0.5, (50, 2))
    v = rng.normal(size=(50, 2)) * 0.2
    direct = g_tilde_ball(AFFINE, x, v)
    via = eval_G_tilde(AFFINE, TangentVector(Point.ball(x), v))
    np.testing.assert_allclose(direct, via, atol=1e-12)


def test_negative_g1_rejected():
    with pytest.raises(KernelConfigError):
        AffineBoundary(1.0, (0.9, 0.9))
    with pytest.raises(KernelConfigError):
        Constant(-1.0)


# -- moments ---------------------------------------------------------------------


def test_AJ_closed_forms():
    assert moment_AJ(Zero(), 2) == 0.0
    assert moment_AJ(Indicator(1.0), 2) == pytest.approx(np.pi / 8, abs=1e-9)
    assert moment_AJ(Gaussian(1.0), 2) == pytest.approx(np.pi / 4, rel=1e-9)


def test_Mtilde_J_indicator_against_symbolic():
    expected = 2 * np.pi * exact(lambda r: (1 + r**2) * mp.exp(r) * mp.sinh(r), 0, 1)
    assert moment_Mtilde_J(Indicator(1.0), 2) == pytest.approx(expected, rel=1e-9)
    assert moment_Mtilde_J(Zero(), 2) == 0.0


def test_Mtilde_J_gaussian_against_symbolic():
    expected = 2 * np.pi * exact(lambda r: (1 + r**2) * mp.exp(-(r**2)) * mp.exp(r) * mp.sinh(r), 0, mp.inf)
    assert moment_Mtilde_J(Gaussian(1.0), 2) == pytest.approx(expected, rel=1e-9)


def test_exponential_kernel_flagged_divergent():
    with pytest.raises(MomentError, match="M~"):
        moment_Mtilde_J(Exponential(1.0), 2)
    with pytest.raises(MomentError):
        validate(Exponential(1.0), None, 2)


def test_MG_against_symbolic():
    expected = 2 * np.pi * exact(lambda r: (1 + r) * mp.exp(r) * mp.sinh(r), 0, 1)
    K1 = ConvectionKernel(Constant(1.0), Indicator(1.0))
    assert moment_MG(K1, 2) == pytest.approx(expected, rel=1e-9)
    K2 = ConvectionKernel(AffineBoundary(1.0, (0.5, 0.0)), Indicator(1.0))
    assert moment_MG(K2, 2) == pytest.approx(1.5 * expected, rel=1e-9)
    assert moment_MG(ConvectionKernel(Constant(1.0), Zero()), 2) == 0.0


def test_validate_reports_moments():
    out = validate(Gaussian(1.0), AFFINE, 2)
    assert set(out) == {"Mtilde_J", "A_J", "M_G"}


# -- first moment field ----------------------------------------------------------


def brute_force_X(K, x, R=6.0, n=1201):
    """-int G~(x, W) W dW over a Cartesian grid of orthonormal W, as chart components."""
    s = np.linspace(-R, R, n)
    dW = (s[1] - s[0]) ** 2
    W = np.stack(np.meshgrid(s, s, indexing="ij"), axis=-1).reshape(-1, 2)
    lam = hg.conformal_factor(x)
    g = g_tilde_ball(K, np.broadcast_to(x, W.shape), W / lam)
    return -(g[:, None] * W).sum(axis=0) * dW / lam


@pytest.mark.parametrize("x", [[0.0, 0.0], [0.3, -0.2], [-0.5, 0.4]])
def test_first_moment_against_cartesian_quadrature(x):
    x = np.array(x)
    got = first_moment_ball(AFFINE, x[None])[0]
    np.testing.assert_allclose(got, brute_force_X(AFFINE, x), atol=1e-6)


def test_constant_g1_has_zero_drift():
    K = ConvectionKernel(Constant(1.0), Gaussian(1.0))
    np.testing.assert_array_equal(first_moment_ball(K, np.array([[0.3, 0.2]])), 0.0)


def test_drift_bounded_by_MG():
    rng = np.random.default_rng(1)
    pts = rng.uniform(-0.69, 0.69, (3000, 2))
    X = first_moment_ball(AFFINE, pts)
    speed = hg.conformal_factor(pts) * np.linalg.norm(X, axis=1)
    assert np.all(speed <= moment_MG(AFFINE, 2))


def test_first_moment_field_in_halfspace():
    x = Point.halfspace([0.2, 1.3])
    Xh = first_moment_field(AFFINE, x)
    Xb = first_moment_field(AFFINE, hg.cayley(x))
    np.testing.assert_allclose(hg.cayley_tangent(Xh).fiber, Xb.fiber, atol=1e-12)


# -- dissipativity ----------------------------------------------------------------


def test_constant_kernel_dissipativity_exact():
    K = ConvectionKernel(Constant(1.0), Gaussian(1.0))
    res, tot = dissipativity_residual(K, Point.ball([0.2, 0.1]), 0.5, R=0.5 * 6.5, return_total=True)
    assert abs(res) <= 1e-13 * tot


def test_affine_dissipativity_at_origin():
    res, tot = dissipativity_residual(AFFINE, Point.ball([0.0, 0.0]), 0.5, R=0.5 * 6.5, return_total=True)
    assert abs(res) <= 1e-6 * tot
    fine = dissipativity_residual(AFFINE, Point.ball([0.0, 0.0]), 0.5, R=0.5 * 6.5, n_r=128, n_theta=256)
    assert abs(fine - res) <= 1e-6 * tot


@pytest.mark.parametrize("K", [
    AFFINE,
    ConvectionKernel(AffineBoundary(1.0, (0.0, 1.0)), SmoothBump(1.0)),
    ConvectionKernel(AffineBoundary(2.0, (1.0, 1.0)), Indicator(1.0)),
])
def test_dissipativity_library(K):
    rng = np.random.default_rng(2)
    for y in rng.uniform(-0.4, 0.4, (5, 2)):
        for eps in (1.0, 0.5, 0.1):
            R = eps * (K.xi.support if np.isfinite(K.xi.support) else 6.5)
            res, tot = dissipativity_residual(K, Point.ball(y), eps, R=R, n_r=128, return_total=True)
            assert abs(res) <= 1e-6 * tot


# -- misc -----------------------------------------------------------------------


def test_dict_roundtrips():
    for J in (Indicator(0.5), Gaussian(2.0), SmoothBump(1.0), Exponential(3.0), Zero()):
        assert radial_from_dict(radial_to_dict(J)) == J
    spec = convection_to_dict(AFFINE)
    assert convection_from_dict(spec, 2) == AFFINE
    with pytest.raises(KernelConfigError):
        radial_from_dict({"shape": "cauchy"})
    with pytest.raises(KernelConfigError):
        convection_from_dict({"g1": {"type": "affine", "c": 1.0, "a": [0.1, 0.1, 0.1]}}, 2)


@settings(max_examples=200, deadline=None)
@given(st.floats(1.0, 4.0), st.floats(-3, 3), st.floats(-3, 3))
def test_nonlinearity_monotone_and_odd(q, a, b):
    f = Nonlinearity(q)
    lo, hi = min(a, b), max(a, b)
    assert f(lo) <= f(hi)
    assert f(-a) == pytest.approx(-f(a))
    assert f.derivative(a) >= 0
