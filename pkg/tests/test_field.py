import numpy as np
import mpmath as mp
import pytest
from hypothesis import given, settings, strategies as st

from hyperflow import hypgeom as hg
from hyperflow.field import (
    FieldConfigError,
    Grid,
    RadialBump,
    ScalarField,
    ShapeError,
    Trajectory,
    boundary_mass,
    initial_from_dict,
    inner,
    l2_error_on,
    load_field,
    load_trajectory,
    lp_norm,
    make_initial,
    mass,
    sample,
    save_field,
    save_trajectory,
    spacetime_l2_error,
)

GRID = Grid(2, 0.8, 0.02)


def bump_integral(width, power=1):
    """int phi(d)^power dmu in N=2 by geodesic polar coordinates."""
    f = lambda s: mp.e ** (power * (1 - 1 / (1 - (s / width) ** 2))) * mp.sinh(s)
    return 2 * np.pi * float(mp.quad(f, [0, width]))


def test_grid_basics():
    g = Grid(2, 0.8, 0.1)
    assert np.all(g.radius <= 0.8 + 1e-12)
    assert len(g) == np.sum(np.sum(g.lattice**2, axis=1) <= 64)
    with pytest.raises(FieldConfigError):
        Grid(2, 1.0, 0.1)
    with pytest.raises(FieldConfigError):
        Grid(2, 0.5, 0.0)


def test_sample_at_node_returns_node_value():
    f = ScalarField(GRID, np.random.default_rng(0).normal(size=len(GRID)))
    k = [10, 400, len(GRID) // 2]
    np.testing.assert_allclose(sample(f, GRID.points[k]), f.values[k], atol=1e-14)


def test_affine_field_reproduced_at_cell_centres():
    f = ScalarField(GRID, GRID.points[:, 0].copy())
    p = GRID.points[:50] * 0.5 + 0.01  # cell centres inside the lattice
    p = p[np.sum(p * p, axis=1) < 0.7**2]
    np.testing.assert_allclose(sample(f, p), p[:, 0], atol=1e-15)


def test_sample_accepts_points_in_either_model():
    f = ScalarField(GRID, GRID.points[:, 1] ** 2)
    x = hg.Point.ball([0.13, -0.27])
    assert sample(f, hg.cayley(x)) == pytest.approx(sample(f, x), abs=1e-14)


def test_interpolation_second_order():
    b = RadialBump((0.0, 0.0), 1.0)
    p = np.random.default_rng(0).uniform(-0.3, 0.3, (4000, 2))
    errs = []
    for h in (0.04, 0.02, 0.01):
        g = Grid(2, 0.8, h)
        d = sample(ScalarField(g, b(g.points)), p) - b(p)
        errs.append(np.sqrt(np.mean(d * d)))
    ratios = np.array(errs[:-1]) / np.array(errs[1:])
    assert np.all((ratios > 3.5) & (ratios < 4.5)), ratios


def test_sample_outside_is_zero():
    f = ScalarField(GRID, np.ones(len(GRID)))
    assert sample(f, np.array([[0.85, 0.0]]))[0] == 0.0


def test_norms_of_zero_and_sup():
    z = ScalarField(GRID, np.zeros(len(GRID)))
    assert lp_norm(z, 1) == lp_norm(z, 2) == lp_norm(z, np.inf) == mass(z) == 0.0
    v = np.random.default_rng(1).normal(size=len(GRID))
    assert lp_norm(ScalarField(GRID, v), np.inf) == np.abs(v).max()
    with pytest.raises(ValueError):
        lp_norm(z, 3)


def test_volume_matches_closed_form():
    vol = 2 * np.pi * (np.cosh(2 * np.arctanh(0.8)) - 1)
    one = ScalarField(GRID, np.ones(len(GRID)))
    assert lp_norm(one, 1) == pytest.approx(vol, rel=2e-3)


def test_norms_converge_at_least_second_order():
    b = RadialBump((0.0, 0.0), 1.0)
    exact1, exact2 = bump_integral(1.0), np.sqrt(bump_integral(1.0, 2))
    for p, ex in ((1, exact1), (2, exact2)):
        errs = []
        for h in (0.04, 0.02):
            g = Grid(2, 0.8, h)
            errs.append(abs(lp_norm(ScalarField(g, b(g.points)), p) - ex))
        assert errs[0] / errs[1] >= 3.5


def test_odd_field_has_zero_mass():
    b = RadialBump((0.0, 0.0), 1.0)
    f = ScalarField(GRID, GRID.points[:, 0] * b(GRID.points))
    assert abs(mass(f)) <= 1e-12


def test_bump_mass_converges():
    b = RadialBump((0.0, 0.0), 1.0)
    m = [mass(make_initial(b, Grid(2, 0.8, h))) for h in (0.04, 0.02)]
    assert abs(m[1] - m[0]) <= 4 * 0.04**2
    assert m[1] == pytest.approx(bump_integral(1.0), rel=1e-5)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_l1_bounded_by_support_volume(seed):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=len(GRID)) * (GRID.radius < rng.uniform(0.1, 0.8))
    f = ScalarField(GRID, v)
    support = np.sum(GRID.weights[v != 0])
    assert lp_norm(f, 1) <= support * lp_norm(f, np.inf) * (1 + 1e-12)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_inner_product_cauchy_schwarz(seed):
    rng = np.random.default_rng(seed)
    f = ScalarField(GRID, rng.normal(size=len(GRID)))
    g = ScalarField(GRID, rng.normal(size=len(GRID)))
    assert abs(inner(f, g)) <= lp_norm(f, 2) * lp_norm(g, 2) * (1 + 1e-12)


def test_norms_deterministic():
    v = np.random.default_rng(5).normal(size=len(GRID))
    a = [lp_norm(ScalarField(GRID, v), p) for p in (1, 2)]
    b = [lp_norm(ScalarField(GRID, v.copy()), p) for p in (1, 2)]
    assert a == b


def test_bump_laplacian_against_ball_formula():
    # Delta f = lambda^-N div_e(lambda^(N-2) grad_e f), here N = 2 so Delta f = lambda^-2 Delta_e f
    b = RadialBump((0.1, -0.05), 1.0, 2.0)
    p = np.array([[0.0, 0.0], [0.2, 0.1], [-0.15, 0.2], [0.3, -0.3]])
    s = 1e-4
    lap_e = sum(
        (b(p + s * e) - 2 * b(p) + b(p - s * e)) / s**2 for e in np.eye(2)
    )
    np.testing.assert_allclose(b.laplacian(p), lap_e / hg.conformal_factor(p) ** 2, rtol=1e-5, atol=1e-5)


def test_bump_laplacian_in_three_dimensions():
    b = RadialBump((0.0, 0.1, 0.0), 1.0)
    p = np.array([[0.1, 0.0, 0.2], [-0.2, 0.1, 0.0]])
    s = 1e-4
    lam = hg.conformal_factor

    def flux(x, e):
        # lambda^(N-2) d_e f at x, central difference
        return lam(x) * (b(x + s * e) - b(x - s * e)) / (2 * s)

    div = sum((flux(p + s * e, e) - flux(p - s * e, e)) / (2 * s) for e in np.eye(3))
    np.testing.assert_allclose(b.laplacian(p), div / lam(p) ** 3, rtol=1e-5, atol=1e-5)


# -- space-time errors -----------------------------------------------------------


def _traj(values, times):
    return Trajectory(GRID, np.asarray(times, dtype=float), np.asarray(values))


def test_spacetime_error_zero_and_constant_offset():
    times = np.linspace(0, 0.3, 4)
    base = np.random.default_rng(2).normal(size=(4, len(GRID)))
    a = _traj(base, times)
    assert spacetime_l2_error(a, a, 0.5) == 0.0
    c = 0.25
    b = _traj(base + c, times)
    muK = GRID.weights[GRID.radius <= 0.5].sum()
    assert spacetime_l2_error(a, b, 0.5) == pytest.approx(c * np.sqrt(0.3 * muK), rel=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.05, 0.7), st.floats(0.05, 0.7))
def test_spacetime_error_monotone_in_region(r1, r2):
    rng = np.random.default_rng(3)
    times = np.linspace(0, 1, 3)
    a = _traj(rng.normal(size=(3, len(GRID))), times)
    b = _traj(rng.normal(size=(3, len(GRID))), times)
    lo, hi = sorted((r1, r2))
    assert spacetime_l2_error(a, b, lo) <= spacetime_l2_error(a, b, hi)


def test_spacetime_error_rejects_mismatched_times():
    a = _traj(np.zeros((2, len(GRID))), [0, 1])
    b = _traj(np.zeros((2, len(GRID))), [0, 2])
    with pytest.raises(ShapeError):
        spacetime_l2_error(a, b, 0.5)


def test_final_error_matches_last_slice():
    rng = np.random.default_rng(4)
    a = _traj(rng.normal(size=(3, len(GRID))), [0, 1, 2])
    b = _traj(rng.normal(size=(3, len(GRID))), [0, 1, 2])
    region = GRID.radius <= 0.5
    d = a.values[-1, region] - b.values[-1, region]
    assert l2_error_on(a.final, b.final, 0.5) == pytest.approx(np.sqrt(np.sum(d * d * GRID.weights[region])))


# -- initial data --------------------------------------------------------------


def test_make_initial_properties():
    zero = make_initial(RadialBump((0.0, 0.0), 1.0, 0.0), GRID)
    assert np.all(zero.values == 0)
    f = make_initial(RadialBump((0.0, 0.0), 1.0, 2.5), GRID)
    assert lp_norm(f, np.inf) == pytest.approx(2.5)
    assert f.values[np.argmin(GRID.radius)] == pytest.approx(2.5)
    assert mass(f) > 0
    with pytest.raises(FieldConfigError):
        make_initial(RadialBump((0.0, 0.0), 2.5), GRID)


def test_initial_from_dict():
    b = initial_from_dict({"kind": "radial_bump", "center": [0.1, 0.0], "width": 0.5, "amplitude": 2.0})
    assert b == RadialBump((0.1, 0.0), 0.5, 2.0)
    assert initial_from_dict(b.to_dict()) == b
    with pytest.raises(FieldConfigError):
        initial_from_dict({"kind": "gaussian"})


def test_boundary_mass_counts_outer_shell_only():
    v = np.where(GRID.radius >= 0.73, 1.0, 0.0)
    f = ScalarField(GRID, v)
    assert boundary_mass(f) == pytest.approx(lp_norm(f, 1))
    inner_only = ScalarField(GRID, np.where(GRID.radius < 0.7, 1.0, 0.0))
    assert boundary_mass(inner_only) == 0.0


# -- serialisation ----------------------------------------------------------------


@pytest.mark.parametrize("fmt", ["csv", "bin"])
def test_field_roundtrip(tmp_path, fmt):
    f = ScalarField(GRID, np.random.default_rng(6).normal(size=len(GRID)))
    path = tmp_path / "u.dat"
    save_field(f, str(path), fmt)
    g = load_field(str(path))
    assert g.grid == GRID
    np.testing.assert_array_equal(g.values, f.values)


def test_trajectory_roundtrip(tmp_path):
    rng = np.random.default_rng(7)
    t = _traj(rng.normal(size=(3, len(GRID))), [0.0, 0.1, 0.2])
    save_trajectory(t, str(tmp_path / "traj"))
    back = load_trajectory(str(tmp_path / "traj"))
    np.testing.assert_array_equal(back.times, t.times)
    np.testing.assert_array_equal(back.values, t.values)
