import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import cumulative_trapezoid, solve_ivp

from liebertrand import (CurveSpec, Grid, LieStructure, apparatus_from_tangent,
                         classify, harmonic_curvature, integrate_frenet,
                         sigma_function)
from liebertrand.errors import (ExpressionDomainError, NonPositiveCurvature,
                                ValidationError)
from liebertrand.frenet import ApparatusField, _finish
from liebertrand.lie import frame_deviation, inner
from liebertrand.selfcheck import random_smooth_spec, roundtrip_error


def circle(tau_G=0.0, n=2001):
    return CurveSpec("1", "0", (0, 2 * np.pi), n, LieStructure(tau_G))


def test_grid_validation():
    with pytest.raises(ValidationError):
        Grid(0, 1, 8)
    with pytest.raises(ValidationError):
        Grid(1, 1, 100)
    g = Grid(0, 1, 11)
    assert g.h == pytest.approx(0.1)
    assert g.refined().n == 21


def test_circle_closes():
    app = integrate_frenet(circle())
    assert np.linalg.norm(app.T[-1] - app.T[0]) < 1e-6
    assert frame_deviation(app.T, app.N, app.B) < 1e-8
    np.testing.assert_allclose(app.kappa, 1.0)


def test_constant_helix_and_planar():
    app = integrate_frenet(CurveSpec("1", "1", (0, 3), 2001))
    np.testing.assert_allclose(app.H, 1.0)
    c = classify(app)
    assert c.general_helix and not c.planar
    app = integrate_frenet(CurveSpec("1", "0.5", (0, 3), 2001, LieStructure(0.5)))
    np.testing.assert_allclose(app.H, 0.0)
    assert classify(app).planar


def test_integrate_against_solve_ivp():
    # independent integrator on the same Frenet system
    spec = CurveSpec("1+s^2", "s", (0, 1.5), 2001, LieStructure(0.5))
    app = integrate_frenet(spec)

    def rhs(s, y):
        F = y.reshape(3, 3)
        k, w = 1 + s**2, s - 0.5
        A = np.array([[0, k, 0], [-k, 0, w], [0, -w, 0]])
        return (A @ F).ravel()

    sol = solve_ivp(rhs, (0, 1.5), np.eye(3).ravel(), t_eval=app.s,
                    rtol=1e-12, atol=1e-12, method="DOP853")
    F = sol.y.T.reshape(-1, 3, 3)
    assert np.max(np.abs(F[:, 0] - app.T)) < 1e-9
    assert np.max(np.abs(F[:, 2] - app.B)) < 1e-9


def test_expression_errors():
    with pytest.raises(NonPositiveCurvature):
        integrate_frenet(CurveSpec("s-0.5", "0", (0, 1), 101))
    with pytest.raises(ExpressionDomainError):
        integrate_frenet(CurveSpec("1/s", "0", (0, 1), 101))


def test_initial_frame_checks():
    with pytest.raises(ValidationError):
        CurveSpec("1", "0", (0, 1), 101, initial_frame=[[1, 0, 0], [0, 1, 0], [0, 0, -1]])
    with pytest.raises(ValidationError):
        CurveSpec("1", "0", (0, 1), 101, initial_frame=[[1, 0, 0], [0, 1, 0]])
    R = np.array([[0, 1, 0], [0, 0, 1], [1, 0, 0]], dtype=float)
    app = integrate_frenet(CurveSpec("1", "0.3", (0, 1), 101, initial_frame=R))
    np.testing.assert_allclose(app.T[0], R[0])


def test_apparatus_from_tangent_circle():
    s = np.linspace(0, 2, 401)
    T = np.column_stack([np.cos(s), np.sin(s), np.zeros_like(s)])
    grid = Grid(0, 2, 401)
    app = apparatus_from_tangent(T, grid, LieStructure(0.0))
    inside = app.interior(2)
    np.testing.assert_allclose(app.kappa[2:-2], 1.0, atol=1e-8)
    np.testing.assert_allclose(app.N[2:-2], np.column_stack(
        [-np.sin(s), np.cos(s), 0 * s])[2:-2], atol=1e-8)
    np.testing.assert_allclose(app.B, np.tile([0, 0, 1.0], (401, 1)), atol=1e-12)
    np.testing.assert_allclose(app.tau[inside], 0.0, atol=1e-8)
    assert app.low_confidence[:2].all() and not app.low_confidence[2:-2].any()

    app = apparatus_from_tangent(T, grid, LieStructure(0.5))
    np.testing.assert_allclose(app.tau[inside], 0.5, atol=1e-8)
    np.testing.assert_allclose(app.torsion_rel[inside], 0.0, atol=1e-8)


def test_apparatus_from_tangent_rejects():
    grid = Grid(0, 1, 11)
    with pytest.raises(ValidationError):
        apparatus_from_tangent(np.ones((11, 3)), grid, LieStructure())
    T = np.tile([1.0, 0, 0], (11, 1))
    with pytest.raises(NonPositiveCurvature):
        apparatus_from_tangent(T, grid, LieStructure())


def test_roundtrip_polynomial():
    spec = CurveSpec("1+s^2", "s", (0, 1), 2001)
    err = roundtrip_error(spec)
    assert err["kappa"] < 1e-5 and err["tau"] < 1e-5


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([0.0, 0.5, 1.0]))
def test_roundtrip_random(seed, tg):
    spec = random_smooth_spec(np.random.default_rng(seed), LieStructure(tg))
    err = roundtrip_error(spec)
    assert max(err.values()) < 1e-4


def test_apparatus_invariants():
    app = integrate_frenet(CurveSpec("2+sin(3*s)", "cos(s)", (0, 3), 2001,
                                     LieStructure(1.0)))
    assert frame_deviation(app.T, app.N, app.B) < 1e-6
    assert np.all(app.kappa >= 0)
    np.testing.assert_allclose(app.H * app.kappa, app.tau - app.tauG, atol=1e-9)
    back = apparatus_from_tangent(app.T, app.grid, LieStructure(1.0))
    ok = back.interior(2)
    np.testing.assert_allclose(back.tauG, 1.0, atol=1e-9)
    # H from its definition vs raw differences
    raw = inner(np.gradient(back.N, app.grid.h, axis=0), back.B) / back.kappa
    assert np.max(np.abs(back.H - raw)[ok]) < 1e-4


def test_frenet_residual_scales_with_h2():
    from liebertrand.verify import verify_frame_odes
    for n in (1001, 2001):
        app = integrate_frenet(CurveSpec("1+0.5*sin(s)", "0.3*s", (0, 2), n,
                                         LieStructure(0.5)))
        h = app.grid.h
        for rep in verify_frame_odes(app):
            assert rep.max_abs < 10 * h**2


def test_harmonic_curvature_examples():
    assert harmonic_curvature(2, 1.5, 0.5) == 0.5
    assert harmonic_curvature(1, 1, 1) == 0
    assert harmonic_curvature(3, 0, 0.5) == pytest.approx(-1 / 6)
    with pytest.raises(NonPositiveCurvature):
        harmonic_curvature(0, 1, 0)


def test_sigma_examples():
    app = integrate_frenet(CurveSpec("1", "1", (0, 1), 201))
    sigma, defined = sigma_function(app)
    assert not defined.any() and np.isnan(sigma).all()

    app = integrate_frenet(CurveSpec("1", "s", (0, 1), 2001))
    sigma, defined = sigma_function(app)
    assert defined.all()
    assert sigma[0] == pytest.approx(1.0, abs=1e-9)
    np.testing.assert_allclose(sigma, (1 + app.s**2) ** 1.5, rtol=1e-9)


def test_sigma_constant_family_by_quadrature():
    # kappa = 1, sigma = 2: H' = (1 + H^2)^(3/2) / 2. Build H by numeric
    # quadrature of ds = 2 dH / (1 + H^2)^(3/2) and inverting s(H).
    H_fine = np.linspace(0.05, 0.6, 20001)
    s_of_H = cumulative_trapezoid(2 / (1 + H_fine**2) ** 1.5, H_fine, initial=0)
    grid = Grid(0.0, float(s_of_H[-1]), 2001)
    H = np.interp(grid.values, s_of_H, H_fine)
    # frame of a unit-curvature curve with tau - tau_G = H
    k = np.ones(grid.n)
    sol = solve_ivp(
        lambda s, y: (np.array([[0, 1, 0], [-1, 0, np.interp(s, grid.values, H)],
                                [0, -np.interp(s, grid.values, H), 0]])
                      @ y.reshape(3, 3)).ravel(),
        (grid.s0, grid.s1), np.eye(3).ravel(), t_eval=grid.values,
        rtol=1e-10, atol=1e-12)
    F = sol.y.T.reshape(-1, 3, 3)
    app = _finish(grid, F[:, 0], F[:, 1], F[:, 2], k, H + 0.5,
                  np.full(grid.n, 0.5))
    inside = app.interior()
    assert np.max(np.abs(app.sigma[inside] - 2)) < 1e-4
    assert classify(app, tol=1e-4).slant_helix


def test_classify_examples():
    c = classify(integrate_frenet(CurveSpec("1+s^2", "2*(1+s^2)", (0, 1), 2001)))
    assert c.general_helix and not c.planar and not c.slant_helix
    c = classify(integrate_frenet(CurveSpec("1", "0.5*s", (0, 2), 2001)))
    assert not c.general_helix


def test_slant_closed_form():
    # kappa = 1, H = g / sqrt(1 - g^2), g = s/2: sigma = 2 exactly
    app = integrate_frenet(CurveSpec("1", "0.5+(s/2)/sqrt(1-(s/2)^2)",
                                     (0.1, 1.0), 2001, LieStructure(0.5)))
    assert np.max(np.abs(app.sigma[app.interior()] - 2)) < 1e-9
    c = classify(app)
    assert c.slant_helix and not c.general_helix and not c.planar


def test_determinism():
    a = integrate_frenet(CurveSpec("1+s", "sin(s)", (0, 1), 501))
    b = integrate_frenet(CurveSpec("1+s", "sin(s)", (0, 1), 501))
    assert np.array_equal(a.T, b.T) and np.array_equal(a.sigma, b.sigma,
                                                       equal_nan=True)
