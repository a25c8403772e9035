import numpy as np
import pytest

from liebertrand import CurveSpec, LieStructure, integrate_frenet
from liebertrand import bertrand as bt
from liebertrand.errors import (HelicalDegenerate, PlanarDegenerate,
                                SingularOffset)
from liebertrand.frenet import apparatus_from_tangent
from liebertrand.lie import frame_deviation

from conftest import pair_spec


def app_of(kappa, w, domain, tau_G=0.0, n=2001):
    return integrate_frenet(CurveSpec(kappa, f"{w}+{tau_G}", domain, n,
                                      LieStructure(tau_G)))


def test_rho_examples():
    app = app_of("s", "s^2", (0.5, 1.5))
    inside = app.interior()
    np.testing.assert_allclose(bt.rho(app)[inside], 2 * app.s[inside], atol=1e-9)
    app = app_of("1+s", "3*(1+s)", (0, 1), tau_G=0.5)
    np.testing.assert_allclose(bt.rho(app)[inside], 3.0, atol=1e-9)
    app = app_of("1+s^2", "sin(s)", (0, 2), n=2001)
    i = 1000  # s = 1
    assert app.s[i] == 1.0
    assert bt.rho(app)[i] == pytest.approx(np.cos(1) / 2, abs=1e-10)


def test_rho_helical_degenerate():
    with pytest.raises(HelicalDegenerate):
        bt.rho(app_of("2", "1", (0, 1)))
    with pytest.raises(HelicalDegenerate):
        bt.check_bertrand(app_of("1+s^2", "0.7*(1+s^2)", (0, 1)))


def test_lambda_formula_examples():
    assert bt.lambda_formula(2, 1, 1, 1) == -2
    assert bt.lambda_formula(2, 1, 1, -1) == 2
    assert bt.lambda_formula(0, 3.0, 0.4, 1) == 0


@pytest.mark.parametrize("epsilon", [1, -1])
@pytest.mark.parametrize("tau_G", [0.0, 0.5, 1.0])
def test_constructed_family_is_pair(epsilon, tau_G):
    app = integrate_frenet(pair_spec(tau_G, (0.1, 1.0)))
    rep = bt.check_bertrand(app, epsilon)
    assert rep.is_pair
    assert abs(rep.lambda_offset - 0.5) < 1e-3
    assert abs(rep.mu_fit - 0.3) < 1e-3
    assert rep.lambda_maxdev < 1e-6
    # per-sample lambda carries the sign convention lam' = -eps lam
    assert rep.lambda_mean == pytest.approx(-epsilon * 0.5, abs=1e-9)
    assert rep.summary()["is_pair"]


@pytest.mark.parametrize("epsilon", [1, -1])
def test_non_pair(epsilon):
    app = app_of("1+s^2", "(1+s^2)^2", (0, 1))
    rep = bt.check_bertrand(app, epsilon)
    assert not rep.is_pair
    assert rep.lambda_maxdev > 1e-2


@pytest.mark.parametrize("epsilon", [1, -1])
def test_mate_frame_identities(epsilon):
    app = integrate_frenet(pair_spec(0.5))
    m = bt.mate_apparatus(app, epsilon)
    d = m.derived
    assert frame_deviation(d.T, d.N, d.B) < 1e-9
    assert np.max(np.abs(np.linalg.norm(d.T, axis=1) - 1)) < 1e-9
    assert np.array_equal(d.N, epsilon * app.N)
    # consistently handed
    hand = np.einsum("ij,ij->i", np.cross(d.T, d.N), d.B)
    assert np.all(np.abs(hand - hand[0]) < 1e-9)
    np.testing.assert_array_equal(d.kappa, np.abs(m.kappa_signed))


@pytest.mark.parametrize("epsilon", [1, -1])
def test_rho_zero_frame(epsilon):
    app = app_of("1+s", "0.3", (0, 1), tau_G=0.5)
    m = bt.mate_apparatus(app, epsilon)
    inside = app.interior()
    np.testing.assert_allclose(m.derived.T[inside], -app.T[inside], atol=1e-12)
    np.testing.assert_allclose(m.derived.B[inside], -epsilon * app.B[inside],
                               atol=1e-12)
    # rho = 0 gives ds/ds* = -1, so s runs at unit speed
    np.testing.assert_allclose(m.ds_dsstar[inside], -1.0, atol=1e-12)


def test_planar_degenerate():
    with pytest.raises(PlanarDegenerate):
        bt.mate_apparatus(app_of("1+s", "0", (0, 1), tau_G=0.5))


def test_arclength_map_basics():
    app = app_of("1+s", "0.3", (0, 1), tau_G=0.5)
    s = bt.arclength_map(app)
    assert s[0] == 0
    assert s[-1] == pytest.approx(-1.0, abs=1e-9)


def test_arclength_map_singular_offset():
    # rho = cos(s)/(2s) meets H = sin(s)/(1+s^2) inside [0.5, 1]
    app = app_of("1+s^2", "sin(s)", (0.5, 1.0))
    with pytest.raises(SingularOffset):
        bt.arclength_map(app, strict=True)
    s = bt.arclength_map(app)
    restarts = np.flatnonzero(s == 0)
    assert restarts[0] == 0 and len(restarts) >= 2


@pytest.mark.parametrize("epsilon", [1, -1])
def test_arclength_monotone_and_eq10(epsilon):
    app = integrate_frenet(pair_spec(0.5, (0.1, 1.0)))
    m = bt.mate_apparatus(app, epsilon)
    assert np.all(np.diff(m.s_of_sstar) > 0)
    rep = bt.check_bertrand(app, epsilon)
    eq10 = bt.dsstar_ds_from_offset(rep.lambda_mean, epsilon, app.kappa,
                                    app.torsion_rel)
    np.testing.assert_allclose(1 / np.abs(m.ds_dsstar), eq10, atol=1e-6)


def test_gamma_examples():
    assert bt.gamma_formula(2, 1, 1) == pytest.approx(-1 / (2 * np.sqrt(2)))
    assert bt.gamma_formula(0.7, 1.3, 0.7) == 0


@pytest.mark.parametrize("epsilon", [1, -1])
def test_mate_curvature_against_oracle(epsilon):
    # differentiate the derived tangent field with the chain rule through the
    # arc-length map; kappa is orientation independent
    app = integrate_frenet(pair_spec(0.5))
    m = bt.mate_apparatus(app, epsilon)
    num = apparatus_from_tangent(m.derived.T, app.grid, LieStructure(0.5),
                                 speed=np.abs(m.ds_dsstar))
    inside = app.interior(2)
    assert np.all(num.kappa[inside] > 0)
    assert np.max(np.abs(num.kappa - np.abs(m.kappa_signed))[inside]) < 1e-3
