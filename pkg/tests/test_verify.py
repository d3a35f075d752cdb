import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dampedeuler.errors import IdentityViolation
from dampedeuler.model import EquationParams, InitialDataSpec
from dampedeuler.verify import (check_commutators, check_forcing_decomposition, check_inequalities,
                                check_multiplier_identity, check_wave_reformulation,
                                constant_stability, run_suite, write_report)
from dampedeuler.verify.fields import ManufacturedField
from dampedeuler.verify.identities import (Identity, check_identity, damping_defect_theta,
                                           identity_ids, sample_points)
from dampedeuler.verify.inequalities import cart_grid, lp
from dampedeuler.verify.laurent import LaurentField, box, dt, dx, rotation, z_alpha, z_field
from dampedeuler.verify.multiplier import (energy_density, energy_density_squared_form,
                                           identity_defect)
from dampedeuler.verify.wave import observed_order, wave_residual

PTS = (np.array([0.0, 0.5, 2.0]), np.array([0.3, -1.0, 1.5]), np.array([0.7, 0.2, -0.4]))


def ev(f):
    return f(*PTS)


# Laurent algebra and commutators -------------------------------------------

def test_hand_commutators():
    x1sq = LaurentField.monomial(0, 2, 0)
    # [d_1, S - 1] x1^2 = d_1 x1^2 = 2 x1
    lhs = dx(z_field(3, x1sq), 1) - z_field(3, dx(x1sq, 1))
    np.testing.assert_allclose(ev(lhs), 2 * PTS[1])
    # Omega x1 = -x2
    np.testing.assert_allclose(ev(rotation(LaurentField.monomial(0, 1, 0))), -PTS[2])
    # box (t^2 - x1^2) = 4
    f = LaurentField.monomial(2, 0, 0) - LaurentField.monomial(0, 2, 0)
    np.testing.assert_allclose(ev(box(f)), 4.0)
    # d_t (1+t)^-2 = -2 (1+t)^-3
    w = LaurentField.monomial(0, 0, 0, n=2)
    np.testing.assert_allclose(ev(dt(w)), -2 * (1 + PTS[0]) ** -3)


def test_commutator_suite_passes():
    res = check_commutators(max_order=2, n_fields=20)
    assert len(res) == len(identity_ids(2))
    bad = [r["identity_id"] for r in res if not r["passed"]]
    assert bad == []
    assert max(r["worst"] for r in res) < 1e-13


def test_broken_identity_is_reported():
    wrong = Identity("[d1,S-1]=2d", lambda f: (dx(z_field(3, f), 1) - z_field(3, dx(f, 1)),
                                                2.0 * dx(f, 1)))
    rng = np.random.default_rng(1)
    with pytest.raises(IdentityViolation) as exc:
        check_identity(wrong, [LaurentField.random_polynomial(rng, 3)], sample_points(rng, 20))
    assert exc.value.identity_id == "[d1,S-1]=2d"
    assert exc.value.point is not None


def test_forcing_decomposition_examples():
    f = LaurentField.monomial(3, 0, 0)  # t^3
    assert damping_defect_theta((0,) * 5, f).is_zero()
    mu = 0.8
    got = -mu * damping_defect_theta((1, 0, 0, 0, 0), f)
    np.testing.assert_allclose(ev(got), -mu * (1 + PTS[0]) ** -2 * 3 * PTS[0] ** 2, rtol=1e-14)


def test_forcing_decomposition_suite():
    res = check_forcing_decomposition(mu=1.0, n_fields=5)
    assert all(r["passed"] for r in res)
    assert all(np.isfinite(r["decay_ratio_max"]) for r in res)


# wave reformulation and multiplier -----------------------------------------

@pytest.mark.parametrize("mu", [0.0, 0.5, 1.5])
def test_wave_orders(mu):
    out = check_wave_reformulation(EquationParams(mu=mu, epsilon=0.01))
    for o in out["orders"].values():
        assert 1.8 <= o <= 2.2
    assert out["passed"]


def test_wave_residual_of_constant_state():
    r = wave_residual(EquationParams(mu=1.0, epsilon=0.0), 0.01, 0.2, InitialDataSpec("poly8"))
    assert r["theta"] == 0.0 and r["u"] == 0.0


def test_observed_order():
    assert observed_order(4.0, 1.0) == pytest.approx(2.0)
    assert observed_order(1.0, 0.0) == float("inf")


def test_multiplier_order():
    out = check_multiplier_identity()
    assert out["order"] >= 1.5
    assert out["passed"]
    assert out["fine"]["defect"] < 1e-3 * out["fine"]["energy0"]


def test_multiplier_zero_data():
    d = identity_defect(EquationParams(mu=0.5, epsilon=0.0), 0.01, 0.2, InitialDataSpec("poly8"))
    assert d["defect"] == 0.0 and d["lhs"] == 0.0


@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(-5, 5), st.floats(0, 50), st.floats(0, 2))
def test_energy_density_square_completion(th, th_t, th_r, t, mu):
    a = energy_density(th, th_t, th_r, t, mu)
    b = energy_density_squared_form(th, th_t, th_r, t, mu)
    assert a == pytest.approx(b, rel=1e-9, abs=1e-9 * (1 + t) ** 2 * (th**2 + th_t**2 + th_r**2))
    assert b >= 0.0


# inequalities ---------------------------------------------------------------

def test_poincare_quadrature_on_cone():
    # f = (1 - |x|/R)_+ : ||f||_2 / (R ||grad f||_2) = 1/sqrt(6)
    R = 1.3
    X, Y, w = cart_grid((-R, R, -R, R), 800)
    r = np.hypot(X, Y)
    f = np.clip(1 - r / R, 0, None)
    g = np.where(r < R, 1 / R, 0.0)
    assert lp(f, w) / (R * lp(g, w)) == pytest.approx(1 / np.sqrt(6), rel=2e-3)


def test_inequalities_no_violations():
    recs = check_inequalities(n_cases=10, seed=3)
    assert [r["inequality_id"] for r in recs if r["violations"]] == []
    for r in recs:
        assert np.isfinite(r["constant"]) and r["max_ratio"] > 0


def test_constant_stability_flags_spread():
    rep = lambda c: [{"inequality_id": "x", "fitted": True, "constant": c}]  # noqa: E731
    assert constant_stability([rep(1.0), rep(2.0)])["x"]["stable"]
    assert not constant_stability([rep(1.0), rep(50.0)])["x"]["stable"]


def test_div_curl_identity_for_gradients():
    # for (f1, f2) = grad g the curl vanishes: ||grad grad g|| = ||lap g|| (L^2 identity)
    rng = np.random.default_rng(5)
    g = ManufacturedField.random(rng, 1.0)
    X, Y, w = cart_grid((-1, 1, -1, 1), 600)
    gxx, gxy, gyy = (g.d(k, 0.0, X, Y) for k in ((0, 2, 0), (0, 1, 1), (0, 0, 2)))
    hess = np.sqrt(np.sum((gxx**2 + 2 * gxy**2 + gyy**2) * w))
    assert hess == pytest.approx(lp(gxx + gyy, w), rel=1e-3)


def test_manufactured_field_derivatives():
    rng = np.random.default_rng(2)
    f = ManufacturedField.random(rng, 1.0, t=1.0, kappa=0.3)
    x = np.array([f.center[0] + 0.1 * f.radius(1.0)])
    y = np.array([f.center[1] - 0.2 * f.radius(1.0)])
    e = 1e-5
    for k, (a, b, c) in enumerate(((1, 0, 0), (0, 1, 0), (0, 0, 1))):
        fd = (f(1.0 + a * e, x + b * e, y + c * e) - f(1.0 - a * e, x - b * e, y - c * e)) / (2 * e)
        np.testing.assert_allclose(f.d((a, b, c), 1.0, x, y), fd, rtol=1e-6)
    far = f.center[0] + 2 * f.radius(1.0)
    assert f.d((0, 2, 0), 1.0, far, f.center[1]) == 0.0
    with pytest.raises(ValueError):
        f.d((4, 3, 0), 0.0, x, y)


# suites and report -------------------------------------------------------

def test_suite_report(tmp_path):
    res = run_suite("wave")
    doc = write_report(res, tmp_path / "v.json")
    assert doc["passed"]
    back = json.loads((tmp_path / "v.json").read_text())
    assert back["suites"]["wave"][0]["check"] == "wave_reformulation"
    with pytest.raises(ValueError):
        run_suite("nope")


def test_z_alpha_order_of_application():
    # Z^(1,0,0,0,1) = Z_0 Omega, Omega applied first
    f = LaurentField.monomial(1, 1, 0)  # t x1
    np.testing.assert_allclose(ev(z_alpha((1, 0, 0, 0, 1), f)), PTS[2])
