import numpy as np
import pytest
import sympy as sp
from hypothesis import given, strategies as st

from dampedeuler.diagnostics import (CSV_COLUMNS, VectorFieldOp, apply_vector_field, dissipation_G,
                                     dissipation_series, embed_radial, energy_E, energy_aux,
                                     energy_history, energy_report, monitors, multi_indices,
                                     write_energy_csv, z_theta_sq)
from dampedeuler.diagnostics.fd import dx1, dx2
from dampedeuler.diagnostics.vector_fields import apply_to_jet, sound_jets
from dampedeuler.errors import InsufficientHistory, OrderCapExceeded, UnsortedSeries
from dampedeuler.model import EquationParams, InitialDataSpec, Mesh, SoundState, make_initial_data

# E_0 of the bump data at eps = 0.1, mu = 1, gamma = 2, t = 0, from 1-D radial
# quadrature of the closed-form profile derivatives (scipy.quad, rel 1e-13).
E0_THETA = 3.0678596022625273
E0_U = 3.3445082864154756


def cart(half, h):
    n = 2 * int(round(half / h))
    return Mesh("cart2d", n, h, -n * h / 2)


def bump_state(p, h, half=0.6, profile="bump"):
    return make_initial_data(InitialDataSpec(profile), p, cart(half, h))


# finite differences -------------------------------------------------------

def test_fd_fourth_order():
    errs = []
    for h in (0.1, 0.05, 0.025):
        m = cart(6.0, h)
        X, Y = m.coords()
        f = np.exp(-X**2 - 2 * Y**2)
        e1 = np.abs(dx1(f, h) + 2 * X * f).max()
        e2 = np.abs(dx2(f, h) + 4 * Y * f).max()
        errs.append(max(e1, e2))
    rates = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(rates > 3.8)


def test_rotation_of_x1_is_minus_x2():
    m = cart(1.0, 0.05)
    X, Y = m.coords()
    z = apply_to_jet((0, 0, 0, 0, 1), [X], m, 0.0)[0]
    inner = (np.abs(X) < 0.85) & (np.abs(Y) < 0.85)
    np.testing.assert_allclose(z[inner], -Y[inner], atol=1e-12)


def test_dt_scaling_commutator():
    # [d_t, S - 1] f = d_t f for f = t^2 x1; Z_0 = -d_t flips the sign
    m = cart(1.0, 0.05)
    X, _ = m.coords()
    t = 0.7
    jet = [t**2 * X, 2 * t * X, 2 * X + 0 * X]
    a = apply_to_jet((1, 0, 0, 1, 0), jet, m, t)[0]
    b = apply_to_jet((0, 0, 0, 1, 0), apply_to_jet((1, 0, 0, 0, 0), jet, m, t), m, t)[0]
    inner = np.abs(X) < 0.85
    np.testing.assert_allclose((a - b)[inner], -2 * t * X[inner], atol=1e-12)


# sympy oracle for Z^alpha on an explicit field ------------------------------

_t, _x, _y = sp.symbols("t x y")
_F = sp.exp(-4 * (_x**2 + _y**2)) * (1 + _t * _x + _t**2 * _y)


def _z_sym(alpha, f, hat=False):
    ops = [lambda g: -sp.diff(g, _t), lambda g: sp.diff(g, _x), lambda g: sp.diff(g, _y),
           lambda g: _t * sp.diff(g, _t) + _x * sp.diff(g, _x) + _y * sp.diff(g, _y) + (1 if hat else -1) * g,
           lambda g: _x * sp.diff(g, _y) - _y * sp.diff(g, _x)]
    for j in range(4, -1, -1):
        for _ in range(alpha[j]):
            f = ops[j](f)
    return f


@pytest.mark.parametrize("alpha,hat", [((0, 1, 0, 1, 0), False), ((1, 0, 0, 0, 1), False),
                                       ((0, 0, 0, 2, 0), True), ((0, 0, 1, 0, 1), False)])
def test_vector_fields_match_symbolic(alpha, hat):
    t = 0.4
    exact = sp.lambdify((_x, _y), _z_sym(alpha, _F, hat).subs(_t, t))
    jet_fns = [sp.lambdify((_x, _y), sp.diff(_F, _t, j).subs(_t, t)) for j in range(3)]
    errs = []
    for h in (0.04, 0.02):
        m = cart(3.0, h)
        X, Y = m.coords()
        jet = [np.broadcast_to(fn(X, Y), X.shape).astype(float) for fn in jet_fns]
        got = apply_vector_field(jet, VectorFieldOp(alpha, hat=hat), mesh=m, t=t)
        errs.append(np.abs(got - exact(X, Y)).max())
    assert np.log2(errs[0] / errs[1]) > 3.5


def test_op_validation():
    with pytest.raises(OrderCapExceeded):
        VectorFieldOp((1, 1, 1, 0, 0))
    with pytest.raises(OrderCapExceeded):
        VectorFieldOp((1, 0, 0, 0, 0), cap=4)
    with pytest.raises(ValueError):
        VectorFieldOp((1, 0, 0))
    assert VectorFieldOp((1, 0, 0, 2, 0), cap=3).time_order == 3


def test_short_jet_raises():
    m = cart(1.0, 0.1)
    X, _ = m.coords()
    with pytest.raises(InsufficientHistory):
        apply_vector_field([X], VectorFieldOp((1, 0, 0, 0, 0)), mesh=m, t=0.0)
    with pytest.raises(InsufficientHistory):
        apply_vector_field([X, X], VectorFieldOp((0, 0, 0, 1, 0)), mesh=m)


@given(st.integers(0, 3))
def test_multi_index_count(k):
    idx = multi_indices(k)
    assert len(idx) == len(set(idx)) == int(sp.binomial(k + 5, 5))
    assert all(sum(a) <= k for a in idx)


def test_substituted_time_derivative_matches_solver_equation():
    # d_t theta from substitution equals -u.grad theta - (1+theta) div u at gamma = 2
    p = EquationParams(mu=1.0, epsilon=0.05)
    s = bump_state(p, 0.01, profile="poly8")
    j = sound_jets(s, p, 1)
    h = s.mesh.h
    expect = -(s.u[0] * dx1(s.theta, h) + s.u[1] * dx2(s.theta, h)) \
        - (1 + s.theta) * (dx1(s.u[0], h) + dx2(s.u[1], h))
    np.testing.assert_allclose(j["theta"][1], expect, atol=1e-12)


# energies -----------------------------------------------------------------

def test_E0_bump_oracle():
    p = EquationParams(mu=1.0, gamma=2.0, epsilon=0.1)
    E = energy_E(bump_state(p, 0.00125), 0, p)
    assert abs(E["theta"] / E0_THETA - 1) < 1e-6
    assert abs(E["u"] / E0_U - 1) < 1e-6
    assert E["total"] == pytest.approx(E["theta"] + E["u"], rel=1e-15)


def test_zero_data_zero_energies():
    p = EquationParams(mu=1.0, epsilon=0.0)
    s = bump_state(p, 0.05)
    r = energy_report(s, p, k=3, cap=3)
    for name in ("E_k", "eta", "chi_k", "tilde_chi_k", "z_theta_sq", "vort_max", "c1_norm"):
        assert getattr(r, name) == 0.0
    assert r.support_radius == 0.0


def test_eta_converges_under_refinement():
    p = EquationParams(mu=1.0, epsilon=0.1)
    vals = [energy_aux(bump_state(p, h), 2, p)[0]["total"] for h in (0.01, 0.005, 0.0025)]
    d1, d2 = abs(vals[1] - vals[0]), abs(vals[2] - vals[1])
    assert d2 < 0.3 * d1


def test_chi_bounded_by_weighted_energy():
    # sigma <= 1 + t on the support, so chi_k <= (1+t) E_k termwise
    p = EquationParams(mu=0.5, epsilon=0.05)
    for t in (0.0, 0.8):
        s = bump_state(p, 0.02, profile="poly8")
        s = SoundState(t, s.mesh, s.theta, s.u)
        E = energy_E(s, 2, p)["total"]
        _, chi, tchi = energy_aux(s, 2, p)
        assert chi["total"] <= (1 + t) * E
        assert tchi["total"] == 0.0


def test_energy_unchanged_by_grid_padding():
    p = EquationParams(mu=1.0, epsilon=0.05)
    a = energy_report(bump_state(p, 0.02, half=0.8, profile="poly8"), p, k=2)
    b = energy_report(bump_state(p, 0.02, half=1.2, profile="poly8"), p, k=2)
    for name in ("E_k", "eta", "chi_k", "z_theta_sq"):
        assert getattr(a, name) == pytest.approx(getattr(b, name), rel=1e-12)


def test_order_cap():
    p = EquationParams(mu=1.0, epsilon=0.05)
    s = bump_state(p, 0.1)
    with pytest.raises(OrderCapExceeded):
        energy_E(s, 3, p)
    with pytest.raises(OrderCapExceeded):
        energy_report(s, p, k=4, cap=4)


# dissipation --------------------------------------------------------------

def test_G_closed_form():
    # z = (1+t)^(3-mu) gives G^2 = t; with z = (1+t)^(1-mu), G^2 = t/(1+t)
    mu = 0.7
    t = np.linspace(0, 2, 4001)
    g = dissipation_series(t, (1 + t) ** (1 - mu), mu)
    np.testing.assert_allclose(g, t / (1 + t), atol=1e-7)


def test_G_single_report_and_sorting():
    assert dissipation_G([{"t": 0.3, "z_theta_sq": 5.0}], 2, 1.0) == 0.0
    assert dissipation_G([], 2, 1.0) == 0.0
    with pytest.raises(UnsortedSeries):
        dissipation_series([0.0, 0.5, 0.2], [1, 1, 1], 1.0)


@given(st.lists(st.tuples(st.floats(0, 5), st.floats(0, 1e3)), min_size=1, max_size=20),
       st.floats(0, 2))
def test_G_nondecreasing(pairs, mu):
    pairs.sort()
    g = dissipation_series([a for a, _ in pairs], [b for _, b in pairs], mu)
    assert np.all(np.diff(g) >= 0)
    assert g[0] == 0.0


def test_energy_history_accumulates():
    p = EquationParams(mu=1.0, epsilon=0.02)
    s0 = bump_state(p, 0.04, half=1.0, profile="poly8")
    states = [SoundState(t, s0.mesh, s0.theta, s0.u) for t in (0.0, 0.1, 0.2)]
    reps = energy_history(states, p, k=1)
    assert reps[0].G_k_sq == 0.0
    assert reps[1].G_k_sq < reps[2].G_k_sq
    assert reps[1].z_theta_sq == pytest.approx(z_theta_sq(states[1], 1, p))


# monitors, csv, embedding ------------------------------------------------

def test_constant_state_monitors():
    p = EquationParams(mu=1.0, gamma=1.4, epsilon=0.1)
    m = cart(1.0, 0.05)
    s = SoundState(0.0, m, np.zeros(m.shape), np.zeros((2,) + m.shape))
    mon = monitors(s, p)
    assert mon["c1_norm"] == mon["vort_max"] == mon["support_radius"] == 0.0
    assert mon["vacuum_margin"] == pytest.approx(1 / 0.4)


def test_energy_csv(tmp_path):
    p = EquationParams(mu=1.0, epsilon=0.05)
    r = energy_report(bump_state(p, 0.05), p, k=1)
    path = tmp_path / "e.csv"
    write_energy_csv(path, [r, r])
    lines = path.read_text().splitlines()
    assert lines[0].split(",") == CSV_COLUMNS
    assert len(lines) == 3
    assert float(lines[1].split(",")[CSV_COLUMNS.index("E_k")]) == r.E_k


def test_embed_radial_matches_direct_initial_data():
    p = EquationParams(mu=1.0, epsilon=0.05)
    spec = InitialDataSpec("poly8")
    rs = make_initial_data(spec, p, Mesh("radial", 300, 0.002, 0.0))
    emb = embed_radial(rs, 0.02, half_width=0.8)
    direct = make_initial_data(spec, p, emb.mesh)
    assert np.abs(emb.theta - direct.theta).max() < 1e-6
    assert np.abs(emb.u - direct.u).max() < 1e-6
    with pytest.raises(ValueError):
        embed_radial(direct, 0.02)
