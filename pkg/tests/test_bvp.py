import json

import numpy as np
import pytest
from scipy.spatial import cKDTree

from fbwaves.bvp import (BvpProblem, InitialGuess, construct_guess, layer_scale, midpoint_residual,
                         mirror, refit, solve_wave, symmetry_check)
from fbwaves.layer import equal_area, heteroclinic_profile, viscous_shock_endpoints
from fbwaves.phase_plane import (DesingularisedSystem, Regularisation, delta_p, shock_lines,
                                 shoot_manifold)

from conftest import C0_REF

R = Regularisation

# speeds along the non-local ladder, frozen from a reference run
C_LADDER = {1e-3: 0.197305686, 1e-4: 0.196860417, 1e-5: 0.196815794}


def by_eps(sols, eps):
    return next(s for s in sols if s.problem.eps == eps)


# guess construction

def test_guess_continuous_at_matching_point(ref_model):
    eps = 1e-3
    g = construct_guess(ref_model, R.NONLOCAL, C0_REF, eps=eps)
    u_in, _ = heteroclinic_profile(equal_area(ref_model), "plus", g.z / eps)
    outer = g.y[0] - u_in  # smooth outer correction on each side of z = 0
    left, right = np.flatnonzero(g.z < 0)[-3:], np.flatnonzero(g.z >= 0)[:3]
    at0 = [np.polyval(np.polyfit(g.z[i], outer[i], 1), 0.0) for i in (left, right)]
    assert abs(at0[0]) < 1e-3 and abs(at0[1]) < 1e-3
    assert abs(at0[0] - at0[1]) < 1e-3
    assert g.z[0] == -40.0 and g.z[-1] == 40.0


def test_guess_amplitude_and_tails(ref_model):
    eps = 1e-3
    g = construct_guess(ref_model, R.NONLOCAL, C0_REF, eps=eps)
    w = g.y[1]
    # layer amplitude a du^2 / 4 plus the O(eps) outer slope eps u'
    assert abs(w.min() + 1 / 48) < 2 * eps
    far = np.abs(g.z) > 50 * eps
    assert np.max(np.abs(w[far])) < 1e-3


def test_guess_reproduces_delta_p(ref_model):
    g = construct_guess(ref_model, R.NONLOCAL, C0_REF, eps=1e-3)
    p_left = g.y[2][g.z < 0][-1]
    p_right = g.y[2][g.z > 0][0]
    assert abs(p_right - p_left) < 1e-3
    assert abs(delta_p(ref_model, R.NONLOCAL, C0_REF)) < 1e-3


def test_viscous_guess_shape(ref_model):
    g = construct_guess(ref_model, R.VISCOUS_POSITIVE, 0.2, eps=1e-3)
    assert g.y.shape[0] == 4
    assert g.y[0, 0] == pytest.approx(1.0, abs=1e-3)
    assert g.y[0, -1] == pytest.approx(0.0, abs=1e-3)


# problem validation

def test_problem_validation(ref_model):
    with pytest.raises(ValueError):
        BvpProblem(ref_model, 0.0)
    with pytest.raises(ValueError):
        BvpProblem(ref_model, 1e-3, phase="pinned")
    p = BvpProblem(ref_model, 1e-3)
    assert p.with_eps(1e-4).eps == 1e-4 and p.with_eps(1e-4).L == p.L
    assert "q(-L)=-5.0" in p.boundary_conditions
    g = construct_guess(ref_model, R.NONLOCAL, C0_REF, eps=1e-3)
    with pytest.raises(ValueError):
        solve_wave(p, InitialGuess(g.z, g.y[:4], g.c))
    with pytest.raises(ValueError):
        solve_wave(BvpProblem(ref_model, 1e-3, L=20.0), g)


def test_classical_boundary_set_short_domain(ref_model):
    # the classical set converges only for short domains and wide layers, and needs a
    # much finer mesh than the integral condition; the speeds differ by tail effects
    g = construct_guess(ref_model, R.NONLOCAL, C0_REF, L=10.0, eps=0.3)
    a = solve_wave(BvpProblem(ref_model, 0.3, L=10.0, phase="classical"), g)
    b = solve_wave(BvpProblem(ref_model, 0.3, L=10.0), g)
    assert a.residual < 1e-8 and b.residual < 1e-8
    assert max(abs(v) for v in a.classical_bc_residuals().values()) < 1e-10
    assert max(abs(v) for v in b.classical_bc_residuals().values()) < 1e-8
    assert a.c == pytest.approx(b.c, abs=5e-5)
    assert a.z.size > b.z.size


# non-local ladder

def test_ladder_speeds(ref_ladder):
    sols, _ = ref_ladder
    for s in sols:
        assert s.c == pytest.approx(C_LADDER[s.problem.eps], abs=1e-6)
        assert s.residual < 1e-8
        assert s.monotone


def test_ladder_converges_to_singular_speed(ref_ladder):
    sols, _ = ref_ladder
    gaps = [abs(s.c - C0_REF) for s in sols]
    assert gaps[0] > gaps[1] > gaps[2]
    # first order in eps
    assert gaps[2] < 10 * 1e-5


def test_classical_residuals_at_rounding(ref_ladder):
    for s in ref_ladder[0]:
        res = s.classical_bc_residuals()
        assert set(res) == {"u(-L)=1", "w(-L)=0", "w(L)=0", "p(-L)=-c", "v(L)=-F(0)",
                            "q(-L)=-5.0"}
        assert max(abs(v) for v in res.values()) < 1e-8


def test_residual_is_off_collocation(ref_ladder):
    s = ref_ladder[0][0]
    assert midpoint_residual(s) == s.residual


def test_mirror_is_involution(ref_ladder):
    s = ref_ladder[0][1]
    twice = mirror(mirror(s))
    np.testing.assert_array_equal(twice.z, s.z)
    np.testing.assert_array_equal(twice.y, s.y)
    assert twice.c == s.c
    zz = np.linspace(-30, 30, 101)
    np.testing.assert_array_equal(twice.evaluate(zz), s.evaluate(zz))


def test_mirror_keeps_u_and_v(ref_ladder):
    s = ref_ladder[0][1]
    m = mirror(s)
    np.testing.assert_array_equal(m["u"], s["u"][::-1])
    np.testing.assert_array_equal(m["v"], s["v"][::-1])
    np.testing.assert_array_equal(m["w"], -s["w"][::-1])
    np.testing.assert_array_equal(m["p"], -s["p"][::-1])
    assert m.c == -s.c


def test_symmetry_residual(ref_ladder):
    for s in ref_ladder[0]:
        rep = symmetry_check(s)
        assert rep.passed and rep.residual < 1e-6
        assert rep.c_mirror == pytest.approx(-s.c)


def test_viscous_has_no_mirror(viscous_ladder):
    with pytest.raises(ValueError):
        mirror(viscous_ladder[0])


def test_export(ref_ladder, tmp_path):
    s = ref_ladder[0][0]
    path, meta = s.write_csv(tmp_path / "wave.csv")
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    assert path.read_text().splitlines()[0] == "z,u,w,p,v"
    np.testing.assert_array_equal(data[:, 0], s.z)
    np.testing.assert_array_equal(data[:, 1:], s.y[:4].T)
    md = json.loads(meta.read_text())
    assert md["c"] == s.c and md["eps"] == 1e-3 and md["mesh_size"] == s.z.size
    assert md["residual"] == s.residual and md["q0"] == -5.0


def test_domain_and_mesh_invariance(ref_ladder):
    s = by_eps(ref_ladder[0], 1e-4)
    wide = solve_wave(BvpProblem(s.problem.model, 1e-4, L=80.0), refit(s, L=80.0))
    fine = solve_wave(s.problem, refit(s, n_nodes=2 * s.problem.n_nodes))
    assert abs(wide.c - s.c) < 1e-4
    assert abs(fine.c - s.c) < 1e-4


def _arc_tree(model, c):
    system = DesingularisedSystem(model, c)
    hi, lo = shock_lines(model, R.NONLOCAL)
    top = shoot_manifold(system, (1.0, -c), -1, stop=(hi,))
    bot = shoot_manifold(system, (0.0, 0.0), +1, stop=(lo,), stable=True)
    pts = np.hstack([top.sample(20000)[1], bot.sample(20000)[1]]).T
    return cKDTree(pts)


@pytest.mark.parametrize("eps", [1e-3, 1e-4, 1e-5])
def test_overlay_on_singular_orbit(ref_ladder, ref_model, eps):
    s = by_eps(ref_ladder[0], eps)
    tree = _arc_tree(ref_model, C0_REF)
    outer = np.abs(s.z - s.front_position) > 50 * eps
    dist, _ = tree.query(np.column_stack([s["u"][outer], s["p"][outer]]))
    assert dist.max() < 10 * eps + 1e-3


# viscous

@pytest.mark.parametrize("eps", [1e-3, 1e-4])
def test_viscous_shock_shrinks_to_folds(viscous_ladder, ref_model, eps):
    s = by_eps(viscous_ladder, eps)
    vs = viscous_shock_endpoints(ref_model, +1)
    w = 20 * layer_scale(ref_model, R.VISCOUS_POSITIVE, eps, s.c)
    zf = s.front_position
    u_left, u_right = np.interp([zf - w, zf + w], s.z, s["u"])
    assert abs(u_left - vs.u_r) < 5 * eps ** 0.5
    assert abs(u_right - ref_model.alpha) < 5 * eps ** 0.5


def test_viscous_ladder(viscous_ladder):
    cs = [s.c for s in viscous_ladder]
    assert cs == pytest.approx([0.2018268094638044, 0.19989319149875212], abs=1e-6)
    for s in viscous_ladder:
        assert s.residual < 1e-8
        assert s.monotone
        assert abs(s.classical_bc_residuals()["u(L)=0"]) < 1e-8


def test_viscous_export_w_is_scaled_slope(viscous_ladder, tmp_path):
    s = viscous_ladder[0]
    path, _ = s.write_csv(tmp_path / "v.csv")
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    assert np.min(data[:, 2]) < 0
    np.testing.assert_allclose(data[:, 2], s.problem.eps * s.evaluate(s.z, 1)[0])
