import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fbwaves.lattice import (LatticeParams, LatticeState, Site, _sweep, classify_agents,
                             density_front, ensemble_density, rle_decode, rle_encode, step,
                             step_front)

probs = st.floats(0.0, 1.0)


def test_classify_patterns():
    assert list(classify_agents(np.array([0, 1, 0]))) == [Site.EMPTY, Site.ISOLATED, Site.EMPTY]
    assert list(classify_agents(np.array([1, 1, 0]))) == [Site.GROUPED, Site.GROUPED, Site.EMPTY]
    assert np.all(classify_agents(np.ones(6, dtype=np.int8)) == Site.GROUPED)
    # a lattice end counts as an empty neighbour
    assert list(classify_agents(LatticeState(np.array([1, 0, 1])))) == [1, 0, 1]


def test_params_validation():
    with pytest.raises(ValueError):
        LatticeParams(Pm_i=1.5)
    with pytest.raises(ValueError):
        LatticeParams(tau=0.0)
    with pytest.raises(ValueError):
        LatticeParams(boundary="periodic")
    with pytest.raises(ValueError):
        LatticeState(np.array([0, 2, 1]))
    # rates need not sum to at most one
    LatticeParams(Pm_i=1.0, Pp_i=1.0, Pd_i=1.0)


def test_continuum_map():
    c = LatticeParams(Pm_i=1.0, Pm_g=0.2, Pp_i=0.01, Pd_i=0.02, tau=0.5, delta=2.0).continuum()
    assert c["D_i"] == pytest.approx(4.0)
    assert c["D_g"] == pytest.approx(0.8)
    assert c["lam_i"] == pytest.approx(0.02)
    assert c["K_i"] == pytest.approx(0.04)


def test_zero_probabilities_no_op():
    p = LatticeParams(0, 0, 0, 0, 0, 0, n_sites=10)
    occ = np.array([1, 0, 1, 1, 0, 0, 1, 0, 1, 1], dtype=np.int8)
    out = step(LatticeState(occ), p, np.random.default_rng(1))
    np.testing.assert_array_equal(out.occupancy, occ)
    assert out.steps == 1


def test_full_lattice_no_op():
    p = LatticeParams(1, 1, 0, 1, 1, 0, n_sites=8)
    occ = np.ones(8, dtype=np.int8)
    s = LatticeState(occ)
    rng = np.random.default_rng(2)
    for _ in range(5):
        s = step(s, p, rng)
    np.testing.assert_array_equal(s.occupancy, occ)


def test_grouped_inert_when_isolated_absent():
    p = LatticeParams(1, 1, 1, 0, 0, 0, n_sites=7)
    occ = np.array([0, 1, 1, 1, 0, 1, 1], dtype=np.int8)
    out = step(LatticeState(occ), p, np.random.default_rng(3))
    np.testing.assert_array_equal(out.occupancy, occ)


def test_single_agent_draws():
    # move attempt to the left from site 0 is aborted, to the right succeeds
    probs = LatticeParams(n_sites=3).probabilities
    for u_dir, expected in ((0.25, [1, 0, 0]), (0.75, [0, 1, 0])):
        occ = np.array([1, 0, 0], dtype=np.int8)
        _sweep(occ, np.array([0]), np.array([[0.0, u_dir, 0.9, 0.9, 0.9]]), probs)
        assert list(occ) == expected


def test_three_site_markov_enumeration():
    # exact one-step law from site 0: stay 1/2 (aborted), site 1 with 1/2
    p = LatticeParams(Pm_i=1.0, n_sites=3)
    n = 4000
    prof = ensemble_density(p, n, [1], seed=11, initial=np.array([1, 0, 0]))
    sigma = np.sqrt(0.25 / n)
    assert abs(prof.density[0, 0] - 0.5) < 4 * sigma
    assert abs(prof.density[0, 1] - 0.5) < 4 * sigma
    assert prof.density[0, 2] == 0.0
    # from the middle site both targets are free, so the agent always leaves
    prof = ensemble_density(p, 200, [1], seed=12, initial=np.array([0, 1, 0]))
    assert prof.density[0, 1] == 0.0
    assert prof.density[0, 0] + prof.density[0, 2] == pytest.approx(1.0)


def test_motility_conserves_agents():
    p = LatticeParams(Pm_i=1.0, Pm_g=0.3, n_sites=50)
    s = LatticeState(step_front(p, 20.0))
    rng = np.random.default_rng(5)
    for _ in range(100):
        s = step(s, p, rng, check=True)
        assert s.n_agents == 21


@settings(max_examples=60, deadline=None)
@given(probs, probs, probs, probs, probs, probs, st.integers(1, 30), st.integers(0, 2 ** 32 - 1))
def test_exclusion(pm_i, pp_i, pd_i, pm_g, pp_g, pd_g, n, seed):
    p = LatticeParams(pm_i, pp_i, pd_i, pm_g, pp_g, pd_g, n_sites=n)
    rng = np.random.default_rng(seed)
    s = LatticeState(rng.integers(0, 2, n).astype(np.int8))
    for _ in range(10):
        before = s.n_agents
        s = step(s, p, rng, check=True)
        assert set(np.unique(s.occupancy)) <= {0, 1}
        # each agent adds at most one daughter
        assert s.n_agents <= min(n, 2 * before)


def test_single_replicate_identity():
    p = LatticeParams(Pm_i=1.0, Pp_i=0.05, Pd_i=0.01, Pm_g=0.5, Pp_g=0.05, n_sites=40)
    init = step_front(p, 10.0)
    prof = ensemble_density(p, 1, [0, 5, 10], seed=99, initial=init)
    rng = np.random.default_rng(np.random.SeedSequence(99).spawn(1)[0])
    s = LatticeState(init)
    tracked = [s.occupancy]
    for k in range(10):
        s = step(s, p, rng)
        if k + 1 in (5, 10):
            tracked.append(s.occupancy)
    np.testing.assert_array_equal(prof.density, np.array(tracked, dtype=float))


def test_deterministic_across_jobs():
    p = LatticeParams(Pm_i=1.0, Pp_i=0.01, Pm_g=0.25, Pp_g=0.01, n_sites=60)
    a = ensemble_density(p, 6, [0, 20, 40], seed=7, jobs=1)
    b = ensemble_density(p, 6, [0, 20, 40], seed=7, jobs=2)
    np.testing.assert_array_equal(a.counts, b.counts)
    np.testing.assert_array_equal(a.density, b.density)
    c = ensemble_density(p, 6, [0, 20, 40], seed=8, jobs=1)
    assert not np.array_equal(a.counts, c.counts)


def test_ensemble_validation():
    p = LatticeParams(n_sites=10, tau=0.5)
    with pytest.raises(ValueError):
        ensemble_density(p, 0, [1.0], seed=1)
    with pytest.raises(ValueError):
        ensemble_density(p, 2, [0.3], seed=1)
    prof = ensemble_density(p, 2, [1.0, 0.5], seed=1)
    assert list(prof.t) == [0.5, 1.0]


def test_density_csv(tmp_path):
    p = LatticeParams(n_sites=5)
    prof = ensemble_density(p, 3, [0, 2], seed=4)
    path = prof.write_csv(tmp_path / "d.csv")
    rows = path.read_text().splitlines()
    assert rows[0] == "x,density,t,n_reps"
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    np.testing.assert_array_equal(data[:, 1].reshape(2, 5), prof.density)
    assert np.all(data[:, 3] == 3)


def test_front_and_rle():
    x = np.arange(6.0)
    assert density_front(x, np.array([1, 1, 0.8, 0.2, 0, 0]), 0.5) == pytest.approx(2.5)
    occ = np.array([1, 1, 1, 0, 0, 1], dtype=np.int8)
    assert rle_encode(occ) == "3x1,2x0,1x1"
    np.testing.assert_array_equal(rle_decode(rle_encode(occ)), occ)
    assert rle_encode(np.zeros(0)) == "" and rle_decode("").size == 0


def test_lattice_front_advances_with_pde():
    # qualitative: both fronts invade at the same order of magnitude; the mean-field
    # continuum is about twice as fast at these rates
    from fbwaves.model import ModelSpec
    from fbwaves.pde import Grid, simulate
    lp = LatticeParams(Pm_i=1.0, Pp_i=0.01, Pm_g=0.2, Pp_g=0.01, n_sites=200)
    ts = [500, 1000]
    prof = ensemble_density(lp, 40, ts, seed=2024, initial=step_front(lp, 40.0))
    lat = [density_front(lp.x, d) for d in prof.density]
    cm = lp.continuum()
    model = ModelSpec.from_diffusivities(cm["D_i"], cm["D_g"], cm["lam_g"])
    grid = Grid(0.0, 199.0, 0.1, 0.05)
    # site j stands for the cell [j - 1/2, j + 1/2]
    hist = simulate(model, grid, np.where(grid.x <= 40.5, 1.0, 0.0), t_samples=ts)
    pde = [density_front(grid.x, u) for u in hist.U]
    c_lat, c_pde = (lat[1] - lat[0]) / 500, (pde[1] - pde[0]) / 500
    assert c_lat > 0 and c_pde > 0
    assert 1 / 3 < c_lat / c_pde < 3
