import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fbwaves.errors import DomainError, NoBackwardRegion, UndefinedAllee
from fbwaves.model import (ModelSpec, ReactionClass, classify_reaction, diffusivity_roots,
                           evaluate, necessary_condition, reaction_from_rates)


def test_roots_of_lattice_family():
    a, b = diffusivity_roots(0.25, 0.05)
    assert a == pytest.approx(0.5, abs=1e-15)
    assert b == pytest.approx(5 / 6, abs=1e-15)
    assert 0.5 * (a + b) == pytest.approx(2 / 3, abs=1e-15)


def test_no_backward_region():
    with pytest.raises(NoBackwardRegion):
        diffusivity_roots(0.2, 0.05)
    with pytest.raises(NoBackwardRegion):
        ModelSpec.from_diffusivities(0.1, 0.1, 1.0)


@pytest.mark.parametrize("A, cls", [
    (None, ReactionClass.LOGISTIC),
    (-0.2, ReactionClass.WEAK_ALLEE),
    (0.0, ReactionClass.WEAK_ALLEE),
    (0.2, ReactionClass.STRONG_ALLEE),
])
def test_classification(A, cls):
    assert classify_reaction(0.5, A) is cls


def test_domain_errors():
    with pytest.raises(DomainError):
        classify_reaction(0.5, 1.2)
    with pytest.raises(DomainError):
        classify_reaction(-1.0, 0.2)
    with pytest.raises(ValueError):
        ModelSpec.from_roots(6.0, 0.8, 0.6, 1.0, 0.2)


def test_published_rate_examples():
    # (lambda_i, lambda_g, K_i) -> (r, A) for the three simulated reaction terms
    assert reaction_from_rates(0.5, 0.6, 0.4)[:2] == pytest.approx((0.5, -0.2))
    assert reaction_from_rates(0.4, 0.4, 0.5)[:2] == pytest.approx((0.5, 0.2))
    assert reaction_from_rates(0.4, 0.2, 0.5)[:2] == pytest.approx((0.3, 1 / 3))


def test_rates_map():
    r, A, cls = reaction_from_rates(0.5, 0.5, 0.4)
    assert r == pytest.approx(0.4)
    assert A == pytest.approx(-0.25)
    assert cls is ReactionClass.WEAK_ALLEE
    # K_i = lambda_i gives A = 0 exactly
    assert reaction_from_rates(1.0, 1.0, 1.0)[1] == 0.0
    with pytest.raises(UndefinedAllee):
        reaction_from_rates(1.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        reaction_from_rates(1.0, 1.0, 1.0, K_g=0.1)


def test_from_rates_reaction_matches_rate_form():
    lam_i, lam_g, K_i = 0.3, 0.9, 0.5
    m = ModelSpec.from_rates(0.25, 0.05, lam_i, lam_g, K_i)
    u = np.linspace(0, 1, 11)
    expected = lam_g * u * (1 - u) + (lam_i - lam_g - K_i) * u * (1 - u) ** 2
    np.testing.assert_allclose(m.R(u), expected, atol=1e-14)


def test_diffusivity_matches_lattice_form():
    m = ModelSpec.from_diffusivities(0.25, 0.05, 1.0)
    u = np.linspace(0, 1, 21)
    lattice = 0.25 * (1 - 4 * u + 3 * u ** 2) + 0.05 * u * (4 - 3 * u)
    np.testing.assert_allclose(m.D(u), lattice, atol=1e-14)


@settings(max_examples=50, deadline=None)
@given(st.floats(-0.5, 1.5))
def test_antiderivatives(u):
    m = ModelSpec.from_roots(6.0, 7 / 12, 0.75, 5.0, 0.2)
    assert m.F(0.0) == 0.0 and m.G(0.0) == 0.0
    P = m.potential
    assert m.F(u) == pytest.approx(P.F(u), abs=1e-12)
    assert m.G(u) == pytest.approx(P.G(u), abs=1e-12)
    h = 1e-6
    assert (m.F(u + h) - m.F(u - h)) / (2 * h) == pytest.approx(m.D(u), abs=1e-7)
    assert m.dR(u) == pytest.approx(m.R_poly.deriv()(u), abs=1e-12)


def test_evaluate_and_steepness():
    m = ModelSpec.from_roots(6.0, 7 / 12, 0.75, 5.0, 0.2)
    D, R, F, G = evaluate(m, [m.alpha, m.beta])
    assert np.all(D == 0)
    assert m.steepness == 1.0
    assert m.centre == pytest.approx(2 / 3)


def test_necessary_conditions():
    m = ModelSpec.from_roots(6.0, 7 / 12, 0.75, 5.0, 0.2)
    assert necessary_condition(m, "right", m.beta).holds
    assert not necessary_condition(m, "left", m.alpha).holds
    m4 = m.with_allee(0.4)
    assert necessary_condition(m4, "left", m4.alpha).holds
    with pytest.raises(DomainError):
        necessary_condition(m, "right", 0.5)
    with pytest.raises(ValueError):
        necessary_condition(m, "up", 0.8)


def test_necessary_condition_exact_integral():
    # int_x^1 D R du for the reference model at x = beta, by quadrature
    from scipy.integrate import quad
    m = ModelSpec.from_roots(6.0, 7 / 12, 0.75, 5.0, 0.2)
    rep = necessary_condition(m, "right", m.beta, n_samples=64)
    x0 = rep.samples[0]
    ref = quad(lambda u: m.D(u) * m.R(u), x0, 1.0, epsabs=1e-14)[0]
    assert rep.values[0] == pytest.approx(ref, rel=1e-10)
    assert math.isfinite(rep.worst_margin)
