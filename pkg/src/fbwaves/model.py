"""Diffusivity/reaction model family, lattice-rate maps and necessary conditions.

The diffusivity is the quadratic ``D(u) = k (u - alpha)(u - beta)`` which is
negative exactly on ``(alpha, beta)``.  The reaction is either the cubic
Allee term ``r u (1 - u)(u - A)`` or the logistic term ``r u (1 - u)``.

Antiderivatives use the convention ``F(0) = G(0) = 0``; the slow level ``v``
is the only free offset in the layer problems.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial

from .errors import DomainError, NoBackwardRegion, UndefinedAllee


class ReactionClass(enum.Enum):
    LOGISTIC = "logistic"
    WEAK_ALLEE = "weak_allee"
    STRONG_ALLEE = "strong_allee"


def diffusivity_roots(D_i: float, D_g: float) -> tuple[float, float]:
    """Roots of ``3(D_i-D_g)U^2 - 4(D_i-D_g)U + D_i``, centred on 2/3."""
    if D_i < 0 or D_g < 0:
        raise ValueError("diffusivities must be non-negative")
    if D_i <= 4 * D_g:
        raise NoBackwardRegion(
            f"D_i={D_i} <= 4*D_g={4 * D_g}: no interval with D < 0 "
            "(limiting double root at 2/3)"
        )
    s = math.sqrt((D_i - 4 * D_g) / (4 * (D_i - D_g)))
    return 2.0 / 3.0 * (1 - s), 2.0 / 3.0 * (1 + s)


def classify_reaction(r: float, A: float | None) -> ReactionClass:
    if A is None:
        return ReactionClass.LOGISTIC
    if r <= 0:
        raise DomainError(f"growth rate r={r} must be positive")
    if 0 < A < 1:
        return ReactionClass.STRONG_ALLEE
    if A <= 0:
        return ReactionClass.WEAK_ALLEE
    raise DomainError(f"Allee parameter A={A} >= 1 is outside the model family")


def reaction_from_rates(lam_i, lam_g, K_i, K_g=0.0):
    """Map lattice proliferation/death rates to ``(r, A, ReactionClass)``.

    Only ``K_g = 0`` is supported.  ``A = 0`` (``K_i = lambda_i``) is the
    boundary between weak and strong Allee and is reported as weak, since
    ``R > 0`` on ``(0, 1)`` still holds there.
    """
    if min(lam_i, lam_g, K_i, K_g) < 0:
        raise ValueError("rates must be non-negative")
    if K_g != 0:
        raise ValueError("only K_g = 0 is supported; rescale U to remove K_g")
    r = K_i - lam_i + lam_g
    if r == 0:
        raise UndefinedAllee(
            "r = K_i - lambda_i + lambda_g = 0; the reaction reduces to the "
            "logistic form lambda_g U (1 - U)"
        )
    A = 1.0 - lam_g / r
    return r, A, classify_reaction(r, A)


@dataclass(frozen=True)
class Potential:
    """Cubic ``F = int D`` and quartic ``G = int F``, both vanishing at 0."""

    D: Polynomial
    F: Polynomial
    G: Polynomial

    @classmethod
    def from_diffusivity(cls, D: Polynomial) -> "Potential":
        F = D.integ(lbnd=0)
        G = F.integ(lbnd=0)
        return cls(D, F, G)


@dataclass(frozen=True)
class ModelSpec:
    """Immutable model parameters.

    Use :meth:`from_diffusivities` for the lattice-derived family (centred on
    2/3) or :meth:`from_roots` for an arbitrary quadratic with roots in (0, 1).
    ``A=None`` selects the logistic reaction ``r u (1-u)``.
    """

    k: float
    alpha: float
    beta: float
    r: float
    A: float | None
    D_i: float | None = None
    D_g: float | None = None
    rates: tuple[float, float, float, float] | None = None

    def __post_init__(self):
        if not self.k > 0:
            raise ValueError(f"k={self.k} must be positive")
        if not 0 < self.alpha < self.beta < 1:
            raise ValueError(
                f"need 0 < alpha < beta < 1, got alpha={self.alpha}, beta={self.beta}"
            )
        if self.A is not None and self.A in (self.alpha, self.beta):
            raise ValueError("A must differ from alpha and beta")
        classify_reaction(self.r, self.A)

    @classmethod
    def from_diffusivities(cls, D_i, D_g, r, A=None):
        alpha, beta = diffusivity_roots(D_i, D_g)
        return cls(k=3.0 * (D_i - D_g), alpha=alpha, beta=beta, r=r, A=A, D_i=D_i, D_g=D_g)

    @classmethod
    def from_roots(cls, k, alpha, beta, r, A=None):
        return cls(k=k, alpha=alpha, beta=beta, r=r, A=A)

    @classmethod
    def from_rates(cls, D_i, D_g, lam_i, lam_g, K_i, K_g=0.0):
        r, A, _ = reaction_from_rates(lam_i, lam_g, K_i, K_g)
        alpha, beta = diffusivity_roots(D_i, D_g)
        return cls(
            k=3.0 * (D_i - D_g), alpha=alpha, beta=beta, r=r, A=A,
            D_i=D_i, D_g=D_g, rates=(lam_i, lam_g, K_i, K_g),
        )

    def with_allee(self, A):
        """Same diffusivity and growth rate, different Allee parameter."""
        return ModelSpec(self.k, self.alpha, self.beta, self.r, A, self.D_i, self.D_g)

    @property
    def reaction_class(self) -> ReactionClass:
        return classify_reaction(self.r, self.A)

    @property
    def D_poly(self) -> Polynomial:
        k, a, b = self.k, self.alpha, self.beta
        return Polynomial([k * a * b, -k * (a + b), k])

    @property
    def R_poly(self) -> Polynomial:
        base = Polynomial([0.0, self.r, -self.r])
        if self.A is None:
            return base
        return base * Polynomial([-self.A, 1.0])

    @property
    def potential(self) -> Potential:
        return Potential.from_diffusivity(self.D_poly)

    @property
    def centre(self) -> float:
        return 0.5 * (self.alpha + self.beta)

    @property
    def steepness(self) -> float:
        """Heteroclinic steepness ``sqrt(k/6)`` (= ``sqrt((D_i-D_g)/2)``)."""
        return math.sqrt(self.k / 6.0)

    # pointwise evaluation; D uses the stored roots so D(alpha) = D(beta) = 0 exactly
    def D(self, u):
        return self.k * (u - self.alpha) * (u - self.beta)

    def dD(self, u):
        return self.k * (2 * u - self.alpha - self.beta)

    def R(self, u):
        if self.A is None:
            return self.r * u * (1 - u)
        return self.r * u * (1 - u) * (u - self.A)

    def dR(self, u):
        if self.A is None:
            return self.r * (1 - 2 * u)
        A = self.A
        return self.r * (-3 * u * u + 2 * (1 + A) * u - A)

    def F(self, u):
        k, a, b = self.k, self.alpha, self.beta
        return u * (k * u * u / 3 - k * (a + b) * u / 2 + k * a * b)

    def G(self, u):
        k, a, b = self.k, self.alpha, self.beta
        return u * u * (k * u * u / 12 - k * (a + b) * u / 6 + k * a * b / 2)


def evaluate(model: ModelSpec, u):
    """Return ``(D, R, F, G)`` at ``u`` (scalar or array)."""
    u = np.asarray(u, dtype=float)
    return model.D(u), model.R(u), model.F(u), model.G(u)


@dataclass(frozen=True)
class ConditionReport:
    holds: bool
    worst_margin: float
    samples: np.ndarray
    values: np.ndarray


def necessary_condition(model: ModelSpec, direction: str, shock_endpoint: float,
                        n_samples: int = 256) -> ConditionReport:
    """Integral sign condition on ``D R`` for a monotone shock-fronted wave.

    ``direction='left'`` (c < 0): ``int_0^Ua D R du < 0`` for all Ua in
    (0, U_1), with U_1 <= alpha the lower shock endpoint.
    ``direction='right'`` (c > 0): ``int_Ub^1 D R du > 0`` for all Ub in
    (U_2, 1), with U_2 >= beta the upper shock endpoint.

    The integral is evaluated with the exact polynomial antiderivative on a
    dense grid augmented by the interior roots of ``D R`` (where the extrema
    of the integral sit).  ``worst_margin`` is the sampled value closest to
    violating the strict inequality.
    """
    if n_samples < 16:
        raise ValueError("n_samples must be >= 16")
    P = (model.D_poly * model.R_poly).integ(lbnd=0)
    roots = model.D_poly.roots().tolist() + model.R_poly.roots().tolist()
    roots = np.real([z for z in roots if abs(np.imag(z)) < 1e-12])

    if direction == "left":
        if not 0 < shock_endpoint <= model.alpha:
            raise DomainError(f"U_1={shock_endpoint} must lie in (0, alpha={model.alpha}]")
        lo, hi = 0.0, shock_endpoint
    elif direction == "right":
        if not model.beta <= shock_endpoint < 1:
            raise DomainError(f"U_2={shock_endpoint} must lie in [beta={model.beta}, 1)")
        lo, hi = shock_endpoint, 1.0
    else:
        raise ValueError("direction must be 'left' or 'right'")

    grid = np.linspace(lo, hi, n_samples + 2)[1:-1]
    crit = roots[(roots > lo) & (roots < hi)]
    x = np.sort(np.concatenate([grid, crit]))
    if direction == "left":
        vals = P(x) - P(0.0)
        worst = float(vals.max())
        holds = worst < 0
    else:
        vals = P(1.0) - P(x)
        worst = float(vals.min())
        holds = worst > 0
    return ConditionReport(bool(holds), worst, x, vals)
