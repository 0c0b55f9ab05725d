"""Fast (layer) problems for the two regularisations.

Non-local regularisation: the layer flow ``u' = w, w' = v + F(u)`` is
Hamiltonian with ``H = -w^2/2 + G(u) + v u``.  A jump ``u_minus -> u_plus``
exists when ``v`` satisfies the equal-area rule.

Viscous relaxation: the layer flow ``u' = (v + F(u))/c`` is one-dimensional
and jumps attach to the folds ``u = alpha`` and ``u = beta``.

None of these routines take the wave speed, except the mixed-regularisation
check where the speed enters the layer flow itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .errors import DegenerateFold, NoMaxwellPoint, NoTripleRoot
from .model import ModelSpec


@dataclass(frozen=True)
class ShockData:
    """Equal-area jump for the non-local regularisation."""

    v: float
    u_plus: float
    u_mid: float
    u_minus: float
    a: float

    @property
    def width(self):
        return self.u_minus - self.u_plus


@dataclass(frozen=True)
class FoldJump:
    """One viscous jump: ``u_from -> u_to`` at slow level ``v``."""

    v: float
    u_from: float
    u_to: float
    fold: float
    simple_root: float


@dataclass(frozen=True)
class ViscousShocks:
    u_r: float
    v_r: float
    u_l: float
    v_l: float
    sign: int
    jumps: tuple[FoldJump, FoldJump]


def _cubic_coeffs(model, v):
    # F(u) + v = c3 u^3 + c2 u^2 + c1 u + c0
    k, a, b = model.k, model.alpha, model.beta
    return k / 3.0, -k * (a + b) / 2.0, k * a * b, v


def real_cubic_roots(c3, c2, c1, c0):
    """Sorted real roots of a cubic (trigonometric / Cardano form, Newton polished)."""
    a2, a1, a0 = c2 / c3, c1 / c3, c0 / c3
    shift = a2 / 3.0
    p = a1 - a2 * a2 / 3.0
    q = 2.0 * a2 ** 3 / 27.0 - a2 * a1 / 3.0 + a0
    disc = (q / 2.0) ** 2 + (p / 3.0) ** 3
    if disc < 0:
        m = 2.0 * math.sqrt(-p / 3.0)
        theta = math.acos(max(-1.0, min(1.0, 3.0 * q / (p * m))))
        roots = [m * math.cos((theta - 2.0 * math.pi * j) / 3.0) - shift for j in range(3)]
    else:
        sq = math.sqrt(disc)
        roots = [math.copysign(abs(-q / 2 + sq) ** (1 / 3), -q / 2 + sq)
                 + math.copysign(abs(-q / 2 - sq) ** (1 / 3), -q / 2 - sq) - shift]
    polished = []
    for x in roots:
        f = ((c3 * x + c2) * x + c1) * x + c0
        df = (3 * c3 * x + 2 * c2) * x + c1
        if df != 0:
            x -= f / df
        polished.append(x)
    return sorted(polished)


def _outer_roots(model, v):
    roots = real_cubic_roots(*_cubic_coeffs(model, v))
    if len(roots) != 3:
        raise NoTripleRoot(f"F(u) + v has {len(roots)} real root(s) at v={v}")
    return roots


def maxwell_residual(model: ModelSpec, v: float) -> float:
    """Signed area ``int_{u+}^{u-} (F + v) du`` between the outer roots."""
    lo, _, hi = _outer_roots(model, v)
    area = lambda u: model.G(u) + v * u
    return area(hi) - area(lo)


def equal_area(model: ModelSpec) -> ShockData:
    """Maxwell (equal-area) level ``v`` and jump endpoints ``u_plus < alpha < beta < u_minus``."""
    F = model.F
    # strictly inside the triple-root band (-F(alpha), -F(beta))
    span = F(model.alpha) - F(model.beta)
    lo, hi = -F(model.alpha) + 1e-9 * span, -F(model.beta) - 1e-9 * span
    try:
        v = brentq(lambda s: maxwell_residual(model, s), lo, hi, xtol=1e-15, rtol=1e-15)
    except ValueError as exc:
        raise NoMaxwellPoint(str(exc)) from exc
    u_plus, u_mid, u_minus = _outer_roots(model, v)
    return ShockData(v=v, u_plus=u_plus, u_mid=u_mid, u_minus=u_minus, a=model.steepness)


def hamiltonian(model: ModelSpec, v, u, w):
    return -0.5 * np.asarray(w) ** 2 + model.G(np.asarray(u)) + v * np.asarray(u)


def heteroclinic_profile(shock: ShockData, branch: str, xi):
    """Closed-form layer heteroclinic ``(u, w)`` at fast coordinate ``xi``.

    ``branch='plus'`` runs from ``u_minus`` (xi -> -inf) down to ``u_plus``
    with ``w < 0``; ``branch='minus'`` is the reverse connection.
    """
    if branch not in ("plus", "minus"):
        raise ValueError("branch must be 'plus' or 'minus'")
    sgn = 1.0 if branch == "plus" else -1.0
    du = shock.width
    s = -0.5 * shock.a * du * np.asarray(xi, dtype=float)
    u = 0.5 * (shock.u_minus + shock.u_plus) + sgn * 0.5 * du * np.tanh(s)
    e = np.exp(-2.0 * np.abs(s))
    w = -sgn * shock.a * du ** 2 * e / (1.0 + e) ** 2   # a du^2 sech^2(s) / 4
    return u, w


def layer_rhs(model, v):
    def rhs(xi, y):
        return [y[1], v + model.F(y[0])]
    return rhs


def viscous_shock_endpoints(model: ModelSpec, speed_sign: int) -> ViscousShocks:
    """Fold-attached jumps of the viscous layer problem.

    ``F(u) - F(alpha) = (k/3)(u - alpha)^2 (u - u_r)`` and
    ``F(u) - F(beta) = (k/3)(u - beta)^2 (u - u_l)``; the simple roots follow
    from the root sum ``3(alpha + beta)/2``.  For ``speed_sign > 0`` the jumps
    are ``u_r -> alpha`` and ``u_l -> beta``; for ``speed_sign < 0`` they are
    reversed.
    """
    a, b = model.alpha, model.beta
    if not b > a:
        raise DegenerateFold("alpha == beta")
    if speed_sign not in (1, -1):
        raise ValueError("speed_sign must be +1 or -1")
    u_r = 1.5 * b - 0.5 * a
    u_l = 1.5 * a - 0.5 * b
    v_r, v_l = -model.F(a), -model.F(b)
    if speed_sign > 0:
        jumps = (FoldJump(v_r, u_r, a, a, u_r), FoldJump(v_l, u_l, b, b, u_l))
    else:
        jumps = (FoldJump(v_r, a, u_r, a, u_r), FoldJump(v_l, b, u_l, b, u_l))
    return ViscousShocks(u_r, v_r, u_l, v_l, speed_sign, jumps)


@dataclass(frozen=True)
class ConnectionReport:
    connected: bool
    miss_distance: float
    fixed_points: np.ndarray
    mu: float
    c: float
    xi_end: float


def mixed_layer_check(model: ModelSpec, v: float, mu: float, c: float,
                      tol: float = 1e-6, seed: float = 1e-7,
                      xi_max: float | None = None) -> ConnectionReport:
    """Shoot the unstable manifold of ``(u_minus, w_minus)`` in the mixed layer flow.

    ``u' = (1 - 1/mu) c u + w/mu``, ``w' = v + F(u)``.  Reports the closest
    approach to ``(u_plus, w_plus)``.
    """
    if not 0 < mu <= 1:
        raise ValueError("mu must lie in (0, 1]")
    if c == 0:
        raise ValueError("c must be non-zero")
    roots = np.array(_outer_roots(model, v))
    fps = np.column_stack([roots, (1 - mu) * c * roots])
    (u_p, w_p), _, (u_m, w_m) = fps

    g = (1 - 1 / mu) * c
    D = model.D(u_m)
    jac = np.array([[g, 1 / mu], [D, 0.0]])
    vals, vecs = np.linalg.eig(jac)
    e = vecs[:, np.argmax(vals.real)].real
    e = e / np.linalg.norm(e)
    if e[0] > 0:
        e = -e  # head towards smaller u
    y0 = np.array([u_m, w_m]) + seed * e

    if xi_max is None:
        xi_max = 200.0 / (model.steepness * (u_m - u_p))

    def rhs(xi, y):
        return [g * y[0] + y[1] / mu, v + model.F(y[0])]

    def leave(xi, y):
        return min(y[0] - (u_p - 0.5), (u_m + 0.5) - y[0])
    leave.terminal = True

    sol = solve_ivp(rhs, (0.0, xi_max), y0, method="DOP853", rtol=1e-12,
                    atol=1e-14, dense_output=True, events=leave)
    # refine the closest approach on the dense output
    xs = np.linspace(0.0, sol.t[-1], 20001)
    ys = sol.sol(xs)
    dist = np.hypot(ys[0] - u_p, ys[1] - w_p)
    i = int(np.argmin(dist))
    lo, hi = xs[max(i - 1, 0)], xs[min(i + 1, len(xs) - 1)]
    fine = np.linspace(lo, hi, 2001)
    yf = sol.sol(fine)
    miss = float(np.min(np.hypot(yf[0] - u_p, yf[1] - w_p)))
    return ConnectionReport(miss < tol, miss, fps, mu, c, float(sol.t[-1]))
