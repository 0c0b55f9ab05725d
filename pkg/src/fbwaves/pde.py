"""Implicit finite-difference simulator for ``U_t = (D(U) U_x)_x + R(U)``.

Backward Euler in time; the flux between nodes ``j`` and ``j+1`` is
``D_{j+1/2} (U_{j+1} - U_j) / dx`` where the face diffusivity is the mean of
the nodal values, ``(D(U_j) + D(U_{j+1}))/2`` (``interface="mean_d"``), or
``D`` at the mean state (``interface="mean_u"``).  The second choice freezes a
sharp step whenever the midpoint of the jump is a root of ``D``, which is why
it is not the default.  No-flux ends are imposed by a
ghost node mirroring the boundary value, so the boundary face carries zero
flux and ``sum_j U_j dx`` changes only through the reaction.  The nonlinear
system is solved by damped Newton on its tridiagonal Jacobian.

No clamping is applied: the negative-diffusivity band can overshoot and that
must remain visible.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numba
import numpy as np

from .errors import NoFront, NonConvergence
from .model import ModelSpec


@dataclass(frozen=True)
class Grid:
    x_min: float = -20.0
    x_max: float = 120.0
    dx: float = 0.1
    dt: float = 0.01
    interface: str = "mean_d"

    def __post_init__(self):
        if self.interface not in ("mean_d", "mean_u"):
            raise ValueError("interface must be 'mean_d' or 'mean_u'")
        if self.dt <= 0 or self.dx <= 0:
            raise ValueError("dx and dt must be positive")
        cells = (self.x_max - self.x_min) / self.dx
        if abs(cells - round(cells)) > 1e-9 * max(1.0, cells):
            raise ValueError("dx must divide x_max - x_min")

    @property
    def n(self) -> int:
        return int(round((self.x_max - self.x_min) / self.dx)) + 1

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n)


@dataclass(frozen=True)
class PdeState:
    t: float
    U: np.ndarray


def _coeffs(model: ModelSpec, grid: Grid):
    k, a, b = model.k, model.alpha, model.beta
    A = 0.0 if model.A is None else model.A
    logistic = model.A is None
    return k, a, b, model.r, A, logistic, grid.interface == "mean_d"


@numba.njit(cache=True)
def _reaction(u, r, A, logistic):
    if logistic:
        return r * u * (1.0 - u), r * (1.0 - 2.0 * u)
    return r * u * (1.0 - u) * (u - A), r * (-3.0 * u * u + 2.0 * (1.0 + A) * u - A)


@numba.njit(cache=True)
def _residual_jacobian(Un, Uo, dt, dx, k, a, b, r, A, logistic, mean_d, res, lo, di, up):
    n = Un.shape[0]
    lam = dt / (dx * dx)
    for j in range(n):
        R, dR = _reaction(Un[j], r, A, logistic)
        res[j] = Un[j] - Uo[j] - dt * R
        di[j] = 1.0 - dt * dR
        lo[j] = 0.0
        up[j] = 0.0
    for j in range(n - 1):
        g = Un[j + 1] - Un[j]
        if mean_d:
            ul, ur = Un[j], Un[j + 1]
            Dm = 0.5 * k * ((ul - a) * (ul - b) + (ur - a) * (ur - b))
            dfl_r = 0.5 * k * (2.0 * ur - a - b) * g + Dm   # d flux / d U_{j+1}
            dfl_l = 0.5 * k * (2.0 * ul - a - b) * g - Dm   # d flux / d U_j
        else:
            m = 0.5 * (Un[j] + Un[j + 1])
            Dm = k * (m - a) * (m - b)
            dDm = k * (2.0 * m - a - b)
            dfl_r = 0.5 * dDm * g + Dm
            dfl_l = 0.5 * dDm * g - Dm
        flux = Dm * g
        # node j gains +flux, node j+1 loses it
        res[j] -= lam * flux
        di[j] -= lam * dfl_l
        up[j] -= lam * dfl_r
        res[j + 1] += lam * flux
        di[j + 1] += lam * dfl_r
        lo[j + 1] += lam * dfl_l


@numba.njit(cache=True)
def _thomas(lo, di, up, rhs, out, cp, dp):
    n = di.shape[0]
    cp[0] = up[0] / di[0]
    dp[0] = rhs[0] / di[0]
    for j in range(1, n):
        den = di[j] - lo[j] * cp[j - 1]
        cp[j] = up[j] / den
        dp[j] = (rhs[j] - lo[j] * dp[j - 1]) / den
    out[n - 1] = dp[n - 1]
    for j in range(n - 2, -1, -1):
        out[j] = dp[j] - cp[j] * out[j + 1]


@numba.njit(cache=True)
def _newton_step(Uo, dt, dx, k, a, b, r, A, logistic, mean_d, tol, max_iter):
    n = Uo.shape[0]
    U = Uo.copy()
    res = np.empty(n)
    lo = np.empty(n)
    di = np.empty(n)
    up = np.empty(n)
    cp = np.empty(n)
    dp = np.empty(n)
    delta = np.empty(n)
    trial = np.empty(n)
    _residual_jacobian(U, Uo, dt, dx, k, a, b, r, A, logistic, mean_d, res, lo, di, up)
    rnorm = np.max(np.abs(res))
    for it in range(max_iter):
        _thomas(lo, di, up, res, delta, cp, dp)
        step = 1.0
        for _ in range(9):
            for j in range(n):
                trial[j] = U[j] - step * delta[j]
            _residual_jacobian(trial, Uo, dt, dx, k, a, b, r, A, logistic, mean_d, res, lo, di, up)
            tnorm = np.max(np.abs(res))
            if tnorm <= rnorm or step < 0.005:
                break
            step *= 0.5
        upd = step * np.max(np.abs(delta))
        for j in range(n):
            U[j] = trial[j]
        rnorm = tnorm
        if upd < tol:
            return U, it + 1
    return U, -1


def step_implicit(state: PdeState, model: ModelSpec, grid: Grid, tol: float = 1e-6,
                  max_iter: int = 50) -> PdeState:
    """One backward-Euler step; Newton stops once the max-norm update is below ``tol``."""
    U, its = _newton_step(np.asarray(state.U, dtype=float), grid.dt, grid.dx,
                          *_coeffs(model, grid), tol, max_iter)
    if its < 0:
        raise NonConvergence(f"Newton stalled after {max_iter} iterations at t={state.t}; "
                             "try a smaller dt")
    return PdeState(state.t + grid.dt, U)


def heaviside(grid: Grid, x_step: float = 40.0) -> np.ndarray:
    """``U = 1`` on ``[x_min, x_step]`` and 0 beyond."""
    return np.where(grid.x <= x_step + 1e-9 * grid.dx, 1.0, 0.0)


@dataclass
class History:
    x: np.ndarray
    t: np.ndarray
    U: np.ndarray   # (len(t), n)

    def at(self, t):
        i = int(np.argmin(np.abs(self.t - t)))
        if abs(self.t[i] - t) > 1e-9 * max(1.0, abs(t)):
            raise KeyError(f"no snapshot at t={t}")
        return self.U[i]

    def write_csv(self, directory):
        """One ``x,U,t`` file per snapshot; returns the paths."""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        paths = []
        for t, U in zip(self.t, self.U):
            path = directory / f"snapshot_t{t:g}.csv"
            with open(path, "w", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(["x", "U", "t"])
                for xi, ui in zip(self.x, U):
                    w.writerow([f"{xi:.17g}", f"{ui:.17g}", f"{t:.17g}"])
            paths.append(path)
        return paths


def simulate(model: ModelSpec, grid: Grid, initial_condition=None, t_samples=(),
             tol: float = 1e-6) -> History:
    """March from ``t=0`` recording snapshots at ``t_samples`` (multiples of ``dt``).

    ``initial_condition`` defaults to the Heaviside step at ``x=40``.
    """
    U0 = heaviside(grid) if initial_condition is None else np.asarray(initial_condition, float)
    if U0.shape != (grid.n,):
        raise ValueError(f"initial condition has shape {U0.shape}, grid has {grid.n} nodes")
    samples = np.asarray(sorted(t_samples), dtype=float)
    steps = np.rint(samples / grid.dt).astype(int)
    if np.any(np.abs(steps * grid.dt - samples) > 1e-9 * np.maximum(1.0, samples)):
        raise ValueError("sample times must be multiples of dt")
    coeffs = _coeffs(model, grid)
    U = U0.copy()
    snaps = []
    n_done = 0
    for target in steps:
        while n_done < target:
            U, its = _newton_step(U, grid.dt, grid.dx, *coeffs, tol, 50)
            n_done += 1
            if its < 0:
                raise NonConvergence(f"Newton stalled at t={n_done * grid.dt}; try a smaller dt")
        snaps.append(U.copy())
    return History(grid.x, samples, np.array(snaps).reshape(len(samples), grid.n))


def front_position(x, U, threshold: float = 1e-3) -> float:
    """Left-most point where ``U`` drops below ``threshold`` (linear interpolation)."""
    below = np.nonzero(U < threshold)[0]
    if below.size == 0:
        raise NoFront(f"U never drops below {threshold}")
    j = below[0]
    if j == 0:
        return float(x[0])
    u0, u1 = U[j - 1], U[j]
    return float(x[j - 1] + (u0 - threshold) / (u0 - u1) * (x[j] - x[j - 1]))


def front_speed(history: History, t2: float, t3: float, threshold: float = 1e-3) -> float:
    x2 = front_position(history.x, history.at(t2), threshold)
    x3 = front_position(history.x, history.at(t3), threshold)
    return (x3 - x2) / (t3 - t2)
