"""Desingularised reduced problem, manifold shooting and the speed root-find.

The reduced flow on the critical manifold, ``-D(u) u_z = p + c u``,
``p_z = R(u)``, is singular at the folds.  Rescaling ``dpsi = dz / D(u)``
gives the regular field

    u_psi = -p - c u,    p_psi = D(u) R(u),

with the same trajectories (orientation flips where ``D < 0``).  A shock is
admissible at speed ``c`` when the unstable manifold of ``(1, -c)`` and the
stable manifold of ``(0, 0)`` hit the two jump lines at the same ``p``.
"""

from __future__ import annotations

import enum
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DegenerateSeed, ManifoldEscape, NoCrossing, NoSpeedInBracket
from .layer import equal_area, viscous_shock_endpoints
from .model import ModelSpec

log = logging.getLogger(__name__)

RTOL = 1e-10
ATOL = 1e-12
U_WINDOW = (-0.5, 1.5)


class Regularisation(enum.Enum):
    NONLOCAL = "nonlocal"
    VISCOUS_POSITIVE = "viscous_positive"
    VISCOUS_NEGATIVE = "viscous_negative"


class PointType(enum.Enum):
    SADDLE = "saddle"
    STABLE_NODE = "stable node"
    STABLE_SPIRAL = "stable spiral"
    CENTRE = "centre"
    UNSTABLE_SPIRAL = "unstable spiral"
    UNSTABLE_NODE = "unstable node"


@dataclass(frozen=True)
class DesingularisedSystem:
    model: ModelSpec
    c: float

    def rhs(self, psi, y):
        u, p = y
        m = self.model
        return np.array([-p - self.c * u, m.D(u) * m.R(u)])

    def jacobian(self, u):
        m = self.model
        dDR = m.dD(u) * m.R(u) + m.D(u) * m.dR(u)
        return np.array([[-self.c, -1.0], [dDR, 0.0]])

    def fixed_points(self):
        m = self.model
        us = [0.0, m.alpha, m.beta, 1.0]
        if m.A is not None and m.A not in us:
            us.append(m.A)
        return [np.array([u, -self.c * u]) for u in sorted(us)]

    def eigen(self, u):
        """Eigenvalues ``tau_+, tau_-`` and eigenvectors ``(1, -(c + tau))``."""
        m = self.model
        det = m.dD(u) * m.R(u) + m.D(u) * m.dR(u)
        disc = complex(self.c ** 2 - 4 * det)
        root = disc ** 0.5
        taus = ((-self.c + root) / 2, (-self.c - root) / 2)
        vecs = [np.array([1.0, -(self.c + t)]) for t in taus]
        return taus, vecs


@dataclass(frozen=True)
class FixedPointInfo:
    point: np.ndarray
    kind: PointType
    eigenvalues: tuple
    eigenvectors: list


def _classify(c, det):
    if det < 0:
        return PointType.SADDLE
    if c == 0:
        return PointType.CENTRE
    node = c * c - 4 * det >= 0
    if c > 0:
        return PointType.STABLE_NODE if node else PointType.STABLE_SPIRAL
    return PointType.UNSTABLE_NODE if node else PointType.UNSTABLE_SPIRAL


def classify_fixed_points(system: DesingularisedSystem) -> list[FixedPointInfo]:
    """Type of every fixed point from the trace ``-c`` and determinant ``(DR)'``.

    Equivalent to the eigenvalue formula ``tau = (-c +- sqrt(c^2 - 4 (DR' + D'R)))/2``.
    """
    out = []
    m = system.model
    for pt in system.fixed_points():
        u = pt[0]
        det = m.dD(u) * m.R(u) + m.D(u) * m.dR(u)
        taus, vecs = system.eigen(u)
        out.append(FixedPointInfo(pt, _classify(system.c, det), taus, vecs))
    return out


@dataclass(frozen=True)
class Crossing:
    line: float
    psi: float
    p: float
    transversal: bool


@dataclass
class Trajectory:
    """Dense-output manifold branch plus the ordered list of line crossings."""

    psi: np.ndarray
    y: np.ndarray
    crossings: list[Crossing]
    reason: str
    dense: object = field(repr=False, default=None)

    def first_crossing(self, line=None):
        for cr in self.crossings:
            if cr.transversal and (line is None or cr.line == line):
                return cr
        return None

    def sample(self, n: int = 2000):
        """``(psi, y)`` on a uniform ``psi`` grid, evaluated from the dense output."""
        psi = np.linspace(self.psi[0], self.psi[-1], n)
        y = np.empty((2, n))
        done = np.zeros(n, dtype=bool)
        for piece in self.dense:
            lo, hi = sorted((piece.t_min, piece.t_max))
            sel = ~done & (psi >= lo - 1e-12) & (psi <= hi + 1e-12)
            if sel.any():
                y[:, sel] = piece(psi[sel])
                done |= sel
        return psi, y


def shoot_manifold(system: DesingularisedSystem, fixed_point, branch_sign: int,
                   stop=(), psi_max: float = 400.0, stable: bool = False,
                   delta: float = 1e-6) -> Trajectory:
    """Integrate one branch of the (un)stable manifold of a saddle.

    The seed is ``fixed_point + branch_sign * delta * E / |E|`` with ``E`` the
    eigenvector normalised to a positive ``u`` component, so
    ``branch_sign=-1`` heads towards smaller ``u``.  Unstable manifolds run
    forward in ``psi``, stable ones backward.  Integration stops at the first
    transversal crossing of any line in ``stop``, on leaving the window
    ``-0.5 < u < 1.5``, or on reaching a fixed point.
    """
    if delta == 0:
        raise DegenerateSeed("seed offset delta must be non-zero")
    fixed_point = np.asarray(fixed_point, dtype=float)
    taus, vecs = system.eigen(fixed_point[0])
    if any(abs(t.imag) > 0 for t in taus) or not (taus[0].real > 0 > taus[1].real):
        raise ValueError(f"fixed point {fixed_point} is not a saddle")
    e = (vecs[1] if stable else vecs[0]).real
    e = e / np.linalg.norm(e)
    y0 = fixed_point + branch_sign * delta * e
    direction = -1.0 if stable else 1.0
    stop = tuple(float(s) for s in stop)
    for s in stop:
        if not -0.2 <= s <= 1.2:
            raise ValueError(f"stop line u={s} outside [-0.2, 1.2]")

    events = []
    for s in stop:
        ev = (lambda s_: (lambda t, y: y[0] - s_))(s)
        ev.terminal = True
        events.append(ev)

    def leave(t, y):
        return min(y[0] - U_WINDOW[0], U_WINDOW[1] - y[0])
    leave.terminal = True
    events.append(leave)

    scale = np.linalg.norm(y0) + 1.0

    def settle(t, y):
        f = system.rhs(t, y)
        return abs(f[0]) + abs(f[1]) - 1e-11 * scale
    settle.terminal = True
    settle.direction = -1
    events.append(settle)

    crossings: list[Crossing] = []
    psis, ys = [np.array([0.0])], [y0[:, None]]
    t0, state, span = 0.0, y0, direction * psi_max
    reason = "psi_max"
    dense = []
    while True:
        sol = solve_ivp(system.rhs, (t0, span), state, method="DOP853",
                        rtol=RTOL, atol=ATOL, dense_output=True, events=events)
        psis.append(sol.t[1:])
        ys.append(sol.y[:, 1:])
        dense.append(sol.sol)
        if sol.status != 1:
            break
        hit = next(i for i, te in enumerate(sol.t_events) if len(te))
        t_ev, y_ev = sol.t_events[hit][0], sol.y_events[hit][0]
        if hit < len(stop):
            slope = system.rhs(t_ev, y_ev)[0]
            transversal = abs(slope) > 1e-12
            crossings.append(Crossing(stop[hit], float(t_ev), float(y_ev[1]), transversal))
            if transversal:
                reason = "crossing"
                break
            # tangency: record and continue just past it
            t0, state = t_ev + direction * 1e-9, sol.sol(t_ev + direction * 1e-9)
            continue
        reason = "escaped" if hit == len(stop) else "fixed_point"
        break
    psi = np.concatenate(psis)
    y = np.concatenate(ys, axis=1)
    traj = Trajectory(psi, y, crossings, reason, dense)
    if stop and reason == "psi_max":
        raise ManifoldEscape(f"psi_max={psi_max} exceeded before any stop line", y[:, -1])
    return traj


def reduced_rhs(model: ModelSpec, c: float):
    """Singular reduced field in ``z``; only valid away from the folds."""
    def rhs(z, y):
        u, p = y
        return np.array([-(p + c * u) / model.D(u), model.R(u)])
    return rhs


def shock_lines(model: ModelSpec, reg: Regularisation, c: float | None = None):
    """``(upper, lower)`` jump endpoints on the lines ``u = const``.

    The upper line is hit by the manifold leaving ``(1, -c)``; the lower one
    by the manifold arriving at ``(0, 0)``.
    """
    if reg is Regularisation.NONLOCAL:
        s = equal_area(model)
        return s.u_minus, s.u_plus
    if reg is Regularisation.VISCOUS_POSITIVE:
        vs = viscous_shock_endpoints(model, +1)
        return vs.u_r, model.alpha
    vs = viscous_shock_endpoints(model, -1)
    return model.beta, vs.u_l


@dataclass(frozen=True)
class DeltaP:
    c: float
    value: float
    p_upper: float
    p_lower: float
    u_upper: float
    u_lower: float


def delta_p_detail(model: ModelSpec, reg: Regularisation, c: float,
                   delta: float = 1e-6, reverse: bool = False) -> DeltaP:
    """``Delta p = p_*^+ - p_*^-`` for the given regularisation and speed.

    ``reverse=True`` builds the mirrored connection ``0 -> 1``: the unstable
    manifold of ``(0, 0)`` meets the lower line and the stable manifold of
    ``(1, -c)`` meets the upper one.
    """
    if reg is Regularisation.VISCOUS_POSITIVE and c <= 0:
        raise ValueError("viscous positive shocks need c > 0")
    if reg is Regularisation.VISCOUS_NEGATIVE and c >= 0:
        raise ValueError("viscous negative shocks need c < 0")
    u_hi, u_lo = shock_lines(model, reg)
    system = DesingularisedSystem(model, c)
    try:
        top = shoot_manifold(system, (1.0, -c), -1, stop=(u_hi,), stable=reverse, delta=delta)
        bot = shoot_manifold(system, (0.0, 0.0), +1, stop=(u_lo,), stable=not reverse, delta=delta)
    except ManifoldEscape as exc:
        raise NoCrossing(c) from exc
    hi_cross, lo_cross = top.first_crossing(u_hi), bot.first_crossing(u_lo)
    if hi_cross is None:
        raise NoCrossing(c, u_hi)
    if lo_cross is None:
        raise NoCrossing(c, u_lo)
    return DeltaP(c, lo_cross.p - hi_cross.p, lo_cross.p, hi_cross.p, u_hi, u_lo)


def delta_p(model: ModelSpec, reg: Regularisation, c: float, **kw) -> float:
    return delta_p_detail(model, reg, c, **kw).value


@dataclass(frozen=True)
class SpeedResult:
    c0: float
    residual: float
    bracket: tuple[float, float]
    u_from: float
    u_to: float
    p_star: float
    regularisation: Regularisation
    evaluations: int = 0

    @property
    def shock_endpoints(self):
        return self.u_from, self.u_to


DEFAULT_BRACKETS = {
    Regularisation.NONLOCAL: [(0.01, 1.0), (-1.0, -0.01)],
    Regularisation.VISCOUS_POSITIVE: [(0.01, 1.0)],
    Regularisation.VISCOUS_NEGATIVE: [(-1.0, -0.01)],
}


def _refine(f, a, fa, b, fb, tol_dp, tol_c, max_iter=200):
    """Bracketing secant (Illinois) with bisection fallback; undefined values bisect."""
    n = 0
    side = 0
    while n < max_iter:
        if abs(b - a) < tol_c:
            x, fx = (a, fa) if abs(fa) < abs(fb) else (b, fb)
            if abs(fx) < tol_dp:
                return x, fx, (a, b), n
        x = b - fb * (b - a) / (fb - fa)
        if not (min(a, b) < x < max(a, b)) or abs(b - a) < tol_c:
            x = 0.5 * (a + b)
        try:
            fx = f(x)
        except NoCrossing:
            x = 0.5 * (a + b)
            try:
                fx = f(x)
            except NoCrossing:
                raise NoSpeedInBracket(f"Delta p undefined inside [{a}, {b}]") from None
        n += 1
        if abs(fx) < tol_dp and abs(b - a) < tol_c:
            return x, fx, (a, b), n
        if np.sign(fx) == np.sign(fb):
            b, fb = x, fx
            if side == -1:
                fa *= 0.5
            side = -1
        else:
            a, fa = b, fb
            b, fb = x, fx
            side = +1
        if fx == 0:
            return x, fx, (min(a, b), max(a, b)), n
    raise NoSpeedInBracket(f"no convergence in [{a}, {b}]")


def _probe_edge(f, a, fa, b, fb, tol_c):
    """Search a scan interval with one undefined end for a sign change.

    Bisects towards the edge of the region where ``Delta p`` exists; returns
    a sign-changing sub-bracket ``(a, fa, b, fb)`` or ``None``.
    """
    if fa is None:
        (x_bad, x_ok, f_ok) = (a, b, fb)
    else:
        (x_bad, x_ok, f_ok) = (b, a, fa)
    while abs(x_ok - x_bad) > tol_c:
        mid = 0.5 * (x_ok + x_bad)
        try:
            fm = f(mid)
        except NoCrossing:
            x_bad = mid
            continue
        if np.sign(fm) != np.sign(f_ok):
            lo, hi = sorted([(mid, fm), (x_ok, f_ok)])
            return lo[0], lo[1], hi[0], hi[1]
        x_ok, f_ok = mid, fm
    return None


def find_speed(model: ModelSpec, reg: Regularisation, bracket=None, n_scan: int = 16,
               tol_dp: float = 1e-6, tol_c: float = 1e-5, delta: float = 1e-6) -> SpeedResult:
    """Root of ``Delta p(c)`` for the singular shock-fronted wave.

    Each bracket is scanned at ``n_scan`` points; every sign change between
    defined values is refined, and roots where ``|Delta p|`` does not drop
    below ``tol_dp`` (jumps across a region without crossings) are rejected.
    """
    brackets = [bracket] if bracket is not None else DEFAULT_BRACKETS[reg]
    evals = 0

    def f(c):
        nonlocal evals
        evals += 1
        return delta_p(model, reg, c, delta=delta)

    for lo, hi in brackets:
        cs = np.linspace(lo, hi, n_scan)
        vals = []
        for c in cs:
            try:
                vals.append(f(c))
            except NoCrossing:
                vals.append(None)
        for i in range(n_scan - 1):
            fa, fb = vals[i], vals[i + 1]
            if (fa is None) != (fb is None):
                found = _probe_edge(f, cs[i], fa, cs[i + 1], fb, tol_c)
                if found is not None:
                    a, fa, b, fb = found
                    try:
                        c0, _, br, _ = _refine(f, a, fa, b, fb, tol_dp, tol_c)
                    except NoSpeedInBracket:
                        continue
                    return _speed_result(model, reg, c0, br, evals, delta)
                continue
            if fa is None or fb is None or np.sign(fa) == np.sign(fb):
                if fa == 0:
                    return _speed_result(model, reg, cs[i], (cs[i], cs[i]), evals, delta)
                continue
            try:
                c0, _, br, _ = _refine(f, cs[i], fa, cs[i + 1], fb, tol_dp, tol_c)
            except NoSpeedInBracket as exc:
                log.debug("rejected sign change in [%g, %g]: %s", cs[i], cs[i + 1], exc)
                continue
            return _speed_result(model, reg, c0, br, evals, delta)
    raise NoSpeedInBracket(f"Delta p has no root for {reg.value} in {brackets}")


def _speed_result(model, reg, c0, br, evals, delta):
    d = delta_p_detail(model, reg, c0, delta=delta)
    return SpeedResult(float(c0), abs(d.value), (float(min(br)), float(max(br))),
                       d.u_upper, d.u_lower, 0.5 * (d.p_upper + d.p_lower), reg, evals + 1)


@dataclass(frozen=True)
class SpeedRow:
    A: float
    c0: float | None
    result: SpeedResult | None
    error: str | None = None


def _row(args):
    model, reg, A, bracket = args
    try:
        res = find_speed(model.with_allee(A), reg, bracket=bracket)
        return SpeedRow(A, res.c0, res)
    except Exception as exc:  # per-row failures never abort a sweep
        return SpeedRow(A, None, None, f"{type(exc).__name__}: {exc}")


def speed_curve(model: ModelSpec, reg: Regularisation, A_values, jobs: int = 1) -> list[SpeedRow]:
    """``c0(A)`` over a family of Allee parameters, ordered as ``A_values``.

    Sequential sweeps warm-start each bracket around the previous root;
    parallel sweeps (``jobs > 1``) use the default brackets for every row.
    """
    A_values = [float(a) for a in A_values]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_row, [(model, reg, A, None) for A in A_values]))
    rows = []
    prev = None
    for A in A_values:
        row = None
        if prev is not None:
            w = 0.05
            br = (prev - w, prev + w)
            if reg is Regularisation.VISCOUS_POSITIVE:
                br = (max(br[0], 1e-3), br[1])
            elif reg is Regularisation.VISCOUS_NEGATIVE:
                br = (br[0], min(br[1], -1e-3))
            elif br[0] < 0 < br[1]:
                br = None  # c = 0 is degenerate; let the default brackets handle it
            if br is not None:
                row = _row((model, reg, A, br))
                if row.c0 is None:
                    row = None
        if row is None:
            row = _row((model, reg, A, None))
        rows.append(row)
        prev = row.c0
    return rows
