"""Travelling waves of the regularised problems as two-point boundary value problems.

Non-local regularisation, state ``(u, w, p, v, q)``::

    eps u' = w,  eps w' = v + F(u),  p' = R(u),  v' = p + c u,  q' = u

Viscous relaxation, state ``(u, p, v, q)``::

    eps u' = (v + F(u)) / c,  p' = R(u),  v' = p + c u,  q' = u

The speed ``c`` is an unknown parameter.  Collocation is delegated to
:func:`scipy.integrate.solve_bvp` (three-point Lobatto IIIA per interval,
damped Newton, residual-driven mesh refinement).

Two boundary sets are offered.  ``phase="classical"`` is the classical set
``u(-L)=1, w(-L)=0, w(L)=0, p(-L)=-c, v(L)=-F(0), q(-L)=q0``; it fixes the
position of the front only through exponentially small tails and becomes
numerically singular once ``L`` exceeds roughly 12.  ``phase="integral"``
(the default) keeps ``q(-L)=q0`` and adds ``q(L)=q0+L``, i.e. the front is
placed where ``int u dz = L``, in exchange for ``u(-L)=1``, which the
converged tail satisfies to rounding.  Every solution reports the residuals
of the classical set in :meth:`BvpSolution.classical_bc_residuals`.

Internally ``q`` is carried as ``q - Q(z)`` for a fixed smooth ramp ``Q``;
``q`` itself reaches ``O(L)`` and its finite differences would otherwise
hit the rounding floor on the sub-``eps`` meshes inside the layer.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from scipy.integrate import cumulative_trapezoid, solve_bvp, solve_ivp

from .errors import MeshOverflow, NoConvergence
from .layer import ShockData, equal_area, heteroclinic_profile, viscous_shock_endpoints
from .model import ModelSpec
from .phase_plane import DesingularisedSystem, Regularisation, shoot_manifold, shock_lines

NONLOCAL_VARS = ("u", "w", "p", "v", "q")
VISCOUS_VARS = ("u", "p", "v", "q")
PHASES = ("integral", "classical")


@dataclass(frozen=True)
class BvpProblem:
    model: ModelSpec
    eps: float
    L: float = 40.0
    regularisation: Regularisation = Regularisation.NONLOCAL
    q0: float = -5.0
    phase: str = "integral"
    n_nodes: int = 2001
    tol: float = 1e-8
    max_nodes: int = 150_000

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        if not self.L > 0:
            raise ValueError("L must be positive")
        if self.phase not in PHASES:
            raise ValueError(f"phase must be one of {PHASES}")

    @property
    def nonlocal_(self) -> bool:
        return self.regularisation is Regularisation.NONLOCAL

    @property
    def variables(self):
        return NONLOCAL_VARS if self.nonlocal_ else VISCOUS_VARS

    @property
    def boundary_conditions(self) -> tuple[str, ...]:
        q = (f"q(-L)={self.q0}",)
        pin = (f"q(L)={self.q0}+L",)
        if self.nonlocal_:
            core = ("w(-L)=0", "w(L)=0", "p(-L)=-c", "v(L)=-F(0)")
            return (("u(-L)=1",) + core + q) if self.phase == "classical" else (core + q + pin)
        if self.phase == "classical":
            return ("u(-L)=1", "p(-L)=-c", "v(L)=-F(0)", "u(L)=0") + q
        if self.regularisation is Regularisation.VISCOUS_POSITIVE:
            return ("p(-L)=-c", "v(L)=-F(0)", "u(L)=0") + q + pin
        return ("u(-L)=1", "p(-L)=-c", "v(L)=-F(0)") + q + pin

    def with_eps(self, eps):
        return replace(self, eps=eps)


@dataclass(frozen=True)
class InitialGuess:
    z: np.ndarray
    y: np.ndarray
    c: float


class _Ramp:
    """``Q(z) = q0 + int_{-L}^z H``, ``H`` a unit tanh step centred at ``zc``."""

    def __init__(self, q0, L, zc, width=1.0):
        self.q0, self.L, self.zc, self.width = q0, L, zc, width

    @staticmethod
    def _logcosh(x):
        ax = np.abs(x)
        return ax + np.log1p(np.exp(-2.0 * ax)) - math.log(2.0)

    def H(self, z):
        return 0.5 * (1.0 - np.tanh((np.asarray(z) - self.zc) / self.width))

    def Q(self, z):
        z = np.asarray(z, dtype=float)
        s = self.width
        integral = 0.5 * ((z + self.L) - s * (self._logcosh((z - self.zc) / s)
                                              - self._logcosh((-self.L - self.zc) / s)))
        return self.q0 + integral


class _Profile:
    """Collocation interpolant with ``q`` restored from the ramp."""

    def __init__(self, ppoly, ramp, qi):
        self.ppoly, self.ramp, self.qi = ppoly, ramp, qi

    def __call__(self, z):
        y = np.array(self.ppoly(z), dtype=float)
        y[self.qi] += self.ramp.Q(z)
        return y

    def derivative(self, nu=1):
        d = self.ppoly.derivative(nu)
        if nu != 1:
            raise ValueError("only first derivatives are exposed")

        def dy(z):
            y = np.array(d(z), dtype=float)
            y[self.qi] += self.ramp.H(z)
            return y
        return dy


@dataclass
class BvpSolution:
    problem: BvpProblem
    z: np.ndarray
    y: np.ndarray
    c: float
    residual: float
    iterations: int = 0
    interpolant: object = field(default=None, repr=False)

    def __getitem__(self, name):
        return self.y[self.problem.variables.index(name)]

    def evaluate(self, z, nu: int = 0):
        """Interpolated state (``nu=0``) or its derivative (``nu=1``) at ``z``."""
        if nu == 0:
            return self.interpolant(z)
        return self.interpolant.derivative(nu)(z)

    @property
    def monotone(self) -> bool:
        return bool(np.all(np.diff(self["u"]) <= 1e-9))

    @property
    def front_position(self) -> float:
        """``z`` where ``u`` crosses the midpoint of the negative-diffusivity band."""
        return _crossing(self.z, self["u"], self.problem.model.centre)

    def classical_bc_residuals(self) -> dict:
        """Residuals of the classical boundary set (plus ``u(L)=0`` for the viscous system)."""
        p = self.problem
        F0 = p.model.F(0.0)
        a, b = self.y[:, 0], self.y[:, -1]
        ix = {n: i for i, n in enumerate(p.variables)}
        out = {"u(-L)=1": a[ix["u"]] - 1.0, "p(-L)=-c": a[ix["p"]] + self.c,
               "v(L)=-F(0)": b[ix["v"]] + F0, f"q(-L)={p.q0}": a[ix["q"]] - p.q0}
        if p.nonlocal_:
            out["w(-L)=0"] = a[ix["w"]]
            out["w(L)=0"] = b[ix["w"]]
        else:
            out["u(L)=0"] = b[ix["u"]]
        return {k: float(v) for k, v in out.items()}

    def metadata(self) -> dict:
        p = self.problem
        return {
            "c": self.c, "eps": p.eps, "L": p.L, "residual": self.residual,
            "mesh_size": int(self.z.size), "regularisation": p.regularisation.value,
            "q0": p.q0, "phase": p.phase, "boundary_conditions": list(p.boundary_conditions),
            "classical_bc_residuals": self.classical_bc_residuals(),
            "iterations": self.iterations,
        }

    def write_csv(self, path, metadata_path=None):
        """``z,u,w,p,v`` rows (``w`` is ``eps u'`` for the viscous system) plus a JSON record."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        u, p, v = self["u"], self["p"], self["v"]
        if self.problem.nonlocal_:
            w = self["w"]
        else:
            w = self.problem.eps * self.evaluate(self.z, 1)[0]
        with open(path, "w", newline="") as fh:
            out = csv.writer(fh, lineterminator="\n")
            out.writerow(["z", "u", "w", "p", "v"])
            for row in zip(self.z, u, w, p, v):
                out.writerow([f"{x:.17g}" for x in row])
        meta = Path(metadata_path) if metadata_path else path.with_suffix(".json")
        meta.write_text(json.dumps(self.metadata(), indent=2))
        return path, meta


def _crossing(z, u, level):
    i = np.nonzero(np.diff(np.sign(u - level)))[0]
    if i.size == 0:
        return float(z[np.argmin(np.abs(u - level))])
    j = int(i[0])
    return float(z[j] + (level - u[j]) / (u[j + 1] - u[j]) * (z[j + 1] - z[j]))


# right-hand sides

def rhs(problem: BvpProblem):
    """``f(z, y, c)`` for the original variables (with ``q``)."""
    m, eps = problem.model, problem.eps
    if problem.nonlocal_:
        def f(z, y, c):
            u, w, p, v, _ = y
            return np.vstack([w / eps, (v + m.F(u)) / eps, m.R(u), p + c * u, u])
    else:
        def f(z, y, c):
            u, p, v, _ = y
            return np.vstack([(v + m.F(u)) / (c * eps), m.R(u), p + c * u, u])
    return f


def _collocation_system(problem: BvpProblem, ramp: _Ramp):
    """``solve_bvp`` callables in the shifted variable ``s = q - Q(z)``."""
    m, eps, L, q0 = problem.model, problem.eps, problem.L, problem.q0
    F0 = m.F(0.0)
    s_end = q0 + L - float(ramp.Q(L))
    f = rhs(problem)
    nl = problem.nonlocal_
    qi = 4 if nl else 3
    dim = qi + 1

    def fun(z, y, par):
        out = f(z, y, par[0])
        out[qi] -= ramp.H(z)
        return out

    def fun_jac(z, y, par):
        c = par[0]
        u = y[0]
        J = np.zeros((dim, dim, z.size))
        Jp = np.zeros((dim, 1, z.size))
        if nl:
            J[0, 1] = 1.0 / eps
            J[1, 0] = m.D(u) / eps
            J[1, 3] = 1.0 / eps
            J[2, 0] = m.dR(u)
            J[3, 0] = c
            J[3, 2] = 1.0
            J[4, 0] = 1.0
            Jp[3, 0] = u
        else:
            v = y[2]
            J[0, 0] = m.D(u) / (c * eps)
            J[0, 2] = 1.0 / (c * eps)
            J[1, 0] = m.dR(u)
            J[2, 0] = c
            J[2, 1] = 1.0
            J[3, 0] = 1.0
            Jp[0, 0] = -(v + m.F(u)) / (c * c * eps)
            Jp[2, 0] = u
        return J, Jp

    # each condition: (side, component or 'c', target); p(-L)=-c handled separately
    if nl:
        conds = [("a", 1, 0.0), ("b", 1, 0.0), ("a", 2, "c"), ("b", 3, -F0), ("a", 4, 0.0)]
        conds = ([("a", 0, 1.0)] + conds) if problem.phase == "classical" else conds + [("b", 4, s_end)]
    else:
        if problem.phase == "classical":
            conds = [("a", 0, 1.0), ("a", 1, "c"), ("b", 2, -F0), ("b", 0, 0.0), ("a", 3, 0.0)]
        elif problem.regularisation is Regularisation.VISCOUS_POSITIVE:
            conds = [("a", 1, "c"), ("b", 2, -F0), ("b", 0, 0.0), ("a", 3, 0.0), ("b", 3, s_end)]
        else:
            conds = [("a", 0, 1.0), ("a", 1, "c"), ("b", 2, -F0), ("a", 3, 0.0), ("b", 3, s_end)]

    def bc(ya, yb, par):
        c = par[0]
        out = []
        for side, i, target in conds:
            y = ya if side == "a" else yb
            out.append(y[i] + c if target == "c" else y[i] - target)
        return np.array(out)

    def bc_jac(ya, yb, par):
        n = len(conds)
        Ja, Jb, Jp = np.zeros((n, dim)), np.zeros((n, dim)), np.zeros((n, 1))
        for k, (side, i, target) in enumerate(conds):
            (Ja if side == "a" else Jb)[k, i] = 1.0
            if target == "c":
                Jp[k, 0] = 1.0
        return Ja, Jb, Jp

    return fun, fun_jac, bc, bc_jac, qi


def relative_residual(problem: BvpProblem, c: float, z, y, dy) -> np.ndarray:
    """``|y' - f(y)| / (1 + |f(y)|)``, worst component, at the points ``z``."""
    f = rhs(problem)(z, y, c)
    return np.max(np.abs(dy - f) / (1.0 + np.abs(f)), axis=0)


def midpoint_residual(solution: BvpSolution) -> float:
    """Largest relative residual of the interpolant at interval midpoints."""
    z = solution.z
    zm = 0.5 * (z[:-1] + z[1:])
    r = relative_residual(solution.problem, solution.c, zm, solution.evaluate(zm),
                          solution.evaluate(zm, 1))
    return float(r.max())


# meshes and guesses

def _stretched_mesh(L, centre_width, n):
    """Nodes on ``[-L, L]`` clustered around 0 with spacing ~``centre_width`` there."""
    s = np.linspace(-1.0, 1.0, n)
    ds = 2.0 / (n - 1)
    target = centre_width / (L * ds)
    if target >= 1.0:
        return L * s
    # kappa / sinh(kappa) = target
    lo, hi = 1e-6, 60.0
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if mid / math.sinh(mid) > target:
            lo = mid
        else:
            hi = mid
    kappa = 0.5 * (lo + hi)
    return L * np.sinh(kappa * s) / math.sinh(kappa)


def layer_mesh(L, z_front, spacing, n_nodes):
    """Two sinh-stretched halves on ``[-L, L]`` meeting at ``z_front``."""
    z_front = min(max(z_front, -0.9 * L), 0.9 * L)
    half = max(n_nodes // 2, 8)
    left = _stretched_mesh(1.0, spacing / (L + z_front), 2 * half + 1)[:half + 1]
    right = _stretched_mesh(1.0, spacing / (L - z_front), 2 * half + 1)[half:]
    z = np.concatenate([z_front + (L + z_front) * left, z_front + (L - z_front) * right[1:]])
    z[0], z[-1] = -L, L
    return z


def layer_scale(model: ModelSpec, regularisation: Regularisation, eps: float, c: float) -> float:
    """Width of the fast transition in ``z``."""
    if regularisation is Regularisation.NONLOCAL:
        shock = equal_area(model)
        return eps / (shock.a * shock.width)
    return eps * abs(c) / (model.k * (model.beta - model.alpha) ** 2)


def _arc_in_z(traj, model, z_at_crossing=0.0, n=4000):
    """Map a desingularised arc to ``z`` via ``dz = D(u) dpsi``, anchored at its end."""
    psi, y = traj.sample(n)
    dz = cumulative_trapezoid(model.D(y[0]), psi, initial=0.0)
    z = dz - dz[-1] + z_at_crossing
    order = np.argsort(z)
    return z[order], y[:, order]


def _outer(z, arc_z, arc_y, rest):
    """Arc values at ``z``, clamped to the fixed point ``rest`` beyond its far end."""
    out = np.empty((2, z.size))
    for i in range(2):
        out[i] = np.interp(z, arc_z, arc_y[i])
    far = (z < arc_z[0]) if abs(arc_y[0, 0] - rest[0]) < abs(arc_y[0, -1] - rest[0]) else (z > arc_z[-1])
    out[0, far], out[1, far] = rest
    return out


def _viscous_inner(model, jump, c, xi):
    """Fast viscous profile ``u' = (v + F(u))/c`` between ``jump.u_from`` and ``jump.u_to``."""
    lo, hi = sorted((jump.u_from, jump.u_to))
    mid = 0.5 * (lo + hi)
    f = lambda s, y: [(jump.v + model.F(y[0])) / c]
    out = np.full(xi.shape, mid)
    for sel, span in ((xi >= 0, (0.0, max(xi.max(), 1e-12))), (xi < 0, (0.0, min(xi.min(), -1e-12)))):
        if not sel.any():
            continue
        sol = solve_ivp(f, span, [mid], dense_output=True, rtol=1e-10, atol=1e-12)
        out[sel] = np.clip(sol.sol(xi[sel])[0], lo, hi)
    return out


def construct_guess(model: ModelSpec, regularisation: Regularisation, c_seed: float,
                    shock: ShockData | None = None, L: float = 40.0, n_nodes: int = 2001,
                    eps: float = 1e-3, q0: float = -5.0) -> InitialGuess:
    """Singular orbit at speed ``c_seed`` laid out on a mesh clustered at the shock (z = 0).

    The outer arcs are the unstable manifold of ``(1, -c)`` up to the upper
    shock line and the stable manifold of ``(0, 0)`` back to the lower one;
    the inner window carries the fast layer profile in ``xi = z / eps``.
    """
    nonlocal_ = regularisation is Regularisation.NONLOCAL
    system = DesingularisedSystem(model, c_seed)
    u_hi, u_lo = shock_lines(model, regularisation)
    top = shoot_manifold(system, (1.0, -c_seed), -1, stop=(u_hi,))
    bot = shoot_manifold(system, (0.0, 0.0), +1, stop=(u_lo,), stable=True)
    zt, yt = _arc_in_z(top, model)
    zb, yb = _arc_in_z(bot, model)

    if nonlocal_:
        shock = shock or equal_area(model)
    scale = layer_scale(model, regularisation, eps, c_seed)
    z = layer_mesh(L, 0.0, scale / 4.0, n_nodes)
    left = z < 0

    outL = _outer(z, zt, yt, (1.0, -c_seed))
    outR = _outer(z, zb, yb, (0.0, 0.0))
    up = np.where(left, outL[0], outR[0])
    pp = np.where(left, outL[1], outR[1])

    xi = z / eps
    if nonlocal_:
        u_in, w_in = heteroclinic_profile(shock, "plus", xi)
        u = u_in + np.where(left, up - shock.u_minus, up - shock.u_plus)
    else:
        shocks = viscous_shock_endpoints(model, 1 if c_seed > 0 else -1)
        jump = shocks.jumps[0] if c_seed > 0 else shocks.jumps[1]
        u = _viscous_inner(model, jump, c_seed, xi) + np.where(left, up - u_hi, up - u_lo)
    D = model.D(up)
    safe = np.where(np.abs(D) > 1e-8, D, 1.0)
    du_out = np.where(np.abs(D) > 1e-8, -(pp + c_seed * up) / safe, 0.0)
    v = -model.F(up)
    q = q0 + cumulative_trapezoid(u, z, initial=0.0)
    if nonlocal_:
        y = np.vstack([u, w_in + eps * du_out, pp, v, q])
    else:
        y = np.vstack([u, pp, v, q])
    return InitialGuess(z, y, float(c_seed))


def refit(solution: BvpSolution, eps: float | None = None, n_nodes: int | None = None,
          L: float | None = None) -> InitialGuess:
    """Re-sample a solution on a fresh layer mesh (new ``eps``, node count or domain).

    Beyond the old domain the profile is continued by its end state, with
    ``q`` extended linearly.
    """
    p = solution.problem
    eps = p.eps if eps is None else eps
    n_nodes = p.n_nodes if n_nodes is None else n_nodes
    L = p.L if L is None else L
    spacing = layer_scale(p.model, p.regularisation, eps, solution.c) / 4.0
    z = layer_mesh(L, solution.front_position, spacing, n_nodes)
    inside = np.clip(z, -p.L, p.L)
    y = solution.evaluate(inside)
    qi = p.variables.index("q")
    for i in range(len(p.variables)):
        if i != qi:
            y[i] = np.where(z < -p.L, solution.y[i, 0], np.where(z > p.L, solution.y[i, -1], y[i]))
    y[qi] += (z - inside) * np.where(z < -p.L, solution.y[0, 0], solution.y[0, -1])
    y[qi] += p.q0 - y[qi, 0]
    return InitialGuess(z, y, solution.c)


# solving

def solve_wave(problem: BvpProblem, initial_guess, verbose: int = 0) -> BvpSolution:
    """Collocation solve with ``c`` as the unknown parameter.

    ``initial_guess`` is an :class:`InitialGuess` or a previous
    :class:`BvpSolution` (its mesh and profile are reused).  The returned
    ``residual`` is the worst relative ODE residual of the interpolant at the
    interval midpoints, which are not collocation points.
    """
    z, y, c = initial_guess.z, np.array(initial_guess.y, dtype=float), initial_guess.c
    if y.shape[0] != len(problem.variables):
        raise ValueError(f"guess has {y.shape[0]} components, expected {len(problem.variables)}")
    if not (math.isclose(z[0], -problem.L) and math.isclose(z[-1], problem.L)):
        raise ValueError("guess mesh must span [-L, L]; use refit() to change the domain")
    ramp = _Ramp(problem.q0, problem.L, _crossing(z, y[0], problem.model.centre))
    fun, fun_jac, bc, bc_jac, qi = _collocation_system(problem, ramp)
    y[qi] -= ramp.Q(z)

    # the midpoint residual is at most ~1.7x the per-interval rms that solve_bvp controls
    res = solve_bvp(fun, bc, z, y, p=[c], fun_jac=fun_jac, bc_jac=bc_jac, tol=problem.tol / 2,
                    bc_tol=problem.tol, max_nodes=problem.max_nodes, verbose=verbose)
    yy = res.y.copy()
    yy[qi] += ramp.Q(res.x)
    best = BvpSolution(problem, res.x, yy, float(res.p[0]), math.inf, int(res.niter),
                       _Profile(res.sol, ramp, qi))
    if res.status == 1:
        raise MeshOverflow(f"mesh exceeded {problem.max_nodes} nodes at eps={problem.eps}")
    if res.status != 0 or not np.all(np.isfinite(yy)):
        raise NoConvergence(f"collocation failed at eps={problem.eps}: {res.message}", best)
    best.residual = midpoint_residual(best)
    return best


def _descend(problem, previous, eps_target, depth, log):
    """Step from ``previous`` down to ``eps_target``, bisecting in log(eps) on failure."""
    try:
        sol = solve_wave(problem.with_eps(eps_target), refit(previous, eps=eps_target))
        log.append((eps_target, sol.c, sol.z.size))
        return sol
    except (NoConvergence, MeshOverflow):
        if depth == 0:
            raise
    mid = math.sqrt(previous.problem.eps * eps_target)
    half = _descend(problem, previous, mid, depth - 1, log)
    return _descend(problem, half, eps_target, depth - 1, log)


def continuation(model: ModelSpec, c_seed: float, eps_ladder=(1e-3, 1e-4, 1e-5),
                 regularisation: Regularisation = Regularisation.NONLOCAL,
                 L: float = 40.0, q0: float = -5.0, phase: str = "integral",
                 n_nodes: int = 2001, tol: float = 1e-8, eps_start: float = 0.1,
                 ratio: float = 0.3, log: list | None = None) -> list[BvpSolution]:
    """Solutions at each ``eps`` of a decreasing ladder.

    The walk starts from the singular-orbit guess at ``eps_start`` (or the
    first rung if that is larger) and moves down geometrically by ``ratio``,
    each step warm-started on a mesh refitted to the new layer width.  Steps
    that fail are split in log(eps).
    """
    ladder = sorted(eps_ladder, reverse=True)
    log = [] if log is None else log
    problem = BvpProblem(model, max(eps_start, ladder[0]), L, regularisation, q0, phase,
                         n_nodes, tol)
    guess = construct_guess(model, regularisation, c_seed, L=L, n_nodes=n_nodes,
                            eps=problem.eps, q0=q0)
    current = solve_wave(problem, guess)
    log.append((problem.eps, current.c, current.z.size))
    out = []
    for target in ladder:
        while current.problem.eps > target * (1 + 1e-12):
            nxt = max(target, current.problem.eps * ratio)
            current = _descend(problem, current, nxt, 4, log)
        out.append(current)
    return out


# symmetry

@dataclass(frozen=True)
class SymmetryReport:
    residual: float
    c_mirror: float
    passed: bool


class _Mirrored:
    """Interpolant of the reflected profile ``S y(-z)``."""

    def __init__(self, base, signs):
        self.base = base
        self.signs = np.asarray(signs, dtype=float)

    def __call__(self, z):
        return self.signs[:, None] * self.base(-np.asarray(z))

    def derivative(self, nu=1):
        d = self.base.derivative(nu)
        s = self.signs[:, None] * (-1.0) ** nu
        return lambda z: s * d(-np.asarray(z))


def mirror(solution: BvpSolution) -> BvpSolution:
    """Apply ``(u, w, p, v, q, z, c) -> (u, -w, -p, v, -q, -z, -c)``."""
    if not solution.problem.nonlocal_:
        raise ValueError("the reflection symmetry holds for the non-local system only")
    signs = np.array([1.0, -1.0, -1.0, 1.0, -1.0])
    interp = solution.interpolant
    if isinstance(interp, _Mirrored):
        interp = interp.base  # the map is an involution
    else:
        interp = _Mirrored(interp, signs)
    return BvpSolution(solution.problem, -solution.z[::-1], signs[:, None] * solution.y[:, ::-1],
                       -solution.c, solution.residual, solution.iterations, interp)


def symmetry_check(solution: BvpSolution, tol: float = 1e-6) -> SymmetryReport:
    """Residual of the reflected profile in the system with speed ``-c``."""
    m = mirror(solution)
    r = midpoint_residual(m)
    return SymmetryReport(r, m.c, r < tol)
