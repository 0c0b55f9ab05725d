"""One-dimensional exclusion-process model with isolated and grouped agents.

Each site holds at most one agent.  An agent is *isolated* when both nearest
neighbours are empty (a missing neighbour beyond a reflecting end counts as
empty) and *grouped* otherwise; the two classes move, proliferate and die
with their own per-step probabilities.

One step of duration ``tau`` is random-sequential: the agents present at the
start of the step are visited once each in a random order.  The visited
agent is classified at that moment and then makes three independent
attempts in fixed order: move (to a uniformly chosen neighbour), proliferate
(daughter to a uniformly chosen neighbour), die.  Moves and placements onto
occupied sites, or off the lattice, are aborted.  Daughters are not visited
until the next step.
"""

from __future__ import annotations

import csv
import enum
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numba
import numpy as np


class Site(enum.IntEnum):
    EMPTY = 0
    ISOLATED = 1
    GROUPED = 2


@dataclass(frozen=True)
class LatticeParams:
    Pm_i: float = 1.0
    Pp_i: float = 0.0
    Pd_i: float = 0.0
    Pm_g: float = 1.0
    Pp_g: float = 0.0
    Pd_g: float = 0.0
    tau: float = 1.0
    delta: float = 1.0
    n_sites: int = 200
    boundary: str = "reflecting"

    def __post_init__(self):
        for name in ("Pm_i", "Pp_i", "Pd_i", "Pm_g", "Pp_g", "Pd_g"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name}={p} is not a probability")
        if self.tau <= 0 or self.delta <= 0:
            raise ValueError("tau and delta must be positive")
        if self.n_sites < 1:
            raise ValueError("n_sites must be >= 1")
        if self.boundary != "reflecting":
            raise ValueError("only reflecting boundaries are implemented")

    @property
    def probabilities(self) -> np.ndarray:
        """``[[Pm, Pp, Pd] isolated, [Pm, Pp, Pd] grouped]``."""
        return np.array([[self.Pm_i, self.Pp_i, self.Pd_i], [self.Pm_g, self.Pp_g, self.Pd_g]])

    @property
    def x(self) -> np.ndarray:
        return self.delta * np.arange(self.n_sites)

    def continuum(self) -> dict:
        """Continuum coefficients ``D = Pm delta^2 / (2 tau)``, ``lambda = Pp / tau``, ``K = Pd / tau``.

        This is the unbiased-walk scaling; it is a modelling assumption, not a
        derived limit.
        """
        s = self.delta ** 2 / (2 * self.tau)
        return {
            "D_i": self.Pm_i * s, "D_g": self.Pm_g * s,
            "lam_i": self.Pp_i / self.tau, "lam_g": self.Pp_g / self.tau,
            "K_i": self.Pd_i / self.tau, "K_g": self.Pd_g / self.tau,
        }


@dataclass(frozen=True)
class LatticeState:
    occupancy: np.ndarray
    steps: int = 0

    def __post_init__(self):
        occ = np.asarray(self.occupancy)
        if occ.ndim != 1 or not np.all((occ == 0) | (occ == 1)):
            raise ValueError("occupancy must be a 1-D array of zeros and ones")

    @property
    def n_agents(self) -> int:
        return int(np.sum(self.occupancy))


def classify_agents(state) -> np.ndarray:
    """Per-site :class:`Site` codes."""
    occ = np.asarray(state.occupancy if isinstance(state, LatticeState) else state, dtype=np.int8)
    left = np.concatenate(([0], occ[:-1]))
    right = np.concatenate((occ[1:], [0]))
    out = np.where(occ == 1, np.where((left + right) > 0, Site.GROUPED, Site.ISOLATED), Site.EMPTY)
    return out.astype(np.int8)


@numba.njit(cache=True)
def _sweep(occ, order, draws, probs):
    """Random-sequential sweep; ``draws[k]`` holds five uniforms for the k-th visit."""
    n = occ.shape[0]
    # positions of the agents present at the start of the step, tracked through moves
    pos = np.empty(order.shape[0], dtype=np.int64)
    m = 0
    for j in range(n):
        if occ[j] == 1:
            pos[m] = j
            m += 1
    for k in range(order.shape[0]):
        a = order[k]
        j = pos[a]
        if j < 0:
            continue
        left = occ[j - 1] if j > 0 else 0
        right = occ[j + 1] if j < n - 1 else 0
        cls = 1 if left + right > 0 else 0
        pm, pp, pd = probs[cls, 0], probs[cls, 1], probs[cls, 2]
        d = draws[k]
        if d[0] < pm:
            t = j - 1 if d[1] < 0.5 else j + 1
            if 0 <= t < n and occ[t] == 0:
                occ[j] = 0
                occ[t] = 1
                pos[a] = t
                j = t
        if d[2] < pp:
            t = j - 1 if d[3] < 0.5 else j + 1
            if 0 <= t < n and occ[t] == 0:
                occ[t] = 1  # daughter; not visited this step
        if d[4] < pd:
            occ[j] = 0
            pos[a] = -1


def step(state: LatticeState, params: LatticeParams, rng: np.random.Generator,
         check: bool = False) -> LatticeState:
    """Advance one step of duration ``tau``."""
    occ = np.array(state.occupancy, dtype=np.int8)
    if occ.size != params.n_sites:
        raise ValueError(f"state has {occ.size} sites, params expect {params.n_sites}")
    n_agents = int(occ.sum())
    order = rng.permutation(n_agents)
    draws = rng.random((n_agents, 5))
    _sweep(occ, order, draws, params.probabilities)
    if check and not np.all((occ == 0) | (occ == 1)):
        raise AssertionError("exclusion violated")
    return LatticeState(occ, state.steps + 1)


def step_front(params: LatticeParams, x_step: float) -> np.ndarray:
    """Fully occupied for ``x <= x_step``, empty beyond."""
    return (params.x <= x_step + 1e-9 * params.delta).astype(np.int8)


def _replicate(args):
    params, initial, sample_steps, seed_seq, check = args
    rng = np.random.default_rng(seed_seq)
    state = LatticeState(np.array(initial, dtype=np.int8))
    out = np.zeros((len(sample_steps), params.n_sites), dtype=np.int64)
    done = 0
    for i, target in enumerate(sample_steps):
        while done < target:
            state = step(state, params, rng, check)
            done += 1
        out[i] = state.occupancy
    return out


@dataclass
class DensityProfile:
    x: np.ndarray
    t: np.ndarray
    density: np.ndarray   # (len(t), n_sites)
    n_reps: int
    counts: np.ndarray    # summed occupancy, integer

    def write_csv(self, path):
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["x", "density", "t", "n_reps"])
            for t, row in zip(self.t, self.density):
                for xi, di in zip(self.x, row):
                    w.writerow([f"{xi:.17g}", f"{di:.17g}", f"{t:.17g}", self.n_reps])
        return path


def ensemble_density(params: LatticeParams, n_reps: int, t_samples, seed: int,
                     initial=None, jobs: int = 1, check: bool = False) -> DensityProfile:
    """Replicate-averaged occupancy at times ``t_samples`` (multiples of ``tau``).

    Replicate ``i`` draws from child ``i`` of ``SeedSequence(seed)``; counts
    are summed as integers in replicate order, so the result does not depend
    on ``jobs``.
    """
    if n_reps < 1:
        raise ValueError("n_reps must be >= 1")
    t = np.asarray(sorted(t_samples), dtype=float)
    steps = np.rint(t / params.tau).astype(int)
    if np.any(np.abs(steps * params.tau - t) > 1e-9 * np.maximum(1.0, t)):
        raise ValueError("sample times must be multiples of tau")
    if initial is None:
        initial = step_front(params, 0.2 * params.n_sites * params.delta)
    initial = np.asarray(initial, dtype=np.int8)
    children = np.random.SeedSequence(seed).spawn(n_reps)
    tasks = [(params, initial, tuple(steps), ch, check) for ch in children]
    if jobs > 1 and n_reps > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_replicate, tasks))
    else:
        results = [_replicate(a) for a in tasks]
    counts = np.zeros((t.size, params.n_sites), dtype=np.int64)
    for r in results:
        counts += r
    return DensityProfile(params.x, t, counts / n_reps, n_reps, counts)


def density_front(x, density, threshold: float = 0.5) -> float:
    """Right-most point where the density profile falls through ``threshold``."""
    above = np.nonzero(np.asarray(density) >= threshold)[0]
    if above.size == 0:
        return float(x[0])
    j = above[-1]
    if j == len(x) - 1:
        return float(x[-1])
    d0, d1 = density[j], density[j + 1]
    return float(x[j] + (d0 - threshold) / (d0 - d1) * (x[j + 1] - x[j]))


def rle_encode(occupancy) -> str:
    """Run-length string such as ``"3x1,2x0"``."""
    occ = np.asarray(occupancy, dtype=np.int8)
    if occ.size == 0:
        return ""
    edges = np.flatnonzero(np.diff(occ)) + 1
    starts = np.concatenate(([0], edges))
    lengths = np.diff(np.concatenate((starts, [occ.size])))
    return ",".join(f"{n}x{occ[s]}" for s, n in zip(starts, lengths))


def rle_decode(text: str) -> np.ndarray:
    if not text:
        return np.zeros(0, dtype=np.int8)
    parts = [p.split("x") for p in text.split(",")]
    return np.concatenate([np.full(int(n), int(v), dtype=np.int8) for n, v in parts])
