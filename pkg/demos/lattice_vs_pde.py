"""Agents on a line, and their mean-field limit.

Isolated agents move and proliferate at one set of rates, agents with a
neighbour at another. Averaging many replicates gives a density that invades
like the continuum front, though not at the same speed.
"""
import numpy as np

from fbwaves.lattice import LatticeParams, density_front, ensemble_density, step_front
from fbwaves.model import ModelSpec
from fbwaves.pde import Grid, simulate

lp = LatticeParams(Pm_i=1.0, Pp_i=0.01, Pm_g=0.2, Pp_g=0.01, n_sites=200)
ts = [0, 250, 500, 750, 1000]
prof = ensemble_density(lp, 40, ts, seed=2024, initial=step_front(lp, 40.0))

cm = lp.continuum()
print("continuum coefficients:", {k: round(v, 4) for k, v in cm.items()})
model = ModelSpec.from_diffusivities(cm["D_i"], cm["D_g"], cm["lam_g"])
print(f"negative diffusivity band: ({model.alpha:.3f}, {model.beta:.3f})")

grid = Grid(0.0, 199.0, 0.1, 0.05)
hist = simulate(model, grid, np.where(grid.x <= 40.5, 1.0, 0.0), t_samples=ts[1:])

print("\n    t   lattice front   PDE front")
print(f"{0:5d}   {density_front(lp.x, prof.density[0]):13.2f}   {40.5:9.2f}")
for t, d, u in zip(ts[1:], prof.density[1:], hist.U):
    print(f"{t:5d}   {density_front(lp.x, d):13.2f}   {density_front(grid.x, u):9.2f}")
