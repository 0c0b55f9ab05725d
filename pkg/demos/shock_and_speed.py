"""Where the shock sits, and how fast the wave moves.

For the reference model the backward-diffusion band is (7/12, 3/4). The non-local
regularisation places the jump by equal areas, the viscous one jumps at the folds
of F. Each choice gives its own outer orbit and therefore its own speed.
"""
from fbwaves.layer import equal_area, viscous_shock_endpoints
from fbwaves.model import ModelSpec
from fbwaves.phase_plane import Regularisation, delta_p, find_speed, speed_curve

model = ModelSpec.from_roots(6.0, 7 / 12, 0.75, 5.0, 0.2)

s = equal_area(model)
print(f"equal-area level v = {s.v:.12f}   (-61/108 = {-61 / 108:.12f})")
print(f"jump u+ = {s.u_plus:.6f} -> u- = {s.u_minus:.6f}")

for sign in (+1, -1):
    vs = viscous_shock_endpoints(model, sign)
    j = vs.jumps[0] if sign > 0 else vs.jumps[1]
    print(f"viscous, sign {sign:+d}: jump {j.u_from:.6f} -> {j.u_to:.6f} at v = {j.v:.6f}")

# the mismatch in p across the shock changes sign between these two speeds
for c in (0.19, 0.25):
    print(f"delta p at c = {c}: {delta_p(model, Regularisation.NONLOCAL, c):+.4e}")

for reg in Regularisation:
    try:
        r = find_speed(model, reg)
    except Exception as exc:
        print(f"{reg.value:18s} no wave: {exc}")
        continue
    print(f"{reg.value:18s} c0 = {r.c0:+.6f}   shock {r.u_from:.4f} -> {r.u_to:.4f}")

# speed against the Allee threshold; blanks mean no shock-fronted wave
print("\n   A    nonlocal   viscous+   viscous-")
A = [0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45]
cols = {reg: speed_curve(model, reg, A) for reg in Regularisation}
for i, a in enumerate(A):
    cells = []
    for reg in Regularisation:
        c = cols[reg][i].c0
        cells.append("        " if c is None else f"{c:+.5f}")
    print(f"{a:5.2f}  " + "   ".join(cells))
