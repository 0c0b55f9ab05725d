"""Smooth waves of the regularised problem, and their limit.

Turning on a small eps replaces the jump with a thin interior layer. Continuing
eps downward, the computed speed settles onto the singular value and the
profile lies on the outer orbit away from the layer.
"""
import time
from pathlib import Path

from fbwaves.bvp import continuation, mirror, symmetry_check
from fbwaves.model import ModelSpec
from fbwaves.phase_plane import Regularisation, find_speed

model = ModelSpec.from_roots(6.0, 7 / 12, 0.75, 5.0, 0.2)
out = Path(__file__).with_name("out")

c0 = find_speed(model, Regularisation.NONLOCAL).c0
print(f"singular speed c0 = {c0:.8f}")

t = time.perf_counter()
ladder = continuation(model, c0, (1e-3, 1e-4, 1e-5), Regularisation.NONLOCAL)
print(f"continuation took {time.perf_counter() - t:.1f} s")

for s in ladder:
    eps = s.problem.eps
    rep = symmetry_check(s)
    print(f"eps = {eps:.0e}  c = {s.c:.9f}  c - c0 = {s.c - c0:+.2e}  "
          f"nodes = {s.z.size:6d}  residual = {s.residual:.1e}  mirror ok = {rep.passed}")
    s.write_csv(out / f"wave_eps{eps:.0e}.csv")

# the mirrored wave of the reversed problem travels the other way
m = mirror(ladder[-1])
print(f"mirrored speed {m.c:+.9f}, u range [{m['u'].min():.3f}, {m['u'].max():.3f}]")

# inside the layer w = eps u' reaches roughly -a (u- - u+)^2 / 4 = -1/48
s = ladder[0]
print(f"min w at eps=1e-3: {s['w'].min():.5f}   (-1/48 = {-1 / 48:.5f})")

# the viscous regularisation converges to a different speed
visc = continuation(model, find_speed(model, Regularisation.VISCOUS_POSITIVE).c0,
                    (1e-3, 1e-4), Regularisation.VISCOUS_POSITIVE)
for s in visc:
    print(f"viscous eps = {s.problem.eps:.0e}  c = {s.c:.6f}")
print("profiles written to", out)
