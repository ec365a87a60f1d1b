"""Non-local diffusion approaching the Laplace-Beltrami operator.

Applies the rescaled operator to a radial bump for a few kernel scales and
compares with A_J times the Laplacian at the bump centre, then runs a short
evolution and prints the monitors.

Run:  python3 demos/diffusion_limit.py
"""

import numpy as np

from hyperflow.field import Grid, RadialBump, make_initial
from hyperflow.kernels import Gaussian, moment_AJ
from hyperflow.nonlocal_ops import evolve_nonlocal, get_operator

grid = Grid(2, 0.8, 0.04)
bump = RadialBump((0.0, 0.0), 1.0)
J = Gaussian(1.0)
u0 = make_initial(bump, grid)

centre = int(np.argmin(grid.radius))
target = moment_AJ(J, 2) * bump.laplacian(grid.points[centre : centre + 1])[0]
print(f"A_J = {moment_AJ(J, 2):.6f}, A_J Lap u(0) = {target:.6f}")
for eps in (0.4, 0.2, 0.1):
    LJ = get_operator(grid, J, None, eps).LJ(u0.values)
    print(f"eps={eps:<4} L_J u(0) = {LJ[centre]:.6f}  gap {abs(LJ[centre] - target):.3e}")

traj, mon = evolve_nonlocal(u0, J, None, eps=0.2, T=0.01, save_every=0.0025)
for t, m, l2, sup in zip(mon.t, mon.mass, mon.l2, mon.linf):
    print(f"t={t:.4f} mass={m:.12f} L2={l2:.8f} sup={sup:.8f}")
