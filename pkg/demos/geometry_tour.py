"""Geodesics, distances and the volume distortion of the exponential map.

Run:  python3 demos/geometry_tour.py
"""

import numpy as np

from hyperflow import hypgeom as hg

x = np.array([0.3, -0.2])
W = np.array([0.4, 0.1])  # chart components at x

y = hg.ball_exp(x, W)
print("exp_x(W)            ", y)
print("log_x(exp_x(W)) - W ", hg.ball_log(x, y) - W)
print("d(x, y)             ", hg.ball_distance(x, y))
print("|W| hyperbolic      ", hg.conformal_factor(x) * np.linalg.norm(W))

# the same two points seen in the upper half-space
yx, yy = hg.ball_to_halfspace(x), hg.ball_to_halfspace(y)
print("half-space distance ", hg.halfspace_distance(yx, yy))

# endpoints at infinity of the geodesic through x with direction W
print("forward endpoint    ", hg.forward_endpoint(x, W / np.linalg.norm(W)))

# volume distortion of exp, (sinh r / r)^(N-1)
for r in (0.5, 1.0, 2.0):
    print(f"rho({r}) N=2 {hg.jacobian_rho(r, 2):.6f}  N=3 {hg.jacobian_rho(r, 3):.6f}")

# shift-map Jacobian and its bounds exp(-|V|) <= C_V <= exp(|V|)
V = np.array([0.7, -0.4])
s = np.linalg.norm(V)
print(f"C_V = {hg.shift_jacobian_CV(V):.6f} in [{np.exp(-s):.4f}, {np.exp(s):.4f}]")
