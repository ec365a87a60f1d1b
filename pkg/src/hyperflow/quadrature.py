"""Quadrature rules on tangent fibers and on the unit sphere."""

import numpy as np


def sphere_rule(N, n_theta):
    """Directions and weights integrating over the unit sphere S^{N-1}.

    N=2 uses n_theta uniform angles. N=3 uses Gauss-Legendre in the polar
    cosine (n_theta // 2 nodes) times n_theta uniform azimuths.
    """
    if N == 1:
        return np.array([[1.0], [-1.0]]), np.array([1.0, 1.0])
    if N == 2:
        th = 2.0 * np.pi * np.arange(n_theta) / n_theta
        dirs = np.stack([np.cos(th), np.sin(th)], axis=-1)
        return dirs, np.full(n_theta, 2.0 * np.pi / n_theta)
    if N == 3:
        n_pol = max(n_theta // 2, 2)
        c, wc = np.polynomial.legendre.leggauss(n_pol)
        ph = 2.0 * np.pi * np.arange(n_theta) / n_theta
        s = np.sqrt(1.0 - c * c)
        dirs = np.stack(
            [
                np.outer(s, np.cos(ph)),
                np.outer(s, np.sin(ph)),
                np.outer(c, np.ones_like(ph)),
            ],
            axis=-1,
        ).reshape(-1, 3)
        w = np.outer(wc, np.full(n_theta, 2.0 * np.pi / n_theta)).ravel()
        return dirs, w
    raise ValueError(f"sphere rule not available for N={N}")


def sphere_volume(N):
    """Surface area of S^{N-1}."""
    from math import gamma, pi

    return 2.0 * pi ** (N / 2) / gamma(N / 2)


class FiberQuadrature:
    """Radial Gauss-Legendre times sphere rule on {|Z| <= R_supp} in T_x.

    ``points`` are orthonormal fiber coordinates Z, ``radii`` their lengths
    and ``weights`` already include the polar factor r^(N-1).
    """

    def __init__(self, N, R_supp, n_r=16, n_theta=32):
        if R_supp <= 0:
            raise ValueError("R_supp must be positive")
        self.N = N
        self.R_supp = float(R_supp)
        self.n_r = n_r
        self.n_theta = n_theta
        t, wt = np.polynomial.legendre.leggauss(n_r)
        r = 0.5 * self.R_supp * (t + 1.0)
        wr = 0.5 * self.R_supp * wt * r ** (N - 1)
        dirs, wd = sphere_rule(N, n_theta)
        self.radial_nodes = r
        self.radial_weights = wr
        self.directions = dirs
        self.points = (r[:, None, None] * dirs[None, :, :]).reshape(-1, N)
        self.radii = np.repeat(r, len(wd))
        self.weights = np.outer(wr, wd).ravel()

    def __len__(self):
        return len(self.weights)

    def refined(self):
        """Same support with n_r and n_theta doubled."""
        return FiberQuadrature(self.N, self.R_supp, 2 * self.n_r, 2 * self.n_theta)

    def __repr__(self):
        return (
            f"FiberQuadrature(N={self.N}, R_supp={self.R_supp:.4g}, "
            f"n_r={self.n_r}, n_theta={self.n_theta})"
        )
