"""
Reference solvers for the local limit problems.

``transport_exact`` follows characteristics backwards with RK4 and carries
the log of the density factor along; ``evolve_local_convdiff`` is a
conservative finite-difference scheme in ball coordinates with centred
diffusion fluxes and a local Lax-Friedrichs convective flux.

Vector fields are VectorFieldSampler objects returning ball-chart components.
"""

from dataclasses import dataclass

import numpy as np

from . import hypgeom as hg
from .field import FieldConfigError, ScalarField, Trajectory, sample_values
from .kernels import Nonlinearity

DIV_STEP = 1e-4
CFL_SAFETY = 0.4


class DomainError(ValueError):
    pass


class CFLError(ValueError):
    pass


def _coords(p):
    return hg.to_ball(p).coords if isinstance(p, hg.Point) else np.asarray(p, dtype=float)


def _flux_density(X, x):
    """lambda^N X_e, whose Euclidean divergence gives lambda^N div X."""
    lam = hg.conformal_factor(x)
    return lam[..., None] ** x.shape[-1] * X(x)


def div_X(X, p, step=DIV_STEP):
    """Riemannian divergence lambda^-N div_e(lambda^N X_e) by central differences."""
    x = np.atleast_2d(_coords(p))
    N = x.shape[-1]
    if np.any(np.sqrt(np.sum(x * x, axis=-1)) + 2 * step >= 1.0):
        raise DomainError("divergence stencil leaves the ball")
    total = np.zeros(x.shape[:-1])
    for l in range(N):
        e = np.zeros(N)
        e[l] = step
        total += (_flux_density(X, x + e)[..., l] - _flux_density(X, x - e)[..., l]) / (2 * step)
    out = total / hg.conformal_factor(x) ** N
    return out if np.ndim(_coords(p)) > 1 else out[0]


@dataclass
class CharacteristicState:
    """End point of a characteristic and the accumulated -int div X."""

    position: hg.Point
    log_density: np.ndarray
    exited: np.ndarray

    @property
    def density(self):
        return np.where(self.exited, 0.0, np.exp(self.log_density))


def _rk4_flow(X, x, t, n_steps, r_limit):
    """Integrate dx/ds = sign(t) X(x), dl/ds = -div X(x) for s in [0, |t|]."""
    sign = 1.0 if t >= 0 else -1.0
    h = abs(t) / n_steps
    x = np.array(x, dtype=float, copy=True)
    ell = np.zeros(x.shape[:-1])
    exited = np.zeros(x.shape[:-1], dtype=bool)

    def rhs(y):
        inside = np.sqrt(np.sum(y * y, axis=-1)) + 2 * DIV_STEP < 1.0
        y_safe = np.where(inside[..., None], y, 0.0)
        vel = np.where(inside[..., None], sign * X(y_safe), 0.0)
        div = np.where(inside, div_X(X, y_safe), 0.0)
        return vel, -div, inside

    for _ in range(n_steps):
        k1, l1, in1 = rhs(x)
        k2, l2, in2 = rhs(x + 0.5 * h * k1)
        k3, l3, in3 = rhs(x + 0.5 * h * k2)
        k4, l4, in4 = rhs(x + h * k3)
        x = x + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        ell = ell + h / 6 * (l1 + 2 * l2 + 2 * l3 + l4)
        exited |= ~(in1 & in2 & in3 & in4)
        exited |= np.sum(x * x, axis=-1) > r_limit**2
    return x, ell, exited


def flow_X(X, p, t, dt=None, r_limit=None):
    """Phi^X_t(p) with the log-density -int_0^|t| div X along the path.

    ``dt`` is the RK4 sub-step (|t| is split into equal steps no longer
    than dt); points whose path leaves |x| <= r_limit are flagged.
    """
    x = _coords(p)
    if r_limit is None:
        r_limit = 1.0 - 4 * DIV_STEP
    if dt is None:
        dt = 0.01
    n = max(1, int(np.ceil(abs(t) / dt - 1e-12))) if t != 0 else 0
    if n == 0:
        ell = np.zeros(x.shape[:-1])
        return CharacteristicState(hg.Point.ball(x), ell, np.zeros(x.shape[:-1], dtype=bool))
    pos, ell, exited = _rk4_flow(X, x, t, n, r_limit)
    safe = np.where(exited[..., None], 0.0, pos)
    return CharacteristicState(hg.Point.ball(safe), ell, exited)


def transport_exact(u0, X, t, grid=None, dt=None):
    """u(t, x) = exp(-int_0^t div X(Phi_-s x) ds) u0(Phi_-t x) at grid nodes.

    ``u0`` is a ScalarField (sampled multilinearly) or a callable on ball
    coordinates, in which case ``grid`` gives the nodes.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    if isinstance(u0, ScalarField):
        grid = u0.grid
        evaluate = lambda y: sample_values(grid, u0.values, y)
    else:
        if grid is None:
            raise ValueError("a grid is needed for a callable initial datum")
        evaluate = u0
    if t == 0:
        return ScalarField(grid, evaluate(grid.points))
    state = flow_X(X, grid.points, -t, dt, r_limit=grid.r_max)
    vals = evaluate(state.position.coords) * state.density
    return ScalarField(grid, np.where(state.exited, 0.0, vals))


def transport_trajectory(u0, X, times, grid=None, dt=None):
    """transport_exact at increasing times from a single backward sweep.

    Phi_-t(x) for the save times all lie on one backward characteristic, so
    each interval between save times is integrated once with RK4 sub-steps
    no longer than dt.
    """
    times = np.asarray(times, dtype=float)
    if np.any(np.diff(times) < 0) or (len(times) and times[0] < 0):
        raise ValueError("times must be non-negative and increasing")
    if isinstance(u0, ScalarField):
        grid = u0.grid
        evaluate = lambda y: sample_values(grid, u0.values, y)
    else:
        if grid is None:
            raise ValueError("a grid is needed for a callable initial datum")
        evaluate = u0
    dt = dt or 0.01
    x = grid.points.copy()
    ell = np.zeros(len(grid))
    exited = np.zeros(len(grid), dtype=bool)
    t = 0.0
    frames = []
    for t_next in times:
        span = t_next - t
        if span > 0:
            n = max(1, int(np.ceil(span / dt - 1e-12)))
            x, d_ell, out = _rk4_flow(X, x, -span, n, grid.r_max)
            ell += d_ell
            exited |= out
            x = np.where(exited[:, None], 0.0, x)
        t = t_next
        vals = evaluate(x) * np.exp(ell)
        frames.append(np.where(exited, 0.0, vals))
    return Trajectory(grid, times, np.stack(frames))


# ---------------------------------------------------------------------------
# finite differences


class _Faces:
    """Lattice faces of a Grid, with -1 marking a neighbour outside r_max."""

    def __init__(self, grid, X):
        N, h = grid.N, grid.h
        self.grid = grid
        left, right, axis = [], [], []
        side = 2 * grid.m + 1
        for l in range(N):
            e = np.zeros(N, dtype=np.int64)
            e[l] = 1
            for sgn in (1, -1):
                nb = grid.lattice + grid.m + sgn * e
                ok = np.all((nb >= 0) & (nb < side), axis=1)
                j = np.full(len(grid), -1, dtype=np.int64)
                j[ok] = grid.index[tuple(nb[ok].T)]
                if sgn == 1:
                    # every face toward +e_l whose left cell is a node
                    left.append(np.arange(len(grid)))
                    right.append(j)
                else:
                    # faces whose left cell is outside
                    missing = np.nonzero(j < 0)[0]
                    left.append(np.full(len(missing), -1, dtype=np.int64))
                    right.append(missing)
                axis.append(np.full(len(left[-1]), l))
        self.left = np.concatenate(left)
        self.right = np.concatenate(right)
        self.axis = np.concatenate(axis)
        anchor = np.where(self.left >= 0, self.left, self.right)
        mid = grid.points[anchor].copy()
        shift = np.where(self.left >= 0, 0.5 * h, -0.5 * h)
        mid[np.arange(len(mid)), self.axis] += shift
        self.mid = mid
        lam_f = hg.conformal_factor(mid)
        self.diff_coef = lam_f ** (N - 2) / h
        Xf = X(mid)[np.arange(len(mid)), self.axis]
        self.conv_coef = lam_f**N * Xf
        self.cell = grid.lam**N * h  # lambda_i^N h, the control volume per unit face

    def ghosted(self, u):
        ul = np.where(self.left >= 0, u[np.maximum(self.left, 0)], 0.0)
        ur = np.where(self.right >= 0, u[np.maximum(self.right, 0)], 0.0)
        return ul, ur

    def divergence(self, flux):
        """sum over faces (F_{i+1/2} - F_{i-1/2}) / (lambda_i^N h)."""
        n = len(self.grid)
        out = np.zeros(n)
        m = self.left >= 0
        np.add.at(out, self.left[m], flux[m])
        m = self.right >= 0
        np.add.at(out, self.right[m], -flux[m])
        return out / self.cell


def local_rhs(faces, u, A, f):
    ul, ur = faces.ghosted(u)
    flux = np.zeros(len(ul))
    if A:
        flux -= A * faces.diff_coef * (ur - ul)
    if np.any(faces.conv_coef):
        speed = np.abs(faces.conv_coef) * np.maximum(f.derivative(ul), f.derivative(ur))
        flux += 0.5 * faces.conv_coef * (f(ul) + f(ur)) - 0.5 * speed * (ur - ul)
    return -faces.divergence(flux)


def local_cfl(grid, A, X, f, u_bound, faces=None):
    """CFL_SAFETY * min(h^2 / (4 A max lambda^-2), h / max lambda |f'(u)| |X|)."""
    h = grid.h
    bounds = []
    if A > 0:
        bounds.append(h * h / (4 * A * np.max(grid.lam ** -2.0)))
    Xn = X(grid.points)
    speed = np.max(grid.lam * np.sqrt(np.sum(Xn * Xn, axis=-1))) * f.derivative(u_bound)
    if speed > 0:
        bounds.append(h / speed)
    if not bounds:
        return np.inf
    dt = CFL_SAFETY * min(bounds)
    if faces is not None:
        # the Euler-monotone limit of the actual stencil
        diag = np.zeros(len(grid))
        w = A * faces.diff_coef + np.abs(faces.conv_coef) * f.derivative(u_bound)
        m = faces.left >= 0
        np.add.at(diag, faces.left[m], w[m])
        m = faces.right >= 0
        np.add.at(diag, faces.right[m], w[m])
        diag /= faces.cell
        if diag.max() > 0:
            dt = min(dt, 0.9 / diag.max())
    return dt


def evolve_local_convdiff(u0, A, X, f=None, T=0.5, save_every=None, dt=None):
    """du/dt = A lambda^-N div(lambda^(N-2) grad u) - lambda^-N div(lambda^N f(u) X).

    RK2 (Heun) with zero values outside r_max. Returns a Trajectory at
    multiples of ``save_every`` (default T/10) and T.
    """
    f = f or Nonlinearity(1.0)
    grid = u0.grid
    if A < 0:
        raise FieldConfigError("diffusivity must be non-negative")
    faces = _Faces(grid, X)
    u_bound = max(float(np.max(np.abs(u0.values))), 1e-300)
    dt_max = local_cfl(grid, A, X, f, u_bound, faces)
    if dt is not None and dt > dt_max:
        raise CFLError(f"dt={dt:.3e} exceeds the stable step {dt_max:.3e}")
    dt = dt or dt_max
    save_every = save_every or T / 10
    n_saves = int(np.ceil(T / save_every - 1e-9)) if T > 0 else 0
    save_times = np.minimum(np.arange(1, n_saves + 1) * save_every, T)
    if n_saves:
        save_times[-1] = T
    u = u0.values.copy()
    t = 0.0
    times, frames = [0.0], [u.copy()]
    for t_save in save_times:
        span = t_save - t
        n = max(1, int(np.ceil(span / dt - 1e-12)))
        k = span / n
        for _ in range(n):
            k1 = local_rhs(faces, u, A, f)
            u1 = u + k * k1
            u = 0.5 * (u + u1 + k * local_rhs(faces, u1, A, f))
        t = float(t_save)
        times.append(t)
        frames.append(u.copy())
    return Trajectory(grid, np.array(times), np.stack(frames))
