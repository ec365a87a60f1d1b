"""
Exact hyperbolic geometry on the Poincare ball and the upper half-space.

Coordinates are Euclidean chart coordinates. A tangent vector stores the
chart components of the vector at its base point, so its hyperbolic length
is ``lambda(x) * |fiber|`` in the ball and ``|fiber| / x_N`` in the
half-space, with ``lambda(x) = 2 / (1 - |x|^2)``.

All array-level helpers broadcast over leading axes: points have shape
``(..., N)``.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

# below this argument sinh(r)/r and friends switch to their Taylor series
SERIES_CUTOFF = 1e-6
# horizontal offsets below this are treated as vertical half-space geodesics
VERTICAL_CUTOFF = 1e-12


class GeometryError(ValueError):
    """Raised for points outside the model domain or undefined directions."""


class Model(Enum):
    BALL = "ball"
    HALFSPACE = "halfspace"


def _as_array(coords):
    arr = np.asarray(coords, dtype=float)
    if arr.ndim == 0:
        raise GeometryError("coordinates must have at least one axis")
    return arr


@dataclass(frozen=True, eq=False)
class Point:
    """A point (or a batch of points) in one of the two models."""

    model: Model
    coords: np.ndarray

    def __post_init__(self):
        coords = _as_array(self.coords)
        object.__setattr__(self, "coords", coords)
        if not np.all(np.isfinite(coords)):
            raise GeometryError("non-finite coordinates")
        if self.model is Model.BALL:
            if np.any(np.sum(coords**2, axis=-1) >= 1.0):
                raise GeometryError("ball point must satisfy |x| < 1")
        elif np.any(coords[..., -1] <= 0.0):
            raise GeometryError("half-space point must satisfy x_N > 0")

    @property
    def dim(self):
        return self.coords.shape[-1]

    @classmethod
    def ball(cls, coords):
        return cls(Model.BALL, coords)

    @classmethod
    def halfspace(cls, coords):
        return cls(Model.HALFSPACE, coords)


@dataclass(frozen=True, eq=False)
class TangentVector:
    """Chart components ``fiber`` of a tangent vector at ``base``."""

    base: Point
    fiber: np.ndarray

    def __post_init__(self):
        fiber = _as_array(self.fiber)
        if fiber.shape[-1] != self.base.dim:
            raise GeometryError("fiber dimension does not match base point")
        object.__setattr__(self, "fiber", fiber)

    @property
    def norm(self):
        """Hyperbolic length."""
        return tangent_norm(self.base, self.fiber)


@dataclass(frozen=True, eq=False)
class BoundaryPoint:
    """A point on the sphere at infinity, stored as a unit vector of the ball."""

    direction: np.ndarray

    def __post_init__(self):
        d = _as_array(self.direction)
        if not np.allclose(np.linalg.norm(d, axis=-1), 1.0, atol=1e-9):
            raise GeometryError("boundary direction must be a unit vector")
        object.__setattr__(self, "direction", d)


# ---------------------------------------------------------------------------
# small helpers


def _dot(a, b):
    return np.sum(a * b, axis=-1)


def _norm(a):
    return np.sqrt(_dot(a, a))


def sinhc(r):
    """sinh(r)/r with the series branch near zero."""
    r = np.asarray(r, dtype=float)
    small = np.abs(r) < SERIES_CUTOFF
    safe = np.where(small, 1.0, r)
    return np.where(small, 1.0 + r * r / 6.0, np.sinh(safe) / safe)


def tanhc(r):
    """tanh(r)/r with the series branch near zero."""
    r = np.asarray(r, dtype=float)
    small = np.abs(r) < SERIES_CUTOFF
    safe = np.where(small, 1.0, r)
    return np.where(small, 1.0 - r * r / 3.0, np.tanh(safe) / safe)


def artanhc(r):
    """artanh(r)/r with the series branch near zero."""
    r = np.asarray(r, dtype=float)
    small = np.abs(r) < SERIES_CUTOFF
    safe = np.where(small, 0.5, r)
    return np.where(small, 1.0 + r * r / 3.0, np.arctanh(safe) / safe)


def conformal_factor(x):
    """lambda(x) = 2 / (1 - |x|^2) for ball coordinates."""
    x = np.asarray(x, dtype=float)
    return 2.0 / (1.0 - _dot(x, x))


def tangent_norm(base, fiber):
    fiber = np.asarray(fiber, dtype=float)
    if base.model is Model.BALL:
        return conformal_factor(base.coords) * _norm(fiber)
    return _norm(fiber) / base.coords[..., -1]


def jacobian_rho(r, N):
    """Volume distortion (sinh r / r)^(N-1) of the exponential map."""
    if N < 1:
        raise GeometryError("dimension must be at least 1")
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise GeometryError("rho is defined for r >= 0")
    return sinhc(r) ** (N - 1)


# ---------------------------------------------------------------------------
# ball model: Moebius gyrovector formulas


def mobius_add(x, y):
    """Moebius addition x (+) y in the unit ball."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xy = _dot(x, y)[..., None]
    x2 = _dot(x, x)[..., None]
    y2 = _dot(y, y)[..., None]
    num = (1.0 + 2.0 * xy + y2) * x + (1.0 - x2) * y
    return num / (1.0 + 2.0 * xy + x2 * y2)


def gyration(a, b, c):
    """gyr[a, b] c, the rotation relating a (+) (b (+) c) and (a (+) b) (+) c."""
    ab = _dot(a, b)[..., None]
    ac = _dot(a, c)[..., None]
    bc = _dot(b, c)[..., None]
    a2 = _dot(a, a)[..., None]
    b2 = _dot(b, b)[..., None]
    alpha = -ac * b2 + bc + 2.0 * ab * bc
    beta = -bc * a2 - ac
    d = 1.0 + 2.0 * ab + a2 * b2
    return c + 2.0 * (alpha * a + beta * b) / d


def ball_distance(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    gx = 1.0 - _dot(x, x)
    gy = 1.0 - _dot(y, y)
    return 2.0 * np.arcsinh(_norm(x - y) / np.sqrt(gx * gy))


def ball_exp(x, v):
    """exp_x(v) with v given by its chart components at x."""
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    half = 0.5 * conformal_factor(x) * _norm(v)
    # tanh(half) * v / |v| written so that v = 0 is harmless
    step = (0.5 * conformal_factor(x) * tanhc(half))[..., None] * v
    return mobius_add(x, step)


def ball_log(x, y):
    """Chart components at x of the vector whose exponential is y."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    u = mobius_add(-x, y)
    s = _norm(u)
    scale = 2.0 / conformal_factor(x) * artanhc(s)
    return scale[..., None] * u


def ball_transport(x, y, v):
    """Parallel transport of v from x to y along the joining geodesic."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    ratio = conformal_factor(x) / conformal_factor(y)
    return ratio[..., None] * gyration(y, -x, v)


def ball_flow(x, v, t):
    """Geodesic flow: position and velocity after time t."""
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    t = np.asarray(t, dtype=float)[..., None]
    pos = ball_exp(x, t * v)
    return pos, ball_transport(x, pos, v)


def ball_endpoints(x, v):
    """(sigma_minus, sigma_plus) on the unit sphere for the geodesic (x, v)."""
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    n = _norm(v)
    if np.any(n == 0.0):
        raise GeometryError("boundary endpoints need a non-zero direction")
    unit = v / n[..., None]
    plus = mobius_add(x, unit)
    minus = mobius_add(x, -unit)
    # renormalise away rounding so the results sit exactly on the sphere
    plus = plus / _norm(plus)[..., None]
    minus = minus / _norm(minus)[..., None]
    return minus, plus


def forward_endpoint(x, v):
    """sigma_plus only; cheaper when the kernel ignores sigma_minus."""
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    unit = v / _norm(v)[..., None]
    plus = mobius_add(x, unit)
    return plus / _norm(plus)[..., None]


# ---------------------------------------------------------------------------
# half-space model


def halfspace_distance(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return 2.0 * np.arcsinh(_norm(x - y) / (2.0 * np.sqrt(x[..., -1] * y[..., -1])))


def shift_jacobian_CV(V):
    """Determinant of y -> exp_y(y_N V); V in hyperbolic units at height 1."""
    V = np.asarray(V, dtype=float)
    s = _norm(V)
    safe = np.where(s == 0.0, 1.0, s)
    sin_t = np.where(s == 0.0, 0.0, V[..., -1] / safe)
    cos2 = 1.0 - sin_t**2
    ch = np.cosh(s)
    num = ch + sin_t * np.sinh(s)
    return num / (cos2 * ch * ch + sin_t**2)


def shift_map(V, y):
    """The map y -> exp_y(y_N V) in closed form."""
    V = np.asarray(V, dtype=float)
    y = np.asarray(y, dtype=float)
    s = _norm(V)
    C = shift_jacobian_CV(V)
    horiz = (y[..., -1] * sinhc(s) * C)[..., None] * V[..., :-1]
    out = np.empty(np.broadcast_shapes(V.shape, y.shape))
    out[..., :-1] = y[..., :-1] + horiz
    out[..., -1] = y[..., -1] * C
    return out


def halfspace_exp(y, w):
    y = np.asarray(y, dtype=float)
    w = np.asarray(w, dtype=float)
    return shift_map(w / y[..., -1:], y)


def halfspace_log(y, z):
    """Chart components at y of the vector reaching z, from vertical lines
    and semicircles orthogonal to the boundary."""
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    y, z = np.broadcast_arrays(y, z)
    d = halfspace_distance(y, z)
    dh = z[..., :-1] - y[..., :-1]
    gap = _norm(dh)
    vertical = gap < VERTICAL_CUTOFF * np.maximum(1.0, y[..., -1])
    gap_safe = np.where(vertical, 1.0, gap)
    u = dh / gap_safe[..., None]
    yn, zn = y[..., -1], z[..., -1]
    # signed offset of the circle centre from y' along u
    s = (gap**2 + zn**2 - yn**2) / (2.0 * gap_safe)
    R = np.sqrt(s * s + yn * yn)
    direction = np.empty_like(y)
    direction[..., :-1] = (yn / R)[..., None] * u
    direction[..., -1] = s / R
    vert_dir = np.zeros_like(y)
    vert_dir[..., -1] = np.sign(zn - yn)
    direction = np.where(vertical[..., None], vert_dir, direction)
    return (d * yn)[..., None] * direction


def halfspace_endpoints_raw(y, w):
    """Boundary endpoints in the half-space: arrays (x', 0) or None for the
    point at infinity, returned as ball-sphere unit vectors."""
    y = np.asarray(y, dtype=float)
    w = np.asarray(w, dtype=float)
    n = _norm(w)
    if np.any(n == 0.0):
        raise GeometryError("boundary endpoints need a non-zero direction")
    tau = w / n[..., None]
    a = _norm(tau[..., :-1])
    b = tau[..., -1]
    vertical = a < VERTICAL_CUTOFF
    a_safe = np.where(vertical, 1.0, a)
    u = tau[..., :-1] / a_safe[..., None]
    yn = y[..., -1]
    # feet at y' + yn (b +- 1) / a u; b +- 1 via a^2 avoids cancellation
    a2 = np.sum(tau[..., :-1] ** 2, axis=-1)
    b_plus = np.where(b >= 0, 1.0 + b, a2 / np.maximum(1.0 - b, 1.0))
    b_minus = np.where(b <= 0, b - 1.0, -a2 / np.maximum(1.0 + b, 1.0))
    plus_h = y[..., :-1] + (yn * b_plus / a_safe)[..., None] * u
    minus_h = y[..., :-1] + (yn * b_minus / a_safe)[..., None] * u
    plus = boundary_to_ball(plus_h)
    minus = boundary_to_ball(minus_h)
    # vertical lines: one end at infinity (north pole), the other at (y', 0)
    north = np.zeros_like(y)
    north[..., -1] = 1.0
    foot = boundary_to_ball(y[..., :-1])
    up = (b > 0)[..., None]
    vert = vertical[..., None]
    plus = np.where(vert, np.where(up, north, foot), plus)
    minus = np.where(vert, np.where(up, foot, north), minus)
    return minus, plus


# ---------------------------------------------------------------------------
# Cayley transform between the models


def halfspace_to_ball(x):
    x = np.asarray(x, dtype=float)
    D = _dot(x, x) + 2.0 * x[..., -1] + 1.0
    out = np.empty_like(x)
    out[..., :-1] = 2.0 * x[..., :-1] / D[..., None]
    out[..., -1] = (_dot(x, x) - 1.0) / D
    return out


def ball_to_halfspace(b):
    b = np.asarray(b, dtype=float)
    E = _dot(b, b) - 2.0 * b[..., -1] + 1.0
    out = np.empty_like(b)
    out[..., :-1] = 2.0 * b[..., :-1] / E[..., None]
    out[..., -1] = (1.0 - _dot(b, b)) / E
    return out


def halfspace_to_ball_tangent(x, v):
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    D = _dot(x, x) + 2.0 * x[..., -1] + 1.0
    dD = 2.0 * _dot(x, v) + 2.0 * v[..., -1]
    num = np.empty(np.broadcast_shapes(x.shape, v.shape))
    num[..., :-1] = 2.0 * x[..., :-1]
    num[..., -1] = _dot(x, x) - 1.0
    dnum = np.empty_like(num)
    dnum[..., :-1] = 2.0 * v[..., :-1]
    dnum[..., -1] = 2.0 * _dot(x, v)
    return dnum / D[..., None] - num * (dD / D**2)[..., None]


def ball_to_halfspace_tangent(b, w):
    b = np.asarray(b, dtype=float)
    w = np.asarray(w, dtype=float)
    E = _dot(b, b) - 2.0 * b[..., -1] + 1.0
    dE = 2.0 * _dot(b, w) - 2.0 * w[..., -1]
    num = np.empty(np.broadcast_shapes(b.shape, w.shape))
    num[..., :-1] = 2.0 * b[..., :-1]
    num[..., -1] = 1.0 - _dot(b, b)
    dnum = np.empty_like(num)
    dnum[..., :-1] = 2.0 * w[..., :-1]
    dnum[..., -1] = -2.0 * _dot(b, w)
    return dnum / E[..., None] - num * (dE / E**2)[..., None]


def boundary_to_ball(xh):
    """Boundary extension of the Cayley map: (x', 0) -> unit sphere."""
    xh = np.asarray(xh, dtype=float)
    r2 = _dot(xh, xh)
    out = np.empty(xh.shape[:-1] + (xh.shape[-1] + 1,))
    out[..., :-1] = 2.0 * xh / (1.0 + r2)[..., None]
    out[..., -1] = (r2 - 1.0) / (1.0 + r2)
    return out


# ---------------------------------------------------------------------------
# model-tagged API


def _ball_coords(p):
    return p.coords if p.model is Model.BALL else halfspace_to_ball(p.coords)


def to_ball(p):
    return p if p.model is Model.BALL else cayley(p)


def to_ball_tangent(w):
    return w if w.base.model is Model.BALL else cayley_tangent(w)


def cayley(p):
    """Map a point to the other model."""
    if p.model is Model.HALFSPACE:
        return Point(Model.BALL, halfspace_to_ball(p.coords))
    return Point(Model.HALFSPACE, ball_to_halfspace(p.coords))


def cayley_tangent(w):
    """Push a tangent vector forward to the other model."""
    b = w.base
    if b.model is Model.HALFSPACE:
        return TangentVector(cayley(b), halfspace_to_ball_tangent(b.coords, w.fiber))
    return TangentVector(cayley(b), ball_to_halfspace_tangent(b.coords, w.fiber))


def _same_model(x, y):
    if x.model is not y.model:
        raise GeometryError("points live in different models; convert first")


def distance(x, y):
    _same_model(x, y)
    if x.model is Model.BALL:
        return ball_distance(x.coords, y.coords)
    return halfspace_distance(x.coords, y.coords)


def exp_map(w):
    b = w.base
    if b.model is Model.BALL:
        return Point(Model.BALL, ball_exp(b.coords, w.fiber))
    return Point(Model.HALFSPACE, halfspace_exp(b.coords, w.fiber))


def log_map(x, y):
    _same_model(x, y)
    if x.model is Model.BALL:
        return TangentVector(x, ball_log(x.coords, y.coords))
    return TangentVector(x, halfspace_log(x.coords, y.coords))


def geodesic_flow(w, t):
    """Phi_t(x, V) = (gamma(t), gamma'(t)) in the model of the input."""
    wb = to_ball_tangent(w)
    pos, vel = ball_flow(wb.base.coords, wb.fiber, t)
    out = TangentVector(Point(Model.BALL, pos), vel)
    if w.base.model is Model.HALFSPACE:
        out = cayley_tangent(out)
    return out


def boundary_endpoints(w):
    """(sigma_minus, sigma_plus) as BoundaryPoints on the ball sphere."""
    b = w.base
    if b.model is Model.BALL:
        minus, plus = ball_endpoints(b.coords, w.fiber)
    else:
        minus, plus = halfspace_endpoints_raw(b.coords, w.fiber)
    return BoundaryPoint(minus), BoundaryPoint(plus)


def parallel_transport(x, y, v):
    """Transport the vector v (at x) to y along the geodesic x -> y."""
    _same_model(x, y)
    if x.model is Model.BALL:
        return TangentVector(y, ball_transport(x.coords, y.coords, v.fiber))
    xb, yb = cayley(x), cayley(y)
    vb = halfspace_to_ball_tangent(x.coords, v.fiber)
    moved = ball_transport(xb.coords, yb.coords, vb)
    return TangentVector(y, ball_to_halfspace_tangent(yb.coords, moved))
