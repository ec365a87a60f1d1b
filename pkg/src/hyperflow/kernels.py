"""
Diffusion kernels J, flow-invariant convection kernels and their moments.

A convection kernel has the separated form ``g1(sigma-, sigma+) * xi(|V|)``
where sigma-/sigma+ are the endpoints at infinity of the geodesic through
(x, V). Because it only depends on the geodesic and on |V|, it is constant
along orbits of the geodesic flow.

Fiber integrals use Lebesgue measure in orthonormal coordinates of the
tangent space.
"""

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import integrate

from . import hypgeom as hg
from .quadrature import sphere_rule, sphere_volume

# tail of a radial moment integrand that we are willing to drop
TAIL_TOL = 1e-14
MOMENT_RTOL = 1e-12


class MomentError(ValueError):
    """A kernel moment required by the theory is infinite."""


class KernelConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# radial shapes


@dataclass(frozen=True)
class Indicator:
    R: float = 1.0
    name = "indicator"

    def __call__(self, r):
        return np.where(np.asarray(r, dtype=float) <= self.R, 1.0, 0.0)

    @property
    def support(self):
        return self.R

    def decay_rate(self):
        return np.inf


@dataclass(frozen=True)
class Gaussian:
    """exp(-(r/s)^2)."""

    s: float = 1.0
    name = "gaussian"

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        return np.exp(-((r / self.s) ** 2))

    def log(self, r):
        return -((np.asarray(r, dtype=float) / self.s) ** 2)

    @property
    def support(self):
        return np.inf

    def decay_rate(self):
        return np.inf


@dataclass(frozen=True)
class SmoothBump:
    """exp(1 - 1/(1 - (r/R)^2)) on r < R, so J(0) = 1."""

    R: float = 1.0
    name = "smooth_bump"

    def __call__(self, r):
        s = np.asarray(r, dtype=float) / self.R
        inside = s < 1.0
        s2 = np.where(inside, s * s, 0.0)
        return np.where(inside, np.exp(1.0 - 1.0 / (1.0 - s2)), 0.0)

    @property
    def support(self):
        return self.R

    def decay_rate(self):
        return np.inf


@dataclass(frozen=True)
class Exponential:
    """exp(-r/s). Heavy enough to break the moment hypotheses for small
    decay; kept mostly as a negative case for the validators."""

    s: float = 1.0
    name = "exponential"

    def __call__(self, r):
        return np.exp(-np.asarray(r, dtype=float) / self.s)

    def log(self, r):
        return -np.asarray(r, dtype=float) / self.s

    @property
    def support(self):
        return np.inf

    def decay_rate(self):
        return 1.0 / self.s


@dataclass(frozen=True)
class Zero:
    name = "zero"

    def __call__(self, r):
        return np.zeros_like(np.asarray(r, dtype=float))

    @property
    def support(self):
        return 0.0

    def decay_rate(self):
        return np.inf


RadialKernel = Indicator | Gaussian | SmoothBump | Exponential | Zero

_SHAPES = {
    "indicator": (Indicator, "R"),
    "gaussian": (Gaussian, "s"),
    "smooth_bump": (SmoothBump, "R"),
    "exponential": (Exponential, "s"),
    "zero": (Zero, None),
}


def radial_from_dict(spec):
    if spec is None:
        return Zero()
    try:
        cls, param = _SHAPES[spec["shape"]]
    except KeyError:
        raise KernelConfigError(f"unknown radial shape in {spec!r}") from None
    if param is None:
        return cls()
    value = float(spec.get(param, 1.0))
    if value <= 0:
        raise KernelConfigError(f"{spec['shape']} needs {param} > 0")
    return cls(value)


def radial_to_dict(J):
    _, param = _SHAPES[J.name]
    out = {"shape": J.name}
    if param is not None:
        out[param] = getattr(J, param)
    return out


# ---------------------------------------------------------------------------
# boundary factors g1


@dataclass(frozen=True)
class Constant:
    c: float = 1.0

    def __post_init__(self):
        if self.c < 0:
            raise KernelConfigError("g1 must be non-negative")

    def __call__(self, sigma_minus, sigma_plus):
        return np.full(np.shape(sigma_plus)[:-1], float(self.c))

    @property
    def sup(self):
        return float(self.c)

    uses_endpoints = False


@dataclass(frozen=True)
class AffineBoundary:
    """g1 = c + a . sigma_plus, non-negative when |a| <= c."""

    c: float = 1.0
    a: tuple = (0.5, 0.0)

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(float(v) for v in self.a))
        if np.linalg.norm(self.a) > self.c * (1 + 1e-14):
            raise KernelConfigError("affine g1 needs |a| <= c to stay non-negative")

    def __call__(self, sigma_minus, sigma_plus):
        a = np.asarray(self.a)
        if sigma_plus.shape[-1] != len(a):
            raise KernelConfigError("dimension of a does not match the space")
        return self.c + sigma_plus @ a

    @property
    def sup(self):
        return float(self.c + np.linalg.norm(self.a))

    uses_endpoints = True


@dataclass(frozen=True)
class ConvectionKernel:
    g1: Constant | AffineBoundary = field(default_factory=Constant)
    xi: RadialKernel = field(default_factory=Gaussian)

    def k_bound(self, r):
        """Radial majorant ||g1||_inf * xi(r)."""
        return self.g1.sup * self.xi(r)


def convection_from_dict(spec, N=2):
    if spec is None:
        return None
    g = spec.get("g1", {"type": "constant", "c": 1.0})
    kind = g.get("type", "constant")
    if kind == "constant":
        g1 = Constant(float(g.get("c", 1.0)))
    elif kind == "affine":
        a = g.get("a", [0.0] * N)
        if len(a) != N:
            raise KernelConfigError("affine g1 vector has the wrong dimension")
        g1 = AffineBoundary(float(g.get("c", 1.0)), tuple(a))
    else:
        raise KernelConfigError(f"unknown g1 type {kind!r}")
    return ConvectionKernel(g1, radial_from_dict(spec.get("xi", {"shape": "gaussian"})))


def convection_to_dict(K):
    if K is None:
        return None
    if isinstance(K.g1, Constant):
        g = {"type": "constant", "c": K.g1.c}
    else:
        g = {"type": "affine", "c": K.g1.c, "a": list(K.g1.a)}
    return {"g1": g, "xi": radial_to_dict(K.xi)}


@dataclass(frozen=True)
class Nonlinearity:
    """f(r) = |r|^(q-1) r."""

    q: float = 1.0

    def __post_init__(self):
        if self.q < 1:
            raise KernelConfigError("q must be >= 1")

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        if self.q == 1:
            return u
        if self.q == 2:
            return np.abs(u) * u
        return np.abs(u) ** (self.q - 1) * u

    def derivative(self, u):
        u = np.asarray(u, dtype=float)
        if self.q == 1:
            return np.ones_like(u)
        return self.q * np.abs(u) ** (self.q - 1)


# ---------------------------------------------------------------------------
# pointwise evaluation


def _check_eps(eps):
    if not eps > 0:
        raise KernelConfigError("eps must be positive")


def eval_J_eps(J, r, eps, N):
    """J_eps(r) = eps^(-N-2) J(r / eps)."""
    _check_eps(eps)
    return eps ** (-N - 2) * J(np.asarray(r, dtype=float) / eps)


def g_tilde_ball(K, x, v):
    """G~ at ball points x with chart vectors v (arrays)."""
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    length = hg.conformal_factor(x) * np.sqrt(np.sum(v * v, axis=-1))
    nonzero = length > 0
    if K.g1.uses_endpoints:
        safe_v = np.where(nonzero[..., None], v, 1.0)
        plus = hg.forward_endpoint(x, safe_v)
        g = K.g1(None, plus)
    else:
        g = K.g1(None, x)
    return np.where(nonzero, g * K.xi(length), 0.0)


def eval_G_tilde(K, w):
    """G~(x, V) for a TangentVector in either model; zero vectors give 0."""
    length = w.norm
    nonzero = length > 0
    if K.g1.uses_endpoints:
        fiber = np.where(nonzero[..., None], w.fiber, 1.0)
        minus, plus = hg.boundary_endpoints(hg.TangentVector(w.base, fiber))
        g = K.g1(minus.direction, plus.direction)
    else:
        g = K.g1(None, w.base.coords)
    return np.where(nonzero, g * K.xi(length), 0.0)


def eval_G_eps(K, x, y, eps, N):
    """G_eps(x, y) = eps^(-N-1) G~(x, V_{x,y} / eps) for x != y."""
    _check_eps(eps)
    v = hg.log_map(x, y)
    scaled = hg.TangentVector(v.base, v.fiber / eps)
    return eps ** (-N - 1) * eval_G_tilde(K, scaled)


# ---------------------------------------------------------------------------
# radial moments


def _growth(N):
    """Exponential growth rate of (e^r sinh r)^(N-1)."""
    return 2.0 * (N - 1)


def _check_tail(J, N, what):
    rate = J.decay_rate()
    if np.isfinite(rate) and rate <= _growth(N):
        raise MomentError(
            f"{what} diverges: tail exp(-{rate:g} r) of {J.name} does not beat "
            f"the volume growth exp({_growth(N):g} r)"
        )


def _log_volume(r, N):
    """log (e^r sinh r)^(N-1), stable for large r."""
    r = np.asarray(r, dtype=float)
    return (N - 1) * (2.0 * r + np.log(-np.expm1(-2.0 * np.maximum(r, 1e-300))) - np.log(2.0))


def _power_weight(p):
    return lambda r: p * np.log(np.maximum(r, 1e-300))


def _mtilde_log_weight(N):
    return lambda r: np.log1p(r * r) + (_log_volume(r, N) if N > 1 else 0.0)


def _mg_log_weight(N):
    return lambda r: np.log1p(r) + (_log_volume(r, N) if N > 1 else 0.0)


def _integrand(J, log_weight):
    if np.isfinite(J.support):
        return lambda r: J(r) * np.exp(log_weight(r))
    return lambda r: np.exp(J.log(r) + log_weight(r))


def tail_radius(J, log_weight, tol=TAIL_TOL):
    """Radius beyond which int J(r) exp(log_weight(r)) dr is below tol."""
    if np.isfinite(J.support):
        return float(J.support)
    f = _integrand(J, log_weight)

    def tail(R):
        # the integrand is negligible long before R + 50 for admissible shapes
        val, _ = integrate.quad(f, R, R + 50.0, limit=400)
        return val

    R = 1.0
    while tail(R) > tol:
        R *= 1.25
        if R > 1e4:
            raise MomentError(f"no finite tail radius for {J.name}")
    lo, hi = R / 1.25, R
    for _ in range(40):
        mid = 0.5 * (lo + hi)
        if tail(mid) > tol:
            lo = mid
        else:
            hi = mid
    return hi


def _radial_integral(J, log_weight, what, growth_dim):
    """int_0^inf J(r) exp(log_weight(r)) dr; growth_dim selects the
    exponential growth used by the divergence check (1 means polynomial)."""
    if isinstance(J, Zero):
        return 0.0
    _check_tail(J, growth_dim, what)
    R = tail_radius(J, log_weight)
    val, _ = integrate.quad(
        _integrand(J, log_weight), 0.0, R, epsabs=0.0, epsrel=MOMENT_RTOL, limit=500
    )
    return val


def moment_AJ(J, N):
    """A_J = (|S^{N-1}| / 2N) int_0^inf J(r) r^(N+1) dr."""
    val = _radial_integral(J, _power_weight(N + 1), "A_J", 1)
    return sphere_volume(N) / (2 * N) * val


def moment_Mtilde_J(J, N):
    val = _radial_integral(J, _mtilde_log_weight(N), "M~(J)", N)
    return sphere_volume(N) * val


def moment_MG(K, N):
    val = _radial_integral(K.xi, _mg_log_weight(N), "M(G~)", N)
    return sphere_volume(N) * K.g1.sup * val


def validate(J, K, N):
    """Check the moment hypotheses before a run; raises MomentError."""
    out = {}
    if J is not None and not isinstance(J, Zero):
        if not J(0.0) > 0:
            raise MomentError("diffusion kernel needs J(0) > 0")
        out["Mtilde_J"] = moment_Mtilde_J(J, N)
        out["A_J"] = moment_AJ(J, N)
    if K is not None:
        out["M_G"] = moment_MG(K, N)
    return out


@lru_cache(maxsize=64)
def _xi_first_radial(xi, N):
    return _radial_integral(xi, _power_weight(N), "first moment", 1)


@lru_cache(maxsize=64)
def fiber_support_radius(J, N, tol=1e-12):
    """R_supp for fiber quadrature: kernel support for compact shapes, else
    where the tail of the full moment integrand drops below tol."""
    if np.isfinite(J.support):
        return float(J.support)
    _check_tail(J, N, "support radius")
    return tail_radius(J, _mtilde_log_weight(N), tol)


# ---------------------------------------------------------------------------
# first moment field and dissipativity


def first_moment_ball(K, x, n_theta=128):
    """X_G at ball points x (shape (..., N)), returned in chart components."""
    x = np.asarray(x, dtype=float)
    N = x.shape[-1]
    if not K.g1.uses_endpoints:
        return np.zeros_like(x)
    radial = _xi_first_radial(K.xi, N)
    dirs, w = sphere_rule(N, n_theta)
    flat = x.reshape(-1, N)
    out = np.empty_like(flat)
    chunk = max(1, 200000 // len(w))
    for a in range(0, len(flat), chunk):
        xs = flat[a : a + chunk, None, :]
        plus = hg.forward_endpoint(xs, np.broadcast_to(dirs, xs.shape[:1] + dirs.shape))
        g = K.g1(None, plus)
        # orthonormal direction tau corresponds to chart vector tau / lambda
        out[a : a + chunk] = -radial * np.einsum("pq,q,qn->pn", g, w, dirs)
    lam = hg.conformal_factor(flat)
    return (out / lam[:, None]).reshape(x.shape)


def first_moment_field(K, x, n_theta=128):
    """X_G(x) = -int G~(x, W) W dW as a TangentVector."""
    xb = hg.to_ball(x)
    X = hg.TangentVector(xb, first_moment_ball(K, xb.coords, n_theta))
    return X if x.model is hg.Model.BALL else hg.cayley_tangent(X)


def dissipativity_residual(K, y, eps, R, n_r=64, n_theta=128, return_total=False):
    """int_{d(x,y) <= R} [G_eps(x,y) - G_eps(y,x)] dmu(x) by fiber quadrature
    at y. The points x = exp_y(W) and the vectors V_{x,y} are computed
    explicitly, so the result exercises the geometry as well."""
    _check_eps(eps)
    yb = np.asarray(hg.to_ball(y).coords, dtype=float)
    N = yb.shape[-1]
    t, wt = np.polynomial.legendre.leggauss(n_r)
    r = 0.5 * R * (t + 1.0)
    wr = 0.5 * R * wt * r ** (N - 1) * hg.jacobian_rho(r, N)
    dirs, wd = sphere_rule(N, n_theta)
    W = (r[:, None, None] * dirs[None]).reshape(-1, N)
    weights = np.outer(wr, wd).ravel()
    lam_y = hg.conformal_factor(yb)
    xs = hg.ball_exp(yb, W / lam_y)
    v_xy = hg.ball_log(xs, yb)
    v_yx = W / lam_y
    scale = eps ** (-N - 1)
    g_in = scale * g_tilde_ball(K, xs, v_xy / eps)
    g_out = scale * g_tilde_ball(K, np.broadcast_to(yb, W.shape), v_yx / eps)
    residual = float(np.sum((g_in - g_out) * weights))
    if return_total:
        return residual, float(np.sum(g_out * weights))
    return residual
