"""
Configuration, epsilon sweeps against the local limit problems, the
self-test suite and report files.
"""

import csv
import io
import json
import os
import time
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import hypgeom as hg
from .field import (
    Grid,
    ScalarField,
    VectorFieldSampler,
    initial_from_dict,
    l2_error_on,
    lp_norm,
    make_initial,
    sample,
    spacetime_l2_error,
)
from .kernels import (
    Nonlinearity,
    convection_from_dict,
    first_moment_ball,
    moment_AJ,
    moment_MG,
    radial_from_dict,
    validate,
)
from .localref import evolve_local_convdiff, transport_trajectory
from .nonlocal_ops import EvolutionMonitors, evolve_nonlocal, get_operator
from .quadrature import FiberQuadrature


class ConfigError(ValueError):
    pass


DEFAULT_J = {"shape": "gaussian", "s": 1.0}
DEFAULT_G = {
    "g1": {"type": "affine", "c": 1.0, "a": [0.5, 0.0]},
    "xi": {"shape": "gaussian", "s": 1.0},
}
DEFAULT_INITIAL = {"kind": "radial_bump", "center": [0.0, 0.0], "width": 1.0, "amplitude": 1.0}


@dataclass
class SimConfig:
    N: int = 2
    r_max: float = 0.95
    h: float = 0.02
    T: float = 0.01
    dt_user: float | None = None
    save_every: float = 0.001
    J: dict | None = field(default_factory=lambda: dict(DEFAULT_J))
    G: dict | None = field(default_factory=lambda: json.loads(json.dumps(DEFAULT_G)))
    q: float = 1.0
    epsilons: list = field(default_factory=lambda: [0.4, 0.2, 0.1])
    initial: dict = field(default_factory=lambda: dict(DEFAULT_INITIAL))
    K_radius: float = 0.5
    n_r: int = 16
    n_theta: int = 32
    R_supp: float | None = None
    seed: int = 0
    out: str = "out"

    def __post_init__(self):
        eps = [float(e) for e in self.epsilons]
        if any(not 0 < e <= 1 for e in eps):
            raise ConfigError("every epsilon must lie in (0, 1]")
        if any(b >= a for a, b in zip(eps, eps[1:])):
            raise ConfigError("epsilons must be strictly decreasing")
        self.epsilons = eps
        if not 0 < self.K_radius < self.r_max:
            raise ConfigError("K_radius must lie in (0, r_max)")
        if self.q < 1:
            raise ConfigError("q must be >= 1")
        if self.T < 0 or self.save_every <= 0:
            raise ConfigError("T must be >= 0 and save_every > 0")

    @classmethod
    def from_dict(cls, d):
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self):
        return asdict(self)

    # derived objects
    def grid(self):
        return Grid(self.N, self.r_max, self.h)

    def kernels(self):
        J = radial_from_dict(self.J) if self.J else None
        K = convection_from_dict(self.G, self.N) if self.G else None
        return J, K

    def nonlinearity(self):
        return Nonlinearity(float(self.q))

    def initial_data(self):
        return initial_from_dict(self.initial, self.N)

    def quadrature(self, kernel):
        from .kernels import fiber_support_radius

        R = self.R_supp or fiber_support_radius(kernel, self.N)
        return FiberQuadrature(self.N, R, self.n_r, self.n_theta)

    def save_times(self):
        n = int(np.ceil(self.T / self.save_every - 1e-9))
        t = np.minimum(np.arange(0, n + 1) * self.save_every, self.T)
        t[-1] = self.T
        return t


REPORT_COLUMNS = ("eps", "err_l2_spacetime", "err_l2_final", "mass_drift", "linf_excess")


@dataclass
class ConvergenceReport:
    kind: str
    config: dict
    rows: list = field(default_factory=list)
    diagnostics: list = field(default_factory=list)
    reference: dict = field(default_factory=dict)
    runtimes: list = field(default_factory=list)
    monitors: dict = field(default_factory=dict)

    @property
    def ratios(self):
        errs = [r["err_l2_spacetime"] for r in self.rows]
        return [b / a if a > 0 else float("nan") for a, b in zip(errs, errs[1:])]

    def errors(self):
        return [r["err_l2_spacetime"] for r in self.rows]

    def to_json_dict(self):
        return {
            "kind": self.kind,
            "columns": list(REPORT_COLUMNS),
            "rows": self.rows,
            "ratios": self.ratios,
            "diagnostics": self.diagnostics,
            "reference": self.reference,
            "config": self.config,
            "note": (
                "errors are strong discrete L2 norms on |x| <= K_radius; for the "
                "transport case this is a stronger observation than weak convergence"
            ),
        }


def _check_moments(J, K, N):
    return validate(J, K, N)


def _run_nonlocal(cfg, J, K, eps, u0):
    f = cfg.nonlinearity()
    quad_J = cfg.quadrature(J) if J is not None else None
    quad_G = cfg.quadrature(K.xi) if K is not None else None
    op = get_operator(u0.grid, J, K, eps, quad_J, quad_G)
    return evolve_nonlocal(
        u0, J, K, f, eps, cfg.T, dt_user=cfg.dt_user, save_every=cfg.save_every,
        quad_J=quad_J, quad_G=quad_G, operator=op,
    )


def _row(eps, traj, ref, mon, K_radius):
    l1 = mon.l1[0] if mon.l1 and mon.l1[0] > 0 else 1.0
    return {
        "eps": eps,
        "err_l2_spacetime": spacetime_l2_error(traj, ref, K_radius),
        "err_l2_final": l2_error_on(traj.final, ref.final, K_radius),
        "mass_drift": mon.mass_drift() / l1,
        "linf_excess": mon.linf_excess(),
    }


def _diagnostics(eps, mon):
    l1 = mon.l1[0] if mon.l1[0] > 0 else 1.0
    l2sq = mon.l2[0] ** 2 if mon.l2[0] > 0 else 1.0
    return {
        "eps": eps,
        "steps": mon.steps,
        "dt": mon.dt,
        "net_mass_drift": mon.net_mass_drift() / l1,
        "leaked_mass": mon.leaked[-1] / l1,
        "boundary_mass_max": max(mon.boundary_mass) / l1,
        "l2_increase_max": mon.l2_increase(),
        "energy_excess": mon.energy_excess(),
        "j_energy_bound": 0.5 * mon.j_energy_cum[-1] / l2sq,
    }


def run_transport_convergence(cfg):
    """Nonlocal convection alone against exact transport along X_G."""
    if cfg.G is None:
        raise ConfigError("transport convergence needs a convection kernel")
    if cfg.q != 1:
        raise ConfigError("transport convergence is linear: q must be 1")
    _, K = cfg.kernels()
    _check_moments(None, K, cfg.N)
    grid = cfg.grid()
    bump = cfg.initial_data()
    u0 = make_initial(bump, grid)
    X = VectorFieldSampler.from_kernel(K, cfg.N)
    times = cfg.save_times()
    dt_ref = cfg.save_every
    ref = transport_trajectory(bump, X, times, grid=grid, dt=dt_ref)
    ref_half = transport_trajectory(bump, X, times, grid=grid, dt=dt_ref / 2)
    report = ConvergenceReport("transport", cfg.to_dict())
    report.reference = {
        "solver": "characteristics",
        "rk4_dt": dt_ref,
        "self_error": spacetime_l2_error(ref, ref_half, cfg.K_radius),
        "X_bound": moment_MG(K, cfg.N),
    }
    for eps in cfg.epsilons:
        t0 = time.perf_counter()
        traj, mon = _run_nonlocal(cfg, None, K, eps, u0)
        report.runtimes.append({"eps": eps, "runtime_sec": time.perf_counter() - t0})
        report.rows.append(_row(eps, traj, ref, mon, cfg.K_radius))
        report.diagnostics.append(_diagnostics(eps, mon))
        report.monitors[eps] = mon
    return report


def _local_reference(cfg, J, K, bump, h):
    grid = Grid(cfg.N, cfg.r_max, h)
    u0 = make_initial(bump, grid)
    A = moment_AJ(J, cfg.N)
    X = VectorFieldSampler.from_kernel(K, cfg.N) if K is not None else VectorFieldSampler.zero()
    return evolve_local_convdiff(u0, A, X, cfg.nonlinearity(), cfg.T, cfg.save_every)


def run_convdiff_convergence(cfg, self_check=True):
    """Nonlocal diffusion plus convection against the local equation."""
    J, K = cfg.kernels()
    if J is None or not J(0.0) > 0:
        raise ConfigError("convection-diffusion needs a kernel J with J(0) > 0")
    _check_moments(J, K, cfg.N)
    grid = cfg.grid()
    bump = cfg.initial_data()
    u0 = make_initial(bump, grid)
    ref_fine = _local_reference(cfg, J, K, bump, cfg.h / 2)
    ref = ref_fine.restricted(grid)
    report = ConvergenceReport("convdiff", cfg.to_dict())
    report.reference = {
        "solver": "finite differences, local Lax-Friedrichs",
        "h_ref": cfg.h / 2,
        "A_J": moment_AJ(J, cfg.N),
    }
    if self_check:
        ref_finer = _local_reference(cfg, J, K, bump, cfg.h / 4).restricted(grid)
        report.reference["self_error"] = spacetime_l2_error(ref, ref_finer, cfg.K_radius)
    for eps in cfg.epsilons:
        t0 = time.perf_counter()
        traj, mon = _run_nonlocal(cfg, J, K, eps, u0)
        report.runtimes.append({"eps": eps, "runtime_sec": time.perf_counter() - t0})
        report.rows.append(_row(eps, traj, ref, mon, cfg.K_radius))
        report.diagnostics.append(_diagnostics(eps, mon))
        report.monitors[eps] = mon
    return report


# ---------------------------------------------------------------------------
# reports


def _fmt(v):
    return repr(float(v))


def report_csv_text(report):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REPORT_COLUMNS)
    for row in report.rows:
        w.writerow([_fmt(row[c]) for c in REPORT_COLUMNS])
    return buf.getvalue()


def report_json_text(report):
    return json.dumps(report.to_json_dict(), indent=2, sort_keys=True) + "\n"


def emit_report(report, out_dir, formats=("csv", "json")):
    """Write report.csv / report.json, monitor tables and runtime.csv.

    Wall-clock times go to runtime.csv so the report files stay byte
    identical across reruns.
    """
    os.makedirs(out_dir, exist_ok=True)
    written = []
    if "csv" in formats:
        path = os.path.join(out_dir, "report.csv")
        with open(path, "w", newline="") as fh:
            fh.write(report_csv_text(report))
        written.append(path)
    if "json" in formats:
        path = os.path.join(out_dir, "report.json")
        with open(path, "w") as fh:
            fh.write(report_json_text(report))
        written.append(path)
    for eps, mon in report.monitors.items():
        path = os.path.join(out_dir, f"monitors_eps_{eps:g}.csv")
        mon.to_csv(path)
        written.append(path)
    if report.runtimes:
        path = os.path.join(out_dir, "runtime.csv")
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["eps", "runtime_sec"])
            for r in report.runtimes:
                w.writerow([_fmt(r["eps"]), f"{r['runtime_sec']:.3f}"])
        written.append(path)
    return written


def load_report(path):
    with open(path) as fh:
        d = json.load(fh)
    return ConvergenceReport(d["kind"], d["config"], d["rows"], d["diagnostics"], d["reference"])


# ---------------------------------------------------------------------------
# self-test


@dataclass
class Check:
    suite: str
    name: str
    deviation: float
    tol: float

    @property
    def passed(self):
        return bool(np.isfinite(self.deviation) and self.deviation <= self.tol)

    def line(self):
        flag = "PASS" if self.passed else "FAIL"
        return f"{flag}  {self.suite:<10} {self.name:<44} {self.deviation:.3e} (tol {self.tol:.0e})"


def _random_ball(rng, n, N, r=0.85):
    v = rng.normal(size=(n, N))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return v * (r * rng.uniform(size=(n, 1)) ** (1 / N))


def _exp_jacobian_deviation(x, W, step=1e-6):
    """max relative gap between the finite-difference volume distortion of
    Z -> exp_x(Z / lambda) and rho(|Z|), both in orthonormal frames."""
    N = x.shape[-1]
    lam_x = hg.conformal_factor(x)
    worst = 0.0
    for xi, Wi, lx in zip(x, W, lam_x):
        y = hg.ball_exp(xi, Wi / lx)
        Jm = np.empty((N, N))
        for l in range(N):
            e = np.zeros(N)
            e[l] = step
            Jm[:, l] = (hg.ball_exp(xi, (Wi + e) / lx) - hg.ball_exp(xi, (Wi - e) / lx)) / (2 * step)
        det = abs(np.linalg.det(Jm)) * hg.conformal_factor(y) ** N / 1.0
        rho = hg.jacobian_rho(np.linalg.norm(Wi), N)
        worst = max(worst, abs(det - rho) / rho)
    return worst


def geometry_checks(rng, n=10_000):
    out = []
    for N in (2, 3):
        x = _random_ball(rng, n, N)
        y = _random_ball(rng, n, N)
        back = hg.ball_exp(x, hg.ball_log(x, y))
        out.append(Check("geometry", f"exp/log roundtrip N={N}", float(np.max(np.abs(back - y))), 1e-9))
        W = rng.normal(size=(200, N)) * 1.5
        out.append(
            Check("geometry", f"det d exp vs rho N={N}", _exp_jacobian_deviation(x[:200], W), 1e-5)
        )
        V = rng.normal(size=(n, N)) * 1.2
        C = hg.shift_jacobian_CV(V)
        s = np.linalg.norm(V, axis=1)
        band = np.maximum(np.exp(-s) - C, C - np.exp(s))
        out.append(Check("geometry", f"exp(-|V|) <= C_V <= exp(|V|) N={N}", float(max(band.max(), 0.0)), 0.0))
        yb = np.concatenate([rng.normal(size=(200, N - 1)), rng.uniform(0.2, 2.0, (200, 1))], axis=1)
        worst = 0.0
        step = 1e-6
        for Vi, yi in zip(V[:200], yb):
            Jm = np.empty((N, N))
            for l in range(N):
                e = np.zeros(N)
                e[l] = step
                Jm[:, l] = (hg.shift_map(Vi, yi + e) - hg.shift_map(Vi, yi - e)) / (2 * step)
            c = hg.shift_jacobian_CV(Vi)
            worst = max(worst, abs(np.linalg.det(Jm) - c) / c)
        out.append(Check("geometry", f"numeric Jacobian of shift vs C_V N={N}", worst, 1e-6))
        a = _random_ball(rng, n, N, 0.8)
        b = _random_ball(rng, n, N, 0.8)
        dh = hg.halfspace_distance(hg.ball_to_halfspace(a), hg.ball_to_halfspace(b))
        db = hg.ball_distance(a, b)
        out.append(Check("geometry", f"Cayley isometry N={N}", float(np.max(np.abs(dh - db) / np.maximum(1, db))), 1e-11))
    return out


def kernel_checks(rng, K=None, J=None, N=2):
    from .kernels import Indicator, dissipativity_residual, g_tilde_ball

    K = K or convection_from_dict(DEFAULT_G, N)
    out = []
    x = _random_ball(rng, 1000, N, 0.8)
    v = rng.normal(size=(1000, N)) * 0.3
    t = rng.uniform(-2, 2, size=1000)
    xt, vt = hg.ball_flow(x, v, t)
    dev = np.abs(g_tilde_ball(K, xt, vt) - g_tilde_ball(K, x, v))
    out.append(Check("kernels", "geodesic-flow invariance of G~", float(dev.max()), 1e-9))
    worst = 0.0
    for y in _random_ball(rng, 5, N, 0.6):
        for eps in (1.0, 0.5, 0.1):
            res, tot = dissipativity_residual(K, hg.Point.ball(y), eps, R=eps * 6.5, return_total=True)
            worst = max(worst, abs(res) / tot)
    out.append(Check("kernels", "dissipativity residual (relative)", worst, 1e-6))
    out.append(Check("kernels", "A_J Indicator(1) = pi/8", abs(moment_AJ(Indicator(1.0), 2) - np.pi / 8), 1e-9))
    pts = _random_ball(rng, 2000, N, 0.95)
    X = first_moment_ball(K, pts)
    speed = hg.conformal_factor(pts) * np.linalg.norm(X, axis=1)
    out.append(Check("kernels", "|X_G| <= M(G~)", float(max(speed.max() - moment_MG(K, N), 0.0)), 0.0))
    return out


def field_checks(rng):
    g = Grid(2, 0.8, 0.02)
    vol = 2 * np.pi * (np.cosh(2 * np.arctanh(0.8)) - 1)
    out = [Check("field", "volume vs closed form (relative)", abs(g.weights.sum() - vol) / vol, 2e-3)]
    p = _random_ball(rng, 500, 2, 0.75)
    f = ScalarField(g, 1 + 2 * g.points[:, 0] - 3 * g.points[:, 1])
    exact = 1 + 2 * p[:, 0] - 3 * p[:, 1]
    out.append(Check("field", "affine reproduction", float(np.abs(sample(f, p) - exact).max()), 1e-12))
    return out


def nonlocal_checks(rng):
    from .kernels import Gaussian

    g = Grid(2, 0.8, 0.04)
    J, K = Gaussian(1.0), convection_from_dict(DEFAULT_G, 2)
    op = get_operator(g, J, K, 0.3)
    u = ScalarField(g, np.exp(-4 * np.sum(g.points**2, axis=1)))
    v = rng.normal(size=len(g)) * (g.radius < 0.5)
    w = rng.normal(size=len(g)) * (g.radius < 0.5)
    mu = g.weights
    lhs = np.sum(mu * op.LG(v) * w)
    rhs = np.sum(mu * v * op.LG_adjoint(w))
    scale = np.sqrt(np.sum(mu * v * v) * np.sum(mu * w * w))
    out = [Check("nonlocal", "adjoint duality (relative)", abs(lhs - rhs) / scale, 1e-6)]
    traj, mon = evolve_nonlocal(u, J, K, Nonlinearity(2.0), 0.3, 0.02, save_every=0.005, operator=op)
    l1 = mon.l1[0]
    out.append(Check("nonlocal", "mass minus outflow (relative)", mon.net_mass_drift() / l1, 1e-10))
    out.append(Check("nonlocal", "sup norm excess", max(mon.linf_excess(), 0.0), 1e-8))
    out.append(Check("nonlocal", "L2 increase", max(mon.l2_increase(), 0.0), 1e-8 * mon.l2[0]))
    out.append(Check("nonlocal", "energy inequality excess", max(mon.energy_excess(), 0.0), 1e-6))
    return out


def localref_checks(rng):
    from .localref import div_X, flow_X

    def dilation(x):
        y = hg.ball_to_halfspace(x)
        return hg.halfspace_to_ball_tangent(y, y)

    X = VectorFieldSampler(dilation)
    p = _random_ball(rng, 200, 2, 0.6)
    out = [Check("localref", "div of a Killing field", float(np.abs(div_X(X, p)).max()), 1e-6)]
    fwd = flow_X(X, p, 0.4, 0.01)
    back = flow_X(X, fwd.position, -0.4, 0.01)
    out.append(Check("localref", "flow forward then back", float(np.abs(back.position.coords - p).max()), 1e-8))
    y0 = np.array([0.0, 0.7])
    st = flow_X(X, hg.Point.halfspace(y0), 0.3, 0.01)
    yT = hg.ball_to_halfspace(st.position.coords)
    out.append(Check("localref", "dilation flow closed form", float(np.abs(yT - y0 * np.exp(0.3)).max()), 1e-8))
    return out


def run_selftest(seed=0):
    """All invariant suites; returns the list of Check results."""
    rng = np.random.default_rng(seed)
    checks = []
    for suite in (geometry_checks, kernel_checks, field_checks, nonlocal_checks, localref_checks):
        checks.extend(suite(rng))
    return checks
