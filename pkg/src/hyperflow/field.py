"""
Scalar fields on a truncated ball-model lattice.

Nodes are the points of the lattice h*Z^N with |x| <= r_max, stored in
lexicographic order. Values outside r_max are zero. Integrals use the
hyperbolic volume weights lambda(x)^N h^N.
"""

import csv
import json
import os
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from . import hypgeom as hg

BOUNDARY_SHELL = 0.9  # inner radius of the monitored shell, as a fraction of r_max


class FieldConfigError(ValueError):
    pass


class ShapeError(ValueError):
    pass


class Grid:
    """Lattice nodes of spacing h inside the ball of radius r_max."""

    def __init__(self, N=2, r_max=0.8, h=0.02):
        if not 0 < r_max < 1:
            raise FieldConfigError("r_max must lie in (0, 1)")
        if h <= 0:
            raise FieldConfigError("h must be positive")
        self.N = int(N)
        self.r_max = float(r_max)
        self.h = float(h)
        self.m = int(np.floor(self.r_max / self.h + 1e-9))
        side = 2 * self.m + 1
        ax = np.arange(-self.m, self.m + 1)
        idx = np.stack(np.meshgrid(*([ax] * self.N), indexing="ij"), axis=-1).reshape(-1, self.N)
        pts = idx * self.h
        keep = np.sum(pts * pts, axis=1) <= self.r_max**2 * (1 + 1e-12)
        self.lattice = idx[keep]
        self.points = pts[keep]
        self.index = np.full((side,) * self.N, -1, dtype=np.int64)
        self.index[tuple((self.lattice + self.m).T)] = np.arange(len(self.points))
        self.lam = hg.conformal_factor(self.points)
        self.weights = self.lam**self.N * self.h**self.N
        self.radius = np.sqrt(np.sum(self.points**2, axis=1))

    def __len__(self):
        return len(self.points)

    def __repr__(self):
        return f"Grid(N={self.N}, r_max={self.r_max}, h={self.h}, nodes={len(self)})"

    def __eq__(self, other):
        return (
            isinstance(other, Grid)
            and (self.N, self.r_max, self.h) == (other.N, other.r_max, other.h)
        )

    def __hash__(self):
        return hash((self.N, self.r_max, self.h))

    def refined(self):
        return Grid(self.N, self.r_max, self.h / 2)

    def embed_in(self, fine):
        """Indices in ``fine`` of this grid's nodes (fine.h must divide h)."""
        ratio = self.h / fine.h
        k = int(round(ratio))
        if abs(ratio - k) > 1e-9:
            raise ShapeError("grids are not nested")
        lat = self.lattice * k + fine.m
        return fine.index[tuple(lat.T)]

    def shell_mask(self):
        return self.radius >= BOUNDARY_SHELL * self.r_max

    def interpolation(self, p):
        """Corner node indices and multilinear weights for points p.

        Returns (idx, w) of shape (..., 2^N); idx is -1 where the corner is
        not a node, and all weights vanish for |p| > r_max.
        """
        p = np.asarray(p, dtype=float)
        t = p / self.h + self.m
        base = np.floor(t).astype(np.int64)
        frac = t - base
        side = 2 * self.m + 1
        idx_list, w_list = [], []
        for corner in product((0, 1), repeat=self.N):
            c = np.asarray(corner)
            cell = base + c
            inside = np.all((cell >= 0) & (cell < side), axis=-1)
            cell = np.clip(cell, 0, side - 1)
            node = np.where(inside, self.index[tuple(np.moveaxis(cell, -1, 0))], -1)
            w = np.prod(np.where(c == 1, frac, 1.0 - frac), axis=-1)
            idx_list.append(node)
            w_list.append(np.where(node >= 0, w, 0.0))
        idx = np.stack(idx_list, axis=-1)
        w = np.stack(w_list, axis=-1)
        outside = np.sum(p * p, axis=-1) > self.r_max**2
        w = np.where(outside[..., None], 0.0, w)
        return idx, w


@dataclass(eq=False)
class ScalarField:
    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (len(self.grid),):
            raise ShapeError("one value per node expected")

    def copy(self):
        return ScalarField(self.grid, self.values.copy())


@dataclass(eq=False)
class Trajectory:
    """Fields of one grid saved at increasing times."""

    grid: Grid
    times: np.ndarray
    values: np.ndarray  # (n_times, n_nodes)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values, dtype=float)

    def __len__(self):
        return len(self.times)

    def __getitem__(self, k):
        return ScalarField(self.grid, self.values[k])

    @property
    def final(self):
        return self[-1]

    def restricted(self, coarse):
        """The same trajectory sampled on the nodes of a coarser nested grid."""
        sel = coarse.embed_in(self.grid)
        return Trajectory(coarse, self.times, self.values[:, sel])


class VectorFieldSampler:
    """Ball-chart vector field x -> X(x), with an optional node cache."""

    def __init__(self, func, bound=None):
        self.func = func
        self.bound = bound
        self._cache = {}

    def __call__(self, x):
        return self.func(np.asarray(x, dtype=float))

    def at(self, p):
        pb = hg.to_ball(p)
        return hg.TangentVector(pb, self(pb.coords))

    def on_grid(self, grid):
        key = (grid.N, grid.r_max, grid.h)
        if key not in self._cache:
            self._cache[key] = self(grid.points)
        return self._cache[key]

    @classmethod
    def from_kernel(cls, K, N=2, n_theta=128):
        from .kernels import first_moment_ball, moment_MG

        return cls(lambda x: first_moment_ball(K, x, n_theta), bound=moment_MG(K, N))

    @classmethod
    def zero(cls):
        return cls(lambda x: np.zeros_like(x), bound=0.0)


# ---------------------------------------------------------------------------
# sampling and integrals


def sample_values(grid, values, p):
    idx, w = grid.interpolation(p)
    vals = np.where(idx >= 0, values[np.maximum(idx, 0)], 0.0)
    return np.sum(vals * w, axis=-1)


def sample(f, p):
    """Multilinear interpolation of f at p (a Point or ball coordinates)."""
    coords = hg.to_ball(p).coords if isinstance(p, hg.Point) else p
    return sample_values(f.grid, f.values, coords)


def lp_norm(f, p):
    v = f.values if isinstance(f, ScalarField) else np.asarray(f)
    if p == np.inf or p == "inf":
        return float(np.max(np.abs(v))) if v.size else 0.0
    w = f.grid.weights
    if p == 1:
        return float(np.sum(np.abs(v) * w))
    if p == 2:
        return float(np.sqrt(np.sum(v * v * w)))
    raise ValueError("p must be 1, 2 or inf")


def mass(f):
    return float(np.sum(f.values * f.grid.weights))


def inner(f, g):
    """mu-weighted inner product of two fields on one grid."""
    if f.grid != g.grid:
        raise ShapeError("fields live on different grids")
    return float(np.sum(f.values * g.values * f.grid.weights))


def boundary_mass(f):
    """mu-integral of |u| over the outer shell r >= 0.9 r_max."""
    shell = f.grid.shell_mask()
    return float(np.sum(np.abs(f.values[shell]) * f.grid.weights[shell]))


def trapezoid_weights(times):
    times = np.asarray(times, dtype=float)
    w = np.zeros_like(times)
    if len(times) > 1:
        dt = np.diff(times)
        w[:-1] += 0.5 * dt
        w[1:] += 0.5 * dt
    return w


def spacetime_l2_error(traj_a, traj_b, K_radius):
    """Discrete L2([0,T], L2(K)) distance on the ball |x| <= K_radius."""
    if traj_a.grid != traj_b.grid:
        raise ShapeError("trajectories live on different grids")
    if traj_a.times.shape != traj_b.times.shape or not np.allclose(
        traj_a.times, traj_b.times, rtol=0, atol=1e-12
    ):
        raise ShapeError("trajectories have different time stamps")
    grid = traj_a.grid
    region = grid.radius <= K_radius * (1 + 1e-12)
    diff = traj_a.values[:, region] - traj_b.values[:, region]
    per_time = np.sum(diff * diff * grid.weights[region], axis=1)
    return float(np.sqrt(np.sum(trapezoid_weights(traj_a.times) * per_time)))


def l2_error_on(fa, fb, K_radius):
    grid = fa.grid
    region = grid.radius <= K_radius * (1 + 1e-12)
    d = fa.values[region] - fb.values[region]
    return float(np.sqrt(np.sum(d * d * grid.weights[region])))


# ---------------------------------------------------------------------------
# initial data


def _profile(s):
    """exp(1 - 1/(1 - s^2)) on |s| < 1 and its first two derivatives."""
    s = np.asarray(s, dtype=float)
    inside = np.abs(s) < 1.0
    q = np.where(inside, 1.0 - s * s, 1.0)
    g = np.where(inside, np.exp(1.0 - 1.0 / q), 0.0)
    g1 = g * (-2.0 * s / q**2)
    g2 = g * (4.0 * s * s / q**4 - 2.0 / q**2 - 8.0 * s * s / q**3)
    return g, np.where(inside, g1, 0.0), np.where(inside, g2, 0.0)


@dataclass(frozen=True)
class RadialBump:
    """amplitude * exp(1 - 1/(1 - (d/width)^2)) with d the hyperbolic
    distance to ``center`` (ball coordinates)."""

    center: tuple = (0.0, 0.0)
    width: float = 1.0
    amplitude: float = 1.0
    kind: str = field(default="radial_bump", repr=False)

    def __call__(self, x):
        d = hg.ball_distance(x, np.asarray(self.center))
        return self.amplitude * _profile(d / self.width)[0]

    def laplacian(self, x):
        """Laplace-Beltrami in geodesic polar form phi'' + (N-1) coth(d) phi'."""
        x = np.asarray(x, dtype=float)
        N = x.shape[-1]
        d = hg.ball_distance(x, np.asarray(self.center))
        _, g1, g2 = _profile(d / self.width)
        d1 = self.amplitude * g1 / self.width
        d2 = self.amplitude * g2 / self.width**2
        small = d < 1e-8
        coth_term = np.where(small, d2, d1 / np.tanh(np.where(small, 1.0, d)))
        return d2 + (N - 1) * coth_term

    def support_radius(self):
        return self.width

    def to_dict(self):
        return {
            "kind": "radial_bump",
            "center": list(self.center),
            "width": self.width,
            "amplitude": self.amplitude,
        }


def initial_from_dict(spec, N=2):
    kind = spec.get("kind", "radial_bump")
    if kind != "radial_bump":
        raise FieldConfigError(f"unknown initial data kind {kind!r}")
    center = tuple(float(c) for c in spec.get("center", [0.0] * N))
    if len(center) != N:
        raise FieldConfigError("bump centre has the wrong dimension")
    return RadialBump(center, float(spec.get("width", 1.0)), float(spec.get("amplitude", 1.0)))


def make_initial(kind, grid):
    """Sample initial data on the grid, refusing support that leaves r_max."""
    c = np.asarray(kind.center, dtype=float)
    if c.shape != (grid.N,):
        raise FieldConfigError("bump centre has the wrong dimension")
    if np.sum(c * c) >= 1:
        raise FieldConfigError("bump centre must lie in the ball")
    reach = hg.ball_distance(c, np.zeros_like(c)) + kind.width
    if reach >= 2 * np.arctanh(grid.r_max):
        raise FieldConfigError("initial bump support reaches beyond r_max")
    return ScalarField(grid, kind(grid.points))


# ---------------------------------------------------------------------------
# serialisation


def _header(grid):
    return {"N": grid.N, "r_max": grid.r_max, "h": grid.h, "ordering": "lexicographic"}


def save_field(f, path, fmt="csv"):
    """Write a node-value table with a one-line JSON header."""
    grid = f.grid
    if fmt == "csv":
        with open(path, "w", newline="") as fh:
            fh.write("# " + json.dumps(_header(grid)) + "\n")
            w = csv.writer(fh)
            w.writerow(["node"] + [f"x{k + 1}" for k in range(grid.N)] + ["value"])
            for i, (p, v) in enumerate(zip(grid.points, f.values)):
                w.writerow([i] + [repr(float(c)) for c in p] + [repr(float(v))])
    elif fmt == "bin":
        head = json.dumps(_header(grid) | {"count": len(grid)}).encode()
        with open(path, "wb") as fh:
            fh.write(head + b"\n")
            fh.write(f.values.astype("<f8").tobytes())
    else:
        raise ValueError("fmt must be 'csv' or 'bin'")


def load_field(path):
    with open(path, "rb") as fh:
        first = fh.readline()
        if first.startswith(b"# "):
            head = json.loads(first[2:])
            rows = list(csv.reader(fh.read().decode().splitlines()))[1:]
            values = np.array([float(r[-1]) for r in rows])
        else:
            head = json.loads(first)
            values = np.frombuffer(fh.read(), dtype="<f8").copy()
    grid = Grid(head["N"], head["r_max"], head["h"])
    return ScalarField(grid, values)


def save_trajectory(traj, directory, fmt="csv"):
    os.makedirs(directory, exist_ok=True)
    ext = "csv" if fmt == "csv" else "bin"
    with open(os.path.join(directory, "index.csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["step", "t", "file"])
        for k, t in enumerate(traj.times):
            name = f"u_{k:05d}.{ext}"
            save_field(traj[k], os.path.join(directory, name), fmt)
            w.writerow([k, repr(float(t)), name])


def load_trajectory(directory):
    with open(os.path.join(directory, "index.csv"), newline="") as fh:
        rows = list(csv.DictReader(fh))
    fields = [load_field(os.path.join(directory, r["file"])) for r in rows]
    times = [float(r["t"]) for r in rows]
    return Trajectory(fields[0].grid, times, np.stack([f.values for f in fields]))
