"""Command line entry point: ``hyperflow <command> ...``."""

import argparse
import json
import os
import sys

from .experiments import (
    ConfigError,
    SimConfig,
    emit_report,
    run_convdiff_convergence,
    run_selftest,
    run_transport_convergence,
)
from .kernels import MomentError
from .nonlocal_ops import MonitorViolation


def _load(path):
    return SimConfig.load(path) if path else SimConfig()


def cmd_selftest(args):
    checks = run_selftest(args.seed)
    for c in checks:
        print(c.line())
    failed = [c for c in checks if not c.passed]
    print(f"{len(checks) - len(failed)}/{len(checks)} checks passed")
    return 1 if failed else 0


def cmd_moments(args):
    from .kernels import first_moment_ball, moment_MG, validate

    cfg = _load(args.config)
    J, K = cfg.kernels()
    out = {k: float(v) for k, v in validate(J, K, cfg.N).items()}
    if K is not None:
        import numpy as np

        x0 = np.zeros((1, cfg.N))
        out["X_G_origin"] = [float(c) for c in first_moment_ball(K, x0)[0]]
        out["M_G"] = float(moment_MG(K, cfg.N))
    print(json.dumps(out, indent=2, sort_keys=True))
    return 0


def cmd_simulate(args):
    from .field import make_initial, save_trajectory
    from .experiments import _run_nonlocal

    cfg = _load(args.config)
    J, K = cfg.kernels()
    u0 = make_initial(cfg.initial_data(), cfg.grid())
    os.makedirs(args.out, exist_ok=True)
    for eps in cfg.epsilons:
        traj, mon = _run_nonlocal(cfg, J, K, eps, u0)
        mon.to_csv(os.path.join(args.out, f"monitors_eps_{eps:g}.csv"))
        if args.dump:
            save_trajectory(traj, os.path.join(args.out, f"trajectory_eps_{eps:g}"))
        print(f"eps={eps:g} steps={mon.steps} final mass={mon.mass[-1]:.12g}")
    return 0


def _sweep(run, args):
    cfg = _load(args.config)
    report = run(cfg)
    for path in emit_report(report, args.out):
        print("wrote", path)
    for row in report.rows:
        print(f"eps={row['eps']:g} err_l2_spacetime={row['err_l2_spacetime']:.6e}")
    print("ratios", " ".join(f"{r:.4f}" for r in report.ratios))
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="hyperflow", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("selftest", help="run the invariant suites")
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_selftest)

    s = sub.add_parser("moments", help="kernel moments for a config")
    s.add_argument("--config")
    s.set_defaults(func=cmd_moments)

    s = sub.add_parser("simulate", help="nonlocal evolution for each epsilon")
    s.add_argument("--config")
    s.add_argument("--out", required=True)
    s.add_argument("--dump", action="store_true", help="also write trajectories")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("transport", help="epsilon sweep against exact transport")
    s.add_argument("--config")
    s.add_argument("--out", required=True)
    s.set_defaults(func=lambda a: _sweep(run_transport_convergence, a))

    s = sub.add_parser("converge", help="epsilon sweep against local convection-diffusion")
    s.add_argument("--config")
    s.add_argument("--out", required=True)
    s.set_defaults(func=lambda a: _sweep(run_convdiff_convergence, a))
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, MomentError, MonitorViolation, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
