"""``peakon-lab`` command-line front end.

Exit codes: 0 success, 1 usage or config error, 2 blow-up (partial outputs
kept), 3 validation failure.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .integrator import BlowUpError, solve
from .io import ConfigError, initial_data, load_config, write_json, write_manifest, write_sweep, write_trajectory
from .validation import SUITES, run_suite
from .wellposed import OutOfScopeError, SweepAborted, classify_gamma, classify_mu, holder_sweep

EXIT_OK, EXIT_CONFIG, EXIT_BLOWUP, EXIT_FAILED = 0, 1, 2, 3


def _err(msg: str) -> None:
    print(f"peakon-lab: {msg}", file=sys.stderr)


def cmd_solve(args) -> int:
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        _err(str(exc))
        return EXIT_CONFIG
    write_manifest(args.out, "solve", cfg)
    u0, v0 = initial_data(cfg)
    try:
        traj = solve(u0, v0, cfg.solver)
    except BlowUpError as exc:
        if exc.trajectory is not None:
            write_trajectory(args.out, exc.trajectory)
        _err(f"blow-up: {exc}")
        return EXIT_BLOWUP
    except ValueError as exc:
        _err(str(exc))
        return EXIT_CONFIG
    write_trajectory(args.out, traj)
    print(f"wrote {len(traj)} records to {args.out}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    try:
        cfg = load_config(args.config, sweep=True)
    except ConfigError as exc:
        _err(str(exc))
        return EXIT_CONFIG
    sw = cfg.sweep
    write_manifest(args.out, "sweep", cfg)
    u0, v0 = initial_data(cfg)
    index = sw.get("r", sw.get("p"))
    try:
        res = holder_sweep(u0, v0, cfg.solver.s, index, sw["deltas"], cfg.solver,
                           quantity=sw["quantity"], rho=sw["rho"])
    except SweepAborted as exc:
        write_sweep(args.out, exc.partial)
        _err(str(exc))
        return EXIT_BLOWUP
    except ValueError as exc:
        _err(str(exc))
        return EXIT_CONFIG
    write_sweep(args.out, zip(res.deltas, res.distances))
    summary = {
        "slope": res.slope,
        "predicted_exponent": res.predicted.exponent,
        "region": res.predicted.region,
        "eps_used": res.predicted.eps_param,
        "quantity": res.quantity,
        "horizon": res.horizon,
        "rho": res.rho,
        "pass": res.passed,
    }
    write_json(f"{args.out}/summary.json", summary)
    print(json.dumps(summary, sort_keys=True))
    return EXIT_OK


def _table(mode: str, eps, resolution: int) -> None:
    fn = classify_gamma if mode == "gamma" else classify_mu
    # offset s slightly so the open endpoint 5/2 is never sampled
    svals = np.linspace(2.5, 4.0, resolution + 1)[1:]
    print("s,r_or_p,region,exponent")
    for s in svals:
        top = s if mode == "gamma" else s - 1
        for y in np.linspace(-1.0, top, resolution + 1)[:-1]:
            try:
                res = fn(float(s), float(y), eps)
            except ValueError:
                continue
            print(f"{s:.17g},{y:.17g},{res.region},{res.exponent:.17g}")


def cmd_classify(args) -> int:
    mode = "mu" if args.mu is not None else "gamma"
    point = args.mu if args.mu is not None else args.gamma
    try:
        if args.table:
            _table(mode, args.eps, args.resolution)
            return EXIT_OK
        if point is None or len(point) != 2:
            _err("classify needs --gamma S R or --mu S P")
            return EXIT_CONFIG
        s, y = point
        res = (classify_gamma if mode == "gamma" else classify_mu)(s, y, args.eps)
    except (OutOfScopeError, ValueError) as exc:
        _err(str(exc))
        return EXIT_CONFIG
    print(json.dumps({"region": res.region, "exponent": res.exponent, "eps_used": res.eps_param}))
    return EXIT_OK


def cmd_validate(args) -> int:
    name = args.suite_flag or args.suite or "all"
    try:
        rows = run_suite(name)
    except ValueError as exc:
        _err(str(exc))
        return EXIT_CONFIG
    print(f"{'suite':<13}{'check':<34} {'measured':>13}    {'tolerance':<11} result")
    for suite, chk in rows:
        print(f"{suite:<13}{chk.row()}")
    return EXIT_OK if all(c.passed for _, c in rows) else EXIT_FAILED


class _Parser(argparse.ArgumentParser):
    # usage errors share exit status 1 with config errors; 2 means blow-up
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="peakon-lab", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="integrate one initial-value problem")
    p.add_argument("--config", required=True, help="JSON run config")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("classify", help="Hoelder-exponent region of a point")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--gamma", nargs="*", type=float, metavar="S R", help="solution exponent at (s, r)")
    g.add_argument("--mu", nargs="*", type=float, metavar="S P", help="time-derivative exponent at (s, p)")
    p.add_argument("--eps", type=float, default=None, help="eps0 / eps1 (default: interior choice)")
    p.add_argument("--table", action="store_true", help="emit the region grid as CSV")
    p.add_argument("--resolution", type=int, default=200, help="grid size per axis for --table")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("sweep", help="Hoelder-slope sweep over perturbation sizes")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("validate", help="run bundled invariant checks")
    choices = sorted(SUITES) + ["all"]
    p.add_argument("suite", nargs="?", choices=choices)
    p.add_argument("--suite", dest="suite_flag", choices=choices)
    p.set_defaults(func=cmd_validate)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BrokenPipeError:
        # downstream closed early (e.g. piped into head)
        sys.stderr.close()
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
