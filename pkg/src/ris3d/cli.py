"""Command-line entry point.

Exit codes: 0 success, 1 invalid config or scenario, 2 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

from . import __version__
from .config import load_config
from .experiment import (SweepSpec, emit, run_joint_optimization, run_n_sweep,
                         run_tilt_sweep)
from .scenario import ScenarioError

EXIT_OK, EXIT_INVALID, EXIT_IO = 0, 1, 2

_KIND = {"sweep-tilt": "tilt", "sweep-n": "n_elements", "optimize": "full_grid"}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ris3d", description="RIS-assisted 3D beamforming experiments.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (("sweep-tilt", "SNR versus BS tilt for several azimuths"),
                        ("sweep-n", "SNR versus BS tilt for several RIS sizes"),
                        ("optimize", "joint grid search over tilt and azimuth")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", help="config file (defaults to the reference setup)")
        p.add_argument("--seed", type=int, help="override the scenario seed")
        p.add_argument("--trials", type=int, help="override the number of trials")
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--threads", type=int, default=1,
                       help="worker threads; never changes the output")
    p = sub.add_parser("validate-config", help="check a config file and report problems")
    p.add_argument("--config", required=True)
    return parser


def _load(args) -> SweepSpec:
    spec = load_config(args.config) if args.config else SweepSpec()
    changes = {"sweep_kind": _KIND[args.command]}
    if args.seed is not None:
        changes["scenario"] = replace(spec.scenario, seed=args.seed)
    if args.trials is not None:
        changes["trials"] = args.trials
    return replace(spec, **changes).checked()


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "validate-config":
            spec = load_config(args.config).checked()
            print(f"{args.config}: ok ({spec.sweep_kind}, {spec.trials} trials)")
            return EXIT_OK
        spec = _load(args)
        threads = max(1, args.threads)
        if args.command == "sweep-tilt":
            result = run_tilt_sweep(spec, threads)
        elif args.command == "sweep-n":
            result = run_n_sweep(spec, threads)
        else:
            joint = run_joint_optimization(spec, threads)
            result = joint.sweep
            for kind, rep in joint.reports.items():
                print(json.dumps({"strategy": kind, "theta_star": rep.theta_star,
                                  "phi_star": rep.phi_star,
                                  "mean_snr_db": rep.mean_snr_db}), file=sys.stderr)
        text = emit(result, args.format, args.out)
        if args.out is None:
            sys.stdout.write(text)
        return EXIT_OK
    except ScenarioError as exc:
        for issue in exc.issues:
            print(f"error: {issue.code}: {issue.message}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
