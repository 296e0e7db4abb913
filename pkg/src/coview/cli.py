"""Command-line entry point: one subcommand per pipeline stage, plus "all".

Exit codes: 0 success, 2 configuration problems (each printed on its own
line), 1 anything else (a machine-readable JSON error record goes to
stderr).  Worker count can also come from the COVIEW_WORKERS environment
variable.
"""

from __future__ import annotations

import argparse
import json
import sys

from .config import validate_config, with_overrides
from .errors import ConfigError, CoviewError
from .pipeline import STAGES, run_stage


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coview",
        description="Item co-consumption network pipeline: sampling, projection, "
                    "text clusters, covariates, and ERGM link-formation analysis.",
    )
    sub = parser.add_subparsers(dest="stage", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="YAML pipeline configuration")
    common.add_argument("--out", help="output directory (overrides config)")
    common.add_argument("--seed", type=int, help="master seed (overrides config)")
    common.add_argument("--workers", type=int, help="worker count for parallel stages")
    common.add_argument("--tau", type=float, help="co-audience Jaccard threshold")
    common.add_argument("--stopword-mode", choices=("remove-after", "remove-before"),
                        help="bigram stop-word ordering")
    common.add_argument("--threshold", type=int,
                        help="manual bigram frequency threshold")
    common.add_argument("--algorithms",
                        help="comma-separated community algorithms to run")
    common.add_argument("--gof-nsim", type=int, help="GOF simulation count")
    common.add_argument("--drop-isolated", action="store_true", default=None,
                        help="drop items left isolated after binarization")
    common.add_argument("--export-design", action="store_true", default=None,
                        help="also write the dyad-level design table")
    common.add_argument("--user-projection", action="store_true", default=None,
                        help="also write the user-user projection")
    for name in STAGES + ("all",):
        sub.add_parser(name, parents=[common],
                       help=f"run the {name} stage" if name != "all"
                       else "run every stage in order")
    check = sub.add_parser("check-config", parents=[common],
                           help="validate the configuration and exit")
    del check
    return parser


def _overrides(args) -> dict:
    out = {}
    if args.out is not None:
        out["output_dir"] = args.out
    if args.seed is not None:
        out["seed"] = args.seed
    if args.workers is not None:
        out["workers"] = args.workers
    if args.tau is not None:
        out["tau"] = args.tau
    if args.stopword_mode is not None:
        out["stopword_mode"] = args.stopword_mode
    if args.threshold is not None:
        out["threshold_rule"] = "manual"
        out["threshold_value"] = args.threshold
    if args.algorithms is not None:
        out["algorithms"] = tuple(a.strip() for a in args.algorithms.split(",") if a.strip())
    if args.gof_nsim is not None:
        out["gof_nsim"] = args.gof_nsim
    for flag, key in (("drop_isolated", "drop_isolated"),
                      ("export_design", "export_design"),
                      ("user_projection", "user_projection")):
        value = getattr(args, flag)
        if value:
            out[key] = True
    return out


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = validate_config(args.config, _overrides(args))
    except ConfigError as exc:
        for problem in exc.problems:
            print(f"config error: {problem}", file=sys.stderr)
        return 2
    if args.stage == "check-config":
        print(f"configuration ok ({args.config})")
        return 0
    try:
        entries = run_stage(args.stage, config)
    except CoviewError as exc:
        record = {"stage": args.stage, "error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(record), file=sys.stderr)
        return 1
    for name in entries:
        print(f"stage {name}: done")
    print(f"artifacts in {config.output_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
