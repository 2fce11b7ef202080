#!/usr/bin/env python3
# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""
Twisted Recurrence Lab - command line entry point (trl).

    trl run <config.json>             full experiment, report files in --out-dir
    trl validate <config.json>        hypothesis checklist
    trl corr <config.json>            correlation series and decay fit
    trl rn-mass <config.json> --n N   mu(R_n)
    trl pairwise <config.json> --n N --m M
    trl quasi-report <config.json>    quasi-independence reports over the N-grid
    trl rotation-control <config.json>
    trl window <config.json>          window-sum diagnostic CSV

Exit codes: 0 success, 1 error, 2 failed hypothesis check with --strict.
"""

import argparse
import logging
import sys
import time
from pathlib import Path
from typing import List, Optional

from twisted_recurrence_lab import __version__
from twisted_recurrence_lab.correlations.decay import decay_hypothesis
from twisted_recurrence_lab.experiments.config import ExperimentConfig, load_experiment
from twisted_recurrence_lab.experiments.hypotheses import fit_config_decay, validate_hypotheses
from twisted_recurrence_lab.experiments.report import FORMAT_ALL, FORMATS, emit_report, render_csv, render_json
from twisted_recurrence_lab.experiments.runner import (
    control_denominators,
    rotation_control,
    run_experiment,
)
from twisted_recurrence_lab.recurrence.hits import sample_hits
from twisted_recurrence_lab.recurrence.masses import EXACT, METHODS, pairwise_mass, measure_Rn, supports_exact
from twisted_recurrence_lab.recurrence.quasi import PairwiseCache, quasi_independence_report
from twisted_recurrence_lab.targets.schedules import classify_schedule, geometric_grid, window_table
from twisted_recurrence_lab.utils.config import get_config, load_config
from twisted_recurrence_lab.utils.errors import LabError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_HYPOTHESIS = 2


def setup_logging(verbose: bool = False) -> None:
    """Configure root logging on stderr; --verbose forces DEBUG."""
    level_name = "DEBUG" if verbose else str(get_config("Logging", "level", "INFO")).upper()
    level = getattr(logging, level_name, logging.INFO)
    logging.Formatter.converter = time.localtime
    logging.basicConfig(
        level=level,
        format='%(asctime)s [%(levelname)s] %(name)s: %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S',
        stream=sys.stderr,
        force=True,
    )


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("config", type=Path, help="Experiment config (JSON)")
    common.add_argument("--seed", type=int, help="Experiment seed")
    common.add_argument("--samples", type=int, help="Monte Carlo seed count")
    common.add_argument("--horizon", type=int, help="Horizon N")
    common.add_argument("--threads", type=int, help="Worker threads (never changes results)")
    common.add_argument("--out-dir", type=str, help="Directory for report files")
    common.add_argument("--strict", action="store_true", help="Exit 2 when a hypothesis check fails")
    common.add_argument("--verbose", "-v", action="store_true", help="Debug logging")

    parser = argparse.ArgumentParser(prog="trl", description="Twisted recurrence experiments")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", parents=[common], help="Run a full experiment")
    run.add_argument("--format", choices=FORMATS, default=FORMAT_ALL, help="Report files to write")

    sub.add_parser("validate", parents=[common], help="Hypothesis checklist")
    sub.add_parser("corr", parents=[common], help="Correlation series and decay fit")

    rn = sub.add_parser("rn-mass", parents=[common], help="mu(R_n)")
    rn.add_argument("--n", type=int, required=True)
    rn.add_argument("--method", choices=METHODS, default=None)

    pw = sub.add_parser("pairwise", parents=[common], help="mu(R_n intersect R_{n+m})")
    pw.add_argument("--n", type=int, required=True)
    pw.add_argument("--m", type=int, required=True)
    pw.add_argument("--method", choices=METHODS, default=None)

    sub.add_parser("quasi-report", parents=[common], help="Quasi-independence reports over the N-grid")
    sub.add_parser("rotation-control", parents=[common], help="Convergent-denominator hits of a rotation")

    window = sub.add_parser("window", parents=[common], help="Window-sum diagnostic CSV")
    window.add_argument("--q", type=float, default=1.0, help="Window parameter q > 0")
    window.add_argument("--n-min", type=int, default=2)
    window.add_argument("--n-max", type=int, default=None)
    return parser


def _load(args: argparse.Namespace) -> ExperimentConfig:
    load_config()
    config = load_experiment(args.config)
    return config.with_overrides(
        seed=args.seed,
        samples=args.samples,
        horizon=args.horizon,
        threads=args.threads,
        out_dir=args.out_dir,
    )


def _default_method(args, system, measure) -> str:
    if args.method:
        return args.method
    return EXACT if supports_exact(system, measure) else "monte-carlo"


def cmd_run(args, config: ExperimentConfig) -> int:
    report = run_experiment(config)
    out_dir = Path(config.out_dir) / config.name
    emit_report(report, out_dir, args.format)
    if args.strict and (report.hypotheses.failed or not report.hypotheses.branch_supported):
        logger.error(f"✗ Hypothesis checks failed: {report.hypotheses.failed or report.hypotheses.branch}")
        return EXIT_HYPOTHESIS
    return EXIT_OK


def cmd_validate(args, config: ExperimentConfig) -> int:
    checklist = validate_hypotheses(config)
    print(render_json(checklist.to_dict()), end="")
    if args.strict and checklist.failed:
        logger.error(f"✗ Failed hypotheses: {', '.join(checklist.failed)}")
        return EXIT_HYPOTHESIS
    return EXIT_OK


def cmd_corr(args, config: ExperimentConfig) -> int:
    model, series = fit_config_decay(config)
    print(render_csv(("n", "corr", "stderr"), (e.to_row() for e in series)), end="")
    status = decay_hypothesis(model, config.decay.gamma_max, config.decay.r2_min)
    logger.info(f"Decay fit: {model.to_dict()} -> {status}")
    if args.strict and status == "fail":
        return EXIT_HYPOTHESIS
    return EXIT_OK


def cmd_rn_mass(args, config: ExperimentConfig) -> int:
    system, measure = config.build_system(), config.build_measure()
    estimate = measure_Rn(
        system, measure, config.build_schedule(measure), config.build_twist(), args.n,
        _default_method(args, system, measure), config.samples, config.seed, config.radius_mode, config.threads,
        config.mc_tolerance,
    )
    print(render_json({"n": args.n, **estimate.to_dict()}), end="")
    return EXIT_OK


def cmd_pairwise(args, config: ExperimentConfig) -> int:
    system, measure = config.build_system(), config.build_measure()
    estimate = pairwise_mass(
        system, measure, config.build_schedule(measure), config.build_twist(), args.n, args.m,
        _default_method(args, system, measure), config.samples, config.seed, config.radius_mode, config.threads,
        config.quasi.window_budget, config.mc_tolerance,
    )
    print(render_json({"n": args.n, "m": args.m, **estimate.to_dict()}), end="")
    return EXIT_OK


def cmd_quasi_report(args, config: ExperimentConfig) -> int:
    system, measure = config.build_system(), config.build_measure()
    schedule, twist = config.build_schedule(measure), config.build_twist()
    model, _ = fit_config_decay(config, system, measure)
    if not model.fitted:
        logger.error(f"✗ Decay model {model.status}; quasi-independence needs a fitted model")
        return EXIT_HYPOTHESIS if args.strict else EXIT_ERROR

    cache = PairwiseCache()
    grid = [N for N in config.grid if N <= config.horizon] or [config.horizon]
    reports = [
        quasi_independence_report(
            system, measure, schedule, twist, model, N, config.quasi.method, config.quasi.samples or config.samples,
            config.seed, config.radius_mode, config.threads, config.quasi.pair_budget, config.quasi.window_budget,
            cache,
        )
        for N in grid
    ]
    print(render_json({"decay": model.to_dict(), "reports": [r.to_dict() for r in reports]}), end="")
    return EXIT_OK


def cmd_rotation_control(args, config: ExperimentConfig) -> int:
    denominators = control_denominators(config)
    if denominators is None:
        logger.error("✗ rotation-control needs a rotation given by partial quotients or a Liouville construction")
        return EXIT_ERROR
    system, measure = config.build_system(), config.build_measure()
    schedule, twist = config.build_schedule(measure), config.build_twist()
    sample = sample_hits(system, measure, schedule, twist, config.horizon, config.samples, config.seed,
                         config.radius_mode, config.threads, config.batch_size)
    flags = classify_schedule(schedule)
    report = rotation_control(sample, schedule, denominators, config.verdict.control_fraction, flags.summable)
    data = report.to_dict()
    liouville = config.liouville()
    if liouville is not None:
        data["construction"] = liouville.to_dict()
    print(render_json(data), end="")
    return EXIT_OK if report.passed else EXIT_ERROR


def cmd_window(args, config: ExperimentConfig) -> int:
    schedule = config.build_schedule(config.build_measure())
    n_max = args.n_max or config.horizon
    rows = window_table(schedule, args.q, geometric_grid(args.n_min, n_max))
    print(render_csv(("N", "low_index", "window_sum"), (row.to_dict() for row in rows)), end="")
    return EXIT_OK


COMMANDS = {
    "run": cmd_run,
    "validate": cmd_validate,
    "corr": cmd_corr,
    "rn-mass": cmd_rn_mass,
    "pairwise": cmd_pairwise,
    "quasi-report": cmd_quasi_report,
    "rotation-control": cmd_rotation_control,
    "window": cmd_window,
}


def run_cli(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, dispatch, and map failures to exit codes."""
    args = build_parser().parse_args(argv)
    setup_logging(args.verbose)
    try:
        config = _load(args)
        return COMMANDS[args.command](args, config)
    except LabError as e:
        logger.error(f"✗ {e}")
        return EXIT_ERROR
    except OSError as e:
        logger.error(f"✗ I/O error: {e}")
        return EXIT_ERROR


def main():
    """Main entry point."""
    try:
        sys.exit(run_cli())
    except KeyboardInterrupt:
        logger.info("Interrupted")
        sys.exit(EXIT_ERROR)


if __name__ == "__main__":
    main()
