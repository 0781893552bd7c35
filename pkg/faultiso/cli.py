"""
Command Line Interface
======================

    python -m faultiso <verb> [--config NAME|PATH] [--out DIR] [--seed N] [--quiet]

Verbs: simulate, fit, classify, discern, run, montecarlo, reference-config.
--config accepts a built-in name (scenario1, scenario2) or a YAML/JSON file.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from .classifier.angle_classifier import angles, decide, decisions_frame
from .config.config_loader import ConfigLoader, config_loader
from .config.experiment_config import ExperimentConfig
from .data.trajectory_io import load_trajectory, save_trajectory
from .dictionary.fault_dictionary import load_dictionaries, save_dictionaries
from .discern.discernibility import intersection_report
from .errors import ConfigValidationError, FaultIsolationError
from .kernel.kernel_filter import load_filter, load_threshold, residual, save_filter
from .pipeline.artifacts import residuals_frame
from .pipeline.experiment_runner import (
    amplitude_scale,
    calibrate_threshold,
    fit_dictionaries,
    fit_kernel,
    prepare_healthy_data,
    run_scenario,
    simulate_faulty,
    trial_seeds,
)
from .pipeline.monte_carlo import monte_carlo
from .pipeline.scoring import transient_mask

logger = logging.getLogger("faultiso")

EXIT_OK = 0
EXIT_PIPELINE_ERROR = 1
EXIT_CONFIG_ERROR = 2


def configure_logging(quiet: bool = False) -> None:
    logging.basicConfig(
        level=logging.WARNING if quiet else logging.INFO,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=[logging.StreamHandler(sys.stdout)],
        force=True,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="faultiso", description="Data-driven fault isolation experiments")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default="scenario1", help="built-in config name or YAML/JSON path")
    common.add_argument("--out", default=None, help="output directory (defaults to the config's output_dir)")
    common.add_argument("--seed", type=int, default=None, help="override monte_carlo.master_seed")
    common.add_argument("--quiet", action="store_true", help="only log warnings and errors")

    verbs = parser.add_subparsers(dest="verb", required=True)
    verbs.add_parser("simulate", parents=[common], help="write healthy and faulty trajectories")
    verbs.add_parser("fit", parents=[common], help="estimate the kernel filter and fault dictionaries")
    classify = verbs.add_parser("classify", parents=[common], help="classify a trajectory with a fitted filter")
    classify.add_argument("--trajectory", required=True, help="trajectory CSV to classify")
    classify.add_argument("--filter-dir", default=None, help="directory holding filter.json and dictionaries.json")
    verbs.add_parser("discern", parents=[common], help="pairwise discernibility report")
    verbs.add_parser("run", parents=[common], help="full pipeline for one trial")
    mc = verbs.add_parser("montecarlo", parents=[common], help="Monte Carlo accuracy statistics")
    mc.add_argument("--trials", type=int, default=None)
    mc.add_argument("--workers", type=int, default=None)
    verbs.add_parser("reference-config", help="print every config field with its default")
    return parser


def load_config(args: argparse.Namespace, loader: ConfigLoader = config_loader) -> ExperimentConfig:
    config = loader.load_experiment(args.config)
    if args.seed is not None:
        if args.seed < 0:
            raise ConfigValidationError("--seed must be non-negative", {"seed": "negative"})
        config = config.model_copy(
            update={"monte_carlo": config.monte_carlo.model_copy(update={"master_seed": args.seed})}
        )
    return config


def _out_dir(args: argparse.Namespace, config: ExperimentConfig) -> Path:
    return Path(args.out or config.output_dir)


def cmd_simulate(config: ExperimentConfig, out_dir: Path) -> None:
    seeds = trial_seeds(config.monte_carlo.master_seed, 0)
    model = config.model.build()
    healthy = prepare_healthy_data(config, model, seeds)
    faulty = simulate_faulty(config, healthy.model, seeds, amplitude_scale(config, healthy.model))
    save_trajectory(healthy.estimation, out_dir / "healthy.csv")
    save_trajectory(faulty, out_dir / "trajectory.csv")


def cmd_fit(config: ExperimentConfig, out_dir: Path) -> None:
    seeds = trial_seeds(config.monte_carlo.master_seed, 0)
    healthy = prepare_healthy_data(config, config.model.build(), seeds)
    kernel = fit_kernel(config, healthy.model, healthy.estimation)
    dictionaries = fit_dictionaries(config, kernel)
    threshold = calibrate_threshold(config, kernel, healthy.validation)
    save_filter(kernel, out_dir / "filter.json", threshold)
    save_dictionaries(dictionaries, out_dir / "dictionaries.json")
    logger.info(f"Filter (order {kernel.estimated_n}, r={kernel.r}) and dictionaries written to {out_dir}")


def cmd_classify(config: ExperimentConfig, out_dir: Path, trajectory_path: str, filter_dir: Optional[str]) -> None:
    source = Path(filter_dir) if filter_dir else out_dir
    kernel = load_filter(source / "filter.json")
    dictionaries = load_dictionaries(source / "dictionaries.json")
    threshold = config.thresholds.residual
    if threshold is None:
        threshold = load_threshold(source / "filter.json")
    if threshold is None:
        raise ConfigValidationError(
            "no residual threshold: set thresholds.residual or fit with a calibrated filter",
            {"thresholds.residual": "missing"},
        )

    data = load_trajectory(trajectory_path)
    trace = residual(kernel, data.u, data.y)
    angle_trace = angles(trace, dictionaries)
    decisions = decide(angle_trace, threshold, config.thresholds.tie)

    frame = decisions_frame(angle_trace, decisions)
    if data.active is not None:
        frame["truth"] = [c.label if c is not None else "healthy" for c in data.active[: len(decisions)]]
        frame["transient"] = transient_mask(data.active, kernel.L, len(decisions))
    out_dir.mkdir(parents=True, exist_ok=True)
    residuals_frame(trace).to_csv(out_dir / "residuals.csv", index=False, float_format="%.17g")
    angle_trace.to_frame().to_csv(out_dir / "angles.csv", index=False, float_format="%.17g")
    frame.to_csv(out_dir / "decisions.csv", index=False, float_format="%.17g")
    logger.info(f"Classified {len(decisions)} windows of {trajectory_path}")


def cmd_discern(config: ExperimentConfig, out_dir: Path) -> None:
    seeds = trial_seeds(config.monte_carlo.master_seed, 0)
    model = config.model.build()
    healthy = prepare_healthy_data(config, model, seeds)
    kernel = fit_kernel(config, healthy.model, healthy.estimation)
    report = intersection_report(
        fit_dictionaries(config, kernel),
        oracle=model if config.discern.use_oracle else None,
        L=config.L,
        rel_tol=config.discern.rel_tol,
        strict=config.discern.strict,
    )
    report.save(out_dir / "discernibility.json")
    for record in report.records:
        pair = "+".join(c.label for c in record.channels)
        logger.info(
            f"{pair:8s} d_cap={record.d_cap} formula={record.formula} predicted={record.predicted} "
            f"[{record.theorem_case.value}]"
        )


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.verb == "reference-config":
        sys.stdout.write(ConfigLoader.reference_config())
        return EXIT_OK

    configure_logging(args.quiet)
    try:
        config = load_config(args)
        out_dir = _out_dir(args, config)
        if args.verb == "simulate":
            cmd_simulate(config, out_dir)
        elif args.verb == "fit":
            cmd_fit(config, out_dir)
        elif args.verb == "classify":
            cmd_classify(config, out_dir, args.trajectory, args.filter_dir)
        elif args.verb == "discern":
            cmd_discern(config, out_dir)
        elif args.verb == "run":
            run_scenario(config, out_dir=out_dir)
        elif args.verb == "montecarlo":
            monte_carlo(config, out_dir, trials=args.trials, workers=args.workers)
    except ConfigValidationError as exc:
        logger.error(str(exc))
        for field_name, message in exc.field_errors.items():
            logger.error(f"  {field_name}: {message}")
        return EXIT_CONFIG_ERROR
    except (FaultIsolationError, FileNotFoundError) as exc:
        logger.error(str(exc))
        return EXIT_PIPELINE_ERROR
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
