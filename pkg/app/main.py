"""Command-line entry point: graph interpolation for classification, inpainting and colorization."""
import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from pydantic import ValidationError

from app.config import RuntimeSection, Settings, load_settings
from app.handlers.run_handler import RunHandler
from app.models.requests import GraphOptions, RunConfig, SolverKind
from app.services.errors import ConfigValidationError
from app.utils.error_handler import handle_run_error

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wntv",
        description="Weighted nonlocal total variation interpolation on point clouds and images.",
    )
    parser.add_argument("--command", required=True, choices=["ssl", "inpaint", "colorize"])
    parser.add_argument("--config", type=Path, help="TOML config file")
    parser.add_argument("--solver", choices=[kind.value for kind in SolverKind])

    solver = parser.add_argument_group("solver")
    solver.add_argument("--lambda", dest="lam", type=float, help="Bregman penalty")
    solver.add_argument("--mu", type=float, help="Label weight (default |V|/|S|)")
    solver.add_argument("--bregman-iters", type=int, help="Split Bregman iteration cap")

    graph = parser.add_argument_group("graph")
    graph.add_argument("--k", type=int, help="Neighbors kept per point")
    graph.add_argument("--r-sigma", type=int, help="Neighbor rank that sets the bandwidth")
    graph.add_argument("--tree", action="store_true", help="Use a k-d tree for neighbor search")

    image = parser.add_argument_group("images")
    image.add_argument("--patch", type=str, help="Patch size S or S1xS2 (odd)")
    image.add_argument("--no-semi-local", action="store_true", help="Do not append pixel coordinates to patches")
    image.add_argument("--outer-iters", type=int, help="Graph rebuild cycles for inpainting")
    image.add_argument("--rate", type=float, help="Observed fraction when no mask file is given")
    image.add_argument("--mask", type=Path, help="P5 mask, nonzero = observed")
    image.add_argument("--truth", type=Path, help="Ground-truth image for PSNR (colorize: color source)")
    image.add_argument("--samples", type=Path, help="Color sample PPM for colorize")

    ssl = parser.add_argument_group("classification")
    ssl.add_argument("--dataset", choices=["mnist", "blobs"], default="mnist")
    ssl.add_argument("--labels-path", type=Path, help="IDX labels file")
    ssl.add_argument("--label-count", type=int, help="Number of labeled points")
    ssl.add_argument("--subset", type=int, help="Stratified subset size")
    ssl.add_argument("--unstratified", action="store_true", help="Sample labels without per-class coverage")

    parser.add_argument("--seed", type=int)
    parser.add_argument("--input", type=Path, help="Input image (PGM/PPM) or IDX images file")
    parser.add_argument("--output", type=Path)
    parser.add_argument("--metrics", type=Path, help="Metrics log destination")
    parser.add_argument("--summary", type=Path, help="JSON summary destination")
    parser.add_argument("--workers", type=int, help="Concurrent channel/class solves")
    parser.add_argument("--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    return parser


def _parse_patch(value: str) -> tuple[int, int]:
    parts = value.lower().split("x")
    if len(parts) == 1:
        parts = parts * 2
    if len(parts) != 2:
        raise ValueError(f"--patch expects S or S1xS2, got '{value}'")
    return int(parts[0]), int(parts[1])


def _drop_none(values: dict) -> dict:
    return {key: value for key, value in values.items() if value is not None}


def build_run_config(args: argparse.Namespace, app_settings: Settings) -> RunConfig:
    """
    Merge CLI flags over settings into a validated RunConfig.

    Raises:
        ValidationError: a merged value is out of range
        ValueError: a flag could not be parsed
    """
    section = getattr(app_settings, args.command)
    graph = section.graph.model_dump()
    graph.update(_drop_none({"k_sparsify": args.k, "r_sigma": args.r_sigma}))
    if args.tree:
        graph["method"] = "tree"

    solver_options = app_settings.solver_options.model_dump(by_alias=True)
    solver_options.update(_drop_none({"lambda": args.lam, "mu": args.mu, "max_bregman_iters": args.bregman_iters}))

    patch = app_settings.patch.model_dump()
    if args.patch is not None:
        patch["s1"], patch["s2"] = _parse_patch(args.patch)
    if args.no_semi_local:
        patch["semi_local"] = False

    label_count = args.label_count
    if label_count is None and args.command == "ssl" and args.dataset == "mnist":
        label_count = app_settings.ssl.label_count

    rate = args.rate
    if rate is None and args.mask is None and args.command != "ssl":
        rate = section.rate

    return RunConfig(
        command=args.command,
        solver=args.solver or app_settings.solver,
        graph=GraphOptions(**graph),
        solver_options=solver_options,
        patch=patch,
        outer_iters=app_settings.inpaint.outer_iters if args.outer_iters is None else args.outer_iters,
        seed=app_settings.seed if args.seed is None else args.seed,
        rate=rate,
        dataset=args.dataset,
        label_count=label_count,
        subset=args.subset,
        stratified=app_settings.ssl.stratified and not args.unstratified,
        input=args.input,
        mask=args.mask,
        truth=args.truth,
        labels_path=args.labels_path,
        samples=args.samples,
        output=args.output,
        metrics=args.metrics,
        summary=args.summary,
    )


def _problems(error: Exception) -> list[str]:
    if isinstance(error, ValidationError):
        return [f"{'.'.join(str(part) for part in err['loc']) or 'config'}: {err['msg']}" for err in error.errors()]
    return [str(error)]


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)

    try:
        if args.config is not None and not args.config.is_file():
            raise ValueError(f"config file {args.config} does not exist")
        app_settings = load_settings(args.config)
    except (ValidationError, ValueError) as e:
        logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
        return handle_run_error(ConfigValidationError(_problems(e)), "-", 0.0)

    # Configure logging
    logging.basicConfig(
        level=getattr(logging, args.log_level or app_settings.runtime.log_level.upper()),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )

    try:
        config = build_run_config(args, app_settings)
        runtime = app_settings.runtime
        if args.workers is not None:
            runtime = RuntimeSection.model_validate({**runtime.model_dump(), "max_workers": args.workers})
    except (ValidationError, ValueError) as e:
        return handle_run_error(ConfigValidationError(_problems(e)), "-", 0.0)

    return RunHandler(runtime).run(config)


if __name__ == "__main__":
    sys.exit(main())
