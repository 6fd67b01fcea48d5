"""
bulbpatch command line

Usage: python -m bulbpatch <subcommand> [--config PATH] [--seed N] [--set section.key=value ...]

Every subcommand reads one experiment config plus flag overrides and logs the
resolved config and seed. Exit status: 0 success, 1 failure, 2 usage error.
"""

import argparse
import logging
import sys
from typing import List, Optional

from bulbpatch import __version__
from bulbpatch.cli import commands
from bulbpatch.config import get_settings, load_config
from bulbpatch.utils.error_handling import EXIT_FAILURE, EXIT_USAGE, format_error_message, log_exception
from bulbpatch.utils.observability import track_operation

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="experiment config JSON (default: BULBPATCH_CONFIG_PATH or packaged defaults)")
    common.add_argument("--seed", type=int, help="experiment seed (overrides experiment.seed)")
    common.add_argument(
        "--set", dest="overrides", action="append", default=[], metavar="SECTION.KEY=VALUE",
        help="override one config value; VALUE is parsed as JSON when possible",
    )
    common.add_argument("--log-level", help="logging level (default: config logging.level)")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(
        prog="bulbpatch",
        description="Adversarial thermal-infrared Gaussian bulb patches",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="<subcommand>", required=True)

    p = sub.add_parser("fit-bulb", parents=[common], help="fit the bulb thermal profile")
    p.add_argument("profile", help="profile table (position_px, temperature_C[, line])")
    p.add_argument("--out", help="fit result JSON (default: <output_dir>/bulb_fit.json)")
    p.add_argument("--write-config", help="write a copy of the config with patch.s and patch.sigma from the fit")
    p.set_defaults(handler=commands.fit_bulb)

    p = sub.add_parser("gen-data", parents=[common], help="generate a synthetic scene dataset")
    p.add_argument("--train", type=int, help="training scenes (default: scene.n_train)")
    p.add_argument("--test", type=int, help="test scenes (default: scene.n_test)")
    p.add_argument("--out", help="dataset directory (default: experiment.dataset_dir)")
    p.set_defaults(handler=commands.gen_data)

    p = sub.add_parser("optimize", parents=[common], help="optimize a patch against the attack detectors")
    p.add_argument("--data", help="dataset directory (default: experiment.dataset_dir)")
    p.add_argument("--out", help="output directory (default: experiment.output_dir)")
    p.add_argument("--init", help="parameter file to start from")
    p.set_defaults(handler=commands.optimize)

    p = sub.add_parser("evaluate", parents=[common], help="AP of a patch against its controls")
    p.add_argument("--params", required=True, help="patch parameter file")
    p.add_argument("--data", help="dataset directory (default: experiment.dataset_dir)")
    p.add_argument("--out", help="output directory (default: experiment.output_dir)")
    p.add_argument("--sweep-size", action="store_true", help="evaluate at every evaluation.scales entry")
    p.add_argument("--sweep-count", action="store_true", help="re-optimize for every evaluation.counts entry")
    p.set_defaults(handler=commands.evaluate)

    p = sub.add_parser("transfer", parents=[common], help="single vs ensemble patch on held-out detectors")
    p.add_argument("--data", help="dataset directory (default: experiment.dataset_dir)")
    p.add_argument("--out", help="output directory (default: experiment.output_dir)")
    p.set_defaults(handler=commands.transfer)

    p = sub.add_parser("render", parents=[common], help="render a parameter file to an image")
    p.add_argument("--params", required=True, help="patch parameter file")
    p.add_argument("--out", required=True, help="image path (.png or .pgm)")
    p.set_defaults(handler=commands.render)

    p = sub.add_parser("export-board", parents=[common], help="bulb positions in centimetres")
    p.add_argument("--params", required=True, help="patch parameter file")
    p.add_argument("--out", help="layout CSV (default: <output_dir>/board_layout.csv)")
    p.add_argument("--board-cm", type=float, help="board side in cm (default: board.board_cm)")
    p.add_argument("--min-spacing-cm", type=float, help="spacing warning threshold (default: board.min_spacing_cm)")
    p.set_defaults(handler=commands.export_board)

    p = sub.add_parser("plot-pr", parents=[common], help="plot PR curves from a PR points CSV")
    p.add_argument("--points", help="PR points CSV (default: <output_dir>/pr_points.csv)")
    p.add_argument("--out", help="image path (default: <output_dir>/pr_curves.png)")
    p.add_argument("--adapter", help="only this detector")
    p.add_argument("--scale", type=float, default=1.0, help="only this patch scale (default 1)")
    p.add_argument("--all-scales", action="store_true", help="plot every scale")
    p.set_defaults(handler=commands.plot_pr)

    p = sub.add_parser("serve-detector", parents=[common], help="serve an in-process detector to external clients")
    p.add_argument("--detector", help="detector name from the config (default: first toy detector)")
    p.add_argument("--transport", choices=["stdio", "tcp", "http"], default="stdio")
    p.add_argument("--host", help="bind address (default: settings api_host)")
    p.add_argument("--port", type=int, help="bind port (default: detector port for tcp, api_port for http)")
    p.set_defaults(handler=commands.serve_detector)

    return parser


def _configure_logging(level: str) -> None:
    logging.basicConfig(level=getattr(logging, level.upper(), logging.INFO), format=LOG_FORMAT, force=True)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else int(exc.code or 0)

    _configure_logging(args.log_level or get_settings().log_level)
    operation = args.command
    try:
        config = load_config(args.config, args.overrides, args.seed)
        _configure_logging(args.log_level or config.logging.level)
        logger.info(f"Resolved config: {config.model_dump_json()}")
        logger.info(f"Seed: {config.experiment.seed}")
        with track_operation("cli.command", command=operation, seed=config.experiment.seed):
            return args.handler(args, config)
    except Exception as exc:
        log_exception(exc, operation, {"argv": argv if argv is not None else sys.argv[1:]})
        print(format_error_message(exc, operation), file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
