"""Subcommand handlers: each takes (args, config) and returns an exit status."""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

import uvicorn

from bulbpatch.api.fastapi_app import create_app
from bulbpatch.config import get_settings, read_config_file, resolve_config_path
from bulbpatch.config.models import ExperimentConfig
from bulbpatch.core.attack import render_params
from bulbpatch.core.board import export_board as build_board_layout
from bulbpatch.core.calibrate import fit_bulb_profile, fit_bulb_profiles, temperature_to_intensity
from bulbpatch.core.evaluate import APReport
from bulbpatch.core.imaging import GaussianPatchParams
from bulbpatch.core.scenegen import make_dataset
from bulbpatch.data_io.exports import export_board_table, export_loss_history, export_pr_points, export_reports, load_pr_points
from bulbpatch.data_io.images import save_image
from bulbpatch.data_io.manifest import load_dataset, save_dataset
from bulbpatch.data_io.params_file import load_params, save_params
from bulbpatch.data_io.profiles import read_profiles
from bulbpatch.integrations.detector_server import DetectorTCPServer, serve_stream
from bulbpatch.services.detectors import DetectorRegistry
from bulbpatch.services.experiments import ExperimentService
from bulbpatch.services.plotting import plot_pr_curves
from bulbpatch.utils.error_handling import EXIT_OK
from bulbpatch.utils.exceptions import ConfigurationError, ValidationError
from bulbpatch.utils.observability import log_event

logger = logging.getLogger(__name__)

PARAMS_FILE = "patch_params.json"
PATCH_IMAGE = "patch.png"
LOSS_HISTORY = "loss_history.csv"
SUMMARY = "summary.json"
REPORTS = "ap_reports.csv"
PR_POINTS = "pr_points.csv"
BOARD_TABLE = "board_layout.csv"


def _output_dir(out: Optional[str], config: ExperimentConfig) -> Path:
    path = Path(out or config.experiment.output_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _data_dir(data: Optional[str], config: ExperimentConfig) -> Path:
    return Path(data or config.experiment.dataset_dir)


def _write_json(path: Path, payload: dict) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2))
    return path


def _write_reports(reports: List[APReport], out_dir: Path, prefix: str = "") -> None:
    export_reports(reports, out_dir / f"{prefix}{REPORTS}")
    export_pr_points(reports, out_dir / f"{prefix}{PR_POINTS}")
    for r in reports:
        logger.info(
            f"{r.adapter} {r.label} x{r.scale:g}: AP={r.ap_clean_gt:.4f} drop={r.ap_drop:.2f}% "
            f"(gt={r.n_gt}, predictions={r.n_predictions})"
        )


def fit_bulb(args: argparse.Namespace, config: ExperimentConfig) -> int:
    profiles = read_profiles(args.profile)
    fit = fit_bulb_profile(profiles[0]) if len(profiles) == 1 else fit_bulb_profiles(profiles)
    s = temperature_to_intensity(fit.amplitude, config.calibration.camera_span)
    out = Path(args.out) if args.out else _output_dir(None, config) / "bulb_fit.json"
    _write_json(out, {**fit.model_dump(), "s": s, "camera_span": list(config.calibration.camera_span)})
    log_event("calibrate.fit", amplitude=fit.amplitude, sigma=fit.sigma, rmse=fit.rmse, s=s, converged=fit.converged)

    if args.write_config:
        raw = read_config_file(resolve_config_path(args.config))
        raw.setdefault("patch", {}).update({"s": s, "sigma": fit.sigma})
        _write_json(Path(args.write_config), raw)
        logger.info(f"Wrote config with fitted patch.s={s:.6g} patch.sigma={fit.sigma:.6g} to {args.write_config}")
    return EXIT_OK


def gen_data(args: argparse.Namespace, config: ExperimentConfig) -> int:
    n_train = args.train if args.train is not None else config.scene.n_train
    n_test = args.test if args.test is not None else config.scene.n_test
    dataset = make_dataset(config.experiment.seed, n_train, n_test, config.scene.scene_config())
    out = Path(args.out or config.experiment.dataset_dir)
    save_dataset(dataset, out, config.experiment.image_format)
    crowded = sum(scene.crowded for scene in dataset.train + dataset.test)
    if crowded:
        logger.warning(f"{crowded} scene(s) hold fewer persons than drawn (placement retries exhausted)")
    return EXIT_OK


def optimize(args: argparse.Namespace, config: ExperimentConfig) -> int:
    dataset = load_dataset(_data_dir(args.data, config))
    out_dir = _output_dir(args.out, config)
    initial = load_params(args.init)[0] if args.init else None
    service = ExperimentService(config)
    try:
        result = service.optimize(dataset.train, initial=initial)
    finally:
        service.close()

    save_params(out_dir / PARAMS_FILE, result.params, result.side_px, config.patch.template())
    save_image(result.patch, out_dir / PATCH_IMAGE)
    export_loss_history(result.state.history, out_dir / LOSS_HISTORY)
    attack = config.attack_config()
    history = result.state.history
    summary = {
        "seed": config.experiment.seed,
        "mode": attack.mode.value,
        "optimizer": attack.resolved_optimizer.value,
        "M": config.patch.M,
        "iterations": len(history),
        "parameter_count": result.parameter_count,
        "pixel_parameter_count": result.side_px * result.side_px,
        "initial_loss": history[0].total if history else None,
        "final_loss": history[-1].total if history else None,
        "smoothed_initial_objectness": result.state.smoothed(head=True) if history else None,
        "smoothed_final_objectness": result.state.smoothed() if history else None,
    }
    _write_json(out_dir / SUMMARY, summary)
    logger.info(f"Optimized patch written to {out_dir}")
    return EXIT_OK


def evaluate(args: argparse.Namespace, config: ExperimentConfig) -> int:
    dataset = load_dataset(_data_dir(args.data, config))
    out_dir = _output_dir(args.out, config)
    params, side = load_params(args.params)
    patch = render_params(params, side)
    service = ExperimentService(config)
    try:
        test = service.eval_split(dataset)
        reports = service.size_sweep(test, patch) if args.sweep_size else service.evaluate(test, patch)
        _write_reports(reports, out_dir)
        if args.sweep_count:
            _write_reports(service.count_sweep(dataset.train, test), out_dir, prefix="count_")
    finally:
        service.close()
    return EXIT_OK


def transfer(args: argparse.Namespace, config: ExperimentConfig) -> int:
    dataset = load_dataset(_data_dir(args.data, config))
    out_dir = _output_dir(args.out, config)
    service = ExperimentService(config)
    try:
        reports = service.transfer(dataset.train, service.eval_split(dataset))
    finally:
        service.close()
    _write_reports(reports, out_dir, prefix="transfer_")
    return EXIT_OK


def render(args: argparse.Namespace, config: ExperimentConfig) -> int:
    params, side = load_params(args.params)
    save_image(render_params(params, side), args.out)
    logger.info(f"Rendered {args.params} to {args.out}")
    return EXIT_OK


def export_board(args: argparse.Namespace, config: ExperimentConfig) -> int:
    params, side = load_params(args.params)
    if not isinstance(params, GaussianPatchParams):
        raise ValidationError("export-board needs a gaussian-mode parameter file")
    layout = build_board_layout(
        params,
        side,
        board_cm=args.board_cm if args.board_cm is not None else config.board.board_cm,
        min_spacing_cm=args.min_spacing_cm if args.min_spacing_cm is not None else config.board.min_spacing_cm,
    )
    out = Path(args.out) if args.out else _output_dir(None, config) / BOARD_TABLE
    export_board_table(layout, out)
    return EXIT_OK


def plot_pr(args: argparse.Namespace, config: ExperimentConfig) -> int:
    out_dir = Path(config.experiment.output_dir)
    points = load_pr_points(args.points or out_dir / PR_POINTS)
    plot_pr_curves(
        points,
        args.out or out_dir / "pr_curves.png",
        adapter=args.adapter,
        scale=None if args.all_scales else args.scale,
    )
    return EXIT_OK


def serve_detector(args: argparse.Namespace, config: ExperimentConfig) -> int:
    name = args.detector or next((d.name for d in config.detectors if d.kind == "toy"), None)
    if name is None:
        raise ConfigurationError("no in-process detector to serve")
    settings = get_settings()
    with DetectorRegistry(config) as registry:
        detector = registry.get(name)
        if args.transport == "stdio":
            served = serve_stream(detector, sys.stdin.buffer, sys.stdout.buffer)
            log_event("detector_server.stdio_closed", detector=name, served=served)
        elif args.transport == "tcp":
            spec = config.detector_spec(name)
            address = (args.host or settings.api_host, args.port if args.port is not None else spec.port)
            with DetectorTCPServer(address, detector) as server:
                logger.info(f"Serving {name} on tcp://{address[0]}:{server.server_address[1]}")
                try:
                    server.serve_forever()
                except KeyboardInterrupt:
                    logger.info("Detector server stopped")
        else:
            uvicorn.run(
                create_app(detector),
                host=args.host or settings.api_host,
                port=args.port if args.port is not None else settings.api_port,
            )
    return EXIT_OK
