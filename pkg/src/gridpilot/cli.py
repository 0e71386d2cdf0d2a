"""Command-line interface.

Subcommands wire the library into reproducible pipelines: embed a pilot,
attack an image, estimate the applied transform, rectify, embed/extract a
synchronized watermark, and run full evaluation sweeps that write CSV,
JSON and figure reports.

Exit codes: 0 success, 1 usage or configuration error, 2 pilot detection
failure, 3 I/O error.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import sys
from pathlib import Path

import numpy as np

from .attacks import AttackSpec, CropSpec
from .config import RunConfig, load_config
from .errors import (
    ConfigError,
    DecodeError,
    DetectionFailureError,
    DomainError,
    GridPilotError,
    UnsupportedFormatError,
)
from .fixtures import generate_fixture
from .imagery import load_image, psnr, rgb_to_yuv, save_image, yuv_to_rgb
from .matrices import TransformEstimate
from .metrics import TrialRecord, report_json, trials_to_csv
from .pilot import build_mask, mask_to_text
from .pipeline import (
    estimate_transform,
    extract_synced,
    make_stego,
    run_trial,
)
from .watermark import WatermarkMessage
from . import suites

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DETECTION = 2
EXIT_IO = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def _parse_crop(text: str) -> CropSpec:
    """Parse WxH[@x,y|@center] crop syntax."""
    body, _, anchor = text.partition("@")
    try:
        w, h = (int(v) for v in body.lower().split("x"))
    except ValueError:
        raise ConfigError(f"bad crop size {text!r}, expected WxH[@x,y|@center]")
    if not anchor or anchor == "center":
        return CropSpec(width=w, height=h, mode="center")
    try:
        x, y = (int(v) for v in anchor.split(","))
    except ValueError:
        raise ConfigError(f"bad crop anchor {anchor!r}, expected x,y or center")
    return CropSpec(width=w, height=h, mode="at", x=x, y=y)


def _parse_size(text: str) -> tuple[int, int]:
    try:
        w, h = (int(v) for v in text.lower().split("x"))
        return w, h
    except ValueError:
        raise ConfigError(f"bad size {text!r}, expected WxH")


def _config_from_args(args) -> RunConfig:
    cfg = load_config(args.config) if getattr(args, "config", None) else RunConfig()
    for attr, key in (("gamma", "gamma"), ("line_width", "line_width"),
                      ("delta", "delta"), ("angle_step", "angle_step"),
                      ("tau", "tau"), ("seed", "seed"), ("jobs", "jobs")):
        val = getattr(args, key, None)
        if val is not None:
            setattr(cfg, attr, val)
    if getattr(args, "attack", None):
        text = args.attack
        if not text.lstrip().startswith("{"):
            with open(text, "r", encoding="utf-8") as fh:
                text = fh.read()
        cfg.attack = AttackSpec.from_json(text)
    if getattr(args, "crop", None):
        crop = _parse_crop(args.crop)
        if cfg.attack is None:
            cfg.attack = AttackSpec()
        cfg.attack.crop = crop
    return cfg


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="JSON or key=value config file")
    p.add_argument("--gamma", type=int, help="grid interval in pixels")
    p.add_argument("--line-width", dest="line_width", type=int)
    p.add_argument("--delta", type=float, help="QIM step")
    p.add_argument("--angle-step", dest="angle_step", type=float)
    p.add_argument("--tau", type=float, help="sinogram denoise threshold")
    p.add_argument("--seed", type=int)
    p.add_argument("--jobs", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gridpilot", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("embed", help="embed the pilot grid into an image")
    p.add_argument("--input", "-i", required=True)
    p.add_argument("--output", "-o", required=True)
    p.add_argument("--dump-mask", help="write a text dump of the pilot mask")
    _add_common(p)

    p = sub.add_parser("attack", help="apply a geometric attack spec")
    p.add_argument("--input", "-i", required=True)
    p.add_argument("--output", "-o", required=True)
    p.add_argument("--attack", help="attack JSON (inline or a file path)")
    p.add_argument("--crop", help="WxH[@x,y|@center]")
    _add_common(p)

    p = sub.add_parser("estimate", help="estimate the transform from a stego image")
    p.add_argument("--input", "-i", required=True)
    p.add_argument("--output", "-o", help="estimate JSON path (default stdout)")
    p.add_argument("--dump-sinogram")
    p.add_argument("--dump-variance")
    p.add_argument("--dump-spectrum")
    _add_common(p)

    p = sub.add_parser("rectify", help="invert an estimated transform")
    p.add_argument("--input", "-i", required=True)
    p.add_argument("--output", "-o", required=True)
    p.add_argument("--estimate", help="estimate JSON file")
    p.add_argument("--matrix", help="inline 2x2 matrix JSON")
    p.add_argument("--twin", action="store_true", help="use the 180-degree twin")
    _add_common(p)

    p = sub.add_parser("wm-embed", help="embed watermark plus pilot")
    p.add_argument("--input", "-i", required=True)
    p.add_argument("--output", "-o", required=True)
    p.add_argument("--message", help="300-bit message file; random if omitted")
    p.add_argument("--message-out", help="write the embedded message here")
    _add_common(p)

    p = sub.add_parser("wm-extract", help="estimate, rectify and decode the watermark")
    p.add_argument("--input", "-i", required=True)
    p.add_argument("--truth", required=True,
                   help="message file used to resolve the 180-degree ambiguity")
    p.add_argument("--output", "-o", help="write the decoded message here")
    _add_common(p)

    p = sub.add_parser("evaluate", help="run an attack suite over fixtures")
    p.add_argument("--suite", default="single",
                   choices=["identity", "single", "composite", "wm"],
                   help="built-in attack suite")
    p.add_argument("--attacks", help="JSON file with custom labeled attacks")
    p.add_argument("--fixtures", type=int, default=3,
                   help="number of synthetic fixtures")
    p.add_argument("--size", default="2048x2048", help="fixture size WxH")
    p.add_argument("--crop", default="1080x1080@center")
    p.add_argument("--report", required=True, help="report directory")
    p.add_argument("--no-figures", action="store_true")
    _add_common(p)

    p = sub.add_parser("sweep-interval", help="relative error and PSNR vs grid interval")
    p.add_argument("--gammas", default="40,50,60,70,80,90,100,110,120")
    p.add_argument("--fixtures", type=int, default=3)
    p.add_argument("--size", default="2048x2048")
    p.add_argument("--crop", default="1080x1080@center")
    p.add_argument("--report", required=True)
    p.add_argument("--no-figures", action="store_true")
    _add_common(p)

    return parser


def _cmd_embed(args) -> int:
    cfg = _config_from_args(args)
    image = load_image(args.input)
    stego, quality = make_stego(image, cfg.pilot())
    save_image(stego, args.output)
    if args.dump_mask:
        mask = build_mask(image.width, image.height, cfg.pilot())
        Path(args.dump_mask).write_text(mask_to_text(mask))
    print(f"PSNR: {quality:.2f} dB")
    return EXIT_OK


def _cmd_attack(args) -> int:
    cfg = _config_from_args(args)
    if cfg.attack is None:
        raise ConfigError("attack requires --attack and/or --crop")
    from .attacks import apply_attack

    img = rgb_to_yuv(load_image(args.input))
    attacked = apply_attack(img, cfg.attack)
    save_image(yuv_to_rgb(attacked), args.output)
    print(f"canvas: {attacked.width}x{attacked.height}")
    return EXIT_OK


def _cmd_estimate(args) -> int:
    cfg = _config_from_args(args)
    img = rgb_to_yuv(load_image(args.input))
    try:
        estimate = estimate_transform(img, cfg.pilot(), cfg.estimator())
    except DetectionFailureError as exc:
        diagnostic = json.dumps({"error": str(exc), "stage": exc.stage}, indent=2)
        if args.output:
            Path(args.output).write_text(diagnostic + "\n")
        print(diagnostic, file=sys.stderr)
        print("pilot not found", file=sys.stderr)
        return EXIT_DETECTION
    _write_estimate_dumps(args, img, cfg)
    text = estimate.to_json()
    if args.output:
        Path(args.output).write_text(text + "\n")
    else:
        print(text)
    return EXIT_OK


def _write_estimate_dumps(args, img, cfg: RunConfig):
    if not (args.dump_sinogram or args.dump_variance or args.dump_spectrum):
        return
    from .angles import profile_to_csv, variance_profile
    from .intervals import spectrum_to_csv, split_fields
    from .pilot import extract_ternary_field
    from .radon import radon_transform, sinogram_to_csv

    field = extract_ternary_field(img, cfg.pilot().qim)
    sino = radon_transform(field.values.astype(np.float64), cfg.angle_step)
    if args.dump_sinogram:
        Path(args.dump_sinogram).write_text(sinogram_to_csv(sino))
    if args.dump_variance:
        Path(args.dump_variance).write_text(profile_to_csv(variance_profile(sino)))
    if args.dump_spectrum:
        comp_v, _ = split_fields(field)
        col = sino.coeffs[:, 0]
        Path(args.dump_spectrum).write_text(spectrum_to_csv(col))


def _cmd_rectify(args) -> int:
    from .attacks import rectify

    if bool(args.estimate) == bool(args.matrix):
        raise ConfigError("rectify needs exactly one of --estimate or --matrix")
    if args.estimate:
        est = TransformEstimate.from_json(Path(args.estimate).read_text())
        matrix = est.twin if args.twin else est.matrix
    else:
        matrix = np.asarray(json.loads(args.matrix), dtype=float)
        if matrix.shape != (2, 2):
            raise ConfigError("matrix must be 2x2")
        if args.twin:
            matrix = -matrix
    img = rgb_to_yuv(load_image(args.input))
    save_image(yuv_to_rgb(rectify(img, matrix)), args.output)
    return EXIT_OK


def _cmd_wm_embed(args) -> int:
    cfg = _config_from_args(args)
    if args.message:
        message = WatermarkMessage.from_text(Path(args.message).read_text(),
                                             tile_px=cfg.gamma)
    else:
        message = WatermarkMessage.random(cfg.seed, tile_px=cfg.gamma)
    image = load_image(args.input)
    stego, quality = make_stego(image, cfg.pilot(), message)
    save_image(stego, args.output)
    if args.message_out:
        Path(args.message_out).write_text(message.to_text())
    print(f"PSNR: {quality:.2f} dB")
    return EXIT_OK


def _cmd_wm_extract(args) -> int:
    cfg = _config_from_args(args)
    truth = WatermarkMessage.from_text(Path(args.truth).read_text(),
                                       tile_px=cfg.gamma)
    img = rgb_to_yuv(load_image(args.input))
    try:
        estimate = estimate_transform(img, cfg.pilot(), cfg.estimator())
        message, rate, _ = extract_synced(img, estimate, cfg.pilot(), truth)
    except DetectionFailureError as exc:
        print(json.dumps({"error": str(exc), "stage": exc.stage}), file=sys.stderr)
        return EXIT_DETECTION
    if args.output:
        Path(args.output).write_text(message.to_text())
    print(f"BER: {rate:.4f}")
    return EXIT_OK


def _labeled_attacks(args, crop: CropSpec) -> list[tuple[str, AttackSpec, bool]]:
    """(label, spec, with_watermark) triples for the evaluate command."""
    out = []
    if args.attacks:
        data = json.loads(Path(args.attacks).read_text())
        for entry in data.get("attacks", []):
            spec = AttackSpec.from_json(json.dumps(entry))
            label = entry.get("label", "custom")
            if spec.crop is None:
                spec.crop = crop
            out.append((label, spec, False))
        return out
    if args.suite == "identity":
        items = [("identity", AttackSpec())]
    elif args.suite == "single":
        items = suites.single_attack_suite()
    elif args.suite == "composite":
        items = suites.composite_attack_suite()
    else:
        items = suites.watermark_attack_suite()
    wm = args.suite == "wm"
    for label, spec in items:
        spec.crop = CropSpec(width=crop.width, height=crop.height,
                             mode=crop.mode, x=crop.x, y=crop.y)
        out.append((label, spec, wm))
    return out


def _trial_task(payload: tuple) -> TrialRecord:
    """Worker entry: everything needed to run one trial, picklable."""
    (label, attack_json, with_wm, seed, width, height,
     gamma, line_width, delta, angle_step, tau) = payload
    cfg = RunConfig(gamma=gamma, line_width=line_width, delta=delta,
                    angle_step=angle_step, tau=tau)
    spec = AttackSpec.from_json(attack_json)
    image = generate_fixture(width, height, seed)
    truth = spec.composite_matrix()
    message = WatermarkMessage.random(seed + 7919, tile_px=gamma) if with_wm else None
    record = run_trial(image, f"fixture-{seed}", spec, cfg.pilot(), truth,
                       cfg.estimator(), message=message, attack_label=label)
    return record


def _run_trials(tasks: list[tuple], jobs: int) -> list[TrialRecord]:
    if jobs <= 1:
        return [_trial_task(t) for t in tasks]
    with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_trial_task, tasks))


def _write_report(trials: list[TrialRecord], report_dir: Path,
                  render_figures: bool) -> None:
    report_dir.mkdir(parents=True, exist_ok=True)
    (report_dir / "report.csv").write_text(trials_to_csv(trials))
    (report_dir / "report.json").write_text(report_json(trials) + "\n")
    if render_figures:
        from .plots import render_report_figures

        for path in render_report_figures(trials, report_dir):
            print(f"figure: {path}")
    print(f"report: {report_dir / 'report.csv'}")


def _cmd_evaluate(args) -> int:
    cfg = _config_from_args(args)
    width, height = _parse_size(args.size)
    crop = _parse_crop(args.crop)
    attacks = _labeled_attacks(args, crop)
    tasks = []
    for label, spec, with_wm in attacks:
        for i in range(args.fixtures):
            tasks.append((
                label, spec.to_json(), with_wm, cfg.seed + i, width, height,
                cfg.gamma, cfg.line_width, cfg.delta, cfg.angle_step, cfg.tau,
            ))
    tasks.sort(key=lambda t: (t[0], t[3]))
    trials = _run_trials(tasks, cfg.jobs)
    trials.sort(key=lambda t: (t.attack, t.image))
    _write_report(trials, Path(args.report), not args.no_figures)
    return EXIT_OK


def _cmd_sweep_interval(args) -> int:
    cfg = _config_from_args(args)
    width, height = _parse_size(args.size)
    crop = _parse_crop(args.crop)
    try:
        gammas = [int(g) for g in args.gammas.split(",") if g.strip()]
    except ValueError:
        raise ConfigError(f"bad gamma list {args.gammas!r}")
    tasks = []
    for gamma in gammas:
        spec = AttackSpec(crop=CropSpec(width=crop.width, height=crop.height,
                                        mode=crop.mode, x=crop.x, y=crop.y))
        for i in range(args.fixtures):
            tasks.append((
                f"gamma={gamma}", spec.to_json(), False, cfg.seed + i,
                width, height, gamma, cfg.line_width, cfg.delta,
                cfg.angle_step, cfg.tau,
            ))
    tasks.sort(key=lambda t: (t[0], t[3]))
    trials = _run_trials(tasks, cfg.jobs)
    trials.sort(key=lambda t: (t.attack, t.image))
    _write_report(trials, Path(args.report), not args.no_figures)
    return EXIT_OK


_COMMANDS = {
    "embed": _cmd_embed,
    "attack": _cmd_attack,
    "estimate": _cmd_estimate,
    "rectify": _cmd_rectify,
    "wm-embed": _cmd_wm_embed,
    "wm-extract": _cmd_wm_extract,
    "evaluate": _cmd_evaluate,
    "sweep-interval": _cmd_sweep_interval,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except (ConfigError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DetectionFailureError as exc:
        print(f"detection failure: {exc}", file=sys.stderr)
        return EXIT_DETECTION
    except (OSError, DecodeError, UnsupportedFormatError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except GridPilotError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
