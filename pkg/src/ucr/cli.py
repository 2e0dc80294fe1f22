"""Command-line interface: one binary, eight subcommands.

Configuration precedence is defaults < TOML file (``--config``) < environment
(``UCR_<KEY>``) < command-line flags. Every file the tool writes embeds the
fully resolved configuration and the package version as ``#`` comment lines
(CSV) or top-level keys (JSON), so outputs are self-describing and runs are
reproducible byte for byte for a fixed seed.

Exit codes: 0 success, 1 I/O failure, 2 usage or input-parse error,
3 domain error, 4 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import __version__
from .coder import AmbiguousEncodingError, ResolverConfig, decode, encode
from .dota_io import (
    DotaParseError,
    ImageAnnotations,
    AnnotationRecord,
    clean_dataset,
    compute_stats,
    hash_image_bytes,
    parse_dota_file,
    poly_to_rbox,
    write_dota_file,
)
from .evaluation import IOU_THRESHOLDS, DetectionRecord, GroundTruth, evaluate
from .geometry import RotatedBox, rbox_to_polygon
from .losses import LossConfig, LossKind
from .optim import (
    FitDivergenceError,
    FitReport,
    ae2_histogram,
    boundary_demo,
    paired_bias_experiment,
)

EXIT_OK = 0
EXIT_IO = 1
EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_NUMERIC = 4

DEFAULT_EPSILONS = (1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6)


class UsageError(Exception):
    """Bad flag/config/input-format value; maps to exit code 2."""


# key -> (config-file section, converter, default)
_SCHEMA = {
    "dimension": ("resolver", int, 2),
    "angular_frequency": ("resolver", float, 2.0),
    "amplitude": ("resolver", float, 1.0),
    "lambda_reg": ("loss", float, 1.0),
    "lambda_uc": ("loss", float, 0.05),
    "m_invalid": ("loss", float, 0.2),
    "uc_loss_kind": ("loss", str, "l1"),
    "reg_loss_kind": ("loss", str, "l1"),
    "samples": ("fit", int, 256),
    "repetitions": ("fit", int, 20),
    "steps": ("fit", int, 150),
    "learning_rate": ("fit", float, 0.1),
    "noise_sigma": ("fit", float, 0.3),
    "init_scale": ("fit", float, 3.0),
    "seed": ("fit", int, 0),
    "bins": ("fit", int, 20),
}


def _load_toml(path: str) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise UsageError(f"cannot parse config file {path}: {exc}") from exc


def _convert(key: str, raw, conv):
    try:
        return conv(raw)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad value for {key}: {raw!r}") from exc


def resolve_settings(args) -> dict:
    """Merge defaults, config file, UCR_* environment and flags."""
    file_cfg = _load_toml(args.config) if getattr(args, "config", None) else {}
    settings = {}
    for key, (section, conv, default) in _SCHEMA.items():
        value = default
        if section in file_cfg and key in file_cfg[section]:
            value = _convert(key, file_cfg[section][key], conv)
        env = os.environ.get(f"UCR_{key.upper()}")
        if env is not None:
            value = _convert(key, env, conv)
        flag = getattr(args, key, None)
        if flag is not None:
            value = _convert(key, flag, conv)
        settings[key] = value
    return settings


def _loss_kind(name: str) -> LossKind:
    try:
        return LossKind(name.lower())
    except ValueError:
        raise UsageError(f"loss kind must be 'l1' or 'mse', got {name!r}") from None


def _make_configs(settings) -> tuple[ResolverConfig, LossConfig]:
    try:
        rcfg = ResolverConfig(
            dimension=settings["dimension"],
            angular_frequency=settings["angular_frequency"],
            amplitude=settings["amplitude"],
        )
        lcfg = LossConfig(
            lambda_reg=settings["lambda_reg"],
            lambda_uc=settings["lambda_uc"],
            m_invalid=settings["m_invalid"],
            uc_loss_kind=_loss_kind(settings["uc_loss_kind"]),
            reg_loss_kind=_loss_kind(settings["reg_loss_kind"]),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    return rcfg, lcfg


def _settings_json(settings) -> str:
    return json.dumps(settings, sort_keys=True)


def _fmt(x: float) -> str:
    """Short human formatting: 12 significant digits, no trailing zeros."""
    return f"{float(x):.12g}"


def _r(x) -> str:
    """Full-precision round-trippable text for data files."""
    return repr(float(x))


def _csv_header(settings) -> list[str]:
    return [f"# version: ucr {__version__}", f"# config: {_settings_json(settings)}"]


def _write_lines(path: Path, lines) -> None:
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


# ---------------------------------------------------------------- encode/decode


def _iter_input_lines(spec: str):
    if spec == "-":
        yield from sys.stdin
    else:
        with open(spec, "r", encoding="utf-8") as fh:
            yield from fh


def cmd_encode(args) -> int:
    settings = resolve_settings(args)
    rcfg, _ = _make_configs(settings)
    if (args.theta is None) == (args.input is None):
        raise UsageError("provide exactly one of --theta or --input")
    if args.theta is not None:
        values = encode(_parse_float(args.theta, "theta"), rcfg)
        print(",".join(_fmt(v) for v in values))
        return EXIT_OK
    for line in _iter_input_lines(args.input):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        values = encode(_parse_float(line, "theta"), rcfg)
        print(",".join(_fmt(v) for v in values))
    return EXIT_OK


def cmd_decode(args) -> int:
    settings = resolve_settings(args)
    rcfg, _ = _make_configs(settings)
    if (args.enc is None) == (args.input is None):
        raise UsageError("provide exactly one of --enc or --input")

    def one(text: str) -> str:
        parts = [p for p in text.replace(",", " ").split() if p]
        m = [_parse_float(p, "encoding component") for p in parts]
        if len(m) != rcfg.dimension:
            raise UsageError(
                f"expected {rcfg.dimension} components, got {len(m)}"
            )
        return _fmt(decode(m, rcfg))

    if args.enc is not None:
        print(one(args.enc))
        return EXIT_OK
    for line in _iter_input_lines(args.input):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        print(one(line))
    return EXIT_OK


def _parse_float(text: str, what: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise UsageError(f"cannot parse {what}: {text!r}") from None
    if not math.isfinite(value):
        raise ValueError(f"{what} must be finite")
    return value


# ----------------------------------------------------------------------- demos


def _combined_report(reports) -> FitReport:
    ae2 = np.concatenate([r.ae2 for r in reports]) if reports else np.empty(0)
    err = np.concatenate([r.angle_error for r in reports]) if reports else np.empty(0)
    return FitReport(
        ae2=ae2,
        angle_error=err,
        loss_trajectory=np.empty(0),
        ae2_quantiles=(math.nan,) * 3,
        angle_error_quantiles=(math.nan,) * 3,
    )


def _quantile_dict(values: np.ndarray) -> dict:
    p10, p50, p90 = np.quantile(values, [0.1, 0.5, 0.9])
    return {"p10": float(p10), "p50": float(p50), "p90": float(p90)}


def cmd_demo_bias(args) -> int:
    settings = resolve_settings(args)
    rcfg, lcfg = _make_configs(settings)
    for key in ("samples", "repetitions", "steps"):
        if settings[key] < 1:
            raise UsageError(f"{key} must be >= 1, got {settings[key]}")
    if settings["learning_rate"] <= 0:
        raise UsageError("learning_rate must be positive")

    result = paired_bias_experiment(
        rcfg,
        lcfg,
        repetitions=settings["repetitions"],
        samples=settings["samples"],
        noise_sigma=settings["noise_sigma"],
        init_scale=settings["init_scale"],
        steps=settings["steps"],
        learning_rate=settings["learning_rate"],
        seed=settings["seed"],
    )

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    rows = _csv_header(settings)
    rows.append("repetition,sample,lambda_uc,final_ae2,angle_error")
    for rep in range(result.repetitions):
        for label, lam, report in (
            ("baseline", 0.0, result.baseline_reports[rep]),
            ("constrained", lcfg.lambda_uc, result.constrained_reports[rep]),
        ):
            del label
            for kdx in range(report.ae2.size):
                rows.append(
                    f"{rep},{kdx},{_r(lam)},{_r(report.ae2[kdx])},{_r(report.angle_error[kdx])}"
                )
    _write_lines(out_dir / "report.csv", rows)

    hist_rows = _csv_header(settings)
    hist_rows.append("setting,bin_index,bin_lo,bin_hi,count")
    for label, reports in (
        ("baseline", result.baseline_reports),
        ("constrained", result.constrained_reports),
    ):
        counts, edges = ae2_histogram(_combined_report(reports), settings["bins"])
        for i, count in enumerate(counts):
            hist_rows.append(f"{label},{i},{_r(edges[i])},{_r(edges[i + 1])},{count}")
    _write_lines(out_dir / "ae2_histogram.csv", hist_rows)

    half = result.repetitions / 2.0
    summary = {
        "version": f"ucr {__version__}",
        "config": settings,
        "repetitions": result.repetitions,
        "baseline": {
            "ae2_dev_medians": result.baseline_ae2_dev_medians.tolist(),
            "ae2": _quantile_dict(np.concatenate([r.ae2 for r in result.baseline_reports])),
            "angle_error": _quantile_dict(
                np.concatenate([r.angle_error for r in result.baseline_reports])
            ),
        },
        "constrained": {
            "ae2_dev_medians": result.constrained_ae2_dev_medians.tolist(),
            "ae2": _quantile_dict(np.concatenate([r.ae2 for r in result.constrained_reports])),
            "angle_error": _quantile_dict(
                np.concatenate([r.angle_error for r in result.constrained_reports])
            ),
        },
        "sign_test": {
            "ae2_wins": result.ae2_wins,
            "angle_wins": result.angle_wins,
            "ae2_verdict": "constrained_better" if result.ae2_wins > half else "no_advantage",
            "angle_verdict": "constrained_better" if result.angle_wins > half else "no_advantage",
        },
    }
    (out_dir / "summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return EXIT_OK


def cmd_demo_boundary(args) -> int:
    settings = resolve_settings(args)
    epsilons = DEFAULT_EPSILONS
    if args.epsilons:
        epsilons = tuple(_parse_float(tok, "epsilon") for tok in args.epsilons.split(","))
    if any(e <= 0 for e in epsilons):
        raise UsageError("epsilons must be positive")
    omega = settings["angular_frequency"]
    amp = settings["amplitude"]
    cfg1 = ResolverConfig(1, omega, amp)
    cfg2 = ResolverConfig(2, omega, amp)
    cfg3 = ResolverConfig(3, omega, amp)
    rows2 = boundary_demo(epsilons, cfg2)
    rows3 = boundary_demo(epsilons, cfg3)
    rows1 = boundary_demo(epsilons, cfg1)
    print("epsilon,loss_1d,gap_n2,gap_n3")
    for (eps, loss1, _), (_, _, g2), (_, _, g3) in zip(rows1, rows2, rows3):
        print(f"{_fmt(eps)},{_fmt(loss1)},{_fmt(g2)},{_fmt(g3)}")
    return EXIT_OK


# ------------------------------------------------------------------ dataset io


def _load_dota_dir(path: str, images_dir: str | None):
    root = Path(path)
    if not root.is_dir():
        raise FileNotFoundError(f"annotation directory not found: {path}")
    images = []
    img_root = Path(images_dir) if images_dir else None
    for txt in sorted(root.glob("*.txt")):
        image_id = txt.stem
        content_hash = None
        if img_root is not None:
            for candidate in sorted(img_root.glob(image_id + ".*")):
                if candidate.suffix != ".txt":
                    content_hash = hash_image_bytes(candidate.read_bytes())
                    break
        try:
            images.append(
                parse_dota_file(txt.read_text(encoding="utf-8"), image_id, content_hash)
            )
        except DotaParseError as exc:
            raise DotaParseError(exc.line, f"{txt.name}: {exc}") from None
    return images


def cmd_stats(args) -> int:
    settings = resolve_settings(args)
    images = _load_dota_dir(args.input, args.images)
    stats = compute_stats(images, bins=settings["bins"])

    rows = _csv_header(settings)
    rows.append("category,metric,bin_index,bin_lo,bin_hi,value")
    for cat, cs in stats.per_category.items():
        rows.append(f"{cat},count,,,,{cs.count}")
        rows.append(f"{cat},mean_area,,,,{_r(cs.mean_area)}")
        for i, c in enumerate(cs.angle_hist):
            rows.append(
                f"{cat},angle_hist,{i},{_r(stats.angle_edges[i])},{_r(stats.angle_edges[i + 1])},{c}"
            )
        for i, c in enumerate(cs.aspect_hist):
            rows.append(
                f"{cat},aspect_hist,{i},{_r(stats.aspect_edges[i])},{_r(stats.aspect_edges[i + 1])},{c}"
            )
    _write_lines(Path(args.out_csv), rows)

    payload = {
        "version": f"ucr {__version__}",
        "config": settings,
        "conversion_failures": stats.conversion_failures,
        "angle_edges": stats.angle_edges.tolist(),
        "aspect_edges": stats.aspect_edges.tolist(),
        "per_category": {
            cat: {
                "count": cs.count,
                "mean_area": cs.mean_area,
                "angle_hist": cs.angle_hist.tolist(),
                "aspect_hist": cs.aspect_hist.tolist(),
            }
            for cat, cs in stats.per_category.items()
        },
    }
    Path(args.out_json).write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    if stats.conversion_failures:
        print(
            f"warning: {stats.conversion_failures} records could not be converted",
            file=sys.stderr,
        )
    return EXIT_OK


def cmd_clean(args) -> int:
    settings = resolve_settings(args)
    images = _load_dota_dir(args.input, args.images)
    cleaned, report = clean_dataset(images)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for img in cleaned:
        (out_dir / f"{img.image_id}.txt").write_text(write_dota_file(img), encoding="utf-8")

    lines = [
        json.dumps(
            {"image_id": r.image_id, "action": r.action, "reason": r.reason},
            sort_keys=True,
        )
        for r in report
    ]
    header = json.dumps(
        {"version": f"ucr {__version__}", "config": settings}, sort_keys=True
    )
    _write_lines(Path(args.report), [header] + lines)
    print(f"kept {len(cleaned)} images, removed {len(report)}", file=sys.stderr)
    return EXIT_OK


def _load_detections(path: str):
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(f"detections file not found: {path}")
    dets = []
    text = p.read_text(encoding="utf-8")
    if p.suffix in (".json", ".jsonl"):
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                dets.append(_detection_from_fields(obj, lineno))
            except (json.JSONDecodeError, KeyError) as exc:
                raise UsageError(f"detections line {lineno}: {exc}") from None
        return dets
    reader = csv.DictReader(
        line for line in io.StringIO(text) if not line.startswith("#")
    )
    required = {"image_id", "category", "score", "cx", "cy", "w", "h", "theta"}
    if reader.fieldnames is None or not required.issubset(reader.fieldnames):
        raise UsageError(
            f"detections CSV must have columns {sorted(required)}, got {reader.fieldnames}"
        )
    for lineno, row in enumerate(reader, start=2):
        dets.append(_detection_from_fields(row, lineno))
    return dets


def _detection_from_fields(fields, lineno: int) -> DetectionRecord:
    try:
        box = RotatedBox(
            float(fields["cx"]),
            float(fields["cy"]),
            float(fields["w"]),
            float(fields["h"]),
            float(fields["theta"]),
        )
        return DetectionRecord(
            image_id=str(fields["image_id"]),
            box=box,
            category=str(fields["category"]),
            score=float(fields["score"]),
        )
    except (TypeError, ValueError) as exc:
        raise UsageError(f"detections line {lineno}: {exc}") from None


def cmd_eval(args) -> int:
    settings = resolve_settings(args)
    images = _load_dota_dir(args.gt, None)
    gts = []
    skipped = 0
    for img in images:
        for rec in img.records:
            try:
                box = poly_to_rbox(rec.polygon)
            except ValueError:
                skipped += 1
                continue
            gts.append(GroundTruth(img.image_id, box, rec.category, rec.difficulty))
    dets = _load_detections(args.det)
    result = evaluate(dets, gts, ignore_difficult=not args.include_difficult)

    payload = {
        "version": f"ucr {__version__}",
        "config": {**settings, "ignore_difficult": not args.include_difficult},
        "thresholds": list(result.thresholds),
        "per_category": {
            cat: {f"{thr:.2f}": ap for thr, ap in by_thr.items()}
            for cat, by_thr in result.per_category.items()
        },
        "ap50": result.ap50,
        "ap75": result.ap75,
        "map": result.mean_ap,
    }
    Path(args.out).write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )

    print(f"{'category':<20}{'AP50':>8}{'AP75':>8}{'mAP':>8}")
    for cat, by_thr in result.per_category.items():
        defined = [v for v in by_thr.values() if v is not None]
        cat_map = sum(defined) / len(defined) if defined else float("nan")
        a50 = by_thr[0.50]
        a75 = by_thr[0.75]
        print(
            f"{cat:<20}"
            f"{'--' if a50 is None else format(a50, '.4f'):>8}"
            f"{'--' if a75 is None else format(a75, '.4f'):>8}"
            f"{format(cat_map, '.4f'):>8}"
        )
    print(f"{'all':<20}{result.ap50:>8.4f}{result.ap75:>8.4f}{result.mean_ap:>8.4f}")
    if skipped:
        print(f"warning: {skipped} ground-truth records skipped", file=sys.stderr)
    return EXIT_OK


def cmd_convert(args) -> int:
    settings = resolve_settings(args)
    if args.to_rbox == args.to_dota:
        raise UsageError("provide exactly one of --to-rbox or --to-dota")
    if args.to_rbox:
        images = _load_dota_dir(args.input, None)
        rows = _csv_header(settings)
        rows.append("image_id,category,difficulty,cx,cy,w,h,theta")
        skipped = 0
        for img in images:
            for rec in img.records:
                try:
                    b = poly_to_rbox(rec.polygon)
                except ValueError:
                    skipped += 1
                    continue
                rows.append(
                    f"{img.image_id},{rec.category},{rec.difficulty},"
                    f"{_r(b.cx)},{_r(b.cy)},{_r(b.w)},{_r(b.h)},{_r(b.theta)}"
                )
        _write_lines(Path(args.out), rows)
        if skipped:
            print(f"warning: {skipped} records skipped", file=sys.stderr)
        return EXIT_OK

    # CSV -> DOTA directory
    src = Path(args.input)
    if not src.is_file():
        raise FileNotFoundError(f"input CSV not found: {args.input}")
    reader = csv.DictReader(
        line for line in io.StringIO(src.read_text(encoding="utf-8"))
        if not line.startswith("#")
    )
    required = {"image_id", "category", "difficulty", "cx", "cy", "w", "h", "theta"}
    if reader.fieldnames is None or not required.issubset(reader.fieldnames):
        raise UsageError(
            f"CSV must have columns {sorted(required)}, got {reader.fieldnames}"
        )
    per_image: dict[str, list[AnnotationRecord]] = {}
    for lineno, row in enumerate(reader, start=2):
        try:
            box = RotatedBox(
                float(row["cx"]), float(row["cy"]), float(row["w"]),
                float(row["h"]), float(row["theta"]),
            )
            rec = AnnotationRecord(
                rbox_to_polygon(box), str(row["category"]), int(row["difficulty"])
            )
        except (TypeError, ValueError) as exc:
            raise UsageError(f"line {lineno}: {exc}") from None
        per_image.setdefault(str(row["image_id"]), []).append(rec)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for image_id, records in per_image.items():
        ann = ImageAnnotations(image_id, tuple(records))
        (out_dir / f"{image_id}.txt").write_text(write_dota_file(ann), encoding="utf-8")
    return EXIT_OK


# ---------------------------------------------------------------------- parser


def _add_resolver_flags(sp) -> None:
    sp.add_argument("--config", help="TOML configuration file")
    sp.add_argument("--dim", dest="dimension", help="mapping dimension (1..5)")
    sp.add_argument("--omega", dest="angular_frequency", help="angular frequency")
    sp.add_argument("--amplitude", help="per-component amplitude")


def _add_loss_flags(sp) -> None:
    sp.add_argument("--lambda-reg", dest="lambda_reg", help="regression loss weight")
    sp.add_argument("--lambda-uc", dest="lambda_uc", help="constraint loss weight")
    sp.add_argument("--m-invalid", dest="m_invalid", help="invalid-region threshold")
    sp.add_argument("--uc-loss", dest="uc_loss_kind", choices=("l1", "mse"))
    sp.add_argument("--reg-loss", dest="reg_loss_kind", choices=("l1", "mse"))


def _add_fit_flags(sp) -> None:
    sp.add_argument("--samples", help="encodings per repetition")
    sp.add_argument("--repetitions", help="paired repetitions")
    sp.add_argument("--steps", help="descent steps")
    sp.add_argument("--lr", dest="learning_rate", help="learning rate")
    sp.add_argument("--noise-sigma", dest="noise_sigma", help="target angle noise (rad)")
    sp.add_argument("--init-scale", dest="init_scale", help="init disc radius")
    sp.add_argument("--seed", help="base RNG seed")
    sp.add_argument("--bins", help="histogram bin count")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ucr",
        description="Unit-cycle angle resolver toolbox",
    )
    parser.add_argument("--version", action="version", version=f"ucr {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("encode", help="angle -> encoding")
    _add_resolver_flags(sp)
    sp.add_argument("--theta", help="angle in radians")
    sp.add_argument("--input", help="file of angles, one per line ('-' = stdin)")
    sp.set_defaults(func=cmd_encode)

    sp = sub.add_parser("decode", help="encoding -> angle")
    _add_resolver_flags(sp)
    sp.add_argument("--enc", help="comma-separated encoding components")
    sp.add_argument("--input", help="file of encodings, one per line ('-' = stdin)")
    sp.set_defaults(func=cmd_decode)

    sp = sub.add_parser(
        "demo-bias",
        help="paired constrained/unconstrained fits; CSV + histogram + summary",
    )
    _add_resolver_flags(sp)
    _add_loss_flags(sp)
    _add_fit_flags(sp)
    sp.add_argument("--out-dir", required=True, help="output directory")
    sp.set_defaults(func=cmd_demo_bias)

    sp = sub.add_parser("demo-boundary", help="boundary discontinuity table (stdout CSV)")
    _add_resolver_flags(sp)
    sp.add_argument("--epsilons", help="comma-separated boundary offsets")
    sp.set_defaults(func=cmd_demo_boundary)

    sp = sub.add_parser("stats", help="per-category dataset statistics")
    _add_resolver_flags(sp)
    sp.add_argument("--input", required=True, help="directory of DOTA .txt files")
    sp.add_argument("--images", help="directory of image files for hashing")
    sp.add_argument("--bins", help="histogram bin count")
    sp.add_argument("--out-csv", required=True)
    sp.add_argument("--out-json", required=True)
    sp.set_defaults(func=cmd_stats)

    sp = sub.add_parser("clean", help="deduplicate and drop unannotated images")
    _add_resolver_flags(sp)
    sp.add_argument("--input", required=True, help="directory of DOTA .txt files")
    sp.add_argument("--images", help="directory of image files for hashing")
    sp.add_argument("--out-dir", required=True, help="cleaned annotation directory")
    sp.add_argument("--report", required=True, help="JSON-lines removal report")
    sp.set_defaults(func=cmd_clean)

    sp = sub.add_parser("eval", help="AP50/AP75/mAP of detections against DOTA ground truth")
    _add_resolver_flags(sp)
    sp.add_argument("--gt", required=True, help="directory of DOTA .txt files")
    sp.add_argument("--det", required=True, help="detections CSV or JSON lines")
    sp.add_argument("--out", required=True, help="result JSON path")
    sp.add_argument("--include-difficult", action="store_true")
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("convert", help="DOTA polygons <-> rotated-box CSV")
    _add_resolver_flags(sp)
    sp.add_argument("--to-rbox", action="store_true", help="DOTA dir -> CSV")
    sp.add_argument("--to-dota", action="store_true", help="CSV -> DOTA dir")
    sp.add_argument("--input", required=True)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_convert)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"ucr: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DotaParseError as exc:
        print(f"ucr: parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FitDivergenceError as exc:
        print(f"ucr: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except AmbiguousEncodingError as exc:
        print(f"ucr: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (FileNotFoundError, NotADirectoryError, PermissionError, OSError) as exc:
        print(f"ucr: i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"ucr: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
