"""Command-line interface for the dataset pipeline.

    mattekit prompts   --limit N --seed S [--out FILE]
    mattekit ingest    INPUT_DIR --manifest M
    mattekit screen    --manifest M [--threshold-* X]
    mattekit refine    --manifest M [--workers N] [--debug-labels]
    mattekit composite --manifest M --backgrounds DIR [--per-sample K] [--seed S]
    mattekit chroma    --manifest M [--key-color R,G,B]
    mattekit trimap    --manifest M [--band B]
    mattekit eval      PRED_DIR GT_DIR [--mask trimap --trimaps DIR] [--out BASE]
    mattekit serve     --manifest M [--bind HOST:PORT] [--ui-dir DIR]
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from .config import PipelineConfig, config_from_dict, load_config, parse_key_color
from .connectivity import ScreeningThresholds
from .errors import MatteKitError
from .manifest import DatasetManifest, ManifestError, ManifestLock
from .prompts import PromptSpec, generate_prompts
from . import pipeline, server


def _add_manifest_arg(p: argparse.ArgumentParser) -> None:
    p.add_argument("--manifest", required=True, help="path to the manifest JSON file")


def _add_config_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="TOML config file")
    p.add_argument("--seed", type=int, help="override the configured seed")
    p.add_argument("--threshold-semi", type=float, dest="threshold_semi",
                   help="flag when semi_fraction exceeds this")
    p.add_argument("--threshold-attached", type=float, dest="threshold_attached",
                   help="flag when attached_noise_fraction exceeds this")
    p.add_argument("--threshold-removed", type=float, dest="threshold_removed",
                   help="flag when removed_fraction exceeds this")
    p.add_argument("--key-color", dest="key_color", help="chroma key as R,G,B")
    p.add_argument("--band", type=int, help="trimap band radius in pixels")


def _effective_config(args, base: PipelineConfig | None = None) -> PipelineConfig:
    """Layer config sources: manifest snapshot, then --config file, then
    explicit flags."""
    if getattr(args, "config", None):
        cfg = load_config(args.config)
    else:
        cfg = base or PipelineConfig()
    updates: dict = {}
    if getattr(args, "seed", None) is not None:
        updates["seed"] = args.seed
    thresholds = cfg.thresholds
    t_updates = {}
    if getattr(args, "threshold_semi", None) is not None:
        t_updates["semi_fraction"] = args.threshold_semi
    if getattr(args, "threshold_attached", None) is not None:
        t_updates["attached_noise_fraction"] = args.threshold_attached
    if getattr(args, "threshold_removed", None) is not None:
        t_updates["removed_fraction"] = args.threshold_removed
    if t_updates:
        updates["thresholds"] = dataclasses.replace(thresholds, **t_updates)
    if getattr(args, "key_color", None):
        updates["key_color"] = parse_key_color(args.key_color)
    if getattr(args, "band", None) is not None:
        updates["band"] = args.band
    if getattr(args, "per_sample", None) is not None:
        updates["per_sample"] = args.per_sample
    if getattr(args, "mask", None):
        updates["mask_mode"] = args.mask
    return dataclasses.replace(cfg, **updates) if updates else cfg


def _with_manifest(args, fn, create: bool = False) -> int:
    """Load, lock, transform, and save the manifest around a stage.

    The manifest's config snapshot persists across commands; --config
    replaces it and individual flags override single values. Only
    creating stages (ingest, prompts) may start a fresh manifest.
    """
    manifest_path = Path(args.manifest)
    manifest_path.parent.mkdir(parents=True, exist_ok=True)
    with ManifestLock(manifest_path):
        if manifest_path.exists():
            manifest = DatasetManifest.load(manifest_path)
        elif create:
            manifest = DatasetManifest()
        else:
            raise ManifestError(f"no manifest at {manifest_path}")
        base = config_from_dict(manifest.config) if manifest.config else None
        cfg = _effective_config(args, base)
        manifest.config = cfg.to_dict()
        fn(manifest, cfg, manifest_path.parent)
        manifest.save(manifest_path)
    return 0


def cmd_prompts(args) -> int:
    spec = PromptSpec() if not args.spec else PromptSpec.from_dict(
        json.loads(Path(args.spec).read_text(encoding="utf-8"))
    )
    cfg = _effective_config(args)
    prompts = generate_prompts(spec, args.limit, cfg.seed)
    text = "\n".join(prompts) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"wrote {len(prompts)} prompts to {args.out}")
    else:
        sys.stdout.write(text)
    if args.manifest:
        def stage(manifest, cfg, base):
            manifest.attributes = spec.to_dict()
        _with_manifest(args, stage, create=True)
    return 0


def cmd_ingest(args) -> int:
    def stage(manifest, cfg, base):
        before = len(manifest.samples)
        pipeline.ingest(args.input_dir, manifest, base, cfg)
        added = len(manifest.samples) - before
        print(f"ingested {added} samples "
              f"({manifest.status_counts()['flagged']} flagged, "
              f"{len(manifest.issues)} issues)")
    return _with_manifest(args, stage, create=True)


def cmd_screen(args) -> int:
    def stage(manifest, cfg, base):
        pipeline.screen(manifest, cfg)
        counts = manifest.status_counts()
        print(f"screened: {counts['accepted']} accepted, {counts['flagged']} flagged")
    return _with_manifest(args, stage)


def cmd_refine(args) -> int:
    def stage(manifest, cfg, base):
        pipeline.refine_batch(manifest, base, workers=args.workers,
                              debug_labels=args.debug_labels)
        print(f"refined: {manifest.status_counts()['refined']} samples")
    return _with_manifest(args, stage)


def cmd_composite(args) -> int:
    def stage(manifest, cfg, base):
        pipeline.composite_batch(manifest, base, args.backgrounds,
                                 per_sample=cfg.per_sample, seed=cfg.seed)
        n = sum(len(r.composites) for r in manifest.samples.values())
        print(f"composited: {n} images")
    return _with_manifest(args, stage)


def cmd_chroma(args) -> int:
    def stage(manifest, cfg, base):
        pipeline.chroma_batch(manifest, base, cfg.key_color)
        done = sum(1 for r in manifest.samples.values() if r.chroma)
        print(f"chroma-keyed: {done} samples")
    return _with_manifest(args, stage)


def cmd_trimap(args) -> int:
    def stage(manifest, cfg, base):
        pipeline.trimap_batch(manifest, base, cfg, band=args.band)
        done = sum(1 for r in manifest.samples.values() if "trimap" in r.paths)
        print(f"trimaps: {done} samples")
    return _with_manifest(args, stage)


def cmd_eval(args) -> int:
    cfg = _effective_config(args)
    doc = pipeline.evaluate_batch(
        args.pred_dir, args.gt_dir,
        mask_mode=cfg.mask_mode,
        trimap_dir=args.trimaps,
        reduction=args.reduction,
        out_base=args.out,
    )
    agg = doc["aggregate"]
    if agg:
        print(f"mean MAD {agg['mad']:.4f}  MSE {agg['mse']:.4f}  "
              f"Grad {agg['grad']:.4f}  Conn {agg['conn']:.4f}")
    if doc["unpaired"]:
        print(f"unpaired stems: {', '.join(doc['unpaired'])}", file=sys.stderr)
    for stem, err in doc["errors"].items():
        print(f"error on {stem}: {err}", file=sys.stderr)
    return 0


def cmd_serve(args) -> int:
    server.serve(args.manifest, bind=args.bind, ui_dir=args.ui_dir,
                 verbose=args.verbose)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mattekit",
        description="portrait matte screening, refinement, and evaluation pipeline",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prompts", help="generate portrait prompts")
    p.add_argument("--limit", type=int, default=100)
    p.add_argument("--spec", help="JSON file with attribute lists and template")
    p.add_argument("--out", help="write prompts here instead of stdout")
    p.add_argument("--manifest", help="record the vocabulary in this manifest")
    _add_config_args(p)
    p.set_defaults(fn=cmd_prompts)

    p = sub.add_parser("ingest", help="register rgb+alpha pairs")
    p.add_argument("input_dir")
    _add_manifest_arg(p)
    _add_config_args(p)
    p.set_defaults(fn=cmd_ingest)

    p = sub.add_parser("screen", help="auto-screen pending samples")
    _add_manifest_arg(p)
    _add_config_args(p)
    p.set_defaults(fn=cmd_screen)

    p = sub.add_parser("refine", help="refine accepted mattes")
    _add_manifest_arg(p)
    _add_config_args(p)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--debug-labels", action="store_true",
                   help="also write 16-bit region label maps")
    p.set_defaults(fn=cmd_refine)

    p = sub.add_parser("composite", help="composite refined samples over backgrounds")
    _add_manifest_arg(p)
    _add_config_args(p)
    p.add_argument("--backgrounds", required=True)
    p.add_argument("--per-sample", type=int, dest="per_sample")
    p.set_defaults(fn=cmd_composite)

    p = sub.add_parser("chroma", help="chroma-key refined samples off a solid backdrop")
    _add_manifest_arg(p)
    _add_config_args(p)
    p.set_defaults(fn=cmd_chroma)

    p = sub.add_parser("trimap", help="build trimaps for refined samples")
    _add_manifest_arg(p)
    _add_config_args(p)
    p.set_defaults(fn=cmd_trimap)

    p = sub.add_parser("eval", help="evaluate predicted mattes against ground truth")
    p.add_argument("pred_dir")
    p.add_argument("gt_dir")
    p.add_argument("--mask", choices=("none", "trimap"))
    p.add_argument("--trimaps", help="trimap directory for --mask trimap")
    p.add_argument("--reduction", choices=("sum", "mean"), default="sum",
                   help="Grad/Conn accumulation convention")
    p.add_argument("--out", help="report base path (writes .json and .txt)")
    _add_config_args(p)
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("serve", help="run the review service")
    _add_manifest_arg(p)
    p.add_argument("--bind", default="127.0.0.1:8765")
    p.add_argument("--ui-dir", dest="ui_dir", help="review console asset directory")
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(fn=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (MatteKitError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
