"""Manifest-driven batch stages: ingest, screen, refine, composite,
chroma, trimap, and evaluation.

Derived images live in fixed subdirectories next to the manifest
(inverse/, refined/, composites/, chroma/, trimaps/); records store
paths relative to the manifest directory, so a workspace can be moved
or compared byte-for-byte across machines. Worker fan-out never touches
the manifest: results are merged by the coordinator in id order.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path, PurePosixPath

import numpy as np
from PIL import Image

from . import metrics as metrics_mod
from .config import PipelineConfig
from .connectivity import auto_screen, refine, screening_stats
from .errors import DimensionError, EmptyForegroundError, ImageFormatError, MatteKitError
from .image import (
    AlphaMatte,
    KeyColor,
    RgbImage,
    load_alpha,
    load_rgb,
    load_rgba,
    save_alpha,
    save_inverse,
    save_rgb,
)
from .manifest import DatasetManifest, SampleRecord, utcnow
from .matte import chroma_extract, composite, invert_alpha, solid_background
from .trimap import default_band, load_trimap, save_trimap, trimap_from_alpha


def _rel(path, base: Path) -> str:
    return PurePosixPath(os.path.relpath(Path(path), base)).as_posix()


def _resolve(rel_path: str, base: Path) -> Path:
    return (base / rel_path).resolve() if not os.path.isabs(rel_path) else Path(rel_path)


def _subdir(base: Path, name: str) -> Path:
    d = base / name
    d.mkdir(parents=True, exist_ok=True)
    return d


def discover_pairs(input_dir) -> tuple[dict[str, dict], list[str]]:
    """Find `<id>_rgb.png` + `<id>_alpha.png` pairs and `<id>.png` RGBA
    singles. Returns ({id: {"rgb": path, "alpha": path} | {"rgba": path}},
    unpaired file names)."""
    input_dir = Path(input_dir)
    pairs: dict[str, dict] = {}
    unpaired: list[str] = []
    files = sorted(p for p in input_dir.iterdir() if p.suffix.lower() == ".png")
    rgb = {p.name[: -len("_rgb.png")]: p for p in files if p.name.endswith("_rgb.png")}
    alpha = {p.name[: -len("_alpha.png")]: p for p in files if p.name.endswith("_alpha.png")}
    for stem in sorted(set(rgb) | set(alpha)):
        if stem in rgb and stem in alpha:
            pairs[stem] = {"rgb": rgb[stem], "alpha": alpha[stem]}
        else:
            unpaired.append((rgb.get(stem) or alpha[stem]).name)
    for p in files:
        if p.name.endswith(("_rgb.png", "_alpha.png")):
            continue
        pairs[p.name[: -len(".png")]] = {"rgba": p}
    return pairs, unpaired


def ingest(input_dir, manifest: DatasetManifest, manifest_dir,
           config: PipelineConfig | None = None) -> DatasetManifest:
    """Register every readable sample pair: compute its inverse alpha and
    screening stats, then set pending or flagged per the auto screen.

    Per-file problems (unpaired, unreadable, mismatched dimensions,
    duplicate ids) are recorded as issues; the batch never aborts.
    """
    cfg = config or PipelineConfig()
    base = Path(manifest_dir)
    inverse_dir = _subdir(base, "inverse")
    pairs, unpaired = discover_pairs(input_dir)
    for name in unpaired:
        manifest.record_issue("ingest", name, "unpaired file")
    for sample_id, entry in sorted(pairs.items()):
        if sample_id in manifest.samples:
            manifest.record_issue("ingest", sample_id, "duplicate sample id")
            continue
        try:
            if "rgba" in entry:
                rgb_img, alpha_img = load_rgba(entry["rgba"])
                paths = {"rgb": _rel(entry["rgba"], base), "alpha": _rel(entry["rgba"], base)}
            else:
                rgb_img = load_rgb(entry["rgb"])
                alpha_img = load_alpha(entry["alpha"])
                paths = {"rgb": _rel(entry["rgb"], base), "alpha": _rel(entry["alpha"], base)}
            if rgb_img.shape != alpha_img.shape:
                raise DimensionError(
                    f"rgb {rgb_img.shape} and alpha {alpha_img.shape} dimensions differ"
                )
        except (MatteKitError, OSError) as exc:
            manifest.record_issue("ingest", sample_id, str(exc))
            continue
        inverse_path = inverse_dir / f"{sample_id}.png"
        save_inverse(invert_alpha(alpha_img), inverse_path)
        paths["inverse"] = _rel(inverse_path, base)
        stats = screening_stats(alpha_img)
        record = SampleRecord(id=sample_id, paths=paths, screening=stats)
        if auto_screen(stats, cfg.thresholds) == "flag":
            record.transition("flagged", "auto")
        manifest.add(record)
    return manifest


def screen(manifest: DatasetManifest, config: PipelineConfig | None = None) -> DatasetManifest:
    """Re-apply the auto screen to pending samples: promote passing ones
    to accepted, flag the rest for human review."""
    cfg = config or PipelineConfig()
    for record in manifest.by_status("pending"):
        if record.screening is None:
            manifest.record_issue("screen", record.id, "no screening stats")
            continue
        if auto_screen(record.screening, cfg.thresholds) == "pass":
            record.transition("accepted", "auto")
        else:
            record.transition("flagged", "auto")
    return manifest


def refine_batch(manifest: DatasetManifest, manifest_dir, workers: int = 1,
                 debug_labels: bool = False) -> DatasetManifest:
    """Refine every accepted sample's matte; outputs are byte-identical
    for any worker count."""
    base = Path(manifest_dir)
    refined_dir = _subdir(base, "refined")
    records = manifest.by_status("accepted")

    def work(record: SampleRecord):
        try:
            alpha_img = load_alpha(_resolve(record.paths["alpha"], base))
            refined = refine(alpha_img)
        except (MatteKitError, OSError) as exc:
            return record.id, None, f"{type(exc).__name__}: {exc}"
        out = refined_dir / f"{record.id}.png"
        save_alpha(refined, out)
        if debug_labels:
            from .connectivity import connected_components
            from .image import save_label_map

            regions = connected_components(refined.values > 0, connectivity=4)
            save_label_map(regions.label_map, refined_dir / f"{record.id}_labels.png")
        return record.id, _rel(out, base), None

    if workers <= 1:
        results = [work(r) for r in records]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(work, records))

    for sample_id, rel_path, error in sorted(results, key=lambda t: t[0]):
        record = manifest.get(sample_id)
        if error is not None:
            record.error = error
            record.updated_at = utcnow()
            manifest.record_issue("refine", sample_id, error)
            continue
        record.paths["refined"] = rel_path
        record.transition("refined", "auto")
    return manifest


def fit_background(bg: Image.Image, width: int, height: int) -> RgbImage:
    """Scale to cover the target, then center-crop; no aspect distortion."""
    if bg.mode != "RGB":
        bg = bg.convert("RGB")
    scale = max(width / bg.width, height / bg.height)
    new_w = max(width, int(np.ceil(bg.width * scale)))
    new_h = max(height, int(np.ceil(bg.height * scale)))
    resized = bg.resize((new_w, new_h), Image.Resampling.BILINEAR)
    left = (new_w - width) // 2
    top = (new_h - height) // 2
    return RgbImage(np.asarray(resized.crop((left, top, left + width, top + height)),
                               dtype=np.uint8))


def composite_batch(manifest: DatasetManifest, manifest_dir, backgrounds_dir,
                    per_sample: int, seed: int) -> DatasetManifest:
    """Composite each refined sample over seeded-random backgrounds."""
    if per_sample == 0:
        return manifest
    base = Path(manifest_dir)
    comp_dir = _subdir(base, "composites")
    bg_paths = sorted(
        p for p in Path(backgrounds_dir).iterdir()
        if p.suffix.lower() in (".png", ".jpg", ".jpeg")
    )
    if not bg_paths:
        raise MatteKitError(f"no background images in {backgrounds_dir}")
    rng = np.random.Generator(np.random.PCG64(seed))
    for record in manifest.by_status("refined"):
        picks = rng.choice(len(bg_paths), size=per_sample,
                           replace=per_sample > len(bg_paths))
        try:
            alpha_img = load_alpha(_resolve(record.paths["refined"], base))
            fg = load_rgb(_resolve(record.paths["rgb"], base))
        except (MatteKitError, OSError) as exc:
            manifest.record_issue("composite", record.id, str(exc))
            continue
        record.composites = []
        for k, bg_index in enumerate(picks.tolist()):
            with Image.open(bg_paths[bg_index]) as bg_img:
                background = fit_background(bg_img, alpha_img.width, alpha_img.height)
            out = comp_dir / f"{record.id}_{k:02d}.png"
            save_rgb(composite(fg, alpha_img, background), out)
            record.composites.append(_rel(out, base))
        record.updated_at = utcnow()
    return manifest


def chroma_batch(manifest: DatasetManifest, manifest_dir,
                 key: KeyColor) -> DatasetManifest:
    """Re-derive each refined sample's matte by keying it off a solid
    backdrop, recording the round-trip error and the matte difference."""
    base = Path(manifest_dir)
    chroma_dir = _subdir(base, "chroma")
    for record in manifest.by_status("refined"):
        try:
            alpha_img = load_alpha(_resolve(record.paths["refined"], base))
            fg = load_rgb(_resolve(record.paths["rgb"], base))
        except (MatteKitError, OSError) as exc:
            manifest.record_issue("chroma", record.id, str(exc))
            continue
        backdrop = solid_background(key, alpha_img.width, alpha_img.height)
        comp = composite(fg, alpha_img, backdrop)
        keyed_alpha, keyed_fg = chroma_extract(comp, key)
        rebuilt = composite(keyed_fg, keyed_alpha, backdrop)
        round_trip = int(
            np.abs(rebuilt.values.astype(np.int16) - comp.values.astype(np.int16)).max()
        )
        alpha_path = chroma_dir / f"{record.id}_alpha.png"
        fg_path = chroma_dir / f"{record.id}_fg.png"
        save_alpha(keyed_alpha, alpha_path)
        save_rgb(keyed_fg, fg_path)
        record.paths["chroma_alpha"] = _rel(alpha_path, base)
        record.paths["chroma_fg"] = _rel(fg_path, base)
        record.chroma = {
            "round_trip_error": round_trip,
            "mad_alpha": metrics_mod.mad(keyed_alpha, alpha_img),
        }
        record.updated_at = utcnow()
    return manifest


def trimap_batch(manifest: DatasetManifest, manifest_dir,
                 config: PipelineConfig | None = None,
                 band: int | None = None) -> DatasetManifest:
    """Build trimaps for refined samples from their refined mattes."""
    cfg = config or PipelineConfig()
    base = Path(manifest_dir)
    tri_dir = _subdir(base, "trimaps")
    for record in manifest.by_status("refined"):
        try:
            alpha_img = load_alpha(_resolve(record.paths["refined"], base))
        except (MatteKitError, OSError) as exc:
            manifest.record_issue("trimap", record.id, str(exc))
            continue
        short = min(alpha_img.width, alpha_img.height)
        if band is not None and band > 0:
            fg_r = bg_r = band
        elif cfg.band > 0:
            fg_r = bg_r = cfg.band
        else:
            fg_r = max(1, round(cfg.fg_erode * short / 512))
            bg_r = max(1, round(cfg.bg_erode * short / 512))
        out = tri_dir / f"{record.id}.png"
        save_trimap(trimap_from_alpha(alpha_img, fg_r, bg_r), out)
        record.paths["trimap"] = _rel(out, base)
        record.updated_at = utcnow()
    return manifest


def evaluate_batch(pred_dir, gt_dir, *, mask_mode: str = "none", trimap_dir=None,
                   reduction: str = "sum", out_base=None) -> dict:
    """Evaluate paired mattes by file stem; aggregate with arithmetic means.

    Unpaired stems are listed and skipped; per-sample metric failures are
    recorded without stopping the batch. Writes `<out_base>.json` and
    `<out_base>.txt` when out_base is given.
    """
    pred_dir, gt_dir = Path(pred_dir), Path(gt_dir)
    pred_files = {p.stem: p for p in sorted(pred_dir.glob("*.png"))}
    gt_files = {p.stem: p for p in sorted(gt_dir.glob("*.png"))}
    unpaired = sorted(set(pred_files) ^ set(gt_files))
    reports: dict[str, metrics_mod.MetricReport] = {}
    errors: dict[str, str] = {}
    for stem in sorted(set(pred_files) & set(gt_files)):
        try:
            pred = load_alpha(pred_files[stem])
            gt = load_alpha(gt_files[stem])
            mask = None
            region = "full"
            if mask_mode == "trimap":
                if trimap_dir is None:
                    raise MatteKitError("trimap mask mode needs a trimap directory")
                mask = load_trimap(Path(trimap_dir) / f"{stem}.png").unknown_mask()
                region = "unknown"
            reports[stem] = metrics_mod.evaluate_pair(
                pred, gt, mask, region=region, reduction=reduction
            )
        except (MatteKitError, OSError) as exc:
            errors[stem] = f"{type(exc).__name__}: {exc}"
    aggregate = None
    if reports:
        vals = list(reports.values())
        aggregate = metrics_mod.MetricReport(
            mad=sum(r.mad for r in vals) / len(vals),
            mse=sum(r.mse for r in vals) / len(vals),
            grad=sum(r.grad for r in vals) / len(vals),
            conn=sum(r.conn for r in vals) / len(vals),
            region=vals[0].region,
        )
    doc = {
        "samples": {k: r.to_dict() for k, r in sorted(reports.items())},
        "aggregate": aggregate.to_dict() if aggregate else None,
        "unpaired": unpaired,
        "errors": errors,
    }
    if out_base is not None:
        out_base = Path(out_base)
        out_base.parent.mkdir(parents=True, exist_ok=True)
        json_text = metrics_mod.reports_to_json(
            reports, aggregate, extra={"unpaired": unpaired, "errors": errors}
        )
        out_base.with_suffix(".json").write_text(json_text + "\n", encoding="utf-8")
        out_base.with_suffix(".txt").write_text(
            metrics_mod.reports_table(reports, aggregate), encoding="utf-8"
        )
    return doc
