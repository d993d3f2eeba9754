"""Pipeline configuration: defaults, TOML loading, manifest snapshots.

The config file uses plain TOML tables. Every value has a default, so an
empty or missing file is valid. The random generator family is recorded
alongside the seed so a manifest states exactly how its randomness was
drawn (64-bit seed into PCG64).

Schema:

    [random]
    seed = 1234            # 64-bit seed for prompt sampling and
    generator = "pcg64"    # background assignment

    [screening]            # auto-screen thresholds (strict > flags)
    semi_fraction = 0.25
    attached_noise_fraction = 0.05
    removed_fraction = 0.30

    [composite]
    per_sample = 5         # backgrounds composited per refined sample

    [chroma]
    key_color = [0, 255, 0]

    [trimap]
    fg_erode = 10          # radii at 512 px scale, scaled with the
    bg_erode = 10          # short side when band is unset
    band = 0               # 0 means scale the default with image size

    [eval]
    mask = "none"          # "none" or "trimap"
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .connectivity import ScreeningThresholds
from .errors import ConfigError
from .image import DEFAULT_KEY, KeyColor

GENERATOR_FAMILY = "pcg64"


@dataclass(frozen=True)
class PipelineConfig:
    seed: int = 1234
    generator: str = GENERATOR_FAMILY
    thresholds: ScreeningThresholds = field(default_factory=ScreeningThresholds)
    per_sample: int = 5
    key_color: KeyColor = DEFAULT_KEY
    fg_erode: int = 10
    bg_erode: int = 10
    band: int = 0
    mask_mode: str = "none"

    def to_dict(self) -> dict:
        return {
            "random": {"seed": self.seed, "generator": self.generator},
            "screening": self.thresholds.to_dict(),
            "composite": {"per_sample": self.per_sample},
            "chroma": {"key_color": [self.key_color.r, self.key_color.g, self.key_color.b]},
            "trimap": {"fg_erode": self.fg_erode, "bg_erode": self.bg_erode, "band": self.band},
            "eval": {"mask": self.mask_mode},
        }


def parse_key_color(text: str) -> KeyColor:
    """Parse an 'R,G,B' triple."""
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 3:
        raise ConfigError(f"key color must be 'R,G,B', got {text!r}")
    try:
        r, g, b = (int(p) for p in parts)
        return KeyColor(r, g, b)
    except ValueError as exc:
        raise ConfigError(f"bad key color {text!r}: {exc}") from exc


def load_config(path=None) -> PipelineConfig:
    """Load a TOML config file; a missing path yields pure defaults."""
    if path is None:
        return PipelineConfig()
    raw = Path(path).read_bytes()
    try:
        doc = tomllib.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    return config_from_dict(doc, source=str(path))


def config_from_dict(doc: dict, source: str = "<dict>") -> PipelineConfig:
    def section(name):
        sec = doc.get(name, {})
        if not isinstance(sec, dict):
            raise ConfigError(f"{source}: [{name}] must be a table")
        return sec

    rnd = section("random")
    scr = section("screening")
    comp = section("composite")
    chroma = section("chroma")
    tri = section("trimap")
    ev = section("eval")

    defaults = PipelineConfig()
    try:
        key = chroma.get("key_color")
        key_color = KeyColor(*key) if key is not None else defaults.key_color
        thresholds = ScreeningThresholds(
            semi_fraction=float(scr.get("semi_fraction", defaults.thresholds.semi_fraction)),
            attached_noise_fraction=float(
                scr.get("attached_noise_fraction", defaults.thresholds.attached_noise_fraction)
            ),
            removed_fraction=float(
                scr.get("removed_fraction", defaults.thresholds.removed_fraction)
            ),
        )
        cfg = PipelineConfig(
            seed=int(rnd.get("seed", defaults.seed)),
            generator=str(rnd.get("generator", defaults.generator)),
            thresholds=thresholds,
            per_sample=int(comp.get("per_sample", defaults.per_sample)),
            key_color=key_color,
            fg_erode=int(tri.get("fg_erode", defaults.fg_erode)),
            bg_erode=int(tri.get("bg_erode", defaults.bg_erode)),
            band=int(tri.get("band", defaults.band)),
            mask_mode=str(ev.get("mask", defaults.mask_mode)),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{source}: bad config value: {exc}") from exc
    if cfg.generator != GENERATOR_FAMILY:
        raise ConfigError(
            f"{source}: unsupported generator {cfg.generator!r}; only {GENERATOR_FAMILY!r}"
        )
    if cfg.mask_mode not in ("none", "trimap"):
        raise ConfigError(f"{source}: eval.mask must be 'none' or 'trimap'")
    if cfg.per_sample < 0:
        raise ConfigError(f"{source}: composite.per_sample must be >= 0")
    return cfg
