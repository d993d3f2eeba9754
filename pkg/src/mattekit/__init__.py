"""mattekit: turn generated portrait foreground/alpha pairs into
training-grade matting data.

Core pieces: image types and PNG I/O, the matting equation and chroma
keying, connectivity-aware matte refinement with screening stats,
matting quality metrics, trimap construction, and a manifest-driven
batch pipeline with a human review service.
"""

from .connectivity import (
    RegionSet,
    ScreeningStats,
    ScreeningThresholds,
    SeedSet,
    auto_screen,
    background_regions,
    connected_components,
    edge_seed_points,
    grow_semitransparent,
    refine,
    screening_stats,
)
from .errors import (
    ConfigError,
    ConnUndefinedError,
    DimensionError,
    EmptyForegroundError,
    EmptyMaskError,
    ImageFormatError,
    InvalidSeedError,
    ManifestError,
    ManifestLockError,
    MatteKitError,
    PromptTemplateError,
    StateTransitionError,
)
from .image import (
    DEFAULT_KEY,
    AlphaMatte,
    InverseAlpha,
    KeyColor,
    RgbImage,
    load_alpha,
    load_rgb,
    load_rgba,
    save_alpha,
    save_rgb,
    save_rgba,
)
from .matte import chroma_extract, composite, invert_alpha, solid_background
from .metrics import (
    MetricReport,
    VideoMetricReport,
    conn,
    dtssd,
    evaluate_pair,
    evaluate_sequence,
    grad,
    mad,
    mse,
)
from .prompts import PromptSpec, generate_prompts
from .trimap import Trimap, dilate, erode, trimap_from_alpha, trimap_from_mask

__version__ = "0.1.0"

__all__ = [
    "AlphaMatte",
    "InverseAlpha",
    "RgbImage",
    "KeyColor",
    "DEFAULT_KEY",
    "Trimap",
    "RegionSet",
    "SeedSet",
    "ScreeningStats",
    "ScreeningThresholds",
    "MetricReport",
    "VideoMetricReport",
    "PromptSpec",
    "invert_alpha",
    "composite",
    "solid_background",
    "chroma_extract",
    "connected_components",
    "background_regions",
    "edge_seed_points",
    "grow_semitransparent",
    "refine",
    "screening_stats",
    "auto_screen",
    "mad",
    "mse",
    "grad",
    "conn",
    "dtssd",
    "evaluate_pair",
    "evaluate_sequence",
    "erode",
    "dilate",
    "trimap_from_alpha",
    "trimap_from_mask",
    "generate_prompts",
    "load_alpha",
    "load_rgb",
    "load_rgba",
    "save_alpha",
    "save_rgb",
    "save_rgba",
    "MatteKitError",
    "DimensionError",
    "ImageFormatError",
    "InvalidSeedError",
    "EmptyForegroundError",
    "EmptyMaskError",
    "ConnUndefinedError",
    "PromptTemplateError",
    "ManifestError",
    "ManifestLockError",
    "StateTransitionError",
    "ConfigError",
]
