"""Binary morphology and trimap construction.

Trimaps partition an image into definite foreground (255), definite
background (0), and an unknown band (128) for a matting model to
resolve. The band is carved with disc-shaped erosion so it is isotropic.
The image is treated as embedded in an infinite background plane:
eroding a foreground set loses its border pixels, eroding a background
set keeps them, so clean backgrounds never grow an unknown frame at the
image edge while foreground touching the edge stays conservative.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from PIL import Image
from scipy import ndimage

from .errors import DimensionError, ImageFormatError
from .image import AlphaMatte

TRIMAP_BG = 0
TRIMAP_UNKNOWN = 128
TRIMAP_FG = 255


@dataclass(frozen=True)
class Trimap:
    """Three-valued map over {0 background, 128 unknown, 255 foreground}."""

    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.asarray(self.values)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise DimensionError(f"trimap must be a 2-D grid, got shape {arr.shape}")
        if not np.isin(arr, (TRIMAP_BG, TRIMAP_UNKNOWN, TRIMAP_FG)).all():
            raise ValueError("trimap values must be exactly 0, 128, or 255")
        arr = np.array(arr, dtype=np.uint8, copy=True)
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def fg_mask(self) -> np.ndarray:
        return self.values == TRIMAP_FG

    def bg_mask(self) -> np.ndarray:
        return self.values == TRIMAP_BG

    def unknown_mask(self) -> np.ndarray:
        return self.values == TRIMAP_UNKNOWN


def disc(radius: int) -> np.ndarray:
    """Disc structuring element: offsets within Euclidean distance radius."""
    if radius < 0:
        raise ValueError(f"radius must be >= 0, got {radius}")
    span = np.arange(-radius, radius + 1)
    return (span[:, None] ** 2 + span[None, :] ** 2) <= radius**2


def erode(mask: np.ndarray, radius: int, *, outside: bool = False) -> np.ndarray:
    """Binary erosion with a disc of the given radius.

    `outside` is the membership assumed for pixels beyond the image
    border: False treats the outside as not in the mask (border pixels
    erode away), True treats it as in the mask (borders survive).
    Radius 0 is the identity.
    """
    m = np.asarray(mask) != 0
    if radius == 0:
        return m.copy()
    return ndimage.binary_erosion(m, structure=disc(radius), border_value=int(outside))


def dilate(mask: np.ndarray, radius: int) -> np.ndarray:
    """Binary dilation with a disc of the given radius; radius 0 is identity."""
    m = np.asarray(mask) != 0
    if radius == 0:
        return m.copy()
    return ndimage.binary_dilation(m, structure=disc(radius), border_value=0)


def _assemble(fg: np.ndarray, bg: np.ndarray) -> Trimap:
    values = np.full(fg.shape, TRIMAP_UNKNOWN, dtype=np.uint8)
    values[bg] = TRIMAP_BG
    values[fg] = TRIMAP_FG
    return Trimap(values)


def trimap_from_alpha(alpha: AlphaMatte, fg_erode: int, bg_erode: int) -> Trimap:
    """Trimap from a ground-truth matte.

    Definite foreground is the eroded fully-opaque set, definite
    background the eroded zero set (borders counting as background);
    everything else, including every semi-transparent pixel, is unknown.
    """
    v = alpha.values
    fg = erode(v == 255, fg_erode, outside=False)
    bg = erode(v == 0, bg_erode, outside=True)
    return _assemble(fg, bg)


def trimap_from_mask(mask: np.ndarray, band: int) -> Trimap:
    """Trimap from a binary segmentation mask with a symmetric unknown band."""
    if band < 1:
        raise ValueError(f"band must be >= 1, got {band}")
    m = np.asarray(mask) != 0
    fg = erode(m, band, outside=False)
    bg = erode(~m, band, outside=True)
    return _assemble(fg, bg)


def default_band(short_side: int) -> int:
    """Band radius scaled from the 10 px at 512 px convention."""
    return max(1, round(10 * short_side / 512))


def save_trimap(trimap: Trimap, path) -> None:
    Image.fromarray(trimap.values, mode="L").save(path, format="PNG")


def load_trimap(path) -> Trimap:
    img = Image.open(path)
    img.load()
    if img.mode != "L":
        raise ImageFormatError(f"{path}: expected 8-bit grayscale trimap, got {img.mode}")
    return Trimap(np.asarray(img, dtype=np.uint8))
