"""Core raster types and PNG I/O.

All pixel grids are numpy arrays in row-major (height, width) order.
Alpha values use the 8-bit convention: 0 is background, 255 is opaque
foreground, anything in between is semi-transparent. Arrays held by the
wrapper types are frozen (non-writeable) so instances can be shared
freely between threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from PIL import Image

from .errors import DimensionError, ImageFormatError


def _frozen(values, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class AlphaMatte:
    """A width x height grid of transparency values in [0, 255]."""

    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.asarray(self.values)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise DimensionError(f"alpha matte must be a 2-D grid, got shape {arr.shape}")
        if arr.dtype != np.uint8:
            if np.any(arr < 0) or np.any(arr > 255):
                raise ValueError("alpha values must lie in [0, 255]")
        object.__setattr__(self, "values", _frozen(arr, np.uint8))

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def normalized(self) -> np.ndarray:
        """Alpha as float64 in [0, 1]."""
        return self.values.astype(np.float64) / 255.0

    def __eq__(self, other) -> bool:
        if not isinstance(other, AlphaMatte):
            return NotImplemented
        return self.values.shape == other.values.shape and bool(
            np.array_equal(self.values, other.values)
        )

    def __hash__(self):
        return hash((self.values.shape, self.values.tobytes()))


@dataclass(frozen=True)
class InverseAlpha:
    """Binary grid marking the semi-transparent pixels of a matte.

    255 marks pixels whose alpha is strictly between 0 and 255; 0 marks
    pixels that are pure background or pure foreground.
    """

    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.asarray(self.values)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise DimensionError(f"inverse alpha must be a 2-D grid, got shape {arr.shape}")
        if not np.all((arr == 0) | (arr == 255)):
            raise ValueError("inverse alpha values must be exactly 0 or 255")
        object.__setattr__(self, "values", _frozen(arr, np.uint8))

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def mask(self) -> np.ndarray:
        """Boolean mask of the semi-transparent pixels."""
        return self.values == 255

    def __eq__(self, other) -> bool:
        if not isinstance(other, InverseAlpha):
            return NotImplemented
        return self.values.shape == other.values.shape and bool(
            np.array_equal(self.values, other.values)
        )

    def __hash__(self):
        return hash((self.values.shape, self.values.tobytes()))


@dataclass(frozen=True)
class RgbImage:
    """A width x height grid of 8-bit RGB pixels, shape (H, W, 3)."""

    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.asarray(self.values)
        if arr.ndim != 3 or arr.shape[2] != 3 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise DimensionError(f"rgb image must have shape (H, W, 3), got {arr.shape}")
        if arr.dtype != np.uint8:
            if np.any(arr < 0) or np.any(arr > 255):
                raise ValueError("channel values must lie in [0, 255]")
        object.__setattr__(self, "values", _frozen(arr, np.uint8))

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape[:2]

    def __eq__(self, other) -> bool:
        if not isinstance(other, RgbImage):
            return NotImplemented
        return self.values.shape == other.values.shape and bool(
            np.array_equal(self.values, other.values)
        )

    def __hash__(self):
        return hash((self.values.shape, self.values.tobytes()))


@dataclass(frozen=True)
class KeyColor:
    """A solid background color used for chroma keying."""

    r: int
    g: int
    b: int

    def __post_init__(self):
        for name in ("r", "g", "b"):
            v = getattr(self, name)
            if not (0 <= int(v) <= 255):
                raise ValueError(f"key color channel {name}={v} outside [0, 255]")
            object.__setattr__(self, name, int(v))

    def as_array(self) -> np.ndarray:
        return np.array([self.r, self.g, self.b], dtype=np.float64)


# Background color convention for the chroma-key experiment; pure green is a
# convention, not a measured value.
DEFAULT_KEY = KeyColor(0, 255, 0)

_REJECTED_MODE_HINTS = {
    "P": "paletted PNG is not supported",
    "I": "16-bit PNG is not supported",
    "I;16": "16-bit PNG is not supported",
    "I;16B": "16-bit PNG is not supported",
    "I;16L": "16-bit PNG is not supported",
}


def _open_checked(path) -> Image.Image:
    try:
        img = Image.open(path)
        img.load()
    except FileNotFoundError:
        raise
    except Exception as exc:
        raise ImageFormatError(f"cannot read {path}: {exc}") from exc
    if img.mode in _REJECTED_MODE_HINTS:
        raise ImageFormatError(f"{path}: {_REJECTED_MODE_HINTS[img.mode]}")
    return img


def load_alpha(path) -> AlphaMatte:
    """Read an 8-bit grayscale PNG as an alpha matte."""
    img = _open_checked(path)
    if img.mode != "L":
        raise ImageFormatError(f"{path}: expected 8-bit grayscale, got mode {img.mode}")
    return AlphaMatte(np.asarray(img, dtype=np.uint8))


def load_rgb(path) -> RgbImage:
    """Read an 8-bit RGB PNG."""
    img = _open_checked(path)
    if img.mode != "RGB":
        raise ImageFormatError(f"{path}: expected 8-bit RGB, got mode {img.mode}")
    return RgbImage(np.asarray(img, dtype=np.uint8))


def load_rgba(path) -> tuple[RgbImage, AlphaMatte]:
    """Read an 8-bit RGBA PNG and split it into color and alpha."""
    img = _open_checked(path)
    if img.mode != "RGBA":
        raise ImageFormatError(f"{path}: expected 8-bit RGBA, got mode {img.mode}")
    arr = np.asarray(img, dtype=np.uint8)
    return RgbImage(arr[:, :, :3]), AlphaMatte(arr[:, :, 3])


def load_inverse(path) -> InverseAlpha:
    img = _open_checked(path)
    if img.mode != "L":
        raise ImageFormatError(f"{path}: expected 8-bit grayscale, got mode {img.mode}")
    return InverseAlpha(np.asarray(img, dtype=np.uint8))


def save_alpha(matte: AlphaMatte, path) -> None:
    Image.fromarray(matte.values, mode="L").save(path, format="PNG")


def save_inverse(inv: InverseAlpha, path) -> None:
    Image.fromarray(inv.values, mode="L").save(path, format="PNG")


def save_rgb(image: RgbImage, path) -> None:
    Image.fromarray(image.values, mode="RGB").save(path, format="PNG")


def save_rgba(image: RgbImage, alpha: AlphaMatte, path) -> None:
    if image.shape != alpha.shape:
        raise DimensionError(
            f"color {image.shape} and alpha {alpha.shape} dimensions differ"
        )
    arr = np.dstack([image.values, alpha.values])
    Image.fromarray(arr, mode="RGBA").save(path, format="PNG")


def save_label_map(label_map: np.ndarray, path) -> None:
    """Write a region label map as 16-bit grayscale PNG (debug aid)."""
    arr = np.asarray(label_map)
    if arr.max(initial=0) > 0xFFFF:
        raise ValueError("label map has more than 65535 regions")
    Image.fromarray(arr.astype(np.uint16)).save(path, format="PNG")
