"""The matting equation and its direct consequences.

The compositing identity  I = a*F + (1 - a)*B  (alpha normalized to
[0, 1]) underlies everything here: blending a foreground over a
background, filling solid backdrops, and inverting the blend to pull a
matte back off a known solid color. Blend arithmetic runs in float64
and quantizes to 8 bits only at the boundary, rounding half away from
zero so results are identical across platforms.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionError
from .image import AlphaMatte, InverseAlpha, KeyColor, RgbImage


def round_half_away(x: np.ndarray) -> np.ndarray:
    """Round to nearest integer, ties away from zero (unlike np.round)."""
    return np.trunc(x + np.copysign(0.5, x))


def quantize_u8(x: np.ndarray) -> np.ndarray:
    """Quantize float data to uint8 with half-away-from-zero rounding."""
    return np.clip(round_half_away(np.asarray(x, dtype=np.float64)), 0, 255).astype(np.uint8)


def invert_alpha(alpha: AlphaMatte) -> InverseAlpha:
    """Mark the semi-transparent pixels of a matte.

    Pixels whose alpha is exactly 0 or 255 map to 0; every strictly
    intermediate pixel maps to 255.
    """
    v = alpha.values
    semi = (v != 0) & (v != 255)
    return InverseAlpha(np.where(semi, 255, 0).astype(np.uint8))


def composite(fg: RgbImage, alpha: AlphaMatte, bg: RgbImage) -> RgbImage:
    """Blend a foreground over a background through an alpha matte."""
    if not (fg.shape == alpha.shape == bg.shape):
        raise DimensionError(
            f"composite inputs disagree: fg {fg.shape}, alpha {alpha.shape}, bg {bg.shape}"
        )
    a = alpha.normalized()[:, :, None]
    blended = a * fg.values.astype(np.float64) + (1.0 - a) * bg.values.astype(np.float64)
    return RgbImage(quantize_u8(blended))


def solid_background(color: KeyColor, width: int, height: int) -> RgbImage:
    """A width x height image filled with one color."""
    if width < 1 or height < 1:
        raise DimensionError(f"background dimensions must be >= 1, got {width}x{height}")
    arr = np.empty((height, width, 3), dtype=np.uint8)
    arr[:, :] = (color.r, color.g, color.b)
    return RgbImage(arr)


def chroma_extract(comp: RgbImage, key: KeyColor) -> tuple[AlphaMatte, RgbImage]:
    """Pull a matte and foreground off a composite over a known solid color.

    The blend equation is underdetermined per pixel, so the estimate takes
    the smallest alpha that can explain each pixel with an in-gamut
    foreground: per channel, the deviation from the key relative to the
    headroom in the deviation's direction (key_c up to 255, or key_c down
    to 0), maximized over channels. Alpha is quantized upward so the
    implied foreground stays inside [0, 255]; the foreground then follows
    by inverting the blend. Re-compositing the result over the key
    reproduces the input within +/-1 per channel.
    """
    img = comp.values.astype(np.float64)
    k = key.as_array()

    up = img - k  # deviation toward 255
    down = k - img  # deviation toward 0
    up_room = 255.0 - k
    down_room = k
    # Channels with no headroom in a direction cannot deviate that way.
    ratio_up = np.where(up_room > 0, up / np.where(up_room > 0, up_room, 1.0), 0.0)
    ratio_down = np.where(down_room > 0, down / np.where(down_room > 0, down_room, 1.0), 0.0)
    ratio = np.maximum(ratio_up, ratio_down).max(axis=2)
    ratio = np.clip(ratio, 0.0, 1.0)

    # Ceiling keeps quantized alpha >= the per-pixel feasibility bound.
    alpha_int = np.ceil(ratio * 255.0 - 1e-9).astype(np.uint8)
    a = alpha_int.astype(np.float64) / 255.0

    safe = np.where(a > 0, a, 1.0)[:, :, None]
    fg = (img - (1.0 - a[:, :, None]) * k) / safe
    fg = np.where(a[:, :, None] > 0, fg, img)

    return AlphaMatte(alpha_int), RgbImage(quantize_u8(fg))
