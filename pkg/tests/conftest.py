"""Shared builders: synthetic mattes, noisy/clean pairs, and the 6x6
hand-traced refinement fixture."""

from __future__ import annotations

import numpy as np
import pytest

from mattekit import AlphaMatte


def hand_fixture() -> tuple[AlphaMatte, AlphaMatte]:
    """The 6x6 trace: cols 0-1 zero, col 2 a 128 band, cols 3-5 opaque,
    plus a 64 at (2,0) floating in the background and a 128 at (4,4)
    inside the foreground. Refinement must zero the first, promote the
    second, and keep the band. Returns (noisy, expected)."""
    noisy = np.zeros((6, 6), dtype=np.uint8)
    noisy[:, 2] = 128
    noisy[:, 3:6] = 255
    noisy[2, 0] = 64
    noisy[4, 4] = 128
    expected = noisy.copy()
    expected[2, 0] = 0
    expected[4, 4] = 255
    return AlphaMatte(noisy), AlphaMatte(expected)


def clean_subject_matte(rng: np.random.Generator, h: int = 56, w: int = 56,
                        band: int = 2) -> np.ndarray:
    """An elliptical subject: opaque core wrapped in a semi-transparent
    edge ring over empty background. Refinement leaves it unchanged."""
    cy = h / 2 + rng.uniform(-h * 0.06, h * 0.06)
    cx = w / 2 + rng.uniform(-w * 0.06, w * 0.06)
    ry = rng.uniform(h * 0.22, h * 0.32)
    rx = rng.uniform(w * 0.22, w * 0.32)
    yy, xx = np.mgrid[0:h, 0:w]
    d = ((yy - cy) / ry) ** 2 + ((xx - cx) / rx) ** 2
    inner = ((min(ry, rx) - band) / min(ry, rx)) ** 2
    values = np.zeros((h, w), dtype=np.uint8)
    ring = (d <= 1.0) & (d > inner)
    core = d <= inner
    values[core] = 255
    values[ring] = rng.integers(1, 255, size=int(ring.sum()), dtype=np.uint8)
    return values


def _place_blob(values: np.ndarray, allowed: np.ndarray, rng: np.random.Generator,
                fill) -> bool:
    """Drop a 1-3 px blob where `allowed` is true, keeping a 2 px
    Chebyshev margin to everything else; marks the used area forbidden."""
    candidates = np.argwhere(allowed)
    if len(candidates) == 0:
        return False
    r, c = (int(x) for x in candidates[rng.integers(len(candidates))])
    shape = rng.integers(3)
    pixels = [(r, c)]
    if shape >= 1 and r + 1 < values.shape[0] and allowed[r + 1, c]:
        pixels.append((r + 1, c))
    if shape == 2 and c + 1 < values.shape[1] and allowed[r, c + 1]:
        pixels.append((r, c + 1))
    for rr, cc in pixels:
        values[rr, cc] = fill() if callable(fill) else fill
    for rr, cc in pixels:
        r0, r1 = max(0, rr - 4), min(values.shape[0], rr + 5)
        c0, c1 = max(0, cc - 4), min(values.shape[1], cc + 5)
        allowed[r0:r1, c0:c1] = False
    return True


def noisy_pair(rng: np.random.Generator, h: int = 56, w: int = 56
               ) -> tuple[AlphaMatte, AlphaMatte]:
    """A clean subject plus injected defects whose refinement target is
    exactly the clean matte: semi blobs in the background, semi speckle
    inside the core, and detached opaque islands."""
    clean = clean_subject_matte(rng, h, w)
    noisy = clean.copy()

    subject = clean > 0
    margin = subject.copy()
    for _ in range(2):  # 2 px Chebyshev dilation
        grown = margin.copy()
        grown[:-1, :] |= margin[1:, :]
        grown[1:, :] |= margin[:-1, :]
        grown[:, :-1] |= margin[:, 1:]
        grown[:, 1:] |= margin[:, :-1]
        grown[:-1, :-1] |= margin[1:, 1:]
        grown[1:, 1:] |= margin[:-1, :-1]
        grown[:-1, 1:] |= margin[1:, :-1]
        grown[1:, :-1] |= margin[:-1, 1:]
        margin = grown
    bg_allowed = ~margin
    bg_allowed[:1, :] = bg_allowed[-1:, :] = False
    bg_allowed[:, :1] = bg_allowed[:, -1:] = False

    core = clean == 255
    interior = core.copy()
    for _ in range(2):  # keep speckle 2 px away from the edge ring
        shrunk = interior.copy()
        shrunk[:-1, :] &= interior[1:, :]
        shrunk[1:, :] &= interior[:-1, :]
        shrunk[:, :-1] &= interior[:, 1:]
        shrunk[:, 1:] &= interior[:, :-1]
        shrunk[:-1, :-1] &= interior[1:, 1:]
        shrunk[1:, 1:] &= interior[:-1, :-1]
        shrunk[:-1, 1:] &= interior[1:, :-1]
        shrunk[1:, :-1] &= interior[:-1, 1:]
        interior = shrunk

    semi_value = lambda: int(rng.integers(1, 255))
    for _ in range(int(rng.integers(1, 4))):  # background semi blobs
        _place_blob(noisy, bg_allowed, rng, semi_value)
    for _ in range(int(rng.integers(1, 3))):  # detached opaque islands
        _place_blob(noisy, bg_allowed, rng, 255)
    for _ in range(int(rng.integers(1, 3))):  # foreground-interior speckle
        _place_blob(noisy, interior, rng, semi_value)

    return AlphaMatte(noisy), AlphaMatte(clean)


def random_valid_matte(rng: np.random.Generator, h: int = 18, w: int = 22) -> AlphaMatte:
    """Arbitrary non-empty matte; mixes pure noise, blocky regions, and
    thresholded smooth fields."""
    kind = rng.integers(3)
    if kind == 0:
        values = rng.integers(0, 256, size=(h, w), dtype=np.uint8)
    elif kind == 1:
        values = np.zeros((h, w), dtype=np.uint8)
        for _ in range(int(rng.integers(2, 7))):
            r0, c0 = rng.integers(h - 1), rng.integers(w - 1)
            r1, c1 = rng.integers(r0 + 1, h + 1), rng.integers(c0 + 1, w + 1)
            values[r0:r1, c0:c1] = rng.choice([0, 64, 128, 200, 255])
    else:
        field = rng.normal(size=(h + 4, w + 4))
        smooth = sum(
            np.roll(np.roll(field, dy, 0), dx, 1)
            for dy in (-1, 0, 1) for dx in (-1, 0, 1)
        )[2:-2, 2:-2]
        lo, hi = np.quantile(smooth, [0.3, 0.7])
        values = np.full((h, w), 128, dtype=np.uint8)
        values[smooth < lo] = 0
        values[smooth > hi] = 255
    if not values.any():
        values[h // 2, w // 2] = 255
    return AlphaMatte(values)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(20260811))
