"""Connected-component machinery and connectivity-aware matte refinement.

Generated portrait mattes carry two kinds of defects: stray alpha values
floating in the background, and speckle inside the solid foreground. Valid
semi-transparent detail, by contrast, forms bands along the subject's edge,
reachable from the background. Refinement exploits that: it keeps exactly
the semi-transparent regions that grow out of the background boundary,
promotes the rest to solid foreground, and then extracts the single largest
connected subject, zeroing everything else.

Adjacency conventions: background and foreground components use
4-connectivity (diagonal one-pixel gaps do not leak), semi-transparent
growth and seed detection use 8-connectivity (diagonal hair wisps stay
attached). All traversal is iterative with an explicit frontier, so image
size is bounded by memory, not the call stack.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Literal, Union

import numpy as np

from .errors import DimensionError, EmptyForegroundError, InvalidSeedError
from .image import AlphaMatte, InverseAlpha
from .matte import invert_alpha

BinaryGrid = Union[InverseAlpha, np.ndarray]


@dataclass(frozen=True)
class RegionSet:
    """Labeled connected regions of a binary grid.

    label_map holds one region id per pixel, 0 for unlabeled pixels;
    region ids run 1..region_count in row-major discovery order, so the
    first pixel of region k precedes the first pixel of region k+1.
    """

    label_map: np.ndarray = field(repr=False)
    region_count: int
    region_sizes: tuple[int, ...]
    connectivity: int

    def __post_init__(self):
        lm = np.asarray(self.label_map, dtype=np.int32)
        lm.setflags(write=False)
        object.__setattr__(self, "label_map", lm)
        if len(self.region_sizes) != self.region_count:
            raise ValueError("region_sizes length must equal region_count")

    @property
    def shape(self) -> tuple[int, int]:
        return self.label_map.shape

    def mask(self) -> np.ndarray:
        """Boolean mask of all labeled pixels."""
        return self.label_map > 0


@dataclass(frozen=True)
class SeedSet:
    """Pixel coordinates that start a region growth, as (row, col) pairs."""

    points: tuple[tuple[int, int], ...]

    def __post_init__(self):
        pts = tuple((int(r), int(c)) for r, c in self.points)
        if len(set(pts)) != len(pts):
            raise ValueError("seed points contain duplicates")
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class ScreeningStats:
    """Quick quality numbers for one generated matte.

    semi_fraction: semi-transparent share of all pixels.
    attached_noise_fraction: share of semi-transparent pixels sitting in
        background-reachable regions that never touch solid foreground
        (floating wisps with nothing to hang from).
    removed_fraction: share of semi-transparent pixels whose value the
        refinement corrects.
    """

    semi_fraction: float
    attached_noise_fraction: float
    removed_fraction: float

    def __post_init__(self):
        for name in ("semi_fraction", "attached_noise_fraction", "removed_fraction"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise ValueError(f"{name}={v} outside [0, 1]")

    def to_dict(self) -> dict:
        return {
            "semi_fraction": self.semi_fraction,
            "attached_noise_fraction": self.attached_noise_fraction,
            "removed_fraction": self.removed_fraction,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ScreeningStats":
        return cls(
            semi_fraction=float(d["semi_fraction"]),
            attached_noise_fraction=float(d["attached_noise_fraction"]),
            removed_fraction=float(d["removed_fraction"]),
        )


@dataclass(frozen=True)
class ScreeningThresholds:
    """Flagging thresholds for auto screening (strict inequality trips).

    Defaults are working conventions, not measured values; the human
    review queue stays authoritative.
    """

    semi_fraction: float = 0.25
    attached_noise_fraction: float = 0.05
    removed_fraction: float = 0.30

    def to_dict(self) -> dict:
        return {
            "semi_fraction": self.semi_fraction,
            "attached_noise_fraction": self.attached_noise_fraction,
            "removed_fraction": self.removed_fraction,
        }


def _as_bool_mask(mask: BinaryGrid) -> np.ndarray:
    if isinstance(mask, InverseAlpha):
        return mask.mask()
    arr = np.asarray(mask)
    if arr.ndim != 2:
        raise DimensionError(f"binary grid must be 2-D, got shape {arr.shape}")
    return arr != 0


def _label_mask(mask: np.ndarray, connectivity: int) -> tuple[np.ndarray, list[int]]:
    """Flood-fill labeling via breadth-first traversal over a flat grid.

    Works on plain Python lists: element access in the hot loop is several
    times faster than numpy scalar indexing.
    """
    h, w = mask.shape
    flat = mask.ravel().tolist()
    labels = [0] * (h * w)
    sizes: list[int] = []
    last = w - 1
    for start in np.flatnonzero(mask.ravel()).tolist():
        if labels[start]:
            continue
        region = len(sizes) + 1
        labels[start] = region
        frontier = deque((start,))
        count = 0
        while frontier:
            i = frontier.popleft()
            count += 1
            c = i % w
            up, down = i - w, i + w
            if up >= 0 and flat[up] and not labels[up]:
                labels[up] = region
                frontier.append(up)
            if down < len(flat) and flat[down] and not labels[down]:
                labels[down] = region
                frontier.append(down)
            if c > 0 and flat[i - 1] and not labels[i - 1]:
                labels[i - 1] = region
                frontier.append(i - 1)
            if c < last and flat[i + 1] and not labels[i + 1]:
                labels[i + 1] = region
                frontier.append(i + 1)
            if connectivity == 8:
                if c > 0:
                    for j in (up - 1, down - 1):
                        if 0 <= j < len(flat) and flat[j] and not labels[j]:
                            labels[j] = region
                            frontier.append(j)
                if c < last:
                    for j in (up + 1, down + 1):
                        if 0 <= j < len(flat) and flat[j] and not labels[j]:
                            labels[j] = region
                            frontier.append(j)
        sizes.append(count)
    label_map = np.array(labels, dtype=np.int32).reshape(h, w)
    return label_map, sizes


def connected_components(mask: BinaryGrid, connectivity: int = 4) -> RegionSet:
    """Label the connected on-pixels of a binary grid.

    Two on-pixels share a label exactly when a path of on-pixels joins
    them under the given adjacency (4 = edge neighbors, 8 = edge and
    corner neighbors).
    """
    if connectivity not in (4, 8):
        raise ValueError(f"connectivity must be 4 or 8, got {connectivity}")
    m = _as_bool_mask(mask)
    label_map, sizes = _label_mask(m, connectivity)
    return RegionSet(
        label_map=label_map,
        region_count=len(sizes),
        region_sizes=tuple(sizes),
        connectivity=connectivity,
    )


def background_regions(alpha: AlphaMatte) -> RegionSet:
    """Connected regions of strict background (alpha exactly 0)."""
    return connected_components(alpha.values == 0, connectivity=4)


def _dilate8(mask: np.ndarray) -> np.ndarray:
    """Pixels having at least one true 8-neighbor (or being true)."""
    out = mask.copy()
    out[:-1, :] |= mask[1:, :]
    out[1:, :] |= mask[:-1, :]
    out[:, :-1] |= mask[:, 1:]
    out[:, 1:] |= mask[:, :-1]
    out[:-1, :-1] |= mask[1:, 1:]
    out[:-1, 1:] |= mask[1:, :-1]
    out[1:, :-1] |= mask[:-1, 1:]
    out[1:, 1:] |= mask[:-1, :-1]
    return out


def edge_seed_points(inv: InverseAlpha, bg: RegionSet) -> SeedSet:
    """Semi-transparent pixels that touch a background region.

    These are the starting points of the valid edge bands: a pixel is a
    seed when it is 8-adjacent to at least one labeled background pixel.
    Points come back in row-major order.
    """
    if inv.shape != bg.shape:
        raise DimensionError(f"inverse alpha {inv.shape} and regions {bg.shape} differ")
    near_bg = _dilate8(bg.mask())
    pts = np.argwhere(inv.mask() & near_bg)
    return SeedSet(tuple((int(r), int(c)) for r, c in pts))


def grow_semitransparent(inv: InverseAlpha, seeds: SeedSet) -> RegionSet:
    """Grow the seeded semi-transparent regions to their full extent.

    Returns every 8-connected component of the semi-transparent set that
    contains at least one seed; the alpha values on these pixels are the
    ones refinement keeps.
    """
    m = inv.mask()
    h, w = m.shape
    for r, c in seeds.points:
        if not (0 <= r < h and 0 <= c < w) or not m[r, c]:
            raise InvalidSeedError(f"seed ({r}, {c}) is not on a semi-transparent pixel")
    comps = connected_components(m, connectivity=8)
    keep = sorted({int(comps.label_map[r, c]) for r, c in seeds.points})
    relabel = np.zeros(comps.region_count + 1, dtype=np.int32)
    sizes = []
    for new, old in enumerate(keep, start=1):
        relabel[old] = new
        sizes.append(comps.region_sizes[old - 1])
    return RegionSet(
        label_map=relabel[comps.label_map],
        region_count=len(keep),
        region_sizes=tuple(sizes),
        connectivity=8,
    )


def _largest_region(regions: RegionSet, weights: np.ndarray) -> int:
    """Pick the dominant region: most pixels, then largest value sum,
    then earliest first pixel (lowest label). Returns its label."""
    sums = np.bincount(
        regions.label_map.ravel(),
        weights=weights.astype(np.float64).ravel(),
        minlength=regions.region_count + 1,
    )
    best = max(
        range(1, regions.region_count + 1),
        key=lambda lbl: (regions.region_sizes[lbl - 1], sums[lbl], -lbl),
    )
    return best


def _refinement_parts(alpha: AlphaMatte):
    """Shared core of refine and screening_stats.

    Returns (refined values, inverse alpha, retained semi regions,
    foreground regions of the corrected matte, kept label).
    """
    v = alpha.values
    if not v.any():
        raise EmptyForegroundError("matte has no nonzero pixel to extract a subject from")
    inv = invert_alpha(alpha)
    bg = background_regions(alpha)
    seeds = edge_seed_points(inv, bg)
    semi = grow_semitransparent(inv, seeds)

    work = v.copy()
    noisy = inv.mask() & (semi.label_map == 0)
    work[noisy] = 255

    fg = connected_components(work > 0, connectivity=4)
    main = _largest_region(fg, work)
    work[fg.label_map != main] = 0
    return work, inv, semi, fg, main


def refine(alpha: AlphaMatte) -> AlphaMatte:
    """Correct a generated matte using the edge-connectivity property.

    Semi-transparent pixels not reachable from the background are
    promoted to 255 (they sit inside the subject), then only the largest
    connected nonzero region survives; everything else becomes
    background. Pixels in retained edge bands keep their exact values.
    Raises EmptyForegroundError for an all-zero matte.
    """
    work, _, _, _, _ = _refinement_parts(alpha)
    return AlphaMatte(work)


def screening_stats(alpha: AlphaMatte) -> ScreeningStats:
    """Quantify how much of a matte's semi-transparent content is suspect."""
    v = alpha.values
    semi_mask = (v != 0) & (v != 255)
    semi_count = int(semi_mask.sum())
    total = v.size
    if semi_count == 0:
        return ScreeningStats(0.0, 0.0, 0.0)

    work, inv, semi, _, _ = _refinement_parts(alpha)

    near_fg = _dilate8(v == 255)
    touching = set(np.unique(semi.label_map[near_fg]).tolist())
    attached = sum(
        semi.region_sizes[lbl - 1]
        for lbl in range(1, semi.region_count + 1)
        if lbl not in touching
    )

    removed = int((semi_mask & (work != v)).sum())
    return ScreeningStats(
        semi_fraction=semi_count / total,
        attached_noise_fraction=attached / semi_count,
        removed_fraction=removed / semi_count,
    )


def auto_screen(
    stats: ScreeningStats, thresholds: ScreeningThresholds | None = None
) -> Literal["pass", "flag"]:
    """Flag a matte when any screening stat strictly exceeds its threshold."""
    t = thresholds or ScreeningThresholds()
    if (
        stats.semi_fraction > t.semi_fraction
        or stats.attached_noise_fraction > t.attached_noise_fraction
        or stats.removed_fraction > t.removed_fraction
    ):
        return "flag"
    return "pass"
