"""Matting quality metrics: MAD, MSE, Grad, Conn, and dtSSD.

All metrics run on alphas normalized to [0, 1] in double precision and
carry the conventional reporting scales: MAD and MSE x10^3, Grad and
Conn x10^-3, dtSSD x10^2. Grad and Conn accumulate raw sums by default
(not per-pixel means); pass reduction="mean" for the mean convention.
An optional boolean mask restricts every metric to a pixel subset, e.g.
the unknown band of a trimap.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import ndimage

from .connectivity import connected_components
from .errors import ConnUndefinedError, DimensionError, EmptyMaskError
from .image import AlphaMatte

MAD_SCALE = 1e3
MSE_SCALE = 1e3
GRAD_SCALE = 1e-3
CONN_SCALE = 1e-3
DTSSD_SCALE = 1e2


def _pair(pred: AlphaMatte, gt: AlphaMatte, mask) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    if pred.shape != gt.shape:
        raise DimensionError(f"pred {pred.shape} and gt {gt.shape} dimensions differ")
    if mask is None:
        m = np.ones(pred.shape, dtype=bool)
    else:
        m = np.asarray(mask) != 0
        if m.shape != pred.shape:
            raise DimensionError(f"mask {m.shape} does not match mattes {pred.shape}")
    if not m.any():
        raise EmptyMaskError("metric mask selects no pixels")
    return pred.normalized(), gt.normalized(), m


def mad(pred: AlphaMatte, gt: AlphaMatte, mask=None) -> float:
    """Mean absolute difference over the masked pixels, x10^3."""
    p, g, m = _pair(pred, gt, mask)
    return float(np.abs(p - g)[m].mean() * MAD_SCALE)


def mse(pred: AlphaMatte, gt: AlphaMatte, mask=None) -> float:
    """Mean squared difference over the masked pixels, x10^3."""
    p, g, m = _pair(pred, gt, mask)
    return float(((p - g) ** 2)[m].mean() * MSE_SCALE)


def gaussian_derivative_kernels(sigma: float = 1.4) -> tuple[np.ndarray, np.ndarray]:
    """First-order Gaussian derivative filter pair (horizontal, vertical).

    Kernel radius is ceil(3*sigma); the pair is L2-normalized jointly so
    gradient magnitudes are comparable across sigmas.
    """
    radius = int(math.ceil(3.0 * sigma))
    xs = np.arange(-radius, radius + 1, dtype=np.float64)
    g = np.exp(-(xs**2) / (2.0 * sigma**2)) / (sigma * math.sqrt(2.0 * math.pi))
    dg = -xs * g / sigma**2
    hx = np.outer(g, dg)
    hx = hx / math.sqrt(float((hx**2).sum()))
    return hx, hx.T


def _gradient_magnitude(img: np.ndarray, sigma: float) -> np.ndarray:
    hx, hy = gaussian_derivative_kernels(sigma)
    gx = ndimage.convolve(img, hx, mode="reflect")
    gy = ndimage.convolve(img, hy, mode="reflect")
    return np.hypot(gx, gy)


def grad(pred: AlphaMatte, gt: AlphaMatte, mask=None, *, sigma: float = 1.4,
         reduction: str = "sum") -> float:
    """Gradient error: squared difference of Gaussian-derivative gradient
    magnitudes, summed (or averaged) over the masked pixels, x10^-3."""
    p, g, m = _pair(pred, gt, mask)
    err = (_gradient_magnitude(p, sigma) - _gradient_magnitude(g, sigma)) ** 2
    return float(_reduce(err, m, reduction) * GRAD_SCALE)


def _reduce(err: np.ndarray, m: np.ndarray, reduction: str) -> float:
    if reduction == "sum":
        return float(err[m].sum())
    if reduction == "mean":
        return float(err[m].mean())
    raise ValueError(f"reduction must be 'sum' or 'mean', got {reduction!r}")


def _conn_levels(step: float) -> list[float]:
    n = int(round(1.0 / step))
    if n < 1 or abs(n * step - 1.0) > 1e-12:
        raise ValueError(f"step {step} must divide 1.0 evenly")
    return [k / n for k in range(1, n + 1)]


def conn(pred: AlphaMatte, gt: AlphaMatte, mask=None, *, step: float = 0.1,
         delta: float = 0.15, reduction: str = "sum") -> float:
    """Connectivity error against the largest jointly-opaque source region.

    The source is the largest 4-connected region where both mattes are
    fully opaque. For each pixel, l is the highest threshold in
    (0, 1] (sweep granularity `step`) at which the pixel stays connected
    to the source inside the jointly-thresholded set {pred >= t, gt >= t};
    per matte, d = alpha - l and phi = 1 - d when d >= delta else 1.
    The error is the sum (or mean) of |phi_pred - phi_gt| over the masked
    pixels, x10^-3. Raises ConnUndefinedError when no pixel is fully
    opaque in both mattes.
    """
    p, g, m = _pair(pred, gt, mask)
    both_opaque = (p >= 1.0) & (g >= 1.0)
    if not both_opaque.any():
        raise ConnUndefinedError("no pixel is fully opaque in both mattes")
    regions = connected_components(both_opaque, connectivity=4)
    sizes = np.asarray(regions.region_sizes)
    source_label = int(sizes.argmax()) + 1  # ties: earliest region wins
    source = regions.label_map == source_label

    l_map = np.zeros(p.shape, dtype=np.float64)
    for level in _conn_levels(step):
        joint = (p >= level) & (g >= level)
        comps = connected_components(joint, connectivity=4)
        touched = np.unique(comps.label_map[source])
        reachable = np.isin(comps.label_map, touched[touched > 0])
        l_map[reachable] = level

    d_p = p - l_map
    d_g = g - l_map
    phi_p = 1.0 - d_p * (d_p >= delta)
    phi_g = 1.0 - d_g * (d_g >= delta)
    return float(_reduce(np.abs(phi_p - phi_g), m, reduction) * CONN_SCALE)


def dtssd(pred_frames: Sequence[AlphaMatte], gt_frames: Sequence[AlphaMatte]) -> float:
    """Temporal consistency error between two alpha sequences, x10^2.

    For each frame transition, the RMS over pixels of the difference
    between the two temporal derivatives; averaged over transitions.
    """
    if len(pred_frames) != len(gt_frames):
        raise DimensionError(
            f"sequence lengths differ: {len(pred_frames)} vs {len(gt_frames)}"
        )
    if len(pred_frames) < 2:
        raise DimensionError("dtssd needs at least 2 frames")
    shape = pred_frames[0].shape
    for fr in list(pred_frames) + list(gt_frames):
        if fr.shape != shape:
            raise DimensionError("all frames must share dimensions")
    n = shape[0] * shape[1]
    total = 0.0
    for t in range(len(pred_frames) - 1):
        dp = pred_frames[t + 1].normalized() - pred_frames[t].normalized()
        dg = gt_frames[t + 1].normalized() - gt_frames[t].normalized()
        total += math.sqrt(float(((dp - dg) ** 2).sum()) / n)
    return total / (len(pred_frames) - 1) * DTSSD_SCALE


@dataclass(frozen=True)
class MetricReport:
    """One evaluated pair: the four image metrics at reporting scale."""

    mad: float
    mse: float
    grad: float
    conn: float
    region: str = "full"  # "full" or "unknown"

    def to_dict(self) -> dict:
        return {
            "mad": self.mad,
            "mse": self.mse,
            "grad": self.grad,
            "conn": self.conn,
            "region": self.region,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MetricReport":
        return cls(
            mad=float(d["mad"]),
            mse=float(d["mse"]),
            grad=float(d["grad"]),
            conn=float(d["conn"]),
            region=str(d.get("region", "full")),
        )


@dataclass(frozen=True)
class VideoMetricReport:
    """Per-frame image metrics plus the temporal consistency score."""

    frames: tuple[MetricReport, ...]
    dtssd: float

    def to_dict(self) -> dict:
        return {"frames": [f.to_dict() for f in self.frames], "dtssd": self.dtssd}


def evaluate_pair(pred: AlphaMatte, gt: AlphaMatte, mask=None, *,
                  region: str = "full", reduction: str = "sum") -> MetricReport:
    """Run all four image metrics with one shared mask."""
    return MetricReport(
        mad=mad(pred, gt, mask),
        mse=mse(pred, gt, mask),
        grad=grad(pred, gt, mask, reduction=reduction),
        conn=conn(pred, gt, mask, reduction=reduction),
        region=region,
    )


def evaluate_sequence(pred_frames: Sequence[AlphaMatte], gt_frames: Sequence[AlphaMatte],
                      masks=None, *, region: str = "full",
                      reduction: str = "sum") -> VideoMetricReport:
    """Evaluate a frame sequence: per-frame metrics plus dtSSD."""
    if masks is None:
        masks = [None] * len(pred_frames)
    frames = tuple(
        evaluate_pair(p, g, m, region=region, reduction=reduction)
        for p, g, m in zip(pred_frames, gt_frames, masks)
    )
    return VideoMetricReport(frames=frames, dtssd=dtssd(pred_frames, gt_frames))


def reports_to_json(reports: dict[str, MetricReport], aggregate: MetricReport | None = None,
                    extra: dict | None = None) -> str:
    doc: dict = {"samples": {name: r.to_dict() for name, r in sorted(reports.items())}}
    if aggregate is not None:
        doc["aggregate"] = aggregate.to_dict()
    if extra:
        doc.update(extra)
    return json.dumps(doc, indent=2, sort_keys=True)


def reports_table(reports: dict[str, MetricReport], aggregate: MetricReport | None = None,
                  dtssd_value: float | None = None) -> str:
    """Aligned plain-text table with columns MAD, MSE, Grad, Conn[, dtSSD]."""
    headers = ["sample", "MAD", "MSE", "Grad", "Conn"]
    if dtssd_value is not None:
        headers.append("dtSSD")
    rows = []
    for name in sorted(reports):
        r = reports[name]
        row = [name, f"{r.mad:.4f}", f"{r.mse:.4f}", f"{r.grad:.4f}", f"{r.conn:.4f}"]
        if dtssd_value is not None:
            row.append("")
        rows.append(row)
    if aggregate is not None:
        row = ["mean", f"{aggregate.mad:.4f}", f"{aggregate.mse:.4f}",
               f"{aggregate.grad:.4f}", f"{aggregate.conn:.4f}"]
        if dtssd_value is not None:
            row.append(f"{dtssd_value:.4f}")
        rows.append(row)
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h)
              for i, h in enumerate(headers)]
    def fmt(row):
        first = row[0].ljust(widths[0])
        rest = "  ".join(cell.rjust(w) for cell, w in zip(row[1:], widths[1:]))
        return f"{first}  {rest}".rstrip()
    return "\n".join([fmt(headers)] + [fmt(r) for r in rows]) + "\n"
