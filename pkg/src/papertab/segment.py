"""Paper-region segmentation.

The shipped segmenter is classical: an intensity threshold seeded at a
brightness percentile and refined by two-class mean iteration, followed
by largest-component selection. It sits behind a small interface
(``segment_paper`` returning a ``SegmentationResult``) so a learned
backend can replace it without touching the rest of the pipeline.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .quadgeom import DegenerateHull, convex_hull, polygon_area
from .raster import ensure_raster, flip_horizontal


class NoPaperFound(ValueError):
    """No bright region passed the candidate gates."""


@dataclass(frozen=True)
class SegmenterConfig:
    """Classical segmenter knobs.

    ``downscale_factor`` subsamples the frame before thresholding (the
    mask is upscaled back by nearest neighbor). ``min_region_fraction``
    is the fraction of frame area a candidate must cover.
    ``brightness_percentile`` seeds the threshold iteration.
    ``min_brightness`` is the mean intensity a region must reach to count
    as paper at all; it is what maps an all-dark frame to NoPaperFound.
    """

    downscale_factor: int = 1
    min_region_fraction: float = 0.08
    brightness_percentile: float = 75.0
    min_brightness: float = 100.0

    def __post_init__(self):
        if self.downscale_factor < 1:
            raise ValueError("downscale_factor must be >= 1")
        if not 0.0 < self.min_region_fraction < 1.0:
            raise ValueError("min_region_fraction must be in (0, 1)")
        if not 50.0 < self.brightness_percentile < 100.0:
            raise ValueError("brightness_percentile must be in (50, 100)")
        if not 0.0 <= self.min_brightness <= 255.0:
            raise ValueError("min_brightness must be in [0, 255]")


@dataclass(frozen=True)
class SegmentationResult:
    """Paper mask plus a convexity-based confidence in [0, 1]."""

    mask: np.ndarray
    confidence: float


def apply_handedness(frame: np.ndarray, handedness: str) -> np.ndarray:
    """Mirror the frame for left-handed users; right-handed is a no-op."""
    if handedness == "right":
        return ensure_raster(frame)
    if handedness == "left":
        return flip_horizontal(frame)
    raise ValueError(f"handedness must be 'left' or 'right', got {handedness!r}")


def _percentile_value(hist: np.ndarray, total: int, percentile: float) -> int:
    """Nearest-rank percentile over an intensity histogram."""
    rank = max(1, int(np.ceil(percentile / 100.0 * total)))
    return int(np.searchsorted(np.cumsum(hist), rank))


def _iterate_threshold(hist: np.ndarray, seed: int) -> int:
    """Two-class mean iteration (isodata) from a seed intensity.

    Returns k such that `value >= k` is the bright class. Deterministic:
    integer k each round, stops on a fixed point or a 2-cycle (taking the
    smaller k).
    """
    values = np.arange(256, dtype=np.int64)
    csum = np.cumsum(hist * values)
    ccount = np.cumsum(hist)
    total_sum = int(csum[-1])
    total_count = int(ccount[-1])
    vmin = int(np.flatnonzero(hist)[0])
    vmax = int(np.flatnonzero(hist)[-1])

    k = min(max(seed, vmin), vmax)
    prev = -1
    for _ in range(256):
        lo_count = int(ccount[k - 1]) if k > 0 else 0
        lo_sum = int(csum[k - 1]) if k > 0 else 0
        hi_count = total_count - lo_count
        hi_sum = total_sum - lo_sum
        m_lo = lo_sum / lo_count if lo_count else float(vmin)
        m_hi = hi_sum / hi_count if hi_count else float(vmax)
        nxt = int(np.ceil((m_lo + m_hi) / 2.0))
        nxt = min(max(nxt, vmin), vmax)
        if nxt == k:
            return k
        if nxt == prev:
            return min(k, nxt)
        prev = k
        k = nxt
    return k


def segment_paper(frame: np.ndarray, cfg: SegmenterConfig) -> SegmentationResult:
    """Mask the single largest bright contiguous region of a gray frame.

    The region must cover at least ``min_region_fraction`` of the frame
    and average at least ``min_brightness``; otherwise NoPaperFound.
    Confidence is region area over its convex hull area, so ragged
    non-quadrilateral regions score low.
    """
    frame = ensure_raster(frame)
    if frame.ndim != 2:
        raise ValueError("segment_paper expects a grayscale frame")
    h, w = frame.shape
    f = cfg.downscale_factor
    small = frame[::f, ::f] if f > 1 else frame
    sh, sw = small.shape

    hist = np.bincount(small.ravel(), minlength=256).astype(np.int64)
    seed = _percentile_value(hist, sh * sw, cfg.brightness_percentile)
    k = _iterate_threshold(hist, seed)
    bright = small >= k

    labels, count, _, areas, _, _ = kernels.label_components(bright, 4)
    if count == 0:
        raise NoPaperFound("no bright region")
    best = int(np.argmax(areas))  # ties keep first-encounter order
    area = int(areas[best])
    if area < cfg.min_region_fraction * sh * sw:
        raise NoPaperFound(
            f"largest bright region covers {area / (sh * sw):.3f} of the frame")
    region = labels == best + 1
    if float(small[region].mean()) < cfg.min_brightness:
        raise NoPaperFound("largest region is too dark to be paper")

    confidence = _hull_confidence(region, area)
    if f > 1:
        mask = np.repeat(np.repeat(region, f, axis=0), f, axis=1)[:h, :w]
    else:
        mask = region.copy()
    return SegmentationResult(mask=mask, confidence=confidence)


def _hull_confidence(region: np.ndarray, area: int) -> float:
    """Region area over convex-hull area, clamped to [0, 1]."""
    ys, xs = np.nonzero(region)  # row-major, so index 0 is the scan-order start
    contour = kernels.moore_trace(region, 1, int(ys[0]), int(xs[0]))
    try:
        hull = convex_hull(contour)
    except DegenerateHull:
        return 0.0
    hull_area = polygon_area(hull)
    if hull_area <= 0.0:
        return 0.0
    return min(1.0, area / hull_area)
