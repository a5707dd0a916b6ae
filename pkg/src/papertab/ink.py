"""Binary ink extraction from the unwarped page.

Adaptive thresholding finds dark strokes against the local paper tone,
morphology cleans speckle, and connected-component filtering drops blobs
that look like a palm or fingers (large, or large and touching the page
border) while keeping pen strokes.
"""

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .raster import ensure_mask, ensure_raster


@dataclass(frozen=True)
class ThresholdConfig:
    """Local-mean threshold parameters."""

    window: int = 31
    offset_c: int = 12

    def __post_init__(self):
        if self.window < 3 or self.window % 2 == 0:
            raise ValueError("threshold window must be odd and >= 3")
        if self.offset_c < 0:
            raise ValueError("offset_c must be >= 0")


@dataclass(frozen=True)
class ComponentFilterConfig:
    """Keep/drop rules for labeled ink components.

    ``finger_exemption`` lets small border-touching components (strokes
    that run off the page edge) survive border rejection; it is tuned for
    a page unwarped to roughly 640 px width.
    """

    min_area: int = 10
    max_area_fraction: float = 0.25
    reject_border_blobs: bool = True
    finger_exemption: int = 400

    def __post_init__(self):
        if self.min_area < 1:
            raise ValueError("min_area must be >= 1")
        if not 0.0 < self.max_area_fraction <= 1.0:
            raise ValueError("max_area_fraction must be in (0, 1]")
        if self.finger_exemption < 0:
            raise ValueError("finger_exemption must be >= 0")


@dataclass(frozen=True)
class LabelMap:
    """Connected-component labels plus per-label statistics.

    ``labels`` holds 0 for background and 1..count in first-encounter scan
    order. ``bboxes`` rows are (x0, y0, x1, y1) inclusive; ``border_contact``
    marks components touching any image border.
    """

    labels: np.ndarray
    count: int
    areas: np.ndarray = field(repr=False)
    bboxes: np.ndarray = field(repr=False)
    border_contact: np.ndarray = field(repr=False)

    @property
    def width(self) -> int:
        return self.labels.shape[1]

    @property
    def height(self) -> int:
        return self.labels.shape[0]


def full_se(height: int = 3, width: int = 3) -> np.ndarray:
    """All-true structuring element with its origin at the center."""
    return np.ones((height, width), dtype=bool)


def _check_se(se: np.ndarray) -> np.ndarray:
    se = np.asarray(se)
    if se.dtype != bool or se.ndim != 2:
        raise ValueError("structuring element must be a 2-D bool array")
    if se.shape[0] % 2 == 0 or se.shape[1] % 2 == 0:
        raise ValueError("structuring element sides must be odd")
    if not se.any():
        raise ValueError("structuring element is empty")
    return se


def adaptive_threshold(gray: np.ndarray, cfg: ThresholdConfig) -> np.ndarray:
    """Mark pixels darker than their local mean minus offset_c as ink.

    The mean is taken over a window x window box with border replication
    and truncated toward zero, so results are bit-exactly reproducible
    against a direct per-pixel computation.
    """
    gray = ensure_raster(gray)
    if gray.ndim != 2:
        raise ValueError("adaptive_threshold expects a grayscale raster")
    if cfg.window > min(gray.shape):
        raise ValueError(
            f"window {cfg.window} larger than image {gray.shape[1]}x{gray.shape[0]}")
    return kernels.adaptive_threshold_u8(
        np.ascontiguousarray(gray), cfg.window, cfg.offset_c)


def erode(mask: np.ndarray, se: np.ndarray | None = None) -> np.ndarray:
    """Pixels whose whole SE footprint is foreground (outside = background)."""
    mask = ensure_mask(mask)
    se = full_se() if se is None else _check_se(se)
    return kernels.erode_bool(mask, se)


def dilate(mask: np.ndarray, se: np.ndarray | None = None) -> np.ndarray:
    """Union of mask translates over the SE (outside = background)."""
    mask = ensure_mask(mask)
    se = full_se() if se is None else _check_se(se)
    return kernels.dilate_bool(mask, se)


def opening(mask: np.ndarray, se: np.ndarray | None = None) -> np.ndarray:
    """Erosion followed by dilation; removes specks smaller than the SE."""
    return dilate(erode(mask, se), se)


def closing(mask: np.ndarray, se: np.ndarray | None = None) -> np.ndarray:
    """Dilation followed by erosion; fills pores smaller than the SE."""
    return erode(dilate(mask, se), se)


def label_components(mask: np.ndarray, connectivity: int = 8) -> LabelMap:
    """Label foreground components and compute exact per-label stats."""
    mask = ensure_mask(mask)
    if connectivity not in (4, 8):
        raise ValueError("connectivity must be 4 or 8")
    labels, count, _, areas, bboxes, border = kernels.label_components(
        mask, connectivity)
    return LabelMap(labels=labels, count=count, areas=areas,
                    bboxes=bboxes, border_contact=border)


def component_keep(lm: LabelMap, cfg: ComponentFilterConfig) -> np.ndarray:
    """Per-label keep decision: plausible ink, not speckle, not a palm."""
    ceiling = cfg.max_area_fraction * lm.width * lm.height
    keep = (lm.areas >= cfg.min_area) & (lm.areas <= ceiling)
    if cfg.reject_border_blobs:
        keep &= ~(lm.border_contact & (lm.areas > cfg.finger_exemption))
    return keep


def palm_rejected(lm: LabelMap, cfg: ComponentFilterConfig) -> np.ndarray:
    """Per-label flag for components rejected by the palm/border rules.

    Speckle (below min_area) does not count: only oversized blobs and
    large border-touching blobs mark occluded page regions.
    """
    ceiling = cfg.max_area_fraction * lm.width * lm.height
    rejected = lm.areas > ceiling
    if cfg.reject_border_blobs:
        rejected |= lm.border_contact & (lm.areas > cfg.finger_exemption)
    return rejected


def filter_components(lm: LabelMap, cfg: ComponentFilterConfig) -> np.ndarray:
    """Union of kept components as a binary mask."""
    lut = np.zeros(lm.count + 1, dtype=bool)
    lut[1:] = component_keep(lm, cfg)
    return lut[lm.labels]


def render_ink(mask: np.ndarray) -> np.ndarray:
    """Ink pixels to 0 (black) on a 255 (white) page."""
    mask = ensure_mask(mask)
    return np.where(mask, 0, 255).astype(np.uint8)
