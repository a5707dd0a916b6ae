"""Temporal stabilization: quad smoothing, ink accumulation, occlusion.

Per-frame detection flickers; this layer smooths the detected quad with a
per-corner EMA, rejects implausible jumps, and accumulates rectified ink
into a persistent canvas so strokes hidden under the hand survive from
earlier frames. It owns the only mutable session state in the pipeline;
updates return new values, and exactly one worker should drive them.
"""

from dataclasses import dataclass, replace

import numpy as np

from .ink import ComponentFilterConfig, LabelMap, dilate, palm_rejected
from .quadgeom import NotAQuad, OrderedQuad
from .raster import ensure_mask


@dataclass(frozen=True)
class QuadTrack:
    """Smoothed paper quad plus failure-age bookkeeping.

    ``last_good_age`` counts consecutive frames whose detection failed or
    was rejected; it resets to 0 whenever a detection is accepted.
    """

    ema_alpha: float = 0.4
    jump_threshold: float = 40.0
    current: OrderedQuad | None = None
    last_good_age: int = 0

    def __post_init__(self):
        if not 0.0 < self.ema_alpha <= 1.0:
            raise ValueError("ema_alpha must be in (0, 1]")
        if self.jump_threshold <= 0.0:
            raise ValueError("jump_threshold must be positive")


def update_quad(track: QuadTrack, detected: OrderedQuad | None) -> QuadTrack:
    """Fold one detection (or a failure) into the track.

    Failures and corner jumps beyond ``jump_threshold`` keep the current
    quad and age it; accepted detections blend per corner with
    ``alpha * detected + (1 - alpha) * current``. A blend that would leave
    the convex-quad domain is treated as a rejection, so the track never
    holds a non-convex quad.
    """
    if detected is None:
        return replace(track, last_good_age=track.last_good_age + 1)
    if track.current is None:
        return replace(track, current=detected, last_good_age=0)
    disp = np.hypot(*(detected.pts - track.current.pts).T)
    if float(disp.max()) > track.jump_threshold:
        return replace(track, last_good_age=track.last_good_age + 1)
    a = track.ema_alpha
    blended = a * detected.pts + (1.0 - a) * track.current.pts
    try:
        quad = OrderedQuad(blended)
    except NotAQuad:
        return replace(track, last_good_age=track.last_good_age + 1)
    return replace(track, current=quad, last_good_age=0)


@dataclass(frozen=True)
class InkCanvas:
    """Accumulated rectified ink plus per-pixel last-observation frame.

    Dimensions are fixed for a whole session. ``last_seen`` is -1 where a
    pixel has never been observed outside occlusion.
    """

    ink: np.ndarray
    last_seen: np.ndarray

    @classmethod
    def blank(cls, width: int, height: int) -> "InkCanvas":
        return cls(
            ink=np.zeros((height, width), dtype=bool),
            last_seen=np.full((height, width), -1, dtype=np.int32),
        )

    @property
    def width(self) -> int:
        return self.ink.shape[1]

    @property
    def height(self) -> int:
        return self.ink.shape[0]


def update_canvas(canvas: InkCanvas, frame_ink: np.ndarray,
                  occlusion: np.ndarray, t: int) -> InkCanvas:
    """Write this frame's ink into every unoccluded pixel.

    Occluded pixels keep their previous ink and last_seen values, which is
    what lets content persist under a hand.
    """
    frame_ink = ensure_mask(frame_ink)
    occlusion = ensure_mask(occlusion)
    if frame_ink.shape != canvas.ink.shape or occlusion.shape != canvas.ink.shape:
        raise ValueError("canvas, frame ink and occlusion dimensions differ")
    if t < 0:
        raise ValueError("frame index must be non-negative")
    visible = ~occlusion
    return InkCanvas(
        ink=np.where(visible, frame_ink, canvas.ink),
        last_seen=np.where(visible, np.int32(t), canvas.last_seen),
    )


def occlusion_mask(lm: LabelMap, cfg: ComponentFilterConfig,
                   margin: int = 5) -> np.ndarray:
    """Union of palm-rejected components, grown by a safety margin.

    Marks page regions to protect from canvas updates rather than merely
    deleting them. The margin dilation is a (2*margin+1) box, applied
    separably.
    """
    lut = np.zeros(lm.count + 1, dtype=bool)
    lut[1:] = palm_rejected(lm, cfg)
    mask = lut[lm.labels]
    if margin > 0 and mask.any():
        side = 2 * margin + 1
        mask = dilate(mask, np.ones((1, side), dtype=bool))
        mask = dilate(mask, np.ones((side, 1), dtype=bool))
    return mask


class PageChangeDetector:
    """Detects a sheet swap: most canvas ink vanishing for many frames.

    A frame votes for a page change when at least ``fraction`` of the
    canvas ink pixels are visible (not occluded) yet absent from the
    frame's ink. ``frames`` consecutive votes trigger a reset.
    """

    def __init__(self, fraction: float = 0.6, frames: int = 15):
        if not 0.0 < fraction <= 1.0:
            raise ValueError("fraction must be in (0, 1]")
        if frames < 1:
            raise ValueError("frames must be >= 1")
        self.fraction = fraction
        self.frames = frames
        self._streak = 0

    def update(self, canvas: InkCanvas, frame_ink: np.ndarray,
               occlusion: np.ndarray) -> bool:
        """Feed one frame; True means the canvas should be reset now."""
        total = int(canvas.ink.sum())
        if total == 0:
            self._streak = 0
            return False
        vanished = int((canvas.ink & ~occlusion & ~frame_ink).sum())
        if vanished >= self.fraction * total:
            self._streak += 1
        else:
            self._streak = 0
        if self._streak >= self.frames:
            self._streak = 0
            return True
        return False
