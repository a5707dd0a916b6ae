"""Per-frame pipeline: camera frame in, rectified ink content out.

Stage order: handedness flip, grayscale, paper segmentation, contour and
quad extraction, temporal quad smoothing, unwarp at the fixed canvas
geometry, adaptive threshold, open/close, component labeling, palm
filtering and occlusion marking, canvas accumulation, rendering.

Detection failures never abort a frame: they downgrade to a
``detection-lost`` event while the last good quad (if any) keeps driving
the unwarp. The session runs single-threaded; the temporal state has one
writer and consumers only ever see freshly rendered copies.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from . import ink as inkmod
from . import quadgeom, segment, temporal
from .config import PipelineConfig
from .perspective import SingularSystem, TargetGeometry, unwarp
from .quadgeom import DegenerateHull, NotAQuad, OrderedQuad
from .raster import ensure_raster, to_grayscale

EVENT_DETECTION_LOST = "detection-lost"
EVENT_PAGE_BREAK = "page-break"

STAGE_NAMES = (
    "handedness", "grayscale", "segment", "contour", "quad_fit", "track",
    "unwarp", "threshold", "morphology", "components", "filter", "canvas",
    "render", "total",
)


@dataclass
class FrameResult:
    """Output of one frame: rendered content plus events and diagnostics."""

    frame_index: int
    content: np.ndarray
    per_frame_ink: np.ndarray
    canvas_render: np.ndarray
    events: list[str]
    quad: OrderedQuad | None
    confidence: float
    last_good_age: int
    timings_ms: dict[str, float]
    diagnostics: dict = field(default_factory=dict)


class PipelineSession:
    """Owns the mutable state of one capture session."""

    def __init__(self, config: PipelineConfig, collect_diagnostics: bool = False):
        self.config = config
        self.collect_diagnostics = collect_diagnostics
        w, h = config.output.canvas_size()
        self.canvas_geometry = TargetGeometry(w, h)
        self.track = temporal.QuadTrack(
            ema_alpha=config.temporal.ema_alpha,
            jump_threshold=config.temporal.jump_threshold,
        )
        self.canvas = temporal.InkCanvas.blank(w, h)
        self.page_change = temporal.PageChangeDetector(
            fraction=config.temporal.page_change_fraction,
            frames=config.temporal.page_change_frames,
        )
        self.frame_index = 0
        self.stage_ms: dict[str, list[float]] = {name: [] for name in STAGE_NAMES}

    def process_frame(self, frame: np.ndarray) -> FrameResult:
        """Run the full stage chain on one frame."""
        cfg = self.config
        t_index = self.frame_index
        self.frame_index += 1
        events: list[str] = []
        diag: dict = {}
        timings: dict[str, float] = {}
        t_start = time.perf_counter()

        def clock(name, t0):
            dt = (time.perf_counter() - t0) * 1000.0
            timings[name] = timings.get(name, 0.0) + dt

        t0 = time.perf_counter()
        frame = segment.apply_handedness(ensure_raster(frame), cfg.handedness)
        clock("handedness", t0)

        t0 = time.perf_counter()
        gray = to_grayscale(frame) if frame.ndim == 3 else frame
        clock("grayscale", t0)

        detected = None
        confidence = 0.0
        stage = "segment"
        t0 = time.perf_counter()
        try:
            result = segment.segment_paper(gray, cfg.segmenter)
            confidence = result.confidence
            clock("segment", t0)

            stage = "contour"
            t0 = time.perf_counter()
            contours = quadgeom.trace_contours(result.mask)
            contour = quadgeom.largest_contour(contours)
            hull = quadgeom.convex_hull(contour)
            clock("contour", t0)

            stage = "quad_fit"
            t0 = time.perf_counter()
            detected = quadgeom.fit_quad(hull)
            clock("quad_fit", t0)
            if self.collect_diagnostics:
                diag["mask"] = result.mask
        except (segment.NoPaperFound, DegenerateHull, NotAQuad):
            clock(stage, t0)

        t0 = time.perf_counter()
        age_before = self.track.last_good_age
        self.track = temporal.update_quad(self.track, detected)
        if self.track.last_good_age > age_before:
            events.append(EVENT_DETECTION_LOST)
        clock("track", t0)

        geom = self.canvas_geometry
        if self.track.current is None:
            # Nothing to unwarp yet; the canvas is still blank.
            frame_ink = np.zeros((geom.out_height, geom.out_width), dtype=bool)
            occlusion = np.zeros_like(frame_ink)
            rectified = np.full((geom.out_height, geom.out_width), 255, np.uint8)
        else:
            t0 = time.perf_counter()
            try:
                rectified = unwarp(gray, self.track.current, geom)
            except SingularSystem:
                rectified = np.full((geom.out_height, geom.out_width), 255, np.uint8)
            clock("unwarp", t0)

            t0 = time.perf_counter()
            raw_ink = inkmod.adaptive_threshold(rectified, cfg.threshold)
            clock("threshold", t0)

            t0 = time.perf_counter()
            cleaned = inkmod.closing(inkmod.opening(raw_ink))
            clock("morphology", t0)

            t0 = time.perf_counter()
            lm = inkmod.label_components(cleaned, 8)
            clock("components", t0)

            t0 = time.perf_counter()
            frame_ink = inkmod.filter_components(lm, cfg.filter)
            occlusion = temporal.occlusion_mask(
                lm, cfg.filter, margin=cfg.temporal.occlusion_margin)
            clock("filter", t0)

        t0 = time.perf_counter()
        if self.page_change.update(self.canvas, frame_ink, occlusion):
            self.canvas = temporal.InkCanvas.blank(geom.out_width, geom.out_height)
            events.append(EVENT_PAGE_BREAK)
        self.canvas = temporal.update_canvas(self.canvas, frame_ink, occlusion, t_index)
        clock("canvas", t0)

        t0 = time.perf_counter()
        per_frame_render = inkmod.render_ink(frame_ink)
        canvas_render = inkmod.render_ink(self.canvas.ink)
        content = per_frame_render if cfg.output.mode == "per-frame" else canvas_render
        clock("render", t0)

        timings["total"] = (time.perf_counter() - t_start) * 1000.0
        for name in STAGE_NAMES:
            self.stage_ms[name].append(timings.get(name, 0.0))

        if self.collect_diagnostics:
            diag["gray"] = gray
            diag["rectified"] = rectified
            diag["occlusion"] = occlusion
            diag["frame_ink"] = frame_ink

        return FrameResult(
            frame_index=t_index,
            content=content,
            per_frame_ink=per_frame_render,
            canvas_render=canvas_render,
            events=events,
            quad=self.track.current,
            confidence=confidence,
            last_good_age=self.track.last_good_age,
            timings_ms=timings,
            diagnostics=diag,
        )

    def timing_summary(self) -> dict[str, tuple[float, float]]:
        """Per-stage (mean_ms, p95_ms) over the frames processed so far."""
        summary = {}
        for name in STAGE_NAMES:
            samples = self.stage_ms[name]
            if samples:
                arr = np.asarray(samples)
                summary[name] = (float(arr.mean()), float(np.percentile(arr, 95)))
            else:
                summary[name] = (0.0, 0.0)
        return summary


def format_timing_summary(summary: dict[str, tuple[float, float]]) -> str:
    lines = [f"{'stage':<12} {'mean ms':>9} {'p95 ms':>9}"]
    for name in STAGE_NAMES:
        mean, p95 = summary[name]
        lines.append(f"{name:<12} {mean:>9.2f} {p95:>9.2f}")
    return "\n".join(lines)
