"""Session runner: stream frames through the pipeline and write outputs.

Outputs are a PNG sequence or Y4M of the rendered content, a line-
delimited JSON event file, optional per-stage diagnostics dumps, and an
optional MJPEG preview. Identical input bytes and configuration produce
identical output bytes.
"""

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import PipelineConfig
from .frameio import FrameIOError, FrameSink, open_frame_source, write_png
from .pipeline import FrameResult, PipelineSession, format_timing_summary

EXIT_OK = 0
EXIT_IO_ERROR = 1
EXIT_CONFIG_ERROR = 2


@dataclass
class SessionReport:
    """What a finished session produced, for callers and tests."""

    frames: int = 0
    events: list[tuple[int, str]] = field(default_factory=list)
    timing_summary: dict = field(default_factory=dict)
    exit_code: int = EXIT_OK


def _events_path(output: Path, fmt: str) -> Path:
    if fmt == "raw-video":
        return output.with_suffix(".events.jsonl")
    return output / "events.jsonl"


def _dump_diagnostics(directory: Path, result: FrameResult) -> None:
    prefix = directory / f"{result.frame_index:06d}"
    diag = result.diagnostics
    if "gray" in diag:
        write_png(f"{prefix}_gray.png", diag["gray"])
    if "mask" in diag:
        write_png(f"{prefix}_mask.png",
                  np.where(diag["mask"], 255, 0).astype(np.uint8))
    if "rectified" in diag:
        write_png(f"{prefix}_rectified.png", diag["rectified"])
    if "frame_ink" in diag:
        write_png(f"{prefix}_ink.png",
                  np.where(diag["frame_ink"], 255, 0).astype(np.uint8))
    if "occlusion" in diag:
        write_png(f"{prefix}_occlusion.png",
                  np.where(diag["occlusion"], 255, 0).astype(np.uint8))
    info = {
        "frame": result.frame_index,
        "confidence": result.confidence,
        "last_good_age": result.last_good_age,
        "quad": None if result.quad is None else result.quad.pts.tolist(),
    }
    with open(f"{prefix}_quad.json", "w") as fh:
        json.dump(info, fh, indent=2, sort_keys=True)
        fh.write("\n")


def run(config: PipelineConfig, input_path, output_path,
        diagnostics_dir=None, quiet: bool = False) -> SessionReport:
    """Process an input source end to end; never raises for I/O problems."""
    report = SessionReport()
    preview = None
    sinks: list[tuple[str, FrameSink]] = []
    try:
        source = open_frame_source(input_path)
    except FrameIOError as exc:
        if not quiet:
            print(f"input error: {exc}")
        report.exit_code = EXIT_IO_ERROR
        return report

    out = Path(output_path)
    w, h = config.output.canvas_size()
    try:
        if config.output.format == "image-sequence":
            os.makedirs(out, exist_ok=True)
        if config.output.mode == "both":
            sinks.append(("per-frame", FrameSink(out / "per-frame", "image-sequence", w, h)))
            sinks.append(("canvas", FrameSink(out / "canvas", "image-sequence", w, h)))
        else:
            sinks.append((config.output.mode, FrameSink(out, config.output.format, w, h)))
    except (FrameIOError, OSError) as exc:
        if not quiet:
            print(f"output error: {exc}")
        report.exit_code = EXIT_IO_ERROR
        return report

    events_file = None
    try:
        if diagnostics_dir is not None:
            os.makedirs(diagnostics_dir, exist_ok=True)
        events_path = _events_path(out, config.output.format)
        events_file = open(events_path, "w")
        if config.preview_port is not None:
            from .preview import PreviewServer
            preview = PreviewServer(port=config.preview_port)
            if not quiet:
                print(f"preview: http://127.0.0.1:{preview.port}/")

        session = PipelineSession(
            config, collect_diagnostics=diagnostics_dir is not None)
        for frame in source:
            result = session.process_frame(frame)
            for name, sink in sinks:
                sink.write(result.per_frame_ink if name == "per-frame"
                           else result.canvas_render)
            for event in result.events:
                report.events.append((result.frame_index, event))
                events_file.write(json.dumps(
                    {"frame": result.frame_index, "event": event}) + "\n")
            if preview is not None:
                preview.publish(result.content)
            if diagnostics_dir is not None:
                _dump_diagnostics(Path(diagnostics_dir), result)
            report.frames += 1

        report.timing_summary = session.timing_summary()
        if not quiet:
            print(f"processed {report.frames} frames")
            print(format_timing_summary(report.timing_summary))
    except (FrameIOError, OSError) as exc:
        if not quiet:
            print(f"i/o error: {exc}")
        report.exit_code = EXIT_IO_ERROR
    finally:
        for _, sink in sinks:
            sink.close()
        if events_file is not None:
            events_file.close()
        if preview is not None:
            preview.close()
    return report
