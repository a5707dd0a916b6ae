"""Pipeline configuration: defaults, INI file parsing, CLI overrides.

The file format is flat key/value INI with one section per stage; every
default below is also the file's default, so an empty file is a valid
configuration. Errors are reported with their ``section.key`` path.
"""

import configparser
import math
from dataclasses import dataclass, field

from .ink import ComponentFilterConfig, ThresholdConfig
from .segment import SegmenterConfig

A4_ASPECT = math.sqrt(2.0)
LETTER_ASPECT = 11.0 / 8.5

_BOOL_WORDS = {"true": True, "yes": True, "1": True, "on": True,
               "false": False, "no": False, "0": False, "off": False}


class ConfigError(ValueError):
    """Malformed configuration; the message carries the key path."""


@dataclass(frozen=True)
class TemporalConfig:
    """Quad smoothing, occlusion margin and page-change policy."""

    ema_alpha: float = 0.4
    jump_threshold: float = 40.0
    occlusion_margin: int = 5
    page_change_fraction: float = 0.6
    page_change_frames: int = 15

    def __post_init__(self):
        if not 0.0 < self.ema_alpha <= 1.0:
            raise ValueError("ema_alpha must be in (0, 1]")
        if self.jump_threshold <= 0.0:
            raise ValueError("jump_threshold must be positive")
        if self.occlusion_margin < 0:
            raise ValueError("occlusion_margin must be >= 0")
        if not 0.0 < self.page_change_fraction <= 1.0:
            raise ValueError("page_change_fraction must be in (0, 1]")
        if self.page_change_frames < 1:
            raise ValueError("page_change_frames must be >= 1")


@dataclass(frozen=True)
class OutputConfig:
    """What to emit and at which fixed canvas geometry.

    The canvas size is fixed per session from the configuration alone:
    ``a4`` and ``letter`` derive the height from the width (rounded to an
    even number so 4:2:0 video stays representable); ``none`` uses
    ``canvas_height`` as given.
    """

    mode: str = "canvas"
    format: str = "image-sequence"
    fixed_aspect: str = "none"
    canvas_width: int = 640
    canvas_height: int = 906

    def __post_init__(self):
        if self.mode not in ("per-frame", "canvas", "both"):
            raise ValueError("mode must be per-frame, canvas or both")
        if self.format not in ("image-sequence", "raw-video"):
            raise ValueError("format must be image-sequence or raw-video")
        if self.fixed_aspect not in ("none", "a4", "letter"):
            raise ValueError("fixed_aspect must be none, a4 or letter")
        if self.canvas_width < 1 or self.canvas_height < 1:
            raise ValueError("canvas dimensions must be positive")
        if self.format == "raw-video":
            if self.mode == "both":
                raise ValueError(
                    "mode 'both' needs format=image-sequence (one y4m "
                    "stream cannot carry two sequences)")
            w, h = self.canvas_size()
            if w % 2 or h % 2:
                raise ValueError(
                    f"raw-video needs even canvas dimensions, got {w}x{h}")

    def canvas_size(self) -> tuple[int, int]:
        """Session canvas (width, height) in pixels."""
        if self.fixed_aspect == "a4":
            return self.canvas_width, _even_round(self.canvas_width * A4_ASPECT)
        if self.fixed_aspect == "letter":
            return self.canvas_width, _even_round(self.canvas_width * LETTER_ASPECT)
        return self.canvas_width, self.canvas_height


def _even_round(x: float) -> int:
    return max(2, 2 * int(math.floor(x / 2.0 + 0.5)))


@dataclass(frozen=True)
class PipelineConfig:
    """Everything the pipeline needs, grouped by stage."""

    handedness: str = "right"
    preview_port: int | None = None
    segmenter_backend: str = "classical"
    segmenter: SegmenterConfig = field(default_factory=SegmenterConfig)
    threshold: ThresholdConfig = field(default_factory=ThresholdConfig)
    filter: ComponentFilterConfig = field(default_factory=ComponentFilterConfig)
    temporal: TemporalConfig = field(default_factory=TemporalConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    def __post_init__(self):
        if self.handedness not in ("left", "right"):
            raise ValueError("handedness must be 'left' or 'right'")
        if self.segmenter_backend != "classical":
            raise ValueError(
                f"unknown segmenter backend {self.segmenter_backend!r}"
                " (supported: classical)")
        if self.preview_port is not None and not 0 <= self.preview_port <= 65535:
            raise ValueError("preview_port must be in [0, 65535]")


def _parse_int(text: str) -> int:
    return int(text.strip(), 10)


def _parse_float(text: str) -> float:
    return float(text.strip())


def _parse_bool(text: str) -> bool:
    try:
        return _BOOL_WORDS[text.strip().lower()]
    except KeyError:
        raise ValueError(f"not a boolean: {text!r}") from None


def _parse_str(text: str) -> str:
    return text.strip()


def _parse_optional_port(text: str):
    text = text.strip()
    return None if text == "" else int(text, 10)


# (section, key) -> value parser. Single source of truth for the file
# format and for the mirrored CLI flags.
SCHEMA: dict[tuple[str, str], object] = {
    ("pipeline", "handedness"): _parse_str,
    ("pipeline", "preview_port"): _parse_optional_port,
    ("segmenter", "backend"): _parse_str,
    ("segmenter", "downscale_factor"): _parse_int,
    ("segmenter", "min_region_fraction"): _parse_float,
    ("segmenter", "brightness_percentile"): _parse_float,
    ("segmenter", "min_brightness"): _parse_float,
    ("threshold", "window"): _parse_int,
    ("threshold", "offset_c"): _parse_int,
    ("filter", "min_area"): _parse_int,
    ("filter", "max_area_fraction"): _parse_float,
    ("filter", "reject_border_blobs"): _parse_bool,
    ("filter", "finger_exemption"): _parse_int,
    ("temporal", "ema_alpha"): _parse_float,
    ("temporal", "jump_threshold"): _parse_float,
    ("temporal", "occlusion_margin"): _parse_int,
    ("temporal", "page_change_fraction"): _parse_float,
    ("temporal", "page_change_frames"): _parse_int,
    ("output", "mode"): _parse_str,
    ("output", "format"): _parse_str,
    ("output", "fixed_aspect"): _parse_str,
    ("output", "canvas_width"): _parse_int,
    ("output", "canvas_height"): _parse_int,
}


def _build(values: dict[tuple[str, str], object]) -> PipelineConfig:
    def group(section, cls, skip=()):
        kwargs = {}
        for (sec, key), val in values.items():
            if sec == section and key not in skip:
                kwargs[key] = val
        try:
            return cls(**kwargs)
        except ValueError as exc:
            raise ConfigError(f"[{section}] {exc}") from None

    pipeline_keys = {k: v for (s, k), v in values.items() if s == "pipeline"}
    try:
        return PipelineConfig(
            handedness=pipeline_keys.get("handedness", "right"),
            preview_port=pipeline_keys.get("preview_port"),
            segmenter_backend=values.get(("segmenter", "backend"), "classical"),
            segmenter=group("segmenter", SegmenterConfig, skip=("backend",)),
            threshold=group("threshold", ThresholdConfig),
            filter=group("filter", ComponentFilterConfig),
            temporal=group("temporal", TemporalConfig),
            output=group("output", OutputConfig),
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def parse_values(raw: dict[tuple[str, str], str]) -> dict[tuple[str, str], object]:
    """Parse raw string values against the schema, with key-path errors."""
    values = {}
    for (section, key), text in raw.items():
        parser = SCHEMA.get((section, key))
        if parser is None:
            raise ConfigError(f"unknown configuration key {section}.{key}")
        try:
            values[(section, key)] = parser(text)
        except ValueError as exc:
            raise ConfigError(f"{section}.{key}: {exc}") from None
    return values


def load_config(path=None, overrides: dict[tuple[str, str], str] | None = None
                ) -> PipelineConfig:
    """Build a PipelineConfig from an optional INI file plus overrides.

    Overrides (typically from CLI flags) win over file values, which win
    over defaults.
    """
    raw: dict[tuple[str, str], str] = {}
    if path is not None:
        cp = configparser.ConfigParser()
        try:
            with open(path) as fh:
                cp.read_file(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from None
        except configparser.Error as exc:
            raise ConfigError(f"malformed config file: {exc}") from None
        for section in cp.sections():
            for key, value in cp.items(section):
                raw[(section, key)] = value
    if overrides:
        raw.update(overrides)
    return _build(parse_values(raw))
