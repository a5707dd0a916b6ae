"""Frame input/output: numbered PNG directories and uncompressed Y4M.

Y4M input uses the luma plane only (4:2:0 or mono); Y4M output writes
4:2:0 with neutral chroma. There is no camera-driver dependency here:
live capture, when added, is just another input adapter.
"""

import os
import re
from pathlib import Path

import numpy as np
from PIL import Image

from .raster import ensure_raster

_FRAME_RATE = "30:1"


class FrameIOError(OSError):
    """Unreadable input or unwritable output."""


def _numeric_key(name: str):
    m = re.search(r"(\d+)", name)
    return (int(m.group(1)) if m else -1, name)


def list_png_frames(directory) -> list[Path]:
    """PNG files of a directory in numeric filename order."""
    directory = Path(directory)
    if not directory.is_dir():
        raise FrameIOError(f"not a directory: {directory}")
    files = [p for p in directory.iterdir() if p.suffix.lower() == ".png"]
    if not files:
        raise FrameIOError(f"no PNG frames in {directory}")
    return sorted(files, key=lambda p: _numeric_key(p.name))


def read_png(path) -> np.ndarray:
    """Load one PNG as a gray or RGB uint8 raster."""
    try:
        with Image.open(path) as img:
            if img.mode == "L":
                return np.asarray(img, dtype=np.uint8)
            return np.asarray(img.convert("RGB"), dtype=np.uint8)
    except OSError as exc:
        raise FrameIOError(f"cannot read {path}: {exc}") from None


def write_png(path, raster: np.ndarray) -> None:
    raster = ensure_raster(raster)
    try:
        Image.fromarray(raster).save(path, format="PNG")
    except OSError as exc:
        raise FrameIOError(f"cannot write {path}: {exc}") from None


def iter_png_frames(directory):
    for path in list_png_frames(directory):
        yield read_png(path)


class Y4MReader:
    """Iterates grayscale frames (the luma plane) of a Y4M stream."""

    def __init__(self, path):
        try:
            self._fh = open(path, "rb")
        except OSError as exc:
            raise FrameIOError(f"cannot open {path}: {exc}") from None
        header = self._fh.readline()
        if not header.startswith(b"YUV4MPEG2"):
            self._fh.close()
            raise FrameIOError(f"{path}: not a YUV4MPEG2 stream")
        self.width = self.height = 0
        colorspace = "420"
        for token in header.split()[1:]:
            tag, value = chr(token[0]), token[1:].decode("ascii", "replace")
            if tag == "W":
                self.width = int(value)
            elif tag == "H":
                self.height = int(value)
            elif tag == "C":
                colorspace = value
        if self.width < 1 or self.height < 1:
            self._fh.close()
            raise FrameIOError(f"{path}: missing frame dimensions")
        if colorspace.startswith("420"):
            self._chroma = (self.width // 2) * (self.height // 2) * 2
        elif colorspace.startswith("mono"):
            self._chroma = 0
        else:
            self._fh.close()
            raise FrameIOError(f"{path}: unsupported colorspace C{colorspace}")

    def __iter__(self):
        return self

    def __next__(self) -> np.ndarray:
        line = self._fh.readline()
        if not line:
            self._fh.close()
            raise StopIteration
        if not line.startswith(b"FRAME"):
            self._fh.close()
            raise FrameIOError("malformed Y4M: missing FRAME marker")
        n = self.width * self.height
        data = self._fh.read(n + self._chroma)
        if len(data) < n + self._chroma:
            self._fh.close()
            raise FrameIOError("malformed Y4M: truncated frame")
        return np.frombuffer(data[:n], dtype=np.uint8).reshape(
            self.height, self.width).copy()

    def close(self):
        self._fh.close()


class Y4MWriter:
    """Writes grayscale frames as 4:2:0 Y4M with neutral chroma."""

    def __init__(self, path, width: int, height: int):
        if width % 2 or height % 2:
            raise FrameIOError("Y4M 4:2:0 output needs even dimensions")
        self.width = width
        self.height = height
        try:
            self._fh = open(path, "wb")
        except OSError as exc:
            raise FrameIOError(f"cannot write {path}: {exc}") from None
        self._fh.write(
            f"YUV4MPEG2 W{width} H{height} F{_FRAME_RATE} Ip A1:1 C420jpeg\n"
            .encode("ascii"))
        self._chroma = bytes([128]) * ((width // 2) * (height // 2) * 2)

    def write(self, gray: np.ndarray) -> None:
        gray = ensure_raster(gray)
        if gray.ndim != 2 or gray.shape != (self.height, self.width):
            raise FrameIOError(
                f"frame shape {gray.shape} does not match stream "
                f"{self.height}x{self.width}")
        self._fh.write(b"FRAME\n")
        self._fh.write(np.ascontiguousarray(gray).tobytes())
        self._fh.write(self._chroma)

    def close(self):
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def open_frame_source(path):
    """Directory of PNGs or a .y4m file -> iterator of rasters."""
    path = Path(path)
    if path.is_dir():
        return iter_png_frames(path)
    if path.suffix.lower() == ".y4m":
        if not path.is_file():
            raise FrameIOError(f"no such file: {path}")
        return Y4MReader(path)
    raise FrameIOError(f"input must be a PNG directory or a .y4m file: {path}")


class FrameSink:
    """Writes rendered content as a PNG sequence or a Y4M stream."""

    def __init__(self, path, fmt: str, width: int, height: int):
        self.fmt = fmt
        self.path = Path(path)
        self._count = 0
        if fmt == "raw-video":
            self._writer = Y4MWriter(self.path, width, height)
        else:
            try:
                os.makedirs(self.path, exist_ok=True)
            except OSError as exc:
                raise FrameIOError(f"cannot create {self.path}: {exc}") from None
            self._writer = None

    def write(self, raster: np.ndarray) -> None:
        if self._writer is not None:
            self._writer.write(raster)
        else:
            write_png(self.path / f"frame_{self._count:06d}.png", raster)
        self._count += 1

    def close(self):
        if self._writer is not None:
            self._writer.close()
