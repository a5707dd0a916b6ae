"""Image types and pixel-level primitives shared by every stage.

Conventions, inherited by all other modules:

* Rasters are uint8 numpy arrays, ``(H, W)`` for grayscale or
  ``(H, W, 3)`` for color, row-major.
* Binary masks are ``(H, W)`` bool arrays.
* Points are ``(x, y)`` with the origin at the top-left corner, x growing
  right and y growing down. A pixel with index ``(x, y)`` sits at the
  continuous coordinate ``(x, y)``.
* Rasters and masks are treated as immutable values: operations return
  fresh arrays and never write to their inputs.
"""

import numpy as np

# BT.601 luma weights, fixed by convention.
_LUMA_R = 0.299
_LUMA_G = 0.587
_LUMA_B = 0.114


def ensure_raster(frame: np.ndarray) -> np.ndarray:
    """Validate a frame as a grayscale or 3-channel uint8 raster."""
    frame = np.asarray(frame)
    if frame.dtype != np.uint8:
        raise ValueError(f"raster must be uint8, got {frame.dtype}")
    if frame.ndim == 2:
        pass
    elif frame.ndim == 3 and frame.shape[2] == 3:
        pass
    else:
        raise ValueError(f"raster must be (H, W) or (H, W, 3), got shape {frame.shape}")
    if frame.shape[0] < 1 or frame.shape[1] < 1:
        raise ValueError("raster must have at least one pixel")
    return frame


def ensure_mask(mask: np.ndarray) -> np.ndarray:
    """Validate a (H, W) boolean mask."""
    mask = np.asarray(mask)
    if mask.dtype != bool or mask.ndim != 2:
        raise ValueError("mask must be a 2-D bool array")
    return mask


def to_grayscale(frame: np.ndarray) -> np.ndarray:
    """Convert a 3-channel frame to luma.

    Per pixel: round(0.299 R + 0.587 G + 0.114 B), rounded half-up and
    clamped to [0, 255].
    """
    frame = ensure_raster(frame)
    if frame.ndim != 3:
        raise ValueError("to_grayscale expects a 3-channel raster")
    r = frame[:, :, 0].astype(np.float64)
    g = frame[:, :, 1].astype(np.float64)
    b = frame[:, :, 2].astype(np.float64)
    luma = np.floor(_LUMA_R * r + _LUMA_G * g + _LUMA_B * b + 0.5)
    return np.clip(luma, 0.0, 255.0).astype(np.uint8)


def flip_horizontal(frame: np.ndarray) -> np.ndarray:
    """Mirror a raster left-right. Applying it twice is a bit-exact no-op."""
    frame = ensure_raster(frame)
    return np.ascontiguousarray(frame[:, ::-1])


def sample_bilinear(frame: np.ndarray, p) -> float:
    """Bilinear sample of a grayscale raster at a sub-pixel point.

    ``p`` must lie inside [0, W-1] x [0, H-1]; out-of-bounds points are
    rejected (callers clamp or skip). Returns the continuous blend, exact
    at integer coordinates; no rounding is applied here.
    """
    frame = ensure_raster(frame)
    if frame.ndim != 2:
        raise ValueError("sample_bilinear expects a grayscale raster")
    h, w = frame.shape
    x, y = float(p[0]), float(p[1])
    if not (np.isfinite(x) and np.isfinite(y)):
        raise ValueError("sample point must be finite")
    if not (0.0 <= x <= w - 1.0 and 0.0 <= y <= h - 1.0):
        raise ValueError(f"sample point ({x}, {y}) outside [0, {w - 1}] x [0, {h - 1}]")
    x0 = int(np.floor(x))
    y0 = int(np.floor(y))
    fx = x - x0
    fy = y - y0
    x1 = min(x0 + 1, w - 1)
    y1 = min(y0 + 1, h - 1)
    p00 = float(frame[y0, x0])
    p01 = float(frame[y0, x1])
    p10 = float(frame[y1, x0])
    p11 = float(frame[y1, x1])
    top = (1.0 - fx) * p00 + fx * p01
    bot = (1.0 - fx) * p10 + fx * p11
    return (1.0 - fy) * top + fy * bot
