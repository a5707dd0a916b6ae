"""4-point perspective transform and top-down unwarp.

The homography between two quads is solved from the standard 8-unknown
linear system with partially pivoted Gaussian elimination; the unwarp
iterates destination pixels and samples the source bilinearly (no holes).
"""

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .quadgeom import OrderedQuad
from .raster import ensure_raster

_PIVOT_TOL = 1e-12


class SingularSystem(ValueError):
    """Correspondences do not determine a homography (collinear points)."""


class PointAtInfinity(ValueError):
    """Projective denominator vanishes at the requested point."""


@dataclass(frozen=True)
class Homography:
    """3x3 projective map, normalized so mat[2, 2] == 1."""

    mat: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.mat, dtype=np.float64)
        if mat.shape != (3, 3):
            raise ValueError("homography must be 3x3")
        if not np.all(np.isfinite(mat)):
            raise ValueError("homography entries must be finite")
        if mat[2, 2] == 0.0:
            raise SingularSystem("cannot normalize: mat[2, 2] is zero")
        if mat[2, 2] != 1.0:
            mat = mat / mat[2, 2]
        det = _det3(mat)
        scale = float(np.abs(mat).max())
        if abs(det) <= _PIVOT_TOL * max(1.0, scale) ** 3:
            raise SingularSystem("homography is singular")
        mat = mat.copy()
        mat.setflags(write=False)
        object.__setattr__(self, "mat", mat)

    def inverse(self) -> "Homography":
        """Inverse map via the closed-form 3x3 adjugate."""
        m = self.mat
        adj = np.array([
            [m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1],
             m[0, 2] * m[2, 1] - m[0, 1] * m[2, 2],
             m[0, 1] * m[1, 2] - m[0, 2] * m[1, 1]],
            [m[1, 2] * m[2, 0] - m[1, 0] * m[2, 2],
             m[0, 0] * m[2, 2] - m[0, 2] * m[2, 0],
             m[0, 2] * m[1, 0] - m[0, 0] * m[1, 2]],
            [m[1, 0] * m[2, 1] - m[1, 1] * m[2, 0],
             m[0, 1] * m[2, 0] - m[0, 0] * m[2, 1],
             m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]],
        ])
        return Homography(adj)

    def __matmul__(self, other: "Homography") -> "Homography":
        return Homography(self.mat @ other.mat)


@dataclass(frozen=True)
class TargetGeometry:
    """Output raster size for an unwarp."""

    out_width: int
    out_height: int

    def __post_init__(self):
        if self.out_width < 1 or self.out_height < 1:
            raise ValueError("target geometry must be positive")


def _det3(m: np.ndarray) -> float:
    return float(
        m[0, 0] * (m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1])
        - m[0, 1] * (m[1, 0] * m[2, 2] - m[1, 2] * m[2, 0])
        + m[0, 2] * (m[1, 0] * m[2, 1] - m[1, 1] * m[2, 0])
    )


def solve_linear(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Gaussian elimination with partial pivoting for a small dense system."""
    a = np.array(a, dtype=np.float64)
    b = np.array(b, dtype=np.float64)
    n = len(b)
    scale = max(1.0, float(np.abs(a).max()))
    for k in range(n):
        piv = k + int(np.argmax(np.abs(a[k:, k])))
        if abs(a[piv, k]) <= _PIVOT_TOL * scale:
            raise SingularSystem("pivot vanished during elimination")
        if piv != k:
            a[[k, piv]] = a[[piv, k]]
            b[[k, piv]] = b[[piv, k]]
        factors = a[k + 1:, k] / a[k, k]
        a[k + 1:, k:] -= factors[:, None] * a[k, k:]
        b[k + 1:] -= factors * b[k]
    x = np.zeros(n, dtype=np.float64)
    for k in range(n - 1, -1, -1):
        x[k] = (b[k] - a[k, k + 1:] @ x[k + 1:]) / a[k, k]
    return x


def homography_from_quad(src: OrderedQuad, dst: OrderedQuad) -> Homography:
    """Homography mapping each src corner onto its dst counterpart.

    Builds the 8x8 system from the four correspondences (h33 fixed at 1)
    and solves it by partially pivoted elimination. Raises SingularSystem
    when three of the source or destination corners are collinear.
    """
    a = np.zeros((8, 8), dtype=np.float64)
    b = np.zeros(8, dtype=np.float64)
    for i in range(4):
        x, y = src.pts[i]
        u, v = dst.pts[i]
        a[2 * i] = (x, y, 1.0, 0.0, 0.0, 0.0, -u * x, -u * y)
        a[2 * i + 1] = (0.0, 0.0, 0.0, x, y, 1.0, -v * x, -v * y)
        b[2 * i] = u
        b[2 * i + 1] = v
    h = solve_linear(a, b)
    return Homography(np.append(h, 1.0).reshape(3, 3))


def apply_homography(hg: Homography, p) -> tuple[float, float]:
    """Map one point through the projective transform."""
    x, y = float(p[0]), float(p[1])
    m = hg.mat
    den = m[2, 0] * x + m[2, 1] * y + m[2, 2]
    if abs(den) < 1e-12:
        raise PointAtInfinity(f"denominator vanished at ({x}, {y})")
    return (
        (m[0, 0] * x + m[0, 1] * y + m[0, 2]) / den,
        (m[1, 0] * x + m[1, 1] * y + m[1, 2]) / den,
    )


def rect_quad(width: float, height: float) -> OrderedQuad:
    """Axis-aligned rectangle quad with corners (0,0) .. (width, height)."""
    return OrderedQuad(np.array([
        (0.0, 0.0), (float(width), 0.0),
        (float(width), float(height)), (0.0, float(height)),
    ]))


def target_geometry(quad: OrderedQuad) -> TargetGeometry:
    """Output size from the longer of each pair of opposite edges.

    Width is max(|tr-tl|, |br-bl|), height max(|bl-tl|, |br-tr|), each
    rounded half-up and clamped to at least 1.
    """
    def dist(p, q):
        return math.hypot(p[0] - q[0], p[1] - q[1])

    w = max(dist(quad.tr, quad.tl), dist(quad.br, quad.bl))
    h = max(dist(quad.bl, quad.tl), dist(quad.br, quad.tr))
    return TargetGeometry(
        max(1, int(math.floor(w + 0.5))),
        max(1, int(math.floor(h + 0.5))),
    )


def unwarp(frame: np.ndarray, quad: OrderedQuad,
           geometry: TargetGeometry | None = None) -> np.ndarray:
    """Resample the quad region of a grayscale frame to a top-down view.

    Destination-driven: the homography maps the output rectangle corners
    (0,0)..(w,h) onto the quad corners, each output pixel samples the
    frame bilinearly at its mapped position, and samples falling outside
    the frame become 255 (paper white). Rounds half-up once per pixel.
    """
    frame = ensure_raster(frame)
    if frame.ndim != 2:
        raise ValueError("unwarp expects a grayscale raster")
    if geometry is None:
        geometry = target_geometry(quad)
    hg = homography_from_quad(
        rect_quad(geometry.out_width, geometry.out_height), quad)
    return kernels.warp_bilinear_u8(
        np.ascontiguousarray(frame), hg.mat,
        geometry.out_width, geometry.out_height, fill=255)
