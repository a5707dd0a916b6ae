"""Quadrilateral extraction: contours, convex hull, corner fitting.

Takes the paper mask to an ordered sub-pixel quad: trace the boundary of
each component, keep the largest, hull it, pick the maximum-area
4-vertex subset, and put the corners into TL, TR, BR, BL order.
"""

import itertools
from dataclasses import dataclass

import numpy as np

from . import kernels
from .raster import ensure_mask


class DegenerateHull(ValueError):
    """All points collinear (or fewer than 3 distinct points)."""


class NotAQuad(ValueError):
    """Input cannot produce a strictly convex quadrilateral."""


# Exhaustive 4-subset search is capped here; larger hulls are simplified
# with Douglas-Peucker first.
_MAX_HULL_FOR_EXHAUSTIVE = 32


@dataclass(frozen=True)
class OrderedQuad:
    """Four sub-pixel corners in fixed TL, TR, BR, BL roles.

    ``pts`` is a read-only (4, 2) float64 array of (x, y) rows forming a
    strictly convex cycle. Canonical role assignment (TL minimizes x+y
    and so on) is the job of ``order_corners``; the type itself only
    demands convexity, so quads with deliberately rotated correspondence
    (and EMA blends of tracked quads) remain constructible.
    """

    pts: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.pts, dtype=np.float64)
        if pts.shape != (4, 2):
            raise ValueError(f"quad needs shape (4, 2), got {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise ValueError("quad corners must be finite")
        cross = _cycle_crosses(pts)
        if np.any(cross == 0.0) or not (np.all(cross > 0) or np.all(cross < 0)):
            raise NotAQuad("corner cycle is not strictly convex")
        pts = pts.copy()
        pts.setflags(write=False)
        object.__setattr__(self, "pts", pts)

    @property
    def tl(self):
        return self.pts[0]

    @property
    def tr(self):
        return self.pts[1]

    @property
    def br(self):
        return self.pts[2]

    @property
    def bl(self):
        return self.pts[3]

    def area(self) -> float:
        return polygon_area(self.pts)


def _cycle_crosses(pts: np.ndarray) -> np.ndarray:
    """Cross products of consecutive edge pairs of a closed polygon."""
    e = np.roll(pts, -1, axis=0) - pts
    nxt = np.roll(e, -1, axis=0)
    return e[:, 0] * nxt[:, 1] - e[:, 1] * nxt[:, 0]


def polygon_area(pts: np.ndarray) -> float:
    """Unsigned shoelace area of a closed polygon given by its vertices."""
    pts = np.asarray(pts, dtype=np.float64)
    x = pts[:, 0]
    y = pts[:, 1]
    return float(abs(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y)) / 2.0)


def trace_contours(mask: np.ndarray) -> list[np.ndarray]:
    """Exterior boundary of every 4-connected foreground component.

    Components are found with 4-connectivity and traced with the Moore
    (8-) neighborhood, clockwise in image coordinates. Contours come back
    in scan order of their components' first pixels, each an int32 (N, 2)
    array of (x, y) pixels; a single-pixel component yields one point.
    """
    mask = ensure_mask(mask)
    labels, count, starts = kernels.label_components(mask, 4)[:3]
    contours = []
    for k in range(count):
        sy, sx = int(starts[k, 0]), int(starts[k, 1])
        contours.append(kernels.moore_trace(labels, k + 1, sy, sx))
    return contours


def largest_contour(contours: list[np.ndarray]) -> np.ndarray:
    """Contour enclosing the maximal shoelace area; ties keep scan order."""
    if not contours:
        raise ValueError("no contours to choose from")
    best = 0
    best_area = polygon_area(contours[0])
    for i in range(1, len(contours)):
        a = polygon_area(contours[i])
        if a > best_area:
            best = i
            best_area = a
    return contours[best]


def convex_hull(points) -> np.ndarray:
    """Convex hull of 2-D points, counter-clockwise in image coordinates.

    Monotone chain over the distinct points; collinear vertices are
    dropped, so every remaining vertex is a strict corner. Raises
    DegenerateHull when all points are collinear.
    """
    arr = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    pts = sorted(set(map(tuple, arr.tolist())))
    if len(pts) < 3:
        raise DegenerateHull("need at least 3 distinct points")

    def half(chain_pts):
        chain = []
        for px, py in chain_pts:
            while len(chain) >= 2:
                ox, oy = chain[-2]
                ax, ay = chain[-1]
                if (ax - ox) * (py - oy) - (ay - oy) * (px - ox) <= 0.0:
                    chain.pop()
                else:
                    break
            chain.append((px, py))
        return chain

    lower = half(pts)
    upper = half(reversed(pts))
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        raise DegenerateHull("points are collinear")
    # Math-CCW from the chain; reverse so traversal is counter-clockwise
    # when y grows downward, starting from the lexicographic minimum.
    hull = [hull[0]] + hull[:0:-1]
    return np.asarray(hull, dtype=np.float64)


def _douglas_peucker(points: np.ndarray, eps: float) -> np.ndarray:
    """Classic DP simplification of an open polyline, keeping endpoints."""
    keep = np.zeros(len(points), dtype=bool)
    keep[0] = keep[-1] = True
    stack = [(0, len(points) - 1)]
    while stack:
        i, j = stack.pop()
        if j <= i + 1:
            continue
        a = points[i]
        b = points[j]
        ab = b - a
        norm = np.hypot(ab[0], ab[1])
        seg = points[i + 1:j]
        if norm == 0.0:
            d = np.hypot(seg[:, 0] - a[0], seg[:, 1] - a[1])
        else:
            d = np.abs(ab[0] * (seg[:, 1] - a[1]) - ab[1] * (seg[:, 0] - a[0])) / norm
        k = int(np.argmax(d))
        if d[k] > eps:
            keep[i + 1 + k] = True
            stack.append((i, i + 1 + k))
            stack.append((i + 1 + k, j))
    return points[keep]


def _simplify_ring(hull: np.ndarray, max_vertices: int) -> np.ndarray:
    """Shrink a convex ring below ``max_vertices`` via Douglas-Peucker."""
    eps = 0.5
    ring = hull
    while len(ring) > max_vertices:
        split = len(hull) // 2
        first = _douglas_peucker(hull[:split + 1], eps)
        second = _douglas_peucker(np.vstack([hull[split:], hull[:1]]), eps)
        ring = np.vstack([first[:-1], second[:-1]])
        eps *= 2.0
    return ring


def fit_quad(hull: np.ndarray) -> OrderedQuad:
    """Inscribe the maximum-area quadrilateral in a convex hull.

    Exhaustive search over 4-subsets of the hull vertices (in hull order,
    so every subset is convex); hulls above 32 vertices are Douglas-Peucker
    simplified first. Ties keep the lexicographically first index subset.
    """
    hull = np.asarray(hull, dtype=np.float64)
    if len(hull) < 4:
        raise NotAQuad(f"hull has {len(hull)} vertices, need at least 4")
    if len(hull) > _MAX_HULL_FOR_EXHAUSTIVE:
        hull = _simplify_ring(hull, _MAX_HULL_FOR_EXHAUSTIVE)
        if len(hull) < 4:
            raise NotAQuad("hull degenerated during simplification")
    combos = np.asarray(list(itertools.combinations(range(len(hull)), 4)))
    sub = hull[combos]  # (m, 4, 2)
    x = sub[:, :, 0]
    y = sub[:, :, 1]
    areas = np.abs(
        np.sum(x * np.roll(y, -1, axis=1) - np.roll(x, -1, axis=1) * y, axis=1)
    )
    best = int(np.argmax(areas))
    return order_corners(sub[best])


def order_corners(corners) -> OrderedQuad:
    """Assign 4 points of a strictly convex quadrilateral to TL, TR, BR, BL.

    TL is the corner minimizing x+y (ties prefer smaller y, then smaller
    x); TR, BR, BL follow clockwise around the convex cycle, which makes
    BR the x+y maximizer, TR the x-y maximizer and BL the x-y minimizer.
    Walking the cycle (rather than picking each extreme independently)
    keeps the result a convex quad even when the extremes tie, e.g. on a
    45-degree diamond. Deterministic and permutation-invariant.
    """
    pts = np.asarray(corners, dtype=np.float64).reshape(4, 2)
    if not np.all(np.isfinite(pts)):
        raise NotAQuad("corners must be finite")
    rows = [tuple(p) for p in pts.tolist()]
    if len(set(rows)) != 4:
        raise NotAQuad("corners must be distinct")
    cx = sum(p[0] for p in rows) / 4.0
    cy = sum(p[1] for p in rows) / 4.0
    # Increasing atan2 with y down = clockwise on screen. A strictly
    # convex quad has its centroid strictly inside, so angles are unique.
    ring = sorted(rows, key=lambda p: np.arctan2(p[1] - cy, p[0] - cx))
    start = min(range(4), key=lambda i: (ring[i][0] + ring[i][1],
                                         ring[i][1], ring[i][0]))
    ordered = [ring[(start + k) % 4] for k in range(4)]
    return OrderedQuad(np.asarray(ordered))
