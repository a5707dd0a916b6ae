"""Independent reference implementations used to derive expected values.

Everything here is deliberately written the slow, obvious way (nested
loops, brute force, flood fill) and stays independent of the library
code paths it checks.
"""

from collections import deque
from itertools import combinations

import numpy as np


def bilinear_direct(patch, x, y):
    """Evaluate the bilinear formula at (x, y) on a 1-channel patch."""
    x0, y0 = int(np.floor(x)), int(np.floor(y))
    h, w = patch.shape
    x1, y1 = min(x0 + 1, w - 1), min(y0 + 1, h - 1)
    fx, fy = x - x0, y - y0
    return (
        float(patch[y0, x0]) * (1 - fx) * (1 - fy)
        + float(patch[y0, x1]) * fx * (1 - fy)
        + float(patch[y1, x0]) * (1 - fx) * fy
        + float(patch[y1, x1]) * fx * fy
    )


def threshold_direct(gray, window, offset_c):
    """Per-pixel local-mean threshold with border replication."""
    h, w = gray.shape
    r = window // 2
    out = np.zeros((h, w), dtype=bool)
    for y in range(h):
        for x in range(w):
            total = 0
            for dy in range(-r, r + 1):
                sy = min(max(y + dy, 0), h - 1)
                for dx in range(-r, r + 1):
                    sx = min(max(x + dx, 0), w - 1)
                    total += int(gray[sy, sx])
            mean = total // (window * window)
            out[y, x] = int(gray[y, x]) < mean - offset_c
    return out


def erode_direct(mask, se):
    """Set definition: every SE translate inside the mask (OOB = bg)."""
    h, w = mask.shape
    kh, kw = se.shape
    rh, rw = kh // 2, kw // 2
    out = np.zeros((h, w), dtype=bool)
    for y in range(h):
        for x in range(w):
            ok = True
            for ky in range(kh):
                for kx in range(kw):
                    if not se[ky, kx]:
                        continue
                    sy, sx = y + ky - rh, x + kx - rw
                    if not (0 <= sy < h and 0 <= sx < w and mask[sy, sx]):
                        ok = False
                        break
                if not ok:
                    break
            out[y, x] = ok
    return out


def dilate_direct(mask, se):
    """Set definition: union of mask translates by SE offsets."""
    h, w = mask.shape
    kh, kw = se.shape
    rh, rw = kh // 2, kw // 2
    out = np.zeros((h, w), dtype=bool)
    for y in range(h):
        for x in range(w):
            if not mask[y, x]:
                continue
            for ky in range(kh):
                for kx in range(kw):
                    if not se[ky, kx]:
                        continue
                    ty, tx = y + ky - rh, x + kx - rw
                    if 0 <= ty < h and 0 <= tx < w:
                        out[ty, tx] = True
    return out


def floodfill_labels(mask, connectivity):
    """BFS flood-fill labeling in first-encounter scan order."""
    h, w = mask.shape
    if connectivity == 4:
        nbrs = ((0, 1), (0, -1), (1, 0), (-1, 0))
    else:
        nbrs = ((0, 1), (0, -1), (1, 0), (-1, 0),
                (1, 1), (1, -1), (-1, 1), (-1, -1))
    labels = np.zeros((h, w), dtype=np.int32)
    count = 0
    flat = mask.ravel()
    lab_flat = labels.ravel()
    for start in range(h * w):
        if not flat[start] or lab_flat[start]:
            continue
        count += 1
        queue = deque([start])
        lab_flat[start] = count
        while queue:
            idx = queue.popleft()
            y, x = divmod(idx, w)
            for dy, dx in nbrs:
                ny, nx = y + dy, x + dx
                if 0 <= ny < h and 0 <= nx < w:
                    nidx = ny * w + nx
                    if flat[nidx] and not lab_flat[nidx]:
                        lab_flat[nidx] = count
                        queue.append(nidx)
    return labels, count


def hull_halfplane(points):
    """O(n^3) convex hull: a point is a hull vertex iff it is an endpoint
    of some edge that has all other points strictly on one side (or on
    the segment). Returns the vertex set (unordered)."""
    pts = sorted(set(map(tuple, np.asarray(points, dtype=float).tolist())))
    n = len(pts)
    vertices = set()
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            ax, ay = pts[i]
            bx, by = pts[j]
            pos = neg = False
            for k in range(n):
                if k in (i, j):
                    continue
                cx, cy = pts[k]
                cross = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
                if cross > 0:
                    pos = True
                elif cross < 0:
                    neg = True
            if not (pos and neg):
                vertices.add(pts[i])
                vertices.add(pts[j])
    # Drop collinear mid-edge points: keep only corners (points that are
    # not a convex combination of two other hull candidates).
    out = set()
    vlist = sorted(vertices)
    for p in vlist:
        corner = True
        for a in vlist:
            for b in vlist:
                if a == p or b == p or a >= b:
                    continue
                cross = ((b[0] - a[0]) * (p[1] - a[1])
                         - (b[1] - a[1]) * (p[0] - a[0]))
                if cross == 0 and min(a[0], b[0]) <= p[0] <= max(a[0], b[0]) \
                        and min(a[1], b[1]) <= p[1] <= max(a[1], b[1]):
                    corner = False
        if corner:
            out.add(p)
    return out


def quad_area(pts):
    x = [p[0] for p in pts]
    y = [p[1] for p in pts]
    s = 0.0
    for i in range(len(pts)):
        j = (i + 1) % len(pts)
        s += x[i] * y[j] - x[j] * y[i]
    return abs(s) / 2.0


def max_quad_area_bruteforce(hull):
    """Maximum area over all 4-subsets of hull vertices, in hull order."""
    best = 0.0
    for combo in combinations(range(len(hull)), 4):
        best = max(best, quad_area([hull[i] for i in combo]))
    return best


def homography_oracle(src_pts, dst_pts):
    """Independent homography solve via numpy's LAPACK-backed solver."""
    a = np.zeros((8, 8))
    b = np.zeros(8)
    for i, ((x, y), (u, v)) in enumerate(zip(src_pts, dst_pts)):
        a[2 * i] = (x, y, 1, 0, 0, 0, -u * x, -u * y)
        a[2 * i + 1] = (0, 0, 0, x, y, 1, -v * x, -v * y)
        b[2 * i] = u
        b[2 * i + 1] = v
    h = np.linalg.solve(a, b)
    return np.append(h, 1.0).reshape(3, 3)


def exterior_boundary_pixels(mask):
    """Foreground pixels 4-adjacent to the outside background region.

    The outside region is the 4-connected background component touching
    the frame border; holes do not count, and neither does purely
    diagonal contact (an inner staircase corner with four foreground
    4-neighbors is not on the traced boundary).
    """
    h, w = mask.shape
    outside = np.zeros((h, w), dtype=bool)
    queue = deque()
    for x in range(w):
        for y in (0, h - 1):
            if not mask[y, x] and not outside[y, x]:
                outside[y, x] = True
                queue.append((y, x))
    for y in range(h):
        for x in (0, w - 1):
            if not mask[y, x] and not outside[y, x]:
                outside[y, x] = True
                queue.append((y, x))
    while queue:
        y, x = queue.popleft()
        for dy, dx in ((0, 1), (0, -1), (1, 0), (-1, 0)):
            ny, nx = y + dy, x + dx
            if 0 <= ny < h and 0 <= nx < w and not mask[ny, nx] \
                    and not outside[ny, nx]:
                outside[ny, nx] = True
                queue.append((ny, nx))
    boundary = set()
    for y in range(h):
        for x in range(w):
            if not mask[y, x]:
                continue
            edge = y in (0, h - 1) or x in (0, w - 1)
            if not edge:
                for dy, dx in ((0, 1), (0, -1), (1, 0), (-1, 0)):
                    if outside[y + dy, x + dx]:
                        edge = True
            if edge:
                boundary.add((x, y))
    return boundary


def f1_score(predicted, truth):
    tp = int((predicted & truth).sum())
    fp = int((predicted & ~truth).sum())
    fn = int((~predicted & truth).sum())
    if 2 * tp + fp + fn == 0:
        return 1.0
    return 2.0 * tp / (2.0 * tp + fp + fn)
