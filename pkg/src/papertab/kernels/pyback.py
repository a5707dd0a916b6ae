"""NumPy implementations of the per-frame hot kernels.

This is the fallback backend, used when the compiled extension
(``papertab.kernels._ckern``) is not built. It is also the reference for
the extension: both backends must produce bit-identical results. When
editing arithmetic here, keep the expression trees in ``_ckern.pyx`` in
sync (same association order, rounding via floor(x + 0.5), integer
division for local means).
"""

import numpy as np

BACKEND = "python"

# Moore neighborhood, clockwise in image coordinates (y grows downward):
# E, SE, S, SW, W, NW, N, NE.
_MOORE_DX = (1, 1, 0, -1, -1, -1, 0, 1)
_MOORE_DY = (0, 1, 1, 1, 0, -1, -1, -1)


def warp_bilinear_u8(src, hmat, out_w, out_h, fill=255):
    """Inverse-mapped perspective warp of a grayscale image.

    Output pixel (x, y) samples ``src`` bilinearly at ``hmat @ (x, y, 1)``
    (after the projective divide). Samples outside [0, W-1] x [0, H-1]
    produce ``fill``. Interpolation runs in float64 and is rounded
    half-up once at the end.
    """
    h, w = src.shape
    m = np.asarray(hmat, dtype=np.float64)
    xs = np.arange(out_w, dtype=np.float64)[None, :]
    ys = np.arange(out_h, dtype=np.float64)[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        den = m[2, 0] * xs + m[2, 1] * ys + m[2, 2]
        sx = (m[0, 0] * xs + m[0, 1] * ys + m[0, 2]) / den
        sy = (m[1, 0] * xs + m[1, 1] * ys + m[1, 2]) / den
        inside = (sx >= 0.0) & (sx <= w - 1.0) & (sy >= 0.0) & (sy <= h - 1.0)
    sx = np.where(inside, sx, 0.0)
    sy = np.where(inside, sy, 0.0)
    x0 = np.floor(sx)
    y0 = np.floor(sy)
    fx = sx - x0
    fy = sy - y0
    ix0 = x0.astype(np.intp)
    iy0 = y0.astype(np.intp)
    ix1 = np.minimum(ix0 + 1, w - 1)
    iy1 = np.minimum(iy0 + 1, h - 1)
    p00 = src[iy0, ix0].astype(np.float64)
    p01 = src[iy0, ix1].astype(np.float64)
    p10 = src[iy1, ix0].astype(np.float64)
    p11 = src[iy1, ix1].astype(np.float64)
    top = (1.0 - fx) * p00 + fx * p01
    bot = (1.0 - fx) * p10 + fx * p11
    v = np.floor((1.0 - fy) * top + fy * bot + 0.5)
    return np.where(inside, v, float(fill)).astype(np.uint8)


def adaptive_threshold_u8(gray, window, offset_c):
    """Binarize: pixel is ink iff value < local mean - offset_c.

    The local mean is taken over a window x window box, border-replicated,
    and truncated toward zero (integer division of the box sum).
    """
    r = window // 2
    padded = np.pad(gray, r, mode="edge").astype(np.int64)
    ii = np.zeros((padded.shape[0] + 1, padded.shape[1] + 1), dtype=np.int64)
    ii[1:, 1:] = padded.cumsum(axis=0).cumsum(axis=1)
    sums = (
        ii[window:, window:]
        - ii[:-window, window:]
        - ii[window:, :-window]
        + ii[:-window, :-window]
    )
    mean = sums // (window * window)
    return gray.astype(np.int64) < mean - offset_c


def _shifted(mask, dy, dx):
    """result[y, x] = mask[y - dy, x - dx], out of bounds -> False."""
    h, w = mask.shape
    out = np.zeros_like(mask)
    y0, y1 = max(dy, 0), h + min(dy, 0)
    x0, x1 = max(dx, 0), w + min(dx, 0)
    if y0 < y1 and x0 < x1:
        out[y0:y1, x0:x1] = mask[y0 - dy:y1 - dy, x0 - dx:x1 - dx]
    return out


def dilate_bool(mask, se):
    """Union of mask translates by the structuring element offsets."""
    rh, rw = se.shape[0] // 2, se.shape[1] // 2
    out = np.zeros_like(mask)
    for ky, kx in np.argwhere(se):
        out |= _shifted(mask, ky - rh, kx - rw)
    return out


def erode_bool(mask, se):
    """Pixels whose full SE footprint lies inside the mask (OOB = background)."""
    rh, rw = se.shape[0] // 2, se.shape[1] // 2
    out = np.ones_like(mask)
    for ky, kx in np.argwhere(se):
        out &= _shifted(mask, -(ky - rh), -(kx - rw))
    return out


def _empty_label_result(labels):
    return (labels, 0,
            np.zeros((0, 2), dtype=np.int32),
            np.zeros(0, dtype=np.int64),
            np.zeros((0, 4), dtype=np.int32),
            np.zeros(0, dtype=bool))


def label_components(mask, connectivity):
    """Label connected foreground components in first-encounter scan order.

    Run-based two-pass union-find: rows are split into foreground runs,
    runs touching across adjacent rows are merged, and final labels are
    assigned in order of each component's first pixel in row-major scan.

    Returns (labels, count, starts, areas, bboxes, border_contact):
    labels is int32 with 0 = background; starts[k] is the (y, x)
    first-encounter pixel of label k + 1; bboxes rows are inclusive
    (x0, y0, x1, y1); border_contact marks components touching an edge.
    """
    h, w = mask.shape
    labels = np.zeros((h, w), dtype=np.int32)
    if h == 0 or w == 0 or not mask.any():
        return _empty_label_result(labels)

    # Append a background column so runs never cross row boundaries when
    # the mask is flattened.
    padded = np.zeros((h, w + 1), dtype=bool)
    padded[:, :w] = mask
    flat = padded.ravel().view(np.int8)
    edges = np.flatnonzero(np.diff(np.concatenate(([0], flat))))
    starts_flat = edges[::2]
    ends_flat = edges[1::2]
    run_row = (starts_flat // (w + 1)).astype(np.int64)
    run_x0 = (starts_flat % (w + 1)).astype(np.int64)
    run_x1 = ((ends_flat - 1) % (w + 1)).astype(np.int64)  # inclusive

    n_runs = len(run_row)
    parent = list(range(n_runs))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    reach = 0 if connectivity == 4 else 1
    row_bounds = np.searchsorted(run_row, np.arange(h + 1))
    rows = run_row.tolist()
    x0s = run_x0.tolist()
    x1s = run_x1.tolist()
    for i in range(n_runs):
        r = rows[i]
        if r == 0:
            continue
        j = row_bounds[r - 1]
        j_end = row_bounds[r]
        lo = x0s[i] - reach
        hi = x1s[i] + reach
        while j < j_end:
            if x1s[j] < lo:
                j += 1
                continue
            if x0s[j] > hi:
                break
            ri, rj = find(i), find(j)
            if ri != rj:
                if ri < rj:
                    parent[rj] = ri
                else:
                    parent[ri] = rj
            j += 1

    # Final labels in first-encounter (scan) order of the component roots.
    final = {}
    run_label = np.empty(n_runs, dtype=np.int64)
    starts = []
    for i in range(n_runs):
        root = find(i)
        lab = final.get(root)
        if lab is None:
            lab = len(final) + 1
            final[root] = lab
            starts.append((rows[i], x0s[i]))
        run_label[i] = lab
    for i in range(n_runs):
        labels[rows[i], x0s[i]:x1s[i] + 1] = run_label[i]

    count = len(final)
    idx = run_label - 1
    areas = np.zeros(count, dtype=np.int64)
    np.add.at(areas, idx, run_x1 - run_x0 + 1)
    bboxes = np.zeros((count, 4), dtype=np.int32)
    bboxes[:, 0] = w
    bboxes[:, 1] = h
    np.minimum.at(bboxes[:, 0], idx, run_x0)
    np.minimum.at(bboxes[:, 1], idx, run_row)
    np.maximum.at(bboxes[:, 2], idx, run_x1)
    np.maximum.at(bboxes[:, 3], idx, run_row)
    border = np.zeros(count, dtype=bool)
    touches = (run_row == 0) | (run_row == h - 1) | (run_x0 == 0) | (run_x1 == w - 1)
    border[idx[touches]] = True
    return (labels, count, np.asarray(starts, dtype=np.int32),
            areas, bboxes, border)


def moore_trace(labels, target, start_y, start_x):
    """Trace the exterior boundary of one labeled component, clockwise.

    ``(start_y, start_x)`` must be the component's first pixel in row-major
    scan order. Returns an int32 (N, 2) array of (x, y) boundary pixels in
    tracing order; a closed ring except for single-pixel components.
    """
    h, w = labels.shape
    fg = np.ascontiguousarray((labels == target).view(np.uint8)).tobytes()

    sx, sy = int(start_x), int(start_y)
    points = [(sx, sy)]
    cx, cy = sx, sy
    entry_dir = 0  # pretend we entered the start pixel moving east
    second = None
    max_steps = 4 * h * w + 8
    for _ in range(max_steps):
        found = -1
        probe = (entry_dir + 6) & 7
        for k in range(8):
            d = (probe + k) & 7
            nx = cx + _MOORE_DX[d]
            ny = cy + _MOORE_DY[d]
            if 0 <= nx < w and 0 <= ny < h and fg[ny * w + nx]:
                found = d
                break
        if found < 0:
            break  # isolated pixel
        nx = cx + _MOORE_DX[found]
        ny = cy + _MOORE_DY[found]
        if second is None:
            second = (nx, ny)
        elif (cx, cy) == (sx, sy) and (nx, ny) == second:
            break  # the initial move repeats: ring is closed
        points.append((nx, ny))
        cx, cy = nx, ny
        entry_dir = found
    if len(points) > 1 and points[-1] == (sx, sy):
        points.pop()
    return np.asarray(points, dtype=np.int32)
