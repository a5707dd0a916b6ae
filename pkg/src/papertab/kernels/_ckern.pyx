# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementations of the per-frame hot kernels.

Must stay bit-identical to ``papertab.kernels.pyback``: same expression
trees for the interpolation arithmetic, rounding via floor(x + 0.5),
truncating integer division for local means. The build disables FP
contraction so the float paths match the NumPy backend exactly.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport floor

cnp.import_array()

BACKEND = "c"

cdef int[8] _MOORE_DX = [1, 1, 0, -1, -1, -1, 0, 1]
cdef int[8] _MOORE_DY = [0, 1, 1, 1, 0, -1, -1, -1]


def warp_bilinear_u8(const unsigned char[:, ::1] src, hmat, int out_w, int out_h, int fill=255):
    """Inverse-mapped perspective warp; see pyback.warp_bilinear_u8."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2] m = np.ascontiguousarray(hmat, dtype=np.float64)
    cdef double m00 = m[0, 0], m01 = m[0, 1], m02 = m[0, 2]
    cdef double m10 = m[1, 0], m11 = m[1, 1], m12 = m[1, 2]
    cdef double m20 = m[2, 0], m21 = m[2, 1], m22 = m[2, 2]
    cdef int h = src.shape[0], w = src.shape[1]
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] out = np.empty((out_h, out_w), dtype=np.uint8)
    cdef unsigned char[:, ::1] ov = out
    cdef int i, j, ix0, iy0, ix1, iy1
    cdef double x, y, den, sx, sy, x0, y0, fx, fy, p00, p01, p10, p11, top, bot, v
    cdef double wmax = w - 1.0, hmax = h - 1.0
    cdef unsigned char fillv = <unsigned char> fill
    for j in range(out_h):
        y = j
        for i in range(out_w):
            x = i
            den = m20 * x + m21 * y + m22
            sx = (m00 * x + m01 * y + m02) / den
            sy = (m10 * x + m11 * y + m12) / den
            if sx >= 0.0 and sx <= wmax and sy >= 0.0 and sy <= hmax:
                x0 = floor(sx)
                y0 = floor(sy)
                fx = sx - x0
                fy = sy - y0
                ix0 = <int> x0
                iy0 = <int> y0
                ix1 = ix0 + 1
                if ix1 > w - 1:
                    ix1 = w - 1
                iy1 = iy0 + 1
                if iy1 > h - 1:
                    iy1 = h - 1
                p00 = src[iy0, ix0]
                p01 = src[iy0, ix1]
                p10 = src[iy1, ix0]
                p11 = src[iy1, ix1]
                top = (1.0 - fx) * p00 + fx * p01
                bot = (1.0 - fx) * p10 + fx * p11
                v = floor((1.0 - fy) * top + fy * bot + 0.5)
                ov[j, i] = <unsigned char> v
            else:
                ov[j, i] = fillv
    return out


def adaptive_threshold_u8(const unsigned char[:, ::1] gray, int window, long long offset_c):
    """Local-mean threshold; see pyback.adaptive_threshold_u8."""
    cdef int h = gray.shape[0], w = gray.shape[1]
    cdef int r = window // 2
    cdef int ph = h + 2 * r, pw = w + 2 * r
    cdef cnp.ndarray[cnp.int64_t, ndim=2] ii = np.zeros((ph + 1, pw + 1), dtype=np.int64)
    cdef long long[:, ::1] iv = ii
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] out = np.zeros((h, w), dtype=np.uint8)
    cdef unsigned char[:, ::1] ov = out
    cdef int i, j, sy, sx
    cdef long long s, mean, area = <long long> window * window
    for j in range(ph):
        sy = j - r
        if sy < 0:
            sy = 0
        elif sy > h - 1:
            sy = h - 1
        for i in range(pw):
            sx = i - r
            if sx < 0:
                sx = 0
            elif sx > w - 1:
                sx = w - 1
            iv[j + 1, i + 1] = (<long long> gray[sy, sx]
                               + iv[j, i + 1] + iv[j + 1, i] - iv[j, i])
    for j in range(h):
        for i in range(w):
            s = (iv[j + window, i + window] - iv[j, i + window]
                 - iv[j + window, i] + iv[j, i])
            mean = s // area
            if <long long> gray[j, i] < mean - offset_c:
                ov[j, i] = 1
    return out.view(bool)


cdef _dilate_rows(unsigned char[:, ::1] src, unsigned char[:, ::1] dst,
                  int radius) noexcept:
    """Vertical OR over a (2*radius+1) window; row sweeps vectorize."""
    cdef int h = src.shape[0], w = src.shape[1]
    cdef int y, x, sy, y0, y1
    for y in range(h):
        y0 = y - radius
        if y0 < 0:
            y0 = 0
        y1 = y + radius
        if y1 > h - 1:
            y1 = h - 1
        for x in range(w):
            dst[y, x] = src[y0, x]
        for sy in range(y0 + 1, y1 + 1):
            for x in range(w):
                dst[y, x] = dst[y, x] | src[sy, x]


cdef _dilate_cols(unsigned char[:, ::1] src, unsigned char[:, ::1] dst,
                  int radius) noexcept:
    cdef int h = src.shape[0], w = src.shape[1]
    cdef int y, x, dx, x0, x1
    for y in range(h):
        for x in range(w):
            dst[y, x] = src[y, x]
        for dx in range(1, radius + 1):
            for x in range(dx, w):
                dst[y, x] = dst[y, x] | src[y, x - dx]
            for x in range(0, w - dx):
                dst[y, x] = dst[y, x] | src[y, x + dx]


cdef _erode_rows(unsigned char[:, ::1] src, unsigned char[:, ::1] dst,
                 int radius) noexcept:
    """Vertical AND; windows clipped by the border erode to background."""
    cdef int h = src.shape[0], w = src.shape[1]
    cdef int y, x, sy
    for y in range(h):
        if y - radius < 0 or y + radius > h - 1:
            for x in range(w):
                dst[y, x] = 0
            continue
        for x in range(w):
            dst[y, x] = src[y - radius, x]
        for sy in range(y - radius + 1, y + radius + 1):
            for x in range(w):
                dst[y, x] = dst[y, x] & src[sy, x]


cdef _erode_cols(unsigned char[:, ::1] src, unsigned char[:, ::1] dst,
                 int radius) noexcept:
    cdef int h = src.shape[0], w = src.shape[1]
    cdef int y, x, dx
    for y in range(h):
        for x in range(w):
            dst[y, x] = src[y, x]
        for dx in range(1, radius + 1):
            for x in range(w - 1, dx - 1, -1):
                dst[y, x] = dst[y, x] & src[y, x - dx]
            for x in range(0, w - dx):
                dst[y, x] = dst[y, x] & src[y, x + dx]
        for dx in range(1, radius + 1):
            dst[y, dx - 1] = 0
            dst[y, w - dx] = 0


def dilate_bool(mask, se):
    """Union of mask translates by the SE offsets; OOB = background."""
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] m = np.ascontiguousarray(mask).view(np.uint8)
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] k = np.ascontiguousarray(se).view(np.uint8)
    cdef int h = m.shape[0], w = m.shape[1]
    cdef int kh = k.shape[0], kw = k.shape[1]
    cdef int rh = kh // 2, rw = kw // 2
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] out = np.zeros((h, w), dtype=np.uint8)
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] tmp
    cdef unsigned char[:, ::1] ov = out
    cdef unsigned char[:, ::1] mv = m
    cdef unsigned char[:, ::1] kv = k
    cdef int y, x, ky, kx, sy, sx
    if k.all():
        # A full box dilation is exactly separable into row/column passes.
        tmp = np.zeros((h, w), dtype=np.uint8)
        _dilate_rows(mv, tmp, rh)
        _dilate_cols(tmp, ov, rw)
        return out.view(bool)
    for y in range(h):
        for x in range(w):
            for ky in range(kh):
                sy = y - (ky - rh)
                if sy < 0 or sy >= h:
                    continue
                for kx in range(kw):
                    if not kv[ky, kx]:
                        continue
                    sx = x - (kx - rw)
                    if 0 <= sx < w and mv[sy, sx]:
                        ov[y, x] = 1
                        break
                if ov[y, x]:
                    break
    return out.view(bool)


def erode_bool(mask, se):
    """SE footprint entirely inside the mask; OOB = background."""
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] m = np.ascontiguousarray(mask).view(np.uint8)
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] k = np.ascontiguousarray(se).view(np.uint8)
    cdef int h = m.shape[0], w = m.shape[1]
    cdef int kh = k.shape[0], kw = k.shape[1]
    cdef int rh = kh // 2, rw = kw // 2
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] out = np.zeros((h, w), dtype=np.uint8)
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] tmp
    cdef unsigned char[:, ::1] ov = out
    cdef unsigned char[:, ::1] mv = m
    cdef unsigned char[:, ::1] kv = k
    cdef int y, x, ky, kx, sy, sx
    cdef bint keep
    if k.all():
        tmp = np.zeros((h, w), dtype=np.uint8)
        _erode_rows(mv, tmp, rh)
        _erode_cols(tmp, ov, rw)
        return out.view(bool)
    for y in range(h):
        for x in range(w):
            keep = True
            for ky in range(kh):
                sy = y + (ky - rh)
                for kx in range(kw):
                    if not kv[ky, kx]:
                        continue
                    sx = x + (kx - rw)
                    if sy < 0 or sy >= h or sx < 0 or sx >= w or not mv[sy, sx]:
                        keep = False
                        break
                if not keep:
                    break
            if keep:
                ov[y, x] = 1
    return out.view(bool)


cdef int _find(int[::1] parent, int i) noexcept nogil:
    while parent[i] != i:
        parent[i] = parent[parent[i]]
        i = parent[i]
    return i


def label_components(mask, int connectivity):
    """Two-pass pixel union-find labeling; see pyback.label_components."""
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] m = np.ascontiguousarray(mask).view(np.uint8)
    cdef int h = m.shape[0], w = m.shape[1]
    cdef unsigned char[:, ::1] mv = m
    cdef cnp.ndarray[cnp.int32_t, ndim=2] labels = np.zeros((h, w), dtype=np.int32)
    cdef int[:, ::1] lv = labels
    cdef cnp.ndarray[cnp.int32_t, ndim=1] parent_arr = np.zeros(h * w // 2 + 2, dtype=np.int32)
    cdef int[::1] parent = parent_arr
    cdef int y, x, nprov = 0, best, cand, ra, rb
    cdef bint diag = connectivity == 8
    for y in range(h):
        for x in range(w):
            if not mv[y, x]:
                continue
            best = 0
            if x > 0 and lv[y, x - 1] > 0:
                best = lv[y, x - 1]
            if y > 0:
                if lv[y - 1, x] > 0:
                    cand = lv[y - 1, x]
                    if best == 0 or cand < best:
                        best = cand
                if diag:
                    if x > 0 and lv[y - 1, x - 1] > 0:
                        cand = lv[y - 1, x - 1]
                        if best == 0 or cand < best:
                            best = cand
                    if x < w - 1 and lv[y - 1, x + 1] > 0:
                        cand = lv[y - 1, x + 1]
                        if best == 0 or cand < best:
                            best = cand
            if best == 0:
                nprov += 1
                parent[nprov] = nprov
                lv[y, x] = nprov
            else:
                lv[y, x] = best
                ra = _find(parent, best)
                if x > 0 and lv[y, x - 1] > 0:
                    rb = _find(parent, lv[y, x - 1])
                    if rb < ra:
                        parent[ra] = rb
                        ra = rb
                    elif rb > ra:
                        parent[rb] = ra
                if y > 0:
                    if lv[y - 1, x] > 0:
                        rb = _find(parent, lv[y - 1, x])
                        if rb < ra:
                            parent[ra] = rb
                            ra = rb
                        elif rb > ra:
                            parent[rb] = ra
                    if diag:
                        if x > 0 and lv[y - 1, x - 1] > 0:
                            rb = _find(parent, lv[y - 1, x - 1])
                            if rb < ra:
                                parent[ra] = rb
                                ra = rb
                            elif rb > ra:
                                parent[rb] = ra
                        if x < w - 1 and lv[y - 1, x + 1] > 0:
                            rb = _find(parent, lv[y - 1, x + 1])
                            if rb < ra:
                                parent[ra] = rb
                                ra = rb
                            elif rb > ra:
                                parent[rb] = ra

    cdef cnp.ndarray[cnp.int32_t, ndim=1] final_arr = np.zeros(nprov + 1, dtype=np.int32)
    cdef int[::1] final = final_arr
    cdef cnp.ndarray[cnp.int64_t, ndim=1] areas = np.zeros(nprov + 1, dtype=np.int64)
    cdef long long[::1] av = areas
    cdef cnp.ndarray[cnp.int32_t, ndim=2] bboxes = np.zeros((nprov + 1, 4), dtype=np.int32)
    cdef int[:, ::1] bv = bboxes
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] border = np.zeros(nprov + 1, dtype=np.uint8)
    cdef unsigned char[::1] brv = border
    cdef int count = 0, root, lab
    starts_list = []
    for y in range(h):
        for x in range(w):
            lab = lv[y, x]
            if lab == 0:
                continue
            root = _find(parent, lab)
            lab = final[root]
            if lab == 0:
                count += 1
                final[root] = count
                lab = count
                starts_list.append((y, x))
                bv[lab, 0] = x
                bv[lab, 1] = y
                bv[lab, 2] = x
                bv[lab, 3] = y
            lv[y, x] = lab
            av[lab] += 1
            if x < bv[lab, 0]:
                bv[lab, 0] = x
            if y < bv[lab, 1]:
                bv[lab, 1] = y
            if x > bv[lab, 2]:
                bv[lab, 2] = x
            if y > bv[lab, 3]:
                bv[lab, 3] = y
            if y == 0 or y == h - 1 or x == 0 or x == w - 1:
                brv[lab] = 1
    return (labels, count,
            np.asarray(starts_list, dtype=np.int32).reshape(count, 2),
            areas[1:count + 1],
            bboxes[1:count + 1],
            border[1:count + 1].view(bool))


def moore_trace(labels, int target, int start_y, int start_x):
    """Clockwise exterior boundary trace; see pyback.moore_trace."""
    cdef cnp.ndarray[cnp.int32_t, ndim=2] larr = np.ascontiguousarray(labels, dtype=np.int32)
    cdef int[:, ::1] lv = larr
    cdef int h = lv.shape[0], w = lv.shape[1]
    cdef int cx = start_x, cy = start_y
    cdef int entry_dir = 0, found, d, k, nx = 0, ny = 0
    cdef int sx = start_x, sy = start_y
    cdef int second_x = -1, second_y = -1
    cdef long long step, max_steps = 4 * <long long> h * w + 8
    points = [(sx, sy)]
    for step in range(max_steps):
        found = -1
        for k in range(8):
            d = (entry_dir + 6 + k) & 7
            nx = cx + _MOORE_DX[d]
            ny = cy + _MOORE_DY[d]
            if 0 <= nx < w and 0 <= ny < h and lv[ny, nx] == target:
                found = d
                break
        if found < 0:
            break
        nx = cx + _MOORE_DX[found]
        ny = cy + _MOORE_DY[found]
        if second_x < 0:
            second_x = nx
            second_y = ny
        elif cx == sx and cy == sy and nx == second_x and ny == second_y:
            break
        points.append((nx, ny))
        cx = nx
        cy = ny
        entry_dir = found
    if len(points) > 1 and points[len(points) - 1] == (sx, sy):
        points.pop()
    return np.asarray(points, dtype=np.int32)
