import numpy as np
import pytest

from oracles import (
    exterior_boundary_pixels,
    floodfill_labels,
    hull_halfplane,
    max_quad_area_bruteforce,
    quad_area,
)
from papertab.quadgeom import (
    DegenerateHull,
    NotAQuad,
    OrderedQuad,
    convex_hull,
    fit_quad,
    largest_contour,
    order_corners,
    polygon_area,
    trace_contours,
)


def as_set(contour):
    return set(map(tuple, contour.tolist()))


class TestTraceContours:
    def test_single_pixel(self):
        mask = np.zeros((5, 5), bool)
        mask[2, 2] = True
        contours = trace_contours(mask)
        assert len(contours) == 1
        assert contours[0].tolist() == [[2, 2]]

    def test_filled_block_border_order(self):
        mask = np.zeros((5, 5), bool)
        mask[0:3, 0:3] = True
        (contour,) = trace_contours(mask)
        # Clockwise border following from the scan-order start pixel.
        assert contour.tolist() == [
            [0, 0], [1, 0], [2, 0], [2, 1], [2, 2], [1, 2], [0, 2], [0, 1]]

    def test_two_separated_pixels(self):
        mask = np.zeros((4, 4), bool)
        mask[0, 0] = mask[3, 3] = True
        contours = trace_contours(mask)
        assert len(contours) == 2

    def test_empty_mask(self):
        assert trace_contours(np.zeros((3, 3), bool)) == []

    def test_contours_closed_and_adjacent(self, rng):
        for _ in range(30):
            mask = rng.random((12, 14)) < 0.35
            for contour in trace_contours(mask):
                if len(contour) == 1:
                    continue
                ring = np.vstack([contour, contour[:1]])
                steps = np.abs(np.diff(ring, axis=0)).max(axis=1)
                assert (steps == 1).all()

    def test_exterior_boundary_coverage(self, rng):
        # Every pixel 4-adjacent to the outside region appears on the
        # traced ring, and nothing else does (holes are not traced).
        def masks():
            for _ in range(10):
                mask = np.zeros((16, 16), bool)
                for _ in range(3):
                    y, x = rng.integers(2, 12, 2)
                    h, w = rng.integers(2, 5, 2)
                    mask[y:y + h, x:x + w] = True
                yield mask
            for _ in range(20):
                yield rng.random((14, 15)) < rng.uniform(0.2, 0.7)

        for mask in masks():
            labels, count = floodfill_labels(mask, 4)
            contours = trace_contours(mask)
            assert len(contours) == count
            for contour in contours:
                x0, y0 = contour[0]
                component = labels == labels[y0, x0]
                expected = exterior_boundary_pixels(component)
                assert as_set(contour) == expected


class TestLargestContour:
    def test_orders_by_enclosed_area(self):
        mask = np.zeros((12, 12), bool)
        mask[1:3, 1:3] = True     # small block
        mask[5:11, 5:11] = True   # large block
        contours = trace_contours(mask)
        big = largest_contour(contours)
        assert (5, 5) in as_set(big)

    def test_single_contour_is_identity(self):
        mask = np.zeros((4, 4), bool)
        mask[1:3, 1:3] = True
        contours = trace_contours(mask)
        assert largest_contour(contours) is contours[0]

    def test_tie_keeps_scan_order(self):
        mask = np.zeros((8, 8), bool)
        mask[1:3, 1:3] = True
        mask[5:7, 5:7] = True
        contours = trace_contours(mask)
        assert np.array_equal(largest_contour(contours), contours[0])

    def test_empty_raises(self):
        with pytest.raises(ValueError):
            largest_contour([])


class TestConvexHull:
    def test_square_with_interior_point(self):
        hull = convex_hull([(0, 0), (1, 0), (1, 1), (0, 1), (0.5, 0.5)])
        assert as_set(np.asarray(hull, int)) == {(0, 0), (1, 0), (1, 1), (0, 1)}

    def test_triangle(self):
        hull = convex_hull([(0, 0), (4, 1), (1, 3)])
        assert len(hull) == 3

    def test_collinear_raises(self):
        with pytest.raises(DegenerateHull):
            convex_hull([(0, 0), (1, 1), (2, 2), (3, 3)])

    def test_counterclockwise_in_image_coordinates(self):
        hull = convex_hull([(0, 0), (2, 0), (2, 2), (0, 2)])
        x, y = hull[:, 0], hull[:, 1]
        signed = np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y)
        assert signed < 0  # negative shoelace = CCW when y grows downward

    def test_random_discs_match_halfplane_oracle(self, rng):
        for _ in range(25):
            n = int(rng.integers(4, 60))
            angles = rng.uniform(0, 2 * np.pi, n)
            radii = np.sqrt(rng.uniform(0, 1, n))
            pts = np.c_[radii * np.cos(angles), radii * np.sin(angles)]
            hull = convex_hull(pts)
            assert set(map(tuple, hull.tolist())) == hull_halfplane(pts)

    def test_all_points_inside_hull_halfplanes(self, rng):
        for _ in range(20):
            pts = rng.uniform(-5, 5, (30, 2))
            hull = convex_hull(pts)
            # every input point lies on the inner side of every hull edge
            for i in range(len(hull)):
                a = hull[i]
                b = hull[(i + 1) % len(hull)]
                cross = ((b[0] - a[0]) * (pts[:, 1] - a[1])
                         - (b[1] - a[1]) * (pts[:, 0] - a[0]))
                assert (cross <= 1e-9).all() or (cross >= -1e-9).all()


class TestFitQuad:
    def test_four_point_hull_is_reordered_identity(self):
        hull = convex_hull([(0, 0), (5, 1), (6, 7), (-1, 5)])
        quad = fit_quad(hull)
        assert as_set(np.asarray(quad.pts, int)) == {(0, 0), (5, 1), (6, 7), (-1, 5)}

    def test_perturbed_rectangle_midpoint(self):
        # Rectangle with one edge midpoint pushed 0.4 px outward: the
        # max-area quad keeps the true rectangle corners.
        pts = [(0, 0), (10, 0), (10, 6), (0, 6), (5, -0.4)]
        quad = fit_quad(convex_hull(pts))
        expected = order_corners([(0, 0), (10, 0), (10, 6), (0, 6)]).pts
        assert np.abs(quad.pts - expected).max() <= 0.5

    def test_octagon_max_area_matches_bruteforce(self):
        angles = np.arange(8) * (2 * np.pi / 8)
        pts = np.c_[np.cos(angles), np.sin(angles)]
        hull = convex_hull(pts)
        quad = fit_quad(hull)
        assert quad.area() == pytest.approx(
            max_quad_area_bruteforce(hull.tolist()), abs=1e-9)

    def test_random_hulls_match_bruteforce(self, rng):
        for _ in range(40):
            pts = rng.uniform(0, 100, (int(rng.integers(4, 14)), 2))
            try:
                hull = convex_hull(pts)
            except DegenerateHull:
                continue
            if len(hull) < 4:
                continue
            quad = fit_quad(hull)
            assert quad.area() == pytest.approx(
                max_quad_area_bruteforce(hull.tolist()), abs=1e-9)

    def test_triangle_hull_rejected(self):
        with pytest.raises(NotAQuad):
            fit_quad(convex_hull([(0, 0), (4, 0), (2, 3)]))

    def test_oversized_hull_takes_simplification_path(self, rng):
        angles = np.sort(rng.uniform(0, 2 * np.pi, 100))
        pts = np.c_[np.cos(angles), np.sin(angles)] * 50
        hull = convex_hull(pts)
        assert len(hull) > 32
        quad = fit_quad(hull)
        # inscribed square of a radius-50 circle has area 5000
        assert quad.area() > 0.9 * 5000


class TestOrderCorners:
    def test_shuffled_rectangle(self, rng):
        canonical = [(1, 2), (9, 2), (9, 7), (1, 7)]
        for _ in range(8):
            perm = rng.permutation(4)
            quad = order_corners([canonical[i] for i in perm])
            assert quad.pts.tolist() == [list(map(float, p)) for p in canonical]

    def test_rotated_square_assignments(self):
        # unit square rotated 30 degrees about its center
        theta = np.deg2rad(30)
        rot = np.array([[np.cos(theta), -np.sin(theta)],
                        [np.sin(theta), np.cos(theta)]])
        base = np.array([(-1, -1), (1, -1), (1, 1), (-1, 1)], float)
        pts = base @ rot.T + 5
        quad = order_corners(rng_shuffle(pts))
        expected = rot_expected(base, rot)
        assert np.allclose(quad.pts, expected + 5)

    def test_idempotent(self):
        quad = order_corners([(0, 0), (4, 1), (5, 6), (-1, 4)])
        again = order_corners(quad.pts)
        assert np.array_equal(quad.pts, again.pts)

    def test_permutation_invariance(self, rng):
        for _ in range(25):
            pts = rng.uniform(0, 50, (4, 2))
            try:
                ref = order_corners(pts)
            except NotAQuad:
                continue
            for _ in range(6):
                quad = order_corners(pts[rng.permutation(4)])
                assert np.array_equal(quad.pts, ref.pts)

    def test_degenerate_rejected(self):
        with pytest.raises(NotAQuad):
            order_corners([(0, 0), (1, 1), (2, 2), (0, 5)])  # collinear triple
        with pytest.raises(NotAQuad):
            order_corners([(0, 0), (0, 0), (1, 1), (1, 0)])  # repeated point


def rng_shuffle(pts):
    rng = np.random.default_rng(5)
    return pts[rng.permutation(4)]


def rot_expected(base, rot):
    pts = base @ rot.T
    s = pts[:, 0] + pts[:, 1]
    d = pts[:, 0] - pts[:, 1]
    order = [int(np.argmin(s)), int(np.argmax(d)), int(np.argmax(s)), int(np.argmin(d))]
    return pts[order]


class TestInvariantProperties:
    def test_largest_contour_beats_floodfill_component_areas(self, rng):
        # The enclosed area of the winner is >= the enclosed area of every
        # other contour (checked against flood-fill component identity).
        for _ in range(10):
            mask = rng.random((20, 20)) < 0.3
            contours = trace_contours(mask)
            if not contours:
                continue
            labels, count = floodfill_labels(mask, 4)
            assert len(contours) == count
            best = largest_contour(contours)
            best_area = polygon_area(best)
            for contour in contours:
                assert best_area >= polygon_area(contour) - 1e-12

    def test_quad_area_helper_agrees_with_oracle(self, rng):
        for _ in range(20):
            pts = rng.uniform(0, 10, (4, 2))
            assert polygon_area(pts) == pytest.approx(quad_area(pts.tolist()))
