import numpy as np
import pytest

from oracles import bilinear_direct
from papertab.raster import flip_horizontal, sample_bilinear, to_grayscale


def test_grayscale_equal_channels():
    frame = np.zeros((2, 2, 3), np.uint8)
    frame[0, 0] = (255, 255, 255)
    gray = to_grayscale(frame)
    assert gray[0, 0] == 255
    assert gray[1, 1] == 0


def test_grayscale_pure_red():
    frame = np.zeros((1, 1, 3), np.uint8)
    frame[0, 0] = (255, 0, 0)
    # round(0.299 * 255) = round(76.245)
    assert to_grayscale(frame)[0, 0] == 76


def test_grayscale_rejects_single_channel():
    with pytest.raises(ValueError):
        to_grayscale(np.zeros((4, 4), np.uint8))


def test_grayscale_of_replicated_gray_within_one(rng):
    gray = rng.integers(0, 256, (16, 16), np.uint8)
    frame = np.stack([gray] * 3, axis=-1)
    back = to_grayscale(frame)
    assert np.abs(back.astype(int) - gray.astype(int)).max() <= 1


def test_flip_single_pixel():
    img = np.array([[7]], np.uint8)
    assert np.array_equal(flip_horizontal(img), img)


def test_flip_two_pixels():
    img = np.array([[1, 2]], np.uint8)
    assert flip_horizontal(img).tolist() == [[2, 1]]


def test_flip_involution(rng):
    for _ in range(10):
        h, w = rng.integers(1, 20, 2)
        img = rng.integers(0, 256, (h, w, 3), np.uint8)
        assert np.array_equal(flip_horizontal(flip_horizontal(img)), img)


def test_bilinear_integer_coordinates(rng):
    img = rng.integers(0, 256, (8, 9), np.uint8)
    for y in range(8):
        for x in range(9):
            assert sample_bilinear(img, (x, y)) == float(img[y, x])


def test_bilinear_axis_midpoint():
    img = np.array([[0, 255]], np.uint8)
    assert sample_bilinear(img, (0.5, 0.0)) == 127.5


def test_bilinear_quarter_point_matches_direct_formula():
    patch = np.array([[0, 100], [200, 40]], np.uint8)
    value = sample_bilinear(patch, (0.25, 0.75))
    assert value == bilinear_direct(patch, 0.25, 0.75)
    # Frozen from the direct evaluation: 0*(0.75*0.25) + 100*(0.25*0.25)
    # + 200*(0.75*0.75) + 40*(0.25*0.75).
    assert value == 126.25


def test_bilinear_random_points_match_direct_formula(rng):
    img = rng.integers(0, 256, (10, 12), np.uint8)
    for _ in range(200):
        x = rng.uniform(0, 11)
        y = rng.uniform(0, 9)
        assert sample_bilinear(img, (x, y)) == pytest.approx(
            bilinear_direct(img, x, y), abs=1e-12)


def test_bilinear_rejects_out_of_bounds():
    img = np.zeros((4, 4), np.uint8)
    for p in [(-0.1, 0), (0, -0.1), (3.01, 0), (0, 3.01), (np.nan, 1)]:
        with pytest.raises(ValueError):
            sample_bilinear(img, p)
