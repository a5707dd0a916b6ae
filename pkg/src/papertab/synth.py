"""Synthetic scene generator: the ground-truth oracle for end-to-end tests.

Renders known page ink into a camera frame through a known quad, with a
background, a lighting gradient, an articulated hand sprite, and seeded
noise. Projection here is deliberately independent of the perspective
module: the generator maps the unit square onto the quad with the
closed-form projective construction and splats forward with 4x
supersampling, while the pipeline under test solves a linear system and
samples inversely. Agreement between the two on noise-free scenes is
itself part of the test surface.
"""

import configparser
from dataclasses import dataclass, field

import numpy as np

from .quadgeom import OrderedQuad
from .raster import ensure_mask

HAND_INTENSITY = 90
# Hand sprite proportions relative to the page size.
_PALM_RX = 0.11
_PALM_RY = 0.085
_ARM_HALF_WIDTH = 0.06


@dataclass(frozen=True)
class SceneTruth:
    """Exact per-frame ground truth, all in page coordinates except quad."""

    quad: OrderedQuad
    ink: np.ndarray
    occlusion: np.ndarray


@dataclass(frozen=True)
class SceneSpec:
    """Deterministic description of a synthetic session.

    ``page_ink`` is the ground-truth content; ``true_quad`` places the
    page in the camera frame. ``hand_path`` lists (frame, (x, y)) palm
    centers in page coordinates, interpolated linearly between entries;
    an empty path means no hand. ``light_gradient`` is the intensity delta
    across the camera frame width.
    """

    page_ink: np.ndarray
    true_quad: OrderedQuad
    bg_intensity: int = 40
    paper_intensity: int = 220
    ink_intensity: int = 25
    light_gradient: float = 0.0
    noise_sigma: float = 0.0
    seed: int = 0
    frame_width: int = 640
    frame_height: int = 480
    hand_path: tuple = field(default_factory=tuple)

    def __post_init__(self):
        ensure_mask(self.page_ink)
        if not 0 <= self.bg_intensity <= 255 or not 0 <= self.paper_intensity <= 255:
            raise ValueError("intensities must be in [0, 255]")
        if self.paper_intensity <= self.bg_intensity:
            raise ValueError("paper must be brighter than the background")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be >= 0")
        pts = self.true_quad.pts
        if (pts[:, 0].min() < 0 or pts[:, 1].min() < 0
                or pts[:, 0].max() > self.frame_width
                or pts[:, 1].max() > self.frame_height):
            raise ValueError("true_quad must lie inside the camera frame")
        object.__setattr__(self, "hand_path", tuple(
            (int(t), (float(p[0]), float(p[1]))) for t, p in self.hand_path))

    @property
    def page_width(self) -> int:
        return self.page_ink.shape[1]

    @property
    def page_height(self) -> int:
        return self.page_ink.shape[0]


def unit_square_to_quad(quad: OrderedQuad) -> np.ndarray:
    """Projective map of the unit square onto a quad, in closed form.

    (0,0)->tl, (1,0)->tr, (1,1)->br, (0,1)->bl. Solves the two projective
    coefficients from the corner sums directly instead of eliminating an
    8x8 system, which keeps it independent from the perspective module.
    """
    (x0, y0), (x1, y1), (x2, y2), (x3, y3) = quad.pts
    sx = x0 - x1 + x2 - x3
    sy = y0 - y1 + y2 - y3
    if sx == 0.0 and sy == 0.0:
        g = h = 0.0
    else:
        dx1, dy1 = x1 - x2, y1 - y2
        dx2, dy2 = x3 - x2, y3 - y2
        den = dx1 * dy2 - dy1 * dx2
        if den == 0.0:
            raise ValueError("degenerate quad")
        g = (sx * dy2 - sy * dx2) / den
        h = (dx1 * sy - dy1 * sx) / den
    a = x1 - x0 + g * x1
    b = x3 - x0 + h * x3
    c = x0
    d = y1 - y0 + g * y1
    e = y3 - y0 + h * y3
    f = y0
    return np.array([[a, b, c], [d, e, f], [g, h, 1.0]])


def hand_mask(spec: SceneSpec, t: int) -> np.ndarray:
    """Hand sprite (palm ellipse plus arm to the page bottom) at frame t."""
    ph, pw = spec.page_ink.shape
    mask = np.zeros((ph, pw), dtype=bool)
    if not spec.hand_path:
        return mask
    cx, cy = _hand_position(spec.hand_path, t)
    rx, ry = _PALM_RX * pw, _PALM_RY * ph
    ys = np.arange(ph, dtype=np.float64)[:, None]
    xs = np.arange(pw, dtype=np.float64)[None, :]
    mask |= ((xs - cx) / rx) ** 2 + ((ys - cy) / ry) ** 2 <= 1.0
    aw = _ARM_HALF_WIDTH * pw
    mask |= (np.abs(xs - cx) <= aw) & (ys >= cy)
    return mask


def _hand_position(path, t: int) -> tuple[float, float]:
    """Piecewise-linear interpolation of the palm center, clamped at ends."""
    if t <= path[0][0]:
        return path[0][1]
    if t >= path[-1][0]:
        return path[-1][1]
    for (t0, p0), (t1, p1) in zip(path, path[1:]):
        if t0 <= t <= t1:
            if t1 == t0:
                return p1
            w = (t - t0) / (t1 - t0)
            return (p0[0] + w * (p1[0] - p0[0]), p0[1] + w * (p1[1] - p0[1]))
    return path[-1][1]


def render_scene(spec: SceneSpec, t: int) -> tuple[np.ndarray, SceneTruth]:
    """Render frame t of the scene; deterministic given (spec, t).

    Page content (paper tone, ink, hand) is splatted forward through the
    quad map with a 2x2 subsample grid per page pixel; camera pixels
    average the samples they receive. The lighting gradient and seeded
    Gaussian noise apply to the whole camera frame, rounded half-up once.
    """
    ph, pw = spec.page_ink.shape
    fw, fh = spec.frame_width, spec.frame_height

    page = np.full((ph, pw), float(spec.paper_intensity))
    page[spec.page_ink] = float(spec.ink_intensity)
    occlusion = hand_mask(spec, t)
    page[occlusion] = float(HAND_INTENSITY)

    m = unit_square_to_quad(spec.true_quad)
    ys = np.arange(ph, dtype=np.float64)[:, None]
    xs = np.arange(pw, dtype=np.float64)[None, :]
    sums = np.zeros(fh * fw)
    counts = np.zeros(fh * fw)
    values = page.ravel()
    for oy in (-0.25, 0.25):
        for ox in (-0.25, 0.25):
            u = (xs + ox) / pw
            v = (ys + oy) / ph
            den = m[2, 0] * u + m[2, 1] * v + m[2, 2]
            cx = (m[0, 0] * u + m[0, 1] * v + m[0, 2]) / den
            cy = (m[1, 0] * u + m[1, 1] * v + m[1, 2]) / den
            ix = np.floor(cx + 0.5).astype(np.int64).ravel()
            iy = np.floor(cy + 0.5).astype(np.int64).ravel()
            ok = (ix >= 0) & (ix < fw) & (iy >= 0) & (iy < fh)
            flat = iy[ok] * fw + ix[ok]
            sums += np.bincount(flat, weights=values[ok], minlength=fh * fw)
            counts += np.bincount(flat, minlength=fh * fw)

    frame = np.full(fh * fw, float(spec.bg_intensity))
    hit = counts > 0
    frame[hit] = sums[hit] / counts[hit]
    frame = frame.reshape(fh, fw)

    if spec.light_gradient != 0.0:
        ramp = np.arange(fw, dtype=np.float64) / (fw - 1) - 0.5
        frame = frame + spec.light_gradient * ramp[None, :]
    if spec.noise_sigma > 0.0:
        rng = np.random.default_rng((spec.seed, t))
        frame = frame + rng.standard_normal((fh, fw)) * spec.noise_sigma

    frame = np.clip(np.floor(frame + 0.5), 0.0, 255.0).astype(np.uint8)
    truth = SceneTruth(quad=spec.true_quad, ink=spec.page_ink.copy(),
                       occlusion=occlusion)
    return frame, truth


def generate_ink(page_width: int, page_height: int, strokes: int,
                 stroke_width: float, seed: int) -> np.ndarray:
    """Random marker-pen strokes: seeded polylines stamped with a disk."""
    rng = np.random.default_rng(seed)
    mask = np.zeros((page_height, page_width), dtype=bool)
    margin = 0.12
    r = stroke_width / 2.0
    ys = np.arange(page_height, dtype=np.float64)[:, None]
    xs = np.arange(page_width, dtype=np.float64)[None, :]
    for _ in range(strokes):
        n = int(rng.integers(2, 5))
        px = rng.uniform(margin * page_width, (1 - margin) * page_width, n + 1)
        py = rng.uniform(margin * page_height, (1 - margin) * page_height, n + 1)
        for i in range(n):
            x0, y0, x1, y1 = px[i], py[i], px[i + 1], py[i + 1]
            length = float(np.hypot(x1 - x0, y1 - y0))
            steps = max(2, int(length / max(1.0, r * 0.6)))
            for s in np.linspace(0.0, 1.0, steps):
                cx = x0 + s * (x1 - x0)
                cy = y0 + s * (y1 - y0)
                x_lo = max(0, int(cx - r - 1))
                x_hi = min(page_width, int(cx + r + 2))
                y_lo = max(0, int(cy - r - 1))
                y_hi = min(page_height, int(cy + r + 2))
                patch = ((xs[:, x_lo:x_hi] - cx) ** 2
                         + (ys[y_lo:y_hi] - cy) ** 2) <= r * r
                mask[y_lo:y_hi, x_lo:x_hi] |= patch
    return mask


def tilted_quad(frame_width: int, frame_height: int, tilt: float = 0.45,
                cx: float = 0.5, cy: float = 0.52, scale: float = 0.78,
                skew: float = 0.0) -> OrderedQuad:
    """Foreshortened trapezoid like a sheet seen from a tilted webcam.

    ``tilt`` shrinks the far (top) edge, mimicking a lid tilted toward
    45 degrees; ``skew`` shifts the top edge sideways.
    """
    w = scale * frame_width
    h = scale * frame_height
    top_w = w * (1.0 - tilt * 0.5)
    x_c = cx * frame_width
    y_c = cy * frame_height
    dx = skew * w
    return OrderedQuad(np.array([
        (x_c - top_w / 2 + dx, y_c - h / 2),
        (x_c + top_w / 2 + dx, y_c - h / 2),
        (x_c + w / 2, y_c + h / 2),
        (x_c - w / 2, y_c + h / 2),
    ]))


def scene_to_ini(spec: SceneSpec, ink_params: dict, path) -> None:
    """Write a scene fixture in the pipeline's key/value config format.

    Page ink is stored as its generator parameters (see ``generate_ink``),
    not as raw pixels, so fixtures stay small text files.
    """
    cp = configparser.ConfigParser()
    cp["scene"] = {
        "bg_intensity": str(spec.bg_intensity),
        "paper_intensity": str(spec.paper_intensity),
        "ink_intensity": str(spec.ink_intensity),
        "light_gradient": repr(spec.light_gradient),
        "noise_sigma": repr(spec.noise_sigma),
        "seed": str(spec.seed),
        "frame_width": str(spec.frame_width),
        "frame_height": str(spec.frame_height),
    }
    cp["quad"] = {
        name: f"{p[0]!r}, {p[1]!r}"
        for name, p in zip(("tl", "tr", "br", "bl"), spec.true_quad.pts)
    }
    cp["ink"] = {k: repr(v) for k, v in ink_params.items()}
    if spec.hand_path:
        cp["hand"] = {
            f"at_{t}": f"{p[0]!r}, {p[1]!r}" for t, p in spec.hand_path
        }
    with open(path, "w") as fh:
        cp.write(fh)


def scene_from_ini(path) -> SceneSpec:
    """Load a scene fixture written by ``scene_to_ini``."""
    cp = configparser.ConfigParser()
    with open(path) as fh:
        cp.read_file(fh)
    sc = cp["scene"]
    ink = cp["ink"]
    page_ink = generate_ink(
        int(ink["page_width"]), int(ink["page_height"]),
        int(ink["strokes"]), float(ink["stroke_width"]), int(ink["seed"]))
    quad = OrderedQuad(np.array([
        [float(v) for v in cp["quad"][name].split(",")]
        for name in ("tl", "tr", "br", "bl")
    ]))
    hand_path = []
    if cp.has_section("hand"):
        for key, value in cp["hand"].items():
            t = int(key.split("_", 1)[1])
            x, y = (float(v) for v in value.split(","))
            hand_path.append((t, (x, y)))
        hand_path.sort()
    return SceneSpec(
        page_ink=page_ink,
        true_quad=quad,
        bg_intensity=int(sc["bg_intensity"]),
        paper_intensity=int(sc["paper_intensity"]),
        ink_intensity=int(sc["ink_intensity"]),
        light_gradient=float(sc["light_gradient"]),
        noise_sigma=float(sc["noise_sigma"]),
        seed=int(sc["seed"]),
        frame_width=int(sc["frame_width"]),
        frame_height=int(sc["frame_height"]),
        hand_path=tuple(hand_path),
    )
