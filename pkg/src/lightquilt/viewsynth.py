"""Novel views from one image and its relative depth.

Two generators are provided:

``fast``
    Each view is a backward remap of the source where a pixel's horizontal
    displacement is ``depth * offset``. Bilinear sampling means no holes
    are ever produced.
``real``
    A pinhole camera model: pixels are lifted to 3-D with the source
    intrinsics and pose, the camera is translated by ``offset`` along x
    and points are forward-splatted into the virtual view with a z-buffer.
    Dis-occluded pixels are inpainted and median filtered.

In both paths a positive offset moves content to the right and views are
ordered by increasing offset, the source image sitting in the middle.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .errors import DimensionMismatch, InvalidDepthRange, InvalidFov, InvalidValue
from .imagecore import REPLICATE, CoordMap, as_image, median_filter, remap
from .inpaint import telea_inpaint

DEFAULT_DEPTH_RANGE = (1.0, 10.0)


@dataclass(frozen=True)
class Intrinsics:
    fx: float
    fy: float
    cx: float
    cy: float

    def __post_init__(self):
        if not (self.fx > 0 and self.fy > 0):
            raise InvalidValue("intrinsics", "focal lengths must be positive")

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.fx, 0.0, self.cx], [0.0, self.fy, self.cy], [0.0, 0.0, 1.0]])

    @classmethod
    def from_fov(cls, fov_deg: float, width: int, height: int) -> "Intrinsics":
        f = estimate_focal(fov_deg, width)
        return cls(f, f, (width - 1) / 2.0, (height - 1) / 2.0)


@dataclass(frozen=True)
class Pose:
    """World-to-camera extrinsics: ``x_cam = rotation @ x_world + translation``."""

    rotation: np.ndarray = field(default_factory=lambda: np.eye(3))
    translation: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        r = np.asarray(self.rotation, dtype=np.float64)
        t = np.asarray(self.translation, dtype=np.float64).reshape(3)
        if r.shape != (3, 3):
            raise InvalidValue("rotation", "must be 3x3")
        if not np.allclose(r.T @ r, np.eye(3), rtol=0, atol=1e-9) or abs(np.linalg.det(r) - 1) > 1e-9:
            raise InvalidValue("rotation", "must be orthonormal with determinant +1")
        object.__setattr__(self, "rotation", r)
        object.__setattr__(self, "translation", t)

    def compose(self, rotation, translation) -> "Pose":
        """Pose obtained by applying ``[rotation | translation]`` after this one."""
        r = np.asarray(rotation, dtype=np.float64)
        t = np.asarray(translation, dtype=np.float64)
        return Pose(r @ self.rotation, r @ self.translation + t)


@dataclass(frozen=True)
class ViewRequest:
    total_views: int
    max_offset: float
    mode: str = "fast"
    reverse: bool = False

    def __post_init__(self):
        if self.total_views < 1:
            raise InvalidValue("views", "must be >= 1")
        if not math.isfinite(self.max_offset):
            raise InvalidValue("max_offset", "must be finite")
        if self.mode not in ("fast", "real"):
            raise InvalidValue("mode", f"unknown mode {self.mode!r}")


def view_offsets(total_views: int, max_offset: float) -> list[float]:
    """Linear, symmetric ramp of offsets from ``-max_offset`` to ``+max_offset``."""
    if total_views == 1:
        return [0.0]
    half = (total_views - 1) / 2.0
    return [max_offset * (v - half) / half for v in range(total_views)]


def _check_pair(image, depth):
    image = as_image(image)
    depth = np.asarray(depth, dtype=np.float64)
    if depth.shape != image.shape[:2]:
        raise DimensionMismatch(f"depth {depth.shape} does not match image {image.shape[:2]}")
    return image, depth


def _fan_out(fn, items, workers):
    if workers > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


# ---------------------------------------------------------------- fast


def fast_map_from_depth(depth: np.ndarray, offset: float) -> CoordMap:
    depth = np.asarray(depth, dtype=np.float64)
    rows, cols = np.mgrid[0:depth.shape[0], 0:depth.shape[1]].astype(np.float64)
    return CoordMap(src_x=cols - depth * offset, src_y=rows)


def fast_view(image, depth, offset: float) -> np.ndarray:
    return remap(image, fast_map_from_depth(depth, offset), REPLICATE)


def synthesize_fast(image, depth, request: ViewRequest, workers: int = 1) -> list[np.ndarray]:
    image, depth = _check_pair(image, depth)
    offsets = view_offsets(request.total_views, request.max_offset)
    if request.reverse:
        offsets = offsets[::-1]
    return _fan_out(lambda o: fast_view(image, depth, o), offsets, workers)


# ---------------------------------------------------------------- real


def estimate_focal(fov_deg: float, image_width_px: int) -> float:
    """Pinhole focal length in pixels for a horizontal field of view."""
    if not 0 < fov_deg < 180:
        raise InvalidFov(f"field of view must be in (0, 180) degrees, got {fov_deg}")
    return (image_width_px / 2.0) / math.tan(fov_deg * math.pi / 360.0)


def metric_depth(depth: np.ndarray, depth_range=DEFAULT_DEPTH_RANGE) -> np.ndarray:
    """Map relative depth (1 = near) linearly onto ``[z_near, z_far]``."""
    z_near, z_far = depth_range
    if not (0 < z_near < z_far):
        raise InvalidDepthRange(f"need 0 < z_near < z_far, got {depth_range}")
    return z_far + np.asarray(depth, dtype=np.float64) * (z_near - z_far)


def real_view(
    image,
    depth,
    offset: float,
    intrinsics: Intrinsics,
    pose: Pose | None = None,
    virtual_intrinsics: Intrinsics | None = None,
    depth_range=DEFAULT_DEPTH_RANGE,
):
    """Forward-warp ``image`` to a camera translated by ``offset`` along x.

    Returns ``(view, hole_mask)``; hole pixels received no source sample
    and are left black.
    """
    image, depth = _check_pair(image, depth)
    pose = pose or Pose()
    virtual_intrinsics = virtual_intrinsics or intrinsics
    z_cam = metric_depth(depth, depth_range)
    h, w = depth.shape

    virtual = pose.compose(np.eye(3), np.array([offset, 0.0, 0.0]))

    v, u = np.mgrid[0:h, 0:w].astype(np.float64)
    k = intrinsics
    cam_src = np.stack([(u - k.cx) / k.fx * z_cam, (v - k.cy) / k.fy * z_cam, z_cam], axis=-1).reshape(-1, 3)
    world = (cam_src - pose.translation) @ pose.rotation  # R^T (x - t), row-vector form
    cam_dst = world @ virtual.rotation.T + virtual.translation

    zv = cam_dst[:, 2]
    with np.errstate(divide="ignore", invalid="ignore"):
        uu = virtual_intrinsics.fx * cam_dst[:, 0] / zv + virtual_intrinsics.cx
        vv = virtual_intrinsics.fy * cam_dst[:, 1] / zv + virtual_intrinsics.cy
    ok = (zv > 0) & np.isfinite(uu) & np.isfinite(vv)
    du = np.floor(uu[ok] + 0.5)
    dv = np.floor(vv[ok] + 0.5)
    inside = (du >= 0) & (du < w) & (dv >= 0) & (dv < h)
    src = np.flatnonzero(ok)[inside]
    dest = dv[inside].astype(np.int64) * w + du[inside].astype(np.int64)
    z = zv[src]

    # nearest depth wins; ties go to the lower source index
    order = np.lexsort((src, z, dest))
    dest, src = dest[order], src[order]
    first = np.ones(dest.size, dtype=bool)
    first[1:] = dest[1:] != dest[:-1]

    out = np.zeros_like(image).reshape(-1, 3)
    out[dest[first]] = image.reshape(-1, 3)[src[first]]
    holes = np.ones(h * w, dtype=bool)
    holes[dest[first]] = False
    return out.reshape(image.shape), holes.reshape(h, w)


def clean_view(view, holes, inpaint_radius: int = 3, median_radius: int = 1) -> np.ndarray:
    """Inpaint the holes, then median filter the repaired region."""
    if not holes.any():
        return view
    filled = telea_inpaint(view, holes, inpaint_radius)
    if median_radius < 1:
        return filled
    k = 2 * median_radius + 1
    region = ndimage.binary_dilation(holes, structure=np.ones((k, k), dtype=bool))
    smoothed = median_filter(filled, median_radius)
    return np.where(region[..., None], smoothed, filled)


def synthesize_real(
    image,
    depth,
    request: ViewRequest,
    intrinsics: Intrinsics,
    pose: Pose | None = None,
    virtual_intrinsics: Intrinsics | None = None,
    depth_range=DEFAULT_DEPTH_RANGE,
    inpaint_radius: int = 3,
    median_radius: int = 1,
    workers: int = 1,
    return_masks: bool = False,
):
    """Views for every offset of the ramp, produced as symmetric +/- pairs."""
    image, depth = _check_pair(image, depth)
    metric_depth(depth[:1, :1], depth_range)  # validate the range before doing any work
    n = request.total_views
    offsets = view_offsets(n, request.max_offset)
    views: list = [None] * n
    masks: list = [None] * n
    if n % 2:
        views[n // 2] = image.copy()
        masks[n // 2] = np.zeros(image.shape[:2], dtype=bool)

    jobs = []
    for i in range(n // 2):
        hi = n - 1 - i
        jobs.append((hi, offsets[hi]))
        jobs.append((i, -offsets[hi]))

    def run(job):
        idx, off = job
        view, holes = real_view(image, depth, off, intrinsics, pose, virtual_intrinsics, depth_range)
        return idx, clean_view(view, holes, inpaint_radius, median_radius), holes

    for idx, view, holes in _fan_out(run, jobs, workers):
        views[idx] = view
        masks[idx] = holes
    if request.reverse:
        views, masks = views[::-1], masks[::-1]
    return (views, masks) if return_masks else views
