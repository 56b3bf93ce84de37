"""Raster primitives: RGB images, bilinear remapping, median filtering, PNG I/O.

Images are ``(height, width, 3)`` uint8 arrays in RGB order.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image as PILImage
from scipy import ndimage

from .errors import DimensionMismatch, EmptyImage, InvalidValue, UnreadableInput


@dataclass(frozen=True)
class CoordMap:
    """Destination-indexed source coordinates: ``out[r, c] = src(src_y[r, c], src_x[r, c])``."""

    src_x: np.ndarray
    src_y: np.ndarray

    def __post_init__(self):
        if self.src_x.shape != self.src_y.shape or self.src_x.ndim != 2:
            raise DimensionMismatch(f"src_x {self.src_x.shape} and src_y {self.src_y.shape} differ")

    @property
    def width(self) -> int:
        return self.src_x.shape[1]

    @property
    def height(self) -> int:
        return self.src_x.shape[0]

    @classmethod
    def identity(cls, width: int, height: int) -> "CoordMap":
        ys, xs = np.mgrid[0:height, 0:width].astype(np.float64)
        return cls(xs, ys)


@dataclass(frozen=True)
class BorderPolicy:
    mode: str = "replicate"  # or "constant"
    fill: tuple[int, int, int] = (0, 0, 0)

    def __post_init__(self):
        if self.mode not in ("replicate", "constant"):
            raise InvalidValue("border", f"unknown mode {self.mode!r}")
        if len(self.fill) != 3 or any(not 0 <= v <= 255 for v in self.fill):
            raise InvalidValue("border", f"fill must be three values in [0, 255], got {self.fill}")


REPLICATE = BorderPolicy("replicate")
CONSTANT_BLACK = BorderPolicy("constant", (0, 0, 0))


def as_image(arr) -> np.ndarray:
    arr = np.asarray(arr)
    if arr.size == 0:
        raise EmptyImage("image has no pixels")
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise DimensionMismatch(f"expected an (H, W, 3) image, got shape {arr.shape}")
    return arr


def to_uint8(values: np.ndarray) -> np.ndarray:
    """Round half away from zero and saturate to 8 bits."""
    return np.clip(np.sign(values) * np.floor(np.abs(values) + 0.5), 0, 255).astype(np.uint8)


def bilinear_sample(src: np.ndarray, src_x: np.ndarray, src_y: np.ndarray, border: BorderPolicy = REPLICATE):
    """Bilinearly sample ``src`` (H, W) or (H, W, C) at real coordinates; returns float64."""
    h, w = src.shape[:2]
    data = src.astype(np.float64, copy=False)
    x0 = np.floor(src_x)
    y0 = np.floor(src_y)
    fx = src_x - x0
    fy = src_y - y0
    x0 = x0.astype(np.int64)
    y0 = y0.astype(np.int64)
    if data.ndim == 3:
        fx = fx[..., None]
        fy = fy[..., None]

    def tap(yi, xi):
        if border.mode == "replicate":
            return data[np.clip(yi, 0, h - 1), np.clip(xi, 0, w - 1)]
        inside = (xi >= 0) & (xi < w) & (yi >= 0) & (yi < h)
        vals = data[np.clip(yi, 0, h - 1), np.clip(xi, 0, w - 1)]
        fill = np.asarray(border.fill, dtype=np.float64)
        if data.ndim == 2:
            fill = fill[0]
        else:
            inside = inside[..., None]
        return np.where(inside, vals, fill)

    top = (1 - fx) * tap(y0, x0) + fx * tap(y0, x0 + 1)
    bottom = (1 - fx) * tap(y0 + 1, x0) + fx * tap(y0 + 1, x0 + 1)
    return (1 - fy) * top + fy * bottom


def remap(src, cmap: CoordMap, border: BorderPolicy = REPLICATE) -> np.ndarray:
    """Inverse-map ``src`` through ``cmap`` with bilinear interpolation."""
    src = as_image(src)
    return to_uint8(bilinear_sample(src, cmap.src_x, cmap.src_y, border))


def resize_bilinear(values: np.ndarray, width: int, height: int) -> np.ndarray:
    """Resample a 2-D real array to ``(height, width)`` using pixel-center alignment."""
    h, w = values.shape
    if (h, w) == (height, width):
        return values.astype(np.float64, copy=True)
    xs = (np.arange(width) + 0.5) * (w / width) - 0.5
    ys = (np.arange(height) + 0.5) * (h / height) - 0.5
    gx, gy = np.meshgrid(xs, ys)
    return bilinear_sample(values, gx, gy, REPLICATE)


def resize_image(img: np.ndarray, width: int, height: int) -> np.ndarray:
    img = as_image(img)
    h, w = img.shape[:2]
    if (h, w) == (height, width):
        return img.copy()
    xs = (np.arange(width) + 0.5) * (w / width) - 0.5
    ys = (np.arange(height) + 0.5) * (h / height) - 0.5
    gx, gy = np.meshgrid(xs, ys)
    return to_uint8(bilinear_sample(img, gx, gy, REPLICATE))


def median_filter(src, radius: int = 1) -> np.ndarray:
    """Per-channel median over a ``(2r+1)^2`` window with replicated borders."""
    src = as_image(src)
    if radius < 1:
        raise InvalidValue("radius", "must be >= 1")
    k = 2 * radius + 1
    return ndimage.median_filter(src, size=(k, k, 1), mode="nearest")


# ---------------------------------------------------------------- file I/O


def read_image(path) -> np.ndarray:
    try:
        with PILImage.open(path) as im:
            return np.array(im.convert("RGB"))
    except (OSError, ValueError) as exc:
        raise UnreadableInput(f"cannot read image {path}: {exc}") from exc


def write_image(path, img: np.ndarray) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    PILImage.fromarray(as_image(img).astype(np.uint8), "RGB").save(path, format="PNG")


def frame_name(index: int, prefix: str = "frame") -> str:
    return f"{prefix}_{index:06d}.png"


def list_pngs(directory) -> list[Path]:
    """PNG files in ``directory`` in lexicographic name order."""
    directory = Path(directory)
    if not directory.is_dir():
        raise UnreadableInput(f"not a directory: {directory}")
    return sorted(p for p in directory.iterdir() if p.suffix.lower() == ".png" and p.is_file())
