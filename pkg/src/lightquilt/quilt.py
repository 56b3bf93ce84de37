"""Quilt assembly: N x M grids of sequential views.

View ``v`` sits in column ``v % cols`` and in grid row ``v // cols``
counted from the *bottom* of the raster, so view 0 is the bottom-left
tile and the last view is the top-right one.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    IndexOutOfRange,
    InvalidValue,
    TileDimensionMismatch,
    WrongViewCount,
)


@dataclass(frozen=True)
class QuiltSpec:
    grid_cols: int
    grid_rows: int
    tile_width_px: int
    tile_height_px: int

    def __post_init__(self):
        for name in ("grid_cols", "grid_rows", "tile_width_px", "tile_height_px"):
            if getattr(self, name) < 1:
                raise InvalidValue(name, "must be a positive integer")

    @property
    def total_views(self) -> int:
        return self.grid_cols * self.grid_rows

    @property
    def width(self) -> int:
        return self.grid_cols * self.tile_width_px

    @property
    def height(self) -> int:
        return self.grid_rows * self.tile_height_px

    def tile_origin(self, v: int) -> tuple[int, int]:
        """Top-left raster (x, y) of view ``v``'s tile."""
        if not 0 <= v < self.total_views:
            raise IndexOutOfRange(f"view {v} outside [0, {self.total_views})")
        col = v % self.grid_cols
        row_from_bottom = v // self.grid_cols
        return col * self.tile_width_px, (self.grid_rows - 1 - row_from_bottom) * self.tile_height_px


def _check_quilt(quilt, spec):
    if quilt.shape[:2] != (spec.height, spec.width):
        raise DimensionMismatch(
            f"quilt is {quilt.shape[1]}x{quilt.shape[0]}, spec expects {spec.width}x{spec.height}"
        )


def assemble_quilt(views, spec: QuiltSpec) -> np.ndarray:
    views = list(views)
    if len(views) != spec.total_views:
        raise WrongViewCount(f"expected {spec.total_views} views, got {len(views)}")
    first = np.asarray(views[0])
    out = np.empty((spec.height, spec.width) + first.shape[2:], dtype=first.dtype)
    for v, view in enumerate(views):
        view = np.asarray(view)
        if view.shape[:2] != (spec.tile_height_px, spec.tile_width_px) or view.shape != first.shape:
            raise TileDimensionMismatch(
                f"view {v} is {view.shape}, expected tiles of "
                f"{spec.tile_width_px}x{spec.tile_height_px}"
            )
        x0, y0 = spec.tile_origin(v)
        out[y0:y0 + spec.tile_height_px, x0:x0 + spec.tile_width_px] = view
    return out


def extract_tile(quilt: np.ndarray, spec: QuiltSpec, v: int) -> np.ndarray:
    if not 0 <= v < spec.total_views:
        raise IndexOutOfRange(f"view {v} outside [0, {spec.total_views})")
    _check_quilt(quilt, spec)
    x0, y0 = spec.tile_origin(v)
    return quilt[y0:y0 + spec.tile_height_px, x0:x0 + spec.tile_width_px].copy()


def split_quilt(quilt: np.ndarray, spec: QuiltSpec) -> list[np.ndarray]:
    _check_quilt(quilt, spec)
    return [extract_tile(quilt, spec, v) for v in range(spec.total_views)]


_NAME_RE = re.compile(r"_qs(\d+)x(\d+)$")


def quilt_filename(name: str, spec: QuiltSpec) -> str:
    return f"{name}_qs{spec.grid_cols}x{spec.grid_rows}.png"


def parse_quilt_filename(filename: str) -> tuple[int, int] | None:
    """Grid (cols, rows) encoded in a ``<name>_qsNxM.png`` file name, if any."""
    stem = filename.rsplit("/", 1)[-1]
    if stem.lower().endswith(".png"):
        stem = stem[:-4]
    m = _NAME_RE.search(stem)
    if m is None:
        return None
    return int(m.group(1)), int(m.group(2))
