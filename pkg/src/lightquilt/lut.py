"""Subpixel-to-quilt lookup tables for slanted lenticular panels.

Each color subpixel of the native panel shows one of the quilt's views.
Which one is decided by the lens phase under that subpixel::

    phase = mod(i - center - subp * j * slope, pitch)
    view  = total_views * phase / pitch

with ``i`` the subpixel column and ``j`` the panel row. The table stores,
for every native pixel and color channel, the quilt pixel to read, so that
rendering reduces to one gather per subpixel.

``.map`` layout (little-endian)::

    8 bytes   magic b"A3DLUT01"
    6 x u32   native_w, native_h, quilt_w, quilt_h, grid_cols, grid_rows
    3 x       R, G, B matrices, native_h rows of native_w (x, y) u16 pairs
"""

from __future__ import annotations

import hashlib
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .calibration import CalibrationProfile, serialize_calibration
from .errors import BadMagic, DimensionMismatch, QuiltTooLarge, TruncatedFile
from .quilt import QuiltSpec

MAGIC = b"A3DLUT01"
_HEADER = struct.Struct("<8s6I")
HEADER_SIZE = _HEADER.size  # 32
_ROW_CHUNK = 256


def view_fraction(i, j, profile: CalibrationProfile, total_views: int):
    """Fractional view number in ``[0, total_views)`` for subpixel column ``i``, row ``j``.

    Works on scalars or broadcastable arrays. The modulo is Euclidean so
    negative phases wrap into ``[0, pitch)``.
    """
    pitch = profile.pitch_px
    arg = i - profile.center_offset - profile.subpixels_per_pixel * j * profile.slope
    phase = np.mod(arg, pitch)
    # mod of a tiny negative number can round up to exactly `pitch`
    phase = np.where(phase >= pitch, 0.0, phase)
    frac = total_views * phase / pitch
    if np.ndim(frac) == 0:
        return float(frac)
    return frac


def view_index(frac, profile: CalibrationProfile, total_views: int):
    """Quantize fractional view numbers to integer view indices."""
    k = np.clip(np.floor(frac).astype(np.int64), 0, total_views - 1)
    if profile.flip_x:
        k = total_views - 1 - k
    return k


def tile_positions(spec: QuiltSpec, native_w: int, native_h: int, col, row):
    """Pixel inside a tile that native pixel (col, row) maps to (nearest pixel center)."""
    tile_x = ((2 * col + 1) * spec.tile_width_px) // (2 * native_w)
    tile_y = ((2 * row + 1) * spec.tile_height_px) // (2 * native_h)
    return tile_x, tile_y


def tile_offsets(spec: QuiltSpec, k):
    """Quilt raster origin (x, y) of view ``k``'s tile, vectorized over ``k``."""
    col = k % spec.grid_cols
    row_from_bottom = k // spec.grid_cols
    return col * spec.tile_width_px, (spec.grid_rows - 1 - row_from_bottom) * spec.tile_height_px


def quilt_coordinates(profile: CalibrationProfile, spec: QuiltSpec, row_start: int, row_stop: int):
    """Quilt source coordinates for native rows ``[row_start, row_stop)``.

    Returns ``(xq, yq)``, each of shape ``(3, rows, native_w)`` with int64
    entries, channel-major in R, G, B order.
    """
    width, height = profile.native_size
    sub = profile.subpixels_per_pixel
    col = np.arange(width, dtype=np.int64)
    row = np.arange(row_start, row_stop, dtype=np.int64)
    j = (height - 1 - row) if profile.flip_y else row
    tile_x, tile_y = tile_positions(spec, width, height, col, row)

    xq = np.empty((3, row_stop - row_start, width), dtype=np.int64)
    yq = np.empty_like(xq)
    for c in range(3):
        i = (sub * col + c).astype(np.float64)
        frac = view_fraction(i[None, :], j.astype(np.float64)[:, None], profile, spec.total_views)
        k = view_index(frac, profile, spec.total_views)
        ox, oy = tile_offsets(spec, k)
        xq[c] = ox + tile_x[None, :]
        yq[c] = oy + tile_y[:, None]
    return xq, yq


@dataclass(eq=False)
class LookupTable:
    native_width_px: int
    native_height_px: int
    quilt_width_px: int
    quilt_height_px: int
    grid_cols: int
    grid_rows: int
    channels: np.ndarray  # (3, native_h, 2 * native_w) uint16, interleaved x, y
    _flat: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        expected = (3, self.native_height_px, 2 * self.native_width_px)
        if self.channels.shape != expected:
            raise DimensionMismatch(f"channel matrices are {self.channels.shape}, expected {expected}")
        if self.channels.dtype != np.uint16:
            raise DimensionMismatch(f"channel matrices must be uint16, got {self.channels.dtype}")

    @property
    def xs(self) -> np.ndarray:
        return self.channels[:, :, 0::2]

    @property
    def ys(self) -> np.ndarray:
        return self.channels[:, :, 1::2]

    def flat_index(self) -> np.ndarray:
        """Flat indices into an ``(quilt_h, quilt_w, 3)`` raster, shape ``(native_h, native_w, 3)``.

        Computed once and cached; the table itself is never mutated.
        """
        if self._flat is None:
            xs = self.xs.astype(np.intp)
            ys = self.ys.astype(np.intp)
            chan = np.arange(3, dtype=np.intp)[:, None, None]
            flat = (ys * self.quilt_width_px + xs) * 3 + chan
            self._flat = np.ascontiguousarray(np.moveaxis(flat, 0, -1))
        return self._flat

    def header(self) -> tuple[int, ...]:
        return (
            self.native_width_px,
            self.native_height_px,
            self.quilt_width_px,
            self.quilt_height_px,
            self.grid_cols,
            self.grid_rows,
        )

    def __eq__(self, other):
        if not isinstance(other, LookupTable):
            return NotImplemented
        return self.header() == other.header() and np.array_equal(self.channels, other.channels)


def build_lut(profile: CalibrationProfile, spec: QuiltSpec, workers: int = 1) -> LookupTable:
    """Precompute the lookup table for one device and quilt layout."""
    if spec.width >= 65536 or spec.height >= 65536:
        raise QuiltTooLarge(f"quilt {spec.width}x{spec.height} does not fit 16-bit coordinates")
    width, height = profile.native_size
    channels = np.empty((3, height, 2 * width), dtype=np.uint16)

    def fill(start):
        stop = min(start + _ROW_CHUNK, height)
        xq, yq = quilt_coordinates(profile, spec, start, stop)
        channels[:, start:stop, 0::2] = xq
        channels[:, start:stop, 1::2] = yq

    starts = range(0, height, _ROW_CHUNK)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(fill, starts))
    else:
        for start in starts:
            fill(start)
    return LookupTable(width, height, spec.width, spec.height, spec.grid_cols, spec.grid_rows, channels)


def serialize_lut(table: LookupTable) -> bytes:
    head = _HEADER.pack(MAGIC, *table.header())
    return head + table.channels.astype("<u2", copy=False).tobytes(order="C")


def deserialize_lut(data: bytes) -> LookupTable:
    if len(data) < len(MAGIC) or data[: len(MAGIC)] != MAGIC:
        raise BadMagic("not a lookup table file (bad magic)")
    if len(data) < HEADER_SIZE:
        raise TruncatedFile("lookup table header is truncated")
    _, nw, nh, qw, qh, cols, rows = _HEADER.unpack_from(data)
    if min(nw, nh, qw, qh, cols, rows) == 0:
        raise DimensionMismatch("lookup table header contains a zero dimension")
    expected = 3 * nh * 2 * nw * 2
    payload = len(data) - HEADER_SIZE
    if payload < expected:
        raise TruncatedFile(f"expected {expected} payload bytes, found {payload}")
    if payload > expected:
        raise DimensionMismatch(f"expected {expected} payload bytes, found {payload}")
    channels = np.frombuffer(data, dtype="<u2", offset=HEADER_SIZE).reshape(3, nh, 2 * nw)
    channels = channels.astype(np.uint16)
    if qw % cols or qh % rows:
        raise DimensionMismatch("quilt size is not a whole number of tiles")
    if channels[:, :, 0::2].max(initial=0) >= qw or channels[:, :, 1::2].max(initial=0) >= qh:
        raise DimensionMismatch("table addresses pixels outside the quilt")
    return LookupTable(nw, nh, qw, qh, cols, rows, channels)


def save_lut(table: LookupTable, path) -> None:
    Path(path).write_bytes(serialize_lut(table))


def load_lut(path) -> LookupTable:
    return deserialize_lut(Path(path).read_bytes())


def check_lut_matches(table: LookupTable, profile: CalibrationProfile, spec: QuiltSpec) -> None:
    """Reject a table whose header disagrees with the requested configuration."""
    expected = (*profile.native_size, spec.width, spec.height, spec.grid_cols, spec.grid_rows)
    if table.header() != expected:
        raise DimensionMismatch(f"stale lookup table: header {table.header()} != expected {expected}")


def lut_cache_key(profile: CalibrationProfile, spec: QuiltSpec) -> str:
    """Content hash identifying the table for a (calibration, quilt layout) pair."""
    h = hashlib.sha256()
    h.update(serialize_calibration(profile).encode())
    h.update(repr((spec.grid_cols, spec.grid_rows, spec.tile_width_px, spec.tile_height_px)).encode())
    return h.hexdigest()[:16]
