"""Quilt to native light-field rasters."""

from __future__ import annotations

import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .calibration import CalibrationProfile
from .errors import DimensionMismatch
from .lut import LookupTable, quilt_coordinates
from .quilt import QuiltSpec

_ROW_CHUNK = 256


def _row_chunks(height, workers, job):
    starts = range(0, height, _ROW_CHUNK)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(job, starts))
    else:
        for start in starts:
            job(start)


def render_native_lut(quilt: np.ndarray, table: LookupTable, workers: int = 1) -> np.ndarray:
    """Gather every native subpixel from the quilt through the lookup table."""
    if quilt.shape != (table.quilt_height_px, table.quilt_width_px, 3):
        raise DimensionMismatch(
            f"quilt is {quilt.shape}, table expects "
            f"({table.quilt_height_px}, {table.quilt_width_px}, 3)"
        )
    src = np.ascontiguousarray(quilt).reshape(-1)
    flat = table.flat_index()
    if workers <= 1:
        return src[flat]
    out = np.empty(flat.shape, dtype=quilt.dtype)

    def job(start):
        stop = start + _ROW_CHUNK
        np.take(src, flat[start:stop], out=out[start:stop])

    _row_chunks(table.native_height_px, workers, job)
    return out


def render_native_direct(
    quilt: np.ndarray, profile: CalibrationProfile, spec: QuiltSpec, workers: int = 1
) -> np.ndarray:
    """Reference renderer: evaluates the lens mapping per subpixel, no table."""
    if quilt.shape != (spec.height, spec.width, 3):
        raise DimensionMismatch(f"quilt is {quilt.shape}, spec expects ({spec.height}, {spec.width}, 3)")
    width, height = profile.native_size
    out = np.empty((height, width, 3), dtype=quilt.dtype)

    def job(start):
        stop = min(start + _ROW_CHUNK, height)
        xq, yq = quilt_coordinates(profile, spec, start, stop)
        for c in range(3):
            out[start:stop, :, c] = quilt[yq[c], xq[c], c]

    _row_chunks(height, workers, job)
    return out


@dataclass(frozen=True)
class BenchmarkReport:
    lut_ms: float
    direct_ms: float
    ratio: float
    iterations: int

    def csv(self) -> str:
        return f"{self.lut_ms:.3f},{self.direct_ms:.3f},{self.ratio:.3f}"


def benchmark_render(
    quilt: np.ndarray,
    table: LookupTable,
    profile: CalibrationProfile,
    spec: QuiltSpec,
    iterations: int = 5,
) -> BenchmarkReport:
    """Median wall time of the table-driven and direct renderers."""
    if iterations < 3:
        raise ValueError("iterations must be >= 3")
    table.flat_index()  # table load cost is not part of rendering
    lut_times, direct_times = [], []
    for _ in range(iterations):
        t0 = time.perf_counter()
        render_native_lut(quilt, table)
        t1 = time.perf_counter()
        render_native_direct(quilt, profile, spec)
        t2 = time.perf_counter()
        lut_times.append((t1 - t0) * 1e3)
        direct_times.append((t2 - t1) * 1e3)
    lut_ms = statistics.median(lut_times)
    direct_ms = statistics.median(direct_times)
    return BenchmarkReport(lut_ms, direct_ms, direct_ms / max(lut_ms, 1e-9), iterations)
