"""Build a lookup table once, then render native frames from quilts with it."""

import tempfile
import time
from pathlib import Path

import numpy as np

from lightquilt import build_lut, load_lut, parse_calibration, render_native_direct, render_native_lut, save_lut
from lightquilt.quilt import QuiltSpec, assemble_quilt

# calibration as exported by the device; vendor files wrap numbers in {"value": ...}
profile = parse_calibration("""{
    "pitch": {"value": 52.0}, "slope": {"value": -7.2}, "center": {"value": 0.15},
    "screenW": {"value": 1536}, "screenH": {"value": 2048}, "flipX": {"value": 0}
}""")
spec = QuiltSpec(grid_cols=6, grid_rows=8, tile_width_px=560, tile_height_px=420)

t0 = time.perf_counter()
table = build_lut(profile, spec)
print(f"table built in {time.perf_counter() - t0:.2f}s")

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "portrait.map"
    save_lut(table, path)
    print(path.stat().st_size, "bytes on disk")
    table = load_lut(path)

# each tile is flat-coloured by its view index, so the native shows the lens pattern
ramp = np.linspace(0, 255, spec.total_views).astype(np.uint8)
views = [np.full((420, 560, 3), (v, 255 - v, 128), np.uint8) for v in ramp]
quilt = assemble_quilt(views, spec)

t0 = time.perf_counter()
native = render_native_lut(quilt, table)
lut_s = time.perf_counter() - t0
t0 = time.perf_counter()
direct = render_native_direct(quilt, profile, spec)
direct_s = time.perf_counter() - t0

print(native.shape, np.array_equal(native, direct))
print(f"lut {lut_s * 1000:.0f} ms vs direct {direct_s * 1000:.0f} ms")
