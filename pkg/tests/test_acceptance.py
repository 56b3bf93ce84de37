"""Acceptance criteria, one test per criterion.

Each test prints a ``PASS``/``FAIL`` line; the lines are repeated in the
terminal summary so they are visible without ``-s``.
"""

import math
import time

import numpy as np
import pytest

from conftest import measure_shift, random_image, smooth_texture
from lightquilt import imagecore
from lightquilt.calibration import CalibrationProfile
from lightquilt.depthio import FileDepth, depth_to_png
from lightquilt.inpaint import solve_eikonal_step, telea_inpaint, Label
from lightquilt.lut import HEADER_SIZE, build_lut, deserialize_lut, save_lut, serialize_lut
from lightquilt.nativerender import benchmark_render, render_native_direct, render_native_lut
from lightquilt.pipeline import frames_to_native_frames, photo_to_native
from lightquilt.quilt import QuiltSpec, assemble_quilt, extract_tile
from lightquilt.viewsynth import Intrinsics, ViewRequest, fast_view, real_view, synthesize_fast

RESULTS: list[str] = []


def verdict(number, title, ok, detail=""):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title}" + (f" ({detail})" if detail else "")
    RESULTS.append(line)
    print(line)
    assert ok, line


def random_profile(rng, native):
    return CalibrationProfile(
        pitch_px=float(rng.uniform(1.5, 120)),
        slope=float(rng.uniform(-12, 12)),
        center_offset=float(rng.uniform(-100, 100)),
        screen_width_px=native,
        screen_height_px=native,
        subpixels_per_pixel=int(rng.integers(1, 4)),
        flip_x=bool(rng.integers(2)),
        flip_y=bool(rng.integers(2)),
    )


def test_01_lut_matches_direct():
    rng = np.random.default_rng(101)
    t0 = time.perf_counter()
    mismatches = 0
    trials = 120
    for _ in range(trials):
        profile = random_profile(rng, 64)
        spec = QuiltSpec(int(rng.integers(1, 9)), int(rng.integers(1, 9)),
                         int(rng.integers(2, 48)), int(rng.integers(2, 48)))
        quilt = random_image(rng, spec.height, spec.width)
        lut = render_native_lut(quilt, build_lut(profile, spec))
        mismatches += not np.array_equal(lut, render_native_direct(quilt, profile, spec))
    elapsed = time.perf_counter() - t0
    verdict(1, "LUT render bit-identical to direct evaluation",
            mismatches == 0 and elapsed < 30, f"{trials} configs, {mismatches} mismatches, {elapsed:.1f}s")


def test_02_lut_speedup(portrait_profile, portrait_spec, portrait_table):
    rng = np.random.default_rng(102)
    t0 = time.perf_counter()
    quilt = random_image(rng, portrait_spec.height, portrait_spec.width)
    report = benchmark_render(quilt, portrait_table, portrait_profile, portrait_spec, iterations=5)
    elapsed = time.perf_counter() - t0
    verdict(2, "direct/LUT median time ratio >= 1.3 at portrait scale",
            report.ratio >= 1.3 and report.iterations >= 5 and elapsed < 120,
            f"lut={report.lut_ms:.1f}ms direct={report.direct_ms:.1f}ms ratio={report.ratio:.2f}")


def test_03_pipeline_dimensions(tmp_path, portrait_spec, portrait_table):
    rng = np.random.default_rng(103)
    imagecore.write_image(tmp_path / "photo.png", smooth_texture(rng, 420, 560))
    depth_to_png(rng.uniform(0, 1, (420, 560)), tmp_path / "depth.png")
    t0 = time.perf_counter()
    photo_to_native(tmp_path / "photo.png", FileDepth(tmp_path / "depth.png"), portrait_spec, portrait_table,
                    out_path=tmp_path / "native.png", quilt_out=tmp_path / "quilt.png")
    elapsed = time.perf_counter() - t0
    q = imagecore.read_image(tmp_path / "quilt.png").shape
    n = imagecore.read_image(tmp_path / "native.png").shape
    verdict(3, "560x420 photo -> 3360x3360 quilt, 1536x2048 native",
            q == (3360, 3360, 3) and n == (2048, 1536, 3) and elapsed < 60,
            f"quilt {q[1]}x{q[0]}, native {n[1]}x{n[0]}, {elapsed:.1f}s")


def test_04_parallax_law():
    rng = np.random.default_rng(104)
    img = smooth_texture(rng, 64, 200)
    worst = 0.0
    for d in (0.25, 0.5, 1.0):
        for o in (2, 5, 8):
            shifted = fast_view(img, np.full(img.shape[:2], d), float(o))
            worst = max(worst, abs(measure_shift(shifted, img) - d * o))
    verdict(4, "fast view shift equals depth x offset", worst <= 0.5, f"max error {worst:.3f}px over 9 cases")


def test_05_center_fidelity():
    rng = np.random.default_rng(105)
    trials, hits = 100, 0
    for _ in range(trials):
        n = 2 * int(rng.integers(0, 12)) + 1
        h, w = int(rng.integers(2, 40)), int(rng.integers(2, 40))
        img = random_image(rng, h, w)
        views = synthesize_fast(img, rng.uniform(0, 1, (h, w)), ViewRequest(n, float(rng.uniform(-40, 40))))
        hits += np.array_equal(views[n // 2], img)
    verdict(5, "odd view count: center view equals input", hits == trials, f"{hits}/{trials} trials")


def test_06_real_identity():
    rng = np.random.default_rng(106)
    img = random_image(rng, 60, 80)
    K = Intrinsics.from_fov(60, 80, 60)
    out, holes = real_view(img, rng.uniform(0, 1, (60, 80)), 0.0, K, virtual_intrinsics=K)
    verdict(6, "zero baseline reproduces the input with no holes",
            np.array_equal(out, img) and not holes.any(), f"{int(holes.sum())} hole pixels")


def test_07_disparity_law():
    rng = np.random.default_rng(107)
    img = smooth_texture(rng, 48, 200)
    K = Intrinsics(500.0, 500.0, 99.5, 23.5)
    plane = np.full((48, 200), 0.5)  # Z = 9 + 0.5 * (1 - 9) = 5
    out, _ = real_view(img, plane, 0.05, K, depth_range=(1.0, 9.0))
    disparity = measure_shift(out, img)

    step = np.zeros((20, 240))
    step[:, 110:170] = 1.0
    z_near, z_far, tx = 2.0, 8.0, 0.1
    _, holes = real_view(random_image(rng, 20, 240), step, tx, Intrinsics(500.0, 500.0, 119.5, 9.5),
                         depth_range=(z_near, z_far))
    expected_band = abs(500 * tx * (1 / z_near - 1 / z_far))
    band = holes[:, 60:].sum(axis=1)  # skip the left-edge strip uncovered by the global shift
    band_err = float(np.abs(band - expected_band).max())
    verdict(7, "disparity fx*Tx/Z and dis-occlusion band width",
            abs(disparity - 5.0) <= 0.5 and band_err <= 1,
            f"disparity {disparity:.3f}px, band error {band_err:.2f}px vs {expected_band:.2f}px")


def test_08_telea():
    img = np.full((24, 24, 3), 200, np.uint8)
    mask = np.zeros((24, 24), bool)
    mask[6:15, 8:17] = True
    damaged = img.copy()
    damaged[mask] = 0
    const_err = np.abs(telea_inpaint(damaged, mask, 3).astype(int) - img).max() / 255

    ramp = np.repeat((np.arange(16) * 12).astype(np.uint8)[None, :, None], 16, axis=0).repeat(3, axis=2)
    hole = np.zeros((16, 16), bool)
    hole[6:9, 6:9] = True
    ring = np.zeros_like(hole)
    ring[5:10, 5:10] = True
    ring &= ~hole
    filled = telea_inpaint(ramp, hole, 3)[hole]
    ramp_ok = filled.min() >= ramp[ring].min() and filled.max() <= ramp[ring].max()

    t = solve_eikonal_step([(0.0, Label.KNOWN), None, (0.0, Label.KNOWN), None])
    eik_err = abs(t - 1 / math.sqrt(2))
    verdict(8, "Telea constant / ramp / eikonal checks",
            const_err <= 1 / 255 and ramp_ok and eik_err <= 1e-6,
            f"constant err {const_err:.4f}, ramp in ring {ramp_ok}, eikonal err {eik_err:.1e}")


def test_09_quilt_round_trip():
    rng = np.random.default_rng(109)
    bad = 0
    for _ in range(50):
        spec = QuiltSpec(*(int(x) for x in rng.integers(1, 9, 2)), *(int(x) for x in rng.integers(1, 30, 2)))
        views = [random_image(rng, spec.tile_height_px, spec.tile_width_px) for _ in range(spec.total_views)]
        quilt = assemble_quilt(views, spec)
        bad += sum(not np.array_equal(extract_tile(quilt, spec, v), views[v]) for v in range(spec.total_views))
    verdict(9, "extract(assemble(views)) == views", bad == 0, f"50 specs, {bad} mismatched tiles")


def test_10_lut_file(tmp_path, portrait_table):
    rng = np.random.default_rng(110)
    ok = True
    for _ in range(10):
        profile = random_profile(rng, int(rng.integers(1, 50)))
        spec = QuiltSpec(*(int(x) for x in rng.integers(1, 7, 2)), *(int(x) for x in rng.integers(1, 40, 2)))
        table = build_lut(profile, spec)
        data = serialize_lut(table)
        ok &= deserialize_lut(data) == table and serialize_lut(deserialize_lut(data)) == data
    save_lut(portrait_table, tmp_path / "portrait.map")
    size = (tmp_path / "portrait.map").stat().st_size
    expected = HEADER_SIZE + 3 * 2 * 1536 * 2048 * 2
    verdict(10, "map round trip and portrait file size", ok and size == expected and HEADER_SIZE == 32,
            f"{size} bytes, expected {expected}")


def test_11_frame_throughput(tmp_path):
    rng = np.random.default_rng(111)
    spec = QuiltSpec(6, 8, 56, 42)
    table = build_lut(CalibrationProfile(52.0, -7.2, 0.15, 154, 205), spec)
    for i in range(10):
        imagecore.write_image(tmp_path / "in" / imagecore.frame_name(i), smooth_texture(rng, 42, 56))
        (tmp_path / "depth").mkdir(exist_ok=True)
        depth_to_png(rng.uniform(0, 1, (42, 56)), tmp_path / "depth" / imagecore.frame_name(i))
    report = frames_to_native_frames(tmp_path / "in", tmp_path / "out", spec, table, depth_dir=tmp_path / "depth")
    verdict(11, "frame throughput reported (10 fps target is informational)",
            report.frames == 10 and math.isfinite(report.fps) and report.fps > 0, report.summary())
