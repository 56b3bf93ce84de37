"""A short clip as numbered PNGs, converted frame by frame into native frames."""

import tempfile
from pathlib import Path

import numpy as np

from lightquilt import imagecore
from lightquilt.calibration import CalibrationProfile
from lightquilt.depthio import depth_to_png
from lightquilt.lut import build_lut
from lightquilt.pipeline import SynthesisParams, frames_to_native_frames, quilt_views_to_video_frames
from lightquilt.quilt import QuiltSpec, assemble_quilt, quilt_filename

spec = QuiltSpec(4, 2, 96, 64)
profile = CalibrationProfile(pitch_px=19.5, slope=-3.0, center_offset=0.2, screen_width_px=192, screen_height_px=256)
table = build_lut(profile, spec)

tmp = Path(tempfile.mkdtemp())
yy, xx = np.mgrid[0:64, 0:96]
for i in range(12):
    # a square sliding right over a gradient, with matching depth frames
    frame = np.zeros((64, 96, 3), np.uint8)
    frame[..., 2] = (xx * 2).astype(np.uint8)
    box = (abs(yy - 32) < 12) & (abs(xx - 20 - 5 * i) < 12)
    frame[box] = 255
    imagecore.write_image(tmp / "clip" / imagecore.frame_name(i), frame)
    (tmp / "depth").mkdir(exist_ok=True)
    depth_to_png(np.where(box, 1.0, 0.2), tmp / "depth" / imagecore.frame_name(i))

report = frames_to_native_frames(tmp / "clip", tmp / "native", spec, table, depth_dir=tmp / "depth",
                                 params=SynthesisParams(max_offset=4.0), workers=4)
print(report.summary())
print([p.name for p in imagecore.list_pngs(tmp / "native")][:3])

# the reverse direction: a quilt's views as a frame sequence (a turntable clip)
views = [imagecore.read_image(p) for p in imagecore.list_pngs(tmp / "clip")[:8]]
quilt_path = tmp / quilt_filename("clip", spec)
imagecore.write_image(quilt_path, assemble_quilt(views, spec))
print(quilt_path.name, len(quilt_views_to_video_frames(quilt_path, spec, tmp / "turntable")), "frames")
