"""Single image + depth to quilts and native rasters for slanted lenticular displays."""

from .calibration import CalibrationProfile, load_calibration, parse_calibration, serialize_calibration
from .depthio import FileDepth, ModelDepth, load_depth, normalize_depth
from .imagecore import BorderPolicy, CoordMap, median_filter, read_image, remap, write_image
from .inpaint import solve_eikonal_step, telea_inpaint
from .lut import LookupTable, build_lut, deserialize_lut, load_lut, save_lut, serialize_lut, view_fraction
from .nativerender import benchmark_render, render_native_direct, render_native_lut
from .quilt import QuiltSpec, assemble_quilt, extract_tile
from .viewsynth import (
    Intrinsics,
    Pose,
    ViewRequest,
    estimate_focal,
    fast_map_from_depth,
    real_view,
    synthesize_fast,
    synthesize_real,
)

__version__ = "0.1.0"
