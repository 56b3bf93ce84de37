"""``a3d`` command line: build maps, convert photos, views, quilts and frame sequences.

Exit codes: 0 on success, 2 on usage errors, 3 when a pipeline stage fails.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import imagecore
from .calibration import load_calibration, with_slant_degrees
from .depthio import FileDepth, ModelDepth
from .errors import LightQuiltError
from .lut import build_lut, load_lut, save_lut
from .nativerender import benchmark_render
from .pipeline import (
    SynthesisParams,
    frames_to_native_frames,
    photo_to_native,
    quilt_to_native,
    quilt_views_to_video_frames,
    resolve_map,
    stage,
    views_to_native,
)
from .quilt import QuiltSpec, parse_quilt_filename

EXIT_USAGE = 2
EXIT_STAGE = 3


class UsageError(Exception):
    pass


def _calibration_args(p, required=True):
    p.add_argument("--calibration", type=Path, required=required, help="device calibration JSON")
    p.add_argument("--slant-deg", type=float, help="override the lens slant, given in degrees")


def _quilt_args(p, tiles=True):
    p.add_argument("--quilt-cols", type=int, help="quilt columns (N)")
    p.add_argument("--quilt-rows", type=int, help="quilt rows (M)")
    if tiles:
        p.add_argument("--tile-w", type=int, help="tile width in pixels")
        p.add_argument("--tile-h", type=int, help="tile height in pixels")


def _map_args(p):
    p.add_argument("--map", type=Path, help=".map lookup table (default: cache dir, see A3D_MAP_DIR)")
    p.add_argument("--build-map", action="store_true", help="build the lookup table if it is missing")


def _synth_args(p):
    p.add_argument("--views", type=int, help="number of views; must equal cols x rows")
    p.add_argument("--mode", choices=("fast", "real"), default="fast")
    p.add_argument("--max-offset", type=float, default=8.0,
                   help="fast: peak disparity in px at depth 1; real: baseline in scene units")
    p.add_argument("--fov", type=float, default=60.0, help="horizontal field of view, degrees (real mode)")
    p.add_argument("--znear", type=float, default=1.0)
    p.add_argument("--zfar", type=float, default=10.0)
    p.add_argument("--inpaint-radius", type=int, default=3)
    p.add_argument("--depth", type=Path, help="depth map file (PNG or PFM) or, for frames, a directory")
    p.add_argument("--model", type=Path, help="ONNX depth network")
    p.add_argument("--invert-depth", action="store_true", help="treat larger depth values as farther")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="a3d", description=__doc__.splitlines()[0])
    parser.add_argument("--verbose", "-v", action="store_true")
    parser.add_argument("--jobs", type=int, default=1, help="worker threads")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("lut", help="precompute a .map lookup table")
    _calibration_args(p)
    _quilt_args(p)
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("photo", help="photo + depth -> native")
    p.add_argument("--image", type=Path, required=True)
    _calibration_args(p)
    _quilt_args(p)
    _map_args(p)
    _synth_args(p)
    p.add_argument("--out", type=Path, required=True, help="native PNG")
    p.add_argument("--quilt-out", type=Path)
    p.add_argument("--depth-out", type=Path)
    p.add_argument("--masks-dir", type=Path, help="write hole masks per view (real mode)")

    p = sub.add_parser("views", help="directory of sorted views -> native")
    p.add_argument("--dir", type=Path, required=True)
    _calibration_args(p)
    _quilt_args(p)
    _map_args(p)
    p.add_argument("--out", type=Path, required=True)

    for verb in ("quilt", "native"):
        p = sub.add_parser(verb, help="quilt PNG -> native using a .map")
        p.add_argument("--quilt", type=Path, required=True)
        p.add_argument("--map", type=Path, required=True)
        p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("frames", help="numbered frames -> numbered native frames")
    p.add_argument("--input-dir", type=Path, required=True)
    _calibration_args(p)
    _quilt_args(p)
    _map_args(p)
    _synth_args(p)
    p.add_argument("--out", type=Path, required=True, help="output frame directory")

    p = sub.add_parser("quilt2frames", help="quilt PNG -> one frame per view")
    p.add_argument("--quilt", type=Path, required=True)
    _quilt_args(p, tiles=False)
    p.add_argument("--out", type=Path, required=True, help="output frame directory")

    p = sub.add_parser("bench", help="time table-driven vs direct native rendering")
    _calibration_args(p)
    _quilt_args(p)
    p.add_argument("--quilt", type=Path, help="quilt PNG (default: random content)")
    p.add_argument("--iterations", type=int, default=5)
    return parser


def _profile(args):
    profile = load_calibration(args.calibration)
    if args.slant_deg is not None:
        profile = with_slant_degrees(profile, args.slant_deg)
    return profile


def _spec(args, tile_size=None):
    cols, rows = args.quilt_cols, args.quilt_rows
    tw = getattr(args, "tile_w", None)
    th = getattr(args, "tile_h", None)
    if tile_size is not None:
        tw = tw or tile_size[0]
        th = th or tile_size[1]
    if None in (cols, rows, tw, th):
        raise UsageError("--quilt-cols, --quilt-rows, --tile-w and --tile-h are required")
    return QuiltSpec(cols, rows, tw, th)


def _params(args, spec):
    if args.views is not None and args.views != spec.total_views:
        raise UsageError(f"--views {args.views} does not match a {spec.grid_cols}x{spec.grid_rows} quilt")
    if args.znear <= 0 or args.zfar <= args.znear:
        raise UsageError("need 0 < --znear < --zfar")
    return SynthesisParams(args.mode, args.max_offset, args.fov, (args.znear, args.zfar), args.inpaint_radius)


def _provider(args):
    if (args.depth is None) == (args.model is None):
        raise UsageError("give exactly one of --depth or --model")
    if args.model is not None:
        return ModelDepth(args.model, invert=args.invert_depth)
    return FileDepth(args.depth, args.invert_depth)


def _run(args) -> int:
    if args.verb == "lut":
        profile, spec = _profile(args), _spec(args)
        save_lut(build_lut(profile, spec, workers=args.jobs), args.out)
        print(args.out)

    elif args.verb == "photo":
        profile = _profile(args)
        tile = None
        if args.tile_w is None or args.tile_h is None:
            h, w = imagecore.read_image(args.image).shape[:2]
            tile = (w, h)
        spec = _spec(args, tile)
        params = _params(args, spec)
        provider = _provider(args)
        table = resolve_map(profile, spec, args.map, args.build_map, args.jobs)
        photo_to_native(args.image, provider, spec, table, params, args.out,
                        args.quilt_out, args.depth_out, args.masks_dir, args.jobs)
        print(args.out)

    elif args.verb == "views":
        profile = _profile(args)
        paths = imagecore.list_pngs(args.dir)
        tile = None
        if paths and (args.tile_w is None or args.tile_h is None):
            h, w = imagecore.read_image(paths[0]).shape[:2]
            tile = (w, h)
        spec = _spec(args, tile)
        table = resolve_map(profile, spec, args.map, args.build_map, args.jobs)
        views_to_native(args.dir, spec, table, args.out)
        print(args.out)

    elif args.verb in ("quilt", "native"):
        table = resolve_map_file(args.map)
        quilt_to_native(args.quilt, table, args.out)
        print(args.out)

    elif args.verb == "frames":
        profile = _profile(args)
        frames = imagecore.list_pngs(args.input_dir)
        tile = None
        if frames and (args.tile_w is None or args.tile_h is None):
            h, w = imagecore.read_image(frames[0]).shape[:2]
            tile = (w, h)
        spec = _spec(args, tile)
        params = _params(args, spec)
        if (args.depth is None) == (args.model is None):
            raise UsageError("give exactly one of --depth (a directory) or --model")
        model = ModelDepth(args.model, invert=args.invert_depth) if args.model else None
        table = resolve_map(profile, spec, args.map, args.build_map, args.jobs)
        report = frames_to_native_frames(args.input_dir, args.out, spec, table, args.depth, model,
                                         params, args.invert_depth, args.jobs)
        print(report.summary())

    elif args.verb == "quilt2frames":
        cols, rows = args.quilt_cols, args.quilt_rows
        if cols is None or rows is None:
            parsed = parse_quilt_filename(args.quilt.name)
            if parsed is None:
                raise UsageError("grid size not given and not encoded as <name>_qsNxM.png")
            cols, rows = parsed
        quilt = imagecore.read_image(args.quilt)
        h, w = quilt.shape[:2]
        if w % cols or h % rows:
            raise UsageError(f"a {w}x{h} quilt does not split into {cols}x{rows} tiles")
        spec = QuiltSpec(cols, rows, w // cols, h // rows)
        paths = quilt_views_to_video_frames(args.quilt, spec, args.out)
        print(f"{len(paths)} frames -> {args.out}")

    elif args.verb == "bench":
        profile, spec = _profile(args), _spec(args)
        if args.iterations < 3:
            raise UsageError("--iterations must be >= 3")
        if args.quilt is not None:
            quilt = imagecore.read_image(args.quilt)
        else:
            quilt = np.random.default_rng(0).integers(0, 256, (spec.height, spec.width, 3), dtype=np.uint8)
        table = build_lut(profile, spec, workers=args.jobs)
        report = benchmark_render(quilt, table, profile, spec, args.iterations)
        print("lut_ms,direct_ms,ratio")
        print(report.csv())
    return 0


def resolve_map_file(path):
    with stage("lut", path):
        return load_lut(path)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return _run(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"a3d: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except LightQuiltError as exc:
        print(f"a3d: {exc}", file=sys.stderr)
        return EXIT_STAGE
    except OSError as exc:
        print(f"a3d: {exc}", file=sys.stderr)
        return EXIT_STAGE


if __name__ == "__main__":
    sys.exit(main())
