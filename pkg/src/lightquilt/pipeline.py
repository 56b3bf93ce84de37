"""End-to-end conversions: photos, view sets, quilts and frame sequences to natives.

Every stage failure is re-raised tagged with the stage name and the input
it was working on. Video is handled as directories of numbered PNG frames.
"""

from __future__ import annotations

import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import imagecore
from .calibration import CalibrationProfile
from .depthio import FileDepth, depth_to_png, load_depth
from .errors import (
    LightQuiltError,
    MapNotFound,
    NoFrames,
    StageError,
    TileDimensionMismatch,
    WrongViewCount,
)
from .lut import LookupTable, build_lut, check_lut_matches, load_lut, lut_cache_key, save_lut
from .nativerender import render_native_lut
from .quilt import QuiltSpec, assemble_quilt, extract_tile
from .viewsynth import DEFAULT_DEPTH_RANGE, Intrinsics, ViewRequest, synthesize_fast, synthesize_real

log = logging.getLogger(__name__)

MAP_DIR_ENV = "A3D_MAP_DIR"


@contextmanager
def stage(name: str, source):
    """Tag any failure inside the block with ``name`` and ``source``."""
    try:
        yield
    except StageError:
        raise
    except LightQuiltError as exc:
        if getattr(exc, "stage", None) is None:
            exc.stage, exc.source = name, str(source)
            exc.args = (f"[{name}] {source}: {exc}",)
        raise
    except (OSError, ValueError) as exc:
        raise StageError(name, source, exc) from exc


@dataclass
class SynthesisParams:
    mode: str = "fast"
    max_offset: float = 8.0
    fov_deg: float = 60.0
    depth_range: tuple[float, float] = DEFAULT_DEPTH_RANGE
    inpaint_radius: int = 3
    reverse: bool = False


@dataclass
class PhotoResult:
    native: np.ndarray
    quilt: np.ndarray
    depth: np.ndarray
    masks: list = field(default_factory=list)


# ---------------------------------------------------------------- maps


def default_map_path(profile: CalibrationProfile, spec: QuiltSpec, map_dir=None) -> Path:
    map_dir = Path(map_dir or os.environ.get(MAP_DIR_ENV) or "maps")
    name = f"lut-{spec.grid_cols}x{spec.grid_rows}-{spec.tile_width_px}x{spec.tile_height_px}"
    return map_dir / f"{name}-{lut_cache_key(profile, spec)}.map"


def resolve_map(
    profile: CalibrationProfile,
    spec: QuiltSpec,
    map_path=None,
    build: bool = False,
    workers: int = 1,
) -> LookupTable:
    """Load the table for (profile, spec), building and caching it if allowed."""
    path = Path(map_path) if map_path else default_map_path(profile, spec)
    with stage("lut", path):
        if path.is_file():
            table = load_lut(path)
            check_lut_matches(table, profile, spec)
            return table
        if not build:
            raise MapNotFound(path)
        log.info("building lookup table %s", path)
        table = build_lut(profile, spec, workers=workers)
        path.parent.mkdir(parents=True, exist_ok=True)
        save_lut(table, path)
        return table


# ---------------------------------------------------------------- conversions


def synthesize_views(image, depth, spec: QuiltSpec, params: SynthesisParams, workers: int = 1):
    request = ViewRequest(spec.total_views, params.max_offset, params.mode, params.reverse)
    if params.mode == "fast":
        return synthesize_fast(image, depth, request, workers), []
    h, w = depth.shape
    intrinsics = Intrinsics.from_fov(params.fov_deg, w, h)
    return synthesize_real(
        image,
        depth,
        request,
        intrinsics,
        depth_range=params.depth_range,
        inpaint_radius=params.inpaint_radius,
        workers=workers,
        return_masks=True,
    )


def photo_to_native(
    image_path,
    provider,
    spec: QuiltSpec,
    table: LookupTable,
    params: SynthesisParams | None = None,
    out_path=None,
    quilt_out=None,
    depth_out=None,
    masks_dir=None,
    workers: int = 1,
) -> PhotoResult:
    """Photo + depth -> views -> quilt -> native."""
    params = params or SynthesisParams()
    with stage("load", image_path):
        image = imagecore.read_image(image_path)
        if image.shape[:2] != (spec.tile_height_px, spec.tile_width_px):
            image = imagecore.resize_image(image, spec.tile_width_px, spec.tile_height_px)
    with stage("depth", getattr(provider, "path", provider)):
        depth = load_depth(provider, spec.tile_width_px, spec.tile_height_px, image=image)
    with stage("synthesize", image_path):
        views, masks = synthesize_views(image, depth, spec, params, workers)
    with stage("quilt", image_path):
        quilt = assemble_quilt(views, spec)
    with stage("native", image_path):
        native = render_native_lut(quilt, table)
    with stage("write", out_path):
        if out_path is not None:
            imagecore.write_image(out_path, native)
        if quilt_out is not None:
            imagecore.write_image(quilt_out, quilt)
        if depth_out is not None:
            depth_to_png(depth, depth_out)
        if masks_dir is not None:
            for v, mask in enumerate(masks):
                if mask is not None:
                    m = np.repeat((mask * 255).astype(np.uint8)[..., None], 3, axis=2)
                    imagecore.write_image(Path(masks_dir) / imagecore.frame_name(v, "mask"), m)
    return PhotoResult(native, quilt, depth, masks)


def views_to_native(directory, spec: QuiltSpec, table: LookupTable, out_path=None) -> np.ndarray:
    """Sorted PNG views (lexicographic file-name order) -> quilt -> native."""
    with stage("load", directory):
        paths = imagecore.list_pngs(directory)
        if len(paths) != spec.total_views:
            raise WrongViewCount(f"{directory} holds {len(paths)} views, spec needs {spec.total_views}")
        views = [imagecore.read_image(p) for p in paths]
    with stage("quilt", directory):
        for p, view in zip(paths, views):
            if view.shape[:2] != (spec.tile_height_px, spec.tile_width_px):
                raise TileDimensionMismatch(f"{p.name} is {view.shape[1]}x{view.shape[0]}")
        quilt = assemble_quilt(views, spec)
    with stage("native", directory):
        native = render_native_lut(quilt, table)
    if out_path is not None:
        with stage("write", out_path):
            imagecore.write_image(out_path, native)
    return native


def quilt_to_native(quilt_path, table: LookupTable, out_path=None) -> np.ndarray:
    with stage("load", quilt_path):
        quilt = imagecore.read_image(quilt_path)
    with stage("native", quilt_path):
        native = render_native_lut(quilt, table)
    if out_path is not None:
        with stage("write", out_path):
            imagecore.write_image(out_path, native)
    return native


def quilt_views_to_video_frames(quilt_path, spec: QuiltSpec, out_dir) -> list[Path]:
    """Write every view of a quilt as ``frame_000000.png``, ``frame_000001.png``, ..."""
    with stage("load", quilt_path):
        quilt = imagecore.read_image(quilt_path)
    out_dir = Path(out_dir)
    paths = []
    with stage("extract", quilt_path):
        for v in range(spec.total_views):
            path = out_dir / imagecore.frame_name(v)
            imagecore.write_image(path, extract_tile(quilt, spec, v))
            paths.append(path)
    return paths


@dataclass(frozen=True)
class FramesReport:
    frames: int
    seconds: float

    @property
    def fps(self) -> float:
        return self.frames / self.seconds if self.seconds > 0 else float("inf")

    def summary(self) -> str:
        return f"frames={self.frames} seconds={self.seconds:.3f} fps={self.fps:.2f}"


def frames_to_native_frames(
    input_dir,
    out_dir,
    spec: QuiltSpec,
    table: LookupTable,
    depth_dir=None,
    model=None,
    params: SynthesisParams | None = None,
    invert_depth: bool = False,
    workers: int = 1,
) -> FramesReport:
    """Convert numbered frames to native frames, keeping file names.

    Depth comes from ``depth_dir`` (a PNG/PFM with the same stem per frame)
    or from a shared model provider.
    """
    frames = imagecore.list_pngs(input_dir)
    if not frames:
        raise NoFrames(f"no PNG frames in {input_dir}")
    if depth_dir is None and model is None:
        raise ValueError("need depth_dir or model")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    def provider_for(frame: Path):
        if model is not None:
            return model
        for suffix in (".png", ".pfm"):
            candidate = Path(depth_dir) / (frame.stem + suffix)
            if candidate.is_file():
                return FileDepth(candidate, invert_depth)
        return FileDepth(Path(depth_dir) / frame.name, invert_depth)

    def job(item):
        index, frame = item
        try:
            photo_to_native(frame, provider_for(frame), spec, table, params, out_path=out_dir / frame.name)
        except LightQuiltError as exc:
            raise StageError(f"frame {index}", frame, exc) from exc

    t0 = time.perf_counter()
    items = list(enumerate(frames))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for _ in pool.map(job, items):
                pass
    else:
        for item in items:
            job(item)
    report = FramesReport(len(frames), time.perf_counter() - t0)
    log.info("throughput: %s", report.summary())
    return report
