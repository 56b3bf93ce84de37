"""Relative depth maps: loading, resampling and normalization.

A depth map here is a ``(height, width)`` float64 array with values in
``[0, 1]`` where 1 is nearest to the camera. Monocular networks usually
output inverse depth, which already follows that convention; pass
``invert=True`` for sources where larger means farther.
"""

from __future__ import annotations

import re
import threading
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image as PILImage

from .errors import ModelLoadFailure, NonFiniteValue, ProviderUnavailable, UnreadableInput
from .imagecore import resize_bilinear


def normalize_depth(raw, invert: bool = False) -> np.ndarray:
    """Affinely rescale ``raw`` to ``[0, 1]``; a constant input maps to 0.5."""
    raw = np.asarray(raw, dtype=np.float64)
    if raw.size == 0:
        raise UnreadableInput("depth input is empty")
    if not np.all(np.isfinite(raw)):
        raise NonFiniteValue("depth contains NaN or infinite values")
    lo, hi = raw.min(), raw.max()
    if hi == lo:
        return np.full(raw.shape, 0.5)
    scaled = np.clip((raw - lo) / (hi - lo), 0.0, 1.0)
    return 1.0 - scaled if invert else scaled


# ---------------------------------------------------------------- PFM


def read_pfm(path) -> np.ndarray:
    """Read a PFM file as a float array with row 0 at the top."""
    try:
        with open(path, "rb") as fh:
            kind = fh.readline().strip()
            if kind not in (b"Pf", b"PF"):
                raise UnreadableInput(f"{path}: not a PFM file")
            dims = fh.readline()
            while dims.startswith(b"#"):
                dims = fh.readline()
            m = re.match(rb"^\s*(\d+)\s+(\d+)\s*$", dims)
            if m is None:
                raise UnreadableInput(f"{path}: malformed PFM header")
            width, height = int(m.group(1)), int(m.group(2))
            scale = float(fh.readline().strip())
            endian = "<" if scale < 0 else ">"
            channels = 3 if kind == b"PF" else 1
            data = np.frombuffer(fh.read(), dtype=endian + "f4")
    except OSError as exc:
        raise UnreadableInput(f"cannot read {path}: {exc}") from exc
    except ValueError as exc:
        raise UnreadableInput(f"{path}: malformed PFM header") from exc
    count = width * height * channels
    if data.size < count:
        raise UnreadableInput(f"{path}: truncated PFM data")
    shape = (height, width, 3) if channels == 3 else (height, width)
    return np.flipud(data[:count].reshape(shape)).astype(np.float64)


def write_pfm(path, values: np.ndarray) -> None:
    values = np.asarray(values, dtype="<f4")
    kind = b"PF" if values.ndim == 3 else b"Pf"
    h, w = values.shape[:2]
    with open(path, "wb") as fh:
        fh.write(kind + b"\n")
        fh.write(f"{w} {h}\n".encode())
        fh.write(b"-1.0\n")
        fh.write(np.flipud(values).tobytes())


def read_depth_file(path) -> np.ndarray:
    """Raw depth values from an 8/16-bit grayscale PNG or a PFM file."""
    path = Path(path)
    if not path.is_file():
        raise UnreadableInput(f"depth file not found: {path}")
    if path.suffix.lower() == ".pfm":
        raw = read_pfm(path)
        return raw.mean(axis=2) if raw.ndim == 3 else raw
    try:
        with PILImage.open(path) as im:
            if im.mode in ("RGB", "RGBA", "P", "LA"):
                im = im.convert("L")
            raw = np.array(im)
    except (OSError, ValueError) as exc:
        raise UnreadableInput(f"cannot read depth image {path}: {exc}") from exc
    return raw.astype(np.float64)


# ---------------------------------------------------------------- providers


@dataclass(frozen=True)
class FileDepth:
    path: Path
    invert: bool = False

    def raw(self, image=None) -> np.ndarray:
        return read_depth_file(self.path)


class ModelDepth:
    """Depth from an ONNX network run through OpenCV's DNN module.

    The network receives a ``1x3xHxW`` float32 blob of the RGB image
    resized to ``input_size`` and normalized with ImageNet statistics,
    the preprocessing used by the MiDaS family. Inference calls are
    serialized internally, so one instance can be shared across threads.
    """

    MEAN = np.array([0.485, 0.456, 0.406], dtype=np.float32)
    STD = np.array([0.229, 0.224, 0.225], dtype=np.float32)

    def __init__(self, path, input_size=(256, 256), invert: bool = False):
        self.path = Path(path)
        self.input_size = tuple(input_size)
        self.invert = invert
        self._net = None
        self._lock = threading.Lock()

    def _load(self):
        try:
            import cv2
        except ImportError as exc:
            raise ProviderUnavailable("model depth needs opencv-python (cv2.dnn)") from exc
        if not self.path.is_file():
            raise ModelLoadFailure(f"model file not found: {self.path}")
        try:
            net = cv2.dnn.readNetFromONNX(str(self.path))
        except cv2.error as exc:
            raise ModelLoadFailure(f"cannot load {self.path}: {exc}") from exc
        if net.empty():
            raise ModelLoadFailure(f"cannot load {self.path}: empty network")
        return net

    def raw(self, image=None) -> np.ndarray:
        if image is None:
            raise UnreadableInput("model depth needs the source image")
        from .imagecore import resize_image

        w, h = self.input_size
        x = resize_image(image, w, h).astype(np.float32) / 255.0
        x = (x - self.MEAN) / self.STD
        blob = np.ascontiguousarray(x.transpose(2, 0, 1)[None])
        with self._lock:
            if self._net is None:
                self._net = self._load()
            self._net.setInput(blob)
            out = np.asarray(self._net.forward(), dtype=np.float64)
        out = np.squeeze(out)
        if out.ndim != 2:
            raise ModelLoadFailure(f"model output has shape {out.shape}, expected a 2-D map")
        return out


def load_depth(provider, target_width: int, target_height: int, image=None) -> np.ndarray:
    """Read depth from ``provider``, resample it to the target size and normalize."""
    if target_width <= 0 or target_height <= 0:
        raise ValueError("target dimensions must be positive")
    raw = provider.raw(image)
    if not np.all(np.isfinite(raw)):
        raise NonFiniteValue("depth contains NaN or infinite values")
    resized = resize_bilinear(raw, target_width, target_height)
    return normalize_depth(resized, invert=provider.invert)


def depth_to_png(depth: np.ndarray, path, bits: int = 16) -> None:
    scale = 65535 if bits == 16 else 255
    values = np.round(np.clip(depth, 0, 1) * scale)
    values = values.astype(np.uint16 if bits == 16 else np.uint8)
    PILImage.fromarray(values).save(path, format="PNG")
