"""Per-device display calibration.

A calibration document is JSON with the keys below. All horizontal
quantities are measured in subpixel columns.

=============  ========  ==============================================
key            required  meaning
=============  ========  ==============================================
calib_version  no        schema version, must be 1 when present
pitch          yes       lenticular pitch, subpixels (> 0)
slope          yes       tangent of the lens slant angle
center         yes       horizontal phase offset, subpixels
screenW        yes       panel width in pixels
screenH        yes       panel height in pixels
subp           no        color subpixels per pixel (default 3)
flipX          no        reverse view order (default false)
flipY          no        mirror panel rows (default false)
lensPerInch    no        accepted and ignored
=============  ========  ==============================================

Vendor files that wrap each value as ``{"value": x}`` are accepted too.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path

from .errors import InvalidValue, MalformedDocument, MissingKey

CALIB_VERSION = 1

_REQUIRED = ("pitch", "slope", "center", "screenW", "screenH")


@dataclass(frozen=True)
class CalibrationProfile:
    pitch_px: float
    slope: float
    center_offset: float
    screen_width_px: int
    screen_height_px: int
    subpixels_per_pixel: int = 3
    flip_x: bool = False
    flip_y: bool = False

    def __post_init__(self):
        if not (math.isfinite(self.pitch_px) and self.pitch_px > 0):
            raise InvalidValue("pitch", f"must be a positive finite number, got {self.pitch_px}")
        if not math.isfinite(self.slope):
            raise InvalidValue("slope", f"must be finite, got {self.slope}")
        if not math.isfinite(self.center_offset):
            raise InvalidValue("center", f"must be finite, got {self.center_offset}")
        if self.screen_width_px <= 0:
            raise InvalidValue("screenW", f"must be positive, got {self.screen_width_px}")
        if self.screen_height_px <= 0:
            raise InvalidValue("screenH", f"must be positive, got {self.screen_height_px}")
        if self.subpixels_per_pixel < 1:
            raise InvalidValue("subp", f"must be >= 1, got {self.subpixels_per_pixel}")

    @property
    def native_size(self) -> tuple[int, int]:
        """(width, height) of the native raster."""
        return self.screen_width_px, self.screen_height_px

    @property
    def subpixel_columns(self) -> int:
        return self.subpixels_per_pixel * self.screen_width_px


def _unwrap(value):
    if isinstance(value, dict):
        if "value" not in value:
            raise MalformedDocument("nested calibration entry without a 'value' field")
        return value["value"]
    return value


def _real(doc, key):
    value = _unwrap(doc[key])
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InvalidValue(key, f"expected a number, got {value!r}")
    return float(value)


def _integer(doc, key, default=None):
    if key not in doc:
        return default
    value = _unwrap(doc[key])
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InvalidValue(key, f"expected an integer, got {value!r}")
    if isinstance(value, float):
        if not value.is_integer():
            raise InvalidValue(key, f"expected an integer, got {value!r}")
        value = int(value)
    return value


def _flag(doc, key):
    if key not in doc:
        return False
    value = _unwrap(doc[key])
    if isinstance(value, bool):
        return value
    if isinstance(value, (int, float)) and value in (0, 1):
        return bool(value)
    raise InvalidValue(key, f"expected a boolean, got {value!r}")


def parse_calibration(document: str | bytes) -> CalibrationProfile:
    """Parse a calibration document into a validated profile.

    Raises MalformedDocument when the text is not a JSON object,
    MissingKey for an absent required key and InvalidValue when a value
    has the wrong type or breaks a profile invariant.
    """
    try:
        doc = json.loads(document)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise MalformedDocument(f"calibration is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise MalformedDocument("calibration document must be a JSON object")

    if "calib_version" in doc:
        version = _unwrap(doc["calib_version"])
        if version != CALIB_VERSION:
            raise InvalidValue("calib_version", f"unsupported version {version!r}")
    for key in _REQUIRED:
        if key not in doc:
            raise MissingKey(key)

    return CalibrationProfile(
        pitch_px=_real(doc, "pitch"),
        slope=_real(doc, "slope"),
        center_offset=_real(doc, "center"),
        screen_width_px=_integer(doc, "screenW"),
        screen_height_px=_integer(doc, "screenH"),
        subpixels_per_pixel=_integer(doc, "subp", default=3),
        flip_x=_flag(doc, "flipX"),
        flip_y=_flag(doc, "flipY"),
    )


def serialize_calibration(profile: CalibrationProfile) -> str:
    doc = {
        "calib_version": CALIB_VERSION,
        "pitch": profile.pitch_px,
        "slope": profile.slope,
        "center": profile.center_offset,
        "screenW": profile.screen_width_px,
        "screenH": profile.screen_height_px,
        "subp": profile.subpixels_per_pixel,
        "flipX": profile.flip_x,
        "flipY": profile.flip_y,
    }
    return json.dumps(doc, indent=2)


def load_calibration(path) -> CalibrationProfile:
    return parse_calibration(Path(path).read_bytes())


def with_slant_degrees(profile: CalibrationProfile, degrees: float) -> CalibrationProfile:
    """Return a copy of ``profile`` whose slope is ``tan(degrees)``."""
    fields = asdict(profile)
    fields["slope"] = math.tan(math.radians(degrees))
    return CalibrationProfile(**fields)
