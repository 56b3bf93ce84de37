import importlib.util

import numpy as np
import pytest
from hypothesis import settings

from lightquilt.calibration import CalibrationProfile
from lightquilt.quilt import QuiltSpec

settings.register_profile("lightquilt", deadline=None)
settings.load_profile("lightquilt")

needs_cv2 = pytest.mark.skipif(importlib.util.find_spec("cv2") is None, reason="opencv not installed")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def portrait_profile():
    return CalibrationProfile(52.0, -7.2, 0.15, 1536, 2048)


@pytest.fixture(scope="session")
def portrait_spec():
    return QuiltSpec(6, 8, 560, 420)


@pytest.fixture(scope="session")
def portrait_table(portrait_profile, portrait_spec):
    from lightquilt.lut import build_lut

    return build_lut(portrait_profile, portrait_spec)


def random_image(rng, h, w):
    return rng.integers(0, 256, (h, w, 3), dtype=np.uint8)


def smooth_texture(rng, h, w, sigma=2.0):
    """Band-limited random RGB texture (keeps bilinear sampling close to exact shifts)."""
    from scipy import ndimage

    noise = rng.normal(size=(h, w, 3))
    smooth = ndimage.gaussian_filter(noise, sigma=(sigma, sigma, 0), mode="wrap")
    smooth = (smooth - smooth.min()) / (smooth.max() - smooth.min())
    return np.round(smooth * 255).astype(np.uint8)


def measure_shift(moved, reference, max_shift=20, margin=24):
    """Horizontal shift of ``moved`` relative to ``reference`` (positive = moved right).

    Normalized cross-correlation of a central window at integer lags, refined
    with a parabola through the peak and its two neighbours.
    """
    a = moved.astype(np.float64).mean(axis=2) if moved.ndim == 3 else moved.astype(np.float64)
    b = reference.astype(np.float64).mean(axis=2) if reference.ndim == 3 else reference.astype(np.float64)
    lo, hi = margin + max_shift, a.shape[1] - margin - max_shift
    win = a[:, lo:hi] - a[:, lo:hi].mean()
    lags = np.arange(-max_shift, max_shift + 1)
    scores = []
    for s in lags:
        ref = b[:, lo - s:hi - s]
        ref = ref - ref.mean()
        scores.append((win * ref).sum() / np.sqrt((win**2).sum() * (ref**2).sum()))
    scores = np.array(scores)
    k = int(np.argmax(scores))
    if 0 < k < len(lags) - 1:
        y0, y1, y2 = scores[k - 1], scores[k], scores[k + 1]
        denom = y0 - 2 * y1 + y2
        frac = 0.5 * (y0 - y2) / denom if denom != 0 else 0.0
    else:
        frac = 0.0
    return lags[k] + frac


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: s.split("criterion")[1]):
            terminalreporter.write_line(line)
