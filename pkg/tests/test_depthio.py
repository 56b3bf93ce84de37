import threading

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from PIL import Image

from lightquilt.depthio import (
    FileDepth,
    ModelDepth,
    load_depth,
    normalize_depth,
    read_pfm,
    write_pfm,
)
from lightquilt.errors import ModelLoadFailure, NonFiniteValue, UnreadableInput
from conftest import needs_cv2
from onnx_stub import channel_mean_model


def test_affine_rescale():
    assert normalize_depth(np.array([2.0, 4.0, 6.0])).tolist() == [0.0, 0.5, 1.0]


def test_constant_is_half():
    assert np.all(normalize_depth(np.full((3, 4), 7.0)) == 0.5)


def test_invert():
    assert normalize_depth(np.array([0.0, 1.0]), invert=True).tolist() == [1.0, 0.0]


def test_non_finite():
    with pytest.raises(NonFiniteValue):
        normalize_depth(np.array([0.0, np.nan]))


finite = arrays(np.float64, st.integers(2, 30), elements=st.floats(-1e3, 1e3))


@given(finite, st.floats(1e-2, 1e2), st.floats(-1e3, 1e3))
def test_positive_affine_invariance(raw, a, b):
    base = normalize_depth(raw)
    assert np.all((base >= 0) & (base <= 1))
    if np.ptp(raw) > 1e-6:
        assert np.allclose(normalize_depth(a * raw + b), base, atol=1e-6)


def test_8bit_file(tmp_path):
    path = tmp_path / "d.png"
    Image.fromarray(np.array([[0, 255], [255, 0]], np.uint8)).save(path)
    d = load_depth(FileDepth(path), 2, 2)
    assert d.tolist() == [[0.0, 1.0], [1.0, 0.0]]


def test_16bit_file(tmp_path):
    path = tmp_path / "d16.png"
    Image.fromarray(np.array([[0, 1000], [40000, 65535]], np.uint16)).save(path)
    d = load_depth(FileDepth(path), 2, 2)
    assert d[0, 0] == 0.0 and d[1, 1] == 1.0
    assert d[1, 0] == pytest.approx(40000 / 65535)


def test_resample_to_target(tmp_path, rng):
    path = tmp_path / "d.png"
    raw = rng.integers(0, 256, (192, 256), dtype=np.uint8)
    Image.fromarray(raw).save(path)
    d = load_depth(FileDepth(path), 560, 420)
    assert d.shape == (420, 560)
    assert d.min() >= 0 and d.max() <= 1


def test_pfm_round_trip(tmp_path, rng):
    vals = rng.uniform(0, 50, (7, 9)).astype(np.float32)
    write_pfm(tmp_path / "d.pfm", vals)
    assert np.array_equal(read_pfm(tmp_path / "d.pfm"), vals)
    d = load_depth(FileDepth(tmp_path / "d.pfm", invert=True), 9, 7)
    lo, hi = vals.min(), vals.max()
    assert np.allclose(d, 1 - (vals - lo) / (hi - lo), atol=1e-6)


def test_missing_file():
    with pytest.raises(UnreadableInput):
        load_depth(FileDepth("/nonexistent/depth.png"), 4, 4)


def test_garbage_pfm(tmp_path):
    (tmp_path / "bad.pfm").write_bytes(b"P6\n1 1\n")
    with pytest.raises(UnreadableInput):
        load_depth(FileDepth(tmp_path / "bad.pfm"), 4, 4)


@needs_cv2
def test_model_provider(tmp_path, rng):
    path = tmp_path / "mean.onnx"
    path.write_bytes(channel_mean_model(16, 16))
    provider = ModelDepth(path, input_size=(16, 16))
    img = rng.integers(0, 256, (12, 20, 3), dtype=np.uint8)
    d = load_depth(provider, 20, 12, image=img)
    assert d.shape == (12, 20)
    assert d.min() == 0.0 and d.max() == 1.0


@needs_cv2
def test_model_provider_is_thread_safe(tmp_path, rng):
    path = tmp_path / "mean.onnx"
    path.write_bytes(channel_mean_model(8, 8))
    provider = ModelDepth(path, input_size=(8, 8))
    img = rng.integers(0, 256, (8, 8, 3), dtype=np.uint8)
    expected = load_depth(provider, 8, 8, image=img)
    results = []

    def work():
        results.append(load_depth(provider, 8, 8, image=img))

    threads = [threading.Thread(target=work) for _ in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert all(np.array_equal(r, expected) for r in results)


@needs_cv2
def test_model_load_failure(tmp_path):
    bad = tmp_path / "bad.onnx"
    bad.write_bytes(b"not a model")
    img = np.zeros((4, 4, 3), np.uint8)
    with pytest.raises(ModelLoadFailure):
        load_depth(ModelDepth(bad), 4, 4, image=img)
    with pytest.raises(ModelLoadFailure):
        load_depth(ModelDepth(tmp_path / "missing.onnx"), 4, 4, image=img)
