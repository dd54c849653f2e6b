import cv2
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from exposurefix.image import (ImageFormatError, clamp01, invert, load, save,
                               to_gray, to_uint8)


def _write_raw(path, arr):
    """Write an RGB(A) or gray integer array with OpenCV's channel order."""
    if arr.ndim == 3 and arr.shape[2] >= 3:
        order = [2, 1, 0] + list(range(3, arr.shape[2]))
        arr = arr[:, :, order]
    assert cv2.imwrite(str(path), np.ascontiguousarray(arr))


def test_load_8bit_scaling(tmp_path):
    path = tmp_path / 'px.png'
    _write_raw(path, np.array([[[0, 128, 255]]], dtype=np.uint8))
    np.testing.assert_array_equal(load(path)[0, 0], [0.0, 128 / 255, 1.0])


def test_load_black(tmp_path):
    path = tmp_path / 'black.png'
    _write_raw(path, np.zeros((4, 5, 3), np.uint8))
    img = load(path)
    assert img.shape == (4, 5, 3)
    assert not img.any()


def test_load_16bit(tmp_path):
    path = tmp_path / 'deep.png'
    raw = np.zeros((2, 2, 3), np.uint16)
    raw[0, 0] = [65535, 0, 32768]
    _write_raw(path, raw)
    img = load(path)
    assert img[0, 0, 0] == 1.0
    assert img[0, 0, 2] == 32768 / 65535


def test_load_gray_and_alpha(tmp_path):
    gray = tmp_path / 'gray.png'
    _write_raw(gray, np.full((3, 3), 51, np.uint8))
    np.testing.assert_array_equal(load(gray), np.full((3, 3, 3), 0.2))

    rgba = tmp_path / 'rgba.png'
    raw = np.zeros((2, 2, 4), np.uint8)
    raw[..., 0] = 255
    raw[..., 3] = 7
    _write_raw(rgba, raw)
    img = load(rgba)
    assert img.shape == (2, 2, 3)
    np.testing.assert_array_equal(img[0, 0], [1.0, 0.0, 0.0])


def test_load_jpeg(tmp_path):
    path = tmp_path / 'x.jpg'
    _write_raw(path, np.full((8, 8, 3), 200, np.uint8))
    assert np.abs(load(path) - 200 / 255).max() < 3 / 255


def test_load_errors(tmp_path):
    with pytest.raises(FileNotFoundError):
        load(tmp_path / 'missing.png')
    bad = tmp_path / 'bad.png'
    bad.write_bytes(b'not an image')
    with pytest.raises(ImageFormatError):
        load(bad)
    other = tmp_path / 'x.tiff'
    other.write_bytes(b'II*\x00')
    with pytest.raises(ImageFormatError):
        load(other)


@pytest.mark.parametrize('value, byte', [(0.5, 128), (1.0, 255), (0.0, 0),
                                         (127.5 / 255, 128), (0.2, 51)])
def test_save_rounding(value, byte):
    assert to_uint8(np.array([value]))[0] == byte


def test_save_roundtrip(tmp_path, rng):
    img = rng.random((7, 9, 3))
    path = tmp_path / 'rt.png'
    save(img, path)
    assert np.abs(load(path) - img).max() <= 0.5 / 255 + 1e-12


def test_save_gray_map(tmp_path):
    path = tmp_path / 'map.png'
    save(np.array([[0.0, 1.0]]), path)
    np.testing.assert_array_equal(load(path)[0, :, 0], [0.0, 1.0])


def test_save_unwritable(tmp_path):
    with pytest.raises(OSError):
        save(np.zeros((2, 2, 3)), tmp_path / 'no' / 'such' / 'dir.png')


def test_invert_examples():
    np.testing.assert_array_equal(invert(np.array([0.2, 0.5, 1.0])), [0.8, 0.5, 0.0])
    assert not invert(np.ones((3, 3, 3))).any()


def test_invert_involution_exact(rng):
    # numpy's uniform floats are multiples of 2**-53, where 1 - x is exact
    img = rng.random((16, 16, 3))
    np.testing.assert_array_equal(invert(invert(img)), img)


def test_invert_involution_8bit_within_ulp():
    x = np.arange(256) / 255
    assert np.abs(invert(invert(x)) - x).max() <= 2.0 ** -53


def test_clamp01():
    np.testing.assert_array_equal(clamp01(np.array([1.3, -0.1, 0.4])), [1.0, 0.0, 0.4])


@pytest.mark.parametrize('rgb, luma', [((1, 1, 1), 1.0), ((0, 0, 0), 0.0), ((1, 0, 0), 0.299)])
def test_to_gray_examples(rgb, luma):
    assert to_gray(np.array([[rgb]], float))[0, 0] == pytest.approx(luma, abs=1e-15)


@given(arrays(np.float64, (4, 5, 3), elements=st.floats(0, 1)))
def test_to_gray_range(img):
    g = to_gray(img)
    assert g.min() >= 0.0 and g.max() <= 1.0 + 1e-15
