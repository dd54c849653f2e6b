"""Raster helpers and PNG/JPEG I/O.

Images are plain ``float64`` numpy arrays of shape ``(H, W, 3)`` with values
nominally in ``[0, 1]``; single-channel maps are ``(H, W)`` arrays.
"""
import os

import cv2
import numpy as np

SUPPORTED_EXTENSIONS = ('.png', '.jpg', '.jpeg')

LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])


class ImageFormatError(ValueError):
    """Raised when a file exists but cannot be decoded as a supported image."""


def as_rgb(img):
    """Return `img` as a float64 ``(H, W, 3)`` array, validating the shape."""
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 3 or img.shape[2] != 3:
        raise ValueError(f'expected an (H, W, 3) image, got shape {img.shape}')
    if img.shape[0] < 1 or img.shape[1] < 1:
        raise ValueError('image must be at least 1x1')
    return img


def load(path):
    """Load a PNG or JPEG file as an RGB float image in ``[0, 1]``.

    8-bit samples are divided by 255 and 16-bit samples by 65535. Grayscale
    files are replicated to three channels and alpha is dropped.

    Raises
    ------
    FileNotFoundError
        If `path` does not exist.
    ImageFormatError
        If the file has an unsupported extension or cannot be decoded.
    """
    path = os.fspath(path)
    if not os.path.isfile(path):
        raise FileNotFoundError(path)
    if not path.lower().endswith(SUPPORTED_EXTENSIONS):
        raise ImageFormatError(f'unsupported image format: {path}')
    raw = cv2.imread(path, cv2.IMREAD_UNCHANGED)
    if raw is None:
        raise ImageFormatError(f'could not decode image: {path}')

    if raw.dtype == np.uint8:
        scale = 255.0
    elif raw.dtype == np.uint16:
        scale = 65535.0
    else:
        raise ImageFormatError(f'unsupported sample type {raw.dtype}: {path}')

    if raw.ndim == 2:
        rgb = np.repeat(raw[:, :, None], 3, axis=2)
    elif raw.shape[2] == 1:
        rgb = np.repeat(raw, 3, axis=2)
    elif raw.shape[2] == 2:
        # gray + alpha
        rgb = np.repeat(raw[:, :, :1], 3, axis=2)
    else:
        rgb = raw[:, :, 2::-1]  # BGR(A) -> RGB
    return rgb.astype(np.float64) / scale


def to_uint8(values):
    """Quantize ``[0, 1]`` values to bytes with round-half-up."""
    values = np.asarray(values, dtype=np.float64)
    return np.floor(np.clip(values, 0.0, 1.0) * 255.0 + 0.5).astype(np.uint8)


def save(img, path):
    """Write an image or a single-channel map as an 8-bit PNG.

    The caller is expected to clamp first; values are still clipped to
    ``[0, 1]`` before quantization so the byte encoding is always defined.
    """
    path = os.fspath(path)
    img = np.asarray(img)
    data = to_uint8(img)
    if data.ndim == 3:
        data = np.ascontiguousarray(data[:, :, ::-1])
    try:
        ok = cv2.imwrite(path, data)
    except cv2.error as exc:
        raise OSError(f'could not write {path}: {exc}') from exc
    if not ok:
        raise OSError(f'could not write {path}')


def invert(img):
    return 1.0 - np.asarray(img, dtype=np.float64)


def clamp01(img):
    return np.clip(img, 0.0, 1.0)


def to_gray(img):
    """BT.601 luma of an RGB image."""
    img = as_rgb(img)
    return img @ LUMA_WEIGHTS
