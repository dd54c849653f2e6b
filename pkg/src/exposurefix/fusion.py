"""Quality-weighted Laplacian pyramid fusion of an exposure sequence."""
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import ndimage

from .image import as_rgb, to_gray

FUSION_MODES = ('wta', 'normalized')

BURT_ADELSON = np.array([1.0, 4.0, 6.0, 4.0, 1.0]) / 16.0

LAPLACIAN_3X3 = np.array([[0.0, 1.0, 0.0],
                          [1.0, -4.0, 1.0],
                          [0.0, 1.0, 0.0]])


@dataclass(frozen=True)
class FusionParams:
    beta_c: float = 1.0
    beta_s: float = 1.0
    beta_e: float = 1.0
    sigma_e: float = 0.2
    levels: object = 'auto'
    mode: str = 'wta'

    def __post_init__(self):
        for name in ('beta_c', 'beta_s', 'beta_e'):
            if getattr(self, name) < 0:
                raise ValueError(f'{name} must be non-negative')
        if not self.sigma_e > 0:
            raise ValueError(f'sigma_e must be positive, got {self.sigma_e}')
        if self.levels != 'auto' and (not isinstance(self.levels, (int, np.integer))
                                      or self.levels < 1):
            raise ValueError(f"levels must be 'auto' or an integer >= 1, got {self.levels!r}")
        if self.mode not in FUSION_MODES:
            raise ValueError(f'mode must be one of {FUSION_MODES}, got {self.mode!r}')


class QualityMaps(NamedTuple):
    maps: list
    mode: str


class ImagePyramid(NamedTuple):
    levels: list
    kind: str


# -- quality measures ---------------------------------------------------------

def contrast_measure(img):
    """Absolute 3x3 Laplacian response of the luma, replicate borders."""
    return np.abs(ndimage.correlate(to_gray(img), LAPLACIAN_3X3, mode='nearest'))


def saturation_measure(img):
    return as_rgb(img).std(axis=2)


def wellexposedness_measure(img, sigma_e=0.2):
    img = as_rgb(img)
    return np.exp(-((img - 0.5) ** 2).sum(axis=2) / (2.0 * sigma_e ** 2))


def visual_quality(img, params=None):
    p = params or FusionParams()
    # x**0 == 1 also for x == 0, so a zero exponent drops the measure
    return (contrast_measure(img) ** p.beta_c
            * saturation_measure(img) ** p.beta_s
            * wellexposedness_measure(img, p.sigma_e) ** p.beta_e)


def winner_take_all(qualities):
    """One-hot maps selecting the best image per pixel; ties go to the lowest index."""
    stack = np.stack([np.asarray(q, dtype=np.float64) for q in qualities])
    best = np.argmax(stack, axis=0)
    maps = [(best == k).astype(np.float64) for k in range(len(stack))]
    return QualityMaps(maps, 'wta')


def normalize_maps(qualities, tiny=1e-12):
    """Divide by the per-pixel sum; pixels with a vanishing sum get ``1/K`` each."""
    stack = np.stack([np.asarray(q, dtype=np.float64) for q in qualities])
    total = stack.sum(axis=0)
    degenerate = total < tiny
    safe = np.where(degenerate, 1.0, total)
    normalized = np.where(degenerate, 1.0 / len(stack), stack / safe)
    return QualityMaps(list(normalized), 'normalized')


# -- pyramids -----------------------------------------------------------------

def auto_depth(shape):
    """Deepest admissible pyramid: ``floor(log2(min(h, w))) - 1``, at least 1."""
    n = min(shape[0], shape[1])
    return max(int(np.floor(np.log2(n))) - 1, 1)


def _resolve_levels(shape, levels):
    limit = auto_depth(shape)
    if levels is None or levels == 'auto':
        return limit
    levels = int(levels)
    if levels < 1:
        raise ValueError(f'levels must be >= 1, got {levels}')
    if levels > limit:
        raise ValueError(f'{levels} pyramid levels requested but a {shape[0]}x{shape[1]} '
                         f'image supports at most {limit}')
    return levels


def _blur(x, scale=1.0, mode='nearest'):
    k = BURT_ADELSON * scale
    x = ndimage.correlate1d(x, k, axis=0, mode=mode)
    return ndimage.correlate1d(x, k, axis=1, mode=mode)


def downsample(x):
    return _blur(x)[::2, ::2]


def upsample(x, shape):
    """Interpolate `x` to `shape` (rows/cols) by zero insertion and blurring.

    The coarse grid is extended by one replicated sample on each side before
    zero insertion, so every output pixel sees a full set of taps and constant
    fields stay constant up to the border.
    """
    h, w = shape[:2]
    padded = np.pad(x, [(1, 1), (1, 1)] + [(0, 0)] * (x.ndim - 2), mode='edge')
    up = np.zeros((2 * padded.shape[0], 2 * padded.shape[1]) + x.shape[2:])
    up[::2, ::2] = padded
    return _blur(up, 2.0, mode='constant')[2:2 + h, 2:2 + w]


def gaussian_pyramid(field, levels='auto'):
    field = np.asarray(field, dtype=np.float64)
    n = _resolve_levels(field.shape, levels)
    out = [field]
    for _ in range(n - 1):
        out.append(downsample(out[-1]))
    return ImagePyramid(out, 'gaussian')


def laplacian_pyramid(img, levels='auto'):
    gauss = gaussian_pyramid(img, levels).levels
    out = [g - upsample(coarse, g.shape) for g, coarse in zip(gauss[:-1], gauss[1:])]
    out.append(gauss[-1])
    return ImagePyramid(out, 'laplacian')


def collapse(pyr):
    levels = pyr.levels if isinstance(pyr, ImagePyramid) else pyr
    out = levels[-1]
    for detail in reversed(levels[:-1]):
        out = detail + upsample(out, detail.shape)
    return out


# -- blending -----------------------------------------------------------------

def blend(images, weights, levels='auto', clamp=True):
    """Weighted Laplacian-pyramid blend of `images` under per-pixel `weights`."""
    images = [as_rgb(im) for im in images]
    if len(images) != len(weights):
        raise ValueError('need one weight map per image')
    shape = images[0].shape
    n = _resolve_levels(shape, levels)
    fused = None
    for im, wmap in zip(images, weights):
        if im.shape != shape or np.shape(wmap) != shape[:2]:
            raise ValueError('images and weight maps must share dimensions')
        lap = laplacian_pyramid(im, n).levels
        gw = gaussian_pyramid(wmap, n).levels
        terms = [g[:, :, None] * l for g, l in zip(gw, lap)]
        fused = terms if fused is None else [f + t for f, t in zip(fused, terms)]
    out = collapse(fused)
    return np.clip(out, 0.0, 1.0) if clamp else out


def quality_maps(images, params=None):
    p = params or FusionParams()
    qualities = [visual_quality(im, p) for im in images]
    if p.mode == 'wta':
        return winner_take_all(qualities)
    return normalize_maps(qualities)


def fuse(triplet, params=None, return_maps=False):
    """Fuse a ``(under, over, original)`` sequence into one image."""
    p = params or FusionParams()
    images = list(triplet)
    maps = quality_maps(images, p)
    out = blend(images, maps.maps, p.levels)
    if return_maps:
        return out, maps
    return out
