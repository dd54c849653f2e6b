"""Illumination estimation and Retinex-style recovery.

The initial illumination is the per-pixel maximum over RGB. It is refined by
weighted least squares whose smoothness weights combine the local gradient
with a windowed, Gaussian-weighted gradient sum: texture (gradients that
cancel inside the window) gets large weights and is smoothed away, while
coherent structure edges keep small weights.
"""
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from . import solver
from .image import as_rgb


@dataclass(frozen=True)
class IlluminationParams:
    lam: float = 0.15
    gamma: float = 0.6
    sigma: float = 3.0
    window: int = 15
    eps: float = 1e-3
    illum_floor: float = 1e-6
    squared_affinity: bool = False

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError(f'lambda must be non-negative, got {self.lam}')
        if not 0 < self.gamma <= 1:
            raise ValueError(f'gamma must lie in (0, 1], got {self.gamma}')
        if not self.sigma > 0:
            raise ValueError(f'sigma must be positive, got {self.sigma}')
        if self.window < 3 or self.window % 2 == 0:
            raise ValueError(f'window must be odd and >= 3, got {self.window}')
        if not self.eps > 0:
            raise ValueError(f'eps must be positive, got {self.eps}')
        if not self.illum_floor > 0:
            raise ValueError(f'illum_floor must be positive, got {self.illum_floor}')


def initial_illumination(img):
    return as_rgb(img).max(axis=2)


def gaussian_affinity(sigma, window, squared=False):
    """``window`` x ``window`` kernel ``exp(-D / (2 sigma^2))`` around the centre.

    ``D`` is the Euclidean distance to the centre pixel, or its square when
    `squared` is set (the usual Gaussian).
    """
    if window % 2 == 0:
        raise ValueError(f'window must be odd, got {window}')
    r = window // 2
    yy, xx = np.mgrid[-r:r + 1, -r:r + 1]
    dist2 = (xx * xx + yy * yy).astype(np.float64)
    dist = dist2 if squared else np.sqrt(dist2)
    return np.exp(-dist / (2.0 * sigma * sigma))


def forward_diff(field, axis):
    """Forward difference along `axis`; zero at the last column/row."""
    field = np.asarray(field, dtype=np.float64)
    out = np.zeros_like(field)
    if axis == 1:
        out[:, :-1] = field[:, 1:] - field[:, :-1]
    else:
        out[:-1] = field[1:] - field[:-1]
    return out


def window_mass(shape, kernel):
    """Sum of the kernel entries that fall inside the image, per pixel."""
    return ndimage.correlate(np.ones(shape), kernel, mode='constant', cval=0.0)


def texture_weight(dL, sigma, window, eps, squared=False, mass=None):
    """Windowed ratio ``sum(G) / (|sum(G * dL)| + eps)``.

    Windows are cropped at the image border: both sums run over in-bounds
    pixels only. `mass` may pass a precomputed :func:`window_mass`.
    """
    kernel = gaussian_affinity(sigma, window, squared)
    dL = np.asarray(dL, dtype=np.float64)
    if mass is None:
        mass = window_mass(dL.shape, kernel)
    response = ndimage.correlate(dL, kernel, mode='constant', cval=0.0)
    return mass / (np.abs(response) + eps)


def smoothness_weights(initial, params=None):
    """Horizontal and vertical smoothness weights of the refinement."""
    p = params or IlluminationParams()
    initial = np.asarray(initial, dtype=np.float64)
    mass = window_mass(initial.shape, gaussian_affinity(p.sigma, p.window, p.squared_affinity))
    weights = []
    for axis in (1, 0):
        d = forward_diff(initial, axis)
        t = texture_weight(d, p.sigma, p.window, p.eps, p.squared_affinity, mass)
        weights.append(t / (np.abs(d) + p.eps))
    return weights[0], weights[1]


def estimate(img, params=None, settings=None, return_info=False):
    """Refined illumination map of `img`.

    The minimizer is a convex combination of the initial illumination (the
    system matrix is an M-matrix whose rows sum to one against constants), so
    the iterative solution is projected onto ``[min L0, max L0]``; this can
    only move it closer to the exact minimizer.
    """
    p = params or IlluminationParams()
    initial = initial_illumination(img)
    wx, wy = smoothness_weights(initial, p)
    system = solver.assemble(initial, wx, wy, p.lam)
    illum, info = solver.solve_cg(system, settings, return_info=True)
    illum = np.clip(illum, initial.min(), initial.max())
    if return_info:
        return illum, info
    return illum


def recover(img, illum, gamma=0.6, illum_floor=1e-6):
    """Divide each channel by the gamma-adjusted illumination and clamp."""
    img = as_rgb(img)
    denom = np.maximum(np.asarray(illum, dtype=np.float64), illum_floor) ** gamma
    return np.clip(img / denom[:, :, None], 0.0, 1.0)
