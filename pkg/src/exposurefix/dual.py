"""Forward and reverse exposure correction.

Overexposed regions look underexposed once the image is inverted, so the
same brightening step applied to ``1 - I`` and inverted back darkens them.
"""
from concurrent.futures import ThreadPoolExecutor
from typing import NamedTuple

import numpy as np

from . import illumination
from .image import as_rgb, invert


class ExposureTriplet(NamedTuple):
    """Fusion sequence, in the order used for tie-breaking."""

    under_corrected: np.ndarray
    over_corrected: np.ndarray
    original: np.ndarray


def correct_underexposure(img, params=None, settings=None, return_details=False):
    """Brighten `img` by its estimated illumination.

    With ``return_details=True`` also returns the illumination map and the
    solver info.
    """
    params = params or illumination.IlluminationParams()
    img = as_rgb(img)
    illum, info = illumination.estimate(img, params, settings, return_info=True)
    out = illumination.recover(img, illum, params.gamma, params.illum_floor)
    if return_details:
        return out, illum, info
    return out


def correct_overexposure(img, params=None, settings=None, return_details=False):
    """Darken overexposed regions by correcting the inverted image."""
    res = correct_underexposure(invert(as_rgb(img)), params, settings, return_details)
    if return_details:
        out, illum, info = res
        return invert(out), illum, info
    return invert(res)


def make_triplet(img, params=None, settings=None, parallel=False, return_details=False):
    """Compute ``(under-corrected, over-corrected, original)``.

    The two passes are independent; ``parallel=True`` runs them on two
    threads. Results do not depend on the execution order.

    With ``return_details=True`` returns ``(triplet, details)`` where details
    maps ``'forward'`` / ``'reverse'`` to ``(illumination, SolveInfo)``.
    """
    img = as_rgb(img)
    passes = (correct_underexposure, correct_overexposure)
    if parallel:
        with ThreadPoolExecutor(max_workers=2) as pool:
            futures = [pool.submit(f, img, params, settings, True) for f in passes]
            (under, l_fwd, i_fwd), (over, l_rev, i_rev) = [f.result() for f in futures]
    else:
        (under, l_fwd, i_fwd), (over, l_rev, i_rev) = [f(img, params, settings, True) for f in passes]

    triplet = ExposureTriplet(under, over, img)
    if return_details:
        return triplet, {'forward': (l_fwd, i_fwd), 'reverse': (l_rev, i_rev)}
    return triplet
