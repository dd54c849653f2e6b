"""Automatic exposure correction by dual illumination estimation and fusion.

Typical use::

    from exposurefix import load, save, correct_exposure
    result = correct_exposure(load('photo.jpg'))
    save(result.image, 'photo_fixed.png')
"""
__version__ = '0.1.0'

from .dual import ExposureTriplet, correct_overexposure, correct_underexposure, make_triplet
from .fusion import FusionParams, fuse
from .illumination import IlluminationParams, estimate, recover
from .image import clamp01, invert, load, save, to_gray
from .pipeline import CorrectionResult, PipelineConfig, correct_exposure
from .solver import ConvergenceError, SolverSettings

__all__ = [
    'ConvergenceError', 'CorrectionResult', 'ExposureTriplet', 'FusionParams',
    'IlluminationParams', 'PipelineConfig', 'SolverSettings', 'clamp01',
    'correct_exposure', 'correct_overexposure', 'correct_underexposure', 'estimate',
    'fuse', 'invert', 'load', 'make_triplet', 'recover', 'save', 'to_gray',
]
