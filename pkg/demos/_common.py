"""Shared helpers for the demo scripts: sample photos and an output folder."""
import os

import matplotlib
import numpy as np
from skimage import data, transform

matplotlib.use('Agg')

OUT = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'output')


def sample(name='astronaut', height=256):
    im = getattr(data, name)()[:, :, :3] / 255.0
    width = int(round(height * im.shape[1] / im.shape[0]))
    return np.clip(transform.resize(im, (height, width), anti_aliasing=True), 0, 1)


def mixed_exposure(img):
    """Left half darkened, right half washed out, with a smooth transition."""
    ramp = np.clip(np.linspace(-1.0, 2.0, img.shape[1]), 0, 1)[None, :, None]
    return ramp * (1 - (1 - img) * 0.3) + (1 - ramp) * img * 0.3


def savefig(fig, name):
    os.makedirs(OUT, exist_ok=True)
    path = os.path.join(OUT, name)
    fig.savefig(path, dpi=110, bbox_inches='tight')
    print('wrote', path)
