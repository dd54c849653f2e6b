"""
Illumination refinement
=======================

The max-RGB map of a dark photo is a noisy guess of its illumination. The
weighted smoothing keeps object boundaries and flattens texture, and dividing
by the refined map (raised to gamma) brightens the image without halos.
"""
import matplotlib.pyplot as plt
import numpy as np

from _common import sample, savefig
from exposurefix import illumination as il

# %% a darkened photo and its initial illumination
img = sample('coffee') * 0.25
L0 = il.initial_illumination(img)

# %% smoothness weights: large on flat/textured areas, small across edges
wx, wy = il.smoothness_weights(L0)
print('weight range  %.2e .. %.2e' % (min(wx.min(), wy.min()), max(wx.max(), wy.max())))

# %% refined illumination and recovery
L, info = il.estimate(img, return_info=True)
print('CG iterations', info.iterations, 'relative residual %.1e' % info.residual)
out = il.recover(img, L)

# the refined map stays inside the range of the initial one
assert L0.min() <= L.min() and L.max() <= L0.max()

# %% lambda controls how flat the illumination gets
maps = {lam: il.estimate(img, il.IlluminationParams(lam=lam)) for lam in (0.1, 0.3, 1.2)}

fig, ax = plt.subplots(2, 4, figsize=(14, 6))
panels = [(img, 'input'), (L0, 'max RGB'), (np.log10(wx), 'log10 wx'), (out, 'recovered')]
panels += [(m, f'L, lambda={lam}') for lam, m in maps.items()] + [(L, 'L, default')]
for a, (im, title) in zip(ax.ravel(), panels):
    a.imshow(im, cmap='gray')
    a.set_title(title)
    a.axis('off')
savefig(fig, 'illumination_refinement.png')
