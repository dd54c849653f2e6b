"""
Quality maps and pyramid fusion
===============================

Each image of the sequence gets a per-pixel quality (contrast x saturation x
well-exposedness). Keeping only the best image per pixel gives sharper
results than averaging, and blending in a Laplacian pyramid hides the seams
between regions taken from different images.
"""
import matplotlib.pyplot as plt
import numpy as np

from _common import mixed_exposure, sample, savefig
from exposurefix import dual, fusion

img = mixed_exposure(sample('astronaut'))
triplet = dual.make_triplet(img)

# %% measures of one sequence image
under = triplet.under_corrected
measures = {'contrast': fusion.contrast_measure(under),
            'saturation': fusion.saturation_measure(under),
            'well-exposedness': fusion.wellexposedness_measure(under)}

# %% pyramids are exactly invertible, also for odd sizes
odd = img[:255, :251]
pyr = fusion.laplacian_pyramid(odd)
print(len(pyr.levels), 'levels, round-trip error',
      np.abs(fusion.collapse(pyr) - odd).max())

# %% winner-take-all against normalized maps
wta, maps = fusion.fuse(triplet, return_maps=True)
soft = fusion.fuse(triplet, fusion.FusionParams(mode='normalized'))
share = [m.mean() for m in maps.maps]
print('pixels taken from (under, over, original): %.2f %.2f %.2f' % tuple(share))

fig, ax = plt.subplots(2, 4, figsize=(15, 7))
panels = list(measures.items()) + [('winner index', np.argmax(np.stack(maps.maps), axis=0))]
panels += [('input', img), ('normalized maps', soft), ('winner-take-all', wta),
           ('under-exposure corrected', under)]
for a, (title, im) in zip(ax.ravel(), panels):
    a.imshow(im, cmap='gray')
    a.set_title(title)
    a.axis('off')
savefig(fig, 'fusion_maps.png')
