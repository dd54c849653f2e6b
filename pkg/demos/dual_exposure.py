"""
Forward and reverse passes
==========================

Brightening the image fixes its dark regions. Brightening the inverted image
and inverting back fixes the washed-out ones. Together with the input they
form a three-image sequence for fusion.
"""
import matplotlib.pyplot as plt
import numpy as np

from _common import mixed_exposure, sample, savefig
from exposurefix import dual
from exposurefix.image import invert

img = mixed_exposure(sample('chelsea'))

# %% the two passes are independent and can run side by side
triplet, details = dual.make_triplet(img, parallel=True, return_details=True)

# %% under-correction only brightens, over-correction only darkens
assert (triplet.under_corrected >= img - 1e-9).all()
assert (triplet.over_corrected <= img + 1e-9).all()

# %% the reverse pass is literally the forward pass on the inverted image
check = invert(dual.correct_underexposure(invert(img)))
print('duality max diff', np.abs(check - triplet.over_corrected).max())

# %% constant images have closed forms: v -> v**0.4 and 1 - (1 - v)**0.4
flat = dual.make_triplet(np.full((8, 8, 3), 0.25))
print('constant 0.25: under-corrected %.4f, over-corrected %.4f' % (flat.under_corrected[0, 0, 0], flat.over_corrected[0, 0, 0]))

fig, ax = plt.subplots(1, 5, figsize=(17, 3.5))
panels = [(img, 'input'), (details['forward'][0], 'forward illumination'),
          (triplet.under_corrected, 'under-exposure corrected'),
          (details['reverse'][0], 'reverse illumination'),
          (triplet.over_corrected, 'over-exposure corrected')]
for a, (im, title) in zip(ax, panels):
    a.imshow(im, cmap='gray')
    a.set_title(title)
    a.axis('off')
savefig(fig, 'dual_exposure.png')
