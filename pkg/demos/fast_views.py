"""Fast view synthesis: a synthetic scene, its depth, and the parallax it produces."""

import numpy as np
from scipy import ndimage

from lightquilt.viewsynth import ViewRequest, fast_view, synthesize_fast, view_offsets

rng = np.random.default_rng(0)

# a smooth random texture stands in for a photo
noise = ndimage.gaussian_filter(rng.normal(size=(120, 160, 3)), sigma=(3, 3, 0))
photo = np.round((noise - noise.min()) / np.ptp(noise) * 255).astype(np.uint8)

# depth: 1 is near, 0 is far. a bright disc floating over a far backdrop
yy, xx = np.mgrid[0:120, 0:160]
depth = np.where((yy - 60) ** 2 + (xx - 80) ** 2 < 35**2, 1.0, 0.1)

print(view_offsets(5, 8.0))  # [-8, -4, 0, 4, 8] pixels of disparity at depth 1

views = synthesize_fast(photo, depth, ViewRequest(total_views=5, max_offset=8.0))
print(len(views), views[0].shape)
print(np.array_equal(views[2], photo))  # the middle view is the photo itself

# the disc moves 8 px in the last view, the backdrop only 0.8 px
right = fast_view(photo, np.ones((120, 160)), 8.0)
print(np.array_equal(right[:, 8:], photo[:, :-8]))  # uniform depth 1 is an exact 8 px shift
