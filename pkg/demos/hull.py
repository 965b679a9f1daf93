"""
Iterated geodesic hulls
=======================

X_1 is a finite set, X_{n+1} adds points on the geodesics between pairs of
X_n.  Each generation of a set inside a band stays inside the band.
"""

import numpy as np

from tracecone import Band, BlockAlgebra, hull_expand, in_band
from tracecone.sampling import random_positive

alg = BlockAlgebra.matrices(3)
rng = np.random.default_rng(3)
band = Band(0.5, 2.0)
seeds = [random_positive(alg, rng, 0.5, 2.0) for _ in range(4)]

hull = hull_expand(seeds, depth=3, samples_per_pair=5, max_points=800, seed=1)
for n, gen in enumerate(hull.generations, start=1):
    inside = sum(in_band(p, band) for p in gen)
    print(f"X_{n}: {len(gen):4d} points, {inside} inside the band, subsampled={hull.subsampled[n - 1]}")
