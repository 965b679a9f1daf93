"""
Distances and geodesics in the positive cone
=============================================

Points are positive invertible elements of a block matrix algebra with a
normalized trace.  The distance between two points depends only on the
eigenvalues of a^{-1/2} b a^{-1/2}.
"""

import math

import numpy as np

from tracecone import Band, BlockAlgebra, congruence, distance, geodesic, in_band, midpoint
from tracecone.sampling import random_invertible, random_positive

# one 2x2 block with trace weight 1: tau(x) = tr(x)/2
alg = BlockAlgebra.matrices(2)
one = alg.identity()
b = alg.diag([math.e ** 2, math.e ** -2])
print("d(1, diag(e^2, e^-2)) =", distance(one, b))  # sqrt((4 + 4)/2) = 2

# the geodesic from 1 to diag(4, 1/4) passes through diag(2, 1/2) at t = 1/2
print(geodesic(one, alg.diag([4.0, 0.25]), 0.5).blocks[0].real)

# two blocks with unequal weights
alg = BlockAlgebra.from_dims((2, 3), (0.4, 0.6))
rng = np.random.default_rng(0)
a, b = random_positive(alg, rng), random_positive(alg, rng)
z = midpoint(a, b)
print("d(a,b) = %.6f, d(a,z) = %.6f, d(z,b) = %.6f" % (distance(a, b), distance(a, z), distance(z, b)))

# g a g* is an isometry, even for badly conditioned g
g = random_invertible(alg, rng, cond=1e3)
print("after congruence: %.6f" % distance(congruence(g, a), congruence(g, b)))

# distance along two geodesics is convex in t
c, d = random_positive(alg, rng), random_positive(alg, rng)
ts = np.linspace(0, 1, 11)
along = np.array([distance(geodesic(a, b, t), geodesic(c, d, t)) for t in ts])
print("second differences (all >= 0):", np.round(along[:-2] - 2 * along[1:-1] + along[2:], 6))

# bands P(c1, c2) = {c1 <= a <= c2}: bounded and geodesically convex
band = Band(0.25, 4.0)
p, q = random_positive(alg, rng, 0.25, 4.0), random_positive(alg, rng, 0.25, 4.0)
print("d(p,q) = %.4f <= ln 16 = %.4f" % (distance(p, q), band.diameter_bound))
print("geodesic stays in band:", all(in_band(geodesic(p, q, t), band) for t in ts))
