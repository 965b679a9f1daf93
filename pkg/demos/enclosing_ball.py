"""
Minimal enclosing balls
=======================

Every finite set of the cone has a unique smallest enclosing ball.  Its
center is computed from a farthest-point warm start followed by a
log-barrier Newton polish; the Karcher mean is shown for comparison.
"""

import numpy as np

from tracecone import BlockAlgebra, circumcenter, distance, karcher_mean, midpoint
from tracecone.sampling import random_positive

alg = BlockAlgebra.matrices(2)
x, y = alg.identity(), alg.diag([4.0, 0.25])
ball = circumcenter([x, y])
print("two points: radius %.12f, d/2 = %.12f" % (ball.radius, distance(x, y) / 2))
print("center - midpoint:", distance(ball.center, midpoint(x, y)))

# a symmetric diagonal triple has its center at 1
S = [alg.identity(), alg.diag([4.0, 0.25]), alg.diag([0.25, 4.0])]
print("symmetric triple:", circumcenter(S).center.blocks[0].real.round(10))

alg = BlockAlgebra.from_dims((2, 3), (0.4, 0.6))
rng = np.random.default_rng(7)
S = [random_positive(alg, rng) for _ in range(8)]
ball = circumcenter(S)
print(f"8 points: radius {ball.radius:.10f} after {ball.iterations} iterations, converged={ball.converged}")
print("best radius every 25 iterations:", np.round(ball.radius_history[::25], 6))

mean = karcher_mean(S)
print("Karcher mean: max distance %.6f (not minimal)" % max(distance(mean, p) for p in S))
