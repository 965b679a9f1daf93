"""
Unitarizing a bounded group
===========================

For a finite group H of invertible elements, the circumcenter a of the orbit
{h h*} satisfies h a h* = a, so s = a^{-1/2} makes every s h s^{-1} unitary.
"""

import numpy as np

from tracecone import BlockAlgebra, OrderExceeded, close_group, unitarize, unitarize_group, verify_certificate
from tracecone.synth import synthesize

np.set_printoptions(precision=6, suppress=True)

# h = [[0, -2], [1/2, 0]] has h^2 = -1, so it generates a group of order 4
alg = BlockAlgebra.matrices(2)
h = alg.element([[[0.0, -2.0], [0.5, 0.0]]])
cert = unitarize([h])
print("center a:\n", cert.center.blocks[0].real)
print("s h s^-1:\n", cert.conjugate(h).blocks[0].real)

# a hidden conjugate of a unitary dihedral group spread over two blocks
inst, hidden = synthesize([3, 2], "dihedral-5", cond=3.0, seed=4, weights=[0.6, 0.4])
table = close_group(inst.generators)
print(f"\n{hidden['group']}: order {table.order}, uniform bound M = {table.uniform_bound:.4f}")
for method in ("circumcenter", "karcher"):
    cert = unitarize_group(table, method=method)
    print(f"  {method:12s} unitarity {cert.residual_unitarity:.1e}  fixed point {cert.residual_fixed_point:.1e}"
          f"  s in P(1/M, M): {cert.unitarizer_band_ok}  verified: {verify_certificate(cert, table, 1e-8)}")

# a generator with growing powers is rejected, never certified
try:
    unitarize([alg.diag([2.0, 0.5])])
except OrderExceeded as exc:
    print("\ndiag(2, 1/2):", exc)
