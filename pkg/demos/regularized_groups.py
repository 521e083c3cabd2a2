"""
Diagonal C-regularized groups
=============================

S(z) = exp(z Lambda) C satisfies S(z + w) C = S(z) S(w).  For the scalar
group exp(z), every nonzero w has preimages of arbitrarily large modulus,
one per branch of the logarithm.
"""

import numpy as np

from lindyn.groups import (
    RegularizedGroup,
    annulus_witness,
    check_group_axioms,
    derivative_shadow,
    sample_disk,
)

rng = np.random.default_rng(0)
lam = rng.uniform(-2, 2, 8) + 1j * rng.uniform(-2, 2, 8)
C = rng.uniform(0.5, 2.0, 8)
g = RegularizedGroup(lam, C)

rep = check_group_axioms(g, pair_count=100, seed=1, probes=np.eye(8))
print(f"scaled residual {rep.max_residual:.1e}, raw {rep.abs_residuals.max():.1e}")
print(f"derivative shadow {derivative_shadow(g, sample_disk(20, 2, 5.0), np.eye(8)):.1e}")

# a wrong C on one side breaks the identity
bad = check_group_axioms(g, 10, 1, np.eye(8), c_left=C * 1.01)
print("corrupted C verdict:", bad.verdict)

for w in (np.e, -1.0, 0.3 + 2j):
    z = annulus_witness(w, 100.0)
    print(f"w={w!s:>10}  z={z:.4f}  |z|={abs(z):.2f}  |exp z - w|={abs(np.exp(z) - w):.1e}")
