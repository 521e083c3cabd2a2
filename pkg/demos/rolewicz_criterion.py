"""
The hypercyclicity criterion for Rolewicz operators
===================================================

T_k = (2B)^k and S_k = (F/2)^k on C^32.  Vectors supported on the first
eight coordinates are killed by T_k once k >= 8, S_k y shrinks like 2^-k,
and T_k S_k y = y as long as S_k does not push y off the truncation.
"""

import numpy as np

from lindyn.families import rolewicz_family
from lindyn.testers import check_criterion, transitivity_search

d = 32
rng = np.random.default_rng(0)
X0 = np.zeros((40, d), complex)
Y0 = np.zeros((40, d), complex)
X0[:, :8] = rng.standard_normal((40, 8))
Y0[:, :8] = rng.standard_normal((40, 8))

fam = rolewicz_family(d, 2.0, k_schedule=range(1, 25))
crit = fam.criterion
rep = check_criterion(crit.T, crit.S, X0, Y0, crit.k_schedule, tol=1e-6)
for k, a, b, c in zip(rep.k_schedule[::4], rep.r1[::4], rep.r2[::4], rep.r3[::4]):
    print(f"k={k:2d}  |T_k x|={a:9.3g}  |S_k y|={b:9.3g}  |T_k S_k y - y|={c:.1g}")
print("verdict:", rep.verdict)

# the constructive z = x + S_k y gives transitivity
res = transitivity_search(fam, X0[0], Y0[0], 1e-3, count=0)
print(f"transitivity via {res.source}: gap_in={res.gap_in:.2e} gap_out={res.gap_out:.2e}")
