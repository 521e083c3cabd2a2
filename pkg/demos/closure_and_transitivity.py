"""
Closure T = AS and transitivity testing
=======================================

Scalar multiples of the identity are closed under quotients, rank-one
families are not: T_x S_x' is again rank one but the anchor is lost.
"""

import numpy as np

from lindyn.families import make_family, scalar_family
from lindyn.testers import closure_check, transitivity_report

rep = closure_check(scalar_family(1), count=6, seed=0, probes=[[1.0], [1j]], tol=1e-10)
print(f"scalar: pairs={len(rep.pairs)} max_residual={rep.max_residual:.1e} verdict={rep.verdict}")

fam = make_family("rank_one", 3)
rep = closure_check(fam, count=5, seed=0, probes=np.eye(3), tol=1e-9)
ce = rep.counterexample
print(f"rank_one: verdict={rep.verdict} worst residual={ce['residual']:.3f}")

# least-squares search vs exact witnesses
rng = np.random.default_rng(1)
pairs = [(rng.standard_normal(3) + 0j, rng.standard_normal(3) + 0j) for _ in range(10)]
for use in (False, True):
    tr = transitivity_report(fam, pairs, delta=1e-3, count=64, use_witnesses=use)
    print(f"use_witnesses={use}: success_rate={tr.success_rate:.2f}")
