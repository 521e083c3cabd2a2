"""
Conjugation and direct sums
===========================

phi T phi^-1 carries orbits of T to orbits of the conjugate family, and
distances grow by at most |phi|.  A direct sum acts blockwise, so its
orbit projects onto the orbits of the components.
"""

import numpy as np

from lindyn.dynamics import certify_density, compute_orbit
from lindyn.families import default_base, make_family
from lindyn.space import make_target_grid
from lindyn.structure import (
    PairedFamily,
    conjugate_family,
    derive_seed,
    direct_sum_family,
    project_component,
    random_conjugation,
)

fam = make_family("rank_one", 4)
phi = random_conjugation(4, cond=10.0, seed=0)
img = conjugate_family(fam, phi)
print(f"|phi| = {phi.operator_norm_bound:.4f}")
print(f"intertwining residual {PairedFamily(fam, img, phi).max_residual(16, 0, np.eye(4)):.1e}")

x = default_base(4)
a = compute_orbit(fam, x, 32, seed=3)
b = compute_orbit(img, phi.apply(x), 32, seed=3)
print(f"orbit transfer error {np.abs(phi.apply(a.images) - b.images).max():.1e}")

# direct sum of a scalar family and a rank-one family
parts = [make_family("scalar", 1), make_family("rank_one", 2)]
ds = direct_sum_family(parts)
base = np.array([1.0, 1.0, 0.5], complex)
orb = compute_orbit(ds, base, 256, seed=7)
for i, f in enumerate(parts):
    sub = project_component(orb, i, ds.info["dims"])
    grid = make_target_grid(f.dim, "lattice", 1.0, spacing=0.5, effective_dims=1)
    cert = certify_density(sub, grid, 0.5)
    same = np.allclose(sub.images, compute_orbit(f, sub.base, 256, derive_seed(7, i)).images)
    print(f"component {i}: coverage={cert.coverage:.2f} matches standalone orbit={same}")
