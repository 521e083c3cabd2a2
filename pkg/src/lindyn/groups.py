"""Diagonal C-regularized groups S(z) = exp(z * Lambda) C.

Diagonal generators make the group law S(z+w)C = S(z)S(w) hold exactly in
exact arithmetic, so every residual computed here is pure floating point
error.  Residuals are reported against the scale ``1 + |S(z)S(w)v|``
because rounding error grows with |exp(z*lambda)|, which reaches e**20 for
|z+w| <= 10 and |lambda| <= 2.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .families import OperatorFamily, _disk
from .operators import Diagonal

__all__ = [
    "RegularizedGroup",
    "GroupAxiomReport",
    "group_apply",
    "check_group_axioms",
    "derivative_shadow",
    "annulus_witness",
    "scalar_exp_group",
    "diag_exp_group_family",
    "difference_candidates",
    "sample_disk",
]


@dataclass(frozen=True, eq=False)
class RegularizedGroup:
    generator: np.ndarray
    C: np.ndarray
    name: str = "diag_exp_group"

    def __post_init__(self):
        lam = np.asarray(self.generator, dtype=np.complex128).ravel()
        c = np.asarray(self.C, dtype=np.complex128).ravel()
        if lam.shape != c.shape:
            raise ValueError("generator and C must have the same length")
        if np.any(np.abs(c) == 0):
            raise ValueError("C must have all diagonal entries nonzero (dense range)")
        object.__setattr__(self, "generator", lam)
        object.__setattr__(self, "C", c)

    @property
    def dim(self) -> int:
        return self.generator.shape[0]

    def operator(self, z: complex) -> Diagonal:
        return Diagonal(np.exp(complex(z) * self.generator) * self.C)

    def apply(self, z: complex, v) -> np.ndarray:
        return group_apply(self, z, v)


def group_apply(group: RegularizedGroup, z: complex, v) -> np.ndarray:
    v = np.asarray(v, dtype=np.complex128)
    if v.shape[-1] != group.dim:
        raise ValueError(f"dimension mismatch: group dim {group.dim}, vector shape {v.shape}")
    return np.exp(complex(z) * group.generator) * group.C * v


def scalar_exp_group() -> RegularizedGroup:
    """S(z)x = exp(z) x on C."""
    return RegularizedGroup([1.0], [1.0], name="scalar_exp")


def sample_disk(count: int, seed: int, radius: float = 5.0) -> np.ndarray:
    return _disk(np.random.default_rng(seed), count, radius)


@dataclass
class GroupAxiomReport:
    pairs: list
    residuals: np.ndarray
    abs_residuals: np.ndarray = field(repr=False)
    tol: float
    verdict: bool

    @property
    def max_residual(self) -> float:
        return float(self.residuals.max()) if self.residuals.size else 0.0


def check_group_axioms(group: RegularizedGroup, pair_count: int, seed: int, probes,
                       tol: float = 1e-9, radius: float = 5.0,
                       pairs: Optional[Sequence] = None,
                       c_left: Optional[Sequence] = None) -> GroupAxiomReport:
    """Check S(z+w)Cv = S(z)S(w)v on sampled pairs and probes.

    `c_left` replaces C on the left-hand side only; it exists to exercise the
    failure path.  The residual of a pair is
    ``max_v |S(z+w)C'v - S(z)S(w)v| / (1 + |S(z)S(w)v|)``.
    """
    P = np.atleast_2d(np.asarray(probes, dtype=np.complex128))
    if P.shape[0] == 0:
        raise ValueError("probes must be nonempty")
    if pairs is None:
        rng = np.random.default_rng(seed)
        zs = _disk(rng, pair_count, radius)
        ws = _disk(rng, pair_count, radius)
        pairs = list(zip(zs.tolist(), ws.tolist()))
    cl = group.C if c_left is None else np.asarray(c_left, dtype=np.complex128)
    rel, absr = [], []
    for z, w in pairs:
        lhs = np.exp(complex(z + w) * group.generator) * cl * (group.C * P)
        rhs = group_apply(group, z, group_apply(group, w, P))
        diff = np.linalg.norm(lhs - rhs, axis=1)
        absr.append(diff.max())
        rel.append((diff / (1.0 + np.linalg.norm(rhs, axis=1))).max())
    rel = np.asarray(rel)
    return GroupAxiomReport(list(pairs), rel, np.asarray(absr), tol, bool(np.all(rel <= tol)))


def derivative_shadow(group: RegularizedGroup, zs, probes, step: float = 1e-4) -> float:
    """Largest scaled gap between a central difference of z -> S(z)x and Lambda S(z)x.

    This is the sampled stand-in for entirety of the orbit maps.
    """
    P = np.atleast_2d(np.asarray(probes, dtype=np.complex128))
    worst = 0.0
    for z in np.asarray(zs, dtype=np.complex128).ravel():
        fd = (group_apply(group, z + step, P) - group_apply(group, z - step, P)) / (2 * step)
        exact = group.generator * group_apply(group, z, P)
        gap = np.linalg.norm(fd - exact, axis=1) / (1.0 + np.linalg.norm(exact, axis=1))
        worst = max(worst, float(gap.max()))
    return worst


def annulus_witness(w: complex, r: float) -> complex:
    """Return z with exp(z) = w and |z| >= r, taking the smallest branch k >= 0.

    z = ln|w| + i(Arg w + 2 pi k).
    """
    w = complex(w)
    if not abs(w) > 1e-300:
        raise ValueError("exp never vanishes: no witness for w = 0")
    if r < 0:
        raise ValueError("r must be nonnegative")
    re = np.log(abs(w))
    arg = np.angle(w)
    k = 0
    if abs(complex(re, arg)) < r:
        # |Im| >= sqrt(r^2 - re^2) is enough; start close and step up
        need = np.sqrt(max(r * r - re * re, 0.0))
        k = max(0, int(np.floor((need - arg) / (2 * np.pi))))
        while abs(complex(re, arg + 2 * np.pi * k)) < r:
            k += 1
    return complex(re, arg + 2 * np.pi * k)


def _group_witness(group: RegularizedGroup):
    lam, c = group.generator, group.C

    def witness(x, y):
        x = np.asarray(x, dtype=np.complex128)
        y = np.asarray(y, dtype=np.complex128)
        if np.any((x == 0) != (y == 0)):
            return None
        idx = np.flatnonzero((x != 0) & (lam != 0))
        if idx.size == 0:
            return None
        i = idx[0]
        z = complex(np.log(y[i] / (c[i] * x[i])) / lam[i])
        if np.linalg.norm(group_apply(group, z, x) - y) > 1e-10 * (1 + np.linalg.norm(y)):
            return None
        return z

    return witness


def diag_exp_group_family(group: RegularizedGroup, radius: float = 5.0,
                          z_sampler: Optional[dict] = None) -> OperatorFamily:
    """Gamma = {S(z) : z in C}, sampled uniformly in a disk.

    The witness solver takes the principal logarithm on the first usable
    coordinate and accepts it only if every coordinate agrees; it is exact
    for d = 1.  Parameter arithmetic A = S(z1 - z2) gives
    S(z1 - z2) S(z2) = S(z1) C, i.e. closure whenever C = I.
    """
    if z_sampler:
        radius = float(z_sampler.get("radius", radius))

    def sampler(count, seed):
        return sample_disk(count, seed, radius).tolist()

    return OperatorFamily(
        "diag_exp_group", group.dim, group.operator, sampler,
        parameter_domain=f"z in C, |z| <= {radius}",
        witness_solver=_group_witness(group),
        closure_param=lambda zt, zs: complex(zt) - complex(zs),
        info={"group": group},
    )


def difference_candidates(family: OperatorFamily, base, x, y) -> list:
    """Operators built from hits of the orbit of `base`.

    If S(z2) base = x and S(z1) base = y, then S(z1 - z2) x = y when C = I
    (and = C y in general).  Returns ``[(z3, S(z3))]`` or ``[]``.
    """
    if family.witness_solver is None:
        return []
    z2 = family.witness_solver(np.asarray(base, dtype=np.complex128), np.asarray(x, dtype=np.complex128))
    z1 = family.witness_solver(np.asarray(base, dtype=np.complex128), np.asarray(y, dtype=np.complex128))
    if z1 is None or z2 is None:
        return []
    z3 = complex(z1) - complex(z2)
    return [(z3, family.member(z3))]
