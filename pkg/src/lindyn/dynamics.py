"""Orbits Orb(Gamma, x), epsilon-density certificates and the HC(Gamma) grid.

Density is only ever certified against an explicit finite target set.  The
nearest-entry search is an exact scan over every orbit entry with ties
broken by the lowest entry index.
"""

from __future__ import annotations

from collections.abc import Sequence as _SequenceABC
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

import numpy as np

from .families import OperatorFamily, sample_family, solve_witness
from .space import BasisBall, TargetGrid

__all__ = [
    "OrbitSample",
    "DensityCertificate",
    "HCGridResult",
    "compute_orbit",
    "certify_density",
    "nearest_entries",
    "hc_grid",
]


class ParamList(_SequenceABC):
    """Sampled params followed by witness params kept as array rows."""

    def __init__(self, head: Sequence = (), rows: Optional[np.ndarray] = None):
        self._head = list(head)
        self._rows = rows if rows is not None else np.zeros((0, 0), dtype=np.complex128)

    def __len__(self):
        return len(self._head) + self._rows.shape[0]

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self[j] for j in range(*i.indices(len(self)))]
        if i < 0:
            i += len(self)
        if i < len(self._head):
            return self._head[i]
        return tuple(complex(c) for c in self._rows[i - len(self._head)])


@dataclass
class OrbitSample:
    base: np.ndarray
    params: Sequence[Any]
    images: np.ndarray = field(repr=False)
    family_name: str = ""
    seed: int = 0
    n_sampled: int = 0

    def __len__(self):
        return self.images.shape[0]

    @property
    def entries(self):
        return list(zip(self.params, self.images))


def compute_orbit(family: OperatorFamily, x, count: int, seed: int = 0,
                  witness_targets=None) -> OrbitSample:
    """Sample `count` members of the family and apply them to `x`.

    With `witness_targets`, every target that the family's exact witness
    solver can reach is appended as one more entry (witness augmentation).
    """
    x = np.asarray(x, dtype=np.complex128)
    if x.shape != (family.dim,):
        raise ValueError(f"dimension mismatch: family dim {family.dim}, base shape {x.shape}")
    sampled = sample_family(family, count, seed)
    head = [p for p, _ in sampled]
    images = [op.apply(x) for _, op in sampled]
    rows = None
    if witness_targets is not None:
        Y = witness_targets.points if isinstance(witness_targets, TargetGrid) else np.atleast_2d(
            np.asarray(witness_targets, dtype=np.complex128))
        if family.witness_batch is not None:
            wp, ok = family.witness_batch(x, Y)
            wp = wp[ok]
            if len(wp):
                # image of T_p x for a witness p: reuse the family's member on a batch
                images.extend(_batch_images(family, wp, x))
            rows = wp
        elif family.witness_solver is not None:
            for y in Y:
                p = solve_witness(family, x, y)
                if p is not None:
                    head.append(p)
                    images.append(family.member(p).apply(x))
    imgs = np.array(images, dtype=np.complex128).reshape(-1, family.dim)
    return OrbitSample(x, ParamList(head, rows), imgs, family.name, seed, len(sampled))


def _batch_images(family: OperatorFamily, params: np.ndarray, x: np.ndarray) -> np.ndarray:
    if family.name == "poly_trunc":
        return params * x
    if family.name == "rank_one":
        f = family.info["functional"]
        e = family.info["anchor"]
        return (np.vdot(f, x) / np.vdot(f, e)) * params
    return np.array([family.member(tuple(p)).apply(x) for p in params])


@dataclass
class DensityCertificate:
    epsilon: float
    nearest: np.ndarray = field(repr=False)
    gaps: np.ndarray = field(repr=False)
    coverage: float
    max_gap: float
    verdict: bool

    @property
    def per_target(self):
        return [(i, int(j), float(g)) for i, (j, g) in enumerate(zip(self.nearest, self.gaps))]


def _row_keys(A: np.ndarray):
    # + 0.0 folds -0.0 into 0.0 so equal values hash equally
    A = np.ascontiguousarray(A + 0.0)
    return [row.tobytes() for row in A]


def nearest_entries(entries: np.ndarray, targets: np.ndarray, chunk: int = 4096):
    """Exact nearest entry for every target, lowest index on ties.

    Exact hits are matched by hashing.  The remaining targets are scanned
    against all entries through the expansion |y|^2 + |e|^2 - 2 Re<y, e>;
    every candidate within rounding slack of the minimum is re-measured
    directly before choosing.
    """
    E = np.asarray(entries, dtype=np.complex128)
    Y = np.asarray(targets, dtype=np.complex128)
    n_t = Y.shape[0]
    idx = np.full(n_t, -1, dtype=np.int64)
    if E.shape[0] == 0:
        return idx, np.full(n_t, np.inf)

    first = {}
    for j, key in enumerate(_row_keys(E)):
        first.setdefault(key, j)
    for i, key in enumerate(_row_keys(Y)):
        j = first.get(key)
        if j is not None:
            idx[i] = j

    rest = np.flatnonzero(idx < 0)
    if rest.size:
        en = np.einsum("ij,ij->i", E.conj(), E).real
        Eh = E.conj().T
        for s in range(0, rest.size, chunk):
            sel = rest[s : s + chunk]
            B = Y[sel]
            bn = np.einsum("ij,ij->i", B.conj(), B).real
            D = bn[:, None] + en[None, :] - 2.0 * (B @ Eh).real
            m = D.min(axis=1)
            slack = 1e-10 * (bn + en.max()) + 1e-300
            near = D <= (m + slack)[:, None]
            counts = near.sum(axis=1)
            best = D.argmin(axis=1)
            for r in np.flatnonzero(counts > 1):
                cand = np.flatnonzero(near[r])
                d = np.linalg.norm(E[cand] - B[r], axis=1)
                best[r] = cand[np.flatnonzero(d == d.min())[0]]
            idx[sel] = best
    gaps = np.linalg.norm(Y - E[idx], axis=1)
    return idx, gaps


def certify_density(orbit: OrbitSample, targets: TargetGrid | np.ndarray, epsilon: float) -> DensityCertificate:
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    Y = targets.points if isinstance(targets, TargetGrid) else np.atleast_2d(np.asarray(targets, dtype=np.complex128))
    if len(orbit) == 0:
        n = Y.shape[0]
        return DensityCertificate(epsilon, np.full(n, -1), np.full(n, np.inf), 0.0, float("inf"), False)
    idx, gaps = nearest_entries(orbit.images, Y)
    if Y.shape[0] == 0:
        return DensityCertificate(epsilon, idx, gaps, 1.0, 0.0, True)
    covered = gaps <= epsilon
    coverage = float(covered.mean())
    max_gap = float(gaps.max())
    return DensityCertificate(epsilon, idx, gaps, coverage, max_gap, bool(covered.all()))


@dataclass
class HCGridResult:
    candidates: np.ndarray = field(repr=False)
    N: int
    membership: np.ndarray
    witness: list = field(repr=False)

    @property
    def member_fraction(self) -> float:
        return float(np.mean(self.membership)) if len(self.membership) else 1.0


def hc_grid(family: OperatorFamily, candidates, balls: Sequence[BasisBall], count: int,
            seed: int = 0, use_witnesses: bool = False) -> HCGridResult:
    """Finite form of HC(Gamma) = intersection over n of union over T of T^-1(U_n).

    Candidate x is a member iff every ball U_n contains some recorded image
    T x.  With `use_witnesses`, the exact solver is tried on each ball's
    center before falling back to the sampled operators (first hit in sample
    order).
    """
    X = np.atleast_2d(np.asarray(candidates, dtype=np.complex128))
    if X.size == 0:
        X = X.reshape(0, family.dim)
    sampled = sample_family(family, count, seed)
    centers = np.array([b.center for b in balls], dtype=np.complex128).reshape(len(balls), family.dim)
    radii = np.array([b.radius for b in balls], dtype=float)
    membership = np.ones(X.shape[0], dtype=bool)
    witnesses = []
    for ci, x in enumerate(X):
        imgs = np.array([op.apply(x) for _, op in sampled]).reshape(len(sampled), family.dim)
        row = []
        for n in range(len(balls)):
            found = None
            if use_witnesses and family.witness_solver is not None:
                p = family.witness_solver(x, centers[n])
                if p is not None and np.linalg.norm(family.member(p).apply(x) - centers[n]) <= radii[n]:
                    found = p
            if found is None and len(sampled):
                inside = np.flatnonzero(np.linalg.norm(imgs - centers[n], axis=1) <= radii[n])
                if inside.size:
                    found = sampled[inside[0]][0]
            row.append(found)
            if found is None:
                membership[ci] = False
        witnesses.append(row)
    return HCGridResult(X, len(balls), membership, witnesses)
