"""Similarity transforms and direct sums of operator families."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .dynamics import OrbitSample
from .families import OperatorFamily, sample_family
from .operators import Compose, DirectSum, Matrix, Operator

__all__ = [
    "ConjugationMap",
    "PairedFamily",
    "spectral_norm",
    "random_conjugation",
    "conjugate_family",
    "intertwining_residual",
    "direct_sum_family",
    "project_component",
    "derive_seed",
]


def spectral_norm(M, iters: int = 200, tol: float = 1e-10, seed: int = 0) -> tuple[float, bool]:
    """Largest singular value by power iteration on M*M.

    Returns ``(sigma, converged)``.
    """
    M = np.asarray(M, dtype=np.complex128)
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(M.shape[1]) + 1j * rng.standard_normal(M.shape[1])
    v /= np.linalg.norm(v)
    G = M.conj().T @ M
    lam = 0.0
    for _ in range(iters):
        w = G @ v
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0, True
        new = float(np.vdot(v, w).real)
        v = w / nw
        if abs(new - lam) <= tol * max(1.0, abs(new)):
            return float(np.sqrt(max(new, 0.0))), True
        lam = new
    return float(np.sqrt(max(lam, 0.0))), False


@dataclass(frozen=True, eq=False)
class ConjugationMap:
    matrix: np.ndarray = field(repr=False)
    invertible: bool
    dense_range_surrogate: bool
    operator_norm_bound: float
    inverse: Optional[np.ndarray] = field(default=None, repr=False)

    @classmethod
    def from_matrix(cls, matrix, dense_range_surrogate: bool = False) -> "ConjugationMap":
        """Wrap `matrix`, testing invertibility and bounding its norm.

        A power iteration that has not settled after 200 steps is replaced by
        the SVD value so the bound never undershoots.
        """
        M = np.asarray(matrix, dtype=np.complex128)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise ValueError("phi must be a square matrix")
        inv = None
        try:
            cand = np.linalg.inv(M)
            if np.linalg.norm(M @ cand - np.eye(M.shape[0]), 2) <= 1e-8:
                inv = cand
        except np.linalg.LinAlgError:
            pass
        if inv is None and not dense_range_surrogate:
            raise ValueError("phi is not invertible; flag dense_range_surrogate to allow it")
        sigma, converged = spectral_norm(M)
        if not converged:
            sigma = float(np.linalg.norm(M, 2))
        return cls(M, inv is not None, dense_range_surrogate, sigma, inv)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def apply(self, v) -> np.ndarray:
        return np.asarray(v, dtype=np.complex128) @ self.matrix.T

    def apply_inverse(self, v) -> np.ndarray:
        if self.inverse is None:
            raise ValueError("phi is not invertible")
        return np.asarray(v, dtype=np.complex128) @ self.inverse.T


def random_conjugation(dim: int, cond: float = 10.0, seed: int = 0) -> ConjugationMap:
    """U diag(s) V* with singular values spread over [1, cond], sigma_max = cond."""
    rng = np.random.default_rng(seed)

    def unitary():
        q, r = np.linalg.qr(rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)))
        return q * (np.diag(r) / np.abs(np.diag(r)))

    s = np.geomspace(cond, 1.0, dim) if dim > 1 else np.array([cond])
    return ConjugationMap.from_matrix(unitary() @ np.diag(s) @ unitary().conj().T)


def conjugate_family(family: OperatorFamily, phi: ConjugationMap) -> OperatorFamily:
    """Gamma' = {phi T phi^-1 : T in Gamma}, paired by parameter."""
    if not phi.invertible:
        raise ValueError("conjugation needs an invertible phi")
    if phi.dim != family.dim:
        raise ValueError("dimension mismatch")
    P, Pinv = Matrix(phi.matrix), Matrix(phi.inverse)

    def member(p):
        return Compose(P, Compose(family.member(p), Pinv))

    witness = None
    if family.witness_solver is not None:
        def witness(x, y):
            return family.witness_solver(phi.apply_inverse(x), phi.apply_inverse(y))

    return replace(
        family,
        name=f"{family.name}^phi",
        member=member,
        witness_solver=witness,
        witness_batch=None,
        criterion=None,
        info={**family.info, "phi": phi, "source": family},
    )


def intertwining_residual(T: Operator, S: Operator, phi: ConjugationMap, probes) -> float:
    """max_v |S(phi v) - phi(T v)|."""
    P = np.atleast_2d(np.asarray(probes, dtype=np.complex128))
    if P.shape[0] == 0:
        raise ValueError("probes must be nonempty")
    if not T.dim == S.dim == phi.dim == P.shape[1]:
        raise ValueError("dimension mismatch")
    return float(np.linalg.norm(S.apply(phi.apply(P)) - phi.apply(T.apply(P)), axis=1).max())


@dataclass(frozen=True)
class PairedFamily:
    source: OperatorFamily
    image: OperatorFamily
    phi: ConjugationMap
    pairing: Callable = lambda p: p

    def max_residual(self, count: int, seed: int, probes) -> float:
        worst = 0.0
        for p, T in sample_family(self.source, count, seed):
            S = self.image.member(self.pairing(p))
            worst = max(worst, intertwining_residual(T, S, self.phi, probes))
        return worst


def derive_seed(seed: int, i: int) -> int:
    return int(np.random.SeedSequence([int(seed), int(i)]).generate_state(1)[0])


def direct_sum_family(families: Sequence[OperatorFamily]) -> OperatorFamily:
    """Gamma_1 x ... x Gamma_n acting blockwise on the concatenated space.

    Component i is sampled with seed ``derive_seed(seed, i)``.
    """
    fams = tuple(families)
    if not fams:
        raise ValueError("need at least one family")
    dims = [f.dim for f in fams]
    off = np.concatenate([[0], np.cumsum(dims)])

    def member(p):
        return DirectSum(tuple(f.member(q) for f, q in zip(fams, p)))

    def sampler(count, seed):
        comps = [[q for q, _ in sample_family(f, count, derive_seed(seed, i))] for i, f in enumerate(fams)]
        return list(zip(*comps))

    def witness(x, y):
        out = []
        for i, f in enumerate(fams):
            if f.witness_solver is None:
                return None
            q = f.witness_solver(x[off[i]:off[i + 1]], y[off[i]:off[i + 1]])
            if q is None:
                return None
            out.append(q)
        return tuple(out)

    return OperatorFamily(
        "direct_sum(" + ",".join(f.name for f in fams) + ")", int(off[-1]), member, sampler,
        parameter_domain="tuples of component parameters",
        witness_solver=witness,
        info={"components": fams, "dims": tuple(dims)},
    )


def project_component(obj, i: int, dims: Sequence[int]):
    """Coordinates of block `i` of a vector, a stack of vectors, or an orbit."""
    dims = list(dims)
    if not 0 <= i < len(dims):
        raise IndexError(f"component {i} out of range")
    off = np.concatenate([[0], np.cumsum(dims)])
    sl = slice(int(off[i]), int(off[i + 1]))
    if isinstance(obj, OrbitSample):
        params = [p[i] if isinstance(p, tuple) and len(p) == len(dims) else p for p in obj.params]
        return OrbitSample(obj.base[sl].copy(), params, obj.images[:, sl].copy(),
                           f"{obj.family_name}[{i}]", obj.seed, obj.n_sampled)
    v = np.asarray(obj, dtype=np.complex128)
    if v.shape[-1] != off[-1]:
        raise ValueError("dimension mismatch")
    return v[..., sl].copy()
