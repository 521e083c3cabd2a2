"""Matrix-free linear operators on a d-dimensional truncation.

Every operator is an immutable description (a small dataclass) that knows
how to apply itself to a vector, materialize a dense matrix, and produce its
adjoint.  ``apply`` works on a single vector of shape ``(d,)`` or on a stack
of row vectors of shape ``(n, d)``.

Functionals are represented by vectors through the inner product
``f(y) = <y, f> = sum_i y_i conj(f_i)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

__all__ = [
    "Operator",
    "Matrix",
    "Diagonal",
    "BackwardShiftPower",
    "ForwardShiftPower",
    "PolyTruncation",
    "RankOne",
    "ScaledIdentity",
    "Compose",
    "Sum",
    "DirectSum",
    "apply",
    "materialize",
    "compose",
    "adjoint",
    "power",
]


def _check(op: "Operator", v) -> np.ndarray:
    v = np.asarray(v, dtype=np.complex128)
    if v.ndim not in (1, 2) or v.shape[-1] != op.dim:
        raise ValueError(f"dimension mismatch: operator dim {op.dim}, vector shape {v.shape}")
    return v


class Operator:
    """Common surface of all operator variants."""

    dim: int

    def apply(self, v) -> np.ndarray:
        return self._apply(_check(self, v))

    def _apply(self, v: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def materialize(self) -> np.ndarray:
        # column j is apply(e_j); rows of the identity are the e_j
        return self._apply(np.eye(self.dim, dtype=np.complex128)).T.copy()

    def adjoint(self) -> "Operator":
        return Matrix(self.materialize().conj().T)

    def __matmul__(self, other: "Operator") -> "Operator":
        return compose(self, other)


@dataclass(frozen=True, eq=False)
class Matrix(Operator):
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {m.shape}")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def _apply(self, v):
        return v @ self.matrix.T

    def materialize(self):
        return self.matrix.copy()

    def adjoint(self):
        return Matrix(self.matrix.conj().T)


@dataclass(frozen=True, eq=False)
class Diagonal(Operator):
    entries: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "entries", np.asarray(self.entries, dtype=np.complex128).ravel())

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def _apply(self, v):
        return v * self.entries

    def materialize(self):
        return np.diag(self.entries)

    def adjoint(self):
        return Diagonal(self.entries.conj())


@dataclass(frozen=True)
class BackwardShiftPower(Operator):
    """(lambda B)^k with (Bx)_j = x_{j+1}."""

    dim: int
    weight: complex = 1.0
    power: int = 1

    def __post_init__(self):
        if self.power < 0:
            raise ValueError("power must be nonnegative")

    def _apply(self, v):
        k, d = self.power, self.dim
        out = np.zeros_like(v)
        if k < d:
            out[..., : d - k] = complex(self.weight) ** k * v[..., k:]
        return out

    def adjoint(self):
        return ForwardShiftPower(self.dim, np.conj(complex(self.weight)), self.power)


@dataclass(frozen=True)
class ForwardShiftPower(Operator):
    """(mu F)^k with (Fx)_j = x_{j-1}; the coordinate pushed past d-1 is dropped."""

    dim: int
    weight: complex = 1.0
    power: int = 1

    def __post_init__(self):
        if self.power < 0:
            raise ValueError("power must be nonnegative")

    def _apply(self, v):
        k, d = self.power, self.dim
        out = np.zeros_like(v)
        if k < d:
            out[..., k:] = complex(self.weight) ** k * v[..., : d - k]
        return out

    def adjoint(self):
        return BackwardShiftPower(self.dim, np.conj(complex(self.weight)), self.power)


@dataclass(frozen=True, eq=False)
class PolyTruncation(Operator):
    """(x_j) -> (a_0 x_0, ..., a_n x_n, 0, ...) for coefficients a_0..a_n."""

    dim: int
    coeffs: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.coeffs, dtype=np.complex128).ravel()
        if a.shape[0] > self.dim:
            raise ValueError(f"{a.shape[0]} coefficients exceed dim {self.dim}")
        object.__setattr__(self, "coeffs", a)

    def _apply(self, v):
        n = self.coeffs.shape[0]
        out = np.zeros_like(v)
        out[..., :n] = v[..., :n] * self.coeffs
        return out

    def adjoint(self):
        return PolyTruncation(self.dim, self.coeffs.conj())


@dataclass(frozen=True, eq=False)
class RankOne(Operator):
    """y -> (<y, f> / <e, f>) x."""

    functional: np.ndarray
    anchor: np.ndarray
    param: np.ndarray

    def __post_init__(self):
        for name in ("functional", "anchor", "param"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=np.complex128).ravel())
        if not self.functional.shape == self.anchor.shape == self.param.shape:
            raise ValueError("functional, anchor and param must share a dimension")
        if abs(self.scale) <= 1e-12:
            raise ValueError("anchor must satisfy |<e, f>| > 1e-12")

    @property
    def dim(self) -> int:
        return self.param.shape[0]

    @property
    def scale(self) -> complex:
        return complex(np.vdot(self.functional, self.anchor))

    def _apply(self, v):
        coef = (v @ self.functional.conj()) / self.scale
        return np.multiply.outer(coef, self.param)

    def adjoint(self):
        # y -> (<y, x> / conj(c)) f, written again in rank-one form
        x = self.param
        xx = float(np.vdot(x, x).real)
        if xx == 0.0:
            return ScaledIdentity(self.dim, 0.0)
        anchor = np.conj(self.scale) / xx * x
        return RankOne(x, anchor, self.functional)


@dataclass(frozen=True)
class ScaledIdentity(Operator):
    dim: int
    alpha: complex = 1.0

    def _apply(self, v):
        return complex(self.alpha) * v

    def adjoint(self):
        return ScaledIdentity(self.dim, np.conj(complex(self.alpha)))


@dataclass(frozen=True)
class Compose(Operator):
    """left o right."""

    left: Operator
    right: Operator

    def __post_init__(self):
        if self.left.dim != self.right.dim:
            raise ValueError(f"dimension mismatch: {self.left.dim} vs {self.right.dim}")

    @property
    def dim(self) -> int:
        return self.right.dim

    def _apply(self, v):
        return self.left._apply(self.right._apply(v))

    def adjoint(self):
        return Compose(self.right.adjoint(), self.left.adjoint())


@dataclass(frozen=True)
class Sum(Operator):
    terms: Tuple[Operator, ...]

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if not self.terms:
            raise ValueError("Sum needs at least one term")
        if len({t.dim for t in self.terms}) != 1:
            raise ValueError("dimension mismatch among Sum terms")

    @property
    def dim(self) -> int:
        return self.terms[0].dim

    def _apply(self, v):
        out = self.terms[0]._apply(v)
        for t in self.terms[1:]:
            out = out + t._apply(v)
        return out

    def adjoint(self):
        return Sum(tuple(t.adjoint() for t in self.terms))


@dataclass(frozen=True)
class DirectSum(Operator):
    """Block-diagonal T_1 x ... x T_n acting on concatenated coordinates."""

    parts: Tuple[Operator, ...]

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))
        if not self.parts:
            raise ValueError("DirectSum needs at least one part")

    @property
    def dim(self) -> int:
        return sum(p.dim for p in self.parts)

    @property
    def offsets(self) -> np.ndarray:
        return np.concatenate([[0], np.cumsum([p.dim for p in self.parts])])

    def _apply(self, v):
        off = self.offsets
        blocks = [p._apply(v[..., off[i] : off[i + 1]]) for i, p in enumerate(self.parts)]
        return np.concatenate(blocks, axis=-1)

    def adjoint(self):
        return DirectSum(tuple(p.adjoint() for p in self.parts))


def apply(op: Operator, v) -> np.ndarray:
    return op.apply(v)


def materialize(op: Operator) -> np.ndarray:
    return op.materialize()


def compose(a: Operator, b: Operator) -> Operator:
    """Return the operator ``v -> a(b(v))``; scalar multiples collapse."""
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    if isinstance(a, ScaledIdentity) and isinstance(b, ScaledIdentity):
        return ScaledIdentity(a.dim, complex(a.alpha) * complex(b.alpha))
    return Compose(a, b)


def adjoint(op: Operator) -> Operator:
    return op.adjoint()


def power(op: Operator, n: int) -> Operator:
    """op**n, with op**0 the identity.  Shifts and diagonals stay structured."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return ScaledIdentity(op.dim, 1.0)
    if isinstance(op, (BackwardShiftPower, ForwardShiftPower)):
        return type(op)(op.dim, op.weight, op.power * n)
    if isinstance(op, ScaledIdentity):
        return ScaledIdentity(op.dim, complex(op.alpha) ** n)
    if isinstance(op, Diagonal):
        return Diagonal(op.entries**n)
    if isinstance(op, PolyTruncation):
        return PolyTruncation(op.dim, op.coeffs**n)
    return Matrix(np.linalg.matrix_power(op.materialize(), n))
