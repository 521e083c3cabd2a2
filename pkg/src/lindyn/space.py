"""Finite truncations of l2(N): vectors, norms, target grids and basis balls.

Vectors are plain one-dimensional ``complex128`` numpy arrays.  A
:class:`SpaceConfig` only fixes the truncation dimension; helpers here
validate shapes and build the finite point sets that stand in for dense
subsets and for the open sets of a countable topology basis.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

__all__ = [
    "ATOL",
    "SpaceConfig",
    "TargetGrid",
    "BasisBall",
    "as_vector",
    "norm",
    "distance",
    "inner",
    "standard_basis",
    "make_target_grid",
    "make_basis_balls",
]

ATOL = 1e-12


@dataclass(frozen=True)
class SpaceConfig:
    dim: int = 16
    label: str = ""

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError(f"dim must be a positive integer, got {self.dim!r}")


def as_vector(coords, dim: Optional[int] = None) -> np.ndarray:
    """Return `coords` as a finite complex vector, checking its length."""
    v = np.asarray(coords, dtype=np.complex128)
    if v.ndim != 1:
        raise ValueError(f"expected a 1-d vector, got shape {v.shape}")
    if dim is not None and v.shape[0] != dim:
        raise ValueError(f"dimension mismatch: expected {dim}, got {v.shape[0]}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector has non-finite coordinates")
    return v


def norm(v) -> float:
    v = np.asarray(v, dtype=np.complex128)
    return float(np.linalg.norm(v))


def distance(u, v) -> float:
    u = np.asarray(u, dtype=np.complex128)
    v = np.asarray(v, dtype=np.complex128)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    return float(np.linalg.norm(u - v))


def inner(u, v) -> complex:
    """<u, v> = sum u_i conj(v_i); linear in the first slot."""
    return complex(np.vdot(v, u))


def standard_basis(config: SpaceConfig | int, k: int) -> np.ndarray:
    dim = config if isinstance(config, (int, np.integer)) else config.dim
    if not 0 <= k < dim:
        raise IndexError(f"basis index {k} out of range for dim {dim}")
    e = np.zeros(dim, dtype=np.complex128)
    e[k] = 1.0
    return e


@dataclass(frozen=True)
class TargetGrid:
    """A finite set of target points.

    ``radius`` is the construction parameter R.  Lattice grids cover the cube
    ``[-R, R]`` in every real and imaginary part of the first
    ``effective_dims`` coordinates, so their Euclidean bound is
    ``R * sqrt(2 * effective_dims)``; random grids lie in the R-ball.
    """

    points: np.ndarray
    radius: float
    kind: str
    effective_dims: int
    spacing: Optional[float] = None
    count: Optional[int] = None
    seed: Optional[int] = None

    def __len__(self):
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def radius_bound(self) -> float:
        if self.kind == "lattice":
            return self.radius * np.sqrt(2 * self.effective_dims)
        return self.radius


def make_target_grid(
    config: SpaceConfig | int,
    kind: str = "lattice",
    R: float = 1.0,
    spacing: Optional[float] = None,
    count: Optional[int] = None,
    effective_dims: Optional[int] = None,
    seed: int = 0,
) -> TargetGrid:
    """Build a lattice or seeded-random target grid.

    The lattice has ``(2*floor(R/spacing)+1)**(2*effective_dims)`` points,
    enumerated in C order with the real part of coordinate 0 varying
    slowest.  The random kind draws `count` points uniformly from the ball of
    radius R in the first `effective_dims` complex coordinates.
    """
    dim = config if isinstance(config, (int, np.integer)) else config.dim
    if effective_dims is None:
        effective_dims = dim
    if not R > 0:
        raise ValueError("R must be positive")
    if not 1 <= effective_dims <= dim:
        raise ValueError(f"effective_dims must lie in [1, {dim}]")

    if kind == "lattice":
        if spacing is None or not spacing > 0:
            raise ValueError("spacing must be positive")
        m = int(np.floor(R / spacing + 1e-12))
        axis = spacing * np.arange(-m, m + 1)
        n_axes = 2 * effective_dims
        if axis.size ** n_axes > 5_000_000:
            raise ValueError("lattice too large")
        mesh = np.meshgrid(*([axis] * n_axes), indexing="ij")
        flat = np.stack([a.ravel() for a in mesh], axis=-1)
        pts = np.zeros((flat.shape[0], dim), dtype=np.complex128)
        pts[:, :effective_dims] = flat[:, 0::2] + 1j * flat[:, 1::2]
        return TargetGrid(pts, float(R), kind, effective_dims, spacing=float(spacing))

    if kind == "seeded-random":
        if count is None or count < 1:
            raise ValueError("count must be at least 1")
        rng = np.random.default_rng(seed)
        n_real = 2 * effective_dims
        g = rng.standard_normal((count, n_real))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        g *= R * rng.uniform(size=(count, 1)) ** (1.0 / n_real)
        pts = np.zeros((count, dim), dtype=np.complex128)
        pts[:, :effective_dims] = g[:, 0::2] + 1j * g[:, 1::2]
        return TargetGrid(pts, float(R), kind, effective_dims, count=int(count), seed=seed)

    raise ValueError(f"unknown grid kind {kind!r}")


@dataclass(frozen=True)
class BasisBall:
    center: np.ndarray = field(repr=False)
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("ball radius must be positive")

    def __contains__(self, v) -> bool:
        return distance(v, self.center) <= self.radius


def make_basis_balls(grid: TargetGrid | Sequence, N: int, r0: float) -> list[BasisBall]:
    """First `N` balls of a basis: ball n has radius r0/n, centers cycle the grid."""
    if not r0 > 0:
        raise ValueError("r0 must be positive")
    if N < 0:
        raise ValueError("N must be nonnegative")
    points = grid.points if isinstance(grid, TargetGrid) else np.asarray(grid, dtype=np.complex128)
    if N and len(points) == 0:
        raise ValueError("cannot build balls from an empty grid")
    return [BasisBall(points[(n - 1) % len(points)].copy(), r0 / n) for n in range(1, N + 1)]
