"""Operator families Gamma: samplers, exact witness solvers and the catalog.

A family maps parameters to operators.  Parameters are hashable (ints,
complex numbers, tuples of complex numbers, or tuples of those for direct
sums) so that pairs can be compared and reports serialized.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Any, Callable, Hashable, Optional, Sequence

import numpy as np

from .operators import (
    BackwardShiftPower,
    ForwardShiftPower,
    Operator,
    PolyTruncation,
    RankOne,
    ScaledIdentity,
    power,
)
from .space import ATOL, inner

__all__ = [
    "CATALOG",
    "CriterionWitness",
    "OperatorFamily",
    "sample_family",
    "solve_witness",
    "poly_trunc_family",
    "rank_one_family",
    "power_family",
    "rolewicz_family",
    "scalar_family",
    "make_family",
    "default_base",
]

CATALOG = ("poly_trunc", "rank_one", "power", "scalar", "diag_exp_group")

Param = Hashable


@dataclass(frozen=True)
class CriterionWitness:
    """Sequences T_k (members of the family) and right inverses S_k."""

    T: Callable[[int], Operator]
    S: Callable[[int], Operator]
    k_schedule: tuple
    T_param: Callable[[int], Param] = lambda k: k


@dataclass(frozen=True)
class OperatorFamily:
    """A parameterized set of operators.

    Parameters
    ----------
    member
        ``param -> Operator``.
    sampler
        ``(count, seed) -> list of params``; must be deterministic.
    witness_solver
        Optional ``(x, y) -> param or None`` returning a parameter whose
        operator maps `x` exactly onto `y`.
    witness_batch
        Optional vectorized solver ``(x, Y) -> (params, ok)`` where ``params``
        has one row per target row of ``Y`` and ``ok`` flags solvable rows.
    closure_param
        Optional ``(param_T, param_S) -> param_A`` realizing T = A S by
        parameter arithmetic.
    pinned
        Parameters always returned first by :func:`sample_family`.
    """

    name: str
    dim: int
    member: Callable[[Any], Operator]
    sampler: Callable[[int, int], list]
    parameter_domain: str = ""
    witness_solver: Optional[Callable] = None
    witness_batch: Optional[Callable] = None
    criterion: Optional[CriterionWitness] = None
    closure_param: Optional[Callable] = None
    pinned: tuple = ()
    info: dict = field(default_factory=dict)

    def with_pinned(self, params: Sequence) -> "OperatorFamily":
        return replace(self, pinned=tuple(params))


def sample_family(family: OperatorFamily, count: int, seed: int = 0) -> list[tuple[Any, Operator]]:
    """Deterministic sample of `count` members, pinned parameters first."""
    if count < 0:
        raise ValueError("count must be nonnegative")
    params = list(family.pinned[:count])
    rest = count - len(params)
    if rest > 0:
        params.extend(family.sampler(rest, seed))
    return [(p, family.member(p)) for p in params]


def solve_witness(family: OperatorFamily, x, y) -> Optional[Any]:
    if family.witness_solver is None:
        return None
    return family.witness_solver(np.asarray(x, dtype=np.complex128), np.asarray(y, dtype=np.complex128))


def default_base(dim: int) -> np.ndarray:
    """x_k = 2**-k: every coordinate nonzero."""
    return (2.0 ** -np.arange(dim)).astype(np.complex128)


def _as_param(v) -> tuple:
    return tuple(complex(c) for c in np.asarray(v).ravel())


def _disk(rng, count, radius):
    r = radius * np.sqrt(rng.uniform(size=count))
    t = rng.uniform(0.0, 2.0 * np.pi, size=count)
    return r * np.exp(1j * t)


# -- polynomial truncations ----------------------------------------------------


def poly_trunc_family(dim: int, degree: Optional[int] = None, coeff_radius: float = 2.0,
                      coeff_spacing: float = 0.5) -> OperatorFamily:
    """Gamma = {T_p : p polynomial} acting coefficient-wise on the first n+1 coordinates."""
    n_coef = dim if degree is None else degree + 1
    if not 1 <= n_coef <= dim:
        raise ValueError(f"degree must lie in [0, {dim - 1}]")
    m = int(np.floor(coeff_radius / coeff_spacing + 1e-12))

    def member(p):
        return PolyTruncation(dim, np.asarray(p, dtype=np.complex128))

    def sampler(count, seed):
        rng = np.random.default_rng(seed)
        ij = rng.integers(-m, m + 1, size=(count, n_coef, 2))
        coeffs = coeff_spacing * (ij[..., 0] + 1j * ij[..., 1])
        return [_as_param(row) for row in coeffs]

    def batch(x, Y):
        Y = np.atleast_2d(np.asarray(Y, dtype=np.complex128))
        if np.any(x == 0):
            return np.zeros_like(Y), np.zeros(Y.shape[0], dtype=bool)
        return Y / x, np.ones(Y.shape[0], dtype=bool)

    def witness(x, y):
        coeffs, ok = batch(x, y[None, :])
        return _as_param(coeffs[0]) if ok[0] else None

    return OperatorFamily(
        "poly_trunc", dim, member, sampler,
        parameter_domain=f"coefficient vectors of length {n_coef} on the lattice "
                         f"{coeff_spacing}*(Z+iZ), |Re|,|Im| <= {m * coeff_spacing}",
        witness_solver=witness, witness_batch=batch,
        info={"degree": n_coef - 1, "coeff_radius": coeff_radius, "coeff_spacing": coeff_spacing},
    )


# -- rank-one family -------------------------------------------------------------


def rank_one_family(functional, anchor, scale: float = 1.0) -> OperatorFamily:
    """Gamma = {T_x : x in X}, T_x y = (<y, f> / <e, f>) x."""
    f = np.asarray(functional, dtype=np.complex128).ravel()
    e = np.asarray(anchor, dtype=np.complex128).ravel()
    dim = f.shape[0]
    c = inner(e, f)
    if abs(c) <= ATOL:
        raise ValueError("anchor must satisfy |<e, f>| > 1e-12")

    def member(p):
        return RankOne(f, e, np.asarray(p, dtype=np.complex128))

    def sampler(count, seed):
        rng = np.random.default_rng(seed)
        z = rng.standard_normal((count, dim)) + 1j * rng.standard_normal((count, dim))
        return [_as_param(row) for row in scale * z / np.sqrt(2.0)]

    def batch(x, Y):
        Y = np.atleast_2d(np.asarray(Y, dtype=np.complex128))
        xf = inner(x, f)
        if abs(xf) <= ATOL:
            return np.zeros_like(Y), np.zeros(Y.shape[0], dtype=bool)
        return (c / xf) * Y, np.ones(Y.shape[0], dtype=bool)

    def witness(x, y):
        params, ok = batch(x, y[None, :])
        return _as_param(params[0]) if ok[0] else None

    return OperatorFamily(
        "rank_one", dim, member, sampler,
        parameter_domain="vectors x in C^d (complex Gaussian sampler)",
        witness_solver=witness, witness_batch=batch,
        info={"functional": f, "anchor": e},
    )


# -- powers of one operator -------------------------------------------------------


def power_family(op: Operator, name: str = "power") -> OperatorFamily:
    """Gamma = {T^n : n = 0, 1, 2, ...}; the sampler enumerates exponents in order."""

    def sampler(count, seed):
        return list(range(count))

    return OperatorFamily(
        name, op.dim, lambda n: power(op, int(n)), sampler,
        parameter_domain="exponents n = 0, 1, 2, ...",
        info={"base": op},
    )


def rolewicz_family(dim: int, weight: complex = 2.0, k_schedule: Sequence[int] = ()) -> OperatorFamily:
    """Powers of lambda*B with criterion sequences T_k = (lambda B)^k, S_k = (F/lambda)^k."""
    if abs(weight) <= 1:
        raise ValueError("Rolewicz weight must satisfy |weight| > 1")
    fam = power_family(BackwardShiftPower(dim, weight, 1))
    crit = CriterionWitness(
        T=lambda k: BackwardShiftPower(dim, weight, k),
        S=lambda k: ForwardShiftPower(dim, 1.0 / weight, k),
        k_schedule=tuple(int(k) for k in k_schedule),
    )
    return replace(fam, criterion=crit, info={**fam.info, "weight": weight})


# -- scalar multiples of the identity ---------------------------------------------


def scalar_family(dim: int = 1, radius: float = 5.0) -> OperatorFamily:
    """Gamma = {cI : c in C}, sampled uniformly in the disk |c| <= radius."""

    def sampler(count, seed):
        return [complex(c) for c in _disk(np.random.default_rng(seed), count, radius)]

    def witness(x, y):
        xx = float(np.vdot(x, x).real)
        if xx == 0.0:
            return None
        c = complex(np.vdot(x, y)) / xx
        if np.linalg.norm(c * x - y) > ATOL * (1 + np.linalg.norm(y)):
            return None
        return c

    def closure(pt, ps):
        return None if ps == 0 else complex(pt) / complex(ps)

    return OperatorFamily(
        "scalar", dim, lambda c: ScaledIdentity(dim, complex(c)), sampler,
        parameter_domain=f"c in C, |c| <= {radius}",
        witness_solver=witness, closure_param=closure,
    )


def make_family(name: str, dim: int, **parameters) -> OperatorFamily:
    """Build a catalog family by name."""
    if name == "poly_trunc":
        return poly_trunc_family(dim, **parameters)
    if name == "rank_one":
        p = dict(parameters)
        f = p.pop("functional", None)
        e = p.pop("anchor", None)
        f = np.eye(dim, dtype=np.complex128)[0] if f is None else f
        e = f if e is None else e
        return rank_one_family(f, e, **p)
    if name == "power":
        p = dict(parameters)
        base = p.pop("base", "backward_shift")
        weight = p.pop("weight", 2.0)
        k_schedule = p.pop("k_schedule", ())
        if p:
            raise ValueError(f"unknown power-family parameters: {sorted(p)}")
        if base == "backward_shift":
            if abs(weight) > 1:
                return rolewicz_family(dim, weight, k_schedule)
            return power_family(BackwardShiftPower(dim, weight, 1))
        if base == "forward_shift":
            return power_family(ForwardShiftPower(dim, weight, 1))
        raise ValueError(f"unknown power base {base!r}")
    if name == "scalar":
        return scalar_family(dim, **parameters)
    if name == "diag_exp_group":
        from .groups import RegularizedGroup, diag_exp_group_family

        p = dict(parameters)
        lam = p.pop("lambda", np.ones(dim))
        c = p.pop("c", np.ones(dim))
        return diag_exp_group_family(RegularizedGroup(lam, c), **p)
    raise ValueError(f"unknown family {name!r}")
