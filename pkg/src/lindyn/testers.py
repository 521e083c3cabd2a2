"""Finite checks of transitivity, the hypercyclicity criterion and T = AS closure."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Optional, Sequence

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .families import OperatorFamily, sample_family, solve_witness
from .operators import Operator

__all__ = [
    "PairResult",
    "TransitivityReport",
    "CriterionReport",
    "ClosureReport",
    "least_squares_candidate",
    "transitivity_search",
    "transitivity_report",
    "transitivity_sequence",
    "check_criterion",
    "closure_check",
]


def least_squares_candidate(op: Operator, x, y) -> np.ndarray:
    """argmin_z |z - x|^2 + |Tz - y|^2, i.e. (I + T*T) z = x + T*y."""
    M = op.materialize()
    A = np.eye(op.dim, dtype=np.complex128) + M.conj().T @ M
    rhs = np.asarray(x, dtype=np.complex128) + op.adjoint().apply(y)
    return cho_solve(cho_factor(A), rhs)


@dataclass
class PairResult:
    x: np.ndarray = field(repr=False)
    y: np.ndarray = field(repr=False)
    delta: float
    success: bool
    param: Any
    z: np.ndarray = field(repr=False)
    gap_in: float
    gap_out: float
    source: str = "sampled"


def transitivity_search(family: OperatorFamily, x, y, delta: float, count: int, seed: int = 0,
                        use_witnesses: bool = False,
                        extra_candidates: Sequence[tuple] = ()) -> PairResult:
    """Look for T in the family and z with |z - x| < delta and |Tz - y| < delta.

    Candidates are tried in order: sampled members (each with its exact
    least-squares z), the exact witness (if requested), `extra_candidates`,
    and finally the constructive z = x + S_k y for the largest scheduled k
    when the family carries criterion sequences.  The first success wins;
    otherwise the candidate with the smallest max(gap_in, gap_out) is
    returned with ``success=False``.
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    x = np.asarray(x, dtype=np.complex128)
    y = np.asarray(y, dtype=np.complex128)
    if x.shape != (family.dim,) or y.shape != (family.dim,):
        raise ValueError("dimension mismatch")

    def attempts():
        for p, op in sample_family(family, count, seed):
            yield "sampled", p, op, least_squares_candidate(op, x, y)
        if use_witnesses:
            p = solve_witness(family, x, y)
            if p is not None:
                yield "witness", p, family.member(p), x.copy()
        for p, op in extra_candidates:
            yield "extra", p, op, least_squares_candidate(op, x, y)
        crit = family.criterion
        if crit is not None and crit.k_schedule:
            k = max(crit.k_schedule)
            yield "criterion", crit.T_param(k), crit.T(k), x + crit.S(k).apply(y)

    best = None
    for source, p, op, z in attempts():
        gin = float(np.linalg.norm(z - x))
        gout = float(np.linalg.norm(op.apply(z) - y))
        res = PairResult(x, y, delta, gin < delta and gout < delta, p, z, gin, gout, source)
        if res.success:
            return res
        if best is None or max(gin, gout) < max(best.gap_in, best.gap_out):
            best = res
    if best is None:
        return PairResult(x, y, delta, False, None, x.copy(), 0.0, float(np.linalg.norm(y)), "none")
    return best


@dataclass
class TransitivityReport:
    per_pair: list

    @property
    def success_rate(self) -> float:
        if not self.per_pair:
            return 1.0
        return float(np.mean([r.success for r in self.per_pair]))

    @property
    def pairs(self):
        return [(r.x, r.y, r.delta) for r in self.per_pair]


def transitivity_report(family: OperatorFamily, pairs: Sequence[tuple], delta: float, count: int,
                        seed: int = 0, use_witnesses: bool = False,
                        extra: Optional[Callable] = None) -> TransitivityReport:
    """Run :func:`transitivity_search` on each (x, y); `extra(x, y)` adds candidates."""
    out = []
    for x, y in pairs:
        cands = extra(x, y) if extra is not None else ()
        out.append(transitivity_search(family, x, y, delta, count, seed, use_witnesses, cands))
    return TransitivityReport(out)


def transitivity_sequence(family: OperatorFamily, x, y, ks: Sequence[int], count: int,
                          seed: int = 0, **kwargs) -> list[PairResult]:
    """Searches at delta_k = 1/k: the sequences z_k -> x, T_k z_k -> y."""
    return [transitivity_search(family, x, y, 1.0 / k, count, seed, **kwargs) for k in ks]


@dataclass
class CriterionReport:
    k_schedule: np.ndarray
    r1: np.ndarray
    r2: np.ndarray
    r3: np.ndarray
    tol: float
    verdict: bool


def check_criterion(T_seq: Callable[[int], Operator], S_seq: Callable[[int], Operator],
                    X0, Y0, k_schedule: Sequence[int], tol: float) -> CriterionReport:
    """Residual curves of the three criterion conditions.

    r1_k = max_{x in X0} |T_k x|, r2_k = max_{y in Y0} |S_k y|,
    r3_k = max_{y in Y0} |T_k S_k y - y|.  Pass iff all three are <= tol at
    the final k.
    """
    ks = np.asarray(list(k_schedule), dtype=np.int64)
    if ks.size == 0:
        raise ValueError("k_schedule must be nonempty")
    if np.any(np.diff(ks) <= 0):
        raise ValueError("k_schedule must be increasing")
    X0 = np.atleast_2d(np.asarray(X0, dtype=np.complex128))
    Y0 = np.atleast_2d(np.asarray(Y0, dtype=np.complex128))
    if X0.shape[0] == 0 or Y0.shape[0] == 0:
        raise ValueError("X0 and Y0 must be nonempty")
    r1, r2, r3 = [], [], []
    for k in ks:
        T, S = T_seq(int(k)), S_seq(int(k))
        SY = S.apply(Y0)
        r1.append(np.linalg.norm(T.apply(X0), axis=1).max())
        r2.append(np.linalg.norm(SY, axis=1).max())
        r3.append(np.linalg.norm(T.apply(SY) - Y0, axis=1).max())
    r1, r2, r3 = map(np.asarray, (r1, r2, r3))
    verdict = bool(r1[-1] <= tol and r2[-1] <= tol and r3[-1] <= tol)
    return CriterionReport(ks, r1, r2, r3, tol, verdict)


@dataclass
class ClosureReport:
    pairs: list
    per_pair: list
    tol: float
    verdict: bool
    counterexample: Optional[dict] = None

    @property
    def max_residual(self) -> float:
        return max((r["residual"] for r in self.per_pair), default=0.0)


def closure_check(family: OperatorFamily, count: int, seed: int, probes, tol: float) -> ClosureReport:
    """For every ordered sampled pair (T, S) with distinct params, find the A in the
    family minimizing max_v |Tv - A(Sv)| over the probes.

    Candidates for A are the parameter-arithmetic member (if the family
    defines one) followed by every sampled member; the first minimum wins.
    """
    P = np.atleast_2d(np.asarray(probes, dtype=np.complex128))
    if P.shape[0] == 0:
        raise ValueError("probes must be nonempty")
    sampled = sample_family(family, count, seed)
    TP = [op.apply(P) for _, op in sampled]
    pairs, per_pair = [], []
    worst = None
    for i, (pt, _) in enumerate(sampled):
        for j, (ps, _) in enumerate(sampled):
            if i == j or pt == ps:
                continue
            cands = []
            if family.closure_param is not None:
                pa = family.closure_param(pt, ps)
                if pa is not None:
                    cands.append((pa, family.member(pa)))
            cands.extend(sampled)
            best = None
            for pa, A in cands:
                per_probe = np.linalg.norm(TP[i] - A.apply(TP[j]), axis=1)
                res = float(per_probe.max())
                if best is None or res < best["residual"]:
                    best = {"param_A": pa, "residual": res, "probe_residuals": per_probe.tolist()}
            rec = {"param_T": pt, "param_S": ps, **best}
            pairs.append((pt, ps))
            per_pair.append(rec)
            if worst is None or rec["residual"] > worst["residual"]:
                worst = rec
    verdict = all(r["residual"] <= tol for r in per_pair)
    return ClosureReport(pairs, per_pair, tol, verdict, None if verdict else worst)
