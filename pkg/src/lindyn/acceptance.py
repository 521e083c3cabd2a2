"""Acceptance checks, each a finite stand-in for one infinite-dimensional result.

Every ``criterion_*`` function returns a :class:`CriterionResult`;
:func:`run_all` runs them in order.  ``lindyn selftest`` and
``tests/test_acceptance.py`` both go through here.
"""

from __future__ import annotations

import contextlib
import io
import json
import os
import subprocess
import sys
import tempfile
from dataclasses import dataclass

import numpy as np

from . import dynamics, families, groups, space, structure, testers

__all__ = ["CriterionResult", "run_all", "CRITERIA"]


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.number:2d} {self.title}: {self.detail}"


def criterion_1() -> CriterionResult:
    dim = 8
    fam = families.poly_trunc_family(dim)
    grid = space.make_target_grid(dim, "lattice", 2.0, spacing=0.5, effective_dims=3)
    orbit = dynamics.compute_orbit(fam, families.default_base(dim), 64, 0, witness_targets=grid)
    cert = dynamics.certify_density(orbit, grid, 1e-9)
    ok = cert.verdict and cert.coverage == 1.0 and cert.max_gap <= 1e-12
    return CriterionResult(1, "polynomial-truncation orbit density", ok,
                           f"targets={len(grid)} coverage={cert.coverage} max_gap={cert.max_gap:.3g}")


def rank_one_hc_candidates(count: int = 1000, dim: int = 4, seed: int = 0) -> np.ndarray:
    """Random candidates; every other one has its first coordinate zeroed (<y, e_0> = 0)."""
    Y = space.make_target_grid(dim, "seeded-random", 1.0, count=count, seed=seed).points.copy()
    Y[::2, 0] = 0.0
    return Y


def criterion_2() -> CriterionResult:
    dim = 4
    f = space.standard_basis(dim, 0)
    fam = families.rank_one_family(f, f)
    cands = rank_one_hc_candidates(1000, dim, seed=0)
    centers = space.make_target_grid(dim, "seeded-random", 2.0, count=10, seed=1)
    balls = space.make_basis_balls(centers, 10, 0.5)
    res = dynamics.hc_grid(fam, cands, balls, 16, 0, use_witnesses=True)
    predicate = np.abs(cands @ f.conj()) > space.ATOL
    agree = float(np.mean(predicate == res.membership))
    return CriterionResult(2, "rank-one HC grid vs analytic predicate", agree == 1.0,
                           f"agreement={agree:.4f} members={int(res.membership.sum())}/{len(cands)}")


def rolewicz_sets(dim=32, support=8, count=40, seed=0):
    X0 = space.make_target_grid(dim, "seeded-random", 1.0, count=count, effective_dims=support, seed=seed).points
    Y0 = space.make_target_grid(dim, "seeded-random", 1.0, count=count, effective_dims=support, seed=seed + 1).points
    return X0, Y0


def criterion_3() -> CriterionResult:
    dim, support = 32, 8
    fam = families.rolewicz_family(dim, 2.0, range(1, dim - support + 1))
    X0, Y0 = rolewicz_sets(dim, support, count=40)
    rep = testers.check_criterion(fam.criterion.T, fam.criterion.S, X0, Y0, fam.criterion.k_schedule, 1e-6)
    ymax = np.linalg.norm(Y0, axis=1).max()
    analytic = 2.0 ** -rep.k_schedule.astype(float) * ymax
    r2_err = float(np.max(np.abs(rep.r2 - analytic) / analytic))
    r1_zero = bool(np.all(rep.r1[rep.k_schedule >= support] == 0.0))
    r3_zero = bool(np.all(rep.r3 == 0.0))
    ok = rep.verdict and r2_err <= 1e-12 and r1_zero and r3_zero
    return CriterionResult(3, "Rolewicz hypercyclicity criterion", ok,
                           f"k=1..{rep.k_schedule[-1]} r2_rel_err={r2_err:.2g} r1_zero={r1_zero} "
                           f"r3_zero={r3_zero} final=({rep.r1[-1]:.2g},{rep.r2[-1]:.2g},{rep.r3[-1]:.2g})")


def criterion_4() -> CriterionResult:
    dim, support = 32, 8
    fam = families.rolewicz_family(dim, 2.0, range(1, dim - support + 1))
    xs, ys = rolewicz_sets(dim, support, count=100, seed=10)
    rep = testers.transitivity_report(fam, list(zip(xs, ys)), 1e-3, dim, 0)
    worst = max(max(r.gap_in, r.gap_out) for r in rep.per_pair)
    return CriterionResult(4, "criterion implies transitivity (Rolewicz)", rep.success_rate == 1.0,
                           f"success_rate={rep.success_rate} worst_gap={worst:.2g}")


def rank_one_counterexample_family():
    e = np.array([1.0, 0.0], dtype=np.complex128)
    e2 = np.array([0.0, 1.0], dtype=np.complex128)
    fam = families.rank_one_family(e, e).with_pinned([tuple(e), tuple(e2)])
    return fam, e, e2


def criterion_5() -> CriterionResult:
    scal = groups.diag_exp_group_family(groups.scalar_exp_group())
    probes = np.array([[1.0], [0.5 - 0.25j]], dtype=np.complex128)
    good = testers.closure_check(scal, 10, 0, probes, 1e-9)

    fam, e, e2 = rank_one_counterexample_family()
    probes2 = np.vstack([e, e2])
    bad = testers.closure_check(fam, 2, 0, probes2, 1e-9)
    cx = bad.counterexample
    probe_e = cx["probe_residuals"][0] if cx else 0.0
    ok = good.verdict and good.max_residual <= 1e-9 and (not bad.verdict) and cx is not None and probe_e >= 0.9
    return CriterionResult(5, "closure T = AS, both directions", ok,
                           f"exp-group max_residual={good.max_residual:.2g}; rank-one verdict="
                           f"{'pass' if bad.verdict else 'fail'} probe-e residual={probe_e:.3g}")


def random_group(dim=8, seed=0, c_identity=False) -> groups.RegularizedGroup:
    rng = np.random.default_rng(seed)
    lam = groups.sample_disk(dim, seed, 2.0)
    c = np.ones(dim) if c_identity else rng.uniform(0.5, 1.5, dim) * np.exp(1j * rng.uniform(-np.pi, np.pi, dim))
    return groups.RegularizedGroup(lam, c)


def criterion_6() -> CriterionResult:
    g = random_group(8, seed=0)
    probes = space.make_target_grid(8, "seeded-random", 1.0, count=4, seed=3).points
    rep = groups.check_group_axioms(g, 100, 0, probes, 1e-9, radius=5.0)
    shadow = groups.derivative_shadow(g, groups.sample_disk(100, 5, 5.0), probes, 1e-4)
    ok = rep.verdict and shadow <= 1e-6
    return CriterionResult(6, "C-regularized group axioms", ok,
                           f"|Lambda|max={np.abs(g.generator).max():.3f} max_residual={rep.max_residual:.2g} "
                           f"derivative_shadow={shadow:.2g}")


def criterion_7() -> CriterionResult:
    rng = np.random.default_rng(7)
    mags = np.exp(rng.uniform(np.log(1e-3), np.log(10.0), 500))
    ws = mags * np.exp(1j * rng.uniform(-np.pi, np.pi, 500))
    zs = [groups.annulus_witness(w, 100.0) for w in ws]
    min_abs = min(abs(z) for z in zs)
    worst = max(abs(np.exp(z) - w) / abs(w) for z, w in zip(zs, ws))
    ok = min_abs >= 100.0 and worst <= 1e-9
    return CriterionResult(7, "annulus density witnesses", ok, f"min|z|={min_abs:.3f} max_rel_err={worst:.2g}")


def direct_sum_run(seed: int):
    """One randomized direct-sum run; returns (product_pass, component_passes)."""
    rng = np.random.default_rng(seed)
    comps = []
    for _ in range(2):
        kind = rng.integers(3)
        if kind == 0:
            comps.append(families.poly_trunc_family(2, coeff_radius=1.0, coeff_spacing=0.5))
        elif kind == 1:
            comps.append(families.scalar_family(1, radius=1.5))
        else:
            f = np.array([1.0, 0.5j])
            comps.append(families.rank_one_family(f, f))
    prod = structure.direct_sum_family(comps)
    dims = [c.dim for c in comps]
    grids = [space.make_target_grid(d, "lattice", 1.0, spacing=1.0, effective_dims=1) for d in dims]
    ij = np.stack(np.meshgrid(*[np.arange(len(g)) for g in grids], indexing="ij"), -1).reshape(-1, 2)
    G = np.hstack([g.points[ij[:, i]] for i, g in enumerate(grids)])
    eps = float(rng.uniform(0.2, 1.5))
    use_w = bool(rng.integers(2))
    base = np.concatenate([families.default_base(d) for d in dims])
    orbit = dynamics.compute_orbit(prod, base, int(rng.integers(5, 200)), seed,
                                   witness_targets=G if use_w else None)
    cert = dynamics.certify_density(orbit, G, eps)
    parts = [dynamics.certify_density(structure.project_component(orbit, i, dims), g, eps).verdict
             for i, g in enumerate(grids)]
    return cert.verdict, parts


def criterion_8() -> CriterionResult:
    violations = passes = 0
    for seed in range(50):
        prod_ok, parts = direct_sum_run(seed)
        passes += prod_ok
        if prod_ok and not all(parts):
            violations += 1
    return CriterionResult(8, "direct-sum projection", violations == 0,
                           f"runs=50 product_passes={passes} violations={violations}")


def similarity_setup(dim=4, seed=0):
    f = np.zeros(dim, dtype=np.complex128)
    f[0], f[1] = 1.0, 0.5 - 0.5j
    fam = families.rank_one_family(f, f)
    phi = structure.random_conjugation(dim, 10.0, seed)
    return fam, phi, structure.conjugate_family(fam, phi)


def criterion_9() -> CriterionResult:
    dim, count, delta = 4, 32, 0.5
    fam, phi, image = similarity_setup(dim)
    sigma = phi.operator_norm_bound
    rng = np.random.default_rng(9)
    sampled = families.sample_family(fam, count, 0)
    violations = successes = 0
    for _ in range(100):
        x = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        p, op = sampled[rng.integers(count)]
        noise = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        y = op.apply(x) + (delta / 3) * noise / np.linalg.norm(noise)
        r = testers.transitivity_search(fam, x, y, delta, count, 0)
        if not r.success:
            continue
        successes += 1
        S = image.member(r.param)
        z2 = phi.apply(r.z)
        gin = np.linalg.norm(z2 - phi.apply(x))
        gout = np.linalg.norm(S.apply(z2) - phi.apply(y))
        slack = 1e-12 * (1 + np.linalg.norm(y))
        if gin > sigma * r.gap_in + slack or gout > sigma * r.gap_out + slack or max(gin, gout) > sigma * delta:
            violations += 1
    base = families.default_base(dim)
    src = dynamics.compute_orbit(fam, base, 100, 1)
    img = dynamics.compute_orbit(image, phi.apply(base), 100, 1)
    orbit_err = float(np.max(np.linalg.norm(phi.apply(src.images) - img.images, axis=1)))
    ok = violations == 0 and successes > 0 and orbit_err <= 1e-10 and list(src.params) == list(img.params)
    return CriterionResult(9, "similarity transfer", ok,
                           f"cond<={np.linalg.cond(phi.matrix):.2f} successes={successes}/100 "
                           f"violations={violations} orbit_err={orbit_err:.2g}")


def hc_oracle(fam, cands, balls, count, seed, use_witnesses):
    """Brute-force double loop over (ball, operator) pairs."""
    ops = families.sample_family(fam, count, seed)
    out = []
    for x in np.atleast_2d(cands):
        member = True
        for b in balls:
            hit = False
            if use_witnesses:
                p = families.solve_witness(fam, x, b.center)
                hit = p is not None and np.linalg.norm(fam.member(p).apply(x) - b.center) <= b.radius
            for _, T in ops:
                if hit:
                    break
                hit = np.linalg.norm(T.apply(x) - b.center) <= b.radius
            member = member and hit
        out.append(member)
    return np.array(out, dtype=bool)


def random_hc_instance(rng, max_cands=5, max_balls=4, max_ops=6):
    kind = rng.integers(3)
    if kind == 0:
        fam = families.poly_trunc_family(2, coeff_radius=1.0, coeff_spacing=0.5)
    elif kind == 1:
        fam = families.scalar_family(2, radius=2.0)
    else:
        f = np.array([1.0, 1j])
        fam = families.rank_one_family(f, f)
    n_c = int(rng.integers(1, max_cands + 1))
    n_b = int(rng.integers(0, max_balls + 1))
    n_o = int(rng.integers(0, max_ops + 1))
    cands = rng.standard_normal((n_c, 2)) + 1j * rng.standard_normal((n_c, 2))
    if rng.integers(2):
        cands[0, 0] = 0.0
    centers = rng.standard_normal((max(n_b, 1), 2)) + 1j * rng.standard_normal((max(n_b, 1), 2))
    balls = space.make_basis_balls(centers, n_b, float(rng.uniform(0.5, 3.0)))
    return fam, cands, balls, n_o, bool(rng.integers(2))


def criterion_10() -> CriterionResult:
    rng = np.random.default_rng(10)
    mono_viol = 0
    for run in range(100):
        fam, cands, _, n_o, use_w = random_hc_instance(rng, max_cands=5, max_balls=0, max_ops=12)
        centers = rng.standard_normal((8, 2)) + 1j * rng.standard_normal((8, 2))
        balls = space.make_basis_balls(centers, 8, float(rng.uniform(0.5, 3.0)))
        prev = None
        for N in range(len(balls) + 1):
            m = dynamics.hc_grid(fam, cands, balls[:N], n_o, run, use_w).membership
            if prev is not None and np.any(m & ~prev):
                mono_viol += 1
            prev = m
    mismatches = 0
    for run in range(200):
        fam, cands, balls, n_o, use_w = random_hc_instance(rng)
        got = dynamics.hc_grid(fam, cands, balls, n_o, run, use_w).membership
        if not np.array_equal(got, hc_oracle(fam, cands, balls, n_o, run, use_w)):
            mismatches += 1
    ok = mono_viol == 0 and mismatches == 0
    return CriterionResult(10, "G-delta grid monotonicity and oracle", ok,
                           f"monotonicity_violations={mono_viol}/100 oracle_mismatches={mismatches}/200")


GOLDEN_SPECS = [
    {"experiment": "density", "family": {"name": "poly_trunc"}, "space": {"dim": 8},
     "params": {"epsilon": 1e-9, "R": 2.0, "spacing": 1.0, "effective_dims": 2, "use_witnesses": True}},
    {"experiment": "criterion", "family": {"name": "power", "parameters": {"base": "backward_shift", "weight": 2}},
     "space": {"dim": 32}, "params": {"k_schedule": list(range(1, 25)), "tol": 1e-6}},
    {"experiment": "closure", "family": {"name": "rank_one", "parameters": {"functional": [1, 0], "anchor": [1, 0]}},
     "space": {"dim": 2}, "params": {"count": 2, "pinned": [[1, 0], [0, 1]]}},
    {"experiment": "annulus", "params": {"target_count": 50, "r": 100}},
]

CORRUPTED_SPECS = [
    "{not json",
    json.dumps({"experiment": "frobnicate", "family": {"name": "scalar"}}),
    json.dumps({"experiment": "density", "family": {"name": "no_such_family"}}),
    json.dumps({"experiment": "density", "family": {"name": "poly_trunc"}, "params": {"epsilon": -1}}),
    json.dumps({"experiment": "density", "family": {"name": "poly_trunc"}, "bogus": 1}),
]


def cli_checks(include_cli_selftest: bool = True) -> tuple[bool, str]:
    from .cli import main

    notes = []
    ok = True
    with tempfile.TemporaryDirectory() as tmp:
        spec_path = os.path.join(tmp, "golden.json")
        with open(spec_path, "w") as fh:
            json.dump(GOLDEN_SPECS, fh)
        outs = []
        for i in range(2):
            out = os.path.join(tmp, f"report{i}.jsonl")
            code = main(["run", spec_path, "--out", out])
            with open(out, "rb") as fh:
                outs.append(fh.read())
            # density, criterion, annulus pass; the rank-one closure fails by design
            ok &= code == 1
        stable = outs[0] == outs[1]
        ok &= stable
        notes.append(f"byte_stable={stable}")
        codes = []
        for j, text in enumerate(CORRUPTED_SPECS):
            bad = os.path.join(tmp, f"bad{j}.json")
            with open(bad, "w") as fh:
                fh.write(text)
            with contextlib.redirect_stderr(io.StringIO()):
                codes.append(main(["run", bad]))
        ok &= all(c == 2 for c in codes)
        notes.append(f"corrupted_exit_codes={codes}")
    if include_cli_selftest:
        proc = subprocess.run([sys.executable, "-m", "lindyn", "selftest"], capture_output=True, text=True)
        ok &= proc.returncode == 0
        notes.append(f"selftest_exit={proc.returncode}")
    return ok, " ".join(notes)


def criterion_11(include_cli_selftest: bool = True) -> CriterionResult:
    ok, detail = cli_checks(include_cli_selftest)
    return CriterionResult(11, "CLI golden checks", ok, detail)


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9, criterion_10]


def run_all(include_cli_selftest: bool = True) -> list[CriterionResult]:
    results = [c() for c in CRITERIA]
    results.append(criterion_11(include_cli_selftest))
    return results
