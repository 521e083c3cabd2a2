"""Declarative experiment specs, dispatch, and JSON-lines reports."""

from __future__ import annotations

import copy
import hashlib
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import dynamics, families, groups, space, structure, testers

__all__ = [
    "EXPERIMENTS",
    "SpecError",
    "ExperimentSpec",
    "RunReport",
    "validate_spec",
    "load_specs",
    "run_experiment",
    "run_specs",
    "emit_report",
    "thread_limit",
]

EXPERIMENTS = ("density", "hc_grid", "transitivity", "criterion", "closure",
               "group_axioms", "annulus", "quasi_similarity", "direct_sum")

RECORD_KEYS = ("experiment", "family", "verdict", "metrics", "seed", "spec_digest", "runtime_ms", "reason")

# per-experiment parameters and defaults; None means "derived at run time"
PARAM_DEFAULTS: dict[str, dict[str, Any]] = {
    "density": {"epsilon": 1e-9, "kind": "lattice", "R": 1.0, "spacing": 0.5, "effective_dims": 1,
                "target_count": 100, "grid_seed": None, "count": 64, "use_witnesses": False, "base": None},
    "hc_grid": {"candidate_count": 100, "candidate_R": 1.0, "N": 10, "r0": 0.5, "ball_count": 10,
                "ball_R": 1.0, "count": 16, "use_witnesses": False},
    "transitivity": {"pair_count": 20, "R": 1.0, "support": None, "delta": 1e-3, "count": 32,
                     "use_witnesses": False},
    "criterion": {"k_schedule": None, "x0_support": 8, "y0_support": 8, "x0_count": 40,
                  "y0_count": 40, "R": 1.0, "tol": 1e-6},
    "closure": {"count": 8, "probe_count": 4, "tol": 1e-9, "pinned": None},
    "group_axioms": {"pair_count": 100, "radius": 5.0, "probe_count": 4, "tol": 1e-9,
                     "fd_step": 1e-4, "fd_tol": 1e-6},
    "annulus": {"target_count": 500, "w_min": 1e-3, "w_max": 10.0, "r": 100.0, "tol": 1e-9},
    "quasi_similarity": {"cond": 10.0, "count": 16, "probe_count": 4, "tol": 1e-10,
                         "pair_count": 20, "delta": 0.5},
    "direct_sum": {"components": None, "epsilon": 0.5, "R": 1.0, "spacing": 0.5, "effective_dims": 1,
                   "count": 64, "use_witnesses": False},
}

POSITIVE = {"epsilon", "delta", "tol", "R", "spacing", "r0", "radius", "candidate_R", "ball_R",
            "cond", "w_min", "w_max", "fd_step", "fd_tol"}
NONNEG_INT = {"effective_dims", "target_count", "count", "candidate_count", "N", "ball_count",
              "pair_count", "x0_support", "y0_support", "x0_count", "y0_count", "probe_count", "support"}

DEFAULT_FAMILY = {
    "group_axioms": {"name": "diag_exp_group", "parameters": {}},
    "annulus": {"name": "diag_exp_group", "parameters": {"lambda": [1.0], "c": [1.0]}},
}


class SpecError(ValueError):
    """Invalid experiment spec; ``errors`` lists every problem found."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


def _complex(v) -> complex:
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, str):
        return complex(v.replace(" ", ""))
    if isinstance(v, bool):
        raise TypeError("not a number")
    return complex(v)


def _cvec(v) -> np.ndarray:
    return np.array([_complex(c) for c in v], dtype=np.complex128)


def _family_kwargs(name: str, params: dict) -> dict:
    out = {}
    for k, v in params.items():
        if k in ("functional", "anchor", "lambda", "c"):
            out[k] = _cvec(v)
        elif k == "weight":
            out[k] = _complex(v)
        elif k == "k_schedule":
            out[k] = tuple(int(i) for i in v)
        else:
            out[k] = v
    return out


def build_family(fam: dict, dim: int) -> families.OperatorFamily:
    return families.make_family(fam["name"], dim, **_family_kwargs(fam["name"], fam.get("parameters", {})))


@dataclass
class ExperimentSpec:
    experiment: str
    family: dict
    dim: int = 16
    params: dict = field(default_factory=dict)
    seed: int = 0

    def canonical(self) -> dict:
        return {"experiment": self.experiment, "family": self.family, "space": {"dim": self.dim},
                "params": self.params, "seed": self.seed}

    @property
    def digest(self) -> str:
        text = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()


def _check_family(fam, errors, where="family") -> dict | None:
    if not isinstance(fam, dict):
        errors.append(f"{where} must be an object")
        return None
    for k in fam:
        if k not in ("name", "parameters", "dim"):
            errors.append(f"unknown field '{where}.{k}'")
    name = fam.get("name")
    if name not in families.CATALOG:
        errors.append(f"unknown family '{name}'")
        return None
    params = fam.get("parameters", {})
    if not isinstance(params, dict):
        errors.append(f"{where}.parameters must be an object")
        return None
    out = {"name": name, "parameters": params}
    if "dim" in fam:
        out["dim"] = fam["dim"]
    return out


def _from_obj(doc) -> ExperimentSpec:
    errors: list[str] = []
    if not isinstance(doc, dict):
        raise SpecError(["spec must be a JSON object"])
    for k in doc:
        if k not in ("experiment", "family", "space", "params", "seed"):
            errors.append(f"unknown field '{k}'")
    exp = doc.get("experiment")
    if exp not in EXPERIMENTS:
        errors.append(f"unknown experiment '{exp}'")
        raise SpecError(errors)

    fam = doc.get("family", DEFAULT_FAMILY.get(exp))
    if fam is None:
        errors.append("missing field 'family'")
    else:
        fam = _check_family(fam, errors)

    sp = doc.get("space", {})
    dim = 16
    if not isinstance(sp, dict):
        errors.append("space must be an object")
    else:
        for k in sp:
            if k != "dim":
                errors.append(f"unknown field 'space.{k}'")
        dim = sp.get("dim", 1 if exp == "annulus" else 16)
        if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
            errors.append("dim must be a positive integer")

    seed = doc.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        errors.append("seed must be a nonnegative integer")

    raw = doc.get("params", {})
    params = copy.deepcopy(PARAM_DEFAULTS[exp])
    if not isinstance(raw, dict):
        errors.append("params must be an object")
        raw = {}
    for k, v in raw.items():
        if k not in params:
            errors.append(f"unknown parameter '{k}' for experiment '{exp}'")
            continue
        params[k] = v
    for k, v in params.items():
        if k in POSITIVE:
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                errors.append(f"{k} must be a number")
            elif not v > 0 or not math.isfinite(v):
                errors.append(f"{k} must be positive")
        elif k in NONNEG_INT and v is not None:
            if isinstance(v, bool) or not isinstance(v, int) or v < 0:
                errors.append(f"{k} must be a nonnegative integer")
        elif k == "r" and (isinstance(v, bool) or not isinstance(v, (int, float)) or v < 0):
            errors.append("r must be a nonnegative number")
        elif k == "use_witnesses" and not isinstance(v, bool):
            errors.append("use_witnesses must be true or false")
    if exp == "density" and params["kind"] not in ("lattice", "seeded-random"):
        errors.append(f"unknown grid kind '{params['kind']}'")
    if exp == "criterion" and params["k_schedule"] is not None:
        ks = params["k_schedule"]
        if not isinstance(ks, list) or not ks or not all(isinstance(k, int) and k >= 0 for k in ks):
            errors.append("k_schedule must be a nonempty list of nonnegative integers")
        elif any(b <= a for a, b in zip(ks, ks[1:])):
            errors.append("k_schedule must be increasing")
    if exp == "direct_sum" and params["components"] is not None:
        comps = params["components"]
        if not isinstance(comps, list) or not comps:
            errors.append("components must be a nonempty list")
        else:
            params["components"] = [c for c in (_check_family(c, errors, "components[]") for c in comps) if c]
    if errors:
        raise SpecError(errors)

    if fam is not None:
        try:
            build_family(fam, fam.get("dim", dim))
        except (TypeError, ValueError) as exc:
            raise SpecError([f"invalid family parameters: {exc}"]) from None
    return ExperimentSpec(exp, fam, dim, params, seed)


def validate_spec(text: str) -> ExperimentSpec:
    """Parse and validate one JSON experiment spec, filling defaults."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError([f"invalid JSON: {exc}"]) from None
    return _from_obj(doc)


def load_specs(text: str) -> list[ExperimentSpec]:
    """Like :func:`validate_spec` but also accepts a JSON list of specs."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError([f"invalid JSON: {exc}"]) from None
    docs = doc if isinstance(doc, list) else [doc]
    if not docs:
        raise SpecError(["spec list is empty"])
    out, errors = [], []
    for i, d in enumerate(docs):
        try:
            out.append(_from_obj(d))
        except SpecError as exc:
            errors.extend(exc.errors if len(docs) == 1 else [f"[{i}] {e}" for e in exc.errors])
    if errors:
        raise SpecError(errors)
    return out


# -- reports ---------------------------------------------------------------------


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return [_jsonable(x) for x in v.tolist()]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (complex, np.complexfloating)):
        return [_jsonable(float(v.real)), _jsonable(float(v.imag))]
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    return v


@dataclass
class RunReport:
    records: list

    @property
    def all_pass(self) -> bool:
        return all(r["verdict"] == "pass" for r in self.records)


def _record(spec: ExperimentSpec, verdict: bool, metrics: dict, runtime_ms, reason=None) -> dict:
    rec = {
        "experiment": spec.experiment,
        "family": spec.family["name"] if spec.family else None,
        "verdict": "pass" if verdict else "fail",
        "metrics": _jsonable(metrics),
        "seed": spec.seed,
        "spec_digest": spec.digest,
        "runtime_ms": runtime_ms,
        "reason": reason,
    }
    assert tuple(rec) == RECORD_KEYS
    return rec


def run_experiment(spec: ExperimentSpec, timed: bool = False) -> RunReport:
    """Run one experiment.  Module errors become a failed record with a reason.

    `timed` fills ``runtime_ms``; leave it off for byte-stable output.
    """
    t0 = time.perf_counter()
    try:
        verdict, metrics = _DISPATCH[spec.experiment](spec)
        reason = None
    except Exception as exc:  # reported, not raised
        verdict, metrics, reason = False, {}, f"{type(exc).__name__}: {exc}"
    ms = round((time.perf_counter() - t0) * 1000.0, 3) if timed else None
    return RunReport([_record(spec, verdict, metrics, ms, reason)])


def thread_limit() -> int:
    raw = os.environ.get("LINDYN_THREADS")
    if raw is None or raw == "":
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        raise SpecError([f"LINDYN_THREADS must be a positive integer, got {raw!r}"]) from None
    if n < 1:
        raise SpecError([f"LINDYN_THREADS must be a positive integer, got {raw!r}"])
    return n


def run_specs(specs: list[ExperimentSpec], timed: bool = False) -> RunReport:
    """Run several specs, possibly in parallel; records keep spec order."""
    workers = min(len(specs), thread_limit())
    if workers <= 1:
        reports = [run_experiment(s, timed) for s in specs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            reports = list(ex.map(lambda s: run_experiment(s, timed), specs))
    return RunReport([r for rep in reports for r in rep.records])


def emit_report(report: RunReport, path) -> None:
    """Write one JSON object per line, keys in fixed order."""
    lines = [json.dumps(r, separators=(",", ":"), allow_nan=False) for r in report.records]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("".join(line + "\n" for line in lines))


# -- experiment implementations ------------------------------------------------------


def _family(spec):
    return build_family(spec.family, spec.family.get("dim", spec.dim))


def _random_vectors(count, dim, R, seed, support=None):
    eff = dim if support is None else min(max(int(support), 1), dim)
    return space.make_target_grid(dim, "seeded-random", R, count=count, effective_dims=eff, seed=seed).points


def _hc_predicate(fam):
    if fam.name == "rank_one":
        f = fam.info["functional"]
        return lambda y: abs(space.inner(y, f)) > space.ATOL
    if fam.name in ("scalar", "diag_exp_group") and fam.dim == 1:
        return lambda y: abs(y[0]) > 0
    return None


def _run_density(spec):
    p, fam = spec.params, _family(spec)
    dim = fam.dim
    base = families.default_base(dim) if p["base"] is None else _cvec(p["base"])
    gseed = spec.seed if p["grid_seed"] is None else int(p["grid_seed"])
    grid = space.make_target_grid(dim, p["kind"], p["R"], spacing=p["spacing"], count=p["target_count"],
                                  effective_dims=p["effective_dims"], seed=gseed)
    orbit = dynamics.compute_orbit(fam, base, p["count"], spec.seed,
                                   witness_targets=grid if p["use_witnesses"] else None)
    cert = dynamics.certify_density(orbit, grid, p["epsilon"])
    return cert.verdict, {"coverage": cert.coverage, "max_gap": cert.max_gap, "epsilon": p["epsilon"],
                          "targets": len(grid), "orbit_size": len(orbit)}


def _run_hc_grid(spec):
    p, fam = spec.params, _family(spec)
    cands = _random_vectors(p["candidate_count"], fam.dim, p["candidate_R"], spec.seed)
    centers = space.make_target_grid(fam.dim, "seeded-random", p["ball_R"], count=max(p["ball_count"], 1),
                                      seed=spec.seed + 1)
    balls = space.make_basis_balls(centers, p["N"], p["r0"])
    res = dynamics.hc_grid(fam, cands, balls, p["count"], spec.seed, p["use_witnesses"])
    metrics = {"member_fraction": res.member_fraction, "N": res.N, "candidates": len(cands)}
    pred = _hc_predicate(fam)
    if pred is not None and p["use_witnesses"]:
        expected = np.array([pred(y) for y in cands], dtype=bool)
        agreement = float(np.mean(expected == res.membership)) if len(cands) else 1.0
        metrics["predicate_agreement"] = agreement
        return agreement == 1.0, metrics
    return bool(np.all(res.membership)), metrics


def _run_transitivity(spec):
    p, fam = spec.params, _family(spec)
    xs = _random_vectors(p["pair_count"], fam.dim, p["R"], spec.seed, p["support"])
    ys = _random_vectors(p["pair_count"], fam.dim, p["R"], spec.seed + 1, p["support"])
    extra = None
    if fam.name == "diag_exp_group":
        base = np.ones(fam.dim, dtype=np.complex128)
        extra = lambda x, y: groups.difference_candidates(fam, base, x, y)  # noqa: E731
    rep = testers.transitivity_report(fam, list(zip(xs, ys)), p["delta"], p["count"], spec.seed,
                                      p["use_witnesses"], extra)
    gaps = [max(r.gap_in, r.gap_out) for r in rep.per_pair]
    return rep.success_rate == 1.0, {"success_rate": rep.success_rate, "delta": p["delta"],
                                     "max_gap": max(gaps, default=0.0)}


def _run_criterion(spec):
    p, fam = spec.params, _family(spec)
    if fam.criterion is None:
        raise ValueError("family has no criterion sequences (use power with backward_shift, |weight| > 1)")
    dim = fam.dim
    ks = p["k_schedule"]
    if ks is None:
        ks = list(fam.criterion.k_schedule) or list(range(1, dim - p["y0_support"] + 1))
    X0 = _random_vectors(p["x0_count"], dim, p["R"], spec.seed, p["x0_support"])
    Y0 = _random_vectors(p["y0_count"], dim, p["R"], spec.seed + 1, p["y0_support"])
    rep = testers.check_criterion(fam.criterion.T, fam.criterion.S, X0, Y0, ks, p["tol"])
    weight = abs(fam.info["weight"])
    ymax = np.linalg.norm(Y0, axis=1).max()
    analytic = weight ** -rep.k_schedule.astype(float) * ymax
    r2_err = float(np.max(np.abs(rep.r2 - analytic) / analytic))
    return rep.verdict, {"k_schedule": rep.k_schedule, "r1": rep.r1, "r2": rep.r2, "r3": rep.r3,
                         "tol": p["tol"], "r2_analytic_rel_err": r2_err}


def _param_from_json(fam, v):
    if fam.name in ("scalar", "diag_exp_group"):
        return _complex(v)
    if fam.name == "power":
        return int(v)
    return tuple(complex(c) for c in _cvec(v))


def _run_closure(spec):
    p, fam = spec.params, _family(spec)
    if p["pinned"]:
        fam = fam.with_pinned([_param_from_json(fam, v) for v in p["pinned"]])
    probes = np.vstack([np.eye(fam.dim, dtype=np.complex128),
                        _random_vectors(p["probe_count"], fam.dim, 1.0, spec.seed + 7)])
    rep = testers.closure_check(fam, p["count"], spec.seed, probes, p["tol"])
    metrics = {"pairs": len(rep.pairs), "max_residual": rep.max_residual, "tol": p["tol"]}
    if rep.counterexample is not None:
        metrics["counterexample"] = rep.counterexample
    return rep.verdict, metrics


def _group_of(fam):
    if fam.name != "diag_exp_group":
        raise ValueError("experiment requires the diag_exp_group family")
    return fam.info["group"]


def _run_group_axioms(spec):
    p = spec.params
    group = _group_of(_family(spec))
    probes = _random_vectors(p["probe_count"], group.dim, 1.0, spec.seed + 3)
    rep = groups.check_group_axioms(group, p["pair_count"], spec.seed, probes, p["tol"], p["radius"])
    zs = groups.sample_disk(p["pair_count"], spec.seed + 5, p["radius"])
    shadow = groups.derivative_shadow(group, zs, probes, p["fd_step"])
    ok = rep.verdict and shadow <= p["fd_tol"]
    return ok, {"max_residual": rep.max_residual, "max_abs_residual": float(rep.abs_residuals.max()),
                "tol": p["tol"], "derivative_shadow": shadow, "fd_tol": p["fd_tol"]}


def _run_annulus(spec):
    p = spec.params
    group = _group_of(_family(spec))
    if group.dim != 1 or group.generator[0] != 1 or group.C[0] != 1:
        raise ValueError("annulus experiment needs the scalar group lambda=[1], c=[1]")
    rng = np.random.default_rng(spec.seed)
    mags = np.exp(rng.uniform(np.log(p["w_min"]), np.log(p["w_max"]), p["target_count"]))
    ws = mags * np.exp(1j * rng.uniform(-np.pi, np.pi, p["target_count"]))
    worst_rel, min_abs = 0.0, float("inf")
    for w in ws:
        z = groups.annulus_witness(w, p["r"])
        worst_rel = max(worst_rel, abs(np.exp(z) - w) / abs(w))
        min_abs = min(min_abs, abs(z))
    ok = min_abs >= p["r"] and worst_rel <= p["tol"]
    return ok, {"min_abs_z": min_abs, "max_rel_error": worst_rel, "r": p["r"], "targets": len(ws)}


def _run_quasi_similarity(spec):
    p, fam = spec.params, _family(spec)
    phi = structure.random_conjugation(fam.dim, p["cond"], spec.seed)
    image = structure.conjugate_family(fam, phi)
    probes = _random_vectors(p["probe_count"], fam.dim, 1.0, spec.seed + 11)
    paired = structure.PairedFamily(fam, image, phi)
    inter = paired.max_residual(p["count"], spec.seed, probes)
    base = families.default_base(fam.dim)
    src = dynamics.compute_orbit(fam, base, p["count"], spec.seed)
    img = dynamics.compute_orbit(image, phi.apply(base), p["count"], spec.seed)
    orbit_err = float(np.max(np.linalg.norm(phi.apply(src.images) - img.images, axis=1), initial=0.0))
    xs = _random_vectors(p["pair_count"], fam.dim, 1.0, spec.seed + 13)
    ys = _random_vectors(p["pair_count"], fam.dim, 1.0, spec.seed + 17)
    violations = successes = 0
    for x, y in zip(xs, ys):
        r = testers.transitivity_search(fam, x, y, p["delta"], p["count"], spec.seed)
        if not r.success:
            continue
        successes += 1
        S = image.member(r.param)
        z2 = phi.apply(r.z)
        gin = np.linalg.norm(z2 - phi.apply(x))
        gout = np.linalg.norm(S.apply(z2) - phi.apply(y))
        bound = phi.operator_norm_bound * p["delta"]
        if gin > bound or gout > bound:
            violations += 1
    scale = 1.0 + float(np.max(np.linalg.norm(img.images, axis=1), initial=0.0))
    ok = inter <= p["tol"] and orbit_err <= p["tol"] * scale and violations == 0
    return ok, {"intertwining_residual": inter, "orbit_image_error": orbit_err, "sigma_max": phi.operator_norm_bound,
                "transfer_successes": successes, "transfer_violations": violations}


def _run_direct_sum(spec):
    p = spec.params
    comps = p["components"] or [spec.family, spec.family]
    fams = [build_family(c, c.get("dim", spec.dim)) for c in comps]
    prod = structure.direct_sum_family(fams)
    dims = [f.dim for f in fams]
    grids = [space.make_target_grid(d, "lattice", p["R"], spacing=p["spacing"],
                                    effective_dims=min(p["effective_dims"], d)) for d in dims]
    # product grid G1 x G2 x ...
    idx = np.stack(np.meshgrid(*[np.arange(len(g)) for g in grids], indexing="ij"), -1).reshape(-1, len(grids))
    G = np.hstack([g.points[idx[:, i]] for i, g in enumerate(grids)])
    base = np.concatenate([families.default_base(d) for d in dims])
    orbit = dynamics.compute_orbit(prod, base, p["count"], spec.seed,
                                   witness_targets=G if p["use_witnesses"] else None)
    cert = dynamics.certify_density(orbit, G, p["epsilon"])
    comp_certs = [dynamics.certify_density(structure.project_component(orbit, i, dims), g, p["epsilon"])
                  for i, g in enumerate(grids)]
    violation = cert.verdict and not all(c.verdict for c in comp_certs)
    return not violation, {"product_coverage": cert.coverage, "product_verdict": cert.verdict,
                           "component_coverage": [c.coverage for c in comp_certs], "violation": violation}


_DISPATCH = {
    "density": _run_density,
    "hc_grid": _run_hc_grid,
    "transitivity": _run_transitivity,
    "criterion": _run_criterion,
    "closure": _run_closure,
    "group_axioms": _run_group_axioms,
    "annulus": _run_annulus,
    "quasi_similarity": _run_quasi_similarity,
    "direct_sum": _run_direct_sum,
}
