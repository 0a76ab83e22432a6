"""Command implementations behind both the CLI and the HTTP service.

Each runner is a pure function RunConfig -> RunResult; artifact files are
returned as strings in RunResult.files, so the service stays stateless and
the CLI decides where to write.  Grid evaluations go through a parallel map
whose worker count comes from the AFFINESYM_THREADS environment variable
(sequential by default; results are assembled in input order either way).
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import sympy as sp

from . import __version__
from .blaschke import PointGeometry
from .catalog import (
    CurveSpec,
    sphere_catalog,
    sphere_names,
    surface3_catalog,
    surface3_names,
)
from .config import RunConfig, RunResult
from .errors import GeometryError, UnknownSurface
from .export import csv_trajectory, json_report, obj_mesh
from .families import build_family, roundtrip_verify
from .flow import StructureState, Trajectory, first_integral_check, flow_integrate
from .jets import jet_eval
from .residuals import structure_residuals
from .symmetry import classify_point

_T = sp.symbols("t", real=True)


def _thread_count() -> int:
    try:
        return max(1, int(os.environ.get("AFFINESYM_THREADS", "1")))
    except ValueError:
        return 1


def _parallel_map(fn, items):
    workers = _thread_count()
    items = list(items)
    if workers == 1 or len(items) < 2:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def resolve_surface(cfg: RunConfig):
    """(ImmersionSpec, surface report dict, FamilySpec | None)."""
    sc = cfg.surface
    if sc.family is not None:
        fam_cfg = sc.family
        sphere = sphere_catalog(fam_cfg.sphere.name, fam_cfg.sphere.params)
        curve = CurveSpec.from_strings(
            fam_cfg.curve.gamma1, fam_cfg.curve.gamma2, fam_cfg.curve.t_range
        )
        spec, family = build_family(fam_cfg.case, curve, sphere)
        return spec, {"surface": family.as_dict()}, family
    name = sc.catalog
    if name in sphere_names():
        sphere = sphere_catalog(name, sc.params)
        info = {
            "surface": {
                "catalog": name,
                "kind": sphere.kind,
                "quadric": sphere.quadric,
                "params": sphere.params,
            }
        }
        return sphere.spec, info, None
    if name in surface3_names():
        return surface3_catalog(name), {"surface": {"catalog": name}}, None
    raise UnknownSurface(
        f"unknown surface {name!r}; catalog: {sphere_names() + surface3_names()}"
    )


def _default_grid(domain_dim: int) -> list[int]:
    return [5, 5, 5] if domain_dim == 3 else [7, 7]


def _base_report(cfg: RunConfig) -> dict:
    return {
        "version": __version__,
        "schema_version": cfg.schema_version,
        "command": cfg.command,
        "seed": cfg.seed,
    }


def run_invariants(cfg: RunConfig) -> RunResult:
    spec, info, _ = resolve_surface(cfg)
    grid = cfg.grid or _default_grid(spec.domain_dim)
    pts = spec.grid_points(grid)

    def one(p):
        geom = PointGeometry(jet_eval(spec, p, 4))
        return {
            "point": list(p),
            "h": geom.h.tolist(),
            "xi": geom.xi.tolist(),
            "S": geom.S.tolist(),
            "K": geom.K.tolist(),
            "J": geom.J,
            "apolarity_residual": geom.apolarity_residual,
            "volume_residual": geom.volume_residual,
        }

    entries = _parallel_map(one, pts)
    report = _base_report(cfg)
    report.update(info)
    report.update({
        "grid": list(grid),
        "points": entries,
        "index_convention": "h[i][j]; S[j][i] (column i); K[k][i][j]",
    })
    return RunResult(
        command=cfg.command, status="ok", exit_code=0, report=report,
        files={"report.json": json_report(report)},
    )


def run_classify(cfg: RunConfig) -> RunResult:
    spec, info, _ = resolve_surface(cfg)
    if spec.domain_dim != 3:
        raise GeometryError("classify requires a 3-dimensional surface")
    grid = cfg.grid or _default_grid(3)
    pts = spec.grid_points(grid)

    def one(p):
        rep = classify_point(spec, p, compute_eta=True)
        label = rep.group.value if rep.reason is None else f"{rep.group.value}({rep.reason})"
        return {
            "point": list(p),
            "group": rep.group.value,
            "reason": rep.reason,
            "label": label,
            "mu1": rep.mu1, "mu2": rep.mu2, "lambda": rep.lam, "a": rep.a,
            "eta": rep.eta, "nu": rep.nu, "J": rep.J,
            "canonical_residual": rep.canonical_residual,
        }

    entries = _parallel_map(one, pts)
    histogram: dict[str, int] = {}
    for e in entries:
        histogram[e["label"]] = histogram.get(e["label"], 0) + 1
    report = _base_report(cfg)
    report.update(info)
    report.update({"grid": list(grid), "points": entries, "histogram": histogram})
    return RunResult(
        command=cfg.command, status="ok", exit_code=0, report=report,
        files={"report.json": json_report(report)},
    )


def run_construct(cfg: RunConfig) -> RunResult:
    spec, info, family = resolve_surface(cfg)
    grid = cfg.grid or _default_grid(spec.domain_dim)
    pts = spec.grid_points(grid, inset=0.0)
    values = np.stack([spec.value_fn(p) for p in pts])
    report = _base_report(cfg)
    report.update(info)
    report.update({
        "grid": list(grid),
        "mesh_drop_axis": cfg.output.mesh_drop_axis,
        "chart_points": pts.tolist(),
        "ambient_points": values.tolist(),
    })
    mesh = obj_mesh(values, tuple(grid), drop_axis=cfg.output.mesh_drop_axis)
    return RunResult(
        command=cfg.command, status="ok", exit_code=0, report=report,
        files={"report.json": json_report(report), "mesh.obj": mesh},
    )


def run_verify(cfg: RunConfig) -> RunResult:
    spec, info, family = resolve_surface(cfg)
    tol = cfg.tolerances.residual
    residuals = structure_residuals(spec, cfg.samples, seed=cfg.seed)
    checks = {"residuals": residuals.as_dict()}
    passed = residuals.passes(tol)
    if family is not None:
        rt = roundtrip_verify(spec, family, n_samples=cfg.samples, seed=cfg.seed)
        checks["roundtrip"] = rt.as_dict()
        passed = passed and rt.ok and family.admissible and family.definite
    report = _base_report(cfg)
    report.update(info)
    report.update({
        "tolerance": tol,
        "samples": cfg.samples,
        "checks": checks,
        "passed": passed,
    })
    status = "ok" if passed else "verify_failed"
    return RunResult(
        command=cfg.command, status=status, exit_code=0 if passed else 1,
        report=report, files={"report.json": json_report(report)},
    )


def run_flow(cfg: RunConfig) -> RunResult:
    fc = cfg.flow
    lam_expr = sp.sympify(fc.lambda_expr, locals={"t": _T})
    lam = sp.lambdify(_T, lam_expr, modules="numpy")
    init = StructureState(
        t=fc.t_span[0], a=fc.a, eta=fc.eta, mu1=fc.mu1, mu2=fc.mu2,
        beta=fc.beta, f=fc.f, lambda_fn=lambda t: float(lam(t)),
    )
    traj = flow_integrate(init, fc.t_span, fc.step)
    drift = first_integral_check(traj)
    rows = traj.rows()
    csv = csv_trajectory(
        rows, ("t", "a", "eta", "mu1", "mu2", "beta", "f", "e2f_nu", "curvN2")
    )
    report = _base_report(cfg)
    report.update({
        "flow": fc.model_dump(),
        "method": traj.method,
        "actual_step": traj.step,
        "n_steps": len(traj.t) - 1,
        "drift_nu": drift.drift_nu,
        "drift_curv": drift.drift_curv,
        "endpoint": rows[-1],
    })
    return RunResult(
        command=cfg.command, status="ok", exit_code=0, report=report,
        files={"report.json": json_report(report), "trajectory.csv": csv},
    )


_RUNNERS = {
    "invariants": run_invariants,
    "classify": run_classify,
    "construct": run_construct,
    "verify": run_verify,
    "flow": run_flow,
}


def execute(cfg: RunConfig) -> RunResult:
    """Dispatch a validated RunConfig (GeometryError propagates to callers)."""
    return _RUNNERS[cfg.command](cfg)
