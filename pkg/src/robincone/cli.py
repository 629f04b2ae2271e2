"""Batch front-end: classify | solve | certify | quasimode | sweep.

Each subcommand takes ``--config PATH`` (TOML, see config module); classify
additionally accepts flag sugar (``--kind latitude --theta0 0.7854`` or
``--nu 2 --theta 1.0``) that expands into an equivalent config.  Reports are
written into the output directory as JSON/CSV (and optionally VTK meshes)
and the main result is echoed on stdout as JSON.

Exit codes are a stable contract:
    0  success
    2  unsupported or degenerate geometry
    3  failed precondition (e.g. no positive curvature for a certificate)
    4  escalation budget exhausted
    5  numerical solver failure

Sweep points run on a thread pool sized by ROBINCONE_THREADS (default 1);
outputs are collected in sweep order, so reports are deterministic.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import certify as certify_mod
from . import geometry
from .config import RunConfig, parse_config
from .eigen import spectral_report
from .errors import (
    ConfigError,
    FitDegenerate,
    GeometryError,
    PreconditionError,
    RBudgetExceeded,
    RobinConeError,
    SolverError,
    UnsupportedGeometry,
)
from .fem import assemble_axisymmetric, assemble_planar
from .meshing import build_meridian_mesh, build_planar_mesh, save_vtk

EXIT_GEOMETRY = 2
EXIT_PRECONDITION = 3
EXIT_BUDGET = 4
EXIT_SOLVER = 5


def _pool_size() -> int:
    try:
        return max(1, int(os.environ.get("ROBINCONE_THREADS", "1")))
    except ValueError:
        return 1


def _outdir(cfg: RunConfig) -> Path:
    d = Path(cfg.output.get("dir", "."))
    d.mkdir(parents=True, exist_ok=True)
    return d


def _emit(payload: dict, path: Path = None) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2)
    print(text)
    if path is not None:
        path.write_text(text + "\n")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_classify(cfg: RunConfig) -> int:
    if cfg.perturbation is not None:
        target = cfg.domain_spec(cfg.alphas[0], cfg.truncation_radii[0])
    else:
        target = cfg.cone
    verdict = geometry.classify(target)
    payload = verdict.to_dict()
    payload["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%S")
    out = _outdir(cfg) / "report.json" if cfg.output.get("dir") else None
    _emit(payload, out)
    return 0


def _bisector(cfg: RunConfig) -> float:
    # the quadrant convention puts the sector into {x > 0, y > 0}
    default = math.pi / 4.0 if cfg.domain.get("kind") == "quadrant" else 0.0
    return float(cfg.numerics.get("bisector_angle", default))


def _solve_point(cfg: RunConfig, alpha: float, R_T: float, mode: int):
    h = float(cfg.numerics.get("h", 0.1))
    margin = float(cfg.numerics.get("margin", 1e-3))
    k_max = int(cfg.numerics.get("k_max", 8))
    spec = cfg.domain_spec(alpha, R_T)
    if cfg.dimension == 2:
        mesh = build_planar_mesh(spec, h, _bisector(cfg))
        forms = assemble_planar(mesh, alpha, spec.artificial_bc)
    else:
        mesh = build_meridian_mesh(spec, h)
        forms = assemble_axisymmetric(mesh, alpha, mode, spec.artificial_bc)
    meta = {"h": h, "R_T": R_T, "bc": spec.artificial_bc}
    report = spectral_report(forms, meta, margin=margin, k_max=k_max)
    return mesh, report


def cmd_solve(cfg: RunConfig) -> int:
    modes = [int(m) for m in cfg.numerics.get("modes", [0])] if cfg.dimension == 3 else [0]
    points = [
        (alpha, R_T, m)
        for alpha in cfg.alphas
        for R_T in cfg.truncation_radii
        for m in modes
    ]
    outdir = _outdir(cfg)
    formats = cfg.output.get("formats", ["json", "csv"])

    def run(point):
        return _solve_point(cfg, *point)

    with ThreadPoolExecutor(max_workers=_pool_size()) as pool:
        results = list(pool.map(run, points))

    rows = ["alpha,R_T,h,m,margin,count,lambda_1,lambda_2,lambda_3,lambda_4"]
    summary = []
    for (alpha, R_T, m), (mesh, report) in zip(points, results):
        key = f"a{alpha:g}_R{R_T:g}_m{m}"
        if "json" in formats:
            payload = report.to_dict()
            payload["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%S")
            (outdir / f"report_{key}.json").write_text(
                json.dumps(payload, sort_keys=True, indent=2) + "\n"
            )
        if "vtk" in formats:
            save_vtk(mesh, str(outdir / f"mesh_{key}.vtk"))
        lams = list(report.eigenvalues[:4]) + [math.nan] * 4
        rows.append(
            ",".join(
                [f"{alpha!r}", f"{R_T!r}", f"{report.mesh_meta['h']!r}", str(m),
                 f"{report.margin!r}", str(report.counts[cfg.domain.get('artificial_bc', 'dirichlet')])]
                + [f"{v!r}" for v in lams[:4]]
            )
        )
        summary.append(
            {
                "alpha": alpha,
                "R_T": R_T,
                "mode": m,
                "count": report.counts[cfg.domain.get("artificial_bc", "dirichlet")],
                "eigenvalues": list(report.eigenvalues),
            }
        )
    if "csv" in formats:
        (outdir / "sweep.csv").write_text("\n".join(rows) + "\n")
    _emit({"points": summary})
    return 0


def cmd_certify(cfg: RunConfig) -> int:
    alpha = cfg.alphas[0]
    N = int(cfg.numerics.get("N_certificate", 3))
    r0 = float(cfg.numerics.get("r0", 1.0))
    family = certify_mod.build_trial_family(cfg.cone, alpha, N, r0)
    payload = family.to_dict()
    payload["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%S")
    out = _outdir(cfg) / "certificate.json" if cfg.output.get("dir") else None
    _emit(payload, out)
    return 0 if family.certified else EXIT_BUDGET


def cmd_quasimode(cfg: RunConfig) -> int:
    alpha = cfg.alphas[0]
    k = float(cfg.numerics.get("k_quasimode", 1.0))
    Ns = cfg.numerics.get("N_quasimode", [20, 40, 80])
    rows = []
    for N in Ns:
        r = certify_mod.build_quasimode(cfg.cone, alpha, k, float(N))
        rows.append(
            {
                "N": N,
                "quotient": r.quotient,
                "target": k**2 - alpha**2,
                "deviation": r.deviation,
            }
        )
    payload = {"alpha": alpha, "k": k, "results": rows}
    payload["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%S")
    out = _outdir(cfg) / "quasimode.json" if cfg.output.get("dir") else None
    _emit(payload, out)
    return 0


def cmd_sweep(cfg: RunConfig) -> int:
    """Alpha sweep with an asymptotic-slope fit on the top half.

    The bottom eigenvalue behaves like -C*alpha^2 for large alpha; the fit
    of log(-lambda_1) against log(alpha) over the upper half of the sweep
    reports the slope and the constant C.  Mesh size and truncation are
    rescaled with 1/alpha so every sweep point runs at matched resolution.
    """
    if len(cfg.alphas) < 2:
        raise ConfigError("sweep requires alpha_sweep with at least 2 steps")
    alpha0 = cfg.alphas[0]
    R_T0 = cfg.truncation_radii[0]
    h0 = float(cfg.numerics.get("h", 0.1))
    margin = float(cfg.numerics.get("margin", 1e-3))
    outdir = _outdir(cfg)

    def run(alpha):
        scale = alpha0 / alpha
        spec = cfg.domain_spec(alpha, R_T0 * scale)
        if cfg.dimension == 2:
            mesh = build_planar_mesh(spec, h0 * scale, _bisector(cfg))
            forms = assemble_planar(mesh, alpha, spec.artificial_bc)
        else:
            mesh = build_meridian_mesh(spec, h0 * scale)
            forms = assemble_axisymmetric(mesh, alpha, 0, spec.artificial_bc)
        meta = {"h": h0 * scale, "R_T": R_T0 * scale, "bc": spec.artificial_bc}
        return spectral_report(forms, meta, margin=margin, k_max=2)

    with ThreadPoolExecutor(max_workers=_pool_size()) as pool:
        reports = list(pool.map(run, cfg.alphas))

    rows = ["alpha,R_T,h,m,margin,count,lambda_1"]
    good = []
    for alpha, rep in zip(cfg.alphas, reports):
        lam1 = rep.eigenvalues[0] if rep.eigenvalues else math.nan
        rows.append(
            f"{alpha!r},{rep.mesh_meta['R_T']!r},{rep.mesh_meta['h']!r},0,"
            f"{rep.margin!r},{list(rep.counts.values())[0]},{lam1!r}"
        )
        if rep.eigenvalues:
            good.append((alpha, lam1))
    (outdir / "sweep.csv").write_text("\n".join(rows) + "\n")

    top = [(a, l) for a, l in good if a >= good[len(good) // 2][0]] if good else []
    if len(top) < 3:
        raise FitDegenerate(
            f"only {len(top)} converged sweep points in the fitting range"
        )
    logs_a = np.log([a for a, _ in top])
    logs_l = np.log([-l for _, l in top])
    slope, intercept = np.polyfit(logs_a, logs_l, 1)
    C = math.exp(intercept)
    payload = {
        "slope": float(slope),
        "C": float(C),
        "points_used": len(top),
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S"),
    }
    _emit(payload, outdir / "fit.json")
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _config_from_args(args) -> RunConfig:
    if args.config:
        try:
            import tomllib
        except ModuleNotFoundError:
            import tomli as tomllib
        with open(args.config, "rb") as f:
            data = tomllib.load(f)
        data.setdefault("pipeline", {}).setdefault(args.command, True)
        return parse_config(data)
    # sugar flags expand into an in-memory config
    dom = {}
    if args.kind:
        dom["kind"] = args.kind
    if args.theta0 is not None:
        dom["theta0"] = args.theta0
        dom.setdefault("kind", "latitude")
    if args.theta is not None:
        dom["theta"] = args.theta
        dom.setdefault("kind", "sector")
    if args.nu == 2 and "kind" not in dom:
        dom["kind"] = "sector"
    if args.rho:
        dom["rho"] = args.rho
        dom.setdefault("kind", "graph")
    if args.alpha is not None:
        dom["alpha"] = args.alpha
    data = {"domain": dom, "pipeline": {args.command: True}, "output": {}}
    return parse_config(data)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="robincone",
        description="Discrete spectrum of Robin Laplacians on conical domains",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("classify", "solve", "certify", "quasimode", "sweep"):
        p = sub.add_parser(name)
        p.add_argument("--config", help="TOML run configuration")
        p.add_argument("--kind", choices=["latitude", "sector", "graph", "quadrant"])
        p.add_argument("--theta0", type=float, help="polar angle of a latitude circle")
        p.add_argument("--theta", type=float, help="half-aperture of a planar sector")
        p.add_argument("--rho", help="graph profile expression in phi")
        p.add_argument("--nu", type=int, choices=[2, 3])
        p.add_argument("--alpha", type=float)
    args = parser.parse_args(argv)

    dispatch = {
        "classify": cmd_classify,
        "solve": cmd_solve,
        "certify": cmd_certify,
        "quasimode": cmd_quasimode,
        "sweep": cmd_sweep,
    }
    try:
        cfg = _config_from_args(args)
        return dispatch[args.command](cfg)
    except (UnsupportedGeometry, GeometryError, ConfigError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}))
        return EXIT_GEOMETRY
    except PreconditionError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}))
        return EXIT_PRECONDITION
    except RBudgetExceeded as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}))
        return EXIT_BUDGET
    except (SolverError, RobinConeError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}))
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
