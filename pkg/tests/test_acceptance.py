"""Acceptance suite: one test per criterion, one printed verdict line each.

Run with ``pytest -s tests/test_acceptance.py`` to see the PASS lines as
they complete.  Heavy computations are shared through session fixtures
(see conftest), so the whole suite stays within a laptop budget.
"""

import json
import math

import numpy as np
import pytest
import scipy.linalg as sla

from robincone.certify import (
    build_trial_family,
    build_quasimode,
    cross_rayleigh,
    halfline_inequality_check,
    solve_robin_dirichlet_1d,
)
from robincone.cli import main as cli_main
from robincone.eigen import count_below, eigenpairs_below
from robincone.fem import FormTriple, SparseSymmetric
from robincone.geometry import ConeSpec, LatitudeCircle, boundary_curve


def verdict(num, name, ok, detail):
    line = f"ACCEPTANCE {num} [{name}]: {'PASS' if ok else 'FAIL'} ({detail})"
    print(line)
    assert ok, line


def test_acceptance_1_quadrant_benchmark(quadrant_benchmark):
    _, forms, report, elapsed = quadrant_benchmark
    count = report.counts["dirichlet"]
    lam1 = report.eigenvalues[0]
    ok = count == 1 and -2.02 <= lam1 <= -1.98 and elapsed < 60.0
    verdict(
        1,
        "quadrant exact benchmark",
        ok,
        f"count={count}, lambda_1={lam1:.6f}, runtime={elapsed:.1f}s",
    )


def test_acceptance_2_convex_complement_empty(wide_cone_counts):
    ok = all(c == 0 for c in wide_cone_counts.values())
    verdict(
        2,
        "convex-complement emptiness",
        ok,
        f"counts={sorted(wide_cone_counts.items())}",
    )


def test_acceptance_3_infinite_spectrum_signature(sharp_cone_counts, fd_sharp_count_20):
    radii = (10.0, 20.0, 40.0, 80.0)
    counts = [sharp_cone_counts[R][1] for R in radii]
    monotone = all(b >= a for a, b in zip(counts[:-1], counts[1:]))
    ok = monotone and counts[-1] >= 3 and fd_sharp_count_20 == sharp_cone_counts[20.0][1]
    verdict(
        3,
        "infinite-spectrum signature",
        ok,
        f"counts={counts} over R_T={radii}, FD@20={fd_sharp_count_20}",
    )


def test_acceptance_4_trial_function_certificate():
    fam = build_trial_family(ConeSpec(LatitudeCircle(np.pi / 4)), 1.0, 5, r0=1.0)
    crosses = [
        abs(cross_rayleigh(fam, i, j))
        for i in range(5)
        for j in range(5)
        if i != j
    ]
    agree = max(
        abs(a - b) / abs(b) for a, b in zip(fam.quotients_coarse, fam.quotients)
    )
    ok = (
        fam.certified
        and all(q < -1.0 for q in fam.quotients)
        and max(crosses) < 1e-12
        and agree <= 1e-6
    )
    verdict(
        4,
        "disjoint trial-function family",
        ok,
        f"R={fam.R:g}, worst quotient={max(fam.quotients):.6f}, "
        f"max cross={max(crosses):.1e}, order agreement={agree:.1e}",
    )


def test_acceptance_5_robin_dirichlet_1d_bound():
    worst_resid = 0.0
    worst_slack = math.inf
    for R in (4.0, 10.0, 30.0):
        for alpha in (0.5, 1.0, 2.0):
            delta = R**-0.5
            eig = solve_robin_dirichlet_1d(R, alpha, delta)
            beta = R * alpha
            lo = -(beta**2)
            hi = -(beta**2) + 10.0 * beta**2 * math.exp(-delta * beta)
            assert lo - 1e-12 * beta**2 <= eig.E <= hi
            worst_resid = max(worst_resid, eig.root_residual, eig.bc_residual())
            worst_slack = min(worst_slack, hi - eig.E)
    ok = worst_resid < 1e-12
    verdict(
        5,
        "1D Robin-Dirichlet eigenvalue bound",
        ok,
        f"9-point grid, max residual={worst_resid:.1e}, min slack={worst_slack:.2e}",
    )


def test_acceptance_6_quasimode_threshold_approach():
    cone = ConeSpec(LatitudeCircle(np.pi / 3))
    devs = [build_quasimode(cone, 1.0, 1.0, N).deviation for N in (20.0, 40.0, 80.0)]
    r1, r2 = devs[1] / devs[0], devs[2] / devs[1]
    ok = r1 <= 0.85 and r2 <= 0.85
    verdict(
        6,
        "quasi-mode threshold approach",
        ok,
        f"deviations={[f'{d:.3e}' for d in devs]}, ratios={r1:.2f},{r2:.2f}",
    )


def test_acceptance_7_halfline_inequality():
    from scipy.interpolate import CubicSpline

    eq = abs(halfline_inequality_check(lambda t: np.exp(-t), 1.0))
    rng = np.random.default_rng(777)
    worst = math.inf
    for _ in range(100):
        alpha = float(rng.uniform(0.3, 3.0))
        nknots = int(rng.integers(4, 10))
        knots = np.sort(rng.uniform(0.0, 8.0, nknots))
        knots[0] = 0.0
        vals = rng.standard_normal(nknots)
        vals[-1] = 0.0
        spline = CubicSpline(knots, vals, bc_type=((1, 0.0), (1, 0.0)))
        T = float(knots[-1])

        def v(t, s=spline, T=T):
            t = np.asarray(t, dtype=float)
            return np.where(t <= T, s(np.minimum(t, T)), 0.0)

        worst = min(
            worst,
            halfline_inequality_check(v, alpha, breakpoints=list(knots[1:]), horizon=T),
        )
    ok = worst >= -1e-10 and eq < 1e-10
    verdict(
        7,
        "half-line kernel inequality",
        ok,
        f"min over 100 splines={worst:.2e}, equality case={eq:.1e}",
    )


@pytest.mark.parametrize(
    "name,theta,bisector,expect_C",
    [
        ("quadrant", np.pi / 4, np.pi / 4, 2.0),
        ("sector pi/6", np.pi / 6, 0.0, 4.0),
    ],
)
def test_acceptance_8_asymptotic_slope(tmp_path, capsys, name, theta, bisector, expect_C):
    cfg = tmp_path / "sweep.toml"
    cfg.write_text(
        f"""
[domain]
kind = "sector"
theta = {theta}
R_T = 12.0
artificial_bc = "dirichlet"
[domain.alpha_sweep]
from = 1.0
to = 8.0
steps = 8
scale = "log"
[pipeline]
solve = true
[numerics]
h = 0.1
bisector_angle = {bisector}
[output]
dir = "{tmp_path.as_posix()}/out"
"""
    )
    code = cli_main(["sweep", "--config", str(cfg)])
    payload = json.loads(capsys.readouterr().out)
    slope, C = payload["slope"], payload["C"]
    ok = code == 0 and abs(slope - 2.0) <= 0.05 and abs(C - expect_C) <= 0.05 * expect_C
    verdict(
        8,
        f"asymptotic slope ({name})",
        ok,
        f"slope={slope:.4f} (want 2.00 +/- 0.05), C={C:.4f} (want {expect_C} +/- 5%)",
    )


def test_acceptance_9_solver_soundness():
    rng = np.random.default_rng(1357)
    count_ok = True
    pair_err = 0.0
    for trial in range(30):
        n = 50
        A = rng.standard_normal((n, n))
        A = 0.5 * (A + A.T)
        M = rng.standard_normal((n, n))
        M = M @ M.T + n * np.eye(n)
        w, _ = sla.eigh(A, M)
        r, c = np.tril_indices(n)

        def ssym(D):
            return SparseSymmetric.from_triplets(r, c, D[r, c], n)

        zero = SparseSymmetric.from_triplets([0], [0], [0.0], n)
        forms = FormTriple(ssym(A), zero, ssym(M), np.arange(n), 0.0, "neumann")
        shift = float(np.percentile(w, 30)) + 1e-9
        if count_below(forms, shift) != int(np.sum(w < shift)):
            count_ok = False
        if trial < 10:
            res = eigenpairs_below(forms, shift, 5)
            expect = np.sort(w[w < shift])[:5]
            pair_err = max(pair_err, float(np.max(np.abs(res.values - expect))))
    ok = count_ok and pair_err < 1e-10
    verdict(
        9,
        "solver soundness vs dense",
        ok,
        f"30 pencils exact counts={count_ok}, max eigenpair error={pair_err:.2e}",
    )


def test_acceptance_10_curvature_kernel():
    thetas = (np.pi / 6, np.pi / 4, np.pi / 3, np.pi / 2, 2 * np.pi / 3)
    worst = 0.0
    for t0 in thetas:
        curve = boundary_curve(LatitudeCircle(t0))
        worst = max(worst, float(np.max(np.abs(curve.kappa_samples() - 1.0 / np.tan(t0)))))
    curve = boundary_curve(LatitudeCircle(np.pi / 3))
    rev = curve.reversed()
    idx = (-np.arange(curve.n_samples)) % curve.n_samples
    flip = float(np.max(np.abs(rev.kappa_samples() + curve.kappa_samples()[idx])))
    ok = worst < 1e-6 and flip < 1e-12
    verdict(
        10,
        "curvature kernel",
        ok,
        f"max |kappa - cot(theta0)|={worst:.2e}, flip antisymmetry={flip:.2e}",
    )
