"""Acceptance suite: one test per criterion, printing one PASS/FAIL line each.

Run with `pytest tests/test_acceptance.py -v -s` to see the lines as they
complete.  Tolerances are fixed here, not calibrated.
"""

import math
import random
import time
from fractions import Fraction

import numpy as np
from click.testing import CliRunner

from tubespec.assembly import ModelManifold, ThickPartSpec, scaling_fit, theorem1_bounds, theorem2_sequence
from tubespec.cli import main as cli_main
from tubespec.covering import CoverSpec, OpenPiece, Overlap, evaluate
from tubespec.intmat import IntMatrix, adjugate, boundary_image_check, det
from tubespec.spectra import scaling_constants
from tubespec.sturm import (
    DIRICHLET,
    NEUMANN,
    MeshSpec,
    SLProblem,
    convergence_study,
    lowest_eigenvalues,
)
from tubespec.tube import FillingSlope, Tube


def _check(name: str, ok: bool, detail: str = "") -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] {name}"
    if detail:
        line += f": {detail}"
    print(line)
    assert ok, line


def ones(r):
    return np.ones_like(np.asarray(r, dtype=float))


def tanh(r):
    return np.tanh(r)


def coth(r):
    return 1.0 / np.tanh(r)


GEO = lambda n: MeshSpec(n, "geometric", 0.9)


def test_criterion_1_constant_weight_controls():
    t0 = time.perf_counter()
    nn = SLProblem(ones, ones, 0.0, math.pi, NEUMANN, NEUMANN, MeshSpec(4096, "uniform"))
    lam_nn = lowest_eigenvalues(nn, 1, drop_kernel=True).eigenvalues[0]
    t_nn = time.perf_counter() - t0
    t0 = time.perf_counter()
    dn = SLProblem(ones, ones, 0.0, math.pi / 2, DIRICHLET, NEUMANN, MeshSpec(4096, "uniform"))
    lam_dn = lowest_eigenvalues(dn, 1).eigenvalues[0]
    t_dn = time.perf_counter() - t0
    err_nn = abs(lam_nn - 1.0)
    err_dn = abs(lam_dn - 1.0)
    _check(
        "criterion 1 constant-weight controls",
        err_nn <= 1e-4 and err_dn <= 1e-4 and t_nn < 1.0 and t_dn < 1.0,
        f"NN err {err_nn:.2e} ({t_nn:.2f}s), DN err {err_dn:.2e} ({t_dn:.2f}s)",
    )


def test_criterion_2_convergence_order():
    # closed-form errors halve by >= 3.5 per doubling for constant weights
    errors = []
    for n in (128, 256, 512, 1024):
        p = SLProblem(ones, ones, 0.0, math.pi, NEUMANN, NEUMANN, MeshSpec(n, "uniform"))
        errors.append(abs(lowest_eigenvalues(p, 1, drop_kernel=True).eigenvalues[0] - 1.0))
    ratios = [a / b for a, b in zip(errors, errors[1:])]
    const_ok = all(r >= 3.5 for r in ratios)
    # self-convergence for the degenerate-weight problems
    study_t = convergence_study(
        SLProblem(tanh, tanh, 0.0, 10.0, NEUMANN, NEUMANN, GEO(256)),
        [256, 512, 1024],
        drop_kernel=True,
    )
    study_th = convergence_study(
        SLProblem(coth, coth, 0.0, 10.0, DIRICHLET, NEUMANN, GEO(256)),
        [256, 512, 1024],
    )
    self_ok = (
        study_t.estimated_order is not None
        and study_t.estimated_order >= 1.5
        and study_th.estimated_order is not None
        and study_th.estimated_order >= 1.5
    )
    _check(
        "criterion 2 convergence order",
        const_ok and self_ok,
        f"constant-weight ratios {['%.2f' % r for r in ratios]}, "
        f"tanh order {study_t.estimated_order:.2f}, coth order {study_th.estimated_order:.2f}",
    )


def test_criterion_3_tube_scaling():
    t0 = time.perf_counter()
    radii = [5.0, 10.0, 20.0, 40.0]
    coarse = scaling_constants(radii, GEO(2048))
    fine = scaling_constants(radii, GEO(4096))
    elapsed = time.perf_counter() - t0

    def band_ok(col):
        vals = [row[col] for row in coarse.table]
        ok = all(v > 0 for v in vals)
        for a, b in zip(vals, vals[1:]):
            ok = ok and abs(b / a - 1.0) < 0.2
        return ok, vals

    t_ok, t_vals = band_ok(3)
    th_ok, th_vals = band_ok(4)
    stable = all(
        abs(f[3] / c[3] - 1.0) <= 0.01 and abs(f[4] / c[4] - 1.0) <= 0.01
        for c, f in zip(coarse.table, fine.table)
    )
    _check(
        "criterion 3 tube eigenvalue scaling",
        t_ok and th_ok and stable and elapsed < 30.0,
        f"lambda_t*R^2 in [{min(t_vals):.2f}, {max(t_vals):.2f}], "
        f"lambda_theta*R^2 in [{min(th_vals):.2f}, {max(th_vals):.2f}], "
        f"mesh-doubling stable, {elapsed:.1f}s",
    )


def test_criterion_4_quasi_isometry():
    tau = 1.5
    rng = np.random.default_rng(2024)
    base = SLProblem(tanh, tanh, 0.0, 5.0, NEUMANN, NEUMANN, MeshSpec(192, "uniform"))
    lam_base = lowest_eigenvalues(base, 1, drop_kernel=True).eigenvalues[0]
    violations = 0
    for _ in range(100):
        c = rng.uniform(-1.0, 1.0, 4)
        scale = math.log(tau) / np.sum(np.abs(c))

        def bump(r, c=c, scale=scale):
            r = np.asarray(r, dtype=float)
            phase = (
                c[0] * np.sin(r) + c[1] * np.cos(2 * r) + c[2] * np.sin(3 * r) + c[3]
            )
            return np.exp(scale * phase)

        pert = SLProblem(
            lambda r: np.tanh(r) * bump(r),
            lambda r: np.tanh(r) * bump(r),
            0.0,
            5.0,
            NEUMANN,
            NEUMANN,
            MeshSpec(192, "uniform"),
        )
        lam = lowest_eigenvalues(pert, 1, drop_kernel=True).eigenvalues[0]
        ratio = lam / lam_base
        if not (tau**-2 <= ratio <= tau**2):
            violations += 1
    _check(
        "criterion 4 quasi-isometry eigenvalue stability",
        violations == 0,
        f"100 perturbations, {violations} violations",
    )


def test_criterion_5_covering_evaluator():
    def cover(mu1=1.0, mu2=1.0, mu12=1.0, c_rho=0.0, ct=0.0, e=2):
        return CoverSpec(
            opens=(OpenPiece("U1", mu1), OpenPiece("U2", mu2)),
            overlaps=(Overlap("U1", "U2", mu12),),
            c_rho=c_rho,
            C_T=ct,
            ct_exponent=e,
        )

    exact_18 = evaluate(cover()).bound == 1.0 / 18.0
    exact_42 = evaluate(cover(c_rho=1.0, ct=1.0, e=1)).bound == 1.0 / 42.0

    rng = random.Random(99)
    violations = 0
    for _ in range(200):
        n = rng.randint(2, 4)
        ids = [f"U{i}" for i in range(n)]
        opens = tuple(OpenPiece(i, rng.uniform(0.1, 10.0)) for i in ids)
        pairs = [(a, b) for i, a in enumerate(ids) for b in ids[i + 1 :]]
        rng.shuffle(pairs)
        overlaps = tuple(
            Overlap(a, b, rng.uniform(0.1, 10.0))
            for a, b in pairs[: rng.randint(1, len(pairs))]
        )
        spec = CoverSpec(
            opens=opens,
            overlaps=overlaps,
            c_rho=rng.uniform(0.0, 5.0),
            C_T=rng.uniform(0.0, 5.0),
            ct_exponent=rng.choice((1, 2)),
        )
        base = evaluate(spec).bound
        from dataclasses import replace

        up = 1.0 + rng.uniform(0.1, 2.0)
        for o in spec.opens:
            bigger = replace(
                spec,
                opens=tuple(
                    replace(q, mu=q.mu * up) if q.id == o.id else q for q in spec.opens
                ),
            )
            if evaluate(bigger).bound < base - 1e-15:
                violations += 1
        for ov in spec.overlaps:
            bigger = replace(
                spec,
                overlaps=tuple(
                    replace(q, mu=q.mu * up) if q is ov else q for q in spec.overlaps
                ),
            )
            if evaluate(bigger).bound < base - 1e-15:
                violations += 1
        if evaluate(replace(spec, c_rho=spec.c_rho * up)).bound > base + 1e-15:
            violations += 1
        if evaluate(replace(spec, C_T=spec.C_T * up)).bound > base + 1e-15:
            violations += 1
    _check(
        "criterion 5 covering evaluator",
        exact_18 and exact_42 and violations == 0,
        f"1/18 exact, 1/42 exact, monotonicity violations {violations}/200 covers",
    )


def test_criterion_6_integer_algebra():
    rng = random.Random(1234)
    adj_ok = True
    det_adj_ok = True
    for _ in range(200):
        n = rng.randint(1, 6)
        m = IntMatrix.from_rows(
            [[rng.randint(-10, 10) for _ in range(n)] for _ in range(n)]
        )
        adj = adjugate(m)
        d = det(m)
        expected = IntMatrix.identity(n).scaled(d).entries
        if (m @ adj).entries != expected or (adj @ m).entries != expected:
            adj_ok = False
        if n >= 2 and det(adj) != d ** (n - 1):
            det_adj_ok = False
    # the k=1 section matrix: adj([[1,a],[0,b]])/det = [[1,-a/b],[0,1/b]]
    a, b = 3, 7
    P = IntMatrix.from_rows([[1, a], [0, b]])
    adj = adjugate(P)
    d = det(P)
    section = [[Fraction(v, d) for v in row] for row in adj.entries]
    t_ok = section == [
        [Fraction(1), Fraction(-a, b)],
        [Fraction(0), Fraction(1, b)],
    ]
    _check(
        "criterion 6 exact integer algebra",
        adj_ok and det_adj_ok and t_ok,
        "adjugate identity and det(adj) = det^(n-1) exact on 200 matrices, "
        "section matrix reproduced",
    )


def test_criterion_7_isotropy_check():
    J = IntMatrix.from_rows([[0, 1], [-1, 0]])
    solid_torus = boundary_image_check(IntMatrix.from_rows([[1], [0]]), J)
    counterexample = boundary_image_check(IntMatrix.identity(2), J)
    _check(
        "criterion 7 boundary isotropy check",
        solid_torus.isotropic
        and solid_torus.half_dim
        and solid_torus.rank == 1
        and not counterexample.isotropic,
        "solid torus passes, full-rank image fails",
    )


def test_criterion_8_theorem1_pipeline():
    radii = (6.0, 12.0, 24.0, 48.0)
    thick = ThickPartSpec()
    reports = [
        theorem1_bounds(
            ModelManifold(thick, (Tube(R, 0.05, FillingSlope(2, 1)),)), mesh=GEO(2048)
        )
        for R in radii
    ]
    ds = [r.d for r in reports]
    span_ok = max(ds) / min(ds) >= 4.0
    band_k1 = [r.mu_k1_lb * r.d**2 for r in reports]
    band_k1_ok = max(band_k1) / min(band_k1) <= 10.0
    fit = scaling_fit(reports, "mu_k1")
    slope_ok = -2.3 <= fit.slope <= -1.7
    norm1 = [
        math.exp(math.log(r.mu1_lb) + 4 * math.log(r.d) + 2 * r.constants["k"] * r.d)
        for r in reports
    ]
    norm1_ok = min(norm1) > 0 and max(norm1) / min(norm1) <= 10.0
    _check(
        "criterion 8 theorem1 pipeline",
        span_ok and band_k1_ok and slope_ok and norm1_ok,
        f"d span {max(ds)/min(ds):.1f}, mu_k1*d^2 band ratio "
        f"{max(band_k1)/min(band_k1):.2f}, slope {fit.slope:.3f}, "
        f"mu1 normalization in [{min(norm1):.2f}, {max(norm1):.2f}]",
    )


def test_criterion_9_theorem2_pipeline():
    thick = ThickPartSpec()
    template = ModelManifold(thick, (Tube(1.0, 0.05, FillingSlope(1, 1)),))
    rows = theorem2_sequence(template, range(8, 65), mesh=GEO(2048))
    passing = [r for r in rows if r.regime_ok]
    all_pass = len(passing) == len(rows)
    caps = {r.report.cover_mu1.C_T for r in passing}
    cap_ok = len(caps) == 1 and caps == {thick.c_prime}
    band = [r.normalized for r in passing]
    band_ok = max(band) / min(band) <= 10.0
    _check(
        "criterion 9 theorem2 pipeline",
        all_pass and cap_ok and band_ok,
        f"{len(passing)}/{len(rows)} rows in regime, uniform cap exact, "
        f"mu1*d^2 band ratio {max(band)/min(band):.2f}",
    )


def test_criterion_10_deterministic_csv(tmp_path):
    runner = CliRunner()
    cfgfile = tmp_path / "run.toml"
    cfgfile.write_text("[solver]\nmesh_n = 512\n")
    out1, out2 = tmp_path / "run1.csv", tmp_path / "run2.csv"
    r1 = runner.invoke(cli_main, ["theorem1", "--config", str(cfgfile), "--out", str(out1)])
    r2 = runner.invoke(cli_main, ["theorem1", "--config", str(cfgfile), "--out", str(out2)])
    identical = (
        r1.exit_code == 0 and r2.exit_code == 0 and out1.read_bytes() == out2.read_bytes()
    )
    _check(
        "criterion 10 deterministic output",
        identical,
        f"two theorem1 runs, {out1.stat().st_size} bytes each, byte-identical",
    )
