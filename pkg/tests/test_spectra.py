"""Tube eigenproblem wiring: component problems, mu1, scaling constants."""

import math

import numpy as np
import pytest
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from tubespec.spectra import (
    ScalingEstimate,
    collar_function_problem,
    scaling_constants,
    t_form_problem,
    theta_form_problem,
    tube_mu1,
)
from tubespec.sturm import MeshSpec, assemble, lowest_eigenvalues
from tubespec.tube import FillingSlope, Tube, invariance_threshold, orbit_length_bound

MESH = MeshSpec(512, "geometric", 0.9)
FINE = MeshSpec(2048, "geometric", 0.9)


def lanczos_lam1(problem, drop_kernel):
    K, M = assemble(problem)
    Ks = sp.diags([K.off, K.diag, K.off], [-1, 0, 1], format="csc")
    Ms = sp.diags([M.off, M.diag, M.off], [-1, 0, 1], format="csc")
    v0 = np.sin(2.1 * np.arange(K.n)) + 0.3
    vals = np.sort(spla.eigsh(Ks, k=3, M=Ms, sigma=-1e-3, which="LM", v0=v0)[0])
    return vals[1] if drop_kernel else vals[0]


class TestTFormProblem:
    def test_constant_weight_control(self):
        p = t_form_problem(math.pi, MESH, constant_weights=True)
        lam = lowest_eigenvalues(p, 1, drop_kernel=True).eigenvalues[0]
        assert lam == pytest.approx(1.0, rel=1e-5)

    def test_scaled_eigenvalue_band(self):
        p = t_form_problem(10.0, FINE)
        lam = lowest_eigenvalues(p, 1, drop_kernel=True).eigenvalues[0]
        oracle = lanczos_lam1(t_form_problem(10.0, MeshSpec(8192, "uniform")), True)
        assert lam == pytest.approx(oracle, rel=1e-5)
        assert 1.0 < lam * 100.0 < 50.0

    def test_domain_monotonicity(self):
        lam5 = lowest_eigenvalues(t_form_problem(5.0, MESH), 1, True).eigenvalues[0]
        lam10 = lowest_eigenvalues(t_form_problem(10.0, MESH), 1, True).eigenvalues[0]
        assert lam10 < lam5

    def test_rejects_bad_radius(self):
        with pytest.raises(ValueError):
            t_form_problem(0.0)


class TestThetaFormProblem:
    def test_constant_weight_control(self):
        p = theta_form_problem(math.pi / 2, MESH, constant_weights=True)
        lam = lowest_eigenvalues(p, 1).eigenvalues[0]
        assert lam == pytest.approx(1.0, rel=1e-5)

    def test_scaled_eigenvalue_band(self):
        p = theta_form_problem(10.0, FINE)
        lam = lowest_eigenvalues(p, 1).eigenvalues[0]
        oracle = lanczos_lam1(theta_form_problem(10.0, MeshSpec(8192, "uniform")), False)
        assert lam == pytest.approx(oracle, rel=1e-4)
        assert 0.5 < lam * 100.0 < 20.0

    def test_strictly_positive_for_all_radii(self):
        for R in (0.5, 2.0, 10.0, 30.0):
            lam = lowest_eigenvalues(theta_form_problem(R, MESH), 1).eigenvalues[0]
            assert lam > 0

    def test_dirichlet_dominance_constant_control(self):
        # with a common constant weight the Dirichlet/Neumann eigenvalue is
        # exactly a quarter of the Neumann/Neumann one: (pi/2R)^2 vs (pi/R)^2
        R = 3.0
        lam_dn = lowest_eigenvalues(
            theta_form_problem(R, MESH, constant_weights=True), 1
        ).eigenvalues[0]
        lam_nn = lowest_eigenvalues(
            t_form_problem(R, MESH, constant_weights=True), 1, drop_kernel=True
        ).eigenvalues[0]
        assert lam_dn == pytest.approx(lam_nn / 4.0, rel=1e-5)
        assert lam_dn == pytest.approx((math.pi / (2 * R)) ** 2, rel=1e-5)


class TestCollarProblem:
    def test_constant_weight_control(self):
        p = collar_function_problem(1.0, 1.0 + math.pi, MESH, constant_weights=True)
        lam = lowest_eigenvalues(p, 1, drop_kernel=True).eigenvalues[0]
        assert lam == pytest.approx(1.0, rel=1e-5)

    def test_reference_interval(self):
        p = collar_function_problem(1.0, 2.0, FINE)
        lam = lowest_eigenvalues(p, 1, drop_kernel=True).eigenvalues[0]
        oracle = lanczos_lam1(
            collar_function_problem(1.0, 2.0, MeshSpec(8192, "uniform")), True
        )
        assert lam == pytest.approx(oracle, rel=1e-5)
        # frozen fine-mesh value
        assert lam == pytest.approx(10.908351, rel=1e-5)

    def test_widening_decreases_eigenvalue(self):
        lam_narrow = lowest_eigenvalues(
            collar_function_problem(1.0, 2.0, MESH), 1, True
        ).eigenvalues[0]
        lam_wide = lowest_eigenvalues(
            collar_function_problem(1.0, 3.0, MESH), 1, True
        ).eigenvalues[0]
        assert lam_wide < lam_narrow

    def test_weight_rescaling_invariance(self):
        # multiplying both weights by a constant leaves the quotient alone
        base = collar_function_problem(1.0, 2.0, MESH)
        lam = lowest_eigenvalues(base, 1, True).eigenvalues[0]
        scaled = collar_function_problem(1.0, 2.0, MESH)
        scaled = type(scaled)(
            s=lambda r: 7.0 * np.cosh(r) * np.sinh(r),
            m=lambda r: 7.0 * np.cosh(r) * np.sinh(r),
            r0=scaled.r0,
            r1=scaled.r1,
            bc_left=scaled.bc_left,
            bc_right=scaled.bc_right,
            mesh=scaled.mesh,
        )
        lam7 = lowest_eigenvalues(scaled, 1, True).eigenvalues[0]
        assert lam7 == pytest.approx(lam, rel=1e-10)

    def test_rejects_bad_interval(self):
        with pytest.raises(ValueError):
            collar_function_problem(2.0, 2.0)
        with pytest.raises(ValueError):
            collar_function_problem(0.0, 2.0)


class TestTubeMu1:
    def test_constant_weight_closed_forms(self):
        tube = Tube(R=math.pi, l=0.05, slope=FillingSlope(1, 2))
        ts = tube_mu1(tube, MESH, constant_weights=True)
        assert ts.lambda_t == pytest.approx(1.0, rel=1e-5)
        assert ts.lambda_theta == pytest.approx(0.25, rel=1e-5)
        assert ts.mu1 == pytest.approx(0.25, rel=1e-5)

    def test_pipeline(self):
        tube = Tube(R=5.0, l=0.05, slope=FillingSlope(1, 2))
        ts = tube_mu1(tube, FINE)
        assert ts.mu1 == min(ts.lambda_t, ts.lambda_theta)
        assert ts.R == 5.0
        threshold = invariance_threshold(orbit_length_bound(tube))
        assert ts.invariance_valid == (ts.mu1 < threshold)

    def test_scaling_band_over_radius_sweep(self):
        vals = []
        for R in (5.0, 10.0, 20.0):
            ts = tube_mu1(Tube(R=R, l=0.05, slope=FillingSlope(1, 2)), FINE)
            vals.append(ts.mu1 * R * R)
        for a, b in zip(vals, vals[1:]):
            assert abs(b / a - 1.0) < 0.2


class TestScalingConstants:
    def test_positive_estimates(self):
        est = scaling_constants([5.0, 10.0, 20.0], MESH)
        assert isinstance(est, ScalingEstimate)
        assert est.c1_hat > 0 and est.c2_hat > 0
        assert len(est.table) == 3
        for R, lam_t, lam_theta, nt, nth in est.table:
            assert nt == pytest.approx(lam_t * R * R)
            assert nth == pytest.approx(lam_theta * R * R)

    def test_constant_weight_control(self):
        est = scaling_constants([4.0, 6.0, 8.0], MESH, constant_weights=True)
        assert est.c1_hat == pytest.approx(math.pi**2, rel=1e-5)
        assert est.c2_hat == pytest.approx(math.pi**2 / 4.0, rel=1e-5)

    def test_stability_under_mesh_doubling(self):
        radii = [5.0, 10.0, 20.0]
        est1 = scaling_constants(radii, MeshSpec(512, "geometric", 0.9))
        est2 = scaling_constants(radii, MeshSpec(1024, "geometric", 0.9))
        assert est1.c1_hat == pytest.approx(est2.c1_hat, rel=0.01)
        assert est1.c2_hat == pytest.approx(est2.c2_hat, rel=0.01)

    def test_rejects_short_sweep(self):
        with pytest.raises(ValueError):
            scaling_constants([5.0], MESH)
