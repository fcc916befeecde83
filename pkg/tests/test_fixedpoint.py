"""Tests for the deterministic forward fixed-point solver."""

import numpy as np
import pytest

import bethestrip.fixedpoint as fp
from bethestrip.errors import (
    ContinuationBreakdownError,
    NoConvergenceError,
    SingularJacobianError,
    UnsupportedEnsembleError,
)
from bethestrip.fixedpoint import (
    FixedPointProblem,
    SolveReport,
    continuation_to_boundary,
    newton_solve,
    picard_solve,
    solve_forward,
)
from bethestrip.free import free_forward_green, free_forward_green_boundary
from bethestrip.linalg import SpectralPoint, min_imag_eigenvalue
from bethestrip.model import GOE, BetheStripModel, DiagonalIID, PointMass

from conftest import random_symmetric


def make_model(K=2, a=(0.0,), lam=0.0, ensemble=None):
    if ensemble is None:
        ensemble = DiagonalIID("uniform")
    return BetheStripModel(K=K, a=a, lam=lam, ensemble=ensemble)


def herglotz_quadratic_root(K, z, b):
    """Im>0 root of (K/4) g^2 + (z - b) g + 1 = 0 via numpy.roots."""
    roots = np.roots([0.25 * K, z - b, 1.0])
    upper = roots[roots.imag > 0]
    assert upper.size == 1
    return complex(upper[0])


def diagonalized_solution(model, z):
    """Independent closed form for the point-mass fixed point.

    The equation only involves B = A + lam*V0, so in B's orthogonal
    eigenbasis it decouples into scalar quadratics, one per eigenvalue.
    """
    B = np.array(model.a_matrix, dtype=float)
    if model.lam != 0.0:
        B = B + model.lam * model.ensemble.matrix
    evals, U = np.linalg.eigh(B)
    g = np.array([herglotz_quadratic_root(model.K, z, b) for b in evals])
    return U @ np.diag(g) @ U.T


class TestProblem:
    def test_requires_deterministic_potential(self):
        with pytest.raises(UnsupportedEnsembleError):
            FixedPointProblem(make_model(lam=0.3, ensemble=GOE()),
                              SpectralPoint(0.0, 1.0))

    def test_lam_zero_any_ensemble_ok(self):
        prob = FixedPointProblem(make_model(lam=0.0, ensemble=GOE()),
                                 SpectralPoint(0.0, 1.0))
        assert prob.onsite_matrix() == pytest.approx(np.zeros((1, 1)))

    def test_initial_shape_checked(self):
        with pytest.raises(ValueError):
            FixedPointProblem(make_model(), SpectralPoint(0.0, 1.0),
                              np.zeros((2, 2)))

    def test_onsite_includes_shifted_point_mass(self):
        V0 = ((0.2, 0.1), (0.1, -0.3))
        mod = make_model(a=(-0.5, 0.5), lam=2.0, ensemble=PointMass(V0))
        prob = FixedPointProblem(mod, SpectralPoint(0.0, 1.0))
        want = np.array([[-0.5 + 0.4, 0.2], [0.2, 0.5 - 0.6]])
        np.testing.assert_allclose(prob.onsite_matrix(), want)

    def test_default_guess_is_free_solution(self):
        mod = make_model(a=(-0.5, 0.5))
        sp = SpectralPoint(0.3, 0.7)
        prob = FixedPointProblem(mod, sp)
        np.testing.assert_allclose(prob.initial_guess(),
                                   free_forward_green(sp, mod))
        prob0 = FixedPointProblem(mod, SpectralPoint(0.3, 0.0))
        np.testing.assert_allclose(prob0.initial_guess(),
                                   free_forward_green_boundary(0.3, mod))


class TestPicard:
    def test_scalar_free_from_zero(self):
        prob = FixedPointProblem(make_model(), SpectralPoint(0.0, 1.0),
                                 np.zeros((1, 1)))
        rep = picard_solve(prob, tol=1e-12)
        assert rep.method == "picard"
        assert rep.converged
        assert rep.residual < 1e-12
        assert rep.solution[0, 0] == pytest.approx(1j * (np.sqrt(3) - 1),
                                                   abs=1e-11)

    def test_free_matrix_case(self):
        mod = make_model(K=3, a=(-0.7, 0.1, 0.4))
        sp = SpectralPoint(0.2, 0.8)
        prob = FixedPointProblem(mod, sp, np.zeros((3, 3)))
        rep = picard_solve(prob)
        np.testing.assert_allclose(rep.solution, free_forward_green(sp, mod),
                                   atol=1e-10)

    def test_point_mass_quadratic_oracle(self):
        mod = make_model(lam=1.0, ensemble=PointMass(((1.0,),)))
        rep = picard_solve(FixedPointProblem(mod, SpectralPoint(2.0, 0.1)))
        want = herglotz_quadratic_root(2, 2 + 0.1j, 1.0)
        assert rep.solution[0, 0] == pytest.approx(want, abs=1e-10)

    def test_damping_validated(self):
        prob = FixedPointProblem(make_model(), SpectralPoint(0.0, 1.0))
        for bad in (0.0, -0.5, 1.5):
            with pytest.raises(ValueError):
                picard_solve(prob, damping=bad)
        assert picard_solve(prob, damping=1.0).converged

    def test_no_convergence_reports_residual(self):
        prob = FixedPointProblem(make_model(), SpectralPoint(0.0, 1.0),
                                 np.zeros((1, 1)))
        with pytest.raises(NoConvergenceError) as ei:
            picard_solve(prob, max_iter=2)
        assert ei.value.iterations == 2
        assert ei.value.residual > 0


class TestNewton:
    def test_scalar_case_fast(self):
        prob = FixedPointProblem(make_model(), SpectralPoint(0.0, 1.0),
                                 np.array([[1j]]))
        rep = newton_solve(prob)
        assert rep.method == "newton"
        assert rep.iterations <= 6
        assert rep.solution[0, 0] == pytest.approx(1j * (np.sqrt(3) - 1),
                                                   abs=1e-11)

    def test_matrix_free_case(self):
        mod = make_model(a=(-0.5, 0.5))
        sp = SpectralPoint(0.1, 0.6)
        free = free_forward_green(sp, mod)
        start = free + 0.05 * (random_symmetric(2, np.random.default_rng(3))
                               + 0.3j * np.eye(2))
        rep = newton_solve(FixedPointProblem(mod, sp, start))
        np.testing.assert_allclose(rep.solution, free, atol=1e-12)

    def test_jacobian_scalar_value(self):
        # dR/dg = 1 - (K/4) g^2 at the scalar fixed point g = i(sqrt(3)-1)
        # for K=2, z=i evaluates to 1 + (2 - sqrt(3)) = 3 - sqrt(3).
        prob = FixedPointProblem(make_model(), SpectralPoint(0.0, 1.0))
        g = 1j * (np.sqrt(3) - 1)
        Phi = prob.forward_map(np.array([[g]]))
        J = fp._jacobian(prob, Phi, fp._upper_slots(1))
        assert J[0, 0] == pytest.approx(3 - np.sqrt(3), abs=1e-10)

    def test_jacobian_matches_finite_differences(self, rng):
        V0 = ((0.3, -0.2, 0.0), (-0.2, 0.1, 0.4), (0.0, 0.4, -0.5))
        mod = make_model(K=3, a=(-0.4, 0.0, 0.6), lam=0.8,
                         ensemble=PointMass(V0))
        prob = FixedPointProblem(mod, SpectralPoint(0.2, 0.5))
        G = random_symmetric(3, rng) + 1j * (random_symmetric(3, rng)
                                             + 2.0 * np.eye(3))
        slots = fp._upper_slots(3)
        J = fp._jacobian(prob, prob.forward_map(G), slots)
        h = 1e-7
        for c, (j, k) in enumerate(slots):
            dG = np.zeros((3, 3), dtype=complex)
            dG[j, k] = dG[k, j] = 1.0
            num = (prob.residual_matrix(G + h * dG)
                   - prob.residual_matrix(G - h * dG)) / (2 * h)
            np.testing.assert_allclose(fp._vec_upper(num, slots), J[:, c],
                                       atol=1e-6)

    def test_quadratic_tail(self):
        prob = FixedPointProblem(make_model(), SpectralPoint(0.0, 1.0),
                                 np.array([[1j]]))
        hist = newton_solve(prob).residual_history
        pairs = [(hist[i], hist[i + 1]) for i in range(len(hist) - 1)
                 if hist[i + 1] > 1e-14]
        assert len(pairs) >= 2
        for r0, r1 in pairs:
            assert r1 <= 1e3 * r0 * r0

    def test_singular_jacobian_detected(self):
        # For K=4 the map sends G=-3 at z=2 to Phi = 1/(-2+3) = 1 exactly,
        # where 1 - (K/4) Phi^2 = 0: the Newton system is singular, and
        # every quantity involved is an exact float.
        mod = make_model(K=4)
        start = np.array([[-3.0]], dtype=complex)
        with pytest.raises(SingularJacobianError):
            newton_solve(FixedPointProblem(mod, SpectralPoint(2.0, 0.0),
                                           start))

    def test_no_convergence_raises(self):
        prob = FixedPointProblem(make_model(), SpectralPoint(0.0, 1.0),
                                 np.array([[1j]]))
        with pytest.raises(NoConvergenceError):
            newton_solve(prob, tol=1e-12, max_iter=1)


class TestSolveForward:
    def test_cold_start_switches_to_newton(self):
        mod = make_model(lam=1.0, ensemble=PointMass(((1.0,),)))
        rep = solve_forward(mod, SpectralPoint(2.0, 0.1),
                            np.zeros((1, 1), dtype=complex))
        assert rep.method == "newton"
        assert rep.converged
        assert rep.residual <= 1e-11
        want = herglotz_quadratic_root(2, 2 + 0.1j, 1.0)
        assert rep.solution[0, 0] == pytest.approx(want, abs=1e-11)

    def test_exact_start_stays_picard(self):
        mod = make_model(a=(-0.5, 0.5))
        sp = SpectralPoint(0.2, 0.3)
        rep = solve_forward(mod, sp, free_forward_green(sp, mod))
        assert rep.method == "picard"
        assert rep.iterations == 0
        assert rep.converged

    def test_diagonalization_oracle_m3(self):
        V0 = ((0.5, -0.3, 0.1), (-0.3, -0.2, 0.25), (0.1, 0.25, 0.4))
        mod = make_model(K=3, a=(-0.6, 0.0, 0.5), lam=1.3,
                         ensemble=PointMass(V0))
        sp = SpectralPoint(0.4, 0.2)
        rep = solve_forward(mod, sp)
        np.testing.assert_allclose(rep.solution,
                                   diagonalized_solution(mod, sp.z),
                                   atol=1e-10)
        assert rep.herglotz

    def test_report_certificate(self):
        mod = make_model()
        rep = solve_forward(mod, SpectralPoint(0.3, 0.8))
        prob = FixedPointProblem(mod, SpectralPoint(0.3, 0.8))
        assert rep.residual == pytest.approx(prob.residual_norm(rep.solution))
        assert rep.converged == (rep.residual <= 1e-11)
        assert rep.z == 0.3 + 0.8j


class TestContinuation:
    def test_scalar_boundary_closed_form(self):
        reports = continuation_to_boundary(make_model(), 0.0)
        assert reports[-1].z == 0.0 + 0.0j
        assert reports[-1].solution[0, 0] == pytest.approx(1j * np.sqrt(2),
                                                           abs=1e-10)
        assert reports[-1].herglotz
        etas = [r.z.imag for r in reports]
        assert etas[0] == 1.0
        assert etas[-2] >= 1e-8 and etas[-1] == 0.0
        assert all(b < a for a, b in zip(etas[:-1], etas[1:]))
        for rep in reports:
            assert rep.converged
            low = min_imag_eigenvalue(rep.solution)
            assert low >= -1e-10
            if rep.z.imag > 0:
                assert low > 0

    def test_outside_band_flags_real_solution(self):
        E = np.sqrt(2.0) + 0.5
        reports = continuation_to_boundary(make_model(), E)
        last = reports[-1]
        assert last.converged
        assert not last.herglotz
        assert abs(last.solution[0, 0].imag) < 1e-10
        want = free_forward_green_boundary(E, make_model())[0, 0]
        assert last.solution[0, 0] == pytest.approx(want, abs=1e-10)

    def test_decoupled_m2_boundary(self):
        mod = make_model(a=(-0.5, 0.5))
        last = continuation_to_boundary(mod, 0.0)[-1]
        np.testing.assert_allclose(last.solution,
                                   free_forward_green_boundary(0.0, mod),
                                   atol=1e-10)

    def test_schedule_validation(self):
        mod = make_model()
        with pytest.raises(ValueError):
            continuation_to_boundary(mod, 0.0, eta_min=0.0)
        with pytest.raises(ValueError):
            continuation_to_boundary(mod, 0.0, eta_start=1e-9)
        with pytest.raises(ValueError):
            continuation_to_boundary(mod, 0.0, eta_factor=1.0)

    def test_breakdown_wraps_solver_failure(self, monkeypatch):
        def stuck(model, point, initial=None, **kw):
            raise NoConvergenceError("stuck", residual=1.0, iterations=5)

        monkeypatch.setattr(fp, "solve_forward", stuck)
        with pytest.raises(ContinuationBreakdownError) as ei:
            continuation_to_boundary(make_model(), 0.0)
        assert ei.value.eta == 1.0

    def test_breakdown_on_lost_branch(self, monkeypatch):
        def wrong_branch(model, point, initial=None, **kw):
            sol = np.array([[-1j]])
            return SolveReport(solution=sol, residual=0.0, iterations=1,
                               method="newton", converged=True, z=point.z,
                               herglotz=False, residual_history=(0.0,))

        monkeypatch.setattr(fp, "solve_forward", wrong_branch)
        with pytest.raises(ContinuationBreakdownError) as ei:
            continuation_to_boundary(make_model(), 0.0)
        assert ei.value.eta == 1.0
        assert "dissipative" in str(ei.value)

    def test_point_mass_boundary_inside_shifted_band(self):
        # V0 = 1 with lam = 0.5 shifts the band by 0.5; E = 0.5 sits at
        # its center, so the boundary solution is i*sqrt(2)/1 again in
        # the shifted variable.
        mod = make_model(lam=0.5, ensemble=PointMass(((1.0,),)))
        last = continuation_to_boundary(mod, 0.5)[-1]
        assert last.solution[0, 0] == pytest.approx(1j * np.sqrt(2),
                                                    abs=1e-10)
        assert last.herglotz
