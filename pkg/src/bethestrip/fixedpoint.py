"""Deterministic solver for the forward self-consistency equation.

For a point-mass potential (or ``lam == 0``) the forward Green's matrix
of the infinite tree satisfies the matrix equation

    G = [A + lam*V0 - z - (K/4) G]^{-1},

a finite-dimensional fixed-point problem on complex symmetric m x m
matrices.  This module solves it by damped iteration (robust far from
the solution) and Newton's method (quadratic near it), and continues
the solution in the spectral parameter down to the real axis, tracking
the dissipative branch Im G >= 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import (
    ContinuationBreakdownError,
    NoConvergenceError,
    SingularJacobianError,
    SingularMatrixError,
    UnsupportedEnsembleError,
)
from .free import free_forward_green, free_forward_green_boundary
from .linalg import (
    SpectralPoint,
    is_herglotz,
    min_imag_eigenvalue,
    sym_part,
)
from .model import BetheStripModel, PointMass

#: Default residual tolerance (max-norm of G - map(G)) for a converged solve.
SOLVE_TOL = 1e-11
#: Default damping for the fixed-point iteration.
DAMPING = 0.5
#: Residual below which the combined solver hands over from damped
#: iteration to Newton.
NEWTON_SWITCH = 1e-3
#: A boundary (eta = 0) solution counts as dissipative only if every
#: eigenvalue of Im G clears this floor; real solutions sit at rounding
#: level and are flagged as non-dissipative.
BOUNDARY_IMAG_FLOOR = 1e-8

DEFAULT_PICARD_MAX_ITER = 500
DEFAULT_NEWTON_MAX_ITER = 60


@dataclass(frozen=True)
class FixedPointProblem:
    """One instance of the deterministic self-consistency equation.

    Only ensembles for which the forward law is a point mass admit a
    deterministic fixed point: a :class:`PointMass` potential, or any
    ensemble at ``lam == 0`` (where the potential drops out).
    """

    model: BetheStripModel
    point: SpectralPoint
    initial: np.ndarray | None = None

    def __post_init__(self):
        if self.model.lam != 0.0 and not isinstance(self.model.ensemble, PointMass):
            raise UnsupportedEnsembleError(
                "deterministic fixed-point solver requires a point-mass "
                "potential or lam = 0; got "
                f"{self.model.ensemble.spec_string()} with lam={self.model.lam}"
            )
        if self.initial is not None:
            init = np.asarray(self.initial, dtype=complex)
            if init.shape != (self.model.m, self.model.m):
                raise ValueError(
                    f"initial guess has shape {init.shape}, "
                    f"expected {(self.model.m, self.model.m)}"
                )
            object.__setattr__(self, "initial", init)

    @property
    def z(self) -> complex:
        return self.point.z

    def onsite_matrix(self) -> np.ndarray:
        """A + lam*V0, the deterministic on-site block."""
        B = np.array(self.model.a_matrix, dtype=float)
        if self.model.lam != 0.0:
            B = B + self.model.lam * self.model.ensemble.matrix
        return B

    @cached_property
    def _shifted_onsite(self) -> np.ndarray:
        return self.onsite_matrix() - self.z * np.eye(self.model.m)

    def forward_map(self, G: np.ndarray) -> np.ndarray:
        """Apply G -> [A + lam*V0 - z - (K/4) G]^{-1} once."""
        M = self._shifted_onsite - 0.25 * self.model.K * G
        if M.shape == (1, 1):
            d = M[0, 0]
            out = 1.0 / d if d != 0.0 else complex(np.inf)
            if not np.isfinite(out):
                raise SingularMatrixError(
                    f"forward map hit a singular matrix at z={self.z}"
                )
            return np.array([[out]])
        try:
            out = np.linalg.inv(M)
        except np.linalg.LinAlgError as exc:
            raise SingularMatrixError(
                f"forward map hit a singular matrix at z={self.z}"
            ) from exc
        if not np.isfinite(out).all():
            raise SingularMatrixError(
                f"forward map produced non-finite entries at z={self.z}"
            )
        return sym_part(out)

    def residual_matrix(self, G: np.ndarray) -> np.ndarray:
        return G - self.forward_map(G)

    def residual_norm(self, G: np.ndarray) -> float:
        return float(np.abs(self.residual_matrix(G)).max())

    def initial_guess(self) -> np.ndarray:
        """The stored initial guess, or the lam=0 closed form at ``point``."""
        if self.initial is not None:
            return self.initial.copy()
        if self.point.eta > 0.0:
            return free_forward_green(self.point, self.model)
        return free_forward_green_boundary(self.point.E, self.model)


@dataclass(frozen=True)
class SolveReport:
    """Outcome of one deterministic solve.

    ``residual`` is an independent re-evaluation of max|G - map(G)| at
    the returned solution, so ``converged`` certifies the solution
    rather than trusting loop bookkeeping.  ``herglotz`` records whether
    min eig(Im G) clears :data:`BOUNDARY_IMAG_FLOOR` (strict
    dissipativity; real boundary solutions report False).
    """

    solution: np.ndarray
    residual: float
    iterations: int
    method: str
    converged: bool
    z: complex
    herglotz: bool
    residual_history: tuple = field(default=())


def _report(problem: FixedPointProblem, G: np.ndarray, iterations: int,
            method: str, tol: float, history) -> SolveReport:
    residual = problem.residual_norm(G)
    return SolveReport(
        solution=G,
        residual=residual,
        iterations=iterations,
        method=method,
        converged=bool(residual <= tol),
        z=problem.z,
        herglotz=bool(min_imag_eigenvalue(G) > BOUNDARY_IMAG_FLOOR),
        residual_history=tuple(history),
    )


def _picard_loop(problem: FixedPointProblem, G: np.ndarray, damping: float,
                 tol: float, max_iter: int):
    """Run the damped iteration; one map evaluation per step.

    Returns (G, iterations, history, converged) where the residual in
    ``history[i]`` is measured at the iterate reached after i steps.
    """
    history = []
    for it in range(max_iter + 1):
        Phi = problem.forward_map(G)
        history.append(float(np.abs(G - Phi).max()))
        if history[-1] <= tol:
            return G, it, history, True
        if it == max_iter:
            break
        G = (1.0 - damping) * G + damping * Phi
    return G, max_iter, history, False


def picard_solve(problem: FixedPointProblem, damping: float = DAMPING,
                 tol: float = SOLVE_TOL,
                 max_iter: int = DEFAULT_PICARD_MAX_ITER) -> SolveReport:
    """Damped iteration G <- (1-damping) G + damping * map(G).

    Converges globally for eta not too small; near the real axis the
    slowest linearized mode approaches modulus one and Newton should
    take over (see :func:`solve_forward`).
    """
    if not 0.0 < damping <= 1.0:
        raise ValueError(f"damping must lie in (0, 1], got {damping}")
    G, it, history, ok = _picard_loop(problem, problem.initial_guess(),
                                      damping, tol, max_iter)
    if not ok:
        raise NoConvergenceError(
            f"damped iteration did not reach tol={tol} in {max_iter} steps "
            f"at z={problem.z} (last residual {history[-1]:.3e})",
            residual=history[-1],
            iterations=max_iter,
        )
    return _report(problem, G, it, "picard", tol, history)


def _upper_slots(m: int):
    return [(j, k) for j in range(m) for k in range(j, m)]


def _vec_upper(M: np.ndarray, slots) -> np.ndarray:
    return np.array([M[j, k] for j, k in slots])


def _sym_from_upper(v: np.ndarray, m: int, slots) -> np.ndarray:
    G = np.zeros((m, m), dtype=complex)
    for val, (j, k) in zip(v, slots):
        G[j, k] = val
        G[k, j] = val
    return G


def _jacobian(problem: FixedPointProblem, Phi: np.ndarray, slots) -> np.ndarray:
    """Exact Jacobian of R(G) = G - map(G) on upper-triangle coordinates.

    d map(G)[dG] = (K/4) * Phi dG Phi with Phi = map(G), by the
    derivative of the matrix inverse, so each column is the upper
    triangle of dG - (K/4) Phi dG Phi for a symmetric unit direction.
    """
    m = problem.model.m
    quarter_k = 0.25 * problem.model.K
    J = np.empty((len(slots), len(slots)), dtype=complex)
    for c, (j, k) in enumerate(slots):
        dG = np.zeros((m, m), dtype=complex)
        dG[j, k] = 1.0
        dG[k, j] = 1.0
        dR = dG - quarter_k * (Phi @ dG @ Phi)
        J[:, c] = _vec_upper(dR, slots)
    return J


def _newton_loop(problem: FixedPointProblem, G: np.ndarray, tol: float,
                 max_iter: int):
    """Newton iteration; raises SingularJacobianError on a failed step."""
    m = problem.model.m
    slots = _upper_slots(m)
    history = []
    for it in range(max_iter + 1):
        Phi = problem.forward_map(G)
        R = G - Phi
        history.append(float(np.abs(R).max()))
        if history[-1] <= tol:
            return G, it, history, True
        if it == max_iter:
            break
        J = _jacobian(problem, Phi, slots)
        try:
            step = np.linalg.solve(J, -_vec_upper(R, slots))
        except np.linalg.LinAlgError as exc:
            raise SingularJacobianError(
                f"singular Newton Jacobian at z={problem.z} "
                f"(residual {history[-1]:.3e})"
            ) from exc
        if not np.isfinite(step).all():
            raise SingularJacobianError(
                f"non-finite Newton step at z={problem.z}"
            )
        G = G + _sym_from_upper(step, m, slots)
    return G, max_iter, history, False


def newton_solve(problem: FixedPointProblem, tol: float = SOLVE_TOL,
                 max_iter: int = DEFAULT_NEWTON_MAX_ITER) -> SolveReport:
    """Newton's method on the m(m+1)/2 upper-triangle coordinates.

    Requires a starting point inside the Newton basin (warm start from
    :func:`picard_solve` or a neighboring continuation step).
    """
    G, it, history, ok = _newton_loop(problem, problem.initial_guess(),
                                      tol, max_iter)
    if not ok:
        raise NoConvergenceError(
            f"Newton did not reach tol={tol} in {max_iter} steps at "
            f"z={problem.z} (last residual {history[-1]:.3e})",
            residual=history[-1],
            iterations=max_iter,
        )
    return _report(problem, G, it, "newton", tol, history)


def solve_forward(model: BetheStripModel, point: SpectralPoint,
                  initial: np.ndarray | None = None, *,
                  damping: float = DAMPING, switch: float = NEWTON_SWITCH,
                  tol: float = SOLVE_TOL,
                  picard_max_iter: int = DEFAULT_PICARD_MAX_ITER,
                  newton_max_iter: int = DEFAULT_NEWTON_MAX_ITER) -> SolveReport:
    """Damped iteration down to ``switch``, then Newton down to ``tol``."""
    problem = FixedPointProblem(model, point, initial)
    G = problem.initial_guess()
    G, p_it, p_hist, ok = _picard_loop(problem, G, damping, switch,
                                       picard_max_iter)
    if not ok:
        raise NoConvergenceError(
            f"damped iteration stalled above switch={switch} after "
            f"{picard_max_iter} steps at z={problem.z} "
            f"(last residual {p_hist[-1]:.3e})",
            residual=p_hist[-1],
            iterations=picard_max_iter,
        )
    if p_hist[-1] <= tol:
        return _report(problem, G, p_it, "picard", tol, p_hist)
    G, n_it, n_hist, ok = _newton_loop(problem, G, tol, newton_max_iter)
    if not ok:
        raise NoConvergenceError(
            f"Newton did not reach tol={tol} in {newton_max_iter} steps at "
            f"z={problem.z} (last residual {n_hist[-1]:.3e})",
            residual=n_hist[-1],
            iterations=newton_max_iter,
        )
    return _report(problem, G, p_it + n_it, "newton", tol, p_hist + n_hist)


def continuation_to_boundary(model: BetheStripModel, E: float,
                             eta_start: float = 1.0, eta_factor: float = 0.5,
                             eta_min: float = 1e-8, *,
                             tol: float = SOLVE_TOL) -> list[SolveReport]:
    """Track the dissipative solution along a geometric eta schedule to eta=0.

    Solves at eta_start, eta_start*eta_factor, ... while above eta_min,
    then once more at eta = 0, warm-starting every step from the last
    solution.  For eta > 0 the tracked solution must stay dissipative
    (Im G >= 0 up to slack); losing that branch, or any solver failure,
    raises ContinuationBreakdownError tagged with the failing eta.  The
    final boundary report may legitimately carry ``herglotz=False``:
    outside the spectrum the boundary solution is real.
    """
    if eta_min <= 0.0:
        raise ValueError(f"eta_min must be positive, got {eta_min}")
    if eta_start <= eta_min:
        raise ValueError(
            f"eta_start must exceed eta_min, got {eta_start} <= {eta_min}"
        )
    if not 0.0 < eta_factor < 1.0:
        raise ValueError(f"eta_factor must lie in (0, 1), got {eta_factor}")
    etas = []
    eta = float(eta_start)
    while eta >= eta_min:
        etas.append(eta)
        eta *= eta_factor
    etas.append(0.0)

    reports: list[SolveReport] = []
    guess = None
    for eta in etas:
        point = SpectralPoint(E, eta)
        try:
            report = solve_forward(model, point, guess, tol=tol)
        except (NoConvergenceError, SingularJacobianError,
                SingularMatrixError) as exc:
            raise ContinuationBreakdownError(
                f"continuation failed at eta={eta}: {exc}", eta=eta
            ) from exc
        if eta > 0.0 and not is_herglotz(report.solution):
            raise ContinuationBreakdownError(
                f"lost the dissipative branch at eta={eta}: "
                f"min eig(Im G) = {min_imag_eigenvalue(report.solution):.3e}",
                eta=eta,
            )
        reports.append(report)
        guess = report.solution
    return reports
