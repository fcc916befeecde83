"""Complex-symmetric linear algebra kernel.

Green's matrices on the strip are complex *symmetric* (not Hermitian), so the
workhorse operations here are an LU-based inverse that enforces symmetry of
the result, the upper-half-plane square root branch, and the minimum
eigenvalue of the matrix imaginary part (the Herglotz indicator).
"""

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import SingularMatrixError

# Relative pivot floor below which an LU factorization is declared singular.
PIVOT_RTOL = 1e-14
# Relative residual allowed for an accepted inverse, ||M N - I|| <= RTOL ||M||.
INVERSE_RESIDUAL_RTOL = 1e-10


@dataclass(frozen=True)
class SpectralPoint:
    """A spectral parameter z = E + i eta with eta >= 0 kept explicit.

    eta == 0 marks a genuine real-axis (boundary) evaluation, which several
    routines treat differently from a merely small eta.
    """

    E: float
    eta: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.E) and np.isfinite(self.eta)):
            raise ValueError("spectral point must be finite")
        if self.eta < 0:
            raise ValueError("eta must be >= 0 (upper half plane)")

    @property
    def z(self) -> complex:
        return complex(self.E, self.eta)

    @classmethod
    def from_z(cls, z) -> "SpectralPoint":
        z = complex(z)
        return cls(z.real, z.imag)

    def __str__(self):
        return f"{self.E:g}+{self.eta:g}i"


def sym_part(M):
    """Symmetric part (M + M^T)/2.  Transpose, no conjugation."""
    return 0.5 * (M + np.swapaxes(M, -1, -2))


def symmetry_defect(M) -> float:
    """Max-norm distance of M from its transpose."""
    return float(np.max(np.abs(M - np.swapaxes(M, -1, -2)), initial=0.0))


def sym_inverse(M):
    """Invert a complex symmetric matrix, returning a symmetric inverse.

    LU with partial pivoting; a pivot below ``PIVOT_RTOL * max|M|`` raises
    :class:`SingularMatrixError`, as does a verification residual
    ``||M N - I||_max`` above ``INVERSE_RESIDUAL_RTOL * max|M|``.  The raw
    inverse is symmetrized before the residual check, which removes the
    O(eps) asymmetry the factorization introduces.
    """
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("sym_inverse expects a square matrix")
    n = M.shape[0]
    scale = float(np.max(np.abs(M)))
    if scale == 0.0:
        raise SingularMatrixError("zero matrix")
    with warnings.catch_warnings():
        # exact singularity surfaces through the pivot check below
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(M, check_finite=False)
    pivots = np.abs(np.diagonal(lu))
    if pivots.min() < PIVOT_RTOL * scale:
        raise SingularMatrixError(
            f"pivot {pivots.min():.3e} below floor {PIVOT_RTOL * scale:.3e}"
        )
    inv = scipy.linalg.lu_solve((lu, piv), np.eye(n, dtype=complex),
                                check_finite=False)
    inv = sym_part(inv)
    residual = float(np.max(np.abs(M @ inv - np.eye(n))))
    if residual > INVERSE_RESIDUAL_RTOL * max(scale, 1.0):
        raise SingularMatrixError(
            f"inverse residual {residual:.3e} exceeds tolerance; "
            "matrix is numerically singular"
        )
    return inv


def inv_batch(M):
    """Symmetrized inverse of a stack of matrices (..., m, m).

    Hot-path variant of :func:`sym_inverse` without the pivot/residual
    bookkeeping; numpy raises LinAlgError on exactly singular members.
    """
    return sym_part(np.linalg.inv(M))


def sqrt_upper(w):
    """Square root branch with values in the closed upper half plane.

    Principal square root, with the sign flipped whenever the principal
    branch lands in the open lower half plane.  Real w >= 0 maps to the
    non-negative real root, real w < 0 to +i sqrt(|w|).
    """
    r = np.sqrt(np.asarray(w, dtype=complex))
    return np.where(r.imag < 0.0, -r, r)[()]


def imag_sym_part(M):
    """Imaginary part (M - conj M)/(2i) of a complex symmetric matrix.

    For symmetric M this is a real symmetric matrix.
    """
    M = np.asarray(M, dtype=complex)
    return np.ascontiguousarray(M.imag)


def min_imag_eigenvalue(M) -> float:
    """Smallest eigenvalue of Im M; >= 0 characterizes the Herglotz class."""
    im = imag_sym_part(M)
    im = 0.5 * (im + im.T)
    return float(np.linalg.eigvalsh(im)[0])


def is_herglotz(M, slack=1e-10) -> bool:
    """True when Im M is positive semidefinite up to the given slack."""
    return min_imag_eigenvalue(M) >= -slack
