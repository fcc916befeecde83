"""Spectrum of the linearized boundary fixed-point operator.

At ``lam = 0`` and energy E strictly inside the band-intersection
window, the boundary fixed point of the forward recursion is the
Gaussian weight with parameter matrix A_E (see :mod:`bethestrip.free`).
Linearizing the recursion map around that fixed point yields an
operator C_E acting on polynomials-times-Gaussian in a symmetric
matrix variable X.  Its eigenvalues are indexed by upper-triangular
non-negative integer matrices J:

    lambda_J = prod_{j<=k} [4 (A_E)_jj (A_E)_kk]^{J_jk},

all of modulus K^{-|J|}.  This module enumerates the index set, builds
the eigenvalues and the spectral gaps of K*C_E - I (and of the tensor
form governing second moments), and reconstructs the full matrix of
C_E on the monomial basis from its generating identity

    C_E [e^{i Tr(M X)} zeta] = exp((i/4) Tr((B - M)^{-1} X)),

where zeta = e^{i Tr(-A_E X)}, B^{-1} = -4 A_E, and M is a real
symmetric parameter matrix.  Monomials are extracted from the identity
by attaching one formal parameter per upper-triangle slot and reading
off mixed Taylor coefficients (jet arithmetic), which keeps every step
exact up to floating point and makes the degree filtration manifest.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    EigenvalueLawError,
    OutOfBandError,
    TruncationOverflowError,
)
from .model import BetheStripModel

#: Tolerance on | |lambda_J| - K^{-|J|} | in verify_modulus.
MODULUS_RTOL = 1e-12
#: Largest monomial basis build_ce_matrix will assemble.
MAX_BASIS = 500


def upper_slots(m: int) -> list[tuple[int, int]]:
    """Row-major upper-triangle coordinates (j, k), j <= k."""
    return [(j, k) for j in range(m) for k in range(j, m)]


def slot_count(m: int) -> int:
    return m * (m + 1) // 2


@dataclass(frozen=True, order=True)
class MonomialIndex:
    """Upper-triangular non-negative integer exponent matrix J.

    ``powers`` lists the exponents J_jk over the row-major upper
    triangle of an m x m matrix; the monomial is
    X^J = prod X_jk^{J_jk}.  Ordering is by (degree, variable-sequence
    lexicographic), so within a degree the slot earliest in row-major
    order carries the highest power first: for m=2 the degree-1 indices
    come as X_11, X_12, X_22.
    """

    sort_index: tuple = field(init=False, repr=False)
    m: int
    powers: tuple

    def __post_init__(self):
        powers = tuple(int(x) for x in self.powers)
        if self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")
        if len(powers) != slot_count(self.m):
            raise ValueError(
                f"need {slot_count(self.m)} exponents for m={self.m}, "
                f"got {len(powers)}"
            )
        if any(x < 0 for x in powers):
            raise ValueError(f"exponents must be >= 0, got {powers}")
        object.__setattr__(self, "powers", powers)
        object.__setattr__(
            self, "sort_index",
            (sum(powers), tuple(-x for x in powers)),
        )

    @property
    def degree(self) -> int:
        return sum(self.powers)

    @classmethod
    def zero(cls, m: int) -> "MonomialIndex":
        return cls(m=m, powers=(0,) * slot_count(m))

    def power(self, j: int, k: int) -> int:
        if j > k:
            j, k = k, j
        return self.powers[upper_slots(self.m).index((j, k))]

    def entries(self) -> np.ndarray:
        """The m x m upper-triangular integer matrix J."""
        out = np.zeros((self.m, self.m), dtype=int)
        for power, (j, k) in zip(self.powers, upper_slots(self.m)):
            out[j, k] = power
        return out

    def __str__(self):
        return "J[" + ",".join(str(x) for x in self.powers) + "]"


def enumerate_indices(m: int, max_degree: int) -> list[MonomialIndex]:
    """All J with |J| <= max_degree, ordered by (degree, lexicographic)."""
    if max_degree < 0:
        raise ValueError(f"max_degree must be >= 0, got {max_degree}")
    p = slot_count(m)
    out = []
    for degree in range(max_degree + 1):
        for combo in itertools.combinations_with_replacement(range(p), degree):
            powers = [0] * p
            for slot in combo:
                powers[slot] += 1
            out.append(MonomialIndex(m=m, powers=tuple(powers)))
    expected = math.comb(p + max_degree, max_degree)
    assert len(out) == expected, (len(out), expected)
    return out


def _interior_ae_diag(E: float, model: BetheStripModel) -> np.ndarray:
    """Diagonal of A_E, requiring E strictly inside the band window."""
    x = float(E) - np.asarray(model.a, dtype=float)
    w = model.K - x * x
    if np.any(w <= 0.0):
        raise OutOfBandError(
            f"E={E:g} is not strictly inside |E - a_k| < sqrt(K) "
            "for every orbital"
        )
    return (x - 1j * np.sqrt(w)) / (2.0 * model.K)


def lambda_j(E: float, model: BetheStripModel, J: MonomialIndex) -> complex:
    """Eigenvalue of C_E at index J: prod [4 (A_E)_jj (A_E)_kk]^{J_jk}."""
    if J.m != model.m:
        raise ValueError(f"index has m={J.m}, model has m={model.m}")
    d = _interior_ae_diag(E, model)
    out = complex(1.0)
    for power, (j, k) in zip(J.powers, upper_slots(model.m)):
        if power:
            out *= (4.0 * d[j] * d[k]) ** power
    return out


def verify_modulus(E: float, model: BetheStripModel, max_degree: int) -> float:
    """Check |lambda_J| = K^{-|J|} and lambda_J != 1/K for |J| <= max_degree.

    Returns min_J |lambda_J - 1/K|; raises EigenvalueLawError naming the
    offending J if either law fails.
    """
    inv_k = 1.0 / model.K
    min_dist = math.inf
    for J in enumerate_indices(model.m, max_degree):
        lam = lambda_j(E, model, J)
        want = model.K ** (-J.degree)
        if abs(abs(lam) - want) > MODULUS_RTOL:
            raise EigenvalueLawError(
                f"|lambda_{J}| = {abs(lam)!r} != K^-{J.degree} = {want!r} "
                f"at E={E:g}"
            )
        dist = abs(lam - inv_k)
        if dist == 0.0:
            raise EigenvalueLawError(
                f"lambda_{J} hit the forbidden value 1/K at E={E:g}"
            )
        min_dist = min(min_dist, dist)
    return min_dist


def gap_kce(E: float, model: BetheStripModel, max_degree: int) -> float:
    """Spectral gap of K*C_E - I: distance of {K lambda_J} from 1.

    Enumerates |J| <= max(max_degree, 1) and combines with the analytic
    floor 1 - 1/K valid for every |J| >= 2 (there |K lambda_J| <= 1/K),
    so the result bounds the gap over the full infinite index set.
    """
    enumerated = min(
        abs(model.K * lambda_j(E, model, J) - 1.0)
        for J in enumerate_indices(model.m, max(max_degree, 1))
    )
    return min(enumerated, 1.0 - 1.0 / model.K)


def gap_tensor(E: float, model: BetheStripModel, max_degree: int) -> float:
    """Gap of the second-moment tensor spectrum {K lambda_J conj(lambda_J')}.

    Enumerates pairs with |J| + |J'| <= max(max_degree, 1) and applies
    the same analytic floor 1 - 1/K for all deeper pairs.
    """
    top = max(max_degree, 1)
    indices = enumerate_indices(model.m, top)
    lams = [lambda_j(E, model, J) for J in indices]
    enumerated = min(
        abs(model.K * lam * np.conj(lam2) - 1.0)
        for J, lam in zip(indices, lams)
        for J2, lam2 in zip(indices, lams)
        if J.degree + J2.degree <= top
    )
    return min(float(enumerated), 1.0 - 1.0 / model.K)


@dataclass
class PolyGaussSymbol:
    """Polynomial-times-Gaussian symbol sum_J coeffs[J] X^J exp(i Tr(gauss X)).

    The working basis for C_E uses gauss = -A_E.
    """

    coeffs: dict
    gauss: np.ndarray

    def __post_init__(self):
        self.gauss = np.asarray(self.gauss, dtype=complex)
        for J in self.coeffs:
            if not isinstance(J, MonomialIndex):
                raise TypeError(f"coeffs keys must be MonomialIndex, got {J!r}")

    @classmethod
    def monomial(cls, J: MonomialIndex, gauss) -> "PolyGaussSymbol":
        return cls(coeffs={J: 1.0 + 0.0j}, gauss=gauss)

    @property
    def degree(self) -> int:
        degrees = [J.degree for J, c in self.coeffs.items() if c != 0]
        return max(degrees, default=0)

    def coefficient(self, J: MonomialIndex) -> complex:
        return complex(self.coeffs.get(J, 0.0))


@dataclass(frozen=True)
class OperatorMatrix:
    """Matrix of C_E on the ordered monomial basis {X^J zeta : |J| <= d}.

    entries[r, c] is the coefficient of basis[r] in the image of
    basis[c]; the degree filtration makes it block upper-triangular
    with lambda_J on the diagonal.
    """

    basis: tuple
    entries: np.ndarray

    def index_of(self, J: MonomialIndex) -> int:
        return self.basis.index(J)


def _spoly_mul(a: dict, b: dict, cap: tuple) -> dict:
    """Multiply polynomials in the jet parameters, dropping s^k > cap."""
    out = {}
    for ka, va in a.items():
        for kb, vb in b.items():
            key = tuple(x + y for x, y in zip(ka, kb))
            if any(x > c for x, c in zip(key, cap)):
                continue
            out[key] = out.get(key, 0.0) + va * vb
    return out


def _matmul_spoly(N, R, cap, m):
    out = [[{} for _ in range(m)] for _ in range(m)]
    for a in range(m):
        for c in range(m):
            acc = {}
            for b in range(m):
                for key, val in _spoly_mul(N[a][b], R[b][c], cap).items():
                    acc[key] = acc.get(key, 0.0) + val
            out[a][c] = acc
    return out


def _apply_monomial(binv_diag: np.ndarray, J: MonomialIndex) -> dict:
    """Image coefficients of C_E on X^J zeta, keyed by MonomialIndex.

    Extracts the s^J jet of exp(W(s, X)) and multiplies by the
    polarization prefactor prod_alpha J_alpha! / (i c_alpha)^{J_alpha},
    with c_alpha = 1 on diagonal slots and 2 off the diagonal.
    """
    m = J.m
    slots = upper_slots(m)
    p = len(slots)
    cap = J.powers
    total = J.degree
    if total == 0:
        return {J: 1.0 + 0.0j}

    W = _build_w(binv_diag, slots, cap)

    # exp(W) truncated at jet order |J|
    zero = ((0,) * p, (0,) * p)
    series = {zero: 1.0 + 0.0j}
    term = {zero: 1.0 + 0.0j}
    for n in range(1, total + 1):
        nxt = {}
        for (sa, xa), va in term.items():
            for (sb, xb), vb in W.items():
                s_key = tuple(x + y for x, y in zip(sa, sb))
                if any(x > c for x, c in zip(s_key, cap)):
                    continue
                x_key = tuple(x + y for x, y in zip(xa, xb))
                key = (s_key, x_key)
                nxt[key] = nxt.get(key, 0.0) + va * vb / n
        term = nxt
        for key, val in term.items():
            series[key] = series.get(key, 0.0) + val

    prefactor = 1.0 + 0.0j
    for power, (j, k) in zip(J.powers, slots):
        c_alpha = 1.0 if j == k else 2.0
        prefactor *= math.factorial(power) / (1j * c_alpha) ** power

    out = {}
    for (s_pow, x_pow), val in series.items():
        if s_pow != cap:
            continue
        coeff = prefactor * val
        if coeff != 0.0:
            out[MonomialIndex(m=m, powers=x_pow)] = coeff
    return out


def _build_w(binv_diag: np.ndarray, slots, cap: tuple) -> dict:
    """W(s, X) as a jet dict keyed by (s_powers, x_powers); linear in X."""
    m = len(binv_diag)
    p = len(slots)
    total = sum(cap)
    zero_s = (0,) * p

    def unit(slot_index):
        key = list(zero_s)
        key[slot_index] = 1
        return tuple(key)

    slot_of = {}
    for idx, (j, k) in enumerate(slots):
        slot_of[(j, k)] = idx
        slot_of[(k, j)] = idx
    R = [[{unit(slot_of[(a, b)]): complex(binv_diag[b])} for b in range(m)]
         for a in range(m)]
    N = [[{unit(slot_of[(a, b)]): complex(binv_diag[a] * binv_diag[b])}
          for b in range(m)] for a in range(m)]

    W: dict = {}
    for _ in range(total):
        for idx, (j, k) in enumerate(slots):
            if j == k:
                entry = N[j][j]
            else:
                entry = dict(N[j][k])
                for key, val in N[k][j].items():
                    entry[key] = entry.get(key, 0.0) + val
            for s_pow, val in entry.items():
                coeff = 0.25j * val
                if coeff == 0.0:
                    continue
                key = (s_pow, unit(idx))
                W[key] = W.get(key, 0.0) + coeff
        N = _matmul_spoly(N, R, cap, m)
    return W


def ce_apply_symbol(E: float, model: BetheStripModel, symbol: PolyGaussSymbol,
                    max_degree: int) -> PolyGaussSymbol:
    """Apply C_E to a symbol over the working Gaussian, exactly in jets.

    The symbol must use gauss = -A_E (the fixed-point family) and have
    degree at most ``max_degree``; the image is returned over the same
    Gaussian.  Degrees never increase, so no truncation loss occurs.
    """
    diag = _interior_ae_diag(E, model)
    working = -np.diag(diag)
    if symbol.gauss.shape != working.shape or \
            not np.allclose(symbol.gauss, working, atol=1e-12):
        raise ValueError(
            "symbol Gaussian parameter must equal -A_E for this E and model"
        )
    if symbol.degree > max_degree:
        raise TruncationOverflowError(
            f"symbol degree {symbol.degree} exceeds max_degree {max_degree}"
        )
    binv = -4.0 * diag
    out: dict = {}
    for J, c in symbol.coeffs.items():
        if c == 0:
            continue
        for J2, w in _apply_monomial(binv, J).items():
            out[J2] = out.get(J2, 0.0) + c * w
    return PolyGaussSymbol(coeffs=out, gauss=working)


def build_ce_matrix(E: float, model: BetheStripModel,
                    max_degree: int) -> OperatorMatrix:
    """Assemble the matrix of C_E on {X^J zeta : |J| <= max_degree}.

    Verifies on the fly that every column respects the degree
    filtration and that its diagonal entry matches lambda_j to 1e-8;
    violations raise EigenvalueLawError (they would mean the jet
    expansion and the eigenvalue law disagree).
    """
    basis = enumerate_indices(model.m, max_degree)
    if len(basis) > MAX_BASIS:
        raise TruncationOverflowError(
            f"basis of {len(basis)} monomials exceeds MAX_BASIS={MAX_BASIS}; "
            "reduce max_degree or m"
        )
    diag = _interior_ae_diag(E, model)
    binv = -4.0 * diag
    row = {J: i for i, J in enumerate(basis)}
    entries = np.zeros((len(basis), len(basis)), dtype=complex)
    for col, J in enumerate(basis):
        image = _apply_monomial(binv, J)
        for J2, coeff in image.items():
            if J2.degree > J.degree:
                raise EigenvalueLawError(
                    f"degree filtration violated: {J} -> {J2} at E={E:g}"
                )
            entries[row[J2], col] = coeff
        want = lambda_j(E, model, J)
        if abs(entries[col, col] - want) > 1e-8:
            raise EigenvalueLawError(
                f"diagonal entry for {J} is {entries[col, col]!r}, "
                f"eigenvalue law gives {want!r} at E={E:g}"
            )
    return OperatorMatrix(basis=tuple(basis), entries=entries)
