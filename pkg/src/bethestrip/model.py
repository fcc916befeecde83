"""Strip model and disorder ensembles.

A configuration is the tree branching number K, the diagonal free strip
operator A = diag(a_1 <= ... <= a_m), a coupling strength, and a law for the
random symmetric m x m potential V.  Ensembles know how to sample themselves
(scalar and batched), evaluate their characteristic function
E exp(-i Tr(M V)), and describe the support of their eigenvalue shifts when
that support is bounded.
"""

import json
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, UnsupportedEnsembleError

MAX_WIDTH = 16  # supported strip widths; dense m x m algebra throughout

# Effective support quantile (in sigmas) used for unbounded ensembles when a
# bounded stand-in for the spectrum edges is needed (reporting only).
SUPPORT_SIGMAS = 4.0


@dataclass(frozen=True)
class RealInterval:
    lo: float
    hi: float

    @property
    def empty(self) -> bool:
        return self.lo >= self.hi

    @property
    def width(self) -> float:
        return max(self.hi - self.lo, 0.0)

    def contains(self, x, margin=0.0) -> bool:
        return self.lo + margin < x < self.hi - margin

    def __str__(self):
        return f"({self.lo:g}, {self.hi:g})"


class DisorderEnsemble:
    """Law of the random symmetric potential V."""

    def sample(self, m, rng):
        """One draw, an (m, m) real symmetric array."""
        raise NotImplementedError

    def sample_batch(self, m, rng, n):
        """n draws stacked as (n, m, m).  Must consume rng deterministically."""
        raise NotImplementedError

    def char_fn(self, M):
        """E exp(-i Tr(M V)) for a complex symmetric test matrix M."""
        raise NotImplementedError

    def shift_support(self, a, lam):
        """Intervals swept by the eigenvalues of A + lam V over the support.

        Returns a list of RealInterval (possibly degenerate points).  Raises
        UnsupportedEnsembleError when the support is unbounded.
        """
        raise NotImplementedError

    def support_radius(self, m, sigmas=SUPPORT_SIGMAS):
        """Bound (exact or effective) on |eigenvalues of V|.

        For unbounded ensembles this is a quantile proxy at ``sigmas``
        standard deviations, used only for reporting effective spectrum
        edges, never for exact statements.
        """
        raise NotImplementedError

    def spec_string(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class PointMass(DisorderEnsemble):
    """Deterministic potential: V = V0 with probability one."""

    V0: tuple

    def __init__(self, V0):
        V0 = np.asarray(V0, dtype=float)
        if V0.ndim != 2 or V0.shape[0] != V0.shape[1]:
            raise ValueError("V0 must be a square matrix")
        if not np.allclose(V0, V0.T, atol=1e-12):
            raise ValueError("V0 must be symmetric")
        V0 = 0.5 * (V0 + V0.T)
        object.__setattr__(self, "V0", tuple(map(tuple, V0.tolist())))

    @property
    def matrix(self):
        return np.array(self.V0, dtype=float)

    @property
    def m(self):
        return len(self.V0)

    def sample(self, m, rng):
        self._check_m(m)
        return self.matrix

    def sample_batch(self, m, rng, n):
        self._check_m(m)
        return np.broadcast_to(self.matrix, (n, m, m)).copy()

    def char_fn(self, M):
        return complex(np.exp(-1j * np.trace(np.asarray(M) @ self.matrix)))

    def shift_support(self, a, lam):
        evals = np.linalg.eigvalsh(np.diag(a) + lam * self.matrix)
        return [RealInterval(float(e), float(e)) for e in evals]

    def support_radius(self, m, sigmas=SUPPORT_SIGMAS):
        self._check_m(m)
        return float(np.max(np.abs(np.linalg.eigvalsh(self.matrix))))

    def _check_m(self, m):
        if m != self.m:
            raise ValueError(f"PointMass is {self.m}x{self.m}, model has m={m}")

    def spec_string(self):
        return "point:" + json.dumps(self.V0)


_DIAG_KINDS = ("uniform", "gauss", "bernoulli")


@dataclass(frozen=True)
class DiagonalIID(DisorderEnsemble):
    """V = diag(v_1..v_m) with i.i.d. entries.

    kinds: 'uniform' is U[-1, 1], 'gauss' is N(0, 1), 'bernoulli' is +-1
    with equal weight.
    """

    kind: str

    def __post_init__(self):
        if self.kind not in _DIAG_KINDS:
            raise ValueError(f"unknown diagonal kind {self.kind!r}")

    def _draw(self, rng, shape):
        if self.kind == "uniform":
            return rng.uniform(-1.0, 1.0, size=shape)
        if self.kind == "gauss":
            return rng.standard_normal(shape)
        return rng.integers(0, 2, size=shape) * 2.0 - 1.0

    def sample(self, m, rng):
        return np.diag(self._draw(rng, m))

    def sample_batch(self, m, rng, n):
        v = self._draw(rng, (n, m))
        out = np.zeros((n, m, m))
        idx = np.arange(m)
        out[:, idx, idx] = v
        return out

    def _entry_char(self, t):
        t = np.asarray(t, dtype=complex)
        if self.kind == "uniform":
            # E e^{-itv}, v ~ U[-1,1]: sin(t)/t
            return np.sinc(t / np.pi)
        if self.kind == "gauss":
            return np.exp(-0.5 * t * t)
        return np.cos(t)

    def char_fn(self, M):
        d = np.diagonal(np.asarray(M))
        return complex(np.prod(self._entry_char(d)))

    def shift_support(self, a, lam):
        r = abs(lam)
        if self.kind == "uniform":
            return [RealInterval(ak - r, ak + r) for ak in a]
        if self.kind == "bernoulli":
            out = []
            for ak in a:
                out.append(RealInterval(ak - r, ak - r))
                out.append(RealInterval(ak + r, ak + r))
            return out
        raise UnsupportedEnsembleError(
            "gaussian diagonal disorder has unbounded support"
        )

    def support_radius(self, m, sigmas=SUPPORT_SIGMAS):
        if self.kind == "uniform":
            return 1.0
        if self.kind == "bernoulli":
            return 1.0
        return float(sigmas)

    def spec_string(self):
        return f"diag:{self.kind}"


@dataclass(frozen=True)
class GOE(DisorderEnsemble):
    """Gaussian orthogonal ensemble: V = (X + X^T)/2, X i.i.d. standard normal.

    Diagonal entries have variance 1, off-diagonal variance 1/2, so
    Var Tr(M V) = Tr M^2 and the characteristic function is
    exp(-Tr(M^2)/2).
    """

    def sample(self, m, rng):
        X = rng.standard_normal((m, m))
        return 0.5 * (X + X.T)

    def sample_batch(self, m, rng, n):
        X = rng.standard_normal((n, m, m))
        return 0.5 * (X + np.swapaxes(X, -1, -2))

    def char_fn(self, M):
        M = np.asarray(M)
        return complex(np.exp(-0.5 * np.trace(M @ M)))

    def shift_support(self, a, lam):
        raise UnsupportedEnsembleError("GOE support is all of Sym(m)")

    def support_radius(self, m, sigmas=SUPPORT_SIGMAS):
        # quantile proxy for the largest |eigenvalue| of an m x m GOE draw
        return float(sigmas * np.sqrt(m))

    def spec_string(self):
        return "goe"


@dataclass(frozen=True)
class BetheStripModel:
    """Branching number K, diagonal a (ascending), coupling lam, ensemble."""

    K: int
    a: tuple
    lam: float
    ensemble: DisorderEnsemble = field(default_factory=lambda: GOE())

    def __post_init__(self):
        if int(self.K) != self.K or self.K < 2:
            raise ValueError("K must be an integer >= 2")
        object.__setattr__(self, "K", int(self.K))
        a = tuple(float(x) for x in np.atleast_1d(self.a))
        if not 1 <= len(a) <= MAX_WIDTH:
            raise ValueError(f"strip width must be 1..{MAX_WIDTH}")
        if any(not np.isfinite(x) for x in a):
            raise ValueError("a must be finite")
        if any(a[i] > a[i + 1] for i in range(len(a) - 1)):
            raise ValueError("a must be sorted ascending")
        object.__setattr__(self, "a", a)
        if not np.isfinite(self.lam):
            raise ValueError("lam must be finite")
        object.__setattr__(self, "lam", float(self.lam))
        if isinstance(self.ensemble, PointMass):
            self.ensemble._check_m(len(a))

    @property
    def m(self) -> int:
        return len(self.a)

    @property
    def a_matrix(self):
        return np.diag(self.a)

    @property
    def sqrt_k(self) -> float:
        return float(np.sqrt(self.K))

    def sample_potential(self, rng):
        return self.ensemble.sample(self.m, rng)

    def config_dict(self):
        return {
            "K": self.K,
            "a": list(self.a),
            "lambda": self.lam,
            "ensemble": self.ensemble.spec_string(),
        }


def sample_potential(ensemble, m, rng):
    """One potential draw from the ensemble (module-level convenience)."""
    return ensemble.sample(m, rng)


def characteristic_fn(ensemble, M):
    """E exp(-i Tr(M V)) under the ensemble."""
    return ensemble.char_fn(M)


def band_intersection(model) -> RealInterval:
    """Common interior of all shifted free bands [a_k - sqrt K, a_k + sqrt K].

    The interval (a_max - sqrt K ... ) -- concretely
    (-sqrt K + max a, sqrt K + min a); empty iff the diagonal spread reaches
    2 sqrt K.
    """
    return RealInterval(-model.sqrt_k + model.a[-1], model.sqrt_k + model.a[0])


def _merge_intervals(intervals):
    ivs = sorted(intervals, key=lambda iv: (iv.lo, iv.hi))
    merged = [ivs[0]]
    for iv in ivs[1:]:
        last = merged[-1]
        if iv.lo <= last.hi:
            if iv.hi > last.hi:
                merged[-1] = RealInterval(last.lo, iv.hi)
        else:
            merged.append(iv)
    return merged


def deterministic_spectrum(model):
    """Almost-sure spectrum as a union of closed bands.

    Each eigenvalue shift of A + lam V over the disorder support broadens by
    the free band [-sqrt K, sqrt K]; overlapping bands are merged.  Only
    defined for ensembles with bounded support.
    """
    shifts = model.ensemble.shift_support(model.a, model.lam)
    rk = model.sqrt_k
    bands = [RealInterval(iv.lo - rk, iv.hi + rk) for iv in shifts]
    return _merge_intervals(bands)


def effective_spectrum_bounds(model, sigmas=SUPPORT_SIGMAS):
    """Outer [lo, hi] hull of the spectrum, exact when the support is bounded.

    For unbounded ensembles the disorder contribution is truncated at the
    ensemble's ``support_radius`` quantile proxy; the result is a reporting
    convention, not an exact spectral statement.
    """
    try:
        bands = deterministic_spectrum(model)
        return RealInterval(bands[0].lo, bands[-1].hi)
    except UnsupportedEnsembleError:
        r = abs(model.lam) * model.ensemble.support_radius(model.m, sigmas)
        rk = model.sqrt_k
        return RealInterval(model.a[0] - rk - r, model.a[-1] + rk + r)


def parse_ensemble_spec(spec, m):
    """Parse an ensemble string: point:<json-or-path>, diag:<kind>, goe."""
    spec = spec.strip()
    if spec == "goe":
        return GOE()
    if spec.startswith("diag:"):
        kind = spec[len("diag:"):]
        if kind not in _DIAG_KINDS:
            raise ConfigError(
                f"unknown diagonal disorder kind {kind!r}; "
                f"expected one of {', '.join(_DIAG_KINDS)}"
            )
        return DiagonalIID(kind)
    if spec.startswith("point:"):
        payload = spec[len("point:"):].strip()
        if not payload:
            raise ConfigError("point: requires an inline matrix or a path")
        try:
            if payload.startswith("["):
                data = json.loads(payload)
            elif os.path.exists(payload):
                with open(payload) as fh:
                    data = json.load(fh)
            else:
                # bare comma-separated diagonal, e.g. point:0.3,-0.1
                data = np.diag([float(x) for x in payload.split(",")]).tolist()
        except (json.JSONDecodeError, ValueError) as exc:
            raise ConfigError(f"cannot parse point ensemble {payload!r}: {exc}")
        V0 = np.asarray(data, dtype=float)
        if V0.ndim == 1:
            V0 = np.diag(V0)
        if V0.shape != (m, m):
            raise ConfigError(
                f"point matrix has shape {V0.shape}, model needs ({m}, {m})"
            )
        if not np.allclose(V0, V0.T, atol=1e-12):
            raise ConfigError("point matrix must be symmetric")
        return PointMass(V0)
    raise ConfigError(
        f"unknown ensemble spec {spec!r}; expected goe, diag:<kind>, or point:<...>"
    )
