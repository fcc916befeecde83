"""Direct solves on truncated trees.

Independent reference path for the Green's function recursions: assemble the
strip operator on a depth-L truncated tree as a sparse matrix, factorize
(H - z) with a generic sparse LU, and read off Green's function columns.
Nothing here shares code with the leaf-to-root elimination in
:mod:`bethestrip.recursion`; agreement between the two is a real check.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse
import scipy.sparse.linalg

from .errors import SizeOverflowError
from .linalg import SpectralPoint
from .rng import TAG_REALIZATION, keyed_rng

# hard cap on m * |sites| for sparse solves, and on the dense eigenproblem
MAX_DOF = 200_000
MAX_DENSE_DOF = 5_000


@dataclass(frozen=True)
class TruncatedTree:
    """Rooted tree with K+1 branches at the root and K thereafter."""

    K: int
    depth: int
    parents: np.ndarray = field(repr=False)  # parents[0] == -1
    depth_of: np.ndarray = field(repr=False)

    @property
    def n_sites(self) -> int:
        return len(self.parents)

    def children(self):
        """children[i]: list of child site indices, in BFS order."""
        out = [[] for _ in range(self.n_sites)]
        for i in range(1, self.n_sites):
            out[self.parents[i]].append(i)
        return out

    def edges(self):
        i = np.arange(1, self.n_sites)
        return np.column_stack([self.parents[1:], i])


def tree_site_count(K, depth) -> int:
    if depth == 0:
        return 1
    return 1 + (K + 1) * (K**depth - 1) // (K - 1)


def build_tree(K, depth, m=1) -> TruncatedTree:
    """Breadth-first truncated tree; raises SizeOverflowError beyond MAX_DOF."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    n = tree_site_count(K, depth)
    if m * n > MAX_DOF:
        raise SizeOverflowError(
            f"m * |sites| = {m * n} exceeds the {MAX_DOF} direct-solve cap"
        )
    parents = np.full(n, -1, dtype=np.int64)
    depth_of = np.zeros(n, dtype=np.int64)
    nxt = 1
    frontier = [0]
    for d in range(1, depth + 1):
        new_frontier = []
        for p in frontier:
            deg = K + 1 if p == 0 else K
            for _ in range(deg):
                parents[nxt] = p
                depth_of[nxt] = d
                new_frontier.append(nxt)
                nxt += 1
        frontier = new_frontier
    assert nxt == n
    return TruncatedTree(K=K, depth=depth, parents=parents, depth_of=depth_of)


def draw_site_potentials(model, tree, seed, realization=0):
    """Disorder realization keyed per (seed, realization, site index).

    The recursion engine draws from the same streams, so both solvers see
    bit-identical potentials for a given key.
    """
    n = tree.n_sites
    out = np.empty((n, model.m, model.m))
    for site in range(n):
        r = keyed_rng(seed, TAG_REALIZATION, realization, site)
        out[site] = model.ensemble.sample(model.m, r)
    return out


def assemble_operator(tree, model, potentials):
    """Sparse real symmetric strip operator on the truncated tree.

    Diagonal blocks A + lam V(x); hopping blocks I_m / 2 on tree edges.
    Site-major index layout: dof = site * m + orbital.
    """
    m = model.m
    n = tree.n_sites
    if m * n > MAX_DOF:
        raise SizeOverflowError(f"{m * n} degrees of freedom exceed {MAX_DOF}")
    rows, cols, vals = [], [], []
    diag = model.a_matrix + model.lam * potentials  # (n, m, m)
    jj, kk = np.meshgrid(np.arange(m), np.arange(m), indexing="ij")
    for site in range(n):
        rows.append(site * m + jj.ravel())
        cols.append(site * m + kk.ravel())
        vals.append(diag[site].ravel())
    orb = np.arange(m)
    for p, c in tree.edges():
        rows.append(p * m + orb)
        cols.append(c * m + orb)
        vals.append(np.full(m, 0.5))
        rows.append(c * m + orb)
        cols.append(p * m + orb)
        vals.append(np.full(m, 0.5))
    H = scipy.sparse.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n * m, n * m),
    )
    return H.tocsr()


def _factorize(tree, model, potentials, sp: SpectralPoint):
    H = assemble_operator(tree, model, potentials).astype(complex)
    shifted = (H - sp.z * scipy.sparse.identity(H.shape[0], format="csr")).tocsc()
    return scipy.sparse.linalg.splu(shifted)


def green_column(tree, model, potentials, sp: SpectralPoint, site=0, orbital=0):
    """One column of (H - z)^{-1} via sparse LU."""
    lu = _factorize(tree, model, potentials, sp)
    e = np.zeros(tree.n_sites * model.m, dtype=complex)
    e[site * model.m + orbital] = 1.0
    return lu.solve(e)


def root_green_block(tree, model, potentials, sp: SpectralPoint):
    """The m x m Green's matrix block at the root, one LU for all m columns."""
    m = model.m
    lu = _factorize(tree, model, potentials, sp)
    rhs = np.zeros((tree.n_sites * m, m), dtype=complex)
    rhs[np.arange(m), np.arange(m)] = 1.0
    sol = lu.solve(rhs)
    return sol[:m, :].copy()


def dos_histogram(tree, model, E_grid, eta, realizations, seed):
    """Smeared eigenvalue density per orbital, averaged over realizations.

    Dense eigvalsh per realization (independent of any Green recursion),
    Cauchy kernel of width eta on the given energy grid.  Returns
    (dos_mean, dos_se) arrays over the grid.
    """
    if eta <= 0:
        raise ValueError("eta must be > 0 for smearing")
    dof = tree.n_sites * model.m
    if dof > MAX_DENSE_DOF:
        raise SizeOverflowError(f"{dof} dof too large for the dense eigensolver")
    E_grid = np.asarray(E_grid, dtype=float)
    per_real = np.empty((realizations, len(E_grid)))
    for r in range(realizations):
        potentials = draw_site_potentials(model, tree, seed, realization=r)
        H = assemble_operator(tree, model, potentials).toarray()
        evals = np.linalg.eigvalsh(H)
        kern = eta / np.pi / ((E_grid[:, None] - evals[None, :]) ** 2 + eta**2)
        per_real[r] = kern.sum(axis=1) / dof
    mean = per_real.mean(axis=0)
    se = per_real.std(axis=0, ddof=1) / np.sqrt(realizations) if realizations > 1 else np.zeros_like(mean)
    return mean, se
