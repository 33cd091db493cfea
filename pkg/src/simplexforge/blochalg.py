"""Generalized Gell-Mann basis and Bloch-vector maps for n-level systems.

The traceless Hermitian basis is ordered as the symmetric block, the
antisymmetric block, and the diagonal block, with off-diagonal pairs in
lexicographic (j, k) order.  All matrices are normalized so that
Tr(L_j L_k) = 2 delta_jk, which fixes the diagonal prefactors to
sqrt(2 / (l (l + 1))).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

HERMITICITY_TOL = 1e-14
UNITARITY_TOL = 1e-12

# Structure-tensor entries below this magnitude are exact zeros polluted by
# rounding and are dropped from the sparse map.
_TENSOR_DROP_TOL = 1e-13


@dataclass(frozen=True)
class GellMannBasis:
    """Ordered basis of the n^2 - 1 traceless Hermitian matrices."""

    dim: int
    matrices: np.ndarray  # shape (dim^2 - 1, dim, dim), complex128

    @property
    def size(self) -> int:
        return self.dim * self.dim - 1


@dataclass(frozen=True)
class StructureTensor:
    """Fully symmetric cubic coefficients d_ijk = Re Tr(L_i L_j L_k).

    Entries are stored once per sorted index triple i <= j <= k.  The flat
    index/weight arrays carry the permutation multiplicity so that the cubic
    form and its gradient are plain weighted sums.
    """

    dim: int
    entries: dict[tuple[int, int, int], float]
    _idx: np.ndarray = field(repr=False)      # (m, 3) sorted triples
    _weights: np.ndarray = field(repr=False)  # (m,) multiplicity * d_ijk


def build_basis(n: int) -> GellMannBasis:
    """Construct the generalized Gell-Mann basis in dimension n >= 2.

    Returns the n^2 - 1 matrices ordered symmetric, antisymmetric, diagonal.
    For n = 2 this is exactly (sigma_x, sigma_y, sigma_z).
    """
    if n < 2:
        raise ValueError(f"basis requires dimension n >= 2, got {n}")
    mats = np.zeros((n * n - 1, n, n), dtype=np.complex128)
    pos = 0
    for j in range(n):
        for k in range(j + 1, n):
            mats[pos, j, k] = 1.0
            mats[pos, k, j] = 1.0
            pos += 1
    for j in range(n):
        for k in range(j + 1, n):
            mats[pos, j, k] = -1.0j
            mats[pos, k, j] = 1.0j
            pos += 1
    for l in range(1, n):
        c = np.sqrt(2.0 / (l * (l + 1)))
        mats[pos, range(l), range(l)] = c
        mats[pos, l, l] = -l * c
        pos += 1
    return GellMannBasis(dim=n, matrices=mats)


def hermiticity_defect(h: np.ndarray) -> float:
    """Largest deviation of h from its conjugate transpose."""
    h = np.asarray(h, dtype=np.complex128)
    return float(np.max(np.abs(h - h.conj().T))) if h.size else 0.0


def to_bloch(h: np.ndarray, basis: GellMannBasis) -> np.ndarray:
    """Map a Hermitian matrix to its Bloch coordinates (1/2) Tr(H L_j)."""
    h = np.asarray(h, dtype=np.complex128)
    if h.shape != (basis.dim, basis.dim):
        raise ValueError(
            f"matrix shape {h.shape} does not match basis dimension {basis.dim}"
        )
    return 0.5 * np.real(np.einsum("ij,aji->a", h, basis.matrices))


def from_bloch(v: np.ndarray, basis: GellMannBasis) -> np.ndarray:
    """Reconstruct I/n + sum_j v_j L_j from Bloch coordinates.

    The result is Hermitian with unit trace; positivity is not implied.
    """
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (basis.size,):
        raise ValueError(
            f"coordinate length {v.shape} does not match basis size {basis.size}"
        )
    n = basis.dim
    return np.eye(n, dtype=np.complex128) / n + np.einsum(
        "a,aij->ij", v, basis.matrices
    )


def structure_tensor(basis: GellMannBasis) -> StructureTensor:
    """Compute the symmetric cubic tensor of the basis.

    d_ijk is the real part of Tr(L_i L_j L_k); the imaginary part is
    antisymmetric and cancels from every symmetric contraction.
    """
    mats = basis.matrices
    m = basis.size
    entries: dict[tuple[int, int, int], float] = {}
    idx = []
    weights = []
    products = np.einsum("aij,bjk->abik", mats, mats)
    for i in range(m):
        for j in range(i, m):
            pij = products[i, j]
            for k in range(j, m):
                d = float(np.real(np.einsum("ik,ki->", pij, mats[k])))
                if abs(d) <= _TENSOR_DROP_TOL:
                    continue
                entries[(i, j, k)] = d
                idx.append((i, j, k))
                weights.append(_multiplicity(i, j, k) * d)
    idx_arr = (
        np.asarray(idx, dtype=np.intp) if idx else np.zeros((0, 3), dtype=np.intp)
    )
    return StructureTensor(
        dim=basis.dim,
        entries=entries,
        _idx=idx_arr,
        _weights=np.asarray(weights, dtype=np.float64),
    )


def _multiplicity(i: int, j: int, k: int) -> int:
    if i == j == k:
        return 1
    if i == j or j == k:
        return 3
    return 6


def adjoint_rotation(u: np.ndarray, basis: GellMannBasis) -> np.ndarray:
    """Image of a unitary on Bloch space: M_jk = (1/2) Tr(L_j u L_k u+).

    M is orthogonal and satisfies to_bloch(u rho u+) = M to_bloch(rho).
    """
    u = np.asarray(u, dtype=np.complex128)
    n = basis.dim
    if u.shape != (n, n):
        raise ValueError(f"unitary shape {u.shape} does not match dimension {n}")
    defect = float(np.max(np.abs(u @ u.conj().T - np.eye(n))))
    if defect > UNITARITY_TOL:
        raise ValueError(f"input is not unitary: defect {defect:.3e} > {UNITARITY_TOL:.0e}")
    conj = np.einsum("ij,ajk,lk->ail", u, basis.matrices, u.conj())
    m = 0.5 * np.einsum("aij,bji->ab", basis.matrices, conj)
    imag = float(np.max(np.abs(m.imag)))
    if imag > 1e-10:
        raise ValueError(f"adjoint image has imaginary residue {imag:.3e}")
    return np.ascontiguousarray(m.real)
