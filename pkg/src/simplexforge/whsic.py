"""Weyl-Heisenberg displacement operators, fiducial orbits, and seed SICs.

Displacements are the plain products X^a Z^b with omega = exp(2 pi i / n);
finer phase conventions are irrelevant here because only the rank-1
projectors of the orbit are kept.  The stored dimension-3 fiducial is
verified on every construction rather than trusted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import blochalg, simplexgeo, tracepoly

# (0, 1, -1)/sqrt(2): its displacement orbit is equiangular in dimension 3.
FIDUCIAL_D3 = np.array([0.0, 1.0, -1.0], dtype=np.complex128) / np.sqrt(2.0)


@dataclass(frozen=True)
class SicCandidate:
    """n^2 unit-trace Hermitian elements with their Bloch images."""

    dim: int
    projectors: np.ndarray      # (n^2, n, n) complex
    bloch_vertices: np.ndarray  # (n^2, n^2 - 1) real
    source: str                 # "seed" | "optimized" | "file"


def displacement_ops(n: int) -> np.ndarray:
    """All n^2 products X^a Z^b, ordered by (a, b) with b fastest."""
    if n < 2:
        raise ValueError(f"displacement operators need n >= 2, got {n}")
    omega = np.exp(2j * np.pi / n)
    shift = np.zeros((n, n), dtype=np.complex128)
    shift[(np.arange(n) + 1) % n, np.arange(n)] = 1.0
    clock = np.diag(omega ** np.arange(n))
    ops = np.empty((n * n, n, n), dtype=np.complex128)
    xa = np.eye(n, dtype=np.complex128)
    for a in range(n):
        zb = np.eye(n, dtype=np.complex128)
        for b in range(n):
            ops[a * n + b] = xa @ zb
            zb = zb @ clock
        xa = xa @ shift
    return ops


def fiducial_orbit(
    psi: np.ndarray, n: int | None = None, basis: blochalg.GellMannBasis | None = None
) -> SicCandidate:
    """Orbit of |psi><psi| under all displacement operators."""
    psi = np.asarray(psi, dtype=np.complex128).ravel()
    if n is None:
        n = psi.shape[0]
    if psi.shape != (n,):
        raise ValueError(f"fiducial has length {psi.shape[0]}, expected {n}")
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > 1e-12:
        raise ValueError(f"fiducial is not normalized: |psi| = {norm}")
    ops = displacement_ops(n)
    vectors = np.einsum("aij,j->ai", ops, psi)
    projectors = np.einsum("ai,aj->aij", vectors, vectors.conj())
    if basis is None:
        basis = blochalg.build_basis(n)
    bloch = np.array([blochalg.to_bloch(p, basis) for p in projectors])
    return SicCandidate(dim=n, projectors=projectors, bloch_vertices=bloch, source="seed")


def verify_sic(candidate: SicCandidate, tol: float = 1e-10) -> tuple[bool, float]:
    """Check equiangularity, purity, and Bloch geometry; returns (ok, max deviation).

    Pairwise traces are compared against 1/(n+1), Bloch dots against
    -1/(2n(n+1)), and every element against the three purity conditions.
    """
    n = candidate.dim
    projs = candidate.projectors
    target = 1.0 / (n + 1)
    overlaps = np.einsum("aij,bji->ab", projs, projs)
    dev = 0.0
    off = ~np.eye(len(projs), dtype=bool)
    dev = max(dev, float(np.max(np.abs(overlaps[off] - target))))
    dev = max(dev, float(np.max(np.abs(overlaps.imag))))
    for p in projs:
        dev = max(dev, tracepoly.purity_defect(p))
    bloch_target = -1.0 / (2.0 * n * (n + 1))
    dots = candidate.bloch_vertices @ candidate.bloch_vertices.T
    dev = max(dev, float(np.max(np.abs(dots[off] - bloch_target))))
    return dev <= tol, dev


def seed_sic(n: int, fiducial: np.ndarray | None = None) -> SicCandidate:
    """A verified SIC in dimension 2 or 3, or from a caller-provided fiducial.

    Dimension 2 is any orientation of the regular 3-simplex at Bloch radius
    1/2; dimension 3 is the stored fiducial's orbit.  Construction fails if
    the verification pass fails.
    """
    if fiducial is not None:
        candidate = fiducial_orbit(np.asarray(fiducial), n)
    elif n == 2:
        basis = blochalg.build_basis(2)
        vertices = 0.5 * simplexgeo.regular_simplex(3).vertices
        projectors = np.array([blochalg.from_bloch(v, basis) for v in vertices])
        candidate = SicCandidate(
            dim=2, projectors=projectors, bloch_vertices=vertices, source="seed"
        )
    elif n == 3:
        candidate = fiducial_orbit(FIDUCIAL_D3, 3)
    else:
        raise ValueError(
            f"no built-in seed for dimension {n}; provide a fiducial vector"
        )
    ok, dev = verify_sic(candidate, tol=1e-10)
    if not ok:
        raise ValueError(f"seed construction failed verification: deviation {dev:.3e}")
    return candidate


def triple_product_sum(matrices: np.ndarray) -> float:
    """Brute-force sum of Tr(P_r P_s P_t) over all index triples."""
    mats = np.asarray(matrices, dtype=np.complex128)
    total = complex(np.einsum("rij,sjk,tki->", mats, mats, mats))
    if abs(total.imag) > 1e-8:
        raise ValueError(f"triple sum has imaginary residue {total.imag:.3e}")
    return total.real
