"""Regular simplex construction, vertex-fixing rotations, and sphere reductions.

The simplex is built by the closed recursion that prepends a scaled copy of
the lower-dimensional vertex set and closes with (0, ..., 0, -1).  Rotations
that fix a leading run of vertices act as an SO(N - k) block in the
Gram-Schmidt frame of the vertices; the nested constraint sets
J_i = {x on the sphere : x . p_j = -1/N for j < i} reduce step by step to
round spheres of decreasing dimension.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ORTHOGONALITY_TOL = 1e-12
_FRAME_TOL = 1e-13


@dataclass(frozen=True)
class Simplex:
    """N + 1 unit vectors in R^N with pairwise inner product -1/N."""

    ambient_dim: int
    vertices: np.ndarray  # shape (N + 1, N)

    @property
    def equiangular_dot(self) -> float:
        return -1.0 / self.ambient_dim


def regular_simplex(ambient_dim: int) -> Simplex:
    """Build the regular simplex by recursion from V_1 = {(1), (-1)}."""
    if ambient_dim < 1:
        raise ValueError(f"ambient dimension must be >= 1, got {ambient_dim}")
    verts = np.array([[1.0], [-1.0]])
    for n in range(2, ambient_dim + 1):
        scale = np.sqrt(n * n - 1.0) / n
        top = np.hstack([scale * verts, np.full((n, 1), 1.0 / n)])
        last = np.zeros(n)
        last[-1] = -1.0
        verts = np.vstack([top, last])
    return Simplex(ambient_dim=ambient_dim, vertices=verts)


def gram_matrix(vertices: np.ndarray) -> np.ndarray:
    return np.asarray(vertices) @ np.asarray(vertices).T


def vertex_frame(simplex: Simplex) -> np.ndarray:
    """Orthonormal rows from modified Gram-Schmidt over the first N vertices.

    A second orthogonalization pass keeps the frame usable at N = 15.
    """
    n = simplex.ambient_dim
    frame = np.empty((n, n))
    for i in range(n):
        v = simplex.vertices[i].copy()
        for _ in range(2):
            for j in range(i):
                v -= (frame[j] @ v) * frame[j]
        norm = np.linalg.norm(v)
        if norm < _FRAME_TOL:
            raise ValueError(f"vertex {i} is linearly dependent on its predecessors")
        frame[i] = v / norm
    return frame


def stabilizer_rotation(
    simplex: Simplex, k: int, small_rotation: np.ndarray
) -> np.ndarray:
    """Extend an SO(N - k) block to a rotation of R^N fixing vertices 0..k-1.

    The block acts on the orthogonal complement of the first k vertices,
    expressed in their Gram-Schmidt frame.
    """
    n = simplex.ambient_dim
    if not 1 <= k <= n - 1:
        raise ValueError(f"k must lie in [1, {n - 1}], got {k}")
    u = np.asarray(small_rotation, dtype=np.float64)
    if u.shape != (n - k, n - k):
        raise ValueError(f"small rotation must be {(n - k, n - k)}, got {u.shape}")
    defect = float(np.max(np.abs(u.T @ u - np.eye(n - k))))
    if defect > ORTHOGONALITY_TOL:
        raise ValueError(f"small rotation is not orthogonal: defect {defect:.3e}")
    if np.linalg.det(u) < 0.0:
        raise ValueError("small rotation must have determinant +1")
    frame = vertex_frame(simplex)
    block = np.eye(n)
    block[k:, k:] = u
    return frame.T @ block @ frame


def j_membership(x: np.ndarray, simplex: Simplex, i: int, tol: float = 1e-10) -> bool:
    """Is the unit vector x in J_i, i.e. x . p_j = -1/N for all j < i?"""
    x = np.asarray(x, dtype=np.float64)
    if abs(np.linalg.norm(x) - 1.0) > tol:
        return False
    if i <= 1:
        return True
    dots = simplex.vertices[: i - 1] @ x
    return bool(np.all(np.abs(dots - simplex.equiangular_dot) <= tol))


def reduce_to_sphere(
    x: np.ndarray, simplex: Simplex, i: int, tol: float = 1e-10
) -> np.ndarray:
    """Apply the shift-rescale-project reduction i - 1 times.

    Each step recenters by p_1/N', rescales by sqrt(N'^2 / (N'^2 - 1)), and
    rewrites the result in an orthonormal basis of the hyperplane orthogonal
    to the consumed vertex.  The output is a unit vector in R^(N - i + 1).
    """
    if not j_membership(x, simplex, i, tol):
        dots = simplex.vertices[: max(i - 1, 0)] @ np.asarray(x, dtype=np.float64)
        raise ValueError(
            f"input is outside J_{i}: anchor dots {dots} vs {simplex.equiangular_dot}"
        )
    y = np.asarray(x, dtype=np.float64).copy()
    verts = simplex.vertices.copy()
    level = simplex.ambient_dim
    for _ in range(i - 1):
        p1 = verts[0]
        shift = p1 / level
        scale = np.sqrt(level * level / (level * level - 1.0))
        y = (y + shift) * scale
        verts = (verts[1:] + shift) * scale
        basis = _complement_basis(p1)
        y = basis @ y
        verts = verts @ basis.T
        level -= 1
    return y


def _complement_basis(p: np.ndarray) -> np.ndarray:
    """Orthonormal rows spanning the hyperplane orthogonal to unit p.

    Uses the Householder reflection sending p to a signed first axis; its
    remaining rows are the requested basis.
    """
    n = p.shape[0]
    sign = 1.0 if p[0] >= 0 else -1.0
    w = p.copy()
    w[0] += sign
    h = np.eye(n) - 2.0 * np.outer(w, w) / (w @ w)
    return h[1:]


def mapping_rotation(simplex: Simplex, k: int, a: int, b: int) -> np.ndarray:
    """Rotation fixing vertices 0..k-1 and carrying vertex a to vertex b.

    Builds a plane rotation between the complement components of the two
    vertices; valid for a, b >= k.
    """
    n = simplex.ambient_dim
    if not (k <= a <= n and k <= b <= n):
        raise ValueError(f"vertex indices must lie in [{k}, {n}], got {a}, {b}")
    frame = vertex_frame(simplex)
    ca = (frame @ simplex.vertices[a])[k:]
    cb = (frame @ simplex.vertices[b])[k:]
    return stabilizer_rotation(simplex, k, _rotation_between(ca, cb))


def _rotation_between(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """SO(m) element sending a to b; requires equal norms."""
    m = a.shape[0]
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if abs(na - nb) > 1e-10 * max(na, 1.0):
        raise ValueError(f"vectors have different norms: {na} vs {nb}")
    u = a / na
    rest = b - (b @ u) * u
    rn = np.linalg.norm(rest)
    if rn < 1e-12 * nb:
        if b @ u > 0:
            return np.eye(m)
        if m < 2:
            raise ValueError("antipodal pair cannot be rotated in one dimension")
        v = _complement_basis(u)[0]
        return np.eye(m) - 2.0 * (np.outer(u, u) + np.outer(v, v))
    v = rest / rn
    cos_t = (b @ u) / nb
    sin_t = (b @ v) / nb
    rot = np.eye(m)
    rot += (cos_t - 1.0) * (np.outer(u, u) + np.outer(v, v))
    rot += sin_t * (np.outer(v, u) - np.outer(u, v))
    return rot
