"""Trace-power functionals on the Bloch sphere and spectrum recovery.

The cubic form f(v) = sum_ijk d_ijk v_i v_j v_k equals Tr((L.v)^3) and takes
the value (n-1)(n-2)/n^2 exactly on images of pure states.  Spectra are
recovered from trace powers through Newton's identities and a local
polynomial root solver, keeping this path independent of any eigensolver.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .blochalg import GellMannBasis, StructureTensor, from_bloch

# Eigenvalues above this floor count as nonnegative when classifying
# positive semidefiniteness of converged numerical output.
PSD_EIG_TOL = 1e-10

_IMAG_RESIDUE_TOL = 1e-10
_ROOT_IMAG_TOL = 1e-8
_ABERTH_MAX_ITERS = 200
_ABERTH_TOL = 1e-14


@dataclass(frozen=True)
class TracePowerProfile:
    """Trace powers Tr(rho^1) .. Tr(rho^n) of an n-dimensional Hermitian."""

    dim: int
    powers: tuple[float, ...]

    def __post_init__(self):
        if len(self.powers) < self.dim:
            raise ValueError(
                f"profile needs powers 1..{self.dim}, got {len(self.powers)}"
            )


def f_cubic(v: np.ndarray, tensor: StructureTensor) -> float:
    """Evaluate the symmetric cubic form at Bloch coordinates v."""
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (tensor.dim * tensor.dim - 1,):
        raise ValueError(
            f"coordinate length {v.shape} does not match dimension {tensor.dim}"
        )
    if tensor._idx.shape[0] == 0:
        return 0.0
    vi = v[tensor._idx[:, 0]]
    vj = v[tensor._idx[:, 1]]
    vk = v[tensor._idx[:, 2]]
    return float(np.dot(tensor._weights, vi * vj * vk))


def grad_f_cubic(v: np.ndarray, tensor: StructureTensor) -> np.ndarray:
    """Gradient of the cubic form: components 3 sum_ik d_jik v_i v_k."""
    v = np.asarray(v, dtype=np.float64)
    grad = np.zeros_like(v)
    if tensor._idx.shape[0] == 0:
        return grad
    ii, jj, kk = tensor._idx[:, 0], tensor._idx[:, 1], tensor._idx[:, 2]
    w = tensor._weights
    np.add.at(grad, ii, w * v[jj] * v[kk])
    np.add.at(grad, jj, w * v[ii] * v[kk])
    np.add.at(grad, kk, w * v[ii] * v[jj])
    return grad


def trace_power(h: np.ndarray, m: int) -> float:
    """Tr(H^m) by repeated multiplication, discarding a checked imaginary residue."""
    if m < 1:
        raise ValueError(f"power must be >= 1, got {m}")
    h = np.asarray(h, dtype=np.complex128)
    acc = h
    for _ in range(m - 1):
        acc = acc @ h
    tr = complex(np.trace(acc))
    if abs(tr.imag) > _IMAG_RESIDUE_TOL:
        raise ValueError(f"trace power has imaginary residue {tr.imag:.3e}")
    return tr.real


def power_profile(h: np.ndarray) -> TracePowerProfile:
    """Collect Tr(H^1) .. Tr(H^n) for an n x n Hermitian matrix."""
    h = np.asarray(h, dtype=np.complex128)
    n = h.shape[0]
    powers = []
    acc = np.eye(n, dtype=np.complex128)
    for _ in range(n):
        acc = acc @ h
        tr = complex(np.trace(acc))
        if abs(tr.imag) > _IMAG_RESIDUE_TOL:
            raise ValueError(f"trace power has imaginary residue {tr.imag:.3e}")
        powers.append(tr.real)
    return TracePowerProfile(dim=n, powers=tuple(powers))


def grad_trace_power(v: np.ndarray, m: int, basis: GellMannBasis) -> np.ndarray:
    """Gradient of v -> Tr((I/n + L.v)^m): components m Tr(rho^(m-1) L_j)."""
    if m < 2:
        raise ValueError(f"power must be >= 2, got {m}")
    rho = from_bloch(v, basis)
    acc = rho
    for _ in range(m - 2):
        acc = acc @ rho
    grad = m * np.einsum("ij,aji->a", acc, basis.matrices)
    imag = float(np.max(np.abs(grad.imag)))
    if imag > _IMAG_RESIDUE_TOL:
        raise ValueError(f"gradient has imaginary residue {imag:.3e}")
    return grad.real


def purity_check(h: np.ndarray, tol: float = 1e-10) -> bool:
    """True iff Tr(H), Tr(H^2), Tr(H^3) all equal 1 within tol."""
    return all(abs(trace_power(h, m) - 1.0) <= tol for m in (1, 2, 3))


def purity_defect(h: np.ndarray) -> float:
    """Largest deviation of Tr(H), Tr(H^2), Tr(H^3) from 1."""
    return max(abs(trace_power(h, m) - 1.0) for m in (1, 2, 3))


def spectrum_from_traces(profile: TracePowerProfile) -> np.ndarray:
    """Recover the sorted (descending) spectrum from trace powers.

    Newton's identities convert power sums to elementary symmetric
    polynomials, whose characteristic polynomial is solved locally.
    """
    n = profile.dim
    s = np.asarray(profile.powers[:n], dtype=np.float64)
    e = np.zeros(n + 1)
    e[0] = 1.0
    for k in range(1, n + 1):
        acc = 0.0
        for i in range(1, k + 1):
            acc += (-1.0) ** (i - 1) * e[k - i] * s[i - 1]
        e[k] = acc / k
    # monic characteristic polynomial: x^n - e1 x^(n-1) + e2 x^(n-2) - ...
    coeffs = np.array([(-1.0) ** k * e[k] for k in range(n + 1)])
    roots = _poly_roots(coeffs)
    worst_imag = float(np.max(np.abs(roots.imag)))
    if worst_imag > _ROOT_IMAG_TOL:
        raise ValueError(
            f"trace profile is inconsistent: roots have imaginary part {worst_imag:.3e}"
        )
    return np.sort(roots.real)[::-1]


def _poly_roots(coeffs: np.ndarray) -> np.ndarray:
    """All roots of a monic real polynomial given by descending coefficients."""
    deg = len(coeffs) - 1
    if deg == 1:
        return np.array([-coeffs[1]], dtype=np.complex128)
    if deg == 2:
        return _quadratic_roots(coeffs[1], coeffs[2])
    if deg == 3:
        return _cubic_roots(coeffs[1], coeffs[2], coeffs[3])
    return _aberth_roots(coeffs)


def _quadratic_roots(b: float, c: float) -> np.ndarray:
    disc = complex(b * b - 4.0 * c)
    sq = np.sqrt(disc)
    # avoid cancellation in the root of smaller magnitude
    q = -0.5 * (b + sq) if b.real >= 0 else -0.5 * (b - sq)
    r1 = q
    r2 = c / q if abs(q) > 0 else 0.0 + 0.0j
    return np.array([r1, r2], dtype=np.complex128)


def _cubic_roots(a: float, b: float, c: float) -> np.ndarray:
    """Roots of x^3 + a x^2 + b x + c via the depressed-cubic closed form."""
    shift = a / 3.0
    p = b - a * a / 3.0
    q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c
    if abs(p) < 1e-14 and abs(q) < 1e-14:
        return np.full(3, -shift, dtype=np.complex128)
    disc = (q / 2.0) ** 2 + (p / 3.0) ** 3
    if disc <= 0.0:
        # three real roots: trigonometric form
        rho = np.sqrt(-(p ** 3) / 27.0)
        arg = np.clip(-q / (2.0 * rho), -1.0, 1.0)
        phi = np.arccos(arg)
        mag = 2.0 * np.sqrt(-p / 3.0)
        t = mag * np.cos((phi - 2.0 * np.pi * np.arange(3)) / 3.0)
        return (t - shift).astype(np.complex128)
    sq = np.sqrt(disc)
    u = np.cbrt(-q / 2.0 + sq)
    v = np.cbrt(-q / 2.0 - sq)
    t1 = u + v
    re = -t1 / 2.0
    im = (u - v) * np.sqrt(3.0) / 2.0
    return np.array(
        [t1 - shift, re - shift + 1j * im, re - shift - 1j * im],
        dtype=np.complex128,
    )


def _aberth_roots(coeffs: np.ndarray) -> np.ndarray:
    """Aberth-Ehrlich simultaneous iteration for a monic real polynomial."""
    deg = len(coeffs) - 1
    dcoeffs = coeffs[:-1] * np.arange(deg, 0, -1)
    radius = 1.0 + float(np.max(np.abs(coeffs[1:])))
    angles = 2.0 * np.pi * (np.arange(deg) + 0.25) / deg
    z = radius * np.exp(1j * angles)
    for _ in range(_ABERTH_MAX_ITERS):
        pz = np.polyval(coeffs, z)
        dpz = np.polyval(dcoeffs, z)
        newton = np.where(np.abs(dpz) > 0, pz / dpz, 0.0)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        repulse = np.sum(1.0 / diff, axis=1) - 1.0
        denom = 1.0 - newton * repulse
        step = np.where(np.abs(denom) > 0, newton / denom, newton)
        z = z - step
        if float(np.max(np.abs(step))) < _ABERTH_TOL:
            break
    return z
