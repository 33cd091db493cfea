"""Independent verification of candidate families, recomputed from matrices.

Nothing stored in a result is trusted: Bloch vertices, pairwise overlaps,
radii, target values, and spectra are all rederived from the matrices, and
the spectra are checked along two routes (direct eigensolve and trace-power
recovery).  The triple-product identity is only scored when every element
passes the purity conditions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import blochalg, tracepoly, whsic
from .knasteropt import PovmFamilyResult


@dataclass
class VerificationReport:
    dim: int
    power: int
    f0: float
    gram_max_dev: float
    radius_max_dev: float
    f_values: np.ndarray
    f_spread: float
    f_target_dev: float
    spectra: np.ndarray
    spectra_spread: float
    trace_spectra_max_dev: float
    psd_flags: list[bool]
    all_pure: bool
    triple_sum: float
    triple_sum_dev: float | None
    last_vertex_defect: float
    last_vertex_purity_defect: float
    final_vertex_purity_defect: float
    bloch_consistency_dev: float
    checks: dict[str, bool] = field(default_factory=dict)
    verdict: bool = False


def unitary_equivalence_class(matrices: np.ndarray, tol: float = 1e-8) -> bool:
    """True iff all elements share one sorted spectrum within tol."""
    mats = np.asarray(matrices, dtype=np.complex128)
    spectra = np.array([np.sort(np.linalg.eigvalsh(m))[::-1] for m in mats])
    return bool(np.max(np.abs(spectra - spectra[0])) <= tol)


def _spectra_spread(spectra: np.ndarray) -> float:
    diffs = spectra[:, None, :] - spectra[None, :, :]
    return float(np.max(np.abs(diffs)))


def verify_family(result: PovmFamilyResult, tol: float = 1e-8) -> VerificationReport:
    """Recompute every claimed property of a family from its matrices."""
    mats = np.asarray(result.matrices, dtype=np.complex128)
    n = result.dim
    count = n * n
    if mats.shape != (count, n, n):
        raise ValueError(f"expected {count} matrices of size {n}, got {mats.shape}")
    basis = blochalg.build_basis(n)
    tensor = blochalg.structure_tensor(basis)

    overlaps = np.real(np.einsum("aij,bji->ab", mats, mats))
    off = ~np.eye(count, dtype=bool)
    gram_max_dev = float(np.max(np.abs(overlaps[off] - 1.0 / (n + 1))))

    bloch = np.array([blochalg.to_bloch(m, basis) for m in mats])
    radius = np.sqrt((n - 1.0) / (2.0 * n))
    radius_max_dev = float(np.max(np.abs(np.linalg.norm(bloch, axis=1) - radius)))

    if result.power == 3:
        f_values = np.array([tracepoly.f_cubic(v, tensor) for v in bloch])
    else:
        f_values = np.array([tracepoly.trace_power(m, result.power) for m in mats])
    f_spread = float(np.max(f_values) - np.min(f_values))
    f_target_dev = float(np.max(np.abs(f_values - result.f0)))

    spectra = np.array([np.sort(np.linalg.eigvalsh(m))[::-1] for m in mats])
    try:
        trace_spectra = np.array(
            [tracepoly.spectrum_from_traces(tracepoly.power_profile(m)) for m in mats]
        )
        trace_spectra_max_dev = float(np.max(np.abs(spectra - trace_spectra)))
    except ValueError:
        # corrupted elements can defeat the trace route; score it as failed
        trace_spectra_max_dev = np.inf
    psd_flags = [bool(s[-1] >= -tracepoly.PSD_EIG_TOL) for s in spectra]

    purity_defects = np.array([tracepoly.purity_defect(m) for m in mats])
    all_pure = bool(np.max(purity_defects) <= tol)
    triple_sum = whsic.triple_product_sum(mats)
    triple_sum_dev = abs(triple_sum - float(n) ** 4) if all_pure else None

    # inline closure so corrupted traces degrade the verdict instead of raising
    reconstructed = n * np.eye(n, dtype=np.complex128) - mats[:-1].sum(axis=0)
    last_vertex_defect = float(np.max(np.abs(reconstructed - mats[-1])))
    last_vertex_purity_defect = float(tracepoly.purity_defect(reconstructed))
    final_vertex_purity_defect = float(tracepoly.purity_defect(mats[-1]))

    stored = np.asarray(result.vertices, dtype=np.float64)
    bloch_consistency_dev = (
        float(np.max(np.abs(stored - bloch))) if stored.shape == bloch.shape else np.inf
    )

    checks = {
        "gram": gram_max_dev <= tol,
        "radius": radius_max_dev <= tol,
        "f_spread": f_spread <= tol,
        "spectra_routes_agree": trace_spectra_max_dev <= max(tol, 1e-9),
        "last_vertex_closure": last_vertex_defect <= tol,
        "bloch_consistency": bloch_consistency_dev <= max(tol, 1e-10),
    }
    if triple_sum_dev is not None:
        checks["triple_sum"] = triple_sum_dev <= max(tol, 1e-8)
    return VerificationReport(
        dim=n,
        power=result.power,
        f0=result.f0,
        gram_max_dev=gram_max_dev,
        radius_max_dev=radius_max_dev,
        f_values=f_values,
        f_spread=f_spread,
        f_target_dev=f_target_dev,
        spectra=spectra,
        spectra_spread=_spectra_spread(spectra),
        trace_spectra_max_dev=trace_spectra_max_dev,
        psd_flags=psd_flags,
        all_pure=all_pure,
        triple_sum=triple_sum,
        triple_sum_dev=triple_sum_dev,
        last_vertex_defect=last_vertex_defect,
        last_vertex_purity_defect=last_vertex_purity_defect,
        final_vertex_purity_defect=final_vertex_purity_defect,
        bloch_consistency_dev=bloch_consistency_dev,
        checks=checks,
        verdict=all(checks.values()),
    )
