"""SIC-POVM geometry on the generalized Bloch sphere.

Builds the Gell-Mann Bloch embedding, regular simplex machinery, and a
rotation-manifold least-squares search for simplex orientations whose
vertices share a common trace-power value.
"""

__version__ = "0.1.0"

from .blochalg import (
    GellMannBasis,
    StructureTensor,
    adjoint_rotation,
    build_basis,
    from_bloch,
    structure_tensor,
    to_bloch,
)
from .certify import VerificationReport, unitary_equivalence_class, verify_family
from .knasteropt import (
    CircleProfile,
    EvalContext,
    KnasterS1Result,
    OptimizerConfig,
    PovmFamilyResult,
    RotationState,
    align_to_vertices,
    bloch_reference_simplex,
    circle_profile,
    knaster_s1,
    last_vertex,
    objective,
    optimize,
    scan_f0,
)
from .simplexgeo import (
    Simplex,
    j_membership,
    reduce_to_sphere,
    regular_simplex,
    stabilizer_rotation,
)
from .tracepoly import (
    TracePowerProfile,
    f_cubic,
    grad_f_cubic,
    grad_trace_power,
    purity_check,
    spectrum_from_traces,
    trace_power,
)
from .whsic import SicCandidate, displacement_ops, fiducial_orbit, seed_sic, verify_sic

__all__ = [
    "__version__",
    "GellMannBasis",
    "StructureTensor",
    "adjoint_rotation",
    "build_basis",
    "from_bloch",
    "structure_tensor",
    "to_bloch",
    "VerificationReport",
    "unitary_equivalence_class",
    "verify_family",
    "CircleProfile",
    "EvalContext",
    "KnasterS1Result",
    "OptimizerConfig",
    "PovmFamilyResult",
    "RotationState",
    "align_to_vertices",
    "bloch_reference_simplex",
    "circle_profile",
    "knaster_s1",
    "last_vertex",
    "objective",
    "optimize",
    "scan_f0",
    "Simplex",
    "j_membership",
    "reduce_to_sphere",
    "regular_simplex",
    "stabilizer_rotation",
    "TracePowerProfile",
    "f_cubic",
    "grad_f_cubic",
    "grad_trace_power",
    "purity_check",
    "spectrum_from_traces",
    "trace_power",
    "SicCandidate",
    "displacement_ops",
    "fiducial_orbit",
    "seed_sic",
    "verify_sic",
]
