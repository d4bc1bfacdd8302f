"""Reconstruct the unitary or antiunitary operator behind a ray isometry."""

from .hilbert import (
    check_orthonormal,
    fourier_coefficients,
    gram_schmidt,
    inner_product,
    norm,
    parseval_gap,
)
from .oracles import (
    Flag,
    GroundTruth,
    RayMapOracle,
    collapse_oracle,
    haar_unitary,
    isometric_embedding,
    make_oracle,
    perturbed_oracle,
)
from .rays import Ray, ray_equal, ray_from_vector, ray_product, rephase
from .reconstruct import (
    ProbeError,
    ReconstructionReport,
    WignerOperator,
    apply,
    reconstruct,
)
from .verification import (
    CheckReport,
    check_isometry,
    check_operator_law,
    check_ray_compatibility,
    distance_up_to_global_phase,
)

__version__ = "0.1.0"
