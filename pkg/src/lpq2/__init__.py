"""Extreme contractions between two-dimensional lp spaces.

Library layers: core vector calculus, induced operator norms, the pinned
segment of contractions through a norm-attaining pair, the extremality
classifier with its perturbation oracle, scalar inequality margins, and
intersection-property probes for the projective tensor product.
"""

from .core import (
    Exponent,
    LpVector,
    R_INFINITY,
    RInfinity,
    TaylorCoeffs,
    curve_norm_power,
    curve_taylor,
    curve_through,
    duality_map,
    lp_norm,
    rotate,
)
from .opnorm import (
    NormCertificate,
    Operator2x2,
    adjoint,
    apply,
    is_contraction,
    norm_value,
    op_norm,
)
from .segment import (
    ScaleResult,
    SegmentData,
    extremal_scale,
    limit_scale,
    pinned_operator,
    pinned_segment,
    scale_at_infinity,
    tight_scale,
)
from .classify import (
    CanonicalForm,
    Classification,
    canonicalize,
    classify,
    generate_extreme,
    not_extreme_certificate,
    region_of,
)
from .oracle import OracleVerdict, extremality_probe, midpoint_check
from .inequality import (
    Margin,
    SubstitutionFrame,
    band_margin,
    mass_interval,
    matching_residual,
    power_mean_margin,
    solve_matched_pair,
    substitution_frame,
    sweep_margins,
    threshold_mean_margin,
    weighted_mean_margin,
)
from .mip import (
    ClosednessReport,
    ClosureReport,
    ProbeReport,
    closedness_check,
    closure_probe,
    density_probe,
    dual_space,
    mip_verdict,
)

__version__ = "0.1.0"

__all__ = [
    "Exponent",
    "LpVector",
    "R_INFINITY",
    "RInfinity",
    "TaylorCoeffs",
    "curve_norm_power",
    "curve_taylor",
    "curve_through",
    "duality_map",
    "lp_norm",
    "rotate",
    "NormCertificate",
    "Operator2x2",
    "adjoint",
    "apply",
    "is_contraction",
    "norm_value",
    "op_norm",
    "ScaleResult",
    "SegmentData",
    "extremal_scale",
    "limit_scale",
    "pinned_operator",
    "pinned_segment",
    "scale_at_infinity",
    "tight_scale",
    "CanonicalForm",
    "Classification",
    "canonicalize",
    "classify",
    "generate_extreme",
    "not_extreme_certificate",
    "region_of",
    "OracleVerdict",
    "extremality_probe",
    "midpoint_check",
    "Margin",
    "SubstitutionFrame",
    "band_margin",
    "mass_interval",
    "matching_residual",
    "power_mean_margin",
    "solve_matched_pair",
    "substitution_frame",
    "sweep_margins",
    "threshold_mean_margin",
    "weighted_mean_margin",
    "ClosednessReport",
    "ClosureReport",
    "ProbeReport",
    "closedness_check",
    "closure_probe",
    "density_probe",
    "dual_space",
    "mip_verdict",
    "__version__",
]
