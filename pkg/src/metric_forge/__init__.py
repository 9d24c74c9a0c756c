"""metric-forge: exact-rational finite metric spaces, quantized approximation
with range certificates, nebula interval covers and universal metrics."""

from .core import (
    FiniteMetricSpace,
    PartitionPlan,
    Scalar,
    SearchCapExceeded,
    ValidationReport,
    Violation,
    amalgamate,
    as_scalar,
    cantor_approx,
    extend_metric,
    greedy_clopen_partition,
    metric_repair,
    pair_points,
    random_metric,
    subdominant_ultrametric,
    sup_distance,
    validate_metric,
)
from .quantize import (
    AffineCapped,
    ApproximationResult,
    Compose,
    Identity,
    Power,
    RangeCertificate,
    RangeParams,
    RoundUpTo,
    ScaledCeil,
    Sum,
    Transform,
    Truncate,
    UnsupportedTransformError,
    approximate,
    ceil_ratio,
    geometric_levels,
    quantize_discrete,
    range_membership,
    subadditivity_counterexample,
    transform_metric,
)
from .nebula import (
    IntervalSet,
    MarginResult,
    Nebula,
    NebulaValidation,
    cover,
    cover_family,
    gap_near_zero,
    intersect,
    margin,
    nebula_contains,
    nebula_to_intervals,
    range_of_metric,
    validate_nebula,
)
from .universal import (
    Embedding,
    FragilityReport,
    FUnivApprox,
    NetSpace,
    build_funiv_approx,
    build_pair_universal,
    canonical_section,
    class_Cn_check,
    find_isometric_embedding,
    fragility_experiment,
    frechet_embed,
    linf_distance,
    make_net,
    pullback_universal,
    range_density_gap,
)

__version__ = "0.1.0"
