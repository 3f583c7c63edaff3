"""Resilient consensus through centerpoints: geometry kernels, safe-point
methods, a brute-force oracle and a deterministic multi-agent simulator."""

__version__ = "0.1.0"

from centerstone.geometry import (  # noqa: E402
    DegenerateInput,
    DimensionMismatch,
    GeometryError,
    HalfSpace,
    InsufficientPoints,
    RadonPartition,
    depth,
    in_convex_hull,
    is_general_position,
    radon_point,
)
from centerstone.centerpoint import (  # noqa: E402
    CenterpointResult,
    centerpoint_2d,
    centerpoint_3d,
    exact_centerpoint,
    interior_centerpoint,
    iterated_radon_centerpoint,
)
from centerstone.tverberg import NoGuarantee, TverbergPartition, approx_tverberg, tverberg_safe_point  # noqa: E402
from centerstone.oracle import OracleLimitExceeded, oracle_depth, oracle_in_hull, oracle_safe_point_exists  # noqa: E402
from centerstone.config import ConfigError, ScenarioConfig  # noqa: E402
from centerstone.consensus import adrc_step, gather_views, resilience_condition, run  # noqa: E402
from centerstone.scenarios import generate_scenario, tight_triangle  # noqa: E402

__all__ = [
    "CenterpointResult",
    "ConfigError",
    "DegenerateInput",
    "DimensionMismatch",
    "GeometryError",
    "HalfSpace",
    "InsufficientPoints",
    "NoGuarantee",
    "OracleLimitExceeded",
    "RadonPartition",
    "ScenarioConfig",
    "TverbergPartition",
    "adrc_step",
    "approx_tverberg",
    "centerpoint_2d",
    "centerpoint_3d",
    "depth",
    "exact_centerpoint",
    "gather_views",
    "generate_scenario",
    "in_convex_hull",
    "interior_centerpoint",
    "is_general_position",
    "iterated_radon_centerpoint",
    "oracle_depth",
    "oracle_in_hull",
    "oracle_safe_point_exists",
    "radon_point",
    "resilience_condition",
    "run",
    "tight_triangle",
    "tverberg_safe_point",
]
