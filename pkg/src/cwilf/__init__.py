"""Exact enumeration of permutations by consecutive pattern occurrences.

Two complementary polynomial-time engines, cross-validated against brute
force: an incremental append evolution over suffix states (`positive_dp`)
and a cluster-based inclusion-exclusion (`cluster_dp`), both over exact
arbitrary-precision arithmetic (`weightring`).
"""

from .analysis import (
    GrowthEstimate,
    SeriesReport,
    cross_check,
    growth_estimate,
    hit_parade,
)
from .cluster_dp import (
    assemble_counts,
    cluster_polys,
    egf_identity_check,
    extend_cluster,
    overlap_set,
    verify_321_equation,
)
from .permcore import (
    ClusterWitness,
    OracleLimitError,
    brute_cluster_enum,
    brute_weight_enum,
    complement,
    occurrences,
    parse_pattern,
    parse_pattern_set,
    reduction,
    reverse,
    symmetry_class,
    weight_monomial,
)
from .positive_dp import (
    StateTable,
    append_transition,
    enumerate_for_patterns,
    enumerate_series,
    init_table,
    step_append,
    step_append_aggregated,
)
from .weightring import PatternAssignment, WeightPoly

__version__ = "0.1.0"

__all__ = [
    "ClusterWitness",
    "GrowthEstimate",
    "OracleLimitError",
    "PatternAssignment",
    "SeriesReport",
    "StateTable",
    "WeightPoly",
    "append_transition",
    "assemble_counts",
    "brute_cluster_enum",
    "brute_weight_enum",
    "cluster_polys",
    "complement",
    "cross_check",
    "egf_identity_check",
    "enumerate_for_patterns",
    "enumerate_series",
    "extend_cluster",
    "growth_estimate",
    "hit_parade",
    "init_table",
    "occurrences",
    "overlap_set",
    "parse_pattern",
    "parse_pattern_set",
    "reduction",
    "reverse",
    "step_append",
    "step_append_aggregated",
    "symmetry_class",
    "verify_321_equation",
    "weight_monomial",
]
