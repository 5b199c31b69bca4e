"""Streaming biclustering and Boolean matrix factorization for sparse bipartite graphs.

The left-side vertices of a bipartite graph arrive one by one, each with all
of its incident edges.  After one pass the right-side clusters are recovered
under a sublinear memory budget; a second pass recovers the left-side
clusters, either as a partition (biclustering) or as overlapping memberships
(Boolean matrix factorization).
"""

from sofa.vectors import (
    SYMMETRIC,
    DistanceMetric,
    SparseBinaryVector,
    asym_hamming,
    hamming,
    nearest_center,
)
from sofa.sketch import MGSketch
from sofa.centers import WeightedCenter
from sofa.stream_io import (
    AdjacencyStream,
    ClusteringArtifact,
    EdgeListStream,
    MemoryStream,
    PassBudgetError,
    StreamFormatError,
    StreamSource,
    open_stream,
    read_artifact,
    write_artifact,
)
from sofa.greedy import greedy_pass, theory_alpha, theory_theta, threshold_clusters
from sofa.kmedians import KMediansResult, kmedians_local_search
from sofa.streaming import (
    PassStats,
    PhaseStats,
    SofaConfig,
    default_capacity,
    estimate_theta,
    group_centers,
    multi_threshold,
    sofa_pass,
    sofa_postprocess,
    threshold_groups,
)
from sofa.second_pass import (
    assign_left,
    assign_left_multi,
    cover_left,
    cover_left_multi,
    score,
    select_top_k,
)
from sofa.synthetic import (
    GroundTruth,
    PlantedParams,
    generate_planted,
    read_ground_truth,
    write_ground_truth,
    write_planted,
)
from sofa.metrics import membership_from_assignment, quality, reconstruction_stats
from sofa.baseline import (
    StaticBudgetError,
    reservoir_sample,
    rs_reduction,
    static_sofa,
    static_sofa_sweep,
)

__version__ = "0.1.0"

__all__ = [
    "SYMMETRIC",
    "AdjacencyStream",
    "ClusteringArtifact",
    "DistanceMetric",
    "EdgeListStream",
    "GroundTruth",
    "KMediansResult",
    "MGSketch",
    "MemoryStream",
    "PassBudgetError",
    "PassStats",
    "PhaseStats",
    "PlantedParams",
    "SofaConfig",
    "SparseBinaryVector",
    "StaticBudgetError",
    "StreamFormatError",
    "StreamSource",
    "WeightedCenter",
    "assign_left",
    "assign_left_multi",
    "asym_hamming",
    "cover_left",
    "cover_left_multi",
    "default_capacity",
    "estimate_theta",
    "generate_planted",
    "greedy_pass",
    "group_centers",
    "hamming",
    "kmedians_local_search",
    "membership_from_assignment",
    "multi_threshold",
    "nearest_center",
    "open_stream",
    "quality",
    "read_artifact",
    "read_ground_truth",
    "reconstruction_stats",
    "reservoir_sample",
    "rs_reduction",
    "score",
    "select_top_k",
    "sofa_pass",
    "sofa_postprocess",
    "static_sofa",
    "static_sofa_sweep",
    "theory_alpha",
    "theory_theta",
    "threshold_clusters",
    "threshold_groups",
    "write_artifact",
    "write_ground_truth",
    "write_planted",
]
