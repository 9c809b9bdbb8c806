"""Spectral detection of communities and anti-communities in weighted graphs."""
from ._backend import BACKEND
from .detector import (
    ANTI_COMMUNITY,
    BACKGROUND,
    COMMUNITY,
    ClusterInfo,
    DetectionConfig,
    DetectionReport,
    adjusted_rand_index,
    classify_clusters,
    cluster_rows,
    detect,
    kmeans,
    select_k,
    spectrum_ratios,
)
from .errors import AntimodError, DataError, NumericalError
from .geometry import (
    BoundReport,
    OrthonormalFrame,
    ProjectionResult,
    eigenspace_bounds,
    eigenspace_bounds_frame,
    eigenvalue_bounds,
    eigenvalue_bounds_frame,
    frobenius_inner,
    procrustes,
    project_H,
    project_K,
    sigma_score,
)
from .graph import Graph, NodeSet, Partition, build_graph, characteristic_vector, volume
from .io import parse_edge_list, parse_matrix_market, read_graph, write_edge_list
from .modularity import (
    MeasurePolicy,
    ModularityOperator,
    apply_modularity,
    measure_vector,
    modularity,
    normalized_modularity,
    rayleigh_quotient,
)
from .sbm import (
    SbmAverages,
    SbmSpec,
    average_adjacency,
    average_modularity,
    inflation,
    inflation_vec,
    lift_eigenvector,
    reduced_modularity,
    sample,
)
from .spectral import (
    SpectralSummary,
    dominant_eigenpairs,
    full_symmetric_eig,
    low_rank_truncation,
    singular_values,
)

__version__ = "0.1.0"
