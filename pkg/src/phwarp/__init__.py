"""Persistence diagrams compared by bottleneck distance or by warped symmetric functions."""

from .bottleneck import bottleneck_distance, brute_force_bottleneck, candidate_thresholds, point_cost
from .diagram import (
    Cornerpoint,
    PersistenceDiagram,
    finitize_cornerlines,
    normalize_filtration,
    read_diagram,
    write_diagram,
)
from .estimators import (
    DiagramNeighborsClassifier,
    PersistenceDiagramTransformer,
    SymmetricFunctionVectorizer,
)
from .exceptions import PhwarpError
from .persistence import (
    FilteredGraph,
    downsample_blocks,
    grid_to_graph,
    multiplicity_oracle,
    persistent_betti_0,
    zero_dim_persistence,
)
from .retrieval import (
    DistanceMatrix,
    EvaluationReport,
    combine_matrices,
    compute_distance_matrix,
    evaluate,
    leave_one_out_nn,
    optimize_weights,
)
from .symfun import SymVector, elementary_symmetric, renormalize, vector_distance, vectorize
from .warp import WarpedMultiset, warp_diagram, warp_R, warp_T

__version__ = "0.1.0"
