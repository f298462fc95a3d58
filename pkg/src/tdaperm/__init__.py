"""Persistence diagrams, vector summaries, diagram distances, and
two-group permutation tests for topological data analysis."""

from .errors import ParseError, ResourceCapError, ValidationError
from .diagram import (
    NoiseSpec,
    PersistenceDiagram,
    distance_to_diagonal,
    load_diagrams,
    perturb_diagram,
    save_diagrams,
)
from .filtration import (
    DEFAULT_SIMPLEX_CAP,
    Filtration,
    Graph,
    build_lower_star,
    build_rips,
    enclosing_radius,
    load_graph,
    load_points,
    save_graph,
    save_points,
)
from .persistence import compute_persistence
from .summaries import (
    ImageConfig,
    ScaleGrid,
    StabilityGap,
    SummaryVector,
    WeightFunction,
    betti_eval,
    betti_samples,
    landscape_vector,
    load_vector,
    persistence_image,
    persistence_weight,
    save_vector,
    stability_gap,
    unit_weight,
    vab,
)
from .distances import (
    DISTANCE_METHODS,
    DistanceMatrix,
    WassersteinParams,
    distance_matrix,
    load_distance_matrix,
    lp_vector_distance,
    save_distance_matrix,
    sliced_wasserstein,
    wasserstein,
    wasserstein_matching,
)
from .permutation import (
    GroupLabels,
    TestResult,
    exact_permutation_pvalue,
    joint_loss,
    permutation_pvalue,
    save_test_result,
    standard_shuffles,
    strong_mixing_shuffles,
)
from .generators import (
    PdProcessSpec,
    RdpgSpec,
    ShapeSpec,
    generate_pd_process,
    generate_rdpg,
    sample_shape,
)
from .experiments import (
    ALPHA,
    EXPERIMENTS,
    ExperimentConfig,
    PowerReport,
    PowerRow,
    run_benchmark,
    run_power_experiment,
)

__version__ = "0.1.0"

__all__ = [
    "ParseError",
    "ResourceCapError",
    "ValidationError",
    "NoiseSpec",
    "PersistenceDiagram",
    "distance_to_diagonal",
    "load_diagrams",
    "perturb_diagram",
    "save_diagrams",
    "DEFAULT_SIMPLEX_CAP",
    "Filtration",
    "Graph",
    "build_lower_star",
    "build_rips",
    "enclosing_radius",
    "load_graph",
    "load_points",
    "save_graph",
    "save_points",
    "compute_persistence",
    "ImageConfig",
    "ScaleGrid",
    "StabilityGap",
    "SummaryVector",
    "WeightFunction",
    "betti_eval",
    "betti_samples",
    "landscape_vector",
    "load_vector",
    "persistence_image",
    "persistence_weight",
    "save_vector",
    "stability_gap",
    "unit_weight",
    "vab",
    "DISTANCE_METHODS",
    "DistanceMatrix",
    "WassersteinParams",
    "distance_matrix",
    "load_distance_matrix",
    "lp_vector_distance",
    "save_distance_matrix",
    "sliced_wasserstein",
    "wasserstein",
    "wasserstein_matching",
    "GroupLabels",
    "TestResult",
    "exact_permutation_pvalue",
    "joint_loss",
    "permutation_pvalue",
    "save_test_result",
    "standard_shuffles",
    "strong_mixing_shuffles",
    "PdProcessSpec",
    "RdpgSpec",
    "ShapeSpec",
    "generate_pd_process",
    "generate_rdpg",
    "sample_shape",
    "ALPHA",
    "EXPERIMENTS",
    "ExperimentConfig",
    "PowerReport",
    "PowerRow",
    "run_benchmark",
    "run_power_experiment",
    "__version__",
]
