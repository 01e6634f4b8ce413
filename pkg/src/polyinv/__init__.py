"""Rotation-invariant features of multivariate polynomials."""

__version__ = "0.1.0"

from .catalog import (
    CatalogConfig,
    FeatureVector,
    base_invariants,
    distance,
    feature_vector,
    invariant_count_bound,
    mixed_invariants,
    reconstruct_degree2,
    relative_invariants,
    spherical_count_bound,
)
from .contraction import (
    CanonicalForm,
    ContractionGraph,
    canonicalize,
    enumerate_graphs,
    evaluate_graph,
    parse_graph,
    trace_power,
)
from .fitting import FitConfig, PointCloud, fit, fit_spherical, normalize
from .tensor_poly import (
    HomogeneousPart,
    OrthogonalMatrix,
    Polynomial,
    apply_rotation,
    enumerate_exponents,
    evaluate,
    frobenius_dot,
    multinomial_weight,
    quadratic_matrix,
    random_orthogonal,
    vectorize,
)

__all__ = [
    "FitConfig",
    "PointCloud",
    "fit",
    "fit_spherical",
    "normalize",
    "CatalogConfig",
    "FeatureVector",
    "base_invariants",
    "distance",
    "feature_vector",
    "invariant_count_bound",
    "mixed_invariants",
    "reconstruct_degree2",
    "relative_invariants",
    "spherical_count_bound",
    "CanonicalForm",
    "ContractionGraph",
    "canonicalize",
    "enumerate_graphs",
    "evaluate_graph",
    "parse_graph",
    "trace_power",
    "HomogeneousPart",
    "OrthogonalMatrix",
    "Polynomial",
    "apply_rotation",
    "enumerate_exponents",
    "evaluate",
    "frobenius_dot",
    "multinomial_weight",
    "quadratic_matrix",
    "random_orthogonal",
    "vectorize",
]
