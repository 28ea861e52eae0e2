"""Colorized density plots for large line collections."""

from .model import Affine, GridSpec, LineKind, LineSet, Polyline, fit_grid
from .features import (
    BinSample,
    DensityGrid,
    FeatureGrid,
    density_of,
    extract_feature_sets,
    point_segment_distance,
    sample_bins,
)
from .similarity import distance_matrix, set_similarity
from .clustering import (
    Clustering,
    Dendrogram,
    build_dendrogram,
    cut_to_k,
    split_cluster,
)
from .assignment import (
    NONE_LABEL,
    ClusterMap,
    LineAssignment,
    MeanVector,
    assign_bins,
    assign_lines,
    mean_vectors,
    write_line_assignment_csv,
)
from .hue import (
    HueAssignment,
    HueProblem,
    SectorSet,
    TEMPLATE_NAMES,
    fit_template_rotation,
    optimize_hues,
    target_arc_distances,
)
from .render import (
    Image,
    Ramp,
    density_ramp,
    legend_dict,
    render_cluster_lines,
    render_density,
    save_png,
)
from .config import PipelineConfig, load_config, save_config
from .pipeline import (
    InteractiveParams,
    PipelineState,
    Preprocessed,
    SingletonClusterError,
    StaleSampleError,
    UnknownClusterError,
    derive,
    preprocess,
    repreprocess,
    run_pipeline,
)
from .estimator import LineDensityClusterer, NotFittedError
from .evaluate import accuracy_report
from .io import (
    ParseError,
    parse_timeseries,
    parse_trajectories,
    read_labels_csv,
    write_labels_csv,
    write_trajectory_csv,
)
from .synthetic import gen_continuation, gen_disconnected, gen_illusory

__all__ = [
    "Affine",
    "BinSample",
    "ClusterMap",
    "Clustering",
    "Dendrogram",
    "DensityGrid",
    "FeatureGrid",
    "GridSpec",
    "HueAssignment",
    "HueProblem",
    "Image",
    "InteractiveParams",
    "LineAssignment",
    "LineDensityClusterer",
    "LineKind",
    "LineSet",
    "MeanVector",
    "NONE_LABEL",
    "NotFittedError",
    "ParseError",
    "PipelineConfig",
    "PipelineState",
    "Polyline",
    "Preprocessed",
    "Ramp",
    "SectorSet",
    "SingletonClusterError",
    "StaleSampleError",
    "TEMPLATE_NAMES",
    "UnknownClusterError",
    "accuracy_report",
    "assign_bins",
    "assign_lines",
    "build_dendrogram",
    "cut_to_k",
    "density_of",
    "density_ramp",
    "derive",
    "distance_matrix",
    "extract_feature_sets",
    "fit_grid",
    "fit_template_rotation",
    "gen_continuation",
    "gen_disconnected",
    "gen_illusory",
    "legend_dict",
    "load_config",
    "mean_vectors",
    "optimize_hues",
    "parse_timeseries",
    "parse_trajectories",
    "point_segment_distance",
    "preprocess",
    "read_labels_csv",
    "render_cluster_lines",
    "render_density",
    "repreprocess",
    "run_pipeline",
    "save_config",
    "save_png",
    "set_similarity",
    "split_cluster",
    "target_arc_distances",
    "write_labels_csv",
    "write_line_assignment_csv",
    "write_trajectory_csv",
]

__version__ = "0.1.0"
