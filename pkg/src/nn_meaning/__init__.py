"""Quantify how meaningful nearest-neighbor search is on a vector dataset.

Core measures: relative contrast (expected distance over expected nearest
distance, ratio of expectations over queries) and local intrinsic
dimensionality (neighbor-distance MLE), computed from exact scans.
"""

from .dataset import (
    DatasetHeader,
    PayloadStore,
    QuerySet,
    VectorDataset,
    external_queries,
    load_bvecs,
    load_dataset,
    load_fvecs,
    load_native,
    load_payloads,
    retrieve_payloads,
    sample_queries,
    save_native,
    save_payloads,
)
from .distances import DistanceKind, distance, parse_kind, scan_distances
from .errors import (
    DatasetFormatError,
    DegenerateDataError,
    UndefinedRcError,
    ZeroNormError,
)
from .experiments import (
    ProfileResult,
    ReportRow,
    SweepConfig,
    emit_csv,
    load_report_csv,
    profile_dataset,
    run_dim_sweep,
    run_homogeneity,
    run_metric_comparison,
    run_profile,
)
from .knn import KnnResult, QueryStats, knn_search, query_scan_stats, resolve_workers
from .metrics import (
    HomogeneityResult,
    LidReport,
    RcReport,
    default_lid_k,
    kendall_tau_b,
    lid_closed_form,
    lid_from_stats,
    lid_mle,
    lid_profile,
    rc_lid_homogeneity,
    relative_contrast,
)
from .pca import PcaModel, pca_fit, pca_project
from .svg import emit_svg
from .synth import SynthSpec, gaussian_dataset, generate, subspace_gaussian, uniform_ball

__version__ = "0.1.0"
