"""Random-walk sampling and estimation on social graphs with private nodes."""

from .access import (
    AccessModel,
    NeighborReport,
    PrivateNodeError,
    QueryLedger,
    is_public_via_model,
    probe_all_neighbors,
    query_node,
)
from .estimators import (
    EstimateReport,
    NoCollisionError,
    SizeEstimates,
    avg_degree_estimates,
    build_report,
    default_gap_threshold,
    estimate_privacy_rate,
    size_estimates,
)
from .experiment import (
    ESTIMATOR_NAMES,
    ExperimentConfig,
    NrmseRow,
    load_config,
    query_census,
    run_experiment,
)
from .graph import (
    GraphError,
    LabelOrigin,
    LabeledGraph,
    PublicClusterView,
    assign_labels_bernoulli,
    build_graph,
    largest_public_cluster,
)
from .ingest import (
    IngestError,
    load_edge_list,
    load_labels,
    load_sample_records,
    save_labels,
)
from .theory import (
    THEORY_COLUMNS,
    ConvergenceValues,
    ExpectedErrors,
    convergence_values,
    expected_error_inequalities,
    public_count_moments,
    expected_errors,
    expected_query_ratios,
    theory_report_rows,
)
from .walk import (
    PubdegMode,
    SelectionCounters,
    StuckWalkError,
    WalkRecord,
    run_walk,
    stationary_distribution,
)

__version__ = "0.1.0"
