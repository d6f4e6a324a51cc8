"""Weighted risk networks from tabular risk registers.

Build similarity matrices from binary characteristic tags, sample
probabilistic graph ensembles, detect and validate consensus modules,
score systemic impact with Monte Carlo cascades, and derive firm-level
products: horizon-scanning coverage, liability networks and
emerging-risk reports.
"""

from .analytics import (
    EmergingRisk,
    HorizonTable,
    LiabilityNetwork,
    MeasureOutcome,
    RobustnessReport,
    coverage_gaps,
    emerging_risk_report,
    horizon_table,
    liability_network,
    robustness_suite,
)
from .cascade import (
    CascadeConfig,
    CascadeSummary,
    MismatchCounts,
    classify,
    mismatch_table,
    run_cascade,
    sample_cascade_sizes,
    single_risk_impact,
    systemic_impact,
)
from .community import (
    Partition,
    ValidationReport,
    align_labels,
    consensus_partition,
    detect_modules,
    internal_link_counts,
    modularity,
    nmi,
    random_modular_baseline,
    singleton_partition,
    validate,
)
from .network import (
    GraphEnsemble,
    GraphStats,
    WeightedGraph,
    graph_stats,
    sample_ensemble,
    sample_graph,
)
from .pipeline import PipelineResult, RunConfig, StageError, analyze, run_measure_pipeline
from .register import (
    IMPACT_LEVELS,
    RegisterError,
    RiskRecord,
    RiskRegister,
    SyntheticSpec,
    impact_counts,
    load_register,
    save_register,
    synthesize_register,
)
from .similarity import (
    MatchCounts,
    Measure,
    SimilarityMatrix,
    match_counts,
    sensitivity_curve,
    similarity,
    similarity_from_counts,
    similarity_matrix,
)

__version__ = "0.1.0"

__all__ = [
    "CascadeConfig",
    "CascadeSummary",
    "EmergingRisk",
    "GraphEnsemble",
    "GraphStats",
    "HorizonTable",
    "IMPACT_LEVELS",
    "LiabilityNetwork",
    "MatchCounts",
    "Measure",
    "MeasureOutcome",
    "MismatchCounts",
    "Partition",
    "PipelineResult",
    "RegisterError",
    "RiskRecord",
    "RiskRegister",
    "RobustnessReport",
    "RunConfig",
    "SimilarityMatrix",
    "StageError",
    "SyntheticSpec",
    "ValidationReport",
    "WeightedGraph",
    "align_labels",
    "analyze",
    "classify",
    "consensus_partition",
    "coverage_gaps",
    "detect_modules",
    "emerging_risk_report",
    "graph_stats",
    "horizon_table",
    "impact_counts",
    "internal_link_counts",
    "liability_network",
    "load_register",
    "match_counts",
    "mismatch_table",
    "modularity",
    "nmi",
    "random_modular_baseline",
    "robustness_suite",
    "run_cascade",
    "run_measure_pipeline",
    "sample_cascade_sizes",
    "sample_ensemble",
    "sample_graph",
    "save_register",
    "sensitivity_curve",
    "similarity",
    "similarity_from_counts",
    "similarity_matrix",
    "single_risk_impact",
    "singleton_partition",
    "synthesize_register",
    "systemic_impact",
    "validate",
]
