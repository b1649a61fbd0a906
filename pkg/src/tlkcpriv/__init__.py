"""Privacy-preserving publishing of process-mining event logs.

The package models event logs, simulates linkage attacks from bounded
background knowledge, audits (T,L,K,C) privacy guarantees, anonymizes logs
by greedy global suppression, and quantifies the damage with data-utility
and result-utility metrics.
"""

from .analysis import (
    AuditReport,
    MftSet,
    MvtSet,
    PrefixTree,
    PrivacyParams,
    Verdict,
    audit_tlkc,
    enumerate_mft,
    enumerate_mvt,
    focal_values,
    is_violating,
    n_score,
    score,
)
from .anonymize import (
    AnonymizationResult,
    Baseline1,
    Baseline2,
    IterationRecord,
    ParameterError,
    SuppressionSet,
    TlkcAnonymizer,
    TlkcExtAnonymizer,
    suppress_global,
)
from .background import (
    BkAttr,
    BkSpec,
    BkType,
    Candidate,
    CandidateSyntaxError,
    confidence,
    enumerate_candidates,
    format_candidate,
    match,
    parse_candidate,
)
from .io import (
    CsvColumnMap,
    RunConfig,
    load_log,
    read_config,
    read_csv,
    read_xes,
    save_log,
    write_config,
    write_csv,
    write_xes,
)
from .log import (
    Event,
    EventLog,
    LogError,
    MissingResourceError,
    Perspective,
    ProcessInstance,
    ProjectedEvent,
    TimestampAccuracy,
    directly_follows,
    discretize_sensitive,
    project,
    relative_timestamps,
    relativize_log,
    truncate_to_accuracy,
    variant_frequency,
    variants,
)
from .metrics import (
    GraphComparison,
    UtilityReport,
    dfg_compare,
    emd_data_utility,
    handover_compare,
    normalized_levenshtein,
)

__version__ = "0.1.0"

__all__ = [
    "AnonymizationResult",
    "AuditReport",
    "Baseline1",
    "Baseline2",
    "BkAttr",
    "BkSpec",
    "BkType",
    "Candidate",
    "CandidateSyntaxError",
    "CsvColumnMap",
    "Event",
    "EventLog",
    "GraphComparison",
    "IterationRecord",
    "LogError",
    "MftSet",
    "MissingResourceError",
    "MvtSet",
    "ParameterError",
    "Perspective",
    "PrefixTree",
    "PrivacyParams",
    "ProcessInstance",
    "ProjectedEvent",
    "RunConfig",
    "SuppressionSet",
    "TimestampAccuracy",
    "TlkcAnonymizer",
    "TlkcExtAnonymizer",
    "UtilityReport",
    "Verdict",
    "audit_tlkc",
    "confidence",
    "dfg_compare",
    "directly_follows",
    "discretize_sensitive",
    "emd_data_utility",
    "enumerate_candidates",
    "enumerate_mft",
    "enumerate_mvt",
    "focal_values",
    "format_candidate",
    "handover_compare",
    "is_violating",
    "load_log",
    "match",
    "n_score",
    "normalized_levenshtein",
    "parse_candidate",
    "project",
    "read_config",
    "read_csv",
    "read_xes",
    "relative_timestamps",
    "relativize_log",
    "save_log",
    "score",
    "suppress_global",
    "truncate_to_accuracy",
    "variant_frequency",
    "variants",
    "write_config",
    "write_csv",
    "write_xes",
]
