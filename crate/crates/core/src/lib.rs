//! Decision-level late fusion of multi-classifier probability estimates.
//!
//! Ten fusion operators — sum, softmax-weighted sum, median, max, product,
//! softmax-weighted product, majority vote, Borda count, weighted Borda count
//! and reciprocal rank fusion — combine the per-class probability vectors of
//! several classifiers into one decision. Around them sit a balanced and
//! unbalanced top-k evaluation harness with rare/common class grouping, a
//! line-delimited prediction-dump ingestion layer, a seeded synthetic dump
//! generator, and deterministic CSV/markdown report emission.
//!
//! The crate is built for reproducibility: every fusion operator is a pure
//! function that is bit-identical under permutation of its classifier inputs,
//! evaluation tallies are integers so parallel accumulation cannot perturb
//! results, and reports render byte-identically from identical inputs.

pub mod experiment;
pub mod fusion;
pub mod ingest;
pub mod metrics;
pub mod report;
pub mod synth;

pub use experiment::{
    default_modality_counts, default_topk, fnv1a64, run_plan, select_modalities, EvaluationReport,
    ExperimentPlan, GridCell, InputDigest, MetricKind, PlanError,
};
pub use fusion::{
    borda_count, compute_ranks, decide, final_decision, fuse, fuse_max, fuse_median, fuse_product,
    fuse_sum, fuse_weighted_product, fuse_weighted_sum, majority_vote, reciprocal_rank_fusion,
    weighted_borda_count, weighted_borda_count_with, FusedScores, FusionConfig, FusionError,
    FusionMethod, PredictionSet, RankMatrix, TieBreak, WeightVector,
};
pub use ingest::{
    load_catalog, load_predictions, parse_catalog, parse_predictions, validate_sample, CatalogFile,
    FieldPolicy, IngestError, LabeledSample, LoadOptions, MissingPolicy, ModalityRegistry,
    PredictionDump, PredictionRecord, DEFAULT_TOLERANCE,
};
pub use metrics::{
    assign_groups, balanced_accuracy, rank_of, topk_hit, unbalanced_accuracy, ClassCatalog,
    ClassGroup, EvaluationOutcome, GroupSelector, MetricsError,
};
pub use report::{
    per_class_report, render_comparison_csv, render_comparison_markdown, render_csv,
    render_markdown, render_per_class_csv, write_report_files, ComparisonRow, ReportError,
    ReportFormat,
};
pub use synth::{generate, GeneratedDump, ModalityProfile, SynthError, SynthSpec};
