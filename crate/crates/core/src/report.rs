//! Report emission: deterministic CSV and markdown renderings of an
//! evaluation grid, plus the per-class unimodal-vs-multimodal comparison.
//!
//! Output is a pure function of the report contents; no timestamps or
//! absolute paths enter the bytes. Accuracies are printed as percentages
//! with two decimals alongside a full-precision column.

use crate::experiment::{grid_configuration, unimodal_configuration, EvaluationReport, MetricKind};
use crate::fusion::FusionMethod;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("report has no `{0}` configuration; run a plan that includes it")]
    MissingConfiguration(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Markdown,
}

impl ReportFormat {
    pub fn id(&self) -> &'static str {
        match self {
            ReportFormat::Csv => "csv",
            ReportFormat::Markdown => "markdown",
        }
    }
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            other => Err(format!("unknown report format `{other}` (csv or markdown)")),
        }
    }
}

fn pct(accuracy: f64) -> String {
    format!("{:.2}", accuracy * 100.0)
}

fn provenance_lines(report: &EvaluationReport) -> String {
    let plan = &report.plan;
    let mut out = String::new();
    let _ = writeln!(out, "# late-fusion evaluation report");
    let _ = writeln!(out, "# seed: {}", plan.subset_seed);
    let _ = writeln!(
        out,
        "# config: borda_k={} rrf_m={} product_gamma={} tie_break={}",
        plan.config.borda_k,
        plan.config.rrf_m,
        plan.config.product_gamma,
        plan.config.tie_break.id()
    );
    for input in &plan.inputs {
        let _ = writeln!(out, "# input: {} fnv1a64={:016x}", input.name, input.fnv1a64);
    }
    let _ = writeln!(out, "# modality-order: {}", report.modality_order.join(","));
    for subset in &report.subsets {
        let _ = writeln!(
            out,
            "# subset: {} => {}",
            subset.count,
            subset.modalities.join(",")
        );
    }
    let _ = writeln!(
        out,
        "# methods: {}",
        plan.methods
            .iter()
            .map(|m| m.id())
            .collect::<Vec<_>>()
            .join(",")
    );
    let _ = writeln!(
        out,
        "# topk: {}",
        plan.topk
            .iter()
            .map(|k| k.to_string())
            .collect::<Vec<_>>()
            .join(",")
    );
    let _ = writeln!(
        out,
        "# groups: {}",
        plan.groups
            .iter()
            .map(|g| g.id())
            .collect::<Vec<_>>()
            .join(",")
    );
    let _ = writeln!(out, "# missing-policy: {}", plan.missing.id());
    let _ = writeln!(out, "# samples-evaluated: {}", report.evaluated_samples);
    let _ = writeln!(out, "# samples-excluded: {}", report.excluded.len());
    out
}

// Canonical cell order: method in plan order, subset size ascending, metric
// kind, then k and group in plan order.
fn ordered_cells<'a>(
    report: &'a EvaluationReport,
) -> impl Iterator<Item = &'a crate::experiment::GridCell> + 'a {
    let plan = &report.plan;
    plan.methods.iter().flat_map(move |&method| {
        report.subsets.iter().flat_map(move |subset| {
            MetricKind::ALL.into_iter().flat_map(move |metric| {
                plan.topk.iter().flat_map(move |&k| {
                    plan.groups.iter().filter_map(move |&group| {
                        report.cell(method, subset.count, metric, k, group)
                    })
                })
            })
        })
    })
}

/// The grid as CSV with `#`-prefixed provenance header lines.
pub fn render_csv(report: &EvaluationReport) -> String {
    let mut out = provenance_lines(report);
    out.push_str("method,modalities,metric,k,group,accuracy_pct,accuracy\n");
    for cell in ordered_cells(report) {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            cell.method.id(),
            cell.modality_count,
            cell.metric.id(),
            cell.k,
            cell.group.id(),
            pct(cell.accuracy),
            cell.accuracy
        );
    }
    out
}

/// The grid as markdown: one table per class group, methods as rows, one
/// column per (subset size, metric, k), percentages with two decimals.
pub fn render_markdown(report: &EvaluationReport) -> String {
    let plan = &report.plan;
    let mut out = String::from("# Late-fusion evaluation report\n\n");
    let _ = writeln!(out, "- seed: {}", plan.subset_seed);
    let _ = writeln!(
        out,
        "- config: borda_k={} rrf_m={} product_gamma={} tie_break={}",
        plan.config.borda_k,
        plan.config.rrf_m,
        plan.config.product_gamma,
        plan.config.tie_break.id()
    );
    for input in &plan.inputs {
        let _ = writeln!(out, "- input: {} fnv1a64={:016x}", input.name, input.fnv1a64);
    }
    let _ = writeln!(out, "- modality order: {}", report.modality_order.join(", "));
    let _ = writeln!(
        out,
        "- samples evaluated: {} (excluded: {})",
        report.evaluated_samples,
        report.excluded.len()
    );
    for &group in &plan.groups {
        let _ = writeln!(out, "\n## Group: {group}\n");
        out.push_str("| Method |");
        for subset in &report.subsets {
            for metric in MetricKind::ALL {
                for &k in &plan.topk {
                    let _ = write!(
                        out,
                        " #Mod={} {} top-{} |",
                        subset.count,
                        metric.id(),
                        k
                    );
                }
            }
        }
        out.push('\n');
        out.push_str("|---|");
        for _ in 0..report.subsets.len() * MetricKind::ALL.len() * plan.topk.len() {
            out.push_str("---|");
        }
        out.push('\n');
        for &method in &plan.methods {
            let _ = write!(out, "| {} |", method.label());
            for subset in &report.subsets {
                for metric in MetricKind::ALL {
                    for &k in &plan.topk {
                        match report.cell(method, subset.count, metric, k, group) {
                            Some(cell) => {
                                let _ = write!(out, " {} |", pct(cell.accuracy));
                            }
                            None => out.push_str(" - |"),
                        }
                    }
                }
            }
            out.push('\n');
        }
    }
    out
}

/// Per-class top-1 accuracies as CSV, covering every grid configuration and
/// every unimodal baseline. `None` when the report carries no per-class rows.
pub fn render_per_class_csv(report: &EvaluationReport) -> Option<String> {
    if report.per_class.is_empty() {
        return None;
    }
    let mut out = provenance_lines(report);
    out.push_str("configuration,class_index,class_name,samples,accuracy_pct,accuracy\n");
    for row in &report.per_class {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            row.configuration,
            row.class,
            report.class_names[row.class],
            row.samples,
            pct(row.accuracy),
            row.accuracy
        );
    }
    Some(out)
}

/// One row of the unimodal-vs-multimodal comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub class: usize,
    pub class_name: String,
    pub unimodal: f64,
    pub multimodal: f64,
    pub delta: f64,
}

/// Per-class comparison of the named unimodal view against product fusion
/// over the largest evaluated modality subset. Rows are sorted by ascending
/// unimodal accuracy (ties by class index), mirroring how hard each class is
/// for the single best view.
pub fn per_class_report(
    report: &EvaluationReport,
    best_unimodal: &str,
) -> Result<Vec<ComparisonRow>, ReportError> {
    let unimodal_cfg = unimodal_configuration(best_unimodal);
    if !report
        .per_class
        .iter()
        .any(|r| r.configuration == unimodal_cfg)
    {
        return Err(ReportError::MissingConfiguration(unimodal_cfg));
    }
    let max_count = report
        .subsets
        .iter()
        .map(|s| s.count)
        .max()
        .unwrap_or_default();
    let multimodal_cfg = grid_configuration(FusionMethod::Product, max_count);
    if !report
        .per_class
        .iter()
        .any(|r| r.configuration == multimodal_cfg)
    {
        return Err(ReportError::MissingConfiguration(multimodal_cfg));
    }

    let mut rows = Vec::new();
    for class in 0..report.class_names.len() {
        let (Some(unimodal), Some(multimodal)) = (
            report.per_class_accuracy(&unimodal_cfg, class),
            report.per_class_accuracy(&multimodal_cfg, class),
        ) else {
            continue;
        };
        rows.push(ComparisonRow {
            class,
            class_name: report.class_names[class].clone(),
            unimodal,
            multimodal,
            delta: multimodal - unimodal,
        });
    }
    rows.sort_by(|a, b| {
        a.unimodal
            .total_cmp(&b.unimodal)
            .then(a.class.cmp(&b.class))
    });
    Ok(rows)
}

pub fn render_comparison_csv(rows: &[ComparisonRow], unimodal_name: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# per-class comparison: unimodal `{unimodal_name}` vs multimodal product fusion");
    out.push_str("class_index,class_name,unimodal_pct,multimodal_pct,delta_pct\n");
    for row in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{:.2}",
            row.class,
            row.class_name,
            pct(row.unimodal),
            pct(row.multimodal),
            row.delta * 100.0,
        );
    }
    out
}

pub fn render_comparison_markdown(rows: &[ComparisonRow], unimodal_name: &str) -> String {
    let mut out = format!(
        "# Per-class accuracy: `{unimodal_name}` vs multimodal product fusion\n\n"
    );
    out.push_str("| Class | Unimodal % | Multimodal % | Delta % |\n");
    out.push_str("|---|---|---|---|\n");
    for row in rows {
        let _ = writeln!(
            out,
            "| {} | {} | {} | {:.2} |",
            row.class_name,
            pct(row.unimodal),
            pct(row.multimodal),
            row.delta * 100.0,
        );
    }
    out
}

/// Writes the requested renderings under `dir` and returns the paths written.
pub fn write_report_files(
    dir: &Path,
    report: &EvaluationReport,
    formats: &[ReportFormat],
    include_per_class: bool,
) -> Result<Vec<PathBuf>, ReportError> {
    let write = |path: PathBuf, contents: &str| -> Result<PathBuf, ReportError> {
        std::fs::write(&path, contents).map_err(|source| ReportError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Ok(path)
    };
    let mut written = Vec::new();
    for format in formats {
        match format {
            ReportFormat::Csv => {
                written.push(write(dir.join("report.csv"), &render_csv(report))?);
            }
            ReportFormat::Markdown => {
                written.push(write(dir.join("report.md"), &render_markdown(report))?);
            }
        }
    }
    if include_per_class {
        if let Some(per_class) = render_per_class_csv(report) {
            written.push(write(dir.join("per_class.csv"), &per_class)?);
        }
    }
    Ok(written)
}
