//! Parsing and validation of prediction dumps and class catalogs.
//!
//! A prediction dump is UTF-8, line-delimited JSON; each line carries exactly
//! the fields `sample_id` (string), `modality` (string), `label` (integer)
//! and `scores` (array of `d` numbers). A catalog is comma-separated with a
//! `class_index,class_name,train_count[,group]` header.

use crate::fusion::{FusionError, PredictionSet};
use crate::metrics::ClassGroup;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;
use thiserror::Error;

/// Default tolerance on a score vector's distance from unit sum.
pub const DEFAULT_TOLERANCE: f64 = 1e-4;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: malformed record: {msg}")]
    Malformed {
        path: String,
        line: usize,
        msg: String,
    },
    #[error("{path}:{line}: unknown field `{field}`")]
    UnknownField {
        path: String,
        line: usize,
        field: String,
    },
    #[error("{path}:{line}: scores has {got} entries, catalog defines {expected} classes")]
    DimensionMismatch {
        path: String,
        line: usize,
        expected: usize,
        got: usize,
    },
    #[error("{path}:{line}: label {label} out of range for {d} classes")]
    LabelOutOfRange {
        path: String,
        line: usize,
        label: i64,
        d: usize,
    },
    #[error("{path}:{line}: score {value} must be finite and >= 0")]
    InvalidScore {
        path: String,
        line: usize,
        value: f64,
    },
    #[error(
        "{path}:{line}: scores sum to {sum}, outside tolerance {tolerance} of 1 \
         (enable renormalization to rescale)"
    )]
    NotNormalized {
        path: String,
        line: usize,
        sum: f64,
        tolerance: f64,
    },
    #[error("{path}:{line}: scores sum to {sum}; cannot renormalize")]
    ZeroMass {
        path: String,
        line: usize,
        sum: f64,
    },
    #[error("{path}:{line}: duplicate record for sample `{sample_id}`, modality `{modality}`")]
    DuplicateRecord {
        path: String,
        line: usize,
        sample_id: String,
        modality: String,
    },
    #[error(
        "{path}:{line}: sample `{sample_id}` labeled {label} here but {previous} earlier"
    )]
    LabelConflict {
        path: String,
        line: usize,
        sample_id: String,
        label: usize,
        previous: usize,
    },
    #[error("{path}: dump contains no records")]
    EmptyDump { path: String },
    #[error("{path}:{line}: {msg}")]
    Catalog {
        path: String,
        line: usize,
        msg: String,
    },
    #[error("sample `{sample_id}` carries no modalities")]
    EmptySample { sample_id: String },
    #[error(transparent)]
    Fusion(#[from] FusionError),
}

/// How parsing treats records that deviate from the contract.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FieldPolicy {
    /// Unknown fields are errors.
    #[default]
    Strict,
    /// Unknown fields produce warnings and are ignored.
    Lenient,
}

#[derive(Debug, Clone, Copy)]
pub struct LoadOptions {
    /// Rescale every score vector to unit sum instead of enforcing the
    /// tolerance.
    pub renormalize: bool,
    /// Unknown-field handling.
    pub fields: FieldPolicy,
    /// Allowed absolute deviation of a score vector's sum from 1.
    pub tolerance: f64,
}

impl Default for LoadOptions {
    fn default() -> Self {
        Self {
            renormalize: false,
            fields: FieldPolicy::Strict,
            tolerance: DEFAULT_TOLERANCE,
        }
    }
}

/// One line of a prediction dump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub sample_id: String,
    pub modality: String,
    pub label: i64,
    pub scores: Vec<f64>,
}

const RECORD_FIELDS: [&str; 4] = ["sample_id", "modality", "label", "scores"];

/// One evaluation sample: its ground truth and one probability vector per
/// modality that observed it.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSample {
    pub sample_id: String,
    pub label: usize,
    scores: HashMap<String, Vec<f64>>,
}

impl LabeledSample {
    pub fn scores_for(&self, modality: &str) -> Option<&[f64]> {
        self.scores.get(modality).map(Vec::as_slice)
    }

    pub fn has_modality(&self, modality: &str) -> bool {
        self.scores.contains_key(modality)
    }

    pub fn modality_count(&self) -> usize {
        self.scores.len()
    }
}

/// The ordered roster of modalities present in a dump, with record counts.
/// Order is first appearance in the file.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalityRegistry {
    names: Vec<String>,
    counts: Vec<usize>,
}

impl ModalityRegistry {
    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn record_count(&self, modality: &str) -> Option<usize> {
        self.names
            .iter()
            .position(|n| n == modality)
            .map(|i| self.counts[i])
    }
}

/// A parsed and validated prediction dump.
#[derive(Debug, Clone)]
pub struct PredictionDump {
    /// Samples in order of first appearance.
    pub samples: Vec<LabeledSample>,
    pub registry: ModalityRegistry,
    /// Lenient-mode notices (unknown fields and the like).
    pub warnings: Vec<String>,
}

impl PredictionDump {
    /// Serializes the dump back to its line-delimited form: samples in order,
    /// each sample's modalities in registry order. Reloading the result gives
    /// structurally identical samples.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for sample in &self.samples {
            for modality in self.registry.names() {
                if let Some(scores) = sample.scores_for(modality) {
                    let record = PredictionRecord {
                        sample_id: sample.sample_id.clone(),
                        modality: modality.clone(),
                        label: sample.label as i64,
                        scores: scores.to_vec(),
                    };
                    let line =
                        serde_json::to_string(&record).expect("record serialization is infallible");
                    out.push_str(&line);
                    out.push('\n');
                }
            }
        }
        out
    }
}

/// Enforces the unit-sum tolerance or rescales, per the options. Entries must
/// already be finite and non-negative.
fn normalize_scores(
    scores: &mut [f64],
    tolerance: f64,
    renormalize: bool,
) -> Result<(), NormalizeIssue> {
    let sum: f64 = scores.iter().sum();
    if renormalize {
        if sum <= 0.0 {
            return Err(NormalizeIssue::ZeroMass { sum });
        }
        for v in scores.iter_mut() {
            *v /= sum;
        }
        return Ok(());
    }
    if (sum - 1.0).abs() > tolerance {
        return Err(NormalizeIssue::OutOfTolerance { sum });
    }
    Ok(())
}

enum NormalizeIssue {
    OutOfTolerance { sum: f64 },
    ZeroMass { sum: f64 },
}

/// Parses a prediction dump from a file.
pub fn load_predictions(
    path: &Path,
    class_count: usize,
    opts: &LoadOptions,
) -> Result<PredictionDump, IngestError> {
    let text = std::fs::read_to_string(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_predictions(&text, &path.display().to_string(), class_count, opts)
}

/// Parses a prediction dump from text; `path` only labels error messages.
pub fn parse_predictions(
    text: &str,
    path: &str,
    class_count: usize,
    opts: &LoadOptions,
) -> Result<PredictionDump, IngestError> {
    let mut samples: Vec<LabeledSample> = Vec::new();
    let mut index_of_sample: HashMap<String, usize> = HashMap::new();
    let mut registry_names: Vec<String> = Vec::new();
    let mut registry_counts: Vec<usize> = Vec::new();
    let mut warnings = Vec::new();

    for (line_idx, raw_line) in text.lines().enumerate() {
        let line = line_idx + 1;
        if raw_line.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value =
            serde_json::from_str(raw_line).map_err(|e| IngestError::Malformed {
                path: path.into(),
                line,
                msg: e.to_string(),
            })?;
        let obj = value.as_object().ok_or_else(|| IngestError::Malformed {
            path: path.into(),
            line,
            msg: "record is not a JSON object".into(),
        })?;
        for key in obj.keys() {
            if !RECORD_FIELDS.contains(&key.as_str()) {
                match opts.fields {
                    FieldPolicy::Strict => {
                        return Err(IngestError::UnknownField {
                            path: path.into(),
                            line,
                            field: key.clone(),
                        })
                    }
                    FieldPolicy::Lenient => {
                        warnings.push(format!("{path}:{line}: ignoring unknown field `{key}`"))
                    }
                }
            }
        }
        let record: PredictionRecord =
            serde_json::from_value(serde_json::Value::Object(
                obj.iter()
                    .filter(|(k, _)| RECORD_FIELDS.contains(&k.as_str()))
                    .map(|(k, v)| (k.clone(), v.clone()))
                    .collect(),
            ))
            .map_err(|e| IngestError::Malformed {
                path: path.into(),
                line,
                msg: e.to_string(),
            })?;

        if record.scores.len() != class_count {
            return Err(IngestError::DimensionMismatch {
                path: path.into(),
                line,
                expected: class_count,
                got: record.scores.len(),
            });
        }
        if record.label < 0 || record.label as usize >= class_count {
            return Err(IngestError::LabelOutOfRange {
                path: path.into(),
                line,
                label: record.label,
                d: class_count,
            });
        }
        for &v in &record.scores {
            if !v.is_finite() || v < 0.0 {
                return Err(IngestError::InvalidScore {
                    path: path.into(),
                    line,
                    value: v,
                });
            }
        }
        let mut scores = record.scores;
        normalize_scores(&mut scores, opts.tolerance, opts.renormalize).map_err(|issue| {
            match issue {
                NormalizeIssue::OutOfTolerance { sum } => IngestError::NotNormalized {
                    path: path.into(),
                    line,
                    sum,
                    tolerance: opts.tolerance,
                },
                NormalizeIssue::ZeroMass { sum } => IngestError::ZeroMass {
                    path: path.into(),
                    line,
                    sum,
                },
            }
        })?;

        let label = record.label as usize;
        match registry_names.iter().position(|n| n == &record.modality) {
            Some(i) => registry_counts[i] += 1,
            None => {
                registry_names.push(record.modality.clone());
                registry_counts.push(1);
            }
        }

        match index_of_sample.get(&record.sample_id) {
            Some(&i) => {
                let sample = &mut samples[i];
                if sample.label != label {
                    return Err(IngestError::LabelConflict {
                        path: path.into(),
                        line,
                        sample_id: record.sample_id,
                        label,
                        previous: sample.label,
                    });
                }
                if sample.scores.contains_key(&record.modality) {
                    return Err(IngestError::DuplicateRecord {
                        path: path.into(),
                        line,
                        sample_id: record.sample_id,
                        modality: record.modality,
                    });
                }
                sample.scores.insert(record.modality, scores);
            }
            None => {
                index_of_sample.insert(record.sample_id.clone(), samples.len());
                let mut map = HashMap::new();
                map.insert(record.modality, scores);
                samples.push(LabeledSample {
                    sample_id: record.sample_id,
                    label,
                    scores: map,
                });
            }
        }
    }

    if samples.is_empty() {
        return Err(IngestError::EmptyDump { path: path.into() });
    }

    Ok(PredictionDump {
        samples,
        registry: ModalityRegistry {
            names: registry_names,
            counts: registry_counts,
        },
        warnings,
    })
}

/// What happens when a sample lacks some of the requested modalities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MissingPolicy {
    /// Exclude the sample so every configuration sees the same sample set.
    #[default]
    Strict,
    /// Evaluate the sample on the modalities it does carry.
    Lenient,
}

impl MissingPolicy {
    pub fn id(&self) -> &'static str {
        match self {
            MissingPolicy::Strict => "strict",
            MissingPolicy::Lenient => "lenient",
        }
    }
}

/// Builds the per-sample prediction matrix with columns in the order of
/// `modalities`. Returns `Ok(None)` when the sample must be skipped: under
/// [`MissingPolicy::Strict`] any missing modality skips it, under
/// [`MissingPolicy::Lenient`] only a sample with none of the modalities is
/// skipped.
pub fn validate_sample(
    sample: &LabeledSample,
    modalities: &[String],
    policy: MissingPolicy,
) -> Result<Option<PredictionSet>, IngestError> {
    if sample.modality_count() == 0 {
        return Err(IngestError::EmptySample {
            sample_id: sample.sample_id.clone(),
        });
    }
    let mut columns = Vec::with_capacity(modalities.len());
    for modality in modalities {
        match sample.scores_for(modality) {
            Some(scores) => columns.push(scores.to_vec()),
            None if policy == MissingPolicy::Strict => return Ok(None),
            None => {}
        }
    }
    if columns.is_empty() {
        return Ok(None);
    }
    Ok(Some(PredictionSet::new(columns)?))
}

/// A parsed catalog file, before group assignment is finalized.
#[derive(Debug, Clone, PartialEq)]
pub struct CatalogFile {
    pub names: Vec<String>,
    pub train_counts: Vec<u64>,
    /// Present when the file carried an explicit `group` column.
    pub groups: Option<Vec<ClassGroup>>,
    pub warnings: Vec<String>,
}

/// Parses a catalog from a file.
pub fn load_catalog(path: &Path, fields: FieldPolicy) -> Result<CatalogFile, IngestError> {
    let text = std::fs::read_to_string(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_catalog(&text, &path.display().to_string(), fields)
}

/// Parses a catalog from text; `path` only labels error messages.
pub fn parse_catalog(
    text: &str,
    path: &str,
    fields: FieldPolicy,
) -> Result<CatalogFile, IngestError> {
    let catalog_err = |line: usize, msg: String| IngestError::Catalog {
        path: path.into(),
        line,
        msg,
    };
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| catalog_err(1, "catalog is empty".into()))?;
    let header_cols: Vec<&str> = header.split(',').map(str::trim).collect();
    let expected = ["class_index", "class_name", "train_count", "group"];
    let mut warnings = Vec::new();
    for (i, col) in header_cols.iter().enumerate() {
        let known = expected.get(i).copied();
        if known != Some(*col) {
            match fields {
                FieldPolicy::Strict => {
                    return Err(catalog_err(
                        1,
                        format!("unknown or misplaced column `{col}`"),
                    ))
                }
                FieldPolicy::Lenient => {
                    warnings.push(format!("{path}:1: ignoring unknown column `{col}`"))
                }
            }
        }
    }
    if header_cols.len() < 3 {
        return Err(catalog_err(
            1,
            "header must name class_index,class_name,train_count".into(),
        ));
    }
    let has_group = header_cols.len() >= 4 && header_cols[3] == "group";

    let mut names = Vec::new();
    let mut train_counts = Vec::new();
    let mut groups = Vec::new();
    for (line_idx, raw) in lines {
        let line = line_idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = raw.split(',').map(str::trim).collect();
        if cols.len() != header_cols.len() {
            return Err(catalog_err(
                line,
                format!(
                    "expected {} columns, found {}",
                    header_cols.len(),
                    cols.len()
                ),
            ));
        }
        let index: usize = cols[0]
            .parse()
            .map_err(|_| catalog_err(line, format!("bad class_index `{}`", cols[0])))?;
        if index != names.len() {
            return Err(catalog_err(
                line,
                format!("class_index {} out of order, expected {}", index, names.len()),
            ));
        }
        let name = cols[1].to_string();
        if name.is_empty() {
            return Err(catalog_err(line, "empty class_name".into()));
        }
        if names.contains(&name) {
            return Err(catalog_err(line, format!("duplicate class name `{name}`")));
        }
        let count: u64 = cols[2]
            .parse()
            .map_err(|_| catalog_err(line, format!("bad train_count `{}`", cols[2])))?;
        if has_group {
            let group: ClassGroup = cols[3]
                .parse()
                .map_err(|e: String| catalog_err(line, e))?;
            groups.push(group);
        }
        names.push(name);
        train_counts.push(count);
    }
    if names.is_empty() {
        return Err(catalog_err(1, "catalog defines no classes".into()));
    }
    Ok(CatalogFile {
        names,
        train_counts,
        groups: if has_group { Some(groups) } else { None },
        warnings,
    })
}

/// Serializes a catalog, emitting the `group` column when groups are given.
pub fn render_catalog(
    names: &[String],
    train_counts: &[u64],
    groups: Option<&[ClassGroup]>,
) -> String {
    let mut out = String::new();
    match groups {
        Some(_) => out.push_str("class_index,class_name,train_count,group\n"),
        None => out.push_str("class_index,class_name,train_count\n"),
    }
    for (i, (name, count)) in names.iter().zip(train_counts).enumerate() {
        match groups {
            Some(gs) => {
                let _ = writeln!(out, "{i},{name},{count},{}", gs[i].id());
            }
            None => {
                let _ = writeln!(out, "{i},{name},{count}");
            }
        }
    }
    out
}
