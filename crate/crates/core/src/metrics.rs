//! Balanced and unbalanced top-k accuracy over labeled evaluation sets,
//! overall and restricted to class-frequency groups.
//!
//! Evaluation is tallied as per-class histograms of the rank the true class
//! reached in the fused ordering. Tallies are integers, so merging partial
//! tallies is associative and commutative and parallel accumulation is
//! bit-identical to sequential accumulation.

use crate::fusion::{descending_order, FusedScores, FusionConfig};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("top-k depth {k} out of range for {d} classes")]
    KOutOfRange { k: usize, d: usize },
    #[error("class label {label} out of range for {d} classes")]
    LabelOutOfRange { label: usize, d: usize },
    #[error("rank {rank} out of range for {d} classes")]
    RankOutOfRange { rank: u32, d: usize },
    #[error("no evaluation samples for any class in group `{group}`")]
    EmptyGroup { group: GroupSelector },
    #[error("catalog field `{field}` has {got} entries, expected {expected}")]
    CatalogLengthMismatch {
        field: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("group threshold must be >= 1")]
    ZeroThreshold,
    #[error("cannot merge tallies over {left} and {right} classes")]
    MergeMismatch { left: usize, right: usize },
}

/// Frequency group of a class, derived from its training-sample count or an
/// explicit assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClassGroup {
    Rare,
    Common,
}

impl ClassGroup {
    pub fn id(&self) -> &'static str {
        match self {
            ClassGroup::Rare => "rare",
            ClassGroup::Common => "common",
        }
    }
}

impl std::str::FromStr for ClassGroup {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rare" => Ok(ClassGroup::Rare),
            "common" => Ok(ClassGroup::Common),
            other => Err(format!("unknown class group `{other}` (rare or common)")),
        }
    }
}

/// Which classes an accuracy is computed over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroupSelector {
    Rare,
    Common,
    All,
}

impl GroupSelector {
    pub const ALL: [GroupSelector; 3] =
        [GroupSelector::Rare, GroupSelector::Common, GroupSelector::All];

    pub fn contains(&self, group: ClassGroup) -> bool {
        match self {
            GroupSelector::Rare => group == ClassGroup::Rare,
            GroupSelector::Common => group == ClassGroup::Common,
            GroupSelector::All => true,
        }
    }

    pub fn id(&self) -> &'static str {
        match self {
            GroupSelector::Rare => "rare",
            GroupSelector::Common => "common",
            GroupSelector::All => "all",
        }
    }
}

impl std::fmt::Display for GroupSelector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.id())
    }
}

impl std::str::FromStr for GroupSelector {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rare" => Ok(GroupSelector::Rare),
            "common" => Ok(GroupSelector::Common),
            "all" => Ok(GroupSelector::All),
            other => Err(format!(
                "unknown group selector `{other}` (rare, common or all)"
            )),
        }
    }
}

/// Class names, training counts and the rare/common assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassCatalog {
    names: Vec<String>,
    train_counts: Vec<u64>,
    groups: Vec<ClassGroup>,
}

impl ClassCatalog {
    /// Builds a catalog with explicit group assignments.
    pub fn with_groups(
        names: Vec<String>,
        train_counts: Vec<u64>,
        groups: Vec<ClassGroup>,
    ) -> Result<Self, MetricsError> {
        let d = names.len();
        if train_counts.len() != d {
            return Err(MetricsError::CatalogLengthMismatch {
                field: "train_counts",
                expected: d,
                got: train_counts.len(),
            });
        }
        if groups.len() != d {
            return Err(MetricsError::CatalogLengthMismatch {
                field: "groups",
                expected: d,
                got: groups.len(),
            });
        }
        Ok(Self {
            names,
            train_counts,
            groups,
        })
    }

    /// Builds a catalog grouping by training count: a class is rare when its
    /// count is below `threshold`, common otherwise.
    pub fn with_threshold(
        names: Vec<String>,
        train_counts: Vec<u64>,
        threshold: u64,
    ) -> Result<Self, MetricsError> {
        let groups = assign_groups(&train_counts, threshold)?;
        Self::with_groups(names, train_counts, groups)
    }

    pub fn class_count(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, class: usize) -> &str {
        &self.names[class]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn train_count(&self, class: usize) -> u64 {
        self.train_counts[class]
    }

    pub fn group(&self, class: usize) -> ClassGroup {
        self.groups[class]
    }
}

/// Threshold grouping: rare iff `count < threshold`.
pub fn assign_groups(train_counts: &[u64], threshold: u64) -> Result<Vec<ClassGroup>, MetricsError> {
    if threshold == 0 {
        return Err(MetricsError::ZeroThreshold);
    }
    Ok(train_counts
        .iter()
        .map(|&c| {
            if c < threshold {
                ClassGroup::Rare
            } else {
                ClassGroup::Common
            }
        })
        .collect())
}

/// Accumulated evaluation results: for each class, a histogram over the rank
/// the true class reached.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvaluationOutcome {
    class_count: usize,
    // rank_hist[class][rank - 1] = number of samples of `class` whose true
    // class landed at `rank` in the fused ordering.
    rank_hist: Vec<Vec<u64>>,
}

impl EvaluationOutcome {
    pub fn new(class_count: usize) -> Self {
        Self {
            class_count,
            rank_hist: vec![vec![0; class_count]; class_count],
        }
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    /// Records one evaluated sample: its true class and the 1-based rank that
    /// class reached in the fused ordering.
    pub fn record(&mut self, label: usize, rank: u32) -> Result<(), MetricsError> {
        if label >= self.class_count {
            return Err(MetricsError::LabelOutOfRange {
                label,
                d: self.class_count,
            });
        }
        if rank == 0 || rank as usize > self.class_count {
            return Err(MetricsError::RankOutOfRange {
                rank,
                d: self.class_count,
            });
        }
        self.rank_hist[label][rank as usize - 1] += 1;
        Ok(())
    }

    /// Element-wise addition of another tally; both orders of merging give
    /// the same result.
    pub fn merge(&mut self, other: &EvaluationOutcome) -> Result<(), MetricsError> {
        if self.class_count != other.class_count {
            return Err(MetricsError::MergeMismatch {
                left: self.class_count,
                right: other.class_count,
            });
        }
        for (mine, theirs) in self.rank_hist.iter_mut().zip(&other.rank_hist) {
            for (m, t) in mine.iter_mut().zip(theirs) {
                *m += t;
            }
        }
        Ok(())
    }

    /// Number of evaluated samples whose true class is `class`.
    pub fn samples(&self, class: usize) -> u64 {
        self.rank_hist[class].iter().sum()
    }

    /// Number of samples of `class` whose true class ranked within the top
    /// `k`.
    pub fn hits_at(&self, class: usize, k: usize) -> u64 {
        self.rank_hist[class][..k.min(self.class_count)].iter().sum()
    }

    pub fn total_samples(&self) -> u64 {
        (0..self.class_count).map(|c| self.samples(c)).sum()
    }
}

/// 1-based rank of `label` in the deterministic descending ordering of the
/// fused scores (equal values ordered by ascending class index).
pub fn rank_of(f: &FusedScores, label: usize) -> Result<u32, MetricsError> {
    let values = f.values();
    let d = values.len();
    if label >= d {
        return Err(MetricsError::LabelOutOfRange { label, d });
    }
    let v = values[label];
    let better = values
        .iter()
        .enumerate()
        .filter(|&(j, &u)| u > v || (u == v && j < label))
        .count();
    Ok(better as u32 + 1)
}

/// True when `label` occupies one of the first `k` positions of the
/// deterministic descending ordering of the fused scores.
pub fn topk_hit(
    f: &FusedScores,
    label: usize,
    k: usize,
    _cfg: &FusionConfig,
) -> Result<bool, MetricsError> {
    let d = f.class_count();
    if k == 0 || k > d {
        return Err(MetricsError::KOutOfRange { k, d });
    }
    Ok(rank_of(f, label)? as usize <= k)
}

/// Mean over the group's classes of their per-class top-k accuracy. Classes
/// without evaluation samples are excluded from the mean.
pub fn balanced_accuracy(
    outcome: &EvaluationOutcome,
    k: usize,
    group: GroupSelector,
    catalog: &ClassCatalog,
) -> Result<f64, MetricsError> {
    let d = outcome.class_count();
    if k == 0 || k > d {
        return Err(MetricsError::KOutOfRange { k, d });
    }
    let mut acc_sum = 0.0;
    let mut included = 0u64;
    for class in 0..d {
        if !group.contains(catalog.group(class)) {
            continue;
        }
        let samples = outcome.samples(class);
        if samples == 0 {
            continue;
        }
        acc_sum += outcome.hits_at(class, k) as f64 / samples as f64;
        included += 1;
    }
    if included == 0 {
        return Err(MetricsError::EmptyGroup { group });
    }
    Ok(acc_sum / included as f64)
}

/// Fraction of the group's samples whose true class ranked within the top
/// `k`.
pub fn unbalanced_accuracy(
    outcome: &EvaluationOutcome,
    k: usize,
    group: GroupSelector,
    catalog: &ClassCatalog,
) -> Result<f64, MetricsError> {
    let d = outcome.class_count();
    if k == 0 || k > d {
        return Err(MetricsError::KOutOfRange { k, d });
    }
    let mut hits = 0u64;
    let mut samples = 0u64;
    for class in 0..d {
        if !group.contains(catalog.group(class)) {
            continue;
        }
        hits += outcome.hits_at(class, k);
        samples += outcome.samples(class);
    }
    if samples == 0 {
        return Err(MetricsError::EmptyGroup { group });
    }
    Ok(hits as f64 / samples as f64)
}

/// Full descending ordering of the fused scores; exposed for report code and
/// tests that need more than the rank of a single class.
pub fn fused_ordering(f: &FusedScores, cfg: &FusionConfig) -> Vec<usize> {
    descending_order(f.values(), cfg.tie_break)
}
