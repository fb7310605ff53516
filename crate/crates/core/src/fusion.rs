//! Decision-level fusion operators.
//!
//! Combines the per-class probability estimates of `N` classifiers over `d`
//! classes into a single fused score vector. Score-level operators (sum,
//! median, max, product and their softmax-weighted variants) work on the
//! probability magnitudes; rank-level operators (majority vote, Borda count,
//! weighted Borda count, reciprocal rank fusion) only use each classifier's
//! class ordering.
//!
//! All operators are pure functions of their inputs and are invariant under
//! permutation of the classifier columns, bit for bit: every floating-point
//! reduction runs over a canonically sorted sequence of summands or factors,
//! so column order cannot perturb the result.

use thiserror::Error;

/// Errors produced by fusion operators and their input types.
#[derive(Debug, Error, PartialEq)]
pub enum FusionError {
    #[error("prediction set needs at least one class and one classifier")]
    Empty,
    #[error("classifier column {column} has {got} entries, expected {expected}")]
    RaggedColumn {
        column: usize,
        expected: usize,
        got: usize,
    },
    #[error("classifier column {column}, class {row}: score {value} must be finite and >= 0")]
    InvalidScore {
        column: usize,
        row: usize,
        value: f64,
    },
    #[error("borda depth k={k} out of range for {d} classes")]
    BordaDepthOutOfRange { k: usize, d: usize },
    #[error("weight vector has {got} entries, expected {expected}")]
    WeightLength { expected: usize, got: usize },
    #[error("weight entry {index}: {value} must be finite and >= 0")]
    InvalidWeight { index: usize, value: f64 },
}

/// The probability estimates of all classifiers for one sample: one column of
/// `d` class scores per classifier.
///
/// Entries must be finite and non-negative. Columns are expected to lie on
/// the probability simplex (ingestion enforces a sum tolerance); the fusion
/// operators themselves only require non-negativity, so monotone rescalings
/// of columns are valid inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionSet {
    columns: Vec<Vec<f64>>,
    class_count: usize,
}

impl PredictionSet {
    pub fn new(columns: Vec<Vec<f64>>) -> Result<Self, FusionError> {
        if columns.is_empty() || columns[0].is_empty() {
            return Err(FusionError::Empty);
        }
        let class_count = columns[0].len();
        let mut columns = columns;
        for (i, col) in columns.iter_mut().enumerate() {
            if col.len() != class_count {
                return Err(FusionError::RaggedColumn {
                    column: i,
                    expected: class_count,
                    got: col.len(),
                });
            }
            for (j, v) in col.iter_mut().enumerate() {
                if !v.is_finite() || *v < 0.0 {
                    return Err(FusionError::InvalidScore {
                        column: i,
                        row: j,
                        value: *v,
                    });
                }
                // Normalize -0.0 to +0.0 so comparisons and reductions are
                // bit-stable.
                *v += 0.0;
            }
        }
        Ok(Self {
            columns,
            class_count,
        })
    }

    /// Number of classes `d`.
    pub fn class_count(&self) -> usize {
        self.class_count
    }

    /// Number of classifiers `N`.
    pub fn classifier_count(&self) -> usize {
        self.columns.len()
    }

    /// Score vector of one classifier.
    pub fn column(&self, classifier: usize) -> &[f64] {
        &self.columns[classifier]
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    /// All classifiers' scores for one class.
    pub fn row(&self, class: usize) -> Vec<f64> {
        self.columns.iter().map(|c| c[class]).collect()
    }

    /// Checks that every column sums to 1 within `tolerance`. Returns the
    /// offending column index and its sum on failure.
    pub fn check_simplex(&self, tolerance: f64) -> Result<(), (usize, f64)> {
        for (i, col) in self.columns.iter().enumerate() {
            let sum: f64 = col.iter().sum();
            if (sum - 1.0).abs() > tolerance {
                return Err((i, sum));
            }
        }
        Ok(())
    }
}

/// Identifier of one of the ten fusion operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FusionMethod {
    Sum,
    WeightedSum,
    Median,
    Max,
    Product,
    WeightedProduct,
    MajorityVote,
    BordaCount,
    WeightedBordaCount,
    ReciprocalRank,
}

impl FusionMethod {
    /// All methods, score-level first, in canonical report order.
    pub const ALL: [FusionMethod; 10] = [
        FusionMethod::Sum,
        FusionMethod::WeightedSum,
        FusionMethod::Median,
        FusionMethod::Max,
        FusionMethod::Product,
        FusionMethod::WeightedProduct,
        FusionMethod::MajorityVote,
        FusionMethod::BordaCount,
        FusionMethod::WeightedBordaCount,
        FusionMethod::ReciprocalRank,
    ];

    /// Stable identifier used in CLI flags and report files.
    pub fn id(&self) -> &'static str {
        match self {
            FusionMethod::Sum => "sum",
            FusionMethod::WeightedSum => "weighted-sum",
            FusionMethod::Median => "median",
            FusionMethod::Max => "max",
            FusionMethod::Product => "product",
            FusionMethod::WeightedProduct => "weighted-product",
            FusionMethod::MajorityVote => "majority",
            FusionMethod::BordaCount => "borda",
            FusionMethod::WeightedBordaCount => "weighted-borda",
            FusionMethod::ReciprocalRank => "rrf",
        }
    }

    /// Human-readable name for rendered tables.
    pub fn label(&self) -> &'static str {
        match self {
            FusionMethod::Sum => "Sum",
            FusionMethod::WeightedSum => "Weighted sum",
            FusionMethod::Median => "Median",
            FusionMethod::Max => "Max",
            FusionMethod::Product => "Product",
            FusionMethod::WeightedProduct => "Weighted product",
            FusionMethod::MajorityVote => "Majority vote",
            FusionMethod::BordaCount => "Borda count",
            FusionMethod::WeightedBordaCount => "Weighted Borda",
            FusionMethod::ReciprocalRank => "Reciprocal rank",
        }
    }

    /// True for the operators that only depend on per-classifier rankings.
    pub fn is_rank_level(&self) -> bool {
        matches!(
            self,
            FusionMethod::MajorityVote
                | FusionMethod::BordaCount
                | FusionMethod::WeightedBordaCount
                | FusionMethod::ReciprocalRank
        )
    }
}

impl std::fmt::Display for FusionMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.id())
    }
}

impl std::str::FromStr for FusionMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FusionMethod::ALL
            .iter()
            .find(|m| m.id() == s)
            .copied()
            .ok_or_else(|| {
                let known: Vec<&str> = FusionMethod::ALL.iter().map(|m| m.id()).collect();
                format!("unknown fusion method `{s}` (known: {})", known.join(", "))
            })
    }
}

/// Policy for resolving equal scores when ordering classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    /// Prefer the lowest class index among tied values.
    #[default]
    LowestIndex,
}

impl TieBreak {
    pub fn id(&self) -> &'static str {
        match self {
            TieBreak::LowestIndex => "lowest-index",
        }
    }
}

/// Fusion hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FusionConfig {
    /// Borda depth: the top-ranked class earns `borda_k` points, the class at
    /// rank `borda_k` earns one point, deeper ranks earn none.
    pub borda_k: usize,
    /// Reciprocal-rank offset `m` in `1 / (m + rank)`.
    pub rrf_m: u32,
    /// Scalar regularizer applied to product fusion; never changes the argmax.
    pub product_gamma: f64,
    /// Tie policy for orderings and the final decision.
    pub tie_break: TieBreak,
}

impl Default for FusionConfig {
    fn default() -> Self {
        Self {
            borda_k: 5,
            rrf_m: 60,
            product_gamma: 1.0,
            tie_break: TieBreak::LowestIndex,
        }
    }
}

impl FusionConfig {
    /// Rejects configurations no operator can run with.
    pub fn validate(&self) -> Result<(), String> {
        if self.borda_k == 0 {
            return Err("borda_k must be >= 1".into());
        }
        if !self.product_gamma.is_finite() || self.product_gamma <= 0.0 {
            return Err(format!(
                "product_gamma must be a finite positive number, got {}",
                self.product_gamma
            ));
        }
        Ok(())
    }
}

/// Output of one fusion operator: `d` scores, not required to sum to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct FusedScores {
    values: Vec<f64>,
    method: FusionMethod,
}

impl FusedScores {
    pub fn new(values: Vec<f64>, method: FusionMethod) -> Self {
        Self { values, method }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn method(&self) -> FusionMethod {
        self.method
    }

    pub fn class_count(&self) -> usize {
        self.values.len()
    }
}

/// Per-classifier class rankings: `rank(i, j)` is the 1-based position of
/// class `j` in classifier `i`'s descending score order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankMatrix {
    columns: Vec<Vec<u32>>,
}

impl RankMatrix {
    pub fn rank(&self, classifier: usize, class: usize) -> u32 {
        self.columns[classifier][class]
    }

    pub fn columns(&self) -> &[Vec<u32>] {
        &self.columns
    }
}

/// Non-negative per-class weights for weighted Borda count.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(values: Vec<f64>) -> Result<Self, FusionError> {
        for (index, &value) in values.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(FusionError::InvalidWeight { index, value });
            }
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

// Reductions over canonically sorted values: the result depends only on the
// multiset of inputs, never on their order.
fn sorted_sum(mut values: Vec<f64>) -> f64 {
    values.sort_by(f64::total_cmp);
    values.iter().sum()
}

fn sorted_product(mut values: Vec<f64>) -> f64 {
    values.sort_by(f64::total_cmp);
    values.iter().product()
}

fn argmax(values: &[f64], _tie: TieBreak) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Class indices sorted by descending score, equal scores by ascending index.
pub(crate) fn descending_order(scores: &[f64], _tie: TieBreak) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    order
}

/// Mean of the classifier scores per class. With simplex columns the output
/// sums to 1 (up to rounding).
pub fn fuse_sum(p: &PredictionSet) -> FusedScores {
    let n = p.classifier_count() as f64;
    let values = (0..p.class_count())
        .map(|j| sorted_sum(p.row(j)) / n)
        .collect();
    FusedScores::new(values, FusionMethod::Sum)
}

// Softmax across classifiers, computed independently per class: the weight of
// classifier i for class j is exp(s_ij) / sum_n exp(s_nj).
fn softmax_weights_per_class(p: &PredictionSet, class: usize) -> Vec<f64> {
    let exps: Vec<f64> = p.columns.iter().map(|c| c[class].exp()).collect();
    let denom = sorted_sum(exps.clone());
    exps.into_iter().map(|e| e / denom).collect()
}

/// Mean of the classifier scores per class, each scaled by its softmax weight
/// across classifiers, amplifying the most confident estimates.
pub fn fuse_weighted_sum(p: &PredictionSet) -> FusedScores {
    let n = p.classifier_count() as f64;
    let values = (0..p.class_count())
        .map(|j| {
            let weights = softmax_weights_per_class(p, j);
            let terms: Vec<f64> = weights
                .iter()
                .zip(p.columns.iter())
                .map(|(w, col)| w * col[j])
                .collect();
            sorted_sum(terms) / n
        })
        .collect();
    FusedScores::new(values, FusionMethod::WeightedSum)
}

/// Median of the classifier scores per class; for an even number of
/// classifiers, the mean of the two middle order statistics.
pub fn fuse_median(p: &PredictionSet) -> FusedScores {
    let n = p.classifier_count();
    let values = (0..p.class_count())
        .map(|j| {
            let mut row = p.row(j);
            row.sort_by(f64::total_cmp);
            if n % 2 == 1 {
                row[n / 2]
            } else {
                (row[n / 2 - 1] + row[n / 2]) / 2.0
            }
        })
        .collect();
    FusedScores::new(values, FusionMethod::Median)
}

/// Maximum classifier score per class.
pub fn fuse_max(p: &PredictionSet) -> FusedScores {
    let values = (0..p.class_count())
        .map(|j| {
            p.columns
                .iter()
                .map(|c| c[j])
                .max_by(f64::total_cmp)
                .expect("at least one classifier")
        })
        .collect();
    FusedScores::new(values, FusionMethod::Max)
}

/// Product of the classifier scores per class, scaled by `product_gamma`.
/// A zero entry vetoes its class; no epsilon flooring is applied.
pub fn fuse_product(p: &PredictionSet, cfg: &FusionConfig) -> FusedScores {
    let values = (0..p.class_count())
        .map(|j| cfg.product_gamma * sorted_product(p.row(j)))
        .collect();
    FusedScores::new(values, FusionMethod::Product)
}

/// Product fusion over softmax-weighted scores, scaled by `product_gamma`.
pub fn fuse_weighted_product(p: &PredictionSet, cfg: &FusionConfig) -> FusedScores {
    let values = (0..p.class_count())
        .map(|j| {
            let weights = softmax_weights_per_class(p, j);
            let terms: Vec<f64> = weights
                .iter()
                .zip(p.columns.iter())
                .map(|(w, col)| w * col[j])
                .collect();
            cfg.product_gamma * sorted_product(terms)
        })
        .collect();
    FusedScores::new(values, FusionMethod::WeightedProduct)
}

/// Number of classifiers whose top-1 prediction is each class. The output
/// always sums to the classifier count.
pub fn majority_vote(p: &PredictionSet, cfg: &FusionConfig) -> FusedScores {
    let mut counts = vec![0.0; p.class_count()];
    for col in &p.columns {
        counts[argmax(col, cfg.tie_break)] += 1.0;
    }
    FusedScores::new(counts, FusionMethod::MajorityVote)
}

/// Per-classifier descending class rankings, ties by ascending class index.
pub fn compute_ranks(p: &PredictionSet, cfg: &FusionConfig) -> RankMatrix {
    let columns = p
        .columns
        .iter()
        .map(|col| {
            let order = descending_order(col, cfg.tie_break);
            let mut ranks = vec![0u32; col.len()];
            for (pos, &class) in order.iter().enumerate() {
                ranks[class] = pos as u32 + 1;
            }
            ranks
        })
        .collect();
    RankMatrix { columns }
}

/// Preferential voting: each classifier awards `borda_k` points to its
/// top-ranked class, `borda_k - 1` to the next, down to one point at rank
/// `borda_k`; points are summed over classifiers. The output always sums to
/// `N * k * (k + 1) / 2`.
pub fn borda_count(p: &PredictionSet, cfg: &FusionConfig) -> Result<FusedScores, FusionError> {
    let d = p.class_count();
    let k = cfg.borda_k;
    if k == 0 || k > d {
        return Err(FusionError::BordaDepthOutOfRange { k, d });
    }
    let mut points = vec![0.0; d];
    for col in &p.columns {
        let order = descending_order(col, cfg.tie_break);
        for (pos, &class) in order.iter().take(k).enumerate() {
            points[class] += (k - pos) as f64;
        }
    }
    Ok(FusedScores::new(points, FusionMethod::BordaCount))
}

/// Borda count scaled element-wise by the mean classifier scores, boosting
/// classes the ensemble is jointly confident about.
pub fn weighted_borda_count(
    p: &PredictionSet,
    cfg: &FusionConfig,
) -> Result<FusedScores, FusionError> {
    let weights = WeightVector::new(fuse_sum(p).values).expect("mean of valid scores is valid");
    weighted_borda_count_with(p, cfg, &weights)
}

/// Borda count scaled element-wise by an arbitrary non-negative weight vector.
pub fn weighted_borda_count_with(
    p: &PredictionSet,
    cfg: &FusionConfig,
    weights: &WeightVector,
) -> Result<FusedScores, FusionError> {
    if weights.values().len() != p.class_count() {
        return Err(FusionError::WeightLength {
            expected: p.class_count(),
            got: weights.values().len(),
        });
    }
    let points = borda_count(p, cfg)?;
    let values = weights
        .values()
        .iter()
        .zip(points.values())
        .map(|(w, b)| w * b)
        .collect();
    Ok(FusedScores::new(values, FusionMethod::WeightedBordaCount))
}

/// Sum of `1 / (m + rank)` over classifiers per class, with 1-based ranks.
/// The offset `m` damps the influence of single high rankings.
pub fn reciprocal_rank_fusion(p: &PredictionSet, cfg: &FusionConfig) -> FusedScores {
    let ranks = compute_ranks(p, cfg);
    let m = cfg.rrf_m as f64;
    let values = (0..p.class_count())
        .map(|j| {
            let recips: Vec<f64> = ranks
                .columns
                .iter()
                .map(|col| 1.0 / (m + col[j] as f64))
                .collect();
            sorted_sum(recips)
        })
        .collect();
    FusedScores::new(values, FusionMethod::ReciprocalRank)
}

/// Index of the maximal fused score, ties resolved by the configured policy.
pub fn final_decision(f: &FusedScores, cfg: &FusionConfig) -> usize {
    argmax(f.values(), cfg.tie_break)
}

/// Runs the named fusion operator.
pub fn fuse(
    p: &PredictionSet,
    method: FusionMethod,
    cfg: &FusionConfig,
) -> Result<FusedScores, FusionError> {
    Ok(match method {
        FusionMethod::Sum => fuse_sum(p),
        FusionMethod::WeightedSum => fuse_weighted_sum(p),
        FusionMethod::Median => fuse_median(p),
        FusionMethod::Max => fuse_max(p),
        FusionMethod::Product => fuse_product(p, cfg),
        FusionMethod::WeightedProduct => fuse_weighted_product(p, cfg),
        FusionMethod::MajorityVote => majority_vote(p, cfg),
        FusionMethod::BordaCount => borda_count(p, cfg)?,
        FusionMethod::WeightedBordaCount => weighted_borda_count(p, cfg)?,
        FusionMethod::ReciprocalRank => reciprocal_rank_fusion(p, cfg),
    })
}

/// Fuses and picks the winning class. For majority vote, equal top-1 counts
/// are resolved by the highest mean score among the tied classes, then by the
/// lowest class index; every other method decides by `final_decision`.
pub fn decide(
    p: &PredictionSet,
    method: FusionMethod,
    cfg: &FusionConfig,
) -> Result<usize, FusionError> {
    let fused = fuse(p, method, cfg)?;
    if method == FusionMethod::MajorityVote {
        let counts = fused.values();
        let top = counts.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let tied: Vec<usize> = (0..counts.len()).filter(|&j| counts[j] == top).collect();
        if tied.len() > 1 {
            let sums = fuse_sum(p);
            let mut winner = tied[0];
            for &j in &tied[1..] {
                if sums.values()[j] > sums.values()[winner] {
                    winner = j;
                }
            }
            return Ok(winner);
        }
        return Ok(tied[0]);
    }
    Ok(final_decision(&fused, cfg))
}
