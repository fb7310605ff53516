//! The evaluation grid: fusion method × modality-subset size × metric kind ×
//! top-k depth × class group.
//!
//! Modality subsets come from a single seeded permutation of the registry per
//! run, so smaller subsets are prefixes of larger ones. In strict mode the
//! sample set is fixed once for the whole grid; every cell is computed over
//! exactly the same samples.

use crate::fusion::{fuse, FusionConfig, FusionError, FusionMethod};
use crate::ingest::{validate_sample, IngestError, LabeledSample, MissingPolicy, ModalityRegistry};
use crate::metrics::{
    balanced_accuracy, rank_of, unbalanced_accuracy, ClassCatalog, EvaluationOutcome,
    GroupSelector, MetricsError,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PlanError {
    #[error("modality count {count} out of range: dump provides {available}")]
    CountOutOfRange { count: usize, available: usize },
    #[error("top-k depth {k} out of range for {d} classes")]
    TopKOutOfRange { k: usize, d: usize },
    #[error("plan selects no {0}")]
    EmptyAxis(&'static str),
    #[error("no samples to evaluate")]
    NoSamples,
    #[error("no samples left after strict modality filtering")]
    AllSamplesExcluded,
    #[error("invalid fusion config: {0}")]
    BadConfig(String),
    #[error("grid cell {method}@{count}, group {group}: {source}")]
    Cell {
        method: FusionMethod,
        count: usize,
        group: GroupSelector,
        #[source]
        source: MetricsError,
    },
    #[error(transparent)]
    Fusion(#[from] FusionError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Ingest(#[from] IngestError),
}

/// Name and content digest of one input file, echoed into reports.
#[derive(Debug, Clone, PartialEq)]
pub struct InputDigest {
    pub name: String,
    pub fnv1a64: u64,
}

/// FNV-1a 64-bit content digest used for report provenance.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = 0xCBF2_9CE4_8422_2325u64;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01B3);
    }
    hash
}

/// Everything a run needs beyond the data itself.
#[derive(Debug, Clone)]
pub struct ExperimentPlan {
    pub methods: Vec<FusionMethod>,
    pub modality_counts: Vec<usize>,
    pub subset_seed: u64,
    pub topk: Vec<usize>,
    pub groups: Vec<GroupSelector>,
    pub config: FusionConfig,
    pub missing: MissingPolicy,
    /// Input provenance echoed into emitted reports.
    pub inputs: Vec<InputDigest>,
}

impl ExperimentPlan {
    /// All ten methods, capped default subset sizes, top-1/top-5, all groups.
    pub fn new(subset_seed: u64, available_modalities: usize, class_count: usize) -> Self {
        Self {
            methods: FusionMethod::ALL.to_vec(),
            modality_counts: default_modality_counts(available_modalities),
            subset_seed,
            topk: default_topk(class_count),
            groups: GroupSelector::ALL.to_vec(),
            config: FusionConfig::default(),
            missing: MissingPolicy::Strict,
            inputs: Vec::new(),
        }
    }
}

/// The default subset sizes 2, 4 and 8, capped at the available modality
/// count and deduplicated.
pub fn default_modality_counts(available: usize) -> Vec<usize> {
    let mut counts: Vec<usize> = [2usize, 4, 8]
        .iter()
        .map(|&c| c.min(available.max(1)))
        .collect();
    counts.dedup();
    counts
}

/// The default depths 1 and 5, capped at the class count and deduplicated.
pub fn default_topk(class_count: usize) -> Vec<usize> {
    let mut ks: Vec<usize> = [1usize, 5].iter().map(|&k| k.min(class_count)).collect();
    ks.dedup();
    ks
}

fn seeded_permutation(n: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Fisher-Yates.
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        order.swap(i, j);
    }
    order
}

/// The first `count` modalities of the run's seeded permutation. For a fixed
/// seed, smaller subsets are prefixes of larger ones.
pub fn select_modalities(
    registry: &ModalityRegistry,
    count: usize,
    seed: u64,
) -> Result<Vec<String>, PlanError> {
    let available = registry.len();
    if count == 0 || count > available {
        return Err(PlanError::CountOutOfRange { count, available });
    }
    let permutation = seeded_permutation(available, seed);
    Ok(permutation
        .into_iter()
        .take(count)
        .map(|i| registry.names()[i].clone())
        .collect())
}

/// One cell of the evaluation grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridCell {
    pub method: FusionMethod,
    pub modality_count: usize,
    pub metric: MetricKind,
    pub k: usize,
    pub group: GroupSelector,
    pub accuracy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MetricKind {
    Balanced,
    Unbalanced,
}

impl MetricKind {
    pub const ALL: [MetricKind; 2] = [MetricKind::Balanced, MetricKind::Unbalanced];

    pub fn id(&self) -> &'static str {
        match self {
            MetricKind::Balanced => "balanced",
            MetricKind::Unbalanced => "unbalanced",
        }
    }
}

/// Per-class top-1 accuracy under one configuration. Configurations are
/// either a grid cell (`<method>@<count>`) or a single modality
/// (`unimodal:<name>`).
#[derive(Debug, Clone, PartialEq)]
pub struct PerClassRow {
    pub configuration: String,
    pub class: usize,
    pub samples: u64,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubsetSpec {
    pub count: usize,
    pub modalities: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExcludedSample {
    pub sample_id: String,
    pub reason: String,
}

/// The completed grid plus everything needed to reproduce it.
#[derive(Debug, Clone)]
pub struct EvaluationReport {
    pub plan: ExperimentPlan,
    pub class_names: Vec<String>,
    /// The full seeded permutation of the registry.
    pub modality_order: Vec<String>,
    pub subsets: Vec<SubsetSpec>,
    pub grid: Vec<GridCell>,
    pub per_class: Vec<PerClassRow>,
    pub evaluated_samples: usize,
    pub excluded: Vec<ExcludedSample>,
}

impl EvaluationReport {
    pub fn cell(
        &self,
        method: FusionMethod,
        count: usize,
        metric: MetricKind,
        k: usize,
        group: GroupSelector,
    ) -> Option<&GridCell> {
        self.grid.iter().find(|c| {
            c.method == method
                && c.modality_count == count
                && c.metric == metric
                && c.k == k
                && c.group == group
        })
    }

    pub fn per_class_accuracy(&self, configuration: &str, class: usize) -> Option<f64> {
        self.per_class
            .iter()
            .find(|r| r.configuration == configuration && r.class == class)
            .map(|r| r.accuracy)
    }
}

/// Label of the grid configuration fusing `method` over `count` modalities.
pub fn grid_configuration(method: FusionMethod, count: usize) -> String {
    format!("{}@{}", method.id(), count)
}

/// Label of the single-modality configuration for `modality`.
pub fn unimodal_configuration(modality: &str) -> String {
    format!("unimodal:{modality}")
}

fn validate_plan(
    plan: &ExperimentPlan,
    registry: &ModalityRegistry,
    catalog: &ClassCatalog,
) -> Result<(), PlanError> {
    if plan.methods.is_empty() {
        return Err(PlanError::EmptyAxis("fusion methods"));
    }
    if plan.modality_counts.is_empty() {
        return Err(PlanError::EmptyAxis("modality counts"));
    }
    if plan.topk.is_empty() {
        return Err(PlanError::EmptyAxis("top-k depths"));
    }
    if plan.groups.is_empty() {
        return Err(PlanError::EmptyAxis("class groups"));
    }
    plan.config.validate().map_err(PlanError::BadConfig)?;
    let available = registry.len();
    for &count in &plan.modality_counts {
        if count == 0 || count > available {
            return Err(PlanError::CountOutOfRange { count, available });
        }
    }
    let d = catalog.class_count();
    for &k in &plan.topk {
        if k == 0 || k > d {
            return Err(PlanError::TopKOutOfRange { k, d });
        }
    }
    if plan
        .methods
        .iter()
        .any(|m| matches!(m, FusionMethod::BordaCount | FusionMethod::WeightedBordaCount))
        && plan.config.borda_k > d
    {
        return Err(PlanError::Fusion(FusionError::BordaDepthOutOfRange {
            k: plan.config.borda_k,
            d,
        }));
    }
    Ok(())
}

// Tallies ranks for every method over one modality subset. Per-sample work is
// parallel; the fold/reduce merge is integer addition, so the result is
// identical for any parallelism degree.
fn tally_methods(
    samples: &[&LabeledSample],
    modalities: &[String],
    methods: &[FusionMethod],
    cfg: &FusionConfig,
    missing: MissingPolicy,
    class_count: usize,
) -> Result<Vec<EvaluationOutcome>, PlanError> {
    let per_sample = |sample: &LabeledSample| -> Result<Option<Vec<u32>>, PlanError> {
        let Some(pset) = validate_sample(sample, modalities, missing)? else {
            return Ok(None);
        };
        methods
            .iter()
            .map(|&method| {
                let fused = fuse(&pset, method, cfg)?;
                Ok(rank_of(&fused, sample.label)?)
            })
            .collect::<Result<Vec<u32>, PlanError>>()
            .map(Some)
    };

    let fresh = || vec![EvaluationOutcome::new(class_count); methods.len()];
    let tallies = samples
        .par_iter()
        .map(|sample| {
            per_sample(sample).map(|ranks| ranks.map(|r| (sample.label, r)))
        })
        .try_fold(fresh, |mut acc, item| -> Result<_, PlanError> {
            if let Some((label, ranks)) = item? {
                for (outcome, rank) in acc.iter_mut().zip(ranks) {
                    outcome.record(label, rank)?;
                }
            }
            Ok(acc)
        })
        .try_reduce(fresh, |mut a, b| {
            for (mine, theirs) in a.iter_mut().zip(&b) {
                mine.merge(theirs)?;
            }
            Ok(a)
        })?;
    Ok(tallies)
}

/// Runs the full grid over the dump. Deterministic in `(plan, samples,
/// catalog, registry)` regardless of thread count.
pub fn run_plan(
    plan: &ExperimentPlan,
    samples: &[LabeledSample],
    catalog: &ClassCatalog,
    registry: &ModalityRegistry,
) -> Result<EvaluationReport, PlanError> {
    if samples.is_empty() {
        return Err(PlanError::NoSamples);
    }
    validate_plan(plan, registry, catalog)?;
    let d = catalog.class_count();

    let permutation = seeded_permutation(registry.len(), plan.subset_seed);
    let modality_order: Vec<String> = permutation
        .iter()
        .map(|&i| registry.names()[i].clone())
        .collect();

    let mut counts = plan.modality_counts.clone();
    counts.sort_unstable();
    counts.dedup();
    let subsets: Vec<SubsetSpec> = counts
        .iter()
        .map(|&count| SubsetSpec {
            count,
            modalities: modality_order[..count].to_vec(),
        })
        .collect();

    // Strict mode fixes the sample set once: a sample must carry every
    // modality of the largest subset to enter any cell.
    let max_subset = &subsets.last().expect("at least one subset").modalities;
    let mut eval_samples: Vec<&LabeledSample> = Vec::with_capacity(samples.len());
    let mut excluded = Vec::new();
    match plan.missing {
        MissingPolicy::Strict => {
            for sample in samples {
                match max_subset.iter().find(|m| !sample.has_modality(m)) {
                    Some(missing) => excluded.push(ExcludedSample {
                        sample_id: sample.sample_id.clone(),
                        reason: format!("missing modality `{missing}`"),
                    }),
                    None => eval_samples.push(sample),
                }
            }
        }
        MissingPolicy::Lenient => eval_samples.extend(samples.iter()),
    }
    if eval_samples.is_empty() {
        return Err(PlanError::AllSamplesExcluded);
    }

    let mut grid = Vec::new();
    let mut per_class = Vec::new();
    for subset in &subsets {
        let tallies = tally_methods(
            &eval_samples,
            &subset.modalities,
            &plan.methods,
            &plan.config,
            plan.missing,
            d,
        )?;
        for (method, outcome) in plan.methods.iter().zip(&tallies) {
            for metric in MetricKind::ALL {
                for &k in &plan.topk {
                    for &group in &plan.groups {
                        let accuracy = match metric {
                            MetricKind::Balanced => balanced_accuracy(outcome, k, group, catalog),
                            MetricKind::Unbalanced => {
                                unbalanced_accuracy(outcome, k, group, catalog)
                            }
                        }
                        .map_err(|source| PlanError::Cell {
                            method: *method,
                            count: subset.count,
                            group,
                            source,
                        })?;
                        grid.push(GridCell {
                            method: *method,
                            modality_count: subset.count,
                            metric,
                            k,
                            group,
                            accuracy,
                        });
                    }
                }
            }
            let configuration = grid_configuration(*method, subset.count);
            for class in 0..d {
                let n = outcome.samples(class);
                if n > 0 {
                    per_class.push(PerClassRow {
                        configuration: configuration.clone(),
                        class,
                        samples: n,
                        accuracy: outcome.hits_at(class, 1) as f64 / n as f64,
                    });
                }
            }
        }
    }

    // Unimodal baselines over the same sample set, one tally per modality.
    // These back the per-class comparison against the best single view.
    for modality in registry.names() {
        let tallies = tally_methods(
            &eval_samples,
            std::slice::from_ref(modality),
            &[FusionMethod::Sum],
            &plan.config,
            MissingPolicy::Lenient,
            d,
        )?;
        let outcome = &tallies[0];
        let configuration = unimodal_configuration(modality);
        for class in 0..d {
            let n = outcome.samples(class);
            if n > 0 {
                per_class.push(PerClassRow {
                    configuration: configuration.clone(),
                    class,
                    samples: n,
                    accuracy: outcome.hits_at(class, 1) as f64 / n as f64,
                });
            }
        }
    }

    Ok(EvaluationReport {
        plan: plan.clone(),
        class_names: catalog.names().to_vec(),
        modality_order,
        subsets,
        grid,
        per_class,
        evaluated_samples: eval_samples.len(),
        excluded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{parse_predictions, LoadOptions};
    use crate::metrics::ClassGroup;
    use crate::synth::{generate, GeneratedDump, ModalityProfile, SynthSpec};

    fn synth_dump(modalities: usize, samples: usize, seed: u64) -> GeneratedDump {
        let profiles = (0..modalities)
            .map(|m| ModalityProfile::new(format!("mod{m}"), 0.7 + 0.02 * m as f64))
            .collect();
        generate(&SynthSpec {
            class_count: 6,
            sample_count: samples,
            seed,
            profiles,
            class_weights: Some(vec![3.0, 3.0, 3.0, 1.0, 1.0, 1.0]),
        })
        .unwrap()
    }

    fn load(dump: &GeneratedDump) -> (Vec<LabeledSample>, ModalityRegistry, ClassCatalog) {
        let parsed = parse_predictions(
            &dump.to_jsonl(),
            "synth",
            dump.class_count,
            &LoadOptions::default(),
        )
        .unwrap();
        let catalog = ClassCatalog::with_threshold(
            (0..dump.class_count).map(|c| format!("class_{c}")).collect(),
            dump.class_counts.clone(),
            dump.class_counts.iter().copied().max().unwrap() / 2,
        )
        .unwrap();
        (parsed.samples, parsed.registry, catalog)
    }

    #[test]
    fn default_counts_cap_at_available() {
        assert_eq!(default_modality_counts(8), vec![2, 4, 8]);
        assert_eq!(default_modality_counts(5), vec![2, 4, 5]);
        assert_eq!(default_modality_counts(3), vec![2, 3]);
        assert_eq!(default_modality_counts(1), vec![1]);
    }

    #[test]
    fn subsets_nest_for_a_fixed_seed() {
        let dump = synth_dump(8, 5, 1);
        let (_, registry, _) = load(&dump);
        let two = select_modalities(&registry, 2, 33).unwrap();
        let four = select_modalities(&registry, 4, 33).unwrap();
        let all = select_modalities(&registry, 8, 33).unwrap();
        assert_eq!(&four[..2], &two[..]);
        assert_eq!(&all[..4], &four[..]);
        assert_eq!(select_modalities(&registry, 8, 33).unwrap(), all);
        let mut sorted = all.clone();
        sorted.sort();
        let mut names = registry.names().to_vec();
        names.sort();
        assert_eq!(sorted, names);
    }

    #[test]
    fn select_modalities_bounds() {
        let dump = synth_dump(3, 5, 1);
        let (_, registry, _) = load(&dump);
        assert_eq!(select_modalities(&registry, 1, 0).unwrap().len(), 1);
        assert!(matches!(
            select_modalities(&registry, 4, 0),
            Err(PlanError::CountOutOfRange {
                count: 4,
                available: 3
            })
        ));
        assert!(select_modalities(&registry, 0, 0).is_err());
    }

    #[test]
    fn perfect_predictions_score_one_everywhere() {
        let profiles = vec![
            ModalityProfile {
                concentration: 12.0,
                ..ModalityProfile::new("a", 1.0)
            },
            ModalityProfile {
                concentration: 12.0,
                ..ModalityProfile::new("b", 1.0)
            },
        ];
        let dump = generate(&SynthSpec {
            class_count: 6,
            sample_count: 40,
            seed: 2,
            profiles,
            class_weights: None,
        })
        .unwrap();
        let (samples, registry, catalog) = load(&dump);
        let mut plan = ExperimentPlan::new(0, registry.len(), catalog.class_count());
        plan.modality_counts = vec![2];
        let report = run_plan(&plan, &samples, &catalog, &registry).unwrap();
        assert!(!report.grid.is_empty());
        for cell in &report.grid {
            assert_eq!(cell.accuracy, 1.0, "{cell:?}");
        }
    }

    #[test]
    fn grid_matches_per_sample_hand_evaluation() {
        use crate::fusion::FusionConfig;
        let dump = synth_dump(3, 10, 17);
        let (samples, registry, catalog) = load(&dump);
        let mut plan = ExperimentPlan::new(5, registry.len(), catalog.class_count());
        plan.modality_counts = vec![3];
        plan.topk = vec![1];
        plan.groups = vec![GroupSelector::All];
        let report = run_plan(&plan, &samples, &catalog, &registry).unwrap();

        let modalities = report.subsets[0].modalities.clone();
        let cfg = FusionConfig::default();
        for &method in &plan.methods {
            // One sample at a time, no shared accumulator.
            let mut outcome = EvaluationOutcome::new(catalog.class_count());
            for sample in &samples {
                let pset = validate_sample(sample, &modalities, MissingPolicy::Strict)
                    .unwrap()
                    .unwrap();
                let fused = fuse(&pset, method, &cfg).unwrap();
                outcome.record(sample.label, rank_of(&fused, sample.label).unwrap()).unwrap();
            }
            let want_bal =
                balanced_accuracy(&outcome, 1, GroupSelector::All, &catalog).unwrap();
            let want_unbal =
                unbalanced_accuracy(&outcome, 1, GroupSelector::All, &catalog).unwrap();
            let bal = report
                .cell(method, 3, MetricKind::Balanced, 1, GroupSelector::All)
                .unwrap();
            let unbal = report
                .cell(method, 3, MetricKind::Unbalanced, 1, GroupSelector::All)
                .unwrap();
            assert_eq!(bal.accuracy, want_bal, "{method}");
            assert_eq!(unbal.accuracy, want_unbal, "{method}");
        }
    }

    #[test]
    fn strict_mode_excludes_incomplete_samples_everywhere() {
        let dump = synth_dump(2, 8, 3);
        let mut jsonl = dump.to_jsonl();
        // One extra sample that only has the first modality.
        jsonl.push_str(
            r#"{"sample_id":"extra","modality":"mod0","label":0,"scores":[0.5,0.1,0.1,0.1,0.1,0.1]}"#,
        );
        jsonl.push('\n');
        let parsed = parse_predictions(&jsonl, "t", 6, &LoadOptions::default()).unwrap();
        let catalog = ClassCatalog::with_threshold(
            (0..6).map(|c| format!("class_{c}")).collect(),
            vec![10; 6],
            5,
        )
        .unwrap();
        let mut plan = ExperimentPlan::new(0, 2, 6);
        plan.modality_counts = vec![2];
        plan.groups = vec![GroupSelector::All];
        let report = run_plan(&plan, &parsed.samples, &catalog, &parsed.registry).unwrap();
        assert_eq!(report.evaluated_samples, 8);
        assert_eq!(report.excluded.len(), 1);
        assert_eq!(report.excluded[0].sample_id, "extra");
        assert!(report.excluded[0].reason.contains("mod1"));

        plan.missing = MissingPolicy::Lenient;
        let lenient = run_plan(&plan, &parsed.samples, &catalog, &parsed.registry).unwrap();
        assert_eq!(lenient.evaluated_samples, 9);
        assert!(lenient.excluded.is_empty());
    }

    #[test]
    fn reruns_are_identical_and_cells_isolated() {
        let dump = synth_dump(4, 20, 9);
        let (samples, registry, catalog) = load(&dump);
        let plan = ExperimentPlan::new(21, registry.len(), catalog.class_count());
        let first = run_plan(&plan, &samples, &catalog, &registry).unwrap();
        let second = run_plan(&plan, &samples, &catalog, &registry).unwrap();
        assert_eq!(first.grid, second.grid);
        assert_eq!(first.per_class, second.per_class);
        assert_eq!(first.modality_order, second.modality_order);

        // Dropping a method must not change any other method's cells.
        let mut reduced_plan = plan.clone();
        reduced_plan.methods = FusionMethod::ALL
            .iter()
            .copied()
            .filter(|m| *m != FusionMethod::Median)
            .collect();
        let reduced = run_plan(&reduced_plan, &samples, &catalog, &registry).unwrap();
        for cell in &reduced.grid {
            let original = first
                .cell(cell.method, cell.modality_count, cell.metric, cell.k, cell.group)
                .unwrap();
            assert_eq!(cell.accuracy, original.accuracy);
        }
    }

    #[test]
    fn plan_validation_rejects_bad_axes() {
        let dump = synth_dump(2, 5, 4);
        let (samples, registry, catalog) = load(&dump);
        let base = ExperimentPlan::new(0, registry.len(), catalog.class_count());

        let mut plan = base.clone();
        plan.modality_counts = vec![5];
        assert!(matches!(
            run_plan(&plan, &samples, &catalog, &registry),
            Err(PlanError::CountOutOfRange { count: 5, .. })
        ));

        let mut plan = base.clone();
        plan.topk = vec![9];
        assert!(matches!(
            run_plan(&plan, &samples, &catalog, &registry),
            Err(PlanError::TopKOutOfRange { k: 9, .. })
        ));

        let mut plan = base.clone();
        plan.methods.clear();
        assert!(matches!(
            run_plan(&plan, &samples, &catalog, &registry),
            Err(PlanError::EmptyAxis("fusion methods"))
        ));

        let mut plan = base;
        plan.config.borda_k = 7;
        assert!(matches!(
            run_plan(&plan, &samples, &catalog, &registry),
            Err(PlanError::Fusion(FusionError::BordaDepthOutOfRange { k: 7, d: 6 }))
        ));
    }

    #[test]
    fn empty_group_in_a_cell_is_reported() {
        // All samples belong to common classes, so the rare group is empty.
        let dump = synth_dump(2, 6, 8);
        let parsed = parse_predictions(
            &dump.to_jsonl(),
            "t",
            dump.class_count,
            &LoadOptions::default(),
        )
        .unwrap();
        let catalog = ClassCatalog::with_groups(
            (0..6).map(|c| format!("class_{c}")).collect(),
            vec![10; 6],
            vec![ClassGroup::Common; 6],
        )
        .unwrap();
        let plan = ExperimentPlan::new(0, 2, 6);
        let err = run_plan(&plan, &parsed.samples, &catalog, &parsed.registry).unwrap_err();
        assert!(matches!(
            err,
            PlanError::Cell {
                group: GroupSelector::Rare,
                ..
            }
        ));
    }

    #[test]
    fn fnv_digest_is_stable() {
        assert_eq!(fnv1a64(b""), 0xCBF2_9CE4_8422_2325);
        assert_eq!(fnv1a64(b"a"), 0xAF63_DC4C_8601_EC8C);
        assert_ne!(fnv1a64(b"ab"), fnv1a64(b"ba"));
    }
}
