//! Seeded synthetic multimodal prediction dumps.
//!
//! Generates labeled samples with one probability vector per configured
//! modality, with controllable per-modality top-1 accuracy, preferred
//! confusion targets, and vector sharpness. The per-sample random stream is
//! derived from `(seed, sample index)` alone, so generation order never
//! affects output and identical inputs yield byte-identical dumps.

use crate::ingest::PredictionRecord;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SynthError {
    #[error("profile `{name}`: accuracy_target {value} must be in (0, 1]")]
    InvalidAccuracy { name: String, value: f64 },
    #[error("profile `{name}`: concentration {value} must be finite and > 0")]
    InvalidConcentration { name: String, value: f64 },
    #[error("profile `{name}`: truth_affinity {value} must be finite and >= 0")]
    InvalidAffinity { name: String, value: f64 },
    #[error("profile `{name}`: confusion bias for class {class} names class {target}, out of range for {d} classes")]
    BiasOutOfRange {
        name: String,
        class: usize,
        target: usize,
        d: usize,
    },
    #[error("profile `{name}`: confusion bias for class {class} names the class itself")]
    BiasIsTrueClass { name: String, class: usize },
    #[error("profile `{name}`: confusion bias for class {class} is empty")]
    BiasEmpty { name: String, class: usize },
    #[error("duplicate profile name `{name}`")]
    DuplicateProfile { name: String },
    #[error("need at least 2 classes, got {0}")]
    TooFewClasses(usize),
    #[error("need at least 1 sample")]
    NoSamples,
    #[error("need at least 1 modality profile")]
    NoProfiles,
    #[error("class_weights has {got} entries, expected {expected}")]
    WeightsLength { expected: usize, got: usize },
    #[error("class_weights entry {index} is {value}; weights must be finite, >= 0, with positive total")]
    InvalidWeights { index: usize, value: f64 },
}

fn default_concentration() -> f64 {
    4.0
}

fn default_truth_affinity() -> f64 {
    0.25
}

/// Behaviour of one synthetic unimodal classifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModalityProfile {
    pub name: String,
    /// Probability that the generated vector's argmax is the true class.
    pub accuracy_target: f64,
    /// Preferred wrong classes per true class; errors draw uniformly from the
    /// listed classes. Classes without an entry err uniformly over all wrong
    /// classes.
    #[serde(default)]
    pub confusion_bias: Option<BTreeMap<usize, Vec<usize>>>,
    /// Sharpness of the generated vectors: mass added to the chosen argmax
    /// before renormalization.
    #[serde(default = "default_concentration")]
    pub concentration: f64,
    /// Fraction of `concentration` additionally tilted toward the true class
    /// regardless of the chosen argmax. With a positive value the true class
    /// tends to rank high even in wrong predictions, the way trained
    /// classifiers behave when their errors are near misses; at 0 errors
    /// carry no signal about the truth.
    #[serde(default = "default_truth_affinity")]
    pub truth_affinity: f64,
}

impl ModalityProfile {
    pub fn new(name: impl Into<String>, accuracy_target: f64) -> Self {
        Self {
            name: name.into(),
            accuracy_target,
            confusion_bias: None,
            concentration: default_concentration(),
            truth_affinity: default_truth_affinity(),
        }
    }

    fn validate(&self, class_count: usize) -> Result<(), SynthError> {
        if !self.accuracy_target.is_finite()
            || self.accuracy_target <= 0.0
            || self.accuracy_target > 1.0
        {
            return Err(SynthError::InvalidAccuracy {
                name: self.name.clone(),
                value: self.accuracy_target,
            });
        }
        if !self.concentration.is_finite() || self.concentration <= 0.0 {
            return Err(SynthError::InvalidConcentration {
                name: self.name.clone(),
                value: self.concentration,
            });
        }
        if !self.truth_affinity.is_finite() || self.truth_affinity < 0.0 {
            return Err(SynthError::InvalidAffinity {
                name: self.name.clone(),
                value: self.truth_affinity,
            });
        }
        if let Some(bias) = &self.confusion_bias {
            for (&class, targets) in bias {
                if class >= class_count {
                    return Err(SynthError::BiasOutOfRange {
                        name: self.name.clone(),
                        class,
                        target: class,
                        d: class_count,
                    });
                }
                if targets.is_empty() {
                    return Err(SynthError::BiasEmpty {
                        name: self.name.clone(),
                        class,
                    });
                }
                for &target in targets {
                    if target >= class_count {
                        return Err(SynthError::BiasOutOfRange {
                            name: self.name.clone(),
                            class,
                            target,
                            d: class_count,
                        });
                    }
                    if target == class {
                        return Err(SynthError::BiasIsTrueClass {
                            name: self.name.clone(),
                            class,
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

/// Full description of one synthetic dump.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub class_count: usize,
    pub sample_count: usize,
    pub seed: u64,
    pub profiles: Vec<ModalityProfile>,
    /// Optional per-class sampling weights for the true label; uniform when
    /// absent.
    pub class_weights: Option<Vec<f64>>,
}

/// A generated dump, ready to serialize or evaluate in memory.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedDump {
    pub records: Vec<PredictionRecord>,
    /// True label of each sample, by sample index.
    pub labels: Vec<usize>,
    /// Occurrences of each class among the generated labels.
    pub class_counts: Vec<u64>,
    pub class_count: usize,
}

impl GeneratedDump {
    /// Line-delimited dump in the ingestion format.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for record in &self.records {
            out.push_str(&serde_json::to_string(record).expect("record serialization"));
            out.push('\n');
        }
        out
    }

    /// Catalog for the generated classes; train counts are the generated
    /// label occurrences.
    pub fn to_catalog_csv(&self) -> String {
        let width = (self.class_count.saturating_sub(1)).to_string().len();
        let mut out = String::from("class_index,class_name,train_count\n");
        for (i, count) in self.class_counts.iter().enumerate() {
            let _ = writeln!(out, "{i},class_{i:0width$},{count}");
        }
        out
    }
}

// splitmix64 finalizer; decorrelates per-sample seeds drawn from (seed, index).
fn mix_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn draw_label(rng: &mut ChaCha8Rng, cumulative: &[f64]) -> usize {
    let x = rng.random::<f64>() * cumulative[cumulative.len() - 1];
    match cumulative.iter().position(|&c| x < c) {
        Some(i) => i,
        None => cumulative.len() - 1,
    }
}

/// A random simplex point sharpened toward `chosen`; the returned vector's
/// argmax is `chosen` by construction, for any concentration.
fn generate_vector(
    rng: &mut ChaCha8Rng,
    class_count: usize,
    chosen: usize,
    truth: usize,
    concentration: f64,
    truth_affinity: f64,
) -> Vec<f64> {
    // Exponential draws normalized to the simplex give a uniform point.
    let mut v: Vec<f64> = (0..class_count)
        .map(|_| -(1.0 - rng.random::<f64>()).ln())
        .collect();
    let sum: f64 = v.iter().sum();
    if sum > 0.0 {
        for x in v.iter_mut() {
            *x /= sum;
        }
    } else {
        v.fill(1.0 / class_count as f64);
    }
    let tilt = concentration * truth_affinity;
    if tilt > 0.0 {
        v[truth] += tilt;
        for x in v.iter_mut() {
            *x /= 1.0 + tilt;
        }
    }
    v[chosen] += concentration;
    for x in v.iter_mut() {
        *x /= 1.0 + concentration;
    }
    // The chosen class holds the most added mass but a heavy-tailed base draw
    // can still top it; swapping keeps the vector on the simplex while
    // guaranteeing the argmax.
    let mut argmax = 0;
    for j in 1..class_count {
        if v[j] > v[argmax] {
            argmax = j;
        }
    }
    if argmax != chosen {
        v.swap(argmax, chosen);
    }
    v
}

/// Generates the dump described by `spec`. Deterministic in `spec`.
pub fn generate(spec: &SynthSpec) -> Result<GeneratedDump, SynthError> {
    let d = spec.class_count;
    if d < 2 {
        return Err(SynthError::TooFewClasses(d));
    }
    if spec.sample_count == 0 {
        return Err(SynthError::NoSamples);
    }
    if spec.profiles.is_empty() {
        return Err(SynthError::NoProfiles);
    }
    for (i, profile) in spec.profiles.iter().enumerate() {
        profile.validate(d)?;
        if spec.profiles[..i].iter().any(|p| p.name == profile.name) {
            return Err(SynthError::DuplicateProfile {
                name: profile.name.clone(),
            });
        }
    }
    let cumulative: Vec<f64> = match &spec.class_weights {
        Some(weights) => {
            if weights.len() != d {
                return Err(SynthError::WeightsLength {
                    expected: d,
                    got: weights.len(),
                });
            }
            let mut total = 0.0;
            let mut cumulative = Vec::with_capacity(d);
            for (index, &w) in weights.iter().enumerate() {
                if !w.is_finite() || w < 0.0 {
                    return Err(SynthError::InvalidWeights { index, value: w });
                }
                total += w;
                cumulative.push(total);
            }
            if total <= 0.0 {
                return Err(SynthError::InvalidWeights {
                    index: 0,
                    value: 0.0,
                });
            }
            cumulative
        }
        None => (1..=d).map(|i| i as f64).collect(),
    };

    let id_width = (spec.sample_count.saturating_sub(1)).to_string().len().max(4);
    let mut records = Vec::with_capacity(spec.sample_count * spec.profiles.len());
    let mut labels = Vec::with_capacity(spec.sample_count);
    let mut class_counts = vec![0u64; d];

    for index in 0..spec.sample_count {
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(spec.seed, index as u64));
        let label = draw_label(&mut rng, &cumulative);
        labels.push(label);
        class_counts[label] += 1;
        let sample_id = format!("s{index:0id_width$}");
        for profile in &spec.profiles {
            let correct = rng.random::<f64>() < profile.accuracy_target;
            let chosen = if correct {
                label
            } else {
                match profile
                    .confusion_bias
                    .as_ref()
                    .and_then(|bias| bias.get(&label))
                {
                    Some(targets) => targets[rng.random_range(0..targets.len())],
                    None => {
                        // Uniform over the d-1 wrong classes.
                        let pick = rng.random_range(0..d - 1);
                        if pick >= label {
                            pick + 1
                        } else {
                            pick
                        }
                    }
                }
            };
            let scores = generate_vector(
                &mut rng,
                d,
                chosen,
                label,
                profile.concentration,
                profile.truth_affinity,
            );
            records.push(PredictionRecord {
                sample_id: sample_id.clone(),
                modality: profile.name.clone(),
                label: label as i64,
                scores,
            });
        }
    }

    Ok(GeneratedDump {
        records,
        labels,
        class_counts,
        class_count: d,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(profiles: Vec<ModalityProfile>, n: usize, seed: u64) -> SynthSpec {
        SynthSpec {
            class_count: 10,
            sample_count: n,
            seed,
            profiles,
            class_weights: None,
        }
    }

    fn empirical_accuracy(dump: &GeneratedDump, modality: &str) -> f64 {
        let mut hits = 0usize;
        let mut total = 0usize;
        for record in dump.records.iter().filter(|r| r.modality == modality) {
            total += 1;
            let mut argmax = 0;
            for j in 1..record.scores.len() {
                if record.scores[j] > record.scores[argmax] {
                    argmax = j;
                }
            }
            if argmax == record.label as usize {
                hits += 1;
            }
        }
        hits as f64 / total as f64
    }

    #[test]
    fn perfect_accuracy_is_forced_by_construction() {
        let dump = generate(&spec(
            vec![ModalityProfile {
                concentration: 16.0,
                ..ModalityProfile::new("perfect", 1.0)
            }],
            500,
            11,
        ))
        .unwrap();
        assert_eq!(empirical_accuracy(&dump, "perfect"), 1.0);
    }

    #[test]
    fn empirical_accuracy_tracks_target() {
        let dump = generate(&spec(
            vec![ModalityProfile::new("m", 0.6)],
            10_000,
            42,
        ))
        .unwrap();
        let acc = empirical_accuracy(&dump, "m");
        assert!((acc - 0.6).abs() <= 0.02, "empirical accuracy {acc}");
    }

    #[test]
    fn disjoint_confusion_biases_rarely_collide() {
        let d = 10;
        let bias = |offsets: [usize; 2]| -> BTreeMap<usize, Vec<usize>> {
            (0..d)
                .map(|t| (t, offsets.iter().map(|o| (t + o) % d).collect()))
                .collect()
        };
        let profiles = vec![
            ModalityProfile {
                confusion_bias: Some(bias([1, 2])),
                ..ModalityProfile::new("a", 0.6)
            },
            ModalityProfile {
                confusion_bias: Some(bias([3, 4])),
                ..ModalityProfile::new("b", 0.6)
            },
        ];
        let dump = generate(&SynthSpec {
            class_count: d,
            sample_count: 10_000,
            seed: 7,
            profiles,
            class_weights: None,
        })
        .unwrap();

        let mut err = [0usize; 2];
        let mut same_wrong = 0usize;
        for pair in dump.records.chunks(2) {
            let label = pair[0].label as usize;
            let argmax = |scores: &[f64]| {
                let mut best = 0;
                for j in 1..scores.len() {
                    if scores[j] > scores[best] {
                        best = j;
                    }
                }
                best
            };
            let a = argmax(&pair[0].scores);
            let b = argmax(&pair[1].scores);
            if a != label {
                err[0] += 1;
            }
            if b != label {
                err[1] += 1;
            }
            if a != label && b != label && a == b {
                same_wrong += 1;
            }
        }
        let n = dump.labels.len() as f64;
        let bound = (err[0] as f64 / n) * (err[1] as f64 / n) + 0.02;
        let overlap = same_wrong as f64 / n;
        assert!(
            overlap < bound,
            "error overlap {overlap} not below bound {bound}"
        );
    }

    #[test]
    fn identical_specs_give_byte_identical_dumps() {
        let make = || {
            generate(&spec(
                vec![
                    ModalityProfile::new("a", 0.7),
                    ModalityProfile::new("b", 0.9),
                ],
                200,
                99,
            ))
            .unwrap()
        };
        let first = make();
        let second = make();
        assert_eq!(first.to_jsonl(), second.to_jsonl());
        assert_eq!(first.to_catalog_csv(), second.to_catalog_csv());
        let other_seed = generate(&spec(
            vec![
                ModalityProfile::new("a", 0.7),
                ModalityProfile::new("b", 0.9),
            ],
            200,
            100,
        ))
        .unwrap();
        assert_ne!(first.to_jsonl(), other_seed.to_jsonl());
    }

    #[test]
    fn generated_vectors_lie_on_the_simplex() {
        let dump = generate(&spec(
            vec![ModalityProfile {
                concentration: 0.5,
                ..ModalityProfile::new("m", 0.5)
            }],
            300,
            5,
        ))
        .unwrap();
        for record in &dump.records {
            let sum: f64 = record.scores.iter().sum();
            assert!((sum - 1.0).abs() < 1e-9, "sum {sum}");
            assert!(record.scores.iter().all(|&v| v >= 0.0));
        }
    }

    #[test]
    fn class_weights_shift_label_frequencies() {
        let mut weights = vec![1.0; 10];
        weights[0] = 30.0;
        let dump = generate(&SynthSpec {
            class_weights: Some(weights),
            ..spec(vec![ModalityProfile::new("m", 0.8)], 2_000, 3)
        })
        .unwrap();
        assert!(dump.class_counts[0] > 1_000, "{:?}", dump.class_counts);
    }

    #[test]
    fn invalid_profiles_are_rejected() {
        assert!(matches!(
            generate(&spec(vec![ModalityProfile::new("m", 0.0)], 10, 1)),
            Err(SynthError::InvalidAccuracy { .. })
        ));
        assert!(matches!(
            generate(&spec(vec![ModalityProfile::new("m", 1.5)], 10, 1)),
            Err(SynthError::InvalidAccuracy { .. })
        ));
        assert!(matches!(
            generate(&spec(
                vec![ModalityProfile {
                    concentration: 0.0,
                    ..ModalityProfile::new("m", 0.5)
                }],
                10,
                1
            )),
            Err(SynthError::InvalidConcentration { .. })
        ));
        let mut bias = BTreeMap::new();
        bias.insert(0usize, vec![0usize]);
        assert!(matches!(
            generate(&spec(
                vec![ModalityProfile {
                    confusion_bias: Some(bias),
                    ..ModalityProfile::new("m", 0.5)
                }],
                10,
                1
            )),
            Err(SynthError::BiasIsTrueClass { .. })
        ));
        assert!(matches!(
            generate(&SynthSpec {
                class_count: 1,
                ..spec(vec![ModalityProfile::new("m", 0.5)], 10, 1)
            }),
            Err(SynthError::TooFewClasses(1))
        ));
        assert!(matches!(
            generate(&spec(
                vec![
                    ModalityProfile::new("m", 0.5),
                    ModalityProfile::new("m", 0.6)
                ],
                10,
                1
            )),
            Err(SynthError::DuplicateProfile { .. })
        ));
    }

    #[test]
    fn dump_parses_through_ingestion() {
        use crate::ingest::{parse_predictions, LoadOptions};
        let dump = generate(&spec(
            vec![
                ModalityProfile::new("a", 0.7),
                ModalityProfile::new("b", 0.8),
            ],
            50,
            13,
        ))
        .unwrap();
        let parsed =
            parse_predictions(&dump.to_jsonl(), "synth", 10, &LoadOptions::default()).unwrap();
        assert_eq!(parsed.samples.len(), 50);
        assert_eq!(parsed.registry.names(), &["a".to_string(), "b".to_string()]);
    }
}
