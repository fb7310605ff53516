//! `latefuse` — evaluate decision-level fusion strategies over multimodal
//! prediction dumps.
//!
//! Subcommands: `synth` generates a seeded synthetic dump, `eval` runs the
//! fusion-method-by-modality-count grid, `compare` tabulates per-class
//! accuracy of the best single view against multimodal product fusion.

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use latefuse::{
    fnv1a64, generate, parse_catalog, parse_predictions, per_class_report,
    render_comparison_csv, render_comparison_markdown, run_plan, write_report_files, CatalogFile,
    ClassCatalog, EvaluationReport, ExperimentPlan, FieldPolicy, FusionConfig, FusionMethod,
    GroupSelector, InputDigest, LoadOptions, MissingPolicy, ModalityProfile, PredictionDump,
    ReportFormat, SynthSpec,
};
use std::path::{Path, PathBuf};

/// Environment variable naming the default output directory.
const OUT_DIR_ENV: &str = "LATEFUSE_OUT_DIR";

#[derive(Parser)]
#[command(
    name = "latefuse",
    about = "Late fusion of multi-classifier probability estimates: synthesize dumps, evaluate fusion grids, compare views",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded synthetic prediction dump and its class catalog.
    Synth(SynthArgs),
    /// Evaluate fusion methods over modality subsets and emit the report grid.
    Eval(EvalArgs),
    /// Per-class comparison of a single view against multimodal product fusion.
    Compare(CompareArgs),
}

#[derive(Args)]
struct SynthArgs {
    /// Number of classes (>= 2).
    #[arg(long, default_value_t = 10)]
    classes: usize,
    /// Number of samples.
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    /// Generator seed; identical seeds give byte-identical dumps.
    #[arg(long)]
    seed: u64,
    /// Modality spec `name:accuracy[:concentration[:truth_affinity]]`,
    /// repeatable.
    #[arg(long = "modality", value_name = "SPEC")]
    modalities: Vec<String>,
    /// JSON file with an array of modality profiles (full control, including
    /// confusion biases).
    #[arg(long, value_name = "FILE", conflicts_with = "modalities")]
    profiles: Option<PathBuf>,
    /// Comma-separated per-class label weights (defaults to uniform).
    #[arg(long, value_delimiter = ',', value_name = "W")]
    class_weights: Option<Vec<f64>>,
    /// Output directory (default: $LATEFUSE_OUT_DIR or the working directory).
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct InputArgs {
    /// Prediction dump (line-delimited JSON records).
    #[arg(long)]
    dump: PathBuf,
    /// Class catalog (class_index,class_name,train_count[,group]).
    #[arg(long)]
    catalog: PathBuf,
    /// Accept unknown fields with a warning and evaluate samples with missing
    /// modalities on whatever they carry.
    #[arg(long)]
    lenient: bool,
    /// Rescale every score vector to unit sum instead of enforcing the
    /// tolerance.
    #[arg(long)]
    renormalize: bool,
    /// Allowed deviation of a score vector's sum from 1.
    #[arg(long, default_value_t = latefuse::DEFAULT_TOLERANCE)]
    tolerance: f64,
    /// Count threshold for the rare/common split when the catalog has no
    /// explicit group column (rare when train_count < threshold).
    #[arg(long)]
    group_threshold: Option<u64>,
    /// Worker threads (default: one per logical CPU).
    #[arg(long)]
    threads: Option<usize>,
    /// Output directory (default: $LATEFUSE_OUT_DIR or the working directory).
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Seed of the modality permutation; recorded in the report.
    #[arg(long)]
    seed: u64,
    /// Fusion methods to evaluate (default: all ten).
    #[arg(long, value_delimiter = ',', value_name = "METHOD")]
    methods: Option<Vec<FusionMethod>>,
    /// Modality subset sizes (default: 2,4,8 capped at the dump's modality
    /// count).
    #[arg(long, value_delimiter = ',', value_name = "N")]
    counts: Option<Vec<usize>>,
    /// Top-k depths (default: 1,5 capped at the class count).
    #[arg(long, value_delimiter = ',', value_name = "K")]
    topk: Option<Vec<usize>>,
    /// Class groups to report (default: rare,common,all).
    #[arg(long, value_delimiter = ',', value_name = "GROUP")]
    groups: Option<Vec<GroupSelector>>,
    /// Borda depth k.
    #[arg(long, default_value_t = 5)]
    borda_k: usize,
    /// Reciprocal-rank offset m.
    #[arg(long, default_value_t = 60)]
    rrf_m: u32,
    /// Product-fusion scale gamma.
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    /// Report formats to write.
    #[arg(long, value_delimiter = ',', value_name = "FMT", default_values = ["csv", "markdown"])]
    format: Vec<ReportFormat>,
    /// Also write per-class top-1 accuracies (per_class.csv).
    #[arg(long)]
    per_class: bool,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Seed of the modality permutation; recorded in the report.
    #[arg(long)]
    seed: u64,
    /// Unimodal view to compare against (default: the view with the best
    /// balanced top-1 accuracy).
    #[arg(long)]
    unimodal: Option<String>,
}

fn main() {
    if let Err(err) = run() {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}

fn run() -> Result<()> {
    match Cli::parse().command {
        Command::Synth(args) => run_synth(args),
        Command::Eval(args) => run_eval(args),
        Command::Compare(args) => run_compare(args),
    }
}

fn out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn parse_modality_spec(spec: &str) -> Result<ModalityProfile> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() < 2 || parts.len() > 4 || parts[0].is_empty() {
        bail!("bad modality spec `{spec}`, expected name:accuracy[:concentration[:truth_affinity]]");
    }
    let mut profile = ModalityProfile::new(
        parts[0],
        parts[1]
            .parse::<f64>()
            .with_context(|| format!("bad accuracy in `{spec}`"))?,
    );
    if let Some(conc) = parts.get(2) {
        profile.concentration = conc
            .parse()
            .with_context(|| format!("bad concentration in `{spec}`"))?;
    }
    if let Some(affinity) = parts.get(3) {
        profile.truth_affinity = affinity
            .parse()
            .with_context(|| format!("bad truth_affinity in `{spec}`"))?;
    }
    Ok(profile)
}

fn run_synth(args: SynthArgs) -> Result<()> {
    let profiles: Vec<ModalityProfile> = if let Some(path) = &args.profiles {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text)
            .with_context(|| format!("parsing profiles from {}", path.display()))?
    } else if args.modalities.is_empty() {
        // A serviceable default: two complementary mid-accuracy views.
        vec![
            ModalityProfile::new("front", 0.65),
            ModalityProfile::new("side", 0.6),
        ]
    } else {
        args.modalities
            .iter()
            .map(|s| parse_modality_spec(s))
            .collect::<Result<_>>()?
    };

    let dump = generate(&SynthSpec {
        class_count: args.classes,
        sample_count: args.samples,
        seed: args.seed,
        profiles,
        class_weights: args.class_weights,
    })?;

    let dir = out_dir(args.out_dir);
    std::fs::create_dir_all(&dir)
        .with_context(|| format!("creating output directory {}", dir.display()))?;
    let dump_path = dir.join("dump.jsonl");
    let catalog_path = dir.join("catalog.csv");
    std::fs::write(&dump_path, dump.to_jsonl())
        .with_context(|| format!("writing {}", dump_path.display()))?;
    std::fs::write(&catalog_path, dump.to_catalog_csv())
        .with_context(|| format!("writing {}", catalog_path.display()))?;
    println!(
        "wrote {} ({} samples x {} modalities, {} classes) and {}",
        dump_path.display(),
        args.samples,
        dump.records.len() / args.samples,
        args.classes,
        catalog_path.display()
    );
    Ok(())
}

struct LoadedInputs {
    dump: PredictionDump,
    catalog: ClassCatalog,
    digests: Vec<InputDigest>,
    missing: MissingPolicy,
}

fn load_inputs(args: &InputArgs, needs_groups: bool) -> Result<LoadedInputs> {
    let fields = if args.lenient {
        FieldPolicy::Lenient
    } else {
        FieldPolicy::Strict
    };
    let catalog_text = std::fs::read_to_string(&args.catalog)
        .with_context(|| format!("reading {}", args.catalog.display()))?;
    let catalog_file: CatalogFile =
        parse_catalog(&catalog_text, &args.catalog.display().to_string(), fields)?;
    for warning in &catalog_file.warnings {
        eprintln!("warning: {warning}");
    }
    let catalog = match (&catalog_file.groups, args.group_threshold) {
        (Some(groups), _) => ClassCatalog::with_groups(
            catalog_file.names.clone(),
            catalog_file.train_counts.clone(),
            groups.clone(),
        )?,
        (None, Some(threshold)) => ClassCatalog::with_threshold(
            catalog_file.names.clone(),
            catalog_file.train_counts.clone(),
            threshold,
        )?,
        (None, None) if !needs_groups => ClassCatalog::with_threshold(
            catalog_file.names.clone(),
            catalog_file.train_counts.clone(),
            1,
        )?,
        (None, None) => bail!(
            "{} has no group column; pass --group-threshold to derive the rare/common split, \
             or restrict --groups to `all`",
            args.catalog.display()
        ),
    };

    let dump_text = std::fs::read_to_string(&args.dump)
        .with_context(|| format!("reading {}", args.dump.display()))?;
    let opts = LoadOptions {
        renormalize: args.renormalize,
        fields,
        tolerance: args.tolerance,
    };
    let dump = parse_predictions(
        &dump_text,
        &args.dump.display().to_string(),
        catalog.class_count(),
        &opts,
    )?;
    for warning in &dump.warnings {
        eprintln!("warning: {warning}");
    }

    let file_name = |path: &Path| {
        path.file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string())
    };
    let digests = vec![
        InputDigest {
            name: file_name(&args.dump),
            fnv1a64: fnv1a64(dump_text.as_bytes()),
        },
        InputDigest {
            name: file_name(&args.catalog),
            fnv1a64: fnv1a64(catalog_text.as_bytes()),
        },
    ];
    Ok(LoadedInputs {
        dump,
        catalog,
        digests,
        missing: if args.lenient {
            MissingPolicy::Lenient
        } else {
            MissingPolicy::Strict
        },
    })
}

fn configure_threads(threads: Option<usize>) -> Result<()> {
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring worker threads")?;
    }
    Ok(())
}

fn run_eval(args: EvalArgs) -> Result<()> {
    configure_threads(args.input.threads)?;
    let groups = args
        .groups
        .clone()
        .unwrap_or_else(|| GroupSelector::ALL.to_vec());
    let needs_groups = groups
        .iter()
        .any(|g| !matches!(g, GroupSelector::All));
    let inputs = load_inputs(&args.input, needs_groups)?;

    let available = inputs.dump.registry.len();
    let d = inputs.catalog.class_count();
    let mut plan = ExperimentPlan::new(args.seed, available, d);
    if let Some(methods) = args.methods {
        plan.methods = methods;
    }
    if let Some(counts) = args.counts {
        plan.modality_counts = counts;
    }
    if let Some(topk) = args.topk {
        plan.topk = topk;
    }
    plan.groups = groups;
    plan.config = FusionConfig {
        borda_k: args.borda_k,
        rrf_m: args.rrf_m,
        product_gamma: args.gamma,
        ..FusionConfig::default()
    };
    plan.missing = inputs.missing;
    plan.inputs = inputs.digests;

    let report = run_plan(&plan, &inputs.dump.samples, &inputs.catalog, &inputs.dump.registry)?;
    for excluded in &report.excluded {
        eprintln!(
            "note: excluded sample `{}`: {}",
            excluded.sample_id, excluded.reason
        );
    }

    let dir = out_dir(args.input.out_dir);
    std::fs::create_dir_all(&dir)
        .with_context(|| format!("creating output directory {}", dir.display()))?;
    let written = write_report_files(&dir, &report, &args.format, args.per_class)?;
    println!(
        "evaluated {} samples over {} grid cells ({} modalities, permutation seed {})",
        report.evaluated_samples,
        report.grid.len(),
        available,
        args.seed
    );
    for path in written {
        println!("wrote {}", path.display());
    }
    Ok(())
}

/// Balanced top-1 accuracy of one unimodal configuration, from the report's
/// per-class rows.
fn unimodal_balanced_top1(report: &EvaluationReport, modality: &str) -> Option<f64> {
    let configuration = format!("unimodal:{modality}");
    let rows: Vec<&latefuse::experiment::PerClassRow> = report
        .per_class
        .iter()
        .filter(|r| r.configuration == configuration)
        .collect();
    if rows.is_empty() {
        return None;
    }
    Some(rows.iter().map(|r| r.accuracy).sum::<f64>() / rows.len() as f64)
}

fn run_compare(args: CompareArgs) -> Result<()> {
    configure_threads(args.input.threads)?;
    let inputs = load_inputs(&args.input, false)?;
    let available = inputs.dump.registry.len();
    let d = inputs.catalog.class_count();

    // Product fusion over all modalities is the multimodal reference.
    let mut plan = ExperimentPlan::new(args.seed, available, d);
    plan.methods = vec![FusionMethod::Product];
    plan.modality_counts = vec![available];
    plan.topk = vec![1];
    plan.groups = vec![GroupSelector::All];
    plan.missing = inputs.missing;
    plan.inputs = inputs.digests;
    let report = run_plan(&plan, &inputs.dump.samples, &inputs.catalog, &inputs.dump.registry)?;

    let unimodal = match args.unimodal {
        Some(name) => name,
        None => {
            // Best view by balanced top-1, ties by registry order.
            let mut best: Option<(f64, String)> = None;
            for name in inputs.dump.registry.names() {
                if let Some(acc) = unimodal_balanced_top1(&report, name) {
                    if best.as_ref().is_none_or(|(b, _)| acc > *b) {
                        best = Some((acc, name.clone()));
                    }
                }
            }
            let (acc, name) =
                best.ok_or_else(|| anyhow!("no unimodal accuracies in the report"))?;
            println!("best unimodal view: {name} (balanced top-1 {:.2}%)", 100.0 * acc);
            name
        }
    };

    let rows = per_class_report(&report, &unimodal)?;
    let dir = out_dir(args.input.out_dir);
    std::fs::create_dir_all(&dir)
        .with_context(|| format!("creating output directory {}", dir.display()))?;
    let csv_path = dir.join("comparison.csv");
    let md_path = dir.join("comparison.md");
    std::fs::write(&csv_path, render_comparison_csv(&rows, &unimodal))
        .with_context(|| format!("writing {}", csv_path.display()))?;
    std::fs::write(&md_path, render_comparison_markdown(&rows, &unimodal))
        .with_context(|| format!("writing {}", md_path.display()))?;
    println!(
        "compared `{unimodal}` against product fusion over {} modalities ({} classes)",
        available,
        rows.len()
    );
    println!("wrote {}", csv_path.display());
    println!("wrote {}", md_path.display());
    Ok(())
}
