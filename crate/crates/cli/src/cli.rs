//! Argument parsing and subcommand dispatch.

use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::PathBuf;

use anyhow::{Context as _, Result};
use armad_core::synthetic::{generate, SyntheticConfig};
use armad_core::{Aggregation, Detector, InterestMode, SupportThresholds, Threshold};
use clap::builder::{PossibleValuesParser, TypedValueParser as _};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::{ContextSource, Outputs, RunConfig};
use crate::convert::{self, Format};
use crate::output::{write_atomic, Batch};
use crate::pipeline::{self, to_json};
use crate::sweep::{self, Cell};

#[derive(Parser, Debug)]
#[command(
    name = "armad",
    version,
    about = "Rank anomalous objects with rare and frequent association rules"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Score one context with one detector and write the requested artifacts
    Run(RunArgs),
    /// Evaluate a grid of (support, confidence) cells against labels
    Sweep(SweepArgs),
    /// Convert a wide 0/1 matrix or a transaction list to pair-list CSV
    Convert(ConvertArgs),
    /// Generate a synthetic context with injected attacks
    Synth(SynthArgs),
}

const DETECTORS: [&str; 5] = ["vr-arm", "vf-arm", "fpof", "avf", "od"];

fn detector_parser() -> impl clap::builder::TypedValueParser<Value = Detector> {
    PossibleValuesParser::new(DETECTORS).map(|s| s.parse::<Detector>().expect("listed value"))
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum AggregationArg {
    Sum,
    Mean,
}

impl From<AggregationArg> for Aggregation {
    fn from(a: AggregationArg) -> Self {
        match a {
            AggregationArg::Sum => Aggregation::Sum,
            AggregationArg::Mean => Aggregation::Mean,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum InterestArg {
    LiftNormalized,
    Literal,
}

impl From<InterestArg> for InterestMode {
    fn from(a: InterestArg) -> Self {
        match a {
            InterestArg::LiftNormalized => InterestMode::LiftNormalized,
            InterestArg::Literal => InterestMode::Literal,
        }
    }
}

/// Inputs and detector settings shared by `run` and `sweep`.
#[derive(Args, Debug, Default)]
pub struct ShapeArgs {
    /// Context file in pair-list CSV, optionally tagged as TAG=PATH (repeatable)
    #[arg(long = "context", value_name = "[TAG=]PATH")]
    pub contexts: Vec<ContextSource>,
    /// Outer-join all contexts on tid, prefixing items with their tag
    #[arg(long)]
    pub join: bool,
    #[arg(long, value_parser = detector_parser())]
    pub detector: Option<Detector>,
    /// Largest rule or pattern cardinality [default: 4, FPOF: 5]
    #[arg(long)]
    pub max_len: Option<usize>,
    #[arg(long, value_enum)]
    pub aggregation: Option<AggregationArg>,
    #[arg(long, value_enum)]
    pub interest_mode: Option<InterestArg>,
    /// Ground truth: one anomalous tid per line
    #[arg(long, value_name = "PATH")]
    pub labels: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
pub struct ThresholdArgs {
    /// Minimum support, percent of objects
    #[arg(long, value_name = "PCT", conflicts_with = "min_supp_abs")]
    pub min_supp: Option<f64>,
    /// Minimum support, object count
    #[arg(long, value_name = "N")]
    pub min_supp_abs: Option<usize>,
    /// Maximum support (exclusive), percent of objects
    #[arg(long, value_name = "PCT", conflicts_with = "max_supp_abs")]
    pub max_supp: Option<f64>,
    /// Maximum support (exclusive), object count
    #[arg(long, value_name = "N")]
    pub max_supp_abs: Option<usize>,
    /// Minimum confidence, percent
    #[arg(long, value_name = "PCT")]
    pub min_conf: Option<f64>,
}

impl ThresholdArgs {
    fn resolve(&self) -> SupportThresholds {
        let pick = |pct: Option<f64>, abs: Option<usize>| {
            pct.map(Threshold::Percent).or(abs.map(Threshold::Absolute))
        };
        SupportThresholds {
            min_supp: pick(self.min_supp, self.min_supp_abs),
            max_supp: pick(self.max_supp, self.max_supp_abs),
            min_conf: self.min_conf,
        }
    }
}

#[derive(Args, Debug, Default)]
pub struct RunArgs {
    /// JSON run configuration; replaces every other flag
    #[arg(long, value_name = "PATH", conflicts_with_all = [
        "contexts", "join", "detector", "max_len", "aggregation", "interest_mode", "labels",
        "min_supp", "min_supp_abs", "max_supp", "max_supp_abs", "min_conf",
        "ranking", "rules", "report", "band", "explain_top_k", "explain_out", "manifest",
    ])]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub shape: ShapeArgs,
    #[command(flatten)]
    pub thresholds: ThresholdArgs,
    /// Ranking CSV: rank,tid,score,n_matched_rules
    #[arg(long, value_name = "PATH")]
    pub ranking: Option<PathBuf>,
    /// Rule CSV: kind,antecedent,consequent,supp_abs,confidence,lift
    #[arg(long, value_name = "PATH")]
    pub rules: Option<PathBuf>,
    /// Evaluation report JSON (needs --labels)
    #[arg(long, value_name = "PATH")]
    pub report: Option<PathBuf>,
    /// Band diagram SVG (needs --labels)
    #[arg(long, value_name = "PATH")]
    pub band: Option<PathBuf>,
    /// Explain the top K objects
    #[arg(long, value_name = "K")]
    pub explain_top_k: Option<usize>,
    /// Write explanations here instead of stdout
    #[arg(long, value_name = "PATH")]
    pub explain_out: Option<PathBuf>,
    /// Write the run manifest here instead of stderr
    #[arg(long, value_name = "PATH")]
    pub manifest: Option<PathBuf>,
}

fn read_config(path: &PathBuf) -> Result<RunConfig> {
    let f = File::open(path).with_context(|| format!("opening config {}", path.display()))?;
    serde_json::from_reader(BufReader::new(f))
        .with_context(|| format!("parsing config {}", path.display()))
}

fn shape_config(
    shape: &ShapeArgs,
    thresholds: SupportThresholds,
    outputs: Outputs,
) -> Result<RunConfig> {
    let detector = shape
        .detector
        .ok_or_else(|| armad_core::Error::Config("--detector is required".into()))?;
    Ok(RunConfig {
        contexts: shape.contexts.clone(),
        join: shape.join,
        detector,
        thresholds,
        max_len: shape.max_len,
        aggregation: shape.aggregation.map(Into::into).unwrap_or_default(),
        interest_mode: shape.interest_mode.map(Into::into).unwrap_or_default(),
        labels_path: shape.labels.clone(),
        outputs,
    })
}

impl RunArgs {
    pub fn to_config(&self) -> Result<RunConfig> {
        if let Some(p) = &self.config {
            return read_config(p);
        }
        let outputs = Outputs {
            ranking_csv: self.ranking.clone(),
            rules_csv: self.rules.clone(),
            report_json: self.report.clone(),
            band_svg: self.band.clone(),
            explain_top_k: self.explain_top_k.unwrap_or(0),
            explain_out: self.explain_out.clone(),
            manifest: self.manifest.clone(),
        };
        shape_config(&self.shape, self.thresholds.resolve(), outputs)
    }
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// JSON run configuration used as the base of every cell
    #[arg(long, value_name = "PATH", conflicts_with_all = [
        "contexts", "join", "detector", "max_len", "aggregation", "interest_mode", "labels",
    ])]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub shape: ShapeArgs,
    /// Cells as SUPPxCONF in percent, comma separated, e.g. 0.05x100,5x100
    #[arg(long, value_name = "CELLS", value_delimiter = ',', conflicts_with_all = ["supp", "conf"])]
    pub grid: Vec<Cell>,
    /// Support values in percent; crossed with --conf
    #[arg(long, value_name = "PCT", value_delimiter = ',')]
    pub supp: Vec<f64>,
    /// Confidence values in percent
    #[arg(long, value_name = "PCT", value_delimiter = ',')]
    pub conf: Vec<f64>,
    /// Directory for per-cell reports and summary.json
    #[arg(long, value_name = "DIR")]
    pub out_dir: PathBuf,
    /// Write the sweep manifest here instead of stderr
    #[arg(long, value_name = "PATH")]
    pub manifest: Option<PathBuf>,
}

impl SweepArgs {
    pub fn to_config(&self) -> Result<RunConfig> {
        let mut base = match &self.config {
            Some(p) => read_config(p)?,
            None => shape_config(
                &self.shape,
                SupportThresholds::default(),
                Outputs::default(),
            )?,
        };
        base.thresholds = SupportThresholds::default();
        base.outputs = Outputs::default();
        Ok(base)
    }

    pub fn cells(&self) -> Vec<Cell> {
        if self.grid.is_empty() {
            sweep::product(&self.supp, &self.conf)
        } else {
            self.grid.clone()
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FormatArg {
    Matrix,
    Transactions,
}

#[derive(Args, Debug)]
pub struct ConvertArgs {
    #[arg(long, value_enum)]
    pub from: FormatArg,
    #[arg(long, short, value_name = "PATH")]
    pub input: PathBuf,
    #[arg(long, short, value_name = "PATH")]
    pub output: PathBuf,
    /// Matrix input: name of the tid column [default: first column]
    #[arg(long, value_name = "NAME")]
    pub tid_column: Option<String>,
    /// Field delimiter of the input
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10_000)]
    pub background: usize,
    #[arg(long, default_value_t = 50)]
    pub items: usize,
    #[arg(long, default_value_t = 20)]
    pub patterns: usize,
    #[arg(long, default_value_t = 10)]
    pub injected: usize,
    /// Probability that a background object keeps each item of its pattern
    #[arg(long, default_value_t = 0.9)]
    pub keep_prob: f64,
    /// Context output, pair-list CSV
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
    /// Tids of the injected objects, one per line
    #[arg(long, value_name = "PATH")]
    pub labels_out: PathBuf,
}

fn emit_manifest(json: &str) {
    eprint!("{json}");
}

pub fn run(args: &RunArgs) -> Result<()> {
    let cfg = args.to_config()?;
    let outcome = pipeline::run(&cfg)?;
    if let Some(text) = outcome.explanations {
        io::stdout().write_all(text.as_bytes())?;
    }
    if cfg.outputs.manifest.is_none() {
        emit_manifest(&to_json(&outcome.manifest)?);
    }
    Ok(())
}

pub fn sweep(args: &SweepArgs) -> Result<()> {
    let base = args.to_config()?;
    let outcome = sweep::sweep(
        &base,
        &args.cells(),
        &args.out_dir,
        args.manifest.as_deref(),
    )?;
    if args.manifest.is_none() {
        emit_manifest(&to_json(&outcome.manifest)?);
    }
    let b = &outcome.summary.best_ndcg;
    println!(
        "best nDCG {:.4} at {} ({})",
        b.report.ndcg,
        b.cell,
        b.file.display()
    );
    Ok(())
}

pub fn convert(args: &ConvertArgs) -> Result<()> {
    if !args.delimiter.is_ascii() {
        return Err(
            armad_core::Error::Config("delimiter must be one ASCII character".into()).into(),
        );
    }
    let opts = convert::Options {
        format: match args.from {
            FormatArg::Matrix => Format::Matrix,
            FormatArg::Transactions => Format::Transactions,
        },
        delimiter: args.delimiter as u8,
        tid_column: args.tid_column.clone(),
    };
    let input =
        File::open(&args.input).with_context(|| format!("opening {}", args.input.display()))?;
    let mut buf = Vec::new();
    let stats = convert::convert(BufReader::new(input), &mut buf, &opts)
        .with_context(|| format!("converting {}", args.input.display()))?;
    write_atomic(&args.output, &buf)?;
    if !stats.empty_objects.is_empty() {
        eprintln!(
            "warning: {} objects have no items and were dropped: {}",
            stats.empty_objects.len(),
            stats.empty_objects.join(", ")
        );
    }
    eprint!("{}", to_json(&stats)?);
    Ok(())
}

pub fn synth(args: &SynthArgs) -> Result<()> {
    if !(0.0..=1.0).contains(&args.keep_prob) {
        return Err(armad_core::Error::Config("--keep-prob must lie in [0, 1]".into()).into());
    }
    if args.items < 3 {
        return Err(armad_core::Error::Config("--items must be at least 3".into()).into());
    }
    let cfg = SyntheticConfig {
        background: args.background,
        items: args.items,
        patterns: args.patterns.max(1),
        injected: args.injected,
        keep_prob: args.keep_prob,
        seed: args.seed,
        ..Default::default()
    };
    let data = generate(&cfg);
    let mut ctx = Vec::new();
    armad_core::ingest::write_pairs(&data.context, &mut ctx)?;
    let mut labels = data.attacks.join("\n");
    labels.push('\n');
    let mut batch = Batch::default();
    batch.add(&args.out, ctx);
    batch.add(&args.labels_out, labels);
    batch.commit()?;
    Ok(())
}

pub fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Run(a) => run(a),
        Command::Sweep(a) => sweep(a),
        Command::Convert(a) => convert(a),
        Command::Synth(a) => synth(a),
    }
}
