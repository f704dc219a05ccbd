//! Command-line surface of the `biasaudit` binary.
//!
//! Every subcommand reads plain input files and writes fixed file names into
//! the `--out` directory (see [`crate::report::artifact`]). Settings come from
//! an optional TOML or JSON `--config` file; flags win over it.
//!
//! Exit codes: 0 on success, 1 on validation errors (bad or inconsistent
//! inputs), 2 on runtime errors. Errors are also written to stderr as one
//! JSON record per line.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::context::ContextFilter;
use crate::cooc::{
    cooc_counts, per_image_ratio, per_object_bias, BiasMethod, CoocSummary, Leakage, ObjectBias,
};
use crate::dataset::{
    load_captions, load_contexts, CaptionRecord, ContextMap, LmSidecar, Source, VisualContext,
};
use crate::distance::{aggregate_distance_table, DistanceInputs, Level};
use crate::error::{Error, Result};
use crate::estimate::{estimation_report, EstimateOptions, DEFAULT_TIE_EPSILON};
use crate::jsonl;
use crate::lexicon::{GenderClass, GenderLexicon};
use crate::report::{self, artifact, build_report, TableKind};
use crate::revision::{score_dataset, summarize, ScoreOptions, ScoredCaption, Sidecars, Strategy};
use crate::text_only::{load_text_records, text_only_score, DEFAULT_KEYWORD_CONFIDENCE};
use crate::validate::{validate_inputs, ValidationInputs};
use crate::vectors::EmbeddingStore;

pub const THREADS_ENV: &str = "BIASAUDIT_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "biasaudit",
    version,
    about = "Gender bias audit for caption corpora"
)]
pub struct Cli {
    /// Lexicon JSON file (defaults to the bundled lexicon).
    #[arg(long, global = true)]
    pub lexicon: Option<PathBuf>,

    /// TOML or JSON settings file; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Worker threads for per-record work.
    #[arg(long, global = true, env = THREADS_ENV)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Threshold, vote and trim raw detector output to at most k objects per image.
    FilterContext(FilterArgs),
    /// Cosine similarity between gender terms and objects or captions.
    Distance(DistanceArgs),
    /// Belief-revision gender score per caption and per gender.
    Score(ScoreArgs),
    /// Predict the gender of masked captions.
    Estimate(EstimateArgs),
    /// Count gendered captions, overall and per object.
    Cooc(CoocArgs),
    /// Compare model and human gender counts.
    Leakage(LeakageArgs),
    /// Assemble CSV and JSON tables from a run directory.
    Report(ReportArgs),
    /// Check input schemas and sidecar key coverage.
    Validate(ValidateArgs),
    /// Gender score for free text with a keyword as context.
    TextScore(TextArgs),
}

#[derive(Debug, Args)]
pub struct FilterArgs {
    /// Raw contexts JSONL.
    #[arg(long)]
    pub contexts: PathBuf,
    /// Word vectors used to merge near-duplicate labels.
    #[arg(long)]
    pub vectors: Option<PathBuf>,
    #[arg(long)]
    pub conf_threshold: Option<f64>,
    #[arg(long)]
    pub vote_threshold: Option<f64>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LevelArg {
    Word,
    Sentence,
}

impl From<LevelArg> for Level {
    fn from(l: LevelArg) -> Self {
        match l {
            LevelArg::Word => Level::Word,
            LevelArg::Sentence => Level::Sentence,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SourceArg {
    Model,
    Human,
    All,
}

impl SourceArg {
    fn keeps(self, s: Source) -> bool {
        match self {
            SourceArg::Model => s == Source::Model,
            SourceArg::Human => s == Source::Human,
            SourceArg::All => true,
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            SourceArg::Model => "model",
            SourceArg::Human => "human",
            SourceArg::All => "all",
        }
    }
}

#[derive(Debug, Args)]
pub struct DistanceArgs {
    #[arg(long, value_enum)]
    pub level: LevelArg,
    /// GloVe-style word vectors (word level).
    #[arg(long)]
    pub vectors: Option<PathBuf>,
    /// Sentence embedding sidecar (sentence level).
    #[arg(long, alias = "sidecar-emb")]
    pub sidecar: Option<PathBuf>,
    #[arg(long)]
    pub captions: PathBuf,
    #[arg(long)]
    pub contexts: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "all")]
    pub source: SourceArg,
    /// Length of the closest-subject rankings.
    #[arg(long)]
    pub top_n: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SidecarArgs {
    #[arg(long)]
    pub captions: PathBuf,
    #[arg(long)]
    pub contexts: Option<PathBuf>,
    #[arg(long)]
    pub sidecar_emb: PathBuf,
    #[arg(long)]
    pub sidecar_lm: PathBuf,
    /// `max_sim` or `mean_topk`.
    #[arg(long)]
    pub strategy: Option<Strategy>,
    /// Also score the `person` fill of masked captions.
    #[arg(long)]
    pub include_neutral: bool,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[command(flatten)]
    pub inputs: SidecarArgs,
    #[arg(long, value_enum, default_value = "all")]
    pub source: SourceArg,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub inputs: SidecarArgs,
    /// Score differences at or below this predict neutral.
    #[arg(long)]
    pub tie_epsilon: Option<f64>,
    /// JSONL of external predictions `{"caption_id", "predicted"}` to compare against.
    #[arg(long)]
    pub compare: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CoocArgs {
    #[arg(long)]
    pub captions: PathBuf,
    #[arg(long, value_enum, default_value = "all")]
    pub source: SourceArg,
    /// Object to break counts down by; repeatable.
    #[arg(long = "object")]
    pub objects: Vec<String>,
    /// Also break down by every label in this contexts file.
    #[arg(long)]
    pub contexts: Option<PathBuf>,
    /// `scored.jsonl` from `score`, for gender-score rows per object.
    #[arg(long)]
    pub scored: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct LeakageArgs {
    /// `cooc_summary.json` of model captions.
    #[arg(long)]
    pub model: PathBuf,
    /// `cooc_summary.json` of human references.
    #[arg(long)]
    pub human: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Directory holding upstream artifacts.
    #[arg(long)]
    pub run: PathBuf,
    /// Table to build; repeatable. Defaults to every table with inputs present.
    #[arg(long = "table")]
    pub tables: Vec<String>,
    /// Row label, e.g. the captioning model's name.
    #[arg(long)]
    pub label: Option<String>,
    /// Defaults to the run directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub captions: Option<PathBuf>,
    #[arg(long)]
    pub contexts: Option<PathBuf>,
    #[arg(long)]
    pub vectors: Option<PathBuf>,
    #[arg(long)]
    pub sidecar_emb: Option<PathBuf>,
    #[arg(long)]
    pub sidecar_lm: Option<PathBuf>,
    /// Text-only records.
    #[arg(long)]
    pub text: Option<PathBuf>,
    #[arg(long)]
    pub include_neutral: bool,
    /// Also write `validation.json` here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TextArgs {
    #[arg(long)]
    pub records: PathBuf,
    #[arg(long)]
    pub sidecar_emb: PathBuf,
    #[arg(long)]
    pub sidecar_lm: PathBuf,
    /// Confidence for keywords that carry none.
    #[arg(long)]
    pub keyword_confidence: Option<f64>,
    #[arg(long)]
    pub tie_epsilon: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

/// Settings file contents. Every field is optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub lexicon: Option<PathBuf>,
    pub threads: Option<usize>,
    pub conf_threshold: Option<f64>,
    pub vote_threshold: Option<f64>,
    pub k: Option<usize>,
    pub top_n: Option<usize>,
    pub strategy: Option<Strategy>,
    pub include_neutral: Option<bool>,
    pub tie_epsilon: Option<f64>,
    pub keyword_confidence: Option<f64>,
    pub label: Option<String>,
}

impl Config {
    /// Parse JSON when the extension is `.json`, TOML otherwise.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let parsed = if path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("json"))
        {
            serde_json::from_str(&text).map_err(|e| e.to_string())
        } else {
            toml::from_str(&text).map_err(|e| e.to_string())
        };
        parsed.map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}

const DEFAULT_TOP_N: usize = 10;

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn load_contexts_opt(path: Option<&Path>) -> Result<ContextMap> {
    path.map(load_contexts)
        .transpose()
        .map(Option::unwrap_or_default)
}

fn captions_from(path: &Path, source: SourceArg) -> Result<Vec<CaptionRecord>> {
    let mut caps = load_captions(path)?;
    caps.retain(|c| source.keeps(c.source));
    Ok(caps)
}

fn in_range(name: &str, v: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(Error::Config(format!("{name} must lie in [0, 1], got {v}")))
    }
}

fn non_negative(name: &str, v: f64) -> Result<f64> {
    if v >= 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Config(format!(
            "{name} must be a finite non-negative number, got {v}"
        )))
    }
}

#[derive(Debug, Serialize)]
struct FilterSummary {
    images: usize,
    candidates: usize,
    kept: usize,
    /// Labels with no word vector; they were compared by exact label only.
    missing_vectors: Vec<String>,
    settings: ContextFilter,
}

fn filter_command(args: &FilterArgs, cfg: &Config, lexicon: &GenderLexicon) -> Result<()> {
    use rayon::prelude::*;
    let filter = ContextFilter {
        conf_threshold: in_range(
            "conf_threshold",
            args.conf_threshold.or(cfg.conf_threshold).unwrap_or(0.2),
        )?,
        vote_threshold: in_range(
            "vote_threshold",
            args.vote_threshold.or(cfg.vote_threshold).unwrap_or(0.8),
        )?,
        k: args.k.or(cfg.k).unwrap_or(3),
    };
    let raw = load_contexts(&args.contexts)?;
    let store = args
        .vectors
        .as_deref()
        .map(EmbeddingStore::load_word_vectors)
        .transpose()?
        .unwrap_or_default();
    let images: Vec<&VisualContext> = raw.values().collect();
    let outcomes: Vec<_> = images
        .par_iter()
        .map(|c| filter.filter(&c.image_id, &c.objects, &store, lexicon))
        .collect();
    let missing: BTreeSet<String> = outcomes
        .iter()
        .flat_map(|o| o.missing_vectors.iter().cloned())
        .collect();
    let summary = FilterSummary {
        images: images.len(),
        candidates: images.iter().map(|c| c.objects.len()).sum(),
        kept: outcomes.iter().map(|o| o.context.objects.len()).sum(),
        missing_vectors: missing.into_iter().collect(),
        settings: filter,
    };
    ensure_dir(&args.out)?;
    jsonl::write_records(
        &args.out.join(artifact::FILTERED_CONTEXTS),
        outcomes.iter().map(|o| &o.context),
    )?;
    jsonl::write_json(&args.out.join(artifact::FILTER_SUMMARY), &summary)
}

fn distance_command(args: &DistanceArgs, cfg: &Config, lexicon: &GenderLexicon) -> Result<()> {
    let level = Level::from(args.level);
    let (flag, path) = match level {
        Level::Word => ("--vectors", &args.vectors),
        Level::Sentence => ("--sidecar", &args.sidecar),
    };
    let path = path.as_deref().ok_or_else(|| {
        Error::Config(format!(
            "{flag} is required at the {} level",
            level.as_str()
        ))
    })?;
    let store = match level {
        Level::Word => EmbeddingStore::load_word_vectors(path)?,
        Level::Sentence => EmbeddingStore::load_sidecar(path)?,
    };
    let inputs = match level {
        Level::Word => DistanceInputs::Word(&store),
        Level::Sentence => DistanceInputs::Sentence(&store),
    };
    let captions = captions_from(&args.captions, args.source)?;
    let contexts = load_contexts_opt(args.contexts.as_deref())?;
    let top_n = args.top_n.or(cfg.top_n).unwrap_or(DEFAULT_TOP_N);
    let table = aggregate_distance_table(&captions, &contexts, inputs, lexicon, top_n)?;
    ensure_dir(&args.out)?;
    report::distance_table(&table).write(&args.out.join(artifact::distance_csv(level)))?;
    jsonl::write_json(&args.out.join(artifact::distance_json(level)), &table)
}

struct Loaded {
    captions: Vec<CaptionRecord>,
    contexts: ContextMap,
    emb: EmbeddingStore,
    lm: LmSidecar,
}

fn load_sidecar_inputs(args: &SidecarArgs, source: SourceArg) -> Result<Loaded> {
    Ok(Loaded {
        captions: captions_from(&args.captions, source)?,
        contexts: load_contexts_opt(args.contexts.as_deref())?,
        emb: EmbeddingStore::load_sidecar(&args.sidecar_emb)?,
        lm: LmSidecar::load(&args.sidecar_lm)?,
    })
}

fn score_command(args: &ScoreArgs, cfg: &Config, lexicon: &GenderLexicon) -> Result<()> {
    let data = load_sidecar_inputs(&args.inputs, args.source)?;
    let options = ScoreOptions {
        strategy: args.inputs.strategy.or(cfg.strategy).unwrap_or_default(),
        include_neutral: args.inputs.include_neutral || cfg.include_neutral.unwrap_or(false),
    };
    let sidecars = Sidecars {
        embeddings: &data.emb,
        lm: &data.lm,
    };
    let scored = score_dataset(&data.captions, &data.contexts, sidecars, lexicon, options)?;
    ensure_dir(&args.out)?;
    jsonl::write_records(&args.out.join(artifact::SCORED), &scored)?;
    jsonl::write_json(
        &args.out.join(artifact::SCORE_SUMMARY),
        &summarize(&scored, options.strategy),
    )
}

#[derive(Debug, Deserialize)]
struct ExternalPrediction {
    caption_id: String,
    predicted: GenderClass,
}

fn estimate_command(args: &EstimateArgs, cfg: &Config) -> Result<()> {
    let data = load_sidecar_inputs(&args.inputs, SourceArg::All)?;
    let options = EstimateOptions {
        strategy: args.inputs.strategy.or(cfg.strategy).unwrap_or_default(),
        tie_epsilon: non_negative(
            "tie_epsilon",
            args.tie_epsilon
                .or(cfg.tie_epsilon)
                .unwrap_or(DEFAULT_TIE_EPSILON),
        )?,
        include_neutral: args.inputs.include_neutral || cfg.include_neutral.unwrap_or(false),
    };
    let comparison = match &args.compare {
        Some(path) => {
            let mut map = BTreeMap::new();
            for (line, p) in jsonl::read_records::<ExternalPrediction>(path)? {
                if map.insert(p.caption_id.clone(), p.predicted).is_some() {
                    return Err(Error::parse(
                        path,
                        line,
                        format!("duplicate caption_id `{}`", p.caption_id),
                    ));
                }
            }
            Some(map)
        }
        None => None,
    };
    let sidecars = Sidecars {
        embeddings: &data.emb,
        lm: &data.lm,
    };
    let report = estimation_report(
        &data.captions,
        &data.contexts,
        sidecars,
        options,
        comparison.as_ref(),
    );
    ensure_dir(&args.out)?;
    jsonl::write_records(&args.out.join(artifact::PREDICTIONS), &report.predictions)?;
    jsonl::write_records(
        &args.out.join(artifact::ESTIMATE_FAILURES),
        &report.failures,
    )?;
    jsonl::write_json(&args.out.join(artifact::ESTIMATE_SUMMARY), &report.summary)
}

fn cooc_command(args: &CoocArgs, lexicon: &GenderLexicon) -> Result<()> {
    let captions = captions_from(&args.captions, args.source)?;
    let mut objects: BTreeSet<String> = args.objects.iter().cloned().collect();
    if let Some(path) = &args.contexts {
        for ctx in load_contexts(path)?.values() {
            objects.extend(ctx.objects.iter().map(|o| o.label.clone()));
        }
    }
    let scored: Option<Vec<ScoredCaption>> = args
        .scored
        .as_deref()
        .map(|p| jsonl::read_records(p).map(|v| v.into_iter().map(|(_, s)| s).collect()))
        .transpose()?;

    let summary = CoocSummary {
        source: args.source.as_str().to_string(),
        counts: cooc_counts(&captions, lexicon, None),
        per_image_to_m: per_image_ratio(&captions, lexicon),
    };
    let mut rows: Vec<ObjectBias> = Vec::new();
    for object in &objects {
        rows.push(per_object_bias(
            &captions,
            lexicon,
            object,
            BiasMethod::Cooc,
        ));
        if let Some(scored) = &scored {
            rows.push(per_object_bias(
                &captions,
                lexicon,
                object,
                BiasMethod::GenderScore(scored),
            ));
        }
    }
    ensure_dir(&args.out)?;
    jsonl::write_json(&args.out.join(artifact::COOC_SUMMARY), &summary)?;
    jsonl::write_json(&args.out.join(artifact::COOC_OBJECTS), &rows)?;
    report::objects_table(&rows).write(&args.out.join(artifact::COOC_OBJECTS_CSV))
}

fn leakage_command(args: &LeakageArgs) -> Result<()> {
    let model: CoocSummary = jsonl::read_json(&args.model)?;
    let human: CoocSummary = jsonl::read_json(&args.human)?;
    let l = Leakage::new(
        model.counts.man,
        model.counts.woman,
        human.counts.man,
        human.counts.woman,
    );
    ensure_dir(&args.out)?;
    jsonl::write_json(&args.out.join(artifact::LEAKAGE), &l)
}

fn report_command(args: &ReportArgs, cfg: &Config) -> Result<()> {
    let tables = args
        .tables
        .iter()
        .map(|t| {
            t.parse::<TableKind>()
                .map_err(|e| Error::Config(e.to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    let label = args
        .label
        .clone()
        .or_else(|| cfg.label.clone())
        .unwrap_or_else(|| "run".into());
    let report = build_report(&args.run, &tables, &label)?;
    report.write(args.out.as_deref().unwrap_or(&args.run))
}

fn validate_command(args: &ValidateArgs, cfg: &Config, lexicon: &GenderLexicon) -> Result<bool> {
    let inputs = ValidationInputs {
        captions: args.captions.clone(),
        contexts: args.contexts.clone(),
        vectors: args.vectors.clone(),
        sidecar_emb: args.sidecar_emb.clone(),
        sidecar_lm: args.sidecar_lm.clone(),
        text: args.text.clone(),
        include_neutral: args.include_neutral || cfg.include_neutral.unwrap_or(false),
    };
    let report = validate_inputs(&inputs, lexicon);
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    println!("{text}");
    if let Some(out) = &args.out {
        ensure_dir(out)?;
        jsonl::write_json(&out.join(artifact::VALIDATION), &report)?;
    }
    Ok(report.is_ok())
}

fn text_command(args: &TextArgs, cfg: &Config) -> Result<()> {
    let records = load_text_records(&args.records)?;
    let emb = EmbeddingStore::load_sidecar(&args.sidecar_emb)?;
    let lm = LmSidecar::load(&args.sidecar_lm)?;
    let kw = in_range(
        "keyword_confidence",
        args.keyword_confidence
            .or(cfg.keyword_confidence)
            .unwrap_or(DEFAULT_KEYWORD_CONFIDENCE),
    )?;
    let eps = non_negative(
        "tie_epsilon",
        args.tie_epsilon
            .or(cfg.tie_epsilon)
            .unwrap_or(DEFAULT_TIE_EPSILON),
    )?;
    let (scores, summary) = text_only_score(
        &records,
        Sidecars {
            embeddings: &emb,
            lm: &lm,
        },
        kw,
        eps,
    )?;
    ensure_dir(&args.out)?;
    jsonl::write_records(&args.out.join(artifact::TEXT_SCORES), &scores)?;
    jsonl::write_json(&args.out.join(artifact::TEXT_SUMMARY), &summary)
}

/// Outcome of a successful run: whether inputs validated cleanly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    ValidationFailed,
}

fn dispatch(cli: &Cli, cfg: &Config, lexicon: &GenderLexicon) -> Result<Outcome> {
    match &cli.command {
        Command::FilterContext(a) => filter_command(a, cfg, lexicon)?,
        Command::Distance(a) => distance_command(a, cfg, lexicon)?,
        Command::Score(a) => score_command(a, cfg, lexicon)?,
        Command::Estimate(a) => estimate_command(a, cfg)?,
        Command::Cooc(a) => cooc_command(a, lexicon)?,
        Command::Leakage(a) => leakage_command(a)?,
        Command::Report(a) => report_command(a, cfg)?,
        Command::Validate(a) => {
            if !validate_command(a, cfg, lexicon)? {
                return Ok(Outcome::ValidationFailed);
            }
        }
        Command::TextScore(a) => text_command(a, cfg)?,
    }
    Ok(Outcome::Ok)
}

/// Run a parsed command line.
pub fn run(cli: &Cli) -> Result<Outcome> {
    let cfg = cli
        .config
        .as_deref()
        .map(Config::load)
        .transpose()?
        .unwrap_or_default();
    let lexicon = match cli.lexicon.as_ref().or(cfg.lexicon.as_ref()) {
        Some(p) => GenderLexicon::load(p)?,
        None => GenderLexicon::default(),
    };
    match cli.threads.or(cfg.threads) {
        Some(0) => Err(Error::Config("thread count must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(|| dispatch(cli, &cfg, &lexicon)),
        None => dispatch(cli, &cfg, &lexicon),
    }
}

/// Exit code for an error: 1 for input problems, 2 for everything else.
pub fn exit_code(err: &Error) -> u8 {
    if err.is_validation() {
        1
    } else {
        2
    }
}

#[derive(Serialize)]
struct ErrorRecord<'a> {
    level: &'static str,
    code: &'a str,
    message: String,
}

/// Entry point used by the binary.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::ValidationFailed) => ExitCode::from(1),
        Err(err) => {
            let record = ErrorRecord {
                level: "error",
                code: err.code(),
                message: err.to_string(),
            };
            eprintln!(
                "{}",
                serde_json::to_string(&record).expect("error record serializes")
            );
            ExitCode::from(exit_code(&err))
        }
    }
}
