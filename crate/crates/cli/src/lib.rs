//! Command-line front end: validation, scoring, nested-model fits,
//! trade-off comparison, metalinguistic evaluation, text statistics and a
//! synthetic fixture generator.

pub mod compare;
pub mod config;
pub mod fit;
pub mod inputs;
pub mod metaling;
pub mod output;
pub mod score;
pub mod synth;
pub mod textstats;
pub mod validate;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};
use ppp_core::metrics::EntropyPolicy;
use ppp_core::regression::ContextScope;
use ppp_core::stats::PplAxis;

use crate::config::RunConfig;

#[derive(Debug, Parser)]
#[command(
    name = "ppp",
    version,
    about = "Psychometric predictive power of language-model scores"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Run configuration (TOML).
    #[arg(long, short, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    pub entropy_policy: Option<PolicyArg>,
    #[arg(long, global = true, value_enum)]
    pub context_scope: Option<ScopeArg>,
    #[arg(long, global = true, value_enum)]
    pub ppl_axis: Option<AxisArg>,
    /// Where result tables go; relative to the config file's directory.
    #[arg(long, global = true, env = "PPP_OUTPUT_DIR")]
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PolicyArg {
    #[value(name = "sum")]
    Sum,
    #[value(name = "first_subword")]
    FirstSubword,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ScopeArg {
    #[value(name = "within_sentence")]
    WithinSentence,
    #[value(name = "within_document")]
    WithinDocument,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum AxisArg {
    Log,
    Raw,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TaskArg {
    Cost,
    Probability,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check dumps against the corpus; exits 1 on coverage errors.
    Validate,
    /// Write word-level metric values in long format.
    Score,
    /// Fit base and full spillover models for every dump and metric.
    Fit {
        /// Worker threads; the output does not depend on it.
        #[arg(long, default_value_t = default_workers())]
        workers: usize,
    },
    /// PPP against PPL regression and below-line counts per corpus and metric.
    Compare {
        /// Fit tables to combine.
        #[arg(long = "fit", required = true, num_args = 1..)]
        fits: Vec<PathBuf>,
        /// TSV with model_id, instruction_tuned and prompt_id columns.
        #[arg(long)]
        flags: PathBuf,
    },
    /// Score ranking transcripts against reading times or surprisal.
    Metaling {
        #[arg(long = "transcripts", required = true, num_args = 1..)]
        transcripts: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "cost")]
        task: TaskArg,
        /// Only the first k listed words of each response count.
        #[arg(long)]
        first_k: Option<usize>,
        #[arg(long, default_value = "unknown")]
        model_id: String,
        #[arg(long, default_value = "none")]
        prompt_id: String,
    },
    /// Sentence length, word length and log frequency of texts.
    Textstats {
        /// Extra texts, one sentence per line.
        #[arg(long = "text", num_args = 1..)]
        texts: Vec<PathBuf>,
    },
    /// Generate a synthetic corpus, dump and transcripts.
    Synth {
        /// Directory to write into.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 2000)]
        words: usize,
        /// Replace the dumped log-probabilities with independent noise.
        #[arg(long)]
        null: bool,
        #[arg(long, default_value = "stub")]
        model_id: String,
        #[arg(long, default_value_t = 20.0)]
        noise_sd: f64,
    },
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

impl GlobalArgs {
    /// The config file, if any, with command-line overrides applied.
    pub fn effective_config(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(p) = self.entropy_policy {
            cfg.entropy_policy = match p {
                PolicyArg::Sum => EntropyPolicy::Sum,
                PolicyArg::FirstSubword => EntropyPolicy::FirstSubword,
            };
        }
        if let Some(s) = self.context_scope {
            cfg.context_scope = match s {
                ScopeArg::WithinSentence => ContextScope::WithinSentence,
                ScopeArg::WithinDocument => ContextScope::WithinDocument,
            };
        }
        if let Some(a) = self.ppl_axis {
            cfg.ppl_axis = match a {
                AxisArg::Log => PplAxis::Log,
                AxisArg::Raw => PplAxis::Raw,
            };
        }
        if let Some(dir) = &self.output_dir {
            cfg.output_dir = dir.clone();
        }
        Ok(cfg)
    }
}

pub fn run(cli: Cli) -> Result<ExitCode> {
    let cfg = cli.global.effective_config()?;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Validate => {
            let report = validate::validate(&cfg)?;
            for line in &report.lines {
                writeln!(out, "{line}")?;
            }
            return Ok(if report.is_ok() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            });
        }
        Command::Score => {
            let path = score::run(&cfg)?;
            writeln!(out, "wrote {}", path.display())?;
        }
        Command::Fit { workers } => {
            let (rows, summary) = fit::fit_rows(&cfg, workers)?;
            let (fit_path, filter_path) = fit::write_fit(&cfg, &rows, &summary)?;
            for row in &rows {
                writeln!(out, "{}", fit::summary_line(row))?;
            }
            writeln!(out, "wrote {} and {}", fit_path.display(), filter_path.display())?;
        }
        Command::Compare { fits, flags } => {
            let (tradeoff, scatter) = compare::run(&cfg, &fits, &flags)?;
            writeln!(out, "wrote {} and {}", tradeoff.display(), scatter.display())?;
        }
        Command::Metaling {
            transcripts,
            task,
            first_k,
            model_id,
            prompt_id,
        } => {
            let opts = metaling::MetalingOptions {
                task: match task {
                    TaskArg::Cost => metaling::Task::Cost,
                    TaskArg::Probability => metaling::Task::Probability,
                },
                first_k,
                default_model: model_id,
                default_prompt: prompt_id,
            };
            let path = metaling::run(&cfg, &transcripts, &opts)?;
            writeln!(out, "wrote {}", path.display())?;
        }
        Command::Textstats { texts } => {
            let path = textstats::run(&cfg, &texts)?;
            writeln!(out, "wrote {}", path.display())?;
        }
        Command::Synth {
            out: dir,
            words,
            null,
            model_id,
            noise_sd,
        } => {
            let opts = synth::SynthOptions {
                words,
                seed: cfg.seed,
                null,
                model_id,
                noise_sd,
                ..Default::default()
            };
            let files = synth::generate(&opts, &dir)?;
            writeln!(
                out,
                "wrote {} words in {} sentences to {}",
                files.n_words,
                files.n_sentences,
                dir.display()
            )?;
        }
    }
    Ok(ExitCode::SUCCESS)
}
