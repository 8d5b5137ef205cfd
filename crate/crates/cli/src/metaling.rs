use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use ppp_core::corpus::{SentKey, TokenKey};
use ppp_core::metaling::{
    metacognition_eval, parse_ranking_response, score_against_rt, surprisal_rank_baseline, Gold, Rankings,
    TranscriptLine,
};
use ppp_core::metrics::{align_dump, read_dump};

use crate::compare::NO_PROMPT;
use crate::config::RunConfig;
use crate::inputs::load_corpus;
use crate::output::{cell, header_comment, num, write_table};

/// What the prompted model was asked to rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    /// Words by reading cost, scored against reading times.
    Cost,
    /// Words by ascending probability, scored against surprisal.
    Probability,
}

impl std::fmt::Display for Task {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Task::Cost => "cost",
            Task::Probability => "probability",
        })
    }
}

pub const BASELINE_PROMPT: &str = "surprisal_baseline";

pub const METALING_COLUMNS: [&str; 9] = [
    "prompt_id",
    "model_id",
    "corpus",
    "mean_rho",
    "sd_rho",
    "n_runs",
    "n_sentences",
    "task",
    "first_k",
];

#[derive(Debug, Clone, PartialEq)]
pub struct MetalingRow {
    pub prompt_id: String,
    pub model_id: String,
    pub mean_rho: f64,
    /// Absent for the baseline, which has no runs.
    pub sd_rho: Option<f64>,
    pub n_runs: usize,
    pub n_sentences: usize,
}

pub struct MetalingOptions {
    pub task: Task,
    pub first_k: Option<usize>,
    /// Used for transcript lines that do not name their model or prompt.
    pub default_model: String,
    pub default_prompt: String,
}

pub fn read_transcripts(path: &Path) -> Result<Vec<TranscriptLine>> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.with_context(|| format!("reading {}", path.display()))?;
        if line.trim().is_empty() {
            continue;
        }
        let t: TranscriptLine = serde_json::from_str(&line)
            .with_context(|| format!("{}:{}: invalid transcript line", path.display(), i + 1))?;
        out.push(t);
    }
    Ok(out)
}

/// Positions within each sentence, and the words at those positions.
struct Sentences {
    words: BTreeMap<SentKey, Vec<String>>,
    position: HashMap<TokenKey, usize>,
}

fn gold_from<'a>(sent: &Sentences, values: impl Iterator<Item = (&'a TokenKey, f64)>) -> Gold {
    let mut gold = Gold::new();
    for (key, v) in values {
        if let Some(&pos) = sent.position.get(key) {
            gold.entry(key.sent_key()).or_default().insert(pos, v);
        }
    }
    gold
}

pub fn metaling_rows(cfg: &RunConfig, transcripts: &[PathBuf], opts: &MetalingOptions) -> Result<Vec<MetalingRow>> {
    let corpus = load_corpus(cfg)?;
    let mut sent = Sentences {
        words: BTreeMap::new(),
        position: HashMap::new(),
    };
    for t in &corpus.tokens {
        let words = sent.words.entry(t.key.sent_key()).or_default();
        sent.position.insert(t.key.clone(), words.len());
        words.push(t.surface.clone());
    }
    let rts = gold_from(
        &sent,
        corpus
            .tokens
            .iter()
            .filter(|t| corpus.retained.contains(&t.key))
            .map(|t| (&t.key, t.rt_ms)),
    );

    // Surprisal by model, preferring unprompted dumps.
    let mut surprisal: BTreeMap<String, (bool, Gold)> = BTreeMap::new();
    for p in &cfg.dumps {
        let path = cfg.resolve(p);
        let dump = read_dump(&path).with_context(|| format!("reading {}", path.display()))?;
        let unprompted = dump.header.prompt_id == NO_PROMPT;
        if surprisal
            .get(&dump.header.model_id)
            .is_some_and(|(u, _)| *u || !unprompted)
        {
            continue;
        }
        let aligned = align_dump(&dump.records, &corpus.tokens, cfg.entropy_policy)
            .with_context(|| format!("aligning {}", path.display()))?;
        let gold = gold_from(&sent, aligned.iter().map(|(t, w)| (&t.key, w.surprisal_bits)));
        surprisal.insert(dump.header.model_id.clone(), (unprompted, gold));
    }

    let mut lines = Vec::new();
    for p in transcripts {
        lines.extend(read_transcripts(p)?);
    }
    if lines.is_empty() {
        bail!("no transcript lines");
    }
    let mut groups: BTreeMap<(String, String), Rankings> = BTreeMap::new();
    let mut unknown = 0usize;
    for t in lines {
        let Some(words) = sent.words.get(&t.sent_key) else {
            unknown += 1;
            continue;
        };
        let model = t.model_id.unwrap_or_else(|| opts.default_model.clone());
        let prompt = t.prompt_id.unwrap_or_else(|| opts.default_prompt.clone());
        let parsed = parse_ranking_response(&t.raw_text, words);
        let runs = groups.entry((prompt.clone(), model.clone())).or_default();
        if runs
            .entry(t.run_id)
            .or_default()
            .insert(t.sent_key.clone(), parsed)
            .is_some()
        {
            bail!(
                "two transcripts for {model}/{prompt}, run {}, sentence {}",
                t.run_id,
                t.sent_key
            );
        }
    }
    if unknown > 0 {
        log::warn!("{unknown} transcript line(s) name sentences outside the corpus");
    }

    let mut rows = Vec::new();
    for ((prompt, model), rankings) in &groups {
        let result = match opts.task {
            Task::Cost => score_against_rt(rankings, &rts, opts.first_k),
            Task::Probability => match surprisal.get(model) {
                Some((_, gold)) => metacognition_eval(rankings, gold, opts.first_k),
                None => {
                    log::warn!("no dump for model {model}; skipping {prompt}");
                    continue;
                }
            },
        };
        match result {
            Ok(r) => rows.push(MetalingRow {
                prompt_id: prompt.clone(),
                model_id: model.clone(),
                mean_rho: r.mean_rho,
                sd_rho: Some(r.sd_rho),
                n_runs: r.n_runs,
                n_sentences: r.n_sentences,
            }),
            Err(e) => log::warn!("{model}/{prompt}: {e}"),
        }
    }

    if opts.task == Task::Cost {
        let models: std::collections::BTreeSet<&String> = groups.keys().map(|(_, m)| m).collect();
        for model in models {
            let Some((_, gold)) = surprisal.get(model) else {
                log::warn!("no dump for model {model}; baseline row omitted");
                continue;
            };
            match surprisal_rank_baseline(gold, &rts) {
                Ok(b) => rows.push(MetalingRow {
                    prompt_id: BASELINE_PROMPT.into(),
                    model_id: model.clone(),
                    mean_rho: b.mean_rho,
                    sd_rho: None,
                    n_runs: 0,
                    n_sentences: b.n_sentences,
                }),
                Err(e) => log::warn!("{model} baseline: {e}"),
            }
        }
    }
    rows.sort_by(|a, b| (&a.prompt_id, &a.model_id).cmp(&(&b.prompt_id, &b.model_id)));
    Ok(rows)
}

pub fn run(cfg: &RunConfig, transcripts: &[PathBuf], opts: &MetalingOptions) -> Result<PathBuf> {
    let rows = metaling_rows(cfg, transcripts, opts)?;
    let first_k = opts.first_k.map_or_else(|| "all".to_string(), |k| k.to_string());
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                cell(&r.prompt_id),
                cell(&r.model_id),
                cell(&cfg.corpus_name),
                num(r.mean_rho),
                r.sd_rho.map_or_else(|| "NA".into(), num),
                r.n_runs.to_string(),
                r.n_sentences.to_string(),
                opts.task.to_string(),
                first_k.clone(),
            ]
        })
        .collect();
    let path = cfg.output_path(&format!("metaling_{}.tsv", opts.task));
    write_table(&path, &header_comment(cfg, &[]), '\t', &METALING_COLUMNS, &body)?;
    Ok(path)
}
