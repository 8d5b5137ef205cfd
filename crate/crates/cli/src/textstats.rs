use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use ppp_core::corpus::{load_rt_corpus, load_stopwords, sentences};
use ppp_core::stats::surface_stats;

use crate::config::RunConfig;
use crate::inputs::load_freq;
use crate::output::{cell, header_comment, num, write_table};

pub const TEXTSTATS_COLUMNS: [&str; 5] = [
    "source",
    "n_sentences",
    "mean_sentence_len",
    "mean_word_len",
    "mean_log_freq",
];

/// One sentence per line, words separated by whitespace.
pub fn read_sentences(path: &Path) -> Result<Vec<Vec<String>>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(text
        .lines()
        .map(|l| l.split_whitespace().map(str::to_string).collect::<Vec<_>>())
        .filter(|s| !s.is_empty())
        .collect())
}

/// Surface statistics of the configured corpus (when there is one) and of
/// each text file.
pub fn run(cfg: &RunConfig, texts: &[PathBuf]) -> Result<PathBuf> {
    let freq = load_freq(cfg)?;
    let stopwords = match &cfg.stopwords {
        Some(p) => load_stopwords(&cfg.resolve(p))?,
        None => BTreeSet::new(),
    };
    let mut sources: Vec<(String, Vec<Vec<String>>)> = Vec::new();
    if let Some(p) = &cfg.corpus {
        let tokens = load_rt_corpus(&cfg.resolve(p), cfg.layout)?.into_tokens()?;
        let sents = sentences(&tokens)
            .into_values()
            .map(|ws| ws.into_iter().map(|t| t.surface.clone()).collect())
            .collect();
        sources.push((cfg.corpus_name.clone(), sents));
    }
    for p in texts {
        let name = p
            .file_stem()
            .map_or_else(|| p.display().to_string(), |s| s.to_string_lossy().into_owned());
        sources.push((name, read_sentences(p)?));
    }
    let mut rows = Vec::new();
    for (name, sents) in &sources {
        let s = surface_stats(sents, &freq, &stopwords).with_context(|| format!("statistics of {name}"))?;
        rows.push(vec![
            cell(name),
            sents.len().to_string(),
            num(s.mean_sentence_len),
            num(s.mean_word_len),
            num(s.mean_log_freq),
        ]);
    }
    let path = cfg.output_path("textstats.tsv");
    write_table(&path, &header_comment(cfg, &[]), '\t', &TEXTSTATS_COLUMNS, &rows)?;
    Ok(path)
}
