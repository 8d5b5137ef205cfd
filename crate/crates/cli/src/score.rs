use std::path::PathBuf;

use anyhow::{Context, Result};
use ppp_core::metrics::{align_dump, read_dump};

use crate::config::RunConfig;
use crate::inputs::load_corpus;
use crate::output::{cell, header_comment, opt_num, write_table};

pub const SCORE_COLUMNS: [&str; 10] = [
    "model_id",
    "prompt_id",
    "doc_id",
    "sent_id",
    "word_idx",
    "word",
    "retained",
    "metric",
    "value_bits",
    "corpus",
];

/// Word-level values of every configured metric, one row per word and
/// metric. Values a dump does not provide are written as NA.
pub fn score_rows(cfg: &RunConfig) -> Result<Vec<Vec<String>>> {
    let corpus = load_corpus(cfg)?;
    let mut rows = Vec::new();
    for p in &cfg.dumps {
        let path = cfg.resolve(p);
        let dump = read_dump(&path).with_context(|| format!("reading {}", path.display()))?;
        let aligned = align_dump(&dump.records, &corpus.tokens, cfg.entropy_policy)
            .with_context(|| format!("aligning {}", path.display()))?;
        for (t, w) in &aligned {
            let retained = corpus.retained.contains(&t.key);
            for m in &cfg.metrics {
                rows.push(vec![
                    cell(&dump.header.model_id),
                    cell(&dump.header.prompt_id),
                    cell(&t.key.doc_id),
                    t.key.sent_id.to_string(),
                    t.key.word_idx.to_string(),
                    cell(&t.surface),
                    retained.to_string(),
                    m.to_string(),
                    opt_num(m.value(w)),
                    cell(&cfg.corpus_name),
                ]);
            }
        }
    }
    // Model, prompt, then token key and metric; numeric key fields compare
    // as numbers.
    rows.sort_by(|a, b| {
        let key = |r: &Vec<String>| {
            (
                r[0].clone(),
                r[1].clone(),
                r[2].clone(),
                r[3].parse::<u32>().unwrap_or(0),
                r[4].parse::<u32>().unwrap_or(0),
                r[7].clone(),
            )
        };
        key(a).cmp(&key(b))
    });
    Ok(rows)
}

pub fn run(cfg: &RunConfig) -> Result<PathBuf> {
    let rows = score_rows(cfg)?;
    let path = cfg.output_path("scores.tsv");
    write_table(&path, &header_comment(cfg, &[]), '\t', &SCORE_COLUMNS, &rows)?;
    Ok(path)
}
