use std::collections::HashSet;

use anyhow::{Context, Result};
use ppp_core::corpus::{filter_tokens, load_rt_corpus, FilterSummary, FreqTable, TokenKey, TokenRecord};

use crate::config::RunConfig;

/// The averaged corpus, what survived filtering, and the filter summary.
pub struct Corpus {
    pub tokens: Vec<TokenRecord>,
    pub retained: HashSet<TokenKey>,
    pub summary: FilterSummary,
}

pub fn load_corpus(cfg: &RunConfig) -> Result<Corpus> {
    let path = cfg.corpus_path()?;
    let tokens = load_rt_corpus(&path, cfg.layout)
        .and_then(|c| c.into_tokens())
        .with_context(|| format!("loading corpus {}", path.display()))?;
    let (kept, summary) = filter_tokens(&tokens, &cfg.filter)?;
    if summary.is_empty_warning() {
        log::warn!("every token of {} was filtered out", path.display());
    }
    let retained = kept.into_iter().map(|t| t.key).collect();
    Ok(Corpus {
        tokens,
        retained,
        summary,
    })
}

pub fn load_freq(cfg: &RunConfig) -> Result<FreqTable> {
    let path = cfg.freq_path()?;
    FreqTable::load(&path, cfg.smoothing_floor).with_context(|| format!("loading frequencies {}", path.display()))
}
