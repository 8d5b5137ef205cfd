use std::collections::BTreeSet;

use serde::Serialize;

use crate::corpus::{log_frequency, word_length, FreqTable};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurfaceStats {
    pub mean_sentence_len: f64,
    pub mean_word_len: f64,
    /// Averaged over non-stopwords only.
    pub mean_log_freq: f64,
}

/// Sentence length in words, word length in characters and mean log
/// frequency of non-stopwords.
pub fn surface_stats(
    sentences: &[Vec<String>],
    freq: &FreqTable,
    stopwords: &BTreeSet<String>,
) -> Result<SurfaceStats> {
    if sentences.is_empty() {
        return Err(Error::InsufficientData("no sentences".into()));
    }
    let words: Vec<&String> = sentences.iter().flatten().collect();
    if words.is_empty() {
        return Err(Error::InsufficientData("sentences contain no words".into()));
    }
    let content: Vec<f64> = words
        .iter()
        .filter(|w| !stopwords.contains(&w.to_lowercase()))
        .map(|w| log_frequency(freq, w))
        .collect();
    if content.is_empty() {
        return Err(Error::Undefined("every word is a stopword".into()));
    }
    Ok(SurfaceStats {
        mean_sentence_len: words.len() as f64 / sentences.len() as f64,
        mean_word_len: words.iter().map(|w| word_length(w)).sum::<usize>() as f64 / words.len() as f64,
        mean_log_freq: content.iter().sum::<f64>() / content.len() as f64,
    })
}
