//! Scoring of metalinguistic rankings: a model lists a sentence's words as
//! `id: token` pairs, ordered by estimated reading cost (or by ascending
//! probability), and the order is rank-correlated per sentence against
//! reading times (or surprisal).

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::corpus::SentKey;
use crate::error::{Error, Result};
use crate::stats::{mean_sd, spearman};

/// One line of a transcript file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptLine {
    pub sent_key: SentKey,
    pub run_id: u32,
    pub raw_text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prompt_id: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankingResponse {
    pub sent_key: SentKey,
    pub run_id: u32,
    pub raw_text: String,
    /// Word indices, highest cost first.
    pub parsed: Vec<usize>,
}

fn marker_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"\d+:").expect("valid regex"))
}

/// Extracts the `id: token` pairs of a response in emission order.
///
/// A pair is kept when the id indexes the sentence and the emitted token
/// equals the sentence token at that id (after trimming; a trailing list
/// separator comma is tolerated). Repeated ids keep their first occurrence.
pub fn parse_ranking_response(raw: &str, sentence_tokens: &[String]) -> Vec<usize> {
    let bytes = raw.as_bytes();
    let markers: Vec<(usize, usize, &str)> = marker_re()
        .find_iter(raw)
        .filter(|m| {
            let before_ok = m.start() == 0 || matches!(bytes[m.start() - 1], b' ' | b'\t' | b'\n' | b'\r' | b',');
            let after_ok = m.end() == bytes.len() || bytes[m.end()].is_ascii_whitespace();
            before_ok && after_ok
        })
        .map(|m| (m.start(), m.end(), &raw[m.start()..m.end() - 1]))
        .collect();

    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for (i, &(_, end, digits)) in markers.iter().enumerate() {
        let next = markers.get(i + 1).map_or(raw.len(), |m| m.0);
        let Ok(id) = digits.parse::<usize>() else { continue };
        let Some(expected) = sentence_tokens.get(id) else {
            continue;
        };
        let emitted = raw[end..next].trim();
        let expected = expected.trim();
        let matches = emitted == expected || emitted.strip_suffix(',').is_some_and(|e| e.trim_end() == expected);
        if matches && seen.insert(id) {
            out.push(id);
        }
    }
    out
}

/// Rankings keyed by run, then sentence.
pub type Rankings = BTreeMap<u32, BTreeMap<SentKey, Vec<usize>>>;

/// Per-sentence gold values keyed by word index.
pub type Gold = BTreeMap<SentKey, BTreeMap<usize, f64>>;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetalingResult {
    pub mean_rho: f64,
    pub sd_rho: f64,
    /// Distinct sentences scored in at least one run.
    pub n_sentences: usize,
    pub n_runs: usize,
    pub first_k: Option<usize>,
    pub run_means: Vec<f64>,
    /// Sentence-runs with fewer than two comparable words or a constant
    /// variable.
    pub n_skipped: usize,
    /// Sentence-runs whose response yielded no valid pair.
    pub n_missing: usize,
}

/// Spearman ρ between predicted cost (earlier in the list = higher) and the
/// gold value, over words present in both. `None` when fewer than two words
/// are comparable or either side is constant.
fn sentence_rho(parsed: &[usize], gold: &BTreeMap<usize, f64>, first_k: Option<usize>) -> Option<f64> {
    let listed = &parsed[..first_k.map_or(parsed.len(), |k| k.min(parsed.len()))];
    let (cost, values): (Vec<f64>, Vec<f64>) = listed
        .iter()
        .enumerate()
        .filter_map(|(pos, idx)| gold.get(idx).map(|g| (-(pos as f64), *g)))
        .unzip();
    if cost.len() < 2 {
        return None;
    }
    spearman(&cost, &values).ok()
}

/// Averages ρ over sentences within each run, then reports mean and sample
/// SD across runs.
pub fn score_rankings(rankings: &Rankings, gold: &Gold, first_k: Option<usize>) -> Result<MetalingResult> {
    let mut run_means = Vec::new();
    let mut scored = BTreeSet::new();
    let (mut n_skipped, mut n_missing) = (0, 0);
    for per_sentence in rankings.values() {
        let mut rhos = Vec::new();
        for (key, parsed) in per_sentence {
            let Some(g) = gold.get(key) else {
                n_skipped += 1;
                continue;
            };
            if parsed.is_empty() {
                n_missing += 1;
                continue;
            }
            match sentence_rho(parsed, g, first_k) {
                Some(rho) => {
                    rhos.push(rho);
                    scored.insert(key);
                }
                None => n_skipped += 1,
            }
        }
        if !rhos.is_empty() {
            run_means.push(rhos.iter().sum::<f64>() / rhos.len() as f64);
        }
    }
    if run_means.is_empty() {
        return Err(Error::InsufficientData(
            "no sentence had two or more comparable words".into(),
        ));
    }
    let (mean_rho, sd_rho) = mean_sd(&run_means);
    Ok(MetalingResult {
        mean_rho,
        sd_rho,
        n_sentences: scored.len(),
        n_runs: run_means.len(),
        first_k,
        run_means,
        n_skipped,
        n_missing,
    })
}

/// Rankings by reading cost scored against reading times.
pub fn score_against_rt(rankings: &Rankings, rts: &Gold, first_k: Option<usize>) -> Result<MetalingResult> {
    score_rankings(rankings, rts, first_k)
}

/// Rankings by ascending probability scored against surprisal.
pub fn metacognition_eval(rankings: &Rankings, surprisal: &Gold, first_k: Option<usize>) -> Result<MetalingResult> {
    score_rankings(rankings, surprisal, first_k)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BaselineResult {
    pub mean_rho: f64,
    pub n_sentences: usize,
    pub n_skipped: usize,
}

/// Mean per-sentence Spearman ρ between surprisal and reading time.
pub fn surprisal_rank_baseline(surprisal: &Gold, rts: &Gold) -> Result<BaselineResult> {
    let mut rhos = Vec::new();
    let mut n_skipped = 0;
    for (key, rt) in rts {
        let Some(s) = surprisal.get(key) else {
            n_skipped += 1;
            continue;
        };
        let (xs, ys): (Vec<f64>, Vec<f64>) = rt.iter().filter_map(|(idx, r)| s.get(idx).map(|v| (*v, *r))).unzip();
        match (xs.len() >= 2).then(|| spearman(&xs, &ys)) {
            Some(Ok(rho)) => rhos.push(rho),
            _ => n_skipped += 1,
        }
    }
    if rhos.is_empty() {
        return Err(Error::InsufficientData(
            "no sentence had two or more comparable words".into(),
        ));
    }
    Ok(BaselineResult {
        mean_rho: rhos.iter().sum::<f64>() / rhos.len() as f64,
        n_sentences: rhos.len(),
        n_skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(words: &[&str]) -> Vec<String> {
        words.iter().map(|w| w.to_string()).collect()
    }

    fn key(sent: u32) -> SentKey {
        SentKey {
            doc_id: "d".into(),
            sent_id: sent,
        }
    }

    fn gold(values: &[&[f64]]) -> Gold {
        values
            .iter()
            .enumerate()
            .map(|(s, v)| (key(s as u32), v.iter().copied().enumerate().collect()))
            .collect()
    }

    #[test]
    fn parses_full_response() {
        let s = toks(&["The", "black", "cat"]);
        assert_eq!(parse_ranking_response("2: cat, 0: The, 1: black", &s), vec![2, 0, 1]);
        assert_eq!(parse_ranking_response("2: cat, 5: dragon, 0: The", &s), vec![2, 0]);
        assert_eq!(parse_ranking_response("0: The, 0: The, 2: cat", &s), vec![0, 2]);
        assert_eq!(parse_ranking_response("1: cat, 2: cat", &s), vec![2]);
        assert!(parse_ranking_response("I cannot rank these.", &s).is_empty());
    }

    #[test]
    fn parses_tokens_containing_commas() {
        let s = toks(&["'No,", "it's", "fine.", "sea,"]);
        let raw = "3: sea,, 0: 'No,, 2: fine., 1: it's,\n";
        assert_eq!(parse_ranking_response(raw, &s), vec![3, 0, 2, 1]);
        assert_eq!(parse_ranking_response("3: sea,", &s), vec![3]);
    }

    #[test]
    fn ignores_digits_inside_tokens() {
        let s = toks(&["at", "10:30", "sharp"]);
        assert_eq!(parse_ranking_response("1: 10:30, 0: at, 2: sharp", &s), vec![1, 0, 2]);
    }

    #[test]
    fn perfect_rankings() {
        let rts = gold(&[&[200.0, 300.0, 250.0], &[180.0, 190.0, 400.0, 100.0]]);
        let ranking: BTreeMap<SentKey, Vec<usize>> =
            BTreeMap::from([(key(0), vec![1, 2, 0]), (key(1), vec![2, 1, 0, 3])]);
        let rankings: Rankings = (0..3).map(|r| (r, ranking.clone())).collect();
        let res = score_against_rt(&rankings, &rts, None).unwrap();
        assert_eq!((res.mean_rho, res.sd_rho), (1.0, 0.0));
        assert_eq!((res.n_sentences, res.n_runs), (2, 3));
    }

    #[test]
    fn truncation_uses_listed_words_only() {
        let rts = gold(&[&[10.0, 9.0, 8.0, 7.0, 6.0, 1.0, 2.0, 3.0, 4.0, 5.0]]);
        // First five listed agree perfectly; the rest are reversed.
        let order = vec![0, 1, 2, 3, 4, 5, 6, 7, 8, 9];
        let rankings: Rankings = BTreeMap::from([(0, BTreeMap::from([(key(0), order)]))]);
        let top5 = score_against_rt(&rankings, &rts, Some(5)).unwrap();
        assert_eq!(top5.mean_rho, 1.0);
        let full = score_against_rt(&rankings, &rts, None).unwrap();
        assert!(full.mean_rho < 1.0);
        assert_eq!(score_against_rt(&rankings, &rts, Some(10)).unwrap(), {
            let mut f = full.clone();
            f.first_k = Some(10);
            f
        });
    }

    #[test]
    fn omitted_words_excluded_and_short_sentences_skipped() {
        let rts = gold(&[&[1.0, 2.0, 3.0], &[5.0, 6.0]]);
        let rankings: Rankings = BTreeMap::from([(0, BTreeMap::from([(key(0), vec![2, 0]), (key(1), vec![1])]))]);
        let res = score_against_rt(&rankings, &rts, None).unwrap();
        assert_eq!(res.mean_rho, 1.0);
        assert_eq!(res.n_skipped, 1);

        let empty: Rankings = BTreeMap::from([(0, BTreeMap::from([(key(0), vec![])]))]);
        assert!(score_against_rt(&empty, &rts, None).is_err());
    }

    #[test]
    fn metacognition_direction() {
        let surprisal = gold(&[&[1.0, 5.0, 3.0]]);
        let low_prob_first: Rankings = BTreeMap::from([(0, BTreeMap::from([(key(0), vec![1, 2, 0])]))]);
        assert_eq!(
            metacognition_eval(&low_prob_first, &surprisal, None).unwrap().mean_rho,
            1.0
        );
        let reversed: Rankings = BTreeMap::from([(0, BTreeMap::from([(key(0), vec![0, 2, 1])]))]);
        assert_eq!(metacognition_eval(&reversed, &surprisal, None).unwrap().mean_rho, -1.0);
    }

    #[test]
    fn metacognition_three_sentence_mean() {
        // Gold surprisal ranks are 1..=5; with listed cost ranks c,
        // ρ = 1 - Σd²/20:
        //   c = [3,1,4,5,2] → Σd² = 16 → 0.2
        //   c = [4,2,1,5,3] → Σd² = 18 → 0.1
        //   c = [3,1,5,2,4] → Σd² = 14 → 0.3
        let ranks: &[f64] = &[1.0, 2.0, 3.0, 4.0, 5.0];
        let surprisal = gold(&[ranks; 3]);
        let rankings: Rankings = BTreeMap::from([(
            0,
            BTreeMap::from([
                (key(0), vec![3, 2, 0, 4, 1]),
                (key(1), vec![3, 0, 4, 1, 2]),
                (key(2), vec![2, 4, 0, 3, 1]),
            ]),
        )]);
        let res = metacognition_eval(&rankings, &surprisal, None).unwrap();
        assert!((res.mean_rho - 0.2).abs() < 1e-12);
    }

    #[test]
    fn baseline_means_sentences() {
        // Sentence 0: y ranks [1,3,2,4] → Σd² = 2 → ρ = 0.8.
        // Sentence 1: y ranks [1,4,2,3] → Σd² = 6 → ρ = 0.4.
        let surprisal = gold(&[&[1.0, 2.0, 3.0, 4.0], &[1.0, 2.0, 3.0, 4.0]]);
        let rts = gold(&[&[100.0, 300.0, 200.0, 400.0], &[100.0, 400.0, 200.0, 300.0]]);
        let res = surprisal_rank_baseline(&surprisal, &rts).unwrap();
        assert!((res.mean_rho - 0.6).abs() < 1e-15);

        let constant = gold(&[&[2.0, 2.0, 2.0, 2.0], &[1.0, 2.0, 3.0, 4.0]]);
        let res = surprisal_rank_baseline(&constant, &rts).unwrap();
        assert_eq!(res.n_skipped, 1);
        assert!((res.mean_rho - 0.4).abs() < 1e-15);

        let monotone = gold(&[&[0.1, 0.9, 0.5, 3.0]]);
        let rts1 = gold(&[&[100.0, 300.0, 200.0, 400.0]]);
        assert_eq!(surprisal_rank_baseline(&monotone, &rts1).unwrap().mean_rho, 1.0);
    }
}
