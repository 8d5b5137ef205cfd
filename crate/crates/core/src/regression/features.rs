use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::corpus::{log_frequency, word_length_stripped, FreqTable, TokenKey, TokenRecord};
use crate::metrics::{Metric, WordMetrics};

/// Which preceding words count as spillover context.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContextScope {
    #[default]
    WithinSentence,
    WithinDocument,
}

impl fmt::Display for ContextScope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ContextScope::WithinSentence => "within_sentence",
            ContextScope::WithinDocument => "within_document",
        })
    }
}

impl ContextScope {
    fn same_scope(&self, a: &TokenKey, b: &TokenKey) -> bool {
        match self {
            ContextScope::WithinSentence => a.doc_id == b.doc_id && a.sent_id == b.sent_id,
            ContextScope::WithinDocument => a.doc_id == b.doc_id,
        }
    }
}

/// One response row with its spillover covariates. Index 0 is the current
/// word, 1 and 2 its predecessors.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRow {
    pub key: TokenKey,
    pub rt_ms: f64,
    pub interest: f64,
    pub spill1: f64,
    pub spill2: f64,
    pub len: [f64; 3],
    pub freq: [f64; 3],
}

#[derive(Debug, Clone, Default)]
pub struct FeatureOptions {
    pub scope: ContextScope,
    /// Trailing characters ignored when measuring word length.
    pub strip_trailing: String,
}

#[derive(Debug, Clone, Default)]
pub struct FeatureSet {
    pub rows: Vec<FeatureRow>,
    /// Retained tokens with fewer than two predecessors in scope.
    pub dropped_no_context: usize,
    /// Retained tokens whose own or a predecessor's metric value is absent.
    pub dropped_missing_metric: usize,
}

/// Builds regression rows for the retained tokens.
///
/// `aligned` is the full ordered corpus, filtered-out words included, so
/// that their values can serve as spillover covariates; `retained` names
/// the tokens that survived filtering and become response rows.
pub fn build_features(
    aligned: &[(TokenRecord, WordMetrics)],
    retained: &HashSet<TokenKey>,
    metric: Metric,
    freq: &FreqTable,
    opts: &FeatureOptions,
) -> FeatureSet {
    let mut set = FeatureSet::default();
    for (i, (tok, words)) in aligned.iter().enumerate() {
        if !retained.contains(&tok.key) {
            continue;
        }
        if i < 2
            || !opts.scope.same_scope(&tok.key, &aligned[i - 1].0.key)
            || !opts.scope.same_scope(&tok.key, &aligned[i - 2].0.key)
        {
            set.dropped_no_context += 1;
            continue;
        }
        let window = [&aligned[i], &aligned[i - 1], &aligned[i - 2]];
        let values: Option<Vec<f64>> = window.iter().map(|(_, w)| metric.value(w)).collect();
        let Some(values) = values else {
            set.dropped_missing_metric += 1;
            continue;
        };
        let len = window.map(|(t, _)| word_length_stripped(&t.surface, &opts.strip_trailing) as f64);
        let freq = window.map(|(t, _)| log_frequency(freq, &t.surface));
        set.rows.push(FeatureRow {
            key: words.key.clone(),
            rt_ms: tok.rt_ms,
            interest: values[0],
            spill1: values[1],
            spill2: values[2],
            len,
            freq,
        });
    }
    set
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn sentence(doc: &str, sent: u32, n: u32) -> Vec<(TokenRecord, WordMetrics)> {
        (0..n)
            .map(|i| {
                let key = TokenKey::new(doc, sent, i);
                (
                    TokenRecord {
                        key: key.clone(),
                        surface: "w".repeat(i as usize + 1),
                        rt_ms: 200.0 + i as f64,
                        is_sent_initial: i == 0,
                        is_sent_final: i == n - 1,
                    },
                    WordMetrics {
                        key,
                        surprisal_bits: 1.0 + i as f64,
                        shannon_bits: None,
                        renyi_bits: BTreeMap::new(),
                    },
                )
            })
            .collect()
    }

    fn interior(aligned: &[(TokenRecord, WordMetrics)]) -> HashSet<TokenKey> {
        aligned
            .iter()
            .filter(|(t, _)| !t.is_sent_initial && !t.is_sent_final)
            .map(|(t, _)| t.key.clone())
            .collect()
    }

    fn freq() -> FreqTable {
        FreqTable::new(vec![("ww".to_string(), 100)], 1)
    }

    #[test]
    fn five_word_sentence() {
        let aligned = sentence("d", 0, 5);
        let set = build_features(
            &aligned,
            &interior(&aligned),
            Metric::Surprisal,
            &freq(),
            &FeatureOptions::default(),
        );
        let idx: Vec<u32> = set.rows.iter().map(|r| r.key.word_idx).collect();
        assert_eq!(idx, vec![2, 3]);
        assert_eq!(set.dropped_no_context, 1);
        // Word 2 uses the excluded sentence-initial word 0 as its second lag.
        let r = &set.rows[0];
        assert_eq!((r.interest, r.spill1, r.spill2), (3.0, 2.0, 1.0));
        assert_eq!(r.len, [3.0, 2.0, 1.0]);
        assert_eq!(r.freq[1], 100f64.ln());
        assert_eq!(r.freq[0], 0.0);
    }

    #[test]
    fn two_word_sentence_has_no_rows() {
        let aligned = sentence("d", 0, 2);
        let all: HashSet<_> = aligned.iter().map(|(t, _)| t.key.clone()).collect();
        let set = build_features(&aligned, &all, Metric::Surprisal, &freq(), &FeatureOptions::default());
        assert!(set.rows.is_empty());
    }

    #[test]
    fn document_scope_keeps_more_rows() {
        let mut aligned = sentence("d", 0, 4);
        aligned.extend(sentence("d", 1, 4));
        let retained = interior(&aligned);
        let within = build_features(
            &aligned,
            &retained,
            Metric::Surprisal,
            &freq(),
            &FeatureOptions::default(),
        );
        let doc = FeatureOptions {
            scope: ContextScope::WithinDocument,
            ..FeatureOptions::default()
        };
        let across = build_features(&aligned, &retained, Metric::Surprisal, &freq(), &doc);
        assert_eq!(within.rows.len(), 2);
        assert_eq!(across.rows.len(), 3);
    }

    #[test]
    fn missing_metric_counted() {
        let aligned = sentence("d", 0, 5);
        let set = build_features(
            &aligned,
            &interior(&aligned),
            Metric::Shannon,
            &freq(),
            &FeatureOptions::default(),
        );
        assert!(set.rows.is_empty());
        assert_eq!(set.dropped_missing_metric, 2);
    }
}
