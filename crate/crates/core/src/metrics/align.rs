use std::collections::{HashMap, HashSet};

use super::dump::normalize_ws;
use super::{aggregate_word, EntropyPolicy, ScoreDumpRecord, WordMetrics};
use crate::corpus::{TokenKey, TokenRecord};
use crate::error::{Error, Result};

/// Every way a dump disagrees with the corpus, in token order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AlignmentReport {
    pub missing: Vec<TokenKey>,
    /// Key, corpus surface, dump surface.
    pub mismatched: Vec<(TokenKey, String, String)>,
    /// Records whose key is not in the corpus.
    pub extra: usize,
}

impl AlignmentReport {
    pub fn is_clean(&self) -> bool {
        self.missing.is_empty() && self.mismatched.is_empty()
    }
}

pub fn alignment_report(dump: &[ScoreDumpRecord], tokens: &[TokenRecord]) -> AlignmentReport {
    let by_key: HashMap<&TokenKey, &ScoreDumpRecord> = dump.iter().map(|r| (&r.key, r)).collect();
    let mut report = AlignmentReport::default();
    for t in tokens {
        match by_key.get(&t.key) {
            None => report.missing.push(t.key.clone()),
            Some(rec) if normalize_ws(&rec.surface) != normalize_ws(&t.surface) => {
                report
                    .mismatched
                    .push((t.key.clone(), t.surface.clone(), rec.surface.clone()))
            }
            Some(_) => {}
        }
    }
    let known: HashSet<&TokenKey> = tokens.iter().map(|t| &t.key).collect();
    report.extra = dump.iter().filter(|r| !known.contains(&r.key)).count();
    report
}

/// Joins dump records onto corpus tokens by token key, in token order.
///
/// Every token must have a record; records for keys outside the corpus are
/// ignored. Surfaces must agree after whitespace normalization.
pub fn align_dump(
    dump: &[ScoreDumpRecord],
    tokens: &[TokenRecord],
    policy: EntropyPolicy,
) -> Result<Vec<(TokenRecord, WordMetrics)>> {
    let by_key: HashMap<&TokenKey, &ScoreDumpRecord> = dump.iter().map(|r| (&r.key, r)).collect();

    let missing: Vec<TokenKey> = tokens
        .iter()
        .filter(|t| !by_key.contains_key(&t.key))
        .map(|t| t.key.clone())
        .collect();
    if !missing.is_empty() {
        return Err(Error::Coverage(missing));
    }

    tokens
        .iter()
        .map(|t| {
            let rec = by_key[&t.key];
            if normalize_ws(&rec.surface) != normalize_ws(&t.surface) {
                return Err(Error::Alignment {
                    key: t.key.clone(),
                    corpus: t.surface.clone(),
                    dump: rec.surface.clone(),
                });
            }
            Ok((t.clone(), aggregate_word(rec, policy)?))
        })
        .collect()
}
