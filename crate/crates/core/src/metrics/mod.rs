//! Surprisal, Shannon entropy and Rényi entropy in bits, word-level
//! aggregation of subword scores, and corpus perplexity.
//!
//! Score dumps carry natural-log quantities; every value leaving this module
//! is in bits.

mod align;
mod dump;

pub use align::{align_dump, alignment_report, AlignmentReport};
pub use dump::{read_dump, write_dump, Detokenizer, DumpHeader, ScoreDump, ScoreDumpRecord, DUMP_FORMAT};

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::f64::consts::LN_2;
use std::fmt;
use std::hash::Hash;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::corpus::TokenKey;
use crate::error::{Error, Result};

/// Tolerance on the total mass of a [`ProbabilityVector`].
pub const NORMALIZATION_EPS: f64 = 1e-6;

/// Below this distance from 1 the Rényi order is treated as the Shannon limit.
pub const RENYI_SHANNON_EPS: f64 = 1e-6;

/// Order of a Rényi entropy. Ordered by value and serialized as a string so
/// it can key JSON maps (`"0.5"`).
#[derive(Debug, Clone, Copy)]
pub struct Alpha(f64);

impl Alpha {
    pub fn new(value: f64) -> Result<Self> {
        if value > 0.0 && value.is_finite() {
            Ok(Alpha(value))
        } else {
            Err(Error::Domain(format!("Rényi order must be positive, got {value}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl PartialEq for Alpha {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Alpha {}

impl Hash for Alpha {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.to_bits().hash(state);
    }
}

impl PartialOrd for Alpha {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Alpha {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::str::FromStr for Alpha {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let v: f64 = s
            .trim()
            .parse()
            .map_err(|_| Error::Domain(format!("invalid Rényi order {s:?}")))?;
        Alpha::new(v)
    }
}

impl Serialize for Alpha {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Alpha {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct Visitor;
        impl serde::de::Visitor<'_> for Visitor {
            type Value = Alpha;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a positive Rényi order")
            }

            fn visit_str<E: serde::de::Error>(self, v: &str) -> std::result::Result<Alpha, E> {
                v.parse().map_err(E::custom)
            }

            fn visit_f64<E: serde::de::Error>(self, v: f64) -> std::result::Result<Alpha, E> {
                Alpha::new(v).map_err(E::custom)
            }

            fn visit_u64<E: serde::de::Error>(self, v: u64) -> std::result::Result<Alpha, E> {
                Alpha::new(v as f64).map_err(E::custom)
            }
        }
        deserializer.deserialize_any(Visitor)
    }
}

/// A discrete distribution, renormalized on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector {
    probs: Vec<f64>,
}

impl ProbabilityVector {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::Domain("empty probability vector".into()));
        }
        if let Some(p) = probs.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(Error::Domain(format!("invalid probability {p}")));
        }
        let total = compensated_sum(probs.iter().copied());
        if (total - 1.0).abs() > NORMALIZATION_EPS {
            return Err(Error::Domain(format!("probabilities sum to {total}, not 1")));
        }
        Ok(ProbabilityVector {
            probs: probs.into_iter().map(|p| p / total).collect(),
        })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}

/// `-ln p / ln 2`.
pub fn surprisal_bits(logprob_nat: f64) -> Result<f64> {
    if !(logprob_nat <= 0.0) || !logprob_nat.is_finite() {
        return Err(Error::Domain(format!(
            "log-probability must be finite and nonpositive, got {logprob_nat}"
        )));
    }
    Ok(-logprob_nat / LN_2 + 0.0)
}

/// Neumaier summation.
fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut carry) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        carry += if sum.abs() >= v.abs() {
            (sum - t) + v
        } else {
            (v - t) + sum
        };
        sum = t;
    }
    sum + carry
}

/// Shannon entropy in bits, with `0 log 0 = 0`.
pub fn shannon_entropy(p: &ProbabilityVector) -> f64 {
    let h = compensated_sum(p.probs.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.log2()));
    h.max(0.0)
}

/// Rényi entropy of order `alpha` in bits; within [`RENYI_SHANNON_EPS`] of 1
/// this is the Shannon entropy.
pub fn renyi_entropy(p: &ProbabilityVector, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::Domain(format!("Rényi order must be positive, got {alpha}")));
    }
    if (alpha - 1.0).abs() < RENYI_SHANNON_EPS {
        return Ok(shannon_entropy(p));
    }
    let support = || p.probs.iter().copied().filter(|&x| x > 0.0);
    // ln Σ p^α = ln(1 + Σ p (p^(α-1) - 1)). The expm1/ln_1p form keeps
    // orders close to 1 accurate; once Σ p^α is well below 1 the plain sum
    // is the better conditioned of the two.
    let excess = compensated_sum(support().map(|x| x * ((alpha - 1.0) * x.ln()).exp_m1()));
    let log_power_sum = if excess > -0.5 {
        excess.ln_1p()
    } else {
        compensated_sum(support().map(|x| (alpha * x.ln()).exp())).ln()
    };
    let h = log_power_sum / ((1.0 - alpha) * LN_2);
    Ok(h.max(0.0))
}

/// How per-subword entropies combine into a word-level value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntropyPolicy {
    #[default]
    Sum,
    FirstSubword,
}

impl fmt::Display for EntropyPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EntropyPolicy::Sum => "sum",
            EntropyPolicy::FirstSubword => "first_subword",
        })
    }
}

/// Scores for one subword piece, in nats.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubwordScore {
    pub piece: String,
    pub logprob_nat: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shannon_nat: Option<f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub renyi_nat: BTreeMap<Alpha, f64>,
}

impl SubwordScore {
    pub fn validate(&self) -> Result<()> {
        surprisal_bits(self.logprob_nat)?;
        let entropies = self.shannon_nat.iter().chain(self.renyi_nat.values());
        for &h in entropies {
            if !(h >= 0.0) || !h.is_finite() {
                return Err(Error::Domain(format!(
                    "entropy of piece {:?} must be finite and nonnegative, got {h}",
                    self.piece
                )));
            }
        }
        Ok(())
    }
}

/// Word-level information-theoretic values in bits.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WordMetrics {
    pub key: TokenKey,
    pub surprisal_bits: f64,
    pub shannon_bits: Option<f64>,
    pub renyi_bits: BTreeMap<Alpha, f64>,
}

/// Which word-level value a regression or report uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Metric {
    Surprisal,
    Shannon,
    Renyi(Alpha),
}

impl Metric {
    pub fn value(&self, w: &WordMetrics) -> Option<f64> {
        match self {
            Metric::Surprisal => Some(w.surprisal_bits),
            Metric::Shannon => w.shannon_bits,
            Metric::Renyi(a) => w.renyi_bits.get(a).copied(),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Metric::Surprisal => f.write_str("surprisal"),
            Metric::Shannon => f.write_str("shannon"),
            Metric::Renyi(a) => write!(f, "renyi_{a}"),
        }
    }
}

impl std::str::FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "surprisal" => Ok(Metric::Surprisal),
            "shannon" => Ok(Metric::Shannon),
            other => match other.strip_prefix("renyi_") {
                Some(a) => Ok(Metric::Renyi(a.parse()?)),
                None => Err(Error::Domain(format!(
                    "unknown metric {other:?} (expected surprisal, shannon or renyi_<alpha>)"
                ))),
            },
        }
    }
}

impl Serialize for Metric {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Metric {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Collapses a word's subword scores into word-level bits.
///
/// Surprisal is cumulative: log-probabilities are summed in nats and then
/// converted, so two segmentations with equal per-word sums agree exactly.
/// Entropies follow `policy`; if any contributing piece lacks a value the
/// word-level value is absent.
pub fn aggregate_word(rec: &ScoreDumpRecord, policy: EntropyPolicy) -> Result<WordMetrics> {
    if rec.subwords.is_empty() {
        return Err(Error::Domain(format!("record {} has no subwords", rec.key)));
    }
    for s in &rec.subwords {
        s.validate()?;
    }
    let logprob: f64 = rec.subwords.iter().map(|s| s.logprob_nat).sum();
    let surprisal = surprisal_bits(logprob)?;

    let pieces = match policy {
        EntropyPolicy::Sum => &rec.subwords[..],
        EntropyPolicy::FirstSubword => &rec.subwords[..1],
    };
    let shannon = pieces
        .iter()
        .map(|s| s.shannon_nat)
        .sum::<Option<f64>>()
        .map(|h| h / LN_2);
    let renyi = pieces[0]
        .renyi_nat
        .keys()
        .filter_map(|a| {
            let total = pieces.iter().map(|s| s.renyi_nat.get(a)).sum::<Option<f64>>()?;
            Some((*a, total / LN_2))
        })
        .collect();

    Ok(WordMetrics {
        key: rec.key.clone(),
        surprisal_bits: surprisal,
        shannon_bits: shannon,
        renyi_bits: renyi,
    })
}

/// `2^(mean surprisal in bits)` over the supplied words.
pub fn corpus_ppl<'a>(words: impl IntoIterator<Item = &'a WordMetrics>) -> Result<f64> {
    let (n, total) = words
        .into_iter()
        .fold((0usize, 0.0f64), |(n, s), w| (n + 1, s + w.surprisal_bits));
    if n == 0 {
        return Err(Error::Domain("perplexity of an empty word list".into()));
    }
    Ok((total / n as f64).exp2())
}
