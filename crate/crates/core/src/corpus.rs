//! Reading-time corpora, lexical covariates and the exclusion rules applied
//! before any regression is fitted.
//!
//! Two TSV layouts are accepted. The averaged layout has one row per word:
//!
//! ```text
//! doc_id  sent_id  word_idx  word  rt_ms
//! ```
//!
//! The per-subject layout adds a `subject_id` column and carries one row per
//! (subject, word). [`average_subjects`] reduces it to the averaged form.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Position of a word in a corpus.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TokenKey {
    pub doc_id: String,
    pub sent_id: u32,
    pub word_idx: u32,
}

impl TokenKey {
    pub fn new(doc_id: impl Into<String>, sent_id: u32, word_idx: u32) -> Self {
        TokenKey {
            doc_id: doc_id.into(),
            sent_id,
            word_idx,
        }
    }

    pub fn sent_key(&self) -> SentKey {
        SentKey {
            doc_id: self.doc_id.clone(),
            sent_id: self.sent_id,
        }
    }
}

impl fmt::Display for TokenKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}/{}", self.doc_id, self.sent_id, self.word_idx)
    }
}

/// Position of a sentence in a corpus.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SentKey {
    pub doc_id: String,
    pub sent_id: u32,
}

impl fmt::Display for SentKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.doc_id, self.sent_id)
    }
}

/// One reading-time-annotated word.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TokenRecord {
    pub key: TokenKey,
    pub surface: String,
    pub rt_ms: f64,
    pub is_sent_initial: bool,
    pub is_sent_final: bool,
}

/// A single subject's reading time for one word.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubjectReading {
    pub subject_id: String,
    pub key: TokenKey,
    pub surface: String,
    pub rt_ms: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Layout {
    Averaged,
    PerSubject,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LoadedCorpus {
    Averaged(Vec<TokenRecord>),
    PerSubject(Vec<SubjectReading>),
}

impl LoadedCorpus {
    /// Averaged tokens, reducing per-subject readings when necessary.
    pub fn into_tokens(self) -> Result<Vec<TokenRecord>> {
        match self {
            LoadedCorpus::Averaged(tokens) => Ok(tokens),
            LoadedCorpus::PerSubject(readings) if readings.is_empty() => Ok(Vec::new()),
            LoadedCorpus::PerSubject(readings) => average_subjects(&readings),
        }
    }
}

fn tsv_reader(path: &Path) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .quoting(false)
        .comment(Some(b'#'))
        .flexible(true)
        .from_reader(file))
}

fn column(headers: &csv::StringRecord, name: &str, path: &Path) -> Result<usize> {
    headers
        .iter()
        .position(|h| h.trim() == name)
        .ok_or_else(|| Error::parse(path, 1, format!("missing column {name:?}")))
}

fn field<'r>(rec: &'r csv::StringRecord, idx: usize, name: &str, path: &Path) -> Result<&'r str> {
    let line = rec.position().map_or(0, |p| p.line());
    rec.get(idx)
        .ok_or_else(|| Error::parse(path, line, format!("missing field {name:?}")))
}

fn parse_field<T: std::str::FromStr>(rec: &csv::StringRecord, idx: usize, name: &str, path: &Path) -> Result<T> {
    let raw = field(rec, idx, name, path)?;
    let line = rec.position().map_or(0, |p| p.line());
    raw.trim()
        .parse()
        .map_err(|_| Error::parse(path, line, format!("invalid {name}: {raw:?}")))
}

fn parse_rt(rec: &csv::StringRecord, idx: usize, path: &Path) -> Result<f64> {
    let rt: f64 = parse_field(rec, idx, "rt_ms", path)?;
    if !rt.is_finite() || rt < 0.0 {
        let line = rec.position().map_or(0, |p| p.line());
        return Err(Error::parse(
            path,
            line,
            format!("rt_ms must be finite and nonnegative, got {rt}"),
        ));
    }
    Ok(rt)
}

/// Loads a reading-time TSV in the given layout.
///
/// Records come back ordered by token key. An empty file (or a file holding
/// only the header) yields an empty corpus.
pub fn load_rt_corpus(path: &Path, layout: Layout) -> Result<LoadedCorpus> {
    let meta = std::fs::metadata(path).map_err(|e| Error::io(path, e))?;
    if meta.len() == 0 {
        return Ok(match layout {
            Layout::Averaged => LoadedCorpus::Averaged(Vec::new()),
            Layout::PerSubject => LoadedCorpus::PerSubject(Vec::new()),
        });
    }

    let mut rdr = tsv_reader(path)?;
    let headers = rdr.headers().map_err(|e| Error::parse(path, 1, e.to_string()))?.clone();
    let c_doc = column(&headers, "doc_id", path)?;
    let c_sent = column(&headers, "sent_id", path)?;
    let c_word = column(&headers, "word_idx", path)?;
    let c_surface = column(&headers, "word", path)?;
    let c_rt = column(&headers, "rt_ms", path)?;

    match layout {
        Layout::Averaged => {
            let mut rows: BTreeMap<TokenKey, (String, f64)> = BTreeMap::new();
            for rec in rdr.records() {
                let rec = rec.map_err(|e| csv_error(path, e))?;
                let key = TokenKey {
                    doc_id: field(&rec, c_doc, "doc_id", path)?.trim().to_string(),
                    sent_id: parse_field(&rec, c_sent, "sent_id", path)?,
                    word_idx: parse_field(&rec, c_word, "word_idx", path)?,
                };
                let surface = field(&rec, c_surface, "word", path)?.to_string();
                let rt = parse_rt(&rec, c_rt, path)?;
                if rows.contains_key(&key) {
                    return Err(Error::DuplicateKey(key));
                }
                rows.insert(key, (surface, rt));
            }
            Ok(LoadedCorpus::Averaged(flag_boundaries(rows)))
        }
        Layout::PerSubject => {
            let c_subject = column(&headers, "subject_id", path)?;
            let mut seen = BTreeSet::new();
            let mut readings = Vec::new();
            for rec in rdr.records() {
                let rec = rec.map_err(|e| csv_error(path, e))?;
                let reading = SubjectReading {
                    subject_id: field(&rec, c_subject, "subject_id", path)?.trim().to_string(),
                    key: TokenKey {
                        doc_id: field(&rec, c_doc, "doc_id", path)?.trim().to_string(),
                        sent_id: parse_field(&rec, c_sent, "sent_id", path)?,
                        word_idx: parse_field(&rec, c_word, "word_idx", path)?,
                    },
                    surface: field(&rec, c_surface, "word", path)?.to_string(),
                    rt_ms: parse_rt(&rec, c_rt, path)?,
                };
                if !seen.insert((reading.subject_id.clone(), reading.key.clone())) {
                    let line = rec.position().map_or(0, |p| p.line());
                    return Err(Error::parse(
                        path,
                        line,
                        format!("second reading of {} by subject {}", reading.key, reading.subject_id),
                    ));
                }
                readings.push(reading);
            }
            readings.sort_by(|a, b| (&a.key, &a.subject_id).cmp(&(&b.key, &b.subject_id)));
            Ok(LoadedCorpus::PerSubject(readings))
        }
    }
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    Error::parse(path, line, e.to_string())
}

/// Builds ordered records, setting sentence-initial/final flags from the
/// per-sentence minimum and maximum word index.
fn flag_boundaries(rows: BTreeMap<TokenKey, (String, f64)>) -> Vec<TokenRecord> {
    let mut last: HashMap<SentKey, u32> = HashMap::new();
    for key in rows.keys() {
        let e = last.entry(key.sent_key()).or_insert(key.word_idx);
        *e = (*e).max(key.word_idx);
    }
    rows.into_iter()
        .map(|(key, (surface, rt_ms))| {
            let is_sent_final = last[&key.sent_key()] == key.word_idx;
            TokenRecord {
                is_sent_initial: key.word_idx == 0,
                is_sent_final,
                key,
                surface,
                rt_ms,
            }
        })
        .collect()
}

/// Averages reading times across subjects, one record per token key.
///
/// The result does not depend on the order of `readings`: each key's
/// readings are summed in subject order.
pub fn average_subjects(readings: &[SubjectReading]) -> Result<Vec<TokenRecord>> {
    if readings.is_empty() {
        return Err(Error::Domain("no subject readings to average".into()));
    }
    let mut grouped: BTreeMap<&TokenKey, Vec<&SubjectReading>> = BTreeMap::new();
    for r in readings {
        grouped.entry(&r.key).or_default().push(r);
    }
    let mut rows = BTreeMap::new();
    for (key, mut group) in grouped {
        group.sort_by(|a, b| a.subject_id.cmp(&b.subject_id));
        let sum: f64 = group.iter().map(|r| r.rt_ms).sum();
        let mean = sum / group.len() as f64;
        rows.insert(key.clone(), (group[0].surface.clone(), mean));
    }
    Ok(flag_boundaries(rows))
}

/// Exclusion rules applied to averaged reading times.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FilterPolicy {
    pub drop_zero: bool,
    pub sd_multiplier: f64,
    pub drop_sent_initial: bool,
    pub drop_sent_final: bool,
}

impl Default for FilterPolicy {
    fn default() -> Self {
        FilterPolicy {
            drop_zero: true,
            sd_multiplier: 3.0,
            drop_sent_initial: true,
            drop_sent_final: true,
        }
    }
}

impl FilterPolicy {
    pub fn validate(&self) -> Result<()> {
        if !(self.sd_multiplier > 0.0) || !self.sd_multiplier.is_finite() {
            return Err(Error::Domain(format!(
                "sd_multiplier must be positive, got {}",
                self.sd_multiplier
            )));
        }
        Ok(())
    }
}

/// What [`filter_tokens`] removed and the statistics it used.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FilterSummary {
    pub n_input: usize,
    pub n_zero: usize,
    /// Mean and sample SD over the corpus after zero removal.
    pub mean: f64,
    pub sd: f64,
    pub n_outlier: usize,
    pub n_initial: usize,
    pub n_final: usize,
    pub n_output: usize,
}

impl FilterSummary {
    pub fn is_empty_warning(&self) -> bool {
        self.n_output == 0
    }
}

impl fmt::Display for FilterSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "sd_scope\tcorpus_after_averaging")?;
        writeln!(f, "n_input\t{}", self.n_input)?;
        writeln!(f, "n_zero\t{}", self.n_zero)?;
        writeln!(f, "mean_rt\t{:.6}", self.mean)?;
        writeln!(f, "sd_rt\t{:.6}", self.sd)?;
        writeln!(f, "n_outlier\t{}", self.n_outlier)?;
        writeln!(f, "n_sent_initial\t{}", self.n_initial)?;
        writeln!(f, "n_sent_final\t{}", self.n_final)?;
        writeln!(f, "n_output\t{}", self.n_output)?;
        if self.is_empty_warning() {
            writeln!(f, "warning\tall tokens filtered")?;
        }
        Ok(())
    }
}

/// Applies the exclusion rules in a single pass.
///
/// Zero reading times go first; mean and SD are then computed over the
/// remaining corpus-wide RTs and rows further than `sd_multiplier` SDs from
/// the mean are dropped; finally sentence-initial/final words are removed.
/// Relative order is preserved.
pub fn filter_tokens(tokens: &[TokenRecord], policy: &FilterPolicy) -> Result<(Vec<TokenRecord>, FilterSummary)> {
    policy.validate()?;
    if let Some(t) = tokens.iter().find(|t| !t.rt_ms.is_finite()) {
        return Err(Error::Domain(format!("non-finite reading time at {}", t.key)));
    }

    let nonzero: Vec<&TokenRecord> = tokens
        .iter()
        .filter(|t| !(policy.drop_zero && t.rt_ms == 0.0))
        .collect();
    let n_zero = tokens.len() - nonzero.len();

    let (mean, sd) = mean_sd(nonzero.iter().map(|t| t.rt_ms));
    let bound = policy.sd_multiplier * sd;
    let kept: Vec<&TokenRecord> = nonzero
        .into_iter()
        .filter(|t| sd == 0.0 || (t.rt_ms - mean).abs() <= bound)
        .collect();
    let n_outlier = tokens.len() - n_zero - kept.len();

    let mut n_initial = 0;
    let mut n_final = 0;
    let mut out = Vec::with_capacity(kept.len());
    for t in kept {
        if policy.drop_sent_initial && t.is_sent_initial {
            n_initial += 1;
        } else if policy.drop_sent_final && t.is_sent_final {
            n_final += 1;
        } else {
            out.push(t.clone());
        }
    }

    let summary = FilterSummary {
        n_input: tokens.len(),
        n_zero,
        mean,
        sd,
        n_outlier,
        n_initial,
        n_final,
        n_output: out.len(),
    };
    Ok((out, summary))
}

/// Mean and sample standard deviation; SD is 0 for fewer than two values.
fn mean_sd(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = values.clone().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = values.map(|v| (v - mean).powi(2)).sum();
    (mean, (ss / (n - 1) as f64).sqrt())
}

/// Word counts keyed by lowercased surface form.
#[derive(Debug, Clone, PartialEq)]
pub struct FreqTable {
    counts: HashMap<String, u64>,
    total: u64,
    smoothing_floor: u64,
}

impl FreqTable {
    pub fn new(counts: impl IntoIterator<Item = (String, u64)>, smoothing_floor: u64) -> Self {
        let mut merged: HashMap<String, u64> = HashMap::new();
        for (word, count) in counts {
            *merged.entry(word.to_lowercase()).or_default() += count;
        }
        let total = merged.values().sum::<u64>().max(1);
        FreqTable {
            counts: merged,
            total,
            smoothing_floor: smoothing_floor.max(1),
        }
    }

    /// Reads a `word<TAB>count` TSV. A header row is optional.
    pub fn load(path: &Path, smoothing_floor: u64) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut counts = Vec::new();
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            let lineno = i as u64 + 1;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split('\t');
            let (Some(word), Some(count), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(Error::parse(path, lineno, "expected `word<TAB>count`"));
            };
            match count.trim().parse::<u64>() {
                Ok(c) => counts.push((word.to_string(), c)),
                Err(_) if lineno == 1 => continue,
                Err(_) => return Err(Error::parse(path, lineno, format!("invalid count {count:?}"))),
            }
        }
        Ok(FreqTable::new(counts, smoothing_floor))
    }

    pub fn count(&self, surface: &str) -> u64 {
        self.counts.get(&surface.to_lowercase()).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn smoothing_floor(&self) -> u64 {
        self.smoothing_floor
    }
}

/// `ln(max(count, floor))` of the lowercased surface.
pub fn log_frequency(table: &FreqTable, surface: &str) -> f64 {
    (table.count(surface).max(table.smoothing_floor) as f64).ln()
}

/// Character length of a word.
pub fn word_length(surface: &str) -> usize {
    surface.chars().count()
}

/// Character length after stripping any trailing characters found in `strip`.
pub fn word_length_stripped(surface: &str, strip: &str) -> usize {
    surface.trim_end_matches(|c| strip.contains(c)).chars().count()
}

/// One lowercased word per line; blank lines and `#` comments are skipped.
pub fn load_stopwords(path: &Path) -> Result<BTreeSet<String>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase)
        .collect())
}

/// Groups ordered tokens into sentences.
pub fn sentences(tokens: &[TokenRecord]) -> BTreeMap<SentKey, Vec<&TokenRecord>> {
    let mut out: BTreeMap<SentKey, Vec<&TokenRecord>> = BTreeMap::new();
    for t in tokens {
        out.entry(t.key.sent_key()).or_default().push(t);
    }
    out
}
