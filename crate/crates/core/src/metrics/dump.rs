//! Score dump files: JSON Lines with one header object followed by one
//! record per corpus word.
//!
//! ```text
//! {"format":"ppp-score-dump","version":1,"model_id":"gpt2","prompt_id":"none",
//!  "detokenizer":"byte_level","alphas":["0.5"],"intra_sentential":true}
//! {"doc_id":"d1","sent_id":0,"word_idx":0,"surface":"The","model_id":"gpt2",
//!  "prompt_id":"none","subwords":[{"piece":"The","logprob_nat":-3.2,
//!  "shannon_nat":5.1,"renyi_nat":{"0.5":7.9}}]}
//! ```

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Alpha, SubwordScore};
use crate::corpus::TokenKey;
use crate::error::{Error, Result};

pub const DUMP_FORMAT: &str = "ppp-score-dump";
pub const DUMP_VERSION: u32 = 1;

/// How subword pieces are joined back into a word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Detokenizer {
    /// Plain concatenation.
    Identity,
    /// GPT-2 style byte-level BPE, `Ġ` marks a leading space.
    ByteLevel,
    /// SentencePiece, `▁` marks a leading space.
    Sentencepiece,
    /// WordPiece, `##` marks a continuation piece.
    Wordpiece,
}

impl Detokenizer {
    pub fn join<'a>(&self, pieces: impl IntoIterator<Item = &'a str>) -> String {
        let mut out = String::new();
        for piece in pieces {
            match self {
                Detokenizer::Identity => out.push_str(piece),
                Detokenizer::ByteLevel => out.push_str(&piece.replace('Ġ', " ")),
                Detokenizer::Sentencepiece => out.push_str(&piece.replace('▁', " ")),
                Detokenizer::Wordpiece => out.push_str(piece.strip_prefix("##").unwrap_or(piece)),
            }
        }
        normalize_ws(&out)
    }
}

/// Trims and collapses internal whitespace runs to one space.
pub(crate) fn normalize_ws(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DumpHeader {
    pub format: String,
    pub version: u32,
    pub model_id: String,
    pub prompt_id: String,
    pub detokenizer: Detokenizer,
    #[serde(default)]
    pub alphas: Vec<Alpha>,
    /// Whether the producer restricted context to the current sentence.
    /// Absent means undeclared.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intra_sentential: Option<bool>,
}

impl DumpHeader {
    pub fn new(model_id: impl Into<String>, prompt_id: impl Into<String>, detokenizer: Detokenizer) -> Self {
        DumpHeader {
            format: DUMP_FORMAT.to_string(),
            version: DUMP_VERSION,
            model_id: model_id.into(),
            prompt_id: prompt_id.into(),
            detokenizer,
            alphas: Vec::new(),
            intra_sentential: Some(true),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreDumpRecord {
    #[serde(flatten)]
    pub key: TokenKey,
    pub surface: String,
    pub model_id: String,
    pub prompt_id: String,
    pub subwords: Vec<SubwordScore>,
    /// Precomputed dependency length; carried through, never computed here.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dep_len: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreDump {
    pub header: DumpHeader,
    pub records: Vec<ScoreDumpRecord>,
}

impl ScoreDump {
    /// Checks record invariants against the header.
    pub fn validate(&self) -> Result<()> {
        let h = &self.header;
        if h.format != DUMP_FORMAT {
            return Err(Error::Domain(format!("unknown dump format {:?}", h.format)));
        }
        if h.version != DUMP_VERSION {
            return Err(Error::Domain(format!("unsupported dump version {}", h.version)));
        }
        let mut seen = BTreeSet::new();
        for rec in &self.records {
            check_record(h, rec)?;
            if !seen.insert(&rec.key) {
                return Err(Error::DuplicateKey(rec.key.clone()));
            }
        }
        Ok(())
    }
}

fn check_record(h: &DumpHeader, rec: &ScoreDumpRecord) -> Result<()> {
    if rec.model_id != h.model_id || rec.prompt_id != h.prompt_id {
        return Err(Error::Domain(format!(
            "record {} is for {}/{} but the header declares {}/{}",
            rec.key, rec.model_id, rec.prompt_id, h.model_id, h.prompt_id
        )));
    }
    if rec.subwords.is_empty() {
        return Err(Error::Domain(format!("record {} has no subwords", rec.key)));
    }
    for s in &rec.subwords {
        s.validate()?;
    }
    let joined = h.detokenizer.join(rec.subwords.iter().map(|s| s.piece.as_str()));
    if joined != normalize_ws(&rec.surface) {
        return Err(Error::Alignment {
            key: rec.key.clone(),
            corpus: rec.surface.clone(),
            dump: joined,
        });
    }
    Ok(())
}

/// Reads and validates a dump. Records keep file order.
pub fn read_dump(path: &Path) -> Result<ScoreDump> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut header: Option<DumpHeader> = None;
    let mut records = Vec::new();
    let mut seen = BTreeSet::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let lineno = i as u64 + 1;
        if line.trim().is_empty() {
            continue;
        }
        match &header {
            None => {
                let h: DumpHeader = serde_json::from_str(&line)
                    .map_err(|e| Error::parse(path, lineno, format!("invalid dump header: {e}")))?;
                if h.format != DUMP_FORMAT {
                    return Err(Error::parse(
                        path,
                        lineno,
                        format!("unknown dump format {:?}", h.format),
                    ));
                }
                if h.version != DUMP_VERSION {
                    return Err(Error::parse(
                        path,
                        lineno,
                        format!("unsupported dump version {}", h.version),
                    ));
                }
                header = Some(h);
            }
            Some(h) => {
                let rec: ScoreDumpRecord =
                    serde_json::from_str(&line).map_err(|e| Error::parse(path, lineno, e.to_string()))?;
                check_record(h, &rec).map_err(|e| Error::parse(path, lineno, e.to_string()))?;
                if !seen.insert(rec.key.clone()) {
                    return Err(Error::parse(path, lineno, format!("duplicate token key {}", rec.key)));
                }
                records.push(rec);
            }
        }
    }
    let header = header.ok_or_else(|| Error::parse(path, 1, "dump has no header line"))?;
    Ok(ScoreDump { header, records })
}

pub fn write_dump<W: Write>(mut out: W, dump: &ScoreDump) -> std::io::Result<()> {
    serde_json::to_writer(&mut out, &dump.header)?;
    out.write_all(b"\n")?;
    for rec in &dump.records {
        serde_json::to_writer(&mut out, rec)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}
