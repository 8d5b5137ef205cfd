//! Synthetic corpus, frequency table, score dump and transcripts drawn from
//! a small bigram model whose probabilities are known exactly.
//!
//! Reading times follow `150 + 10·h(t) + 4·h(t−1) + 2·h(t−2) + ε` with `h`
//! the word's surprisal in bits and ε Gaussian. In null mode the dump
//! carries independent noise in place of the true log-probabilities.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use ppp_core::corpus::{SentKey, TokenKey};
use ppp_core::metaling::TranscriptLine;
use ppp_core::metrics::{
    renyi_entropy, shannon_entropy, write_dump, Alpha, Detokenizer, DumpHeader, ProbabilityVector, ScoreDump,
    ScoreDumpRecord, SubwordScore,
};
use rand::distr::weighted::WeightedIndex;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::output::num;

const RENYI_ORDER: f64 = 0.5;
const PERIOD_PROB: f64 = 0.9;

#[derive(Debug, Clone)]
pub struct SynthOptions {
    pub words: usize,
    pub seed: u64,
    pub null: bool,
    pub model_id: String,
    pub noise_sd: f64,
    pub sentences_per_doc: usize,
}

impl Default for SynthOptions {
    fn default() -> Self {
        SynthOptions {
            words: 2000,
            seed: 0,
            null: false,
            model_id: "stub".into(),
            noise_sd: 20.0,
            sentences_per_doc: 10,
        }
    }
}

/// Files written by [`generate`].
#[derive(Debug, Clone)]
pub struct SynthFiles {
    pub config: PathBuf,
    pub corpus: PathBuf,
    pub freq: PathBuf,
    pub dump: PathBuf,
    pub transcripts_perfect: PathBuf,
    pub transcripts_random: PathBuf,
    pub n_words: usize,
    pub n_sentences: usize,
}

struct Word {
    text: String,
    /// First piece; multi-syllable words share it with others.
    head: String,
    tail: Option<String>,
}

fn vocabulary(rng: &mut ChaCha8Rng) -> Vec<Word> {
    let vowels = ['a', 'e', 'i', 'o', 'u'];
    let syl = |cs: &str| -> Vec<String> {
        cs.chars()
            .flat_map(|c| vowels.iter().map(move |v| format!("{c}{v}")))
            .collect()
    };
    let (short, heads, any) = (syl("ptkbd"), syl("gmnsl"), syl("ptkbdgmnslr"));
    let mut words: Vec<Word> = short
        .iter()
        .map(|s| Word {
            text: s.clone(),
            head: s.clone(),
            tail: None,
        })
        .collect();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    while words.len() < 100 {
        let head = heads[rng.random_range(0..heads.len())].clone();
        let n_tail = rng.random_range(1..=2);
        let tail: String = (0..n_tail)
            .map(|_| any[rng.random_range(0..any.len())].as_str())
            .collect();
        let text = format!("{head}{tail}");
        if seen.insert(text.clone()) {
            words.push(Word {
                text,
                head,
                tail: Some(tail),
            });
        }
    }
    words.shuffle(rng);
    words
}

/// Next-word distribution after one context word, with the piece-level
/// quantities the dump needs.
struct NextWord {
    probs: Vec<f64>,
    sampler: WeightedIndex<f64>,
    /// Probability of each first piece.
    head_prob: BTreeMap<String, f64>,
    head_entropy: (f64, f64),
    /// Entropies of the continuation given the first piece.
    tail_entropy: BTreeMap<String, (f64, f64)>,
}

/// Shannon and Rényi entropies in nats.
fn entropies(weights: &[f64]) -> Result<(f64, f64)> {
    let total: f64 = weights.iter().sum();
    let pv = ProbabilityVector::new(weights.iter().map(|w| w / total).collect())?;
    let ln2 = std::f64::consts::LN_2;
    Ok((shannon_entropy(&pv) * ln2, renyi_entropy(&pv, RENYI_ORDER)? * ln2))
}

fn context(vocab: &[Word], logits: &[f64]) -> Result<NextWord> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exp: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
    let total: f64 = exp.iter().sum();
    let probs: Vec<f64> = exp.iter().map(|e| e / total).collect();

    let mut by_head: BTreeMap<String, Vec<(usize, f64)>> = BTreeMap::new();
    for (i, w) in vocab.iter().enumerate() {
        by_head.entry(w.head.clone()).or_default().push((i, probs[i]));
    }
    let head_prob: BTreeMap<String, f64> = by_head
        .iter()
        .map(|(h, ws)| (h.clone(), ws.iter().map(|(_, p)| p).sum()))
        .collect();
    let head_entropy = entropies(&head_prob.values().copied().collect::<Vec<_>>())?;
    let mut tail_entropy = BTreeMap::new();
    for (h, ws) in &by_head {
        tail_entropy.insert(h.clone(), entropies(&ws.iter().map(|(_, p)| *p).collect::<Vec<_>>())?);
    }
    Ok(NextWord {
        sampler: WeightedIndex::new(&probs).context("building sampler")?,
        probs,
        head_prob,
        head_entropy,
        tail_entropy,
    })
}

fn piece(text: String, logprob_nat: f64, (shannon, renyi): (f64, f64)) -> SubwordScore {
    SubwordScore {
        piece: text,
        logprob_nat,
        shannon_nat: Some(shannon),
        renyi_nat: BTreeMap::from([(Alpha::new(RENYI_ORDER).expect("valid order"), renyi)]),
    }
}

struct Token {
    key: TokenKey,
    surface: String,
    rt: f64,
    record: ScoreDumpRecord,
}

/// Writes a synthetic run into `dir` and returns the paths.
pub fn generate(opts: &SynthOptions, dir: &Path) -> Result<SynthFiles> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let vocab = vocabulary(&mut rng);
    let v = vocab.len();
    let unigram: Vec<f64> = (0..v).map(|r| 1.0 / (r as f64 + 1.0)).collect();
    let jitter = Normal::new(0.0, 1.5).expect("valid normal");
    // Index v is the sentence start.
    let contexts: Vec<NextWord> = (0..=v)
        .map(|_| {
            let logits: Vec<f64> = unigram.iter().map(|u| u.ln() + jitter.sample(&mut rng)).collect();
            context(&vocab, &logits)
        })
        .collect::<Result<_>>()?;
    let period_entropy = entropies(&[PERIOD_PROB, 1.0 - PERIOD_PROB])?;
    let noise = Normal::new(0.0, opts.noise_sd).context("noise SD")?;
    let fake = Normal::new(7.0, 3.0).expect("valid normal");

    let mut tokens: Vec<Token> = Vec::with_capacity(opts.words);
    let mut n_sentences = 0;
    while tokens.len() < opts.words {
        let len = rng.random_range(6..=14).min(opts.words - tokens.len());
        let (doc, sent) = (
            n_sentences / opts.sentences_per_doc,
            n_sentences % opts.sentences_per_doc,
        );
        n_sentences += 1;
        let mut prev = v;
        let mut history: Vec<f64> = Vec::new();
        for idx in 0..len {
            let ctx = &contexts[prev];
            let w = ctx.sampler.sample(&mut rng);
            let word = &vocab[w];
            let last = idx + 1 == len;

            let head_lp = ctx.head_prob[&word.head].ln();
            let mut pieces = vec![piece(format!("Ġ{}", word.head), head_lp, ctx.head_entropy)];
            if let Some(tail) = &word.tail {
                let tail_lp = ctx.probs[w].ln() - head_lp;
                pieces.push(piece(tail.clone(), tail_lp, ctx.tail_entropy[&word.head]));
            }
            if last {
                pieces.push(piece(".".into(), PERIOD_PROB.ln(), period_entropy));
            }
            let true_lp: f64 = pieces.iter().map(|p| p.logprob_nat).sum();
            let h = -true_lp / std::f64::consts::LN_2;
            if opts.null {
                let fake_bits: f64 = fake.sample(&mut rng);
                let fake_lp = -fake_bits.abs().max(0.01) * std::f64::consts::LN_2;
                for p in &mut pieces {
                    p.logprob_nat *= fake_lp / true_lp;
                }
            }

            let spill = |back: usize| history.len().checked_sub(back).map_or(0.0, |i| history[i]);
            let rt = (150.0 + 10.0 * h + 4.0 * spill(1) + 2.0 * spill(2) + noise.sample(&mut rng)).max(1.0);
            history.push(h);

            let key = TokenKey::new(format!("doc{doc:03}"), sent as u32, idx as u32);
            let surface = if last {
                format!("{}.", word.text)
            } else {
                word.text.clone()
            };
            tokens.push(Token {
                record: ScoreDumpRecord {
                    key: key.clone(),
                    surface: surface.clone(),
                    model_id: opts.model_id.clone(),
                    prompt_id: "none".into(),
                    subwords: pieces,
                    dep_len: None,
                },
                key,
                surface,
                rt,
            });
            prev = w;
        }
    }

    let files = SynthFiles {
        config: dir.join("config.toml"),
        corpus: dir.join("corpus.tsv"),
        freq: dir.join("freq.tsv"),
        dump: dir.join("dump.jsonl"),
        transcripts_perfect: dir.join("transcripts_perfect.jsonl"),
        transcripts_random: dir.join("transcripts_random.jsonl"),
        n_words: tokens.len(),
        n_sentences,
    };

    let mut corpus = String::from("doc_id\tsent_id\tword_idx\tword\trt_ms\n");
    for t in &tokens {
        writeln!(
            corpus,
            "{}\t{}\t{}\t{}\t{}",
            t.key.doc_id,
            t.key.sent_id,
            t.key.word_idx,
            t.surface,
            num(t.rt)
        )?;
    }
    write_file(&files.corpus, &corpus)?;

    let total: f64 = unigram.iter().sum();
    let mut freq: Vec<(&str, u64)> = vocab
        .iter()
        .zip(&unigram)
        .map(|(w, u)| (w.text.as_str(), (1e6 * u / total).round() as u64 + 1))
        .collect();
    freq.sort();
    let mut freq_text = String::from("word\tcount\n");
    for (w, c) in freq {
        writeln!(freq_text, "{w}\t{c}")?;
    }
    write_file(&files.freq, &freq_text)?;

    let mut header = DumpHeader::new(opts.model_id.clone(), "none", Detokenizer::ByteLevel);
    header.alphas = vec![Alpha::new(RENYI_ORDER)?];
    let dump = ScoreDump {
        header,
        records: tokens.iter().map(|t| t.record.clone()).collect(),
    };
    let out = File::create(&files.dump).with_context(|| format!("creating {}", files.dump.display()))?;
    write_dump(BufWriter::new(out), &dump)?;

    write_transcripts(&files, &tokens, opts, &mut rng)?;

    let config = format!(
        "corpus_name = \"synth\"\ncorpus = \"corpus.tsv\"\ndumps = [\"dump.jsonl\"]\nfreq = \"freq.tsv\"\nseed = {}\n",
        opts.seed
    );
    write_file(&files.config, &config)?;
    Ok(files)
}

/// Three runs each of rankings by descending reading time and of random
/// rankings.
fn write_transcripts(files: &SynthFiles, tokens: &[Token], opts: &SynthOptions, rng: &mut ChaCha8Rng) -> Result<()> {
    let mut by_sentence: BTreeMap<SentKey, Vec<&Token>> = BTreeMap::new();
    for t in tokens {
        by_sentence.entry(t.key.sent_key()).or_default().push(t);
    }
    let listing = |order: &[usize], words: &[&Token]| -> String {
        order
            .iter()
            .map(|&i| format!("{i}: {}", words[i].surface))
            .collect::<Vec<_>>()
            .join("\n")
    };
    let (mut perfect, mut random) = (String::new(), String::new());
    for run in 0..3u32 {
        for (key, words) in &by_sentence {
            let mut order: Vec<usize> = (0..words.len()).collect();
            order.sort_by(|&a, &b| words[b].rt.total_cmp(&words[a].rt));
            let line = |prompt: &str, order: &[usize]| TranscriptLine {
                sent_key: key.clone(),
                run_id: run,
                raw_text: listing(order, words),
                model_id: Some(opts.model_id.clone()),
                prompt_id: Some(prompt.into()),
            };
            writeln!(perfect, "{}", serde_json::to_string(&line("perfect", &order))?)?;
            order.shuffle(rng);
            writeln!(random, "{}", serde_json::to_string(&line("random", &order))?)?;
        }
    }
    write_file(&files.transcripts_perfect, &perfect)?;
    write_file(&files.transcripts_random, &random)
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}
