use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use ppp_core::corpus::{FilterSummary, FreqTable, TokenRecord};
use ppp_core::metrics::{align_dump, corpus_ppl, read_dump, Metric, WordMetrics};
use ppp_core::regression::{build_features, fit_nested, FeatureOptions};
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::inputs::{load_corpus, load_freq, Corpus};
use crate::output::{cell, header_comment, opt_num, tsv_reader, write_table};

pub const FIT_COLUMNS: [&str; 11] = [
    "model_id",
    "prompt_id",
    "metric",
    "n",
    "ppp_nats",
    "ppp_milli",
    "ppl",
    "f_p",
    "t_p",
    "corpus",
    "status",
];

/// One (model, prompt, metric) cell of a fit run.
#[derive(Debug, Clone, PartialEq)]
pub struct FitRow {
    pub model_id: String,
    pub prompt_id: String,
    pub metric: String,
    pub n: usize,
    pub ppp_nats: Option<f64>,
    pub ppl: Option<f64>,
    pub f_p: Option<f64>,
    pub t_p: Option<f64>,
    pub corpus: String,
    /// `ok`, or the reason the cell could not be fitted.
    pub status: String,
}

impl FitRow {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }

    fn cells(&self) -> Vec<String> {
        vec![
            cell(&self.model_id),
            cell(&self.prompt_id),
            self.metric.clone(),
            self.n.to_string(),
            opt_num(self.ppp_nats),
            opt_num(self.ppp_nats.map(|v| v * 1000.0)),
            opt_num(self.ppl),
            opt_num(self.f_p),
            opt_num(self.t_p),
            cell(&self.corpus),
            cell(&self.status),
        ]
    }
}

struct Scored {
    model_id: String,
    prompt_id: String,
    outcome: Result<(Vec<(TokenRecord, WordMetrics)>, f64), String>,
}

fn score_dump(cfg: &RunConfig, corpus: &Corpus, path: &Path) -> Scored {
    let dump = match read_dump(path) {
        Ok(d) => d,
        Err(e) => {
            let stem = path
                .file_stem()
                .map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into());
            return Scored {
                model_id: stem,
                prompt_id: "NA".into(),
                outcome: Err(format!("error: {e}")),
            };
        }
    };
    let outcome = align_dump(&dump.records, &corpus.tokens, cfg.entropy_policy)
        .and_then(|aligned| {
            let ppl = corpus_ppl(
                aligned
                    .iter()
                    .filter(|(t, _)| corpus.retained.contains(&t.key))
                    .map(|(_, w)| w),
            )?;
            Ok((aligned, ppl))
        })
        .map_err(|e| format!("error: {e}"));
    Scored {
        model_id: dump.header.model_id,
        prompt_id: dump.header.prompt_id,
        outcome,
    }
}

fn fit_cell(cfg: &RunConfig, corpus: &Corpus, freq: &FreqTable, scored: &Scored, metric: Metric) -> FitRow {
    let mut row = FitRow {
        model_id: scored.model_id.clone(),
        prompt_id: scored.prompt_id.clone(),
        metric: metric.to_string(),
        n: 0,
        ppp_nats: None,
        ppl: None,
        f_p: None,
        t_p: None,
        corpus: cfg.corpus_name.clone(),
        status: "ok".into(),
    };
    let (aligned, ppl) = match &scored.outcome {
        Ok(v) => v,
        Err(e) => {
            row.status = e.clone();
            return row;
        }
    };
    row.ppl = Some(*ppl);
    let opts = FeatureOptions {
        scope: cfg.context_scope,
        strip_trailing: cfg.strip_trailing.clone(),
    };
    let features = build_features(aligned, &corpus.retained, metric, freq, &opts);
    row.n = features.rows.len();
    match fit_nested(&features.rows, cfg.interaction) {
        Ok(fit) => {
            row.ppp_nats = Some(fit.ppp_per_token);
            row.f_p = Some(fit.f_p_value);
            row.t_p = Some(fit.coeff_t_p_value);
        }
        Err(e) => row.status = format!("error: {e}"),
    }
    row
}

/// Fits every (dump, metric) cell on a pool of `workers` threads. Rows come
/// back sorted, so the worker count never changes the result.
pub fn fit_rows(cfg: &RunConfig, workers: usize) -> Result<(Vec<FitRow>, FilterSummary)> {
    let corpus = load_corpus(cfg)?;
    let freq = load_freq(cfg)?;
    let dumps: Vec<PathBuf> = cfg.dumps.iter().map(|p| cfg.resolve(p)).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .context("starting worker pool")?;
    let mut rows: Vec<FitRow> = pool.install(|| {
        let scored: Vec<Scored> = dumps.par_iter().map(|p| score_dump(cfg, &corpus, p)).collect();
        let cells: Vec<(usize, Metric)> = (0..scored.len())
            .flat_map(|i| cfg.metrics.iter().map(move |m| (i, *m)))
            .collect();
        cells
            .par_iter()
            .map(|&(i, m)| fit_cell(cfg, &corpus, &freq, &scored[i], m))
            .collect()
    });
    rows.sort_by(|a, b| {
        (&a.corpus, &a.model_id, &a.prompt_id, &a.metric).cmp(&(&b.corpus, &b.model_id, &b.prompt_id, &b.metric))
    });
    Ok((rows, corpus.summary))
}

pub fn write_fit(cfg: &RunConfig, rows: &[FitRow], summary: &FilterSummary) -> Result<(PathBuf, PathBuf)> {
    let comment = header_comment(cfg, &[("interaction", cfg.interaction.to_string())]);
    let fit_path = cfg.output_path("fit.tsv");
    let body: Vec<Vec<String>> = rows.iter().map(FitRow::cells).collect();
    write_table(&fit_path, &comment, '\t', &FIT_COLUMNS, &body)?;

    let filter_path = cfg.output_path("filter.tsv");
    let lines: Vec<Vec<String>> = summary
        .to_string()
        .lines()
        .map(|l| l.split('\t').map(str::to_string).collect())
        .collect();
    write_table(&filter_path, &comment, '\t', &["field", "value"], &lines)?;
    Ok((fit_path, filter_path))
}

/// Parses a table written by [`write_fit`].
pub fn read_fit(path: &Path) -> Result<Vec<FitRow>> {
    let mut rdr = tsv_reader(path)?;
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .with_context(|| format!("{} has no {name} column", path.display()))
    };
    let idx: Vec<usize> = FIT_COLUMNS.iter().map(|c| col(c)).collect::<Result<_>>()?;
    let parse = |s: &str| -> Result<Option<f64>> {
        if s == "NA" {
            Ok(None)
        } else {
            Ok(Some(s.parse().with_context(|| {
                format!("invalid number {s:?} in {}", path.display())
            })?))
        }
    };
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.with_context(|| format!("reading {}", path.display()))?;
        let get = |i: usize| rec.get(idx[i]).unwrap_or("");
        rows.push(FitRow {
            model_id: get(0).into(),
            prompt_id: get(1).into(),
            metric: get(2).into(),
            n: get(3)
                .parse()
                .with_context(|| format!("invalid n in {}", path.display()))?,
            ppp_nats: parse(get(4))?,
            ppl: parse(get(6))?,
            f_p: parse(get(7))?,
            t_p: parse(get(8))?,
            corpus: get(9).into(),
            status: get(10).into(),
        });
    }
    Ok(rows)
}

pub fn summary_line(row: &FitRow) -> String {
    format!(
        "{}\t{}\t{}\tppp={}\tf_p={}\t{}",
        row.model_id,
        row.prompt_id,
        row.metric,
        opt_num(row.ppp_nats),
        opt_num(row.f_p),
        row.status
    )
}
