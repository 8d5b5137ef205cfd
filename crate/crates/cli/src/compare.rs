use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use ppp_core::stats::{tradeoff_analysis, PplAxis, PppPplPoint, TradeoffAnalysis};

use crate::config::RunConfig;
use crate::fit::{read_fit, FitRow};
use crate::output::{cell, header_comment, num, tsv_reader, write_table};

/// Prompt id of unconditioned scoring.
pub const NO_PROMPT: &str = "none";

/// Instruction-tuning flags by model, optionally narrowed to one prompt.
#[derive(Debug, Clone, Default)]
pub struct ModelFlags {
    exact: BTreeMap<(String, String), bool>,
    any_prompt: BTreeMap<String, bool>,
}

impl ModelFlags {
    pub fn load(path: &Path) -> Result<Self> {
        let mut rdr = tsv_reader(path)?;
        let headers = rdr.headers()?.clone();
        let col = |name: &str| {
            headers
                .iter()
                .position(|h| h == name)
                .with_context(|| format!("{} has no {name} column", path.display()))
        };
        let (c_model, c_it, c_prompt) = (col("model_id")?, col("instruction_tuned")?, col("prompt_id")?);
        let mut flags = ModelFlags::default();
        for rec in rdr.records() {
            let rec = rec.with_context(|| format!("reading {}", path.display()))?;
            let line = rec.position().map_or(0, |p| p.line());
            let model = rec.get(c_model).unwrap_or("").to_string();
            let prompt = rec.get(c_prompt).unwrap_or("").to_string();
            let it = match rec.get(c_it).unwrap_or("").to_ascii_lowercase().as_str() {
                "1" | "true" | "yes" => true,
                "0" | "false" | "no" => false,
                other => bail!(
                    "{}:{line}: instruction_tuned must be true or false, got {other:?}",
                    path.display()
                ),
            };
            flags
                .insert(model, prompt, it)
                .with_context(|| format!("{}:{line}", path.display()))?;
        }
        Ok(flags)
    }

    /// `prompt` may be `*` to cover every prompt of the model.
    pub fn insert(&mut self, model: String, prompt: String, instruction_tuned: bool) -> Result<()> {
        let fresh = if prompt == "*" {
            self.any_prompt.insert(model.clone(), instruction_tuned).is_none()
        } else {
            self.exact
                .insert((model.clone(), prompt.clone()), instruction_tuned)
                .is_none()
        };
        if !fresh {
            bail!("duplicate flags for model {model:?}, prompt {prompt:?}");
        }
        Ok(())
    }

    pub fn instruction_tuned(&self, model: &str, prompt: &str) -> Option<bool> {
        self.exact
            .get(&(model.to_string(), prompt.to_string()))
            .or_else(|| self.any_prompt.get(model))
            .copied()
    }
}

/// One (corpus, metric) cell of a comparison.
pub struct CompareCell {
    pub corpus: String,
    pub metric: String,
    pub points: Vec<PppPplPoint>,
    pub analysis: std::result::Result<TradeoffAnalysis, String>,
}

/// Groups usable fit rows into cells and runs the trade-off analysis on each.
pub fn compare(rows: &[FitRow], flags: &ModelFlags, axis: PplAxis) -> Result<Vec<CompareCell>> {
    let mut seen = BTreeSet::new();
    let mut cells: BTreeMap<(String, String), Vec<PppPplPoint>> = BTreeMap::new();
    for row in rows {
        let id = (&row.corpus, &row.metric, &row.model_id, &row.prompt_id);
        if !seen.insert(id) {
            bail!(
                "duplicate fit row for corpus {:?}, metric {:?}, model {:?}, prompt {:?}",
                row.corpus,
                row.metric,
                row.model_id,
                row.prompt_id
            );
        }
        let (Some(ppl), Some(ppp), true) = (row.ppl, row.ppp_nats, row.is_ok()) else {
            log::warn!(
                "skipping {}/{}/{}: {}",
                row.model_id,
                row.prompt_id,
                row.metric,
                row.status
            );
            continue;
        };
        let Some(it) = flags.instruction_tuned(&row.model_id, &row.prompt_id) else {
            bail!(
                "no instruction_tuned flag for model {:?}, prompt {:?}",
                row.model_id,
                row.prompt_id
            );
        };
        cells
            .entry((row.corpus.clone(), row.metric.clone()))
            .or_default()
            .push(PppPplPoint {
                corpus: row.corpus.clone(),
                model_id: row.model_id.clone(),
                prompt_id: row.prompt_id.clone(),
                metric: row.metric.clone(),
                ppl,
                ppp,
                is_instruction_tuned: it,
                is_prompt_conditioned: row.prompt_id != NO_PROMPT,
            });
    }
    Ok(cells
        .into_iter()
        .map(|((corpus, metric), mut points)| {
            points.sort_by(|a, b| (&a.model_id, &a.prompt_id).cmp(&(&b.model_id, &b.prompt_id)));
            let analysis = tradeoff_analysis(&points, axis).map_err(|e| e.to_string());
            if let Err(e) = &analysis {
                log::warn!("skipping cell {corpus}/{metric}: {e}");
            }
            CompareCell {
                corpus,
                metric,
                points,
                analysis,
            }
        })
        .collect())
}

pub const TRADEOFF_COLUMNS: [&str; 13] = [
    "corpus",
    "metric",
    "axis",
    "slope",
    "intercept",
    "pearson_r",
    "pearson_p",
    "n_base",
    "n_flagged",
    "below_line",
    "binom_p",
    "n_points",
    "status",
];

pub const SCATTER_COLUMNS: [&str; 11] = [
    "corpus",
    "metric",
    "model_id",
    "prompt_id",
    "ppl",
    "ppp_nats",
    "instruction_tuned",
    "prompt_conditioned",
    "fitted",
    "residual",
    "below_line",
];

pub fn run(cfg: &RunConfig, fit_paths: &[PathBuf], flags_path: &Path) -> Result<(PathBuf, PathBuf)> {
    let mut rows = Vec::new();
    for p in fit_paths {
        rows.extend(read_fit(p)?);
    }
    let flags = ModelFlags::load(flags_path)?;
    let cells = compare(&rows, &flags, cfg.ppl_axis)?;
    write(cfg, &cells)
}

pub fn write(cfg: &RunConfig, cells: &[CompareCell]) -> Result<(PathBuf, PathBuf)> {
    let comment = header_comment(cfg, &[("ppl_axis", cfg.ppl_axis.to_string())]);
    let mut summary = Vec::new();
    let mut scatter = Vec::new();
    for c in cells {
        let mut row = vec![cell(&c.corpus), c.metric.clone(), cfg.ppl_axis.to_string()];
        let status = match &c.analysis {
            Ok(a) => {
                row.extend([
                    num(a.slope),
                    num(a.intercept),
                    num(a.pearson_r),
                    num(a.pearson_p),
                    a.n_base.to_string(),
                    a.n_flagged.to_string(),
                    a.below_line.to_string(),
                    num(a.binom_p),
                ]);
                "ok".to_string()
            }
            Err(e) => {
                row.extend(std::iter::repeat_n("NA".to_string(), 8));
                format!("skipped: {}", cell(e))
            }
        };
        row.push(c.points.len().to_string());
        row.push(status);
        summary.push(row);

        for p in &c.points {
            let (fitted, residual, below) = match &c.analysis {
                Ok(a) => {
                    let f = a.fitted(p.ppl);
                    (num(f), num(a.residual(p)), (p.is_flagged() && p.ppp < f).to_string())
                }
                Err(_) => ("NA".into(), "NA".into(), "NA".into()),
            };
            scatter.push(vec![
                cell(&p.corpus),
                p.metric.clone(),
                cell(&p.model_id),
                cell(&p.prompt_id),
                num(p.ppl),
                num(p.ppp),
                p.is_instruction_tuned.to_string(),
                p.is_prompt_conditioned.to_string(),
                fitted,
                residual,
                below,
            ]);
        }
    }
    let tradeoff_path = cfg.output_path("tradeoff.tsv");
    let scatter_path = cfg.output_path("scatter.csv");
    write_table(&tradeoff_path, &comment, '\t', &TRADEOFF_COLUMNS, &summary)?;
    write_table(&scatter_path, &comment, ',', &SCATTER_COLUMNS, &scatter)?;
    Ok((tradeoff_path, scatter_path))
}
