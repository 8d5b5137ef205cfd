use std::fmt;

use serde::{Deserialize, Serialize};

use super::correlation::pearson;
use super::nonparametric::binomial_test;
use crate::error::{Error, Result};
use crate::regression::{least_squares, Design};

/// Scale of the perplexity axis of the trade-off regression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PplAxis {
    #[default]
    Log,
    Raw,
}

impl PplAxis {
    pub fn x(&self, ppl: f64) -> f64 {
        match self {
            PplAxis::Log => ppl.ln(),
            PplAxis::Raw => ppl,
        }
    }
}

impl fmt::Display for PplAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PplAxis::Log => "log",
            PplAxis::Raw => "raw",
        })
    }
}

/// One model/prompt/metric result placed on the PPL–PPP plane.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PppPplPoint {
    pub corpus: String,
    pub model_id: String,
    pub prompt_id: String,
    pub metric: String,
    pub ppl: f64,
    pub ppp: f64,
    pub is_instruction_tuned: bool,
    pub is_prompt_conditioned: bool,
}

impl PppPplPoint {
    /// Instruction-tuned or prompt-conditioned points are compared against
    /// the line estimated from the remaining (base) points.
    pub fn is_flagged(&self) -> bool {
        self.is_instruction_tuned || self.is_prompt_conditioned
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TradeoffAnalysis {
    pub axis: PplAxis,
    pub slope: f64,
    pub intercept: f64,
    pub pearson_r: f64,
    pub pearson_p: f64,
    pub n_base: usize,
    pub below_line: usize,
    pub n_flagged: usize,
    pub binom_p: f64,
}

impl TradeoffAnalysis {
    pub fn fitted(&self, ppl: f64) -> f64 {
        self.intercept + self.slope * self.axis.x(ppl)
    }

    pub fn residual(&self, point: &PppPplPoint) -> f64 {
        point.ppp - self.fitted(point.ppl)
    }
}

/// Regresses PPP on PPL over the base points of one cell and counts flagged
/// points strictly below that line.
pub fn tradeoff_analysis(points: &[PppPplPoint], axis: PplAxis) -> Result<TradeoffAnalysis> {
    if let Some(p) = points.iter().find(|p| !(p.ppl > 0.0) || !p.ppp.is_finite()) {
        return Err(Error::Domain(format!(
            "invalid point {}/{}: ppl {}, ppp {}",
            p.model_id, p.prompt_id, p.ppl, p.ppp
        )));
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = points
        .iter()
        .filter(|p| !p.is_flagged())
        .map(|p| (axis.x(p.ppl), p.ppp))
        .unzip();
    if xs.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "{} base point(s); at least 3 are needed",
            xs.len()
        )));
    }
    let design = Design::with_intercept(&[("ppl", &xs)])?;
    let line = least_squares(&design, &ys)?;
    let (pearson_r, pearson_p) = pearson(&xs, &ys)?;

    let mut analysis = TradeoffAnalysis {
        axis,
        intercept: line.coefficients[0],
        slope: line.coefficients[1],
        pearson_r,
        pearson_p,
        n_base: xs.len(),
        below_line: 0,
        n_flagged: 0,
        binom_p: 1.0,
    };
    let flagged: Vec<&PppPplPoint> = points.iter().filter(|p| p.is_flagged()).collect();
    analysis.n_flagged = flagged.len();
    analysis.below_line = flagged.iter().filter(|p| p.ppp < analysis.fitted(p.ppl)).count();
    analysis.binom_p = binomial_test(analysis.below_line as u64, analysis.n_flagged as u64, 0.5)?;
    Ok(analysis)
}
