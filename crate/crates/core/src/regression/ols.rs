use std::f64::consts::PI;
use std::hash::{Hash, Hasher};

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, FisherSnedecor, StudentsT};

use super::features::FeatureRow;
use crate::error::{Error, Result};

/// Relative size of a QR pivot below which a column counts as collinear
/// with the columns before it.
const RANK_TOL: f64 = 1e-10;

/// A named design matrix. Column 0 is expected to be the intercept.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    pub names: Vec<String>,
    pub x: DMatrix<f64>,
}

impl Design {
    /// Builds a design with a leading intercept from named predictor columns.
    pub fn with_intercept(columns: &[(&str, &[f64])]) -> Result<Self> {
        let n = columns.first().map_or(0, |(_, c)| c.len());
        if columns.iter().any(|(_, c)| c.len() != n) {
            return Err(Error::Domain("design columns differ in length".into()));
        }
        let mut names = vec!["intercept".to_string()];
        names.extend(columns.iter().map(|(name, _)| name.to_string()));
        let x = DMatrix::from_fn(n, names.len(), |i, j| if j == 0 { 1.0 } else { columns[j - 1].1[i] });
        Ok(Design { names, x })
    }

    /// Intercept-only design with `n` rows.
    pub fn intercept(n: usize) -> Self {
        Design {
            names: vec!["intercept".to_string()],
            x: DMatrix::from_element(n, 1, 1.0),
        }
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }
}

/// Spillover design for the feature rows. The predictor of interest, when
/// included, is column 1; the interaction flag adds `len:freq` products for
/// the current word and both predecessors.
pub fn design_matrix(rows: &[FeatureRow], include_interest: bool, interaction: bool) -> Design {
    let mut cols: Vec<(&str, Vec<f64>)> = Vec::new();
    let col = |f: &dyn Fn(&FeatureRow) -> f64| rows.iter().map(f).collect::<Vec<f64>>();
    if include_interest {
        cols.push(("interest", col(&|r| r.interest)));
    }
    cols.push(("spill1", col(&|r| r.spill1)));
    cols.push(("spill2", col(&|r| r.spill2)));
    cols.push(("len0", col(&|r| r.len[0])));
    cols.push(("freq0", col(&|r| r.freq[0])));
    cols.push(("len1", col(&|r| r.len[1])));
    cols.push(("freq1", col(&|r| r.freq[1])));
    cols.push(("len2", col(&|r| r.len[2])));
    cols.push(("freq2", col(&|r| r.freq[2])));
    if interaction {
        cols.push(("len0:freq0", col(&|r| r.len[0] * r.freq[0])));
        cols.push(("len1:freq1", col(&|r| r.len[1] * r.freq[1])));
        cols.push(("len2:freq2", col(&|r| r.len[2] * r.freq[2])));
    }
    let borrowed: Vec<(&str, &[f64])> = cols.iter().map(|(n, c)| (*n, c.as_slice())).collect();
    Design::with_intercept(&borrowed).expect("feature columns share one length")
}

/// Least-squares solution without likelihood bookkeeping.
#[derive(Debug, Clone)]
pub struct LeastSquares {
    pub coefficients: Vec<f64>,
    pub residuals: Vec<f64>,
    pub rss: f64,
    /// Diagonal of `(XᵀX)⁻¹`.
    pub unscaled_var: Vec<f64>,
}

/// Solves `min ‖y − Xβ‖²` by Householder QR, reporting rank deficiency by
/// column name.
pub fn least_squares(design: &Design, y: &[f64]) -> Result<LeastSquares> {
    let (n, p) = (design.n(), design.p());
    if y.len() != n {
        return Err(Error::Domain(format!("response has {} rows, design has {n}", y.len())));
    }
    if n <= p {
        return Err(Error::InsufficientData(format!("{n} rows for {p} columns")));
    }
    if design.x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::Domain("non-finite value in regression data".into()));
    }

    let qr = design.x.clone().qr();
    let r = qr.r();
    for j in 0..p {
        let norm = design.x.column(j).norm();
        if r[(j, j)].abs() <= RANK_TOL * norm.max(f64::MIN_POSITIVE) || norm == 0.0 {
            return Err(collinear(design, &r, j));
        }
    }

    let yv = DVector::from_column_slice(y);
    let qty = qr.q().transpose() * &yv;
    let beta = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| collinear(design, &r, p - 1))?;
    let resid = &yv - &design.x * &beta;
    let rinv = r
        .solve_upper_triangular(&DMatrix::identity(p, p))
        .ok_or_else(|| collinear(design, &r, p - 1))?;
    let unscaled_var = (0..p).map(|j| rinv.row(j).norm_squared()).collect();

    Ok(LeastSquares {
        coefficients: beta.iter().copied().collect(),
        rss: resid.norm_squared(),
        residuals: resid.iter().copied().collect(),
        unscaled_var,
    })
}

/// Names the earlier columns that column `j` is a combination of.
fn collinear(design: &Design, r: &DMatrix<f64>, j: usize) -> Error {
    let with = if j == 0 {
        Vec::new()
    } else {
        let head = r.view((0, 0), (j, j)).clone_owned();
        let rhs = r.view((0, j), (j, 1)).clone_owned();
        match head.solve_upper_triangular(&rhs) {
            Some(c) => {
                let scale = c.amax().max(f64::MIN_POSITIVE);
                (0..j)
                    .filter(|&i| c[i].abs() > 1e-8 * scale)
                    .map(|i| design.names[i].clone())
                    .collect()
            }
            None => design.names[..j].to_vec(),
        }
    };
    Error::SingularDesign {
        column: design.names[j].clone(),
        with,
    }
}

/// A fitted OLS model with its Gaussian log-likelihood.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OlsFit {
    pub names: Vec<String>,
    pub coefficients: Vec<f64>,
    pub rss: f64,
    pub n: usize,
    pub p: usize,
    /// `−(n/2)(ln(2π·rss/n) + 1)`, the likelihood at the ML variance.
    pub loglik: f64,
    #[serde(skip)]
    response_id: u64,
}

fn response_id(y: &[f64]) -> u64 {
    let mut h = std::collections::hash_map::DefaultHasher::new();
    for v in y {
        v.to_bits().hash(&mut h);
    }
    h.finish()
}

/// Gaussian log-likelihood at the maximum-likelihood variance `rss/n`.
pub fn gaussian_loglik(rss: f64, n: usize) -> f64 {
    let n = n as f64;
    -(n / 2.0) * ((2.0 * PI * rss / n).ln() + 1.0)
}

/// Fits an OLS model on an explicit design.
pub fn fit_design(design: &Design, y: &[f64]) -> Result<OlsFit> {
    let ls = least_squares(design, y)?;
    fit_from(design, y, ls)
}

fn fit_from(design: &Design, y: &[f64], ls: LeastSquares) -> Result<OlsFit> {
    let scale: f64 = y.iter().map(|v| v * v).sum::<f64>().max(1.0);
    if ls.rss <= 1e-24 * scale {
        return Err(Error::DegenerateFit);
    }
    Ok(OlsFit {
        names: design.names.clone(),
        coefficients: ls.coefficients,
        rss: ls.rss,
        n: design.n(),
        p: design.p(),
        loglik: gaussian_loglik(ls.rss, design.n()),
        response_id: response_id(y),
    })
}

/// Fits the spillover model on reading times, with or without the
/// predictor of interest.
pub fn fit_ols(rows: &[FeatureRow], include_interest: bool, interaction: bool) -> Result<OlsFit> {
    let design = design_matrix(rows, include_interest, interaction);
    let y: Vec<f64> = rows.iter().map(|r| r.rt_ms).collect();
    fit_design(&design, &y)
}

fn check_nested(base: &OlsFit, full: &OlsFit) -> Result<()> {
    if base.n != full.n || base.response_id != full.response_id {
        return Err(Error::NotNested(format!(
            "fits use different rows (n = {} vs {})",
            base.n, full.n
        )));
    }
    if full.p != base.p + 1 {
        return Err(Error::NotNested(format!(
            "full model has {} columns, base has {}",
            full.p, base.p
        )));
    }
    Ok(())
}

/// Per-token log-likelihood gain of `full` over `base`, in nats.
pub fn ppp(base: &OlsFit, full: &OlsFit) -> Result<f64> {
    check_nested(base, full)?;
    Ok((full.loglik - base.loglik) / full.n as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FTest {
    pub f: f64,
    pub df_num: f64,
    pub df_den: f64,
    pub p_value: f64,
}

/// F-test for one added regressor.
pub fn f_test_nested(base: &OlsFit, full: &OlsFit) -> Result<FTest> {
    check_nested(base, full)?;
    if full.rss <= 0.0 {
        return Err(Error::DegenerateFit);
    }
    let df_den = (full.n - full.p) as f64;
    let f = ((base.rss - full.rss) / full.rss * df_den).max(0.0);
    let p_value = if f == 0.0 {
        1.0
    } else {
        FisherSnedecor::new(1.0, df_den)
            .map_err(|e| Error::Domain(e.to_string()))?
            .sf(f)
    };
    Ok(FTest {
        f,
        df_num: 1.0,
        df_den,
        p_value,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoeffTest {
    pub estimate: f64,
    pub std_error: f64,
    pub t: f64,
    pub df: f64,
    pub p_value: f64,
}

/// Two-sided t-test of one coefficient, with the unbiased variance
/// `rss/(n − p)`.
pub fn coeff_t_test(fit: &OlsFit, column: usize, design: &Design) -> Result<CoeffTest> {
    if column >= fit.p {
        return Err(Error::Domain(format!(
            "column {column} out of range for {} columns",
            fit.p
        )));
    }
    if design.n() != fit.n || design.p() != fit.p {
        return Err(Error::Domain("design does not match the fit".into()));
    }
    let x = &design.x;
    let qr = x.clone().qr();
    let r = qr.r();
    let rinv = r
        .solve_upper_triangular(&DMatrix::identity(fit.p, fit.p))
        .ok_or_else(|| collinear(design, &r, column))?;
    let unscaled = rinv.row(column).norm_squared();
    t_from_parts(fit, column, unscaled)
}

fn t_from_parts(fit: &OlsFit, column: usize, unscaled_var: f64) -> Result<CoeffTest> {
    let df = (fit.n - fit.p) as f64;
    let sigma2 = fit.rss / df;
    let se = (sigma2 * unscaled_var).sqrt();
    if !(se > 0.0) {
        return Err(Error::DegenerateFit);
    }
    let estimate = fit.coefficients[column];
    let t = estimate / se;
    let p_value = if t == 0.0 {
        1.0
    } else {
        let dist = StudentsT::new(0.0, 1.0, df).map_err(|e| Error::Domain(e.to_string()))?;
        (2.0 * dist.sf(t.abs())).min(1.0)
    };
    Ok(CoeffTest {
        estimate,
        std_error: se,
        t,
        df,
        p_value,
    })
}

/// Both models of one nested comparison and their test statistics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub base: OlsFit,
    pub full: OlsFit,
    pub ppp_per_token: f64,
    pub ppp_milli: f64,
    pub f_p_value: f64,
    pub coeff_t_p_value: f64,
}

/// Fits base and full spillover models and tests the predictor of interest.
pub fn fit_nested(rows: &[FeatureRow], interaction: bool) -> Result<FitResult> {
    let y: Vec<f64> = rows.iter().map(|r| r.rt_ms).collect();
    let base_design = design_matrix(rows, false, interaction);
    let full_design = design_matrix(rows, true, interaction);
    let base = fit_design(&base_design, &y)?;
    let full_ls = least_squares(&full_design, &y)?;
    let interest_var = full_ls.unscaled_var[1];
    let full = fit_from(&full_design, &y, full_ls)?;
    let gain = ppp(&base, &full)?;
    let f = f_test_nested(&base, &full)?;
    let t = t_from_parts(&full, 1, interest_var)?;
    Ok(FitResult {
        base,
        full,
        ppp_per_token: gain,
        ppp_milli: gain * 1000.0,
        f_p_value: f.p_value,
        coeff_t_p_value: t.p_value,
    })
}
