//! Spillover design matrices, nested OLS fits and the log-likelihood gain
//! (PPP) of a predictor of interest over the baseline covariates.

mod features;
mod ols;

pub use features::{build_features, ContextScope, FeatureOptions, FeatureRow, FeatureSet};
pub use ols::{
    coeff_t_test, design_matrix, f_test_nested, fit_design, fit_nested, fit_ols, gaussian_loglik, least_squares, ppp,
    CoeffTest, Design, FTest, FitResult, LeastSquares, OlsFit,
};
