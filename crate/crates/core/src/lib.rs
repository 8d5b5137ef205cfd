//! Psychometric predictive power of language-model surprisal and entropies
//! against human reading times.
//!
//! The pipeline runs [`corpus`] (loading, averaging, exclusion rules) →
//! [`metrics`] (word-level bits from subword score dumps) → [`regression`]
//! (nested spillover OLS and PPP) → [`stats`] (tests and the PPP–PPL
//! trade-off). [`metaling`] scores verbalized rankings against reading
//! times and surprisal.

pub mod corpus;
pub mod error;
pub mod metaling;
pub mod metrics;
pub mod regression;
pub mod stats;

pub use error::{Error, Result};
