//! Type I, II and III sums of squares for factorial linear models, with
//! optional covariate sub-models and empty cells.
//!
//! Beyond the sums of squares themselves, every Type III row reports what the
//! test is about on the cell-mean scale: the contrasts it tests, whether each
//! is an ANOVA effect, and how much of the nominal effect is estimable.
//!
//! ```
//! use typ3::engine::{anova_table, build_context, AnalysisOptions, SsType};
//! use typ3::{formula, sample};
//!
//! let layout = sample::layout();
//! let data = sample::full().unwrap();
//! let spec = formula::parse("y ~ A*B", layout.names(), &[]).unwrap();
//! let ctx = build_context(&layout, &spec, &data).unwrap();
//! let report = anova_table(&ctx, data.response(), &[SsType::III], &AnalysisOptions::default()).unwrap();
//! let a = report.row(SsType::III, "A").unwrap();
//! assert!((a.ss - 3286.4603).abs() < 1e-3);
//! ```
//!
//! The `examples/` directory has one runnable program per capability:
//! `full_data`, `deleted_cell`, `diagonal_empty`, `b_within_a`,
//! `covariates`, `formula_language`, `anova_projectors`,
//! `custom_hypothesis` and `oracle_suite`.

pub mod cli;
pub mod design;
pub mod engine;
pub mod error;
pub mod formula;
pub mod ingest;
pub mod numeric;
pub mod oracle;
pub mod report;
pub mod sample;

pub use error::{Error, Result};
