//! Command-line driver logic, independent of argument parsing.

use crate::engine::{anova_table, build_context, AnalysisOptions, SsType};
use crate::error::{Error, Result};
use crate::formula::parse_with_warnings;
use crate::ingest::{ingest, IngestConfig};
use crate::numeric::Tolerance;
use crate::oracle::run_suite;
use crate::report::{render_json, render_text};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub formula: String,
    pub types: Vec<SsType>,
    /// Overrides the relative rank tolerance.
    pub tol: Option<f64>,
    pub format: OutputFormat,
    pub rationalize: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            formula: String::new(),
            types: vec![SsType::III],
            tol: None,
            format: OutputFormat::Text,
            rationalize: true,
        }
    }
}

/// What a command prints and how it exits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Outcome {
    fn success(stdout: String, stderr: String) -> Self {
        Self {
            stdout,
            stderr,
            code: EXIT_OK,
        }
    }

    pub fn from_error(e: &Error) -> Self {
        Self {
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
            code: if e.is_numerical() {
                EXIT_NUMERICAL
            } else {
                EXIT_INPUT
            },
        }
    }
}

pub fn analysis_options(cfg: &RunConfig) -> Result<AnalysisOptions> {
    let mut opts = AnalysisOptions::default();
    if let Some(rel) = cfg.tol {
        opts.tol = Tolerance::with_rel(rel)?;
    }
    opts.contrasts.rationalize = cfg.rationalize;
    Ok(opts)
}

fn analyze(ingest_cfg: &IngestConfig, run_cfg: &RunConfig) -> Result<(String, String)> {
    if run_cfg.types.is_empty() {
        return Err(Error::input("no sums-of-squares type requested"));
    }
    let (layout, data) = ingest(ingest_cfg)?;
    let (spec, warnings) =
        parse_with_warnings(&run_cfg.formula, &ingest_cfg.factors, &ingest_cfg.covariates)?;
    if spec.response() != ingest_cfg.response {
        return Err(Error::input(format!(
            "formula response `{}` differs from --response `{}`",
            spec.response(),
            ingest_cfg.response
        )));
    }
    let ctx = build_context(&layout, &spec, &data)?;
    let opts = analysis_options(run_cfg)?;
    let mut report = anova_table(&ctx, data.response(), &run_cfg.types, &opts)?;
    let mut stderr = String::new();
    for w in warnings {
        report.warnings.push(format!("formula: {w}"));
        stderr.push_str(&format!("warning: formula: {w}\n"));
    }
    let stdout = match run_cfg.format {
        OutputFormat::Text => render_text(&ctx, &report),
        OutputFormat::Json => render_json(&ctx, &report),
    };
    Ok((stdout, stderr))
}

/// Ingest, fit and render. Errors become exit code 2 (input) or 3 (numerical).
pub fn run(ingest_cfg: &IngestConfig, run_cfg: &RunConfig) -> Outcome {
    match analyze(ingest_cfg, run_cfg) {
        Ok((stdout, stderr)) => Outcome::success(stdout, stderr),
        Err(e) => Outcome::from_error(&e),
    }
}

/// Oracle suite as JSON lines; exit 3 if any check fails.
pub fn verify(seed: u64, count: u64, perturb: bool) -> Outcome {
    match run_suite(seed, count, perturb) {
        Ok(result) => {
            let s = &result.summary;
            let stderr = format!(
                "{} scenarios, {} checks, {} failed\n",
                s.scenarios, s.checks, s.failed
            );
            Outcome {
                stdout: result.to_json_lines(),
                stderr,
                code: if result.passed() {
                    EXIT_OK
                } else {
                    EXIT_NUMERICAL
                },
            }
        }
        Err(e) => Outcome::from_error(&e),
    }
}
