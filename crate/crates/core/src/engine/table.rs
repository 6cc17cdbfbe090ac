use std::fmt;

use super::context::{partition, DesignContext};
use super::contrasts::{
    estimable_part, h_star, nu_one_given_zero, tested_contrasts, Contrast, ContrastOptions,
};
use super::sums::{fit, type1_table, type2_ss, type3_construction, type3_ss, FittedModel};
use crate::error::{Error, Result};
use crate::formula::Term;
use crate::numeric::{f_tail, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SsType {
    I,
    II,
    III,
}

impl SsType {
    pub const ALL: [SsType; 3] = [SsType::I, SsType::II, SsType::III];
}

impl fmt::Display for SsType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SsType::I => "I",
            SsType::II => "II",
            SsType::III => "III",
        })
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct AnalysisOptions {
    pub tol: Tolerance,
    pub contrasts: ContrastOptions,
}

/// Degrees of freedom attached to a Type III row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DfDetail {
    /// `ν*`
    pub innate: usize,
    /// `ν3`
    pub type3: usize,
    /// `ν*0`
    pub estimable_part: usize,
    /// `ν_{1|0}`
    pub adjusted: usize,
}

#[derive(Debug, Clone)]
pub struct AnovaRow {
    pub term: Term,
    pub label: String,
    pub ss_type: SsType,
    pub ss: f64,
    pub df: usize,
    /// `None` when `df = 0` or the error df is zero.
    pub f_value: Option<f64>,
    pub p_value: Option<f64>,
    /// Type III rows only.
    pub contrasts: Vec<Contrast>,
    pub df_detail: Option<DfDetail>,
}

#[derive(Debug, Clone)]
pub struct AnovaTable {
    pub ss_type: SsType,
    pub rows: Vec<AnovaRow>,
}

#[derive(Debug, Clone)]
pub struct AnovaReport {
    pub fit: FittedModel,
    pub tables: Vec<AnovaTable>,
    pub warnings: Vec<String>,
}

impl AnovaReport {
    pub fn table(&self, ss_type: SsType) -> Option<&AnovaTable> {
        self.tables.iter().find(|t| t.ss_type == ss_type)
    }

    pub fn row(&self, ss_type: SsType, label: &str) -> Option<&AnovaRow> {
        self.table(ss_type)?.rows.iter().find(|r| r.label == label)
    }
}

fn f_and_p(ss: f64, df: usize, fit: &FittedModel) -> Result<(Option<f64>, Option<f64>)> {
    match fit.mse {
        Some(mse) if df > 0 && mse > 0.0 => {
            let f = (ss / df as f64) / mse;
            let p = f_tail(f, df, fit.df_error)?;
            Ok((Some(f), Some(p)))
        }
        _ => Ok((None, None)),
    }
}

/// Rows are produced for every non-intercept term, in formula order.
pub fn anova_table(
    ctx: &DesignContext,
    y: &[f64],
    types: &[SsType],
    opts: &AnalysisOptions,
) -> Result<AnovaReport> {
    let tol = &opts.tol;
    let fitted = fit(ctx, y, tol)?;
    if !fitted.sse.is_finite() {
        return Err(Error::Numerical("residual sum of squares is not finite".into()));
    }
    let mut warnings = Vec::new();
    if fitted.df_error == 0 {
        warnings.push("no error degrees of freedom; F and p are undefined".to_string());
    } else if fitted.sse == 0.0 {
        warnings.push("residual sum of squares is zero; F and p are undefined".to_string());
    }
    let spec = ctx.spec();
    let targets: Vec<&Term> = spec
        .terms()
        .iter()
        .filter(|t| !(t.submodel == 0 && t.effect.is_intercept()))
        .collect();

    let mut wanted = types.to_vec();
    wanted.sort();
    wanted.dedup();
    let mut tables = Vec::new();
    for ss_type in wanted {
        let mut rows = Vec::new();
        match ss_type {
            SsType::I => {
                for entry in type1_table(ctx, y, tol)? {
                    if entry.term.submodel == 0 && entry.term.effect.is_intercept() {
                        continue;
                    }
                    let (f_value, p_value) = f_and_p(entry.ss, entry.df, &fitted)?;
                    rows.push(AnovaRow {
                        label: spec.term_label(&entry.term),
                        term: entry.term,
                        ss_type,
                        ss: entry.ss,
                        df: entry.df,
                        f_value,
                        p_value,
                        contrasts: Vec::new(),
                        df_detail: None,
                    });
                }
            }
            SsType::II => {
                for &term in &targets {
                    let part = partition(ctx, term)?;
                    let (ss, df) = type2_ss(ctx, &part, y, tol)?;
                    let (f_value, p_value) = f_and_p(ss, df, &fitted)?;
                    rows.push(AnovaRow {
                        term: term.clone(),
                        label: spec.term_label(term),
                        ss_type,
                        ss,
                        df,
                        f_value,
                        p_value,
                        contrasts: Vec::new(),
                        df_detail: None,
                    });
                }
            }
            SsType::III => {
                for &term in &targets {
                    let part = partition(ctx, term)?;
                    let constr = type3_construction(ctx, &part, tol)?;
                    let (ss, df) = type3_ss(&constr, y)?;
                    let (f_value, p_value) = f_and_p(ss, df, &fitted)?;
                    let hs = h_star(ctx.layout(), spec, term)?;
                    let (_, nu_star0) = estimable_part(ctx, &hs.matrix, term.submodel, tol)?;
                    let detail = DfDetail {
                        innate: hs.innate_df(ctx.layout()),
                        type3: df,
                        estimable_part: nu_star0,
                        adjusted: nu_one_given_zero(ctx, &part, tol)?,
                    };
                    let tested = tested_contrasts(ctx, term.submodel, &constr, tol, &opts.contrasts)?;
                    rows.push(AnovaRow {
                        term: term.clone(),
                        label: spec.term_label(term),
                        ss_type,
                        ss,
                        df,
                        f_value,
                        p_value,
                        contrasts: tested.rows,
                        df_detail: Some(detail),
                    });
                }
            }
        }
        if let Some(r) = rows.iter().find(|r| !r.ss.is_finite()) {
            return Err(Error::Numerical(format!(
                "Type {ss_type} sum of squares for `{}` is not finite",
                r.label
            )));
        }
        tables.push(AnovaTable { ss_type, rows });
    }
    Ok(AnovaReport {
        fit: fitted,
        tables,
        warnings,
    })
}
