//! Text and JSON rendering of an [`AnovaReport`].

use std::fmt::Write as _;

use serde::Serialize;

use crate::design::FactorLayout;
use crate::engine::{AnovaReport, AnovaRow, Classification, DesignContext};
use crate::formula::ModelSpec;

const UNDEFINED: &str = "—";

#[derive(Debug, Serialize)]
pub struct JsonFactor {
    pub name: String,
    pub levels: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct JsonLayout {
    pub factors: Vec<JsonFactor>,
    pub cells: usize,
    pub counts: Vec<usize>,
    pub n: usize,
}

#[derive(Debug, Serialize)]
pub struct JsonFit {
    pub sse: f64,
    pub df_error: usize,
    pub mse: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct JsonContrast {
    pub coeffs: Vec<f64>,
    pub label: String,
    pub classification: String,
}

#[derive(Debug, Serialize)]
pub struct JsonDfDetail {
    pub innate: usize,
    pub type3: usize,
    pub estimable_part: usize,
}

#[derive(Debug, Serialize)]
pub struct JsonRow {
    pub effect: String,
    pub ss: f64,
    pub df: usize,
    pub f: Option<f64>,
    pub p: Option<f64>,
    pub contrasts: Vec<JsonContrast>,
    pub df_detail: Option<JsonDfDetail>,
}

#[derive(Debug, Serialize)]
pub struct JsonTable {
    #[serde(rename = "type")]
    pub ss_type: String,
    pub rows: Vec<JsonRow>,
}

/// Top-level JSON document.
#[derive(Debug, Serialize)]
pub struct JsonReport {
    pub layout: JsonLayout,
    pub model: String,
    pub fit: JsonFit,
    pub tables: Vec<JsonTable>,
    pub warnings: Vec<String>,
}

pub fn classification_label(spec: &ModelSpec, c: &Classification) -> String {
    match c {
        Classification::Anova(j) if j.is_intercept() => "anova(mean)".to_string(),
        Classification::Anova(j) => format!("anova({})", j.label(spec.factor_names())),
        Classification::NonAnova => "non-anova".to_string(),
    }
}

fn json_row(spec: &ModelSpec, r: &AnovaRow) -> JsonRow {
    JsonRow {
        effect: r.label.clone(),
        ss: r.ss,
        df: r.df,
        f: r.f_value,
        p: r.p_value,
        contrasts: r
            .contrasts
            .iter()
            .map(|c| JsonContrast {
                coeffs: c.coeffs.clone(),
                label: c.label.clone(),
                classification: classification_label(spec, &c.classification),
            })
            .collect(),
        df_detail: r.df_detail.map(|d| JsonDfDetail {
            innate: d.innate,
            type3: d.type3,
            estimable_part: d.estimable_part,
        }),
    }
}

fn json_layout(layout: &FactorLayout, ctx: &DesignContext) -> JsonLayout {
    JsonLayout {
        factors: layout
            .names()
            .iter()
            .zip(layout.level_labels())
            .map(|(n, l)| JsonFactor {
                name: n.clone(),
                levels: l.clone(),
            })
            .collect(),
        cells: layout.cells(),
        counts: ctx.counts().as_slice().to_vec(),
        n: ctx.n(),
    }
}

pub fn to_json(ctx: &DesignContext, report: &AnovaReport) -> JsonReport {
    let spec = ctx.spec();
    JsonReport {
        layout: json_layout(ctx.layout(), ctx),
        model: spec.render(),
        fit: JsonFit {
            sse: report.fit.sse,
            df_error: report.fit.df_error,
            mse: report.fit.mse,
        },
        tables: report
            .tables
            .iter()
            .map(|t| JsonTable {
                ss_type: t.ss_type.to_string(),
                rows: t.rows.iter().map(|r| json_row(spec, r)).collect(),
            })
            .collect(),
        warnings: report.warnings.clone(),
    }
}

pub fn render_json(ctx: &DesignContext, report: &AnovaReport) -> String {
    let mut s = serde_json::to_string_pretty(&to_json(ctx, report)).expect("report serializes");
    s.push('\n');
    s
}

/// Four significant digits; scientific notation below `1e-4`.
pub fn format_p(p: f64) -> String {
    if p == 0.0 {
        return "0".to_string();
    }
    if p >= 1e-4 {
        let decimals = (3 - p.log10().floor() as i32).max(0) as usize;
        format!("{p:.decimals$}")
    } else {
        format!("{p:.3e}")
    }
}

fn opt(v: Option<f64>, f: impl Fn(f64) -> String) -> String {
    v.map_or_else(|| UNDEFINED.to_string(), f)
}

pub fn render_text(ctx: &DesignContext, report: &AnovaReport) -> String {
    let spec = ctx.spec();
    let mut out = String::new();
    let empty = ctx.counts().empty_cells().len();
    let _ = writeln!(out, "Model: {}", spec.render());
    let _ = writeln!(
        out,
        "Observations: {}  Cells: {} ({} empty)",
        ctx.n(),
        ctx.layout().cells(),
        empty
    );
    let _ = writeln!(
        out,
        "Error: SS {:.4}  df {}  MS {}",
        report.fit.sse,
        report.fit.df_error,
        opt(report.fit.mse, |m| format!("{m:.4}"))
    );

    for t in &report.tables {
        let _ = writeln!(out);
        let _ = writeln!(out, "Type {} sums of squares", t.ss_type);
        let width = t
            .rows
            .iter()
            .map(|r| r.label.chars().count())
            .max()
            .unwrap_or(0)
            .max(6);
        let _ = writeln!(
            out,
            "{:<width$}  {:>14}  {:>4}  {:>10}  {:>10}",
            "Effect", "SS", "df", "F", "p"
        );
        for r in &t.rows {
            let _ = writeln!(
                out,
                "{:<width$}  {:>14.4}  {:>4}  {:>10}  {:>10}",
                r.label,
                r.ss,
                r.df,
                opt(r.f_value, |f| format!("{f:.4}")),
                opt(r.p_value, format_p),
            );
        }
    }

    for t in &report.tables {
        for r in &t.rows {
            let Some(d) = r.df_detail else { continue };
            let _ = writeln!(out);
            let _ = writeln!(
                out,
                "Type {} contrasts for {} (estimable part {}, type III {}, innate {})",
                t.ss_type, r.label, d.estimable_part, d.type3, d.innate
            );
            if r.contrasts.is_empty() {
                let _ = writeln!(out, "  (none)");
            }
            for c in &r.contrasts {
                let _ = writeln!(
                    out,
                    "  [{}] {}",
                    classification_label(spec, &c.classification),
                    c.label
                );
            }
        }
    }

    if !report.warnings.is_empty() {
        let _ = writeln!(out);
        for w in &report.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
    }
    out
}
