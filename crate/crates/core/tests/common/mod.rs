#![allow(dead_code)]

use typ3::design::EffectId;
use typ3::design::{Dataset, FactorLayout};
use typ3::engine::{
    build_context, factor_term, partition, type3_construction, DesignContext, TypeIIIConstruction,
};
use typ3::formula::{parse, Term};
use typ3::numeric::{project, Matrix, OrthonormalBasis, Tolerance};

pub fn context(layout: &FactorLayout, data: &Dataset, model: &str) -> DesignContext {
    let spec = parse(model, layout.names(), &[]).expect("formula parses");
    build_context(layout, &spec, data).expect("context builds")
}

pub fn term(bits: &str) -> Term {
    factor_term(EffectId::parse(bits).expect("tuple parses"))
}

pub fn construction(ctx: &DesignContext, target: &Term) -> TypeIIIConstruction {
    let part = partition(ctx, target).expect("target in model");
    type3_construction(ctx, &part, &Tolerance::default()).expect("construction")
}

/// `‖c − P c‖ / ‖c‖` for the span of `basis`.
pub fn distance_from_span(basis: &OrthonormalBasis, c: &[f64]) -> f64 {
    let v = Matrix::from_column_slice(c.len(), 1, c);
    let p = project(basis, &v).expect("dimensions agree");
    (&v - p).norm() / v.norm()
}

/// Cell-mean coefficients for `Σ_j η_{ij} / b − Σ_j η_{kj} / b` on an
/// `a × b` layout (row marginal means `i` minus `k`, zero-based).
pub fn row_marginal_difference(a: usize, b: usize, i: usize, k: usize) -> Vec<f64> {
    let mut c = vec![0.0; a * b];
    for j in 0..b {
        c[i * b + j] += 1.0 / b as f64;
        c[k * b + j] -= 1.0 / b as f64;
    }
    c
}

/// Upper tail of the F distribution via the Beta integral under
/// `t = sin²θ`, which turns the integrand into the smooth
/// `2 sin^{2a−1}θ cos^{2b−1}θ`. Both numerator and normalizer come from the
/// same composite Simpson rule, so no Gamma function is involved.
pub fn f_tail_quadrature(f: f64, d1: usize, d2: usize) -> f64 {
    if f <= 0.0 {
        return 1.0;
    }
    let a = d2 as f64 / 2.0;
    let b = d1 as f64 / 2.0;
    let x = d2 as f64 / (d2 as f64 + d1 as f64 * f);
    let integrand = |t: f64| 2.0 * t.sin().powf(2.0 * a - 1.0) * t.cos().powf(2.0 * b - 1.0);
    let upper = x.sqrt().asin();
    simpson(integrand, 0.0, upper, 20_000)
        / simpson(integrand, 0.0, std::f64::consts::FRAC_PI_2, 20_000)
}

fn simpson(g: impl Fn(f64) -> f64, lo: f64, hi: f64, intervals: usize) -> f64 {
    let n = intervals + intervals % 2;
    let h = (hi - lo) / n as f64;
    let mut s = g(lo) + g(hi);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        s += w * g(lo + k as f64 * h);
    }
    s * h / 3.0
}

/// Sum of squared deviations from each cell's own mean.
pub fn within_cell_ss(cells: &[Vec<f64>]) -> f64 {
    cells
        .iter()
        .filter(|c| !c.is_empty())
        .map(|c| {
            let m = c.iter().sum::<f64>() / c.len() as f64;
            c.iter().map(|v| (v - m).powi(2)).sum::<f64>()
        })
        .sum()
}

/// One observation per non-empty cell, with the given value.
pub fn one_per_cell(counts: &[usize], value: f64) -> Dataset {
    let cells: Vec<Vec<f64>> = counts
        .iter()
        .map(|&c| if c > 0 { vec![value] } else { vec![] })
        .collect();
    Dataset::from_cells(&cells).expect("non-empty data")
}
