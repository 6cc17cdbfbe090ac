//! The 3×3 sample data: full, one empty cell, and an empty diagonal.

mod common;

use common::*;
use typ3::design::{effect_columns, EffectId};
use typ3::engine::*;
use typ3::numeric::{hcat, Matrix, Tolerance};
use typ3::oracle::{estimable_oracle, ls_sse, rmfm_oracle};
use typ3::sample;

fn report(data: &typ3::design::Dataset, model: &str) -> AnovaReport {
    let ctx = context(&sample::layout(), data, model);
    anova_table(
        &ctx,
        data.response(),
        &SsType::ALL,
        &AnalysisOptions::default(),
    )
    .unwrap()
}

fn coeffs(row: &AnovaRow) -> Vec<Vec<f64>> {
    row.contrasts.iter().map(|c| c.coeffs.clone()).collect()
}

#[test]
fn full_data_type3_table() {
    let data = sample::full().unwrap();
    let rep = report(&data, "y ~ A*B");
    let expect = [
        ("A", 3286.4603, 2),
        ("B", 1535.9916, 2),
        ("A:B", 2655.1302, 4),
    ];
    for (label, ss, df) in expect {
        let r = rep.row(SsType::III, label).unwrap();
        assert!((r.ss - ss).abs() < 1e-3, "{label}: {}", r.ss);
        assert_eq!(r.df, df);
        let d = r.df_detail.unwrap();
        assert_eq!((d.estimable_part, d.type3, d.innate), (df, df, df));
    }
    assert_eq!(rep.fit.df_error, 9);
}

#[test]
fn full_data_saturated_error_is_within_cell_ss() {
    let data = sample::full().unwrap();
    let ctx = context(&sample::layout(), &data, "y ~ A*B");
    let within = within_cell_ss(&sample::cell_responses());
    assert!((ls_sse(ctx.x(), data.response()).unwrap() - within).abs() < 1e-8 * within);
    let rep = report(&data, "y ~ A*B");
    assert!((rep.fit.sse - within).abs() < 1e-8 * within);
}

#[test]
fn type3_matches_restricted_model_oracle() {
    for data in [sample::full(), sample::deleted(), sample::diagonal_empty()] {
        let data = data.unwrap();
        let ctx = context(&sample::layout(), &data, "y ~ A*B");
        for bits in ["10", "01", "11"] {
            let t = term(bits);
            let part = partition(&ctx, &t).unwrap();
            let constr = type3_construction(&ctx, &part, &Tolerance::default()).unwrap();
            let restricted = hcat(&[&part.x0, &constr.x2star]).unwrap();
            let oracle = rmfm_oracle(ctx.x(), &restricted, data.response()).unwrap();
            let (ss, _) = type3_ss(&constr, data.response()).unwrap();
            assert!(
                (ss - oracle).abs() <= 1e-8 * oracle,
                "{bits}: {ss} vs {oracle}"
            );
        }
    }
}

#[test]
fn full_data_contrasts_are_anova_effects() {
    let rep = report(&sample::full().unwrap(), "y ~ A*B");
    let a = rep.row(SsType::III, "A").unwrap();
    assert_eq!(
        coeffs(a),
        vec![
            vec![1.0, 1.0, 1.0, 0.0, 0.0, 0.0, -1.0, -1.0, -1.0],
            vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0, -1.0, -1.0, -1.0],
        ]
    );
    for label in ["A", "B", "A:B"] {
        for c in &rep.row(SsType::III, label).unwrap().contrasts {
            assert!(
                matches!(c.classification, Classification::Anova(_)),
                "{label}: {}",
                c.label
            );
        }
    }
}

#[test]
fn deleted_cell_dfs_and_contrasts() {
    let data = sample::deleted().unwrap();
    let rep = report(&data, "y ~ A*B");
    let dfs: Vec<usize> = ["A", "B", "A:B"]
        .iter()
        .map(|l| rep.row(SsType::III, l).unwrap().df)
        .collect();
    assert_eq!(dfs, vec![2, 2, 3]);
    for label in ["A", "B"] {
        assert_eq!(
            rep.row(SsType::III, label)
                .unwrap()
                .df_detail
                .unwrap()
                .estimable_part,
            1
        );
    }
    let a = rep.row(SsType::III, "A").unwrap();
    assert_eq!(
        coeffs(a),
        vec![
            vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0, -1.0, -1.0, -1.0],
            vec![0.0, 1.0, 1.0, 0.0, -0.5, -0.5, 0.0, -0.5, -0.5],
        ]
    );
    assert_eq!(
        a.contrasts[0].classification,
        Classification::Anova(EffectId::parse("10").unwrap())
    );
    assert_eq!(a.contrasts[1].classification, Classification::NonAnova);
}

#[test]
fn deleted_cell_type3_ss_matches_contrast_hypothesis() {
    // The SS for testing the two listed contrasts directly.
    let data = sample::deleted().unwrap();
    let ctx = context(&sample::layout(), &data, "y ~ A*B");
    let rows = Matrix::from_row_slice(
        2,
        9,
        &[
            0., 0., 0., 1., 1., 1., -1., -1., -1., //
            0., 2., 2., 0., -1., -1., 0., -1., -1.,
        ],
    );
    let hyp = HypothesisSpec::CellMeans { submodel: 0, rows };
    let (ss, df) = rmfm_ss(&ctx, &hyp, data.response(), &Tolerance::default()).unwrap();
    let r = report(&data, "y ~ A*B");
    let a = r.row(SsType::III, "A").unwrap();
    assert_eq!(df, 2);
    assert!((ss - a.ss).abs() < 1e-8 * a.ss);
    assert!((a.ss - 1827.2096).abs() < 1e-3, "{}", a.ss);
}

#[test]
fn deleted_cell_marginal_estimability() {
    let layout = sample::layout();
    let data = sample::deleted().unwrap();
    let ctx = context(&layout, &data, "y ~ A*B");
    let lift = |c: Vec<f64>| -> Vec<f64> {
        let row = Matrix::from_row_slice(1, 9, &c);
        ctx.lift_cell_rows(0, &row)
            .unwrap()
            .row(0)
            .iter()
            .copied()
            .collect()
    };
    assert!(!estimable_oracle(ctx.x(), &lift(row_marginal_difference(3, 3, 0, 1))).unwrap());
    assert!(estimable_oracle(ctx.x(), &lift(row_marginal_difference(3, 3, 1, 2))).unwrap());
}

#[test]
fn diagonal_empty_contrasts() {
    let rep = report(&sample::diagonal_empty().unwrap(), "y ~ A*B");
    let ab = rep.row(SsType::III, "A:B").unwrap();
    assert_eq!(ab.df, 1);
    assert_eq!(
        coeffs(ab),
        vec![vec![0.0, 1.0, -1.0, -1.0, 0.0, 1.0, 1.0, -1.0, 0.0]]
    );
    assert_eq!(
        ab.contrasts[0].classification,
        Classification::Anova(EffectId::parse("11").unwrap())
    );
    for label in ["A", "B"] {
        let r = rep.row(SsType::III, label).unwrap();
        assert_eq!(r.df, 2);
        assert_eq!(r.df_detail.unwrap().estimable_part, 0);
        assert!(r
            .contrasts
            .iter()
            .all(|c| c.classification == Classification::NonAnova));
    }
}

#[test]
fn b_within_a_target() {
    let layout = sample::layout();
    let data = sample::full().unwrap();
    let ctx = context(&layout, &data, "y ~ A + A:B");
    let hs = h_star(&layout, ctx.spec(), &term("11")).unwrap();
    let s3 = Matrix::identity(3, 3) - Matrix::from_element(3, 3, 1.0 / 3.0);
    let expected = Matrix::identity(3, 3).kronecker(&s3);
    assert!((&hs.matrix - &expected).norm() < 1e-12);

    // Restricted model: cell means depend on A only.
    let a_only = &ctx.incidence(0).clone()
        * effect_columns(&layout, &EffectId::parse("10").unwrap()).unwrap();
    let a_means = hcat(&[&Matrix::from_element(ctx.n(), 1, 1.0), &a_only]).unwrap();
    let oracle = rmfm_oracle(ctx.x(), &a_means, data.response()).unwrap();
    let rep = anova_table(
        &ctx,
        data.response(),
        &[SsType::III],
        &AnalysisOptions::default(),
    )
    .unwrap();
    let ab = rep.row(SsType::III, "A:B").unwrap();
    assert_eq!(ab.df, 6);
    assert!(
        (ab.ss - oracle).abs() <= 1e-8 * oracle,
        "{} vs {oracle}",
        ab.ss
    );
}

#[test]
fn type1_sums_add_up() {
    for data in [sample::full(), sample::deleted(), sample::diagonal_empty()] {
        let data = data.unwrap();
        let rep = report(&data, "y ~ A*B");
        let n = data.n() as f64;
        let mean = data.response().iter().sum::<f64>() / n;
        let total: f64 = data.response().iter().map(|v| (v - mean).powi(2)).sum();
        let t1: f64 = rep
            .table(SsType::I)
            .unwrap()
            .rows
            .iter()
            .map(|r| r.ss)
            .sum();
        assert!((t1 + rep.fit.sse - total).abs() < 1e-9 * total);
    }
}
