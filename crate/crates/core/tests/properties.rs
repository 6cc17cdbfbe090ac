mod common;

use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use typ3::design::{centering_projector, Dataset, FactorLayout};
use typ3::engine::*;
use typ3::formula::{parse, FormulaSource};
use typ3::numeric::{gram_schmidt, intersect, max_principal_angle, project, rank, Matrix, Tolerance};
use typ3::oracle::{anova_projectors, random_design, suite_params};

fn layout_strategy() -> impl Strategy<Value = FactorLayout> {
    prop::collection::vec(2usize..=4, 1..=3).prop_map(|levels| {
        let names: Vec<String> = (0..levels.len()).map(|k| ((b'A' + k as u8) as char).to_string()).collect();
        FactorLayout::new(names, levels).unwrap()
    })
}

fn matrix_strategy(max_rows: usize, max_cols: usize) -> impl Strategy<Value = Matrix> {
    (1..=max_rows, 1..=max_cols, any::<u64>()).prop_map(|(r, c, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // Low-rank products make dependent columns common.
        let k = rng.random_range(1..=c.min(r));
        let a = Matrix::from_fn(r, k, |_, _| rng.random_range(-2.0..2.0));
        let b = Matrix::from_fn(k, c, |_, _| rng.random_range(-2.0..2.0));
        a * b
    })
}

fn kron_s(layout: &FactorLayout) -> Matrix {
    centering_projector(layout.cells())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn anova_projectors_are_orthogonal_projectors(layout in layout_strategy()) {
        let hs = anova_projectors(&layout).unwrap();
        let levels = layout.levels();
        for (i, (j, h)) in hs.iter().enumerate() {
            prop_assert!((h - h.transpose()).norm() < 1e-12);
            prop_assert!((h * h - h).norm() < 1e-12);
            prop_assert!((h.trace() - j.innate_df(&levels) as f64).abs() < 1e-10);
            for (_, g) in &hs[i + 1..] {
                prop_assert!((h * g).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn non_intercept_projectors_sum_to_centering(layout in layout_strategy()) {
        let hs = anova_projectors(&layout).unwrap();
        let mut sum = Matrix::zeros(layout.cells(), layout.cells());
        for (j, h) in &hs {
            if !j.is_intercept() {
                sum += h;
            }
        }
        let diff = &sum - kron_s(&layout);
        prop_assert!(diff.amax() <= 1e-12);
    }

    #[test]
    fn gram_schmidt_invariants(a in matrix_strategy(10, 8)) {
        let tol = Tolerance::default();
        let q = gram_schmidt(&a, &tol).unwrap();
        prop_assert!(q.orthonormality_defect() < 1e-12);
        prop_assert_eq!(q.dim(), a.clone().svd(false, false).rank(1e-9 * a.amax().max(1e-300)));
        let back = project(&q, &a).unwrap();
        prop_assert!((&back - &a).norm() <= 1e-10 * a.norm().max(1.0));
    }

    #[test]
    fn intersection_dimension_formula(a in matrix_strategy(8, 5), b_seed in any::<u64>()) {
        let tol = Tolerance::default();
        let rows = a.nrows();
        let mut rng = ChaCha8Rng::seed_from_u64(b_seed);
        // B shares a random number of A's columns plus fresh directions.
        let shared = rng.random_range(0..=a.ncols());
        let fresh = rng.random_range(0..=3usize);
        let mut cols: Vec<Vec<f64>> = (0..shared).map(|k| a.column(k).iter().copied().collect()).collect();
        for _ in 0..fresh {
            cols.push((0..rows).map(|_| rng.random_range(-1.0..1.0)).collect());
        }
        let b = if cols.is_empty() {
            Matrix::zeros(rows, 0)
        } else {
            Matrix::from_fn(rows, cols.len(), |i, j| cols[j][i])
        };
        let qa = gram_schmidt(&a, &tol).unwrap();
        let qb = gram_schmidt(&b, &tol).unwrap();
        let both = rank(&typ3::numeric::hcat(&[&a, &b]).unwrap(), &tol).unwrap();
        let common = intersect(&qa, &qb, &tol).unwrap();
        prop_assert_eq!(common.dim(), qa.dim() + qb.dim() - both);
        if !common.is_empty() {
            prop_assert!((project(&qb, common.carrier()).unwrap() - common.carrier()).norm() < 1e-8);
        }
    }

    #[test]
    fn formula_render_round_trips(mask in 1u32..128, no_intercept in any::<bool>(), cov in 0u8..3) {
        let factors: Vec<String> = vec!["A".into(), "B".into(), "C".into()];
        let covs: Vec<String> = vec!["x1".into()];
        let mut terms: Vec<String> = (1..8u32)
            .filter(|e| mask >> (e - 1) & 1 == 1)
            .map(|e| (0..3).filter(|k| e >> k & 1 == 1).map(|k| factors[k].clone()).collect::<Vec<_>>().join(":"))
            .collect();
        if cov >= 1 { terms.push("x1".into()); }
        if cov == 2 { terms.push("x1:B".into()); }
        let mut text = format!("y ~ {}", terms.join(" + "));
        if no_intercept { text.push_str(" - 1"); }
        let spec = parse(&text, &factors, &covs).unwrap();
        let again = parse(&spec.render(), &factors, &covs).unwrap();
        prop_assert_eq!(&again, &spec);
        prop_assert_eq!(again.render(), spec.render());
    }

    #[test]
    fn formula_parser_never_panics(text in "[yABx1~+*:() \\-^.0-9]{0,30}") {
        let factors: Vec<String> = vec!["A".into(), "B".into()];
        let _ = FormulaSource::parse(&text);
        let _ = parse(&text, &factors, &["x1".to_string()]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn tested_spans_depend_only_on_empty_pattern(seed in any::<u64>()) {
        let sc = random_design(seed, &suite_params(seed % 6)).unwrap();
        if !sc.data.covariates().is_empty() {
            return Ok(());
        }
        let ctx = sc.context().unwrap();
        let ones = one_per_cell(sc.counts.as_slice(), 1.0);
        let ctx1 = build_context(&sc.layout, &sc.spec, &ones).unwrap();
        let tol = Tolerance::default();
        for t in sc.spec.terms().iter().filter(|t| !t.effect.is_intercept()) {
            let a = tested_span(&ctx, 0, &construction(&ctx, t), &tol).unwrap();
            let b = tested_span(&ctx1, 0, &construction(&ctx1, t), &tol).unwrap();
            prop_assert_eq!(a.dim(), b.dim());
            if !a.is_empty() {
                prop_assert!(max_principal_angle(&a, &b).unwrap() <= 1e-8);
            }
        }
    }

    #[test]
    fn balanced_layouts_collapse(layout in layout_strategy(), m in 1usize..=3, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cells: Vec<Vec<f64>> = (0..layout.cells())
            .map(|_| (0..m).map(|_| rng.random_range(-10.0..10.0)).collect())
            .collect();
        let data = Dataset::from_cells(&cells).unwrap();
        let names = layout.names().join("*");
        let ctx = context(&layout, &data, &format!("y ~ {names}"));
        let rep = anova_table(&ctx, data.response(), &SsType::ALL, &AnalysisOptions::default()).unwrap();
        let ybar = Matrix::from_iterator(layout.cells(), 1, cells.iter().map(|c| c.iter().sum::<f64>() / m as f64));
        let hs = anova_projectors(&layout).unwrap();
        for r3 in &rep.table(SsType::III).unwrap().rows {
            let h = &hs.iter().find(|(j, _)| *j == r3.term.effect).unwrap().1;
            let expected = m as f64 * (ybar.transpose() * h * &ybar)[(0, 0)];
            let scale = expected.abs().max(1e-12);
            for t in [SsType::I, SsType::II] {
                let r = rep.row(t, &r3.label).unwrap();
                prop_assert!((r.ss - r3.ss).abs() <= 1e-10 * scale);
                prop_assert_eq!(r.df, r3.df);
            }
            prop_assert!((r3.ss - expected).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn sums_of_squares_scale_quadratically(seed in any::<u64>(), c in 0.01f64..100.0) {
        let sc = random_design(seed, &suite_params(seed % 6)).unwrap();
        let ctx = sc.context().unwrap();
        let y = sc.response();
        let yc: Vec<f64> = y.iter().map(|v| c * v).collect();
        let opts = AnalysisOptions::default();
        let a = anova_table(&ctx, y, &SsType::ALL, &opts).unwrap();
        let b = anova_table(&ctx, &yc, &SsType::ALL, &opts).unwrap();
        let yy: f64 = y.iter().map(|v| v * v).sum();
        for (ta, tb) in a.tables.iter().zip(&b.tables) {
            for (ra, rb) in ta.rows.iter().zip(&tb.rows) {
                prop_assert!((rb.ss - c * c * ra.ss).abs() <= 1e-9 * c * c * yy);
                prop_assert_eq!(ra.df, rb.df);
                let la: Vec<&str> = ra.contrasts.iter().map(|x| x.label.as_str()).collect();
                let lb: Vec<&str> = rb.contrasts.iter().map(|x| x.label.as_str()).collect();
                prop_assert_eq!(la, lb);
            }
        }
    }

    #[test]
    fn type1_decomposes_total(seed in any::<u64>()) {
        let sc = random_design(seed, &suite_params(seed % 6)).unwrap();
        let ctx = sc.context().unwrap();
        let y = sc.response();
        let rep = anova_table(&ctx, y, &[SsType::I], &AnalysisOptions::default()).unwrap();
        let fit = &rep.fit;
        let t1: f64 = rep.table(SsType::I).unwrap().rows.iter().map(|r| r.ss).sum();
        let df1: usize = rep.table(SsType::I).unwrap().rows.iter().map(|r| r.df).sum();
        let fitted_sq: f64 = fit.fitted.iter().map(|v| v * v).sum();
        let yy: f64 = y.iter().map(|v| v * v).sum();
        // The intercept row is not tabulated; add it back.
        let intercept = if sc.spec.has_intercept() {
            let n = y.len() as f64;
            y.iter().sum::<f64>().powi(2) / n
        } else {
            0.0
        };
        prop_assert!((t1 + intercept - fitted_sq).abs() <= 1e-9 * yy);
        prop_assert_eq!(df1 + usize::from(sc.spec.has_intercept()), fit.rank);
    }

    #[test]
    fn df_chain_holds(seed in any::<u64>()) {
        let sc = random_design(seed, &suite_params(seed % 6)).unwrap();
        let ctx = sc.context().unwrap();
        let rep = anova_table(&ctx, sc.response(), &[SsType::II, SsType::III], &AnalysisOptions::default()).unwrap();
        for r in &rep.table(SsType::III).unwrap().rows {
            let d = r.df_detail.unwrap();
            prop_assert!(d.estimable_part <= r.df && r.df <= d.innate);
            prop_assert_eq!(rep.row(SsType::II, &r.label).unwrap().df, r.df);
        }
    }
}
