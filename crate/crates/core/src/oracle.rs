//! Brute-force reference computations and a randomized cross-check suite.
//!
//! Everything here avoids the Gram–Schmidt path used by the engine: least
//! squares goes through the normal equations solved by full-pivot Gaussian
//! elimination, and residuals are formed explicitly.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::design::{
    anova_projector, contains, CellCounts, Dataset, EffectId, EffectSet, FactorLayout,
};
use crate::engine::{
    self, build_context, estimable_part, h_star, identity_residuals, nu_one_given_zero, partition,
    tested_span, type3_construction, type3_ss, AnalysisOptions, DesignContext, SsType,
};
use crate::error::{Error, Result};
use crate::formula::{ModelSpec, Term};
use crate::numeric::{intersect, Matrix, Tolerance};

const PIVOT_TOL: f64 = 1e-10;

/// Solve `A Z = B` for symmetric positive semidefinite `A` by full-pivot
/// elimination. Free variables are set to zero. Returns `(Z, rank)`.
fn pivoted_solve(a: &Matrix, b: &Matrix) -> (Matrix, usize) {
    let p = a.nrows();
    let mut m = a.clone();
    let mut rhs = b.clone();
    let mut col_perm: Vec<usize> = (0..p).collect();
    let scale = m.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    let mut rank = 0;
    for k in 0..p {
        let (mut pr, mut pc, mut best) = (k, k, 0.0);
        for i in k..p {
            for j in k..p {
                if m[(i, j)].abs() > best {
                    best = m[(i, j)].abs();
                    pr = i;
                    pc = j;
                }
            }
        }
        if best <= PIVOT_TOL * scale || best == 0.0 {
            break;
        }
        m.swap_rows(k, pr);
        rhs.swap_rows(k, pr);
        m.swap_columns(k, pc);
        col_perm.swap(k, pc);
        for i in k + 1..p {
            let f = m[(i, k)] / m[(k, k)];
            if f == 0.0 {
                continue;
            }
            for j in k..p {
                m[(i, j)] -= f * m[(k, j)];
            }
            for j in 0..rhs.ncols() {
                rhs[(i, j)] -= f * rhs[(k, j)];
            }
        }
        rank += 1;
    }
    let mut z_perm = Matrix::zeros(p, b.ncols());
    for c in 0..b.ncols() {
        for k in (0..rank).rev() {
            let mut s = rhs[(k, c)];
            for j in k + 1..rank {
                s -= m[(k, j)] * z_perm[(j, c)];
            }
            z_perm[(k, c)] = s / m[(k, k)];
        }
    }
    let mut z = Matrix::zeros(p, b.ncols());
    for (k, &orig) in col_perm.iter().enumerate() {
        z.set_row(orig, &z_perm.row(k));
    }
    (z, rank)
}

/// Least-squares residual matrix `Y − X b̂` via the normal equations.
fn residuals(x: &Matrix, y: &Matrix) -> Matrix {
    if x.ncols() == 0 {
        return y.clone();
    }
    let (b, _) = pivoted_solve(&(x.transpose() * x), &(x.transpose() * y));
    y - x * b
}

/// Numerical rank by full-pivot elimination on the matrix itself; pivots up
/// to `rel_tol` times the largest entry count as zero.
pub fn oracle_rank(a: &Matrix, rel_tol: f64) -> usize {
    let scale = a.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    rank_against(a, rel_tol * scale)
}

fn rank_against(a: &Matrix, cutoff: f64) -> usize {
    let (r, c) = a.shape();
    let mut m = a.clone();
    let mut rank = 0;
    for k in 0..r.min(c) {
        let (mut pr, mut pc, mut best) = (k, k, 0.0);
        for i in k..r {
            for j in k..c {
                if m[(i, j)].abs() > best {
                    best = m[(i, j)].abs();
                    pr = i;
                    pc = j;
                }
            }
        }
        if best <= cutoff || best == 0.0 {
            break;
        }
        m.swap_rows(k, pr);
        m.swap_columns(k, pc);
        for i in k + 1..r {
            let f = m[(i, k)] / m[(k, k)];
            for j in k..c {
                m[(i, j)] -= f * m[(k, j)];
            }
        }
        rank += 1;
    }
    rank
}

/// Minimized `‖y − Xb‖²`.
pub fn ls_sse(x: &Matrix, y: &[f64]) -> Result<f64> {
    if x.nrows() != y.len() {
        return Err(Error::dim(format!("x has {} rows, y has {}", x.nrows(), y.len())));
    }
    let y = Matrix::from_column_slice(y.len(), 1, y);
    Ok(residuals(x, &y).norm_squared())
}

/// `ls_sse(restricted) − ls_sse(full)`; the restricted span must lie in the
/// full span.
pub fn rmfm_oracle(x_full: &Matrix, x_restricted: &Matrix, y: &[f64]) -> Result<f64> {
    if x_full.nrows() != x_restricted.nrows() {
        return Err(Error::dim("full and restricted models differ in row count"));
    }
    if x_restricted.ncols() > 0 {
        let stacked = crate::numeric::hcat(&[x_full, x_restricted])?;
        if oracle_rank(&stacked, 1e-9) != oracle_rank(x_full, 1e-9) {
            return Err(Error::input("restricted model is not contained in the full model"));
        }
    }
    Ok(ls_sse(x_restricted, y)? - ls_sse(x_full, y)?)
}

/// `g'β` is estimable iff `g` is (numerically) a combination of rows of `X`.
pub fn estimable_oracle(x: &Matrix, g: &[f64]) -> Result<bool> {
    if g.len() != x.ncols() {
        return Err(Error::dim(format!("g has {} entries, X has {} columns", g.len(), x.ncols())));
    }
    let gm = Matrix::from_column_slice(g.len(), 1, g);
    let r = residuals(&x.transpose(), &gm).norm();
    Ok(r <= 1e-9 * gm.norm())
}

/// Knobs for [`random_design`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioParams {
    pub factors: usize,
    pub min_levels: usize,
    pub max_levels: usize,
    /// Probability that any given cell is left empty.
    pub empty_fraction: f64,
    pub max_per_cell: usize,
    /// Probability of adding a covariate sub-model.
    pub covariate_probability: f64,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        Self {
            factors: 2,
            min_levels: 2,
            max_levels: 4,
            empty_fraction: 0.0,
            max_per_cell: 3,
            covariate_probability: 0.0,
        }
    }
}

/// A reproducible random design, model, parameter draw and response.
#[derive(Debug, Clone)]
pub struct SyntheticScenario {
    pub seed: u64,
    pub layout: FactorLayout,
    pub counts: CellCounts,
    pub spec: ModelSpec,
    pub data: Dataset,
    pub beta: DVector<f64>,
    pub sigma: f64,
}

impl SyntheticScenario {
    pub fn context(&self) -> Result<DesignContext> {
        build_context(&self.layout, &self.spec, &self.data)
    }

    pub fn response(&self) -> &[f64] {
        self.data.response()
    }
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

pub fn random_design(seed: u64, params: &ScenarioParams) -> Result<SyntheticScenario> {
    if params.factors == 0 || params.factors > 3 {
        return Err(Error::input("scenarios support 1 to 3 factors"));
    }
    if params.min_levels < 2 || params.min_levels > params.max_levels || params.max_levels > 4 {
        return Err(Error::input("levels must satisfy 2 <= min <= max <= 4"));
    }
    if !(0.0..1.0).contains(&params.empty_fraction) || params.max_per_cell == 0 {
        return Err(Error::input("invalid empty fraction or cell size"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = params.factors;
    let levels: Vec<usize> = (0..f)
        .map(|_| rng.random_range(params.min_levels..=params.max_levels))
        .collect();
    let names: Vec<String> = (0..f).map(|k| ((b'A' + k as u8) as char).to_string()).collect();
    let layout = FactorLayout::new(names.clone(), levels)?;

    let cells = layout.cells();
    let mut counts: Vec<usize> = (0..cells)
        .map(|_| {
            if rng.random_bool(params.empty_fraction) {
                0
            } else {
                rng.random_range(1..=params.max_per_cell)
            }
        })
        .collect();
    if counts.iter().all(|&c| c == 0) {
        let l = rng.random_range(0..cells);
        counts[l] = 1;
    }
    let mut assignment = Vec::new();
    for (l, &c) in counts.iter().enumerate() {
        assignment.extend(std::iter::repeat_n(l, c));
    }
    let n = assignment.len();

    // Effects by size then tuple order; the intercept is always present.
    let mut effects = crate::design::all_effects(f);
    effects.sort_by_key(|j| (j.factors().len(), std::cmp::Reverse(j.clone())));
    let mut intercept = EffectSet::new();
    for j in effects {
        if j.is_intercept() || rng.random_bool(0.7) {
            intercept.insert(j);
        }
    }
    let mut covariates = Vec::new();
    let mut cov_data = Vec::new();
    if rng.random_bool(params.covariate_probability) {
        let mut set = EffectSet::new();
        set.insert(EffectId::intercept(f));
        if rng.random_bool(0.5) {
            set.insert(EffectId::from_factors(f, &[0]));
        }
        let x: Vec<f64> = (0..n).map(|_| normal(&mut rng)).collect();
        covariates.push(("x1".to_string(), set));
        cov_data.push(("x1".to_string(), x));
    }
    let spec = ModelSpec::from_submodels("y", names, &intercept, covariates)
        .map_err(|e| Error::input(e.to_string()))?;

    let placeholder = Dataset::new(assignment.clone(), cov_data.clone(), vec![0.0; n])?;
    let ctx = build_context(&layout, &spec, &placeholder)?;
    let p = ctx.x().ncols();
    let beta = DVector::from_fn(p, |_, _| 3.0 * normal(&mut rng));
    let sigma = rng.random_range(0.5..2.0);
    let mean = ctx.x() * &beta;
    let y: Vec<f64> = mean.iter().map(|m| m + sigma * normal(&mut rng)).collect();
    Ok(SyntheticScenario {
        seed,
        layout,
        counts: CellCounts::new(counts)?,
        spec,
        data: Dataset::new(assignment, cov_data, y)?,
        beta,
        sigma,
    })
}

/// Parameters of scenario `index` in a suite: factor count cycles through
/// 1, 2, 3 and every other scenario has empty cells.
pub fn suite_params(index: u64) -> ScenarioParams {
    ScenarioParams {
        factors: 1 + (index % 3) as usize,
        empty_fraction: if index % 2 == 1 { 0.3 } else { 0.0 },
        covariate_probability: 0.25,
        ..ScenarioParams::default()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Info,
}

/// One engine-versus-oracle comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub scenario: u64,
    pub check: String,
    pub engine: f64,
    pub oracle: f64,
    pub discrepancy: f64,
    pub tolerance: f64,
    pub status: CheckStatus,
}

impl OracleReport {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// SS comparisons use relative error with the denominator floored at
/// `1e-6‖y‖²`, i.e. an absolute allowance of `1e-14‖y‖²` near zero.
pub const SS_REL_TOL: f64 = 1e-8;
pub const IDENTITY_TOL: f64 = 1e-9;

struct Recorder<'a> {
    scenario: u64,
    out: &'a mut Vec<OracleReport>,
}

impl Recorder<'_> {
    fn push(&mut self, check: String, engine: f64, oracle: f64, discrepancy: f64, tol: f64) {
        let status = if discrepancy <= tol {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        };
        self.out.push(OracleReport {
            scenario: self.scenario,
            check,
            engine,
            oracle,
            discrepancy,
            tolerance: tol,
            status,
        });
    }

    fn ss(&mut self, check: String, engine: f64, oracle: f64, yy: f64) {
        let d = (engine - oracle).abs() / oracle.abs().max(1e-6 * yy).max(f64::MIN_POSITIVE);
        self.push(check, engine, oracle, d, SS_REL_TOL);
    }

    fn count(&mut self, check: String, engine: usize, oracle: usize) {
        let d = (engine as f64 - oracle as f64).abs();
        self.push(check, engine as f64, oracle as f64, d, 0.0);
    }

    /// Passes iff `lhs <= rhs`.
    fn at_most(&mut self, check: String, lhs: usize, rhs: usize) {
        let d = (lhs as f64 - rhs as f64).max(0.0);
        self.push(check, lhs as f64, rhs as f64, d, 0.0);
    }

    fn small(&mut self, check: String, value: f64, tol: f64) {
        self.push(check, value, 0.0, value, tol);
    }
}

fn oracle_projector(a: &Matrix) -> Matrix {
    let m = a.nrows();
    if a.ncols() == 0 {
        return Matrix::zeros(m, m);
    }
    let (b, _) = pivoted_solve(&(a.transpose() * a), &a.transpose());
    a * b
}

struct OracleSplit {
    x0: Matrix,
    x1: Matrix,
    x2: Matrix,
    e0: Matrix,
    e1: Matrix,
}

fn oracle_split(ctx: &DesignContext, target: &Term) -> Result<OracleSplit> {
    let (mut c0, mut c1, mut c2) = (Vec::new(), Vec::new(), Vec::new());
    let (mut e0, mut e1) = (Vec::new(), Vec::new());
    for b in ctx.blocks() {
        let cols = b.columns.clone();
        let same = b.term.submodel == target.submodel;
        if same && b.term.effect == target.effect {
            c1.extend(cols);
            e1.push(b.effect_columns.clone());
        } else if same && contains(&b.term.effect, &target.effect)? {
            c2.extend(cols);
        } else {
            c0.extend(cols);
            if same {
                e0.push(b.effect_columns.clone());
            }
        }
    }
    let cat = |v: &[Matrix]| -> Result<Matrix> {
        if v.is_empty() {
            Ok(Matrix::zeros(ctx.layout().cells(), 0))
        } else {
            crate::numeric::hcat(&v.iter().collect::<Vec<_>>())
        }
    };
    Ok(OracleSplit {
        x0: ctx.columns(&c0),
        x1: ctx.columns(&c1),
        x2: ctx.columns(&c2),
        e0: cat(&e0)?,
        e1: cat(&e1)?,
    })
}

fn hcat2(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    crate::numeric::hcat(&[a, b])
}

/// Every check for one scenario. `perturb` shifts engine Type III SS by a
/// relative `1e-6` so the comparison must fail.
pub fn check_scenario(sc: &SyntheticScenario, perturb: bool) -> Result<Vec<OracleReport>> {
    let mut out = Vec::new();
    let mut rec = Recorder {
        scenario: sc.seed,
        out: &mut out,
    };
    let ctx = sc.context()?;
    let y = sc.response();
    let yy: f64 = y.iter().map(|v| v * v).sum();
    let tol = Tolerance::default();
    let opts = AnalysisOptions::default();
    let report = engine::anova_table(&ctx, y, &SsType::ALL, &opts)?;
    let spec = ctx.spec();
    let x = ctx.x();
    let rank_x = oracle_rank(x, 1e-9);

    rec.ss("fit.sse".into(), report.fit.sse, ls_sse(x, y)?, yy);
    rec.count("fit.df_error".into(), report.fit.df_error, ctx.n() - rank_x);

    // Type I: sequential RMFM over formula order.
    let mut type1_total = 0.0;
    let t1 = report.table(SsType::I).expect("requested");
    let mut row_iter = t1.rows.iter();
    for b in ctx.blocks() {
        let before = x.columns(0, b.columns.start).into_owned();
        let upto = x.columns(0, b.columns.end).into_owned();
        let oracle = rmfm_oracle(&upto, &before, y)?;
        type1_total += oracle;
        if b.term.submodel == 0 && b.term.effect.is_intercept() {
            continue;
        }
        let row = row_iter.next().expect("one row per term");
        let label = spec.term_label(&b.term);
        rec.ss(format!("type1.ss[{label}]"), row.ss, oracle, yy);
        let df = oracle_rank(&upto, 1e-9) - oracle_rank(&before, 1e-9);
        rec.count(format!("type1.df[{label}]"), row.df, df);
    }
    let additivity = (type1_total + report.fit.sse - yy).abs() / yy.max(f64::MIN_POSITIVE);
    rec.small("type1.additivity".into(), additivity, 1e-9);

    let t2 = report.table(SsType::II).expect("requested");
    let t3 = report.table(SsType::III).expect("requested");
    for (r2, r3) in t2.rows.iter().zip(&t3.rows) {
        let term = &r3.term;
        let label = &r3.label;
        let split = oracle_split(&ctx, term)?;
        let x01 = hcat2(&split.x0, &split.x1)?;

        let ss2 = rmfm_oracle(&x01, &split.x0, y)?;
        rec.ss(format!("type2.ss[{label}]"), r2.ss, ss2, yy);
        let df2 = oracle_rank(&x01, 1e-9) - oracle_rank(&split.x0, 1e-9);
        rec.count(format!("type2.df[{label}]"), r2.df, df2);

        // X2* from explicit residuals of X on (X0, X1).
        let n01 = residuals(&x01, x);
        let x2star = if split.x2.ncols() == 0 {
            Matrix::zeros(ctx.n(), 1)
        } else {
            &split.x2 * (split.x2.transpose() * &n01)
        };
        let restricted = hcat2(&split.x0, &x2star)?;
        let ss3 = rmfm_oracle(x, &restricted, y)?;
        let engine_ss3 = if perturb { r3.ss * (1.0 + 1e-6) + 1e-6 } else { r3.ss };
        rec.ss(format!("type3.ss[{label}]"), engine_ss3, ss3, yy);
        let df3 = rank_x - oracle_rank(&restricted, 1e-9);
        rec.count(format!("type3.df[{label}]"), r3.df, df3);
        rec.count(format!("df.type2_eq_type3[{label}]"), r2.df, r3.df);

        let detail = r3.df_detail.expect("type III rows carry df detail");
        rec.at_most(format!("df.estimable_le_type3[{label}]"), detail.estimable_part, r3.df);
        rec.at_most(format!("df.type3_le_adjusted[{label}]"), r3.df, detail.adjusted);
        rec.at_most(format!("df.adjusted_le_innate[{label}]"), detail.adjusted, detail.innate);

        // H* two ways: from the tuple closure and as P_(E0,E1) − P_E0.
        let hs = h_star(ctx.layout(), spec, term)?;
        let e01 = hcat2(&split.e0, &split.e1)?;
        let h_oracle = oracle_projector(&e01) - oracle_projector(&split.e0);
        rec.small(
            format!("hstar.agreement[{label}]"),
            (&hs.matrix - &h_oracle).norm(),
            IDENTITY_TOL,
        );

        // Estimable part: dim span(H*) minus the rank of what the rows of X
        // fail to reach.
        let lifted = ctx.lift_cell_rows(term.submodel, &h_oracle.transpose())?.transpose();
        let unreached = residuals(&x.transpose(), &lifted);
        let dim_h = oracle_rank(&h_oracle, 1e-9);
        let reach_scale = lifted.iter().fold(0.0f64, |s, v| s.max(v.abs()));
        let oracle_est = dim_h - rank_against(&unreached, 1e-8 * reach_scale).min(dim_h);
        rec.count(format!("estimable.dim[{label}]"), detail.estimable_part, oracle_est);
        let (est_basis, _) = estimable_part(&ctx, &hs.matrix, term.submodel, &tol)?;
        let lifted_basis = ctx
            .lift_cell_rows(term.submodel, &est_basis.carrier().transpose())?
            .transpose();
        let not_estimable = (0..lifted_basis.ncols())
            .filter(|&k| {
                let g: Vec<f64> = lifted_basis.column(k).iter().copied().collect();
                !estimable_oracle(x, &g).unwrap_or(false)
            })
            .count();
        rec.count(format!("estimable.basis[{label}]"), not_estimable, 0);

        let part = partition(&ctx, term)?;
        let constr = type3_construction(&ctx, &part, &tol)?;
        let ident = identity_residuals(&ctx, &part, &constr, &hs, &tol)?;
        rec.small(format!("identity.h_e0[{label}]"), ident.annihilates_e0, IDENTITY_TOL);
        rec.small(format!("identity.h_e10[{label}]"), ident.fixes_e10, IDENTITY_TOL);
        rec.small(format!("identity.h_e2star[{label}]"), ident.annihilates_e2star, IDENTITY_TOL);
        rec.count(
            format!("df.adjusted[{label}]"),
            nu_one_given_zero(&ctx, &part, &tol)?,
            detail.adjusted,
        );

        // Estimable directions lie in the tested span.
        let tested = tested_span(&ctx, term.submodel, &constr, &tol)?;
        let outside = if est_basis.is_empty() {
            0.0
        } else {
            let proj = crate::numeric::project(&tested, est_basis.carrier())?;
            (est_basis.carrier() - proj).norm()
        };
        rec.small(format!("tested.contains_estimable[{label}]"), outside, IDENTITY_TOL);

        // Null mean in the (X0, X1, X2*) parameterization, with β1 stripped
        // of the part X_{1|0} sees.
        let x10 = residuals(&split.x0, &split.x1);
        let draw = |cols: &[usize]| DVector::from_iterator(cols.len(), cols.iter().map(|&c| sc.beta[c]));
        let b1 = draw(&part.x1_columns);
        let null_b1 = &b1 - oracle_projector(&x10.transpose()) * &b1;
        let b2 = DVector::from_fn(x2star.ncols(), |k, _| sc.beta[k % sc.beta.len()]);
        let mu = &split.x0 * draw(&part.x0_columns) + &split.x1 * null_b1 + &x2star * b2;
        let (delta3, _) = type3_ss(&constr, mu.as_slice())?;
        let ratio = delta3.sqrt() / mu.norm().max(f64::MIN_POSITIVE);
        rec.small(format!("null.delta3[{label}]"), ratio, IDENTITY_TOL);
    }
    Ok(out)
}

/// Whether the Type III tested spans of distinct targets within each
/// sub-model meet only at zero.
pub fn tested_spans_disjoint(sc: &SyntheticScenario) -> Result<bool> {
    let ctx = sc.context()?;
    let tol = Tolerance::default();
    let mut spans = Vec::new();
    for term in ctx.spec().terms() {
        if term.submodel == 0 && term.effect.is_intercept() {
            continue;
        }
        let part = partition(&ctx, term)?;
        let constr = type3_construction(&ctx, &part, &tol)?;
        spans.push((term.submodel, tested_span(&ctx, term.submodel, &constr, &tol)?));
    }
    for (i, (si, a)) in spans.iter().enumerate() {
        for (sj, b) in &spans[i + 1..] {
            if si == sj && intersect(a, b, &tol)?.dim() > 0 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteSummary {
    pub seed: u64,
    pub scenarios: u64,
    pub checks: usize,
    pub failed: usize,
    pub disjoint_fraction: f64,
}

#[derive(Debug, Clone)]
pub struct SuiteResult {
    pub reports: Vec<OracleReport>,
    pub summary: SuiteSummary,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.summary.failed == 0
    }

    /// One JSON object per line, summary last.
    pub fn to_json_lines(&self) -> String {
        let mut s = String::new();
        for r in &self.reports {
            s.push_str(&r.to_json_line());
            s.push('\n');
        }
        s.push_str(&serde_json::to_string(&self.summary).expect("summary serializes"));
        s.push('\n');
        s
    }
}

/// Scenario `k` uses seed `seed + k` with [`suite_params`]`(k)`.
pub fn run_suite(seed: u64, count: u64, perturb: bool) -> Result<SuiteResult> {
    let mut reports = Vec::new();
    let mut disjoint = 0u64;
    for k in 0..count {
        let sc = random_design(seed.wrapping_add(k), &suite_params(k))?;
        reports.extend(check_scenario(&sc, perturb)?);
        if tested_spans_disjoint(&sc)? {
            disjoint += 1;
        }
    }
    let disjoint_fraction = if count == 0 { 1.0 } else { disjoint as f64 / count as f64 };
    reports.push(OracleReport {
        scenario: seed,
        check: "conjecture.disjoint_tested_spans".into(),
        engine: disjoint_fraction,
        oracle: 1.0,
        discrepancy: 1.0 - disjoint_fraction,
        tolerance: f64::INFINITY,
        status: CheckStatus::Info,
    });
    let failed = reports.iter().filter(|r| r.status == CheckStatus::Fail).count();
    let checks = reports.len();
    Ok(SuiteResult {
        reports,
        summary: SuiteSummary {
            seed,
            scenarios: count,
            checks,
            failed,
            disjoint_fraction,
        },
    })
}

/// `H_j` for each tuple, exposed for property tests.
pub fn anova_projectors(layout: &FactorLayout) -> Result<Vec<(EffectId, Matrix)>> {
    crate::design::all_effects(layout.factors())
        .into_iter()
        .map(|j| anova_projector(layout, &j).map(|h| (j, h)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ls_sse_centering() {
        let y = [1.0, 2.0, 6.0];
        let x = Matrix::from_element(3, 1, 1.0);
        assert!((ls_sse(&x, &y).unwrap() - 14.0).abs() < 1e-12);
        let square = Matrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 1.0, 1.0, 0.0, 1.0, 1.0, 1.0]);
        assert!(ls_sse(&square, &y).unwrap().abs() < 1e-20);
    }

    #[test]
    fn ls_sse_rank_deficient() {
        // Intercept plus both dummies: rank 2.
        let x = Matrix::from_row_slice(4, 3, &[1., 1., 0., 1., 1., 0., 1., 0., 1., 1., 0., 1.]);
        let y = [1.0, 3.0, 10.0, 12.0];
        assert!((ls_sse(&x, &y).unwrap() - 4.0).abs() < 1e-10);
        assert_eq!(oracle_rank(&x, 1e-9), 2);
    }

    #[test]
    fn rmfm_requires_containment() {
        let full = Matrix::from_element(3, 1, 1.0);
        let other = Matrix::from_column_slice(3, 1, &[1.0, 2.0, 3.0]);
        assert!(rmfm_oracle(&full, &other, &[1.0, 2.0, 3.0]).is_err());
        assert_eq!(rmfm_oracle(&full, &full, &[1.0, 2.0, 3.0]).unwrap(), 0.0);
    }

    #[test]
    fn estimability_by_rows() {
        let x = Matrix::from_row_slice(2, 3, &[1., 1., 0., 1., 1., 0.]);
        assert!(estimable_oracle(&x, &[1.0, 1.0, 0.0]).unwrap());
        assert!(!estimable_oracle(&x, &[0.0, 1.0, -1.0]).unwrap());
    }

    #[test]
    fn scenarios_are_reproducible() {
        let p = ScenarioParams {
            factors: 3,
            empty_fraction: 0.3,
            covariate_probability: 0.5,
            ..ScenarioParams::default()
        };
        let a = random_design(11, &p).unwrap();
        let b = random_design(11, &p).unwrap();
        assert_eq!(a.data, b.data);
        assert_eq!(a.spec, b.spec);
        assert_eq!(a.beta, b.beta);
    }

    #[test]
    fn no_empty_cells_when_fraction_is_zero() {
        for seed in 0..20 {
            let sc = random_design(seed, &ScenarioParams::default()).unwrap();
            assert!(sc.counts.empty_cells().is_empty());
        }
    }
}
