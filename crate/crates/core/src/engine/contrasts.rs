//! What a Type III test is about: the target's `H*` projector, the estimable
//! part of `H*η`, and the contrasts on cell means that the test examines.

use super::context::{DesignContext, EffectPartition};
use super::sums::TypeIIIConstruction;
use crate::design::{all_effects, anova_projector, closure, contains, EffectId, EffectSet, FactorLayout};
use crate::error::{Error, Result};
use crate::formula::{ModelSpec, Submodel, Term};
use crate::numeric::{complement_within, gram_schmidt, hcat, intersect, Matrix, OrthonormalBasis, Tolerance};

/// `H* = Σ H_j` over the tuples contained in the target but in no
/// non-containing effect of the same sub-model.
#[derive(Debug, Clone)]
pub struct HStar {
    pub effects: EffectSet,
    pub matrix: Matrix,
}

impl HStar {
    /// `ν* = tr(H*)`.
    pub fn innate_df(&self, layout: &FactorLayout) -> usize {
        let levels = layout.levels();
        self.effects.iter().map(|j| j.innate_df(&levels)).sum()
    }
}

fn non_containing(spec: &ModelSpec, target: &Term) -> Result<EffectSet> {
    let mut out = EffectSet::new();
    for j in &spec.submodel(target.submodel) {
        if !contains(j, &target.effect)? {
            out.insert(j.clone());
        }
    }
    Ok(out)
}

pub fn h_star(layout: &FactorLayout, spec: &ModelSpec, target: &Term) -> Result<HStar> {
    if !spec.terms().contains(target) {
        return Err(Error::input(format!(
            "effect `{}` is not in the model",
            spec.term_label(target)
        )));
    }
    let below_target = closure(&std::iter::once(target.effect.clone()).collect());
    let below_rest = closure(&non_containing(spec, target)?);
    let effects: EffectSet = below_target
        .iter()
        .filter(|j| !below_rest.contains(j))
        .cloned()
        .collect();
    let m = layout.cells();
    let mut matrix = Matrix::zeros(m, m);
    for j in &effects {
        matrix += anova_projector(layout, j)?;
    }
    Ok(HStar { effects, matrix })
}

/// Basis (on `η_i`) of the estimable part of `span(H*)`, with its dimension.
///
/// A coefficient vector `c` on `η_i = E_i β_i` is estimable iff its lift
/// `E_i'c` (zero outside sub-model `i`) lies in the row space of `X`. The lift
/// is injective on `span(H*)`, so the intersection is computed in `β`-space
/// and mapped back.
pub fn estimable_part(
    ctx: &DesignContext,
    h_star: &Matrix,
    submodel: Submodel,
    tol: &Tolerance,
) -> Result<(OrthonormalBasis, usize)> {
    let m = ctx.layout().cells();
    let bh = gram_schmidt(h_star, tol)?;
    if bh.is_empty() {
        return Ok((OrthonormalBasis::empty(m), 0));
    }
    let lifted = ctx
        .lift_cell_rows(submodel, &bh.carrier().transpose())?
        .transpose();
    let g = gram_schmidt(&lifted, tol)?;
    let rows = gram_schmidt(&ctx.x().transpose(), tol)?;
    let common = intersect(&g, &rows, tol)?;
    if common.is_empty() {
        return Ok((OrthonormalBasis::empty(m), 0));
    }
    let svd = lifted.svd(true, true);
    let t = svd
        .solve(common.carrier(), f64::EPSILON)
        .map_err(|e| Error::Numerical(format!("estimable part back-map: {e}")))?;
    let basis = gram_schmidt(&(bh.carrier() * t), tol)?;
    let dim = basis.dim();
    Ok((basis, dim))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Classification {
    Anova(EffectId),
    NonAnova,
}

/// `anova(j)` iff `‖H_j c − c‖ ≤ tol‖c‖` for some `j`.
pub fn classify_contrast(layout: &FactorLayout, c: &[f64], tol: f64) -> Result<Classification> {
    let m = layout.cells();
    if c.len() != m {
        return Err(Error::dim(format!("contrast has {} entries, layout has {m} cells", c.len())));
    }
    let v = nalgebra::DVector::from_column_slice(c);
    let norm = v.norm();
    if norm == 0.0 {
        return Err(Error::input("cannot classify the zero contrast"));
    }
    for j in all_effects(layout.factors()) {
        let h = anova_projector(layout, &j)?;
        if (&h * &v - &v).norm() <= tol * norm {
            return Ok(Classification::Anova(j));
        }
    }
    Ok(Classification::NonAnova)
}

/// One tested contrast on the target sub-model's `η`.
#[derive(Debug, Clone)]
pub struct Contrast {
    /// Scaled so the first largest-magnitude entry is `+1`; optionally
    /// snapped to small-denominator rationals.
    pub coeffs: Vec<f64>,
    /// Unit-norm direction before snapping.
    pub unit: Vec<f64>,
    pub label: String,
    pub classification: Classification,
}

#[derive(Debug, Clone)]
pub struct TestedContrasts {
    /// Orthonormal basis of the tested span in `η_i`-coordinates.
    pub span: OrthonormalBasis,
    pub rows: Vec<Contrast>,
}

#[derive(Debug, Clone, Copy)]
pub struct ContrastOptions {
    pub rationalize: bool,
    pub max_denominator: u32,
    pub snap_tol: f64,
    pub classify_tol: f64,
}

impl Default for ContrastOptions {
    fn default() -> Self {
        Self {
            rationalize: true,
            max_denominator: 24,
            snap_tol: 1e-6,
            classify_tol: 1e-8,
        }
    }
}

/// Span of `P_{E_i} K_i' Q3` in `η_i`-coordinates.
///
/// `c` and `P_{E_i} c` define the same function `c'E_iβ_i`; the projected
/// representative is the one independent of cell counts beyond which cells are
/// empty.
pub fn tested_span(
    ctx: &DesignContext,
    submodel: Submodel,
    constr: &TypeIIIConstruction,
    tol: &Tolerance,
) -> Result<OrthonormalBasis> {
    let m = ctx.layout().cells();
    if constr.q3.is_empty() {
        return Ok(OrthonormalBasis::empty(m));
    }
    let raw = ctx.incidence(submodel).transpose() * constr.q3.carrier();
    let e = gram_schmidt(&ctx.submodel_effect_columns(submodel)?, tol)?;
    let projected = e.carrier() * (e.carrier().transpose() * raw);
    gram_schmidt(&projected, tol)
}

/// Canonical basis of the tested span: first its intersection with each
/// `span(H_j)` in tuple order, then the orthogonal remainder. Each piece is
/// written in reduced row echelon form.
pub fn tested_contrasts(
    ctx: &DesignContext,
    submodel: Submodel,
    constr: &TypeIIIConstruction,
    tol: &Tolerance,
    opts: &ContrastOptions,
) -> Result<TestedContrasts> {
    let layout = ctx.layout();
    let span = tested_span(ctx, submodel, constr, tol)?;
    let mut dirs: Vec<Matrix> = Vec::new();
    if !span.is_empty() {
        for j in all_effects(layout.factors()) {
            let hj = gram_schmidt(&anova_projector(layout, &j)?, tol)?;
            let common = intersect(&span, &hj, tol)?;
            if !common.is_empty() {
                dirs.push(common.into_carrier());
            }
        }
        let anova_part = if dirs.is_empty() {
            Matrix::zeros(layout.cells(), 0)
        } else {
            hcat(&dirs.iter().collect::<Vec<_>>())?
        };
        let rest = complement_within(&anova_part, span.carrier(), tol)?;
        if !rest.is_empty() {
            dirs.push(rest.into_carrier());
        }
    }
    let prefix = match submodel {
        0 => "eta".to_string(),
        i => format!("eta_{}", ctx.spec().covariate_names()[i - 1]),
    };
    let mut rows = Vec::new();
    for block in &dirs {
        for echelon in reduced_echelon_rows(block) {
            let norm = echelon.iter().map(|v| v * v).sum::<f64>().sqrt();
            let unit: Vec<f64> = echelon.iter().map(|v| v / norm).collect();
            let classification = classify_contrast(layout, &unit, opts.classify_tol)?;
            let mut coeffs = normalize_sign_scale(&unit);
            if opts.rationalize {
                for c in &mut coeffs {
                    if let Some((p, q)) = snap_rational(*c, opts.max_denominator, opts.snap_tol) {
                        *c = p as f64 / q as f64;
                    }
                }
            }
            let label = contrast_label(layout, &prefix, &coeffs, opts);
            rows.push(Contrast {
                coeffs,
                unit,
                label,
                classification,
            });
        }
    }
    Ok(TestedContrasts { span, rows })
}

/// Reduced row echelon form of the transposed basis: a basis of
/// `span(columns)` that does not depend on which spanning set was supplied.
pub fn reduced_echelon_rows(basis: &Matrix) -> Vec<Vec<f64>> {
    const PIVOT_TOL: f64 = 1e-9;
    let mut m = basis.transpose();
    let (k, n) = m.shape();
    let mut row = 0;
    for col in 0..n {
        if row == k {
            break;
        }
        let (best, val) = (row..k)
            .map(|r| (r, m[(r, col)].abs()))
            .fold((row, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if val <= PIVOT_TOL {
            continue;
        }
        m.swap_rows(row, best);
        let pivot = m[(row, col)];
        m.row_mut(row).scale_mut(1.0 / pivot);
        for r in 0..k {
            if r != row {
                let f = m[(r, col)];
                if f != 0.0 {
                    for c in 0..n {
                        let p = m[(row, c)];
                        m[(r, c)] -= f * p;
                    }
                }
            }
        }
        row += 1;
    }
    (0..row)
        .map(|r| {
            m.row(r)
                .iter()
                .map(|&v| if v.abs() < 1e-12 { 0.0 } else { v })
                .collect()
        })
        .collect()
}

/// Scale so the first entry of (near-)maximal magnitude becomes `+1`.
pub fn normalize_sign_scale(v: &[f64]) -> Vec<f64> {
    let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if max == 0.0 {
        return v.to_vec();
    }
    let pivot = v
        .iter()
        .position(|x| x.abs() >= max * (1.0 - 1e-9))
        .expect("max attained");
    let s = v[pivot];
    v.iter()
        .map(|x| {
            let r = x / s;
            if r.abs() < 1e-12 {
                0.0
            } else {
                r
            }
        })
        .collect()
}

/// Smallest-denominator `p/q` with `q ≤ max_den` and `|x − p/q| ≤ tol`.
pub fn snap_rational(x: f64, max_den: u32, tol: f64) -> Option<(i64, u32)> {
    (1..=max_den).find_map(|q| {
        let p = (x * q as f64).round();
        ((x - p / q as f64).abs() <= tol).then_some((p as i64, q))
    })
}

fn format_coeff(c: f64, opts: &ContrastOptions) -> String {
    if opts.rationalize {
        if let Some((p, q)) = snap_rational(c, opts.max_denominator, 1e-12) {
            return if q == 1 {
                format!("{}", p.abs())
            } else {
                format!("{}/{q}", p.abs())
            };
        }
    }
    format!("{:.6}", c.abs())
}

fn contrast_label(layout: &FactorLayout, prefix: &str, coeffs: &[f64], opts: &ContrastOptions) -> String {
    let mut out = String::new();
    for (idx, &c) in coeffs.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        let levels = layout.cell_levels(idx);
        let cell: Vec<&str> = levels
            .iter()
            .zip(layout.level_labels())
            .map(|(&l, labels)| labels[l].as_str())
            .collect();
        let sign = if c < 0.0 { "-" } else { "+" };
        if out.is_empty() {
            if c < 0.0 {
                out.push('-');
            }
        } else {
            out.push_str(&format!(" {sign} "));
        }
        let mag = format_coeff(c, opts);
        if mag != "1" {
            out.push_str(&mag);
            out.push('*');
        }
        out.push_str(&format!("{prefix}[{}]", cell.join(",")));
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// `ν_{1|0} = rank(K_i E_{1|0})` with `E_{1|0} = (I − P_{E_0})E_1`.
pub fn nu_one_given_zero(
    ctx: &DesignContext,
    part: &EffectPartition,
    tol: &Tolerance,
) -> Result<usize> {
    let e10 = e_one_given_zero(ctx, part, tol)?;
    Ok(gram_schmidt(&(ctx.incidence(part.target.submodel) * e10), tol)?.dim())
}

fn e_zero(ctx: &DesignContext, part: &EffectPartition) -> Result<Matrix> {
    let blocks: Vec<&Matrix> = ctx
        .blocks()
        .iter()
        .filter(|b| b.term.submodel == part.target.submodel && part.non_containing.contains(&b.term.effect))
        .map(|b| &b.effect_columns)
        .collect();
    if blocks.is_empty() {
        Ok(Matrix::zeros(ctx.layout().cells(), 0))
    } else {
        hcat(&blocks)
    }
}

fn e_one_given_zero(ctx: &DesignContext, part: &EffectPartition, tol: &Tolerance) -> Result<Matrix> {
    let e1 = &ctx
        .block_of(&part.target)
        .ok_or_else(|| Error::input("target not in model"))?
        .effect_columns;
    let e0 = gram_schmidt(&e_zero(ctx, part)?, tol)?;
    Ok(e1 - crate::numeric::project(&e0, e1)?)
}

/// Frobenius norms of `H*E_0`, `H*E_{1|0} − E_{1|0}` and `H*E_{2*}`, each
/// relative to the norm of the matrix multiplied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityResiduals {
    pub annihilates_e0: f64,
    pub fixes_e10: f64,
    pub annihilates_e2star: f64,
}

impl IdentityResiduals {
    pub fn max(&self) -> f64 {
        self.annihilates_e0
            .max(self.fixes_e10)
            .max(self.annihilates_e2star)
    }
}

pub fn identity_residuals(
    ctx: &DesignContext,
    part: &EffectPartition,
    constr: &TypeIIIConstruction,
    h_star: &HStar,
    tol: &Tolerance,
) -> Result<IdentityResiduals> {
    let h = &h_star.matrix;
    let rel = |num: f64, den: f64| if den > 0.0 { num / den } else { num };

    let e0 = e_zero(ctx, part)?;
    let e10 = e_one_given_zero(ctx, part, tol)?;
    let e2: Vec<&Matrix> = ctx
        .blocks()
        .iter()
        .filter(|b| b.term.submodel == part.target.submodel && part.containing.contains(&b.term.effect))
        .map(|b| &b.effect_columns)
        .collect();
    let e2star = if e2.is_empty() || constr.n01.is_empty() {
        Matrix::zeros(ctx.layout().cells(), 1)
    } else {
        let e2 = hcat(&e2)?;
        let kt_n = ctx.incidence(part.target.submodel).transpose() * constr.n01.carrier();
        &e2 * (e2.transpose() * kt_n)
    };
    Ok(IdentityResiduals {
        annihilates_e0: rel((h * &e0).norm(), e0.norm()),
        fixes_e10: rel((h * &e10 - &e10).norm(), e10.norm()),
        annihilates_e2star: rel((h * &e2star).norm(), e2star.norm()),
    })
}
