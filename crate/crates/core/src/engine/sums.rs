//! Sums of squares as squared norms of projections onto constructed
//! subspaces, and the least-squares fit.

use nalgebra::DVector;

use super::context::{DesignContext, EffectPartition};
use crate::error::{Error, Result};
use crate::formula::{Submodel, Term};
use crate::numeric::{complement_within, gram_schmidt, hcat, Matrix, OrthonormalBasis, Tolerance};

/// The two-step Gram–Schmidt construction of the Type III subspace
/// `S3 = span(X0, X2*)^⊥ ∩ span(X)` with `X2* = X2 X2' N01`.
#[derive(Debug, Clone)]
pub struct TypeIIIConstruction {
    /// Basis of `span(X0, X1)^⊥ ∩ span(X)`.
    pub n01: OrthonormalBasis,
    /// `X2 X2' N01`, or a single zero column when `X2` or `N01` is empty.
    pub x2star: Matrix,
    /// Basis of `S3`; `P3 = Q3 Q3'`.
    pub q3: OrthonormalBasis,
    pub df: usize,
}

pub fn type3_construction(
    ctx: &DesignContext,
    part: &EffectPartition,
    tol: &Tolerance,
) -> Result<TypeIIIConstruction> {
    let x = ctx.x();
    let n = ctx.n();
    let n01 = complement_within(&hcat(&[&part.x0, &part.x1])?, x, tol)?;
    let x2star = if part.x2.ncols() == 0 || n01.is_empty() {
        Matrix::zeros(n, 1)
    } else {
        &part.x2 * (part.x2.transpose() * n01.carrier())
    };
    let q3 = complement_within(&hcat(&[&part.x0, &x2star])?, x, tol)?;
    let df = q3.dim();
    Ok(TypeIIIConstruction {
        n01,
        x2star,
        q3,
        df,
    })
}

fn as_vector(y: &[f64], n: usize) -> Result<DVector<f64>> {
    if y.len() != n {
        return Err(Error::dim(format!("response has {} values, model has {n} rows", y.len())));
    }
    Ok(DVector::from_column_slice(y))
}

/// `SS3 = y'P3y = ‖Q3'y‖²` and its df.
pub fn type3_ss(constr: &TypeIIIConstruction, y: &[f64]) -> Result<(f64, usize)> {
    let y = as_vector(y, constr.q3.ambient())?;
    Ok((constr.q3.projected_sq_norm(&y), constr.df))
}

/// Basis of `span(X0, X1) ⊖ span(X0)`, the Type II numerator space.
pub fn type2_basis(part: &EffectPartition, tol: &Tolerance) -> Result<OrthonormalBasis> {
    complement_within(&part.x0, &part.x1, tol)
}

/// `y'(P_(X0,X1) - P_X0)y` and `rank(X0, X1) - rank(X0)`.
pub fn type2_ss(
    ctx: &DesignContext,
    part: &EffectPartition,
    y: &[f64],
    tol: &Tolerance,
) -> Result<(f64, usize)> {
    let y = as_vector(y, ctx.n())?;
    let basis = type2_basis(part, tol)?;
    Ok((basis.projected_sq_norm(&y), basis.dim()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SequentialEntry {
    pub term: Term,
    pub ss: f64,
    pub df: usize,
}

/// Type I: each term adjusted for the terms before it, in formula order.
pub fn type1_table(
    ctx: &DesignContext,
    y: &[f64],
    tol: &Tolerance,
) -> Result<Vec<SequentialEntry>> {
    let yv = as_vector(y, ctx.n())?;
    let mut out = Vec::with_capacity(ctx.blocks().len());
    for b in ctx.blocks() {
        let before = ctx.x().columns(0, b.columns.start).into_owned();
        let this = ctx.x().columns(b.columns.start, b.columns.len()).into_owned();
        let basis = complement_within(&before, &this, tol)?;
        out.push(SequentialEntry {
            term: b.term.clone(),
            ss: basis.projected_sq_norm(&yv),
            df: basis.dim(),
        });
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct FittedModel {
    /// A least-squares solution: zero on columns that Gram–Schmidt dropped.
    pub beta_hat: DVector<f64>,
    pub fitted: DVector<f64>,
    pub sse: f64,
    pub rank: usize,
    pub df_error: usize,
    /// `None` when `df_error = 0`.
    pub mse: Option<f64>,
}

pub fn fit(ctx: &DesignContext, y: &[f64], tol: &Tolerance) -> Result<FittedModel> {
    let yv = as_vector(y, ctx.n())?;
    let qx = gram_schmidt(ctx.x(), tol)?;
    let q = qx.carrier();
    let coords = q.transpose() * &yv;
    let fitted = q * &coords;
    let sse = (&yv - &fitted).norm_squared();
    let rank = qx.dim();
    let df_error = ctx.n() - rank;

    let mut beta_hat = DVector::zeros(ctx.x().ncols());
    if rank > 0 {
        let picked = ctx.columns(qx.source_columns());
        let r = q.transpose() * picked;
        let b = r
            .solve_upper_triangular(&coords)
            .ok_or_else(|| Error::Numerical("singular triangular factor in fit".into()))?;
        for (k, &col) in qx.source_columns().iter().enumerate() {
            beta_hat[col] = b[k];
        }
    }
    Ok(FittedModel {
        beta_hat,
        fitted,
        sse,
        rank,
        df_error,
        mse: (df_error > 0).then(|| sse / df_error as f64),
    })
}

/// Rows of a homogeneous linear hypothesis `G'β = 0`.
#[derive(Debug, Clone)]
pub enum HypothesisSpec {
    /// Rows are coefficient vectors on the full `β`.
    Beta(Matrix),
    /// Rows are coefficient vectors on the cell means `η_i` of a sub-model.
    CellMeans { submodel: Submodel, rows: Matrix },
}

/// Restricted-model minus full-model SSE for `G'β = 0`: the restricted model
/// is `span(XN)` with `span(N)` the null space of `G'`.
pub fn rmfm_ss(
    ctx: &DesignContext,
    hypothesis: &HypothesisSpec,
    y: &[f64],
    tol: &Tolerance,
) -> Result<(f64, usize)> {
    let p = ctx.x().ncols();
    let g_rows = match hypothesis {
        HypothesisSpec::Beta(rows) => {
            if rows.ncols() != p {
                return Err(Error::dim(format!(
                    "hypothesis rows need {p} columns, got {}",
                    rows.ncols()
                )));
            }
            rows.clone()
        }
        HypothesisSpec::CellMeans { submodel, rows } => {
            if *submodel >= ctx.spec().submodel_count() {
                return Err(Error::input(format!("no sub-model {submodel}")));
            }
            ctx.lift_cell_rows(*submodel, rows)?
        }
    };
    let yv = as_vector(y, ctx.n())?;
    let null = complement_within(&g_rows.transpose(), &Matrix::identity(p, p), tol)?;
    let restricted = ctx.x() * null.carrier();
    let basis = complement_within(&restricted, ctx.x(), tol)?;
    Ok((basis.projected_sq_norm(&yv), basis.dim()))
}
