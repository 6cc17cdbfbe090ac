//! Dense subspace algebra built on a rank-revealing Gram–Schmidt pass.
//!
//! Every subspace is carried as an [`OrthonormalBasis`]. Projectors are never
//! materialized: `P = QQ'` is applied as `Q(Q'v)`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Dense real matrix, stored column-major (nalgebra's layout).
pub type Matrix = DMatrix<f64>;

/// Rank-decision thresholds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    /// Relative to the largest column norm of the matrix being reduced.
    pub rel_rank_tol: f64,
    /// Absolute floor below which a residual is always treated as zero.
    pub abs_floor: f64,
    /// Largest sine of a principal angle treated as zero by [`intersect`].
    pub angle_tol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            rel_rank_tol: 1e-10,
            abs_floor: 1e-12,
            angle_tol: 1e-8,
        }
    }
}

impl Tolerance {
    pub fn new(rel_rank_tol: f64, abs_floor: f64) -> Result<Self> {
        if !(rel_rank_tol > 0.0 && rel_rank_tol.is_finite()) {
            return Err(Error::input("relative rank tolerance must be positive"));
        }
        if !(abs_floor > 0.0 && abs_floor.is_finite()) {
            return Err(Error::input("absolute floor must be positive"));
        }
        Ok(Self {
            rel_rank_tol,
            abs_floor,
            angle_tol: Self::default().angle_tol,
        })
    }

    pub fn with_rel(rel_rank_tol: f64) -> Result<Self> {
        Self::new(rel_rank_tol, Self::default().abs_floor)
    }

    pub fn with_angle(self, angle_tol: f64) -> Result<Self> {
        if !(angle_tol > 0.0 && angle_tol < 1.0) {
            return Err(Error::input("angle tolerance must lie in (0, 1)"));
        }
        Ok(Self { angle_tol, ..self })
    }
}

/// Column-orthonormal matrix spanning a subspace of `R^n`.
///
/// `source_columns[k]` is the index of the input column that produced basis
/// vector `k`. A basis with zero columns represents the trivial subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthonormalBasis {
    carrier: Matrix,
    source_columns: Vec<usize>,
}

impl OrthonormalBasis {
    pub fn empty(n: usize) -> Self {
        Self {
            carrier: Matrix::zeros(n, 0),
            source_columns: Vec::new(),
        }
    }

    fn from_columns(n: usize, cols: &[Vec<f64>], source_columns: Vec<usize>) -> Self {
        let mut carrier = Matrix::zeros(n, cols.len());
        for (k, c) in cols.iter().enumerate() {
            carrier.column_mut(k).copy_from_slice(c);
        }
        Self {
            carrier,
            source_columns,
        }
    }

    pub fn carrier(&self) -> &Matrix {
        &self.carrier
    }

    pub fn into_carrier(self) -> Matrix {
        self.carrier
    }

    pub fn source_columns(&self) -> &[usize] {
        &self.source_columns
    }

    /// Dimension of the spanned subspace.
    pub fn dim(&self) -> usize {
        self.carrier.ncols()
    }

    /// Ambient dimension `n`.
    pub fn ambient(&self) -> usize {
        self.carrier.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.dim() == 0
    }

    /// `max |Q'Q - I|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let gram = self.carrier.transpose() * &self.carrier;
        let r = gram.nrows();
        let mut worst = 0.0f64;
        for i in 0..r {
            for j in 0..r {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((gram[(i, j)] - target).abs());
            }
        }
        worst
    }

    /// Squared norm of the projection of `y`, i.e. `y'QQ'y`.
    pub fn projected_sq_norm(&self, y: &DVector<f64>) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        (self.carrier.transpose() * y).norm_squared()
    }

    /// Materialize `QQ'`. Only for small ambient dimensions.
    pub fn projector(&self) -> Matrix {
        &self.carrier * self.carrier.transpose()
    }
}

pub(crate) fn check_finite(a: &Matrix) -> Result<()> {
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            if !a[(i, j)].is_finite() {
                return Err(Error::NonFinite { row: i, col: j });
            }
        }
    }
    Ok(())
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Rank-revealing Gram–Schmidt with one re-orthogonalization pass.
///
/// Column `k` of `a` contributes a basis vector iff its residual after two
/// sweeps against the already accepted vectors exceeds
/// `max(rel_rank_tol * max_col_norm, abs_floor)`.
pub fn gram_schmidt(a: &Matrix, tol: &Tolerance) -> Result<OrthonormalBasis> {
    check_finite(a)?;
    let n = a.nrows();
    let scale = (0..a.ncols())
        .map(|j| a.column(j).norm())
        .fold(0.0f64, f64::max);
    let cutoff = (tol.rel_rank_tol * scale).max(tol.abs_floor);

    let mut accepted: Vec<Vec<f64>> = Vec::new();
    let mut sources = Vec::new();
    let mut v = vec![0.0; n];
    for j in 0..a.ncols() {
        v.copy_from_slice(a.column(j).as_slice());
        if v.iter().all(|x| *x == 0.0) {
            continue;
        }
        for _ in 0..2 {
            for q in &accepted {
                let d = dot(q, &v);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= d * qi;
                }
            }
        }
        let norm = dot(&v, &v).sqrt();
        if norm > cutoff {
            accepted.push(v.iter().map(|x| x / norm).collect());
            sources.push(j);
        }
    }
    Ok(OrthonormalBasis::from_columns(n, &accepted, sources))
}

/// `Q(Q'v)` for every column of `v`.
pub fn project(basis: &OrthonormalBasis, v: &Matrix) -> Result<Matrix> {
    if basis.ambient() != v.nrows() {
        return Err(Error::dim(format!(
            "basis has {} rows, operand has {}",
            basis.ambient(),
            v.nrows()
        )));
    }
    if basis.is_empty() {
        return Ok(Matrix::zeros(v.nrows(), v.ncols()));
    }
    let q = basis.carrier();
    Ok(q * (q.transpose() * v))
}

/// Column-wise concatenation. All inputs must share a row count.
pub fn hcat(blocks: &[&Matrix]) -> Result<Matrix> {
    let n = match blocks.first() {
        Some(b) => b.nrows(),
        None => return Err(Error::dim("nothing to concatenate")),
    };
    if blocks.iter().any(|b| b.nrows() != n) {
        return Err(Error::dim("row counts differ in concatenation"));
    }
    let total: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = Matrix::zeros(n, total);
    let mut at = 0;
    for b in blocks {
        out.columns_mut(at, b.ncols()).copy_from(*b);
        at += b.ncols();
    }
    Ok(out)
}

/// Basis of `span(a)^⊥ ∩ span(x)`: the vectors that columns of `x` add to
/// a Gram–Schmidt pass over `(a, x)`. Source indices refer to columns of `x`.
pub fn complement_within(a: &Matrix, x: &Matrix, tol: &Tolerance) -> Result<OrthonormalBasis> {
    if a.nrows() != x.nrows() {
        return Err(Error::dim(format!(
            "complement_within: {} rows vs {} rows",
            a.nrows(),
            x.nrows()
        )));
    }
    let both = hcat(&[a, x])?;
    let full = gram_schmidt(&both, tol)?;
    let offset = a.ncols();
    let keep: Vec<usize> = full
        .source_columns()
        .iter()
        .enumerate()
        .filter(|(_, &s)| s >= offset)
        .map(|(k, _)| k)
        .collect();
    let carrier = full.carrier().select_columns(keep.iter());
    let sources = keep.iter().map(|&k| full.source_columns()[k] - offset).collect();
    Ok(OrthonormalBasis {
        carrier,
        source_columns: sources,
    })
}

/// `span(a) ∩ span(b)` from the principal angles between the two subspaces.
///
/// The singular values of `(I - P_b) Q_a` are the sines of the principal
/// angles; right singular vectors whose sine is at most `angle_tol` are
/// mapped back through `Q_a`.
pub fn intersect(
    a: &OrthonormalBasis,
    b: &OrthonormalBasis,
    tol: &Tolerance,
) -> Result<OrthonormalBasis> {
    if a.ambient() != b.ambient() {
        return Err(Error::dim("intersect: ambient dimensions differ"));
    }
    let n = a.ambient();
    if a.is_empty() || b.is_empty() {
        return Ok(OrthonormalBasis::empty(n));
    }
    let away = a.carrier() - project(b, a.carrier())?;
    let svd = away.svd(false, true);
    let v_t = svd
        .v_t
        .ok_or_else(|| Error::Numerical("SVD did not return singular vectors".into()))?;
    let mut picked: Vec<(usize, f64)> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= tol.angle_tol)
        .map(|(k, &s)| (k, s))
        .collect();
    if picked.is_empty() {
        return Ok(OrthonormalBasis::empty(n));
    }
    picked.sort_by(|x, y| x.1.total_cmp(&y.1).then(x.0.cmp(&y.0)));
    let dirs = v_t.select_rows(picked.iter().map(|(k, _)| k)).transpose();
    let raw = a.carrier() * dirs;
    // Clean up the last bits of orthogonality lost in the SVD.
    gram_schmidt(&raw, tol)
}

pub fn rank(a: &Matrix, tol: &Tolerance) -> Result<usize> {
    Ok(gram_schmidt(a, tol)?.dim())
}

/// Largest principal angle between two subspaces, in radians.
///
/// Computed from sines (`‖(I - P_a) Q_b‖₂`) so angles near zero are resolved
/// to roundoff. Subspaces of different dimension are `π/2` apart.
pub fn max_principal_angle(a: &OrthonormalBasis, b: &OrthonormalBasis) -> Result<f64> {
    if a.ambient() != b.ambient() {
        return Err(Error::dim("principal angle: ambient dimensions differ"));
    }
    if a.dim() != b.dim() {
        return Ok(std::f64::consts::FRAC_PI_2);
    }
    if a.is_empty() {
        return Ok(0.0);
    }
    let residual = b.carrier() - project(a, b.carrier())?;
    let s = residual
        .singular_values()
        .iter()
        .copied()
        .fold(0.0f64, f64::max);
    Ok(s.min(1.0).asin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn identity_is_its_own_basis() {
        let b = gram_schmidt(&Matrix::identity(3, 3), &tol()).unwrap();
        assert_eq!(b.source_columns(), &[0, 1, 2]);
        assert!((b.carrier() - Matrix::identity(3, 3)).abs().max() < 1e-15);
    }

    #[test]
    fn duplicate_columns_give_rank_one() {
        let b = gram_schmidt(&dmatrix![1.0, 1.0; 1.0, 1.0], &tol()).unwrap();
        assert_eq!(b.dim(), 1);
        assert_eq!(b.source_columns(), &[0]);
    }

    #[test]
    fn zero_matrix_has_rank_zero() {
        assert_eq!(rank(&Matrix::zeros(4, 3), &tol()).unwrap(), 0);
    }

    #[test]
    fn non_finite_input_is_rejected() {
        let mut a = Matrix::identity(2, 2);
        a[(1, 0)] = f64::NAN;
        assert!(matches!(
            gram_schmidt(&a, &tol()),
            Err(Error::NonFinite { row: 1, col: 0 })
        ));
    }

    #[test]
    fn project_onto_mean() {
        let basis = gram_schmidt(&Matrix::from_element(4, 1, 0.5), &tol()).unwrap();
        let v = Matrix::from_column_slice(4, 1, &[1.0, 2.0, 3.0, 4.0]);
        let p = project(&basis, &v).unwrap();
        for i in 0..4 {
            assert!((p[(i, 0)] - 2.5).abs() < 1e-14);
        }
    }

    #[test]
    fn project_onto_trivial_and_full_space() {
        let v = Matrix::from_column_slice(3, 1, &[1.0, -2.0, 5.0]);
        let p0 = project(&OrthonormalBasis::empty(3), &v).unwrap();
        assert_eq!(p0, Matrix::zeros(3, 1));
        let full = gram_schmidt(&Matrix::identity(3, 3), &tol()).unwrap();
        assert!((project(&full, &v).unwrap() - &v).abs().max() < 1e-15);
    }

    #[test]
    fn project_rejects_dimension_mismatch() {
        let b = OrthonormalBasis::empty(3);
        assert!(project(&b, &Matrix::zeros(4, 1)).is_err());
    }

    #[test]
    fn complement_of_self_is_empty() {
        let a = dmatrix![1.0, 0.0; 1.0, 1.0; 0.0, 2.0];
        assert!(complement_within(&a, &a, &tol()).unwrap().is_empty());
    }

    #[test]
    fn contrast_space_complements_ones() {
        let n = 5;
        let ones = Matrix::from_element(n, 1, 1.0);
        let c = complement_within(&ones, &Matrix::identity(n, n), &tol()).unwrap();
        assert_eq!(c.dim(), n - 1);
        assert!((ones.transpose() * c.carrier()).abs().max() < 1e-12);
        assert!(c.orthonormality_defect() < 1e-12);
    }

    #[test]
    fn intersect_cases() {
        let xy = gram_schmidt(&dmatrix![1.0, 0.0; 0.0, 1.0; 0.0, 0.0], &tol()).unwrap();
        let yz = gram_schmidt(&dmatrix![0.0, 0.0; 1.0, 0.0; 0.0, 1.0], &tol()).unwrap();
        let i = intersect(&xy, &yz, &tol()).unwrap();
        assert_eq!(i.dim(), 1);
        assert!((i.carrier()[(1, 0)].abs() - 1.0).abs() < 1e-12);

        let same = intersect(&xy, &xy, &tol()).unwrap();
        assert_eq!(same.dim(), 2);

        let z = gram_schmidt(&dmatrix![0.0; 0.0; 1.0], &tol()).unwrap();
        assert!(intersect(&xy, &z, &tol()).unwrap().is_empty());
    }

    #[test]
    fn principal_angle_of_rotated_line() {
        let a = gram_schmidt(&dmatrix![1.0; 0.0], &tol()).unwrap();
        let t = 0.3f64;
        let b = gram_schmidt(&dmatrix![t.cos(); t.sin()], &tol()).unwrap();
        assert!((max_principal_angle(&a, &b).unwrap() - t).abs() < 1e-14);
        assert_eq!(max_principal_angle(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn tolerance_must_be_positive() {
        assert!(Tolerance::new(0.0, 1e-12).is_err());
        assert!(Tolerance::new(1e-10, -1.0).is_err());
    }
}
