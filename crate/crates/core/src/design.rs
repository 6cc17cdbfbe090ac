//! Factorial design algebra: effect tuples and containment, dummy-variable
//! blocks `E_j`, ANOVA projectors `H_j`, and cell incidence matrices.
//!
//! Cells are ordered lexicographically with the last factor varying fastest,
//! which is the row order produced by the Kronecker products below.

use std::fmt;

use crate::error::{Error, Result};
use crate::numeric::{hcat, Matrix};

/// Factors and their level counts. Level labels default to `1..=a_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorLayout {
    names: Vec<String>,
    labels: Vec<Vec<String>>,
}

impl FactorLayout {
    pub fn new<S: Into<String>>(names: Vec<S>, levels: Vec<usize>) -> Result<Self> {
        let labels = levels
            .iter()
            .map(|&a| (1..=a).map(|l| l.to_string()).collect())
            .collect();
        Self::with_labels(names, labels)
    }

    pub fn with_labels<S: Into<String>>(names: Vec<S>, labels: Vec<Vec<String>>) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(Error::input("a layout needs at least one factor"));
        }
        if names.len() != labels.len() {
            return Err(Error::dim("one level list per factor"));
        }
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(Error::input(format!("duplicate factor name `{n}`")));
            }
        }
        if let Some(i) = labels.iter().position(|l| l.is_empty()) {
            return Err(Error::input(format!("factor `{}` has no levels", names[i])));
        }
        Ok(Self { names, labels })
    }

    pub fn factors(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn levels(&self) -> Vec<usize> {
        self.labels.iter().map(Vec::len).collect()
    }

    pub fn level_labels(&self) -> &[Vec<String>] {
        &self.labels
    }

    /// Number of cells `a• = ∏ a_k`.
    pub fn cells(&self) -> usize {
        self.labels.iter().map(Vec::len).product()
    }

    /// Cell index for zero-based per-factor levels.
    pub fn cell_index(&self, levels: &[usize]) -> Result<usize> {
        if levels.len() != self.factors() {
            return Err(Error::dim("one level per factor"));
        }
        let mut idx = 0;
        for (k, (&l, lab)) in levels.iter().zip(&self.labels).enumerate() {
            if l >= lab.len() {
                return Err(Error::input(format!(
                    "level {l} out of range for factor `{}`",
                    self.names[k]
                )));
            }
            idx = idx * lab.len() + l;
        }
        Ok(idx)
    }

    /// Zero-based per-factor levels of cell `idx`.
    pub fn cell_levels(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.factors()];
        for k in (0..self.factors()).rev() {
            let a = self.labels[k].len();
            out[k] = idx % a;
            idx /= a;
        }
        out
    }

    pub fn factor_position(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

/// Binary f-tuple naming an effect; bit `k` set means factor `k` takes part.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EffectId(Vec<bool>);

impl EffectId {
    pub fn new(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    pub fn intercept(f: usize) -> Self {
        Self(vec![false; f])
    }

    pub fn full(f: usize) -> Self {
        Self(vec![true; f])
    }

    /// Parse a string such as `"101"`.
    pub fn parse(bits: &str) -> Result<Self> {
        bits.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::input(format!("`{bits}` is not a binary tuple"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }

    pub fn from_factors(f: usize, factors: &[usize]) -> Self {
        let mut bits = vec![false; f];
        for &k in factors {
            bits[k] = true;
        }
        Self(bits)
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_intercept(&self) -> bool {
        self.0.iter().all(|b| !b)
    }

    /// Indices of participating factors.
    pub fn factors(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&k| self.0[k]).collect()
    }

    /// Term name from factor names: `A:B`, or `(Intercept)` for `0…0`.
    pub fn label(&self, names: &[String]) -> String {
        if self.is_intercept() {
            "(Intercept)".to_string()
        } else {
            self.factors()
                .iter()
                .map(|&k| names[k].as_str())
                .collect::<Vec<_>>()
                .join(":")
        }
    }

    /// Innate df `∏_{k in j} (a_k - 1)`, the trace of `H_j`.
    pub fn innate_df(&self, levels: &[usize]) -> usize {
        self.factors().iter().map(|&k| levels[k] - 1).product()
    }
}

impl fmt::Display for EffectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// `j2 ⪰ j1`: every factor of `j1` also appears in `j2`.
pub fn contains(j2: &EffectId, j1: &EffectId) -> Result<bool> {
    if j2.len() != j1.len() {
        return Err(Error::dim(format!("tuples {j2} and {j1} differ in length")));
    }
    Ok(j2.0.iter().zip(&j1.0).all(|(a, b)| *a >= *b))
}

/// `j2 ≻ j1`: containment excluding equality.
pub fn strictly_contains(j2: &EffectId, j1: &EffectId) -> Result<bool> {
    Ok(contains(j2, j1)? && j2 != j1)
}

/// All `2^f` tuples in lexicographic order.
pub fn all_effects(f: usize) -> Vec<EffectId> {
    (0..1usize << f)
        .map(|m| EffectId((0..f).map(|k| m >> (f - 1 - k) & 1 == 1).collect()))
        .collect()
}

/// Ordered set of effects. Order is insertion order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EffectSet(Vec<EffectId>);

impl EffectSet {
    pub fn new() -> Self {
        Self(Vec::new())
    }

    /// Returns false (and leaves the set unchanged) for a duplicate.
    pub fn insert(&mut self, j: EffectId) -> bool {
        if self.0.contains(&j) {
            false
        } else {
            self.0.push(j);
            true
        }
    }

    pub fn remove(&mut self, j: &EffectId) -> bool {
        let before = self.0.len();
        self.0.retain(|x| x != j);
        self.0.len() != before
    }

    pub fn contains(&self, j: &EffectId) -> bool {
        self.0.contains(j)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, EffectId> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[EffectId] {
        &self.0
    }
}

impl FromIterator<EffectId> for EffectSet {
    fn from_iter<I: IntoIterator<Item = EffectId>>(iter: I) -> Self {
        let mut s = EffectSet::new();
        for j in iter {
            s.insert(j);
        }
        s
    }
}

impl<'a> IntoIterator for &'a EffectSet {
    type Item = &'a EffectId;
    type IntoIter = std::slice::Iter<'a, EffectId>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// `J̄`: every tuple contained in at least one member of `s`, lexicographic.
pub fn closure(s: &EffectSet) -> EffectSet {
    let Some(first) = s.iter().next() else {
        return EffectSet::new();
    };
    all_effects(first.len())
        .into_iter()
        .filter(|j| s.iter().any(|m| contains(m, j).unwrap_or(false)))
        .collect()
}

/// Per-cell observation counts in cell order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellCounts(Vec<usize>);

impl CellCounts {
    pub fn new(counts: Vec<usize>) -> Result<Self> {
        if counts.iter().sum::<usize>() == 0 {
            return Err(Error::NoObservations);
        }
        Ok(Self(counts))
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn empty_cells(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&l| self.0[l] == 0).collect()
    }

    pub fn is_balanced(&self) -> bool {
        self.0.windows(2).all(|w| w[0] == w[1])
    }
}

/// Observations: cell assignment, covariate columns and response.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    cells: Vec<usize>,
    covariates: Vec<(String, Vec<f64>)>,
    response: Vec<f64>,
}

impl Dataset {
    pub fn new(
        cells: Vec<usize>,
        covariates: Vec<(String, Vec<f64>)>,
        response: Vec<f64>,
    ) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::NoObservations);
        }
        if response.len() != cells.len() {
            return Err(Error::dim("response length differs from observation count"));
        }
        if let Some(i) = response.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: i, col: 0 });
        }
        for (name, x) in &covariates {
            if x.len() != cells.len() {
                return Err(Error::dim(format!("covariate `{name}` has the wrong length")));
            }
        }
        Ok(Self {
            cells,
            covariates,
            response,
        })
    }

    /// Observations given cell by cell, each cell a list of responses.
    pub fn from_cells(cell_responses: &[Vec<f64>]) -> Result<Self> {
        let mut cells = Vec::new();
        let mut y = Vec::new();
        for (l, ys) in cell_responses.iter().enumerate() {
            for &v in ys {
                cells.push(l);
                y.push(v);
            }
        }
        Self::new(cells, Vec::new(), y)
    }

    pub fn n(&self) -> usize {
        self.cells.len()
    }

    pub fn cells(&self) -> &[usize] {
        &self.cells
    }

    pub fn response(&self) -> &[f64] {
        &self.response
    }

    pub fn covariates(&self) -> &[(String, Vec<f64>)] {
        &self.covariates
    }

    pub fn covariate(&self, name: &str) -> Option<&[f64]> {
        self.covariates
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, x)| x.as_slice())
    }

    pub fn with_response(&self, response: Vec<f64>) -> Result<Self> {
        Self::new(self.cells.clone(), self.covariates.clone(), response)
    }
}

fn ones(a: usize) -> Matrix {
    Matrix::from_element(a, 1, 1.0)
}

/// `U_a = (1/a) 1 1'`.
pub fn mean_projector(a: usize) -> Matrix {
    Matrix::from_element(a, a, 1.0 / a as f64)
}

/// `S_a = I - U_a`.
pub fn centering_projector(a: usize) -> Matrix {
    Matrix::identity(a, a) - mean_projector(a)
}

fn kron_over(levels: &[usize], j: &EffectId, pick: impl Fn(usize, bool) -> Matrix) -> Matrix {
    let mut out = Matrix::from_element(1, 1, 1.0);
    for (&a, &bit) in levels.iter().zip(j.bits()) {
        out = out.kronecker(&pick(a, bit));
    }
    out
}

fn check_tuple(layout: &FactorLayout, j: &EffectId) -> Result<()> {
    if j.len() != layout.factors() {
        return Err(Error::dim(format!(
            "tuple {j} has {} bits, layout has {} factors",
            j.len(),
            layout.factors()
        )));
    }
    Ok(())
}

/// `E_j = ⊗_k (1_{a_k} if j_k = 0, I_{a_k} if j_k = 1)`.
pub fn effect_columns(layout: &FactorLayout, j: &EffectId) -> Result<Matrix> {
    check_tuple(layout, j)?;
    Ok(kron_over(&layout.levels(), j, |a, bit| {
        if bit {
            Matrix::identity(a, a)
        } else {
            ones(a)
        }
    }))
}

/// `E_J`: the `E_j` blocks of `s` side by side, in set order.
pub fn model_columns(layout: &FactorLayout, s: &EffectSet) -> Result<Matrix> {
    if s.is_empty() {
        return Err(Error::input("model has no effects"));
    }
    let blocks = s
        .iter()
        .map(|j| effect_columns(layout, j))
        .collect::<Result<Vec<_>>>()?;
    hcat(&blocks.iter().collect::<Vec<_>>())
}

/// `H_j = ⊗_k (U_{a_k} if j_k = 0, S_{a_k} if j_k = 1)`.
pub fn anova_projector(layout: &FactorLayout, j: &EffectId) -> Result<Matrix> {
    check_tuple(layout, j)?;
    Ok(kron_over(&layout.levels(), j, |a, bit| {
        if bit {
            centering_projector(a)
        } else {
            mean_projector(a)
        }
    }))
}

/// `Σ H_j` over a set of tuples.
pub fn anova_projector_sum(layout: &FactorLayout, s: &EffectSet) -> Result<Matrix> {
    let m = layout.cells();
    let mut out = Matrix::zeros(m, m);
    for j in s {
        out += anova_projector(layout, j)?;
    }
    Ok(out)
}

/// Incidence matrix `K` (n × a•, one 1 per row) and the per-cell counts.
pub fn incidence(layout: &FactorLayout, assignments: &[usize]) -> Result<(Matrix, CellCounts)> {
    let cells = layout.cells();
    let mut k = Matrix::zeros(assignments.len(), cells);
    let mut counts = vec![0; cells];
    for (t, &l) in assignments.iter().enumerate() {
        if l >= cells {
            return Err(Error::input(format!(
                "observation {t} assigned to cell {l}, layout has {cells}"
            )));
        }
        k[(t, l)] = 1.0;
        counts[l] += 1;
    }
    Ok((k, CellCounts::new(counts)?))
}

/// `Diag(x) K`.
pub fn covariate_incidence(k0: &Matrix, x: &[f64]) -> Result<Matrix> {
    if x.len() != k0.nrows() {
        return Err(Error::dim(format!(
            "covariate has {} values for {} observations",
            x.len(),
            k0.nrows()
        )));
    }
    if let Some(t) = x.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { row: t, col: 0 });
    }
    let mut out = k0.clone();
    for (t, &xt) in x.iter().enumerate() {
        out.row_mut(t).scale_mut(xt);
    }
    Ok(out)
}
