use std::ops::Range;

use crate::design::{
    contains, covariate_incidence, effect_columns, incidence, strictly_contains, CellCounts,
    Dataset, EffectId, EffectSet, FactorLayout,
};
use crate::error::{Error, Result};
use crate::formula::{ModelSpec, Submodel, Term};
use crate::numeric::{hcat, Matrix};

/// Columns of `X` produced by one model term.
#[derive(Debug, Clone, PartialEq)]
pub struct TermBlock {
    pub term: Term,
    pub columns: Range<usize>,
    /// `E_j` for the term (a• × cols).
    pub effect_columns: Matrix,
}

/// Everything derived from layout, model and data before looking at `y`.
///
/// `X = concat_i K_i E_{J_i}` with blocks in formula order, where `K_0 = K`
/// and `K_i = Diag(x_i) K` for covariate `i`.
#[derive(Debug, Clone)]
pub struct DesignContext {
    layout: FactorLayout,
    spec: ModelSpec,
    counts: CellCounts,
    incidences: Vec<Matrix>,
    x: Matrix,
    blocks: Vec<TermBlock>,
}

pub fn build_context(
    layout: &FactorLayout,
    spec: &ModelSpec,
    data: &Dataset,
) -> Result<DesignContext> {
    if spec.factor_names() != layout.names() {
        return Err(Error::input(format!(
            "model factors {:?} do not match layout factors {:?}",
            spec.factor_names(),
            layout.names()
        )));
    }
    if data.n() == 0 {
        return Err(Error::NoObservations);
    }
    let (k0, counts) = incidence(layout, data.cells())?;
    let mut incidences = vec![k0];
    for name in spec.covariate_names() {
        let x = data
            .covariate(name)
            .ok_or_else(|| Error::MissingColumn(name.clone()))?;
        incidences.push(covariate_incidence(&incidences[0], x)?);
    }

    let mut blocks = Vec::with_capacity(spec.terms().len());
    let mut parts = Vec::with_capacity(spec.terms().len());
    let mut at = 0;
    for term in spec.terms() {
        let e = effect_columns(layout, &term.effect)?;
        let part = &incidences[term.submodel] * &e;
        let cols = part.ncols();
        blocks.push(TermBlock {
            term: term.clone(),
            columns: at..at + cols,
            effect_columns: e,
        });
        parts.push(part);
        at += cols;
    }
    let x = hcat(&parts.iter().collect::<Vec<_>>())?;
    Ok(DesignContext {
        layout: layout.clone(),
        spec: spec.clone(),
        counts,
        incidences,
        x,
        blocks,
    })
}

impl DesignContext {
    pub fn layout(&self) -> &FactorLayout {
        &self.layout
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn counts(&self) -> &CellCounts {
        &self.counts
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    /// Full model matrix.
    pub fn x(&self) -> &Matrix {
        &self.x
    }

    pub fn blocks(&self) -> &[TermBlock] {
        &self.blocks
    }

    /// `K_i` for sub-model `i` (`K` itself for the intercept sub-model).
    pub fn incidence(&self, submodel: Submodel) -> &Matrix {
        &self.incidences[submodel]
    }

    pub fn block_of(&self, target: &Term) -> Option<&TermBlock> {
        self.blocks.iter().find(|b| b.term == *target)
    }

    /// Columns of `X` listed by index.
    pub fn columns(&self, idx: &[usize]) -> Matrix {
        self.x.select_columns(idx.iter())
    }

    /// `E_{J_i}`: the dummy blocks of one sub-model (a• × cols).
    pub fn submodel_effect_columns(&self, submodel: Submodel) -> Result<Matrix> {
        let blocks: Vec<&Matrix> = self
            .blocks
            .iter()
            .filter(|b| b.term.submodel == submodel)
            .map(|b| &b.effect_columns)
            .collect();
        if blocks.is_empty() {
            return Ok(Matrix::zeros(self.layout.cells(), 0));
        }
        hcat(&blocks)
    }

    /// Lift coefficient rows on `η_i` to rows on `β`: `c'η_i = (c'E_i)β_i`.
    pub fn lift_cell_rows(&self, submodel: Submodel, rows: &Matrix) -> Result<Matrix> {
        if rows.ncols() != self.layout.cells() {
            return Err(Error::dim(format!(
                "cell-mean rows need {} columns, got {}",
                self.layout.cells(),
                rows.ncols()
            )));
        }
        let mut g = Matrix::zeros(rows.nrows(), self.x.ncols());
        for b in self.blocks.iter().filter(|b| b.term.submodel == submodel) {
            let part = rows * &b.effect_columns;
            g.columns_mut(b.columns.start, b.columns.len()).copy_from(&part);
        }
        Ok(g)
    }
}

/// Column split `X = (X0, X1, X2)` dictated by a target effect.
///
/// `X1` is the target's block; `X2` holds blocks of the same sub-model whose
/// effect strictly contains the target; `X0` everything else, including all
/// blocks of other sub-models.
#[derive(Debug, Clone)]
pub struct EffectPartition {
    pub target: Term,
    pub x0_columns: Vec<usize>,
    pub x1_columns: Vec<usize>,
    pub x2_columns: Vec<usize>,
    pub x0: Matrix,
    pub x1: Matrix,
    pub x2: Matrix,
    /// Same-sub-model effects not containing the target (`J_0` within the sub-model).
    pub non_containing: EffectSet,
    /// Same-sub-model effects strictly containing the target (`J_2`).
    pub containing: EffectSet,
}

pub fn partition(ctx: &DesignContext, target: &Term) -> Result<EffectPartition> {
    if ctx.block_of(target).is_none() {
        return Err(Error::input(format!(
            "effect `{}` is not in the model",
            ctx.spec().term_label(target)
        )));
    }
    let mut x0 = Vec::new();
    let mut x1 = Vec::new();
    let mut x2 = Vec::new();
    let mut non_containing = EffectSet::new();
    let mut containing = EffectSet::new();
    for b in ctx.blocks() {
        let cols = b.columns.clone();
        if b.term.submodel != target.submodel {
            x0.extend(cols);
        } else if b.term.effect == target.effect {
            x1.extend(cols);
        } else if strictly_contains(&b.term.effect, &target.effect)? {
            x2.extend(cols);
            containing.insert(b.term.effect.clone());
        } else {
            debug_assert!(!contains(&b.term.effect, &target.effect)?);
            x0.extend(cols);
            non_containing.insert(b.term.effect.clone());
        }
    }
    Ok(EffectPartition {
        target: target.clone(),
        x0: ctx.columns(&x0),
        x1: ctx.columns(&x1),
        x2: ctx.columns(&x2),
        x0_columns: x0,
        x1_columns: x1,
        x2_columns: x2,
        non_containing,
        containing,
    })
}

/// Convenience: the intercept-sub-model term for an effect tuple.
pub fn factor_term(effect: EffectId) -> Term {
    Term {
        submodel: 0,
        effect,
    }
}
