//! Sums-of-squares engine.
//!
//! A [`DesignContext`] fixes layout, model and data. Each analyzed term is
//! split into `(X0, X1, X2)` by [`partition`], turned into a Type III
//! subspace by [`type3_construction`], and described on the cell-mean scale
//! by [`h_star`], [`estimable_part`] and [`tested_contrasts`].

mod context;
mod contrasts;
mod sums;
mod table;

pub use context::{build_context, factor_term, partition, DesignContext, EffectPartition, TermBlock};
pub use contrasts::{
    classify_contrast, estimable_part, h_star, identity_residuals, normalize_sign_scale, reduced_echelon_rows,
    nu_one_given_zero, snap_rational, tested_contrasts, tested_span, Classification, Contrast,
    ContrastOptions, HStar, IdentityResiduals, TestedContrasts,
};
pub use sums::{
    fit, rmfm_ss, type1_table, type2_basis, type2_ss, type3_construction, type3_ss, FittedModel,
    HypothesisSpec, SequentialEntry, TypeIIIConstruction,
};
pub use table::{anova_table, AnalysisOptions, AnovaReport, AnovaRow, AnovaTable, DfDetail, SsType};
