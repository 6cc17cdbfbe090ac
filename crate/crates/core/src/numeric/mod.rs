//! Numeric core: orthonormal bases, projections, subspace operations and the
//! F tail probability used for p-values.

mod f_dist;
mod subspace;

pub use f_dist::{f_tail, regularized_beta};
pub use subspace::{
    complement_within, gram_schmidt, hcat, intersect, max_principal_angle, project, rank, Matrix,
    OrthonormalBasis, Tolerance,
};
