//! Polynomials in `m` complex variables and basis families of `𝒫ₙ`.

mod basis;
mod multi_index;
mod polynomial;

pub use basis::{
    build_orthonormal_basis, gram_matrix, log_decompose, normalize_sup, weighted_sups, BasisFamily, CoefficientVector, Normalization,
    WeightedNodes,
};
pub use multi_index::{monomials_up_to, space_dimension, MultiIndex};
pub use polynomial::{horner, log_abs_eval, Polynomial};
