//! Exact coefficient arithmetic: finite fields, truncated Witt rings, and
//! the graded linear algebra built on top of them.

pub mod field;
pub mod homology;
pub mod matrix;
pub mod witt;

pub use field::{build_field, FiniteFieldCtx, MAX_D};
pub use homology::{CochainComplex, HomologySlice};
pub use matrix::{
    canonical_basis, leading_index, nullspace, quotient_reps, rank_kernel_cokernel, rref,
    solve_in_span, witt_snf, witt_valuation, DegreeLinReport, GradedMatrix, WittSnfReport,
};
pub use witt::{build_witt, galois_norm, WittElt, WittRingCtx};
