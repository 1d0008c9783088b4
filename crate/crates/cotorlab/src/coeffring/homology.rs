//! Cochain complexes of graded vector spaces and their homology.
//!
//! A [`CochainComplex`] stores the terms `C^0 -> C^1 -> ...` of a complex
//! of graded vector spaces together with degree-preserving differentials.
//! Homology is computed per cohomological index and per internal degree;
//! representatives are echelonized kernel vectors reduced modulo the image,
//! so they are canonical for the given basis ordering.

use crate::coeffring::field::FiniteFieldCtx;
use crate::coeffring::matrix::{
    quotient_reps, rank_kernel_cokernel, GradedMatrix,
};
use crate::error::{Error, Result};
use crate::par::ExecMode;

/// A nonnegatively indexed cochain complex of graded vector spaces.
#[derive(Debug, Clone)]
pub struct CochainComplex {
    field: FiniteFieldCtx,
    /// dims[s][n] = dimension of the degree-n slice of C^s.
    dims: Vec<Vec<usize>>,
    /// diffs[s]: C^s -> C^{s+1}. One shorter than `dims`.
    diffs: Vec<GradedMatrix>,
}

/// Homology at one (cohomological index, internal degree) pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomologySlice {
    pub dim: usize,
    /// Echelonized representatives in the coordinates of the cochain term.
    pub reps: Vec<Vec<u64>>,
}

impl CochainComplex {
    /// Builds a complex after validating that differentials chain and
    /// square to zero. `dims` must be one longer than `diffs`.
    pub fn new(
        field: FiniteFieldCtx,
        dims: Vec<Vec<usize>>,
        diffs: Vec<GradedMatrix>,
    ) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::ShapeMismatch("complex needs at least one term".into()));
        }
        if diffs.len() + 1 != dims.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} terms need {} differentials, got {}",
                dims.len(),
                dims.len() - 1,
                diffs.len()
            )));
        }
        for (s, d) in diffs.iter().enumerate() {
            for n in 0..dims[s].len().max(d.degrees()) {
                if d.src_dim(n) != dims[s].get(n).copied().unwrap_or(0) {
                    return Err(Error::ShapeMismatch(format!(
                        "differential {s} source dim mismatch at degree {n}"
                    )));
                }
                if d.tgt_dim(n) != dims[s + 1].get(n).copied().unwrap_or(0) {
                    return Err(Error::ShapeMismatch(format!(
                        "differential {s} target dim mismatch at degree {n}"
                    )));
                }
            }
        }
        let complex = CochainComplex { field, dims, diffs };
        complex.check_dd()?;
        Ok(complex)
    }

    pub fn field(&self) -> &FiniteFieldCtx {
        &self.field
    }

    /// Number of stored terms.
    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn dims(&self, s: usize) -> &[usize] {
        &self.dims[s]
    }

    pub fn differential(&self, s: usize) -> &GradedMatrix {
        &self.diffs[s]
    }

    /// Verifies d . d = 0 for every composable pair; the error names the
    /// first offending cohomological index and internal degree.
    pub fn check_dd(&self) -> Result<()> {
        for s in 0..self.diffs.len().saturating_sub(1) {
            let dd = self.diffs[s + 1].compose(&self.diffs[s])?;
            if let Some(n) = dd.first_nonzero_degree() {
                return Err(Error::Internal(format!(
                    "differential does not square to zero at index {s}, degree {n}"
                )));
            }
        }
        Ok(())
    }

    /// Homology H^s in every internal degree, for `0 <= s < self.len()`.
    /// The outer index is s, the inner index the internal degree.
    pub fn homology(&self, mode: ExecMode) -> Vec<Vec<HomologySlice>> {
        let reports: Vec<_> = self
            .diffs
            .iter()
            .map(|d| rank_kernel_cokernel(d, mode))
            .collect();
        let mut out = Vec::with_capacity(self.dims.len());
        for s in 0..self.dims.len() {
            let degs = self.dims[s].len();
            let mut slices = Vec::with_capacity(degs);
            for n in 0..degs {
                let dim_n = self.dims[s][n];
                // Kernel of the outgoing differential; the full space when
                // this is the last stored term.
                let kernel: Vec<Vec<u64>> = if s < self.diffs.len() {
                    reports[s][n].kernel.clone()
                } else {
                    (0..dim_n)
                        .map(|i| {
                            let mut e = vec![0u64; dim_n];
                            e[i] = 1;
                            e
                        })
                        .collect()
                };
                let image: Vec<Vec<u64>> = if s > 0 {
                    reports[s - 1][n].image.clone()
                } else {
                    Vec::new()
                };
                let reps = quotient_reps(&self.field, &kernel, &image);
                slices.push(HomologySlice { dim: reps.len(), reps });
            }
            out.push(slices);
        }
        out
    }
}
