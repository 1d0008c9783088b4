//! Derived cotensor groups: cohomology of the cobar complex.

use crate::coalgebra::cobar::{cobar, CobarComplex};
use crate::coalgebra::{GradedCoalgebra, GradedComodule};
use crate::coeffring::homology::HomologySlice;
use crate::coeffring::matrix::{canonical_basis, solve_in_span};
use crate::error::{Error, Result};
use crate::par::ExecMode;

/// Bigraded cohomology of the cobar complex of `(M, C, N)`.
///
/// `dims[s][n]` and `slices[s][n]` are reported for `s <= s_reported` and
/// `n < window`; representatives live in the coordinates of the cobar word
/// basis at `(s, n)`.
#[derive(Debug)]
pub struct CotorReport {
    pub window: usize,
    pub s_reported: usize,
    pub dims: Vec<Vec<usize>>,
    pub slices: Vec<Vec<HomologySlice>>,
    pub cobar: CobarComplex,
}

/// Cohomology of the cobar complex for all `0 <= s <= window`, internal
/// degrees below `window`. The zeroth row is the cotensor product.
///
/// One cochain level beyond the reported range is built internally so that
/// the top reported row has its outgoing differential available.
pub fn cotor(
    m: &GradedComodule,
    c: &GradedCoalgebra,
    n: &GradedComodule,
    window: usize,
    mode: ExecMode,
) -> Result<CotorReport> {
    let s_reported = window;
    let cx = cobar(m, c, n, s_reported + 1, window)?;
    let homology = cx.complex.homology(mode);
    let slices: Vec<Vec<HomologySlice>> = homology.into_iter().take(s_reported + 1).collect();
    let dims = slices
        .iter()
        .map(|row| row.iter().map(|h| h.dim).collect())
        .collect();
    Ok(CotorReport { window, s_reported, dims, slices, cobar: cx })
}

impl CotorReport {
    /// Nonzero bigraded cells as `(s, n, dim)` rows, s-major.
    pub fn nonzero_cells(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for (s, row) in self.dims.iter().enumerate() {
            for (n, &d) in row.iter().enumerate() {
                if d > 0 {
                    out.push((s, n, d));
                }
            }
        }
        out
    }

    /// Total dimension across the reported window.
    pub fn total_dim(&self) -> usize {
        self.dims.iter().flatten().sum()
    }

    /// Coordinates of a cocycle's cohomology class in the echelonized
    /// representative basis at `(s, n)`.
    ///
    /// Errors if the vector is not a cocycle; returns `Ok(None)` if it is a
    /// cocycle whose class falls outside the span of the representatives
    /// (impossible when the inputs come from this report's own complex).
    pub fn class_coordinates(
        &self,
        s: usize,
        n: usize,
        vector: &[u64],
    ) -> Result<Option<Vec<u64>>> {
        let field = self.cobar.complex.field().clone();
        if s > self.s_reported {
            return Err(Error::InvalidParameter(format!(
                "cohomological degree {s} beyond reported range"
            )));
        }
        // Cocycle check against the outgoing differential.
        let out = self.cobar.complex.differential(s).apply(n, vector);
        if out.iter().any(|&x| x != 0) {
            return Err(Error::InvalidParameter(
                "class_coordinates called on a non-cocycle".into(),
            ));
        }
        // Every cocycle splits uniquely as boundary + combination of the
        // stored representatives: solve against their concatenation and
        // read off the representative block.
        let mut basis: Vec<Vec<u64>> = Vec::new();
        if s > 0 {
            let prev = self.cobar.complex.differential(s - 1);
            let dense = prev.dense(n);
            let cols: Vec<Vec<u64>> = (0..prev.src_dim(n))
                .map(|c| (0..prev.tgt_dim(n)).map(|r| dense[r][c]).collect())
                .collect();
            basis = canonical_basis(&field, cols);
        }
        let image_rank = basis.len();
        basis.extend(self.slices[s][n].reps.iter().cloned());
        if basis.is_empty() {
            let trivial = vector.iter().all(|&x| x == 0);
            return Ok(trivial.then(Vec::new));
        }
        Ok(solve_in_span(&field, &basis, vector)
            .map(|sol| sol[image_rank..].to_vec()))
    }
}
