//! Graded sparse matrices over a finite field and the elimination kernel.
//!
//! A [`GradedMatrix`] is a degree-indexed family of sparse matrices; a
//! degree-`n` block maps the degree-`n` slice of the source to the
//! degree-`n` slice of the target (all differentials in this crate preserve
//! internal degree). Elimination is performed densely per degree with a
//! fixed pivot order: leftmost column first, then smallest row. Every
//! returned basis is the reduced row echelon basis of its span, so results
//! are deterministic across runs and parallelism does not affect output.

use crate::coeffring::field::FiniteFieldCtx;
use crate::coeffring::witt::{WittElt, WittRingCtx};
use crate::error::{Error, Result};
use crate::par::{self, ExecMode};

/// Degree-indexed sparse matrix over a finite field.
#[derive(Debug, Clone)]
pub struct GradedMatrix {
    field: FiniteFieldCtx,
    src_dims: Vec<usize>,
    tgt_dims: Vec<usize>,
    /// Per degree: (row, col, coeff) triplets. Duplicate positions are
    /// summed when densified.
    entries: Vec<Vec<(usize, usize, u64)>>,
}

/// Rank and echelonized bases for one degree of a graded map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeLinReport {
    pub rank: usize,
    /// RREF basis of the nullspace, vectors in source coordinates.
    pub kernel: Vec<Vec<u64>>,
    /// RREF basis of the column space, vectors in target coordinates.
    pub image: Vec<Vec<u64>>,
    /// Indices of target standard basis vectors representing the cokernel
    /// (the non-pivot target coordinates of the image echelon form).
    pub cokernel: Vec<usize>,
}

impl GradedMatrix {
    /// Zero matrix with the given graded shape. The two dimension vectors
    /// may have different lengths; missing degrees are zero-dimensional.
    pub fn zero(field: FiniteFieldCtx, src_dims: Vec<usize>, tgt_dims: Vec<usize>) -> Self {
        let degs = src_dims.len().max(tgt_dims.len());
        GradedMatrix {
            field,
            src_dims,
            tgt_dims,
            entries: vec![Vec::new(); degs],
        }
    }

    pub fn field(&self) -> &FiniteFieldCtx {
        &self.field
    }

    pub fn degrees(&self) -> usize {
        self.entries.len()
    }

    pub fn src_dim(&self, degree: usize) -> usize {
        self.src_dims.get(degree).copied().unwrap_or(0)
    }

    pub fn tgt_dim(&self, degree: usize) -> usize {
        self.tgt_dims.get(degree).copied().unwrap_or(0)
    }

    pub fn src_dims(&self) -> &[usize] {
        &self.src_dims
    }

    pub fn tgt_dims(&self) -> &[usize] {
        &self.tgt_dims
    }

    /// Adds `coeff` at `(row, col)` in the given degree block.
    pub fn push(&mut self, degree: usize, row: usize, col: usize, coeff: u64) -> Result<()> {
        if degree >= self.entries.len() {
            return Err(Error::ShapeMismatch(format!(
                "degree {degree} out of range (max {})",
                self.entries.len()
            )));
        }
        if row >= self.tgt_dim(degree) || col >= self.src_dim(degree) {
            return Err(Error::ShapeMismatch(format!(
                "entry ({row}, {col}) outside {}x{} block at degree {degree}",
                self.tgt_dim(degree),
                self.src_dim(degree)
            )));
        }
        if coeff >= self.field.q() {
            return Err(Error::ShapeMismatch(format!(
                "coefficient {coeff} outside the declared field of size {}",
                self.field.q()
            )));
        }
        if coeff != 0 {
            self.entries[degree].push((row, col, coeff));
        }
        Ok(())
    }

    /// Dense block at one degree, as rows over target coordinates.
    pub fn dense(&self, degree: usize) -> Vec<Vec<u64>> {
        let rows = self.tgt_dim(degree);
        let cols = self.src_dim(degree);
        let mut out = vec![vec![0u64; cols]; rows];
        if let Some(trips) = self.entries.get(degree) {
            for &(r, c, v) in trips {
                out[r][c] = self.field.add(out[r][c], v);
            }
        }
        out
    }

    /// Applies the degree block to a source-coordinate vector.
    pub fn apply(&self, degree: usize, v: &[u64]) -> Vec<u64> {
        debug_assert_eq!(v.len(), self.src_dim(degree));
        let mut out = vec![0u64; self.tgt_dim(degree)];
        if let Some(trips) = self.entries.get(degree) {
            for &(r, c, coeff) in trips {
                out[r] = self.field.add(out[r], self.field.mul(coeff, v[c]));
            }
        }
        out
    }

    /// Composite `self . other` (apply `other` first). Degreewise dense
    /// multiplication; shapes must chain.
    pub fn compose(&self, other: &GradedMatrix) -> Result<GradedMatrix> {
        if self.field != other.field {
            return Err(Error::ContextMismatch("composing over different fields".into()));
        }
        let degs = self.entries.len().max(other.entries.len());
        for n in 0..degs {
            if self.src_dim(n) != other.tgt_dim(n) {
                return Err(Error::ShapeMismatch(format!(
                    "compose: inner dims differ at degree {n}: {} vs {}",
                    self.src_dim(n),
                    other.tgt_dim(n)
                )));
            }
        }
        let mut out = GradedMatrix::zero(
            self.field.clone(),
            other.src_dims.clone(),
            self.tgt_dims.clone(),
        );
        for n in 0..degs {
            let a = self.dense(n);
            let b = other.dense(n);
            for r in 0..self.tgt_dim(n) {
                for c in 0..other.src_dim(n) {
                    let mut acc = 0u64;
                    for k in 0..self.src_dim(n) {
                        acc = self.field.add(acc, self.field.mul(a[r][k], b[k][c]));
                    }
                    if acc != 0 {
                        out.push(n, r, c, acc)?;
                    }
                }
            }
        }
        Ok(out)
    }

    /// True iff every block is zero.
    pub fn is_zero(&self) -> bool {
        self.entries.iter().enumerate().all(|(n, _)| {
            self.dense(n).iter().all(|row| row.iter().all(|&v| v == 0))
        })
    }

    /// First degree with a nonzero block, if any.
    pub fn first_nonzero_degree(&self) -> Option<usize> {
        (0..self.entries.len())
            .find(|&n| self.dense(n).iter().any(|row| row.iter().any(|&v| v != 0)))
    }
}

/// Per-degree rank, kernel, image, and cokernel of a graded map, computed
/// independently per degree (in parallel under `ExecMode::Parallel`).
pub fn rank_kernel_cokernel(m: &GradedMatrix, mode: ExecMode) -> Vec<DegreeLinReport> {
    let degs = m.degrees();
    par::map_indexed(mode, degs, |n| {
        let dense = m.dense(n);
        degree_report(&m.field, &dense, m.src_dim(n), m.tgt_dim(n))
    })
}

fn degree_report(
    field: &FiniteFieldCtx,
    dense: &[Vec<u64>],
    src_dim: usize,
    tgt_dim: usize,
) -> DegreeLinReport {
    let kernel = nullspace(field, dense, src_dim);
    // Columns as target-coordinate vectors span the image.
    let cols: Vec<Vec<u64>> = (0..src_dim)
        .map(|c| (0..tgt_dim).map(|r| dense[r][c]).collect())
        .collect();
    let image = canonical_basis(field, cols);
    let rank = image.len();
    debug_assert_eq!(rank + kernel.len(), src_dim);
    let pivots: Vec<usize> = image.iter().map(|v| leading_index(v).unwrap()).collect();
    let cokernel = (0..tgt_dim).filter(|i| !pivots.contains(i)).collect();
    DegreeLinReport { rank, kernel, image, cokernel }
}

/// Index of the first nonzero coordinate.
pub fn leading_index(v: &[u64]) -> Option<usize> {
    v.iter().position(|&x| x != 0)
}

/// In-place reduced row echelon form; returns the pivot columns in order.
/// Pivot choice is fixed: scan columns left to right, take the first
/// remaining row with a nonzero entry.
pub fn rref(field: &FiniteFieldCtx, rows: &mut [Vec<u64>]) -> Vec<usize> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut next_row = 0;
    for col in 0..ncols {
        let Some(pr) = (next_row..nrows).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(next_row, pr);
        let inv = field.inv(rows[next_row][col]);
        for c in col..ncols {
            rows[next_row][c] = field.mul(rows[next_row][c], inv);
        }
        for r in 0..nrows {
            if r != next_row && rows[r][col] != 0 {
                let factor = rows[r][col];
                for c in col..ncols {
                    let sub = field.mul(factor, rows[next_row][c]);
                    rows[r][c] = field.sub(rows[r][c], sub);
                }
            }
        }
        pivots.push(col);
        next_row += 1;
        if next_row == nrows {
            break;
        }
    }
    pivots
}

/// RREF basis of the span of the given vectors (zero rows dropped).
pub fn canonical_basis(field: &FiniteFieldCtx, vectors: Vec<Vec<u64>>) -> Vec<Vec<u64>> {
    let mut rows = vectors;
    rref(field, &mut rows);
    rows.retain(|r| r.iter().any(|&x| x != 0));
    rows
}

/// RREF basis of the nullspace of the matrix (rows = equations).
pub fn nullspace(field: &FiniteFieldCtx, dense: &[Vec<u64>], src_dim: usize) -> Vec<Vec<u64>> {
    let mut rows: Vec<Vec<u64>> = dense.to_vec();
    let pivots = rref(field, &mut rows);
    let pivot_set: Vec<usize> = pivots.clone();
    let mut basis = Vec::new();
    for free in 0..src_dim {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut v = vec![0u64; src_dim];
        v[free] = 1;
        for (i, &pc) in pivot_set.iter().enumerate() {
            // Row i has pivot at pc; the free column's entry moves across.
            v[pc] = field.neg(rows[i][free]);
        }
        basis.push(v);
    }
    canonical_basis(field, basis)
}

/// Coordinates of `v` in the span of `basis_rows`, or None if `v` is not in
/// the span. `basis_rows` need not be echelonized.
pub fn solve_in_span(
    field: &FiniteFieldCtx,
    basis_rows: &[Vec<u64>],
    v: &[u64],
) -> Option<Vec<u64>> {
    let k = basis_rows.len();
    let n = v.len();
    if k == 0 {
        return if v.iter().all(|&x| x == 0) { Some(Vec::new()) } else { None };
    }
    // Solve x^T B = v by eliminating the transposed system B^T x = v^T.
    let mut aug: Vec<Vec<u64>> = (0..n)
        .map(|j| {
            let mut row: Vec<u64> = (0..k).map(|i| basis_rows[i][j]).collect();
            row.push(v[j]);
            row
        })
        .collect();
    let pivots = rref(field, &mut aug);
    if pivots.contains(&k) {
        return None; // inconsistent
    }
    let mut x = vec![0u64; k];
    for (i, &pc) in pivots.iter().enumerate() {
        x[pc] = aug[i][k];
    }
    Some(x)
}

/// Representatives of `span(kernel) / span(image)`: kernel vectors reduced
/// modulo the image and re-echelonized. `image` must be contained in the
/// span of `kernel` for the quotient to make sense; dimensions then satisfy
/// `len(result) = len(kernel basis) - len(image basis)`.
pub fn quotient_reps(
    field: &FiniteFieldCtx,
    kernel: &[Vec<u64>],
    image: &[Vec<u64>],
) -> Vec<Vec<u64>> {
    let im = canonical_basis(field, image.to_vec());
    let mut reduced = Vec::new();
    for z in kernel {
        let mut v = z.clone();
        for im_row in &im {
            let lead = leading_index(im_row).unwrap();
            if v[lead] != 0 {
                let factor = v[lead];
                for c in 0..v.len() {
                    let sub = field.mul(factor, im_row[c]);
                    v[c] = field.sub(v[c], sub);
                }
            }
        }
        if v.iter().any(|&x| x != 0) {
            reduced.push(v);
        }
    }
    canonical_basis(field, reduced)
}

// ---------------------------------------------------------------------------
// Smith normal form over a truncated Witt ring.
//
// Z/p^N coefficients form a local principal ideal ring: every element is a
// unit times p^v. Pivoting on a minimal-valuation entry therefore clears
// its row and column, and the diagonal comes out as ascending powers of p.
// ---------------------------------------------------------------------------

/// Smith normal form data for a dense matrix over a Witt ring.
#[derive(Debug, Clone)]
pub struct WittSnfReport {
    /// Valuations v_1 <= v_2 <= ... of the nonzero diagonal entries p^{v_i},
    /// each strictly below the precision N.
    pub diag_valuations: Vec<u32>,
    /// Kernel generators in source coordinates: a full generating set of
    /// {x : Mx = 0} over Z/p^N.
    pub kernel: Vec<Vec<WittElt>>,
    /// Cokernel invariant factors: valuations of the torsion factors
    /// W/p^{v_i} with v_i > 0, followed by `coker_free` full copies of W.
    pub coker_torsion: Vec<u32>,
    pub coker_free: usize,
}

/// Valuation of a Witt element: the largest v <= N with p^v dividing every
/// coefficient; `N` for zero.
pub fn witt_valuation(ctx: &WittRingCtx, a: &[u64]) -> u32 {
    let mut v = ctx.precision();
    for &c in a {
        if c == 0 {
            continue;
        }
        let mut x = c;
        let mut vc = 0;
        while x % ctx.p() == 0 {
            x /= ctx.p();
            vc += 1;
        }
        v = v.min(vc);
    }
    v
}

/// Smith normal form over the Witt ring with minimal-valuation unit
/// pivoting. Returns diagonal valuations plus kernel and cokernel data.
pub fn witt_snf(ctx: &WittRingCtx, mat: &[Vec<WittElt>]) -> WittSnfReport {
    let nrows = mat.len();
    let ncols = mat.first().map_or(0, |r| r.len());
    let n_prec = ctx.precision();
    let mut a: Vec<Vec<WittElt>> = mat.to_vec();
    // Column-operation tracker: source changes of basis, D = U M V with
    // V accumulated here (columns of V express the new basis).
    let mut v_track: Vec<Vec<WittElt>> = (0..ncols)
        .map(|j| {
            (0..ncols)
                .map(|i| if i == j { ctx.one() } else { ctx.zero() })
                .collect()
        })
        .collect();
    // v_track[j] is the j-th column of V as a coordinate vector.

    let mut diag = Vec::new();
    let mut k = 0;
    while k < nrows.min(ncols) {
        // Find the minimal-valuation entry in the trailing block.
        let mut best: Option<(u32, usize, usize)> = None;
        for r in k..nrows {
            for c in k..ncols {
                let val = witt_valuation(ctx, &a[r][c]);
                if val < n_prec {
                    match best {
                        Some((bv, _, _)) if bv <= val => {}
                        _ => best = Some((val, r, c)),
                    }
                }
            }
        }
        let Some((val, pr, pc)) = best else {
            break; // trailing block is zero
        };
        a.swap(k, pr);
        for row in a.iter_mut() {
            row.swap(k, pc);
        }
        v_track.swap(k, pc);
        // Scale the pivot row by the inverse of the unit part; the pivot
        // becomes exactly p^val. Row scaling is a target-side operation, so
        // the column tracker is untouched.
        let pivot = a[k][k].clone();
        let unit = exact_div_pow(ctx, &pivot, val);
        let unit_inv = ctx.inv(&unit);
        for c in k..ncols {
            a[k][c] = ctx.mul(&a[k][c], &unit_inv);
        }
        for r in k + 1..nrows {
            let w = exact_div_pow(ctx, &a[r][k], val);
            if ctx.is_zero(&w) {
                continue;
            }
            for c in k..ncols {
                let sub = ctx.mul(&w, &a[k][c]);
                a[r][c] = ctx.sub(&a[r][c], &sub);
            }
        }
        for c in k + 1..ncols {
            let w = exact_div_pow(ctx, &a[k][c], val);
            if ctx.is_zero(&w) {
                continue;
            }
            // Column op: col_c -= w * col_k; track in V.
            for r in 0..nrows {
                let sub = ctx.mul(&w, &a[r][k]);
                a[r][c] = ctx.sub(&a[r][c], &sub);
            }
            for i in 0..ncols {
                let sub = ctx.mul(&w, &v_track[k][i].clone());
                v_track[c][i] = ctx.sub(&v_track[c][i], &sub);
            }
        }
        diag.push(val);
        k += 1;
    }

    // Kernel of D: for diagonal p^v with v > 0 the column contributes
    // p^(N-v) e_i; zero columns contribute e_j. Map through V.
    let mut kernel = Vec::new();
    for (i, &v) in diag.iter().enumerate() {
        if v > 0 {
            let scale = ctx.p().pow(n_prec - v);
            let gen: Vec<WittElt> =
                v_track[i].iter().map(|e| ctx.scalar_mul(scale, e)).collect();
            kernel.push(gen);
        }
    }
    for j in diag.len()..ncols {
        kernel.push(v_track[j].clone());
    }

    let coker_torsion: Vec<u32> = diag.iter().copied().filter(|&v| v > 0).collect();
    let coker_free = nrows - diag.len();
    WittSnfReport {
        diag_valuations: diag,
        kernel,
        coker_torsion,
        coker_free,
    }
}

/// Divides every coefficient by p^v; requires exact divisibility.
fn exact_div_pow(ctx: &WittRingCtx, a: &[u64], v: u32) -> WittElt {
    let pv = ctx.p().pow(v);
    a.iter()
        .map(|&c| {
            debug_assert_eq!(c % pv, 0, "inexact division by p^{v}");
            c / pv
        })
        .collect()
}
