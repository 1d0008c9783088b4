//! The two-sided normalized cobar complex.
//!
//! For a right comodule `M`, coalgebra `C`, and left comodule `N`, the
//! cochain term in cohomological degree `s` is `M ⊗ F^{⊗s} ⊗ N` where `F`
//! is the positive-degree part of `C` (the kernel of the counit). The
//! differential alternates the right coaction of `M`, the `s` interior
//! reduced comultiplications, and the left coaction of `N`. Terms are
//! restricted to internal degree below the window, which is sound because
//! every face map preserves internal degree.

use std::collections::HashMap;

use crate::coalgebra::{GradedCoalgebra, GradedComodule};
use crate::coeffring::homology::CochainComplex;
use crate::coeffring::matrix::GradedMatrix;
use crate::error::{Error, Result};

/// One cobar basis word `m ⊗ f_1 ⊗ … ⊗ f_s ⊗ n`: a right-comodule basis
/// index, `s` positive-degree coalgebra indices, and a left-comodule basis
/// index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CobarWord {
    pub left: usize,
    pub mids: Vec<usize>,
    pub right: usize,
}

/// The assembled complex with its word bases. `bases[s][n]` lists the
/// degree-`n` words of cohomological degree `s` in lexicographic order of
/// `(left, mids…, right)`; the graded matrices index exactly these lists.
#[derive(Debug, Clone)]
pub struct CobarComplex {
    pub window: usize,
    pub complex: CochainComplex,
    pub bases: Vec<Vec<Vec<CobarWord>>>,
}

impl CobarComplex {
    /// Number of stored cochain levels (`s_max + 1`).
    pub fn levels(&self) -> usize {
        self.bases.len()
    }

    pub fn dim(&self, s: usize, n: usize) -> usize {
        self.bases
            .get(s)
            .and_then(|per_deg| per_deg.get(n))
            .map_or(0, |words| words.len())
    }

    pub fn words(&self, s: usize, n: usize) -> &[CobarWord] {
        self.bases
            .get(s)
            .and_then(|per_deg| per_deg.get(n))
            .map_or(&[], |w| w.as_slice())
    }

    /// Locates a word in its level's degree basis.
    pub fn word_position(&self, s: usize, word: &CobarWord, degree: usize) -> Option<usize> {
        self.words(s, degree).iter().position(|w| w == word)
    }
}

/// Builds the cobar complex of `(m, c, n)` through cohomological degree
/// `s_max`, internal degrees below `window`. Validates shapes and checks
/// `d∘d = 0` exactly.
pub fn cobar(
    m: &GradedComodule,
    c: &GradedCoalgebra,
    n: &GradedComodule,
    s_max: usize,
    window: usize,
) -> Result<CobarComplex> {
    if !m.has_right() {
        return Err(Error::InvalidParameter(
            "cobar needs a right coaction on the first argument".into(),
        ));
    }
    if !n.has_left() {
        return Err(Error::InvalidParameter(
            "cobar needs a left coaction on the last argument".into(),
        ));
    }
    if m.field() != c.field() || n.field() != c.field() {
        return Err(Error::ContextMismatch(
            "cobar inputs live over different fields".into(),
        ));
    }
    if window == 0 || window > c.trunc() {
        return Err(Error::InvalidParameter(format!(
            "window {window} must be in 1..={}",
            c.trunc()
        )));
    }
    let field = c.field().clone();
    let reduced = c.reduced_indices();

    // Enumerate words level by level, grouped by internal degree. The
    // nested ascending loops produce lexicographic order within a degree.
    let mut bases: Vec<Vec<Vec<CobarWord>>> = Vec::with_capacity(s_max + 1);
    for s in 0..=s_max {
        let mut per_deg: Vec<Vec<CobarWord>> = vec![Vec::new(); window];
        for left in 0..m.basis().len() {
            let left_deg = m.basis().degree(left);
            if left_deg >= window {
                continue;
            }
            let mut mids = Vec::with_capacity(s);
            enumerate_mids(
                c,
                &reduced,
                n,
                window,
                left,
                left_deg,
                s,
                &mut mids,
                &mut per_deg,
            );
        }
        bases.push(per_deg);
    }

    // Index maps for differential assembly.
    let index: Vec<HashMap<&CobarWord, (usize, usize)>> = bases
        .iter()
        .map(|per_deg| {
            let mut map = HashMap::new();
            for (deg, words) in per_deg.iter().enumerate() {
                for (loc, w) in words.iter().enumerate() {
                    map.insert(w, (deg, loc));
                }
            }
            map
        })
        .collect();

    let dims: Vec<Vec<usize>> = bases
        .iter()
        .map(|per_deg| per_deg.iter().map(|w| w.len()).collect())
        .collect();

    let mut diffs = Vec::with_capacity(s_max);
    for s in 0..s_max {
        let mut mat = GradedMatrix::zero(field.clone(), dims[s].clone(), dims[s + 1].clone());
        for (deg, words) in bases[s].iter().enumerate() {
            for (col, word) in words.iter().enumerate() {
                push_differential(
                    &mut mat, &field, c, m, n, &index[s + 1], deg, col, word, s,
                )?;
            }
        }
        diffs.push(mat);
    }

    let complex = CochainComplex::new(field, dims, diffs)?;
    Ok(CobarComplex { window, complex, bases })
}

#[allow(clippy::too_many_arguments)]
fn enumerate_mids(
    c: &GradedCoalgebra,
    reduced: &[usize],
    n: &GradedComodule,
    window: usize,
    left: usize,
    used: usize,
    slots: usize,
    mids: &mut Vec<usize>,
    per_deg: &mut [Vec<CobarWord>],
) {
    if slots == 0 {
        for right in 0..n.basis().len() {
            let total = used + n.basis().degree(right);
            if total < window {
                per_deg[total].push(CobarWord {
                    left,
                    mids: mids.clone(),
                    right,
                });
            }
        }
        return;
    }
    for &f in reduced {
        let fdeg = c.basis().degree(f);
        if used + fdeg >= window {
            continue;
        }
        mids.push(f);
        enumerate_mids(c, reduced, n, window, left, used + fdeg, slots - 1, mids, per_deg);
        mids.pop();
    }
}

/// Adds the alternating-face differential of one word into `mat`.
#[allow(clippy::too_many_arguments)]
fn push_differential(
    mat: &mut GradedMatrix,
    field: &crate::coeffring::field::FiniteFieldCtx,
    c: &GradedCoalgebra,
    m: &GradedComodule,
    n: &GradedComodule,
    target_index: &HashMap<&CobarWord, (usize, usize)>,
    deg: usize,
    col: usize,
    word: &CobarWord,
    s: usize,
) -> Result<()> {
    let eta = c.eta();
    let mut emit = |w: CobarWord, coeff: u64| -> Result<()> {
        let &(wdeg, row) = target_index.get(&w).ok_or_else(|| {
            Error::Internal("cobar face map produced an unindexed word".into())
        })?;
        if wdeg != deg {
            return Err(Error::Internal("cobar face map changed internal degree".into()));
        }
        mat.push(deg, row, col, coeff)
    };

    // Face 0: right coaction of the left slot, reduced C factor inserted
    // in front. Sign +1.
    for &(mj, ck, co) in m.psi_r_of(word.left) {
        if ck == eta {
            continue;
        }
        let mut mids = Vec::with_capacity(s + 1);
        mids.push(ck);
        mids.extend_from_slice(&word.mids);
        emit(CobarWord { left: mj, mids, right: word.right }, co)?;
    }
    // Faces 1..=s: reduced comultiplication of each interior factor.
    for i in 1..=s {
        let negate = i % 2 == 1;
        for &(a, b, co) in c.delta_of(word.mids[i - 1]) {
            if a == eta || b == eta {
                continue;
            }
            let mut mids = Vec::with_capacity(s + 1);
            mids.extend_from_slice(&word.mids[..i - 1]);
            mids.push(a);
            mids.push(b);
            mids.extend_from_slice(&word.mids[i..]);
            let signed = if negate { field.neg(co) } else { co };
            emit(CobarWord { left: word.left, mids, right: word.right }, signed)?;
        }
    }
    // Face s+1: left coaction of the right slot, reduced C factor appended.
    let negate = (s + 1) % 2 == 1;
    for &(ca, nk, co) in n.psi_l_of(word.right) {
        if ca == eta {
            continue;
        }
        let mut mids = Vec::with_capacity(s + 1);
        mids.extend_from_slice(&word.mids);
        mids.push(ca);
        let signed = if negate { field.neg(co) } else { co };
        emit(CobarWord { left: word.left, mids, right: nk }, signed)?;
    }
    Ok(())
}
