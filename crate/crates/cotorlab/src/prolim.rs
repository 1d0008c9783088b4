//! Towers of graded modules and comodules: degreewise inverse limits,
//! derived limits, Mittag-Leffler offsets, and extension along a coalgebra.
//!
//! A tower is a finite diagram `M_0 ← M_1 ← … ← M_L` together with a tail
//! policy describing how it continues: frozen at `M_L` by identity maps, or
//! zero beyond `M_L`. Limits and first derived limits come from the
//! two-term complex `Φ: ∏ M_α → ∏ M_α`, `Φ(x)_α = x_α − f_α(x_{α+1})`;
//! higher derived limits of a tower vanish. Every degreewise-finite tower
//! with either tail is Mittag-Leffler, so the first derived limit is always
//! zero here; the machinery certifies that by computation instead of
//! assuming it, and [`cobar_derived_limit`] recomputes the same answer
//! through a second, independent route: the levelwise limit of the
//! one-sided cobar complex of each comodule level.

use std::collections::HashMap;

use rand::Rng;

use crate::coalgebra::cobar::{cobar, CobarComplex, CobarWord};
use crate::coalgebra::{regular_comodule, GradedCoalgebra, GradedComodule};
use crate::coeffring::field::FiniteFieldCtx;
use crate::coeffring::homology::CochainComplex;
use crate::coeffring::matrix::{nullspace, quotient_reps, rref, solve_in_span, GradedMatrix};
use crate::error::{Error, Result};
use crate::par::ExecMode;

/// How a finite tower continues beyond its last stored level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailPolicy {
    /// `M_α = M_L` with identity maps for all `α > L`.
    ConstantAfterLast,
    /// `M_α = 0` for all `α > L`.
    ZeroAfterLast,
}

/// A tower `M_0 ← M_1 ← … ← M_L` of graded vector spaces. `level_dims[α]`
/// lists the dimensions of `M_α` in degrees `0..window`; `maps[α]` is the
/// structure map `M_{α+1} → M_α`.
#[derive(Debug, Clone)]
pub struct ModuleTower {
    field: FiniteFieldCtx,
    window: usize,
    level_dims: Vec<Vec<usize>>,
    maps: Vec<GradedMatrix>,
    tail: TailPolicy,
}

fn dims_match(a: &[usize], b: &[usize]) -> bool {
    let n = a.len().max(b.len());
    (0..n).all(|i| a.get(i).copied().unwrap_or(0) == b.get(i).copied().unwrap_or(0))
}

impl ModuleTower {
    pub fn new(
        field: FiniteFieldCtx,
        window: usize,
        level_dims: Vec<Vec<usize>>,
        maps: Vec<GradedMatrix>,
        tail: TailPolicy,
    ) -> Result<Self> {
        if window == 0 {
            return Err(Error::InvalidParameter("window must be at least 1".into()));
        }
        if level_dims.is_empty() {
            return Err(Error::InvalidParameter("a tower needs at least one level".into()));
        }
        for (alpha, dims) in level_dims.iter().enumerate() {
            if dims.len() != window {
                return Err(Error::ShapeMismatch(format!(
                    "level {alpha} lists {} degrees for window {window}",
                    dims.len()
                )));
            }
        }
        if maps.len() + 1 != level_dims.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} levels need {} maps, got {}",
                level_dims.len(),
                level_dims.len() - 1,
                maps.len()
            )));
        }
        for (alpha, f) in maps.iter().enumerate() {
            if *f.field() != field {
                return Err(Error::ContextMismatch(
                    "tower map over a different field".into(),
                ));
            }
            if !dims_match(f.src_dims(), &level_dims[alpha + 1])
                || !dims_match(f.tgt_dims(), &level_dims[alpha])
            {
                return Err(Error::ShapeMismatch(format!(
                    "map {alpha} does not fit between levels {} and {alpha}",
                    alpha + 1
                )));
            }
        }
        Ok(ModuleTower { field, window, level_dims, maps, tail })
    }

    pub fn field(&self) -> &FiniteFieldCtx {
        &self.field
    }

    pub fn window(&self) -> usize {
        self.window
    }

    /// Number of stored levels (`L + 1`).
    pub fn levels(&self) -> usize {
        self.level_dims.len()
    }

    pub fn dims(&self, level: usize) -> &[usize] {
        &self.level_dims[level]
    }

    /// Structure map `M_{α+1} → M_α`.
    pub fn map(&self, alpha: usize) -> &GradedMatrix {
        &self.maps[alpha]
    }

    pub fn tail(&self) -> TailPolicy {
        self.tail
    }
}

/// The two-term map of one degree slice, with its source block layout.
struct TwoTermMap {
    dense: Vec<Vec<u64>>,
    src_dim: usize,
    tgt_dim: usize,
}

/// Assembles `Φ(x)_α = x_α − f_α(x_{α+1})` over the stored levels.
/// `blocks[α]` is the dense matrix of `f_α` in this degree. A constant tail
/// drops the last target block (the relations above `L` are identities); a
/// zero tail keeps it as `Φ(x)_L = x_L`.
fn two_term_map(
    field: &FiniteFieldCtx,
    block_dims: &[usize],
    blocks: &[Vec<Vec<u64>>],
    tail: TailPolicy,
) -> TwoTermMap {
    let levels = block_dims.len();
    assert_eq!(blocks.len() + 1, levels);
    let mut src_offsets = Vec::with_capacity(levels);
    let mut src_dim = 0;
    for &d in block_dims {
        src_offsets.push(src_dim);
        src_dim += d;
    }
    let tgt_levels = match tail {
        TailPolicy::ConstantAfterLast => levels - 1,
        TailPolicy::ZeroAfterLast => levels,
    };
    let tgt_dim: usize = block_dims[..tgt_levels].iter().sum();
    let mut dense = vec![vec![0u64; src_dim]; tgt_dim];
    let mut row0 = 0;
    for alpha in 0..tgt_levels {
        for i in 0..block_dims[alpha] {
            dense[row0 + i][src_offsets[alpha] + i] = 1;
        }
        if alpha + 1 < levels {
            let b = &blocks[alpha];
            for i in 0..block_dims[alpha] {
                for j in 0..block_dims[alpha + 1] {
                    if b[i][j] != 0 {
                        dense[row0 + i][src_offsets[alpha + 1] + j] = field.neg(b[i][j]);
                    }
                }
            }
        }
        row0 += block_dims[alpha];
    }
    TwoTermMap { dense, src_dim, tgt_dim }
}

fn phi_for(t: &ModuleTower, degree: usize) -> TwoTermMap {
    let block_dims: Vec<usize> = (0..t.levels()).map(|a| t.dims(a)[degree]).collect();
    let blocks: Vec<Vec<Vec<u64>>> =
        (0..t.levels() - 1).map(|a| t.map(a).dense(degree)).collect();
    two_term_map(t.field(), &block_dims, &blocks, t.tail())
}

fn dense_rank(field: &FiniteFieldCtx, dense: &[Vec<u64>]) -> usize {
    let mut rows = dense.to_vec();
    rref(field, &mut rows).len()
}

/// Degreewise inverse limit of the tower: dimensions of `ker Φ` for degrees
/// `0..window`. With a constant tail a compatible family is pinned by its
/// top entry, so this matches the dimensions of `M_L`; with a zero tail it
/// vanishes. Both facts come out of actual elimination here.
pub fn tower_limit(t: &ModuleTower) -> Vec<usize> {
    (0..t.window())
        .map(|deg| {
            let phi = phi_for(t, deg);
            nullspace(t.field(), &phi.dense, phi.src_dim).len()
        })
        .collect()
}

/// Degreewise dimensions of the `s`-th derived limit: `ker Φ` for `s = 0`,
/// `coker Φ` for `s = 1`, zero above that.
pub fn derived_limit(t: &ModuleTower, s: usize) -> Vec<usize> {
    match s {
        0 => tower_limit(t),
        1 => (0..t.window())
            .map(|deg| {
                let phi = phi_for(t, deg);
                phi.tgt_dim - dense_rank(t.field(), &phi.dense)
            })
            .collect(),
        _ => vec![0; t.window()],
    }
}

/// Verifies exactness of `0 → lim → ∏ M_α → ∏ M_α → lim¹ → 0` in each
/// degree, with the four dimensions measured by separate eliminations
/// (nullspace, row rank, and quotient representatives).
pub fn milnor_exact(t: &ModuleTower) -> Vec<bool> {
    let field = t.field();
    (0..t.window())
        .map(|deg| {
            let phi = phi_for(t, deg);
            let ker = nullspace(field, &phi.dense, phi.src_dim).len();
            let rank = dense_rank(field, &phi.dense);
            let image: Vec<Vec<u64>> = (0..phi.src_dim)
                .map(|j| phi.dense.iter().map(|row| row[j]).collect())
                .collect();
            let full: Vec<Vec<u64>> = (0..phi.tgt_dim)
                .map(|i| {
                    let mut v = vec![0u64; phi.tgt_dim];
                    v[i] = 1;
                    v
                })
                .collect();
            let coker = quotient_reps(field, &full, &image).len();
            ker + rank == phi.src_dim && rank + coker == phi.tgt_dim
        })
        .collect()
}

/// Per-degree Mittag-Leffler certificate: whether the images
/// `Im(M_{n+k} → M_n)` stabilize in `k` (always, for these tail policies)
/// and the largest stabilization offset across starting levels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MittagLeffler {
    pub stable: Vec<bool>,
    pub offsets: Vec<usize>,
}

fn identity_dense(n: usize) -> Vec<Vec<u64>> {
    (0..n)
        .map(|i| {
            let mut row = vec![0u64; n];
            row[i] = 1;
            row
        })
        .collect()
}

fn mat_mul(
    field: &FiniteFieldCtx,
    a: &[Vec<u64>],
    b: &[Vec<u64>],
    b_cols: usize,
) -> Vec<Vec<u64>> {
    a.iter()
        .map(|row| {
            (0..b_cols)
                .map(|j| {
                    let mut acc = 0;
                    for (k, &av) in row.iter().enumerate() {
                        if av != 0 && b[k][j] != 0 {
                            acc = field.add(acc, field.mul(av, b[k][j]));
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// Checks the Mittag-Leffler condition degreewise. Successive images are
/// nested, so rank equality already forces image equality; ranks are
/// non-increasing, so the first match with the eventual rank is the
/// stabilization point.
pub fn is_mittag_leffler(t: &ModuleTower) -> MittagLeffler {
    let field = t.field();
    let mut stable = Vec::with_capacity(t.window());
    let mut offsets = Vec::with_capacity(t.window());
    for deg in 0..t.window() {
        let mut offset = 0usize;
        for n in 0..t.levels() {
            let dim_n = t.dims(n)[deg];
            let mut ranks = vec![dim_n];
            let mut acc = identity_dense(dim_n);
            for m in n..t.levels() - 1 {
                let cols = t.dims(m + 1)[deg];
                acc = mat_mul(field, &acc, &t.map(m).dense(deg), cols);
                ranks.push(dense_rank(field, &acc));
            }
            let eventual = match t.tail() {
                TailPolicy::ConstantAfterLast => *ranks.last().unwrap(),
                TailPolicy::ZeroAfterLast => 0,
            };
            let k = ranks
                .iter()
                .position(|&r| r == eventual)
                .unwrap_or(ranks.len());
            offset = offset.max(k);
        }
        stable.push(true);
        offsets.push(offset);
    }
    MittagLeffler { stable, offsets }
}

/// A tower of comodules over one coalgebra whose structure maps commute
/// with the coactions. Every level carries a left coaction (right ones are
/// optional but must then be present on all levels), and every basis
/// element lives in a degree below the window.
#[derive(Debug, Clone)]
pub struct ComoduleTower {
    coalgebra: GradedCoalgebra,
    window: usize,
    levels: Vec<GradedComodule>,
    maps: Vec<GradedMatrix>,
    tail: TailPolicy,
}

fn sparse_eq(field: &FiniteFieldCtx, a: &HashMap<(usize, usize), u64>, b: &HashMap<(usize, usize), u64>) -> bool {
    let _ = field;
    a.iter().all(|(k, &v)| b.get(k).copied().unwrap_or(0) == v)
        && b.iter().all(|(k, &v)| a.get(k).copied().unwrap_or(0) == v)
}

impl ComoduleTower {
    pub fn new(
        c: &GradedCoalgebra,
        levels: Vec<GradedComodule>,
        maps: Vec<GradedMatrix>,
        window: usize,
        tail: TailPolicy,
    ) -> Result<Self> {
        if window == 0 || window > c.trunc() {
            return Err(Error::InvalidParameter(format!(
                "window {window} must be in 1..={}",
                c.trunc()
            )));
        }
        if levels.is_empty() {
            return Err(Error::InvalidParameter("a tower needs at least one level".into()));
        }
        for (alpha, m) in levels.iter().enumerate() {
            m.validate_against(c)?;
            if !m.has_left() {
                return Err(Error::InvalidParameter(format!(
                    "level {alpha} has no left coaction"
                )));
            }
            for i in 0..m.basis().len() {
                if m.basis().degree(i) >= window {
                    return Err(Error::InvalidParameter(format!(
                        "level {alpha} has a basis element in degree {} outside the window",
                        m.basis().degree(i)
                    )));
                }
            }
        }
        let with_right = levels.iter().filter(|m| m.has_right()).count();
        if with_right != 0 && with_right != levels.len() {
            return Err(Error::InvalidParameter(
                "right coactions must be present on all levels or none".into(),
            ));
        }
        if maps.len() + 1 != levels.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} levels need {} maps, got {}",
                levels.len(),
                levels.len() - 1,
                maps.len()
            )));
        }
        let field = c.field();
        for (alpha, f) in maps.iter().enumerate() {
            if f.field() != field {
                return Err(Error::ContextMismatch(
                    "tower map over a different field".into(),
                ));
            }
            if !dims_match(f.src_dims(), &levels[alpha + 1].basis().dims_below(window))
                || !dims_match(f.tgt_dims(), &levels[alpha].basis().dims_below(window))
            {
                return Err(Error::ShapeMismatch(format!(
                    "map {alpha} does not fit between levels {} and {alpha}",
                    alpha + 1
                )));
            }
        }
        let check_right = with_right == levels.len();
        for alpha in 0..maps.len() {
            let src = &levels[alpha + 1];
            let tgt = &levels[alpha];
            let f_dense: Vec<Vec<Vec<u64>>> =
                (0..window).map(|t| maps[alpha].dense(t)).collect();
            for i in 0..src.basis().len() {
                let t = src.basis().degree(i);
                let col = src.basis().local(i);
                // f(m_i) as (target flat index, coefficient) pairs
                let mut fm: Vec<(usize, u64)> = Vec::new();
                for (row, brow) in f_dense[t].iter().enumerate() {
                    if brow[col] != 0 {
                        fm.push((tgt.basis().in_degree(t)[row], brow[col]));
                    }
                }
                let mut lhs: HashMap<(usize, usize), u64> = HashMap::new();
                for &(j, c1) in &fm {
                    for &(a, k, c2) in tgt.psi_l_of(j) {
                        let e = lhs.entry((a, k)).or_insert(0);
                        *e = field.add(*e, field.mul(c1, c2));
                    }
                }
                let mut rhs: HashMap<(usize, usize), u64> = HashMap::new();
                for &(a, k, c2) in src.psi_l_of(i) {
                    let tk = src.basis().degree(k);
                    let colk = src.basis().local(k);
                    for (row, brow) in f_dense[tk].iter().enumerate() {
                        if brow[colk] != 0 {
                            let j2 = tgt.basis().in_degree(tk)[row];
                            let e = rhs.entry((a, j2)).or_insert(0);
                            *e = field.add(*e, field.mul(c2, brow[colk]));
                        }
                    }
                }
                if !sparse_eq(field, &lhs, &rhs) {
                    return Err(Error::InvalidParameter(format!(
                        "map {alpha} does not commute with the left coaction"
                    )));
                }
                if check_right {
                    let mut lhs: HashMap<(usize, usize), u64> = HashMap::new();
                    for &(j, c1) in &fm {
                        for &(k, a, c2) in tgt.psi_r_of(j) {
                            let e = lhs.entry((k, a)).or_insert(0);
                            *e = field.add(*e, field.mul(c1, c2));
                        }
                    }
                    let mut rhs: HashMap<(usize, usize), u64> = HashMap::new();
                    for &(k, a, c2) in src.psi_r_of(i) {
                        let tk = src.basis().degree(k);
                        let colk = src.basis().local(k);
                        for (row, brow) in f_dense[tk].iter().enumerate() {
                            if brow[colk] != 0 {
                                let j2 = tgt.basis().in_degree(tk)[row];
                                let e = rhs.entry((j2, a)).or_insert(0);
                                *e = field.add(*e, field.mul(c2, brow[colk]));
                            }
                        }
                    }
                    if !sparse_eq(field, &lhs, &rhs) {
                        return Err(Error::InvalidParameter(format!(
                            "map {alpha} does not commute with the right coaction"
                        )));
                    }
                }
            }
        }
        Ok(ComoduleTower { coalgebra: c.clone(), window, levels, maps, tail })
    }

    pub fn coalgebra(&self) -> &GradedCoalgebra {
        &self.coalgebra
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn levels(&self) -> &[GradedComodule] {
        &self.levels
    }

    pub fn level(&self, alpha: usize) -> &GradedComodule {
        &self.levels[alpha]
    }

    pub fn maps(&self) -> &[GradedMatrix] {
        &self.maps
    }

    pub fn map(&self, alpha: usize) -> &GradedMatrix {
        &self.maps[alpha]
    }

    pub fn tail(&self) -> TailPolicy {
        self.tail
    }

    /// Forgets the coactions, keeping the graded dimensions and maps.
    pub fn underlying(&self) -> Result<ModuleTower> {
        ModuleTower::new(
            self.coalgebra.field().clone(),
            self.window,
            self.levels
                .iter()
                .map(|m| m.basis().dims_below(self.window))
                .collect(),
            self.maps.clone(),
            self.tail,
        )
    }
}

/// Tensors every level with the coalgebra: level `α` becomes `C ⊗ M_α`
/// with both coactions through the comultiplication on the `C` factor, and
/// the structure maps act on the module factor alone. The tower window is
/// inherited, so it must fit inside the coalgebra truncation.
pub fn extend_tower(mt: &ModuleTower, c: &GradedCoalgebra) -> Result<ComoduleTower> {
    if mt.field() != c.field() {
        return Err(Error::ContextMismatch(
            "tower and coalgebra live over different fields".into(),
        ));
    }
    if mt.window() > c.trunc() {
        return Err(Error::InvalidParameter(format!(
            "window {} exceeds the coalgebra truncation {}",
            mt.window(),
            c.trunc()
        )));
    }
    let window = mt.window();
    // Slot v of level α is the v-th module basis vector, degree-major.
    let slot_info: Vec<Vec<(usize, usize)>> = (0..mt.levels())
        .map(|alpha| {
            let mut slots = Vec::new();
            for t in 0..window {
                for i in 0..mt.dims(alpha)[t] {
                    slots.push((t, i));
                }
            }
            slots
        })
        .collect();
    let slot_at: Vec<Vec<Vec<usize>>> = (0..mt.levels())
        .map(|alpha| {
            let mut table = vec![Vec::new(); window];
            for (v, &(t, _)) in slot_info[alpha].iter().enumerate() {
                table[t].push(v);
            }
            table
        })
        .collect();
    let mut levels = Vec::with_capacity(mt.levels());
    let mut pair_index: Vec<HashMap<(usize, usize), usize>> = Vec::with_capacity(mt.levels());
    for alpha in 0..mt.levels() {
        let mut labels = Vec::new();
        let mut degrees = Vec::new();
        let mut index = HashMap::new();
        for a in 0..c.basis().len() {
            for (v, &(tv, _)) in slot_info[alpha].iter().enumerate() {
                let deg = c.basis().degree(a) + tv;
                if deg >= window {
                    continue;
                }
                index.insert((a, v), labels.len());
                labels.push(format!("{}*v{v}", c.basis().label(a)));
                degrees.push(deg);
            }
        }
        let mut psi_l = vec![Vec::new(); labels.len()];
        let mut psi_r = vec![Vec::new(); labels.len()];
        for (&(a, v), &e) in &index {
            for &(x, y, coeff) in c.delta_of(a) {
                // Both legs of the comultiplication stay inside the window.
                psi_l[e].push((x, index[&(y, v)], coeff));
                psi_r[e].push((index[&(x, v)], y, coeff));
            }
        }
        levels.push(GradedComodule::new(c, labels, degrees, Some(psi_l), Some(psi_r))?);
        pair_index.push(index);
    }
    let mut maps = Vec::with_capacity(mt.levels() - 1);
    for alpha in 0..mt.levels() - 1 {
        let src_dims = levels[alpha + 1].basis().dims_below(window);
        let tgt_dims = levels[alpha].basis().dims_below(window);
        let mut g = GradedMatrix::zero(mt.field().clone(), src_dims, tgt_dims);
        let f_dense: Vec<Vec<Vec<u64>>> =
            (0..window).map(|t| mt.map(alpha).dense(t)).collect();
        for (&(a, v), &e_src) in &pair_index[alpha + 1] {
            let (tv, col) = slot_info[alpha + 1][v];
            let deg = levels[alpha + 1].basis().degree(e_src);
            let src_local = levels[alpha + 1].basis().local(e_src);
            for (row, brow) in f_dense[tv].iter().enumerate() {
                if brow[col] == 0 {
                    continue;
                }
                let v_tgt = slot_at[alpha][tv][row];
                let e_tgt = pair_index[alpha][&(a, v_tgt)];
                g.push(deg, levels[alpha].basis().local(e_tgt), src_local, brow[col])?;
            }
        }
        maps.push(g);
    }
    ComoduleTower::new(c, levels, maps, window, mt.tail())
}

/// Derived limits of a comodule tower through the cobar route: each level
/// is resolved by its one-sided cobar complex, the tower of cochain spaces
/// is limited degreewise via the two-term kernel, and the `s`-th derived
/// limit is the cohomology of the limited complex. Returns `dims[s][n]`
/// for `s ≤ s_max` and degrees `n` below the window.
pub fn cobar_derived_limit(
    ct: &ComoduleTower,
    s_max: usize,
    mode: ExecMode,
) -> Result<Vec<Vec<usize>>> {
    let c = ct.coalgebra();
    let field = c.field().clone();
    let window = ct.window();
    let levels = ct.levels().len();
    let reg = regular_comodule(c)?;
    let mut cobs: Vec<CobarComplex> = Vec::with_capacity(levels);
    for alpha in 0..levels {
        cobs.push(cobar(&reg, c, ct.level(alpha), s_max + 1, window)?);
    }
    let word_pos: Vec<Vec<Vec<HashMap<CobarWord, usize>>>> = (0..levels)
        .map(|alpha| {
            (0..=s_max + 1)
                .map(|s| {
                    (0..window)
                        .map(|t| {
                            cobs[alpha]
                                .words(s, t)
                                .iter()
                                .enumerate()
                                .map(|(i, w)| (w.clone(), i))
                                .collect()
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let f_dense: Vec<Vec<Vec<Vec<u64>>>> = (0..levels - 1)
        .map(|alpha| (0..window).map(|t| ct.map(alpha).dense(t)).collect())
        .collect();

    // Kernels of the two-term map on each cochain tower, per (s, degree).
    let mut kernels: Vec<Vec<Vec<Vec<u64>>>> = Vec::with_capacity(s_max + 2);
    let mut dims: Vec<Vec<usize>> = Vec::with_capacity(s_max + 2);
    for s in 0..=s_max + 1 {
        let mut row_kernels = Vec::with_capacity(window);
        let mut row_dims = Vec::with_capacity(window);
        for t in 0..window {
            let block_dims: Vec<usize> = (0..levels).map(|a| cobs[a].dim(s, t)).collect();
            let mut blocks: Vec<Vec<Vec<u64>>> = Vec::with_capacity(levels - 1);
            for alpha in 0..levels - 1 {
                let mut m = vec![vec![0u64; block_dims[alpha + 1]]; block_dims[alpha]];
                for (jw, w) in cobs[alpha + 1].words(s, t).iter().enumerate() {
                    let tr = ct.level(alpha + 1).basis().degree(w.right);
                    let col = ct.level(alpha + 1).basis().local(w.right);
                    for (rr, brow) in f_dense[alpha][tr].iter().enumerate() {
                        if brow[col] == 0 {
                            continue;
                        }
                        let r2 = ct.level(alpha).basis().in_degree(tr)[rr];
                        let tgt_word =
                            CobarWord { left: w.left, mids: w.mids.clone(), right: r2 };
                        let pos = word_pos[alpha][s][t].get(&tgt_word).copied().ok_or_else(
                            || Error::Internal("induced tower map leaves the word basis".into()),
                        )?;
                        m[pos][jw] = field.add(m[pos][jw], brow[col]);
                    }
                }
                blocks.push(m);
            }
            let phi = two_term_map(&field, &block_dims, &blocks, ct.tail());
            let ker = nullspace(&field, &phi.dense, phi.src_dim);
            row_dims.push(ker.len());
            row_kernels.push(ker);
        }
        kernels.push(row_kernels);
        dims.push(row_dims);
    }

    // Levelwise cobar differentials preserve compatible families, so they
    // descend to the kernels; expressing the images in the kernel bases
    // gives the limited complex.
    let mut diffs = Vec::with_capacity(s_max + 1);
    for s in 0..=s_max {
        let mut g = GradedMatrix::zero(field.clone(), dims[s].clone(), dims[s + 1].clone());
        for t in 0..window {
            for (j, v) in kernels[s][t].iter().enumerate() {
                let mut image = Vec::new();
                let mut offset = 0;
                for (alpha, cob) in cobs.iter().enumerate() {
                    let n_a = cob.dim(s, t);
                    let seg = &v[offset..offset + n_a];
                    image.extend(cob.complex.differential(s).apply(t, seg));
                    offset += n_a;
                    let _ = alpha;
                }
                let coeffs =
                    solve_in_span(&field, &kernels[s + 1][t], &image).ok_or_else(|| {
                        Error::Internal("levelwise differential escapes the limit".into())
                    })?;
                for (i, &cf) in coeffs.iter().enumerate() {
                    if cf != 0 {
                        g.push(t, i, j, cf)?;
                    }
                }
            }
        }
        diffs.push(g);
    }
    let complex = CochainComplex::new(field, dims, diffs)?;
    let homology = complex.homology(mode);
    Ok(homology
        .into_iter()
        .take(s_max + 1)
        .map(|row| row.iter().map(|h| h.dim).collect())
        .collect())
}

/// Both derived-limit routes side by side: the two-term product complex of
/// the underlying module tower against the cobar route on the comodule
/// tower, for `s ≤ s_max`.
#[derive(Debug, Clone)]
pub struct DerivedLimitComparison {
    pub two_term: Vec<Vec<usize>>,
    pub cobar: Vec<Vec<usize>>,
    pub agree: bool,
}

pub fn compare_derived_limits(
    ct: &ComoduleTower,
    s_max: usize,
    mode: ExecMode,
) -> Result<DerivedLimitComparison> {
    let under = ct.underlying()?;
    let two_term: Vec<Vec<usize>> = (0..=s_max).map(|s| derived_limit(&under, s)).collect();
    let cobar_dims = cobar_derived_limit(ct, s_max, mode)?;
    let agree = two_term == cobar_dims;
    Ok(DerivedLimitComparison { two_term, cobar: cobar_dims, agree })
}

/// Random tower with level dimensions up to `max_dim` per degree and
/// uniformly random structure maps.
pub fn random_module_tower(
    field: &FiniteFieldCtx,
    window: usize,
    levels: usize,
    max_dim: usize,
    tail: TailPolicy,
    rng: &mut impl Rng,
) -> Result<ModuleTower> {
    if levels == 0 {
        return Err(Error::InvalidParameter("a tower needs at least one level".into()));
    }
    let level_dims: Vec<Vec<usize>> = (0..levels)
        .map(|_| (0..window).map(|_| rng.gen_range(0..=max_dim)).collect())
        .collect();
    let mut maps = Vec::with_capacity(levels - 1);
    for alpha in 0..levels - 1 {
        let mut g = GradedMatrix::zero(
            field.clone(),
            level_dims[alpha + 1].clone(),
            level_dims[alpha].clone(),
        );
        for t in 0..window {
            for row in 0..level_dims[alpha][t] {
                for col in 0..level_dims[alpha + 1][t] {
                    let coeff = rng.gen_range(0..field.q());
                    if coeff != 0 {
                        g.push(t, row, col, coeff)?;
                    }
                }
            }
        }
        maps.push(g);
    }
    ModuleTower::new(field.clone(), window, level_dims, maps, tail)
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::coalgebra::curve_coalgebra;
    use crate::coeffring::field::build_field;

    fn constant_tower(
        field: &FiniteFieldCtx,
        dims: Vec<usize>,
        levels: usize,
        tail: TailPolicy,
    ) -> ModuleTower {
        let window = dims.len();
        let mut maps = Vec::new();
        for _ in 0..levels - 1 {
            let mut g = GradedMatrix::zero(field.clone(), dims.clone(), dims.clone());
            for t in 0..window {
                for i in 0..dims[t] {
                    g.push(t, i, i, 1).unwrap();
                }
            }
            maps.push(g);
        }
        ModuleTower::new(field.clone(), window, vec![dims; levels], maps, tail).unwrap()
    }

    fn zero_maps_tower(
        field: &FiniteFieldCtx,
        dims: Vec<usize>,
        levels: usize,
        tail: TailPolicy,
    ) -> ModuleTower {
        let window = dims.len();
        let maps = (0..levels - 1)
            .map(|_| GradedMatrix::zero(field.clone(), dims.clone(), dims.clone()))
            .collect();
        ModuleTower::new(field.clone(), window, vec![dims; levels], maps, tail).unwrap()
    }

    #[test]
    fn limits_follow_the_tail_policy() {
        let field = build_field(3, 1).unwrap();
        let m = constant_tower(&field, vec![1, 2], 3, TailPolicy::ConstantAfterLast);
        assert_eq!(tower_limit(&m), vec![1, 2]);
        assert_eq!(derived_limit(&m, 0), vec![1, 2]);
        assert_eq!(derived_limit(&m, 1), vec![0, 0]);
        assert_eq!(derived_limit(&m, 4), vec![0, 0]);

        let z = zero_maps_tower(&field, vec![1, 2], 3, TailPolicy::ZeroAfterLast);
        assert_eq!(tower_limit(&z), vec![0, 0]);
        assert_eq!(derived_limit(&z, 1), vec![0, 0]);

        // Zero maps under a frozen tail: a family is pinned by its top entry.
        let zc = zero_maps_tower(&field, vec![1, 2], 3, TailPolicy::ConstantAfterLast);
        assert_eq!(tower_limit(&zc), vec![1, 2]);
        assert_eq!(derived_limit(&zc, 1), vec![0, 0]);
        assert!(milnor_exact(&zc).iter().all(|&ok| ok));
    }

    #[test]
    fn nested_inclusions_stabilize_at_the_top() {
        let field = build_field(2, 1).unwrap();
        let dims = vec![vec![4], vec![3], vec![2], vec![1]];
        let mut maps = Vec::new();
        for alpha in 0..3 {
            let (rows, cols) = (4 - alpha, 3 - alpha);
            let mut g = GradedMatrix::zero(field.clone(), vec![cols], vec![rows]);
            for i in 0..cols {
                g.push(0, i, i, 1).unwrap();
            }
            maps.push(g);
        }
        let t =
            ModuleTower::new(field.clone(), 1, dims, maps, TailPolicy::ConstantAfterLast)
                .unwrap();
        assert_eq!(tower_limit(&t), vec![1]);
        assert_eq!(derived_limit(&t, 1), vec![0]);
        let ml = is_mittag_leffler(&t);
        assert!(ml.stable[0]);
        assert_eq!(ml.offsets, vec![3]);
        assert!(milnor_exact(&t)[0]);
    }

    #[test]
    fn mittag_leffler_offsets_match_the_shape() {
        let field = build_field(5, 1).unwrap();
        let m = constant_tower(&field, vec![2, 1], 4, TailPolicy::ConstantAfterLast);
        assert_eq!(is_mittag_leffler(&m).offsets, vec![0, 0]);

        let z = zero_maps_tower(&field, vec![2, 1], 3, TailPolicy::ZeroAfterLast);
        assert_eq!(is_mittag_leffler(&z).offsets, vec![1, 1]);

        let zc = zero_maps_tower(&field, vec![2, 0], 3, TailPolicy::ConstantAfterLast);
        assert_eq!(is_mittag_leffler(&zc).offsets, vec![1, 0]);
    }

    #[test]
    fn extension_tensors_each_level() {
        let field = build_field(3, 1).unwrap();
        let c = curve_coalgebra(&field, 6).unwrap();

        let line = constant_tower(&field, vec![1, 0, 0, 0], 3, TailPolicy::ConstantAfterLast);
        let ext = extend_tower(&line, &c).unwrap();
        for alpha in 0..3 {
            assert_eq!(ext.level(alpha).basis().dims_below(4), c.basis().dims_below(4));
        }
        assert_eq!(tower_limit(&ext.underlying().unwrap()), c.basis().dims_below(4));

        // Limits commute with extension: computed on both sides.
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        let base =
            random_module_tower(&field, 4, 4, 3, TailPolicy::ConstantAfterLast, &mut rng)
                .unwrap();
        let ext = extend_tower(&base, &c).unwrap();
        let lim_base = tower_limit(&base);
        let lim_ext = tower_limit(&ext.underlying().unwrap());
        let c_dims = c.basis().dims_below(4);
        for t in 0..4 {
            let expect: usize = (0..=t).map(|u| c_dims[u] * lim_base[t - u]).sum();
            assert_eq!(lim_ext[t], expect);
        }
    }

    #[test]
    fn cobar_route_matches_the_product_complex() {
        let field = build_field(2, 1).unwrap();
        let c = curve_coalgebra(&field, 4).unwrap();
        let line = constant_tower(&field, vec![1, 0, 0], 3, TailPolicy::ConstantAfterLast);
        let ext = extend_tower(&line, &c).unwrap();
        let cmp = compare_derived_limits(&ext, 2, ExecMode::Sequential).unwrap();
        assert!(cmp.agree);
        assert_eq!(cmp.cobar[0], vec![1, 1, 1]);
        assert_eq!(cmp.cobar[1], vec![0, 0, 0]);
        assert_eq!(cmp.cobar[2], vec![0, 0, 0]);

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let base =
            random_module_tower(&field, 3, 3, 2, TailPolicy::ZeroAfterLast, &mut rng).unwrap();
        let ext = extend_tower(&base, &c).unwrap();
        let cmp = compare_derived_limits(&ext, 2, ExecMode::Sequential).unwrap();
        assert!(cmp.agree);
        for row in &cmp.cobar {
            assert!(row.iter().all(|&d| d == 0));
        }
    }

    #[test]
    fn extended_towers_have_flat_derived_limits() {
        for seed in 0..6u64 {
            let p = [2u64, 3, 5][(seed % 3) as usize];
            let field = build_field(p, 1).unwrap();
            let c = curve_coalgebra(&field, 6).unwrap();
            let window = 3 + (seed % 2) as usize;
            let levels = 2 + (seed % 3) as usize;
            let tail = if seed % 2 == 0 {
                TailPolicy::ConstantAfterLast
            } else {
                TailPolicy::ZeroAfterLast
            };
            let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
            let base = random_module_tower(&field, window, levels, 2, tail, &mut rng).unwrap();
            let ext = extend_tower(&base, &c).unwrap();
            let under = ext.underlying().unwrap();

            let ml = is_mittag_leffler(&under);
            assert!(ml.stable.iter().all(|&ok| ok));
            assert!(milnor_exact(&under).iter().all(|&ok| ok));

            let cmp = compare_derived_limits(&ext, 2, ExecMode::Sequential).unwrap();
            assert!(cmp.agree, "routes disagree at seed {seed}");
            assert_eq!(cmp.cobar[0], tower_limit(&under));
            for row in &cmp.cobar[1..] {
                assert!(row.iter().all(|&d| d == 0), "derived limit sticks at seed {seed}");
            }
        }
    }

    #[test]
    fn rejects_malformed_towers() {
        let field = build_field(3, 1).unwrap();
        let other = build_field(2, 1).unwrap();

        let err = ModuleTower::new(
            field.clone(),
            0,
            vec![vec![]],
            vec![],
            TailPolicy::ConstantAfterLast,
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidParameter(_)));

        let err = ModuleTower::new(
            field.clone(),
            2,
            vec![vec![1, 0], vec![1]],
            vec![GradedMatrix::zero(field.clone(), vec![1, 0], vec![1, 0])],
            TailPolicy::ConstantAfterLast,
        )
        .unwrap_err();
        assert!(matches!(err, Error::ShapeMismatch(_)));

        let err = ModuleTower::new(
            field.clone(),
            2,
            vec![vec![1, 0], vec![1, 0]],
            vec![GradedMatrix::zero(other.clone(), vec![1, 0], vec![1, 0])],
            TailPolicy::ConstantAfterLast,
        )
        .unwrap_err();
        assert!(matches!(err, Error::ContextMismatch(_)));

        let c = curve_coalgebra(&field, 4).unwrap();
        let wide = constant_tower(&field, vec![1; 7], 2, TailPolicy::ConstantAfterLast);
        let err = extend_tower(&wide, &c).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter(_)));

        let mismatched = constant_tower(&other, vec![1, 0], 2, TailPolicy::ConstantAfterLast);
        let err = extend_tower(&mismatched, &c).unwrap_err();
        assert!(matches!(err, Error::ContextMismatch(_)));

        // Scaling one degree block of a structure map breaks commutation
        // with the coaction, which mixes degrees.
        let line = constant_tower(&field, vec![1, 0, 0, 0], 2, TailPolicy::ConstantAfterLast);
        let ext = extend_tower(&line, &c).unwrap();
        let mut bad = ext.maps().to_vec();
        bad[0].push(1, 0, 0, 1).unwrap();
        let err = ComoduleTower::new(
            &c,
            ext.levels().to_vec(),
            bad,
            ext.window(),
            ext.tail(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidParameter(_)));
    }
}
