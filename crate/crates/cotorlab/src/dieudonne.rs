//! Dieudonné-style modules over a truncated Witt context: a free module
//! with a `sigma`-semilinear operator `F` (twist exponent +1) and a
//! `sigma^{-1}`-semilinear operator `V` (twist -1) satisfying
//! `F V = V F = p` exactly, together with exterior powers, Lie
//! dimensions, and point counts.
//!
//! Matrices are written columnwise on the fixed basis, `F(e_j) = Σ_i
//! f[i][j] e_i`, so composition twists the right factor: `mat(F ∘ G) =
//! f · sigma(g)`.
//!
//! Exterior powers are normalized by `F_Λ = Λ^q F` and `V_Λ = p^{1-q}
//! Λ^q V`; this is the choice that keeps the connected part of size
//! `binomial(d-1, q-1)` on the height-`d` module. The opposite choice
//! (dividing `F` instead) produces the dual group. The `p^{1-q}` division
//! costs `q - 1` digits of precision, so a module must carry working
//! precision at least `target + q - 1` to take a `q`-th power.

use itertools::Itertools;

use crate::coalgebra::{scaled_curve_coalgebra, GradedCoalgebra};
use crate::coeffring::{build_field, build_witt, rref, WittElt, WittRingCtx};
use crate::error::{Error, Result};
use crate::fgl::MAX_DUAL_DIM;
use crate::stabilizer::matrix_determinant;

/// A free Witt module with semilinear `F` (twist +1) and `V` (twist -1)
/// and a target torsion exponent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DieudonneModule {
    ctx: WittRingCtx,
    rank: usize,
    f: Vec<Vec<WittElt>>,
    v: Vec<Vec<WittElt>>,
    torsion: usize,
}

/// `mat(A ∘ B)` where `A` carries semilinear twist `sigma^twist`:
/// `A(B(e_j))` expands through `A` applied to `B`'s coefficients.
fn compose_twisted(
    ctx: &WittRingCtx,
    a: &[Vec<WittElt>],
    b: &[Vec<WittElt>],
    twist: i64,
) -> Vec<Vec<WittElt>> {
    let n = a.len();
    let mut out = vec![vec![ctx.zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = ctx.zero();
            for k in 0..n {
                let twisted = if twist >= 0 {
                    ctx.sigma(&b[k][j], twist as usize)
                } else {
                    ctx.sigma_inv(&b[k][j], (-twist) as usize)
                };
                acc = ctx.add(&acc, &ctx.mul(&a[i][k], &twisted));
            }
            out[i][j] = acc;
        }
    }
    out
}

fn is_p_times_identity(ctx: &WittRingCtx, m: &[Vec<WittElt>]) -> bool {
    let p = ctx.scalar(ctx.p() as i64);
    m.iter().enumerate().all(|(i, row)| {
        row.iter().enumerate().all(|(j, e)| {
            if i == j {
                *e == p
            } else {
                ctx.is_zero(e)
            }
        })
    })
}

fn relations_hold(ctx: &WittRingCtx, f: &[Vec<WittElt>], v: &[Vec<WittElt>]) -> bool {
    is_p_times_identity(ctx, &compose_twisted(ctx, f, v, 1))
        && is_p_times_identity(ctx, &compose_twisted(ctx, v, f, -1))
}

impl DieudonneModule {
    /// Wraps explicit `F` and `V` matrices after verifying shapes and the
    /// defining relation `F V = V F = p` at the context's precision.
    pub fn new(
        ctx: &WittRingCtx,
        f: Vec<Vec<WittElt>>,
        v: Vec<Vec<WittElt>>,
        torsion: usize,
    ) -> Result<DieudonneModule> {
        let rank = f.len();
        let square = |m: &[Vec<WittElt>]| {
            m.len() == rank
                && m.iter()
                    .all(|r| r.len() == rank && r.iter().all(|e| e.len() == ctx.degree()))
        };
        if rank == 0 || !square(&f) || !square(&v) {
            return Err(Error::ShapeMismatch(
                "operator matrices must be square of equal positive rank".into(),
            ));
        }
        if torsion as u32 > ctx.precision() {
            return Err(Error::InvalidParameter(format!(
                "torsion exponent {torsion} exceeds the precision {}",
                ctx.precision()
            )));
        }
        if !relations_hold(ctx, &f, &v) {
            return Err(Error::InvalidParameter(
                "operators do not satisfy FV = VF = p".into(),
            ));
        }
        Ok(DieudonneModule { ctx: ctx.clone(), rank, f, v, torsion })
    }

    pub fn ctx(&self) -> &WittRingCtx {
        &self.ctx
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Target torsion exponent `j`.
    pub fn torsion(&self) -> usize {
        self.torsion
    }

    /// Column-major matrix of `F` (twist +1).
    pub fn f_matrix(&self) -> &[Vec<WittElt>] {
        &self.f
    }

    /// Column-major matrix of `V` (twist -1).
    pub fn v_matrix(&self) -> &[Vec<WittElt>] {
        &self.v
    }
}

/// The rank-`d` module of the height-`d` Honda group: on the basis
/// `e_0, ..., e_{d-1}`, `F` shifts forward with `F(e_{d-1}) = p e_0` and
/// `V` shifts backward with `V(e_0) = e_{d-1}`.
pub fn honda_module(p: u64, d: usize, j: usize, n_prec: u32) -> Result<DieudonneModule> {
    if (j as u32) > n_prec {
        return Err(Error::InvalidParameter(format!(
            "torsion exponent {j} exceeds the working precision {n_prec}"
        )));
    }
    let ctx = build_witt(p, d, n_prec)?;
    let mut f = vec![vec![ctx.zero(); d]; d];
    let mut v = vec![vec![ctx.zero(); d]; d];
    let p_elt = ctx.scalar(p as i64);
    for col in 0..d {
        if col + 1 < d {
            f[col + 1][col] = ctx.one();
        } else {
            f[0][col] = p_elt.clone();
        }
        if col == 0 {
            v[d - 1][0] = ctx.one();
        } else {
            v[col - 1][col] = p_elt.clone();
        }
    }
    // d = 1 sets both rules on the same cell; the shift rule must win.
    if d == 1 {
        f[0][0] = p_elt;
        v[0][0] = ctx.one();
    }
    if !relations_hold(&ctx, &f, &v) {
        return Err(Error::Internal(
            "constructed shift operators do not satisfy FV = VF = p".into(),
        ));
    }
    Ok(DieudonneModule { ctx, rank: d, f, v, torsion: j })
}

/// `Λ^q` of a square matrix over the Witt context: rows and columns are
/// indexed by ascending `q`-subsets in lexicographic order and each entry
/// is the corresponding `q × q` minor.
pub fn operator_exterior_power(
    ctx: &WittRingCtx,
    mat: &[Vec<WittElt>],
    q: usize,
) -> Vec<Vec<WittElt>> {
    let n = mat.len();
    let subsets: Vec<Vec<usize>> = (0..n).combinations(q).collect();
    subsets
        .iter()
        .map(|rows| {
            subsets
                .iter()
                .map(|cols| {
                    let sub: Vec<Vec<WittElt>> = rows
                        .iter()
                        .map(|&r| cols.iter().map(|&c| mat[r][c].clone()).collect())
                        .collect();
                    matrix_determinant(ctx, &sub)
                })
                .collect()
        })
        .collect()
}

/// The `q`-th exterior power with `F_Λ = Λ^q F`, `V_Λ = p^{1-q} Λ^q V`,
/// reduced to the target precision `max(j, 1)` after the division.
pub fn exterior_power(m: &DieudonneModule, q: usize) -> Result<DieudonneModule> {
    if q == 0 || q > m.rank {
        return Err(Error::InvalidParameter(format!(
            "exterior exponent {q} outside 1..={}",
            m.rank
        )));
    }
    let ctx = &m.ctx;
    let target = m.torsion.max(1) as u32;
    let needed = target + q as u32 - 1;
    if ctx.precision() < needed {
        return Err(Error::InvalidParameter(format!(
            "working precision {} is below the {needed} needed for the {q}-th power",
            ctx.precision()
        )));
    }

    let f_big = operator_exterior_power(ctx, &m.f, q);
    let v_big = operator_exterior_power(ctx, &m.v, q);
    let divisor = ctx.p().pow(q as u32 - 1);
    let mut v_div = Vec::with_capacity(v_big.len());
    for row in &v_big {
        let mut out_row = Vec::with_capacity(row.len());
        for entry in row {
            if entry.iter().any(|&c| c % divisor != 0) {
                return Err(Error::InvalidParameter(format!(
                    "a {q}-th twist minor is not divisible by p^{}",
                    q - 1
                )));
            }
            out_row.push(entry.iter().map(|&c| c / divisor).collect::<WittElt>());
        }
        v_div.push(out_row);
    }

    let reduced_ctx = if ctx.precision() == target {
        ctx.clone()
    } else {
        build_witt(ctx.p(), ctx.degree(), target)?
    };
    let reduce_mat = |mat: Vec<Vec<WittElt>>| -> Vec<Vec<WittElt>> {
        mat.into_iter()
            .map(|row| row.into_iter().map(|e| ctx.reduce_elt(&e, target)).collect())
            .collect()
    };
    let f_red = reduce_mat(f_big);
    let v_red = reduce_mat(v_div);
    if !relations_hold(&reduced_ctx, &f_red, &v_red) {
        return Err(Error::Internal(
            "exterior power lost the relation FV = VF = p".into(),
        ));
    }
    Ok(DieudonneModule {
        ctx: reduced_ctx,
        rank: f_red.len(),
        f: f_red,
        v: v_red,
        torsion: m.torsion,
    })
}

/// Dimension of `coker(F mod p)` over the residue field: the tangent
/// dimension of the connected part.
pub fn lie_dimension(m: &DieudonneModule) -> usize {
    let field = m.ctx.residue_field();
    let mut rows: Vec<Vec<u64>> = (0..m.rank)
        .map(|i| (0..m.rank).map(|j| m.ctx.reduce_mod_p(&m.f[i][j])).collect())
        .collect();
    let pivots = rref(field, &mut rows);
    m.rank - pivots.len()
}

/// Height (the rank) and the order exponent `j · rank`: the `p^j`-torsion
/// points of the corresponding group form a group of order `p^{j · rank}`.
pub fn order_and_height(m: &DieudonneModule) -> (usize, usize) {
    (m.rank, m.torsion * m.rank)
}

/// The divided-power curve carried by the top exterior power: `p^j` basis
/// elements placed in degrees `0, d, 2d, ...`, one `∘`-factor of internal
/// degree `d` per power of the determinant line.
pub fn determinant_curve(p: u64, d: usize, j: usize) -> Result<GradedCoalgebra> {
    let count = p
        .checked_pow(j as u32)
        .and_then(|v| usize::try_from(v).ok())
        .filter(|&v| v <= MAX_DUAL_DIM)
        .ok_or_else(|| {
            Error::InvalidParameter(format!(
                "{p}^{j} basis elements exceed the {MAX_DUAL_DIM} guard"
            ))
        })?;
    let field = build_field(p, 1)?;
    scaled_curve_coalgebra(&field, count, d)
}
