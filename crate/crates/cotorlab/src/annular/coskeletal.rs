//! Assembly of the second-page tower from cobar cochain data.
//!
//! Each cell `(s, t)` holds a single dimension, living in internal degree
//! `m = (s+t)/2` when `s+t` is even and `m = (s+t-1)/2` when odd. Cells
//! whose degree falls outside the window are not computable from a
//! truncated coalgebra and are reported as `None`; within a row the `Some`
//! cells form a prefix because the degree grows with `t`.

use crate::coalgebra::cobar::cobar;
use crate::coalgebra::{GradedCoalgebra, GradedComodule};
use crate::coeffring::matrix::rank_kernel_cokernel;
use crate::error::{Error, Result};
use crate::par::ExecMode;

/// The assembled tower of one coefficient pair, with pro-constancy data.
///
/// `cells[s][t]` is the dimension at `(s, t)` or `None` when its internal
/// degree is at or beyond the window. `stabilization[s]` is the least
/// `t0` from which the computed cells of row `s` are constant, or `None`
/// for a row with no computable cells. `pro_constant` holds when every
/// row stabilizes strictly before its last computed cell, so the constant
/// value is confirmed by at least one repeat within the computed range.
#[derive(Debug)]
pub struct TowerPage {
    pub s_top: usize,
    pub t_max: usize,
    pub window: usize,
    pub cells: Vec<Vec<Option<usize>>>,
    pub stabilization: Vec<Option<usize>>,
    pub pro_constant: bool,
}

/// Builds the tower page for coefficients `(m, n)` over `c`, reporting
/// rows `s = 0..=s_top` and columns `t = 0..=t_max`.
///
/// The cell recursion consumes cochain, coboundary, and cohomology
/// dimensions of the cobar complex:
///
/// - `s + t` even, degree `m = (s+t)/2`: cell = previous column plus
///   cochains-mod-coboundaries, `D(s, t-1) + C^t_m - B^t_m`;
/// - `s + t` odd, degree `m = (s+t-1)/2`: cell = two columns back plus
///   cohomology, `D(s, t-2) + H^{t-1}_m`;
/// - `D(s, t) = 0` for `t < 0`.
///
/// Every even in-window cell is checked against the six-term exact-couple
/// bookkeeping `D(s+1,t) - D(s+1,t-1) + C^t_m - D(s,t) + D(s,t-1) = 0`,
/// which ties the assembled page back to independently computed ranks.
pub fn coskeletal_page(
    m: &GradedComodule,
    c: &GradedCoalgebra,
    n: &GradedComodule,
    s_top: usize,
    t_max: usize,
    window: usize,
    mode: ExecMode,
) -> Result<TowerPage> {
    if t_max < 1 {
        return Err(Error::InvalidParameter(
            "tower page needs at least columns 0..=1".into(),
        ));
    }
    let cx = cobar(m, c, n, t_max, window)?;

    // Per-level data: cochain dims, differential ranks.
    let c_dims: Vec<Vec<usize>> = (0..=t_max)
        .map(|t| (0..window).map(|g| cx.dim(t, g)).collect())
        .collect();
    let ranks: Vec<Vec<usize>> = (0..t_max)
        .map(|t| {
            rank_kernel_cokernel(cx.complex.differential(t), mode)
                .into_iter()
                .map(|r| r.rank)
                .collect()
        })
        .collect();
    let boundary = |t: usize, g: usize| -> usize {
        if t == 0 {
            0
        } else {
            ranks[t - 1][g]
        }
    };
    // H^t = ker d^t / im d^{t-1}; defined for t < t_max.
    let cohomology =
        |t: usize, g: usize| -> usize { c_dims[t][g] - ranks[t][g] - boundary(t, g) };

    // Rows 0..=s_top+1; the extra row feeds the six-term check.
    let mut cells: Vec<Vec<Option<usize>>> = vec![vec![None; t_max + 1]; s_top + 2];
    for s in 0..=s_top + 1 {
        for t in 0..=t_max {
            let at = |tt: isize| -> Option<usize> {
                if tt < 0 {
                    Some(0)
                } else {
                    cells[s][tt as usize]
                }
            };
            cells[s][t] = if (s + t) % 2 == 0 {
                let g = (s + t) / 2;
                if g >= window {
                    None
                } else {
                    at(t as isize - 1).map(|prev| prev + c_dims[t][g] - boundary(t, g))
                }
            } else {
                let g = (s + t - 1) / 2;
                if g >= window {
                    None
                } else if t == 0 {
                    Some(0)
                } else {
                    at(t as isize - 2).map(|prev| prev + cohomology(t - 1, g))
                }
            };
        }
    }

    // Six-term balance at every even computed cell of the reported rows.
    for s in 0..=s_top {
        for t in 0..=t_max {
            if (s + t) % 2 != 0 {
                continue;
            }
            let g = (s + t) / 2;
            if g >= window {
                continue;
            }
            let fetch = |ss: usize, tt: isize| -> Option<i64> {
                if tt < 0 {
                    Some(0)
                } else {
                    cells[ss][tt as usize].map(|v| v as i64)
                }
            };
            let (Some(a), Some(b), Some(d0), Some(d1)) = (
                fetch(s + 1, t as isize),
                fetch(s + 1, t as isize - 1),
                fetch(s, t as isize),
                fetch(s, t as isize - 1),
            ) else {
                continue;
            };
            let balance = a - b + c_dims[t][g] as i64 - d0 + d1;
            if balance != 0 {
                return Err(Error::Internal(format!(
                    "exact-couple bookkeeping off by {balance} at (s={s}, t={t})"
                )));
            }
        }
    }

    cells.truncate(s_top + 1);
    let mut stabilization = Vec::with_capacity(cells.len());
    let mut pro_constant = true;
    for row in &cells {
        let vals: Vec<usize> = row.iter().map_while(|c| *c).collect();
        let t0 = vals
            .last()
            .map(|&last| vals.iter().rposition(|&v| v != last).map_or(0, |i| i + 1));
        pro_constant &= matches!(t0, Some(t0) if t0 + 2 <= vals.len());
        stabilization.push(t0);
    }

    Ok(TowerPage { s_top, t_max, window, cells, stabilization, pro_constant })
}
