//! Filtration strata of cotensor powers, the tangent line, the assembled
//! second-page tower, and a Koszul-type round-trip over the bar complex.
//!
//! The coideal powers `M^{□k}` of a formal-curve coalgebra form a tower
//! under pinch maps (reduced left coaction followed by re-expression in
//! the next power). A stratum `C[n, n']` is the degreewise kernel of the
//! iterated pinch `M^{□n} → M^{□(n'+1)}`; its graded dimensions drop out
//! of rank-nullity once the pinch is checked to be onto in each degree.

pub mod coskeletal;
pub mod koszul;

pub use coskeletal::{coskeletal_page, TowerPage};
pub use koszul::{koszul_roundtrip, KoszulReport};

use std::collections::HashMap;

use crate::coalgebra::{
    coideal_index, cotensor_power, CotensorPower, GradedCoalgebra,
};
use crate::coeffring::matrix::{nullspace, solve_in_span, GradedMatrix};
use crate::error::{Error, Result};
use crate::par::ExecMode;

/// A stratum `C[n, n']` of the annular tower.
///
/// `dims[g]` is the dimension in internal degree `g`; `reps[g]` holds
/// echelonized representatives in the coordinates of the `n`-th cotensor
/// power's degree-`g` basis.
#[derive(Debug)]
pub struct AnnularReport {
    pub n: usize,
    pub n_prime: usize,
    pub window: usize,
    pub dims: Vec<usize>,
    pub reps: Vec<Vec<Vec<u64>>>,
}

/// The pinch map `levels[k] → levels[k+1]` of a cotensor-power tower, in
/// the kernel coordinates both powers are stored in.
///
/// Applies the left coaction, drops grouplike terms, and re-solves the
/// result against the kernel basis defining the next power; coaction
/// coassociativity guarantees the solve succeeds.
pub fn pinch_matrix(
    c: &GradedCoalgebra,
    tower: &CotensorPower,
    k: usize,
) -> Result<GradedMatrix> {
    if k + 1 >= tower.levels.len() {
        return Err(Error::InvalidParameter(format!(
            "pinch index {k} outside the computed tower"
        )));
    }
    let field = c.field().clone();
    let window = tower.window;
    let src = &tower.levels[k];
    let step = &tower.steps[k];
    let src_dims = src.basis().dims_below(window);
    let tgt_dims = step.comodule.basis().dims_below(window);
    let mut out = GradedMatrix::zero(field.clone(), src_dims, tgt_dims);

    let pair_pos: Vec<HashMap<(usize, usize), usize>> = step
        .pair_basis
        .iter()
        .map(|pairs| {
            pairs
                .iter()
                .enumerate()
                .map(|(i, &p)| (p, i))
                .collect::<HashMap<_, _>>()
        })
        .collect();

    for w in 0..src.basis().len() {
        let g = src.basis().degree(w);
        if g >= window {
            continue;
        }
        let mut pv = vec![0u64; step.pair_basis[g].len()];
        for &(a, w2, co) in src.psi_l_of(w) {
            let Some(mi) = coideal_index(c, a) else { continue };
            let pos = pair_pos[g][&(mi, w2)];
            pv[pos] = field.add(pv[pos], co);
        }
        let sol = solve_in_span(&field, &step.kernel_basis[g], &pv).ok_or_else(|| {
            Error::Internal("pinch image escaped the cotensor kernel".into())
        })?;
        for (row, &coeff) in sol.iter().enumerate() {
            if coeff != 0 {
                out.push(g, row, src.basis().local(w), coeff)?;
            }
        }
    }
    Ok(out)
}

/// The stratum `C[n, n']` of the annular tower of `c`, reported for
/// internal degrees below `window`.
///
/// Computed as the degreewise kernel of the iterated pinch map
/// `M^{□n} → M^{□(n'+1)}`; the pinch must be onto in every degree of the
/// window, which is part of what certifies formal-curve input.
pub fn annular_stratum(
    c: &GradedCoalgebra,
    n: usize,
    n_prime: usize,
    window: usize,
    mode: ExecMode,
) -> Result<AnnularReport> {
    if n > n_prime || n_prime >= window {
        return Err(Error::InvalidParameter(format!(
            "stratum indices must satisfy n <= n' < window, got [{n}, {n_prime}] at {window}"
        )));
    }
    let tower = cotensor_power(c, n_prime + 1, window, mode)?;
    let field = c.field().clone();

    let mut map = pinch_matrix(c, &tower, n)?;
    for k in (n + 1)..=n_prime {
        map = pinch_matrix(c, &tower, k)?.compose(&map)?;
    }

    let src = &tower.levels[n];
    let tgt = &tower.levels[n_prime + 1];
    let mut dims = Vec::with_capacity(window);
    let mut reps = Vec::with_capacity(window);
    for g in 0..window {
        let dense = map.dense(g);
        let kernel = nullspace(&field, &dense, src.basis().dim_in(g));
        let rank = src.basis().dim_in(g) - kernel.len();
        if rank != tgt.basis().dim_in(g) {
            return Err(Error::NotACurve(format!(
                "tower map to power {} fails to be onto in degree {g}",
                n_prime + 1
            )));
        }
        dims.push(kernel.len());
        reps.push(kernel);
    }
    Ok(AnnularReport { n, n_prime, window, dims, reps })
}

/// The bottom stratum `C[1,1]`: a single class whose degree is the scale
/// of the curve.
///
/// Cross-checked against the dual-algebra oracle: the quotient of the
/// dual maximal ideal by its square must be one line in the same degree.
/// Returns the degree and the representative in the coideal basis.
pub fn tangent_line(
    c: &GradedCoalgebra,
    mode: ExecMode,
) -> Result<(usize, Vec<u64>)> {
    let scale = c.formal_curve_scale()?;
    let window = (2 * scale + 1).min(c.trunc());
    let stratum = annular_stratum(c, 1, 1, window, mode)?;
    let total: usize = stratum.dims.iter().sum();
    let degree = stratum.dims.iter().position(|&d| d > 0);
    let (Some(degree), 1) = (degree, total) else {
        return Err(Error::NotACurve(format!(
            "tangent stratum has total dimension {total}, not a line"
        )));
    };

    // Dual oracle: m/m^2 of the dual algebra.
    let table = c.dual_product();
    let m: Vec<usize> = (0..c.basis().len()).filter(|&i| i != c.eta()).collect();
    let mut square_degrees = vec![false; c.trunc()];
    for &i in &m {
        for &j in &m {
            for &(k, co) in &table[i][j] {
                if co != 0 {
                    square_degrees[c.basis().degree(k)] = true;
                }
            }
        }
    }
    let cotangent: Vec<usize> = m
        .iter()
        .map(|&i| c.basis().degree(i))
        .filter(|&d| !square_degrees[d])
        .collect();
    if cotangent != vec![degree] {
        return Err(Error::NotACurve(format!(
            "dual cotangent degrees {cotangent:?} disagree with stratum degree {degree}"
        )));
    }

    let rep = stratum.reps[degree][0].clone();
    Ok((degree, rep))
}
