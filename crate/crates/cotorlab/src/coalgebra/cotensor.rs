//! Cotensor products of comodules and iterated coideal powers.
//!
//! The cotensor product `X □ Y` is the degreewise kernel of
//! `ψ_R ⊗ 1 − 1 ⊗ ψ_L : X ⊗ Y → X ⊗ C ⊗ Y`. The kernel inherits a left
//! coaction from `X` and a right coaction from `Y`, which is what lets the
//! construction iterate.

use std::collections::{BTreeMap, HashMap};

use crate::coalgebra::cobar::cobar;
use crate::coalgebra::{coideal, regular_comodule, GradedCoalgebra, GradedComodule};
use crate::coeffring::matrix::{nullspace, solve_in_span};
use crate::error::{Error, Result};
use crate::par::ExecMode;

/// A cotensor product `X □ Y` recorded inside `X ⊗ Y`.
///
/// `pair_basis[n]` is the basis of `(X ⊗ Y)_n` as `(x, y)` global-index
/// pairs, ordered by the degree of the `x` factor, then by global position.
/// `kernel_basis[n]` holds echelonized kernel rows in those coordinates;
/// row `i` is the element of `comodule` labeled `w{n}.{i}`.
#[derive(Debug, Clone)]
pub struct CotensorProduct {
    pub comodule: GradedComodule,
    pub pair_basis: Vec<Vec<(usize, usize)>>,
    pub kernel_basis: Vec<Vec<Vec<u64>>>,
}

/// Kernel of the coaction-balance map on `X ⊗ Y` in internal degrees below
/// `window`, as a comodule over `c`.
///
/// `x` must carry a right coaction and `y` a left one; these feed the
/// kernel condition. A left coaction on `x` or a right one on `y` induces
/// the matching coaction on the result, so cotensoring bicomodules yields
/// a bicomodule.
pub fn cotensor(
    x: &GradedComodule,
    c: &GradedCoalgebra,
    y: &GradedComodule,
    window: usize,
) -> Result<CotensorProduct> {
    if x.field() != c.field() || y.field() != c.field() {
        return Err(Error::ContextMismatch(
            "cotensor factors live over different fields".into(),
        ));
    }
    if !x.has_right() {
        return Err(Error::InvalidParameter(
            "left cotensor factor lacks a right coaction".into(),
        ));
    }
    if !y.has_left() {
        return Err(Error::InvalidParameter(
            "right cotensor factor lacks a left coaction".into(),
        ));
    }
    if window < 1 || window > c.trunc() {
        return Err(Error::InvalidParameter(format!(
            "window {window} outside 1..={}",
            c.trunc()
        )));
    }
    let field = c.field().clone();

    // Pair bases and position lookups per internal degree.
    let mut pair_basis: Vec<Vec<(usize, usize)>> = Vec::with_capacity(window);
    let mut pair_pos: Vec<HashMap<(usize, usize), usize>> = Vec::with_capacity(window);
    for n in 0..window {
        let mut pairs = Vec::new();
        for dx in 0..=n {
            for &xi in x.basis().in_degree(dx) {
                for &yj in y.basis().in_degree(n - dx) {
                    pairs.push((xi, yj));
                }
            }
        }
        let pos = pairs
            .iter()
            .enumerate()
            .map(|(i, &p)| (p, i))
            .collect::<HashMap<_, _>>();
        pair_basis.push(pairs);
        pair_pos.push(pos);
    }

    // Degreewise kernels of ψ_R ⊗ 1 − 1 ⊗ ψ_L, rows indexed by the
    // X ⊗ C ⊗ Y triples actually hit.
    let mut kernel_basis: Vec<Vec<Vec<u64>>> = Vec::with_capacity(window);
    for pairs in &pair_basis {
        let ncols = pairs.len();
        let mut rows: Vec<Vec<u64>> = Vec::new();
        let mut triple_pos: HashMap<(usize, usize, usize), usize> = HashMap::new();
        for (col, &(xi, yj)) in pairs.iter().enumerate() {
            for &(xk, a, co) in x.psi_r_of(xi) {
                let next = rows.len();
                let slot = *triple_pos.entry((xk, a, yj)).or_insert(next);
                if slot == next {
                    rows.push(vec![0; ncols]);
                }
                rows[slot][col] = field.add(rows[slot][col], co);
            }
            for &(a, yk, co) in y.psi_l_of(yj) {
                let next = rows.len();
                let slot = *triple_pos.entry((xi, a, yk)).or_insert(next);
                if slot == next {
                    rows.push(vec![0; ncols]);
                }
                rows[slot][col] = field.sub(rows[slot][col], co);
            }
        }
        kernel_basis.push(nullspace(&field, &rows, ncols));
    }

    // Global indexing of the kernel comodule: degree-ascending, row order
    // within a degree.
    let mut w_offset = vec![0usize; window + 1];
    for n in 0..window {
        w_offset[n + 1] = w_offset[n] + kernel_basis[n].len();
    }
    let mut labels = Vec::with_capacity(w_offset[window]);
    let mut degrees = Vec::with_capacity(w_offset[window]);
    for (n, rows) in kernel_basis.iter().enumerate() {
        for i in 0..rows.len() {
            labels.push(format!("w{n}.{i}"));
            degrees.push(n);
        }
    }

    // A coaction term sends a kernel vector into C ⊗ (X ⊗ Y) (or the
    // mirror); coassociativity keeps each graded component inside the
    // lower-degree kernel, where it is re-expressed in kernel coordinates.
    let solve_component =
        |n: usize, a: usize, comp: &[u64]| -> Result<Option<Vec<u64>>> {
            if comp.iter().all(|&v| v == 0) {
                return Ok(None);
            }
            let lower = n - c.basis().degree(a);
            let sol = solve_in_span(&field, &kernel_basis[lower], comp).ok_or_else(|| {
                Error::Internal(
                    "induced cotensor coaction escaped the kernel".into(),
                )
            })?;
            Ok(Some(sol))
        };

    let induced_left = if x.has_left() {
        let mut all_rows = Vec::with_capacity(w_offset[window]);
        for (n, rows) in kernel_basis.iter().enumerate() {
            for v in rows {
                let mut comps: BTreeMap<usize, Vec<u64>> = BTreeMap::new();
                for (col, &(xi, yj)) in pair_basis[n].iter().enumerate() {
                    if v[col] == 0 {
                        continue;
                    }
                    for &(a, xk, co) in x.psi_l_of(xi) {
                        let lower = n - c.basis().degree(a);
                        let pos = pair_pos[lower][&(xk, yj)];
                        let comp = comps
                            .entry(a)
                            .or_insert_with(|| vec![0; pair_basis[lower].len()]);
                        comp[pos] = field.add(comp[pos], field.mul(v[col], co));
                    }
                }
                let mut row = Vec::new();
                for (a, comp) in &comps {
                    if let Some(sol) = solve_component(n, *a, comp)? {
                        let lower = n - c.basis().degree(*a);
                        for (t, &coeff) in sol.iter().enumerate() {
                            if coeff != 0 {
                                row.push((*a, w_offset[lower] + t, coeff));
                            }
                        }
                    }
                }
                all_rows.push(row);
            }
        }
        Some(all_rows)
    } else {
        None
    };

    let induced_right = if y.has_right() {
        let mut all_rows = Vec::with_capacity(w_offset[window]);
        for (n, rows) in kernel_basis.iter().enumerate() {
            for v in rows {
                let mut comps: BTreeMap<usize, Vec<u64>> = BTreeMap::new();
                for (col, &(xi, yj)) in pair_basis[n].iter().enumerate() {
                    if v[col] == 0 {
                        continue;
                    }
                    for &(yk, a, co) in y.psi_r_of(yj) {
                        let lower = n - c.basis().degree(a);
                        let pos = pair_pos[lower][&(xi, yk)];
                        let comp = comps
                            .entry(a)
                            .or_insert_with(|| vec![0; pair_basis[lower].len()]);
                        comp[pos] = field.add(comp[pos], field.mul(v[col], co));
                    }
                }
                let mut row = Vec::new();
                for (a, comp) in &comps {
                    if let Some(sol) = solve_component(n, *a, comp)? {
                        let lower = n - c.basis().degree(*a);
                        for (t, &coeff) in sol.iter().enumerate() {
                            if coeff != 0 {
                                row.push((w_offset[lower] + t, *a, coeff));
                            }
                        }
                    }
                }
                all_rows.push(row);
            }
        }
        Some(all_rows)
    } else {
        None
    };

    let comodule = GradedComodule::new(c, labels, degrees, induced_left, induced_right)?;
    Ok(CotensorProduct { comodule, pair_basis, kernel_basis })
}

/// The tower of iterated cotensor powers of the coideal `M = C/η`.
///
/// `levels[k]` is the `k`-th power; `levels[0]` is `C` itself as a
/// bicomodule. `steps[k]` records how `levels[k+1]` sits inside
/// `M ⊗ levels[k]`.
#[derive(Debug)]
pub struct CotensorPower {
    pub window: usize,
    pub levels: Vec<GradedComodule>,
    pub steps: Vec<CotensorProduct>,
}

impl CotensorPower {
    pub fn final_level(&self) -> &GradedComodule {
        self.levels.last().expect("levels never empty")
    }

    /// Dimensions of the final power for degrees `0..window`.
    pub fn dims(&self) -> Vec<usize> {
        self.final_level().basis().dims_below(self.window)
    }
}

/// Iterated cotensor power `M^{□j}` of the coideal of a formal-curve
/// coalgebra, built one kernel at a time.
///
/// Each step first checks that the derived classes of the step being
/// cotensored vanish in the window; a nonzero class means the kernel
/// construction would not agree with its derived version, which only
/// happens away from formal curves.
pub fn cotensor_power(
    c: &GradedCoalgebra,
    j: usize,
    window: usize,
    mode: ExecMode,
) -> Result<CotensorPower> {
    c.formal_curve_scale()?;
    if window < 1 || window > c.trunc() {
        return Err(Error::InvalidParameter(format!(
            "window {window} outside 1..={}",
            c.trunc()
        )));
    }
    let m = coideal(c)?;
    let mut levels = vec![regular_comodule(c)?];
    let mut steps = Vec::new();
    for _ in 0..j {
        let prev = levels.last().expect("levels never empty");
        let cx = cobar(&m, c, prev, 3, window)?;
        let homology = cx.complex.homology(mode);
        for (s, row) in homology.iter().enumerate().take(3).skip(1) {
            if row.iter().any(|h| h.dim > 0) {
                return Err(Error::NotACurve(format!(
                    "cotensor power obstruction: nonzero derived classes in \
                     cohomological degree {s}"
                )));
            }
        }
        let step = cotensor(&m, c, prev, window)?;
        levels.push(step.comodule.clone());
        steps.push(step);
    }
    Ok(CotensorPower { window, levels, steps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coalgebra::{curve_coalgebra, scaled_curve_coalgebra};
    use crate::coeffring::field::build_field;

    #[test]
    fn power_zero_is_the_coalgebra() {
        let f = build_field(3, 1).unwrap();
        let c = curve_coalgebra(&f, 8).unwrap();
        let tower = cotensor_power(&c, 0, 8, ExecMode::Sequential).unwrap();
        assert_eq!(tower.dims(), vec![1; 8]);
        assert!(tower.steps.is_empty());
    }

    #[test]
    fn power_dims_step_down_like_ideal_powers() {
        let f = build_field(2, 1).unwrap();
        let c = curve_coalgebra(&f, 8).unwrap();
        for j in 0..=3 {
            let tower = cotensor_power(&c, j, 8, ExecMode::Sequential).unwrap();
            let expected: Vec<usize> =
                (0..8).map(|n| usize::from(n >= j && (n > 0 || j == 0))).collect();
            assert_eq!(tower.dims(), expected, "power {j}");
        }
    }

    #[test]
    fn kernel_vectors_of_the_square_are_constant() {
        // In m ⊗ m the balance condition forces all coefficients in one
        // degree to agree, so the echelonized kernel row is all ones.
        let f = build_field(5, 1).unwrap();
        let c = curve_coalgebra(&f, 8).unwrap();
        let tower = cotensor_power(&c, 2, 8, ExecMode::Sequential).unwrap();
        let step = &tower.steps[1];
        assert_eq!(step.pair_basis[4].len(), 3);
        assert_eq!(step.kernel_basis[4], vec![vec![1, 1, 1]]);
    }

    #[test]
    fn cotensor_is_associative_on_dimensions() {
        let f = build_field(3, 1).unwrap();
        let c = curve_coalgebra(&f, 8).unwrap();
        let m = coideal(&c).unwrap();
        let mm = cotensor(&m, &c, &m, 8).unwrap();
        let left = cotensor(&mm.comodule, &c, &m, 8).unwrap();
        let right = cotensor(&m, &c, &mm.comodule, 8).unwrap();
        let ld = left.comodule.basis().dims_below(8);
        let rd = right.comodule.basis().dims_below(8);
        assert_eq!(ld, rd);
        let expected: Vec<usize> = (0..8).map(|n| usize::from(n >= 3)).collect();
        assert_eq!(ld, expected);
    }

    #[test]
    fn scaled_curves_scale_the_power_pattern() {
        let f = build_field(2, 1).unwrap();
        let c = scaled_curve_coalgebra(&f, 4, 2).unwrap();
        let tower = cotensor_power(&c, 2, 8, ExecMode::Sequential).unwrap();
        assert_eq!(tower.dims(), vec![0, 0, 0, 0, 1, 0, 1, 0]);
    }

    #[test]
    fn non_curve_input_is_rejected() {
        let f = build_field(3, 1).unwrap();
        let c = GradedCoalgebra::new(
            f,
            vec!["e".into(), "a".into(), "b".into()],
            vec![0, 1, 1],
            vec![
                vec![(0, 0, 1)],
                vec![(0, 1, 1), (1, 0, 1)],
                vec![(0, 2, 1), (2, 0, 1)],
            ],
            0,
            2,
        )
        .unwrap();
        let err = cotensor_power(&c, 1, 2, ExecMode::Sequential).unwrap_err();
        assert!(matches!(err, Error::NotACurve(_)));
    }
}
