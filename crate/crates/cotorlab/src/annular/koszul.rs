//! Round trip between a formal curve and its one-generator cohomology
//! algebra: compute the algebra, verify its exterior shape, run the bar
//! construction on it, and compare the collapsed answer with the curve.

use crate::coalgebra::cobar::CobarWord;
use crate::coalgebra::cotor::cotor;
use crate::coalgebra::{trivial_comodule, GradedCoalgebra};
use crate::coeffring::field::FiniteFieldCtx;
use crate::coeffring::homology::CochainComplex;
use crate::coeffring::matrix::GradedMatrix;
use crate::error::{Error, Result};
use crate::par::ExecMode;

use super::tangent_line;

/// Two-way comparison record: the cohomology algebra of the curve, the
/// generator's square, bar homology of that algebra, and the collapsed
/// dimension count set against the curve itself.
#[derive(Debug)]
pub struct KoszulReport {
    pub window: usize,
    pub scale: usize,
    /// Nonzero cohomology cells `(s, degree, dim)`; a curve gives exactly
    /// the unit and one class in `(1, scale)`.
    pub algebra_cells: Vec<(usize, usize, usize)>,
    /// Whether the generator's square was verified to vanish; `None` when
    /// its degree falls outside the window. Every bar cell that would
    /// consult the square sits inside the window, so `None` means no cell
    /// needs it.
    pub square_checked: Option<bool>,
    /// Bar homology cells `(s, degree, dim)`.
    pub bar_cells: Vec<(usize, usize, usize)>,
    pub collapsed_bar_dims: Vec<usize>,
    pub coalgebra_dims: Vec<usize>,
    pub dims_match: bool,
}

/// Runs the full round trip on a formal-curve coalgebra.
///
/// Steps: compute `cotor(k, c, k)` through the window and demand the
/// exterior shape; cross-check the generator's degree against the tangent
/// line; evaluate the generator's square by concatenating representatives;
/// build the bar complex of the algebra from its (verified) product table;
/// collapse bar homology to single-graded dimensions and compare with the
/// coalgebra's own dimensions below the window.
pub fn koszul_roundtrip(
    c: &GradedCoalgebra,
    window: usize,
    mode: ExecMode,
) -> Result<KoszulReport> {
    let scale = c.formal_curve_scale()?;
    if window <= scale {
        return Err(Error::InvalidParameter(format!(
            "window {window} cannot see the degree-{scale} generator"
        )));
    }
    let k = trivial_comodule(c)?;
    let a = cotor(&k, c, &k, window, mode)?;
    let algebra_cells = a.nonzero_cells();
    if algebra_cells != vec![(0, 0, 1), (1, scale, 1)] {
        return Err(Error::NotACurve(format!(
            "cohomology is not exterior on one class: {algebra_cells:?}"
        )));
    }
    // Split-filtration shape: the positive part of the algebra is the
    // tangent line, shifted up one cohomological degree.
    let (t_deg, _) = tangent_line(c, mode)?;
    if t_deg != scale {
        return Err(Error::Internal(format!(
            "tangent line in degree {t_deg}, algebra generator in degree {scale}"
        )));
    }

    // Square of the generator, as a class in the (2, 2·scale) cell.
    let square_checked = if 2 * scale < window {
        let field = a.cobar.complex.field().clone();
        let xi = a.slices[1][scale].reps[0].clone();
        let lvl1 = a.cobar.words(1, scale).to_vec();
        let two = 2 * scale;
        let mut sq = vec![0u64; a.cobar.dim(2, two)];
        for (i, wi) in lvl1.iter().enumerate() {
            if xi[i] == 0 {
                continue;
            }
            for (j, wj) in lvl1.iter().enumerate() {
                if xi[j] == 0 {
                    continue;
                }
                let word = CobarWord {
                    left: wi.left,
                    mids: wi.mids.iter().chain(&wj.mids).copied().collect(),
                    right: wj.right,
                };
                let pos = a.cobar.word_position(2, &word, two).ok_or_else(|| {
                    Error::Internal(
                        "concatenated word missing from the level-2 basis".into(),
                    )
                })?;
                sq[pos] = field.add(sq[pos], field.mul(xi[i], xi[j]));
            }
        }
        let coords = a.class_coordinates(2, two, &sq)?.ok_or_else(|| {
            Error::Internal("square of a cocycle escaped the cocycle space".into())
        })?;
        Some(coords.iter().all(|&v| v == 0))
    } else {
        None
    };
    if square_checked == Some(false) {
        return Err(Error::NotACurve("generator square is nonzero".into()));
    }

    // Bar complex over the verified product table: one positive-degree
    // generator whose square vanishes.
    let field = a.cobar.complex.field().clone();
    let bar = bar_homology_dims(&field, &[scale], &[vec![Vec::new()]], window, mode)?;
    let mut bar_cells = Vec::new();
    let mut collapsed_bar_dims = vec![0usize; window];
    for (s, row) in bar.iter().enumerate() {
        for (n, &dim) in row.iter().enumerate() {
            if dim > 0 {
                bar_cells.push((s, n, dim));
                collapsed_bar_dims[n] += dim;
            }
        }
    }
    let coalgebra_dims = c.basis().dims_below(window);
    let dims_match = collapsed_bar_dims == coalgebra_dims;

    Ok(KoszulReport {
        window,
        scale,
        algebra_cells,
        square_checked,
        bar_cells,
        collapsed_bar_dims,
        coalgebra_dims,
        dims_match,
    })
}

/// Homology dimensions `out[s][degree]` of the bar complex of an augmented
/// algebra presented by positive-degree generators and a product table.
///
/// `table[i][j]` lists `(k, coeff)` terms of the product of generators `i`
/// and `j`; products must be degree-homogeneous. Level `s` is spanned by
/// `s`-tuples of generators with total degree below the window, and the
/// differential collapses adjacent pairs with alternating signs. The level
/// axis is reversed to reuse the ascending-differential complex machinery,
/// then reversed back.
fn bar_homology_dims(
    field: &FiniteFieldCtx,
    gen_degrees: &[usize],
    table: &[Vec<Vec<(usize, u64)>>],
    window: usize,
    mode: ExecMode,
) -> Result<Vec<Vec<usize>>> {
    assert!(gen_degrees.iter().all(|&d| d > 0), "generators must be reduced");
    // levels[s][deg] lists the level-s tuples of that total degree.
    let mut levels: Vec<Vec<Vec<Vec<usize>>>> = Vec::new();
    let mut base = vec![Vec::new(); window];
    base[0].push(Vec::new());
    levels.push(base);
    loop {
        let prev = levels.last().unwrap();
        let mut next: Vec<Vec<Vec<usize>>> = vec![Vec::new(); window];
        let mut any = false;
        for deg in 0..window {
            for w in &prev[deg] {
                for (g, &gd) in gen_degrees.iter().enumerate() {
                    if deg + gd < window {
                        let mut t = w.clone();
                        t.push(g);
                        next[deg + gd].push(t);
                        any = true;
                    }
                }
            }
        }
        if !any {
            break;
        }
        levels.push(next);
    }
    let s_bar = levels.len() - 1;
    let dims: Vec<Vec<usize>> = levels
        .iter()
        .map(|per| per.iter().map(Vec::len).collect())
        .collect();

    // Bar differential B_s -> B_{s-1}, then the whole chain reversed so
    // that differentials ascend.
    let mut descending: Vec<GradedMatrix> = Vec::new();
    for s in 1..=s_bar {
        let mut mx =
            GradedMatrix::zero(field.clone(), dims[s].clone(), dims[s - 1].clone());
        for deg in 0..window {
            for (col, w) in levels[s][deg].iter().enumerate() {
                for u in 0..s.saturating_sub(1) {
                    for &(k, coeff) in &table[w[u]][w[u + 1]] {
                        if gen_degrees[k]
                            != gen_degrees[w[u]] + gen_degrees[w[u + 1]]
                        {
                            return Err(Error::Internal(
                                "product table is not degree-homogeneous".into(),
                            ));
                        }
                        let mut t = Vec::with_capacity(s - 1);
                        t.extend_from_slice(&w[..u]);
                        t.push(k);
                        t.extend_from_slice(&w[u + 2..]);
                        let row = levels[s - 1][deg]
                            .iter()
                            .position(|x| x == &t)
                            .ok_or_else(|| {
                                Error::Internal(
                                    "collapsed bar word missing from its level".into(),
                                )
                            })?;
                        let signed =
                            if u % 2 == 0 { coeff } else { field.neg(coeff) };
                        mx.push(deg, row, col, signed)?;
                    }
                }
            }
        }
        descending.push(mx);
    }
    let rev_dims: Vec<Vec<usize>> = (0..=s_bar).map(|j| dims[s_bar - j].clone()).collect();
    let rev_diffs: Vec<GradedMatrix> =
        (0..s_bar).map(|j| descending[s_bar - j - 1].clone()).collect();
    let complex = CochainComplex::new(field.clone(), rev_dims, rev_diffs)?;
    let h = complex.homology(mode);
    // The last stored level is B_0, which genuinely has no outgoing
    // differential, so its full-kernel convention is exact here.
    let mut out = vec![vec![0usize; window]; s_bar + 1];
    for s in 0..=s_bar {
        for n in 0..window {
            out[s][n] = h[s_bar - s][n].dim;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coalgebra::{curve_coalgebra, scaled_curve_coalgebra};
    use crate::coeffring::field::build_field;

    #[test]
    fn small_curve_algebra_has_total_dimension_two() {
        let f = build_field(3, 1).unwrap();
        let c = curve_coalgebra(&f, 6).unwrap();
        let rep = koszul_roundtrip(&c, 6, ExecMode::Sequential).unwrap();
        assert_eq!(rep.algebra_cells, vec![(0, 0, 1), (1, 1, 1)]);
        assert_eq!(rep.square_checked, Some(true));
    }

    #[test]
    fn bar_homology_lines_live_on_the_diagonal() {
        let f = build_field(2, 1).unwrap();
        let c = curve_coalgebra(&f, 6).unwrap();
        let rep = koszul_roundtrip(&c, 6, ExecMode::Sequential).unwrap();
        let expected: Vec<(usize, usize, usize)> =
            (0..6).map(|s| (s, s, 1)).collect();
        assert_eq!(rep.bar_cells, expected);
    }

    #[test]
    fn round_trip_recovers_the_curve_dimensions() {
        let f = build_field(5, 1).unwrap();
        let c = curve_coalgebra(&f, 6).unwrap();
        let rep = koszul_roundtrip(&c, 6, ExecMode::Sequential).unwrap();
        assert_eq!(rep.collapsed_bar_dims, vec![1; 6]);
        assert_eq!(rep.coalgebra_dims, vec![1; 6]);
        assert!(rep.dims_match);
    }

    #[test]
    fn round_trip_holds_across_truncations() {
        let f = build_field(3, 1).unwrap();
        for t in 2..=10 {
            let c = curve_coalgebra(&f, t).unwrap();
            let rep = koszul_roundtrip(&c, t, ExecMode::Sequential).unwrap();
            assert!(rep.dims_match, "truncation {t}");
        }
    }

    #[test]
    fn scaled_curves_round_trip_with_gaps() {
        let f = build_field(3, 1).unwrap();
        let c = scaled_curve_coalgebra(&f, 4, 2).unwrap();
        let rep = koszul_roundtrip(&c, 8, ExecMode::Sequential).unwrap();
        assert_eq!(rep.scale, 2);
        assert_eq!(rep.square_checked, Some(true));
        assert_eq!(
            rep.bar_cells,
            vec![(0, 0, 1), (1, 2, 1), (2, 4, 1), (3, 6, 1)]
        );
        assert_eq!(rep.collapsed_bar_dims, vec![1, 0, 1, 0, 1, 0, 1, 0]);
        assert!(rep.dims_match);
    }

    #[test]
    fn narrow_windows_are_rejected() {
        let f = build_field(3, 1).unwrap();
        let c = scaled_curve_coalgebra(&f, 4, 2).unwrap();
        let err = koszul_roundtrip(&c, 2, ExecMode::Sequential).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter(_)));
    }

    #[test]
    fn primitive_generators_are_rejected() {
        // Degrees look like a curve but the degree-2 element is primitive,
        // so the dual algebra is not generated in degree 1.
        let f = build_field(3, 1).unwrap();
        let c = GradedCoalgebra::new(
            f,
            vec!["e".into(), "a".into(), "b".into()],
            vec![0, 1, 2],
            vec![
                vec![(0, 0, 1)],
                vec![(0, 1, 1), (1, 0, 1)],
                vec![(0, 2, 1), (2, 0, 1)],
            ],
            0,
            3,
        )
        .unwrap();
        let err = koszul_roundtrip(&c, 3, ExecMode::Sequential).unwrap_err();
        assert!(matches!(err, Error::NotACurve(_)));
    }
}
