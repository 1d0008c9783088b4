//! The twisted endomorphism ring `W(k)<S> / (S^d = p, S a = sigma(a) S)`
//! over a truncated Witt context, its unit group, and the determinant
//! character carried by left multiplication.
//!
//! Left multiplication by `g` is linear for the *right* `W(k)`-module
//! structure on the basis `1, S, ..., S^{d-1}` (it is only semilinear for
//! the left one), so matrices are written with coefficients on the right:
//! `g · S^j = Σ_i S^i · c_{ij}`. Scalars in the center see the Galois norm,
//! and the top alternating component of the `d`-fold tensor of the basis
//! line transforms by exactly the same scalar, which is the content of
//! [`beta_star_action`].

use rand::Rng;

use crate::coeffring::{WittElt, WittRingCtx};
use crate::error::{Error, Result};

/// An element `a_0 + a_1 S + ... + a_{d-1} S^{d-1}` of the twisted ring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EndoElement {
    coeffs: Vec<WittElt>,
}

impl EndoElement {
    /// Wraps a coefficient sequence after validating it against the
    /// context: `d` coefficients, each a Witt element with entries below
    /// `p^N`.
    pub fn new(ctx: &WittRingCtx, coeffs: Vec<WittElt>) -> Result<EndoElement> {
        let d = ctx.degree();
        if coeffs.len() != d {
            return Err(Error::ShapeMismatch(format!(
                "expected {d} coefficients, got {}",
                coeffs.len()
            )));
        }
        for (i, a) in coeffs.iter().enumerate() {
            if a.len() != d {
                return Err(Error::ShapeMismatch(format!(
                    "coefficient {i} has {} entries, expected {d}",
                    a.len()
                )));
            }
            if a.iter().any(|&c| c >= ctx.pn()) {
                return Err(Error::ContextMismatch(format!(
                    "coefficient {i} has entries outside Z/{}",
                    ctx.pn()
                )));
            }
        }
        Ok(EndoElement { coeffs })
    }

    /// The multiplicative identity.
    pub fn one(ctx: &WittRingCtx) -> EndoElement {
        let mut coeffs = vec![ctx.zero(); ctx.degree()];
        coeffs[0] = ctx.one();
        EndoElement { coeffs }
    }

    /// The twisting generator `S` itself; for `d = 1` this is the scalar
    /// `p`, matching `S^d = p`.
    pub fn s(ctx: &WittRingCtx) -> EndoElement {
        let d = ctx.degree();
        let mut coeffs = vec![ctx.zero(); d];
        if d == 1 {
            coeffs[0] = ctx.scalar(ctx.p() as i64);
        } else {
            coeffs[1] = ctx.one();
        }
        EndoElement { coeffs }
    }

    /// A central-or-not scalar `a` placed in the `S^0` slot.
    pub fn scalar(ctx: &WittRingCtx, a: WittElt) -> Result<EndoElement> {
        let mut coeffs = vec![ctx.zero(); ctx.degree()];
        coeffs[0] = a;
        EndoElement::new(ctx, coeffs)
    }

    /// Coefficients `a_0, ..., a_{d-1}`.
    pub fn coeffs(&self) -> &[WittElt] {
        &self.coeffs
    }
}

fn check(ctx: &WittRingCtx, g: &EndoElement) -> Result<()> {
    if g.coeffs.len() != ctx.degree()
        || g.coeffs.iter().any(|a| a.len() != ctx.degree())
        || g.coeffs.iter().flatten().any(|&c| c >= ctx.pn())
    {
        return Err(Error::ContextMismatch(
            "element was not built over this Witt context".into(),
        ));
    }
    Ok(())
}

/// Product in the twisted ring: `(a S^i)(b S^j) = a sigma^i(b) S^{i+j}`
/// with `S^{d+r} = p S^r`.
pub fn multiply(
    ctx: &WittRingCtx,
    g: &EndoElement,
    h: &EndoElement,
) -> Result<EndoElement> {
    check(ctx, g)?;
    check(ctx, h)?;
    let d = ctx.degree();
    let p = ctx.scalar(ctx.p() as i64);
    let mut out = vec![ctx.zero(); d];
    for (i, a) in g.coeffs.iter().enumerate() {
        if ctx.is_zero(a) {
            continue;
        }
        for (j, b) in h.coeffs.iter().enumerate() {
            let mut term = ctx.mul(a, &ctx.sigma(b, i));
            if i + j >= d {
                term = ctx.mul(&term, &p);
            }
            let k = (i + j) % d;
            out[k] = ctx.add(&out[k], &term);
        }
    }
    Ok(EndoElement { coeffs: out })
}

/// Units are exactly the elements whose `S^0` coefficient is a unit: the
/// ring is local and `S` generates the maximal ideal.
pub fn is_unit(ctx: &WittRingCtx, g: &EndoElement) -> bool {
    assert_eq!(g.coeffs.len(), ctx.degree(), "element from a foreign context");
    ctx.is_unit(&g.coeffs[0])
}

/// Matrix of left multiplication by `g` in the right-module basis
/// `1, S, ..., S^{d-1}`: entry `[i][j]` is `c_{ij}` in
/// `g · S^j = Σ_i S^i · c_{ij}`.
pub fn left_mult_matrix(
    ctx: &WittRingCtx,
    g: &EndoElement,
) -> Result<Vec<Vec<WittElt>>> {
    check(ctx, g)?;
    let d = ctx.degree();
    let p = ctx.scalar(ctx.p() as i64);
    let mut mat = vec![vec![ctx.zero(); d]; d];
    for j in 0..d {
        for (k, a) in g.coeffs.iter().enumerate() {
            // a S^{k+j} = S^{(k+j) mod d} p^{floor((k+j)/d)} sigma^{-((k+j) mod d)}(a)
            let i = (k + j) % d;
            let mut c = ctx.sigma_inv(a, i);
            if k + j >= d {
                c = ctx.mul(&c, &p);
            }
            mat[i][j] = ctx.add(&mat[i][j], &c);
        }
    }
    Ok(mat)
}

/// Determinant of a square matrix over the Witt context by Laplace
/// expansion along the first row; sizes stay at most the context degree.
pub fn matrix_determinant(ctx: &WittRingCtx, mat: &[Vec<WittElt>]) -> WittElt {
    let n = mat.len();
    assert!(mat.iter().all(|row| row.len() == n), "determinant of a non-square matrix");
    if n == 0 {
        return ctx.one();
    }
    if n == 1 {
        return mat[0][0].clone();
    }
    let mut acc = ctx.zero();
    for (j, top) in mat[0].iter().enumerate() {
        if ctx.is_zero(top) {
            continue;
        }
        let minor: Vec<Vec<WittElt>> = mat[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(c, _)| *c != j)
                    .map(|(_, v)| v.clone())
                    .collect()
            })
            .collect();
        let cofactor = ctx.mul(top, &matrix_determinant(ctx, &minor));
        acc = if j % 2 == 0 {
            ctx.add(&acc, &cofactor)
        } else {
            ctx.sub(&acc, &cofactor)
        };
    }
    acc
}

/// Determinant of left multiplication by `g`. Multiplicative, fixed by
/// `sigma`, a unit exactly when `g` is, and equal to the Galois norm on
/// scalars.
pub fn determinant(ctx: &WittRingCtx, g: &EndoElement) -> Result<WittElt> {
    Ok(matrix_determinant(ctx, &left_mult_matrix(ctx, g)?))
}

/// Action of a unit `g` on the alternating top component of
/// `S^0 b ⊗ S^1 b ⊗ ... ⊗ S^{d-1} b`: each slot is re-expanded in the
/// right-module basis and the coefficient of the fully antisymmetrized
/// basis tensor is read off by walking all index functions with an
/// inversion-count sign. Equals [`determinant`] through an independent
/// expansion.
pub fn beta_star_action(ctx: &WittRingCtx, g: &EndoElement) -> Result<WittElt> {
    check(ctx, g)?;
    if !is_unit(ctx, g) {
        return Err(Error::InvalidParameter(
            "the basis-line action is only defined for units".into(),
        ));
    }
    let d = ctx.degree();
    let mat = left_mult_matrix(ctx, g)?;
    let mut acc = ctx.zero();
    let total = (d as u64).pow(d as u32);
    let mut indices = vec![0usize; d];
    for step in 0..total {
        let mut v = step;
        for slot in indices.iter_mut() {
            *slot = (v % d as u64) as usize;
            v /= d as u64;
        }
        // Repeated rows die in the alternating quotient.
        let mut seen = 0u32;
        let mut degenerate = false;
        for &i in &indices {
            if seen & (1 << i) != 0 {
                degenerate = true;
                break;
            }
            seen |= 1 << i;
        }
        if degenerate {
            continue;
        }
        let mut inversions = 0usize;
        for a in 0..d {
            for b in a + 1..d {
                if indices[a] > indices[b] {
                    inversions += 1;
                }
            }
        }
        let mut term = ctx.one();
        for (j, &i) in indices.iter().enumerate() {
            term = ctx.mul(&term, &mat[i][j]);
        }
        acc = if inversions % 2 == 0 {
            ctx.add(&acc, &term)
        } else {
            ctx.sub(&acc, &term)
        };
    }
    Ok(acc)
}

/// A uniformly random element: every Witt coefficient entry drawn mod
/// `p^N`.
pub fn random_element(ctx: &WittRingCtx, rng: &mut impl Rng) -> EndoElement {
    let d = ctx.degree();
    let coeffs = (0..d)
        .map(|_| (0..d).map(|_| rng.gen_range(0..ctx.pn())).collect())
        .collect();
    EndoElement { coeffs }
}

/// A uniformly random unit: resamples the `S^0` coefficient until it is
/// invertible.
pub fn random_unit(ctx: &WittRingCtx, rng: &mut impl Rng) -> EndoElement {
    let mut g = random_element(ctx, rng);
    while !ctx.is_unit(&g.coeffs[0]) {
        g.coeffs[0] = (0..ctx.degree()).map(|_| rng.gen_range(0..ctx.pn())).collect();
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffring::{build_witt, galois_norm};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn defining_relations_hold() {
        let w = build_witt(3, 2, 2).unwrap();
        let one = EndoElement::one(&w);
        let s = EndoElement::s(&w);
        let t = EndoElement::scalar(&w, w.gen()).unwrap();

        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let g = random_element(&w, &mut rng);
            assert_eq!(multiply(&w, &one, &g).unwrap(), g);
            assert_eq!(multiply(&w, &g, &one).unwrap(), g);
        }

        // S * S^{d-1} = p.
        let p_elt = EndoElement::scalar(&w, w.scalar(3)).unwrap();
        assert_eq!(multiply(&w, &s, &s).unwrap(), p_elt);

        // S t = sigma(t) S = -t S since t^2 = -1.
        let st = multiply(&w, &s, &t).unwrap();
        let minus_t = EndoElement::scalar(&w, w.neg(&w.gen())).unwrap();
        let minus_ts = multiply(&w, &minus_t, &s).unwrap();
        assert_eq!(st, minus_ts);

        // p is central and multiplication is associative on samples.
        for _ in 0..10 {
            let g = random_element(&w, &mut rng);
            let h = random_element(&w, &mut rng);
            let k = random_element(&w, &mut rng);
            assert_eq!(
                multiply(&w, &p_elt, &g).unwrap(),
                multiply(&w, &g, &p_elt).unwrap()
            );
            let gh_k = multiply(&w, &multiply(&w, &g, &h).unwrap(), &k).unwrap();
            let g_hk = multiply(&w, &g, &multiply(&w, &h, &k).unwrap()).unwrap();
            assert_eq!(gh_k, g_hk);
        }
    }

    #[test]
    fn units_are_detected_from_the_constant_term() {
        let w = build_witt(3, 2, 2).unwrap();
        assert!(is_unit(&w, &EndoElement::one(&w)));
        assert!(!is_unit(&w, &EndoElement::s(&w)));
        let mut one_plus_s = EndoElement::one(&w);
        one_plus_s.coeffs[1] = w.one();
        assert!(is_unit(&w, &one_plus_s));
    }

    #[test]
    fn left_multiplication_matrices_match_frozen_examples() {
        let w = build_witt(3, 2, 2).unwrap();
        let id = left_mult_matrix(&w, &EndoElement::one(&w)).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let expect = if i == j { w.one() } else { w.zero() };
                assert_eq!(id[i][j], expect);
            }
        }

        // Scalars act diagonally through sigma conjugates.
        let t = EndoElement::scalar(&w, w.gen()).unwrap();
        let tm = left_mult_matrix(&w, &t).unwrap();
        assert_eq!(tm[0][0], w.gen());
        assert_eq!(tm[1][1], w.sigma_inv(&w.gen(), 1));
        assert!(w.is_zero(&tm[0][1]) && w.is_zero(&tm[1][0]));
        assert_eq!(determinant(&w, &t).unwrap(), w.one());

        // 1 + S: columns (1,1) and (3,1), determinant 1 - 3 = 7 mod 9.
        let mut g = EndoElement::one(&w);
        g.coeffs[1] = w.one();
        let m = left_mult_matrix(&w, &g).unwrap();
        assert_eq!(m[0][0], w.one());
        assert_eq!(m[1][0], w.one());
        assert_eq!(m[0][1], w.scalar(3));
        assert_eq!(m[1][1], w.one());
        assert_eq!(determinant(&w, &g).unwrap(), w.scalar(7));
    }

    #[test]
    fn determinant_of_the_twist_is_signed_p() {
        for (p, d, n) in [(3u64, 2usize, 2u32), (2, 3, 3), (5, 2, 2)] {
            let w = build_witt(p, d, n).unwrap();
            let sign = if d % 2 == 1 { 1 } else { -1 };
            let expect = w.scalar(sign * p as i64);
            assert_eq!(determinant(&w, &EndoElement::s(&w)).unwrap(), expect);
        }
    }

    #[test]
    fn determinant_is_a_sigma_fixed_multiplicative_norm() {
        for (p, d, n) in [(3u64, 2usize, 2u32), (2, 3, 3)] {
            let w = build_witt(p, d, n).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(5 + d as u64);
            for _ in 0..50 {
                let g = random_element(&w, &mut rng);
                let h = random_element(&w, &mut rng);
                let dg = determinant(&w, &g).unwrap();
                let dh = determinant(&w, &h).unwrap();
                let dgh = determinant(&w, &multiply(&w, &g, &h).unwrap()).unwrap();
                assert_eq!(dgh, w.mul(&dg, &dh));
                assert_eq!(w.sigma(&dg, 1), dg);
                assert_eq!(is_unit(&w, &g), w.is_unit(&dg));
            }
            for k in 0..20u64 {
                let a: WittElt = (0..d).map(|i| (k * 7 + i as u64 * 3 + 1) % w.pn()).collect();
                let g = EndoElement::scalar(&w, a.clone()).unwrap();
                let norm = galois_norm(&w, &a).unwrap();
                assert_eq!(determinant(&w, &g).unwrap(), w.scalar(norm as i64));
            }
        }
    }

    #[test]
    fn beta_star_action_equals_the_determinant() {
        let w = build_witt(3, 2, 2).unwrap();
        assert_eq!(beta_star_action(&w, &EndoElement::one(&w)).unwrap(), w.one());
        let t = EndoElement::scalar(&w, w.gen()).unwrap();
        assert_eq!(beta_star_action(&w, &t).unwrap(), w.one());
        let mut g = EndoElement::one(&w);
        g.coeffs[1] = w.one();
        assert_eq!(beta_star_action(&w, &g).unwrap(), w.scalar(7));

        for (p, d, n) in [(3u64, 2usize, 2u32), (3, 3, 2)] {
            let w = build_witt(p, d, n).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(17 * d as u64);
            for _ in 0..50 {
                let g = random_unit(&w, &mut rng);
                assert_eq!(
                    beta_star_action(&w, &g).unwrap(),
                    determinant(&w, &g).unwrap()
                );
            }
        }
    }

    #[test]
    fn rejects_foreign_or_malformed_elements() {
        let w = build_witt(3, 2, 2).unwrap();
        assert!(matches!(
            EndoElement::new(&w, vec![w.zero()]),
            Err(Error::ShapeMismatch(_))
        ));
        assert!(matches!(
            EndoElement::new(&w, vec![vec![0], vec![0]]),
            Err(Error::ShapeMismatch(_))
        ));
        assert!(matches!(
            EndoElement::new(&w, vec![vec![9, 0], vec![0, 0]]),
            Err(Error::ContextMismatch(_))
        ));

        let w3 = build_witt(3, 3, 2).unwrap();
        let foreign = EndoElement::one(&w3);
        assert!(matches!(
            multiply(&w, &foreign, &EndoElement::one(&w)),
            Err(Error::ContextMismatch(_))
        ));

        assert!(matches!(
            beta_star_action(&w, &EndoElement::s(&w)),
            Err(Error::InvalidParameter(_))
        ));
    }
}
