//! Truncated unramified Witt rings (Z/p^N)[t]/(f) with a lifted Frobenius.
//!
//! The modulus is the canonical digit lift of the residue field modulus
//! chosen by [`build_field`](super::build_field), so contexts are
//! deterministic for fixed (p, d, N). The Frobenius lift `sigma` sends the
//! generator to the unique root of the lifted modulus congruent to `t^p`
//! mod p; it is found by Newton iteration and satisfies `sigma^d = id`
//! exactly mod p^N.
//!
//! Elements are coefficient vectors of length `d` with entries mod `p^N`,
//! low degree first. All arithmetic goes through the context.

use crate::coeffring::field::{build_field, FiniteFieldCtx};
use crate::error::{Error, Result};

/// An element of the truncated Witt ring: coefficients of `1, t, ..., t^(d-1)`.
pub type WittElt = Vec<u64>;

/// Context for arithmetic in (Z/p^N)[t]/(f).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WittRingCtx {
    p: u64,
    d: usize,
    n_prec: u32,
    pn: u64,
    field: FiniteFieldCtx,
    /// Low coefficients of the monic modulus, lifted digits of the field modulus.
    modulus: Vec<u64>,
    /// `sigma_mats[k][j]` = coefficient vector of `sigma^k(t^j)`; `sigma_mats[0]`
    /// is the identity.
    sigma_mats: Vec<Vec<Vec<u64>>>,
}

/// Builds the Witt ring context for (p, d, N).
///
/// Errors on invalid parameters, and with an internal error if the Newton
/// iteration for the Frobenius lift fails to converge (impossible for the
/// separable moduli produced by `build_field`).
pub fn build_witt(p: u64, d: usize, n_prec: u32) -> Result<WittRingCtx> {
    if n_prec == 0 {
        return Err(Error::InvalidParameter("precision exponent N must be >= 1".into()));
    }
    let field = build_field(p, d)?;
    let mut pn: u64 = 1;
    for _ in 0..n_prec {
        pn = pn.checked_mul(p).filter(|&v| v <= 1 << 32).ok_or_else(|| {
            Error::InvalidParameter(format!("precision p^N = {p}^{n_prec} exceeds 2^32"))
        })?;
    }
    let modulus: Vec<u64> = field.modulus().to_vec();

    let mut ctx = WittRingCtx {
        p,
        d,
        n_prec,
        pn,
        field,
        modulus,
        sigma_mats: Vec::new(),
    };

    // Newton iteration for the root of f congruent to t^p mod p.
    let root = ctx.frobenius_root()?;

    // sigma(t^j) = root^j; higher iterates by matrix composition.
    let mut basis_images = Vec::with_capacity(d);
    let mut acc = ctx.one();
    basis_images.push(acc.clone());
    for _ in 1..d {
        acc = ctx.mul(&acc, &root);
        basis_images.push(acc.clone());
    }
    let identity: Vec<Vec<u64>> = (0..d)
        .map(|j| {
            let mut e = vec![0u64; d];
            e[j] = 1;
            e
        })
        .collect();
    let mut mats = vec![identity.clone()];
    for k in 1..d {
        let prev = &mats[k - 1];
        let next: Vec<Vec<u64>> = (0..d)
            .map(|j| ctx.apply_mat(&basis_images, &prev[j]))
            .collect();
        mats.push(next);
    }
    // sigma^d must be the identity exactly.
    let last = if d == 1 {
        identity.clone()
    } else {
        (0..d).map(|j| ctx.apply_mat(&basis_images, &mats[d - 1][j])).collect()
    };
    if last != identity {
        return Err(Error::Internal(format!(
            "Frobenius lift does not have order {d} at precision {n_prec}"
        )));
    }
    ctx.sigma_mats = mats;
    Ok(ctx)
}

impl WittRingCtx {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn precision(&self) -> u32 {
        self.n_prec
    }

    /// The scalar modulus p^N.
    pub fn pn(&self) -> u64 {
        self.pn
    }

    /// The residue field F_{p^d} with the matching modulus.
    pub fn residue_field(&self) -> &FiniteFieldCtx {
        &self.field
    }

    pub fn zero(&self) -> WittElt {
        vec![0; self.d]
    }

    pub fn one(&self) -> WittElt {
        let mut e = vec![0; self.d];
        e[0] = 1;
        e
    }

    /// The class of the generator `t`.
    pub fn gen(&self) -> WittElt {
        if self.d == 1 {
            vec![(self.pn - self.modulus[0] % self.pn) % self.pn]
        } else {
            let mut e = vec![0; self.d];
            e[1] = 1;
            e
        }
    }

    /// Embeds an integer scalar.
    pub fn scalar(&self, n: i64) -> WittElt {
        let mut e = vec![0; self.d];
        e[0] = n.rem_euclid(self.pn as i64) as u64;
        e
    }

    pub fn is_zero(&self, a: &[u64]) -> bool {
        a.iter().all(|&c| c == 0)
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> WittElt {
        debug_assert_eq!(a.len(), self.d);
        debug_assert_eq!(b.len(), self.d);
        a.iter().zip(b).map(|(&x, &y)| (x + y) % self.pn).collect()
    }

    pub fn neg(&self, a: &[u64]) -> WittElt {
        a.iter().map(|&x| (self.pn - x % self.pn) % self.pn).collect()
    }

    pub fn sub(&self, a: &[u64], b: &[u64]) -> WittElt {
        a.iter().zip(b).map(|(&x, &y)| (x + self.pn - y % self.pn) % self.pn).collect()
    }

    pub fn mul(&self, a: &[u64], b: &[u64]) -> WittElt {
        debug_assert_eq!(a.len(), self.d);
        debug_assert_eq!(b.len(), self.d);
        let (pn, d) = (self.pn, self.d);
        let mut prod = vec![0u64; 2 * d - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y % pn) % pn;
            }
        }
        for idx in (d..2 * d - 1).rev() {
            let c = prod[idx];
            if c == 0 {
                continue;
            }
            prod[idx] = 0;
            for (i, &mi) in self.modulus.iter().enumerate() {
                prod[idx - d + i] = (prod[idx - d + i] + c * ((pn - mi % pn) % pn) % pn) % pn;
            }
        }
        prod.truncate(d);
        prod
    }

    pub fn scalar_mul(&self, c: u64, a: &[u64]) -> WittElt {
        a.iter().map(|&x| c % self.pn * x % self.pn).collect()
    }

    /// Reduction mod p into the residue field (packed element id).
    pub fn reduce_mod_p(&self, a: &[u64]) -> u64 {
        let mut out = 0u64;
        for &c in a.iter().rev() {
            out = out * self.p + c % self.p;
        }
        out
    }

    /// Canonical digit lift of a residue field element.
    pub fn lift_field(&self, e: u64) -> WittElt {
        let mut out = vec![0u64; self.d];
        let mut x = e;
        for slot in out.iter_mut() {
            *slot = x % self.p;
            x /= self.p;
        }
        out
    }

    /// Reduction of an element mod p^M for M <= N (coefficients reduced).
    pub fn reduce_elt(&self, a: &[u64], m_prec: u32) -> WittElt {
        assert!(m_prec <= self.n_prec);
        let pm = self.p.pow(m_prec);
        a.iter().map(|&x| x % pm).collect()
    }

    /// A unit iff the residue mod p is nonzero in F_{p^d}.
    pub fn is_unit(&self, a: &[u64]) -> bool {
        self.reduce_mod_p(a) != 0
    }

    /// Multiplicative inverse of a unit, by lifting the residue field
    /// inverse through Newton steps `x <- x(2 - ax)`. Panics on non-units.
    pub fn inv(&self, a: &[u64]) -> WittElt {
        let res = self.reduce_mod_p(a);
        assert!(res != 0, "inverse of a non-unit in the Witt ring");
        let mut x = self.lift_field(self.field.inv(res));
        loop {
            let ax = self.mul(a, &x);
            if ax == self.one() {
                return x;
            }
            let two_minus = self.sub(&self.scalar(2), &ax);
            x = self.mul(&x, &two_minus);
        }
    }

    /// `k`-fold Frobenius lift `sigma^k`, reduced mod d.
    pub fn sigma(&self, a: &[u64], k: usize) -> WittElt {
        self.apply_mat(&self.sigma_mats[k % self.d], a)
    }

    /// `sigma^(-k)` = `sigma^(d - k mod d)`.
    pub fn sigma_inv(&self, a: &[u64], k: usize) -> WittElt {
        let k = k % self.d;
        self.sigma(a, (self.d - k) % self.d)
    }

    /// `a^e` by binary exponentiation.
    pub fn pow_elt(&self, a: &[u64], mut e: u64) -> WittElt {
        let mut base = a.to_vec();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    fn apply_mat(&self, mat: &[Vec<u64>], a: &[u64]) -> WittElt {
        let mut out = vec![0u64; self.d];
        for (j, &c) in a.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for i in 0..self.d {
                out[i] = (out[i] + c * mat[j][i] % self.pn) % self.pn;
            }
        }
        out
    }

    /// Newton iteration for the root of the lifted modulus congruent to
    /// `t^p` mod p. Separability of the residue modulus makes f'(r) a unit.
    fn frobenius_root(&self) -> Result<WittElt> {
        if self.d == 1 {
            return Ok(self.gen());
        }
        // Start from t^p computed in the quotient ring.
        let mut r = self.pow_elt(&self.gen(), self.p);
        for _ in 0..=self.n_prec + 1 {
            let fr = self.eval_modulus(&r);
            if self.is_zero(&fr) {
                return Ok(r);
            }
            let dfr = self.eval_modulus_derivative(&r);
            if !self.is_unit(&dfr) {
                break;
            }
            let corr = self.mul(&fr, &self.inv(&dfr));
            r = self.sub(&r, &corr);
        }
        let fr = self.eval_modulus(&r);
        if self.is_zero(&fr) {
            return Ok(r);
        }
        Err(Error::Internal(
            "Newton iteration for the Frobenius lift did not converge".into(),
        ))
    }

    /// f(x) for the monic modulus f, evaluated in the quotient ring.
    fn eval_modulus(&self, x: &[u64]) -> WittElt {
        // Horner: f = t^d + sum c_i t^i.
        let mut acc = self.one();
        for i in (0..self.d).rev() {
            acc = self.mul(&acc, x);
            let mut c = self.zero();
            c[0] = self.modulus[i] % self.pn;
            acc = self.add(&acc, &c);
        }
        acc
    }

    /// f'(x) evaluated in the quotient ring.
    fn eval_modulus_derivative(&self, x: &[u64]) -> WittElt {
        let mut acc = self.scalar(self.d as i64);
        for i in (1..self.d).rev() {
            acc = self.mul(&acc, x);
            let mut c = self.zero();
            c[0] = (i as u64 * (self.modulus[i] % self.pn)) % self.pn;
            acc = self.add(&acc, &c);
        }
        acc
    }
}

/// Product of the d sigma-conjugates of `a`; lands in the scalar subring
/// Z/p^N and is returned as a plain scalar.
pub fn galois_norm(ctx: &WittRingCtx, a: &[u64]) -> Result<u64> {
    let mut prod = ctx.one();
    for k in 0..ctx.degree() {
        prod = ctx.mul(&prod, &ctx.sigma(a, k));
    }
    if prod[1..].iter().any(|&c| c != 0) {
        return Err(Error::Internal(
            "Galois norm did not land in the scalar subring".into(),
        ));
    }
    Ok(prod[0])
}
