//! Finite fields F_{p^d} with a deterministic modulus choice.
//!
//! Elements are packed into a `u64` as base-`p` digits, little-endian: the
//! digit at position `i` is the coefficient of `t^i` in the residue-class
//! representative. Element ids therefore range over `0..p^d` exactly, and
//! id arithmetic is meaningless without the context.

use crate::error::{Error, Result};

/// Largest supported extension degree. Far above anything the workbench
/// needs; bounds the stack buffers used in multiplication.
pub const MAX_D: usize = 16;

/// Context for arithmetic in F_{p^d}.
///
/// The modulus is the lexicographically smallest monic irreducible of
/// degree `d` over F_p, where candidates `t^d + c_{d-1} t^{d-1} + ... + c_0`
/// are ordered by the integer `c_0 + c_1 p + ... + c_{d-1} p^{d-1}`. This
/// makes every context for fixed `(p, d)` identical across runs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteFieldCtx {
    p: u64,
    d: usize,
    q: u64,
    /// Low coefficients `c_0..c_{d-1}` of the monic modulus.
    modulus: Vec<u64>,
    /// `frob[i]` = digits of `(t^i)^p mod f`, for `0 <= i < d`.
    frob: Vec<u64>,
}

/// Builds the field context for F_{p^d}.
///
/// Errors if `p` is not prime, `d` is zero, or `p^d` exceeds the supported
/// size (2^32).
pub fn build_field(p: u64, d: usize) -> Result<FiniteFieldCtx> {
    if !is_prime_u64(p) {
        return Err(Error::InvalidParameter(format!("p = {p} is not prime")));
    }
    if d == 0 {
        return Err(Error::InvalidParameter("extension degree d must be >= 1".into()));
    }
    if d > MAX_D {
        return Err(Error::InvalidParameter(format!(
            "extension degree d = {d} exceeds supported maximum {MAX_D}"
        )));
    }
    let mut q: u64 = 1;
    for _ in 0..d {
        q = q.checked_mul(p).filter(|&v| v <= 1 << 32).ok_or_else(|| {
            Error::InvalidParameter(format!("field size p^d = {p}^{d} exceeds 2^32"))
        })?;
    }

    let modulus = smallest_irreducible(p, d, q);
    let frob_gen = poly_powmod(p, &[0, 1], p, &modulus, d);
    let mut frob = Vec::with_capacity(d);
    let mut acc = vec![0u64; d];
    acc[0] = 1;
    frob.push(pack(p, &acc));
    for _ in 1..d {
        acc = poly_mulmod(p, &acc, &frob_gen, &modulus, d);
        frob.push(pack(p, &acc));
    }

    Ok(FiniteFieldCtx { p, d, q, modulus, frob })
}

impl FiniteFieldCtx {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    /// Field size `q = p^d`. Elements are exactly the ids `0..q`.
    pub fn q(&self) -> u64 {
        self.q
    }

    /// Low coefficients `c_0..c_{d-1}` of the monic degree-`d` modulus.
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn zero(&self) -> u64 {
        0
    }

    pub fn one(&self) -> u64 {
        1
    }

    /// Embeds an integer scalar via the prime subfield.
    pub fn from_int(&self, n: i64) -> u64 {
        n.rem_euclid(self.p as i64) as u64
    }

    /// The class of `t`, the distinguished generator over F_p. For `d = 1`
    /// this is the scalar `-c_0`.
    pub fn gen(&self) -> u64 {
        if self.d == 1 {
            // t = -c_0 in F_p.
            (self.p - self.modulus[0]) % self.p
        } else {
            self.p
        }
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        debug_assert!(a < self.q && b < self.q);
        let (p, d) = (self.p, self.d);
        let mut out = 0u64;
        let mut scale = 1u64;
        let (mut x, mut y) = (a, b);
        for _ in 0..d {
            let s = (x % p + y % p) % p;
            out += s * scale;
            scale *= p;
            x /= p;
            y /= p;
        }
        out
    }

    pub fn neg(&self, a: u64) -> u64 {
        debug_assert!(a < self.q);
        let (p, d) = (self.p, self.d);
        let mut out = 0u64;
        let mut scale = 1u64;
        let mut x = a;
        for _ in 0..d {
            out += ((p - x % p) % p) * scale;
            scale *= p;
            x /= p;
        }
        out
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        debug_assert!(a < self.q && b < self.q);
        let (p, d) = (self.p, self.d);
        if d == 1 {
            return a * b % p;
        }
        let mut xs = [0u64; MAX_D];
        let mut ys = [0u64; MAX_D];
        unpack_into(p, a, &mut xs[..d]);
        unpack_into(p, b, &mut ys[..d]);
        let mut prod = [0u64; 2 * MAX_D];
        for (i, &xi) in xs[..d].iter().enumerate() {
            if xi == 0 {
                continue;
            }
            for (j, &yj) in ys[..d].iter().enumerate() {
                prod[i + j] = (prod[i + j] + xi * yj) % p;
            }
        }
        // Reduce by f: t^d = -sum c_i t^i, cascading from the top.
        for idx in (d..=2 * d - 2).rev() {
            let c = prod[idx];
            if c == 0 {
                continue;
            }
            prod[idx] = 0;
            for (i, &mi) in self.modulus.iter().enumerate() {
                prod[idx - d + i] = (prod[idx - d + i] + c * (p - mi) % p) % p;
            }
        }
        pack(p, &prod[..d])
    }

    /// `a^e` by binary exponentiation; `0^0 = 1`.
    pub fn pow(&self, a: u64, mut e: u64) -> u64 {
        let mut base = a;
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inv(&self, a: u64) -> u64 {
        assert!(a != 0, "inverse of zero in F_{}", self.q);
        self.pow(a, self.q - 2)
    }

    /// The p-power Frobenius `a -> a^p`, computed through the precomputed
    /// images of the basis monomials (F_p-linear).
    pub fn frobenius(&self, a: u64) -> u64 {
        let (p, d) = (self.p, self.d);
        let mut out = 0u64;
        let mut x = a;
        for i in 0..d {
            let digit = x % p;
            if digit != 0 {
                out = self.add(out, self.scalar_mul(digit, self.frob[i]));
            }
            x /= p;
        }
        out
    }

    /// `k`-fold Frobenius iterate.
    pub fn frobenius_iter(&self, a: u64, k: usize) -> u64 {
        let mut out = a;
        for _ in 0..k % self.d {
            out = self.frobenius(out);
        }
        out
    }

    fn scalar_mul(&self, c: u64, a: u64) -> u64 {
        let (p, d) = (self.p, self.d);
        let mut out = 0u64;
        let mut scale = 1u64;
        let mut x = a;
        for _ in 0..d {
            out += (c * (x % p)) % p * scale;
            scale *= p;
            x /= p;
        }
        out
    }
}

fn pack(p: u64, digits: &[u64]) -> u64 {
    let mut out = 0u64;
    for &c in digits.iter().rev() {
        out = out * p + c;
    }
    out
}

fn unpack_into(p: u64, mut e: u64, out: &mut [u64]) {
    for slot in out.iter_mut() {
        *slot = e % p;
        e /= p;
    }
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2u64;
    while k * k <= n {
        if n % k == 0 {
            return false;
        }
        k += 1;
    }
    true
}

/// Lex-smallest monic irreducible of degree `d` over F_p (see the context
/// docs for the ordering). Existence is classical, so the loop terminates.
fn smallest_irreducible(p: u64, d: usize, q: u64) -> Vec<u64> {
    for k in 0..q {
        let mut low = vec![0u64; d];
        unpack_into(p, k, &mut low);
        if is_irreducible(p, &low, d) {
            return low;
        }
    }
    unreachable!("no irreducible of degree {d} over F_{p}");
}

/// Rabin's test: f (monic, degree d, low coefficients `low`) is irreducible
/// iff x^(p^d) = x mod f and gcd(x^(p^(d/l)) - x, f) = 1 for each prime l|d.
fn is_irreducible(p: u64, low: &[u64], d: usize) -> bool {
    if d == 1 {
        return true;
    }
    let x = vec![0u64, 1];
    let qd = p.pow(d as u32);
    let g = poly_powmod(p, &x, qd, low, d);
    if poly_trim(&g) != poly_trim(&x) {
        return false;
    }
    for l in prime_factors(d) {
        let e = p.pow((d / l) as u32);
        let h = poly_powmod(p, &x, e, low, d);
        let diff = poly_sub(p, &h, &x);
        let mut f_full = low.to_vec();
        f_full.push(1);
        let g = poly_gcd(p, &f_full, &diff);
        if poly_trim(&g).len() != 1 {
            return false;
        }
    }
    true
}

fn prime_factors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut k = 2;
    while k * k <= n {
        if n % k == 0 {
            out.push(k);
            while n % k == 0 {
                n /= k;
            }
        }
        k += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// Dense polynomial helpers over F_p, used only at context-build time.
// Polynomials are coefficient vectors, low degree first.

fn poly_trim(a: &[u64]) -> Vec<u64> {
    let mut v = a.to_vec();
    while v.len() > 1 && *v.last().unwrap() == 0 {
        v.pop();
    }
    v
}

fn poly_sub(p: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    let n = a.len().max(b.len());
    let mut out = vec![0u64; n];
    for i in 0..n {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        out[i] = (x + p - y) % p;
    }
    out
}

/// Product of `a` and `b` reduced mod the monic degree-`d` polynomial with
/// low coefficients `low`.
fn poly_mulmod(p: u64, a: &[u64], b: &[u64], low: &[u64], d: usize) -> Vec<u64> {
    let mut prod = vec![0u64; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    for idx in (d..prod.len()).rev() {
        let c = prod[idx];
        if c == 0 {
            continue;
        }
        prod[idx] = 0;
        for (i, &mi) in low.iter().enumerate() {
            prod[idx - d + i] = (prod[idx - d + i] + c * (p - mi) % p) % p;
        }
    }
    prod.truncate(d);
    prod
}

fn poly_powmod(p: u64, base: &[u64], mut e: u64, low: &[u64], d: usize) -> Vec<u64> {
    let mut b = base.to_vec();
    b.resize(d.max(b.len()), 0);
    b = poly_mulmod(p, &b, &[1], low, d);
    let mut acc = vec![0u64; d];
    acc[0] = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mulmod(p, &acc, &b, low, d);
        }
        b = poly_mulmod(p, &b, &b, low, d);
        e >>= 1;
    }
    acc
}

fn poly_gcd(p: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut x = poly_trim(a);
    let mut y = poly_trim(b);
    while !(y.len() == 1 && y[0] == 0) {
        let r = poly_rem(p, &x, &y);
        x = y;
        y = r;
    }
    x
}

fn poly_rem(p: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    let b = poly_trim(b);
    let db = b.len() - 1;
    let lead_inv = inv_mod_p(p, b[db]);
    let mut r = poly_trim(a);
    while r.len() > db && !(r.len() == 1 && r[0] == 0) {
        let dr = r.len() - 1;
        let c = r[dr] * lead_inv % p;
        for i in 0..=db {
            let idx = dr - db + i;
            r[idx] = (r[idx] + p - c * b[i] % p) % p;
        }
        r = poly_trim(&r);
    }
    r
}

fn inv_mod_p(p: u64, a: u64) -> u64 {
    // Fermat; p is prime and small.
    let mut acc = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_modulus_is_t() {
        // Lex-smallest monic linear polynomial is t itself.
        let f = build_field(3, 1).unwrap();
        assert_eq!(f.modulus(), &[0]);
        assert_eq!(f.q(), 3);
        for a in 0..3 {
            assert_eq!(f.frobenius(a), a);
        }
    }

    #[test]
    fn f4_modulus_and_frobenius() {
        // Over F_2 the quadratics in lex order are t^2, t^2+1, t^2+t,
        // t^2+t+1; only the last is irreducible.
        let f = build_field(2, 2).unwrap();
        assert_eq!(f.modulus(), &[1, 1]);
        // Frobenius sends t to t^2 = t + 1.
        let t = f.gen();
        assert_eq!(f.frobenius(t), f.add(t, 1));
    }

    #[test]
    fn f9_modulus_has_no_root() {
        let f = build_field(3, 2).unwrap();
        // t^2 + 1 is the first irreducible candidate.
        assert_eq!(f.modulus(), &[1, 0]);
        for r in 0..3u64 {
            // Evaluate t^2 + 1 at r in the prime subfield.
            assert_ne!((r * r + 1) % 3, 0);
        }
    }

    #[test]
    fn field_axioms_sampled() {
        for (p, d) in [(2u64, 3usize), (3, 2), (5, 2), (3, 3)] {
            let f = build_field(p, d).unwrap();
            let q = f.q();
            // Deterministic sample walk over element ids.
            let step = (q / 7).max(1);
            let sample: Vec<u64> = (0..q).step_by(step as usize).collect();
            for &a in &sample {
                for &b in &sample {
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    assert_eq!(f.add(a, b), f.add(b, a));
                    if a != 0 {
                        assert_eq!(f.mul(a, f.inv(a)), 1);
                    }
                    for &c in &sample {
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn frobenius_is_ring_map_with_order_d() {
        for (p, d) in [(2u64, 2usize), (3, 2), (5, 2), (2, 3), (3, 3), (5, 4)] {
            let f = build_field(p, d).unwrap();
            let q = f.q();
            let step = (q / 11).max(1);
            for a in (0..q).step_by(step as usize) {
                assert_eq!(f.frobenius(a), f.pow(a, p));
                assert_eq!(f.frobenius_iter(a, d), a);
                for b in (0..q).step_by(step as usize) {
                    assert_eq!(f.frobenius(f.mul(a, b)), f.mul(f.frobenius(a), f.frobenius(b)));
                    assert_eq!(f.frobenius(f.add(a, b)), f.add(f.frobenius(a), f.frobenius(b)));
                }
            }
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(build_field(4, 1).is_err());
        assert!(build_field(3, 0).is_err());
        assert!(build_field(2, 40).is_err());
    }
}
