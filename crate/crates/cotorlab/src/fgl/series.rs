//! Dense truncated power series: exact-rational internals for constructing
//! group laws, and `Z/p^N` series for everything downstream.
//!
//! Univariate and bivariate series are public through [`TruncatedSeries`];
//! the trivariate form exists only to state associativity and stays
//! private. All arithmetic truncates at a fixed total-degree cap, so every
//! operation is closed and exact below it.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((u128::from(a) * u128::from(b)) % u128::from(m)) as u64
}

pub(crate) fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    ((u128::from(a) + u128::from(b)) % u128::from(m)) as u64
}

/// Inverse of `a` modulo `m` when `gcd(a, m) = 1`.
pub(crate) fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (i128::from(m), i128::from(a % m));
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    (r0 == 1).then(|| s0.rem_euclid(i128::from(m)) as u64)
}

/// A truncated power series over `Z/m` in one or two variables, with all
/// coefficients of total degree at most the cap stored densely.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    modulus: u64,
    cap: usize,
    data: SeriesData,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum SeriesData {
    One(Vec<u64>),
    /// `c[i][j]` with `i + j <= cap`.
    Two(Vec<Vec<u64>>),
}

impl TruncatedSeries {
    pub(crate) fn zero_1(modulus: u64, cap: usize) -> Self {
        TruncatedSeries {
            modulus,
            cap,
            data: SeriesData::One(vec![0; cap + 1]),
        }
    }

    pub(crate) fn zero_2(modulus: u64, cap: usize) -> Self {
        let rows = (0..=cap).map(|i| vec![0; cap - i + 1]).collect();
        TruncatedSeries { modulus, cap, data: SeriesData::Two(rows) }
    }

    /// The univariate coordinate `x`.
    pub fn var(modulus: u64, cap: usize) -> Self {
        let mut s = Self::zero_1(modulus, cap);
        if cap >= 1 {
            if let SeriesData::One(c) = &mut s.data {
                c[1] = 1 % modulus;
            }
        }
        s
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn vars(&self) -> usize {
        match self.data {
            SeriesData::One(_) => 1,
            SeriesData::Two(_) => 2,
        }
    }

    /// Univariate coefficient of `x^n` (zero beyond the cap).
    pub fn coeff_1(&self, n: usize) -> u64 {
        match &self.data {
            SeriesData::One(c) => c.get(n).copied().unwrap_or(0),
            SeriesData::Two(_) => panic!("coeff_1 on a bivariate series"),
        }
    }

    /// Bivariate coefficient of `x^i y^j` (zero beyond the cap).
    pub fn coeff_2(&self, i: usize, j: usize) -> u64 {
        match &self.data {
            SeriesData::One(_) => panic!("coeff_2 on a univariate series"),
            SeriesData::Two(c) => {
                if i + j > self.cap {
                    0
                } else {
                    c[i][j]
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.data {
            SeriesData::One(c) => c.iter().all(|&v| v == 0),
            SeriesData::Two(c) => c.iter().flatten().all(|&v| v == 0),
        }
    }

    /// Nonzero monomials as `(i, j, coeff)`; univariate series report
    /// `j = 0`.
    pub fn monomials(&self) -> Vec<(usize, usize, u64)> {
        let mut out = Vec::new();
        match &self.data {
            SeriesData::One(c) => {
                for (i, &v) in c.iter().enumerate() {
                    if v != 0 {
                        out.push((i, 0, v));
                    }
                }
            }
            SeriesData::Two(c) => {
                for (i, row) in c.iter().enumerate() {
                    for (j, &v) in row.iter().enumerate() {
                        if v != 0 {
                            out.push((i, j, v));
                        }
                    }
                }
            }
        }
        out
    }

    /// Lowest nonzero term `(degree, coeff)` of a univariate series.
    pub fn lowest_term(&self) -> Option<(usize, u64)> {
        match &self.data {
            SeriesData::One(c) => {
                c.iter().enumerate().find(|(_, &v)| v != 0).map(|(i, &v)| (i, v))
            }
            SeriesData::Two(_) => panic!("lowest_term on a bivariate series"),
        }
    }

    pub(crate) fn set_2(&mut self, i: usize, j: usize, v: u64) {
        assert!(i + j <= self.cap);
        match &mut self.data {
            SeriesData::One(_) => panic!("set_2 on a univariate series"),
            SeriesData::Two(c) => c[i][j] = v % self.modulus,
        }
    }

    /// Same series with coefficients reduced into `Z/new_modulus`; the new
    /// modulus must divide the old one.
    pub(crate) fn reduce_modulus(&self, new_modulus: u64) -> Result<Self> {
        if new_modulus == 0 || self.modulus % new_modulus != 0 {
            return Err(Error::InvalidParameter(format!(
                "modulus {new_modulus} does not divide {}",
                self.modulus
            )));
        }
        let data = match &self.data {
            SeriesData::One(c) => {
                SeriesData::One(c.iter().map(|&v| v % new_modulus).collect())
            }
            SeriesData::Two(c) => SeriesData::Two(
                c.iter()
                    .map(|row| row.iter().map(|&v| v % new_modulus).collect())
                    .collect(),
            ),
        };
        Ok(TruncatedSeries { modulus: new_modulus, cap: self.cap, data })
    }

    /// Same univariate series truncated at a smaller cap.
    pub(crate) fn truncate(&self, cap: usize) -> Self {
        assert!(cap <= self.cap);
        match &self.data {
            SeriesData::One(c) => TruncatedSeries {
                modulus: self.modulus,
                cap,
                data: SeriesData::One(c[..=cap].to_vec()),
            },
            SeriesData::Two(c) => {
                let rows = (0..=cap).map(|i| c[i][..=cap - i].to_vec()).collect();
                TruncatedSeries {
                    modulus: self.modulus,
                    cap,
                    data: SeriesData::Two(rows),
                }
            }
        }
    }

    fn one_ref(&self) -> &[u64] {
        match &self.data {
            SeriesData::One(c) => c,
            SeriesData::Two(_) => panic!("expected univariate series"),
        }
    }

    pub(crate) fn mul_1(&self, other: &TruncatedSeries) -> TruncatedSeries {
        assert_eq!(self.modulus, other.modulus);
        assert_eq!(self.cap, other.cap);
        let (a, b) = (self.one_ref(), other.one_ref());
        let m = self.modulus;
        let mut out = vec![0u64; self.cap + 1];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.iter().take(self.cap + 1 - i).enumerate() {
                if bj != 0 {
                    out[i + j] = add_mod(out[i + j], mul_mod(ai, bj, m), m);
                }
            }
        }
        TruncatedSeries { modulus: m, cap: self.cap, data: SeriesData::One(out) }
    }

    fn add_scaled_assign(&mut self, other: &TruncatedSeries, scalar: u64) {
        assert_eq!(self.modulus, other.modulus);
        assert_eq!(self.cap, other.cap);
        let m = self.modulus;
        match (&mut self.data, &other.data) {
            (SeriesData::One(a), SeriesData::One(b)) => {
                for (x, &y) in a.iter_mut().zip(b) {
                    *x = add_mod(*x, mul_mod(scalar, y, m), m);
                }
            }
            _ => panic!("add_scaled_assign arity mismatch"),
        }
    }

    /// Substitutes univariate `a` and `b` into a bivariate series:
    /// `F(a(x), b(x))`. Both arguments must lack constant terms.
    pub(crate) fn subst_2(
        &self,
        a: &TruncatedSeries,
        b: &TruncatedSeries,
    ) -> TruncatedSeries {
        let rows = match &self.data {
            SeriesData::Two(c) => c,
            SeriesData::One(_) => panic!("subst_2 on a univariate series"),
        };
        assert_eq!(a.coeff_1(0), 0, "substitution needs a vanishing constant term");
        assert_eq!(b.coeff_1(0), 0, "substitution needs a vanishing constant term");
        let m = self.modulus;
        let cap = a.cap;
        let mut out = TruncatedSeries::zero_1(m, cap);
        // Horner in the second slot: out = Σ_j (Σ_i c_ij a^i) b^j.
        let mut a_pows: Vec<TruncatedSeries> = Vec::with_capacity(cap + 2);
        let mut one = TruncatedSeries::zero_1(m, cap);
        if let SeriesData::One(c) = &mut one.data {
            c[0] = 1 % m;
        }
        a_pows.push(one);
        for i in 1..=cap.min(self.cap) {
            let next = a_pows[i - 1].mul_1(a);
            a_pows.push(next);
        }
        let mut b_pow = a_pows[0].clone();
        for (j, _) in (0..=self.cap).enumerate() {
            if j > cap {
                break;
            }
            if j > 0 {
                b_pow = b_pow.mul_1(b);
            }
            let mut inner = TruncatedSeries::zero_1(m, cap);
            for (i, pow) in a_pows.iter().enumerate() {
                if i + j > self.cap {
                    break;
                }
                let cij = rows[i][j];
                if cij != 0 {
                    inner.add_scaled_assign(pow, cij);
                }
            }
            if !inner.is_zero() {
                let term = inner.mul_1(&b_pow);
                out.add_scaled_assign(&term, 1);
            }
        }
        out
    }

    /// Composition `self(inner(x))` of univariate series; `inner` must
    /// lack a constant term.
    pub(crate) fn compose_1(&self, inner: &TruncatedSeries) -> TruncatedSeries {
        let outer = self.one_ref();
        assert_eq!(inner.coeff_1(0), 0, "composition needs a vanishing constant term");
        let m = inner.modulus;
        let cap = inner.cap;
        let mut out = TruncatedSeries::zero_1(m, cap);
        if let (SeriesData::One(o), Some(&c0)) = (&mut out.data, outer.first()) {
            o[0] = c0 % m;
        }
        // pow_k tracks inner^k starting at k = 1.
        let mut pow_k = inner.clone();
        for (k, &ck) in outer.iter().enumerate().skip(1) {
            if k > cap {
                break;
            }
            if k > 1 {
                pow_k = pow_k.mul_1(inner);
            }
            if ck != 0 {
                out.add_scaled_assign(&pow_k, ck);
            }
        }
        out
    }
}

/// Trivariate series over `Z/m`, used only to state associativity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Tri {
    modulus: u64,
    cap: usize,
    /// `c[i][j][k]` with `i + j + k <= cap`.
    c: Vec<Vec<Vec<u64>>>,
}

impl Tri {
    pub(crate) fn zero(modulus: u64, cap: usize) -> Self {
        let c = (0..=cap)
            .map(|i| {
                (0..=cap - i)
                    .map(|j| vec![0u64; cap - i - j + 1])
                    .collect::<Vec<_>>()
            })
            .collect();
        Tri { modulus, cap, c }
    }

    /// The coordinate with index `axis` (0, 1, or 2).
    pub(crate) fn coordinate(modulus: u64, cap: usize, axis: usize) -> Self {
        let mut t = Tri::zero(modulus, cap);
        if cap >= 1 {
            match axis {
                0 => t.c[1][0][0] = 1 % modulus,
                1 => t.c[0][1][0] = 1 % modulus,
                2 => t.c[0][0][1] = 1 % modulus,
                _ => panic!("axis out of range"),
            }
        }
        t
    }

    fn mul(&self, other: &Tri) -> Tri {
        let m = self.modulus;
        let mut out = Tri::zero(m, self.cap);
        for (i1, pl1) in self.c.iter().enumerate() {
            for (j1, row1) in pl1.iter().enumerate() {
                for (k1, &v1) in row1.iter().enumerate() {
                    if v1 == 0 {
                        continue;
                    }
                    let rem = self.cap - i1 - j1 - k1;
                    for i2 in 0..=rem.min(other.cap) {
                        for j2 in 0..=rem - i2 {
                            for k2 in 0..=rem - i2 - j2 {
                                let v2 = other.c[i2][j2][k2];
                                if v2 != 0 {
                                    let cell =
                                        &mut out.c[i1 + i2][j1 + j2][k1 + k2];
                                    *cell = add_mod(*cell, mul_mod(v1, v2, m), m);
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }

    fn add_scaled_assign(&mut self, other: &Tri, scalar: u64) {
        let m = self.modulus;
        for (pl, opl) in self.c.iter_mut().zip(&other.c) {
            for (row, orow) in pl.iter_mut().zip(opl) {
                for (x, &y) in row.iter_mut().zip(orow) {
                    *x = add_mod(*x, mul_mod(scalar, y, m), m);
                }
            }
        }
    }

    fn is_constant_free(&self) -> bool {
        self.c[0][0][0] == 0
    }

    /// Substitutes trivariate `a` and `b` into a bivariate series.
    pub(crate) fn subst_2(two: &TruncatedSeries, a: &Tri, b: &Tri) -> Tri {
        assert!(a.is_constant_free() && b.is_constant_free());
        let m = two.modulus();
        let cap = a.cap;
        let mut a_pows: Vec<Tri> = Vec::with_capacity(cap + 1);
        let mut one = Tri::zero(m, cap);
        one.c[0][0][0] = 1 % m;
        a_pows.push(one);
        for i in 1..=cap.min(two.cap()) {
            let next = a_pows[i - 1].mul(a);
            a_pows.push(next);
        }
        let mut out = Tri::zero(m, cap);
        let mut b_pow = a_pows[0].clone();
        for j in 0..=two.cap().min(cap) {
            if j > 0 {
                b_pow = b_pow.mul(b);
            }
            let mut inner = Tri::zero(m, cap);
            let mut any = false;
            for (i, pow) in a_pows.iter().enumerate() {
                if i + j > two.cap() {
                    break;
                }
                let cij = two.coeff_2(i, j);
                if cij != 0 {
                    inner.add_scaled_assign(pow, cij);
                    any = true;
                }
            }
            if any {
                let term = inner.mul(&b_pow);
                out.add_scaled_assign(&term, 1);
            }
        }
        out
    }
}

/// Univariate series with exact rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Rat1 {
    pub cap: usize,
    pub c: Vec<BigRational>,
}

impl Rat1 {
    pub(crate) fn zero(cap: usize) -> Self {
        Rat1 { cap, c: vec![BigRational::zero(); cap + 1] }
    }

    pub(crate) fn var(cap: usize) -> Self {
        let mut s = Rat1::zero(cap);
        if cap >= 1 {
            s.c[1] = BigRational::one();
        }
        s
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.c.iter().all(Zero::is_zero)
    }

    fn mul(&self, other: &Rat1) -> Rat1 {
        let mut out = Rat1::zero(self.cap);
        for (i, ai) in self.c.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in other.c.iter().take(self.cap + 1 - i).enumerate() {
                if !bj.is_zero() {
                    out.c[i + j] += ai * bj;
                }
            }
        }
        out
    }

    fn sub(&self, other: &Rat1) -> Rat1 {
        let mut out = self.clone();
        for (x, y) in out.c.iter_mut().zip(&other.c) {
            *x -= y;
        }
        out
    }

    /// `Σ coeff · self^deg` over sparse `terms`; `self` must lack a
    /// constant term.
    fn eval_terms(&self, terms: &[(usize, BigRational)]) -> Rat1 {
        assert!(self.c[0].is_zero());
        let mut out = Rat1::zero(self.cap);
        let mut pow = Rat1::zero(self.cap);
        pow.c[0] = BigRational::one();
        let mut k = 0usize;
        for (deg, coeff) in terms {
            while k < *deg {
                pow = pow.mul(self);
                k += 1;
            }
            for (i, v) in pow.c.iter().enumerate() {
                if !v.is_zero() {
                    out.c[i] += coeff * v;
                }
            }
        }
        out
    }
}

/// Bivariate series with exact rational coefficients, `c[i][j]`,
/// `i + j <= cap`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Rat2 {
    pub cap: usize,
    pub c: Vec<Vec<BigRational>>,
}

impl Rat2 {
    pub(crate) fn zero(cap: usize) -> Self {
        let c = (0..=cap)
            .map(|i| vec![BigRational::zero(); cap - i + 1])
            .collect();
        Rat2 { cap, c }
    }

    fn mul(&self, other: &Rat2) -> Rat2 {
        let mut out = Rat2::zero(self.cap);
        for (i1, row1) in self.c.iter().enumerate() {
            for (j1, v1) in row1.iter().enumerate() {
                if v1.is_zero() {
                    continue;
                }
                let rem = self.cap - i1 - j1;
                for i2 in 0..=rem {
                    for j2 in 0..=rem - i2 {
                        let v2 = &other.c[i2][j2];
                        if !v2.is_zero() {
                            out.c[i1 + i2][j1 + j2] += v1 * v2;
                        }
                    }
                }
            }
        }
        out
    }

    fn constant_free(&self) -> bool {
        self.c[0][0].is_zero()
    }

    /// `Σ coeff · self^deg` over sparse `terms`.
    pub(crate) fn eval_terms(&self, terms: &[(usize, BigRational)]) -> Rat2 {
        assert!(self.constant_free());
        let mut out = Rat2::zero(self.cap);
        let mut pow = Rat2::zero(self.cap);
        pow.c[0][0] = BigRational::one();
        let mut k = 0usize;
        for (deg, coeff) in terms {
            while k < *deg {
                pow = pow.mul(self);
                k += 1;
            }
            for (i, row) in pow.c.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    if !v.is_zero() {
                        out.c[i][j] += coeff * v;
                    }
                }
            }
        }
        out
    }
}

/// Sparse logarithm terms `x + Σ x^{p^{d i}} / p^i` up to the cap, as
/// `(degree, coefficient)` pairs in ascending degree.
pub(crate) fn log_terms(p: u64, d: usize, cap: usize) -> Vec<(usize, BigRational)> {
    let mut terms = vec![(1usize, BigRational::one())];
    let step = BigInt::from(p).pow(d as u32);
    let mut deg = BigInt::from(1);
    let mut denom = BigInt::from(1);
    loop {
        deg *= &step;
        denom *= BigInt::from(p);
        match deg.to_usize() {
            Some(dd) if dd <= cap => {
                terms.push((dd, BigRational::new(BigInt::one(), denom.clone())));
            }
            _ => break,
        }
    }
    terms
}

/// Compositional inverse of the series defined by sparse `terms` (which
/// must start with `(1, 1)`): returns `e` with `terms(e(x)) = x` exactly
/// through the cap. Each pass clears the lowest surviving error term, and
/// the error's degree strictly increases, so the loop terminates.
pub(crate) fn invert_terms(terms: &[(usize, BigRational)], cap: usize) -> Rat1 {
    assert_eq!(terms.first().map(|(d, _)| *d), Some(1));
    assert!(terms[0].1.is_one());
    let x = Rat1::var(cap);
    let mut e = x.clone();
    loop {
        let err = e.eval_terms(terms).sub(&x);
        if err.is_zero() {
            return e;
        }
        e = e.sub(&err);
    }
}

/// Reduces an exact rational into `Z/m` for `m = p^N`; fails when the
/// denominator is divisible by `p`.
pub(crate) fn rational_mod(v: &BigRational, p: u64, m: u64) -> Result<u64> {
    let denom = v.denom();
    if (denom % BigInt::from(p)).is_zero() {
        return Err(Error::Internal(format!(
            "non-integral coefficient {v} (denominator divisible by {p})"
        )));
    }
    let md = BigInt::from(m);
    let to_res = |x: &BigInt| -> u64 {
        let mut r = x % &md;
        if r.is_negative() {
            r += &md;
        }
        r.to_u64().expect("residue fits u64")
    };
    let num = to_res(v.numer());
    let den = to_res(denom);
    let inv = inv_mod(den, m).ok_or_else(|| {
        Error::Internal(format!("denominator {den} not invertible mod {m}"))
    })?;
    Ok(mul_mod(num, inv, m))
}
