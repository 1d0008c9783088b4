//! One-dimensional formal group laws of Honda type over `Z/p^N`.
//!
//! The law is assembled over the rationals: the logarithm
//! `l(x) = x + Σ_i x^{p^{d i}} / p^i` is inverted exactly, the sum
//! `F(x, y) = e(l(x) + l(y))` is expanded through the degree cap, and the
//! identity `l(F) = l(x) + l(y)` is re-checked before the coefficients are
//! reduced mod `p^N`. That one identity forces unitality, commutativity,
//! and associativity, so [`FormalGroupLaw::check_axioms`] is a redundant
//! cross-check on the reduction.
//!
//! Multiplication-by-`p^j` series certify their lowest term without ever
//! expanding to degree `p^{jd}`: over a field the lowest term of a
//! composite is the product of lowest terms, so it propagates through the
//! `j`-fold composite from the lowest term of `[p]` alone.

mod series;

use num_rational::BigRational;
use num_traits::Zero;

use crate::coalgebra::{curve_coalgebra, GradedCoalgebra};
use crate::coeffring::build_field;
use crate::error::{Error, Result};

pub use series::TruncatedSeries;
use series::{log_terms, mul_mod, rational_mod, Rat2, Tri};

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut f = 2;
    while f * f <= p {
        if p % f == 0 {
            return false;
        }
        f += 1;
    }
    true
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Largest degree cap accepted by [`honda_fgl`]; dense bivariate expansion
/// beyond this is not worth supporting.
pub const MAX_DEGREE_CAP: usize = 64;

/// A one-dimensional commutative formal group law over `Z/p^precision`,
/// stored as its sum series truncated at a total-degree cap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormalGroupLaw {
    p: u64,
    d: usize,
    t_deg: usize,
    precision: u32,
    modulus: u64,
    f: TruncatedSeries,
}

/// A multiplication-by-`p^j` series extracted from a law.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PSeries {
    /// `p`-power exponent: this is `[p^j]`.
    pub j: usize,
    /// The series itself, within the requested degree cap.
    pub series: TruncatedSeries,
    /// Lowest term `(degree, coeff)` of the full untruncated series, when
    /// it can be certified; the degree may lie far beyond the cap.
    pub certified_lowest: Option<(usize, u64)>,
    /// Whether the expected lowest degree `p^{jd}` falls inside the cap,
    /// so the truncation visibly contains it.
    pub complete: bool,
}

/// The finite algebra `k[[x]] / [p^j](x)` of `p^j`-torsion on a height-`d`
/// law over `F_p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorsionAlgebra {
    /// The prime.
    pub p: u64,
    /// The height.
    pub d: usize,
    /// Torsion exponent: this is the `p^j`-torsion.
    pub j: usize,
    /// Vector-space dimension `p^{j d}`.
    pub dim: usize,
    /// Leading unit of `[p^j]` at its lowest degree.
    pub unit: u64,
}

/// Builds the height-`d` Honda law at `p` over `Z/p^precision`, with the
/// sum series expanded through total degree `t_deg`.
pub fn honda_fgl(
    p: u64,
    d: usize,
    t_deg: usize,
    precision: u32,
) -> Result<FormalGroupLaw> {
    if !is_prime(p) {
        return Err(Error::InvalidParameter(format!("{p} is not prime")));
    }
    if d == 0 {
        return Err(Error::InvalidParameter("height must be positive".into()));
    }
    if precision == 0 {
        return Err(Error::InvalidParameter("precision must be positive".into()));
    }
    if t_deg == 0 || t_deg > MAX_DEGREE_CAP {
        return Err(Error::InvalidParameter(format!(
            "degree cap {t_deg} outside 1..={MAX_DEGREE_CAP}"
        )));
    }
    let modulus = p.checked_pow(precision).ok_or_else(|| {
        Error::InvalidParameter(format!("{p}^{precision} overflows the modulus"))
    })?;

    let terms = log_terms(p, d, t_deg);
    let e = series::invert_terms(&terms, t_deg);
    // L = l(x) + l(y) as an exact bivariate series.
    let mut logs = Rat2::zero(t_deg);
    for (deg, coeff) in &terms {
        logs.c[*deg][0] += coeff;
        logs.c[0][*deg] += coeff;
    }
    let e_sparse: Vec<(usize, BigRational)> = e
        .c
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_zero())
        .map(|(i, v)| (i, v.clone()))
        .collect();
    let sum_q = logs.eval_terms(&e_sparse);
    if sum_q.eval_terms(&terms) != logs {
        return Err(Error::Internal(
            "logarithm does not linearize the constructed sum series".into(),
        ));
    }

    let mut f = TruncatedSeries::zero_2(modulus, t_deg);
    for (i, row) in sum_q.c.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if !v.is_zero() {
                f.set_2(i, j, rational_mod(v, p, modulus)?);
            }
        }
    }
    Ok(FormalGroupLaw { p, d, t_deg, precision, modulus, f })
}

impl FormalGroupLaw {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn height(&self) -> usize {
        self.d
    }

    pub fn degree_cap(&self) -> usize {
        self.t_deg
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// The sum series `F(x, y)`.
    pub fn f(&self) -> &TruncatedSeries {
        &self.f
    }

    /// The same law with coefficients reduced to a smaller precision.
    pub fn reduce(&self, precision: u32) -> Result<FormalGroupLaw> {
        if precision == 0 || precision > self.precision {
            return Err(Error::InvalidParameter(format!(
                "cannot reduce precision {} to {precision}",
                self.precision
            )));
        }
        let modulus = self.p.pow(precision);
        Ok(FormalGroupLaw {
            p: self.p,
            d: self.d,
            t_deg: self.t_deg,
            precision,
            modulus,
            f: self.f.reduce_modulus(modulus)?,
        })
    }

    /// Checks unitality, commutativity, and associativity of the stored
    /// truncation; any failure means the reduction went wrong.
    pub fn check_axioms(&self) -> Result<()> {
        for i in 0..=self.t_deg {
            let expect = if i == 1 { 1 } else { 0 };
            if self.f.coeff_2(i, 0) != expect || self.f.coeff_2(0, i) != expect {
                return Err(Error::Internal(format!(
                    "sum series is not unital in degree {i}"
                )));
            }
        }
        for (i, j, v) in self.f.monomials() {
            if self.f.coeff_2(j, i) != v {
                return Err(Error::Internal(format!(
                    "sum series is not commutative at ({i}, {j})"
                )));
            }
        }
        let cap = self.t_deg;
        let x = Tri::coordinate(self.modulus, cap, 0);
        let y = Tri::coordinate(self.modulus, cap, 1);
        let z = Tri::coordinate(self.modulus, cap, 2);
        let xy = Tri::subst_2(&self.f, &x, &y);
        let yz = Tri::subst_2(&self.f, &y, &z);
        if Tri::subst_2(&self.f, &xy, &z) != Tri::subst_2(&self.f, &x, &yz) {
            return Err(Error::Internal("sum series is not associative".into()));
        }
        Ok(())
    }

    /// Formal sum `F(a(x), b(x))` of two univariate series without
    /// constant terms.
    pub fn formal_sum(
        &self,
        a: &TruncatedSeries,
        b: &TruncatedSeries,
    ) -> Result<TruncatedSeries> {
        for s in [a, b] {
            if s.modulus() != self.modulus {
                return Err(Error::ContextMismatch(format!(
                    "series modulus {} does not match the law's {}",
                    s.modulus(),
                    self.modulus
                )));
            }
            if s.vars() != 1 {
                return Err(Error::ShapeMismatch(
                    "formal sum needs univariate arguments".into(),
                ));
            }
            if s.coeff_1(0) != 0 {
                return Err(Error::InvalidParameter(
                    "formal sum needs vanishing constant terms".into(),
                ));
            }
        }
        if a.cap() != b.cap() || a.cap() > self.t_deg {
            return Err(Error::ShapeMismatch(format!(
                "argument caps {} and {} must agree and stay within {}",
                a.cap(),
                b.cap(),
                self.t_deg
            )));
        }
        Ok(self.f.subst_2(a, b))
    }
}

/// Computes the multiplication-by-`p^j` series of a law through degree
/// `t_deg`, certifying its lowest term whenever the coefficients live in
/// a field.
pub fn p_series(law: &FormalGroupLaw, j: usize, t_deg: usize) -> Result<PSeries> {
    if t_deg == 0 || t_deg > law.t_deg {
        return Err(Error::InvalidParameter(format!(
            "degree cap {t_deg} outside 1..={}",
            law.t_deg
        )));
    }
    let m = law.modulus;
    let x = TruncatedSeries::var(m, t_deg);
    let complete = law
        .p
        .checked_pow((j * law.d) as u32)
        .is_some_and(|low| low as u128 <= t_deg as u128);
    if j == 0 {
        let certified = (law.precision == 1).then_some((1usize, 1u64));
        return Ok(PSeries { j, series: x, certified_lowest: certified, complete });
    }

    let fb = if t_deg == law.t_deg { law.f.clone() } else { law.f.truncate(t_deg) };
    let mut p_one = x.clone();
    for _ in 1..law.p {
        p_one = fb.subst_2(&p_one, &x);
    }
    let mut series = p_one.clone();
    for _ in 1..j {
        series = p_one.compose_1(&series);
    }

    // Over F_p the lowest term of [p^j] follows from the lowest term of
    // [p] by composition: degrees multiply and units cannot cancel.
    let certified_lowest = if law.precision == 1 {
        p_one.lowest_term().and_then(|(q1, u1)| {
            let mut deg: u128 = q1 as u128;
            let mut unit = u1;
            for _ in 1..j {
                deg = deg.checked_mul(q1 as u128)?;
                unit = mul_mod(u1, pow_mod(unit, q1 as u64, m), m);
            }
            usize::try_from(deg).ok().map(|low| (low, unit))
        })
    } else {
        None
    };

    Ok(PSeries { j, series, certified_lowest, complete })
}

/// Extracts the `p^j`-torsion algebra of a mod-`p` law, checking that
/// `[p]` has its lowest term exactly at degree `p^d`.
pub fn torsion_algebra(law: &FormalGroupLaw, j: usize) -> Result<TorsionAlgebra> {
    if law.precision != 1 {
        return Err(Error::InvalidParameter(
            "torsion algebras need coefficients reduced mod p".into(),
        ));
    }
    let pd = law
        .p
        .checked_pow(law.d as u32)
        .and_then(|v| usize::try_from(v).ok())
        .ok_or_else(|| {
            Error::InvalidParameter(format!(
                "{}^{} overflows a machine integer",
                law.p, law.d
            ))
        })?;
    if law.t_deg < pd {
        return Err(Error::InvalidParameter(format!(
            "degree cap {} is insufficient: the height-{} law needs {pd}",
            law.t_deg, law.d
        )));
    }
    let ps = p_series(law, 1, law.t_deg)?;
    let (low, unit) = ps.series.lowest_term().ok_or_else(|| {
        Error::Internal("multiplication by p vanished within the cap".into())
    })?;
    if low != pd {
        return Err(Error::Internal(format!(
            "multiplication by p starts in degree {low}, expected {pd}"
        )));
    }
    let dim = law
        .p
        .checked_pow((j * law.d) as u32)
        .and_then(|v| usize::try_from(v).ok())
        .ok_or_else(|| {
            Error::InvalidParameter(format!(
                "torsion dimension {}^{} overflows a machine integer",
                law.p,
                j * law.d
            ))
        })?;
    Ok(TorsionAlgebra { p: law.p, d: law.d, j, dim, unit })
}

/// Largest torsion dimension for which [`TorsionAlgebra::dual_coalgebra`]
/// will materialize the basis.
pub const MAX_DUAL_DIM: usize = 1024;

impl TorsionAlgebra {
    /// The dual coalgebra of `k[x]/(x^dim)`: a divided-power curve with
    /// `dim` basis elements. The leading unit scales `x^dim` away, so the
    /// dual is independent of it.
    pub fn dual_coalgebra(&self) -> Result<GradedCoalgebra> {
        if self.dim > MAX_DUAL_DIM {
            return Err(Error::InvalidParameter(format!(
                "dual coalgebra of dimension {} exceeds the {MAX_DUAL_DIM} guard",
                self.dim
            )));
        }
        let field = build_field(self.p, 1)?;
        curve_coalgebra(&field, self.dim)
    }
}
