//! Graded coalgebras and comodules presented by structure constants.
//!
//! A coalgebra here is degreewise finite, connected (one basis element in
//! degree zero, which is the coaugmentation), and carries an explicit
//! truncation degree: the data only speaks below `trunc`, and downstream
//! homology reports carry that bound as their validity window.
//!
//! Structure constants are stored sparsely over global basis indices;
//! every constructor validates the full axiom set (degree preservation,
//! coassociativity, counit laws, grouplike coaugmentation) exactly, so a
//! value of these types is trustworthy by construction.

pub mod cobar;
pub mod cotensor;
pub mod cotor;

pub use cobar::{cobar, CobarComplex, CobarWord};
pub use cotensor::{cotensor, cotensor_power, CotensorPower, CotensorProduct};
pub use cotor::{cotor, CotorReport};

use std::collections::HashMap;

use crate::coeffring::field::FiniteFieldCtx;
use crate::error::{Error, Result};

/// Ordered graded basis with per-degree lookup tables.
///
/// Global indices are the canonical order everywhere in this crate; the
/// per-degree local order is global order restricted to a degree, which is
/// what the graded matrices index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedBasis {
    labels: Vec<String>,
    degrees: Vec<usize>,
    by_degree: Vec<Vec<usize>>,
    local: Vec<usize>,
}

impl GradedBasis {
    pub fn new(labels: Vec<String>, degrees: Vec<usize>) -> Result<Self> {
        if labels.len() != degrees.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} labels for {} degrees",
                labels.len(),
                degrees.len()
            )));
        }
        let max_deg = degrees.iter().copied().max().unwrap_or(0);
        let mut by_degree = vec![Vec::new(); max_deg + 1];
        let mut local = vec![0usize; degrees.len()];
        for (i, &g) in degrees.iter().enumerate() {
            local[i] = by_degree[g].len();
            by_degree[g].push(i);
        }
        Ok(GradedBasis { labels, degrees, by_degree, local })
    }

    /// Empty basis (the zero graded vector space).
    pub fn empty() -> Self {
        GradedBasis {
            labels: Vec::new(),
            degrees: Vec::new(),
            by_degree: Vec::new(),
            local: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn degree(&self, i: usize) -> usize {
        self.degrees[i]
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    /// Local index of element `i` within its degree.
    pub fn local(&self, i: usize) -> usize {
        self.local[i]
    }

    /// Global indices in degree `n`, in global order.
    pub fn in_degree(&self, n: usize) -> &[usize] {
        self.by_degree.get(n).map_or(&[], |v| v.as_slice())
    }

    pub fn dim_in(&self, n: usize) -> usize {
        self.in_degree(n).len()
    }

    /// Dimensions for degrees `0..window`.
    pub fn dims_below(&self, window: usize) -> Vec<usize> {
        (0..window).map(|n| self.dim_in(n)).collect()
    }
}

/// Sparse triplet list normalized: duplicates summed, zeros dropped,
/// sorted by index pair.
fn normalize_pairs(
    field: &FiniteFieldCtx,
    entries: Vec<(usize, usize, u64)>,
) -> Vec<(usize, usize, u64)> {
    let mut acc: HashMap<(usize, usize), u64> = HashMap::new();
    for (a, b, c) in entries {
        let slot = acc.entry((a, b)).or_insert(0);
        *slot = field.add(*slot, c);
    }
    let mut out: Vec<(usize, usize, u64)> = acc
        .into_iter()
        .filter(|&(_, c)| c != 0)
        .map(|((a, b), c)| (a, b, c))
        .collect();
    out.sort_unstable();
    out
}

/// Connected graded coalgebra over a finite field, given by structure
/// constants. `delta[i]` lists `(j, k, c)` with `Δ(e_i) = Σ c · e_j ⊗ e_k`.
#[derive(Debug, Clone)]
pub struct GradedCoalgebra {
    field: FiniteFieldCtx,
    basis: GradedBasis,
    delta: Vec<Vec<(usize, usize, u64)>>,
    eta: usize,
    trunc: usize,
}

impl GradedCoalgebra {
    /// Builds and fully validates a coalgebra presentation.
    ///
    /// Validation requirements: exactly one basis element in degree 0 (the
    /// coaugmentation `eta`, necessarily grouplike), all degrees below
    /// `trunc`, degree-preserving comultiplication, coassociativity, and
    /// both counit laws with the counit dual to `eta`.
    pub fn new(
        field: FiniteFieldCtx,
        labels: Vec<String>,
        degrees: Vec<usize>,
        delta: Vec<Vec<(usize, usize, u64)>>,
        eta: usize,
        trunc: usize,
    ) -> Result<Self> {
        let basis = GradedBasis::new(labels, degrees)?;
        if basis.is_empty() {
            return Err(Error::InvalidParameter("empty coalgebra basis".into()));
        }
        if delta.len() != basis.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} comultiplication rows for {} basis elements",
                delta.len(),
                basis.len()
            )));
        }
        if eta >= basis.len() {
            return Err(Error::InvalidParameter("coaugmentation index out of range".into()));
        }
        if trunc == 0 {
            return Err(Error::InvalidParameter("truncation degree must be positive".into()));
        }
        let n = basis.len();
        let delta: Vec<_> = delta
            .into_iter()
            .map(|row| normalize_pairs(&field, row))
            .collect();
        for (i, row) in delta.iter().enumerate() {
            for &(a, b, c) in row {
                if a >= n || b >= n {
                    return Err(Error::ShapeMismatch(format!(
                        "comultiplication of {} references basis index out of range",
                        basis.label(i)
                    )));
                }
                if c >= field.q() {
                    return Err(Error::ShapeMismatch(
                        "structure constant outside the coefficient field".into(),
                    ));
                }
            }
        }
        let coalg = GradedCoalgebra { field, basis, delta, eta, trunc };
        coalg.validate()?;
        Ok(coalg)
    }

    fn validate(&self) -> Result<()> {
        let b = &self.basis;
        if b.degree(self.eta) != 0 {
            return Err(Error::InvalidParameter(
                "coaugmentation must sit in degree 0".into(),
            ));
        }
        if b.in_degree(0) != [self.eta] {
            return Err(Error::InvalidParameter(
                "degree 0 must be spanned by the coaugmentation alone".into(),
            ));
        }
        for i in 0..b.len() {
            if b.degree(i) >= self.trunc {
                return Err(Error::InvalidParameter(format!(
                    "basis element {} has degree {} >= truncation {}",
                    b.label(i),
                    b.degree(i),
                    self.trunc
                )));
            }
        }
        // Grouplike coaugmentation.
        if self.delta[self.eta] != [(self.eta, self.eta, 1)] {
            return Err(Error::InvalidParameter(
                "coaugmentation is not grouplike".into(),
            ));
        }
        // Degree preservation.
        for i in 0..b.len() {
            for &(x, y, _) in &self.delta[i] {
                if b.degree(x) + b.degree(y) != b.degree(i) {
                    return Err(Error::InvalidParameter(format!(
                        "comultiplication of {} is not degree-preserving",
                        b.label(i)
                    )));
                }
            }
        }
        // Counit laws, with the counit dual to eta (forced by grading and
        // connectedness).
        for i in 0..b.len() {
            let mut left = vec![0u64; b.len()];
            let mut right = vec![0u64; b.len()];
            for &(x, y, c) in &self.delta[i] {
                if x == self.eta {
                    left[y] = self.field.add(left[y], c);
                }
                if y == self.eta {
                    right[x] = self.field.add(right[x], c);
                }
            }
            for k in 0..b.len() {
                let expect = u64::from(k == i);
                if left[k] != expect || right[k] != expect {
                    return Err(Error::InvalidParameter(format!(
                        "counit law fails on {}",
                        b.label(i)
                    )));
                }
            }
        }
        // Coassociativity.
        for i in 0..b.len() {
            let mut lhs: HashMap<(usize, usize, usize), u64> = HashMap::new();
            let mut rhs: HashMap<(usize, usize, usize), u64> = HashMap::new();
            for &(a, bb, c1) in &self.delta[i] {
                for &(x, y, c2) in &self.delta[a] {
                    let e = lhs.entry((x, y, bb)).or_insert(0);
                    *e = self.field.add(*e, self.field.mul(c1, c2));
                }
                for &(x, y, c2) in &self.delta[bb] {
                    let e = rhs.entry((a, x, y)).or_insert(0);
                    *e = self.field.add(*e, self.field.mul(c1, c2));
                }
            }
            lhs.retain(|_, v| *v != 0);
            rhs.retain(|_, v| *v != 0);
            if lhs != rhs {
                return Err(Error::InvalidParameter(format!(
                    "coassociativity fails on {}",
                    b.label(i)
                )));
            }
        }
        Ok(())
    }

    pub fn field(&self) -> &FiniteFieldCtx {
        &self.field
    }

    pub fn basis(&self) -> &GradedBasis {
        &self.basis
    }

    pub fn delta_of(&self, i: usize) -> &[(usize, usize, u64)] {
        &self.delta[i]
    }

    pub fn eta(&self) -> usize {
        self.eta
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    /// Counit value on basis element `i` (dual to the coaugmentation).
    pub fn counit_of(&self, i: usize) -> u64 {
        u64::from(i == self.eta)
    }

    /// Global indices of the positive-degree basis (the complement of the
    /// coaugmentation), in global order. This is the reduced object whose
    /// tensor powers fill the interior cobar slots.
    pub fn reduced_indices(&self) -> Vec<usize> {
        (0..self.basis.len()).filter(|&i| i != self.eta).collect()
    }

    /// Detects the formal-curve shape: one basis element in each degree
    /// `0, s, 2s, …` below the truncation and none elsewhere, with every
    /// interior comultiplication split nonzero (so the dual algebra is a
    /// truncated univariate polynomial ring on the degree-`s` element).
    /// Returns the degree scale `s`.
    pub fn formal_curve_scale(&self) -> Result<usize> {
        let b = &self.basis;
        let scale = (1..self.trunc)
            .find(|&g| b.dim_in(g) > 0)
            .ok_or_else(|| Error::NotACurve("no positive-degree basis".into()))?;
        for g in 0..self.trunc {
            let expect = usize::from(g % scale == 0);
            if b.dim_in(g) != expect {
                return Err(Error::NotACurve(format!(
                    "dimension {} in degree {g}, expected {expect}",
                    b.dim_in(g)
                )));
            }
        }
        // Every split of Δ on the k-th basis element must be nonzero.
        for k in 2.. {
            if k * scale >= self.trunc {
                break;
            }
            let idx = b.in_degree(k * scale)[0];
            for i in 1..k {
                let lo = b.in_degree(i * scale)[0];
                let hi = b.in_degree((k - i) * scale)[0];
                let present = self
                    .delta[idx]
                    .iter()
                    .any(|&(x, y, c)| x == lo && y == hi && c != 0);
                if !present {
                    return Err(Error::NotACurve(format!(
                        "comultiplication of {} misses the {}+{} split",
                        b.label(idx),
                        i * scale,
                        (k - i) * scale
                    )));
                }
            }
        }
        Ok(scale)
    }

    /// Multiplication table of the dual algebra: `table[i][j]` lists
    /// `(n, c)` with `a_i · a_j = Σ c · a_n` for the dual basis `a_i`.
    pub fn dual_product(&self) -> Vec<Vec<Vec<(usize, u64)>>> {
        let n = self.basis.len();
        let mut table = vec![vec![Vec::new(); n]; n];
        for (idx, row) in self.delta.iter().enumerate() {
            for &(i, j, c) in row {
                table[i][j].push((idx, c));
            }
        }
        table
    }
}

/// Graded comodule over a [`GradedCoalgebra`], with a left and/or right
/// coaction. `psi_l[i]` lists `(a, k, c)` meaning `ψ_L(m_i) = Σ c·e_a⊗m_k`;
/// `psi_r[i]` lists `(k, a, c)` meaning `ψ_R(m_i) = Σ c·m_k⊗e_a`.
#[derive(Debug, Clone)]
pub struct GradedComodule {
    field: FiniteFieldCtx,
    basis: GradedBasis,
    psi_l: Option<Vec<Vec<(usize, usize, u64)>>>,
    psi_r: Option<Vec<Vec<(usize, usize, u64)>>>,
}

impl GradedComodule {
    /// Builds a comodule and validates its coaction axioms against `c`.
    pub fn new(
        c: &GradedCoalgebra,
        labels: Vec<String>,
        degrees: Vec<usize>,
        psi_l: Option<Vec<Vec<(usize, usize, u64)>>>,
        psi_r: Option<Vec<Vec<(usize, usize, u64)>>>,
    ) -> Result<Self> {
        let field = c.field().clone();
        let basis = GradedBasis::new(labels, degrees)?;
        let norm = |opt: Option<Vec<Vec<(usize, usize, u64)>>>| {
            opt.map(|rows| {
                rows.into_iter()
                    .map(|r| normalize_pairs(&field, r))
                    .collect::<Vec<_>>()
            })
        };
        let psi_l = norm(psi_l);
        let psi_r = norm(psi_r);
        let m = GradedComodule { field, basis, psi_l, psi_r };
        m.validate_against(c)?;
        Ok(m)
    }

    pub fn field(&self) -> &FiniteFieldCtx {
        &self.field
    }

    pub fn basis(&self) -> &GradedBasis {
        &self.basis
    }

    pub fn has_left(&self) -> bool {
        self.psi_l.is_some()
    }

    pub fn has_right(&self) -> bool {
        self.psi_r.is_some()
    }

    pub fn psi_l_of(&self, i: usize) -> &[(usize, usize, u64)] {
        self.psi_l.as_ref().expect("left coaction missing")[i].as_slice()
    }

    pub fn psi_r_of(&self, i: usize) -> &[(usize, usize, u64)] {
        self.psi_r.as_ref().expect("right coaction missing")[i].as_slice()
    }

    /// Validates every declared coaction axiom exactly.
    pub fn validate_against(&self, c: &GradedCoalgebra) -> Result<()> {
        if self.field != *c.field() {
            return Err(Error::ContextMismatch(
                "comodule and coalgebra coefficient fields differ".into(),
            ));
        }
        let nb = self.basis.len();
        if let Some(psi) = &self.psi_l {
            if psi.len() != nb {
                return Err(Error::ShapeMismatch("left coaction row count".into()));
            }
            self.check_left(c, psi)?;
        }
        if let Some(psi) = &self.psi_r {
            if psi.len() != nb {
                return Err(Error::ShapeMismatch("right coaction row count".into()));
            }
            self.check_right(c, psi)?;
        }
        if let (Some(pl), Some(pr)) = (&self.psi_l, &self.psi_r) {
            self.check_bicomodule(c, pl, pr)?;
        }
        Ok(())
    }

    fn check_left(
        &self,
        c: &GradedCoalgebra,
        psi: &[Vec<(usize, usize, u64)>],
    ) -> Result<()> {
        let f = &self.field;
        for i in 0..self.basis.len() {
            // Degree preservation and index ranges.
            for &(a, k, _) in &psi[i] {
                if a >= c.basis().len() || k >= self.basis.len() {
                    return Err(Error::ShapeMismatch("left coaction index range".into()));
                }
                if c.basis().degree(a) + self.basis.degree(k) != self.basis.degree(i) {
                    return Err(Error::InvalidParameter(format!(
                        "left coaction of {} is not degree-preserving",
                        self.basis.label(i)
                    )));
                }
            }
            // (ε⊗1)ψ_L = id.
            let mut counit_img = vec![0u64; self.basis.len()];
            for &(a, k, co) in &psi[i] {
                if a == c.eta() {
                    counit_img[k] = f.add(counit_img[k], co);
                }
            }
            for k in 0..self.basis.len() {
                if counit_img[k] != u64::from(k == i) {
                    return Err(Error::InvalidParameter(format!(
                        "left counit law fails on {}",
                        self.basis.label(i)
                    )));
                }
            }
            // (Δ⊗1)ψ_L = (1⊗ψ_L)ψ_L.
            let mut lhs: HashMap<(usize, usize, usize), u64> = HashMap::new();
            let mut rhs: HashMap<(usize, usize, usize), u64> = HashMap::new();
            for &(a, k, c1) in &psi[i] {
                for &(x, y, c2) in c.delta_of(a) {
                    let e = lhs.entry((x, y, k)).or_insert(0);
                    *e = f.add(*e, f.mul(c1, c2));
                }
                for &(b2, l, c2) in &psi[k] {
                    let e = rhs.entry((a, b2, l)).or_insert(0);
                    *e = f.add(*e, f.mul(c1, c2));
                }
            }
            lhs.retain(|_, v| *v != 0);
            rhs.retain(|_, v| *v != 0);
            if lhs != rhs {
                return Err(Error::InvalidParameter(format!(
                    "left coassociativity fails on {}",
                    self.basis.label(i)
                )));
            }
        }
        Ok(())
    }

    fn check_right(
        &self,
        c: &GradedCoalgebra,
        psi: &[Vec<(usize, usize, u64)>],
    ) -> Result<()> {
        let f = &self.field;
        for i in 0..self.basis.len() {
            for &(k, a, _) in &psi[i] {
                if a >= c.basis().len() || k >= self.basis.len() {
                    return Err(Error::ShapeMismatch("right coaction index range".into()));
                }
                if c.basis().degree(a) + self.basis.degree(k) != self.basis.degree(i) {
                    return Err(Error::InvalidParameter(format!(
                        "right coaction of {} is not degree-preserving",
                        self.basis.label(i)
                    )));
                }
            }
            let mut counit_img = vec![0u64; self.basis.len()];
            for &(k, a, co) in &psi[i] {
                if a == c.eta() {
                    counit_img[k] = f.add(counit_img[k], co);
                }
            }
            for k in 0..self.basis.len() {
                if counit_img[k] != u64::from(k == i) {
                    return Err(Error::InvalidParameter(format!(
                        "right counit law fails on {}",
                        self.basis.label(i)
                    )));
                }
            }
            // (ψ_R⊗1)ψ_R = (1⊗Δ)ψ_R.
            let mut lhs: HashMap<(usize, usize, usize), u64> = HashMap::new();
            let mut rhs: HashMap<(usize, usize, usize), u64> = HashMap::new();
            for &(k, a, c1) in &psi[i] {
                for &(l, b2, c2) in &psi[k] {
                    let e = lhs.entry((l, b2, a)).or_insert(0);
                    *e = f.add(*e, f.mul(c1, c2));
                }
                for &(x, y, c2) in c.delta_of(a) {
                    let e = rhs.entry((k, x, y)).or_insert(0);
                    *e = f.add(*e, f.mul(c1, c2));
                }
            }
            lhs.retain(|_, v| *v != 0);
            rhs.retain(|_, v| *v != 0);
            if lhs != rhs {
                return Err(Error::InvalidParameter(format!(
                    "right coassociativity fails on {}",
                    self.basis.label(i)
                )));
            }
        }
        Ok(())
    }

    fn check_bicomodule(
        &self,
        _c: &GradedCoalgebra,
        pl: &[Vec<(usize, usize, u64)>],
        pr: &[Vec<(usize, usize, u64)>],
    ) -> Result<()> {
        let f = &self.field;
        for i in 0..self.basis.len() {
            // (ψ_L⊗1)ψ_R = (1⊗ψ_R)ψ_L into C⊗M⊗C.
            let mut lhs: HashMap<(usize, usize, usize), u64> = HashMap::new();
            let mut rhs: HashMap<(usize, usize, usize), u64> = HashMap::new();
            for &(k, b2, c1) in &pr[i] {
                for &(a, l, c2) in &pl[k] {
                    let e = lhs.entry((a, l, b2)).or_insert(0);
                    *e = f.add(*e, f.mul(c1, c2));
                }
            }
            for &(a, k, c1) in &pl[i] {
                for &(l, b2, c2) in &pr[k] {
                    let e = rhs.entry((a, l, b2)).or_insert(0);
                    *e = f.add(*e, f.mul(c1, c2));
                }
            }
            lhs.retain(|_, v| *v != 0);
            rhs.retain(|_, v| *v != 0);
            if lhs != rhs {
                return Err(Error::InvalidParameter(format!(
                    "left and right coactions do not commute on {}",
                    self.basis.label(i)
                )));
            }
        }
        Ok(())
    }
}

/// Divided-power curve coalgebra: basis `b_0, …, b_{T-1}` with `deg b_i = i`,
/// `Δ b_n = Σ_{i+j=n} b_i ⊗ b_j`, coaugmentation `b_0`. Its dual algebra is
/// `k[x]/x^T` with `x^i` dual to `b_i`.
pub fn curve_coalgebra(field: &FiniteFieldCtx, t: usize) -> Result<GradedCoalgebra> {
    scaled_curve_coalgebra(field, t, 1)
}

/// Divided-power curve with `count` basis elements placed in degrees
/// `0, scale, 2·scale, …`; truncation `count·scale`. The `scale = 1` case
/// is [`curve_coalgebra`].
pub fn scaled_curve_coalgebra(
    field: &FiniteFieldCtx,
    count: usize,
    scale: usize,
) -> Result<GradedCoalgebra> {
    if count == 0 {
        return Err(Error::InvalidParameter("curve needs at least one basis element".into()));
    }
    if scale == 0 {
        return Err(Error::InvalidParameter("degree scale must be positive".into()));
    }
    let labels = (0..count).map(|i| format!("b{i}")).collect();
    let degrees = (0..count).map(|i| i * scale).collect();
    let delta = (0..count)
        .map(|n| (0..=n).map(|i| (i, n - i, 1u64)).collect())
        .collect();
    GradedCoalgebra::new(field.clone(), labels, degrees, delta, 0, count * scale)
}

/// The one-dimensional trivial comodule `k` in degree 0, coacting through
/// the coaugmentation on both sides.
pub fn trivial_comodule(c: &GradedCoalgebra) -> Result<GradedComodule> {
    GradedComodule::new(
        c,
        vec!["1".to_string()],
        vec![0],
        Some(vec![vec![(c.eta(), 0, 1)]]),
        Some(vec![vec![(0, c.eta(), 1)]]),
    )
}

/// The coalgebra as a bicomodule over itself, coacting by comultiplication.
pub fn regular_comodule(c: &GradedCoalgebra) -> Result<GradedComodule> {
    let n = c.basis().len();
    let labels = (0..n).map(|i| c.basis().label(i).to_string()).collect();
    let degrees = (0..n).map(|i| c.basis().degree(i)).collect();
    let delta: Vec<Vec<(usize, usize, u64)>> =
        (0..n).map(|i| c.delta_of(i).to_vec()).collect();
    GradedComodule::new(c, labels, degrees, Some(delta.clone()), Some(delta))
}

/// The positive-degree quotient `M = C / span(eta)` with its induced
/// bicomodule structure: `ψ_L = (1⊗π)Δ` and `ψ_R = (π⊗1)Δ` where `π` is
/// the projection killing the coaugmentation.
/// Index of coalgebra element `i` in the basis of [`coideal`], or `None`
/// for the grouplike.
pub fn coideal_index(c: &GradedCoalgebra, i: usize) -> Option<usize> {
    match i.cmp(&c.eta()) {
        std::cmp::Ordering::Less => Some(i),
        std::cmp::Ordering::Equal => None,
        std::cmp::Ordering::Greater => Some(i - 1),
    }
}

pub fn coideal(c: &GradedCoalgebra) -> Result<GradedComodule> {
    let old = c.basis();
    let keep: Vec<usize> = (0..old.len()).filter(|&i| i != c.eta()).collect();
    let mut new_index = vec![usize::MAX; old.len()];
    for (ni, &oi) in keep.iter().enumerate() {
        new_index[oi] = ni;
    }
    let labels = keep.iter().map(|&oi| old.label(oi).to_string()).collect();
    let degrees = keep.iter().map(|&oi| old.degree(oi)).collect();
    let mut psi_l = Vec::with_capacity(keep.len());
    let mut psi_r = Vec::with_capacity(keep.len());
    for &oi in &keep {
        let mut l = Vec::new();
        let mut r = Vec::new();
        for &(a, b, co) in c.delta_of(oi) {
            if b != c.eta() {
                l.push((a, new_index[b], co));
            }
            if a != c.eta() {
                r.push((new_index[a], b, co));
            }
        }
        psi_l.push(l);
        psi_r.push(r);
    }
    GradedComodule::new(c, labels, degrees, Some(psi_l), Some(psi_r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffring::field::build_field;

    fn f5() -> FiniteFieldCtx {
        build_field(5, 1).unwrap()
    }

    #[test]
    fn curve_axioms_and_grouplike() {
        let c = curve_coalgebra(&f5(), 5).unwrap();
        assert_eq!(c.delta_of(0), &[(0, 0, 1)]);
        // Δb_2 = b_0⊗b_2 + b_1⊗b_1 + b_2⊗b_0.
        assert_eq!(c.delta_of(2), &[(0, 2, 1), (1, 1, 1), (2, 0, 1)]);
        assert_eq!(c.formal_curve_scale().unwrap(), 1);
    }

    #[test]
    fn dual_of_curve_is_truncated_polynomials() {
        let t = 6;
        let c = curve_coalgebra(&f5(), t).unwrap();
        let table = c.dual_product();
        for i in 0..t {
            for j in 0..t {
                let expect: Vec<(usize, u64)> = if i + j < t {
                    vec![(i + j, 1)]
                } else {
                    vec![]
                };
                assert_eq!(table[i][j], expect, "x^{i} * x^{j}");
            }
        }
    }

    #[test]
    fn scaled_curve_has_scale() {
        let c = scaled_curve_coalgebra(&f5(), 4, 3).unwrap();
        assert_eq!(c.formal_curve_scale().unwrap(), 3);
        assert_eq!(c.trunc(), 12);
        assert_eq!(c.basis().dims_below(12), vec![1, 0, 0, 1, 0, 0, 1, 0, 0, 1, 0, 0]);
    }

    #[test]
    fn coideal_dims_and_coactions() {
        let c = curve_coalgebra(&f5(), 5).unwrap();
        let m = coideal(&c).unwrap();
        assert_eq!(m.basis().dims_below(5), vec![0, 1, 1, 1, 1]);
        // ψ_R(b̄_3) = b̄_1⊗b_2 + b̄_2⊗b_1 + b̄_3⊗b_0.
        assert_eq!(m.psi_r_of(2), &[(0, 2, 1), (1, 1, 1), (2, 0, 1)]);
    }

    #[test]
    fn coideal_reduced_diagonals_agree() {
        // The two composites M -> M⊗M induced by the left and right
        // coactions agree for the curve.
        let c = curve_coalgebra(&f5(), 6).unwrap();
        let m = coideal(&c).unwrap();
        let eta = c.eta();
        for i in 0..m.basis().len() {
            // (π⊗1)ψ_L drops coaction terms whose C-factor is eta; the C
            // index then maps to the coideal index (C index minus one for
            // the curve).
            let mut from_left: Vec<(usize, usize, u64)> = m
                .psi_l_of(i)
                .iter()
                .filter(|&&(a, _, _)| a != eta)
                .map(|&(a, k, co)| (a - 1, k, co))
                .collect();
            let mut from_right: Vec<(usize, usize, u64)> = m
                .psi_r_of(i)
                .iter()
                .filter(|&&(_, b, _)| b != eta)
                .map(|&(k, b, co)| (k, b - 1, co))
                .collect();
            from_left.sort_unstable();
            from_right.sort_unstable();
            assert_eq!(from_left, from_right);
        }
    }

    #[test]
    fn trivial_and_regular_validate() {
        let c = curve_coalgebra(&f5(), 7).unwrap();
        trivial_comodule(&c).unwrap();
        regular_comodule(&c).unwrap();
    }

    #[test]
    fn broken_coassociativity_is_rejected() {
        let f = f5();
        // Asymmetric Δb_3: the two triple diagonals disagree on b1⊗b1⊗b1.
        // (Rescaling only Δb_2's middle term stays coassociative, so the
        // tamper has to sit in degree 3.)
        let labels = vec!["b0".into(), "b1".into(), "b2".into(), "b3".into()];
        let degrees = vec![0, 1, 2, 3];
        let delta = vec![
            vec![(0, 0, 1)],
            vec![(0, 1, 1), (1, 0, 1)],
            vec![(0, 2, 1), (1, 1, 1), (2, 0, 1)],
            vec![(0, 3, 1), (1, 2, 1), (2, 1, 2), (3, 0, 1)],
        ];
        let err = GradedCoalgebra::new(f, labels, degrees, delta, 0, 4).unwrap_err();
        assert!(!err.is_internal());
    }

    #[test]
    fn non_curve_is_detected() {
        let f = f5();
        // Two grouplike-free lines in degree 1: dims (1, 2) is not a curve.
        let labels = vec!["e".into(), "u".into(), "v".into()];
        let degrees = vec![0, 1, 1];
        let delta = vec![
            vec![(0, 0, 1)],
            vec![(0, 1, 1), (1, 0, 1)],
            vec![(0, 2, 1), (2, 0, 1)],
        ];
        let c = GradedCoalgebra::new(f, labels, degrees, delta, 0, 2).unwrap();
        assert!(matches!(c.formal_curve_scale(), Err(Error::NotACurve(_))));
    }
}
