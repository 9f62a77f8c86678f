//! Free (and commutative) formal power series with matrix coefficients.
//!
//! A [`FreeSeries`] is a finite sum `Σ_{|α| <= N} Z^α F_α` with `m×m` complex
//! coefficients; missing words are zero. Products truncate at degree `N`. The
//! left product convolves over `αβ = γ`, the right product over `βα = γ`; both
//! are realized as matrices on a [`TruncatedFock`] space by [`FreeSeries::mult_matrix`].

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::fock::TruncatedFock;
use crate::linalg::{c, kron, max_abs, opnorm, pinv, CMat};
use crate::tol;
use crate::word::{enumerate_words, MultiIndex, Word};
use crate::Side;

/// Truncated free formal power series `Σ Z^α F_α`.
#[derive(Debug, Clone, PartialEq)]
pub struct FreeSeries {
    d: usize,
    m: usize,
    trunc: usize,
    coeffs: BTreeMap<Word, CMat>,
}

impl FreeSeries {
    pub fn zero(d: usize, m: usize, trunc: usize) -> FreeSeries {
        FreeSeries { d, m, trunc, coeffs: BTreeMap::new() }
    }

    /// The constant series `I`.
    pub fn identity(d: usize, m: usize, trunc: usize) -> FreeSeries {
        let mut s = FreeSeries::zero(d, m, trunc);
        s.coeffs
            .insert(Word::empty(d).expect("validated d"), CMat::identity(m, m));
        s
    }

    pub fn constant(d: usize, trunc: usize, value: CMat) -> Result<FreeSeries> {
        let m = value.nrows();
        if value.ncols() != m {
            return Err(Error::DimensionMismatch("constant coefficient not square".into()));
        }
        let mut s = FreeSeries::zero(d, m, trunc);
        s.set_coeff(Word::empty(d)?, value)?;
        Ok(s)
    }

    /// The scalar series `Z_j` (degree-one monomial with identity coefficient).
    pub fn variable(d: usize, m: usize, trunc: usize, j: usize) -> Result<FreeSeries> {
        let mut s = FreeSeries::zero(d, m, trunc);
        s.set_coeff(Word::new(d, &[j])?, CMat::identity(m, m))?;
        Ok(s)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    /// Largest degree carrying a nonzero coefficient (0 for the zero series).
    pub fn degree(&self) -> usize {
        self.coeffs
            .iter()
            .filter(|(_, mat)| max_abs(mat) > 0.0)
            .map(|(w, _)| w.len())
            .max()
            .unwrap_or(0)
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (&Word, &CMat)> {
        self.coeffs.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    /// Coefficient at `w`, densely (zero matrix if absent).
    pub fn coeff(&self, w: &Word) -> CMat {
        self.coeffs
            .get(w)
            .cloned()
            .unwrap_or_else(|| CMat::zeros(self.m, self.m))
    }

    pub fn coeff_ref(&self, w: &Word) -> Option<&CMat> {
        self.coeffs.get(w)
    }

    pub fn constant_coeff(&self) -> CMat {
        self.coeff(&Word::empty(self.d).expect("validated d"))
    }

    pub fn set_coeff(&mut self, w: Word, value: CMat) -> Result<()> {
        if w.len() > self.trunc {
            return Err(Error::InvalidParameter(format!(
                "word \"{w}\" exceeds truncation degree {}",
                self.trunc
            )));
        }
        if w.d() != self.d {
            return Err(Error::DimensionMismatch("word alphabet != series alphabet".into()));
        }
        if value.nrows() != self.m || value.ncols() != self.m {
            return Err(Error::DimensionMismatch(format!(
                "coefficient is {}x{}, series wants {}x{}",
                value.nrows(),
                value.ncols(),
                self.m,
                self.m
            )));
        }
        self.coeffs.insert(w, value);
        Ok(())
    }

    fn add_to_coeff(&mut self, w: Word, value: CMat) {
        self.coeffs
            .entry(w)
            .and_modify(|e| *e += &value)
            .or_insert(value);
    }

    pub fn add(&self, other: &FreeSeries) -> Result<FreeSeries> {
        self.check_compat(other)?;
        let mut out = self.clone();
        for (w, mat) in &other.coeffs {
            out.add_to_coeff(w.clone(), mat.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &FreeSeries) -> Result<FreeSeries> {
        self.check_compat(other)?;
        let mut out = self.clone();
        for (w, mat) in &other.coeffs {
            out.add_to_coeff(w.clone(), -mat.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, s: f64) -> FreeSeries {
        let mut out = self.clone();
        for mat in out.coeffs.values_mut() {
            *mat = mat.map(|z| z.scale(s));
        }
        out
    }

    /// Each coefficient right-multiplied by `u` (used for the Clark family `B U^*`).
    pub fn coeff_right_mul(&self, u: &CMat) -> Result<FreeSeries> {
        if u.nrows() != self.m || u.ncols() != self.m {
            return Err(Error::DimensionMismatch("coefficient multiplier size".into()));
        }
        let mut out = FreeSeries::zero(self.d, self.m, self.trunc);
        for (w, mat) in &self.coeffs {
            out.coeffs.insert(w.clone(), mat * u);
        }
        Ok(out)
    }

    /// `I - self`.
    pub fn one_minus(&self) -> FreeSeries {
        FreeSeries::identity(self.d, self.m, self.trunc)
            .sub(self)
            .expect("same shape")
    }

    /// `I + self`.
    pub fn one_plus(&self) -> FreeSeries {
        FreeSeries::identity(self.d, self.m, self.trunc)
            .add(self)
            .expect("same shape")
    }

    fn check_compat(&self, other: &FreeSeries) -> Result<()> {
        if self.d != other.d || self.m != other.m || self.trunc != other.trunc {
            return Err(Error::DimensionMismatch(format!(
                "series (d={},m={},N={}) vs (d={},m={},N={})",
                self.d, self.m, self.trunc, other.d, other.m, other.trunc
            )));
        }
        Ok(())
    }

    /// Left or right product, truncated at degree `N`.
    ///
    /// Left: coefficient at `γ` is `Σ_{αβ=γ} F_α G_β`. Right: `Σ_{βα=γ} F_α G_β`
    /// (the multiplier's word lands on the right, coefficients still multiply in
    /// the order `F_α G_β`).
    pub fn multiply(&self, other: &FreeSeries, side: Side) -> Result<FreeSeries> {
        self.check_compat(other)?;
        let mut out = FreeSeries::zero(self.d, self.m, self.trunc);
        for (a, fa) in &self.coeffs {
            for (b, gb) in &other.coeffs {
                if a.len() + b.len() > self.trunc {
                    continue;
                }
                let gamma = match side {
                    Side::Left => a.concat(b),
                    Side::Right => b.concat(a),
                };
                out.add_to_coeff(gamma, fa * gb);
            }
        }
        Ok(out)
    }

    /// Inverse for the left product, by degree recursion:
    /// `G_∅ = F_∅⁻¹`, `G_γ = -F_∅⁻¹ Σ_{αβ=γ, α≠∅} F_α G_β`. Exact up to degree `N`.
    ///
    /// Because constant terms are invertible, this is also the right-product
    /// inverse of the same series.
    pub fn invert(&self) -> Result<FreeSeries> {
        let f0 = self.constant_coeff();
        let sig = crate::linalg::singular_values(&f0);
        let smax = sig.first().copied().unwrap_or(0.0);
        let smin = sig.last().copied().unwrap_or(0.0);
        let cond = if smin > 0.0 { smax / smin } else { f64::INFINITY };
        if !cond.is_finite() || cond > tol::COND_GUARD {
            return Err(Error::SingularConstantTerm { cond });
        }
        let f0_inv = pinv(&f0, 0.0);
        let mut out = FreeSeries::zero(self.d, self.m, self.trunc);
        let words = enumerate_words(self.d, self.trunc)?;
        for gamma in words {
            if gamma.is_empty() {
                out.coeffs.insert(gamma, f0_inv.clone());
                continue;
            }
            let mut acc = CMat::zeros(self.m, self.m);
            let mut nonzero = false;
            for (alpha, beta) in gamma.proper_prefix_splits() {
                if let Some(fa) = self.coeffs.get(&alpha) {
                    if let Some(gb) = out.coeffs.get(&beta) {
                        acc += fa * gb;
                        nonzero = true;
                    }
                }
            }
            if nonzero {
                out.coeffs.insert(gamma, -(&f0_inv) * acc);
            }
        }
        Ok(out)
    }

    /// Inverse for the right product: `T ∘ invert ∘ T`.
    pub fn invert_right(&self) -> Result<FreeSeries> {
        Ok(self.transpose_series().invert()?.transpose_series())
    }

    /// The transpose map `Σ Z^α F_α ↦ Σ Z^{α^T} F_α`; an involution that swaps
    /// the left and right series of a transpose-conjugate pair.
    pub fn transpose_series(&self) -> FreeSeries {
        let mut out = FreeSeries::zero(self.d, self.m, self.trunc);
        for (w, mat) in &self.coeffs {
            out.coeffs.insert(w.transpose(), mat.clone());
        }
        out
    }

    /// Matrix of the left/right multiplication operator on a truncated Fock space:
    /// left sends `e_β ⊗ h` to `Σ_μ e_{μβ} ⊗ F_μ h`, right to `Σ_μ e_{βμ} ⊗ F_μ h`.
    pub fn mult_matrix(&self, side: Side, fock: &TruncatedFock) -> Result<CMat> {
        if fock.d() != self.d || fock.m() != self.m {
            return Err(Error::DimensionMismatch(
                "Fock space and series disagree in d or m".into(),
            ));
        }
        let m = self.m;
        let dim = fock.dim();
        let mut mat = CMat::zeros(dim, dim);
        for (mu, fmu) in &self.coeffs {
            for (q, beta) in fock.words().iter().enumerate() {
                if mu.len() + beta.len() > fock.trunc() {
                    continue;
                }
                let target = match side {
                    Side::Left => mu.concat(beta),
                    Side::Right => beta.concat(mu),
                };
                let t = fock.word_index(&target).expect("within truncation");
                for i in 0..m {
                    for jj in 0..m {
                        mat[(t * m + i, q * m + jj)] += fmu[(i, jj)];
                    }
                }
            }
        }
        Ok(mat)
    }

    /// Evaluate at a matrix point: `Σ_α Z^α ⊗ F_α` with `Z^{i_1…i_k} = Z_{i_1}⋯Z_{i_k}`,
    /// the point factor major in the Kronecker layout.
    pub fn eval_nc(&self, p: &NCPoint) -> Result<CMat> {
        if p.d() != self.d {
            return Err(Error::DimensionMismatch("NC point has wrong number of variables".into()));
        }
        let n = p.dim();
        let mut out = CMat::zeros(n * self.m, n * self.m);
        // Reuse word powers along the graded order: Z^{w·j} = Z^w Z_j.
        let mut powers: BTreeMap<Word, CMat> = BTreeMap::new();
        powers.insert(Word::empty(self.d)?, CMat::identity(n, n));
        let words = enumerate_words(self.d, self.trunc)?;
        for w in &words {
            if w.is_empty() {
                continue;
            }
            let mut letters: Vec<usize> = w.letters().collect();
            let last = letters.pop().expect("nonempty");
            let prefix = Word::new(self.d, &letters)?;
            let zp = powers.get(&prefix).expect("graded order").clone();
            let zw = &zp * p.mat(last);
            powers.insert(w.clone(), zw);
        }
        for (w, fw) in &self.coeffs {
            let zw = powers.get(w).expect("within truncation");
            out += kron(zw, fw);
        }
        Ok(out)
    }

    /// Quotient to the commutative series: coefficient at `n` is
    /// `Σ_{λ(α)=n} F_α` (the Davidson-Pitts symmetrization of the coefficients).
    pub fn symmetrize(&self) -> CommSeries {
        let mut out = CommSeries::zero(self.d, self.m, self.trunc);
        for (w, mat) in &self.coeffs {
            out.add_to_coeff(w.abelianize(), mat.clone());
        }
        out
    }

    /// Certified bounds on the free multiplier norm at this truncation:
    /// `lower` is the norm of the compressed multiplication operator (a true lower
    /// bound), `upper` the triangle-inequality bound `Σ_α ||F_α||` (a true upper
    /// bound). The exact norm is only bracketed, never claimed.
    pub fn schur_norm_bounds(&self, fock: &TruncatedFock) -> Result<SchurNormBounds> {
        let mult = self.mult_matrix(Side::Left, fock)?;
        let lower = opnorm(&mult);
        let upper: f64 = self.coeffs.values().map(opnorm).sum();
        Ok(SchurNormBounds { lower, upper })
    }

    /// The same series at a different truncation degree; coefficients beyond the
    /// new degree are dropped.
    pub fn with_trunc(&self, trunc: usize) -> FreeSeries {
        let coeffs = self
            .coeffs
            .iter()
            .filter(|(w, _)| w.len() <= trunc)
            .map(|(w, m)| (w.clone(), m.clone()))
            .collect();
        FreeSeries { d: self.d, m: self.m, trunc, coeffs }
    }

    /// Max entry difference between two series over the union of their supports.
    pub fn max_coeff_diff(&self, other: &FreeSeries) -> f64 {
        let mut err: f64 = 0.0;
        for (w, mat) in &self.coeffs {
            err = err.max(max_abs(&(mat - other.coeff(w))));
        }
        for (w, mat) in &other.coeffs {
            if !self.coeffs.contains_key(w) {
                err = err.max(max_abs(mat));
            }
        }
        err
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SchurNormBounds {
    pub lower: f64,
    pub upper: f64,
}

impl SchurNormBounds {
    /// Which bound certifies membership in the closed Schur class, if any.
    pub fn certificate(&self) -> SchurCert {
        if self.upper <= 1.0 + 1e-12 {
            SchurCert::L1Certified
        } else if self.lower <= 1.0 + 1e-12 {
            SchurCert::LowerBoundOnly
        } else {
            SchurCert::NotSchur
        }
    }
}

/// Contractivity certificate for a truncated series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchurCert {
    /// `Σ ||F_α|| <= 1`: genuinely in the Schur class.
    L1Certified,
    /// Only the compressed lower bound is `<= 1`; membership is plausible but
    /// not certified at this truncation.
    LowerBoundOnly,
    /// The compressed operator already has norm `> 1`: certainly not Schur.
    NotSchur,
}

/// Truncated commutative power series `Σ_n z^n b_n` over `N^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct CommSeries {
    d: usize,
    m: usize,
    trunc: usize,
    coeffs: BTreeMap<MultiIndex, CMat>,
}

impl CommSeries {
    pub fn zero(d: usize, m: usize, trunc: usize) -> CommSeries {
        CommSeries { d, m, trunc, coeffs: BTreeMap::new() }
    }

    pub fn identity(d: usize, m: usize, trunc: usize) -> CommSeries {
        let mut s = CommSeries::zero(d, m, trunc);
        s.coeffs.insert(MultiIndex::zero(d), CMat::identity(m, m));
        s
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn degree(&self) -> usize {
        self.coeffs
            .iter()
            .filter(|(_, mat)| max_abs(mat) > 0.0)
            .map(|(n, _)| n.degree())
            .max()
            .unwrap_or(0)
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (&MultiIndex, &CMat)> {
        self.coeffs.iter()
    }

    pub fn coeff(&self, n: &MultiIndex) -> CMat {
        self.coeffs
            .get(n)
            .cloned()
            .unwrap_or_else(|| CMat::zeros(self.m, self.m))
    }

    pub fn constant_coeff(&self) -> CMat {
        self.coeff(&MultiIndex::zero(self.d))
    }

    pub fn set_coeff(&mut self, n: MultiIndex, value: CMat) -> Result<()> {
        if n.degree() > self.trunc {
            return Err(Error::InvalidParameter(format!(
                "multi-index {n} exceeds truncation degree {}",
                self.trunc
            )));
        }
        if n.d() != self.d || value.nrows() != self.m || value.ncols() != self.m {
            return Err(Error::DimensionMismatch("commutative coefficient shape".into()));
        }
        self.coeffs.insert(n, value);
        Ok(())
    }

    fn add_to_coeff(&mut self, n: MultiIndex, value: CMat) {
        self.coeffs
            .entry(n)
            .and_modify(|e| *e += &value)
            .or_insert(value);
    }

    pub fn add(&self, other: &CommSeries) -> Result<CommSeries> {
        self.check_compat(other)?;
        let mut out = self.clone();
        for (n, mat) in &other.coeffs {
            out.add_to_coeff(n.clone(), mat.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &CommSeries) -> Result<CommSeries> {
        self.check_compat(other)?;
        let mut out = self.clone();
        for (n, mat) in &other.coeffs {
            out.add_to_coeff(n.clone(), -mat.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, s: f64) -> CommSeries {
        let mut out = self.clone();
        for mat in out.coeffs.values_mut() {
            *mat = mat.map(|z| z.scale(s));
        }
        out
    }

    pub fn one_minus(&self) -> CommSeries {
        CommSeries::identity(self.d, self.m, self.trunc)
            .sub(self)
            .expect("same shape")
    }

    pub fn one_plus(&self) -> CommSeries {
        CommSeries::identity(self.d, self.m, self.trunc)
            .add(self)
            .expect("same shape")
    }

    fn check_compat(&self, other: &CommSeries) -> Result<()> {
        if self.d != other.d || self.m != other.m || self.trunc != other.trunc {
            return Err(Error::DimensionMismatch("commutative series shapes differ".into()));
        }
        Ok(())
    }

    /// Commutative convolution product, truncated at total degree `N`.
    pub fn multiply(&self, other: &CommSeries) -> Result<CommSeries> {
        self.check_compat(other)?;
        let mut out = CommSeries::zero(self.d, self.m, self.trunc);
        for (a, fa) in &self.coeffs {
            for (b, gb) in &other.coeffs {
                if a.degree() + b.degree() > self.trunc {
                    continue;
                }
                out.add_to_coeff(a.add(b), fa * gb);
            }
        }
        Ok(out)
    }

    /// Inverse by total-degree recursion; requires an invertible constant term.
    pub fn invert(&self) -> Result<CommSeries> {
        let f0 = self.constant_coeff();
        let sig = crate::linalg::singular_values(&f0);
        let smax = sig.first().copied().unwrap_or(0.0);
        let smin = sig.last().copied().unwrap_or(0.0);
        let cond = if smin > 0.0 { smax / smin } else { f64::INFINITY };
        if !cond.is_finite() || cond > tol::COND_GUARD {
            return Err(Error::SingularConstantTerm { cond });
        }
        let f0_inv = pinv(&f0, 0.0);
        let mut out = CommSeries::zero(self.d, self.m, self.trunc);
        let multis = crate::word::enumerate_multi_indices(self.d, self.trunc);
        for gamma in multis {
            if gamma.degree() == 0 {
                out.coeffs.insert(gamma, f0_inv.clone());
                continue;
            }
            let mut acc = CMat::zeros(self.m, self.m);
            let mut nonzero = false;
            for (a, fa) in &self.coeffs {
                if a.degree() == 0 {
                    continue;
                }
                if let Some(b) = gamma.checked_sub(a) {
                    if let Some(gb) = out.coeffs.get(&b) {
                        acc += fa * gb;
                        nonzero = true;
                    }
                }
            }
            if nonzero {
                out.coeffs.insert(gamma, -(&f0_inv) * acc);
            }
        }
        Ok(out)
    }

    /// Evaluate at a scalar point of the ball.
    pub fn eval(&self, z: &[num_complex::Complex64]) -> Result<CMat> {
        if z.len() != self.d {
            return Err(Error::DimensionMismatch("point has wrong number of variables".into()));
        }
        let mut out = CMat::zeros(self.m, self.m);
        for (n, mat) in &self.coeffs {
            let mut zn = c(1.0);
            for (k, &cnt) in n.counts().iter().enumerate() {
                zn *= z[k].powu(cnt);
            }
            out += mat.map(|v| v * zn);
        }
        Ok(out)
    }

    /// `Σ_n ||b_n||`, an upper bound for the Drury-Arveson multiplier norm.
    pub fn l1_norm(&self) -> f64 {
        self.coeffs.values().map(opnorm).sum()
    }

    /// The same series at a different truncation degree; coefficients beyond the
    /// new degree are dropped.
    pub fn with_trunc(&self, trunc: usize) -> CommSeries {
        let coeffs = self
            .coeffs
            .iter()
            .filter(|(n, _)| n.degree() <= trunc)
            .map(|(n, m)| (n.clone(), m.clone()))
            .collect();
        CommSeries { d: self.d, m: self.m, trunc, coeffs }
    }

    pub fn max_coeff_diff(&self, other: &CommSeries) -> f64 {
        let mut err: f64 = 0.0;
        for (n, mat) in &self.coeffs {
            err = err.max(max_abs(&(mat - other.coeff(n))));
        }
        for (n, mat) in &other.coeffs {
            if !self.coeffs.contains_key(n) {
                err = err.max(max_abs(mat));
            }
        }
        err
    }
}

/// A matrix point `Z = (Z_1, …, Z_d)` of the noncommutative ball (or its closure).
#[derive(Debug, Clone)]
pub struct NCPoint {
    mats: Vec<CMat>,
}

impl NCPoint {
    pub fn new(mats: Vec<CMat>) -> Result<NCPoint> {
        if mats.is_empty() {
            return Err(Error::InvalidParameter("NC point needs at least one matrix".into()));
        }
        let n = mats[0].nrows();
        for z in &mats {
            if z.nrows() != n || z.ncols() != n {
                return Err(Error::DimensionMismatch("NC point blocks must be square, same size".into()));
            }
        }
        Ok(NCPoint { mats })
    }

    pub fn zero(d: usize, n: usize) -> NCPoint {
        NCPoint { mats: vec![CMat::zeros(n, n); d] }
    }

    pub fn d(&self) -> usize {
        self.mats.len()
    }

    pub fn dim(&self) -> usize {
        self.mats[0].nrows()
    }

    pub fn mat(&self, j: usize) -> &CMat {
        &self.mats[j - 1]
    }

    pub fn mats(&self) -> &[CMat] {
        &self.mats
    }

    /// Norm of the row `(Z_1 … Z_d)`; `< 1` means a strict row contraction.
    pub fn row_norm(&self) -> f64 {
        let n = self.dim();
        let d = self.d();
        let mut row = CMat::zeros(n, n * d);
        for (k, z) in self.mats.iter().enumerate() {
            row.view_mut((0, k * n), (n, n)).copy_from(z);
        }
        opnorm(&row)
    }

    /// Smallest `k <= cap` such that every product of `k` factors vanishes,
    /// if one exists (joint nilpotency order).
    pub fn nilpotency_order(&self, cap: usize) -> Option<usize> {
        let n = self.dim();
        let mut products = vec![CMat::identity(n, n)];
        for k in 1..=cap {
            let mut next = Vec::with_capacity(products.len() * self.d());
            let mut all_zero = true;
            for p in &products {
                for z in &self.mats {
                    let q = z * p;
                    if max_abs(&q) > 1e-14 {
                        all_zero = false;
                    }
                    next.push(q);
                }
            }
            if all_zero {
                return Some(k);
            }
            products = next;
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{ci, eye};

    fn scalar_series(d: usize, trunc: usize, terms: &[(&str, f64)]) -> FreeSeries {
        let mut s = FreeSeries::zero(d, 1, trunc);
        for (w, v) in terms {
            s.set_coeff(Word::parse(d, w).unwrap(), CMat::from_element(1, 1, c(*v)))
                .unwrap();
        }
        s
    }

    #[test]
    fn multiply_left_right_examples() {
        // d=1: Z * Z = Z^2 on both sides
        let z = scalar_series(1, 4, &[("1", 1.0)]);
        let left = z.multiply(&z, Side::Left).unwrap();
        let right = z.multiply(&z, Side::Right).unwrap();
        let z2 = scalar_series(1, 4, &[("11", 1.0)]);
        assert_eq!(left.max_coeff_diff(&z2), 0.0);
        assert_eq!(right.max_coeff_diff(&z2), 0.0);

        // d=2: Z1 ·_L Z2 = Z1Z2, Z1 ·_R Z2 = Z2Z1
        let z1 = scalar_series(2, 3, &[("1", 1.0)]);
        let z2v = scalar_series(2, 3, &[("2", 1.0)]);
        let l = z1.multiply(&z2v, Side::Left).unwrap();
        assert_eq!(l.max_coeff_diff(&scalar_series(2, 3, &[("12", 1.0)])), 0.0);
        let r = z1.multiply(&z2v, Side::Right).unwrap();
        assert_eq!(r.max_coeff_diff(&scalar_series(2, 3, &[("21", 1.0)])), 0.0);

        // constant times anything
        let cc = scalar_series(2, 3, &[("", 2.5)]);
        let g = scalar_series(2, 3, &[("1", 1.0), ("21", -0.5)]);
        for side in [Side::Left, Side::Right] {
            let p = cc.multiply(&g, side).unwrap();
            assert!(p.max_coeff_diff(&g.scale(2.5)) < 1e-15);
        }
    }

    #[test]
    fn invert_geometric() {
        // (I - Z)^{-1} = Σ Z^k for d = 1
        let z = scalar_series(1, 5, &[("1", 1.0)]);
        let inv = z.one_minus().invert().unwrap();
        let mut geo = FreeSeries::zero(1, 1, 5);
        for k in 0..=5 {
            let w = Word::new(1, &vec![1; k]).unwrap();
            geo.set_coeff(w, CMat::from_element(1, 1, c(1.0))).unwrap();
        }
        assert!(inv.max_coeff_diff(&geo) < 1e-15);

        // constant c·I inverts to (1/c)·I
        let cc = FreeSeries::constant(2, 3, CMat::from_element(1, 1, c(4.0))).unwrap();
        let ci_ = cc.invert().unwrap();
        assert!((ci_.constant_coeff()[(0, 0)].re - 0.25).abs() < 1e-15);
    }

    #[test]
    fn invert_roundtrip_random() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for d in [1usize, 2] {
            let m = 2;
            let trunc = 4;
            let mut f = FreeSeries::zero(d, m, trunc);
            f.set_coeff(Word::empty(d).unwrap(), eye(m)).unwrap();
            for w in enumerate_words(d, 2).unwrap() {
                if w.is_empty() {
                    continue;
                }
                f.set_coeff(w, crate::linalg::rand_cmat(&mut rng, m, m).map(|z| z.scale(0.3)))
                    .unwrap();
            }
            let g = f.invert().unwrap();
            let prod = f.multiply(&g, Side::Left).unwrap();
            assert!(prod.max_coeff_diff(&FreeSeries::identity(d, m, trunc)) < 1e-12);
            // two-sided
            let prod_r = g.multiply(&f, Side::Left).unwrap();
            assert!(prod_r.max_coeff_diff(&FreeSeries::identity(d, m, trunc)) < 1e-12);
        }
    }

    #[test]
    fn singular_constant_term_rejected() {
        let z = scalar_series(1, 3, &[("1", 1.0)]);
        assert!(matches!(
            z.invert(),
            Err(Error::SingularConstantTerm { .. })
        ));
    }

    #[test]
    fn transpose_series_examples() {
        let s = scalar_series(2, 3, &[("12", 1.0)]);
        let t = s.transpose_series();
        assert_eq!(t.max_coeff_diff(&scalar_series(2, 3, &[("21", 1.0)])), 0.0);
        assert_eq!(t.transpose_series().max_coeff_diff(&s), 0.0);
        // d=1: identity map
        let s1 = scalar_series(1, 3, &[("11", 2.0)]);
        assert_eq!(s1.transpose_series().max_coeff_diff(&s1), 0.0);
    }

    #[test]
    fn transpose_is_right_product_antimorphism() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let (d, m, trunc) = (2usize, 2usize, 4usize);
        let mut f = FreeSeries::zero(d, m, trunc);
        let mut g = FreeSeries::zero(d, m, trunc);
        for w in enumerate_words(d, 2).unwrap() {
            f.set_coeff(w.clone(), crate::linalg::rand_cmat(&mut rng, m, m)).unwrap();
            g.set_coeff(w, crate::linalg::rand_cmat(&mut rng, m, m)).unwrap();
        }
        // T(F ·_L G) = T(F) ·_R T(G)
        let lhs = f.multiply(&g, Side::Left).unwrap().transpose_series();
        let rhs = f
            .transpose_series()
            .multiply(&g.transpose_series(), Side::Right)
            .unwrap();
        assert!(lhs.max_coeff_diff(&rhs) < 1e-14);
    }

    #[test]
    fn mult_matrix_identity_and_shift() {
        let fock = TruncatedFock::new(1, 1, 3).unwrap();
        let id = FreeSeries::identity(1, 1, 3);
        assert_eq!(id.mult_matrix(Side::Left, &fock).unwrap(), eye(4));
        let z = scalar_series(1, 3, &[("1", 1.0)]);
        let mz = z.mult_matrix(Side::Left, &fock).unwrap();
        let shift = fock.creation_matrix(Side::Left, 1).unwrap();
        assert_eq!(mz, shift);
    }

    #[test]
    fn left_and_right_multipliers_commute_on_safe_block() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let (d, m, trunc) = (2usize, 1usize, 4usize);
        let fock = TruncatedFock::new(d, m, trunc).unwrap();
        let mut f = FreeSeries::zero(d, m, trunc);
        let mut g = FreeSeries::zero(d, m, trunc);
        for w in enumerate_words(d, 1).unwrap() {
            f.set_coeff(w.clone(), crate::linalg::rand_cmat(&mut rng, m, m)).unwrap();
            g.set_coeff(w, crate::linalg::rand_cmat(&mut rng, m, m)).unwrap();
        }
        let ml = f.mult_matrix(Side::Left, &fock).unwrap();
        let mr = g.mult_matrix(Side::Right, &fock).unwrap();
        let comm = &ml * &mr - &mr * &ml;
        // columns of degree <= N - deg f - deg g are exactly zero
        let safe_cols = fock.dim_up_to(trunc - 1 - 1);
        let block = comm.columns(0, safe_cols).into_owned();
        assert!(max_abs(&block) < 1e-14);
    }

    #[test]
    fn mult_matrix_intertwines_convolution() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let (d, m, trunc) = (2usize, 2usize, 3usize);
        let fock = TruncatedFock::new(d, m, trunc).unwrap();
        for side in [Side::Left, Side::Right] {
            let mut f = FreeSeries::zero(d, m, trunc);
            let mut g = FreeSeries::zero(d, m, trunc);
            for w in enumerate_words(d, 1).unwrap() {
                f.set_coeff(w.clone(), crate::linalg::rand_cmat(&mut rng, m, m)).unwrap();
                g.set_coeff(w, crate::linalg::rand_cmat(&mut rng, m, m)).unwrap();
            }
            let prod = f.multiply(&g, side).unwrap();
            let mp = prod.mult_matrix(side, &fock).unwrap();
            let mf = f.mult_matrix(side, &fock).unwrap();
            let mg = g.mult_matrix(side, &fock).unwrap();
            let composed = &mf * &mg;
            let safe_cols = fock.dim_up_to(trunc - 2);
            let delta = (&mp - &composed).columns(0, safe_cols).into_owned();
            assert!(max_abs(&delta) < 1e-14, "side {side:?}");
        }
    }

    #[test]
    fn transpose_mult_matrix_conjugation() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        let (d, m, trunc) = (2usize, 2usize, 3usize);
        let fock = TruncatedFock::new(d, m, trunc).unwrap();
        let mut f = FreeSeries::zero(d, m, trunc);
        for w in enumerate_words(d, 2).unwrap() {
            f.set_coeff(w, crate::linalg::rand_cmat(&mut rng, m, m)).unwrap();
        }
        let u = fock.transposition_unitary();
        let lhs = f.transpose_series().mult_matrix(Side::Right, &fock).unwrap();
        let rhs = &u * f.mult_matrix(Side::Left, &fock).unwrap() * &u;
        // exact at the full truncation level
        assert!(max_abs(&(lhs - rhs)) < 1e-14);
    }

    #[test]
    fn eval_nc_examples() {
        // at 0: I_n ⊗ F_0
        let f = scalar_series(2, 3, &[("", 0.5), ("12", 1.0)]);
        let p = NCPoint::zero(2, 2);
        let v = f.eval_nc(&p).unwrap();
        assert!(max_abs(&(v - eye(2).map(|z| z * c(0.5)))) < 1e-15);

        // d=1, F = Z at a scaled Jordan block evaluates to the block itself
        let z = scalar_series(1, 3, &[("1", 1.0)]);
        let mut jb = CMat::zeros(2, 2);
        jb[(0, 1)] = c(0.9);
        let v = z.eval_nc(&NCPoint::new(vec![jb.clone()]).unwrap()).unwrap();
        assert!(max_abs(&(v - jb)) < 1e-15);
    }

    #[test]
    fn eval_nc_multiplicative_at_nilpotent_points() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        let (d, m, trunc) = (2usize, 2usize, 4usize);
        let mut f = FreeSeries::zero(d, m, trunc);
        let mut g = FreeSeries::zero(d, m, trunc);
        for w in enumerate_words(d, 2).unwrap() {
            f.set_coeff(w.clone(), crate::linalg::rand_cmat(&mut rng, m, m)).unwrap();
            g.set_coeff(w, crate::linalg::rand_cmat(&mut rng, m, m)).unwrap();
        }
        // strictly upper triangular 3x3 points are jointly nilpotent of order <= 3
        let mk = |rng: &mut rand_chacha::ChaCha8Rng| {
            let mut z = CMat::zeros(3, 3);
            for i in 0..3 {
                for j in (i + 1)..3 {
                    z[(i, j)] = crate::linalg::rand_cmat(rng, 1, 1)[(0, 0)].scale(0.4);
                }
            }
            z
        };
        let p = NCPoint::new(vec![mk(&mut rng), mk(&mut rng)]).unwrap();
        assert_eq!(p.nilpotency_order(5), Some(3));
        // order 3 <= N - deg: products of degree <= 4 are retained, and all words
        // of length >= 3 vanish at p, so evaluation is exactly multiplicative.
        let lhs = f.multiply(&g, Side::Left).unwrap().eval_nc(&p).unwrap();
        let rhs = f.eval_nc(&p).unwrap() * g.eval_nc(&p).unwrap();
        assert!(max_abs(&(lhs - rhs)) < 1e-12);
    }

    #[test]
    fn symmetrize_kills_commutators() {
        let z12 = scalar_series(2, 3, &[("12", 1.0)]);
        let z21 = scalar_series(2, 3, &[("21", 1.0)]);
        let comm = z12.sub(&z21).unwrap().symmetrize();
        assert_eq!(comm.max_coeff_diff(&CommSeries::zero(2, 1, 3)), 0.0);
        let s = z12.symmetrize();
        assert_eq!(s.coeff(&MultiIndex::new(vec![1, 1]))[(0, 0)], c(1.0));
        // d=1 leaves coefficients unchanged
        let s1 = scalar_series(1, 3, &[("11", 3.0)]).symmetrize();
        assert_eq!(s1.coeff(&MultiIndex::new(vec![2]))[(0, 0)], c(3.0));
    }

    #[test]
    fn schur_norm_bounds_examples() {
        let fock = TruncatedFock::new(2, 1, 3).unwrap();
        // constant c: both bounds |c|
        let cc = scalar_series(2, 3, &[("", 0.7)]);
        let b = cc.schur_norm_bounds(&fock).unwrap();
        assert!((b.lower - 0.7).abs() < 1e-12 && (b.upper - 0.7).abs() < 1e-12);

        // aZ1 + bZ2: lower = sqrt(|a|^2+|b|^2), upper = |a|+|b|
        let mut s = FreeSeries::zero(2, 1, 3);
        s.set_coeff(Word::parse(2, "1").unwrap(), CMat::from_element(1, 1, c(0.5)))
            .unwrap();
        s.set_coeff(Word::parse(2, "2").unwrap(), CMat::from_element(1, 1, ci(0.0, 0.5)))
            .unwrap();
        let b = s.schur_norm_bounds(&fock).unwrap();
        assert!((b.lower - 0.5 * 2.0f64.sqrt()).abs() < 1e-10);
        assert!((b.upper - 1.0).abs() < 1e-12);
        assert_eq!(b.certificate(), SchurCert::L1Certified);

        // (Z1+Z2)/2: upper = 1, lower = 1/sqrt(2)
        let mut h = FreeSeries::zero(2, 1, 3);
        for w in ["1", "2"] {
            h.set_coeff(Word::parse(2, w).unwrap(), CMat::from_element(1, 1, c(0.5)))
                .unwrap();
        }
        let b = h.schur_norm_bounds(&fock).unwrap();
        assert!((b.upper - 1.0).abs() < 1e-12);
        assert!((b.lower - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-10);
    }

    #[test]
    fn comm_series_multiply_invert() {
        // d=2 commutative: (1 - z1)^{-1} up to degree 3
        let mut b = CommSeries::zero(2, 1, 3);
        b.set_coeff(MultiIndex::new(vec![1, 0]), CMat::from_element(1, 1, c(1.0)))
            .unwrap();
        let inv = b.one_minus().invert().unwrap();
        for k in 0..=3u32 {
            assert!((inv.coeff(&MultiIndex::new(vec![k, 0]))[(0, 0)].re - 1.0).abs() < 1e-14);
        }
        let prod = b.one_minus().multiply(&inv).unwrap();
        assert!(prod.max_coeff_diff(&CommSeries::identity(2, 1, 3)) < 1e-14);
    }

    #[test]
    fn nc_point_row_norm() {
        let mut z1 = CMat::zeros(2, 2);
        z1[(0, 1)] = c(0.6);
        let mut z2 = CMat::zeros(2, 2);
        z2[(0, 1)] = c(0.8);
        let p = NCPoint::new(vec![z1, z2]).unwrap();
        assert!((p.row_norm() - 1.0).abs() < 1e-12);
        assert_eq!(p.nilpotency_order(4), Some(2));
    }
}
