//! The Schur ↔ Herglotz ↔ CP-moment bijections.
//!
//! A non-unital free Schur pair `B = (B^L, B^R)` (transpose-conjugate, so one
//! series determines the other) maps through the Cayley transform to a Herglotz
//! pair `H_B`, whose coefficients carry a completely positive moment functional
//! `φ = μ_B` on the free disk operator system: `φ(I) = Re H_0` and
//! `φ(L^{α^T})^* = ½ H_α`. The bijection holds modulo imaginary constants; we
//! canonicalize `Im H_0 = 0` throughout, which makes the round trips exact
//! identities on canonical representatives (those with Hermitian `B_0`).

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::{herm_eig, max_abs, opnorm, CMat};
use crate::series::FreeSeries;
use crate::tol;
use crate::word::{enumerate_words, MultiIndex, Word};
use crate::Side;

/// The data of a CP map on the free disk operator system, truncated at word
/// length `N`: `φ(I)` and `φ(L^γ)` for `1 <= |γ| <= N`. The self-adjoint
/// extension `φ((L^γ)^*) = φ(L^γ)^*` is implicit.
#[derive(Debug, Clone)]
pub struct MomentFunctional {
    d: usize,
    m: usize,
    trunc: usize,
    phi_i: CMat,
    moments: BTreeMap<Word, CMat>,
}

impl MomentFunctional {
    pub fn new(d: usize, m: usize, trunc: usize, phi_i: CMat) -> Result<MomentFunctional> {
        if phi_i.nrows() != m || phi_i.ncols() != m {
            return Err(Error::DimensionMismatch("phi(I) must be m x m".into()));
        }
        enumerate_words(d, 0)?;
        Ok(MomentFunctional { d, m, trunc, phi_i, moments: BTreeMap::new() })
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

    pub fn phi_i(&self) -> &CMat {
        &self.phi_i
    }

    pub fn set_moment(&mut self, w: Word, value: CMat) -> Result<()> {
        if w.is_empty() || w.len() > self.trunc {
            return Err(Error::InvalidParameter(format!(
                "moment word \"{w}\" must have length 1..={}",
                self.trunc
            )));
        }
        if value.nrows() != self.m || value.ncols() != self.m {
            return Err(Error::DimensionMismatch("moment must be m x m".into()));
        }
        self.moments.insert(w, value);
        Ok(())
    }

    /// `φ(L^γ)`; `γ = ∅` yields `φ(I)`. Errors on a missing word.
    pub fn moment(&self, w: &Word) -> Result<&CMat> {
        if w.is_empty() {
            return Ok(&self.phi_i);
        }
        self.moments
            .get(w)
            .ok_or_else(|| Error::MissingMoment(w.to_string()))
    }

    pub fn moments(&self) -> impl Iterator<Item = (&Word, &CMat)> {
        self.moments.iter()
    }

    /// The same functional with words longer than `n` dropped.
    pub fn restrict(&self, n: usize) -> MomentFunctional {
        let moments = self
            .moments
            .iter()
            .filter(|(w, _)| w.len() <= n)
            .map(|(w, m)| (w.clone(), m.clone()))
            .collect();
        MomentFunctional {
            d: self.d,
            m: self.m,
            trunc: n.min(self.trunc),
            phi_i: self.phi_i.clone(),
            moments,
        }
    }

    /// Fiber sums `Σ_{λ(α)=n} φ(L^α)` over a multi-index, the restriction of the
    /// functional to the symmetrized operator system.
    pub fn symmetric_moment(&self, n: &MultiIndex) -> CMat {
        if n.degree() == 0 {
            return self.phi_i.clone();
        }
        let mut acc = CMat::zeros(self.m, self.m);
        for (w, mat) in &self.moments {
            if &w.abelianize() == n {
                acc += mat;
            }
        }
        acc
    }

    pub fn max_diff(&self, other: &MomentFunctional) -> f64 {
        let mut err = max_abs(&(&self.phi_i - &other.phi_i));
        for (w, mat) in &self.moments {
            let o = other
                .moments
                .get(w)
                .cloned()
                .unwrap_or_else(|| CMat::zeros(self.m, self.m));
            err = err.max(max_abs(&(mat - o)));
        }
        for (w, mat) in &other.moments {
            if !self.moments.contains_key(w) {
                err = err.max(max_abs(mat));
            }
        }
        err
    }
}

fn check_non_unital(b: &FreeSeries) -> Result<()> {
    let norm = opnorm(&b.constant_coeff());
    if norm >= 1.0 - tol::NON_UNITAL_MARGIN {
        return Err(Error::NonUnital { norm });
    }
    Ok(())
}

/// Cayley transform of a non-unital Schur series: `H = (I − B)^{-1} (I + B)`
/// (left products), truncated at `N`. Strict contractivity of the constant term
/// is what makes `I − B` invertible, so that is what gets checked.
pub fn cayley_to_herglotz(b: &FreeSeries) -> Result<FreeSeries> {
    check_non_unital(b)?;
    let inv = b.one_minus().invert()?;
    inv.multiply(&b.one_plus(), Side::Left)
}

/// Inverse Cayley transform: `B = (H + I)^{-1} (H − I)` (left products). The
/// compositional inverse of [`cayley_to_herglotz`] up to the truncation degree.
pub fn cayley_to_schur(h: &FreeSeries) -> Result<FreeSeries> {
    let inv = h.one_plus().invert()?;
    inv.multiply(&h.one_minus(), Side::Left).map(|s| s.scale(-1.0))
}

/// Extract the moment functional of a left Herglotz series: `φ(I) = Re H_0`
/// (must be PSD), `φ(L^γ) = ½ H_{γ^T}^*` for `γ ≠ ∅`, stored densely for all
/// words up to the truncation degree. The imaginary part of `H_0` is discarded
/// (the bijection is modulo imaginary constants).
pub fn moments_from_herglotz(h: &FreeSeries) -> Result<MomentFunctional> {
    let h0 = h.constant_coeff();
    let phi_i = (&h0 + h0.adjoint()).map(|z| z.scale(0.5));
    let eig = herm_eig(&phi_i);
    let min_eig = eig.vals.last().copied().unwrap_or(0.0);
    let max_eig = eig.vals.first().copied().unwrap_or(0.0);
    if min_eig < -tol::PSD_REL * max_eig.abs().max(1.0) {
        return Err(Error::NotHerglotz { min_eig });
    }
    let mut phi = MomentFunctional::new(h.d(), h.m(), h.trunc(), phi_i)?;
    for w in enumerate_words(h.d(), h.trunc())? {
        if w.is_empty() {
            continue;
        }
        let hw = h.coeff(&w.transpose());
        phi.set_moment(w, hw.adjoint().map(|z| z.scale(0.5)))?;
    }
    Ok(phi)
}

/// The free Herglotz representation: rebuild the Herglotz series of a moment
/// functional, with `Im H_0` canonicalized to zero. `H_0 = φ(I)` and
/// `H_α = 2 φ(L^{α^T})^*` for `α ≠ ∅`; the right series is the transpose of the
/// left. Exact inverse of [`moments_from_herglotz`] whenever `Im H_0 = 0`.
pub fn herglotz_from_moments(phi: &MomentFunctional, side: Side) -> Result<FreeSeries> {
    let mut h = FreeSeries::zero(phi.d, phi.m, phi.trunc);
    h.set_coeff(Word::empty(phi.d)?, phi.phi_i.clone())?;
    for (w, mat) in &phi.moments {
        h.set_coeff(w.transpose(), mat.adjoint().map(|z| z * 2.0))?;
    }
    Ok(match side {
        Side::Left => h,
        Side::Right => h.transpose_series(),
    })
}

/// The noncommutative Clark (Aleksandrov-Clark) moment data of a non-unital
/// Schur series, read as the left member of its transpose-conjugate pair:
/// the composition of [`cayley_to_herglotz`] and [`moments_from_herglotz`].
pub fn moments_from_schur(b_left: &FreeSeries) -> Result<MomentFunctional> {
    moments_from_herglotz(&cayley_to_herglotz(b_left)?)
}

/// Same moment data computed natively along the right route: right Cayley
/// transform `H^R = (I − B^R)^{-R-inv} •_R (I + B^R)` and the right extraction
/// `φ(L^γ) = ½ (H^R_γ)^*`. Agrees with [`moments_from_schur`] on the transpose
/// series — the pair shares one Clark measure — but performs genuinely different
/// floating-point work, so the agreement is a real cross-check.
pub fn moments_from_schur_right(b_right: &FreeSeries) -> Result<MomentFunctional> {
    check_non_unital(b_right)?;
    let inv = b_right.one_minus().invert_right()?;
    let h_r = inv.multiply(&b_right.one_plus(), Side::Right)?;
    let h0 = h_r.constant_coeff();
    let phi_i = (&h0 + h0.adjoint()).map(|z| z.scale(0.5));
    let mut phi = MomentFunctional::new(b_right.d(), b_right.m(), b_right.trunc(), phi_i)?;
    for w in enumerate_words(b_right.d(), b_right.trunc())? {
        if w.is_empty() {
            continue;
        }
        let hw = h_r.coeff(&w);
        phi.set_moment(w, hw.adjoint().map(|z| z.scale(0.5)))?;
    }
    Ok(phi)
}

/// Reconstruct the transpose-conjugate Schur pair `(B^L, B^R)` of a moment
/// functional. Requires the functional to be CP at the truncation level
/// (PSD Gram of its right Herglotz kernel).
pub fn schur_pair_from_moments(phi: &MomentFunctional) -> Result<(FreeSeries, FreeSeries)> {
    let kernel = crate::kernels::herglotz_kernel_from_moments(phi, Side::Right)?;
    let report = crate::kernels::psd_check(&kernel.gram(), tol::PSD_REL)?;
    if !report.pass {
        return Err(Error::NotCpAtLevel { min_eig: report.min_eig });
    }
    let h = herglotz_from_moments(phi, Side::Left)?;
    let b_left = cayley_to_schur(&h)?;
    let b_right = b_left.transpose_series();
    Ok((b_left, b_right))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, eye};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn scalar(d: usize, trunc: usize, terms: &[(&str, f64)]) -> FreeSeries {
        let mut s = FreeSeries::zero(d, 1, trunc);
        for (w, v) in terms {
            s.set_coeff(Word::parse(d, w).unwrap(), CMat::from_element(1, 1, c(*v)))
                .unwrap();
        }
        s
    }

    fn random_schur(
        rng: &mut ChaCha8Rng,
        d: usize,
        m: usize,
        deg: usize,
        trunc: usize,
        rho: f64,
    ) -> FreeSeries {
        crate::instance::random_free_schur_with(rng, d, m, deg, trunc, rho).unwrap()
    }

    #[test]
    fn cayley_examples() {
        // B = 0 → H = I
        let b = FreeSeries::zero(2, 2, 3);
        let h = cayley_to_herglotz(&b).unwrap();
        assert!(h.max_coeff_diff(&FreeSeries::identity(2, 2, 3)) < 1e-15);

        // d=1, B = Z → H = 1 + 2Z + 2Z² + …
        let b = scalar(1, 4, &[("1", 1.0)]);
        let h = cayley_to_herglotz(&b).unwrap();
        let mut expect = FreeSeries::zero(1, 1, 4);
        expect
            .set_coeff(Word::empty(1).unwrap(), CMat::from_element(1, 1, c(1.0)))
            .unwrap();
        for k in 1..=4usize {
            expect
                .set_coeff(Word::new(1, &vec![1; k]).unwrap(), CMat::from_element(1, 1, c(2.0)))
                .unwrap();
        }
        assert!(h.max_coeff_diff(&expect) < 1e-14);

        // B = c·I → H = (1+c)/(1−c)·I
        let b = FreeSeries::constant(2, 2, eye(2).map(|z| z * c(0.4))).unwrap();
        let h = cayley_to_herglotz(&b).unwrap();
        let expect =
            FreeSeries::constant(2, 2, eye(2).map(|z| z * c(1.4 / 0.6))).unwrap();
        assert!(h.max_coeff_diff(&expect) < 1e-14);
    }

    #[test]
    fn cayley_rejects_unital() {
        let b = scalar(1, 3, &[("", 1.0)]);
        assert!(matches!(cayley_to_herglotz(&b), Err(Error::NonUnital { .. })));
    }

    #[test]
    fn cayley_roundtrip() {
        // H = I → B = 0
        let h = FreeSeries::identity(2, 2, 3);
        let b = cayley_to_schur(&h).unwrap();
        assert!(b.max_coeff_diff(&FreeSeries::zero(2, 2, 3)) < 1e-15);

        // 1 + 2Z + 2Z² + … → Z
        let b = scalar(1, 5, &[("1", 1.0)]);
        let h = cayley_to_herglotz(&b).unwrap();
        let back = cayley_to_schur(&h).unwrap();
        assert!(back.max_coeff_diff(&b) < tol::CAYLEY_ROUNDTRIP);

        // random non-unital Schur series round trip
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for seed_case in 0..5 {
            let b = random_schur(&mut rng, 2, 2, 2, 4, 0.8);
            let h = cayley_to_herglotz(&b).unwrap();
            let back = cayley_to_schur(&h).unwrap();
            assert!(
                back.max_coeff_diff(&b) < tol::CAYLEY_ROUNDTRIP,
                "case {seed_case}"
            );
        }
    }

    #[test]
    fn moments_examples() {
        // H = I → δ functional
        let phi = moments_from_herglotz(&FreeSeries::identity(2, 2, 3)).unwrap();
        assert!(max_abs(&(phi.phi_i() - eye(2))) < 1e-15);
        for (_, m) in phi.moments() {
            assert_eq!(max_abs(m), 0.0);
        }

        // d=1, B = Z: all moments 1 (the classical Clark point mass at 1 for b(z)=z)
        let phi = moments_from_schur(&scalar(1, 4, &[("1", 1.0)])).unwrap();
        assert!((phi.phi_i()[(0, 0)].re - 1.0).abs() < 1e-14);
        for k in 1..=4usize {
            let w = Word::new(1, &vec![1; k]).unwrap();
            let m = phi.moment(&w).unwrap()[(0, 0)];
            assert!((m.re - 1.0).abs() < 1e-13 && m.im.abs() < 1e-14, "k={k}");
        }

        // d=2, B = (Z1+Z2)/2: φ(L^α) = 2^{-|α|}
        let mut b = FreeSeries::zero(2, 1, 3);
        for w in ["1", "2"] {
            b.set_coeff(Word::parse(2, w).unwrap(), CMat::from_element(1, 1, c(0.5)))
                .unwrap();
        }
        let phi = moments_from_schur(&b).unwrap();
        for w in enumerate_words(2, 3).unwrap() {
            if w.is_empty() {
                continue;
            }
            let expect = 0.5f64.powi(w.len() as i32);
            let got = phi.moment(&w).unwrap()[(0, 0)];
            assert!((got.re - expect).abs() < 1e-13 && got.im.abs() < 1e-14, "{w}");
        }
    }

    #[test]
    fn herglotz_from_moments_examples() {
        // identity-only functional → H = I
        let phi = MomentFunctional::new(2, 2, 2, eye(2)).unwrap();
        let mut phi = phi;
        for w in enumerate_words(2, 2).unwrap() {
            if !w.is_empty() {
                phi.set_moment(w, CMat::zeros(2, 2)).unwrap();
            }
        }
        let h = herglotz_from_moments(&phi, Side::Left).unwrap();
        assert!(h.max_coeff_diff(&FreeSeries::identity(2, 2, 2)) < 1e-15);

        // all-ones moments (d=1) → 1 + 2Z + … and exact formula round trip
        let mut phi = MomentFunctional::new(1, 1, 3, eye(1)).unwrap();
        for k in 1..=3usize {
            phi.set_moment(Word::new(1, &vec![1; k]).unwrap(), eye(1)).unwrap();
        }
        let h = herglotz_from_moments(&phi, Side::Left).unwrap();
        assert!((h.coeff(&Word::parse(1, "11").unwrap())[(0, 0)].re - 2.0).abs() < 1e-15);
        let phi2 = moments_from_herglotz(&h).unwrap();
        assert_eq!(phi2.max_diff(&phi), 0.0);
    }

    #[test]
    fn right_series_is_transpose() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let b = random_schur(&mut rng, 2, 2, 2, 3, 0.7);
        let phi = moments_from_schur(&b).unwrap();
        let hl = herglotz_from_moments(&phi, Side::Left).unwrap();
        let hr = herglotz_from_moments(&phi, Side::Right).unwrap();
        assert_eq!(hr.max_coeff_diff(&hl.transpose_series()), 0.0);
        // symmetrized consistency
        assert!(hl.symmetrize().max_coeff_diff(&hr.symmetrize()) < 1e-14);
    }

    #[test]
    fn three_way_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for (d, m, deg, trunc) in [(1, 1, 1, 4), (2, 2, 2, 4), (3, 2, 1, 3)] {
            let b = random_schur(&mut rng, d, m, deg, trunc, 0.85);
            let h = cayley_to_herglotz(&b).unwrap();
            let phi = moments_from_herglotz(&h).unwrap();
            let h2 = herglotz_from_moments(&phi, Side::Left).unwrap();
            let b2 = cayley_to_schur(&h2).unwrap();
            assert!(
                b2.max_coeff_diff(&b) < tol::ROUNDTRIP,
                "d={d} m={m}: {}",
                b2.max_coeff_diff(&b)
            );
        }
    }

    #[test]
    fn transpose_coherence() {
        // moments from B^L and from B^R = T∘B^L agree: one Clark measure per pair
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let b_left = random_schur(&mut rng, 2, 2, 2, 4, 0.8);
        let b_right = b_left.transpose_series();
        let phi_l = moments_from_schur(&b_left).unwrap();
        let phi_r = moments_from_schur_right(&b_right).unwrap();
        assert!(phi_l.max_diff(&phi_r) < 1e-12);
    }

    #[test]
    fn schur_pair_roundtrip() {
        // δ functional → (0, 0)
        let mut phi = MomentFunctional::new(2, 1, 2, eye(1)).unwrap();
        for w in enumerate_words(2, 2).unwrap() {
            if !w.is_empty() {
                phi.set_moment(w, CMat::zeros(1, 1)).unwrap();
            }
        }
        let (bl, br) = schur_pair_from_moments(&phi).unwrap();
        assert!(bl.max_coeff_diff(&FreeSeries::zero(2, 1, 2)) < 1e-14);
        assert!(br.max_coeff_diff(&FreeSeries::zero(2, 1, 2)) < 1e-14);

        // all-ones d=1 → B = Z with tail below 1e-11
        let mut phi = MomentFunctional::new(1, 1, 4, eye(1)).unwrap();
        for k in 1..=4usize {
            phi.set_moment(Word::new(1, &vec![1; k]).unwrap(), eye(1)).unwrap();
        }
        let (bl, br) = schur_pair_from_moments(&phi).unwrap();
        let z = scalar(1, 4, &[("1", 1.0)]);
        assert!(bl.max_coeff_diff(&z) < 1e-11);
        // transpose conjugacy is an identity by construction
        assert_eq!(br.max_coeff_diff(&bl.transpose_series()), 0.0);
    }

    #[test]
    fn herglotz_kernels_bitwise_agreement() {
        let mut rng = ChaCha8Rng::seed_from_u64(123);
        let b = random_schur(&mut rng, 2, 2, 2, 3, 0.8);
        let h_l = cayley_to_herglotz(&b).unwrap();
        let phi = moments_from_herglotz(&h_l).unwrap();
        let from_moments_l =
            crate::kernels::herglotz_kernel_from_moments(&phi, Side::Left).unwrap();
        let from_h_l = crate::kernels::herglotz_kernel_from_h(&h_l, Side::Left).unwrap();
        assert!(from_h_l.bit_equal(&from_moments_l));

        let from_moments_r =
            crate::kernels::herglotz_kernel_from_moments(&phi, Side::Right).unwrap();
        let from_h_r =
            crate::kernels::herglotz_kernel_from_h(&h_l.transpose_series(), Side::Right).unwrap();
        assert!(from_h_r.bit_equal(&from_moments_r));

        // spot-check the stated entries: K_{α,∅} = ½H_α and K_{λβ,β} = ½H_λ (left)
        let alpha = Word::parse(2, "12").unwrap();
        let empty = Word::empty(2).unwrap();
        let expect = h_l.coeff(&alpha).map(|z| z.scale(0.5));
        assert!(max_abs(&(from_h_l.entry(&alpha, &empty) - &expect)) == 0.0);
        let beta = Word::parse(2, "2").unwrap();
        let lam = Word::parse(2, "1").unwrap();
        let expect = h_l.coeff(&lam).map(|z| z.scale(0.5));
        assert!(max_abs(&(from_h_l.entry(&lam.concat(&beta), &beta) - &expect)) == 0.0);
    }

    #[test]
    fn herglotz_gram_psd_for_schur_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(321);
        let b = random_schur(&mut rng, 2, 2, 2, 3, 0.9);
        let phi = moments_from_schur(&b).unwrap();
        for side in [Side::Left, Side::Right] {
            let k = crate::kernels::herglotz_kernel_from_moments(&phi, side).unwrap();
            let rep = crate::kernels::psd_check(&k.gram(), tol::PSD_REL).unwrap();
            assert!(rep.pass, "side {side:?}: min eig {}", rep.min_eig);
        }
    }

    #[test]
    fn kernel_conjugation_identity() {
        // k̂^R = (I−B^R) •_R K̂^R •_R (I−B^R)^*, as Gram matrices: D = M G M^*,
        // exact at the truncation level.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let b_left = random_schur(&mut rng, 2, 1, 2, 4, 0.8);
        let b_right = b_left.transpose_series();
        let phi = moments_from_schur(&b_left).unwrap();
        let fock = crate::fock::TruncatedFock::new(2, 1, 4).unwrap();
        let g = crate::kernels::herglotz_kernel_from_moments(&phi, Side::Right)
            .unwrap()
            .gram();
        let m = b_right.one_minus().mult_matrix(Side::Right, &fock).unwrap();
        let (dbr, _) = crate::kernels::dbr_kernel(&b_right, Side::Right).unwrap();
        let lhs = dbr.gram();
        let rhs = &m * g * m.adjoint();
        assert!(max_abs(&(lhs - rhs)) < tol::KERNEL_CONJUGATION);
    }
}
