//! Free coefficient kernels and their Gram matrices.
//!
//! A [`CoeffKernel`] stores a Hermitian family `K_{α,β}` of `m×m` blocks over all
//! word pairs `|α|, |β| <= N`. Three families matter here: the free Szegő kernel
//! `δ_{α,β} I`, the deBranges-Rovnyak kernels of a Schur-class series, and the
//! Herglotz kernels of a CP moment functional. Positivity is certified at the
//! truncation level by an eigenvalue bound on the assembled Gram matrix — a
//! necessary condition for the all-degree positivity, reported as such.

use std::collections::BTreeMap;

use crate::error::Result;
use crate::fock::TruncatedFock;
use crate::herglotz::MomentFunctional;
use crate::linalg::{max_abs, CMat};
pub use crate::linalg::{psd_check, PsdReport};
use crate::series::{FreeSeries, SchurCert};
use crate::word::{cancel, enumerate_words, Cancellation, Word};
use crate::Side;

/// Hermitian family of `m×m` matrices over pairs of words of length `<= N`.
#[derive(Debug, Clone)]
pub struct CoeffKernel {
    d: usize,
    m: usize,
    trunc: usize,
    words: Vec<Word>,
    entries: BTreeMap<(Word, Word), CMat>,
}

impl CoeffKernel {
    fn empty(d: usize, m: usize, trunc: usize) -> Result<CoeffKernel> {
        Ok(CoeffKernel {
            d,
            m,
            trunc,
            words: enumerate_words(d, trunc)?,
            entries: BTreeMap::new(),
        })
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

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(Word, Word), &CMat)> {
        self.entries.iter()
    }

    /// Entry `K_{α,β}` (zero if absent).
    pub fn entry(&self, alpha: &Word, beta: &Word) -> CMat {
        self.entries
            .get(&(alpha.clone(), beta.clone()))
            .cloned()
            .unwrap_or_else(|| CMat::zeros(self.m, self.m))
    }

    fn set(&mut self, alpha: Word, beta: Word, value: CMat) {
        self.entries.insert((alpha, beta), value);
    }

    /// Assemble the Gram matrix `G[(α,i),(β,j)] = (K_{α,β})_{ij}` in graded-lex
    /// word order with the coefficient index minor.
    pub fn gram(&self) -> CMat {
        let nw = self.words.len();
        let m = self.m;
        let mut g = CMat::zeros(nw * m, nw * m);
        for ((a, b), mat) in &self.entries {
            let p = self.words.binary_search(a).expect("word in basis");
            let q = self.words.binary_search(b).expect("word in basis");
            for i in 0..m {
                for j in 0..m {
                    g[(p * m + i, q * m + j)] = mat[(i, j)];
                }
            }
        }
        g
    }

    /// Max entry difference over the union of supports.
    pub fn max_entry_diff(&self, other: &CoeffKernel) -> f64 {
        let mut err: f64 = 0.0;
        for ((a, b), mat) in &self.entries {
            err = err.max(max_abs(&(mat - other.entry(a, b))));
        }
        for ((a, b), mat) in &other.entries {
            if !self.entries.contains_key(&(a.clone(), b.clone())) {
                err = err.max(max_abs(mat));
            }
        }
        err
    }

    /// Exact structural equality: every block equal entry by entry under `==`
    /// (no tolerance). Used where two constructions must perform identical
    /// arithmetic.
    pub fn bit_equal(&self, other: &CoeffKernel) -> bool {
        if self.d != other.d || self.m != other.m || self.trunc != other.trunc {
            return false;
        }
        let zero = CMat::zeros(self.m, self.m);
        let keys: std::collections::BTreeSet<_> =
            self.entries.keys().chain(other.entries.keys()).cloned().collect();
        for k in keys {
            let a = self.entries.get(&k).unwrap_or(&zero);
            let b = other.entries.get(&k).unwrap_or(&zero);
            if a.iter().zip(b.iter()).any(|(x, y)| x != y) {
                return false;
            }
        }
        true
    }

    /// Restrict to word pairs of length `<= deg` (for safe-block assertions).
    pub fn restrict(&self, deg: usize) -> Result<CoeffKernel> {
        let mut k = CoeffKernel::empty(self.d, self.m, deg.min(self.trunc))?;
        for ((a, b), mat) in &self.entries {
            if a.len() <= k.trunc && b.len() <= k.trunc {
                k.set(a.clone(), b.clone(), mat.clone());
            }
        }
        Ok(k)
    }

    /// Hermitian-symmetry defect `max ||K_{β,α} − K_{α,β}^*||`.
    pub fn hermitian_defect(&self) -> f64 {
        let mut err: f64 = 0.0;
        for ((a, b), mat) in &self.entries {
            err = err.max(max_abs(&(self.entry(b, a) - mat.adjoint())));
        }
        err
    }
}

/// The free Szegő kernel: `K_{α,β} = δ_{α,β} I_m`.
pub fn szego_kernel(d: usize, m: usize, trunc: usize) -> Result<CoeffKernel> {
    let mut k = CoeffKernel::empty(d, m, trunc)?;
    for w in k.words.clone() {
        k.set(w.clone(), w, CMat::identity(m, m));
    }
    Ok(k)
}

/// The free deBranges-Rovnyak coefficient kernel of a Schur-class series.
///
/// Right: `K_{α,β} = δ_{α,β} I − Σ B_μ B_ν^*` over common-prefix decompositions
/// `α = γμ, β = γν`; left uses common-suffix decompositions. Equals the block form
/// of `I − M_B M_B^*` on the truncated Fock space exactly (both share the same
/// compression). A non-contractive input is not a hard error — the certificate in
/// the returned pair says which norm bound (if any) guaranteed contractivity.
pub fn dbr_kernel(b: &FreeSeries, side: Side) -> Result<(CoeffKernel, SchurCert)> {
    let fock = TruncatedFock::new(b.d(), b.m(), b.trunc())?;
    let cert = b.schur_norm_bounds(&fock)?.certificate();
    let m = b.m();
    let mut k = CoeffKernel::empty(b.d(), m, b.trunc())?;
    for alpha in k.words.clone() {
        for beta in k.words.clone() {
            let mut entry = if alpha == beta {
                CMat::identity(m, m)
            } else {
                CMat::zeros(m, m)
            };
            for (gamma, mu) in split_iter(&alpha, side) {
                let nu = match strip(&beta, &gamma, side) {
                    Some(nu) => nu,
                    None => continue,
                };
                let bmu = match b.coeff_ref(&mu) {
                    Some(x) => x,
                    None => continue,
                };
                if let Some(bnu) = b.coeff_ref(&nu) {
                    entry -= bmu * bnu.adjoint();
                }
            }
            k.set(alpha.clone(), beta, entry);
        }
    }
    Ok((k, cert))
}

// Splits of α as (common part γ, own part μ): prefix decompositions α = γμ for
// the right kernel, suffix decompositions α = μγ for the left kernel.
fn split_iter(alpha: &Word, side: Side) -> Vec<(Word, Word)> {
    alpha
        .splits()
        .map(|(x, y)| match side {
            Side::Right => (x, y),
            Side::Left => (y, x),
        })
        .collect()
}

// For the right kernel finds ν with β = γν, for the left kernel ν with β = νγ.
fn strip(beta: &Word, gamma: &Word, side: Side) -> Option<Word> {
    match side {
        Side::Right => match cancel(gamma, beta) {
            Cancellation::RightRemainder(nu) => Some(nu),
            _ => None,
        },
        Side::Left => match cancel(&gamma.transpose(), &beta.transpose()) {
            Cancellation::RightRemainder(nu_t) => Some(nu_t.transpose()),
            _ => None,
        },
    }
}

/// The free Herglotz coefficient kernel of a CP moment functional.
///
/// Right: `K_{α,β} = φ((L^α)^* L^β)`, resolved by prefix cancellation; left applies
/// the cancellation to the transposed words. Errors if a required moment is absent.
pub fn herglotz_kernel_from_moments(phi: &MomentFunctional, side: Side) -> Result<CoeffKernel> {
    let mut k = CoeffKernel::empty(phi.d(), phi.m(), phi.trunc())?;
    for alpha in k.words.clone() {
        for beta in k.words.clone() {
            let (a, b) = match side {
                Side::Right => (alpha.clone(), beta.clone()),
                Side::Left => (alpha.transpose(), beta.transpose()),
            };
            let entry = match cancel(&a, &b) {
                Cancellation::RightRemainder(g) => phi.moment(&g)?.clone(),
                Cancellation::LeftRemainder(g) => phi.moment(&g)?.adjoint(),
                Cancellation::Zero => continue,
            };
            k.set(alpha.clone(), beta, entry);
        }
    }
    Ok(k)
}

/// The free Herglotz coefficient kernel directly from a Herglotz series:
/// `K_{α,β} = ½(Σ_{γβ=α} H_γ + Σ_{γα=β} H_γ^*)` in the left case, with the suffix
/// conditions `α = βγ` / `β = αγ` in the right case.
///
/// When the moment functional was extracted from the same `H`, this performs the
/// identical floating-point operations as [`herglotz_kernel_from_moments`], so the
/// two agree bit for bit — an arithmetic cross-check, not an approximation.
pub fn herglotz_kernel_from_h(h: &FreeSeries, side: Side) -> Result<CoeffKernel> {
    let m = h.m();
    let mut k = CoeffKernel::empty(h.d(), m, h.trunc())?;
    let h0 = h.constant_coeff();
    let diag = (&h0 + h0.adjoint()).map(|z| z.scale(0.5));
    for alpha in k.words.clone() {
        for beta in k.words.clone() {
            if alpha == beta {
                k.set(alpha.clone(), beta, diag.clone());
                continue;
            }
            // For α ≠ β at most one of the two sums has a term.
            let entry = match side {
                Side::Left => match cancel(&beta.transpose(), &alpha.transpose()) {
                    // α = γ·β (β a suffix of α): term ½ H_γ
                    Cancellation::RightRemainder(gt) => {
                        h.coeff_ref(&gt.transpose()).map(|hg| hg.map(|z| z.scale(0.5)))
                    }
                    // β = γ·α: term ½ H_γ^*
                    Cancellation::LeftRemainder(gt) => h
                        .coeff_ref(&gt.transpose())
                        .map(|hg| hg.adjoint().map(|z| z.scale(0.5))),
                    Cancellation::Zero => None,
                },
                Side::Right => match cancel(&beta, &alpha) {
                    // α = β·γ: term ½ H_γ
                    Cancellation::RightRemainder(g) => {
                        h.coeff_ref(&g).map(|hg| hg.map(|z| z.scale(0.5)))
                    }
                    // β = α·γ: term ½ H_γ^*
                    Cancellation::LeftRemainder(g) => {
                        h.coeff_ref(&g).map(|hg| hg.adjoint().map(|z| z.scale(0.5)))
                    }
                    Cancellation::Zero => None,
                },
            };
            if let Some(e) = entry {
                k.set(alpha.clone(), beta, e);
            }
        }
    }
    Ok(k)
}

/// Gram data of the kernel `B(Z) k(Z,W) B(W)^*` (side-appropriate products) where
/// `k` is the free Szegő kernel: the compression that a Schur multiplier must keep
/// dominated by `k` itself. Block `(α,β)` is `Σ B_μ B_ν^*` over common-prefix
/// (right) or common-suffix (left) decompositions.
pub fn multiplier_compression_kernel(b: &FreeSeries, side: Side) -> Result<CoeffKernel> {
    let m = b.m();
    let mut k = CoeffKernel::empty(b.d(), m, b.trunc())?;
    for alpha in k.words.clone() {
        for beta in k.words.clone() {
            let mut entry = CMat::zeros(m, m);
            let mut nonzero = false;
            for (gamma, mu) in split_iter(&alpha, side) {
                let nu = match strip(&beta, &gamma, side) {
                    Some(nu) => nu,
                    None => continue,
                };
                if let (Some(bmu), Some(bnu)) = (b.coeff_ref(&mu), b.coeff_ref(&nu)) {
                    entry += bmu * bnu.adjoint();
                    nonzero = true;
                }
            }
            if nonzero {
                k.set(alpha.clone(), beta, entry);
            }
        }
    }
    Ok(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::linalg::{c, eye, opnorm};
    use crate::tol;

    #[test]
    fn szego_gram_is_identity() {
        let k = szego_kernel(2, 2, 2).unwrap();
        let g = k.gram();
        assert_eq!(g, eye(7 * 2));
        let w1 = Word::parse(2, "1").unwrap();
        let w2 = Word::parse(2, "2").unwrap();
        assert_eq!(k.entry(&w1, &w1), eye(2));
        assert_eq!(max_abs(&k.entry(&w1, &w2)), 0.0);
    }

    #[test]
    fn dbr_kernel_zero_is_szego() {
        let b = FreeSeries::zero(2, 2, 2);
        for side in [Side::Left, Side::Right] {
            let (k, cert) = dbr_kernel(&b, side).unwrap();
            assert_eq!(cert, SchurCert::L1Certified);
            assert!(k.bit_equal(&szego_kernel(2, 2, 2).unwrap()));
        }
    }

    #[test]
    fn dbr_kernel_scalar_constant() {
        // d=1, B = c: kernel (1-|c|^2) δ_{α,β}
        let b = FreeSeries::constant(1, 3, CMat::from_element(1, 1, c(0.6))).unwrap();
        let (k, _) = dbr_kernel(&b, Side::Right).unwrap();
        let words = enumerate_words(1, 3).unwrap();
        for a in &words {
            for bb in &words {
                let e = k.entry(a, bb)[(0, 0)];
                if a == bb {
                    assert!((e.re - 0.64).abs() < 1e-15 && e.im.abs() < 1e-15);
                } else {
                    assert_eq!(e, c(0.0));
                }
            }
        }
    }

    #[test]
    fn dbr_kernel_shift_is_rank_one() {
        // d=1, B = Z: entry[∅,∅] = 1, everything else 0 — the classical H(b) for
        // b(z) = z is the constants.
        let b = FreeSeries::variable(1, 1, 3, 1).unwrap();
        let (k, _) = dbr_kernel(&b, Side::Right).unwrap();
        let words = enumerate_words(1, 3).unwrap();
        for a in &words {
            for bb in &words {
                let e = k.entry(a, bb)[(0, 0)];
                if a.is_empty() && bb.is_empty() {
                    assert_eq!(e, c(1.0));
                } else {
                    assert_eq!(e, c(0.0));
                }
            }
        }
        let g = k.gram();
        let eig = crate::linalg::herm_eig(&g);
        assert_eq!(eig.vals.iter().filter(|&&l| l > 1e-12).count(), 1);
    }

    #[test]
    fn dbr_gram_equals_complement_of_mult() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        let (d, m, trunc) = (2usize, 2usize, 3usize);
        let fock = TruncatedFock::new(d, m, trunc).unwrap();
        let b = crate::instance::random_free_schur_with(&mut rng, d, m, 2, trunc, 0.9).unwrap();
        for side in [Side::Left, Side::Right] {
            let (k, cert) = dbr_kernel(&b, side).unwrap();
            assert_eq!(cert, SchurCert::L1Certified);
            let g = k.gram();
            let mb = b.mult_matrix(side, &fock).unwrap();
            let complement = eye(fock.dim()) - &mb * mb.adjoint();
            assert!(max_abs(&(g.clone() - complement)) < tol::DBR_GRAM, "side {side:?}");
            // and therefore PSD for a certified contraction
            assert!(psd_check(&g, tol::PSD_REL).unwrap().pass);
            assert!(k.hermitian_defect() < 1e-15);
        }
    }

    #[test]
    fn multiplier_domination() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(37);
        let (d, m, trunc) = (2usize, 1usize, 4usize);
        let mut b = FreeSeries::zero(d, m, trunc);
        for w in enumerate_words(d, 2).unwrap() {
            b.set_coeff(w, crate::linalg::rand_cmat(&mut rng, m, m).map(|z| z.scale(0.12)))
                .unwrap();
        }
        for side in [Side::Left, Side::Right] {
            let compressed = multiplier_compression_kernel(&b, side).unwrap();
            let szego = szego_kernel(d, m, trunc).unwrap();
            // dominated on the safe block
            let safe = trunc - b.degree();
            let diff =
                szego.restrict(safe).unwrap().gram() - compressed.restrict(safe).unwrap().gram();
            assert!(psd_check(&diff, tol::PSD_REL).unwrap().pass, "side {side:?}");
        }
    }

    #[test]
    fn psd_check_rejects_non_hermitian() {
        let mut g = eye(2);
        g[(0, 1)] = c(0.5);
        assert!(matches!(psd_check(&g, 1e-9), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn restrict_cuts_degrees() {
        let k = szego_kernel(2, 1, 3).unwrap();
        let r = k.restrict(1).unwrap();
        assert_eq!(r.gram().nrows(), 3);
        assert!(opnorm(&(r.gram() - eye(3))) < 1e-15);
    }
}
