//! The GNS Hardy space `F²(μ)` of a CP moment functional.
//!
//! The pre-inner product on the free disk algebra tensored with the coefficient
//! space is `⟨a₁ ⊗ h₁, a₂ ⊗ h₂⟩ = ⟨h₁, μ(a₁^* a₂) h₂⟩`; on monomials this is the
//! Gram matrix `G[(α,i),(β,j)] = (μ resolved through prefix cancellation)_{ij}`,
//! which coincides with the right Herglotz kernel Gram. Null directions are
//! quotiented by an eigenvalue threshold, and the row isometry `π(L_j)` acts by
//! word concatenation with its domain restricted to degrees `< N` (safe-block
//! discipline at the truncation boundary).

use crate::error::{Error, Result};
use crate::fock::TruncatedFock;
use crate::herglotz::MomentFunctional;
use crate::kernels::herglotz_kernel_from_moments;
use crate::linalg::{
    on_from_gram, opnorm, pinv, psd_check, range_basis, OnCoords, CMat,
};
use crate::tol;
use crate::word::{enumerate_multi_indices, enumerate_words, Word};
use crate::Side;

/// The truncated GNS space of a moment functional, with the row isometry and the
/// coefficient-space embedding expressed in orthonormal coordinates.
pub struct GnsSpace {
    phi: MomentFunctional,
    fock: TruncatedFock,
    gram: CMat,
    on: OnCoords,
    /// `π(L_j)` in ON coordinates, built from concatenation on degrees `< N`.
    pi: Vec<CMat>,
    /// The embedding `[I⊗]: C^m → F²(μ)` in ON coordinates.
    embed: CMat,
    /// ON basis of the image of the degree `<= N-1` raw block (the safe block).
    safe: CMat,
}

impl GnsSpace {
    pub fn phi(&self) -> &MomentFunctional {
        &self.phi
    }

    pub fn fock(&self) -> &TruncatedFock {
        &self.fock
    }

    pub fn gram(&self) -> &CMat {
        &self.gram
    }

    pub fn rank(&self) -> usize {
        self.on.rank
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.on.eigvals
    }

    pub fn to_on(&self) -> &CMat {
        &self.on.to_on
    }

    pub fn from_on(&self) -> &CMat {
        &self.on.from_on
    }

    pub fn pi(&self, j: usize) -> &CMat {
        &self.pi[j - 1]
    }

    pub fn embed(&self) -> &CMat {
        &self.embed
    }

    pub fn safe_block(&self) -> &CMat {
        &self.safe
    }

    /// `π(L)^α · embed`, the ON coordinates of the monomial classes `L^α ⊗ h`.
    pub fn monomial(&self, w: &Word) -> CMat {
        let mut acc = self.embed.clone();
        for j in w.letters().collect::<Vec<_>>().into_iter().rev() {
            acc = self.pi(j) * acc;
        }
        acc
    }
}

/// Build the GNS space. Errors with [`Error::NotCpAtLevel`] if the moment Gram
/// fails the (relative) PSD certificate.
pub fn build_gns(phi: &MomentFunctional) -> Result<GnsSpace> {
    let fock = TruncatedFock::new(phi.d(), phi.m(), phi.trunc())?;
    let gram = herglotz_kernel_from_moments(phi, Side::Right)?.gram();
    let rep = psd_check(&gram, tol::PSD_REL)?;
    if !rep.pass {
        return Err(Error::NotCpAtLevel { min_eig: rep.min_eig });
    }
    let on = on_from_gram(&gram, tol::RANK_REL);
    let m = phi.m();
    // Domain of the concatenation operators: raw vectors of degree <= N-1 (the
    // leading columns in graded order).
    let sub = fock.dim_up_to(fock.trunc().saturating_sub(1));
    let q_sub = on.to_on.columns(0, sub).into_owned();
    let q_sub_pinv = pinv(&q_sub, tol::RANK_REL);
    let mut pi = Vec::with_capacity(phi.d());
    for j in 1..=phi.d() {
        let s = fock.creation_matrix(Side::Left, j)?;
        let s_cols = s.columns(0, sub).into_owned();
        pi.push(&on.to_on * s_cols * &q_sub_pinv);
    }
    let embed = on.to_on.columns(0, m).into_owned();
    let safe = range_basis(&q_sub, tol::RANK_REL);
    Ok(GnsSpace { phi: phi.clone(), fock, gram, on, pi, embed, safe })
}

/// Max over `|α| <= N-1` of `||φ(L^α) − embed^* π(L)^α embed||`: the finite-level
/// residue of the Stinespring dilation formula.
pub fn stinespring_check(g: &GnsSpace) -> Result<f64> {
    let mut err: f64 = 0.0;
    let upto = g.fock.trunc().saturating_sub(1);
    for w in enumerate_words(g.phi.d(), upto)? {
        let reconstructed = g.embed.adjoint() * g.monomial(&w);
        let expect = g.phi.moment(&w)?;
        err = err.max(opnorm(&(reconstructed - expect)));
    }
    Ok(err)
}

/// Row-isometry and Cuntz (onto-ness) defects of `π(L)`, measured on the safe
/// block (the image of the degree `<= N-1` raw vectors).
pub struct RowIsometryReport {
    pub isometry_defect: f64,
    pub cuntz_defect: f64,
}

pub fn row_isometry_defect(g: &GnsSpace) -> RowIsometryReport {
    let j = &g.safe;
    let r = g.on.rank;
    let mut iso: f64 = 0.0;
    for a in 1..=g.phi.d() {
        for b in 1..=g.phi.d() {
            let prod = g.pi(a).adjoint() * g.pi(b);
            let mut block = j.adjoint() * prod * j;
            if a == b {
                block -= CMat::identity(j.ncols(), j.ncols());
            }
            iso = iso.max(opnorm(&block));
        }
    }
    let mut range_sum = CMat::zeros(r, r);
    for a in 1..=g.phi.d() {
        range_sum += g.pi(a) * g.pi(a).adjoint();
    }
    let cuntz = opnorm(&(j.adjoint() * (CMat::identity(r, r) - range_sum) * j));
    RowIsometryReport { isometry_defect: iso, cuntz_defect: cuntz }
}

/// Squared distance (largest over unit coefficient vectors) from the embedded
/// constants to the span of the nonconstant symmetric monomials inside `F²(μ)`.
///
/// This is a truncation-level indicator for the quasi-extreme property: it is
/// monotone non-increasing in `N` and a genuine upper bound for the infinite
/// quantity; a value near zero suggests (but cannot decide) quasi-extremity.
pub fn quasi_extreme_indicator(phi: &MomentFunctional) -> Result<f64> {
    let fock = TruncatedFock::new(phi.d(), phi.m(), phi.trunc())?;
    let gram = herglotz_kernel_from_moments(phi, Side::Right)?.gram();
    let m = phi.m();
    let dim = fock.dim();
    // Raw matrix whose columns span H²₀: symmetric monomials with |n| >= 1.
    let sym = fock.symmetrizer();
    let multis = enumerate_multi_indices(phi.d(), phi.trunc());
    let nonzero: Vec<usize> = (0..multis.len()).filter(|&k| multis[k].degree() > 0).collect();
    let mut w = CMat::zeros(dim, nonzero.len() * m);
    for (col, &k) in nonzero.iter().enumerate() {
        for (q, z) in sym.vectors.column(k).iter().enumerate() {
            if z.norm() == 0.0 {
                continue;
            }
            for i in 0..m {
                w[(q * m + i, col * m + i)] = *z;
            }
        }
    }
    let e = fock.word_block(&Word::empty(phi.d())?).expect("vacuum block");
    let a = e.adjoint() * &gram * &e; // m×m
    let b = w.adjoint() * &gram * &e; // K×m
    let cgram = w.adjoint() * &gram * &w; // K×K
    let dist = a - b.adjoint() * pinv(&cgram, tol::RANK_REL) * b;
    let eig = crate::linalg::herm_eig(&dist);
    Ok(eig.vals.first().copied().unwrap_or(0.0).max(0.0))
}

/// Gram of the symmetric vectors `Σ_{λ(α)=n} e_α ⊗ e_i` inside the GNS Gram:
/// the compression of `F²(μ)` to the symmetric fiber, used to cross-validate the
/// commutative closed form.
pub fn symmetric_fiber_gram(g: &GnsSpace) -> CMat {
    let inc = g.fock.symmetrizer().inclusion(g.phi.m());
    inc.adjoint() * &g.gram * inc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;
    use crate::herglotz::{moments_from_schur, MomentFunctional};
    use crate::linalg::{c, eye};
    use crate::series::FreeSeries;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn delta_functional(d: usize, m: usize, trunc: usize) -> MomentFunctional {
        let mut phi = MomentFunctional::new(d, m, trunc, eye(m)).unwrap();
        for w in enumerate_words(d, trunc).unwrap() {
            if !w.is_empty() {
                phi.set_moment(w, CMat::zeros(m, m)).unwrap();
            }
        }
        phi
    }

    fn all_ones_d1(trunc: usize) -> MomentFunctional {
        let mut phi = MomentFunctional::new(1, 1, trunc, eye(1)).unwrap();
        for k in 1..=trunc {
            phi.set_moment(Word::new(1, &vec![1; k]).unwrap(), eye(1)).unwrap();
        }
        phi
    }

    #[test]
    fn delta_gns_is_fock() {
        let phi = delta_functional(2, 2, 2);
        let g = build_gns(&phi).unwrap();
        assert_eq!(g.rank(), g.fock().dim());
        assert!(max_abs(&(g.gram() - &eye(g.fock().dim()))) == 0.0);
        // π(L) are the creation matrices, up to the ON basis; check the action on
        // monomials instead: π^α embed are orthonormal columns
        let w = Word::parse(2, "12").unwrap();
        let v = g.monomial(&w);
        assert!(max_abs(&(v.adjoint() * &v - eye(2))) < 1e-12);
        let rep = row_isometry_defect(&g);
        assert!(rep.isometry_defect < 1e-12);
        // free shift is not onto: the vacuum is missed
        assert!((rep.cuntz_defect - 1.0).abs() < 1e-10);
        assert!(stinespring_check(&g).unwrap() < 1e-13);
    }

    #[test]
    fn m1_n0_gram_is_phi_i() {
        let phi = MomentFunctional::new(2, 1, 0, CMat::from_element(1, 1, c(2.0))).unwrap();
        let g = build_gns(&phi).unwrap();
        assert_eq!(g.gram().nrows(), 1);
        assert_eq!(g.gram()[(0, 0)], c(2.0));
    }

    #[test]
    fn all_ones_is_rank_one_cuntz() {
        // d=1 all-ones moments (b(z) = z): the Gram is the all-ones matrix of rank 1
        // and π(L) is the 1×1 unitary [1].
        let phi = all_ones_d1(4);
        let g = build_gns(&phi).unwrap();
        assert_eq!(g.rank(), 1);
        assert!((g.pi(1)[(0, 0)] - c(1.0)).norm() < tol::CLASSICAL);
        let rep = row_isometry_defect(&g);
        assert!(rep.isometry_defect < tol::CLASSICAL);
        assert!(rep.cuntz_defect < tol::CLASSICAL);
        assert!(stinespring_check(&g).unwrap() < tol::CLASSICAL);
    }

    #[test]
    fn embed_norm_matches_phi_i() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let b = crate::instance::random_free_schur_with(&mut rng, 2, 2, 2, 3, 0.8).unwrap();
        let phi = moments_from_schur(&b).unwrap();
        let g = build_gns(&phi).unwrap();
        let n1 = opnorm(&g.embed).powi(2);
        let n2 = opnorm(phi.phi_i());
        assert!((n1 - n2).abs() < tol::EMBED_NORM);
    }

    #[test]
    fn random_schur_gns_checks() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for (d, m, deg, trunc) in [(2usize, 2usize, 2usize, 4usize), (3, 1, 1, 3)] {
            let b = crate::instance::random_free_schur_with(&mut rng, d, m, deg, trunc, 0.85).unwrap();
            let phi = moments_from_schur(&b).unwrap();
            let g = build_gns(&phi).unwrap();
            assert!(stinespring_check(&g).unwrap() < tol::STINESPRING);
            let rep = row_isometry_defect(&g);
            assert!(rep.isometry_defect < tol::ROW_ISOMETRY, "d={d}: {}", rep.isometry_defect);
        }
    }

    #[test]
    fn not_cp_rejected() {
        let mut phi = MomentFunctional::new(1, 1, 1, eye(1)).unwrap();
        // moment larger than phi(I): Gram [[1, 2],[2, 1]] is indefinite
        phi.set_moment(Word::parse(1, "1").unwrap(), CMat::from_element(1, 1, c(2.0)))
            .unwrap();
        assert!(matches!(build_gns(&phi), Err(Error::NotCpAtLevel { .. })));
    }

    #[test]
    fn quasi_extreme_examples() {
        // b = 0 (δ functional): indicator 1
        let phi = delta_functional(2, 1, 3);
        let q = quasi_extreme_indicator(&phi).unwrap();
        assert!((q - 1.0).abs() < 1e-12);

        // d=1 b=z: indicator 0
        let q = quasi_extreme_indicator(&all_ones_d1(4)).unwrap();
        assert!(q < tol::QE_ZERO);

        // d=1 b = c constant: strictly positive (classical non-extreme point);
        // the distance equals Re((1+c)/(1-c)) since all higher moments vanish.
        let b = FreeSeries::constant(1, 3, CMat::from_element(1, 1, c(0.5))).unwrap();
        let phi = moments_from_schur(&b).unwrap();
        let q = quasi_extreme_indicator(&phi).unwrap();
        assert!((q - 3.0).abs() < 1e-12);
        assert!(q > tol::QE_POSITIVE);
    }

    #[test]
    fn quasi_extreme_monotone_in_truncation() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let b = crate::instance::random_free_schur_with(&mut rng, 2, 1, 2, 6, 0.9).unwrap();
        let phi = moments_from_schur(&b).unwrap();
        let mut prev = f64::INFINITY;
        for n in 2..=6 {
            let q = quasi_extreme_indicator(&phi.restrict(n)).unwrap();
            assert!(q <= prev + 1e-12, "N={n}: {q} > {prev}");
            prev = q;
        }
    }
}
